#!/usr/bin/env python3
"""Drive the HTTP play service end to end: create a session as the
landlord, always play the last listed legal move, poll the version
counter like the browser client does, and validate the persisted
record through the replay importer."""

import json
import tempfile

from fastapi.testclient import TestClient

from doudizhu.engine import import_record, record_from_json
from doudizhu.service import create_app

with tempfile.TemporaryDirectory() as data_dir:
    app = create_app(data_dir=data_dir)
    with TestClient(app) as http:
        created = http.post("/api/sessions", json={
            "human_seat": "landlord",
            "agents": {"peasant_down": "rhcp", "peasant_up": "rhcp"},
            "seed": 2024,
        }).json()
        sid, view = created["session_id"], created["view"]
        print(f"session {sid}: holding {view['hand']}")

        while view["winner"] is None:
            move = view["legal_moves"][-1]
            resp = http.post(f"/api/sessions/{sid}/moves", json={
                "seat": "landlord", "cards": move, "version": view["version"]})
            view = resp.json()["view"]
            poll = http.get(f"/api/sessions/{sid}/version").json()
            print(f"  played {move:18s} -> version {poll['version']}, "
                  f"sizes {view['hand_sizes']}")

        print(f"winner: {view['winner']}")
        line = http.get("/api/records/0")
        record = record_from_json(json.dumps(line.json()))
        final = import_record(record)
        print(f"persisted record re-validates; {len(record.entries)} moves, "
              f"winner {final.winner.value}")
