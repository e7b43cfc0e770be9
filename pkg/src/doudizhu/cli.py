"""Command-line interface.

Subcommands: `enumerate` (action-space census), `play` (matches or the
full winrate grid), `train` (Q-learning runs), `replay` (validate a
record file), `serve` (the HTTP game service). Exit codes: 0 success,
2 bad flags (argparse), 3 record validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .engine import MalformedRecord, Seat, SEATS, import_record, record_from_json, record_from_text
from .movegen import EXPECTED_GROUP_COUNT, enumerate_all_moves


def _load_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; '#' comments and blanks ignored."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def cmd_enumerate(args) -> int:
    catalog = enumerate_all_moves()
    lines = [f"{cat.name}: {n}" for cat, n in sorted(catalog.category_counts().items())]
    lines.append(f"total: {catalog.group_count()}")
    lines.append("convention: distinct card groups, rank-combination kickers, Pass indexed separately")
    text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0 if catalog.group_count() == EXPECTED_GROUP_COUNT else 1


def cmd_play(args) -> int:
    from .arena import make_agent, matrix_to_text, run_match, winrate_matrix

    if args.matrix:
        kinds = [k for k in args.agents.split(",") if k]
        factories = {k: (lambda kk=k: make_agent(kk, args.checkpoint)) for k in kinds}
        grid = winrate_matrix(factories, episodes=args.episodes, repeats=args.repeats, seed=args.seed)
        _emit(matrix_to_text(grid) + "\n", args.out)
        return 0
    kinds = args.agents.split(",")
    if len(kinds) != 3:
        print("play needs --agents landlord,peasant_down,peasant_up kinds", file=sys.stderr)
        return 2
    roles = {seat: make_agent(kind, args.checkpoint) for seat, kind in zip(SEATS, kinds)}
    report = run_match(roles, episodes=args.episodes, repeats=args.repeats, seed=args.seed)
    _emit(report.to_text() + "\n", args.out)
    return 0


def cmd_train(args) -> int:
    from .cql import TrainingConfig, train_adversarial, train_landlord_vs_rhcp

    overrides: dict[str, object] = {}
    if args.config:
        raw = _load_config_file(args.config)
        fields = TrainingConfig.__dataclass_fields__
        for key, value in raw.items():
            if key not in fields or key == "dims":
                print(f"unknown config key {key!r}", file=sys.stderr)
                return 2
            kind = str(fields[key].type)
            overrides[key] = float(value) if "float" in kind else int(value)
    if args.epochs is not None:
        overrides["epochs"] = args.epochs  # the flag outranks the file
    config = replace(TrainingConfig(), **overrides)

    def show(point):
        line = json.dumps(point.__dict__ if hasattr(point, "__dict__") else point)
        print(line, flush=True)
        if args.out:
            with open(args.out, "a") as f:
                f.write(line + "\n")

    if args.adversarial:
        models, _ = train_adversarial(config, seed=args.seed, progress=show)
        if args.checkpoint:
            models[Seat.LANDLORD].save(args.checkpoint)
    else:
        model, _ = train_landlord_vs_rhcp(config, seed=args.seed, progress=show)
        if args.checkpoint:
            model.save(args.checkpoint)
    return 0


def cmd_replay(args) -> int:
    text = Path(args.record).read_text()
    failures = 0
    count = 0
    try:
        if text.lstrip().startswith("{"):
            for line in text.splitlines():
                if line.strip():
                    count += 1
                    import_record(record_from_json(line))
        else:
            count = 1
            import_record(record_from_text(text))
    except MalformedRecord as e:
        print(f"invalid record: {e}", file=sys.stderr)
        failures += 1
    if failures:
        return 3
    print(f"validated {count} record(s)")
    if args.dump_decompositions:
        _dump_decompositions(text)
    return 0


def _dump_decompositions(text: str) -> None:
    from .decomp import decompositions

    record = record_from_json(text.splitlines()[0]) if text.lstrip().startswith("{") else record_from_text(text)
    for seat, hand in record.initial_hands.items():
        sample = decompositions(hand, limit=5, rng=0)
        print(f"{seat.value}: {len(sample.decompositions)} decompositions shown")
        for d in sample.decompositions:
            print("  " + " | ".join(str(g) for g in d.groups))


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, checkpoint=args.checkpoint)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doudizhu")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="print per-category action counts and the total")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("play", help="run matches or a winrate grid")
    p.add_argument("--agents", default="rhcp,random,random",
                   help="seat kinds landlord,down,up; or comma list of kinds with --matrix")
    p.add_argument("--matrix", action="store_true")
    p.add_argument("--episodes", type=int, default=100)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint")
    p.add_argument("--out")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("train", help="train the landlord against rule-based peasants")
    p.add_argument("--epochs", type=int, default=None, help="default 10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--adversarial", action="store_true", help="three independent learners")
    p.add_argument("--checkpoint", help="where to save the trained model")
    p.add_argument("--config", help="flat key=value training-config file")
    p.add_argument("--out", help="append curve points as JSON lines")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("replay", help="validate a record file (table text or JSON lines)")
    p.add_argument("record")
    p.add_argument("--dump-decompositions", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", default="./data")
    p.add_argument("--checkpoint", help="model for cql-seat opponents")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
