"""Combinational Q-learning: decomposition scoring, move scoring,
double-Q training with replay.

Each decision is split in two. In the combination stage the agent
scores whole hand decompositions: every group's latent code runs
through a shared residual stack, the groups of a decomposition are
max-pooled element-wise into a global feature (order-invariant by
construction), and a dense head maps [global feature, state features]
to Q_c. In the fine stage a second head scores each group of the chosen
decomposition from [its local feature, the global feature, state
features], restricted to groups that actually beat the incumbent, plus
Pass (scored on the all-zero group) when responding.

Replay stores the two stages as separate transitions: (s_c, a_c, 0)
bootstraps into its own fine stage, and (s_f, a_f, r) bootstraps into
the agent's next combination stage (terminal moves carry the game
reward). Targets use double Q-learning: the online network selects the
successor argmax, the target network evaluates it. The group encoder
stays frozen at its pretrained weights; the residual stacks train.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import neural
from .decomp import decompositions
from .engine import Observation, Seat, apply_move, deal, observe, rewards
from .features import LATENT_DIM, STATE_DIM, GroupEncoder, StateEncoder
from .movegen import ActionCatalog, Move, enumerate_all_moves
from .rhcp import RhcpConfig, RhcpSolver


@dataclass(frozen=True)
class CqlDims:
    """Residual-stack widths. The default is a desk-scale setting that
    trains in minutes on a CPU; full_scale() is the wide configuration
    (feature stack 256/512/1024, heads 512/256/128) for long runs."""

    fc1: tuple[int, ...] = (128, 128, 128)
    head: tuple[int, ...] = (128, 128, 128)

    @classmethod
    def full_scale(cls) -> "CqlDims":
        return cls(fc1=(256, 512, 1024), head=(512, 256, 128))


@dataclass(frozen=True)
class TrainingConfig:
    batch_size: int = 8
    steps_per_epoch: int = 2500
    update_frequency: int = 4
    memory_size: int = 3000
    sampling_limit: int = 100
    gamma: float = 1.0
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_anneal_epochs: int = 10
    target_sync: int = 500
    learning_rate: float = 1e-4
    epochs: int = 10
    eval_episodes: int = 50
    dims: CqlDims = field(default_factory=CqlDims)

    def __post_init__(self):
        positive = (self.batch_size, self.steps_per_epoch, self.update_frequency,
                    self.memory_size, self.sampling_limit, self.target_sync, self.epochs)
        if any(v <= 0 for v in positive):
            raise ValueError("training config values must be positive")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= eps <= 1.0:
                raise ValueError("epsilon must lie in [0, 1]")


@dataclass
class AugmentedTransition:
    """One replay item. Combination stage: candidates is the tuple of
    sampled decompositions (tuples of catalog indices) and the successor
    is the paired fine-stage transition. Fine stage: candidates is the
    restricted playable index list (0 = Pass), decomp_ids the full
    chosen decomposition, and the successor the agent's next
    combination transition (None when terminal)."""

    stage: str  # "c" | "f"
    state: np.ndarray
    candidates: tuple
    chosen: int
    reward: int = 0
    terminal: bool = False
    successor: "AugmentedTransition | None" = None
    decomp_ids: tuple[int, ...] = ()


class InsufficientBuffer(RuntimeError):
    pass


class ReplayBuffer:
    """Uniform-sampling FIFO ring."""

    def __init__(self, capacity: int = 3000):
        self.capacity = capacity
        self._items: list[AugmentedTransition] = []
        self._next = 0

    def push(self, item: AugmentedTransition) -> None:
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._next] = item
            self._next = (self._next + 1) % self.capacity

    def sample(self, n: int, rng: random.Random) -> list[AugmentedTransition]:
        if len(self._items) < n:
            raise InsufficientBuffer(f"buffer holds {len(self._items)} < batch {n}")
        return [self._items[rng.randrange(len(self._items))] for _ in range(n)]

    def __len__(self) -> int:
        return len(self._items)


class CqlModel:
    """Shared group feature stack plus the two Q heads, with online and
    target parameter sets. The group encoder (and the catalog latent
    table derived from it) is frozen."""

    def __init__(self, state_encoder: StateEncoder, dims: CqlDims = CqlDims(),
                 rng: np.random.Generator | int | None = None):
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        self.state_encoder = state_encoder
        self.catalog = state_encoder.catalog
        self.dims = dims

        widths = [LATENT_DIM, *dims.fc1]
        self.fc1 = neural.Sequential([
            neural.ResidualBlock(f"fc1.b{i}", widths[i], widths[i + 1])
            for i in range(len(dims.fc1))
        ])
        self.feature_dim = widths[-1]

        def head(name: str, in_dim: int) -> neural.Sequential:
            hw = [in_dim, *dims.head]
            blocks = [neural.ResidualBlock(f"{name}.b{i}", hw[i], hw[i + 1])
                      for i in range(len(dims.head))]
            return neural.Sequential(blocks + [neural.Dense(f"{name}.out", hw[-1], 1)])

        self.fc2 = head("fc2", self.feature_dim + STATE_DIM)
        self.fc3 = head("fc3", 2 * self.feature_dim + STATE_DIM)

        self.online: dict[str, np.ndarray] = {}
        self.fc1.init(rng, self.online)
        self.fc2.init(rng, self.online)
        self.fc3.init(rng, self.online)
        self.target = {k: v.copy() for k, v in self.online.items()}

        self._feat_cache: dict[tuple[int, bool], np.ndarray] = {}

    # -- feature plumbing ---------------------------------------------------

    def invalidate_cache(self, target_too: bool = False) -> None:
        if target_too:
            self._feat_cache.clear()
        else:
            self._feat_cache = {k: v for k, v in self._feat_cache.items() if not k[1]}

    def group_features(self, ids: tuple[int, ...], online: bool = True) -> np.ndarray:
        """(len(ids), F) local features; cached until the parameters move."""
        key_flag = online
        missing = [i for i in ids if (i, key_flag) not in self._feat_cache]
        if missing:
            latents = self.state_encoder.latents[np.array(missing)]
            params = self.online if online else self.target
            feats, _ = self.fc1.forward(params, latents)
            for i, row in zip(missing, feats):
                self._feat_cache[(i, key_flag)] = row
        return np.stack([self._feat_cache[(i, key_flag)] for i in ids])

    def sync_target(self) -> None:
        self.target = {k: v.copy() for k, v in self.online.items()}
        self.invalidate_cache(target_too=True)

    # -- forward scoring ----------------------------------------------------

    def dpn_q(self, state: np.ndarray, decomps: tuple[tuple[int, ...], ...],
              online: bool = True) -> tuple[np.ndarray, list[np.ndarray]]:
        """Q_c for every decomposition; also returns each decomposition's
        max-pooled global feature for reuse by the fine stage.

        Decompositions are canonicalized (sorted, deduplicated) before
        scoring, so reordered or repeated ones share the result bit for
        bit (batched matmuls are not position-stable)."""
        params = self.online if online else self.target
        keys = [tuple(sorted(ids)) for ids in decomps]
        unique = tuple(dict.fromkeys(keys))
        all_ids = tuple(sorted({i for ids in unique for i in ids}))
        feats = self.group_features(all_ids, online)
        row = {i: k for k, i in enumerate(all_ids)}
        globals_u = [feats[[row[i] for i in ids]].max(axis=0) for ids in unique]
        x = np.concatenate([np.stack(globals_u), np.repeat(state[None, :], len(unique), 0)], axis=1)
        q, _ = self.fc2.forward(params, x)
        slot = {ids: k for k, ids in enumerate(unique)}
        order = [slot[k] for k in keys]
        return q[order, 0], [globals_u[k] for k in order]

    def mpn_q(self, candidate_ids: tuple[int, ...], f_g: np.ndarray,
              state: np.ndarray, online: bool = True) -> np.ndarray:
        """Q_f for each candidate group (index 0 = Pass scores the
        all-zero group's latent). Duplicate groups score identically."""
        params = self.online if online else self.target
        unique = tuple(dict.fromkeys(candidate_ids))
        local = self.group_features(unique, online)
        n = len(unique)
        x = np.concatenate([local, np.repeat(f_g[None, :], n, 0), np.repeat(state[None, :], n, 0)], axis=1)
        q, _ = self.fc3.forward(params, x)
        slot = {i: k for k, i in enumerate(unique)}
        return q[[slot[i] for i in candidate_ids], 0]

    # -- training forward/backward for one transition ------------------------

    def q_of_transition(self, t: AugmentedTransition, grads: dict | None = None,
                        dpred: float = 0.0) -> float:
        """Online Q of the chosen action; when `grads` is given, also
        accumulates d(loss)/d(params) for an upstream gradient `dpred`."""
        params = self.online
        if t.stage == "c":
            ids = t.candidates[t.chosen]
            latents = self.state_encoder.latents[np.array(ids)]
            feats, c_fc1 = self.fc1.forward(params, latents)
            argrows = np.argmax(feats, axis=0)
            f_g = feats[argrows, np.arange(feats.shape[1])]
            x = np.concatenate([f_g, t.state])[None, :]
            q, c_fc2 = self.fc2.forward(params, x)
            if grads is not None:
                dx = self.fc2.backward(params, c_fc2, np.array([[dpred]], dtype=np.float32), grads)
                d_fg = dx[0, : self.feature_dim]
                dfeats = np.zeros_like(feats)
                dfeats[argrows, np.arange(feats.shape[1])] = d_fg
                self.fc1.backward(params, c_fc1, dfeats, grads)
            return float(q[0, 0])

        ids = t.decomp_ids
        latents = self.state_encoder.latents[np.array(ids)]
        feats, c_fc1 = self.fc1.forward(params, latents)
        argrows = np.argmax(feats, axis=0)
        f_g = feats[argrows, np.arange(feats.shape[1])]
        chosen_id = t.candidates[t.chosen]
        local_latent = self.state_encoder.latents[np.array([chosen_id])]
        local, c_local = self.fc1.forward(params, local_latent)
        x = np.concatenate([local[0], f_g, t.state])[None, :]
        q, c_fc3 = self.fc3.forward(params, x)
        if grads is not None:
            dx = self.fc3.backward(params, c_fc3, np.array([[dpred]], dtype=np.float32), grads)
            F = self.feature_dim
            d_local = dx[0, :F]
            d_fg = dx[0, F:2 * F]
            self.fc1.backward(params, c_local, d_local[None, :], grads)
            dfeats = np.zeros_like(feats)
            dfeats[argrows, np.arange(feats.shape[1])] = d_fg
            self.fc1.backward(params, c_fc1, dfeats, grads)
        return float(q[0, 0])

    # -- targets --------------------------------------------------------------

    def double_q_target(self, t: AugmentedTransition, gamma: float) -> float:
        """reward + gamma * Q_target(successor, argmax_online), zero
        bootstrap at terminal."""
        if t.terminal or t.successor is None:
            return float(t.reward)
        s = t.successor
        if s.stage == "f":
            _, globals_ = self.dpn_q(s.state, (s.decomp_ids,), online=True)
            f_g = globals_[0]
            q_online = self.mpn_q(s.candidates, f_g, s.state, online=True)
            best = int(np.argmax(q_online))
            _, tglobals = self.dpn_q(s.state, (s.decomp_ids,), online=False)
            q_target = self.mpn_q(s.candidates, tglobals[0], s.state, online=False)
            return float(t.reward) + gamma * float(q_target[best])
        q_online, _ = self.dpn_q(s.state, s.candidates, online=True)
        best = int(np.argmax(q_online))
        q_target, _ = self.dpn_q(s.state, s.candidates, online=False)
        return float(t.reward) + gamma * float(q_target[best])

    # -- persistence ----------------------------------------------------------

    def save(self, path: str) -> None:
        out = {"online." + k: v for k, v in self.online.items()}
        out.update({"encoder." + k: v for k, v in self.state_encoder.encoder.params.items()})
        out["meta.fc1"] = np.array(self.dims.fc1, dtype=np.int64)
        out["meta.head"] = np.array(self.dims.head, dtype=np.int64)
        neural.save_params(path, out)

    @classmethod
    def load(cls, path: str, catalog: ActionCatalog | None = None) -> "CqlModel":
        raw = neural.load_params(path)
        dims = CqlDims(fc1=tuple(int(x) for x in raw["meta.fc1"]),
                       head=tuple(int(x) for x in raw["meta.head"]))
        encoder = GroupEncoder()
        encoder.params = {k[len("encoder."):]: v for k, v in raw.items() if k.startswith("encoder.")}
        state_encoder = StateEncoder(encoder, catalog or enumerate_all_moves())
        model = cls(state_encoder, dims, rng=0)
        online = {k[len("online."):]: v for k, v in raw.items() if k.startswith("online.")}
        for k in model.online:
            if k not in online or online[k].shape != model.online[k].shape:
                raise ValueError(f"checkpoint missing or misshaped parameter {k}")
        model.online = online
        model.sync_target()
        return model


def select_action(observation: Observation, model: CqlModel, epsilon: float,
                  rng: random.Random, sampling_limit: int = 100,
                  ) -> tuple[Move, AugmentedTransition, AugmentedTransition]:
    """Two-stage epsilon-greedy decision; returns the move plus the
    combination- and fine-stage transitions (the latter unfinalized:
    its reward/successor are set when the agent acts next or the game
    ends)."""
    catalog = model.catalog
    sample = decompositions(observation.own_hand, sampling_limit, rng)
    decomp_ids = tuple(
        tuple(catalog.index_of(g) for g in d.groups) for d in sample.decompositions
    )
    state = model.state_encoder.state_features(observation)

    q_c, globals_ = model.dpn_q(state, decomp_ids)
    if epsilon > 0 and rng.random() < epsilon:
        chosen_d = rng.randrange(len(decomp_ids))
    else:
        chosen_d = int(np.argmax(q_c))

    incumbent = observation.incumbent[1] if observation.incumbent else None
    if incumbent is None:
        candidate_ids = decomp_ids[chosen_d]
    else:
        from .cards import beats

        playable = tuple(
            i for i in decomp_ids[chosen_d] if beats(catalog.moves[i], incumbent)
        )
        candidate_ids = (0,) + playable  # 0 = Pass

    q_f = model.mpn_q(candidate_ids, globals_[chosen_d], state)
    if epsilon > 0 and rng.random() < epsilon:
        chosen_f = rng.randrange(len(candidate_ids))
    else:
        chosen_f = int(np.argmax(q_f))

    t_f = AugmentedTransition(
        stage="f", state=state, candidates=candidate_ids, chosen=chosen_f,
        decomp_ids=decomp_ids[chosen_d],
    )
    t_c = AugmentedTransition(
        stage="c", state=state, candidates=decomp_ids, chosen=chosen_d, successor=t_f,
    )
    return catalog.moves[candidate_ids[chosen_f]], t_c, t_f


def train_step(model: CqlModel, buffer: ReplayBuffer, config: TrainingConfig,
               rng: random.Random, optimizer: neural.Adam, step: int) -> float:
    """One double-Q update on a uniform batch; syncs the target network
    every `config.target_sync` steps."""
    batch = buffer.sample(config.batch_size, rng)
    targets = [model.double_q_target(t, config.gamma) for t in batch]
    grads: dict[str, np.ndarray] = {}
    loss = 0.0
    for t, target in zip(batch, targets):
        pred = model.q_of_transition(t)
        dpred = 2.0 * (pred - target) / config.batch_size
        model.q_of_transition(t, grads=grads, dpred=dpred)
        loss += (pred - target) ** 2
    optimizer.step(model.online, grads)
    model.invalidate_cache()
    if step % config.target_sync == 0:
        model.sync_target()
    return loss / config.batch_size


class CqlLearner:
    """Wires one seat's decisions to the replay buffer during games."""

    def __init__(self, model: CqlModel, config: TrainingConfig, seat: Seat, rng: random.Random):
        self.model = model
        self.config = config
        self.seat = seat
        self.rng = rng
        self.buffer = ReplayBuffer(config.memory_size)
        self.pending_f: AugmentedTransition | None = None
        self.decisions = 0

    def act(self, observation: Observation, epsilon: float) -> Move:
        move, t_c, t_f = select_action(
            observation, self.model, epsilon, self.rng, self.config.sampling_limit
        )
        if self.pending_f is not None:
            self.pending_f.successor = t_c
            self.buffer.push(self.pending_f)
        self.buffer.push(t_c)
        self.pending_f = t_f
        self.decisions += 1
        return move

    def finish_episode(self, reward: int) -> None:
        if self.pending_f is not None:
            self.pending_f.reward = reward
            self.pending_f.terminal = True
            self.buffer.push(self.pending_f)
            self.pending_f = None


@dataclass
class CurvePoint:
    epoch: int
    winrate: float
    mean_loss: float


def _epsilon(config: TrainingConfig, step: int) -> float:
    anneal_steps = config.epsilon_anneal_epochs * config.steps_per_epoch
    frac = min(1.0, step / anneal_steps) if anneal_steps else 1.0
    return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start)


def evaluate_landlord(model: CqlModel, episodes: int, seed: int,
                      rhcp_config: RhcpConfig | None = None,
                      sampling_limit: int = 100) -> float:
    """Greedy landlord winrate against two partitioning peasants."""
    wins = 0
    solvers = {Seat.PEASANT_DOWN: RhcpSolver(), Seat.PEASANT_UP: RhcpSolver()}
    for ep in range(episodes):
        rng = random.Random(seed * 100003 + ep)
        state = deal(rng)
        while not state.is_terminal():
            seat = state.to_act
            obs = observe(state, seat)
            if seat is Seat.LANDLORD:
                move, _, _ = select_action(obs, model, 0.0, rng, sampling_limit)
            else:
                inc = obs.incumbent[1] if obs.incumbent else None
                move = solvers[seat].act(obs.own_hand, inc, rhcp_config)
            state = apply_move(state, move)
        if state.winner is Seat.LANDLORD:
            wins += 1
    return wins / episodes


def train_landlord_vs_rhcp(config: TrainingConfig, seed: int = 0,
                           model: CqlModel | None = None,
                           encoder: GroupEncoder | None = None,
                           progress=None) -> tuple[CqlModel, list[CurvePoint]]:
    """Single-seat training: a learning landlord against two fixed
    partitioning peasants. One optimizer update per `update_frequency`
    landlord decisions, `steps_per_epoch` updates per epoch, greedy
    evaluation after each epoch."""
    from .features import pretrain_autoencoder

    catalog = enumerate_all_moves()
    if model is None:
        if encoder is None:
            encoder = pretrain_autoencoder(catalog, rng=seed)
        model = CqlModel(StateEncoder(encoder, catalog), config.dims, rng=seed)
    rng = random.Random(seed)
    learner = CqlLearner(model, config, Seat.LANDLORD, rng)
    optimizer = neural.Adam(lr=config.learning_rate)
    curve: list[CurvePoint] = []

    step = 0
    losses: list[float] = []
    state = None
    solvers = {Seat.PEASANT_DOWN: RhcpSolver(), Seat.PEASANT_UP: RhcpSolver()}
    for epoch in range(1, config.epochs + 1):
        updates_this_epoch = 0
        while updates_this_epoch < config.steps_per_epoch:
            if state is None or state.is_terminal():
                if state is not None and state.is_terminal():
                    learner.finish_episode(rewards(state)[Seat.LANDLORD])
                state = deal(rng)
            seat = state.to_act
            obs = observe(state, seat)
            if seat is Seat.LANDLORD:
                move = learner.act(obs, _epsilon(config, step))
                if learner.decisions % config.update_frequency == 0 and len(learner.buffer) >= config.batch_size:
                    step += 1
                    updates_this_epoch += 1
                    losses.append(train_step(model, learner.buffer, config, rng, optimizer, step))
            else:
                inc = obs.incumbent[1] if obs.incumbent else None
                move = solvers[seat].act(obs.own_hand, inc)
            state = apply_move(state, move)
        winrate = evaluate_landlord(model, config.eval_episodes, seed=(seed ^ 0x5EED) + epoch,
                                    sampling_limit=config.sampling_limit)
        mean_loss = sum(losses) / len(losses) if losses else 0.0
        curve.append(CurvePoint(epoch, winrate, mean_loss))
        if progress:
            progress(curve[-1])
        losses.clear()
    return model, curve


def train_adversarial(config: TrainingConfig, seed: int = 0,
                      encoder: GroupEncoder | None = None,
                      progress=None) -> tuple[dict[Seat, CqlModel], list[dict]]:
    """Three independent learners, one per seat, trained simultaneously
    from scratch against each other."""
    from .features import pretrain_autoencoder

    catalog = enumerate_all_moves()
    if encoder is None:
        encoder = pretrain_autoencoder(catalog, rng=seed)
    state_encoder = StateEncoder(encoder, catalog)
    rng = random.Random(seed)
    models = {s: CqlModel(state_encoder, config.dims, rng=seed * 3 + i) for i, s in
              enumerate((Seat.LANDLORD, Seat.PEASANT_DOWN, Seat.PEASANT_UP))}
    learners = {s: CqlLearner(models[s], config, s, random.Random(seed * 7919 + i))
                for i, s in enumerate(models)}
    optimizers = {s: neural.Adam(lr=config.learning_rate) for s in models}

    steps = {s: 0 for s in models}
    curve: list[dict] = []
    state = None
    for epoch in range(1, config.epochs + 1):
        updates = 0
        while updates < config.steps_per_epoch:
            if state is None or state.is_terminal():
                if state is not None and state.is_terminal():
                    r = rewards(state)
                    for s, learner in learners.items():
                        learner.finish_episode(r[s])
                state = deal(rng)
            seat = state.to_act
            learner = learners[seat]
            move = learner.act(observe(state, seat), _epsilon(config, steps[seat]))
            if learner.decisions % config.update_frequency == 0 and len(learner.buffer) >= config.batch_size:
                steps[seat] += 1
                train_step(models[seat], learner.buffer, config, learner.rng,
                           optimizers[seat], steps[seat])
                if seat is Seat.LANDLORD:
                    updates += 1
            state = apply_move(state, move)
        point = {"epoch": epoch,
                 "landlord_winrate": evaluate_landlord(models[Seat.LANDLORD],
                                                       config.eval_episodes,
                                                       seed=(seed ^ 0xADD) + epoch,
                                                       sampling_limit=config.sampling_limit)}
        curve.append(point)
        if progress:
            progress(point)
    return models, curve
