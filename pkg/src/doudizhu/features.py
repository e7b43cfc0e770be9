"""Numeric encodings of hands, groups and observations.

A hand becomes 60 binary values: 15 ranks x 4 count slots, thermometer
style (holding c copies of a rank sets its first c slots), which makes
"at least c of a kind" a linear detector and keeps counts recoverable.
Hidden-hand beliefs fill the same layout with per-instance
probabilities. Card groups are embedded into 256 values by a
deterministic auto-encoder whose encoder is four 1D-convolution
branches with windows spanning 1..4 count slots inside a rank (stride
4 = one rank); the latent head sees both the rank-averaged branch
features and the position-preserving maps, and a dense decoder
reconstructs the 60 logits (threshold 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import neural
from .cards import DECK_COUNTS, NUM_RANKS, CardMultiset
from .engine import Observation
from .movegen import ActionCatalog

HAND_DIM = 60
LATENT_DIM = 256
STATE_DIM = HAND_DIM * 3 + LATENT_DIM * 2  # own hand + two beliefs + two last-move latents


def encode_hand(cards: CardMultiset) -> np.ndarray:
    """60 binary values, rank-major; slot j of a rank is set when the
    hand holds more than j copies. Empty multiset encodes to zeros."""
    out = np.zeros(HAND_DIM, dtype=np.float32)
    for i in range(NUM_RANKS):
        c = cards[i]
        if c:
            out[4 * i:4 * i + c] = 1.0
    return out


def decode_hand(encoding: np.ndarray) -> CardMultiset:
    counts = [int(encoding[4 * i:4 * i + 4].sum() + 0.5) for i in range(NUM_RANKS)]
    return CardMultiset(counts)


@dataclass(frozen=True)
class BeliefEncoding:
    """Per-instance probabilities for the two hidden hands, in the hand
    layout: for each rank, the first u slots (u = unseen copies) carry
    the probability that the copy sits in that hand; the two blocks plus
    known placements account for every instance exactly once."""

    previous: np.ndarray
    next: np.ndarray


def infer_belief(observation: Observation) -> BeliefEncoding:
    """Uniform split of every unseen card instance between the two
    hidden hands, proportional to their sizes."""
    seat = observation.seat
    played = [0] * NUM_RANKS
    for _, move in observation.full_history:
        for i in range(NUM_RANKS):
            played[i] += move.cards[i]
    prev_size = observation.hand_sizes[seat.prev]
    next_size = observation.hand_sizes[seat.next]
    hidden = prev_size + next_size
    p_prev = prev_size / hidden if hidden else 0.0
    p_next = next_size / hidden if hidden else 0.0

    prev = np.zeros(HAND_DIM, dtype=np.float32)
    nxt = np.zeros(HAND_DIM, dtype=np.float32)
    for i in range(NUM_RANKS):
        unseen = DECK_COUNTS[i] - observation.own_hand[i] - played[i]
        if unseen:
            prev[4 * i:4 * i + unseen] = p_prev
            nxt[4 * i:4 * i + unseen] = p_next
    return BeliefEncoding(prev, nxt)


class NonConvergence(RuntimeError):
    """Auto-encoder failed to reach the reconstruction target."""


_CONV_CHANNELS = 6


class GroupEncoder:
    """Deterministic card-group auto-encoder (frozen after pretraining)."""

    def __init__(self, params: dict[str, np.ndarray] | None = None,
                 channels: int = _CONV_CHANNELS, latent_dim: int = LATENT_DIM):
        self.channels = channels
        self.latent_dim = latent_dim
        self.convs = [
            neural.Conv1d(f"conv{k}", kernel=k, stride=4, channels=channels, length=HAND_DIM)
            for k in range(1, 5)
        ]
        self.pool = neural.AvgPool(axis=-2)
        feat_dim = 4 * (15 * channels + channels)
        self.to_latent = neural.Dense("latent", feat_dim, latent_dim)
        self.decoder = neural.Dense("decode", latent_dim, HAND_DIM)
        self.params = params if params is not None else {}

    def init(self, rng: np.random.Generator) -> None:
        for conv in self.convs:
            conv.init(rng, self.params)
        self.to_latent.init(rng, self.params)
        self.decoder.init(rng, self.params)

    def param_shapes(self) -> dict[str, tuple]:
        probe = GroupEncoder(channels=self.channels, latent_dim=self.latent_dim)
        probe.init(np.random.default_rng(0))
        return {k: tuple(v.shape) for k, v in probe.params.items()}

    def _encode_with_cache(self, x: np.ndarray):
        caches = []
        parts = []
        for conv in self.convs:
            maps, c_conv = conv.forward(self.params, x)        # (..., 15, ch)
            pooled, c_pool = self.pool.forward(self.params, maps)
            flat = maps.reshape(maps.shape[:-2] + (15 * self.channels,))
            parts.extend([flat, pooled])
            caches.append((c_conv, c_pool, maps.shape))
        feats, c_cat = neural.concat(parts)
        latent, c_lat = self.to_latent.forward(self.params, feats)
        return latent, (caches, c_cat, c_lat)

    def encode(self, x: np.ndarray) -> np.ndarray:
        """Latent codes for (..., 60) group encodings."""
        latent, _ = self._encode_with_cache(np.asarray(x, dtype=np.float32))
        return latent

    def decode(self, latent: np.ndarray) -> np.ndarray:
        logits, _ = self.decoder.forward(self.params, latent)
        return logits

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        return (self.decode(self.encode(x)) > 0.5).astype(np.float32)

    def reconstruction_accuracy(self, x: np.ndarray) -> float:
        """Fraction of rows reproduced exactly after thresholding."""
        return float((self.reconstruct(x) == x).all(axis=-1).mean())

    def save(self, path: str) -> None:
        neural.save_params(path, self.params)

    @classmethod
    def load(cls, path: str, channels: int = _CONV_CHANNELS, latent_dim: int = LATENT_DIM) -> "GroupEncoder":
        enc = cls(channels=channels, latent_dim=latent_dim)
        enc.params = neural.load_params(path, enc.param_shapes())
        return enc


def catalog_encodings(catalog: ActionCatalog) -> np.ndarray:
    """(n_moves, 60) encodings for the whole catalog, Pass at row 0."""
    return np.stack([encode_hand(m.cards) for m in catalog.moves])


def pretrain_autoencoder(catalog: ActionCatalog, rng: np.random.Generator | int | None = None,
                         epochs: int = 200, batch_size: int = 2048,
                         target: float = 0.99, lr: float = 3e-3) -> GroupEncoder:
    """Train the group auto-encoder to reconstruction over every
    catalog group. Raises NonConvergence if the exact-reconstruction
    rate is still below `target` after the epoch budget."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    enc = GroupEncoder()
    enc.init(rng)
    data = catalog_encodings(catalog)[1:]  # groups only; pass is all-zero anyway
    opt = neural.Adam(lr=lr)
    n = data.shape[0]
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = data[order[start:start + batch_size]]
            latent, enc_cache = enc._encode_with_cache(batch)
            logits, dec_cache = enc.decoder.forward(enc.params, latent)
            diff = logits - batch
            grads: dict[str, np.ndarray] = {}
            dlogits = (2.0 / diff.size) * diff
            dlatent = enc.decoder.backward(enc.params, dec_cache, dlogits, grads)
            _encoder_backward(enc, enc_cache, dlatent, grads)
            opt.step(enc.params, grads)
        if epoch >= 20 and epoch % 10 == 0 and enc.reconstruction_accuracy(data) >= 1.0:
            break
    accuracy = enc.reconstruction_accuracy(data)
    if accuracy < target:
        raise NonConvergence(f"reconstruction {accuracy:.4f} below target {target}")
    return enc


def _encoder_backward(enc: GroupEncoder, cache, dlatent: np.ndarray, grads: dict) -> None:
    caches, c_cat, c_lat = cache
    dfeats = enc.to_latent.backward(enc.params, c_lat, dlatent, grads)
    dparts = neural.concat_backward(c_cat, dfeats)
    for conv, (c_conv, c_pool, maps_shape), i in zip(enc.convs, caches, range(4)):
        dflat, dpooled = dparts[2 * i], dparts[2 * i + 1]
        dmaps = dflat.reshape(maps_shape)
        dmaps = dmaps + enc.pool.backward(enc.params, c_pool, dpooled, grads)
        conv.backward(enc.params, c_conv, dmaps, grads)


@dataclass
class StateEncoder:
    """Builds the fixed 692-value state feature vector for a seat:
    own-hand thermometer, both belief blocks, and the latent codes of
    the two most recent moves by the other seats (pass/none map to the
    all-zero group)."""

    encoder: GroupEncoder
    catalog: ActionCatalog
    latents: np.ndarray = field(init=False)

    def __post_init__(self):
        self.latents = self.encoder.encode(catalog_encodings(self.catalog))

    def latent_of(self, move_index: int) -> np.ndarray:
        return self.latents[move_index]

    def state_features(self, observation: Observation) -> np.ndarray:
        belief = infer_belief(observation)
        prev_move, next_move = observation.last_two_moves
        prev_latent = self.latents[self.catalog.index_of(prev_move)] if prev_move else self.latents[0]
        next_latent = self.latents[self.catalog.index_of(next_move)] if next_move else self.latents[0]
        return np.concatenate([
            encode_hand(observation.own_hand),
            belief.previous,
            belief.next,
            prev_latent,
            next_latent,
        ]).astype(np.float32)
