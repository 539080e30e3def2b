"""End-to-end training: spectral denoising, half-sphere initialization,
and adaptive-moment gradient descent over subsampled angle batches."""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .angles import sample_angle_batch
from .data import as_values
from .errors import BadSpec, DegenerateSpread, NonFiniteLoss
from .geometry import SphereEmbedding
from .objective import LOSS_SPACES, LossValue, loss_gradient
from .rng import INIT_TAG, PERMUTE_TAG, stream
from .spectral import pca

INIT_SCHEMES = ("padded_band", "zero_based")

# iteration counts and learning-rate milestones bundled per experiment scale
PRESETS = {
    "synthetic": dict(iterations=1000, schedule_milestones=(350,)),
    "real-short": dict(iterations=50, schedule_milestones=(10, 30)),
    "real-medium": dict(iterations=200, schedule_milestones=(50, 150)),
    "real-long": dict(iterations=250, schedule_milestones=(100,)),
}


@dataclass
class TrainConfig:
    rank_r: int | None = None  # None: min(50, min(n, d)) at run time
    iterations: int = 1000
    learning_rate: float = 0.01
    schedule_milestones: tuple = (350,)
    schedule_factor: float = 0.1
    batch_size: int = 64
    subsample_m: int = 64
    seed: int = 0
    loss_space: str = "cosine"
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    init_scheme: str = "padded_band"

    def __post_init__(self):
        if self.iterations < 0 or self.learning_rate <= 0:
            raise BadSpec("iterations must be >= 0 and learning_rate > 0")
        if self.batch_size < 1 or self.subsample_m < 1:
            raise BadSpec("batch_size and subsample_m must be positive")
        if self.schedule_factor <= 0:
            raise BadSpec("schedule_factor must be positive")
        ms = tuple(int(t) for t in self.schedule_milestones)
        if sorted(ms) != list(ms):
            raise BadSpec("schedule_milestones must be sorted")
        if self.iterations and any(t >= self.iterations for t in ms):
            raise BadSpec("schedule_milestones must be < iterations")
        self.schedule_milestones = ms
        if self.loss_space not in LOSS_SPACES:
            raise BadSpec(f"loss_space must be one of {LOSS_SPACES}")
        if self.init_scheme not in INIT_SCHEMES:
            raise BadSpec(f"init_scheme must be one of {INIT_SCHEMES}")

    def resolve_rank(self, n: int, d: int) -> int:
        r = self.rank_r if self.rank_r is not None else min(50, n, d)
        if not 1 <= r <= min(n, d):
            raise BadSpec(f"rank_r={r} not in [1, {min(n, d)}]")
        return r


@dataclass
class TrainReport:
    loss_trace: list
    final_embedding: SphereEmbedding
    dropped_triples_total: int
    wall_time: float
    config: TrainConfig = None
    rank_used: int = 0


def _spread(values, lo, hi, fallback_rng, what):
    span = values.max() - values.min()
    if span <= 0:
        warnings.warn(
            f"{what} has zero spread; falling back to uniform jitter",
            DegenerateSpread,
        )
        return fallback_rng.uniform(lo, hi, size=values.shape[0])
    return (hi - lo) * (values - values.min()) / span + lo


def initialize_embedding(
    X, seed: int = 0, scheme: str = "padded_band", decomposition=None
) -> SphereEmbedding:
    """Wrap the first two principal components around the half sphere.

    The default scheme maps PC1 to colatitude and PC2 to azimuth, both
    affinely onto [0.2*pi, 0.8*pi], keeping the start away from the poles
    where the loss landscape is flat. The "zero_based" scheme instead maps
    onto [0, 0.7*pi]. A component with zero spread falls back to seeded
    uniform jitter over the same band, with a DegenerateSpread warning.
    """
    A = as_values(X)
    if decomposition is None:
        decomposition = pca(A, min(2, min(A.shape)))
    scores = decomposition.scores
    pc1 = scores[:, 0]
    pc2 = scores[:, 1] if scores.shape[1] > 1 else np.zeros(A.shape[0])
    if scheme == "padded_band":
        lo, hi = 0.2 * np.pi, 0.8 * np.pi
    elif scheme == "zero_based":
        lo, hi = 0.0, 0.7 * np.pi
    else:
        raise BadSpec(f"init scheme {scheme!r} unknown")
    rng = stream(seed, INIT_TAG)
    phi = _spread(pc1, lo, hi, rng, "PC1")
    theta = _spread(pc2, lo, hi, rng, "PC2")
    return SphereEmbedding(phi, theta)


@dataclass
class AdamState:
    """First/second moment accumulators with per-parameter step counts
    (sparse semantics: only touched parameters decay and advance)."""

    m: np.ndarray
    v: np.ndarray
    steps: np.ndarray

    @classmethod
    def zeros(cls, size: int) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size), np.zeros(size, dtype=np.int64))


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
    indices: np.ndarray | None = None,
) -> np.ndarray:
    """One bias-corrected adaptive-moment update, in place on params.

    When indices are given, only those entries are updated; their moments
    decay once and their step counters advance by one.
    """
    if indices is None:
        indices = slice(None)
    g = grads[indices]
    state.steps[indices] += 1
    t = state.steps[indices]
    state.m[indices] = beta1 * state.m[indices] + (1.0 - beta1) * g
    state.v[indices] = beta2 * state.v[indices] + (1.0 - beta2) * g * g
    m_hat = state.m[indices] / (1.0 - beta1**t)
    v_hat = state.v[indices] / (1.0 - beta2**t)
    params[indices] -= lr * m_hat / (np.sqrt(v_hat) + epsilon)
    return params


def wrap_coordinates(phi: np.ndarray, theta: np.ndarray):
    """Fold phi back into [0, pi] by reflection through the poles and
    theta into [0, 2*pi); the represented unit vector is unchanged."""
    phi = np.mod(phi, 2.0 * np.pi)
    over = phi > np.pi
    phi = np.where(over, 2.0 * np.pi - phi, phi)
    theta = np.where(over, theta + np.pi, theta)
    return phi, np.mod(theta, 2.0 * np.pi)


def anchor_batches(n: int, batch_size: int, seed: int, iteration: int):
    """Partition a reshuffled permutation of all samples into anchor
    batches for one iteration; every index is anchored exactly once."""
    if batch_size > n:
        raise BadSpec(f"batch_size={batch_size} exceeds n={n}")
    perm = stream(seed, PERMUTE_TAG, iteration).permutation(n)
    return [perm[lo : lo + batch_size] for lo in range(0, n, batch_size)]


def fit(X, cfg: TrainConfig, progress=None) -> TrainReport:
    """Run the full pipeline on X and return the trained embedding.

    Per iteration: reshuffle the anchor permutation and walk it in batches
    of batch_size, so every sample is anchored exactly once per iteration.
    Each batch draws fresh context samples, evaluates the loss gradient on
    the denoised scores' angle targets, and applies one adaptive-moment
    update to the touched coordinates, which are then re-wrapped. The
    learning rate decays by schedule_factor at each milestone iteration.
    `progress(iteration, loss_value, lr)` is called, when given, once per
    iteration with the pooled loss over the iteration's batches.

    Raises
    ------
    NonFiniteLoss
        If the loss or gradient stops being finite; carries the iteration.
    """
    t0 = time.perf_counter()
    A = as_values(X)
    n, d = A.shape
    r = cfg.resolve_rank(n, d)

    dec = pca(A, max(r, min(2, min(n, d))))
    X_hat = dec.scores[:, :r]
    emb = initialize_embedding(
        A, seed=cfg.seed, scheme=cfg.init_scheme, decomposition=dec
    )

    phi = emb.phi.copy()
    theta = emb.theta.copy()
    state_phi = AdamState.zeros(n)
    state_theta = AdamState.zeros(n)
    milestones = set(cfg.schedule_milestones)

    # lr recomputed from the milestone count so the post-schedule value is
    # exactly learning_rate * schedule_factor ** len(milestones)
    passed = 0
    lr = cfg.learning_rate
    trace: list[LossValue] = []
    dropped_total = 0
    for it in range(cfg.iterations):
        if it in milestones:
            passed += 1
            lr = cfg.learning_rate * cfg.schedule_factor**passed
        sq_sum = 0.0
        count = 0
        dropped = 0
        for anchors in anchor_batches(n, cfg.batch_size, cfg.seed, it):
            batch = sample_angle_batch(
                X_hat, anchors, cfg.subsample_m, seed=cfg.seed, iteration=it
            )
            current = SphereEmbedding(phi, theta)
            value, grad = loss_gradient(batch, current, cfg.loss_space)
            if not (
                np.isfinite(value.value)
                and np.all(np.isfinite(grad.d_phi))
                and np.all(np.isfinite(grad.d_theta))
            ):
                raise NonFiniteLoss(it)
            adam_step(
                phi,
                grad.d_phi,
                state_phi,
                lr,
                cfg.beta1,
                cfg.beta2,
                cfg.epsilon,
                grad.touched,
            )
            adam_step(
                theta,
                grad.d_theta,
                state_theta,
                lr,
                cfg.beta1,
                cfg.beta2,
                cfg.epsilon,
                grad.touched,
            )
            phi, theta = wrap_coordinates(phi, theta)
            sq_sum += value.value**2 * value.triple_count
            count += value.triple_count
            dropped += value.dropped
        pooled = LossValue(
            value=float(np.sqrt(sq_sum / max(count, 1))),
            triple_count=count,
            dropped=dropped,
        )
        trace.append(pooled)
        dropped_total += dropped
        if progress is not None:
            progress(it, pooled, lr)

    return TrainReport(
        loss_trace=trace,
        final_embedding=SphereEmbedding(phi, theta),
        dropped_triples_total=dropped_total,
        wall_time=time.perf_counter() - t0,
        config=cfg,
        rank_used=r,
    )
