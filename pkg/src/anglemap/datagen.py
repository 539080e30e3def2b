"""Deterministic generators for the synthetic benchmark datasets."""

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import BadN, BadSpec
from .rng import MODEL_TAG, stream

KINDS = ("smiley", "circle", "unif5", "gauss5", "gauss10", "gauss5_s", "gauss5_d")

DEFAULT_N = {
    "smiley": 3000,
    "circle": 900,
    "unif5": 500,
    "gauss5": 500,
    "gauss10": 1000,
    "gauss5_s": 750,
    "gauss5_d": 500,
}

_CLUSTER_DIM = 50


@dataclass
class DatasetSpec:
    kind: str
    n: int | None = None
    seed: int = 0
    dim: int | None = None  # cluster datasets only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadSpec(f"unknown dataset kind {self.kind!r}")
        if self.n is None:
            self.n = DEFAULT_N[self.kind]
        if self.n < 3:
            raise BadN("need at least 3 samples")


def gen_smiley(n: int = 3000, seed: int = 0) -> DataMatrix:
    """Face-outline ring, two offset eye disks, and a half-ring mouth.

    n/4 eye points: radius 0.1*sqrt(U(0,1)), angle U(0, 2*pi), halves
    offset by (0.25, 0.25) and (-0.25, 0.25). n/2 face points: radius
    sqrt(U(0.81, 1)). n/4 mouth points: radius sqrt(U(0.45^2, 0.55^2)),
    angle U(0, pi), y negated. The whole cloud is scaled by 2.
    """
    if n % 4 != 0:
        raise BadN(f"smiley needs n divisible by 4, got {n}")
    rng = stream(seed, MODEL_TAG)
    n_eye, n_face, n_mouth = n // 4, n // 2, n // 4

    er = 0.1 * np.sqrt(rng.uniform(0.0, 1.0, n_eye))
    et = rng.uniform(0.0, 2.0 * np.pi, n_eye)
    eyes = np.column_stack([er * np.sin(et), er * np.cos(et)])
    half = n_eye // 2
    eyes[:half] += (0.25, 0.25)
    eyes[half:] += (-0.25, 0.25)

    fr = np.sqrt(rng.uniform(0.81, 1.0, n_face))
    ft = rng.uniform(0.0, 2.0 * np.pi, n_face)
    face = np.column_stack([fr * np.sin(ft), fr * np.cos(ft)])

    mr = np.sqrt(rng.uniform(0.45**2, 0.55**2, n_mouth))
    mt = rng.uniform(0.0, np.pi, n_mouth)
    mouth = np.column_stack([mr * np.sin(mt), -mr * np.cos(mt)])

    values = 2.0 * np.vstack([eyes, face, mouth])
    labels = ["eye"] * n_eye + ["face"] * n_face + ["mouth"] * n_mouth
    return DataMatrix(values, labels)


def gen_circle(
    n: int = 900, seed: int = 0, noise: float = 0.01, noise_is_std: bool = False
) -> DataMatrix:
    """Radius-3 circle with i.i.d. Gaussian noise per coordinate.

    `noise` is read as a variance by default (std 0.1); set noise_is_std
    to treat it as the standard deviation instead.
    """
    if n < 3:
        raise BadN("need at least 3 samples")
    rng = stream(seed, MODEL_TAG)
    ct = rng.uniform(0.0, 2.0 * np.pi, n)
    xy = np.column_stack([3.0 * np.cos(ct), 3.0 * np.sin(ct)])
    std = noise if noise_is_std else np.sqrt(noise)
    return DataMatrix(xy + rng.normal(0.0, std, size=xy.shape))


def _cluster_sizes(kind: str, n: int) -> list[int]:
    if kind == "gauss5_s":
        sizes = [50, 100, 150, 200, 250]
        if n != sum(sizes):
            raise BadN(f"{kind} has fixed sizes {sizes}; n must be {sum(sizes)}")
        return sizes
    n_clusters = 10 if kind == "gauss10" else 5
    if n % n_clusters != 0:
        raise BadN(f"{kind} needs n divisible by {n_clusters}, got {n}")
    return [n // n_clusters] * n_clusters


def gen_clusters(spec: DatasetSpec) -> DataMatrix:
    """Uniform or Gaussian clusters in 50 dimensions.

    unif5: per-dimension U(0, 1) offsets around centers drawn U(-10, 10).
    gauss5/gauss10: diagonal Gaussians, per-dimension mean U(-10, 10) and
    std U(0.5, 2). gauss5_s: gauss5 with sizes 50..250. gauss5_d: gauss5
    with per-cluster isotropic variances 1..5.
    """
    if spec.kind not in ("unif5", "gauss5", "gauss10", "gauss5_s", "gauss5_d"):
        raise BadSpec(f"{spec.kind!r} is not a cluster dataset")
    d = spec.dim or _CLUSTER_DIM
    sizes = _cluster_sizes(spec.kind, spec.n)
    rng = stream(spec.seed, MODEL_TAG)
    blocks = []
    labels = []
    for c, size in enumerate(sizes):
        if spec.kind == "unif5":
            center = rng.uniform(-10.0, 10.0, d)
            block = center + rng.uniform(0.0, 1.0, (size, d))
        else:
            mean = rng.uniform(-10.0, 10.0, d)
            if spec.kind == "gauss5_d":
                std = np.full(d, np.sqrt(float(c + 1)))
            else:
                std = rng.uniform(0.5, 2.0, d)
            block = mean + std * rng.standard_normal((size, d))
        blocks.append(block)
        labels += [f"cluster{c}"] * size
    return DataMatrix(np.vstack(blocks), labels)


def generate(spec: DatasetSpec) -> DataMatrix:
    """Dispatch on the dataset kind."""
    if spec.kind == "smiley":
        return gen_smiley(spec.n, spec.seed)
    if spec.kind == "circle":
        return gen_circle(spec.n, spec.seed)
    return gen_clusters(spec)
