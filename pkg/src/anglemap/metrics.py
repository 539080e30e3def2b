"""Embedding-quality metrics comparing a sphere embedding against its
source matrix: angle, distance, neighborhood, and density preservation.

Sphere-side distances are always arc lengths (geodesics). The angle score
is computed in angle units (arc-cosine applied) even though training runs
on cosines. Three of the scores live in [-1, 1]; the Jaccard-based
neighborhood score is reported raw in [0, 1].
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist, squareform
from scipy.stats import rankdata

from .data import as_values
from .errors import ConstantVector, EmptyCollection, KTooLarge, RowMismatch
from .geometry import SphereEmbedding, vertex_angle_cosines
from .rng import METRIC_TAG, stream
from .spectral import pca

_DEGEN_EPS = 1e-12


class RankedVector(NamedTuple):
    values: np.ndarray
    ranks: np.ndarray  # fractional ranks in 1..N, ties averaged


def ranked(values) -> RankedVector:
    v = np.asarray(values, dtype=np.float64)
    return RankedVector(v, rankdata(v, method="average"))


def pearson(u, v) -> float:
    """Pearson correlation; raises ConstantVector on zero variance."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1 or u.size < 2:
        raise RowMismatch("pearson needs two equal-length vectors of size >= 2")
    du = u - u.mean()
    dv = v - v.mean()
    su = np.sqrt(np.sum(du * du))
    sv = np.sqrt(np.sum(dv * dv))
    if su <= _DEGEN_EPS * max(1.0, np.abs(u).max()) or sv <= _DEGEN_EPS * max(
        1.0, np.abs(v).max()
    ):
        raise ConstantVector("zero variance input")
    return float(np.clip(np.sum(du * dv) / (su * sv), -1.0, 1.0))


def spearman(u, v) -> float:
    """Rank correlation: Pearson over tie-averaged fractional ranks."""
    return pearson(ranked(u).ranks, ranked(v).ranks)


def _check_rows(X, Y: SphereEmbedding) -> np.ndarray:
    A = as_values(X)
    if A.shape[0] != Y.n:
        raise RowMismatch(f"{A.shape[0]} data rows vs {Y.n} embedded points")
    return A


def _arc_matrix(Y: SphereEmbedding) -> np.ndarray:
    v = Y.unit_vectors()
    return np.arccos(np.clip(v @ v.T, -1.0, 1.0))


def distance_preservation(X, Y: SphereEmbedding) -> float:
    """Spearman correlation between all pairwise Euclidean distances in X
    and the corresponding arc distances in Y."""
    A = _check_rows(X, Y)
    iu = np.triu_indices(Y.n, k=1)
    return spearman(pdist(A), _arc_matrix(Y)[iu])


def _knn_sets(D: np.ndarray, k: int) -> np.ndarray:
    # stable sort: ties in distance resolve to the smaller index
    D = D.copy()
    np.fill_diagonal(D, np.inf)
    return np.argsort(D, axis=1, kind="stable")[:, :k]


def neighborhood_preservation(X, Y: SphereEmbedding, k: int = 50, r_denoise: int = 50) -> float:
    """Mean Jaccard overlap of k-nearest-neighbor sets.

    Data-side neighbors are computed on the rank-r denoised scores,
    sphere-side neighbors by arc distance. Score in [0, 1].
    """
    A = _check_rows(X, Y)
    n = Y.n
    if not 1 <= k < n:
        raise KTooLarge(f"k={k} must be in [1, n-1={n - 1}]")
    r = min(r_denoise, min(A.shape))
    scores = pca(A, r).scores
    high = _knn_sets(squareform(pdist(scores)), k)
    low = _knn_sets(_arc_matrix(Y), k)
    jacc = np.empty(n)
    for i in range(n):
        inter = np.intersect1d(high[i], low[i], assume_unique=True).size
        jacc[i] = inter / (2 * k - inter)
    return float(jacc.mean())


def density_preservation(X, Y: SphereEmbedding, nn: int = 25) -> float:
    """Pearson correlation of local point counts at a fixed radius.

    The radius per space is the mean distance to the nn-th nearest
    neighbor (Euclidean on raw X, arc on Y); counts exclude the point
    itself and include boundary equality.
    """
    A = _check_rows(X, Y)
    n = Y.n
    if not 1 <= nn < n:
        raise KTooLarge(f"nn={nn} must be in [1, n-1={n - 1}]")
    DX = squareform(pdist(A))
    DY = _arc_matrix(Y)
    counts = []
    for D in (DX, DY):
        E = D.copy()
        np.fill_diagonal(E, np.inf)
        kth = np.sort(E, axis=1)[:, nn - 1]
        radius = kth.mean()
        counts.append(np.sum(E <= radius, axis=1))
    return pearson(counts[0].astype(float), counts[1].astype(float))


def angle_preservation(
    X,
    Y: SphereEmbedding,
    m: int = 64,
    seed: int = 0,
    use_denoised: bool = False,
    r_denoise: int = 50,
) -> float:
    """Pearson correlation between pooled high-dimensional and spherical
    angles over seeded anchor/context samples.

    For every point, m context points are drawn (same per-anchor stream
    derivation as training batches) and the angle at the point is
    collected for every context pair: arccos of the Euclidean cosine on X
    (raw by default) against the geodesic angle on the sphere. Degenerate
    triples on either side are skipped.
    """
    A = _check_rows(X, Y)
    n = Y.n
    if m > n - 1:
        raise KTooLarge(f"m={m} exceeds n-1={n - 1}")
    if use_denoised:
        A = pca(A, min(r_denoise, min(A.shape))).scores
    v = Y.unit_vectors()
    pair_a, pair_b = np.triu_indices(m, k=1)

    # accumulate Pearson sufficient statistics over the pooled collection
    s_x = s_y = s_xx = s_yy = s_xy = 0.0
    count = 0
    for i in range(n):
        rng = stream(seed, METRIC_TAG, 0, i)
        pool = np.concatenate([np.arange(i), np.arange(i + 1, n)])
        ctx = pool[rng.choice(n - 1, size=m, replace=False)]
        D = A[ctx] - A[i]
        norms = np.linalg.norm(D, axis=1)
        ok = norms > _DEGEN_EPS
        Dn = np.where(ok[:, None], D / np.where(ok, norms, 1.0)[:, None], 0.0)
        G = np.clip(Dn @ Dn.T, -1.0, 1.0)
        cos_high = G[pair_a, pair_b]
        cos_low, sphere_ok = vertex_angle_cosines(
            np.broadcast_to(v[i], (pair_a.size, 3)), v[ctx[pair_a]], v[ctx[pair_b]]
        )
        keep = ok[pair_a] & ok[pair_b] & sphere_ok
        if not np.any(keep):
            continue
        hi = np.arccos(cos_high[keep])
        lo = np.arccos(cos_low[keep])
        s_x += hi.sum()
        s_y += lo.sum()
        s_xx += np.sum(hi * hi)
        s_yy += np.sum(lo * lo)
        s_xy += np.sum(hi * lo)
        count += hi.size

    if count == 0:
        raise EmptyCollection("all sampled triples degenerate")
    var_x = s_xx - s_x * s_x / count
    var_y = s_yy - s_y * s_y / count
    if var_x <= _DEGEN_EPS or var_y <= _DEGEN_EPS:
        raise ConstantVector("angle collection has zero variance")
    return float(np.clip((s_xy - s_x * s_y / count) / np.sqrt(var_x * var_y), -1.0, 1.0))


@dataclass
class MetricsReport:
    angle_preservation: float
    distance_preservation: float
    neighborhood_preservation: float
    density_preservation: float
    k_nn: int
    density_nn: int
    angle_subsample: int
    seed: int

    def scores(self) -> dict:
        return {
            "angle_preservation": self.angle_preservation,
            "distance_preservation": self.distance_preservation,
            "neighborhood_preservation": self.neighborhood_preservation,
            "density_preservation": self.density_preservation,
        }

    def to_text(self) -> str:
        lines = [f"{k}={v!r}" for k, v in self.scores().items()]
        lines += [
            f"k_nn={self.k_nn}",
            f"density_nn={self.density_nn}",
            f"angle_subsample={self.angle_subsample}",
            f"seed={self.seed}",
        ]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["metric,value"]
        rows += [f"{k},{v!r}" for k, v in self.scores().items()]
        rows += [
            f"k_nn,{self.k_nn}",
            f"density_nn,{self.density_nn}",
            f"angle_subsample,{self.angle_subsample}",
            f"seed,{self.seed}",
        ]
        return "\n".join(rows) + "\n"


def compute_report(
    X,
    Y: SphereEmbedding,
    rank: int = 50,
    k_nn: int = 50,
    density_nn: int = 25,
    angle_subsample: int = 64,
    seed: int = 0,
) -> MetricsReport:
    """All four preservation scores with the configuration echoed back."""
    return MetricsReport(
        angle_preservation=angle_preservation(X, Y, m=angle_subsample, seed=seed),
        distance_preservation=distance_preservation(X, Y),
        neighborhood_preservation=neighborhood_preservation(
            X, Y, k=k_nn, r_denoise=rank
        ),
        density_preservation=density_preservation(X, Y, nn=density_nn),
        k_nn=k_nn,
        density_nn=density_nn,
        angle_subsample=angle_subsample,
        seed=seed,
    )
