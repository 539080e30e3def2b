"""High-dimensional cosine angles at anchor points and the random
anchor/context subsampling that feeds the training objective.

Angles are always evaluated on denoised rank-r scores, never on the raw
matrix; cosines are used directly (no arc-cosine), which is a strictly
monotone transform of the angles.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriple, SubsampleTooLarge
from .rng import CONTEXT_TAG, stream

_DEGEN_EPS = 1e-12


@dataclass
class AngleBatch:
    """Targets for one optimization step.

    For each anchor a with m context indices (excluding a), target_cos
    holds the cosines of the high-dimensional angles at a for every
    context pair, indexed by the shared position arrays pair_a < pair_b.
    Degenerate pairs (context coinciding with its anchor) are flagged
    invalid and counted in `dropped`, not resampled.
    """

    anchors: np.ndarray  # (B,) anchor sample indices
    contexts: np.ndarray  # (B, m) context sample indices
    pair_a: np.ndarray  # (P,) first context position per pair
    pair_b: np.ndarray  # (P,) second context position per pair
    target_cos: np.ndarray  # (B, P)
    target_valid: np.ndarray  # (B, P) bool
    dropped: int = 0

    @property
    def m(self) -> int:
        return int(self.contexts.shape[1])

    @property
    def triple_count(self) -> int:
        return int(self.target_valid.sum())

    def flat_triples(self):
        """(anchor, left, right, cos) arrays of the kept triples."""
        keep = self.target_valid.ravel()
        i = np.repeat(self.anchors, self.pair_a.size)[keep]
        j = self.contexts[:, self.pair_a].ravel()[keep]
        k = self.contexts[:, self.pair_b].ravel()[keep]
        return i, j, k, self.target_cos.ravel()[keep]

    def per_anchor_cos(self, row: int) -> np.ndarray:
        """Kept pair cosines for one anchor row, in pair order."""
        return self.target_cos[row][self.target_valid[row]]


def euclidean_cos_angle(xi, xj, xk) -> float:
    """Cosine of the Euclidean angle at xi between xj and xk.

    Raises
    ------
    DegenerateTriple
        If xj or xk coincides with xi (difference norm <= 1e-12).
    """
    xi = np.asarray(xi, dtype=np.float64)
    u = np.asarray(xj, dtype=np.float64) - xi
    v = np.asarray(xk, dtype=np.float64) - xi
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu <= _DEGEN_EPS or nv <= _DEGEN_EPS:
        raise DegenerateTriple("context point coincides with the anchor")
    return float(np.clip((u @ v) / (nu * nv), -1.0, 1.0))


def sample_angle_batch(
    X_hat, anchors, m: int, seed: int, iteration: int = 0
) -> AngleBatch:
    """Draw m context points per anchor and compute all pair cosines.

    Context indices are drawn uniformly without replacement from the other
    samples; the per-anchor stream is a pure function of
    (seed, iteration, anchor), so the batch is independent of evaluation
    order.

    Raises
    ------
    SubsampleTooLarge
        If m > n - 1.
    """
    X = np.asarray(X_hat, dtype=np.float64)
    n = X.shape[0]
    if m > n - 1:
        raise SubsampleTooLarge(f"m={m} exceeds n-1={n - 1}")
    anchors = np.asarray(anchors, dtype=np.intp)
    pair_a, pair_b = np.triu_indices(m, k=1)

    contexts = np.empty((anchors.shape[0], m), dtype=np.intp)
    for row, a in enumerate(anchors):
        rng = stream(seed, CONTEXT_TAG, iteration, int(a))
        draw = rng.choice(n - 1, size=m, replace=False)
        contexts[row] = draw + (draw >= a)  # skip the anchor itself

    D = X[contexts] - X[anchors, None, :]
    norms = np.sqrt(np.einsum("amr,amr->am", D, D))
    ok = norms > _DEGEN_EPS
    D /= np.where(ok, norms, 1.0)[:, :, None]
    G = np.matmul(D, D.transpose(0, 2, 1))
    target = G[:, pair_a, pair_b]
    np.clip(target, -1.0, 1.0, out=target)
    if ok.all():
        valid = np.ones(target.shape, dtype=bool)
        dropped = 0
    else:
        valid = ok[:, pair_a] & ok[:, pair_b]
        dropped = int(np.sum(~valid))
    return AngleBatch(
        anchors=anchors,
        contexts=contexts,
        pair_a=pair_a,
        pair_b=pair_b,
        target_cos=target,
        target_valid=valid,
        dropped=dropped,
    )


@dataclass
class AngleMatrix:
    """Full cosine-angle matrix at one anchor: entry [j, k] is the cosine
    of the angle at the anchor between the j-th and k-th other samples
    (in increasing sample-index order). Degenerate entries are NaN."""

    anchor: int
    others: np.ndarray
    cosines: np.ndarray
    degenerate: np.ndarray  # positions (into others) with zero offset norm

    @property
    def n_flagged(self) -> int:
        return int(self.degenerate.shape[0])


def full_angle_matrix(X_hat, i: int) -> AngleMatrix:
    """All angles at sample i: a symmetric (n-1) x (n-1) cosine matrix
    with unit diagonal."""
    X = np.asarray(X_hat, dtype=np.float64)
    n = X.shape[0]
    others = np.concatenate([np.arange(i), np.arange(i + 1, n)])
    D = X[others] - X[i]
    norms = np.linalg.norm(D, axis=1)
    ok = norms > _DEGEN_EPS
    Dn = np.where(ok[:, None], D / np.where(ok, norms, 1.0)[:, None], 0.0)
    G = np.clip(Dn @ Dn.T, -1.0, 1.0)
    np.fill_diagonal(G, 1.0)
    bad = ~ok
    G[bad, :] = np.nan
    G[:, bad] = np.nan
    return AngleMatrix(
        anchor=int(i), others=others, cosines=G, degenerate=np.flatnonzero(bad)
    )
