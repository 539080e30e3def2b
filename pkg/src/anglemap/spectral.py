"""Centering, truncated PCA, effective rank, and the spiked-model harness
comparing spectral versus naive high-dimensional angle estimates."""

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, as_values
from .errors import AllZero, BadDims, DegenerateTriple, RankTooLarge
from .rng import MODEL_TAG, stream

_DEGEN_EPS = 1e-12

# Decompose the n x n Gram matrix instead of the n x d data matrix once the
# feature count dwarfs the sample count; both paths agree to ~1e-8.
_GRAM_RATIO = 4


@dataclass
class SpectralDecomposition:
    """Truncated SVD of the row-centered data.

    scores = left_vectors * singular_values are the principal-component
    coordinates; right_vectors holds the matching feature-space directions
    (columns may be zero where a singular value vanishes).
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    scores: np.ndarray
    column_means: np.ndarray
    right_vectors: np.ndarray


def _fix_signs(U: np.ndarray, V: np.ndarray | None):
    # Deterministic orientation: largest-magnitude entry of each left
    # vector is made positive.
    for j in range(U.shape[1]):
        i = int(np.argmax(np.abs(U[:, j])))
        if U[i, j] < 0:
            U[:, j] = -U[:, j]
            if V is not None:
                V[:, j] = -V[:, j]
    return U, V


def pca(X, k: int) -> SpectralDecomposition:
    """Top-k principal components of the row-centered matrix.

    Parameters
    ----------
    X : DataMatrix or (n, d) array
    k : int
        Number of components, 1 <= k <= min(n, d).

    Raises
    ------
    RankTooLarge
        If k exceeds min(n, d).
    """
    A = as_values(X)
    n, d = A.shape
    if not 1 <= k <= min(n, d):
        raise RankTooLarge(f"k={k} not in [1, {min(n, d)}]")
    means = A.mean(axis=0)
    C = A - means

    if d > _GRAM_RATIO * n:
        G = C @ C.T
        w, U = np.linalg.eigh(G)
        order = np.argsort(w)[::-1]
        w = np.maximum(w[order], 0.0)
        U = U[:, order]
        s = np.sqrt(w)
        V = np.zeros((d, n))
        nz = s > _DEGEN_EPS * max(1.0, s[0] if s.size else 0.0)
        if np.any(nz):
            V[:, nz] = (C.T @ U[:, nz]) / s[nz]
    else:
        U, s, Vt = np.linalg.svd(C, full_matrices=False)
        V = Vt.T

    U, V = _fix_signs(U[:, :k].copy(), V[:, :k].copy())
    s = s[:k].copy()
    return SpectralDecomposition(
        singular_values=s,
        left_vectors=U,
        scores=U * s,
        column_means=means,
        right_vectors=V,
    )


def effective_rank(singular_values) -> float:
    """exp of the Shannon entropy of the normalized singular values.

    A continuous intrinsic-dimension proxy: k equal values give exactly k,
    a single nonzero value gives 1.

    Raises
    ------
    AllZero
        If every singular value is zero.
    """
    s = np.asarray(singular_values, dtype=np.float64)
    if s.size == 0 or np.any(s < 0):
        raise BadDims("singular values must be a nonempty nonnegative list")
    total = s.sum()
    if total <= 0.0:
        raise AllZero("all singular values are zero")
    p = s[s > 0] / total
    return float(np.exp(-np.sum(p * np.log(p))))


@dataclass
class SpikedModel:
    """Low-rank signal plus unit-variance noise: X = U diag(sqrt(lam)) Y^T + Z,
    with lam_i = sqrt(n/d) * sigma_i so that d^{-1} E[X X^T] =
    I + sqrt(n/d) * sum_i sigma_i u_i u_i^T."""

    n: int
    d: int
    r: int
    sigmas: np.ndarray
    U: np.ndarray
    X: np.ndarray


def _orthonormalize(A: np.ndarray) -> np.ndarray:
    # Modified Gram-Schmidt with one re-orthogonalization pass.
    Q = A.astype(np.float64).copy()
    k = Q.shape[1]
    for _ in range(2):
        for j in range(k):
            for i in range(j):
                Q[:, j] -= (Q[:, i] @ Q[:, j]) * Q[:, i]
            norm = np.linalg.norm(Q[:, j])
            if norm < _DEGEN_EPS:
                raise BadDims("rank-deficient draw during orthonormalization")
            Q[:, j] /= norm
    return Q


def generate_spiked(n: int, d: int, r: int, sigmas, seed: int) -> SpikedModel:
    """Draw a spiked model instance, deterministic under seed.

    sigmas must be positive and nonincreasing; r <= min(n, d).
    """
    sigmas = np.asarray(sigmas, dtype=np.float64)
    if r < 1 or r > min(n, d) or sigmas.shape != (r,):
        raise BadDims(f"need 1 <= r <= min(n, d) and {r} signal strengths")
    if np.any(sigmas <= 0) or np.any(np.diff(sigmas) > 0):
        raise BadDims("sigmas must be positive and nonincreasing")
    rng = stream(seed, MODEL_TAG)
    U = _orthonormalize(rng.standard_normal((n, r)))
    Y = rng.standard_normal((d, r))
    Z = rng.standard_normal((n, d))
    lam = np.sqrt(n / d) * sigmas
    X = (U * np.sqrt(lam)) @ Y.T + Z
    return SpikedModel(n=n, d=d, r=r, sigmas=sigmas, U=U, X=X)


def angles_between_rows(M: np.ndarray, triples) -> np.ndarray:
    """Angle at row i between rows j and k, for each triple (i, j, k).

    Raises
    ------
    DegenerateTriple
        If indices repeat within a triple or a difference vector is ~0.
    """
    M = np.asarray(M, dtype=np.float64)
    out = np.empty(len(triples))
    for t, (i, j, k) in enumerate(triples):
        if len({int(i), int(j), int(k)}) != 3:
            raise DegenerateTriple(f"indices not distinct in triple {(i, j, k)}")
        u = M[j] - M[i]
        v = M[k] - M[i]
        nu = np.linalg.norm(u)
        nv = np.linalg.norm(v)
        if nu <= _DEGEN_EPS or nv <= _DEGEN_EPS:
            raise DegenerateTriple(f"coincident rows in triple {(i, j, k)}")
        out[t] = np.arccos(np.clip((u @ v) / (nu * nv), -1.0, 1.0))
    return out


def latent_angles(model: SpikedModel, triples) -> np.ndarray:
    """Ground-truth angles among the rows of the latent factor matrix U."""
    return angles_between_rows(model.U, triples)


def spectral_angle_estimates(X, r: int, triples) -> np.ndarray:
    """Angles among the rows of the top-r left singular vectors of centered X."""
    A = as_values(X)
    if not 1 <= r <= min(A.shape):
        raise RankTooLarge(f"r={r} not in [1, {min(A.shape)}]")
    dec = pca(A, r)
    return angles_between_rows(dec.left_vectors, triples)


def naive_angle_estimates(X, triples) -> np.ndarray:
    """Angles among the raw high-dimensional rows of X."""
    return angles_between_rows(as_values(X), triples)


def sample_distinct_triples(n: int, count: int, seed: int) -> list[tuple[int, int, int]]:
    """count index triples with three distinct members, uniform under seed."""
    if n < 3:
        raise BadDims("need n >= 3 to form triples")
    rng = stream(seed, MODEL_TAG, 1)
    triples = []
    while len(triples) < count:
        i, j, k = rng.choice(n, size=3, replace=False)
        triples.append((int(i), int(j), int(k)))
    return triples
