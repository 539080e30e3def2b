"""Embedding loss and gradient.

The residual per triple (i, j, k) is the difference between the target
high-dimensional cosine at anchor i and the cosine of the spherical angle
at Y_i between Y_j and Y_k (default "cosine" space), or the difference of
the corresponding angles ("angle" space). The reported loss is the root
mean square residual over the realized triples; the gradient is taken of
the mean of squared residuals, which has the same minimizers and
better-conditioned derivatives.

Sphere angles at an anchor share structure across context pairs: with
n_j = (a x b_j)/|a x b_j| the normalized normal of the plane through the
anchor a and context b_j, the pair cosine is n_j . n_k, so one batch of
cross products plus a Gram matrix per anchor covers all pairs, and the
gradient reduces to batched matrix products.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBatch
from .geometry import SphereEmbedding

_CROSS_EPS = 1e-12
_CHORD_EPS = 1e-9
_SIN_FLOOR = 1e-12

LOSS_SPACES = ("cosine", "angle")


@dataclass
class LossValue:
    value: float
    triple_count: int
    dropped: int


@dataclass
class GradientField:
    d_phi: np.ndarray
    d_theta: np.ndarray
    touched: np.ndarray | None = None  # indices with at least one kept triple


def _cross_bm3(u, v):
    out = np.empty(np.broadcast_shapes(u.shape, v.shape))
    out[..., 0] = u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1]
    out[..., 1] = u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2]
    out[..., 2] = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    return out


def _forward(batch, e: SphereEmbedding):
    """Per-(anchor, context) sphere geometry shared by loss and gradient.

    Returns the anchor vectors, context vectors, plane normals and their
    norms, the pair cosine matrix entries, and the validity masks. Pairs
    where a context nearly coincides with (or is antipodal to) its anchor
    on the sphere are masked out for this evaluation.
    """
    v = e.unit_vectors()
    av = v[batch.anchors]  # (B, 3)
    bv = v[batch.contexts]  # (B, m, 3)
    p = _cross_bm3(av[:, None, :], bv)
    norm_p = np.sqrt(np.einsum("bmi,bmi->bm", p, p))
    diff = bv - av[:, None, :]
    chord2 = np.einsum("bmi,bmi->bm", diff, diff)
    ctx_ok = (norm_p > _CROSS_EPS) & (chord2 >= _CHORD_EPS**2)
    if ctx_ok.all():
        normals = p / norm_p[:, :, None]
        valid = batch.target_valid
    else:
        normals = p / np.where(ctx_ok, norm_p, 1.0)[:, :, None]
        valid = (
            batch.target_valid & ctx_ok[:, batch.pair_a] & ctx_ok[:, batch.pair_b]
        )
    gram = np.matmul(normals, normals.transpose(0, 2, 1))
    cos = gram[:, batch.pair_a, batch.pair_b]  # (B, P)
    np.clip(cos, -1.0, 1.0, out=cos)
    return av, bv, normals, norm_p, ctx_ok, gram, cos, valid


def _residuals(batch, cos, valid, space, all_valid):
    if space not in LOSS_SPACES:
        raise ValueError(f"space must be one of {LOSS_SPACES}")
    t = batch.target_cos if all_valid else batch.target_cos[valid]
    c = cos if all_valid else cos[valid]
    if space == "cosine":
        return t - c
    return np.arccos(t) - np.arccos(c)


def loss(batch, e: SphereEmbedding, space: str = "cosine") -> LossValue:
    """Root mean square residual over the batch's realized triples.

    Raises
    ------
    EmptyBatch
        If no valid triple remains after drops.
    """
    *_, cos, valid = _forward(batch, e)
    all_valid = bool(valid.all())
    count = valid.size if all_valid else int(valid.sum())
    if count == 0:
        raise EmptyBatch("no valid triples in batch")
    r = _residuals(batch, cos, valid, space, all_valid)
    return LossValue(
        value=float(np.sqrt(np.mean(r * r))),
        triple_count=count,
        dropped=batch.target_valid.size - count,
    )


def loss_gradient(batch, e: SphereEmbedding, space: str = "cosine"):
    """Loss plus its gradient with respect to every phi_i and theta_i.

    The gradient is of mean(residual^2); entries of points not touched by
    the batch (or touched only through dropped triples) are exactly zero.
    Verified against central finite differences in the test suite.
    """
    av, bv, normals, norm_p, ctx_ok, gram, cos, valid = _forward(batch, e)
    all_valid = bool(valid.all())
    count = valid.size if all_valid else int(valid.sum())
    if count == 0:
        raise EmptyBatch("no valid triples in batch")
    r = _residuals(batch, cos, valid, space, all_valid)
    rms = float(np.sqrt(np.mean(r * r)))

    # d(mean r^2)/d cos per valid pair
    if space == "cosine":
        dcos_valid = -2.0 * r / count
    else:
        c = cos if all_valid else cos[valid]
        sin = np.sqrt(np.maximum(1.0 - c**2, _SIN_FLOOR))
        dcos_valid = 2.0 * r / (count * sin)
    if all_valid:
        dcos = dcos_valid
    else:
        dcos = np.zeros_like(cos)
        dcos[valid] = dcos_valid

    B, m = batch.contexts.shape
    W = np.zeros((B, m, m))
    W[:, batch.pair_a, batch.pair_b] = dcos
    W[:, batch.pair_b, batch.pair_a] = dcos

    # cos_jk = n_j . n_k with n_j = (a x b_j)/|a x b_j|; accumulating over
    # all pairs containing j gives S_j = (sum_k w_jk n_k - (sum_k w_jk
    # cos_jk) n_j) / |p_j|, and the chain back to the sphere points is
    # grad_bj = S_j x a, grad_a = sum_j b_j x S_j.
    row_dot = np.einsum("bjk,bjk->bj", W, gram)
    S = np.matmul(W, normals)
    S -= row_dot[:, :, None] * normals
    S /= np.where(ctx_ok, norm_p, 1.0)[:, :, None]
    grad_b = _cross_bm3(S, av[:, None, :])
    grad_a = _cross_bm3(bv, S).sum(axis=1)

    # tangents of the parameterization at the touched points
    sp, cp = np.sin(e.phi), np.cos(e.phi)
    st, ct = np.sin(e.theta), np.cos(e.theta)
    dphi_vec = np.stack([cp * ct, cp * st, -sp], axis=1)
    dtheta_vec = np.stack([-sp * st, sp * ct, np.zeros_like(sp)], axis=1)

    n = e.n
    ctx_flat = batch.contexts.ravel()
    d_phi = np.bincount(
        ctx_flat,
        weights=np.einsum("bmi,bmi->bm", grad_b, dphi_vec[batch.contexts]).ravel(),
        minlength=n,
    )
    d_theta = np.bincount(
        ctx_flat,
        weights=np.einsum("bmi,bmi->bm", grad_b, dtheta_vec[batch.contexts]).ravel(),
        minlength=n,
    )
    d_phi += np.bincount(
        batch.anchors,
        weights=np.einsum("bi,bi->b", grad_a, dphi_vec[batch.anchors]),
        minlength=n,
    )
    d_theta += np.bincount(
        batch.anchors,
        weights=np.einsum("bi,bi->b", grad_a, dtheta_vec[batch.anchors]),
        minlength=n,
    )

    mask = np.zeros(n, dtype=bool)
    if all_valid:
        mask[batch.contexts.ravel()] = True
        mask[batch.anchors] = True
    else:
        vb, vp = np.nonzero(valid)
        pair_touch = np.zeros(B * m, dtype=bool)
        pair_touch[vb * m + batch.pair_a[vp]] = True
        pair_touch[vb * m + batch.pair_b[vp]] = True
        mask[batch.contexts.ravel()[pair_touch]] = True
        mask[batch.anchors[valid.any(axis=1)]] = True

    value = LossValue(
        value=rms, triple_count=count, dropped=batch.target_valid.size - count
    )
    return value, GradientField(
        d_phi=d_phi, d_theta=d_theta, touched=np.flatnonzero(mask)
    )
