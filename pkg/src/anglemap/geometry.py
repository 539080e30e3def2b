"""Spherical geometry: parameterization, distances, vertex angles,
rotations, and the 2D map projection.

Points on the unit sphere are parameterized by colatitude phi in [0, pi]
(measured from the north pole) and azimuth theta in [0, 2*pi). All
functions are pure; the array variants broadcast over leading axes.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateTriangle

CROSS_EPS = 1e-12


class SpherePoint(NamedTuple):
    phi: float
    theta: float


@dataclass
class SphereEmbedding:
    """n sphere points in source-row order, stored as phi/theta arrays."""

    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.phi = np.atleast_1d(np.asarray(self.phi, dtype=np.float64))
        self.theta = np.atleast_1d(np.asarray(self.theta, dtype=np.float64))
        if self.phi.shape != self.theta.shape or self.phi.ndim != 1:
            raise ValueError("phi and theta must be 1-D arrays of equal length")

    @property
    def n(self) -> int:
        return self.phi.shape[0]

    def __len__(self) -> int:
        return self.n

    def point(self, i: int) -> SpherePoint:
        return SpherePoint(float(self.phi[i]), float(self.theta[i]))

    @property
    def points(self) -> list[SpherePoint]:
        return [self.point(i) for i in range(self.n)]

    def unit_vectors(self) -> np.ndarray:
        """(n, 3) array of the embedded unit vectors."""
        return unit_vectors(self.phi, self.theta)

    @classmethod
    def from_points(cls, points) -> "SphereEmbedding":
        phi = np.array([p.phi for p in points], dtype=np.float64)
        theta = np.array([p.theta for p in points], dtype=np.float64)
        return cls(phi, theta)

    @classmethod
    def from_unit_vectors(cls, vectors) -> "SphereEmbedding":
        v = np.asarray(vectors, dtype=np.float64)
        phi = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
        theta = np.mod(np.arctan2(v[:, 1], v[:, 0]), 2.0 * np.pi)
        return cls(phi, theta)


def unit_vectors(phi, theta) -> np.ndarray:
    """Map colatitude/azimuth to Cartesian unit vectors.

    Parameters
    ----------
    phi, theta : float or array
        Colatitude and azimuth in radians.

    Returns
    -------
    numpy.ndarray
        (..., 3) array (sin(phi)cos(theta), sin(phi)sin(theta), cos(phi)).
    """
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    sp = np.sin(phi)
    return np.stack([sp * np.cos(theta), sp * np.sin(theta), np.cos(phi)], axis=-1)


def to_unit_vector(p: SpherePoint) -> np.ndarray:
    """Unit 3-vector of a single sphere point."""
    return unit_vectors(p.phi, p.theta)


def chord_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Straight-line distance through the ball between two sphere points.

    Evaluates sqrt(2 - 2*[sin(phi_p)sin(phi_q)cos(theta_p - theta_q)
    + cos(phi_p)cos(phi_q)]), which equals the Euclidean norm of the
    difference of the two unit vectors. Monotone in arc length; range [0, 2].
    """
    c = (
        np.sin(p.phi) * np.sin(q.phi) * np.cos(p.theta - q.theta)
        + np.cos(p.phi) * np.cos(q.phi)
    )
    return float(np.sqrt(np.maximum(2.0 - 2.0 * c, 0.0)))


def arc_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Great-circle (geodesic) distance in radians, in [0, pi]."""
    d = float(np.dot(to_unit_vector(p), to_unit_vector(q)))
    return float(np.arccos(np.clip(d, -1.0, 1.0)))


def pairwise_arc_distances(e: SphereEmbedding) -> np.ndarray:
    """Condensed upper-triangle vector of all pairwise arc distances."""
    v = e.unit_vectors()
    g = np.clip(v @ v.T, -1.0, 1.0)
    iu = np.triu_indices(e.n, k=1)
    return np.arccos(g[iu])


def vertex_angle_cosines(a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Cosines of the geodesic angles at vertex A of triangles (A, B, C).

    Uses the normal-vector identity: the angle between the geodesics AB
    and AC equals the angle between the normals of the planes through the
    origin containing them, cos = ((A x B)/|A x B|) . ((A x C)/|A x C|).

    Parameters
    ----------
    a, b, c : numpy.ndarray
        (..., 3) arrays of unit vectors.

    Returns
    -------
    cos : numpy.ndarray
        Clamped cosines; entries where a triangle is degenerate are 0.
    valid : numpy.ndarray of bool
        False where either cross-product norm is <= 1e-12 (vertex
        coincident or antipodal with a neighbor).
    """
    p = np.cross(a, b)
    q = np.cross(a, c)
    np_ = np.linalg.norm(p, axis=-1)
    nq_ = np.linalg.norm(q, axis=-1)
    valid = (np_ > CROSS_EPS) & (nq_ > CROSS_EPS)
    denom = np.where(valid, np_ * nq_, 1.0)
    cos = np.clip(np.sum(p * q, axis=-1) / denom, -1.0, 1.0)
    return np.where(valid, cos, 0.0), valid


def geodesic_angle_cos(a: SpherePoint, b: SpherePoint, c: SpherePoint) -> float:
    """Cosine of the spherical angle at vertex A between arcs AB and AC.

    Raises
    ------
    DegenerateTriangle
        If A is collinear (through the origin) with B or with C.
    """
    cos, valid = vertex_angle_cosines(
        to_unit_vector(a), to_unit_vector(b), to_unit_vector(c)
    )
    if not valid:
        raise DegenerateTriangle("vertex coincident or antipodal with a neighbor")
    return float(cos)


def spherical_law_of_cosines(a: float, b: float, c: float) -> float:
    """Angle at the vertex opposite side a, from the three arc side lengths.

    alpha = arccos((cos a - cos b * cos c) / (sin b * sin c)), where b and c
    are the sides adjacent to the vertex. The arccos argument is clamped.

    Raises
    ------
    DegenerateTriangle
        If sin(b) * sin(c) < 1e-12.
    """
    denom = np.sin(b) * np.sin(c)
    if denom < CROSS_EPS:
        raise DegenerateTriangle(f"sin(b)*sin(c)={denom} too small")
    x = (np.cos(a) - np.cos(b) * np.cos(c)) / denom
    return float(np.arccos(np.clip(x, -1.0, 1.0)))


def _axis_tilt_matrix(alpha: float) -> np.ndarray:
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array([[ca, 0.0, -sa], [0.0, 1.0, 0.0], [sa, 0.0, ca]])


def _axis_spin_matrix(beta: float) -> np.ndarray:
    cb, sb = np.cos(beta), np.sin(beta)
    return np.array([[cb, -sb, 0.0], [sb, cb, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class Rotation3:
    """Composed rotation: tilt about the y-axis by alpha, then spin about
    the z-axis by beta, applied to row vectors as v @ matrix."""

    alpha: float
    beta: float
    matrix: np.ndarray

    @classmethod
    def from_angles(cls, alpha: float, beta: float) -> "Rotation3":
        return cls(alpha, beta, _axis_tilt_matrix(alpha) @ _axis_spin_matrix(beta))

    @classmethod
    def identity(cls) -> "Rotation3":
        return cls.from_angles(0.0, 0.0)


def apply_rotation(e: SphereEmbedding, r: Rotation3) -> SphereEmbedding:
    """Rotate every point of the embedding; an isometry of the sphere."""
    return SphereEmbedding.from_unit_vectors(e.unit_vectors() @ r.matrix)


def equator_rotation_search(e: SphereEmbedding, granularity: int = 40) -> Rotation3:
    """Grid-search the rotation that pulls the points toward the equator.

    Scans alpha in [-pi/2, pi/2] and beta in [0, pi] in steps of
    pi/granularity and returns the grid rotation minimizing
    sum_i (|arccos(z_i) - pi/2|)^2 over the rotated z-coordinates.
    Ties are broken by the lexicographically smallest (alpha, beta).
    """
    v = e.unit_vectors()
    alphas = -np.pi / 2.0 + np.pi * np.arange(granularity + 1) / granularity
    betas = np.pi * np.arange(granularity + 1) / granularity
    best = None
    best_penalty = np.inf
    for alpha in alphas:
        for beta in betas:
            rot = _axis_tilt_matrix(alpha) @ _axis_spin_matrix(beta)
            z = np.clip(v @ rot[:, 2], -1.0, 1.0)
            penalty = float(np.sum((np.arccos(z) - np.pi / 2.0) ** 2))
            if penalty < best_penalty:
                best_penalty = penalty
                best = (float(alpha), float(beta))
    return Rotation3.from_angles(*best)


def equator_penalty(e: SphereEmbedding) -> float:
    """Squared deviation of the points' colatitudes from the equator."""
    z = np.clip(e.unit_vectors()[:, 2], -1.0, 1.0)
    return float(np.sum((np.arccos(z) - np.pi / 2.0) ** 2))


def mercator_project(
    e: SphereEmbedding, lat_clamp: float = np.radians(85.0)
) -> np.ndarray:
    """Project to the 2D conformal map: x = theta, y = ln(tan(pi/4 + lat/2)).

    Latitude is pi/2 - phi, clamped to +-lat_clamp so the poles stay finite.
    Returns an (n, 2) array.
    """
    lat = np.clip(np.pi / 2.0 - e.phi, -lat_clamp, lat_clamp)
    y = np.log(np.tan(np.pi / 4.0 + lat / 2.0))
    return np.column_stack([e.theta, y])
