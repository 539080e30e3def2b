"""anglemap: angle-preserving embeddings of high-dimensional data on the
unit sphere, with preservation metrics and 2D map export."""

__version__ = "0.1.0"

from .data import DataMatrix
from .datagen import DatasetSpec, gen_circle, gen_clusters, gen_smiley, generate
from .geometry import (
    Rotation3,
    SphereEmbedding,
    SpherePoint,
    apply_rotation,
    arc_distance,
    chord_distance,
    equator_rotation_search,
    geodesic_angle_cos,
    mercator_project,
    spherical_law_of_cosines,
    to_unit_vector,
)
from .metrics import (
    MetricsReport,
    angle_preservation,
    compute_report,
    density_preservation,
    distance_preservation,
    neighborhood_preservation,
    pearson,
    spearman,
)
from .objective import loss, loss_gradient
from .spectral import (
    SpikedModel,
    effective_rank,
    generate_spiked,
    latent_angles,
    naive_angle_estimates,
    pca,
    spectral_angle_estimates,
)
from .trainer import PRESETS, TrainConfig, TrainReport, fit, initialize_embedding

__all__ = [
    "DataMatrix",
    "DatasetSpec",
    "MetricsReport",
    "PRESETS",
    "Rotation3",
    "SphereEmbedding",
    "SpherePoint",
    "SpikedModel",
    "TrainConfig",
    "TrainReport",
    "angle_preservation",
    "apply_rotation",
    "arc_distance",
    "chord_distance",
    "compute_report",
    "density_preservation",
    "distance_preservation",
    "effective_rank",
    "equator_rotation_search",
    "fit",
    "gen_circle",
    "gen_clusters",
    "gen_smiley",
    "generate",
    "generate_spiked",
    "geodesic_angle_cos",
    "initialize_embedding",
    "latent_angles",
    "loss",
    "loss_gradient",
    "mercator_project",
    "naive_angle_estimates",
    "neighborhood_preservation",
    "pca",
    "pearson",
    "spearman",
    "spectral_angle_estimates",
    "spherical_law_of_cosines",
    "to_unit_vector",
]
