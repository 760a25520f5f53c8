"""Quasi-Monte Carlo volumes, boundary hyperareas and separability
probabilities of two-qubit states under monotone Riemannian metrics."""

from .qstate import (
    ANGLE_DIM,
    EULER_DIM,
    angles_to_state,
    det_partial_transpose,
    eigenvalues_from_angles,
    frame_unitary,
    frame_weight,
    is_separable,
    partial_transpose,
)
from .metrics import (
    MonotoneMetricSpec,
    UnsupportedMetricError,
    builtin_metric,
    interpolated_metric,
    metric_tensor,
    volume_element,
)
from .sequences import SequenceConfig, replication_stats, sequence_points
from .integrate import (
    estimate_boundary,
    estimate_volume,
    estimate_volume_multi,
    find_boundary_roots,
    interpolation_sweep,
)
from .analytic import (
    SILVER_MEAN,
    bures_total_volume,
    cap_boundary_area,
    conjecture_table,
    hall_constant,
    levy_gromov_check,
    ricci_diag,
    ricci_min_search,
    ricci_trace,
    sphere_volume,
)

__version__ = "0.1.0"
