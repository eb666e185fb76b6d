"""Dynamic radial MRI toolkit: golden-angle simulation, sliding-window
least-squares estimates, and compressed-sensing residual recovery."""

from .estimate import CgConfig, EstimateResult, reconstruct_estimate
from .metrics import UNRESOLVED, fwhm, midpoint_half_max_times, rmse, separability_times
from .operators import (
    KSpaceData,
    NonuniformDft,
    WindowWeights,
    apply_window,
    hamming_weight,
    hamming_window_weights,
)
from .phantoms import (
    GaussianPhantomSpec,
    NoiseSpec,
    SheppLoganSpec,
    add_noise,
    gaussian_frame,
    gaussian_kspace,
    shepp_logan_slice_image,
    shepp_logan_slice_kspace,
    slice_position,
    synthesize_kspace,
)
from .pipeline import FrameResult, SwcsConfig, reconstruct_frame, reconstruct_sequence
from .solvers import (
    KompConfig,
    ResidualProblem,
    SplitBregmanConfig,
    komp_solve,
    residual_data,
    soft_threshold,
    split_bregman_solve,
)
from .trajectories import (
    GOLDEN_ANGLE,
    Trajectory,
    WindowSelection,
    golden_angle,
    golden_angle_stack,
    make_spoke,
    sliding_window,
)

__all__ = [
    "CgConfig",
    "EstimateResult",
    "FrameResult",
    "GOLDEN_ANGLE",
    "GaussianPhantomSpec",
    "KSpaceData",
    "KompConfig",
    "NoiseSpec",
    "NonuniformDft",
    "ResidualProblem",
    "SheppLoganSpec",
    "SplitBregmanConfig",
    "SwcsConfig",
    "Trajectory",
    "UNRESOLVED",
    "WindowSelection",
    "WindowWeights",
    "add_noise",
    "apply_window",
    "fwhm",
    "gaussian_frame",
    "gaussian_kspace",
    "golden_angle",
    "golden_angle_stack",
    "hamming_weight",
    "hamming_window_weights",
    "komp_solve",
    "make_spoke",
    "midpoint_half_max_times",
    "reconstruct_estimate",
    "reconstruct_frame",
    "reconstruct_sequence",
    "residual_data",
    "rmse",
    "separability_times",
    "shepp_logan_slice_image",
    "shepp_logan_slice_kspace",
    "slice_position",
    "sliding_window",
    "soft_threshold",
    "split_bregman_solve",
    "synthesize_kspace",
]

__version__ = "0.1.0"
