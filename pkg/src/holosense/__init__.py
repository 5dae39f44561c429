"""Hologram-based wireless channel sensing and Prony multi-user segmentation."""

from .geometry import UpaGeometry, steering_vector, grid_to_vec, vec_to_grid
from .channel import (
    PathParams,
    SubcarrierGrid,
    UserScenario,
    channel_matrix,
    received_field,
    received_field_grid,
)
from .holography import (
    Hologram,
    HologramSet,
    NoiseModel,
    ReferenceWave,
    naive_reconstruction_weights,
    psis_recover,
    record,
    record_psi_set,
)
from .prony import (
    PronyConfig,
    PronyEstimate,
    build_data_matrix,
    find_roots,
    fit_amplitudes,
    select_signal_roots,
    solve_min_norm,
)
from .pmcs import (
    PairingError,
    PmcsConfig,
    PmcsResult,
    extract_row_col_samples,
    nmse,
    pair_estimates,
    reconstruct_channel,
    segment,
)
from .analysis import (
    BoundInputs,
    beamscan_oracle,
    lemma1_bound,
    lemma2_check,
    lemma3_bound,
    theorem1_trend,
)
from .patterns import AngularGrid, PatternResult, array_pattern

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
