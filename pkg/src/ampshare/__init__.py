"""Amplitude space sharing between macro-cell and small-cell users.

Two-user Han-Kobayashi power allocation (:mod:`ampshare.optimizer`) on top
of the interference-channel rate formulas (:mod:`ampshare.channel`), and a
heterogeneous-network layer (:mod:`ampshare.geometry`,
:mod:`ampshare.experiments`) that reproduces mode maps, SAP sweeps and
multi-small-cell throughput runs.
"""

from ._backend import BACKEND
from .channel import (
    ChannelGains,
    CommonRateBounds,
    InterferenceMode,
    InvalidInputError,
    LinkBudget,
    PowerBudget,
    PowerSplit,
    classify_mode,
    common_rate_bounds,
    link_budget,
    max_common_sum,
    private_rates,
    split_sum_rate,
)
from .geometry import (
    Direction,
    InfeasibleGeometryError,
    LinkKind,
    NetworkConfig,
    NetworkLayout,
    PairBudget,
    Position,
    calibrate_noise,
    network_throughput,
    pair_budget,
    pair_rates,
    path_loss_db,
    place_saps_grid,
    place_sue,
)
from .optimizer import (
    AllocationResult,
    WeakModeCoefficients,
    baseline_rates,
    brute_force_split,
    etw_split,
    optimize,
    weak_mode_coefficients,
    weak_mode_split,
)

__version__ = "0.1.0"
