"""Thermal clockworks: top-level profiles, tick statistics and sampling."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ClockError,
    ConsistencyError,
    DegenerateGradientError,
    DegenerateProfileError,
    DegenerateSampleError,
    OracleSizeError,
    ParameterError,
    PrecisionWarning,
    WrongVariantError,
)
from .model import (  # noqa: E402
    ClockParams,
    EnergyAccount,
    PartitionSet,
    TopLevelProfile,
    baseline_profile,
    effective_coupling,
    energy_account,
    f_coefficient,
    general_profile,
    horizontal_profile,
    ladder_partition,
    p_top_general,
    p_top_horizontal_finite_T,
    p_top_two_qubit,
    qubit_partition,
    two_qubit_profile,
    wigner_amp_sq,
)
from .ticks import (  # noqa: E402
    HazardModel,
    TickMoments,
    baseline_metrics,
    clock_metrics,
    cumulative_hazard,
    hazard,
    moments,
    survival,
    tick_density,
)
from .oracle import OracleSystem, build_oracle, evolve_p_top  # noqa: E402
from .sampler import EmpiricalMetrics, TickSample, empirical_metrics, sample_ticks  # noqa: E402
