"""Timing detection of Zadoff-Chu sequences under carrier frequency offset."""

__version__ = "0.1.0"

from .analytics import (
    DetectionScenario,
    TimingDistribution,
    conditional_matrix,
    db_to_linear,
    error_probability,
    linear_to_db,
    metric_mean,
    metric_pdf,
    metric_var,
    prob_shift_given_kappa,
    prob_shift_total,
    timing_distribution,
)
from .correlation import (
    CorrelatorOutput,
    autocorr_mag_sq_closed,
    autocorr_offset,
    circular_correlate,
    correlator_bank,
    correlator_bank_fft,
    sinc_n,
)
from .quadrature import QuadratureError, integrate
from .roots import RootReport, assess_root, rank_roots
from .sequences import PnSequence, ZcSequence, cyclic_shift, pn_generate, zc_generate
from .simulation import (
    EmpiricalDistribution,
    SimulationConfig,
    detect_timing,
    run_experiment,
    synthesize_received,
    truncate_cp,
)
from .special import bessel_i0_scaled, log_marcum_q1, marcum_q1
from .spectrum import (
    ABOVE_HALF,
    AT_HALF,
    HypothesisWindow,
    TimingSpectrum,
    critical_offset,
    error_floor,
    shift_offsets,
    timing_spectrum,
)
