"""Derating the M-dependency of comb-decimator pass-band droop."""

from .coeffs import (
    DegenerateOrder,
    DeratingSpec,
    InvalidOrder,
    ValidityClass,
    derating_coeff,
    derating_spec,
    table1,
    validity_class,
)
from .compensator import (
    CompensatorCoeffs,
    compensated_response,
    maxflat_coeffs,
    maxflat_coeffs_derated,
)
from .response import (
    CombSpec,
    DeviationCurve,
    FrequencyResponse,
    bifurcated_response,
    cascade_response,
    comb_response,
    derated_response,
    derating_response,
    deviation_sweep,
    passband_deviation,
    sharpened_response,
    sinc_limit,
    stopband_dominance,
)
from .stream import (
    CombDecimator,
    InputRangeError,
    WordLengthPlan,
    direct_fir_oracle,
    empirical_response,
    plan_wordlength,
    run_chain,
)

__version__ = "0.1.0"
