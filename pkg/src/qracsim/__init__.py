"""Exact (2,d) random access codes and a time-bin photonic Monte Carlo."""

from __future__ import annotations

__version__ = "0.1.0"

from .linalg import (
    Basis,
    DensityMatrix,
    Effect,
    Povm,
    PureState,
    Spectrum,
    born_probability,
    hermitian_eig,
    operator_norm,
    partial_trace,
    tensor,
)
from .mub import (
    MubPair,
    fourier_mub_pair,
    pauli_mub_pair,
    product_mub_pair,
    unbiasedness_defect,
)
from .photonics import (
    ChannelModel,
    DetectorModel,
    DliModel,
    PulseTrain,
    SimulationConfig,
    SourceModel,
    TrialResult,
    ZClickDistribution,
    XClickDistribution,
    build_pulse_train,
    calibrate_raman_coefficient,
    cross_bin_leak_fraction,
    expected_p_x,
    expected_p_z,
    raman_rate,
    simulate_trial,
    x_click_distribution,
    z_click_distribution,
    DEFAULT_RAMAN_COEFFICIENT,
)
from .prbs import PrbsAlignmentError, PrbsSequence, prbs_align, prbs_generate
from .qrac import (
    AdvantageValue,
    AllocationValue,
    EncodingMap,
    MeasurementPair,
    Message,
    advantage,
    all_messages,
    allocation_figure,
    average_success_probability,
    classical_bound,
    coarse_grain,
    depolarize,
    empirical_advantage,
    encoding_table,
    max_success_probability,
    measurement_pair_from_mub,
    one_bit_success_probabilities,
    optimal_encoding,
    pvm_pair_compatible,
    quantum_bound,
    reduce_pair,
)
from .tolerances import TOL, Tolerances
