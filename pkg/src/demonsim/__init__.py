"""Simulator for a measurement-feedback demon acting on a driven spin.

The package models one full control cycle: thermal preparation, a sudden
Hamiltonian switch, a projective measurement whose record is read through a
possibly misaligned memory, conditional feedback that targets the final
equilibrium state, and dephasing in the final energy basis. On top of the
state-level simulation it enumerates two-point work trajectories, checks the
fluctuation identity and the information-thermodynamic bounds, and exports
process matrices for the measurement and the full cycle.
"""

from .channels import (
    ChiMatrix,
    KrausChannel,
    MeasurementInstrument,
    apply_channel,
    apply_chi,
    channel_to_chi,
    chi_from_text,
    chi_to_text,
    compose,
    dephasing_channel,
    depolarizing_channel,
    is_unital,
    process_distance,
    projective_instrument,
    unitary_channel,
)
from .errors import (
    DegenerateMarginalError,
    InvalidOperatorError,
    NonUnitalFeedbackError,
    SupportViolationError,
    UnsupportedDimensionError,
)
from .protocol import (
    Branch,
    ProtocolConfig,
    ProtocolEnsemble,
    TradeoffReport,
    build_ensemble,
    demon_condition,
    feedback_gamma,
    feedback_unitaries,
    free_energy_shifts,
    measurement_channel,
    protocol_channel,
    run_protocol,
    tradeoff_report,
)
from .thermo import (
    GibbsSpec,
    free_energy_change,
    gibbs_state,
    information_gain,
    kl_divergence,
    mutual_information,
    povm_information_gain,
    pseudo_temperature,
    random_povm,
    shannon_entropy,
    von_neumann_entropy,
)
from .workstats import (
    WorkDistribution,
    WorkPath,
    average_work,
    average_work_from_states,
    entropy_production,
    enumerate_paths,
    fluctuation_functional,
    jensen_bound_check,
    nonunital_variant,
    random_unital_ensemble,
    work_distribution,
    work_distribution_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "ChiMatrix",
    "DegenerateMarginalError",
    "GibbsSpec",
    "InvalidOperatorError",
    "KrausChannel",
    "MeasurementInstrument",
    "NonUnitalFeedbackError",
    "ProtocolConfig",
    "ProtocolEnsemble",
    "SupportViolationError",
    "TradeoffReport",
    "UnsupportedDimensionError",
    "WorkDistribution",
    "WorkPath",
    "apply_channel",
    "apply_chi",
    "average_work",
    "average_work_from_states",
    "build_ensemble",
    "channel_to_chi",
    "chi_from_text",
    "chi_to_text",
    "compose",
    "demon_condition",
    "dephasing_channel",
    "depolarizing_channel",
    "entropy_production",
    "enumerate_paths",
    "feedback_gamma",
    "feedback_unitaries",
    "fluctuation_functional",
    "free_energy_change",
    "free_energy_shifts",
    "gibbs_state",
    "information_gain",
    "is_unital",
    "jensen_bound_check",
    "kl_divergence",
    "measurement_channel",
    "mutual_information",
    "nonunital_variant",
    "povm_information_gain",
    "process_distance",
    "projective_instrument",
    "protocol_channel",
    "pseudo_temperature",
    "random_povm",
    "random_unital_ensemble",
    "run_protocol",
    "shannon_entropy",
    "tradeoff_report",
    "unitary_channel",
    "von_neumann_entropy",
    "work_distribution",
    "work_distribution_to_csv",
]
