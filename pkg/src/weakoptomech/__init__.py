"""Weak-measurement amplification of a single-photon optomechanical pointer."""
from .closed import (
    PLATEAU,
    mean_p_closed,
    mean_q_closed,
    mean_q_smalltime,
    mean_q_unpostselected,
    postselected_mirror_state,
    postselected_probability,
    solve_max_amp_time,
)
from .damped import damped_branch_data, mean_p_damped, mean_q_damped
from .detection import (
    arrival_density,
    averaged_q,
    conditional_arrival_density,
    dark_count_threshold,
    overall_P,
    postselect_prob,
)
from .errors import (
    ConfigParse,
    CutoffTooSmall,
    DegenerateNorm,
    DomainError,
    NoRoot,
    StepTooLarge,
    UnknownFigure,
    WeakOptomechError,
    ZeroProbability,
)
from .generic import mean_p_generic, mean_q_generic, mean_q_ground
from .params import DeviceParams, GenericWeakParams, ModelParams, WeakCouplingWarning
from .pointer import TwoBranchState, expectation_p, expectation_q

__version__ = "0.1.0"
