"""hopbound: statistical delay bounds and simulation for multi-hop TDMA
channel-hopping wireless mesh paths (802.15.4-class PHY).

The analysis side turns per-link fading statistics into a bound on the
end-to-end delay-violation probability; the simulation side replays the
superframe system to validate it.  See the README for the CLI.
"""

from .backend import COMPILED_AVAILABLE, DEFAULT_BACKEND, available_backends
from .numerics import (
    DEFAULT_QUADRATURE,
    NoFeasiblePointError,
    QuadratureError,
    QuadratureSpec,
    integrate_exp_weighted,
    minimize_scalar,
    upper_incomplete_gamma,
)
from .phy import (
    FrameSpec,
    Ieee802154,
    LinkModel,
    ServiceModelKind,
    Shannon,
    Snr,
    ber,
    db_to_linear,
    fer,
    linear_to_db,
    mellin_slot_service,
    mellin_slot_service_shannon,
    q_success,
)
from .scenario import PowerSplitSpec, Scenario, ScenarioError, load_scenario, parse_scenario
from .sim import SimConfig, SimReport, empirical_violation, run, sample_snr
from .snc import (
    BoundResult,
    FlowSpec,
    PathModel,
    QosTarget,
    delay_bound,
    delay_bound_shannon,
    mellin_arrival,
    min_delay_for_epsilon,
    multi_hop_kernel,
    single_hop_kernel,
    stability_max_rate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "COMPILED_AVAILABLE",
    "DEFAULT_BACKEND",
    "available_backends",
    "DEFAULT_QUADRATURE",
    "NoFeasiblePointError",
    "QuadratureError",
    "QuadratureSpec",
    "integrate_exp_weighted",
    "minimize_scalar",
    "upper_incomplete_gamma",
    "FrameSpec",
    "Ieee802154",
    "LinkModel",
    "ServiceModelKind",
    "Shannon",
    "Snr",
    "ber",
    "db_to_linear",
    "fer",
    "linear_to_db",
    "mellin_slot_service",
    "mellin_slot_service_shannon",
    "q_success",
    "PowerSplitSpec",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "parse_scenario",
    "SimConfig",
    "SimReport",
    "empirical_violation",
    "run",
    "sample_snr",
    "BoundResult",
    "FlowSpec",
    "PathModel",
    "QosTarget",
    "delay_bound",
    "delay_bound_shannon",
    "mellin_arrival",
    "min_delay_for_epsilon",
    "multi_hop_kernel",
    "single_hop_kernel",
    "stability_max_rate",
]
