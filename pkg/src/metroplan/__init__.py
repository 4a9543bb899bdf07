"""Planning simulator for hierarchical IP-over-WDM access-metro networks.

Builds three access architectures (gray benchmark, point-to-point
pluggables, subcarrier-multiplexed point-to-multipoint) over a shared
metro-core mesh, checks lightpath quality of transmission, dimensions
equipment over a multi-year traffic horizon, and accounts cost and
power per scenario.
"""

from .dimensioning import (
    BuildPlan,
    DimensioningParams,
    Placement,
    Scenario,
    dimension_atm,
    dimension_mtc,
    element_count,
)
from .ledger import Catalog, CostPowerReport, breakdown, compare, cost_of, load_catalog, power_of
from .model import (
    FiberParams,
    Geotype,
    Level,
    Link,
    Node,
    NodeKind,
    Segment,
    Topology,
    load_topology,
    save_topology,
    topology_stats,
)
from .qot import (
    AmpModel,
    AtmChannelPlan,
    AtmScenario,
    MarginModel,
    MtcChannelPlan,
    QotResult,
    WssSchedule,
    ase_power,
    atm_total_loss,
    gsnr_path,
    nli_power_span,
    osnr_atm,
    reach_feasible,
    splitter_loss,
)
from .routing import (
    HomingEntry,
    MtcRoute,
    NoDisjointPair,
    Path,
    PathPair,
    Unreachable,
    dual_home,
    dual_home_all,
    land_pair,
    mtc_route,
    shortest_path,
)
from .study import StudyConfig, StudyResult, TrafficParams, emit_report, run_study
from .synth import SynthParams, synth_geotype, synth_reference
from .traffic import DemandSet, GrowthModel, aggregate_co, channels_needed, grow, synth_demands

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
