from .geometry import Vec2
from .swarm import RobotState, ObstacleState, SwarmState
from .control import MarchSpec, ControlGains
from .assignment import assign_and_command, AssignmentState
from .ring import ring_round, RingAgent, RingNet
from .baselines import Controller, virtual_structure_command, fixed_chain_command
from .engine import SimParams, FailureEvent, PlantModel, Execution, run_scenario
from .scenario import Scenario, load_scenario, dump_scenario
from .records import TrajectoryLog, write_log, read_log
from .metrics import MetricsReport, compute_metrics
from .sweep import Sweep, search
from .shared import ScenarioError, ScenarioParseError, AssignmentError, SimulationError


def main(argv: list[str] | None = None) -> int:
	import sys
	from .cli import main as cli_main
	return cli_main(argv) if argv is not None else sys.exit(cli_main())
