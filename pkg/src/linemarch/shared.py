import os

# runs, compares and sweeps are written here unless LINEMARCH_OUT says otherwise
OUT_DIR = 'runs'

# below this norm a vector has no direction
EPS_ZERO = 1e-12

# full round-trip precision for floats written to disk
FLOAT_FORMAT = '%.17g'

BOLD, YELLOW, RED, GREY, RESET = '\033[1m', '\033[1;93m', '\033[1;31m', '\033[90m', '\033[0m'


def default_out_dir() -> str:
	return os.environ.get('LINEMARCH_OUT', OUT_DIR)


def log(message, flush=True, file=None) -> None:
	''' because I can't be bothered to write if elses everywhere.
		LINEMARCH_QUIET silences the console, files are always written. '''
	if file is not None:
		print(message, flush=flush, file=file)
	elif not os.environ.get('LINEMARCH_QUIET'):
		print(message, flush=flush)


class ScenarioError(ValueError):
	''' a scenario violates one of its invariants, the message names which '''

class ScenarioParseError(ScenarioError):
	''' the scenario document itself is malformed '''

class AssignmentError(ValueError):
	''' the swarm handed to a decision round is not a valid swarm '''

class SimulationError(RuntimeError):
	''' the plant produced a state we refuse to carry on from '''
