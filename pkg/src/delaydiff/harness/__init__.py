from .analysis import ErrorReport, compare, run, sweep_delta
from .scenario import Scenario, load_scenario, save_scenario
