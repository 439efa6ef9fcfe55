"""Effort-minimising conditional task and motion planning for a 2D mobile manipulator."""

from .engine import Engine, EngineConfig, Failure, Incumbent
from .executor import EventTimeline, ExecConfig, ExecutionTrace, execute
from .ff import Plan, tp
from .kpiece import PlannerConfig
from .pddl import ground, parse_domain, parse_problem
from .rgraph import RGraph
from .scenario import Scenario, load_scenario
from .world import Config, MovableObject, WorldState

__version__ = "0.1.0"

__all__ = [
    "Config", "Engine", "EngineConfig", "EventTimeline", "ExecConfig", "ExecutionTrace", "Failure",
    "Incumbent", "MovableObject", "Plan", "PlannerConfig", "RGraph", "Scenario", "WorldState",
    "execute", "ground", "load_scenario", "parse_domain", "parse_problem", "tp",
]
