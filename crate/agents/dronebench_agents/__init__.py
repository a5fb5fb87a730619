"""Agent-side SDK for the dronebench harness."""

from .client import HarnessClient, HarnessError, TransportError
from .config import AgentConfig, ConfigError
from .driver import StepContext, Transcript, run_episode
from .llm import LLMPolicy
from .scripted import ScriptedPlan, ScriptedPolicy

__all__ = [
    "AgentConfig",
    "ConfigError",
    "HarnessClient",
    "HarnessError",
    "LLMPolicy",
    "ScriptedPlan",
    "ScriptedPolicy",
    "StepContext",
    "Transcript",
    "TransportError",
    "run_episode",
]
