from dataclasses import dataclass

import numpy as np


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    timed_out: bool


@dataclass
class EnvSpec:
    observation_size: int
    action_count: int
    max_episode_steps: int


from .hovertrap import HoverTrapEnv, value_iteration  # noqa: E402
from .lander import LanderEnv  # noqa: E402


def make_env(name):
    if name == "lander":
        return LanderEnv()
    if name == "hovertrap":
        return HoverTrapEnv()
    raise ValueError(f"unknown environment {name!r}")
