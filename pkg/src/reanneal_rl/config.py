"""Run configuration and the flat key=value config-file format.

Config files are INI-style: a [run] section for harness/exploration settings
and an [agent] section for learner hyperparameters. The same format is used
for the run manifest written next to the metrics of every training run.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict, replace

from .agent import AgentConfig

ENV_DEFAULTS = {
    # episodes, hidden sizes, replay capacity, learning rate, min replay
    "lander": (10_000, (200, 60), 1_000_000, 0.01, 1000),
    # The surrogate is deliberately data-starved: a small buffer evicts the
    # rare random landings quickly and a small learning rate keeps a single
    # lucky trace from flipping the policy, so escaping the hover optimum
    # genuinely requires renewed exploration.
    "hovertrap": (2_000, (32,), 500, 0.003, 64),
}


@dataclass
class RunConfig:
    env: str = "lander"
    episodes: int = 10_000
    seed: int = 0
    reanneal_enabled: bool = True
    stuck_threshold: int = 10
    decay_rate: float = 0.99
    epsilon_min: float = 0.01
    hidden_sizes: tuple = (200, 60)
    replay_capacity: int = 1_000_000
    output_dir: str = "runs/out"
    checkpoint_every: int = 0  # episodes; 0 = final checkpoint only
    moving_average_window: int = 100
    agent: AgentConfig = field(default_factory=AgentConfig)

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.moving_average_window < 1:
            raise ValueError("moving_average_window must be >= 1")


def default_config(env):
    """Per-environment defaults: the lander follows the headline setup, the
    HoverTrap surrogate is scaled down for fast experiments."""
    if env not in ENV_DEFAULTS:
        raise ValueError(f"unknown environment {env!r}")
    episodes, hidden, capacity, lr, min_replay = ENV_DEFAULTS[env]
    agent = AgentConfig(learning_rate=lr, min_replay_before_training=min_replay)
    return RunConfig(
        env=env, episodes=episodes, hidden_sizes=hidden,
        replay_capacity=capacity, agent=agent,
    )


_RUN_INT = {"episodes", "seed", "stuck_threshold", "replay_capacity",
            "checkpoint_every", "moving_average_window"}
_RUN_FLOAT = {"decay_rate", "epsilon_min"}
_RUN_BOOL = {"reanneal_enabled"}
_AGENT_INT = {"batch_size", "target_sync_period_episodes",
              "min_replay_before_training"}
_AGENT_FLOAT = {"gamma", "learning_rate", "kappa"}
_AGENT_BOOL = {"double_dqn"}


def load_config(path):
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    config = default_config(parser.get("run", "env", fallback="lander"))
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key == "env":
                continue
            elif key in _RUN_INT:
                setattr(config, key, int(raw))
            elif key in _RUN_FLOAT:
                setattr(config, key, float(raw))
            elif key in _RUN_BOOL:
                setattr(config, key, _parse_bool(raw))
            elif key == "hidden_sizes":
                config.hidden_sizes = tuple(
                    int(v) for v in raw.replace(",", " ").split()
                )
            elif key == "output_dir":
                config.output_dir = raw
            else:
                raise ValueError(f"unknown [run] key {key!r} in {path}")
    if parser.has_section("agent"):
        for key, raw in parser.items("agent"):
            if key in _AGENT_INT:
                setattr(config.agent, key, int(raw))
            elif key in _AGENT_FLOAT:
                setattr(config.agent, key, float(raw))
            elif key in _AGENT_BOOL:
                setattr(config.agent, key, _parse_bool(raw))
            else:
                raise ValueError(f"unknown [agent] key {key!r} in {path}")
    return config


def save_config(config, path):
    """Write a config (or run manifest) as [run]/[agent] key=value text.
    A saved file round-trips through load_config."""
    parser = configparser.ConfigParser()
    run = {k: v for k, v in asdict(config).items() if k != "agent"}
    run["hidden_sizes"] = ",".join(str(n) for n in config.hidden_sizes)
    parser["run"] = {k: str(v) for k, v in run.items()}
    parser["agent"] = {k: str(v) for k, v in asdict(config.agent).items()}
    with open(path, "w") as fh:
        parser.write(fh)


def _parse_bool(raw):
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")
