"""Self-contained SVG output for training metrics.

Two stacked panels: per-episode rewards (light polyline) with their
moving-average (dark polyline) on top, and the epsilon trace below so
reanneal events are visible as jumps back to 1. No plotting library is used;
output bytes are deterministic for a given input.
"""

from __future__ import annotations

import numpy as np

from .harness import moving_average

WIDTH = 900
PANEL_HEIGHT = 280
MARGIN = 50
GAP = 40


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return out_lo + (np.asarray(values, dtype=float) - lo) / span * (out_hi - out_lo)


def _polyline(xs, ys, color, width):
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
        f'points="{points}"/>'
    )


def emit_reward_plot(records, path, window=100):
    """Write the reward/epsilon SVG for a list of EpisodeRecord."""
    if not records:
        raise ValueError("no records to plot")
    episodes = np.array([r.episode_index for r in records], dtype=float)
    rewards = np.array([r.total_reward for r in records], dtype=float)
    epsilons = np.array([r.epsilon_at_end for r in records], dtype=float)
    averaged = moving_average(rewards, window)

    height = 2 * PANEL_HEIGHT + GAP + 2 * MARGIN
    x_lo, x_hi = float(episodes.min()), float(episodes.max())
    xs = _scale(episodes, x_lo, x_hi, MARGIN, WIDTH - MARGIN)

    r_lo = float(min(rewards.min(), averaged.min()))
    r_hi = float(max(rewards.max(), averaged.max()))
    top0, top1 = MARGIN, MARGIN + PANEL_HEIGHT
    ys_reward = _scale(rewards, r_lo, r_hi, top1, top0)
    ys_avg = _scale(averaged, r_lo, r_hi, top1, top0)

    bot0 = top1 + GAP
    bot1 = bot0 + PANEL_HEIGHT
    ys_eps = _scale(epsilons, 0.0, 1.0, bot1, bot0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{height}" viewBox="0 0 {WIDTH} {height}">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
        f'<text x="{MARGIN}" y="{MARGIN - 12}" font-size="14">'
        f'episode reward (grey) and {window}-episode moving average</text>',
        _polyline(xs, ys_reward, "#bbbbbb", 1),
        _polyline(xs, ys_avg, "#1f4e9c", 2),
        f'<text x="{MARGIN}" y="{bot0 - 12}" font-size="14">'
        "exploration rate at episode end</text>",
        _polyline(xs, ys_eps, "#b03a2e", 2),
        "</svg>",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
