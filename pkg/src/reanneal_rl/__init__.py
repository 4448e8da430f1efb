"""Deep Q-learning with exploration reannealing.

Resets the exploration rate to its maximum when a stuck heuristic (counting
timeout episodes) decides the agent is circling a poor local optimum.
"""

__version__ = "0.1.0"
