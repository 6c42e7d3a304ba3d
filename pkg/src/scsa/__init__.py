"""Size-constrained state abstraction for MCTS on turn-based strategy games."""

__version__ = "0.1.0"
