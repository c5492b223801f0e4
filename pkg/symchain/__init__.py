"""Central-symmetry numerics for continuous-time Markov chains."""

__version__ = "0.3.0"
