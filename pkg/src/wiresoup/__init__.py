"""Random wire loop-soup model: sampler, exact oracles, verification suite."""

__version__ = "0.1.0"
