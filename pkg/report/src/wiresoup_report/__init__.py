"""Figure rendering for wiresoup simulation outputs."""

__version__ = "0.1.0"
