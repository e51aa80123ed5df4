"""Link-level Monte Carlo simulator for multi-carrier THz downlinks."""

__version__ = "1.0.0"
