"""navgas: learn navigation waypoint graphs from demonstrator traces."""

from navgas.gng import (
    ConfigurationError,
    Gas,
    GasSnapshot,
    Node,
    Params,
    StepReport,
    edge_key,
    new_gas,
)

__all__ = [
    "ConfigurationError",
    "Gas",
    "GasSnapshot",
    "Node",
    "Params",
    "StepReport",
    "edge_key",
    "new_gas",
]

__version__ = "0.1.0"
