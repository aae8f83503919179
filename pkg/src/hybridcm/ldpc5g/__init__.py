from .basegraph import (
    BaseGraph,
    ParityCheckMatrix,
    expand,
    load_base_graph,
    serialize_base_graph,
)
from .codec import LdpcCode, syndrome
from .decoder import spa_decode

__all__ = [
    "BaseGraph", "ParityCheckMatrix", "expand", "load_base_graph",
    "serialize_base_graph", "LdpcCode", "syndrome", "spa_decode",
]
