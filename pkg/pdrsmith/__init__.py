"""pdrsmith: proof-producing IC3 model checker with a gated heuristic evolution loop"""

__version__ = '0.1.0'
