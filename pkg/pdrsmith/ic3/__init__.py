"""IC3/PDR model checker with pluggable heuristic slots"""
from pdrsmith.ic3.engine import (
    EXIT_CODES, SAFE, TIMEOUT, UNSAFE, CheckOptions, Ic3, Verdict, check,
)
from pdrsmith.ic3.policies import SLOTS, SlotPolicy, parse_policy, resolve_policies

__all__ = [
    'EXIT_CODES', 'SAFE', 'TIMEOUT', 'UNSAFE', 'CheckOptions', 'Ic3', 'Verdict', 'check',
    'SLOTS', 'SlotPolicy', 'parse_policy', 'resolve_policies',
]
