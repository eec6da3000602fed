"""Offline champion/challenger evolution of the heuristic slots"""
from pdrsmith.evolve.gate import PROMOTE, REVERT, hard_gate, promote
from pdrsmith.evolve.loop import Evolution, rebuild_champion, replay_run
from pdrsmith.evolve.moves import Move, MoveSet, score_move
from pdrsmith.evolve.policy import PolicyState, adjust_jump, compass_jump
from pdrsmith.evolve.schemas import RunConfig, load_run_config

__all__ = [
    'PROMOTE', 'REVERT', 'hard_gate', 'promote', 'Evolution', 'rebuild_champion', 'replay_run',
    'Move', 'MoveSet', 'score_move', 'PolicyState', 'adjust_jump', 'compass_jump',
    'RunConfig', 'load_run_config',
]
