"""
Scope selection: Compass & Jump and the slot sweep

Compass exploits the single best-scoring move; Jump, taken with probability
p_jump, opens the J best distinct slots at once. p_jump shrinks while
promotions keep coming and grows while the search stagnates.
"""
import logging
import random
import statistics
from dataclasses import dataclass
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from pdrsmith.evolve.moves import DEFAULT_WEIGHTS, rank_moves

logger = logging.getLogger(__name__)

STEADY_STREAK = 2
STAGNATION_STREAK = 3
STEADY_FACTOR = 0.8
STAGNATION_STEP = 0.1
VOLATILE_WINDOW = 4
VOLATILE_CHANGES = 2


class PolicyState(BaseModel):
    model_config = ConfigDict(extra='forbid')

    p_jump: float = 0.2
    p_min: float = 0.05
    p_max: float = 0.6
    jump_size: int = Field(default=2, ge=2, le=3)
    weights: Tuple[float, float, float] = DEFAULT_WEIGHTS
    history: List[float] = Field(default_factory=list)
    seed: int = 0
    rng_state: List[int] = Field(default_factory=list)

    def rng(self):
        """Random instance positioned at the saved state"""
        rng = random.Random(self.seed)
        if self.rng_state:
            rng.setstate(_unpack(self.rng_state))
        return rng

    def save_rng(self, rng):
        self.rng_state = _pack(rng.getstate())


def _pack(state):
    # gauss_next is never set: only random() and choice() are drawn
    version, internal, _ = state
    return [version] + list(internal)


def _unpack(packed):
    return packed[0], tuple(packed[1:]), None


class SweepState(BaseModel):
    """Fixed slot order; advance after `patience` consecutive non-improving attempts"""
    model_config = ConfigDict(extra='forbid')

    order: List[str] = Field(default_factory=list)
    active: int = 0
    misses: int = 0
    patience: int = Field(default=5, ge=1)

    @property
    def slot(self):
        return self.order[self.active % len(self.order)]

    def record(self, improved):
        if improved:
            self.misses = 0
            return
        self.misses += 1
        if self.misses >= self.patience:
            self.active = (self.active + 1) % len(self.order)
            self.misses = 0
            logger.info("sweep advances to %s", self.slot)


@dataclass
class Scope:
    allowed: list
    guidance: list
    p_jump: float
    jumped: bool = False


# ============================================================================
# HISTORY RULES
# ============================================================================

def _sign(x):
    return (x > 0) - (x < 0)


def adjust_jump(p, history, p_min=0.05, p_max=0.6):
    """
    Update the jump probability from the best-PAR2 delta history.

    A delta < 0 is an improvement. Two improving rounds in a row scale p
    by 0.8; three non-improving rounds in a row add 0.1. Always clamped.
    """
    if len(history) >= STEADY_STREAK and all(d < 0 for d in history[-STEADY_STREAK:]):
        p = p * STEADY_FACTOR
    elif len(history) >= STAGNATION_STREAK and all(d >= 0 for d in history[-STAGNATION_STREAK:]):
        p = p + STAGNATION_STEP
    return min(p_max, max(p_min, p))


def is_volatile(history):
    """Delta sign changed in at least two of the last four rounds"""
    window = history[-(VOLATILE_WINDOW + 1):]
    changes = sum(1 for a, b in zip(window, window[1:]) if _sign(a) != _sign(b))
    return changes >= VOLATILE_CHANGES


def top_distinct_slots(ranked, j):
    """Best move of each of the first j distinct slots, in rank order"""
    picked = []
    seen = set()
    for move in ranked:
        if move.slot in seen:
            continue
        picked.append(move)
        seen.add(move.slot)
        if len(picked) == j:
            break
    return picked


def select_best(ranked, volatile=False):
    """Top move; when volatile, the top move whose risk is at most the median risk"""
    if volatile:
        median = statistics.median(m.risk for m in ranked)
        for move in ranked:
            if move.risk <= median:
                return move
    return ranked[0]


# ============================================================================
# COMPASS & JUMP
# ============================================================================

def compass_jump(slots, moveset, history, state, rng):
    """
    Pick the slots a round may edit.

    Args:
        slots: every registered slot
        moveset: the evaluator's last MoveSet (may be empty)
        history: best-PAR2 deltas, oldest first
        state: PolicyState supplying p_jump, bounds, J and weights
        rng: random.Random driving the sampling

    Returns:
        Scope(allowed, guidance, p_jump); state.p_jump is left untouched
    """
    if not slots:
        raise ValueError("compass_jump needs at least one slot")
    moves = [m for m in (moveset.moves if moveset else []) if m.slot in slots]
    if not moves:
        return Scope([rng.choice(list(slots))], [], state.p_jump)

    p = adjust_jump(state.p_jump, history, state.p_min, state.p_max)
    ranked = rank_moves(moves, state.weights)
    if rng.random() < p:
        guidance = top_distinct_slots(ranked, state.jump_size)
        jumped = True
    else:
        guidance = [select_best(ranked, is_volatile(history))]
        jumped = False
    allowed = []
    for move in guidance:
        if move.slot not in allowed:
            allowed.append(move.slot)
    return Scope(allowed, guidance, p, jumped)
