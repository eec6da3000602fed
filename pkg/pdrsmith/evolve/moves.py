"""
Evaluator moves and their ranking

A move is one (slot, direction, conf, risk, cost) recommendation; a MoveSet
keeps its moves ranked by score_move under fixed weights.
"""
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from pdrsmith.ic3.policies import SLOTS

DEFAULT_WEIGHTS = (1.0, 0.5, 0.25)


def _clamp(value):
    return min(1.0, max(0.0, float(value)))


class Move(BaseModel):
    model_config = ConfigDict(extra='forbid', frozen=True)

    slot: str
    direction: str = ''
    conf: float = 0.0
    risk: float = 0.0
    cost: float = 0.0

    @field_validator('conf', 'risk', 'cost', mode='before')
    @classmethod
    def clamp_unit(cls, value):
        return _clamp(value)

    @field_validator('slot')
    @classmethod
    def registered_slot(cls, value, info: ValidationInfo):
        known = (info.context or {}).get('slots') or SLOTS
        if value not in known:
            raise ValueError(f"unknown slot '{value}' (known: {', '.join(known)})")
        return value


def score_move(move, weights=DEFAULT_WEIGHTS):
    """w_c * conf - w_r * risk - w_k * cost"""
    w_c, w_r, w_k = weights
    return w_c * move.conf - w_r * move.risk - w_k * move.cost


def rank_moves(moves, weights=DEFAULT_WEIGHTS):
    """Highest score first; ties keep their incoming order"""
    return sorted(moves, key=lambda m: -score_move(m, weights))


class MoveSet(BaseModel):
    model_config = ConfigDict(extra='forbid')

    moves: List[Move] = Field(default_factory=list)
    weights: Tuple[float, float, float] = DEFAULT_WEIGHTS

    @model_validator(mode='after')
    def keep_ranked(self):
        self.moves = rank_moves(self.moves, self.weights)
        return self

    @classmethod
    def of(cls, moves, weights=DEFAULT_WEIGHTS):
        return cls(moves=list(moves), weights=tuple(weights))

    def __len__(self):
        return len(self.moves)

    def __bool__(self):
        return bool(self.moves)

    def slots(self):
        seen = []
        for move in self.moves:
            if move.slot not in seen:
                seen.append(move.slot)
        return seen
