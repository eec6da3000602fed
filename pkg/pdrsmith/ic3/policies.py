"""
Slot policy registry

A slot policy names one registered variant of a heuristic slot plus its
scalar parameters. Command-line form: ``slot=variant[,key=value...]``.
"""
from dataclasses import dataclass, field

from pdrsmith.errors import PolicyError
from pdrsmith.ic3.generalize import IND_GEN_VARIANTS, PRED_GEN_VARIANTS
from pdrsmith.ic3.obligations import PO_VARIANTS
from pdrsmith.ic3.propagate import PUSH_VARIANTS

SLOTS = ('po_handling', 'ind_gen', 'pred_gen', 'push_prop')

REGISTRY = {
    'po_handling': PO_VARIANTS,
    'ind_gen': IND_GEN_VARIANTS,
    'pred_gen': PRED_GEN_VARIANTS,
    'push_prop': PUSH_VARIANTS,
}

DEFAULT_VARIANTS = {
    'po_handling': 'best_first',
    'ind_gen': 'down',
    'pred_gen': 'lift',
    'push_prop': 'baseline',
}


@dataclass(frozen=True)
class SlotPolicy:
    slot: str
    variant: str
    params: dict = field(default_factory=dict, hash=False)

    def __str__(self):
        extra = "".join(f",{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.slot}={self.variant}{extra}"


def _number(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise PolicyError(f"parameter value '{text}' is not a number") from None


def make_policy(slot, variant=None, **overrides):
    """Validated policy with the variant's default parameters filled in"""
    if slot not in REGISTRY:
        raise PolicyError(f"unknown slot '{slot}' (known: {', '.join(SLOTS)})")
    variant = variant or DEFAULT_VARIANTS[slot]
    variants = REGISTRY[slot]
    if variant not in variants:
        raise PolicyError(f"unknown variant '{variant}' for slot {slot} (known: {', '.join(variants)})")
    params = dict(variants[variant])
    for key, value in overrides.items():
        if key not in params:
            raise PolicyError(f"unknown parameter '{key}' for {slot}={variant}")
        params[key] = value
    return SlotPolicy(slot, variant, params)


def parse_policy(text):
    """
    Parse ``slot=variant[,k=v...]``.

    Examples:
        push_prop=stall_skip,limit=4
        ind_gen=down,recheck=1
    """
    head, *rest = [part.strip() for part in text.split(',')]
    slot, sep, variant = head.partition('=')
    if not sep or not slot or not variant:
        raise PolicyError(f"malformed policy '{text}' (expected slot=variant[,key=value...])")
    overrides = {}
    for item in rest:
        key, sep, value = item.partition('=')
        if not sep or not key:
            raise PolicyError(f"malformed parameter '{item}' in policy '{text}'")
        overrides[key] = _number(value)
    return make_policy(slot, variant, **overrides)


def resolve_policies(specs=()):
    """
    Full slot -> SlotPolicy map from a list of policy strings or objects.
    Later entries for the same slot win.
    """
    chosen = {slot: make_policy(slot) for slot in SLOTS}
    for spec in specs:
        policy = parse_policy(spec) if isinstance(spec, str) else spec
        chosen[policy.slot] = policy
    return chosen
