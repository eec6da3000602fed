"""
Proof obligation queue (slot: po_handling)

Each variant decides the order in which obligations leave the queue. None of
them can change a verdict: every obligation is eventually popped or the
queue is abandoned with a counterexample.
"""
import heapq
from dataclasses import dataclass, field

PO_VARIANTS = {
    'best_first': {},
    'min_frame_then_size': {},
    'dfs': {},
    'aging': {'age_step': 2},
}


@dataclass(eq=False)
class ProofObligation:
    cube: tuple
    frame: int
    depth: int = 0
    parent: 'ProofObligation' = None
    inputs: list = field(default_factory=list)
    bad_inputs: list = None
    age: int = 0


class ObligationQueue:
    """
    Priority queue of proof obligations.

    best_first: (frame, depth, size, insertion order)
    min_frame_then_size: (frame, size, insertion order)
    dfs: most recently inserted first
    aging: (frame, age // age_step, depth, size, insertion order); every
        re-insertion of the same obligation ages it by one
    """

    def __init__(self, policy):
        self.variant = policy.variant
        self.age_step = max(1, int(policy.params.get('age_step', 2)))
        self._heap = []
        self._stack = []
        self._order = 0

    def __len__(self):
        return len(self._stack) if self.variant == 'dfs' else len(self._heap)

    def _key(self, po):
        if self.variant == 'min_frame_then_size':
            return (po.frame, len(po.cube), self._order)
        if self.variant == 'aging':
            return (po.frame, po.age // self.age_step, po.depth, len(po.cube), self._order)
        return (po.frame, po.depth, len(po.cube), self._order)

    def push(self, po, requeue=False):
        if requeue:
            po.age += 1
        self._order += 1
        if self.variant == 'dfs':
            self._stack.append(po)
        else:
            heapq.heappush(self._heap, (self._key(po), po))

    def pop(self):
        if self.variant == 'dfs':
            return self._stack.pop()
        return heapq.heappop(self._heap)[1]

    def clear(self):
        self._heap.clear()
        self._stack.clear()


def select_obligation(queue):
    """Remove and return the next obligation under the queue's policy"""
    return queue.pop()
