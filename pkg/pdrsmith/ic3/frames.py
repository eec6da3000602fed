"""
Delta-encoded frame sequence

levels[L] holds the clauses whose highest frame is L, so frame F_i (i >= 1)
is the union of levels[i..top]. F_0 is the initial-state predicate and has
no clauses here. F_i = F_{i+1} exactly when levels[i] is empty.
"""
from pdrsmith.ic3.cube import subsumes


class FrameSequence:

    def __init__(self):
        self.levels = [{}, {}]

    @property
    def top(self):
        return len(self.levels) - 1

    def new_frame(self):
        self.levels.append({})
        return self.top

    def delta(self, level):
        return list(self.levels[level])

    def frame(self, i):
        """All clauses of F_i, i >= 1"""
        out = []
        for level in range(max(i, 1), len(self.levels)):
            out.extend(self.levels[level])
        return out

    def level_of(self, clause):
        for level in range(len(self.levels) - 1, 0, -1):
            if clause in self.levels[level]:
                return level
        return None

    def add(self, clause, level):
        """
        Add a clause to F_1..F_level.

        Returns:
            False when an identical clause already sits at this level or above
        """
        known = self.level_of(clause)
        if known is not None and known >= level:
            return False
        if known is not None:
            del self.levels[known][clause]
        self.levels[level][clause] = None
        return True

    def move(self, clause, level):
        """Push a clause from `level` to `level + 1`"""
        del self.levels[level][clause]
        self.levels[level + 1][clause] = None

    def fixpoint(self):
        """Smallest i in 1..top-1 with F_i = F_{i+1}, or None"""
        for i in range(1, self.top):
            if not self.levels[i]:
                return i
        return None

    def subsume(self):
        """Drop clauses implied by a clause at the same or a higher level"""
        removed = 0
        seen = []
        for level in range(self.top, 0, -1):
            current = list(self.levels[level])
            current.sort(key=len)
            kept = []
            for clause in current:
                if any(subsumes(other, clause) for other in seen) or any(
                    subsumes(other, clause) for other in kept
                ):
                    del self.levels[level][clause]
                    removed += 1
                else:
                    kept.append(clause)
            seen.extend(kept)
        return removed

    def lemma_count(self):
        return sum(len(level) for level in self.levels[1:])
