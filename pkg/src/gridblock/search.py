"""Search for patterns that block every line and admit a sumset avoidance
vector: greedy trace cover, annealed local search, and exhaustive baselines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .certify import (
    Certificate,
    CertificationError,
    Pattern,
    make_certificate,
    verify_blocking_by_traces,
    verify_sumset_avoidance,
)
from .traces import trace_masks_2d


@dataclass
class SearchFailure:
    n: int
    reason: str
    best_pattern: Optional[Pattern]
    failed_check: str
    exhaustive_proof: bool = False


def _trace_data(n: int):
    masks = sorted(trace_masks_2d(n))
    cover: Dict[int, List[int]] = {}
    for idx, m in enumerate(masks):
        mm = m
        while mm:
            low = mm & -mm
            bit = low.bit_length() - 1
            cover.setdefault(bit, []).append(idx)
            mm ^= low
    return masks, cover


def greedy_blocking_cover(n: int) -> Pattern:
    """Hitting set for all traces: repeatedly take the cell covering the most
    uncovered traces, ties broken by lexicographic cell order."""
    masks, cover = _trace_data(n)
    uncovered = set(range(len(masks)))
    chosen: Set[Tuple[int, int]] = set()
    cells = sorted((i, j) for i in range(n) for j in range(n))
    while uncovered:
        best_cell, best_gain = None, -1
        for (i, j) in cells:
            if (i, j) in chosen:
                continue
            gain = sum(1 for idx in cover.get(i * n + j, ()) if idx in uncovered)
            if gain > best_gain:
                best_cell, best_gain = (i, j), gain
        if best_gain <= 0:
            raise AssertionError("trace family not coverable by grid cells")
        chosen.add(best_cell)
        for idx in cover.get(best_cell[0] * n + best_cell[1], ()):
            uncovered.discard(idx)
    return Pattern.of(n, chosen)


# ---------------------------------------------------------------------------
# avoidance bookkeeping for the local search
# ---------------------------------------------------------------------------


class _AvoidanceTracker:
    """Tracks, for each canonical half-grid vector, how many ordered cell
    pairs of the current pattern sum into its forbidden window."""

    def __init__(self, n: int):
        self.n = n
        self.pq = [(p, q) for p in range(n, 2 * n) for q in range(n, 2 * n)]
        self.forbidden: Dict[Tuple[int, int], List[int]] = {}
        for k, (p, q) in enumerate(self.pq):
            xs = {x for x in (p - 1, p, p - 1 - n, p - n) if 0 <= x <= 2 * n - 2}
            ys = {y for y in (q - 1, q, q - 1 - n, q - n) if 0 <= y <= 2 * n - 2}
            for x in xs:
                for y in ys:
                    self.forbidden.setdefault((x, y), []).append(k)
        self.coll = [0] * len(self.pq)
        self.cells: Set[Tuple[int, int]] = set()

    def _pairs_with(self, t):
        for u in self.cells:
            yield (t[0] + u[0], t[1] + u[1])
        yield (2 * t[0], 2 * t[1])

    def add(self, t):
        for s in self._pairs_with(t):
            w = 2 if s != (2 * t[0], 2 * t[1]) else 1
            for k in self.forbidden.get(s, ()):
                self.coll[k] += w
        self.cells.add(t)

    def remove(self, t):
        self.cells.discard(t)
        for s in self._pairs_with(t):
            w = 2 if s != (2 * t[0], 2 * t[1]) else 1
            for k in self.forbidden.get(s, ()):
                self.coll[k] -= w

    def best(self) -> int:
        return min(self.coll)

    def colliding_cells(self, k: int):
        """Cells involved in at least one forbidden pair for vector index k."""
        out = set()
        cells = list(self.cells)
        for t in cells:
            for u in cells:
                s = (t[0] + u[0], t[1] + u[1])
                if k in self.forbidden.get(s, ()):
                    out.add(t)
                    out.add(u)
        return sorted(out)

    def add_cost(self, t, k: int) -> int:
        """Collision weight vector k would gain if cell t were added."""
        cost = 0
        for u in self.cells:
            if k in self.forbidden.get((t[0] + u[0], t[1] + u[1]), ()):
                cost += 2
        if k in self.forbidden.get((2 * t[0], 2 * t[1]), ()):
            cost += 1
        return cost


@dataclass
class _SearchState:
    n: int
    masks: List[int]
    cover: Dict[int, List[int]]
    cells: Set[Tuple[int, int]] = field(default_factory=set)
    cover_count: List[int] = field(default_factory=list)
    missing: int = 0
    tracker: Optional[_AvoidanceTracker] = None

    @classmethod
    def fresh(cls, n: int, start_cells):
        masks, cover = _trace_data(n)
        st = cls(n=n, masks=masks, cover=cover)
        st.cover_count = [0] * len(masks)
        st.missing = len(masks)
        st.tracker = _AvoidanceTracker(n)
        for t in start_cells:
            st.add(t)
        return st

    def add(self, t):
        if t in self.cells:
            return
        self.cells.add(t)
        for idx in self.cover.get(t[0] * self.n + t[1], ()):
            if self.cover_count[idx] == 0:
                self.missing -= 1
            self.cover_count[idx] += 1
        self.tracker.add(t)

    def remove(self, t):
        if t not in self.cells:
            return
        self.cells.remove(t)
        for idx in self.cover.get(t[0] * self.n + t[1], ()):
            self.cover_count[idx] -= 1
            if self.cover_count[idx] == 0:
                self.missing += 1
        self.tracker.remove(t)

    def energy(self, k: int) -> float:
        return 3.0 * self.missing + 2.0 * self.tracker.coll[k] + 0.01 * len(self.cells)

    def feasible(self) -> bool:
        return self.missing == 0 and self.tracker.best() == 0

    def uncovered_traces(self):
        return [i for i, c in enumerate(self.cover_count) if c == 0]


def _mask_cells(mask: int, n: int):
    out = []
    while mask:
        low = mask & -mask
        b = low.bit_length() - 1
        out.append((b // n, b % n))
        mask ^= low
    return out


def local_search(start: Pattern, budget: int, seed=0) -> Pattern:
    """Annealed add/remove/swap walk over patterns.

    Each restart phase targets one avoidance vector and drives its collision
    count to zero while repairing blocking; moves are biased toward cells of
    uncovered traces and cells in colliding pairs.  Objective order: block
    all traces, then kill collisions for some vector, then shrink.  Never
    returns a pattern that fails blocking.
    """
    import math

    n = start.n
    rnd = random.Random(seed)
    st = _SearchState.fresh(n, start.cells)

    def snapshot():
        return frozenset(st.cells)

    best_blocking = snapshot() if st.missing == 0 else None
    best_blocking_key = (st.tracker.best(), len(st.cells)) if st.missing == 0 else None
    best_full = snapshot() if st.feasible() else None
    best_full_size = len(st.cells) if best_full else None

    all_cells = [(i, j) for i in range(n) for j in range(n)]
    # target the currently least-collided vectors first
    vector_order = sorted(range(len(st.tracker.pq)), key=lambda k: st.tracker.coll[k])
    phase_len = max(5000, budget // 8)
    step = 0
    vidx = 0
    t_hi, t_lo = 4.0, 0.05
    while step < budget:
        k = vector_order[vidx % len(vector_order)]
        vidx += 1
        temp = t_hi
        e = st.energy(k)
        phase_budget = min(phase_len, budget - step)
        decay = (t_lo / t_hi) ** (1.0 / max(1, phase_budget))
        for _ in range(phase_budget):
            step += 1
            temp *= decay
            roll = rnd.random()
            t_add = t_rem = None
            if st.missing > 0 and roll < 0.5:
                # repair blocking: add a cell from an uncovered trace,
                # preferring cells that do not create new collisions
                unc = st.uncovered_traces()
                cand = _mask_cells(st.masks[rnd.choice(unc)], n)
                t_add = min(
                    cand,
                    key=lambda t: (st.tracker.add_cost(t, k), rnd.random()),
                )
            elif st.tracker.coll[k] > 0 and roll < 0.7:
                hot = st.tracker.colliding_cells(k)
                if hot:
                    t_rem = rnd.choice(hot)
            elif roll < 0.85:
                cand = rnd.sample(all_cells, min(12, len(all_cells)))
                t_add = min(
                    (t for t in cand if t not in st.cells),
                    key=lambda t: (st.tracker.add_cost(t, k), rnd.random()),
                    default=None,
                )
            elif st.cells:
                t_rem = rnd.choice(sorted(st.cells))
            if t_add is None and t_rem is None:
                continue
            if t_rem is not None:
                st.remove(t_rem)
            if t_add is not None:
                st.add(t_add)
            e2 = st.energy(k)
            if e2 <= e or rnd.random() < math.exp((e - e2) / temp):
                e = e2
                if st.missing == 0:
                    key = (st.tracker.best(), len(st.cells))
                    if best_blocking_key is None or key < best_blocking_key:
                        best_blocking, best_blocking_key = snapshot(), key
                    if st.tracker.best() == 0 and (
                        best_full is None or len(st.cells) < best_full_size
                    ):
                        best_full, best_full_size = snapshot(), len(st.cells)
            else:
                if t_add is not None:
                    st.remove(t_add)
                if t_rem is not None:
                    st.add(t_rem)
            if best_full is not None:
                break
        if best_full is not None:
            break
    chosen = best_full or best_blocking
    if chosen is None:
        # fall back to a fresh greedy cover, which always blocks
        return greedy_blocking_cover(n)
    return Pattern.of(n, chosen)


def search_pattern(n: int, budget: int = 200_000, seed=0, restarts: int = 8):
    """Greedy seed + annealed local search + full certification.

    Returns a Certificate on success or a SearchFailure carrying the best
    infeasible pattern; for n <= 3 infeasibility is proved by exhaustion.
    """
    if n <= 3:
        minimal = exhaustive_search(n)
        if not minimal:
            return SearchFailure(
                n=n,
                reason=f"exhaustive enumeration of all 2^{n * n} patterns finds none",
                best_pattern=None,
                failed_check="blocking+avoidance",
                exhaustive_proof=True,
            )
        return make_certificate(minimal[0])

    start = greedy_blocking_cover(n)
    best_candidate = start
    for r in range(restarts):
        pat = local_search(start, budget // max(1, restarts), seed=(seed, r))
        if verify_blocking_by_traces(pat) and verify_sumset_avoidance(pat) is not None:
            try:
                return make_certificate(pat)
            except CertificationError:
                best_candidate = pat
        else:
            if verify_blocking_by_traces(pat):
                best_candidate = pat
    failed = (
        "avoidance"
        if verify_blocking_by_traces(best_candidate)
        else "blocking"
    )
    return SearchFailure(
        n=n,
        reason="budget exhausted",
        best_pattern=best_candidate,
        failed_check=failed,
    )


def exhaustive_search(n: int) -> List[Pattern]:
    """All inclusion-minimal patterns passing both certificates, for n <= 3."""
    if n > 3:
        raise ValueError("resolution too large for exhaustive search")
    masks, _ = _trace_data(n)
    feasible: List[int] = []
    for bits in range(1, 1 << (n * n)):
        if not all(t & bits for t in masks):
            continue
        cells = [(b // n, b % n) for b in range(n * n) if bits & (1 << b)]
        pat = Pattern.of(n, cells)
        if verify_sumset_avoidance(pat) is not None:
            feasible.append(bits)
    minimal = []
    for b in feasible:
        if not any(o != b and (o & b) == o for o in feasible):
            minimal.append(b)
    return [
        Pattern.of(n, [(k // n, k % n) for k in range(n * n) if b & (1 << k)])
        for b in sorted(minimal)
    ]
