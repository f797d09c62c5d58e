"""Line traces and strong line traces in cube grids.

A trace is the set of closed grid cells a line meets.  For d=2 the full trace
family at a resolution is enumerated exactly by combining three complete
sub-families:

  * gridpoint-free lines of non-negative slope, found by a depth-first search
    over cell paths whose feasibility region in (slope, intercept) space is
    maintained as an exact convex polygon (homogeneous integer coordinates);
    negative slopes come from the x-reflection symmetry;
  * lines through at least two grid points, enumerated directly;
  * lines through exactly one grid point, sampled once per angular interval
    between consecutive critical directions of the pencil at that point
    (the trace is constant on each interval, so one sample is exact).

Everything is integer or rational arithmetic; there is no floating point in
any membership decision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .geometry import (
    Box,
    Cell,
    CellSet,
    Line,
    diam_inf,
    line_box_clip,
    reference_axis,
    strongly_intersects,
    strongly_intersects_box,
    unit_box,
)


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class Trace:
    """Canonical set of cells met by a line; hashable and comparable."""

    d: int
    n: int
    cells: FrozenSet[Tuple[int, ...]]

    def __post_init__(self):
        if not self.cells:
            raise ValueError("empty trace")

    def sorted_cells(self):
        return sorted(self.cells)

    def __len__(self):
        return len(self.cells)


@dataclass(frozen=True)
class ReducedStrongTrace:
    """Small-range selection of strongly intersected cells for one line."""

    refax: int
    cells: FrozenSet[Tuple[int, ...]]

    def sorted_cells(self):
        return sorted(self.cells)

    def __len__(self):
        return len(self.cells)


# ---------------------------------------------------------------------------
# integer line form and supercover walk (d = 2)
# ---------------------------------------------------------------------------


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def line_scaled_form(line: Line, n: int) -> Tuple[int, int, int]:
    """Integer (A, B, C) with A*X + B*Y = C in coordinates scaled by n."""
    wx, wy = line.dir
    bx, by = line.base
    a0 = wy
    b0 = -wx
    c0 = (wy * bx - wx * by) * n
    scale = 1
    for q in (a0.denominator, b0.denominator, c0.denominator):
        scale = scale * q // _gcd(scale, q)
    a, b, c = int(a0 * scale), int(b0 * scale), int(c0 * scale)
    g = _gcd(_gcd(abs(a), abs(b)), abs(c))
    if g > 1:
        a, b, c = a // g, b // g, c // g
    if b < 0 or (b == 0 and a < 0):
        a, b, c = -a, -b, -c
    return a, b, c


def _walk_cells_scaled(a: int, b: int, c: int, n: int) -> List[Tuple[int, int]]:
    """All cells of the n-grid whose closed box meets the line aX + bY = c."""
    cells = []
    if b == 0:
        if a < 0:
            a, c = -a, -c
        fl = c // a
        imin = fl - 1 if c % a == 0 else fl
        for i in range(max(0, imin), min(n - 1, fl) + 1):
            for j in range(n):
                cells.append((i, j))
        return cells
    if b < 0:
        a, b, c = -a, -b, -c
    for i in range(n):
        y1 = c - a * i
        y2 = c - a * (i + 1)
        lo, hi = (y1, y2) if y1 <= y2 else (y2, y1)
        jmax = hi // b
        jmin = -((-lo) // b) - 1
        if jmax < 0 or jmin > n - 1:
            continue
        for j in range(max(0, jmin), min(n - 1, jmax) + 1):
            cells.append((i, j))
    return cells


def _mask_of(cells, n: int) -> int:
    m = 0
    for (i, j) in cells:
        m |= 1 << (i * n + j)
    return m


def _mask_to_cells(mask: int, n: int):
    out = []
    idx = 0
    while mask:
        low = mask & -mask
        idx = low.bit_length() - 1
        out.append((idx // n, idx % n))
        mask ^= low
    return out


def _reflect_x_mask(mask: int, n: int) -> int:
    out = 0
    for (i, j) in _mask_to_cells(mask, n):
        out |= 1 << ((n - 1 - i) * n + j)
    return out


# ---------------------------------------------------------------------------
# gridpoint-free staircases: exact feasibility DFS in (slope, intercept)
# ---------------------------------------------------------------------------


def _cross3(p, q):
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def _norm_point(p):
    m, c, w = p
    if w < 0:
        m, c, w = -m, -c, -w
    g = _gcd(_gcd(abs(m), abs(c)), w)
    if g > 1:
        m, c, w = m // g, c // g, w // g
    return (m, c, w)


def _clip(poly, con):
    """Clip polygon by a*m + b*c <= r; vertices are homogeneous (M, C, W), W>0."""
    a, b, r = con
    res = []
    k = len(poly)
    vals = [a * P[0] + b * P[1] - r * P[2] for P in poly]
    covec = (a, b, -r)
    for idx in range(k):
        P, vP = poly[idx], vals[idx]
        nxt = (idx + 1) % k
        Q, vQ = poly[nxt], vals[nxt]
        if vP <= 0:
            res.append(P)
        if (vP < 0 < vQ) or (vQ < 0 < vP):
            edge = _cross3(P, Q)
            res.append(_norm_point(_cross3(edge, covec)))
    return res


def _det3(p, q, r):
    return (
        p[0] * (q[1] * r[2] - q[2] * r[1])
        - p[1] * (q[0] * r[2] - q[2] * r[0])
        + p[2] * (q[0] * r[1] - q[1] * r[0])
    )


def _interior_triple(poly):
    """Three affinely independent vertices, or None if the region is thin."""
    if len(poly) < 3:
        return None
    p0 = poly[0]
    for i in range(1, len(poly)):
        for j in range(i + 1, len(poly)):
            if _det3(p0, poly[i], poly[j]) != 0:
                return (p0, poly[i], poly[j])
    return None


def _interior_point(triple):
    pts = [(Fraction(M, W), Fraction(C, W)) for (M, C, W) in triple]
    m = sum(p[0] for p in pts) / 3
    c = sum(p[1] for p in pts) / 3
    return m, c


def _staircase_systems(n: int):
    """Yield (trace_mask, polygon) for every feasible gridpoint-free
    non-negative-slope cell path, in scaled coordinates."""
    big = n * (n + 1) + 2
    init = [(0, -big, 1), (n + 1, -big, 1), (n + 1, n + 2, 1), (0, n + 2, 1)]

    starts = []
    for i0 in range(n):
        cons = ((i0, 1, 0), (-(i0 + 1), -1, 0))  # bottom entry
        starts.append((i0, 0, cons))
    for j0 in range(n):
        cons = ((0, -1, -j0), (0, 1, j0 + 1))  # left entry
        starts.append((0, j0, cons))

    for (i0, j0, cons) in starts:
        poly = init
        for con in cons:
            poly = _clip(poly, con)
        if _interior_triple(poly) is None:
            continue
        stack = [(i0, j0, 1 << (i0 * n + j0), poly)]
        while stack:
            i, j, mask, poly = stack.pop()
            if i == n - 1:
                q = _clip(_clip(poly, (-n, -1, -j)), (n, 1, j + 1))
                t = _interior_triple(q)
                if t is not None:
                    yield mask, t
            if j == n - 1:
                q = _clip(_clip(poly, (i, 1, n)), (-(i + 1), -1, -n))
                t = _interior_triple(q)
                if t is not None:
                    yield mask, t
            if i + 1 <= n - 1:
                q = _clip(_clip(poly, (-(i + 1), -1, -j)), (i + 1, 1, j + 1))
                if _interior_triple(q) is not None:
                    stack.append((i + 1, j, mask | (1 << ((i + 1) * n + j)), q))
            if j + 1 <= n - 1:
                q = _clip(_clip(poly, (i, 1, j + 1)), (-(i + 1), -1, -(j + 1)))
                if _interior_triple(q) is not None:
                    stack.append((i, j + 1, mask | (1 << (i * n + j + 1)), q))


def staircase_masks(n: int, with_witness: bool = False):
    """Trace masks of gridpoint-free non-negative-slope lines.

    With `with_witness`, returns {mask: Line} with one exact witness per mask.
    """
    if with_witness:
        out: Dict[int, Line] = {}
        for mask, triple in _staircase_systems(n):
            if mask not in out:
                m, c = _interior_point(triple)
                # scaled coords: y = m*x + c on [0, n]; unscale to the unit square
                out[mask] = Line((Fraction(0), c / n), (Fraction(1), m))
        return out
    seen = set()
    for mask, _ in _staircase_systems(n):
        seen.add(mask)
    return seen


# ---------------------------------------------------------------------------
# gridpoint lines: pairs and pencils
# ---------------------------------------------------------------------------


def _pair_line_forms(n: int) -> Set[Tuple[int, int, int]]:
    pts = [(u, v) for u in range(n + 1) for v in range(n + 1)]
    forms = set()
    for idx1 in range(len(pts)):
        u1, v1 = pts[idx1]
        for idx2 in range(idx1 + 1, len(pts)):
            u2, v2 = pts[idx2]
            a = v2 - v1
            b = -(u2 - u1)
            c = a * u1 + b * v1
            g = _gcd(abs(a), abs(b))
            a, b, c = a // g, b // g, c // g
            if b < 0 or (b == 0 and a < 0):
                a, b, c = -a, -b, -c
            forms.add((a, b, c))
    return forms


def _dir_cmp(p, q):
    cr = p[0] * q[1] - p[1] * q[0]
    return -1 if cr > 0 else (1 if cr < 0 else 0)


def _pencil_masks(n: int):
    """Trace masks of lines through exactly one grid point.

    Within a pencil the trace only changes when the direction sweeps past
    another grid point, so one mediant sample per angular interval is exact.
    """
    pts = [(u, v) for u in range(n + 1) for v in range(n + 1)]
    for (u, v) in pts:
        dirs = set()
        for (u2, v2) in pts:
            du, dv = u2 - u, v2 - v
            if du == 0 and dv == 0:
                continue
            if dv < 0 or (dv == 0 and du < 0):
                du, dv = -du, -dv
            g = _gcd(abs(du), dv)
            dirs.add((du // g, dv // g))
        ordered = sorted(dirs, key=cmp_to_key(_dir_cmp))
        samples = []
        for a, b in zip(ordered, ordered[1:]):
            samples.append((a[0] + b[0], a[1] + b[1]))
        if len(ordered) >= 2:
            z, f = ordered[-1], ordered[0]
            samples.append((z[0] - f[0], z[1] - f[1]))
        for (du, dv) in samples:
            a, b, c = dv, -du, dv * u - du * v
            if b < 0 or (b == 0 and a < 0):
                a, b, c = -a, -b, -c
            cells = _walk_cells_scaled(a, b, c, n)
            if cells:
                yield _mask_of(cells, n)


_TRACE_MASK_CACHE: Dict[int, FrozenSet[int]] = {}


def trace_masks_2d(n: int) -> FrozenSet[int]:
    """All line traces of the n-grid as cell bitmasks (bit i*n+j)."""
    if n in _TRACE_MASK_CACHE:
        return _TRACE_MASK_CACHE[n]
    if n < 1:
        raise TraceError("resolution must be >= 1")
    masks: Set[int] = set()
    for mask in staircase_masks(n):
        masks.add(mask)
        masks.add(_reflect_x_mask(mask, n))
    for (a, b, c) in _pair_line_forms(n):
        cells = _walk_cells_scaled(a, b, c, n)
        if cells:
            masks.add(_mask_of(cells, n))
    for mask in _pencil_masks(n):
        masks.add(mask)
    frozen = frozenset(masks)
    _TRACE_MASK_CACHE[n] = frozen
    return frozen


def enumerate_traces_2d(n: int) -> Set[Trace]:
    """Exactly the set of line traces {cells met by L : L meets the unit square}."""
    return {
        Trace(2, n, frozenset(_mask_to_cells(mask, n))) for mask in trace_masks_2d(n)
    }


# ---------------------------------------------------------------------------
# per-line traces in any dimension
# ---------------------------------------------------------------------------


def compute_trace(line: Line, n: int, d: Optional[int] = None) -> Trace:
    """Exact set of closed cells met by the line inside the unit cube."""
    if d is None:
        d = line.d
    if d != line.d:
        raise TraceError("dimension mismatch")
    seg = line_box_clip(line, unit_box(d))
    if seg is None:
        raise TraceError("line misses unit cube")
    if d == 2:
        a, b, c = line_scaled_form(line, n)
        cells = _walk_cells_scaled(a, b, c, n)
        if not cells:
            raise TraceError("line misses unit cube")
        return Trace(2, n, frozenset(cells))
    cells = _trace_cells_general(line, n, d)
    if not cells:
        raise TraceError("line misses unit cube")
    return Trace(d, n, frozenset(cells))


def _trace_cells_general(line: Line, n: int, d: int):
    axis = reference_axis(line) - 1
    seg = line_box_clip(line, unit_box(d))
    p, q = seg
    if p[axis] > q[axis]:
        p, q = q, p
    cells = set()
    lo, hi = p[axis] * n, q[axis] * n
    s_first = lo.numerator // lo.denominator
    s_last = -((-hi.numerator) // hi.denominator)  # ceil
    for s in range(max(0, s_first - 1), min(n - 1, s_last) + 1):
        slab = Box(
            tuple(Fraction(0) if k != axis else Fraction(s, n) for k in range(d)),
            tuple(Fraction(1) if k != axis else Fraction(s + 1, n) for k in range(d)),
        )
        sub = line_box_clip(line, slab)
        if sub is None:
            continue
        a, b = sub
        ranges = []
        for k in range(d):
            lo_k, hi_k = sorted((a[k] * n, b[k] * n))
            kmin = -((-lo_k.numerator) // lo_k.denominator) - 1
            kmax = hi_k.numerator // hi_k.denominator
            ranges.append((max(0, kmin), min(n - 1, kmax)))
        def rec(k, t):
            if k == d:
                cell = Cell(d, n, tuple(t))
                if line_box_clip(line, cell.box) is not None:
                    cells.add(tuple(t))
                return
            kmin, kmax = ranges[k]
            for v in range(kmin, kmax + 1):
                rec(k + 1, t + [v])
        rec(0, [])
    return cells


def strong_trace(line: Line, n: int) -> Trace:
    """Cells the line strongly intersects (closed threshold side/(2d))."""
    d = line.d
    if not strongly_intersects_box(line, unit_box(d)):
        raise TraceError("line does not strongly intersect unit cube")
    base = compute_trace(line, n, d)
    strong = {t for t in base.cells if strongly_intersects(line, Cell(d, n, t))}
    if not strong:
        raise TraceError("strong trace is empty")
    return Trace(d, n, frozenset(strong))


def reduced_strong_trace(line: Line, n: int) -> ReducedStrongTrace:
    """Selection of strongly intersected coarse cells read off the 4dn-fine trace.

    A coarse cell is kept when its fine sub-cells met by the line span at
    least four distinct reference-axis positions; such a span certifies a
    chord of length >= side/(2d) inside the coarse cell.
    """
    d = line.d
    if not strongly_intersects_box(line, unit_box(d)):
        raise TraceError("line does not strongly intersect unit cube")
    r = reference_axis(line)
    fine_n = 4 * d * n
    fine = compute_trace(line, fine_n, d)
    groups: Dict[Tuple[int, ...], set] = {}
    f = 4 * d
    for t in fine.cells:
        coarse = tuple(ti // f for ti in t)
        groups.setdefault(coarse, set()).add(t[r - 1])
    chosen = frozenset(c for c, vals in groups.items() if len(vals) >= 4)
    return ReducedStrongTrace(refax=r, cells=chosen)


_REDUCED_FAMILY_CACHE: Dict[int, Tuple[FrozenSet[ReducedStrongTrace], bool]] = {}


def reduced_trace_family_2d(n: int) -> FrozenSet[ReducedStrongTrace]:
    """Superset of the range of the reduced strong trace map over all lines
    strongly intersecting the unit square (d=2).

    Every fine trace of the 8n-grid is pushed through the selection rule for
    both reference-axis values (over-approximating slope-ambiguous traces),
    and empty selections are dropped.
    """
    return _reduced_family(n)[0]


def reduced_family_certificate_grade(n: int) -> bool:
    """True when dropping empty selections is provably safe at this n.

    A strongly intersecting line has a reference-axis chord of length at
    least 1/4, so its fine trace spans at least 2n cells along that axis.
    If no enumerated fine trace combines such a span with an empty selection,
    every strong line's reduced trace is a non-empty family member and the
    family is a complete coverage certificate.
    """
    return _reduced_family(n)[1]


def _reduced_family(n: int):
    if n in _REDUCED_FAMILY_CACHE:
        return _REDUCED_FAMILY_CACHE[n]
    fine_n = 8 * n
    f = 8
    members = set()
    proof_grade = True
    for mask in trace_masks_2d(fine_n):
        cells = _mask_to_cells(mask, fine_n)
        ivals = {i for (i, j) in cells}
        jvals = {j for (i, j) in cells}
        for r in (1, 2):
            groups: Dict[Tuple[int, int], set] = {}
            for (i, j) in cells:
                coarse = (i // f, j // f)
                groups.setdefault(coarse, set()).add(i if r == 1 else j)
            chosen = frozenset(c for c, vals in groups.items() if len(vals) >= 4)
            if chosen:
                members.add(ReducedStrongTrace(refax=r, cells=chosen))
            else:
                # A strong line with this reference axis needs a chord of
                # length >= 1/4 along it (span >= 2n+1 fine cells) and no
                # longer extent on the other axis (span gap <= 2).
                span_r, span_o = (
                    (len(ivals), len(jvals)) if r == 1 else (len(jvals), len(ivals))
                )
                if span_r >= 2 * n + 1 and span_o <= span_r + 2:
                    proof_grade = False
    result = (frozenset(members), proof_grade)
    _REDUCED_FAMILY_CACHE[n] = result
    return result


# ---------------------------------------------------------------------------
# randomized property checks
# ---------------------------------------------------------------------------


def random_line(rnd: random.Random, d: int, denom: int = 997) -> Line:
    """Random rational line through two points on distinct faces of the cube."""
    while True:
        f1 = rnd.randrange(2 * d)
        f2 = rnd.randrange(2 * d)
        if f1 == f2:
            continue
        pts = []
        for f in (f1, f2):
            axis, side = divmod(f, 2)
            p = [Fraction(rnd.randint(0, denom), denom) for _ in range(d)]
            p[axis] = Fraction(side)
            pts.append(tuple(p))
        p, q = pts
        dirv = tuple(b - a for a, b in zip(p, q))
        if all(x == 0 for x in dirv):
            continue
        return Line(p, dirv)


def random_strong_line(rnd: random.Random, d: int, denom: int = 997) -> Line:
    while True:
        line = random_line(rnd, d, denom)
        if strongly_intersects_box(line, unit_box(d)):
            return line


def projection_profiles(trace: Trace) -> Tuple[FrozenSet, ...]:
    """Per-axis projections dropping coordinate i (the d coarse shadows)."""
    d = trace.d
    outs = []
    for i in range(d):
        outs.append(
            frozenset(tuple(t[k] for k in range(d) if k != i) for t in trace.cells)
        )
    return tuple(outs)


def check_projection_determination(n: int, trials: int, seed=0) -> bool:
    """Sampled check that the d-1 dimensional shadows determine 3-d traces."""
    rnd = random.Random(seed)
    seen: Dict[Tuple, FrozenSet] = {}
    for _ in range(trials):
        line = random_line(rnd, 3)
        try:
            tr = compute_trace(line, n, 3)
        except TraceError:
            continue
        key = projection_profiles(tr)
        prev = seen.get(key)
        if prev is None:
            seen[key] = tr.cells
        elif prev != tr.cells:
            return False
    return True


def strong_coverage_check(
    k: CellSet,
    samples: int = 2000,
    seed=0,
    require_strong: bool = False,
    deterministic: Optional[bool] = None,
    det_cap: int = 3,
) -> bool:
    """Check that lines strongly intersecting the unit cube reach the cell set.

    Sampled part: seeded random strongly-intersecting lines plus the full axis
    line families must meet (or strongly meet, with `require_strong`) a cell
    of `k`.  Deterministic part (d=2, small n): every non-empty member of the
    reduced-trace family intersects `k`, which certifies that every strongly
    intersecting line strongly meets the union.
    """
    d = k.d
    if not k.cells:
        return False
    rnd = random.Random(seed)

    lines = []
    if d == 2:
        n = k.n
        for j in range(n):
            y = Fraction(2 * j + 1, 2 * n)
            lines.append(Line((Fraction(0), y), (Fraction(1), Fraction(0))))
            lines.append(Line((y, Fraction(0)), (Fraction(0), Fraction(1))))
        lines.append(Line((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))))
        lines.append(Line((Fraction(0), Fraction(1)), (Fraction(1), Fraction(-1))))
    for _ in range(samples):
        lines.append(random_strong_line(rnd, d))

    for line in lines:
        if not strongly_intersects_box(line, unit_box(d)):
            continue
        try:
            tr = compute_trace(line, k.n, d)
        except TraceError:
            continue
        hit = False
        for t in tr.cells:
            if t in k.cells:
                if not require_strong or strongly_intersects(line, Cell(d, k.n, t)):
                    hit = True
                    break
        if not hit:
            return False

    if deterministic is None:
        deterministic = d == 2 and k.n <= det_cap
    if deterministic:
        if d != 2:
            raise TraceError("deterministic coverage certificate needs d=2")
        if not reduced_family_certificate_grade(k.n):
            return False
        for member in reduced_trace_family_2d(k.n):
            if not (member.cells & k.cells):
                return False
    return True
