"""Certify planar patterns: blocking every line, and sumset avoidance.

A pattern T at resolution n is *blocking* when its cell union meets every
line that meets the unit square (equivalently: T hits every line trace).
It has a *sumset avoidance witness* when some half-grid vector
v = ((2p+1)/2n, (2q+1)/2n) keeps v - K1 disjoint from K1 + Z^2, where K1 is
the union of T's cells.  Both properties are decided exactly, blocking by
two independent methods.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, Optional, Tuple

from .geometry import Cell, Line, line_box_clip, line_cell_intersection, unit_box
from .traces import line_scaled_form, trace_masks_2d


class CertificationError(ValueError):
    def __init__(self, message, witness_line=None):
        super().__init__(message)
        self.witness_line = witness_line


@dataclass(frozen=True)
class Pattern:
    n: int
    cells: FrozenSet[Tuple[int, int]]
    d: int = 2

    def __post_init__(self):
        if self.d != 2:
            raise ValueError("patterns are planar")
        if not self.cells:
            raise ValueError("empty pattern")
        for t in self.cells:
            if len(t) != 2 or not all(0 <= x < self.n for x in t):
                raise ValueError(f"cell {t} outside grid of resolution {self.n}")

    @classmethod
    def of(cls, n: int, cells: Iterable) -> "Pattern":
        return cls(n, frozenset(tuple(c) for c in cells))

    def sorted_cells(self):
        return sorted(self.cells)

    def mask(self) -> int:
        m = 0
        for (i, j) in self.cells:
            m |= 1 << (i * self.n + j)
        return m


@dataclass(frozen=True)
class AvoidanceWitness:
    """Half-grid avoidance vector v = ((2p+1)/2n, (2q+1)/2n) with its
    verified integer disjointness data."""

    n: int
    p: int
    q: int
    t_plus: FrozenSet[Tuple[int, int]]
    t_minus: FrozenSet[Tuple[int, int]]

    @property
    def v(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(2 * self.p + 1, 2 * self.n), Fraction(2 * self.q + 1, 2 * self.n))


@dataclass(frozen=True)
class Certificate:
    pattern: Pattern
    blocking_traces: bool
    blocking_tangents: bool
    trace_count: int
    avoidance: AvoidanceWitness
    schema_version: int = 1


def verify_blocking_by_traces(pattern: Pattern) -> bool:
    """True iff every line trace at this resolution contains a pattern cell."""
    mask = pattern.mask()
    return all(t & mask for t in trace_masks_2d(pattern.n))


def _cell_corner_points(pattern: Pattern):
    n = pattern.n
    pts = set()
    for (i, j) in pattern.cells:
        for di in (0, 1):
            for dj in (0, 1):
                pts.add((Fraction(i + di, n), Fraction(j + dj, n)))
    for ci in (0, 1):
        for cj in (0, 1):
            pts.add((Fraction(ci), Fraction(cj)))
    return sorted(pts)


def _misses_all_cells_and_meets_square(line: Line, pattern: Pattern) -> bool:
    n = pattern.n
    a, b, c = line_scaled_form(line, n)
    # Strictly one-sided on all 4 corners <=> misses the closed cell.
    corners = ((0, 0), (1, 0), (0, 1), (1, 1))
    sq = [a * x * n + b * y * n - c for x in (0, 1) for y in (0, 1)]
    if all(v > 0 for v in sq) or all(v < 0 for v in sq):
        return False
    for (i, j) in pattern.cells:
        vals = [a * (i + di) + b * (j + dj) - c for (di, dj) in corners]
        if not (all(v > 0 for v in vals) or all(v < 0 for v in vals)):
            return False
    return True


def tangent_witness(pattern: Pattern) -> Optional[Line]:
    """Exact avoiding line found by the supported-line sweep, or None.

    A line missing the closed pattern can be moved until it rests on two
    corner points (of pattern cells or of the unit square), so perturbed
    versions of all corner-pair lines are a complete candidate family.
    Every returned witness is re-verified against the closed cells exactly.
    """
    n = pattern.n
    eps = Fraction(1, 64 * n * n)
    pts = _cell_corner_points(pattern)
    seen = set()
    for ia in range(len(pts)):
        for ib in range(ia + 1, len(pts)):
            p, q = pts[ia], pts[ib]
            d = (q[0] - p[0], q[1] - p[1])
            base = Line(p, d)
            key = base.canonical()
            if key in seen:
                continue
            seen.add(key)
            mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
            normal = (-d[1], d[0])
            candidates = [
                Line((p[0] + eps * normal[0], p[1] + eps * normal[1]), d),
                Line((p[0] - eps * normal[0], p[1] - eps * normal[1]), d),
                Line(mid, (d[0] + eps * normal[0], d[1] + eps * normal[1])),
                Line(mid, (d[0] - eps * normal[0], d[1] - eps * normal[1])),
            ]
            for cand in candidates:
                if _misses_all_cells_and_meets_square(cand, pattern):
                    if _verify_witness(cand, pattern):
                        return cand
    return None


def _verify_witness(line: Line, pattern: Pattern) -> bool:
    if line_box_clip(line, unit_box(2)) is None:
        return False
    for t in pattern.cells:
        if line_cell_intersection(line, Cell(2, pattern.n, t)) is not None:
            return False
    return True


def verify_blocking_by_tangents(pattern: Pattern):
    """True when blocked; otherwise an exact avoiding witness Line."""
    w = tangent_witness(pattern)
    return True if w is None else w


def _avoidance_ok(cells, n: int, p: int, q: int, lattice) -> bool:
    for (t1, t2) in cells:
        for a, b in ((p - 1, q - 1), (p, q - 1), (p - 1, q), (p, q)):
            if (a - t1, b - t2) in lattice:
                return False
    return True


def _lattice_translates(cells, n: int):
    lat = set()
    for (t1, t2) in cells:
        for z1 in (-n, 0, n):
            for z2 in (-n, 0, n):
                lat.add((t1 + z1, t2 + z2))
    return lat


def verify_sumset_avoidance(pattern: Pattern) -> Optional[AvoidanceWitness]:
    """First (p, q) in lexicographic order whose half-grid vector works.

    The membership test uses all lattice translates within reach of the
    difference set, so the verdict matches the continuous statement for
    every (p, q), not only those with v in (1,2)^2.
    """
    n = pattern.n
    lattice = _lattice_translates(pattern.cells, n)
    for p in range(2 * n):
        for q in range(2 * n):
            if _avoidance_ok(pattern.cells, n, p, q, lattice):
                t_plus = frozenset(
                    (t1 + z1, t2 + z2)
                    for (t1, t2) in pattern.cells
                    for z1 in (0, n)
                    for z2 in (0, n)
                )
                t_minus = frozenset(
                    (a - t1, b - t2)
                    for (t1, t2) in pattern.cells
                    for a, b in ((p - 1, q - 1), (p, q - 1), (p - 1, q), (p, q))
                )
                return AvoidanceWitness(n=n, p=p, q=q, t_plus=t_plus, t_minus=t_minus)
    return None


def avoidance_candidates(pattern: Pattern):
    """All passing (p, q) pairs; used to report which vectors were tested."""
    n = pattern.n
    lattice = _lattice_translates(pattern.cells, n)
    return [
        (p, q)
        for p in range(2 * n)
        for q in range(2 * n)
        if _avoidance_ok(pattern.cells, n, p, q, lattice)
    ]


def make_certificate(pattern: Pattern) -> Certificate:
    """Run both blocking methods and the avoidance search; all must pass."""
    traces_ok = verify_blocking_by_traces(pattern)
    tangents = verify_blocking_by_tangents(pattern)
    if not traces_ok or tangents is not True:
        witness = tangents if tangents is not True else None
        raise CertificationError("blocking failed (witness line attached)", witness)
    witness = verify_sumset_avoidance(pattern)
    if witness is None:
        raise CertificationError("no avoidance vector exists")
    return Certificate(
        pattern=pattern,
        blocking_traces=True,
        blocking_tangents=True,
        trace_count=len(trace_masks_2d(pattern.n)),
        avoidance=witness,
    )


def certificate_to_json(cert: Certificate) -> str:
    v = cert.avoidance.v
    doc = {
        "schemaVersion": cert.schema_version,
        "n": cert.pattern.n,
        "d": 2,
        "pattern": [list(t) for t in cert.pattern.sorted_cells()],
        "blocking": {
            "traces": cert.blocking_traces,
            "tangents": cert.blocking_tangents,
            "traceCount": cert.trace_count,
        },
        "avoidance": {
            "p": cert.avoidance.p,
            "q": cert.avoidance.q,
            "v": [str(v[0]), str(v[1])],
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def certificate_from_json(text: str) -> Certificate:
    doc = json.loads(text)
    if doc.get("schemaVersion") != 1:
        raise ValueError("unsupported certificate schema")
    pattern = Pattern.of(int(doc["n"]), [tuple(c) for c in doc["pattern"]])
    p, q = int(doc["avoidance"]["p"]), int(doc["avoidance"]["q"])
    n = pattern.n
    t_plus = frozenset(
        (t1 + z1, t2 + z2)
        for (t1, t2) in pattern.cells
        for z1 in (0, n)
        for z2 in (0, n)
    )
    t_minus = frozenset(
        (a - t1, b - t2)
        for (t1, t2) in pattern.cells
        for a, b in ((p - 1, q - 1), (p, q - 1), (p - 1, q), (p, q))
    )
    witness = AvoidanceWitness(n=n, p=p, q=q, t_plus=t_plus, t_minus=t_minus)
    return Certificate(
        pattern=pattern,
        blocking_traces=bool(doc["blocking"]["traces"]),
        blocking_tangents=bool(doc["blocking"]["tangents"]),
        trace_count=int(doc["blocking"]["traceCount"]),
        avoidance=witness,
    )


def replay_certificate(cert: Certificate) -> bool:
    """Re-run every check recorded in a certificate from scratch."""
    pattern = cert.pattern
    if not verify_blocking_by_traces(pattern):
        return False
    if verify_blocking_by_tangents(pattern) is not True:
        return False
    n = pattern.n
    lattice = _lattice_translates(pattern.cells, n)
    return _avoidance_ok(pattern.cells, n, cert.avoidance.p, cert.avoidance.q, lattice)
