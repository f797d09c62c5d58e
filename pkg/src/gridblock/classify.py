"""Existence classification for (l, k, d): compact sets meeting every k-flat
of the unit cube whose l-fold sumset is nowhere dense.

Verdicts: NotExists from the counting bound l*k <= (l-1)(d-1); Exists from a
closure of base cases (2,k,d) with 2k >= d under four derivation rules; Open
otherwise.  Every non-open verdict carries a replayable derivation chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

Triple = Tuple[int, int, int]

RULE_BASE = "base: pair sums, exists exactly when 2k >= d"
RULE_DROP_ORDER = (
    "drop sum order: every example contains the origin, so shorter sums "
    "stay inside longer ones"
)
RULE_RAISE_FLAT = (
    "raise flat dimension: each (k+1)-flat meeting the cube contains a "
    "k-flat meeting it"
)
RULE_PRODUCT = "product with [0,1]: (l,k,d) -> (l,k+1,d+1)"
RULE_CORNER_COLUMNS = "corner-column lift: (l,d-1,d) -> (l+1,d,d+1)"
RULE_COUNTING_BOUND = (
    "counting bound: l*k <= (l-1)*(d-1) forces the l-fold sumset to have "
    "non-empty interior"
)


@dataclass(frozen=True)
class ClassificationResult:
    l: int
    k: int
    d: int
    verdict: str  # Exists | NotExists | Open
    derivation: Tuple[str, ...]


def _valid(l: int, k: int, d: int) -> bool:
    return l >= 2 and d >= 2 and 0 < k < d


def not_exists(l: int, k: int, d: int) -> bool:
    return l * k <= (l - 1) * (d - 1)


def _existence_closure(d_max: int, l_max: int) -> Dict[Triple, Tuple[str, Optional[Triple]]]:
    table: Dict[Triple, Tuple[str, Optional[Triple]]] = {}
    frontier: List[Triple] = []
    for d in range(2, d_max + 1):
        for k in range(1, d):
            if 2 * k >= d:
                table[(2, k, d)] = (RULE_BASE, None)
                frontier.append((2, k, d))
    while frontier:
        l, k, d = frontier.pop()
        steps = []
        if l - 1 >= 2:
            steps.append(((l - 1, k, d), RULE_DROP_ORDER))
        if k + 1 < d:
            steps.append(((l, k + 1, d), RULE_RAISE_FLAT))
        if d + 1 <= d_max:
            steps.append(((l, k + 1, d + 1), RULE_PRODUCT))
            if k == d - 1 and l + 1 <= l_max:
                steps.append(((l + 1, d, d + 1), RULE_CORNER_COLUMNS))
        for (child, rule) in steps:
            cl, ck, cd = child
            if cl > l_max or cd > d_max or not _valid(*child):
                continue
            if child not in table:
                table[child] = (rule, (l, k, d))
                frontier.append(child)
    return table


def classify(l: int, k: int, d: int) -> ClassificationResult:
    if not _valid(l, k, d):
        raise ValueError("need l >= 2, d >= 2 and 0 < k < d")
    if not_exists(l, k, d):
        chain = (
            f"l*k = {l * k} <= {(l - 1) * (d - 1)} = (l-1)*(d-1)",
            RULE_COUNTING_BOUND,
        )
        return ClassificationResult(l, k, d, "NotExists", chain)
    # Rule applications never leave d' <= d, and the corner-column rule can
    # raise l at most once per dimension step, so l' <= max(l, d) + 1 covers
    # every derivation that could reach (l, k, d).
    table = _existence_closure(d, max(l, d) + 1)
    if (l, k, d) in table:
        chain: List[str] = []
        cur: Optional[Triple] = (l, k, d)
        while cur is not None:
            rule, parent = table[cur]
            chain.append(f"({cur[0]},{cur[1]},{cur[2]}): {rule}")
            cur = parent
        return ClassificationResult(l, k, d, "Exists", tuple(reversed(chain)))
    return ClassificationResult(
        l, k, d, "Open", ("outside the counting bound and the existence closure",)
    )


def consistency_sweep(l_max: int = 8, d_max: int = 12) -> bool:
    """No triple may be derivable as Exists while the counting bound says
    NotExists; sweeps the whole table."""
    table = _existence_closure(d_max, max(l_max, d_max) + 1)
    for (l, k, d) in table:
        if l <= l_max and d <= d_max and not_exists(l, k, d):
            return False
    return True
