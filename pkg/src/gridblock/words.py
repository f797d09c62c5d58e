"""Balanced words over {U, R} and the closed-form count.

A word is balanced when any two equal-length windows of consecutive letters
have U-counts differing by at most one.  These words encode the monotone
up/right crossing sequences of grid lines, and their number has the classical
closed form 1 + sum_{i=1}^{m} (m+1-i) * phi(i).
"""

from __future__ import annotations


def euler_totient(i: int) -> int:
    if i < 1:
        raise ValueError("totient needs i >= 1")
    result = i
    p = 2
    m = i
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def count_balanced_words(m: int) -> int:
    """Closed-form count of balanced words of length m."""
    if m < 0:
        raise ValueError("word length must be >= 0")
    return 1 + sum((m + 1 - i) * euler_totient(i) for i in range(1, m + 1))


def is_balanced(word) -> bool:
    """word: sequence of 0/1 (or 'U'/'R'); checks every window-length pair."""
    bits = [1 if w in (1, "U") else 0 for w in word]
    m = len(bits)
    prefix = [0]
    for b in bits:
        prefix.append(prefix[-1] + b)
    for length in range(1, m):
        counts = [prefix[s + length] - prefix[s] for s in range(m - length + 1)]
        if max(counts) - min(counts) > 1:
            return False
    return True


def balanced_brute(m: int) -> int:
    """Count balanced words of length m by direct enumeration of {U,R}^m."""
    if m < 0:
        raise ValueError("word length must be >= 0")
    if m == 0:
        return 1
    count = 0
    for w in range(1 << m):
        bits = [(w >> j) & 1 for j in range(m)]
        if _balanced_early_exit(bits):
            count += 1
    return count


def _balanced_early_exit(bits) -> bool:
    m = len(bits)
    prefix = [0]
    for b in bits:
        prefix.append(prefix[-1] + b)
    for length in range(1, m):
        lo = hi = prefix[length]
        for s in range(1, m - length + 1):
            c = prefix[s + length] - prefix[s]
            if c < lo:
                lo = c
            elif c > hi:
                hi = c
            if hi - lo > 1:
                return False
    return True


def balanced_words(m: int):
    """All balanced words of length m as 0/1 tuples, by pruned extension.

    Balancedness is inherited by prefixes, so the search tree is tiny.
    """
    out = []

    def extend(bits):
        if len(bits) == m:
            out.append(tuple(bits))
            return
        for b in (0, 1):
            bits.append(b)
            if _balanced_early_exit(bits):
                extend(bits)
            bits.pop()

    extend([])
    return out
