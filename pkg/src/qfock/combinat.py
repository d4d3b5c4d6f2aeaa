"""Pair contractions on totally ordered index sets and their q-weight statistics.

The basic objects are pairings (collections of disjoint ordered pairs inside a
finite, totally ordered label set) together with three integer statistics:

- ``cr``  -- the crossing number: the number of interleaved arc pairs,
- ``sp``  -- the separation number: the number of (arc, free label) incidences
  where the free label lies strictly inside the arc,
- ``crb`` -- the intertwining number ``cr + sp``, which is the exponent of q
  attached to a partial contraction in the Wick calculus.

Labels are arbitrary naturals, not necessarily ``1..n``, so that sub-pairings
keep the labels of their parent set.  All values are immutable and all
functions are pure.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexSet:
    """A finite, totally ordered set of natural-number labels.

    >>> IndexSet.range(3).elements
    (1, 2, 3)
    """

    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", elems)
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise ValueError("labels must be strictly increasing")

    @staticmethod
    def range(n: int) -> "IndexSet":
        return IndexSet(tuple(range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, label: int) -> bool:
        return label in self.elements


@dataclass(frozen=True)
class Pairing:
    """Disjoint ordered pairs ``(s, t)`` with ``s < t`` inside a context set.

    The pair list is kept canonically sorted by first element, so two pairings
    are equal iff their canonical forms are equal.

    >>> p = Pairing(((2, 5), (1, 4)), IndexSet.range(6))
    >>> p.pairs
    ((1, 4), (2, 5))
    >>> p.free()
    (3, 6)
    """

    pairs: tuple[tuple[int, int], ...]
    context: IndexSet

    def __post_init__(self):
        pairs = tuple(sorted((int(s), int(t)) for s, t in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        seen: set[int] = set()
        for s, t in pairs:
            if s >= t:
                raise ValueError(f"pair ({s}, {t}) must have s < t")
            if s not in self.context or t not in self.context:
                raise ValueError(f"pair ({s}, {t}) not inside the context")
            if s in seen or t in seen:
                raise ValueError("pairs must be pairwise disjoint")
            seen.update((s, t))

    @staticmethod
    def empty(context: IndexSet) -> "Pairing":
        return Pairing((), context)

    def covered(self) -> frozenset[int]:
        return frozenset(x for pair in self.pairs for x in pair)

    def free(self) -> tuple[int, ...]:
        """Context labels not covered by any pair, in increasing order."""
        cov = self.covered()
        return tuple(x for x in self.context if x not in cov)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PartitionedSet:
    """A totally ordered set split into consecutive (possibly empty) blocks."""

    blocks: tuple[IndexSet, ...]
    total: IndexSet = field(init=False)

    def __init__(self, blocks) -> None:
        blocks = tuple(b if isinstance(b, IndexSet) else IndexSet(tuple(b)) for b in blocks)
        object.__setattr__(self, "blocks", blocks)
        merged: list[int] = []
        for b in blocks:
            if b.elements and merged and b.elements[0] <= merged[-1]:
                raise ValueError("blocks must be consecutive and disjoint")
            merged.extend(b.elements)
        object.__setattr__(self, "total", IndexSet(tuple(merged)))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_index(self, label: int) -> int:
        for i, b in enumerate(self.blocks):
            if label in b:
                return i
        raise KeyError(label)


@dataclass(frozen=True)
class CosetRep:
    """A minimum-inversion representative of a two-block permutation coset.

    ``permutation`` is in one-line notation over ``1..n``; ``inversions`` is
    the number of pairs ``i < j`` with ``perm[j] < perm[i]``.
    """

    permutation: tuple[int, ...]
    inversions: int


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def crossing_number(pairing: Pairing) -> int:
    """Number of arc pairs ``(i,j), (k,l)`` with ``i < k < j < l``."""
    cr = 0
    for (i, j), (k, l) in itertools.combinations(pairing.pairs, 2):
        if i < k < j < l or k < i < l < j:
            cr += 1
    return cr


def separation_number(pairing: Pairing) -> int:
    """Number of (arc, free label) incidences with the label inside the arc."""
    free = pairing.free()
    return sum(1 for (s, t) in pairing.pairs for x in free if s < x < t)


def contraction_stats(pairing: Pairing) -> tuple[int, int, int]:
    """Return ``(cr, sp, crb)`` for a pairing.

    >>> contraction_stats(Pairing(((1, 4), (2, 5)), IndexSet.range(6)))
    (1, 2, 3)
    """
    cr = crossing_number(pairing)
    sp = separation_number(pairing)
    return cr, sp, cr + sp


def intertwining_number(pairing: Pairing) -> int:
    cr, sp, crb = contraction_stats(pairing)
    return crb


def merge_pairings(a: Pairing, b: Pairing, context: IndexSet | None = None) -> Pairing:
    """Union of two disjoint pairings, over ``context`` (default: a's context)."""
    if a.covered() & b.covered():
        raise ValueError("pairings not disjoint")
    ctx = context if context is not None else a.context
    return Pairing(a.pairs + b.pairs, ctx)


def relative_intertwining(pi: Pairing, sigma: Pairing) -> int:
    """``crb(pi ∪ sigma) − crb(sigma)``, both over the shared ambient context.

    Both intertwining numbers are evaluated in the full context with free set
    "context minus the respective pairing".  The result is a signed integer;
    nonnegativity is not asserted.
    """
    if pi.context != sigma.context:
        raise ValueError("pairings must share a context")
    union = merge_pairings(pi, sigma)
    return intertwining_number(union) - intertwining_number(sigma)


def mirror_double(pairing: Pairing) -> Pairing:
    """Duplicate a pairing with its mirror image and close up the free slots.

    The context ``x_1 < ... < x_n`` is doubled to positions ``1..2n``; each
    arc ``(s, t)`` is kept and mirrored, and every free slot is connected to
    its opposite.  The doubling identity ``crb(p) == cr(mirror_double(p)) / 2``
    holds for every pairing.
    """
    n = len(pairing.context)
    pos = {label: i + 1 for i, label in enumerate(pairing.context)}
    doubled = IndexSet.range(2 * n)
    pairs: list[tuple[int, int]] = []
    for s, t in pairing.pairs:
        ps, pt = pos[s], pos[t]
        pairs.append((ps, pt))
        pairs.append((2 * n + 1 - pt, 2 * n + 1 - ps))
    for x in pairing.free():
        px = pos[x]
        pairs.append((px, 2 * n + 1 - px))
    return Pairing(tuple(pairs), doubled)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _pairings_rec(labels: tuple[int, ...], k: int | None):
    # Recursive enumeration: the smallest label is either free or paired
    # with some later label.
    if k is not None and k == 0:
        yield ()
        return
    if not labels:
        if k is None or k == 0:
            yield ()
        return
    head, rest = labels[0], labels[1:]
    if k is None or 2 * k <= len(rest):
        for tail in _pairings_rec(rest, k):
            yield tail
    for i, other in enumerate(rest):
        sub = rest[:i] + rest[i + 1:]
        nxt = None if k is None else k - 1
        for tail in _pairings_rec(sub, nxt):
            yield ((head, other),) + tail


def enumerate_pairings(context: IndexSet, k: int | None = None) -> list[Pairing]:
    """All pairings of ``context`` (with exactly ``k`` pairs when given).

    The result is duplicate-free and sorted lexicographically on the
    canonical pair list, so the empty pairing comes first.

    >>> [p.pairs for p in enumerate_pairings(IndexSet.range(3))]
    [(), ((1, 2),), ((1, 3),), ((2, 3),)]
    """
    if k is not None and 2 * k > len(context):
        return []
    raw = {tuple(sorted(p)) for p in _pairings_rec(context.elements, k)}
    return [Pairing(p, context) for p in sorted(raw)]


def enumerate_interblock_pairings(partitioned: PartitionedSet) -> list[Pairing]:
    """Pairings of the total set with no pair internal to a block."""
    ctx = partitioned.total
    out = []
    for p in enumerate_pairings(ctx):
        if all(partitioned.block_index(s) != partitioned.block_index(t) for s, t in p.pairs):
            out.append(p)
    return out


def interleave(legs: PartitionedSet, inserts: PartitionedSet) -> PartitionedSet:
    """Interleaving ``I_1 ⊔ J_1 ⊔ I_2 ⊔ ... ⊔ J_{m-1} ⊔ I_m`` of two partitioned sets.

    Requires ``inserts`` to have exactly one block fewer than ``legs`` and the
    label ranges to be compatible with the alternating order.
    """
    if inserts.n_blocks != legs.n_blocks - 1:
        raise ValueError("insert partition must have one block fewer than the leg partition")
    blocks: list[IndexSet] = []
    for i, leg_block in enumerate(legs.blocks):
        blocks.append(leg_block)
        if i < inserts.n_blocks:
            blocks.append(inserts.blocks[i])
    return PartitionedSet(blocks)


def enumerate_restricted_pairings(legs: PartitionedSet, inserts: PartitionedSet) -> list[Pairing]:
    """Inter-block pairings of the interleaving that avoid leg-leg pairs.

    >>> legs = PartitionedSet([(1,), (3,)])
    >>> inserts = PartitionedSet([(2,)])
    >>> [p.pairs for p in enumerate_restricted_pairings(legs, inserts)]
    [(), ((1, 2),), ((2, 3),)]
    """
    woven = interleave(legs, inserts)
    leg_labels = set(legs.total.elements)
    out = []
    for p in enumerate_interblock_pairings(woven):
        if all(not (s in leg_labels and t in leg_labels) for s, t in p.pairs):
            out.append(p)
    return out


def coset_reps(n: int, k: int) -> list[CosetRep]:
    """Minimum-inversion representatives of the two-block cosets of S_n.

    A representative is a permutation whose values ``1..k`` appear in
    increasing order of position, and likewise the values ``k+1..n``; there
    are exactly ``C(n, k)`` of them.  Results are sorted by one-line notation.

    >>> [(r.permutation, r.inversions) for r in coset_reps(3, 1)]
    [((1, 2, 3), 0), ((2, 1, 3), 1), ((2, 3, 1), 2)]
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    reps = []
    for positions in itertools.combinations(range(n), k):
        perm = [0] * n
        low = iter(range(1, k + 1))
        high = iter(range(k + 1, n + 1))
        pos_set = set(positions)
        for i in range(n):
            perm[i] = next(low) if i in pos_set else next(high)
        inv = sum(
            1
            for i in range(n)
            for j in range(i + 1, n)
            if perm[j] < perm[i]
        )
        reps.append(CosetRep(tuple(perm), inv))
    reps.sort(key=lambda r: r.permutation)
    assert len(reps) == comb(n, k)
    return reps


def double_factorial_odd(k: int) -> int:
    """(2k-1)!! with the convention (-1)!! = 1."""
    out = 1
    for j in range(1, 2 * k, 2):
        out *= j
    return out
