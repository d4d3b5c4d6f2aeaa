import itertools
from math import comb

import pytest

from qfock.combinat import (CosetRep, IndexSet, Pairing, PartitionedSet,
                            contraction_stats, coset_reps, crossing_number,
                            double_factorial_odd, enumerate_interblock_pairings,
                            enumerate_pairings, enumerate_restricted_pairings,
                            interleave, intertwining_number, merge_pairings,
                            mirror_double, relative_intertwining)
from qfock.wickalg import norm_constants


# -- enumeration ---------------------------------------------------------------


def test_pairing_counts_small():
    assert len(enumerate_pairings(IndexSet.range(4), 2)) == 3
    assert len(enumerate_pairings(IndexSet.range(6), 3)) == 15
    all3 = enumerate_pairings(IndexSet.range(3))
    assert [p.pairs for p in all3] == [(), ((1, 2),), ((1, 3),), ((2, 3),)]


def test_pairing_counts_formula():
    for n in range(9):
        ctx = IndexSet.range(n)
        total = len(enumerate_pairings(ctx))
        expected = sum(comb(n, 2 * k) * double_factorial_odd(k)
                       for k in range(n // 2 + 1))
        assert total == expected
        for k in range(n // 2 + 1):
            assert len(enumerate_pairings(ctx, k)) == comb(n, 2 * k) * double_factorial_odd(k)


def test_enumeration_is_lexicographic_and_unique():
    ps = enumerate_pairings(IndexSet.range(5))
    forms = [p.pairs for p in ps]
    assert forms == sorted(forms)
    assert len(set(forms)) == len(forms)


def test_pairing_respects_arbitrary_labels():
    ctx = IndexSet((2, 5, 9))
    assert [p.pairs for p in enumerate_pairings(ctx)] == \
        [(), ((2, 5),), ((2, 9),), ((5, 9),)]


def test_pairing_validation():
    ctx = IndexSet.range(4)
    with pytest.raises(ValueError):
        Pairing(((2, 1),), ctx)
    with pytest.raises(ValueError):
        Pairing(((1, 5),), ctx)
    with pytest.raises(ValueError):
        Pairing(((1, 2), (2, 3)), ctx)


# -- statistics -----------------------------------------------------------------


def test_intertwining_example():
    p = Pairing(((1, 4), (2, 5)), IndexSet.range(6))
    assert contraction_stats(p) == (1, 2, 3)


def test_stats_trivia():
    assert contraction_stats(Pairing.empty(IndexSet.range(5))) == (0, 0, 0)
    assert contraction_stats(Pairing(((1, 3),), IndexSet.range(3))) == (0, 1, 1)


def test_doubling_identity_exhaustive():
    # crb(p) equals half the crossing number of the mirror-doubled pairing
    for n in range(7):
        for p in enumerate_pairings(IndexSet.range(n)):
            doubled = mirror_double(p)
            assert doubled.free() == ()
            assert 2 * intertwining_number(p) == crossing_number(doubled)


def test_crb_concatenation_additivity():
    # two pairings on consecutive label ranges do not intertwine
    for n, m in itertools.product(range(5), range(5)):
        left_ctx = IndexSet.range(n)
        right_ctx = IndexSet(tuple(range(n + 1, n + m + 1)))
        big = IndexSet.range(n + m)
        for pl in enumerate_pairings(left_ctx):
            for pr in enumerate_pairings(right_ctx):
                merged = Pairing(pl.pairs + pr.pairs, big)
                assert intertwining_number(merged) == \
                    intertwining_number(pl) + intertwining_number(pr)


def test_crb_append_recursion():
    # adding a pair (j, n+1) raises crb by the number of free labels after j
    for n in range(1, 7):
        big = IndexSet.range(n + 1)
        for p in enumerate_pairings(IndexSet.range(n)):
            free = set(p.free())
            for j in sorted(free):
                grown = Pairing(p.pairs + ((j, n + 1),), big)
                count = sum(1 for x in free if j < x <= n)
                assert intertwining_number(grown) == intertwining_number(p) + count


# -- relative intertwining --------------------------------------------------------


def test_relative_intertwining_examples():
    ctx3 = IndexSet.range(3)
    assert relative_intertwining(Pairing(((1, 2),), ctx3), Pairing.empty(ctx3)) == 0
    ctx6 = IndexSet.range(6)
    for sigma in enumerate_pairings(ctx6):
        assert relative_intertwining(Pairing.empty(ctx6), sigma) == 0
    pi = Pairing(((1, 4),), ctx6)
    sigma = Pairing(((2, 5),), ctx6)
    # crb(union) = 3, crb(sigma in the ambient context) = 2
    assert intertwining_number(merge_pairings(pi, sigma)) == 3
    assert intertwining_number(sigma) == 2
    assert relative_intertwining(pi, sigma) == 1


def test_relative_intertwining_disjointness_error():
    ctx = IndexSet.range(4)
    with pytest.raises(ValueError, match="not disjoint"):
        relative_intertwining(Pairing(((1, 2),), ctx), Pairing(((2, 3),), ctx))


# -- partitioned sets ---------------------------------------------------------------


def test_interblock_pairings():
    p = PartitionedSet([(1, 2), (3, 4)])
    got = [x.pairs for x in enumerate_interblock_pairings(p)]
    assert got == [(), ((1, 3),), ((1, 3), (2, 4)), ((1, 4),), ((1, 4), (2, 3)),
                   ((2, 3),), ((2, 4),)]
    assert len(got) == 7

    single = PartitionedSet([(1, 2, 3, 4)])
    assert [x.pairs for x in enumerate_interblock_pairings(single)] == [()]

    tiny = PartitionedSet([(1,), (2,)])
    assert [x.pairs for x in enumerate_interblock_pairings(tiny)] == [(), ((1, 2),)]


def test_restricted_pairings():
    legs = PartitionedSet([(1,), (3,)])
    inserts = PartitionedSet([(2,)])
    got = {x.pairs for x in enumerate_restricted_pairings(legs, inserts)}
    assert got == {(), ((1, 2),), ((2, 3),)}

    legs = PartitionedSet([(1,), (4,)])
    inserts = PartitionedSet([(2, 3)])
    got = {x.pairs for x in enumerate_restricted_pairings(legs, inserts)}
    assert got == {(), ((1, 2),), ((1, 3),), ((2, 4),), ((3, 4),),
                   ((1, 2), (3, 4)), ((1, 3), (2, 4))}

    legs = PartitionedSet([(1,), (2,)])
    empties = PartitionedSet([()])
    assert [x.pairs for x in enumerate_restricted_pairings(legs, empties)] == [()]


def test_interleave_block_count_mismatch():
    with pytest.raises(ValueError):
        interleave(PartitionedSet([(1,), (3,)]), PartitionedSet([(2,), (4,)]))


def test_partitioned_set_rejects_out_of_order_blocks():
    with pytest.raises(ValueError):
        PartitionedSet([(3, 4), (1, 2)])


# -- coset representatives ---------------------------------------------------------


def test_coset_reps_examples():
    assert [(r.permutation, r.inversions) for r in coset_reps(3, 1)] == \
        [((1, 2, 3), 0), ((2, 1, 3), 1), ((2, 3, 1), 2)]
    reps = {r.permutation: r.inversions for r in coset_reps(4, 2)}
    assert len(reps) == 6
    assert reps[(3, 1, 4, 2)] == 3
    for n in range(6):
        assert coset_reps(n, 0) == [CosetRep(tuple(range(1, n + 1)), 0)]
    with pytest.raises(ValueError):
        coset_reps(3, 4)


def _inversions(perm):
    n = len(perm)
    return sum(1 for i in range(n) for j in range(i + 1, n) if perm[j] < perm[i])


def test_coset_reps_minimize_inversions_in_class():
    # the class of a representative is generated by permuting the values
    # 1..k among themselves and k+1..n among themselves
    for n in range(1, 6):
        for k in range(n + 1):
            for rep in coset_reps(n, k):
                base = rep.permutation
                assert rep.inversions == _inversions(base)
                for lo in itertools.permutations(range(1, k + 1)):
                    for hi in itertools.permutations(range(k + 1, n + 1)):
                        relabel = dict(zip(range(1, k + 1), lo))
                        relabel.update(zip(range(k + 1, n + 1), hi))
                        other = tuple(relabel[v] for v in base)
                        assert _inversions(other) >= rep.inversions


def test_q_binomial_sum_bounded_by_constant():
    for q in (-0.9, -0.5, 0.0, 0.5, 0.9):
        C = norm_constants(q).C
        for n in range(9):
            for k in range(n + 1):
                total = sum(q ** r.inversions for r in coset_reps(n, k))
                assert abs(total) <= C + 1e-12
