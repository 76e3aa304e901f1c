"""Graded posets: validation, flag numbers, witnesses, duality, partitions."""

from __future__ import annotations

import itertools
import random

import pytest

from flagcone import ranksets
from flagcone.intervals import Interval, IntervalSystem, blockers, is_blocker
from flagcone.poset import (
    GradedPoset,
    NotComparable,
    PosetValidationError,
    WitnessSpec,
    chain_interval_system,
    dual,
    first_atom,
    flag_number,
    flag_vector,
    format_poset,
    interval_subposet,
    next_selected_rank,
    parse_poset,
    partition_classes,
    random_graded_poset,
    reflect_mask,
    validate,
    witness_poset,
)

DIAMOND = (
    [("0", 0), ("a", 1), ("b", 1), ("1", 2)],
    [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
)


@pytest.fixture
def diamond() -> GradedPoset:
    return validate(*DIAMOND)


@pytest.fixture
def fig_poset() -> GradedPoset:
    """Witness poset P(3, {[1,2],[2,3]}, 2): ten elements, rank 4."""
    sys_ = IntervalSystem.of(3, [(1, 2), (2, 3)])
    return witness_poset(WitnessSpec(3, sys_, 2))


def brute_flag_number(P: GradedPoset, mask: int) -> int:
    """Oracle: enumerate tuples over the selected levels, test comparability."""
    ranks = ranksets.elems_of(mask)
    if not ranks:
        return 1
    total = 0
    for combo in itertools.product(*(P.level(r) for r in ranks)):
        if all(P.le(a, b) for a, b in zip(combo, combo[1:])):
            total += 1
    return total


def sample_numbering(P: GradedPoset, rng: random.Random) -> dict[str, int]:
    """Random per-level permutation as an explicit numbering map."""
    key: dict[str, int] = {}
    for r in range(P.rank + 1):
        order = list(P.level(r))
        rng.shuffle(order)
        for i, x in enumerate(order):
            key[x] = i
    return key


class TestValidate:
    def test_diamond(self, diamond):
        assert diamond.rank == 2
        assert diamond.bottom == "0"
        assert diamond.top == "1"
        assert diamond.level(1) == ("a", "b")
        assert diamond.le("0", "1")
        assert not diamond.le("a", "b")

    def test_duplicate_element(self):
        with pytest.raises(PosetValidationError) as e:
            validate([("x", 0), ("x", 1)], [])
        assert e.value.code == "DuplicateElement"

    def test_no_unique_bottom(self):
        with pytest.raises(PosetValidationError) as e:
            validate(
                [("a", 0), ("b", 0), ("1", 1)], [("a", "1"), ("b", "1")]
            )
        assert e.value.code == "NoUniqueBottom"

    def test_no_unique_top(self):
        with pytest.raises(PosetValidationError) as e:
            validate(
                [("0", 0), ("a", 1), ("b", 1)], [("0", "a"), ("0", "b")]
            )
        assert e.value.code == "NoUniqueTop"

    def test_bad_cover_rank(self):
        with pytest.raises(PosetValidationError) as e:
            validate(
                [("0", 0), ("a", 1), ("1", 2)],
                [("0", "a"), ("a", "1"), ("0", "1")],
            )
        assert e.value.code == "BadCoverRank"

    def test_dangling_element(self):
        with pytest.raises(PosetValidationError) as e:
            validate(
                [("0", 0), ("a", 1), ("b", 1), ("1", 2)],
                [("0", "a"), ("a", "1"), ("b", "1")],
            )
        assert e.value.code == "DanglingElement"

    def test_unknown_element(self):
        with pytest.raises(PosetValidationError) as e:
            validate([("0", 0), ("1", 1)], [("0", "z")])
        assert e.value.code == "UnknownElement"

    def test_trivial_poset(self):
        with pytest.raises(PosetValidationError):
            validate([("x", 0)], [])

    def test_rank_one_chain(self):
        P = validate([("0", 0), ("1", 1)], [("0", "1")])
        assert P.rank == 1
        assert flag_vector(P) == {0: 1}


class TestFlagNumbers:
    def test_diamond(self, diamond):
        assert flag_number(diamond, 0) == 1
        assert flag_number(diamond, 0b1) == 2

    def test_fig_poset_vector(self, fig_poset):
        assert len(fig_poset) == 10
        by_set = {
            (): 1, (1,): 2, (2,): 4, (3,): 2,
            (1, 2): 4, (1, 3): 4, (2, 3): 4, (1, 2, 3): 4,
        }
        expected = [by_set[ranksets.elems_of(m)] for m in range(8)]
        assert [flag_number(fig_poset, m) for m in range(8)] == expected
        assert sum(flag_vector(fig_poset).values()) == 25

    def test_out_of_range(self, diamond):
        with pytest.raises(ranksets.RankSetOutOfRange):
            flag_number(diamond, 0b10)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_brute_force(self, seed):
        rng = random.Random(seed)
        P = random_graded_poset(rng.randint(2, 5), seed=seed)
        for mask in range(1 << P.n):
            assert flag_number(P, mask) == brute_flag_number(P, mask)

    def test_chain_poset(self):
        P = random_graded_poset(1, seed=3)
        assert flag_vector(P) == {0: 1}


class TestWitness:
    def test_fig_poset_structure(self, fig_poset):
        assert fig_poset.rank == 4
        assert [len(fig_poset.level(r)) for r in range(5)] == [1, 2, 4, 2, 1]
        assert len(fig_poset.covers) == 12
        assert fig_poset.level(1) == ("(1;1,*)", "(1;2,*)")

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            WitnessSpec(0, IntervalSystem.empty(0), 2)
        with pytest.raises(ValueError):
            WitnessSpec(2, IntervalSystem.empty(2), 0)
        with pytest.raises(ValueError):
            WitnessSpec(2, IntervalSystem.empty(3), 2)

    def test_no_intervals_gives_chain(self):
        P = witness_poset(WitnessSpec(3, IntervalSystem.empty(3), 5))
        assert len(P) == 5
        assert flag_vector(P) == {m: 1 for m in range(8)}

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_flag_numbers_are_powers(self, N):
        sys_ = IntervalSystem.of(3, [(1, 2), (2, 3)])
        spec = WitnessSpec(3, sys_, N)
        P = witness_poset(spec)
        for mask in range(8):
            assert flag_number(P, mask) == spec.predicted_flag_number(mask)

    def test_overlapping_and_nested(self):
        # nested intervals exercise independent coordinates
        sys_ = IntervalSystem.of(4, [(1, 4), (2, 3)])
        spec = WitnessSpec(4, sys_, 2)
        P = witness_poset(spec)
        for mask in range(16):
            assert flag_number(P, mask) == spec.predicted_flag_number(mask)


class TestDual:
    def test_reflect_mask(self):
        assert reflect_mask(0b001, 3) == 0b100
        assert reflect_mask(0b101, 3) == 0b101
        assert reflect_mask(0, 3) == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_flag_duality(self, seed):
        P = random_graded_poset(random.Random(seed).randint(2, 5), seed=seed)
        Q = dual(P)
        for mask in range(1 << P.n):
            assert flag_number(Q, mask) == flag_number(P, reflect_mask(mask, P.n))

    def test_involution(self, fig_poset):
        Q = dual(dual(fig_poset))
        assert Q.elements == fig_poset.elements
        assert sorted(Q.covers) == sorted(fig_poset.covers)


class TestNextSelectedRank:
    def test_examples(self):
        s = ranksets.mask_of([2, 4])
        assert next_selected_rank(s, 1, 4) == 2
        assert next_selected_rank(s, 3, 4) == 4
        assert next_selected_rank(s, 5, 4) == 5
        assert next_selected_rank(0, 1, 4) == 5

    def test_bad_args(self):
        with pytest.raises(ValueError):
            next_selected_rank(0, 0, 3)
        with pytest.raises(ranksets.RankSetOutOfRange):
            next_selected_rank(0b1000, 1, 3)


class TestFirstAtom:
    def test_fig_first_atom(self, fig_poset):
        assert first_atom(fig_poset, fig_poset.bottom, fig_poset.top) == "(1;1,*)"

    def test_cover_interval(self, fig_poset):
        assert first_atom(fig_poset, "(1;1,*)", "(2;1,2)") == "(2;1,2)"

    def test_not_comparable(self, fig_poset):
        with pytest.raises(NotComparable):
            first_atom(fig_poset, "(1;1,*)", "(1;2,*)")
        with pytest.raises(NotComparable):
            first_atom(fig_poset, fig_poset.bottom, fig_poset.bottom)

    def test_numbering_override(self, fig_poset):
        reversed_numbering = {
            x: -fig_poset.position(x) for x in fig_poset.elements
        }
        assert (
            first_atom(fig_poset, fig_poset.bottom, fig_poset.top, reversed_numbering)
            == "(1;2,*)"
        )


class TestChainPartition:
    def test_lex_first_chain_has_empty_system(self, fig_poset):
        chain = (fig_poset.bottom, "(1;1,*)", "(2;1,1)", "(3;*,1)", fig_poset.top)
        assert chain_interval_system(fig_poset, chain) == IntervalSystem.empty(3)

    def test_second_branch_chain(self, fig_poset):
        chain = (fig_poset.bottom, "(1;2,*)", "(2;2,1)", "(3;*,1)", fig_poset.top)
        assert chain_interval_system(fig_poset, chain) == IntervalSystem.of(
            3, [(1, 2)]
        )

    def test_bad_chain(self, fig_poset):
        with pytest.raises(ValueError):
            chain_interval_system(fig_poset, (fig_poset.bottom, fig_poset.top))

    def test_class_sizes_are_flag_numbers(self, fig_poset):
        classes = partition_classes(fig_poset)
        for mask, chains in classes.items():
            assert len(chains) == flag_number(fig_poset, mask)
        assert sum(len(c) for c in classes.values()) == 25

    def test_blocker_criterion(self, fig_poset):
        """Membership in F_S is blocking of the chain's interval system."""
        classes = partition_classes(fig_poset)
        for chain in fig_poset.maximal_chains():
            system = chain_interval_system(fig_poset, chain)
            for mask in range(8):
                expected = is_blocker(mask, system)
                assert (chain in classes[mask]) == expected

    @pytest.mark.parametrize("seed", range(6))
    def test_partition_under_random_numberings(self, seed):
        rng = random.Random(seed)
        P = random_graded_poset(rng.randint(2, 4), seed=seed + 100)
        for _ in range(3):
            numbering = sample_numbering(P, rng)
            classes = partition_classes(P, numbering)
            for mask in range(1 << P.n):
                assert len(classes[mask]) == flag_number(P, mask)
            for chain in P.maximal_chains():
                system = chain_interval_system(P, chain, numbering)
                members = blockers(system).members
                for mask in range(1 << P.n):
                    assert (chain in classes[mask]) == (mask in members)


class TestIntervalSubposet:
    def test_lower_interval(self, fig_poset):
        sub = interval_subposet(fig_poset, fig_poset.bottom, "(2;1,1)")
        assert sub.rank == 2
        assert len(sub) == 3

    def test_whole(self, fig_poset):
        sub = interval_subposet(fig_poset, fig_poset.bottom, fig_poset.top)
        assert len(sub) == 10

    def test_not_comparable(self, fig_poset):
        with pytest.raises(NotComparable):
            interval_subposet(fig_poset, "(1;1,*)", "(1;2,*)")


class TestRandomPoset:
    def test_deterministic(self):
        a = random_graded_poset(4, seed=7)
        b = random_graded_poset(4, seed=7)
        assert a.elements == b.elements
        assert a.covers == b.covers

    def test_seed_changes_poset(self):
        outs = {random_graded_poset(4, seed=s).covers for s in range(6)}
        assert len(outs) > 1

    @pytest.mark.parametrize("rank", [1, 2, 3, 4, 5])
    def test_valid_and_bounded(self, rank):
        P = random_graded_poset(rank, seed=rank)
        assert P.rank == rank
        for r in range(1, rank):
            assert 1 <= len(P.level(r)) <= 4


class TestTextFormat:
    def test_roundtrip(self, fig_poset):
        text = format_poset(fig_poset)
        Q = parse_poset(text)
        assert Q.elements == fig_poset.elements
        assert Q.covers == fig_poset.covers
        assert format_poset(Q) == text

    def test_parse_with_comments(self):
        text = """
# a diamond
poset rank=2
elem 0 0
elem a 1
elem b 1  # middle
elem 1 2
cover 0 a
cover 0 b
cover a 1
cover b 1
"""
        P = parse_poset(text)
        assert P.rank == 2
        assert flag_number(P, 1) == 2

    def test_header_mismatch(self):
        text = "poset rank=3\nelem 0 0\nelem 1 1\ncover 0 1\n"
        with pytest.raises(PosetValidationError):
            parse_poset(text)

    def test_missing_header(self):
        with pytest.raises(ValueError):
            parse_poset("elem 0 0\n")
