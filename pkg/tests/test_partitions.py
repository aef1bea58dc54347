import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bell_triangle, chain_count_by_matrix, chains_by_subsets, naive_leq, rgs_partitions
from stratascope.partitions import (
    BlockPointer,
    CapExceededError,
    Chain,
    PartitionParseError,
    SetPartition,
    adjoin_singleton,
    bottom,
    classify_extension,
    elements_of,
    enumerate_chains,
    enumerate_partitions,
    extend_into_block,
    format_partition,
    join,
    leq,
    meet,
    parse_partition,
    strip_singleton,
    top,
)


def as_sets(p: SetPartition) -> frozenset:
    return frozenset(frozenset(b) for b in p.block_elements())


class TestParsing:
    def test_displayed_examples(self):
        p = parse_partition("12|34|56", 6)
        assert p.block_elements() == ((1, 2), (3, 4), (5, 6))
        assert parse_partition("123456", 6) == bottom(6)
        q = parse_partition("1,10|2,3,4,5,6,7,8,9", 10)
        assert q.block_elements() == ((1, 10), tuple(range(2, 10)))

    def test_comma_grammar_small_n(self):
        assert parse_partition("1,2|3,4", 4) == parse_partition("12|34", 4)

    def test_noncanonical_input_canonicalized(self):
        assert format_partition(parse_partition("34|12", 4)) == "12|34"
        assert format_partition(parse_partition("21|43", 4)) == "12|34"

    def test_duplicate_element(self):
        with pytest.raises(PartitionParseError) as e:
            parse_partition("12|24", 4)
        assert "duplicate" in str(e.value)
        assert e.value.position == 3

    def test_missing_element(self):
        with pytest.raises(PartitionParseError) as e:
            parse_partition("12", 3)
        assert "missing" in str(e.value)

    def test_out_of_range(self):
        with pytest.raises(PartitionParseError) as e:
            parse_partition("12|35", 4)
        assert "out of range" in str(e.value)

    def test_malformed_token(self):
        with pytest.raises(PartitionParseError):
            parse_partition("1a|23", 3)
        with pytest.raises(PartitionParseError):
            parse_partition("1||2", 2)

    def test_single_multidigit_token_large_n(self):
        # without commas and n >= 10, a block is one decimal integer
        p = parse_partition("10|1,2,3,4,5,6,7,8,9", 10)
        assert (512,) == tuple(b for b in p.blocks if b & 512)

    @given(st.integers(1, 9), st.data())
    @settings(max_examples=60, deadline=None)
    def test_format_parse_roundtrip(self, n, data):
        rgs = [0] + [
            data.draw(st.integers(0, i)) for i in range(1, n)
        ]
        blocks = {}
        for e, c in enumerate(rgs, start=1):
            blocks.setdefault(min(c, max(rgs)), set()).add(e)
        p = SetPartition.from_blocks(n, blocks.values())
        assert parse_partition(format_partition(p), n) == p


class TestLatticeOps:
    def test_paper_meet_join(self):
        a = parse_partition("12|34|56", 6)
        b = parse_partition("123|456", 6)
        assert format_partition(meet(a, b)) == "123456"
        assert format_partition(join(a, b)) == "12|3|4|56"

    def test_leq_examples(self):
        a = parse_partition("12|34|56", 6)
        b = parse_partition("123|456", 6)
        assert not leq(a, b) and not leq(b, a)
        assert leq(a, parse_partition("12|3|4|56", 6))
        for p in enumerate_partitions(4):
            assert leq(bottom(4), p)
            assert leq(p, top(4))

    def test_extrema(self):
        for p in enumerate_partitions(4):
            assert meet(p, bottom(4)) == bottom(4)
            assert join(p, top(4)) == top(4)

    def test_ground_mismatch(self):
        with pytest.raises(ValueError):
            leq(bottom(3), bottom(4))
        with pytest.raises(ValueError):
            meet(bottom(3), bottom(4))

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_lattice_laws_exhaustive(self, n):
        univ = list(enumerate_partitions(n))
        for a, b in itertools.product(univ, univ):
            m, j = meet(a, b), join(a, b)
            assert leq(m, a) and leq(m, b)
            assert leq(a, j) and leq(b, j)
        # glb / lub against every candidate
        for a, b in itertools.combinations(univ, 2):
            m, j = meet(a, b), join(a, b)
            for c in univ:
                if leq(c, a) and leq(c, b):
                    assert leq(c, m)
                if leq(a, c) and leq(b, c):
                    assert leq(j, c)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_partial_order_and_oracle_agreement(self, n):
        univ = list(enumerate_partitions(n))
        for a in univ:
            assert leq(a, a)
        for a, b in itertools.product(univ, univ):
            assert leq(a, b) == naive_leq(as_sets(a), as_sets(b))
            if leq(a, b) and leq(b, a):
                assert a == b
        for a, b, c in itertools.product(univ, repeat=3):
            if leq(a, b) and leq(b, c):
                assert leq(a, c)


class TestEnumeration:
    def test_bell_counts(self):
        bells = bell_triangle(10)
        for n in range(1, 11):
            assert sum(1 for _ in enumerate_partitions(n)) == bells[n - 1]

    def test_n8_is_4140(self):
        assert sum(1 for _ in enumerate_partitions(8)) == 4140

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_item_by_item_against_rgs_oracle(self, n):
        ours = [as_sets(p) for p in enumerate_partitions(n)]
        oracle = rgs_partitions(n)
        assert len(ours) == len(oracle)
        assert set(ours) == set(oracle)
        assert len(set(ours)) == len(ours)

    def test_documented_order(self):
        seq = list(enumerate_partitions(4))
        counts = [p.num_blocks for p in seq]
        assert counts == sorted(counts)
        for k in range(1, 5):
            texts = [format_partition(p) for p in seq if p.num_blocks == k]
            assert texts == sorted(texts)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            list(enumerate_partitions(13))
        with pytest.raises(CapExceededError):
            list(enumerate_chains(9))


class TestChains:
    def test_n3_require_bottom_count(self):
        chains = list(enumerate_chains(3, require_bottom=True, allow_empty=True))
        assert len(chains) == 8
        assert all(c.elements[0] == bottom(3) for c in chains)

    def test_n2_unconstrained(self):
        chains = list(enumerate_chains(2))
        texts = [str(c) for c in chains]
        assert texts == ["", "12", "12; 1|2", "1|2"]

    @pytest.mark.parametrize("rb,ae", [(True, True), (True, False), (False, True), (False, False)])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_subset_oracle(self, n, rb, ae):
        got = sum(1 for _ in enumerate_chains(n, require_bottom=rb, allow_empty=ae))
        assert got == chains_by_subsets(n, rb, ae)

    @pytest.mark.parametrize("rb,ae", [(True, True), (False, True)])
    @pytest.mark.parametrize("n", [5, 6])
    def test_matrix_count_oracle(self, n, rb, ae):
        got = sum(1 for _ in enumerate_chains(n, require_bottom=rb, allow_empty=ae))
        assert got == chain_count_by_matrix(n, rb, ae)

    def test_chains_strictly_increasing_and_unique(self):
        seen = set()
        for c in enumerate_chains(4, require_bottom=True):
            for a, b in zip(c.elements, c.elements[1:]):
                assert a != b and leq(a, b)
            key = tuple(c.elements)
            assert key not in seen
            seen.add(key)

    def test_invalid_chain_rejected(self):
        a = parse_partition("12|3", 3)
        b = parse_partition("13|2", 3)
        with pytest.raises(ValueError):
            Chain(3, (a, b))
        with pytest.raises(ValueError):
            Chain(3, (a, a))


class TestExtensionBijection:
    def test_adjoin(self):
        assert format_partition(adjoin_singleton(parse_partition("12|3", 3))) == "12|3|4"

    def test_classify_pointer(self):
        bp = classify_extension(parse_partition("124|3", 4))
        assert format_partition(bp.partition) == "12|3"
        assert bp.block_elements == (1, 2)

    def test_classify_image(self):
        assert classify_extension(parse_partition("12|3|4", 4)) is None

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_roundtrips_exhaustive(self, n):
        # adjoin then classify: lands in the image
        for rho in enumerate_partitions(n):
            ext = adjoin_singleton(rho)
            assert classify_extension(ext) is None
            assert strip_singleton(ext) == rho
        # the complement <-> (partition, block) pairs, both directions
        pointers = set()
        for w in enumerate_partitions(n + 1):
            bp = classify_extension(w)
            if bp is None:
                continue
            assert extend_into_block(bp) == w
            pointers.add((bp.partition, bp.block))
        expected = {
            (rho, b) for rho in enumerate_partitions(n) for b in rho.blocks
        }
        assert pointers == expected

    def test_bad_block_pointer(self):
        with pytest.raises(ValueError):
            BlockPointer(parse_partition("12|3", 3), 0b101)


def test_elements_of():
    assert elements_of(0b101001) == (1, 4, 6)
