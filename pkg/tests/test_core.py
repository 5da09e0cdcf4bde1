import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mono_aps
from vdw.core import (
    ApWitness,
    Coloring,
    VdwInstance,
    count_aps,
    enumerate_aps,
    naive_witnesses,
    verify,
)
from vdw.certificates import get_entry
from vdw.errors import ColorOutOfRangeError, InvalidParameterError


def colorings(max_r=4, max_n=64):
    return st.integers(1, max_r).flatmap(
        lambda r: st.tuples(
            st.just(r), st.lists(st.integers(0, r - 1), min_size=1, max_size=max_n)
        )
    )


class TestEnumerateAps:
    def test_single_ap(self):
        assert enumerate_aps(3, 3) == [(1, 1)]

    def test_no_room(self):
        assert enumerate_aps(2, 3) == []

    def test_n9_k3(self):
        aps = enumerate_aps(9, 3)
        assert len(aps) == 7 + 5 + 3 + 1
        assert aps[0] == (1, 1)
        assert aps[-1] == (1, 4)

    def test_rejects_k_below_two(self):
        with pytest.raises(InvalidParameterError):
            enumerate_aps(5, 1)

    @pytest.mark.parametrize("n", range(1, 25))
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_exact_set_and_order(self, n, k):
        brute = sorted(
            ((a, d) for a in range(1, n + 1) for d in range(1, n) if a + (k - 1) * d <= n),
            key=lambda p: (p[1], p[0]),
        )
        assert enumerate_aps(n, k) == brute
        assert count_aps(n, k) == len(brute)


class TestVerify:
    def test_all_same(self):
        rep = verify([0, 0, 0], 3, 1)
        assert not rep.valid
        assert rep.witnesses == [ApWitness(1, 1, 0)]

    def test_00110011(self):
        c = [int(ch) for ch in "00110011"]
        assert mono_aps(c, 3) == []
        rep = verify(c, 3, 2)
        assert rep.valid
        assert rep.implied_lower_bound == 9
        assert rep.ap_count_checked == 12
        assert rep.bound_text() == "W(2,3) > 8"

    def test_embedded_w73(self):
        rec = get_entry("W(7,3)")
        rep = verify(rec.coloring, 3, 7)
        assert rep.valid
        assert rep.implied_lower_bound == 337

    def test_out_of_range_names_position(self):
        with pytest.raises(ColorOutOfRangeError) as exc:
            verify([0, 1, 2, 1], 3, 2)
        assert exc.value.position == 3
        assert exc.value.color == 2

    def test_rejects_bad_k(self):
        with pytest.raises(InvalidParameterError):
            verify([0, 1], 1, 2)

    def test_fail_fast_returns_first_witness(self):
        c = [0] * 10
        full = verify(c, 3, 1)
        fast = verify(c, 3, 1, fail_fast=True)
        assert fast.witnesses == full.witnesses[:1]
        assert not fast.complete and full.complete

    def test_report_fields(self):
        rep = verify(Coloring((0, 2, 2)), 2, 5)
        assert rep.colors_used == 2
        assert rep.r_declared == 5
        assert rep.witnesses == [ApWitness(2, 1, 2)]
        assert rep.to_dict()["witnesses"] == [{"a": 2, "d": 1, "color": 2}]


class TestTypes:
    def test_coloring_positions_are_one_based(self):
        c = Coloring((3, 1, 4))
        assert c.N == 3 and c.at(1) == 3 and c.at(3) == 4
        with pytest.raises(IndexError):
            c.at(0)

    def test_coloring_invariants(self):
        with pytest.raises(InvalidParameterError):
            Coloring(())
        with pytest.raises(InvalidParameterError):
            Coloring((0, -1))
        assert Coloring((0, 5, 5)).num_colors_used() == 2

    @pytest.mark.parametrize("r,k,n", [(0, 3, 5), (2, 1, 5), (2, 3, 0)])
    def test_instance_invariants(self, r, k, n):
        with pytest.raises(InvalidParameterError):
            VdwInstance(r, k, n)


@settings(max_examples=300, deadline=None)
@given(colorings(), st.integers(2, 5))
def test_matches_triple_loop(rc, k):
    r, colors = rc
    rep = verify(colors, k, r)
    got = [(w.a, w.d, w.color) for w in rep.witnesses]
    assert got == mono_aps(colors, k)
    assert got == naive_witnesses(colors, k)
    assert rep.valid == (not got)


@settings(max_examples=200, deadline=None)
@given(colorings(max_n=40), st.lists(st.integers(0, 3), max_size=20), st.integers(2, 4))
def test_violation_survives_extension(rc, tail, k):
    r, colors = rc
    tail = [t % r for t in tail]
    if not verify(colors, k, r).valid:
        assert not verify(colors + tail, k, r).valid


@settings(max_examples=200, deadline=None)
@given(colorings(max_n=40), st.integers(2, 4))
def test_prefixes_of_valid_are_valid(rc, k):
    r, colors = rc
    if verify(colors, k, r).valid:
        for n in range(1, len(colors)):
            assert verify(colors[:n], k, r).valid


@settings(max_examples=200, deadline=None)
@given(colorings(max_r=2, max_n=48), st.integers(2, 4))
def test_witnesses_are_well_formed(rc, k):
    r, colors = rc
    for w in verify(colors, k, r).witnesses:
        pos = w.positions(k)
        assert pos[-1] <= len(colors)
        assert {colors[p - 1] for p in pos} == {w.color}


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(
    lambda r: st.tuples(st.just(r), st.lists(st.integers(0, r - 1), min_size=1, max_size=20))
))
def test_k2_pigeonhole(rc):
    r, colors = rc
    rep = verify(colors, 2, r)
    if len(colors) > r:
        assert not rep.valid
    assert rep.valid == (len(set(colors)) == len(colors))


@pytest.mark.parametrize("r", range(1, 7))
def test_injective_coloring_valid_for_k2(r):
    assert verify(list(range(r)), 2, r).valid
