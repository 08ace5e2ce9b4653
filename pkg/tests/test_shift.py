import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distchaos.errors import DimensionError, StructureError, SymbolError
from distchaos.shift import (Presentation, SoficShift, SymbolStream, all_words, bridge_word,
                             build_pi_shift, constant_stream, find_non_sft_witness, full_shift,
                             is_mixing, pi_rules_allow, read_presentation, shift_metric,
                             specification_gap, stream_allowed, word_allowed, word_str,
                             words_allowed, words_matrix_allowed, write_presentation)

PI = build_pi_shift()
FAMILIES = ["1{}3", "1{}4", "2{}1", "2{}4", "3{}2", "3{}1", "4{}2", "4{}3"]


def _scan_metric(a: str, b: str) -> float:
    for i, (u, v) in enumerate(zip(a, b)):
        if u != v:
            return 2.0 ** -i
    return 0.0


def _paths_oracle(shift, w):
    """Explicit path enumeration over the edge list (no bitmasks)."""
    edges = shift.presentation.edges
    frontier = {v for v in range(shift.vertex_count)}
    for c in w:
        frontier = {b for a, b, lab in edges if a in frontier and lab == int(c)}
        if not frontier:
            return False
    return True


class TestMetric:
    def test_identical(self):
        x = SymbolStream(2, [0, 1, 1, 0])
        assert shift_metric(x, x) == 0.0

    def test_first_symbol(self):
        assert shift_metric(SymbolStream(2, "0000"), SymbolStream(2, "1000")) == 1.0

    def test_second_symbol(self):
        assert shift_metric(SymbolStream(2, "0100"), SymbolStream(2, "0000")) == 0.5

    def test_mismatched(self):
        with pytest.raises(DimensionError):
            shift_metric(SymbolStream(2, "01"), SymbolStream(2, "010"))
        with pytest.raises(DimensionError):
            shift_metric(SymbolStream(2, "01"), SymbolStream(3, "01"))

    @given(st.text("012", min_size=1, max_size=30), st.text("012", min_size=1, max_size=30),
           st.text("012", min_size=1, max_size=30))
    def test_ultrametric(self, a, b, c):
        n = min(len(a), len(b), len(c))
        x, y, z = (SymbolStream(3, s[:n]) for s in (a, b, c))
        dxy, dyz, dxz = shift_metric(x, y), shift_metric(y, z), shift_metric(x, z)
        assert dxy == _scan_metric(a[:n], b[:n])
        assert dxy == shift_metric(y, x)
        assert dxz <= max(dxy, dyz)

    def test_stream_is_readonly(self):
        x = constant_stream(1, 2, 5)
        with pytest.raises(ValueError):
            x.window[0] = 0
        assert str(x.shifted(2)) == "111"

    def test_bad_symbol(self):
        with pytest.raises(SymbolError):
            SymbolStream(2, "012")


class TestPiMembership:
    def test_examples(self):
        assert not word_allowed(PI, "10003")
        assert word_allowed(PI, "1002")
        assert word_allowed(PI, "0" * 50)
        assert not word_allowed(PI, "24")
        assert word_allowed(PI, "23")
        assert word_allowed(PI, "")

    @pytest.mark.parametrize("fam", FAMILIES)
    def test_forbidden_families(self, fam):
        words = [fam.format("0" * k) for k in range(21)]
        assert not words_allowed(PI, words).any()
        assert not any(pi_rules_allow(w) for w in words)

    def test_exhaustive_small(self):
        for n in range(6):
            mat = all_words(5, n)
            got = words_matrix_allowed(PI, mat)
            want = np.array([pi_rules_allow(w) for w in mat])
            assert np.array_equal(got, want), n

    def test_path_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            w = rng.integers(0, 5, rng.integers(1, 12))
            assert word_allowed(PI, w) == _paths_oracle(PI, w)

    @given(st.lists(st.integers(0, 4), min_size=33, max_size=80))
    @settings(max_examples=60)
    def test_long_words_use_kernel(self, w):
        assert word_allowed(PI, w) == pi_rules_allow(w)

    def test_count_length_eight(self):
        assert int(words_matrix_allowed(PI, all_words(5, 8)).sum()) == 13121

    def test_stream(self):
        assert stream_allowed(PI, SymbolStream(5, "1122334411"))
        assert not stream_allowed(PI, SymbolStream(5, "1100300"))
        with pytest.raises(DimensionError):
            stream_allowed(PI, SymbolStream(2, "01"))

    def test_symbol_out_of_range(self):
        with pytest.raises(SymbolError):
            word_allowed(PI, "15")


class TestStructure:
    def test_mixing(self):
        assert is_mixing(full_shift(2))
        assert is_mixing(PI)
        two_cycle = SoficShift(Presentation(2, ((0, 1, 0), (1, 0, 1))), 2)
        assert not is_mixing(two_cycle)
        with pytest.raises(StructureError):
            specification_gap(two_cycle)

    def test_gap_full(self):
        assert specification_gap(full_shift(2)) == 1

    def test_gap_matches_power_oracle(self):
        a = PI.adjacency.astype(int)
        n, p = 1, a.copy()
        while not (p > 0).all():
            p = p @ a
            n += 1
        assert specification_gap(PI) == n == 3

    def test_non_sft(self):
        u, v, w = find_non_sft_witness(PI, 8)
        assert word_allowed(PI, np.r_[u, v]) and word_allowed(PI, np.r_[v, w])
        assert not word_allowed(PI, np.r_[u, v, w])
        z = "0" * 12
        assert word_allowed(PI, "1" + z) and word_allowed(PI, z + "3")
        assert not word_allowed(PI, "1" + z + "3")

    def test_full_shift_is_sft(self):
        assert find_non_sft_witness(full_shift(2), 3) is None


class TestBridges:
    def test_full_shift_least(self):
        w = bridge_word(full_shift(2), "1", "0", 1)
        assert word_str(w) == "0"

    def test_pi_bridge(self):
        g = specification_gap(PI)
        w = bridge_word(PI, "1", "3", g)
        assert w.size == g
        assert word_allowed(PI, "1" + word_str(w) + "3")

    def test_pi_no_bridge_at_zero(self):
        with pytest.raises(StructureError):
            bridge_word(PI, "1", "3", 0)

    def test_all_short_pairs_joinable(self):
        g = specification_gap(PI)
        words = [word_str(w) for n in (1, 2) for w in all_words(5, n) if pi_rules_allow(w)]
        for u, v in itertools.product(words, repeat=2):
            w = bridge_word(PI, u, v, g)
            assert pi_rules_allow(u + word_str(w) + v)

    def test_lexicographic_least(self):
        g = specification_gap(PI)
        w = word_str(bridge_word(PI, "2", "4", g))
        brute = min("".join(map(str, c)) for c in itertools.product(range(5), repeat=g)
                    if pi_rules_allow("2" + "".join(map(str, c)) + "4"))
        assert w == brute


class TestPresentationIO:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "pi.pres"
        write_presentation(PI, path)
        back = read_presentation(path)
        assert back.presentation == PI.presentation
        assert back.alphabet_size == 5

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.pres"
        path.write_text("vertices=2\n0 1 0\n")
        with pytest.raises(StructureError):
            read_presentation(path)

    def test_missing_vertex(self):
        with pytest.raises(StructureError):
            Presentation(1, ((0, 1, 0),))
