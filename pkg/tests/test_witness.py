import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrent.errors import ModeMismatch
from kerrent.oracles import dense_moments
from kerrent.states import FockState, fock
from kerrent.witness import (
    TargetState,
    all_pairs,
    build_target,
    chain_pairs,
    fidelity,
    moments,
    multinomial,
    witness,
)

R2 = math.sqrt(2)


def brute_moments(state, i, j):
    """Explicit sums over term pairs, no ladder helpers."""
    cross = 0j
    for occ, a in state.terms.items():
        if occ[j] == 0:
            continue
        moved = list(occ)
        moved[j] -= 1
        moved[i] += 1
        b = state.terms.get(tuple(moved), 0)
        cross += b.conjugate() * a * math.sqrt(occ[j]) * math.sqrt(occ[i] + 1)
    corr = sum(occ[i] * occ[j] * abs(a) ** 2 for occ, a in state.terms.items())
    return cross, corr


class TestMoments:
    def test_product_fails(self):
        m = moments(fock(1, 1), 0, 1)
        assert m.cross == 0
        assert m.number_corr == 1
        assert not m.passed

    def test_bell_state(self):
        bell = FockState(2, 1, {(1, 0): 1 / R2, (0, 1): 1 / R2})
        m = moments(bell, 0, 1)
        assert m.cross_abs_sq == pytest.approx(0.25)
        assert m.number_corr == 0
        assert m.passed

    def test_two_photon_state(self):
        m = moments(build_target(TargetState.two_mode(2)), 0, 1)
        assert m.cross_abs_sq == pytest.approx(1.0)
        assert m.number_corr == pytest.approx(0.5)

    def test_vacuum_strict(self):
        m = moments(fock(0, 0, 0), 0, 2)
        assert m.cross == 0 and m.number_corr == 0
        assert not m.passed

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            moments(fock(1, 0), 0, 0)
        with pytest.raises(ModeMismatch):
            moments(fock(1, 0), 0, 2)

    @pytest.mark.parametrize("modes", [2, 3, 4, 5])
    @pytest.mark.parametrize("k", range(1, 11))
    def test_target_moments_against_brute_force(self, modes, k):
        state = build_target(TargetState("kphoton", k, modes))
        for i, j in all_pairs(modes):
            m = moments(state, i, j)
            cross, corr = brute_moments(state, i, j)
            assert abs(m.cross - cross) <= 1e-12
            assert m.number_corr == pytest.approx(corr, abs=1e-12)
            assert m.cross_abs_sq == pytest.approx(k * k / modes**2, abs=1e-12)
            assert m.number_corr == pytest.approx(k * (k - 1) / modes**2, abs=1e-12)
            assert m.margin == pytest.approx(k / modes**2, abs=1e-12)
            assert m.passed

    @pytest.mark.parametrize("modes,k", [(2, 4), (3, 3), (3, 1)])
    def test_dense_matrix_oracle(self, modes, k):
        state = build_target(TargetState("kphoton", k, modes))
        for i, j in all_pairs(modes):
            cross, corr = dense_moments(state, i, j)
            m = moments(state, i, j)
            assert abs(cross - m.cross) <= 1e-12
            assert corr == pytest.approx(m.number_corr, abs=1e-12)

    @given(
        st.dictionaries(
            st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
            st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False),
            min_size=1,
            max_size=12,
        )
    )
    @settings(max_examples=100)
    def test_random_states_against_brute_force(self, terms):
        if all(abs(a) < 1e-6 for a in terms.values()):
            return
        state = FockState(3, 3, terms).normalize()
        for i, j in itertools.permutations(range(3), 2):
            m = moments(state, i, j)
            cross, corr = brute_moments(state, i, j)
            assert abs(m.cross - cross) <= 1e-12
            assert m.number_corr == pytest.approx(corr, abs=1e-12)


class TestWitness:
    def test_w_state_chain(self):
        rep = witness(build_target(TargetState("w", 1, 3)))
        assert list(rep.verdicts) == [(0, 1), (1, 2)]
        for p in rep.pairs:
            assert p.cross_abs_sq == pytest.approx(1 / 9)
            assert p.number_corr == 0
        assert rep.all_passed

    def test_three_mode_k2(self):
        rep = witness(build_target(TargetState.three_mode(2)))
        for p in rep.pairs:
            assert p.cross_abs_sq == pytest.approx(4 / 9)
            assert p.number_corr == pytest.approx(2 / 9)
        assert rep.all_passed

    def test_vacuum_fails(self):
        assert not witness(fock(0, 0, 0)).all_passed

    def test_mixture_of_sectors(self):
        a = build_target(TargetState.two_mode(1))
        b = build_target(TargetState.two_mode(2))
        rep = witness([(0.25, a), (0.75, b)])
        m = rep.pairs[0]
        # cross moments add linearly with the weights
        assert abs(m.cross) == pytest.approx(0.25 * 0.5 + 0.75 * 1.0)
        assert m.number_corr == pytest.approx(0.75 * 0.5)

    def test_with_target(self):
        state = build_target(TargetState.three_mode(3))
        rep = witness(state, target=TargetState.three_mode(3))
        assert rep.target == "3-mode-k3"
        assert rep.fidelity == pytest.approx(1.0)

    def test_to_dict(self):
        rep = witness(build_target(TargetState.two_mode(1)), target=TargetState.two_mode(1))
        d = rep.to_dict(margin_tol=1e-10)
        assert d["pairs"][0]["i"] == 1 and d["pairs"][0]["j"] == 2
        assert d["pairs"][0]["pass"] and d["pairs"][0]["pass_tol"]
        assert d["fidelity"] == {"target": "2-mode-k1", "value": pytest.approx(1.0)}

    def test_margin_tolerance_display(self):
        # tiny positive margin passes strictly but not with the display tolerance
        state = FockState(2, 1, {(1, 0): 1.0, (0, 1): 1e-6}).normalize()
        d = witness(state).to_dict(margin_tol=1e-10)["pairs"][0]
        assert d["pass"] and not d["pass_tol"]

    def test_pair_helpers(self):
        assert chain_pairs(4) == [(0, 1), (1, 2), (2, 3)]
        assert all_pairs(3) == [(0, 1), (0, 2), (1, 2)]


class TestTargets:
    def test_two_mode_k3(self):
        s = build_target(TargetState.two_mode(3))
        r8 = math.sqrt(8)
        expected = {(3, 0): 1 / r8, (2, 1): math.sqrt(3) / r8, (1, 2): math.sqrt(3) / r8, (0, 3): 1 / r8}
        for occ, a in expected.items():
            assert s.amplitude(occ) == pytest.approx(a, abs=1e-15)

    def test_two_mode_k2(self):
        s = build_target(TargetState.two_mode(2))
        assert s.amplitude((2, 0)) == pytest.approx(0.5)
        assert s.amplitude((1, 1)) == pytest.approx(R2 / 2)

    def test_three_mode_k3_ratios(self):
        s = build_target(TargetState.three_mode(3))
        r27 = math.sqrt(27)
        assert s.amplitude((3, 0, 0)) == pytest.approx(1 / r27)
        assert s.amplitude((2, 1, 0)) == pytest.approx(math.sqrt(3) / r27)
        assert s.amplitude((1, 1, 1)) == pytest.approx(math.sqrt(6) / r27)

    def test_single_mode(self):
        s = build_target(TargetState("kphoton", 4, 1))
        assert s.terms == {(4,): 1.0}

    def test_w_two_photons(self):
        s = build_target(TargetState("w", 2, 3))
        assert set(s.terms) == {(1, 1, 0), (1, 0, 1), (0, 1, 1)}
        assert s.norm_sq() == pytest.approx(1.0)

    def test_noon(self):
        s = build_target(TargetState("noon", 2, 2))
        assert set(s.terms) == {(2, 0), (0, 2)}

    @pytest.mark.parametrize("modes", [2, 3, 4])
    @pytest.mark.parametrize("k", [0, 1, 4, 7])
    def test_normalized_and_symmetric(self, modes, k):
        s = build_target(TargetState("kphoton", k, modes))
        assert s.norm_sq() == pytest.approx(1.0, abs=1e-13)
        for perm in itertools.permutations(range(modes)):
            for occ, a in s.terms.items():
                assert s.amplitude(tuple(occ[p] for p in perm)) == a

    def test_names_roundtrip(self):
        for t in (TargetState.three_mode(3), TargetState("w", 1, 3), TargetState("noon", 2, 2)):
            assert TargetState.parse(t.name) == t
        with pytest.raises(ValueError):
            TargetState.parse("bogus")

    def test_invalid(self):
        with pytest.raises(ValueError):
            TargetState("kphoton", -1, 2)
        with pytest.raises(ValueError):
            TargetState("w", 4, 3)

    def test_multinomial(self):
        assert multinomial((1, 1, 1)) == 6
        assert multinomial((2, 1, 0)) == 3
        assert multinomial((5,)) == 1
        assert multinomial((10, 10)) == math.comb(20, 10)


class TestFidelity:
    def test_self(self):
        s = build_target(TargetState.three_mode(4))
        assert fidelity(s, s) == pytest.approx(1.0)

    def test_two_photon_vs_noon(self):
        f = fidelity(build_target(TargetState.two_mode(2)), build_target(TargetState("noon", 2, 2)))
        assert f == pytest.approx(0.5)

    def test_orthogonal_sectors(self):
        assert fidelity(build_target(TargetState.two_mode(1)), build_target(TargetState.two_mode(2))) == 0

    def test_mode_mismatch(self):
        with pytest.raises(ModeMismatch):
            fidelity(fock(1, 0), fock(1, 0, 0))
