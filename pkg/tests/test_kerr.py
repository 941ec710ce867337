import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrent.errors import CutoffTooSmall, ModeMismatch
from kerrent.homodyne import pointer_overlap
from kerrent.kerr import (
    KerrInteraction,
    apply_kerr,
    coherent_vector,
    dense_oracle,
    lift,
    run_sequence,
)
from kerrent.oracles import (
    dense_outcomes,
    quadrature_density_dense,
    quadrature_density_pointer,
    total_variation,
)
from kerrent.states import FockState, WeakTwoTerm, expand_coherent, fock, tensor_all, vacuum


def weak_modes(beta, modes):
    return tensor_all([expand_coherent(beta, WeakTwoTerm())] * modes)


class TestLift:
    def test_vacuum(self):
        s = lift(fock(0, 0), 5.0)
        assert s.terms == {(0, 0): (0.0, 1.0)}

    def test_weak_pair(self):
        s = lift(weak_modes(0.1, 2), 100.0)
        assert len(s) == 4
        assert all(phase == 0.0 for phase, _ in s.terms.values())
        assert s.norm_sq() == pytest.approx(1.0, abs=1e-12)


class TestApplyKerr:
    def test_one_photon(self):
        s = apply_kerr(lift(fock(1), 3.0), KerrInteraction(0.01, 0))
        assert s.terms[(1,)][0] == 0.01
        assert s.probe_label((1,)) == pytest.approx(3.0 * cmath.exp(-0.01j))

    def test_vacuum_untouched(self):
        s = apply_kerr(lift(vacuum(), 3.0), KerrInteraction(0.01, 0))
        assert s.terms[(0,)][0] == 0.0

    def test_sequential_pair(self):
        s = lift(fock(1, 1), 3.0)
        s = apply_kerr(s, KerrInteraction(0.01, 0))
        s = apply_kerr(s, KerrInteraction(0.01, 1))
        assert s.terms[(1, 1)][0] == pytest.approx(0.02, abs=1e-17)

    def test_bad_mode(self):
        with pytest.raises(ModeMismatch):
            apply_kerr(lift(fock(1), 1.0), KerrInteraction(0.1, 1))

    def test_from_physical(self):
        assert KerrInteraction.from_physical(2.0, 0.005, 0).tau == 0.01


class TestRunSequence:
    def test_two_weak_modes_phases(self):
        tau = 0.01
        s = run_sequence(weak_modes(0.1, 2), 100.0, [tau, tau])
        phases = {occ: ph for occ, (ph, _) in s.terms.items()}
        assert phases == {(0, 0): 0.0, (1, 0): tau, (0, 1): tau, (1, 1): 2 * tau}
        amps = {occ: a for occ, (_, a) in s.terms.items()}
        assert amps[(1, 1)] == pytest.approx(0.01 / 1.01)
        assert amps[(1, 0)] == pytest.approx(0.1 / 1.01)

    def test_three_weak_modes_phases(self):
        tau = 0.02
        s = run_sequence(weak_modes(0.2, 3), 100.0, [tau] * 3)
        counts = {}
        for occ, (ph, _) in s.terms.items():
            assert ph == pytest.approx(sum(occ) * tau, abs=1e-17)
            counts[sum(occ)] = counts.get(sum(occ), 0) + 1
        assert counts == {0: 1, 1: 3, 2: 3, 3: 1}

    def test_zero_coupling_identity(self):
        sig = tensor_all([expand_coherent(0.4)] * 2)
        s = run_sequence(sig, 10.0, [0.0, 0.0])
        assert s.signal() == sig
        assert all(ph == 0.0 for ph, _ in s.terms.values())

    def test_length_mismatch(self):
        with pytest.raises(ModeMismatch):
            run_sequence(fock(1, 0), 1.0, [0.1])

    @given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3))
    @settings(max_examples=30, deadline=None)
    def test_order_independent_and_unitary(self, taus):
        sig = tensor_all([expand_coherent(0.5, WeakTwoTerm())] * 3)
        forward = run_sequence(sig, 7.0, taus)
        for perm in itertools.permutations(range(3)):
            s = lift(sig, 7.0)
            for m in perm:
                s = apply_kerr(s, KerrInteraction(taus[m], m))
            for occ, (ph, amp) in s.terms.items():
                f_ph, f_amp = forward.terms[occ]
                assert ph == pytest.approx(f_ph, abs=1e-15)
                assert amp == f_amp
        assert forward.norm_sq() == pytest.approx(1.0, abs=1e-12)
        # amplitudes (hence photon statistics) are untouched
        assert forward.signal() == sig


class TestDenseOracle:
    def test_zero_alpha_identity(self):
        sig = tensor_all([expand_coherent(0.5)] * 2)
        d = dense_oracle(sig, 0.0, [0.1, 0.1])
        assert d.probe_cutoff == 0
        for occ, amp in sig.terms.items():
            assert d.probe_vector(occ)[0] == pytest.approx(amp, abs=1e-15)

    def test_probe_marginal_is_rotated_coherent_state(self):
        d = dense_oracle(fock(1), 2.0, [0.1])
        v = d.probe_vector((1,))
        ref = coherent_vector(2.0 * cmath.exp(-0.1j), d.probe_cutoff)
        f = abs(np.vdot(ref, v)) ** 2 / (np.vdot(ref, ref).real * np.vdot(v, v).real)
        assert 1 - f <= 1e-12

    def test_probe_overlap_matches_closed_form(self):
        alpha, tau = 3.0, 0.1
        sig = FockState(1, 2, {(1,): 1.0, (2,): 1.0}).normalize()
        d = dense_oracle(sig, alpha, [tau], tail_tol=1e-16)
        v1, v2 = d.probe_vector((1,)), d.probe_vector((2,))
        brute = abs(np.vdot(v1, v2)) ** 2 / (np.vdot(v1, v1).real * np.vdot(v2, v2).real)
        assert brute == pytest.approx(pointer_overlap(alpha, tau, 1, 2), abs=1e-12)

    def test_norm_preserved(self):
        sig = tensor_all([expand_coherent(0.5)] * 2)
        d = dense_oracle(sig, 3.0, [0.1, 0.1])
        assert np.vdot(d.amplitudes, d.amplitudes).real == pytest.approx(1.0, abs=1e-12)

    def test_cutoff_too_small(self):
        with pytest.raises(CutoffTooSmall):
            dense_oracle(fock(1), 4.0, [0.1], probe_cutoff=10)

    @pytest.mark.parametrize("alpha", [1.0, 2.5, 4.0])
    def test_discrete_outcomes_agree(self, alpha):
        tau = 0.1
        sig = tensor_all([expand_coherent(0.5)] * 2)
        pointer = run_sequence(sig, alpha, [tau, tau])
        p_ptr = {}
        for occ, (_, amp) in pointer.terms.items():
            p_ptr[sum(occ)] = p_ptr.get(sum(occ), 0.0) + abs(amp) ** 2
        p_dense, _ = dense_outcomes(dense_oracle(sig, alpha, [tau, tau]), tau)
        assert total_variation(p_ptr, p_dense) <= 1e-8

    @pytest.mark.parametrize("alpha,lo", [(1.0, 0.3), (3.0, math.pi / 2), (4.0, 2.0)])
    def test_quadrature_density_agrees(self, alpha, lo):
        tau = 0.1
        sig = tensor_all([expand_coherent(0.5)] * 2)
        pointer = run_sequence(sig, alpha, [tau, tau])
        # the probe tail enters amplitudes as sqrt(tail_tol)
        dense = dense_oracle(sig, alpha, [tau, tau], tail_tol=1e-18)
        x = np.linspace(-2 * alpha - 12, 2 * alpha + 12, 8001)
        p_ptr = quadrature_density_pointer(pointer, lo, x)
        p_dense = quadrature_density_dense(dense, lo, x)
        dx = x[1] - x[0]
        assert np.sum(p_ptr) * dx == pytest.approx(1.0, abs=1e-10)
        tv = 0.5 * np.sum(np.abs(p_ptr - p_dense)) * dx
        assert tv <= 1e-8
