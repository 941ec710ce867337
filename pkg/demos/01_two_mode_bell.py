"""Two weak coherent arms, one probe, one readout: heralding a single-photon Bell pair.

Run: python demos/01_two_mode_bell.py
"""

from kerrent import HomodyneModel, IdealProjective, measure, run_sequence, witness
from kerrent.states import WeakTwoTerm, expand_coherent, tensor_all

beta, alpha, tau = 0.1, 1000.0, 0.01

# each arm is truncated to vacuum plus one photon
arm = expand_coherent(beta, WeakTwoTerm())
signal = tensor_all([arm, arm])
print("input terms:", {occ: round(abs(a), 6) for occ, a in signal.sorted_terms()})

# the probe picks up a phase tau per signal photon
joint = run_sequence(signal, alpha, [tau, tau])
for occ, (phase, amp) in sorted(joint.terms.items()):
    print(f"  signal {occ}: probe phase {phase:.3f} rad, amplitude {abs(amp):.6f}")

records = measure(joint, HomodyneModel(IdealProjective(), alpha, tau))
for rec in records:
    print(f"outcome k={rec.k}: probability {rec.probability:.7f}")

one = next(r for r in records if r.k == 1)
print("heralded state:", {occ: round(a.real, 6) for occ, a in one.conditional_state.sorted_terms()})
print("analytic rate 2|b|^2/(1+|b|^2)^2 =", 2 * beta**2 / (1 + beta**2) ** 2)

rep = witness(one.conditional_state)
p = rep.pairs[0]
print(f"|<b1+ b2>|^2 = {p.cross_abs_sq:.4f} > <N1 N2> = {p.number_corr:.4f}: {p.passed}")
