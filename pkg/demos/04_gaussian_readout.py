"""Finite-brightness homodyne: confusion between neighbouring photon numbers and the
resulting drop in heralded-state fidelity.

Run: python demos/04_gaussian_readout.py
"""

import numpy as np

from kerrent import ProtocolConfig, run_protocol
from kerrent.homodyne import GaussianQuadrature, HomodyneModel, confusion_matrix

tau = 0.01
np.set_printoptions(precision=4, suppress=True)
conf = confusion_matrix(HomodyneModel(GaussianQuadrature(), 150.0, tau), 3)
print("confusion matrix at |alpha| tau = 1.5 (rows: true k, cols: decided k)")
print(conf)

print(f"\n{'|alpha|':>8} {'P(k=2)':>10} {'fidelity':>10} {'margin':>10}")
for alpha in (100.0, 200.0, 300.0, 500.0, 1000.0):
    cfg = ProtocolConfig(modes=2, beta=0.5, alpha=alpha, tau=tau, readout="gaussian", allow_overlap=True)
    res = run_protocol(cfg)
    rec, wit = res.outcome(2), res.witness_for(2)
    print(f"{alpha:>8.0f} {rec.probability:>10.6f} {wit.fidelity:>10.6f} {wit.min_margin:>10.6f}")
