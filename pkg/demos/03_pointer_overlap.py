"""How bright must the probe be? Overlap of neighbouring pointer states.

Run: python demos/03_pointer_overlap.py
"""

import math

from kerrent import distinguishability_check
from kerrent.homodyne import approx_log_pointer_overlap, log_pointer_overlap

tau = 0.01
print(f"tau = {tau}")
print(f"{'|alpha|':>8} {'|a|tau':>7} {'log overlap':>14} {'small-angle':>14} {'orthogonal?':>12}")
for alpha in (10, 50, 100, 200, 400, 800, 1000):
    exact = log_pointer_overlap(alpha, tau, 0, 1)
    approx = approx_log_pointer_overlap(alpha, tau, 0, 1)
    ok = distinguishability_check(alpha, tau, k_max=6).passed
    print(f"{alpha:>8} {alpha * tau:>7.2f} {exact:>14.6f} {approx:>14.6f} {str(ok):>12}")

# at |alpha| tau = 1 the neighbouring pointers overlap by about 1/e
print("\n|alpha|=100 overlap:", math.exp(log_pointer_overlap(100, tau, 0, 1)))
