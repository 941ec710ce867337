"""Success probability versus signal amplitude for more modes, via the sweep API.
The maximum sits at |beta|^2 = k / M.

Run: python demos/05_n_mode_sweep.py
"""

from kerrent import ProtocolConfig, sweep


def main() -> None:
    betas = [round(0.05 * i, 2) for i in range(1, 25)]
    k = 2
    for modes in (2, 3, 4, 5):
        rows = sweep(ProtocolConfig(modes=modes), {"beta": betas, "k": [k]}, jobs=2)
        best = max(rows, key=lambda r: r["probability"])
        print(f"M={modes}, k={k}: best beta {best['beta_re']:.2f} "
              f"(expected {(k / modes) ** 0.5:.3f}), P={best['probability']:.5f}, "
              f"witness margin {best['witness_margin_min']:.4f} (k/M^2 = {k / modes**2:.4f})")


if __name__ == "__main__":  # worker processes re-import this file
    main()
