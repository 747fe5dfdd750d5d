"""
Where to put the pico BS
========================

Moving the pico BS outward changes how many users it captures and how
strong its backhaul is.  This script sweeps the macro-pico distance and the
array size, and compares the two association rules on identical drops.
"""

import numpy as np

from jsdm_relay.config import ExperimentConfig
from jsdm_relay.experiments import assoc_summary, run_sweep

cfg = ExperimentConfig(drops=5000, thresholds_dB=(-40.0, -35.0, -30.0))
print("association split:", {k: round(v, 4) if isinstance(v, float) else v
                              for k, v in assoc_summary(cfg).items()})

rows = run_sweep(cfg, "dms")
best = max(rows, key=lambda r: r["p_gs"])
print(f"\n{'d_ms':>6} {'p_gs':>7} {'outage':>8}   (threshold {cfg.sweep_threshold_dB} dB)")
for r in rows:
    print(f"{r['d_ms_m']:6.0f} {r['p_gs']:7.4f} {r['analytic']:8.4f}")
print(f"pico share peaks near d_ms = {best['d_ms_m']:.0f} m")

# more antennas, diminishing returns
ant = run_sweep(cfg, "antennas")
for M in sorted({r["M"] for r in ant}):
    vals = [r["analytic"] for r in ant if r["M"] == M]
    print(f"M={M:4d}:", np.array2string(np.array(vals), precision=4))

# same seed, same drops: only the association rule differs
for r in run_sweep(cfg, "strategy"):
    print(f"{r['threshold_dB']:6.1f} dB  relay {r['relay_rule']:.4f}  "
          f"path loss {r['pathloss_rule']:.4f}")
