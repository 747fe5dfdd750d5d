"""
Cell outage: analysis against simulation
=========================================

The analytic cell outage averages the per-position outage over the cell
with adaptive quadrature.  Here it is compared with a Monte Carlo estimate,
the interference-free closed form and a cell without the pico BS.
"""

import numpy as np

from jsdm_relay import table1_scenario
from jsdm_relay.analysis import analytic_curve, relay_gain_dB
from jsdm_relay.analysis.curves import no_pico
from jsdm_relay.simulation import TrialConfig, estimate_outage_curve

sc = table1_scenario(64)
part = (7, 3)

# the reference link budget leaves a large SNR margin, so the interesting
# part of the curve sits at low thresholds
th = np.arange(-50.0, -14.0, 4.0)

full = analytic_curve(sc, th, partition=part)
quiet = analytic_curve(sc, th, partition=part, noise_limited=True)
base = analytic_curve(no_pico(sc), th, partition=part)
mc = estimate_outage_curve(TrialConfig(num_drops=20_000, seed=1), sc, th, partition=part)

print(f"{'x [dB]':>7} {'analytic':>9} {'MC':>8} {'+-2se':>7} {'no intf':>8} {'no pico':>8}")
for row in zip(th, full.probabilities, mc.probabilities, 2 * mc.stderr,
               quiet.probabilities, base.probabilities):
    print("{:7.1f} {:9.4f} {:8.4f} {:7.4f} {:8.4f} {:8.4f}".format(*row))

# horizontal distance between the curves at 10 % outage
for M in (64, 128):
    print(f"M={M}: the relay buys {relay_gain_dB(table1_scenario(M), part):.2f} dB at 10% outage")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    plt.semilogy(th, full.probabilities, label="analysis")
    plt.errorbar(th, mc.probabilities, 2 * mc.stderr, fmt="o", label="Monte Carlo")
    plt.semilogy(th, base.probabilities, "--", label="no pico")
    plt.xlabel("SINR threshold [dB]")
    plt.ylabel("cell outage")
    plt.legend()
    plt.savefig("outage_curves.png", dpi=120)
