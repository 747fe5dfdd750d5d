"""Analytical outage engine."""
from .averaging import (QuadratureError, avg_user_outage, cell_outage_breakdown,
                        cell_outage_fixed, cell_outage_random, composition_weights, compositions)
from .curves import OutageCurve, analytic_curve, outage_function, relay_gain_dB
from .effective import EffectiveMatrices, LinkModel, build_effective_matrices
from .noise_limited import noise_limited_cell_outage, noise_limited_curves
from .outage import user_outage_macro, user_outage_pico
from .qform import EigenStructureError, qform_tail
from .special import incomplete_gamma_lower
