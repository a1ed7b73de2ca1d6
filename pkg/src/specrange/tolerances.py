"""Frozen acceptance thresholds.

Schema version 1.  Band centres are the limits quoted next to each constant;
the half-widths are fixed here once and never re-fitted.  Pilot statistics
from ``scripts/pilot_calibration.py`` (master seed 20240101) are recorded in
the comments: the thresholds were checked against them, not derived from them.
"""
import math

TOLERANCES_VERSION = 1

# Ginibre, N = 1024, 8 trials.  Limits 2, sqrt(2), 1, 1/2.
# pilot (16 trials, mean +- sd): ||G|| 1.988 +- 0.005, r 1.412 +- 0.005, rho 1.026 +- 0.009,
# mu3^2/N 0.4996 +- 0.0007
GINIBRE_NORM_BAND = (1.85, 2.15)
GINIBRE_RADIUS_BAND = (math.sqrt(2) - 0.12, math.sqrt(2) + 0.12)
GINIBRE_SPECTRAL_RADIUS_BAND = (0.9, 1.1)
GINIBRE_MU3_BAND = (0.45, 0.55)

# d_H(W, D(0, sqrt 2)) at N = 1024, median over 8 trials.
# pilot (16 trials): ginibre median 0.024 (max 0.031), triangular median 0.023 (max 0.032)
HAUSDORFF_MAX_AT_1024 = 0.12
# one inversion of at most this relative size is tolerated along the N sweep
SWEEP_INVERSION_ALLOWANCE = 0.10

# area(W(G)) / area(conv spec(G)) at N = 1024, 8 trials.  pilot: 1.990 +- 0.011
AREA_RATIO_BAND = (1.8, 2.2)

# N = 2048, 8 trials.  Limits sqrt(e) and sqrt(2e).
# pilot (16 trials): ||Tbar|| 1.641 +- 0.004, ||T|| 2.321 +- 0.005
TBAR_NORM_BAND = (1.50, 1.80)
T_NORM_BAND = (2.13, 2.53)

# N^{-1} Tr((T-bar T-bar*)^l), N = 1024, 16 trials: relative tolerance by l
# pilot relative errors: 0.0011, 0.0016, 0.0021, 0.0027, 0.0032
MOMENT_REL_TOL = {1: 0.05, 2: 0.05, 3: 0.05, 4: 0.10, 5: 0.10}

# block-zeroed vs full triangular norms at N = 1024; the bound 3/sqrt(k) needs no constant.
# pilot mean |diff|: k=4 0.109, k=16 0.026, k=64 0.006

# profile_in_star against the ellipse K(R) at N = 512
ELLIPSE_SLACK = 0.15

# W-polygon vs conv(spectrum) for normal matrices, relative to ||X||
NORMAL_IDENTITY_REL = 1e-7

# support value minus best of 10^5 random unit vectors, n <= 6
BRUTE_FORCE_EXCESS = 1e-3

# Jordan block J2 support values vs 1/2 at m = 256
JORDAN_TOL = 1e-10
