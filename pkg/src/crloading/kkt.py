"""First-order optimality verification for continuous loading solutions.

The Lagrangian of the scalarized problem couples, per loaded subcarrier, a
BER-equality multiplier lam_i with the cap multipliers.  Stationarity with
respect to power fixes lam_i uniquely:

    lam_i = mu_i (2^b_i - 1) exp(1.6 C_i P_i / (2^b_i - 1)) / (0.32 C_i)

with mu_i = alpha + lam_pow + sum_l w_il lam_aci_l.  That recovered
multiplier must be positive, and substituting it into the stationarity
condition with respect to bits must leave a residual of zero.  Primal
feasibility, complementary slackness, and dual sign complete the check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KktTolerances:
    stationarity: float = 1e-8
    primal: float = 1e-9
    complementarity: float = 1e-10
    dual_sign: float = 1e-12


@dataclass(frozen=True)
class KktReport:
    stationarity_power: float   # max |d L / d P_i| with recovered lam_i
    stationarity_bits: float    # max |d L / d b_i| with recovered lam_i
    primal: float               # max relative constraint violation
    complementarity: float      # max |lam * slack| over cap constraints
    dual_sign: float            # most negative multiplier (>= 0 when clean)
    passed: bool

    def to_dict(self) -> dict:
        return {
            "stationarity_power": self.stationarity_power,
            "stationarity_bits": self.stationarity_bits,
            "primal": self.primal,
            "complementarity": self.complementarity,
            "dual_sign": self.dual_sign,
            "pass": self.passed,
        }


def kkt_verify(solution, cnir, ber_threshold, caps,
               tols: KktTolerances | None = None) -> KktReport:
    """Check a ContinuousSolution against the first-order conditions.

    Nulled subcarriers sit outside the continuous problem (their BER model
    degenerates), so the per-subcarrier conditions are evaluated on the
    active set only.
    """
    tols = tols or KktTolerances()
    c = np.asarray(cnir, dtype=float)
    ber_th = np.broadcast_to(np.asarray(ber_threshold, dtype=float), c.shape)
    alpha = solution.alpha
    omega = caps.aci_weights.omega
    lam_pow = solution.lambda_power
    lam_aci = np.asarray(solution.lambda_aci, dtype=float)

    bits = np.asarray(solution.bits, dtype=float)
    powers = np.asarray(solution.powers, dtype=float)
    active = bits > 0

    stat_p = stat_b = 0.0
    lam_sub_min = math.inf
    comp = 0.0
    primal = 0.0

    if np.any(active):
        b = bits[active]
        p = powers[active]
        ca = c[active]
        denom = 2.0 ** b - 1.0
        mu = alpha + lam_pow + omega[active] @ lam_aci
        expo = np.exp(-1.6 * ca * p / denom)
        # Recovered BER-equality multipliers (stationarity wrt power).
        lam_sub = mu * denom / (0.32 * ca * expo)
        lam_sub_min = float(np.min(lam_sub))
        resid_p = mu - lam_sub * 0.32 * ca / denom * expo
        stat_p = float(np.max(np.abs(resid_p)))
        resid_b = (-(1.0 - alpha)
                   + lam_sub * 0.32 * math.log(2.0) * ca * p
                   * 2.0 ** b / denom ** 2 * expo)
        stat_b = float(np.max(np.abs(resid_b)))
        # BER equality doubles as the primal + complementarity contribution
        # of the per-subcarrier constraints.
        ber = 0.2 * expo
        primal = float(np.max(np.maximum(ber - ber_th[active], 0.0)
                              / ber_th[active]))
        comp = float(np.max(np.abs(lam_sub * (ber - ber_th[active]))))

    total = float(np.sum(powers))
    if math.isfinite(caps.total_cap):
        slack = total - caps.total_cap
        scale = caps.total_cap if caps.total_cap > 0 else 1.0
        primal = max(primal, slack / scale)
        comp = max(comp, abs(lam_pow * slack))
    loads = omega.T @ powers
    for load, cap, lam in zip(loads, np.asarray(caps.aci_caps, float), lam_aci):
        if math.isfinite(cap):
            scale = cap if cap > 0 else 1.0
            primal = max(primal, (load - cap) / scale)
            comp = max(comp, abs(lam * (load - cap)))
    primal = max(primal, 0.0)

    dual = min(lam_sub_min, lam_pow, float(np.min(lam_aci, initial=math.inf)))
    passed = (stat_p <= tols.stationarity and stat_b <= tols.stationarity
              and primal <= tols.primal and comp <= tols.complementarity
              and dual >= -tols.dual_sign)
    return KktReport(stationarity_power=stat_p, stationarity_bits=stat_b,
                     primal=primal, complementarity=comp, dual_sign=dual,
                     passed=passed)
