"""Deterministic power caps from statistical interference constraints.

A constraint of the form  Pr(X * c * P <= Pmax) >= Psi  with X exponential
(rate nu) inverts to the deterministic cap  P <= nu * Pmax / (c * (-ln(1-Psi))).
For the co-channel PU, c is the path-loss attenuation 10^(-L/10) and P the
SU total power; the cap additionally never exceeds the hard transmit limit
P_th.  For an adjacent PU, c folds into the per-subcarrier overlap factors,
so the cap applies to the overlap-weighted power sum directly.

Psi = 1 demands certainty, which an exponential tail only delivers at zero
power, so finite interference limits map to a cap of exactly 0 there.  An
infinite interference limit makes the constraint vacuous regardless of Psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import AciFactors, aci_overlap_matrix
from .errors import ConfigError
from .scenario import ScenarioConfig, path_loss_db
from .solver import FEAS_TOL


@dataclass(frozen=True)
class ConstraintCaps:
    """All deterministic caps the solver enforces."""

    total_cap: float            # watts; min of P_th and every CCI-derived cap
    aci_caps: np.ndarray        # watts, one per adjacent PU, shape (L,)
    aci_weights: AciFactors     # overlap matrix, shape (N, L)


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint verdicts for one allocation.

    ``worst_margin`` is the largest relative constraint violation across all
    families (0 when the allocation is feasible).
    """

    ber_ok: np.ndarray          # bool per subcarrier (vacuously true at b=0)
    power_ok: bool
    aci_ok: np.ndarray          # bool per adjacent PU
    worst_margin: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "ber_ok": [bool(x) for x in self.ber_ok],
            "power_ok": bool(self.power_ok),
            "aci_ok": [bool(x) for x in self.aci_ok],
            "worst_margin": float(self.worst_margin),
            "feasible": bool(self.feasible),
        }


def _tail_scale(probability, fading_rate):
    """nu / (-ln(1 - Psi)); 0 when Psi = 1 (certainty -> zero power)."""
    if not 0.0 < probability <= 1.0:
        raise ConfigError(f"probability must lie in (0, 1], got {probability}")
    if fading_rate <= 0:
        raise ConfigError(f"fading rate must be positive, got {fading_rate}")
    if probability == 1.0:
        return 0.0
    return fading_rate / (-math.log1p(-probability))


def cci_power_cap(fading_rate, loss_db, probability, p_cci,
                  power_threshold=math.inf) -> float:
    """Total-power cap enforcing the co-channel interference constraint.

    min(P_th, nu * 10^(L/10) * P_CCI / (-ln(1 - Psi))); an infinite P_CCI
    leaves only the hard limit P_th.
    """
    if p_cci < 0:
        raise ConfigError("co-channel interference limit must be >= 0")
    if math.isinf(p_cci):
        return power_threshold
    return min(power_threshold,
               _tail_scale(probability, fading_rate) * 10.0 ** (0.1 * loss_db)
               * p_cci)


def aci_power_cap(fading_rate, probability, p_aci) -> float:
    """Cap on the overlap-weighted power sum for one adjacent PU:
    nu * P_ACI / (-ln(1 - Psi)).  Infinite P_ACI -> vacuous (inf)."""
    if p_aci < 0:
        raise ConfigError("adjacent-channel interference limit must be >= 0")
    if math.isinf(p_aci):
        return math.inf
    return _tail_scale(probability, fading_rate) * p_aci


def build_caps(cfg: ScenarioConfig, omega: AciFactors | None = None
               ) -> ConstraintCaps:
    """Assemble every cap for a scenario.

    The overlap matrix is recomputed unless passed in; pass a cached one
    when sweeping parameters that leave the spectral geometry unchanged.
    """
    total = cfg.su.power_threshold
    for pu in cfg.cochannel_pus():
        loss = path_loss_db(pu.distance, cfg.path_loss)
        total = cci_power_cap(pu.fading_rate, loss, pu.probability,
                              pu.interference_cap, total)
    if omega is None:
        omega = aci_overlap_matrix(cfg)
    adj = cfg.adjacent_pus()
    if omega.omega.shape != (cfg.su.num_subcarriers, len(adj)):
        raise ConfigError(
            f"overlap matrix shape {omega.omega.shape} does not match "
            f"{cfg.su.num_subcarriers} subcarriers x {len(adj)} adjacent PUs"
        )
    aci = np.array([
        aci_power_cap(p.fading_rate, p.probability, p.interference_cap)
        for p in adj
    ])
    return ConstraintCaps(total_cap=total, aci_caps=aci, aci_weights=omega)


def check_feasible(alloc, caps: ConstraintCaps, cnir, ber_threshold,
                   rel_slack=FEAS_TOL) -> FeasibilityReport:
    """Verify an allocation (discrete or continuous) against every constraint.

    Each comparison gets ``rel_slack`` relative headroom.  Margins are
    relative violations (excess / cap), so a feasible allocation reports a
    worst margin of 0.
    """
    bits = np.asarray(alloc.bits, dtype=float)
    powers = np.asarray(alloc.powers, dtype=float)
    c = np.asarray(cnir, dtype=float)
    ber_th = np.broadcast_to(np.asarray(ber_threshold, dtype=float), c.shape)
    omega = caps.aci_weights.omega

    loaded = bits > 0
    ber = np.zeros_like(c)
    ber[loaded] = 0.2 * np.exp(
        -1.6 * powers[loaded] * c[loaded] / (2.0 ** bits[loaded] - 1.0)
    )
    ber_ok = ~loaded | (ber <= ber_th * (1.0 + rel_slack))
    ber_margin = float(np.max(np.maximum(ber - ber_th, 0.0) / ber_th,
                              initial=0.0))

    def _cap_margin(value, cap):
        if math.isinf(cap):
            return True, 0.0
        ok = value <= cap * (1.0 + rel_slack)
        scale = cap if cap > 0 else 1.0
        return bool(ok), max(value - cap, 0.0) / scale

    total = float(np.sum(powers))
    power_ok, power_margin = _cap_margin(total, caps.total_cap)
    loads = omega.T @ powers
    aci_ok = np.empty(loads.size, dtype=bool)
    aci_margin = 0.0
    for l, (load, cap) in enumerate(zip(loads, caps.aci_caps)):
        aci_ok[l], m = _cap_margin(float(load), float(cap))
        aci_margin = max(aci_margin, m)

    worst = max(ber_margin, power_margin, aci_margin)
    feasible = bool(np.all(ber_ok)) and power_ok and bool(np.all(aci_ok))
    return FeasibilityReport(ber_ok=ber_ok, power_ok=power_ok, aci_ok=aci_ok,
                             worst_margin=worst, feasible=feasible)
