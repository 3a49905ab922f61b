"""Continuous joint bit/power loading under power and interference caps.

The continuous relaxation is solved per subcarrier from the Lagrangian
stationarity system of the scalarized problem

    minimize  F = alpha * sum(P) - (1 - alpha) * sum(b)

subject to a per-subcarrier BER ceiling (held at equality), an optional
total-power cap and optional weighted-power (adjacent-channel) caps.  With
the BER model BER = 0.2 exp(-1.6 P C / (2^b - 1)) every regime admits the
same closed form per subcarrier, parameterized by an effective multiplier
mu_i = alpha + lam_pow + sum_l w_il lam_aci_l:

    b_i = log2[ (1-alpha) * 1.6 C_i / (ln2 * mu_i * (-ln(5 BER_i))) ]
    P_i = (1-alpha) / (ln2 * mu_i) + ln(5 BER_i) / (1.6 C_i)

Subcarriers whose rate would fall below 2 bits are nulled and the
multipliers re-solved until the active set is stable (nulling is
remove-only, so at most N rounds).  The total-power multiplier has a closed
form; the coupled caps are solved by a projected Newton iteration with a
cyclic-bisection fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SolverError

_LN2 = math.log(2.0)
# Relative tolerance to which binding caps are equalized.
_DUAL_TOL = 1e-12
# Relative slack applied to every cap comparison ("is this violated?").
FEAS_TOL = 1e-9


@dataclass(frozen=True)
class ContinuousSolution:
    """Continuous loading: real-valued bits, exact BER-matching powers."""

    bits: np.ndarray            # b*_i >= 2 on the active set, 0 elsewhere
    powers: np.ndarray          # watts
    lambda_power: float         # multiplier of the total-power cap
    lambda_aci: np.ndarray      # multipliers of the ACI caps, shape (L,)
    active_set: np.ndarray      # sorted indices of loaded subcarriers
    case_id: int                # 5..8 by which multipliers are positive
    objective: float
    alpha: float                # trade-off weight the solution was solved for


def _as_arrays(cnir, ber_threshold):
    c = np.atleast_1d(np.asarray(cnir, dtype=float))
    if np.any(c <= 0) or not np.all(np.isfinite(c)):
        raise SolverError("CNIR values must be finite and positive")
    ber = np.broadcast_to(np.asarray(ber_threshold, dtype=float), c.shape)
    if np.any(ber <= 0) or np.any(ber > 0.2):
        raise SolverError("BER thresholds must lie in (0, 0.2]")
    return c, np.array(ber, dtype=float)


def cnir_threshold(alpha, ber_threshold):
    """Smallest CNIR loaded by the unconstrained solution (rate hits 2 bits).

    Below this, the subcarrier is nulled.  Vectorized over ber_threshold.
    """
    assert 0.0 < alpha < 1.0
    ber = np.asarray(ber_threshold, dtype=float)
    out = -(4.0 / 1.6) * (alpha * _LN2 / (1.0 - alpha)) * np.log(5.0 * ber)
    return out if out.ndim else float(out)


def objective_value(bits, powers, alpha) -> float:
    """Scalarized objective F = alpha * sum(P) - (1 - alpha) * sum(b)."""
    return float(alpha * np.sum(powers) - (1.0 - alpha) * np.sum(bits))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def _finish(c, neglog, alpha, lam, omega, active):
    """Assemble a ContinuousSolution from converged multipliers."""
    n = c.shape[0]
    bits = np.zeros(n)
    powers = np.zeros(n)
    if np.any(active):
        mu = alpha + lam[0] + omega[active] @ lam[1:]
        k = (1.0 - alpha) / _LN2
        arg = (1.0 - alpha) * 1.6 * c[active] / (_LN2 * mu * neglog[active])
        bits[active] = np.log2(arg)
        powers[active] = k / mu - neglog[active] / (1.6 * c[active])
    lam_pow = float(lam[0])
    lam_aci = np.array(lam[1:], dtype=float)
    if lam_pow > 0 and np.any(lam_aci > 0):
        case = 8
    elif lam_pow > 0:
        case = 6
    elif np.any(lam_aci > 0):
        case = 7
    else:
        case = 5
    return ContinuousSolution(
        bits=bits, powers=powers, lambda_power=lam_pow, lambda_aci=lam_aci,
        active_set=np.flatnonzero(active), case_id=case,
        objective=objective_value(bits, powers, alpha), alpha=alpha,
    )


def solve_case5(cnir, alpha, ber_threshold, n_aci=0) -> ContinuousSolution:
    """Unconstrained optimum: per-subcarrier closed form, no multipliers."""
    c, ber = _as_arrays(cnir, ber_threshold)
    neglog = -np.log(5.0 * ber)
    active = c >= cnir_threshold(alpha, ber)
    lam = np.zeros(1 + n_aci)
    omega = np.zeros((c.size, n_aci))
    return _finish(c, neglog, alpha, lam, omega, active)


def lambda_total_power(active, cnir, alpha, ber_threshold, cap) -> float:
    """Closed-form multiplier that makes sum(P) over ``active`` equal ``cap``.

    May be negative, meaning the cap is slack and the constraint inactive.
    """
    c, ber = _as_arrays(cnir, ber_threshold)
    idx = np.asarray(active, dtype=int)
    if idx.size == 0:
        raise SolverError("lambda_total_power needs a non-empty active set")
    q = np.log(5.0 * ber[idx]) / (1.6 * c[idx])
    denom = cap - np.sum(q)
    if denom <= 0:
        raise SolverError(
            f"total-power cap {cap} incompatible with the active set "
            f"(denominator {denom} <= 0)"
        )
    return idx.size * (1.0 - alpha) / _LN2 / denom - alpha


# ---------------------------------------------------------------------------
# Dual engine for the capped regimes
# ---------------------------------------------------------------------------


def _scaled_residuals(lam_e, cols, c, neglog, q, alpha, weights, caps, active):
    """Residual (load - cap)/cap for the enforced constraint columns."""
    k = (1.0 - alpha) / _LN2
    w_act = weights[active][:, cols]
    mu = alpha + w_act @ lam_e
    p = k / mu + q[active]
    loads = w_act.T @ p
    return (loads - caps[cols]) / caps[cols]


def _scaled_jacobian(lam_e, cols, c, neglog, q, alpha, weights, caps, active):
    k = (1.0 - alpha) / _LN2
    w_act = weights[active][:, cols]
    mu = alpha + w_act @ lam_e
    jac = -k * (w_act / mu[:, None] ** 2).T @ w_act
    return jac / caps[cols][:, None]


def _bisect_duals(lam_e, cols, args):
    """Cyclic per-constraint bisection; solves the complementarity system
    (each lam >= 0, residual <= 0, lam * residual = 0) for monotone loads."""
    m = lam_e.size
    for _ in range(500):
        for j in range(m):
            def res_j(x):
                trial = lam_e.copy()
                trial[j] = x
                return _scaled_residuals(trial, cols, *args)[j]

            if res_j(0.0) <= 0.0:
                lam_e[j] = 0.0
                continue
            hi = max(1.0, 2.0 * lam_e[j])
            doublings = 0
            while res_j(hi) > 0.0:
                hi *= 2.0
                doublings += 1
                if doublings > 900:
                    raise SolverError("cap equalization failed to bracket")
            lo = 0.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                r = res_j(mid)
                if abs(r) <= 0.01 * _DUAL_TOL:
                    break
                if r > 0.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-16 * hi:
                    break
            lam_e[j] = 0.5 * (lo + hi)
        r = _scaled_residuals(lam_e, cols, *args)
        if np.all((np.abs(r) <= _DUAL_TOL) | ((lam_e == 0.0) & (r <= _DUAL_TOL))):
            return lam_e
    raise SolverError(
        f"cap equalization (bisection) did not converge; residuals {r}"
    )


def _merit(lam_e, cols, args):
    r = _scaled_residuals(lam_e, cols, *args)
    return float(np.max(np.where(lam_e > 0.0, np.abs(r), np.maximum(r, 0.0))))


def _newton_duals(lam_e, cols, args):
    """Projected damped Newton on the scaled cap residuals."""
    for _ in range(100):
        r = _scaled_residuals(lam_e, cols, *args)
        done = (np.abs(r) <= _DUAL_TOL) | ((lam_e == 0.0) & (r <= _DUAL_TOL))
        if np.all(done):
            return lam_e
        free = (lam_e > 0.0) | (r > 0.0)
        jac = _scaled_jacobian(lam_e, cols, *args)
        try:
            step = np.linalg.solve(jac[np.ix_(free, free)], -r[free])
        except np.linalg.LinAlgError:
            break
        direction = np.zeros_like(lam_e)
        direction[free] = step
        base = _merit(lam_e, cols, args)
        t = 1.0
        improved = False
        for _ in range(40):
            trial = np.maximum(lam_e + t * direction, 0.0)
            if _merit(trial, cols, args) < base * (1.0 - 1e-4 * t) + 1e-300:
                lam_e = trial
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return _bisect_duals(lam_e, cols, args)


def _solve_duals(enforced, lam, c, neglog, q, alpha, weights, caps, active):
    """Solve the enforced caps to equality (or pin at zero) on a fixed
    active set.  Updates ``lam`` in place and returns it."""
    cols = np.flatnonzero(enforced)
    lam[:] = np.where(enforced, lam, 0.0)
    if cols.size == 0 or not np.any(active):
        lam[:] = 0.0
        return lam
    if cols.size == 1 and cols[0] == 0:
        # Total power only: closed form.
        na = int(np.count_nonzero(active))
        denom = caps[0] - np.sum(q[active])
        if denom <= 0:
            raise SolverError("total-power cap incompatible with active set")
        lam[0] = max(na * (1.0 - alpha) / _LN2 / denom - alpha, 0.0)
        return lam
    args = (c, neglog, q, alpha, weights, caps, active)
    lam_e = _newton_duals(np.maximum(lam[cols], 0.0), cols, args)
    lam[cols] = lam_e
    return lam


def _capped_solve(cnir, alpha, ber_threshold, total_cap, omega, aci_caps,
                  want_power, want_aci) -> ContinuousSolution:
    c, ber = _as_arrays(cnir, ber_threshold)
    n = c.size
    omega = (np.zeros((n, 0)) if omega is None
             else np.atleast_2d(np.asarray(omega, dtype=float)))
    if omega.shape[0] != n:
        raise SolverError(
            f"overlap matrix has {omega.shape[0]} rows for {n} subcarriers"
        )
    l = omega.shape[1]
    aci_caps = np.asarray(aci_caps, dtype=float).reshape(l)
    neglog = -np.log(5.0 * ber)
    q = -neglog / (1.6 * c)
    weights = np.concatenate([np.ones((n, 1)), omega], axis=1)
    caps = np.concatenate([[total_cap], aci_caps])
    want = np.concatenate([[bool(want_power)],
                           np.broadcast_to(want_aci, (l,)).astype(bool)])
    want &= np.isfinite(caps)

    # A cap of exactly zero forbids any subcarrier coupled to it.
    forced_null = np.zeros(n, dtype=bool)
    for col in np.flatnonzero(want):
        if caps[col] <= 0.0:
            forced_null |= weights[:, col] > 0.0
            want[col] = False

    active = (c >= cnir_threshold(alpha, ber)) & ~forced_null
    lam = np.zeros(1 + l)
    enforced = np.zeros(1 + l, dtype=bool)
    k = (1.0 - alpha) / _LN2

    for _ in range(4 * (n + l + 4)):
        _solve_duals(enforced, lam, c, neglog, q, alpha, weights, caps, active)
        if np.any(active):
            mu = alpha + weights[active] @ lam
            arg = (1.0 - alpha) * 1.6 * c[active] / (_LN2 * mu * neglog[active])
            if np.any(arg < 4.0):        # rate under 2 bits -> null and redo
                idx = np.flatnonzero(active)
                active[idx[arg < 4.0]] = False
                continue
            p = np.zeros(n)
            p[active] = k / mu + q[active]
        else:
            p = np.zeros(n)
        loads = weights.T @ p
        newly = want & ~enforced & (loads > caps * (1.0 + _DUAL_TOL))
        if np.any(newly):
            enforced |= newly
            continue
        return _finish(c, neglog, alpha, lam, omega, active)
    raise SolverError("active-set iteration failed to settle")


def solve_case6(cnir, alpha, ber_threshold, total_cap, n_aci=0):
    """Total-power cap binding (closed-form multiplier + nulling loop).

    A slack cap comes back with lambda_power = 0 and the unconstrained
    solution.
    """
    c = np.atleast_1d(np.asarray(cnir, dtype=float))
    return _capped_solve(c, alpha, ber_threshold, total_cap,
                         np.zeros((c.size, n_aci)), np.full(n_aci, np.inf),
                         want_power=True, want_aci=False)


def solve_case7(cnir, alpha, ber_threshold, omega, aci_caps):
    """ACI cap(s) binding, total power unconstrained."""
    return _capped_solve(cnir, alpha, ber_threshold, math.inf, omega,
                         aci_caps, want_power=False, want_aci=True)


def solve_case8(cnir, alpha, ber_threshold, total_cap, omega, aci_caps):
    """Total-power and ACI caps binding jointly."""
    return _capped_solve(cnir, alpha, ber_threshold, total_cap, omega,
                         aci_caps, want_power=True, want_aci=True)


def solve_continuous(realization, caps, su_params) -> ContinuousSolution:
    """Dispatch on which cap families the unconstrained optimum violates.

    The unconstrained solution is computed first; depending on whether the
    total-power cap, the ACI caps, or both are exceeded, the matching
    regime is solved.  As a safeguard the chosen solution is re-verified
    against the other family and escalated to the joint regime if it turned
    up a fresh violation (analytically it cannot, since binding a cap only
    lowers every power).
    """
    cnir = getattr(realization, "cnir", realization)
    alpha = su_params.alpha
    ber = su_params.ber_threshold
    omega = caps.aci_weights.omega
    total_cap = caps.total_cap
    aci_caps = np.asarray(caps.aci_caps, dtype=float)
    l = aci_caps.size

    sol5 = solve_case5(cnir, alpha, ber, n_aci=l)
    loads_aci = omega.T @ sol5.powers
    viol_pow = (math.isfinite(total_cap)
                and np.sum(sol5.powers) > total_cap * (1.0 + FEAS_TOL))
    viol_aci = np.isfinite(aci_caps) & (loads_aci > aci_caps * (1.0 + FEAS_TOL))

    if not viol_pow and not np.any(viol_aci):
        return sol5
    if viol_pow and not np.any(viol_aci):
        sol = solve_case6(np.asarray(cnir, dtype=float), alpha, ber,
                          total_cap, n_aci=l)
        if np.any(np.isfinite(aci_caps)
                  & (omega.T @ sol.powers > aci_caps * (1.0 + FEAS_TOL))):
            sol = solve_case8(cnir, alpha, ber, total_cap, omega, aci_caps)
        return sol
    if np.any(viol_aci) and not viol_pow:
        sol = solve_case7(cnir, alpha, ber, omega, aci_caps)
        if (math.isfinite(total_cap)
                and np.sum(sol.powers) > total_cap * (1.0 + FEAS_TOL)):
            sol = solve_case8(cnir, alpha, ber, total_cap, omega, aci_caps)
        return sol
    return solve_case8(cnir, alpha, ber, total_cap, omega, aci_caps)
