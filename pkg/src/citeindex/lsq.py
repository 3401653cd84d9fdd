"""Small nonlinear least-squares driver.

Levenberg-Marquardt with Marquardt diagonal scaling.  Only steps that lower
the sum of squared residuals are accepted, so the recorded objective history
is non-increasing.  When the Jacobian turns non-finite or rank deficient the
search continues with scipy's Nelder-Mead from the current point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

RANK_TOL = 1e-12
LAMBDA_MAX = 1e20


@dataclass
class LSQResult:
    params: np.ndarray
    objective: float
    jacobian: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool
    method: str = "lm"
    history: list = field(default_factory=list)

    def covariance(self):
        """Residual-variance scaled covariance ``s^2 (J^T J)^-1``."""
        m, k = self.jacobian.shape
        dof = max(m - k, 1)
        s2 = self.objective / dof
        return s2 * np.linalg.pinv(self.jacobian.T @ self.jacobian)

    def standard_errors(self):
        return np.sqrt(np.clip(np.diag(self.covariance()), 0.0, None))


def _degenerate(jac):
    if not np.all(np.isfinite(jac)):
        return True
    s = np.linalg.svd(jac, compute_uv=False)
    return s[0] == 0.0 or s[-1] / s[0] < RANK_TOL


def _sse(r):
    return float(np.dot(r, r))


def levenberg_marquardt(residual, jacobian, p0, max_iter=500, rtol=1e-10, feasible=None):
    """Minimise ``sum(residual(p)**2)`` starting at ``p0``.

    Stops when an accepted step lowers the objective by a relative amount
    below ``rtol``, when the objective hits zero, or when damping grows past
    ``LAMBDA_MAX`` (no representable descent left).  ``feasible(p)`` can veto
    trial points; a vetoed step counts as a rejected one.
    """
    p = np.asarray(p0, dtype=float).copy()
    r = residual(p)
    f = _sse(r)
    if not np.isfinite(f):
        raise ValueError("objective not finite at the starting point")
    history = [f]
    lam = 1e-3  # dimensionless: damping term is lam * diag(J^T J)
    it = 0
    converged = f == 0.0
    while it < max_iter and not converged:
        jac = jacobian(p)
        if _degenerate(jac):
            return _nelder_mead(residual, jacobian, p, history, it, max_iter, rtol, feasible)
        jtj = jac.T @ jac
        grad = jac.T @ r
        diag = np.maximum(np.diag(jtj), 1e-300)
        accepted = False
        while it < max_iter:
            it += 1
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                trial = p + step
                ok = feasible is None or feasible(trial)
                if ok:
                    r_new = residual(trial)
                    f_new = _sse(r_new)
                    if np.isfinite(f_new) and f_new < f:
                        decrease = (f - f_new) / f
                        p, r, f = trial, r_new, f_new
                        history.append(f)
                        lam = max(lam / 3.0, 1e-300)
                        accepted = True
                        converged = f == 0.0 or decrease < rtol
                        break
            lam *= 4.0
            if lam > LAMBDA_MAX:
                converged = True
                break
        if converged or not accepted:
            break
    return LSQResult(p, f, jacobian(p), r, it, converged, "lm", history)


def _nelder_mead(residual, jacobian, p, history, it, max_iter, rtol, feasible):
    def objective(q):
        if feasible is not None and not feasible(q):
            return np.inf
        val = _sse(residual(q))
        return val if np.isfinite(val) else np.inf

    def record(xk):
        history.append(min(history[-1], objective(xk)))

    budget = max(max_iter - it, 1) * 20
    res = minimize(objective, p, method="Nelder-Mead", callback=record,
                   options={"maxiter": budget, "xatol": 1e-12, "fatol": rtol * max(history[-1], 1e-300)})
    best = res.x if res.fun <= history[-1] else p
    r = residual(best)
    return LSQResult(best, _sse(r), jacobian(best), r, it + int(res.nit), bool(res.success), "nelder-mead", history)
