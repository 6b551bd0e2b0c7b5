"""Critical points of the master function and the Bethe eigenvector check."""
from __future__ import annotations

import numpy as np

from ..algebra import DomainError, MultiplicitySpace, gaudin
from .master import CorrespondenceTable, MasterData, master_log_grad, omega_eval


def _grad_hess(data: MasterData, w, tp):
    _, g_log = master_log_grad(data, tp)
    g = w - g_log
    a = data.single_exponents()
    H = np.diag(-a / tp ** 2).astype(complex)
    for (i, j), e in data.pair_exponents().items():
        if e:
            q = e / (tp[i] - tp[j]) ** 2
            H[i, i] += q
            H[j, j] += q
            H[i, j] -= q
            H[j, i] -= q
    return g, H


def newton(data: MasterData, z, seed_point, tol=1e-13, max_iter=200):
    """Newton iteration for ``sum w_i t_i - log Phi`` (``w_i = z_c(i) - z_c(i)+1``).

    Returns ``(point, converged, iterations, hessian_condition)``.
    """
    w = data.phase_weights(z)
    tp = np.asarray(seed_point, dtype=complex).copy()
    scale = 1.0 + np.abs(w).max()
    for it in range(max_iter):
        try:
            g, H = _grad_hess(data, w, tp)
        except DomainError:
            return tp, False, it, np.inf
        if np.abs(g).max() < tol * scale:
            return tp, True, it, float(np.linalg.cond(H))
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return tp, False, it, np.inf
        # damp steps that would move a point by more than its distance to the origin
        lim = 0.5 * np.abs(tp).min()
        if np.abs(step).max() > lim:
            step *= lim / np.abs(step).max()
        tp = tp - step
    g, H = _grad_hess(data, w, tp)
    return tp, bool(np.abs(g).max() < 1e-9 * scale), max_iter, float(np.linalg.cond(H))


def _canonical(data: MasterData, tp):
    # variables with equal level are interchangeable
    c = np.asarray(data.c)
    out = tp.copy()
    for k in set(c.tolist()):
        idx = np.nonzero(c == k)[0]
        vals = tp[idx]
        out[idx] = vals[np.lexsort((vals.imag, vals.real))]
    return out


def bethe(z, data: MasterData, table: CorrespondenceTable, space: MultiplicitySpace,
          seeds=None, nseeds=40, seed=0, dedup_tol=1e-7) -> dict:
    """Critical points and the Gaudin eigen-residuals of omega at each.

    Parameters
    ----------
    seeds : array_like, optional
        Starting points, shape ``(k, mbar)``; random when omitted.
    """
    z = np.asarray(z, dtype=complex)
    rng = np.random.default_rng(seed)
    if seeds is None:
        w = data.phase_weights(z)
        size = (1 + np.abs(data.single_exponents()).max(initial=0)) / max(np.abs(w).min(), 1e-3)
        seeds = size * (rng.normal(size=(nseeds, data.mbar)) + 1j * rng.normal(size=(nseeds, data.mbar)))
    H = [h.matrix for h in gaudin(space, z)]
    points, failures = [], 0
    for s in np.atleast_2d(seeds):
        tp, ok, it, cond = newton(data, z, s)
        if not ok:
            failures += 1
            continue
        key = _canonical(data, tp)
        if any(np.abs(key - p["point"]).max() < dedup_tol * (1 + np.abs(key).max()) for p in points):
            continue
        vec = omega_eval(data, table, tp)
        nv = np.linalg.norm(vec)
        res = []
        for Hi in H:
            if nv == 0:
                res.append(np.inf)
                continue
            lam = np.vdot(vec, Hi @ vec) / np.vdot(vec, vec)
            res.append(float(np.linalg.norm(Hi @ vec - lam * vec) / nv))
        points.append({"point": key, "iterations": it, "hessian_condition": cond,
                       "omega": vec, "residuals": res, "max_residual": max(res)})
    return {"points": points, "count": len(points), "failed_seeds": failures}
