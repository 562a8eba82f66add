"""Numerical optimization kernels shared by the path and configuration solvers."""
from collections import deque
from dataclasses import dataclass

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class LBFGSResult:
    x: np.ndarray
    f: float
    grad: np.ndarray
    grad_norm: float
    iterations: int
    converged: bool
    guard_blocked: bool  # last failed line search was cut by the feasibility test
    message: str


def lbfgs(fun_grad, x0, *, precondition=None, feasible=None, grad_tol=1e-8,
          max_iters=5000, memory=12, c1=1e-4, max_backtracks=40, stall_iters=20):
    """Limited-memory BFGS with backtracking and a feasibility guard.

    ``fun_grad(x) -> (f, g)``.  ``precondition(g)`` applies an approximate
    inverse Hessian used as the initial matrix of the two-loop recursion.
    ``feasible(x)`` rejects trial points (e.g. near-collisions) before the
    objective is evaluated there.  The run stops early once ``stall_iters``
    consecutive steps fail to lower f by more than rounding noise.
    """
    x = np.array(x0, dtype=float)
    f, g = fun_grad(x)
    if not np.isfinite(f):
        raise ValueError("objective is not finite at the starting point")
    apply_h0 = precondition if precondition is not None else (lambda v: v)
    hist = deque(maxlen=memory)
    guard_blocked = False
    message = "iteration budget exhausted"
    stalled = 0

    for it in range(max_iters + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            return LBFGSResult(x, f, g, gnorm, it, True, False, "gradient tolerance met")
        if it == max_iters:
            break

        q = g.copy()
        alphas = []
        for s, y, rho in reversed(hist):
            a = rho * np.vdot(s, q)
            q -= a * y
            alphas.append(a)
        r = apply_h0(q)
        if hist:
            s, y, _ = hist[-1]
            r *= np.vdot(s, y) / np.vdot(y, apply_h0(y))
        for (s, y, rho), a in zip(hist, reversed(alphas)):
            b = rho * np.vdot(y, r)
            r += (a - b) * s
        p = -r
        slope = float(np.vdot(g, p))
        if not slope < 0:
            hist.clear()
            p = -apply_h0(g)
            slope = float(np.vdot(g, p))

        step, accepted, blocked = 1.0, False, False
        for _ in range(max_backtracks):
            xt = x + step * p
            if feasible is not None and not feasible(xt):
                blocked = True
                step *= 0.5
                continue
            ft, gt = fun_grad(xt)
            if np.isfinite(ft) and ft <= f + c1 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if hist:
                hist.clear()
                continue
            guard_blocked = blocked
            message = "line search failed"
            break

        stalled = stalled + 1 if f - ft <= 1e-14 * abs(f) else 0
        s, y = xt - x, gt - g
        sy = float(np.vdot(s, y))
        if sy > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            hist.append((s, y, 1.0 / sy))
        x, f, g = xt, ft, gt
        if stalled >= stall_iters:
            message = "stalled at rounding level"
            break

    gnorm = float(np.linalg.norm(g))
    return LBFGSResult(x, f, g, gnorm, it, gnorm <= grad_tol, guard_blocked, message)


def golden_section(f, a, b, tol=1e-6, max_iters=200):
    """Minimize a scalar function on ``[a, b]``; returns ``(x_min, f_min, evaluations)``.

    Every evaluation is returned so callers can take the best sampled point
    when the function is not unimodal.
    """
    evals = []

    def F(x):
        v = f(x)
        evals.append((x, v))
        return v

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = F(c), F(d)
    for _ in range(max_iters):
        if abs(b - a) <= tol * (abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = F(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = F(d)
    x_best, f_best = min(evals, key=lambda e: e[1])
    return x_best, f_best, evals


def bisect_sign_change(h, lo, hi, h_lo=None, h_hi=None, max_iters=15, geometric=True):
    """Locate a sign change of ``h`` in ``[lo, hi]``.

    Returns ``(root, evaluations)`` where the root is the false-position
    point of the final bracket.
    """
    h_lo = h(lo) if h_lo is None else h_lo
    h_hi = h(hi) if h_hi is None else h_hi
    if np.sign(h_lo) == np.sign(h_hi):
        raise ValueError("bracket does not straddle a sign change")
    evals = [(lo, h_lo), (hi, h_hi)]
    for _ in range(max_iters):
        mid = np.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
        h_mid = h(mid)
        evals.append((mid, h_mid))
        if h_mid == 0:
            return mid, evals
        if np.sign(h_mid) == np.sign(h_lo):
            lo, h_lo = mid, h_mid
        else:
            hi, h_hi = mid, h_mid
    root = lo - h_lo * (hi - lo) / (h_hi - h_lo)
    return float(root), evals
