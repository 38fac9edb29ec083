"""Small dense linear-programming core.

Everything geometric in this package reduces to LPs of the form

    maximize  c . x   subject to  A x <= b,  lower <= x <= upper,

solved with a two-phase tableau simplex using Bland's rule, so results are
bit-deterministic for identical inputs. Problem sizes here are tiny (tens
of rows, a handful of variables); clarity and reproducibility beat speed.

`interior_margin` is the feasibility primitive used for open polytopes: it
maximizes the smallest slack t over the box, so t > 0 certifies a point
strictly inside every inequality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FEASIBILITY_TOL",
    "STRICT_MARGIN",
    "LpProblem",
    "Optimal",
    "Infeasible",
    "Unbounded",
    "MarginResult",
    "solve",
    "interior_margin",
    "solve_calls",
    "reset_solve_calls",
]

FEASIBILITY_TOL = 1e-7  # how negative a phase-1 residual may be before "infeasible"
STRICT_MARGIN = 1e-7  # minimum interior slack for a strict inequality to count as satisfied

_PIVOT_TOL = 1e-9
_ZERO_ROW_TOL = 1e-12

_solve_calls = 0


def solve_calls() -> int:
    """Number of `solve` invocations since the last reset (test instrumentation)."""
    return _solve_calls


def reset_solve_calls() -> None:
    global _solve_calls
    _solve_calls = 0


@dataclass(frozen=True, eq=False)
class LpProblem:
    objective: np.ndarray  # maximize objective . x
    A: np.ndarray  # (m, d)
    b: np.ndarray  # (m,)
    lower: np.ndarray  # (d,) finite
    upper: np.ndarray  # (d,) finite


@dataclass(frozen=True, eq=False)
class Optimal:
    x: np.ndarray
    value: float


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Unbounded:
    pass


@dataclass(frozen=True, eq=False)
class MarginResult:
    margin: float  # best smallest slack over the box (may be <= 0)
    witness: np.ndarray  # point achieving it


def _simplex_canonical(A, b, c, max_iter=20000):
    """Two-phase simplex for  max c.y  s.t.  A y <= b,  y >= 0,  b arbitrary sign.

    Returns Optimal / Infeasible / Unbounded. Bland's rule throughout:
    entering column is the lowest index with positive reduced cost, leaving
    row breaks ratio ties by lowest basic-variable index. That sacrifices
    speed for an anti-cycling guarantee and full determinism.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).copy()
    c = np.asarray(c, dtype=np.float64)
    m, d = A.shape

    # Slack in every row; artificial in rows whose rhs is negative (after
    # flipping the row so rhs >= 0, the slack enters with -1 and cannot

    # seed the basis there).
    flip = b < 0
    A = np.where(flip[:, None], -A, A)
    b = np.where(flip, -b, b)
    slack_sign = np.where(flip, -1.0, 1.0)

    art_rows = np.flatnonzero(flip)
    n_art = len(art_rows)
    n_cols = d + m + n_art

    T = np.zeros((m, n_cols + 1))
    T[:, :d] = A
    T[np.arange(m), d + np.arange(m)] = slack_sign
    for k, r in enumerate(art_rows):
        T[r, d + m + k] = 1.0
    T[:, -1] = b

    basis = np.empty(m, dtype=np.int64)
    basis[:] = d + np.arange(m)
    basis[art_rows] = d + m + np.arange(n_art)

    def pivot(T, basis, row, col):
        T[row] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and abs(T[r, col]) > 0.0:
                T[r] -= T[r, col] * T[row]
        basis[row] = col

    def run_phase(T, basis, obj_row, allowed_cols, max_iter):
        """Iterate max of obj_row over allowed columns; obj_row is a live
        reduced-cost row appended below T (value stored negated in [-1])."""
        for _ in range(max_iter):
            red = obj_row[:-1]
            enter = -1
            for j in allowed_cols:
                if red[j] > _PIVOT_TOL:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            ratios_row = -1
            best = np.inf
            for r in range(T.shape[0]):
                a = T[r, enter]
                if a > _PIVOT_TOL:
                    ratio = T[r, -1] / a
                    if ratio < best - 1e-12 or (
                        abs(ratio - best) <= 1e-12 and (ratios_row < 0 or basis[r] < basis[ratios_row])
                    ):
                        best = ratio
                        ratios_row = r
            if ratios_row < 0:
                return "unbounded"
            pivot_col = enter
            T[ratios_row] /= T[ratios_row, pivot_col]
            for r in range(T.shape[0]):
                if r != ratios_row and T[r, pivot_col] != 0.0:
                    T[r] -= T[r, pivot_col] * T[ratios_row]
            if obj_row[pivot_col] != 0.0:
                obj_row -= obj_row[pivot_col] * T[ratios_row]
            basis[ratios_row] = pivot_col
        raise RuntimeError("simplex iteration limit hit; problem likely ill-posed")

    if n_art:
        # Phase 1: minimize sum of artificials == maximize -(sum artificials).
        p1 = np.zeros(n_cols + 1)
        p1[d + m : n_cols] = -1.0
        obj1 = p1.copy()
        for r in art_rows:
            obj1 += T[r]  # make reduced costs consistent with the starting basis
        allowed = range(n_cols)
        status = run_phase(T, basis, obj1, allowed, max_iter)
        if status == "unbounded":  # cannot happen: phase-1 objective is bounded by 0
            return Unbounded()
        # obj1[-1] holds -(phase-1 objective) = sum of artificials at optimum.
        if obj1[-1] > FEASIBILITY_TOL:
            return Infeasible()
        # Drive artificials out of the basis where possible; drop rows that
        # are redundant (no real pivot available).
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= d + m:
                piv = -1
                for j in range(d + m):
                    if abs(T[r, j]) > _PIVOT_TOL:
                        piv = j
                        break
                if piv >= 0:
                    pivot(T, basis, r, piv)
                else:
                    keep[r] = False
        if not np.all(keep):
            T = T[keep]
            basis = basis[keep]
        T = np.delete(T, np.s_[d + m : n_cols], axis=1)
        n_cols = d + m

    # Phase 2 objective row for  max c.y  in reduced-cost form.
    obj2 = np.zeros(n_cols + 1)
    obj2[:d] = c
    for r in range(T.shape[0]):
        if basis[r] < d and obj2[basis[r]] != 0.0:
            obj2 -= obj2[basis[r]] * T[r]
    status = run_phase(T, basis, obj2, range(n_cols), max_iter)
    if status == "unbounded":
        return Unbounded()

    y = np.zeros(d)
    for r in range(T.shape[0]):
        if basis[r] < d:
            y[basis[r]] = T[r, -1]
    return Optimal(x=y, value=float(c @ y))


def solve(problem: LpProblem):
    """Maximize objective over {A x <= b} intersected with the variable box.

    Returns Optimal(x, value), Infeasible, or Unbounded (the latter only if
    the box fails to cap the objective, which finite bounds prevent; it is
    kept for the canonical-form core and defensive callers).
    """
    global _solve_calls
    _solve_calls += 1

    c = np.asarray(problem.objective, dtype=np.float64)
    A = np.asarray(problem.A, dtype=np.float64)
    b = np.asarray(problem.b, dtype=np.float64)
    lo = np.asarray(problem.lower, dtype=np.float64)
    hi = np.asarray(problem.upper, dtype=np.float64)
    d = c.shape[0]
    if A.size == 0:
        A = A.reshape(0, d)
    if A.shape[1] != d or b.shape[0] != A.shape[0]:
        raise ValueError(f"inconsistent LP shapes: A {A.shape}, b {b.shape}, c {c.shape}")
    if lo.shape != (d,) or hi.shape != (d,):
        raise ValueError("bounds must match the variable dimension")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("variable bounds must be finite")
    if np.any(lo > hi):
        return Infeasible()

    # Constant rows (all-zero coefficients) are decided by arithmetic.
    row_scale = np.max(np.abs(A), axis=1) if A.shape[0] else np.zeros(0)
    zero_rows = row_scale <= _ZERO_ROW_TOL
    if np.any(zero_rows):
        if np.any(b[zero_rows] < -FEASIBILITY_TOL):
            return Infeasible()
        A = A[~zero_rows]
        b = b[~zero_rows]

    # Shift to y = x - lo >= 0 and fold the upper bounds in as rows.
    shift = A @ lo if A.shape[0] else np.zeros(0)
    A2 = np.vstack([A, np.eye(d)])
    b2 = np.concatenate([b - shift, hi - lo])

    result = _simplex_canonical(A2, b2, c)
    if isinstance(result, Optimal):
        x = result.x + lo
        x.flags.writeable = False
        return Optimal(x=x, value=float(c @ x))
    return result


def interior_margin(A, b, lower, upper):
    """Maximize the smallest slack of A x <= b over the box.

    Solves  max t  s.t.  A x + t * 1 <= b,  lower <= x <= upper, with t
    bounded by the box diameter. Returns MarginResult(margin, witness) or
    Infeasible when even the closed system has no point in the box.

    margin >  STRICT_MARGIN : open system Ax < b has interior points
    margin < -FEASIBILITY_TOL: closed system is empty over the box
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    d = lo.shape[0]
    if A.size == 0:
        A = A.reshape(0, d)

    diam = float(np.linalg.norm(hi - lo))
    if A.shape[0] == 0:
        center = (lo + hi) / 2.0
        return MarginResult(margin=diam, witness=center)

    # t can be as negative as the worst violation anywhere in the box.
    per_row_max = np.where(A > 0, A * hi, A * lo).sum(axis=1)
    t_lo = float(np.min(b - per_row_max)) - 1.0
    t_hi = diam if diam > 0 else 1.0

    obj = np.zeros(d + 1)
    obj[-1] = 1.0
    A_ext = np.hstack([A, np.ones((A.shape[0], 1))])
    res = solve(
        LpProblem(
            objective=obj,
            A=A_ext,
            b=b,
            lower=np.concatenate([lo, [t_lo]]),
            upper=np.concatenate([hi, [t_hi]]),
        )
    )
    if isinstance(res, Infeasible):
        return Infeasible()
    if isinstance(res, Unbounded):  # impossible with a finite box; defensive
        raise RuntimeError("interior margin LP reported unbounded despite finite bounds")
    margin = float(res.value)
    witness = np.asarray(res.x[:d])
    witness.flags.writeable = False
    if margin < -FEASIBILITY_TOL:
        return Infeasible()
    return MarginResult(margin=margin, witness=witness)
