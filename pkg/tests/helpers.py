"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from scratch against the math, not
by calling the code under test: a pure-python forward pass, an LP solved by
brute-force vertex enumeration, a Sutherland–Hodgman polygon clipper, and a
Monte-Carlo membership comparator.
"""

from __future__ import annotations

import itertools

import numpy as np

STRICT = 1e-7


# ---------------------------------------------------------------------------
# forward pass, no numpy linear algebra

def forward_pure(net_doc: dict, x):
    """(logits, flat_bits) from the JSON model document using plain loops."""
    h = [float(v) for v in x]
    bits = []
    for layer in net_doc["layers"][:-1]:
        pre = []
        for row, bv in zip(layer["weights"], layer["bias"]):
            acc = 0.0
            for wj, hj in zip(row, h):
                acc += wj * hj
            pre.append(acc + bv)
        bits.extend(1 if p > 0.0 else 0 for p in pre)
        h = [p if p > 0.0 else 0.0 for p in pre]
    out = net_doc["layers"][-1]
    logits = []
    for row, bv in zip(out["weights"], out["bias"]):
        acc = 0.0
        for wj, hj in zip(row, h):
            acc += wj * hj
        logits.append(acc + bv)
    return logits, bits


# ---------------------------------------------------------------------------
# vectorized forward (verified against polywhy.forward in test_model)

def batch_logits(net, X: np.ndarray) -> np.ndarray:
    """Logits for an (n, D) batch, straight off the Network's arrays."""
    H = np.atleast_2d(np.asarray(X, dtype=np.float64))
    for layer in net.layers[:-1]:
        H = np.maximum(H @ layer.weights.T + layer.bias, 0.0)
    out = net.layers[-1]
    return H @ out.weights.T + out.bias


def batch_classes(net, X: np.ndarray) -> np.ndarray:
    return np.argmax(batch_logits(net, X), axis=1)


# ---------------------------------------------------------------------------
# LP by exhaustive vertex enumeration

def lp_bruteforce(objective, A, b, lo, hi):
    """max objective·x over {Ax ≤ b} ∩ box, by checking every basic point.

    Returns (value, x) or None when the closed system is empty. Any bounded
    non-empty polytope attains its LP optimum at a vertex, and the box makes
    everything bounded, so enumerating vertex candidates is exact.
    """
    c = np.asarray(objective, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    D = len(lo)
    eye = np.eye(D)
    A_all = np.vstack([A.reshape(-1, D), eye, -eye])
    b_all = np.concatenate([b, hi, -lo])
    m = A_all.shape[0]

    best = None
    for rows in itertools.combinations(range(m), D):
        M = A_all[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, b_all[list(rows)])
        if np.all(A_all @ x <= b_all + 1e-9):
            val = float(c @ x)
            if best is None or val > best[0]:
                best = (val, x)
    return best


# ---------------------------------------------------------------------------
# 2-D polygon clipping (Sutherland–Hodgman)

def clip_halfplanes_2d(halfplanes, lo, hi):
    """Vertices of ∩{a·x ≤ b} ∩ box as a list of 2-D points (maybe empty).

    Starts from the box rectangle and clips against each half-plane in turn.
    """
    poly = [
        np.array([lo[0], lo[1]]),
        np.array([hi[0], lo[1]]),
        np.array([hi[0], hi[1]]),
        np.array([lo[0], hi[1]]),
    ]
    for a, bb in halfplanes:
        a = np.asarray(a, dtype=np.float64)
        if len(poly) == 0:
            return []
        nxt = []
        k = len(poly)
        for i in range(k):
            p, q = poly[i], poly[(i + 1) % k]
            fp, fq = bb - a @ p, bb - a @ q
            if fp >= 0:
                nxt.append(p)
            if (fp > 0 > fq) or (fp < 0 < fq):
                t = fp / (fp - fq)
                nxt.append(p + t * (q - p))
        # drop consecutive duplicates
        poly = []
        for q in nxt:
            if not poly or np.linalg.norm(q - poly[-1]) > 1e-10:
                poly.append(q)
        if len(poly) > 1 and np.linalg.norm(poly[0] - poly[-1]) <= 1e-10:
            poly.pop()
    return poly


def match_point_sets(P, Q, tol) -> bool:
    """True iff the two point sets pair up one-to-one within tol."""
    P = [np.asarray(p, dtype=np.float64) for p in P]
    Q = [np.asarray(q, dtype=np.float64) for q in Q]
    if len(P) != len(Q):
        return False
    used = [False] * len(Q)
    for p in P:
        hit = -1
        for j, q in enumerate(Q):
            if not used[j] and np.linalg.norm(p - q) <= tol:
                hit = j
                break
        if hit < 0:
            return False
        used[hit] = True
    return True


# ---------------------------------------------------------------------------
# membership comparison

def membership_matrix(constraints, X, tol):
    """Boolean closed-membership of points X against constraint rows."""
    A = np.asarray([c.a for c in constraints], dtype=np.float64)
    b = np.asarray([c.b for c in constraints], dtype=np.float64)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if A.size == 0:
        return np.ones(X.shape[0], dtype=bool)
    return np.all(X @ A.T <= b + tol, axis=1)


def clear_membership_disagreements(rows_a, rows_b, X, tol=1e-7) -> int:
    """Points clearly inside one row set (every slack > tol) and clearly
    outside the other (some slack < −tol); boundary-grazing points don't
    count against either side."""

    def slacks(rows):
        A = np.asarray([c.a for c in rows], dtype=np.float64)
        b = np.asarray([c.b for c in rows], dtype=np.float64)
        return b - np.atleast_2d(X) @ A.T

    sa, sb = slacks(rows_a), slacks(rows_b)
    in_a = np.all(sa > tol, axis=1)
    out_a = np.any(sa < -tol, axis=1)
    in_b = np.all(sb > tol, axis=1)
    out_b = np.any(sb < -tol, axis=1)
    return int(np.sum((in_a & out_b) | (in_b & out_a)))
