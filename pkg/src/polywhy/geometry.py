"""Polytope geometry of ReLU activation regions.

Fixing an activation signature makes every layer affine, so the network is
one affine map on the set of inputs that produce that signature — a convex
polytope. This module builds those polytopes in H-representation (rows
a·x ≤ b with provenance tags), intersects them with class-dominance
half-spaces, removes redundant rows by LP certification, and enumerates
vertices for small dimensions.

Conventions:
  * an ACTIVE neuron (bit 1) with pre-activation w·x + b̃ contributes the
    strict row  −w·x ≤ b̃   (open form  w·x + b̃ > 0),
  * an INACTIVE neuron contributes the closed row  w·x ≤ −b̃,
  * the input box is appended last as 2·dim rows and is always part of the
    geometry but never part of a reported explanation.

Constraint order is canonical everywhere: hidden layers in order, neurons
in index order, then output pairs in loser-class order, then box rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import lp
from .model import ActivationSignature, Network

__all__ = [
    "NeuronProv",
    "OutputPairProv",
    "BoxProv",
    "LinearConstraint",
    "Polytope",
    "AffineMap",
    "VRepresentation",
    "Removal",
    "effective_preactivation_maps",
    "output_affine_map",
    "region_hrep",
    "class_dominance_constraints",
    "output_polytope",
    "remove_redundant",
    "reduce_with_certificates",
    "enumerate_vertices",
    "open_interior",
    "constraint_arrays",
    "contains",
    "sample_interior",
    "order_ccw",
    "line_box_segment",
    "halfplane_box_polygon",
]

_ZERO_ROW_TOL = 1e-12
REDUNDANCY_TOL = 1e-9
VERTEX_TOL = 1e-7
DEDUPE_TOL = 1e-7
VERTEX_DIM_CAP = 6


# ---------------------------------------------------------------------------
# constraint provenance

@dataclass(frozen=True)
class NeuronProv:
    """Row came from one hidden ReLU (0-based layer and neuron index)."""

    layer: int
    index: int
    orientation: str  # "active" | "inactive"


@dataclass(frozen=True)
class OutputPairProv:
    """Row expresses 'class `winner` beats class `loser`'."""

    winner: int
    loser: int


@dataclass(frozen=True)
class BoxProv:
    """Row is one wall of the input domain box."""

    dim: int
    side: str  # "lower" | "upper"


@dataclass(frozen=True)
class LinearConstraint:
    """One half-space  a·x ≤ b  (strict: a·x < b), with its origin tag."""

    a: tuple[float, ...]
    b: float
    strict: bool
    provenance: NeuronProv | OutputPairProv | BoxProv

    @property
    def coeffs(self) -> np.ndarray:
        return np.asarray(self.a, dtype=np.float64)

    def value(self, x) -> float:
        return float(self.coeffs @ np.asarray(x, dtype=np.float64))

    def open_value(self, x) -> float:
        """Slack b − a·x; positive iff x is strictly inside the half-space."""
        return self.b - self.value(x)

    def satisfied(self, x, tol: float = lp.FEASIBILITY_TOL) -> bool:
        return self.value(x) <= self.b + tol

    def is_zero_row(self) -> bool:
        return bool(np.max(np.abs(self.coeffs), initial=0.0) <= _ZERO_ROW_TOL)


def _mk_constraint(a, b, strict, prov) -> LinearConstraint:
    # `+ 0.0` turns negative zeros into plain zeros for clean rendering
    return LinearConstraint(
        a=tuple(float(v) + 0.0 for v in np.asarray(a, dtype=np.float64)),
        b=float(b) + 0.0,
        strict=bool(strict),
        provenance=prov,
    )


@dataclass(frozen=True)
class Polytope:
    """Ordered intersection of half-spaces over the input space.

    `feasible` is the arithmetic flag: False only when some zero-coefficient
    row is unsatisfiable on its own (e.g. a constant dominance gap with the
    wrong sign), which empties the region without any LP work.
    """

    dim: int
    constraints: tuple[LinearConstraint, ...]
    signature: ActivationSignature | None = None
    feasible: bool = True

    def __post_init__(self):
        for c in self.constraints:
            if len(c.a) != self.dim:
                raise ValueError(f"constraint arity {len(c.a)} != polytope dim {self.dim}")


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x ↦ M x + v."""

    M: np.ndarray
    v: np.ndarray

    def apply(self, x) -> np.ndarray:
        return self.M @ np.asarray(x, dtype=np.float64) + self.v


@dataclass(frozen=True)
class VRepresentation:
    vertices: tuple[tuple[float, ...], ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=np.float64).reshape(len(self.vertices), -1)


@dataclass(frozen=True)
class Removal:
    """Certificate for one dropped row: max a·x over the retained system."""

    index: int
    constraint: LinearConstraint
    lp_value: float


# ---------------------------------------------------------------------------
# effective affine maps

def effective_preactivation_maps(net: Network, sig: ActivationSignature) -> tuple[AffineMap, ...]:
    """Affine pre-activation map of every layer under signature `sig`.

    One entry per layer (hidden layers first, output last). Entry k maps an
    input x straight to layer k's pre-activations, with earlier ReLUs
    replaced by the 0/1 mask the signature dictates; the final entry is the
    logits-as-affine-function-of-x map for this region.
    """
    if sig.widths != net.hidden_widths:
        raise ValueError(f"signature widths {sig.widths} do not match network {net.hidden_widths}")
    maps = []
    M = net.layers[0].weights
    v = net.layers[0].bias
    maps.append(AffineMap(M=M, v=v))
    for k in range(1, len(net.layers)):
        mask = np.asarray(sig.bits[k - 1], dtype=np.float64)
        W = net.layers[k].weights
        M = (W * mask) @ M
        v = (W * mask) @ v + net.layers[k].bias
        maps.append(AffineMap(M=M, v=v))
    return tuple(maps)


def output_affine_map(net: Network, sig: ActivationSignature) -> AffineMap:
    """The logits map G for the region of `sig` (last effective map)."""
    return effective_preactivation_maps(net, sig)[-1]


# ---------------------------------------------------------------------------
# H-representation builders

def _neuron_constraints(net: Network, sig: ActivationSignature) -> list[LinearConstraint]:
    maps = effective_preactivation_maps(net, sig)
    rows = []
    for li, layer_bits in enumerate(sig.bits):
        M, v = maps[li].M, maps[li].v
        for ni, bit in enumerate(layer_bits):
            w = M[ni]
            offset = float(v[ni])
            if bit == 1:
                rows.append(_mk_constraint(-w, offset, True, NeuronProv(li, ni, "active")))
            else:
                rows.append(_mk_constraint(w, -offset, False, NeuronProv(li, ni, "inactive")))
    return rows


def _box_constraints(net: Network) -> list[LinearConstraint]:
    rows = []
    d = net.input_dim
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        rows.append(_mk_constraint(e, net.upper[i], False, BoxProv(i, "upper")))
        rows.append(_mk_constraint(-e, -net.lower[i], False, BoxProv(i, "lower")))
    return rows


def _arith_feasible(rows) -> bool:
    """Closed-system satisfiability of the zero-coefficient rows."""
    for c in rows:
        if c.is_zero_row() and c.b < -lp.FEASIBILITY_TOL:
            return False
    return True


def region_hrep(net: Network, sig: ActivationSignature) -> Polytope:
    """H-representation of the activation region of `sig`, box included.

    Constraint count = total hidden neurons + 2 · input_dim.
    """
    rows = _neuron_constraints(net, sig) + _box_constraints(net)
    return Polytope(
        dim=net.input_dim,
        constraints=tuple(rows),
        signature=sig,
        feasible=_arith_feasible(rows),
    )


def class_dominance_constraints(net: Network, sig: ActivationSignature, c: int) -> tuple[LinearConstraint, ...]:
    """Strict rows stating class c's logit beats every other class's.

    Row for loser j is  (g_j − g_c)·x ≤ v_c − v_j  (open form
    g_c·x + v_c > g_j·x + v_j), built from the effective logits map.
    """
    if not 0 <= c < net.num_classes:
        raise ValueError(f"class index {c} out of range for {net.num_classes} classes")
    G = output_affine_map(net, sig)
    rows = []
    for j in range(net.num_classes):
        if j == c:
            continue
        rows.append(_mk_constraint(G.M[j] - G.M[c], float(G.v[c] - G.v[j]), True, OutputPairProv(c, j)))
    return tuple(rows)


def output_polytope(net: Network, sig: ActivationSignature, c: int) -> Polytope:
    """Region of `sig` intersected with 'class c wins' (canonical row order).

    Constraint count = total hidden + (num_classes − 1) + 2 · input_dim.
    """
    rows = (
        _neuron_constraints(net, sig)
        + list(class_dominance_constraints(net, sig, c))
        + _box_constraints(net)
    )
    return Polytope(
        dim=net.input_dim,
        constraints=tuple(rows),
        signature=sig,
        feasible=_arith_feasible(rows),
    )


# ---------------------------------------------------------------------------
# array views and membership

def constraint_arrays(constraints) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(A, b, strict_mask) arrays for a constraint sequence."""
    if not constraints:
        return np.zeros((0, 0)), np.zeros(0), np.zeros(0, dtype=bool)
    A = np.asarray([c.a for c in constraints], dtype=np.float64)
    b = np.asarray([c.b for c in constraints], dtype=np.float64)
    strict = np.asarray([c.strict for c in constraints], dtype=bool)
    return A, b, strict


def contains(p: Polytope, points, tol: float = lp.FEASIBILITY_TOL) -> np.ndarray:
    """Closed membership test for an (n, dim) array of points."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if not p.constraints:
        return np.ones(X.shape[0], dtype=bool)
    A, b, _ = constraint_arrays(p.constraints)
    return np.all(X @ A.T <= b + tol, axis=1)


def open_interior(p: Polytope, lower, upper):
    """Interior witness of the OPEN polytope over the box, or None.

    Zero-coefficient rows are decided arithmetically (strict needs a
    positive gap, closed tolerates ~0); the rest go to one interior-margin
    LP. Returns lp.MarginResult on success.
    """
    rows = [c for c in p.constraints if not c.is_zero_row()]
    for c in p.constraints:
        if c.is_zero_row():
            if c.strict and c.b <= lp.STRICT_MARGIN:
                return None
            if not c.strict and c.b < -lp.FEASIBILITY_TOL:
                return None
    A, b, _ = constraint_arrays(rows)
    if A.size == 0:
        A = A.reshape(0, p.dim)
    res = lp.interior_margin(A, b, lower, upper)
    if isinstance(res, lp.Infeasible) or res.margin <= lp.STRICT_MARGIN:
        return None
    return res


# ---------------------------------------------------------------------------
# redundancy removal (LP certified)

def _box_from_provenance(p: Polytope):
    lo = np.full(p.dim, np.nan)
    hi = np.full(p.dim, np.nan)
    for c in p.constraints:
        if isinstance(c.provenance, BoxProv):
            if c.provenance.side == "upper":
                hi[c.provenance.dim] = c.b
            else:
                lo[c.provenance.dim] = -c.b
    if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
        return None
    return lo, hi


def reduce_with_certificates(p: Polytope, bounds=None, tol: float = REDUNDANCY_TOL):
    """Drop every row the remaining system already implies.

    Scans rows in order; row i is removed iff  max a_i·x  over the other
    currently-retained rows is ≤ b_i + tol (one LP per non-degenerate row;
    zero rows are decided arithmetically). The LPs run inside a padded
    version of the domain box purely so they stay bounded — the padding is
    provably never binding for the retained system, so the reduced polytope
    describes exactly the original point set.

    Returns (reduced Polytope, tuple of Removal certificates). An infeasible
    input (arithmetic flag or an LP that reports empty) comes back unchanged
    with feasible=False.
    """
    if not p.constraints:
        return p, ()
    if not p.feasible:
        return p, ()
    if bounds is None:
        bounds = _box_from_provenance(p)
        if bounds is None:
            raise ValueError("polytope carries no full set of box rows; pass bounds=(lower, upper)")
    lo = np.asarray(bounds[0], dtype=np.float64)
    hi = np.asarray(bounds[1], dtype=np.float64)
    pad = np.maximum(1.0, hi - lo)
    safe_lo, safe_hi = lo - pad, hi + pad

    rows = list(p.constraints)
    retained = [True] * len(rows)
    removals = []
    for i, row in enumerate(rows):
        if row.is_zero_row():
            # max a·x == 0 regardless of the system; redundant iff b >= -tol
            if row.b >= -tol:
                retained[i] = False
                removals.append(Removal(index=i, constraint=row, lp_value=0.0))
            continue
        others = [rows[j] for j in range(len(rows)) if retained[j] and j != i and not rows[j].is_zero_row()]
        A, b, _ = constraint_arrays(others)
        if A.size == 0:
            A = A.reshape(0, p.dim)
        res = lp.solve(lp.LpProblem(objective=row.coeffs, A=A, b=b, lower=safe_lo, upper=safe_hi))
        if isinstance(res, lp.Infeasible):
            return replace(p, feasible=False), ()
        if isinstance(res, lp.Unbounded):  # padded box makes this impossible
            raise RuntimeError("redundancy LP unbounded despite box padding")
        if res.value <= row.b + tol:
            retained[i] = False
            removals.append(Removal(index=i, constraint=row, lp_value=float(res.value)))

    kept = tuple(rows[i] for i in range(len(rows)) if retained[i])
    reduced = Polytope(dim=p.dim, constraints=kept, signature=p.signature, feasible=p.feasible)
    return reduced, tuple(removals)


def remove_redundant(p: Polytope, bounds=None, tol: float = REDUNDANCY_TOL) -> Polytope:
    """Minimal H-representation of `p` (see reduce_with_certificates)."""
    reduced, _ = reduce_with_certificates(p, bounds=bounds, tol=tol)
    return reduced


# ---------------------------------------------------------------------------
# vertex enumeration

def enumerate_vertices(p: Polytope, dim_cap: int = VERTEX_DIM_CAP) -> VRepresentation:
    """All vertices of the closed polytope (box rows must make it bounded).

    Every dim-sized subset of rows is solved as a linear system; solutions
    satisfying all rows within 1e-7 survive, deduplicated within 1e-7.
    Combinatorial in the constraint count — guarded by `dim_cap`.
    """
    D = p.dim
    if D > dim_cap:
        raise ValueError(f"dimension {D} exceeds vertex enumeration cap {dim_cap}")
    rows = [c for c in p.constraints if not c.is_zero_row()]
    if len(rows) < D:
        return VRepresentation(vertices=())
    A, b, _ = constraint_arrays(rows)
    # normalize rows so the degeneracy filter is scale-free
    norms = np.linalg.norm(A, axis=1)
    An = A / norms[:, None]
    bn = b / norms

    subsets = np.asarray(list(itertools.combinations(range(len(rows)), D)))
    mats = An[subsets]  # (n_sub, D, D)
    rhs = bn[subsets]  # (n_sub, D)
    dets = np.abs(np.linalg.det(mats))
    ok = dets > 1e-10
    if not np.any(ok):
        return VRepresentation(vertices=())
    sols = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]  # (k, D)
    feas = np.all(sols @ A.T <= b + VERTEX_TOL, axis=1)
    pts = sols[feas]

    # deterministic dedupe: lexicographic sort, then greedy distance filter
    if pts.shape[0] == 0:
        return VRepresentation(vertices=())
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    kept: list[np.ndarray] = []
    for q in pts:
        if all(np.linalg.norm(q - k) > DEDUPE_TOL for k in kept):
            kept.append(q)
    return VRepresentation(vertices=tuple(tuple(float(v) + 0.0 for v in q) for q in kept))


# ---------------------------------------------------------------------------
# sampling and 2-D drawing aids

def sample_interior(
    p: Polytope,
    witness,
    n: int,
    rng: np.random.Generator,
    min_slack: float = 0.0,
    max_tries: int = 100,
) -> np.ndarray:
    """n points inside the closed polytope via hit-and-run from `witness`.

    The chain stays strictly inside by shrinking each chord slightly. With
    min_slack > 0 only states whose normalized slack clears that margin are
    recorded (the chain keeps stepping regardless; after max_tries
    consecutive too-tight states the current one is recorded anyway so
    thin polytopes still terminate). Adequate for membership and
    classification spot checks, not uniformity-sensitive statistics.
    """
    rows = [c for c in p.constraints if not c.is_zero_row()]
    A, b, _ = constraint_arrays(rows)
    norms = np.linalg.norm(A, axis=1) if len(rows) else np.zeros(0)
    x = np.asarray(witness, dtype=np.float64).copy()
    D = p.dim
    out = np.empty((n, D))
    i = 0
    tries = 0
    while i < n:
        u = rng.normal(size=D)
        u /= np.linalg.norm(u)
        au = A @ u
        slack = b - A @ x
        t_hi = np.inf
        t_lo = -np.inf
        pos = au > 1e-12
        neg = au < -1e-12
        if np.any(pos):
            t_hi = np.min(slack[pos] / au[pos])
        if np.any(neg):
            t_lo = np.max(slack[neg] / au[neg])
        if np.isfinite(t_hi) and np.isfinite(t_lo) and t_hi > t_lo:
            t = rng.uniform(0.999 * t_lo, 0.999 * t_hi)
            x = x + t * u
        if min_slack > 0.0 and len(rows):
            ok = np.min((b - A @ x) / norms) >= min_slack
        else:
            ok = True
        tries += 1
        if ok or tries >= max_tries:
            out[i] = x
            i += 1
            tries = 0
    return out


def order_ccw(vertices) -> tuple[tuple[float, ...], ...]:
    """2-D vertices sorted counterclockwise, starting at the lexicographic minimum."""
    pts = np.asarray(vertices, dtype=np.float64)
    if pts.shape[0] <= 2:
        idx = np.lexsort(pts.T[::-1]) if pts.shape[0] else []
        return tuple(tuple(float(v) + 0.0 for v in pts[i]) for i in idx)
    if pts.shape[1] != 2:
        raise ValueError("counterclockwise ordering is only defined for 2-D vertices")
    center = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    order = np.argsort(ang, kind="stable")
    pts = pts[order]
    start = int(np.lexsort(pts.T[::-1])[0])
    pts = np.roll(pts, -start, axis=0)
    return tuple(tuple(float(v) + 0.0 for v in q) for q in pts)


def line_box_segment(a, b: float, lower, upper):
    """Clip the line a·x = b (2-D) to the box; returns (p0, p1) or None."""
    a = np.asarray(a, dtype=np.float64)
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    nrm = np.linalg.norm(a)
    if nrm <= _ZERO_ROW_TOL:
        return None
    p0 = a * (b / (nrm * nrm))
    d = np.array([-a[1], a[0]]) / nrm
    t_lo, t_hi = -np.inf, np.inf
    for i in range(2):
        if abs(d[i]) <= 1e-15:
            if p0[i] < lo[i] - 1e-9 or p0[i] > hi[i] + 1e-9:
                return None
            continue
        t1 = (lo[i] - p0[i]) / d[i]
        t2 = (hi[i] - p0[i]) / d[i]
        t_lo = max(t_lo, min(t1, t2))
        t_hi = min(t_hi, max(t1, t2))
    if not np.isfinite(t_lo) or not np.isfinite(t_hi) or t_hi <= t_lo:
        return None
    q0 = p0 + t_lo * d
    q1 = p0 + t_hi * d
    return (tuple(float(v) for v in q0), tuple(float(v) for v in q1))


def halfplane_box_polygon(a, b: float, lower, upper):
    """CCW polygon of {a·x ≤ b} ∩ box (2-D), or None when empty."""
    a = np.asarray(a, dtype=np.float64)
    lo = np.asarray(lower, dtype=np.float64)
    hi = np.asarray(upper, dtype=np.float64)
    corners = [
        (lo[0], lo[1]),
        (hi[0], lo[1]),
        (hi[0], hi[1]),
        (lo[0], hi[1]),
    ]
    # Sutherland–Hodgman clip of the box against one half-plane
    out = []
    k = len(corners)
    for i in range(k):
        p = np.asarray(corners[i])
        q = np.asarray(corners[(i + 1) % k])
        fp = b - a @ p
        fq = b - a @ q
        if fp >= 0:
            out.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    if len(out) < 3:
        return None
    dedup = []
    for q in out:
        if not dedup or np.linalg.norm(q - dedup[-1]) > 1e-12:
            dedup.append(q)
    if len(dedup) > 1 and np.linalg.norm(dedup[0] - dedup[-1]) <= 1e-12:
        dedup.pop()
    if len(dedup) < 3:
        return None
    return order_ccw([tuple(float(v) for v in q) for q in dedup])
