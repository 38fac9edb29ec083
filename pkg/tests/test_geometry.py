"""Region H-reps, effective maps, redundancy removal, vertex enumeration."""

import numpy as np
import pytest

import polywhy as pw
from polywhy import geometry as geo
from polywhy import lp
from polywhy.model import ActivationSignature

from helpers import batch_logits, clear_membership_disagreements, clip_halfplanes_2d, match_point_sets

RNG = np.random.default_rng


def sig(*flat, widths=None):
    flat = tuple(flat)
    return ActivationSignature.from_flat(flat, widths or (len(flat),))


# ---------------------------------------------------------------------------
# effective maps

def test_toy_a_output_maps():
    net = pw.toy_a()
    G = geo.output_affine_map(net, sig(1, 0))
    assert np.allclose(G.M, [[1, 0], [0, 0]])
    assert np.allclose(G.v, [0, 0])
    G = geo.output_affine_map(net, sig(1, 1))
    assert np.allclose(G.M, np.eye(2))
    assert np.allclose(G.v, 0)


def test_maps_one_entry_per_layer():
    net = pw.random_network((3, 5, 4, 2), seed=1)
    s = pw.forward(net, [0.3, -0.2, 0.9]).signature
    maps = geo.effective_preactivation_maps(net, s)
    assert len(maps) == 3
    assert maps[0].M.shape == (5, 3)
    assert maps[1].M.shape == (4, 3)
    assert maps[2].M.shape == (2, 3)
    with pytest.raises(ValueError):
        geo.effective_preactivation_maps(net, sig(1, 0))


def test_output_map_matches_forward_logits():
    # G(x) computed by masked composition equals the layer-by-layer pass
    rng = RNG(5)
    for widths, seed in [((2, 4, 2), 0), ((3, 5, 5, 3), 1), ((4, 6, 4, 2), 2)]:
        net = pw.random_network(widths, seed=seed)
        for _ in range(50):
            x = rng.uniform(-2, 2, size=widths[0])
            pred = pw.forward(net, x)
            G = geo.output_affine_map(net, pred.signature)
            assert np.allclose(G.apply(x), pred.logits, atol=1e-9, rtol=0)


def test_intermediate_maps_match_preactivations():
    net = pw.random_network((3, 4, 4, 2), seed=3)
    rng = RNG(6)
    for _ in range(20):
        x = rng.uniform(-2, 2, size=3)
        pred = pw.forward(net, x)
        maps = geo.effective_preactivation_maps(net, pred.signature)
        # recompute layer pre-activations directly
        h = x
        for li, layer in enumerate(net.layers[:-1]):
            pre = layer.weights @ h + layer.bias
            assert np.allclose(maps[li].apply(x), pre, atol=1e-9)
            h = np.maximum(pre, 0.0)


# ---------------------------------------------------------------------------
# H-representations

def test_toy_a_region_rows():
    net = pw.toy_a()
    p = geo.region_hrep(net, sig(1, 0))
    assert len(p.constraints) == 2 + 4
    c0, c1 = p.constraints[:2]
    assert c0.a == (-1.0, 0.0) and c0.b == 0.0 and c0.strict
    assert c1.a == (0.0, 1.0) and c1.b == 0.0 and not c1.strict
    p = geo.region_hrep(net, sig(0, 0))
    c0, c1 = p.constraints[:2]
    assert c0.a == (1.0, 0.0) and not c0.strict
    assert c1.a == (0.0, 1.0) and not c1.strict
    # box rows follow, upper then lower per dimension
    provs = [c.provenance for c in p.constraints[2:]]
    assert provs == [
        geo.BoxProv(0, "upper"),
        geo.BoxProv(0, "lower"),
        geo.BoxProv(1, "upper"),
        geo.BoxProv(1, "lower"),
    ]


def test_region_constraint_count():
    net = pw.random_network((3, 5, 4, 2), seed=2)
    s = pw.forward(net, [0.1, 0.2, -0.3]).signature
    p = geo.region_hrep(net, s)
    assert len(p.constraints) == 9 + 6
    assert p.feasible


def test_dominance_rows():
    net = pw.toy_a()
    rows = geo.class_dominance_constraints(net, sig(1, 0), 0)
    assert len(rows) == 1
    assert rows[0].a == (-1.0, 0.0) and rows[0].b == 0.0 and rows[0].strict
    assert rows[0].provenance == geo.OutputPairProv(winner=0, loser=1)
    rows = geo.class_dominance_constraints(net, sig(1, 1), 1)
    assert rows[0].a == (1.0, -1.0) and rows[0].b == 0.0
    with pytest.raises(ValueError):
        geo.class_dominance_constraints(net, sig(1, 1), 2)


def test_dominance_strict_at_query_point():
    net = pw.random_network((3, 5, 4), seed=7)  # 4 classes
    x = np.array([0.5, -0.4, 1.1])
    pred = pw.forward(net, x)
    rows = geo.class_dominance_constraints(net, pred.signature, pred.class_index)
    assert len(rows) == 3
    for r in rows:
        assert r.open_value(x) > 0


def test_output_polytope_order_and_count():
    net = pw.random_network((2, 4, 3), seed=4)
    pred = pw.forward(net, [0.3, 0.3])
    p = geo.output_polytope(net, pred.signature, pred.class_index)
    assert len(p.constraints) == 4 + 2 + 4
    kinds = [type(c.provenance).__name__ for c in p.constraints]
    assert kinds == ["NeuronProv"] * 4 + ["OutputPairProv"] * 2 + ["BoxProv"] * 4
    losers = [c.provenance.loser for c in p.constraints if isinstance(c.provenance, geo.OutputPairProv)]
    assert losers == sorted(losers)


def test_zero_row_marks_infeasible():
    # TOY-A region (0,0) has constant logits (0,0); class 1 can never
    # strictly beat class 0 there: dominance row is 0·x < 0.
    net = pw.toy_a()
    p = geo.output_polytope(net, sig(0, 0), 1)
    zero_rows = [c for c in p.constraints if c.is_zero_row()]
    assert len(zero_rows) == 1 and zero_rows[0].strict
    assert geo.open_interior(p, net.lower, net.upper) is None
    # ...but the closed-arithmetic flag keeps 0 <= 0
    assert p.feasible


def test_region_sampling_consistency():
    # points sampled strictly inside region_hrep(net, s) reproduce s
    rng = RNG(8)
    for widths, seed in [((2, 5, 2), 11), ((3, 4, 4, 2), 12)]:
        net = pw.random_network(widths, seed=seed)
        hits = 0
        for _ in range(5):
            x = rng.uniform(-1.5, 1.5, size=widths[0])
            s = pw.forward(net, x).signature
            p = geo.region_hrep(net, s)
            res = geo.open_interior(p, net.lower, net.upper)
            if res is None:
                continue
            pts = geo.sample_interior(p, res.witness, 200, rng, min_slack=1e-9)
            for q in pts:
                assert pw.forward(net, q).signature == s
            hits += 1
        assert hits > 0


# ---------------------------------------------------------------------------
# redundancy removal

def _plain_poly(rows, dim):
    cs = tuple(
        geo.LinearConstraint(tuple(float(v) for v in a), float(b), False, geo.BoxProv(99, "upper"))
        for a, b in rows
    )
    return geo.Polytope(dim=dim, constraints=cs)


def test_duplicate_halfplane():
    p = _plain_poly([((1.0,), 1.0), ((1.0,), 2.0)], 1)
    red = geo.remove_redundant(p, bounds=([-10.0], [10.0]))
    assert [c.b for c in red.constraints] == [1.0]


def test_implied_sum_constraint():
    p = _plain_poly([((1.0, 0.0), 1.0), ((0.0, 1.0), 1.0), ((1.0, 1.0), 5.0)], 2)
    red = geo.remove_redundant(p, bounds=([-10.0, -10.0], [10.0, 10.0]))
    assert len(red.constraints) == 2
    assert all(c.b == 1.0 for c in red.constraints)


def test_reduction_is_fixpoint():
    net = pw.random_network((2, 6, 3), seed=13)
    pred = pw.forward(net, [0.4, -0.9])
    p = geo.output_polytope(net, pred.signature, pred.class_index)
    r1, removals = geo.reduce_with_certificates(p, bounds=(net.lower, net.upper))
    r2, removals2 = geo.reduce_with_certificates(r1, bounds=(net.lower, net.upper))
    assert r2.constraints == r1.constraints
    assert removals2 == ()
    assert len(r1.constraints) + len(removals) == len(p.constraints)


def test_certificates_prove_redundancy():
    net = pw.random_network((3, 6, 2), seed=14)
    pred = pw.forward(net, [0.2, 0.2, 0.2])
    p = geo.output_polytope(net, pred.signature, pred.class_index)
    red, removals = geo.reduce_with_certificates(p, bounds=(net.lower, net.upper))
    for r in removals:
        assert r.lp_value <= r.constraint.b + 1e-9


def test_exactly_one_lp_per_row():
    net = pw.random_network((2, 5, 3), seed=15)
    pred = pw.forward(net, [0.7, -0.1])
    p = geo.output_polytope(net, pred.signature, pred.class_index)
    lp.reset_solve_calls()
    geo.remove_redundant(p, bounds=(net.lower, net.upper))
    assert lp.solve_calls() == len(p.constraints)


def test_reduction_preserves_point_set():
    # Monte-Carlo equality over random polytopes through a common ball
    rng = RNG(16)
    for _ in range(100):
        D = int(rng.integers(1, 4))
        m = int(rng.integers(3, 13))
        A = rng.normal(size=(m, D))
        x0 = rng.uniform(-0.5, 0.5, size=D)
        b = A @ x0 + rng.uniform(0.05, 1.5, size=m)
        rows = [(tuple(A[i]), float(b[i])) for i in range(m)]
        p = _plain_poly(rows, D)
        lo, hi = np.full(D, -3.0), np.full(D, 3.0)
        red = geo.remove_redundant(p, bounds=(lo, hi))
        X = rng.uniform(-3.0, 3.0, size=(10_000, D))
        box_rows = _plain_poly(
            [(tuple(row), float(v)) for row, v in zip(np.vstack([np.eye(D), -np.eye(D)]), np.concatenate([hi, -lo]))],
            D,
        ).constraints
        n_bad = clear_membership_disagreements(
            list(p.constraints) + list(box_rows), list(red.constraints) + list(box_rows), X
        )
        assert n_bad == 0


def test_contradictory_rows_all_kept():
    # x <= -1, x >= 0: each one-row relaxation is feasible with optimum above
    # the bound, so the scan keeps both; the (empty) point set is unchanged.
    p = _plain_poly([((1.0,), -1.0), ((-1.0,), 0.0)], 1)
    red = geo.remove_redundant(p, bounds=([-5.0], [5.0]))
    assert red.constraints == p.constraints


def test_flagged_infeasible_returned_as_is():
    p = _plain_poly([((1.0,), -1.0), ((-1.0,), 0.0)], 1)
    p = geo.Polytope(dim=1, constraints=p.constraints, feasible=False)
    lp.reset_solve_calls()
    red, removals = geo.reduce_with_certificates(p, bounds=([-5.0], [5.0]))
    assert red.constraints == p.constraints
    assert not red.feasible and removals == ()
    assert lp.solve_calls() == 0


def test_mid_scan_infeasibility_flags_result():
    # third row's relaxation leaves {x <= -1, x >= 0}: LP infeasible -> bail
    p = _plain_poly([((1.0,), -1.0), ((-1.0,), 0.0), ((1.0,), 5.0)], 1)
    red, removals = geo.reduce_with_certificates(p, bounds=([-5.0], [5.0]))
    assert not red.feasible
    assert red.constraints == p.constraints and removals == ()


def test_reduce_requires_bounds_without_box_rows():
    p = _plain_poly([((1.0,), 1.0)], 1)
    p = geo.Polytope(dim=1, constraints=(geo.LinearConstraint((1.0,), 1.0, False, geo.NeuronProv(0, 0, "inactive")),))
    with pytest.raises(ValueError):
        geo.remove_redundant(p)


# ---------------------------------------------------------------------------
# vertex enumeration

def _unit_box(D):
    rows = []
    for i in range(D):
        e = [0.0] * D
        e[i] = 1.0
        rows.append((tuple(e), 1.0))
        rows.append((tuple(-v for v in e), 0.0))
    return _plain_poly(rows, D)


def test_unit_box_vertex_counts():
    for D in (1, 2, 3, 4):
        v = geo.enumerate_vertices(_unit_box(D))
        assert len(v.vertices) == 2**D
        arr = v.as_array()
        assert np.all((np.abs(arr) < 1e-9) | (np.abs(arr - 1) < 1e-9))


def test_toy_a_output_vertices():
    net = pw.toy_a()
    p = geo.output_polytope(net, sig(1, 0), 0)
    v = geo.enumerate_vertices(p)
    expect = [(0.0, 0.0), (2.0, 0.0), (0.0, -2.0), (2.0, -2.0)]
    assert match_point_sets(v.vertices, expect, 1e-9)


def test_vertex_dim_cap():
    with pytest.raises(ValueError):
        geo.enumerate_vertices(_unit_box(7))
    v = geo.enumerate_vertices(_unit_box(7), dim_cap=7)
    assert len(v.vertices) == 128


def test_vertex_validity_invariant():
    rng = RNG(17)
    for _ in range(30):
        m = int(rng.integers(3, 8))
        A = rng.normal(size=(m, 2))
        x0 = rng.uniform(-0.5, 0.5, size=2)
        b = A @ x0 + rng.uniform(0.2, 1.5, size=m)
        rows = [(tuple(A[i]), float(b[i])) for i in range(m)] + [
            ((1.0, 0.0), 2.0),
            ((-1.0, 0.0), 2.0),
            ((0.0, 1.0), 2.0),
            ((0.0, -1.0), 2.0),
        ]
        p = _plain_poly(rows, 2)
        A_all = np.asarray([c.a for c in p.constraints])
        b_all = np.asarray([c.b for c in p.constraints])
        for q in geo.enumerate_vertices(p).vertices:
            q = np.asarray(q)
            resid = A_all @ q - b_all
            assert np.all(resid <= 1e-7)
            assert np.sum(np.abs(resid) <= 1e-6) >= 2  # at least dim tight rows


def test_random_2d_vertices_match_clipping_oracle():
    rng = RNG(18)
    for _ in range(50):
        m = int(rng.integers(2, 9))
        A = rng.normal(size=(m, 2))
        x0 = rng.uniform(-0.8, 0.8, size=2)
        b = A @ x0 + rng.uniform(0.1, 1.2, size=m)
        lo, hi = np.full(2, -2.0), np.full(2, 2.0)
        rows = [(tuple(A[i]), float(b[i])) for i in range(m)] + [
            ((1.0, 0.0), 2.0),
            ((-1.0, 0.0), 2.0),
            ((0.0, 1.0), 2.0),
            ((0.0, -1.0), 2.0),
        ]
        p = _plain_poly(rows, 2)
        mine = geo.enumerate_vertices(p).vertices
        ref = clip_halfplanes_2d([(A[i], b[i]) for i in range(m)], lo, hi)
        assert match_point_sets(mine, ref, 1e-6)


# ---------------------------------------------------------------------------
# drawing helpers

def test_order_ccw():
    pts = [(1.0, 1.0), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    ring = geo.order_ccw(pts)
    assert ring[0] == (0.0, 0.0)
    x, y = np.asarray(ring).T
    area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert area2 > 0  # counterclockwise


def test_line_box_segment():
    seg = geo.line_box_segment((0.0, 1.0), 0.0, (-2.0, -2.0), (2.0, 2.0))
    assert seg is not None
    (x0, y0), (x1, y1) = seg
    assert abs(y0) < 1e-9 and abs(y1) < 1e-9
    assert {round(x0), round(x1)} == {-2, 2}
    assert geo.line_box_segment((1.0, 0.0), 5.0, (-2.0, -2.0), (2.0, 2.0)) is None
    assert geo.line_box_segment((0.0, 0.0), 1.0, (-2.0, -2.0), (2.0, 2.0)) is None


def test_halfplane_box_polygon():
    poly = geo.halfplane_box_polygon((1.0, 0.0), 0.0, (-2.0, -2.0), (2.0, 2.0))
    assert poly is not None
    arr = np.asarray(poly)
    assert np.all(arr[:, 0] <= 1e-12)
    assert geo.halfplane_box_polygon((1.0, 0.0), -5.0, (-2.0, -2.0), (2.0, 2.0)) is None
    full = geo.halfplane_box_polygon((1.0, 0.0), 10.0, (-2.0, -2.0), (2.0, 2.0))
    assert len(full) == 4


def test_sample_interior_stays_inside():
    net = pw.toy_a()
    p = geo.region_hrep(net, sig(1, 1))
    res = geo.open_interior(p, net.lower, net.upper)
    pts = geo.sample_interior(p, res.witness, 500, RNG(19), min_slack=1e-9)
    assert np.all(geo.contains(p, pts))
    assert np.all(pts > 0) and np.all(pts < 2)
    # min_slack keeps samples off the walls
    A, b, _ = geo.constraint_arrays(p.constraints)
    norms = np.linalg.norm(A, axis=1)
    slacks = (b - pts @ A.T) / norms
    assert slacks.min() >= 1e-9
