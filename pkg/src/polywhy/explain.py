"""Why and why-not explanations for a prediction.

`explain_why` answers "why did class c win at x": it reduces the H-representation
of {region of x} ∩ {c beats every other class} to its irreducible core — the
minimal set of linear inequalities that exactly delimits the set of inputs
decided like x.

`explain_why_not` answers "why not class c' instead": either c' can already
win inside the current activation region, and the answer is the single
dominance inequality that ruled it out at x (SameRegion); or the nearest
region (by Hamming distance over activation signatures) where c' wins is
located, and the answer is the list of activation constraints separating
here from there (DifferentRegion); or no region in the whole input box lets
c' win (ClassUnreachable).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, marching
from .geometry import BoxProv, LinearConstraint, NeuronProv, OutputPairProv, VRepresentation
from .model import ActivationSignature, Network, forward

__all__ = [
    "WhyExplanation",
    "SameRegion",
    "DifferentRegion",
    "ClassUnreachable",
    "explain_why",
    "explain_why_not",
    "render",
    "constraint_text",
    "explanation_to_dict",
]


# ---------------------------------------------------------------------------
# explanation types

@dataclass(frozen=True, eq=False)
class WhyExplanation:
    input: tuple[float, ...]
    class_index: int
    class_name: str
    minimal_constraints: tuple[LinearConstraint, ...]  # H', no box rows
    removed_count: int
    signature: ActivationSignature
    boundary: bool
    vrep: tuple[VRepresentation, VRepresentation] | None = None  # (region P, P_Output)
    removals: tuple[geometry.Removal, ...] = ()


@dataclass(frozen=True, eq=False)
class SameRegion:
    """c' can win without leaving the activation region; at x it lost only
    to the delta inequality below (which holds strictly at x)."""

    delta_constraint: LinearConstraint
    input: tuple[float, ...]
    factual_class: int
    factual_name: str
    counterfactual_class: int
    counterfactual_name: str
    signature: ActivationSignature
    counterfactual_witness: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class DifferentRegion:
    """The nearest region where c' wins differs in `distance` activation
    bits; each flipped bit is reported with both the origin-side and the
    target-side inequality, since later-layer hyperplanes move when earlier
    bits flip."""

    distance: int
    differing_constraints: tuple[tuple[LinearConstraint, LinearConstraint], ...]
    witness: tuple[float, ...]
    target_signature: ActivationSignature
    origin_signature: ActivationSignature
    input: tuple[float, ...]
    factual_class: int
    factual_name: str
    counterfactual_class: int
    counterfactual_name: str
    examined: int


@dataclass(frozen=True, eq=False)
class ClassUnreachable:
    """No activation region inside the input box lets c' win."""

    examined: int
    input: tuple[float, ...]
    factual_class: int
    factual_name: str
    counterfactual_class: int
    counterfactual_name: str


# ---------------------------------------------------------------------------
# Algorithm: why

def explain_why(net: Network, x, want_vrep: bool = False) -> WhyExplanation:
    """Minimal complete explanation of the decision at x.

    Builds the output polytope of x's activation region and the winning
    class, removes every LP-certified redundant row, and reports the
    surviving non-box rows. LP cost is exactly one solve per row of the
    un-reduced polytope.
    """
    x = np.asarray(x, dtype=np.float64)
    pred = forward(net, x)
    c = pred.class_index
    p_out = geometry.output_polytope(net, pred.signature, c)
    reduced, removals = geometry.reduce_with_certificates(p_out, bounds=(net.lower, net.upper))
    minimal = tuple(c_ for c_ in reduced.constraints if not isinstance(c_.provenance, BoxProv))

    vrep = None
    if want_vrep:
        region = geometry.region_hrep(net, pred.signature)
        vrep = (geometry.enumerate_vertices(region), geometry.enumerate_vertices(reduced))

    return WhyExplanation(
        input=tuple(float(v) for v in x),
        class_index=c,
        class_name=net.class_name(c),
        minimal_constraints=minimal,
        removed_count=len(removals),
        signature=pred.signature,
        boundary=pred.boundary,
        vrep=vrep,
        removals=removals,
    )


# ---------------------------------------------------------------------------
# Algorithm: why not

def explain_why_not(
    net: Network,
    x,
    c_prime: int,
    max_distance: int | None = None,
    budget: int = marching.DEFAULT_BUDGET,
    parallel: bool = False,
):
    """Explain why c' lost at x (see module docstring for the three cases)."""
    x = np.asarray(x, dtype=np.float64)
    if not 0 <= c_prime < net.num_classes:
        raise ValueError(f"class index {c_prime} out of range for {net.num_classes} classes")
    pred = forward(net, x)
    c = pred.class_index
    if c_prime == c:
        raise ValueError(f"class {c_prime} is the factual prediction at this input; nothing to contrast")
    s = pred.signature
    common = dict(
        input=tuple(float(v) for v in x),
        factual_class=c,
        factual_name=net.class_name(c),
        counterfactual_class=c_prime,
        counterfactual_name=net.class_name(c_prime),
    )

    # Can c' win somewhere inside the current region?
    p_cf = geometry.output_polytope(net, s, c_prime)
    witness = None
    if p_cf.feasible:
        res = geometry.open_interior(p_cf, net.lower, net.upper)
        if res is not None:
            witness = res.witness
    if witness is not None:
        delta = next(
            row
            for row in geometry.class_dominance_constraints(net, s, c)
            if isinstance(row.provenance, OutputPairProv) and row.provenance.loser == c_prime
        )
        return SameRegion(
            delta_constraint=delta,
            signature=s,
            counterfactual_witness=tuple(float(v) for v in witness),
            **common,
        )

    frontier = marching.MarchFrontier(origin=s, max_signatures=budget, max_distance=max_distance)
    result = marching.march_to_counterfactual(net, s, c_prime, frontier=frontier, parallel=parallel)
    if isinstance(result, marching.Exhausted):
        return ClassUnreachable(examined=result.examined, **common)

    origin_region = geometry.region_hrep(net, s)
    flipped = [i for i, (a, b) in enumerate(zip(s.flat, result.signature.flat)) if a != b]
    # neuron rows occupy the first n slots of a region H-rep, in flat order
    pairs = tuple(
        (origin_region.constraints[i], result.region.constraints[i]) for i in flipped
    )
    return DifferentRegion(
        distance=result.distance,
        differing_constraints=pairs,
        witness=tuple(float(v) for v in result.witness),
        target_signature=result.signature,
        origin_signature=s,
        examined=result.examined,
        **common,
    )


# ---------------------------------------------------------------------------
# rendering

def _fmt(v: float) -> str:
    s = f"{float(v):.6g}"
    return "0" if s == "-0" else s


def _linear_expr(a) -> str:
    terms = []
    for i, coef in enumerate(a):
        if coef == 0.0:
            continue
        mag = abs(coef)
        body = f"x{i + 1}" if mag == 1.0 else f"{_fmt(mag)}·x{i + 1}"
        if not terms:
            terms.append(f"-{body}" if coef < 0 else body)
        else:
            terms.append(f"- {body}" if coef < 0 else f"+ {body}")
    return " ".join(terms) if terms else "0"


def _provenance_text(prov) -> str:
    if isinstance(prov, NeuronProv):
        return f"hidden layer {prov.layer + 1}, neuron {prov.index + 1} {prov.orientation}"
    if isinstance(prov, OutputPairProv):
        return f"output: class {prov.winner} beats class {prov.loser}"
    return f"input bound, x{prov.dim + 1} {prov.side}"


def constraint_text(c: LinearConstraint) -> str:
    """Human form of one row; strict rows are shown in their open > form."""
    if c.strict:
        neg = tuple(-v for v in c.a)
        return f"{_linear_expr(neg)} > {_fmt(-c.b)}"
    return f"{_linear_expr(c.a)} ≤ {_fmt(c.b)}"


def _hrep_line(c: LinearConstraint) -> str:
    op = "<" if c.strict else "≤"
    return f"{_linear_expr(c.a)} {op} {_fmt(c.b)}   [{_provenance_text(c.provenance)}]"


def _vrep_block(tag: str, v: VRepresentation) -> list[str]:
    lines = [f"{tag}: {len(v.vertices)} vertices"]
    if v.vertices:
        arr = v.as_array()
        for d in range(arr.shape[1]):
            lines.append(f"  x{d + 1} ∈ [{_fmt(arr[:, d].min())}, {_fmt(arr[:, d].max())}]")
        for q in v.vertices:
            lines.append("  (" + ", ".join(_fmt(t) for t in q) + ")")
    return lines


def _point_text(x) -> str:
    return "(" + ", ".join(_fmt(v) for v in x) + ")"


def render(e, style: str = "text") -> str:
    """Render any explanation as text; styles: hrep | vrep | text."""
    if style not in ("hrep", "vrep", "text"):
        raise ValueError(f"unknown render style {style!r}")

    if isinstance(e, WhyExplanation):
        head = (
            f"input {_point_text(e.input)} → class {e.class_index} ({e.class_name}), "
            f"signature {e.signature}"
        )
        if e.boundary:
            head += " [boundary point]"
        if style == "hrep":
            lines = [head, f"minimal H-representation ({len(e.minimal_constraints)} rows, {e.removed_count} removed):"]
            lines += [_hrep_line(c) for c in e.minimal_constraints]
            return "\n".join(lines)
        if style == "vrep":
            if e.vrep is None:
                raise ValueError("explanation carries no V-representation; re-run with vrep enabled")
            lines = [head]
            lines += _vrep_block("activation region", e.vrep[0])
            lines += _vrep_block("decision region", e.vrep[1])
            return "\n".join(lines)
        lines = [head, f"class {e.class_index} ({e.class_name}) wins here:"]
        lines += [
            f"  because {constraint_text(c)} ({_provenance_text(c.provenance)})"
            for c in e.minimal_constraints
        ]
        return "\n".join(lines)

    if isinstance(e, SameRegion):
        sentence = (
            f"Output {e.factual_name} was chosen over {e.counterfactual_name} because "
            f"{constraint_text(e.delta_constraint)} at the input; {e.counterfactual_name} can win "
            f"inside this same activation region (e.g. at {_point_text(e.counterfactual_witness)})."
        )
        if style == "hrep":
            return "\n".join(
                [
                    f"same region (signature {e.signature}); deciding constraint:",
                    _hrep_line(e.delta_constraint),
                    f"counterfactual witness: {_point_text(e.counterfactual_witness)}",
                ]
            )
        if style == "vrep":
            raise ValueError("V-representation applies to why-explanations only")
        return sentence

    if isinstance(e, DifferentRegion):
        if style == "vrep":
            raise ValueError("V-representation applies to why-explanations only")
        head = (
            f"{e.counterfactual_name} first wins {e.distance} activation flip(s) away "
            f"(signature {e.origin_signature} → {e.target_signature}), e.g. at {_point_text(e.witness)}"
        )
        if style == "hrep":
            lines = [head]
            for o, t in e.differing_constraints:
                lines.append(f"origin: {_hrep_line(o)}")
                lines.append(f"target: {_hrep_line(t)}")
            return "\n".join(lines)
        lines = [head]
        for o, t in e.differing_constraints:
            lines.append(
                f"  flip {_provenance_text(o.provenance)}: here {constraint_text(o)}, "
                f"there {constraint_text(t)}"
            )
        return "\n".join(lines)

    if isinstance(e, ClassUnreachable):
        msg = (
            f"{e.counterfactual_name} cannot win anywhere inside the input bounds: "
            f"{e.examined} candidate signature(s) examined, none admits it."
        )
        if style == "vrep":
            raise ValueError("V-representation applies to why-explanations only")
        return msg

    raise TypeError(f"cannot render {type(e).__name__}")


# ---------------------------------------------------------------------------
# serialization

def _prov_to_dict(prov) -> dict:
    if isinstance(prov, NeuronProv):
        return {"kind": "neuron", "layer": prov.layer, "index": prov.index, "orientation": prov.orientation}
    if isinstance(prov, OutputPairProv):
        return {"kind": "output_pair", "winner": prov.winner, "loser": prov.loser}
    return {"kind": "box", "dim": prov.dim, "side": prov.side}


def _constraint_to_dict(c: LinearConstraint) -> dict:
    return {
        "a": [float(v) for v in c.a],
        "b": float(c.b),
        "strict": c.strict,
        "provenance": _prov_to_dict(c.provenance),
        "text": constraint_text(c),
    }


def _vrep_to_list(v: VRepresentation) -> list:
    return [[float(t) for t in q] for q in v.vertices]


def explanation_to_dict(e) -> dict:
    """JSON-ready form of any explanation; mirrors the dataclass fields and
    adds rendered text per constraint and for the whole explanation."""
    if isinstance(e, WhyExplanation):
        doc = {
            "kind": "why",
            "input": list(e.input),
            "class_index": e.class_index,
            "class_name": e.class_name,
            "signature": list(e.signature.flat),
            "boundary": e.boundary,
            "minimal_constraints": [_constraint_to_dict(c) for c in e.minimal_constraints],
            "removed_count": e.removed_count,
            "text": render(e, "text"),
        }
        if e.vrep is not None:
            doc["vrep"] = {"region": _vrep_to_list(e.vrep[0]), "output": _vrep_to_list(e.vrep[1])}
        return doc
    if isinstance(e, SameRegion):
        return {
            "kind": "same_region",
            "input": list(e.input),
            "factual_class": e.factual_class,
            "factual_name": e.factual_name,
            "counterfactual_class": e.counterfactual_class,
            "counterfactual_name": e.counterfactual_name,
            "signature": list(e.signature.flat),
            "delta_constraint": _constraint_to_dict(e.delta_constraint),
            "counterfactual_witness": list(e.counterfactual_witness),
            "text": render(e, "text"),
        }
    if isinstance(e, DifferentRegion):
        return {
            "kind": "different_region",
            "input": list(e.input),
            "factual_class": e.factual_class,
            "factual_name": e.factual_name,
            "counterfactual_class": e.counterfactual_class,
            "counterfactual_name": e.counterfactual_name,
            "distance": e.distance,
            "origin_signature": list(e.origin_signature.flat),
            "target_signature": list(e.target_signature.flat),
            "witness": list(e.witness),
            "differing_constraints": [
                {"origin": _constraint_to_dict(o), "target": _constraint_to_dict(t)}
                for o, t in e.differing_constraints
            ],
            "examined": e.examined,
            "text": render(e, "text"),
        }
    if isinstance(e, ClassUnreachable):
        return {
            "kind": "class_unreachable",
            "input": list(e.input),
            "factual_class": e.factual_class,
            "factual_name": e.factual_name,
            "counterfactual_class": e.counterfactual_class,
            "counterfactual_name": e.counterfactual_name,
            "examined": e.examined,
            "text": render(e, "text"),
        }
    raise TypeError(f"cannot serialize {type(e).__name__}")
