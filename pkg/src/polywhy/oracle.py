"""Exhaustive reference implementations (testing / inspection only).

`full_decompose` walks all 2^n activation signatures and records which are
realizable inside the input box; `oracle_why_not` finds the true minimal
counterfactual distance by scanning that decomposition. Both are hard-capped
at 16 hidden neurons — a truncated oracle would be worthless, so the cap is
an error, not a warning. Production paths never import this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import geometry
from .model import ActivationSignature, Network, forward

__all__ = [
    "ORACLE_NEURON_CAP",
    "RegionRecord",
    "Decomposition",
    "OracleWhyNot",
    "Unreachable",
    "full_decompose",
    "counterfactual_feasible_signatures",
    "oracle_why_not",
    "decomposition_to_dict",
]

ORACLE_NEURON_CAP = 16


@dataclass(frozen=True, eq=False)
class RegionRecord:
    signature: ActivationSignature
    polytope: geometry.Polytope
    open_feasible: bool
    witness: np.ndarray | None


@dataclass(frozen=True, eq=False)
class Decomposition:
    regions: tuple[RegionRecord, ...]  # ordered by signature value
    examined: int  # == 2^n

    @property
    def feasible_regions(self) -> tuple[RegionRecord, ...]:
        return tuple(r for r in self.regions if r.open_feasible)


@dataclass(frozen=True)
class OracleWhyNot:
    min_distance: int
    signatures: tuple[ActivationSignature, ...]


@dataclass(frozen=True)
class Unreachable:
    examined: int


def _check_cap(net: Network) -> int:
    n = net.total_hidden_neurons
    if n > ORACLE_NEURON_CAP:
        raise ValueError(
            f"{n} hidden neurons exceed the oracle cap of {ORACLE_NEURON_CAP} (2^n regions)"
        )
    return n


def full_decompose(net: Network) -> Decomposition:
    """Every signature, with open-feasibility verdict and witness inside the box."""
    n = _check_cap(net)
    widths = net.hidden_widths
    records = []
    for bits in itertools.product((0, 1), repeat=n):
        sig = ActivationSignature.from_flat(bits, widths)
        poly = geometry.region_hrep(net, sig)
        if not poly.feasible:
            records.append(RegionRecord(sig, poly, False, None))
            continue
        res = geometry.open_interior(poly, net.lower, net.upper)
        if res is None:
            records.append(RegionRecord(sig, poly, False, None))
        else:
            records.append(RegionRecord(sig, poly, True, res.witness))
    return Decomposition(regions=tuple(records), examined=2**n)


def counterfactual_feasible_signatures(
    net: Network, decomp: Decomposition, c_prime: int
) -> tuple[ActivationSignature, ...]:
    """Signatures of feasible regions where class c_prime can strictly win.

    Separate from full_decompose so one decomposition can serve many
    queries against the same counterfactual class.
    """
    if not 0 <= c_prime < net.num_classes:
        raise ValueError(f"class index {c_prime} out of range")
    hits = []
    for rec in decomp.regions:
        if not rec.open_feasible:
            continue
        poly = geometry.output_polytope(net, rec.signature, c_prime)
        if not poly.feasible:
            continue
        if geometry.open_interior(poly, net.lower, net.upper) is not None:
            hits.append(rec.signature)
    return tuple(hits)


def oracle_why_not(
    net: Network,
    x,
    c_prime: int,
    decomp: Decomposition | None = None,
    feasible_signatures=None,
):
    """True minimal Hamming distance to a region where c_prime wins.

    Returns OracleWhyNot(min_distance, all minimizing signatures) or
    Unreachable. Pass a precomputed decomposition and/or the per-class
    feasible signature list to amortize repeated queries.
    """
    if decomp is None:
        decomp = full_decompose(net)
    if feasible_signatures is None:
        feasible_signatures = counterfactual_feasible_signatures(net, decomp, c_prime)
    s0 = forward(net, x).signature
    if not feasible_signatures:
        return Unreachable(examined=decomp.examined)
    by_dist: dict[int, list[ActivationSignature]] = {}
    for sig in feasible_signatures:
        by_dist.setdefault(s0.hamming(sig), []).append(sig)
    dmin = min(by_dist)
    minimizers = tuple(sorted(by_dist[dmin], key=lambda s: s.flat))
    return OracleWhyNot(min_distance=dmin, signatures=minimizers)


def decomposition_to_dict(decomp: Decomposition) -> dict:
    """JSON-ready dump for the CLI `decompose` command."""
    return {
        "examined": decomp.examined,
        "feasible_count": len(decomp.feasible_regions),
        "regions": [
            {
                "signature": list(r.signature.flat),
                "open_feasible": r.open_feasible,
                "witness": None if r.witness is None else [float(v) for v in r.witness],
            }
            for r in decomp.regions
        ],
    }
