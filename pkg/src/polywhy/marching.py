"""Hamming-distance search over activation signatures.

Neighboring linear regions differ in a handful of signature bits, so the
nearest region where a counterfactual class can win is found by scanning
signatures in rings of growing Hamming distance from the origin and
checking each candidate region for an open-feasible counterfactual subset.

Flipping a bit in an early layer moves the hyperplanes of every later
layer, so each candidate's H-representation is rebuilt from scratch from
its own signature — candidate regions are never assembled from the
origin's hyperplanes.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .model import ActivationSignature, Network

__all__ = [
    "DEFAULT_BUDGET",
    "MarchFrontier",
    "MarchResult",
    "Exhausted",
    "neighbors_at_distance",
    "march_to_counterfactual",
]

DEFAULT_BUDGET = 10**6


@dataclass
class MarchFrontier:
    """Search state: origin signature, current ring, visit set, budgets."""

    origin: ActivationSignature
    current_distance: int = 1
    visited: set = field(default_factory=set)
    max_signatures: int = DEFAULT_BUDGET
    max_distance: int | None = None  # None → total bit count
    examined: int = 0

    def __post_init__(self):
        self.visited.add(self.origin)
        if self.max_distance is None:
            self.max_distance = self.origin.n
        if self.current_distance < 1:
            raise ValueError("current_distance starts at 1")


def neighbors_at_distance(s: ActivationSignature, d: int):
    """All C(n, d) signatures at Hamming distance exactly d from s.

    Ordered by lexicographic flipped-index sets, which fixes the
    deterministic tie-break for the whole search.
    """
    n = s.n
    if not 1 <= d <= n:
        raise ValueError(f"distance {d} out of range 1..{n}")
    return [s.flip(pos) for pos in itertools.combinations(range(n), d)]


@dataclass(frozen=True, eq=False)
class MarchResult:
    signature: ActivationSignature
    region: geometry.Polytope
    witness: np.ndarray
    distance: int
    examined: int


@dataclass(frozen=True)
class Exhausted:
    examined: int


def _candidate_witness(net: Network, sig: ActivationSignature, c_prime: int):
    """Interior witness of region(sig) ∩ {class c' wins}, or None.

    The combined system being open-feasible implies the region itself is
    (it has a superset of the rows), so one margin LP answers both checks.
    """
    poly = geometry.output_polytope(net, sig, c_prime)
    if not poly.feasible:
        return None
    res = geometry.open_interior(poly, net.lower, net.upper)
    if res is None:
        return None
    return res.witness


def march_to_counterfactual(
    net: Network,
    s0: ActivationSignature,
    c_prime: int,
    frontier: MarchFrontier | None = None,
    parallel: bool = False,
):
    """Nearest signature (by Hamming distance) whose region lets c' win.

    Scans distance rings 1, 2, … outward from s0; within a ring candidates
    go in lexicographic flipped-index order and the first open-feasible one
    wins. Returns MarchResult or Exhausted (budget, distance cap, or the
    whole signature space used up). The parallel path evaluates a ring
    concurrently but reduces in candidate order, so both paths return the
    identical signature.
    """
    if not 0 <= c_prime < net.num_classes:
        raise ValueError(f"class index {c_prime} out of range for {net.num_classes} classes")
    if frontier is None:
        frontier = MarchFrontier(origin=s0)
    n = s0.n
    max_d = min(frontier.max_distance or n, n)

    for d in range(frontier.current_distance, max_d + 1):
        frontier.current_distance = d
        ring = neighbors_at_distance(s0, d)
        remaining = frontier.max_signatures - frontier.examined
        if remaining <= 0:
            return Exhausted(examined=frontier.examined)
        capped = ring[:remaining]

        if parallel and len(capped) > 1:
            with ThreadPoolExecutor(max_workers=8) as pool:
                results = list(pool.map(lambda s: _candidate_witness(net, s, c_prime), capped))
            hit = None
            for i, witness in enumerate(results):
                frontier.visited.add(capped[i])
                if witness is not None:
                    hit = (i, capped[i], witness)
                    break
            if hit is not None:
                i, sig, witness = hit
                frontier.examined += i + 1
                return MarchResult(
                    signature=sig,
                    region=geometry.region_hrep(net, sig),
                    witness=witness,
                    distance=d,
                    examined=frontier.examined,
                )
            frontier.examined += len(capped)
        else:
            for sig in capped:
                frontier.visited.add(sig)
                frontier.examined += 1
                witness = _candidate_witness(net, sig, c_prime)
                if witness is not None:
                    return MarchResult(
                        signature=sig,
                        region=geometry.region_hrep(net, sig),
                        witness=witness,
                        distance=d,
                        examined=frontier.examined,
                    )
        if len(capped) < len(ring):
            return Exhausted(examined=frontier.examined)
    return Exhausted(examined=frontier.examined)
