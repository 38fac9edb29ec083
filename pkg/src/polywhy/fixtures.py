"""Canonical fixture networks shared by tests, docs, and the CLI generator."""

from __future__ import annotations

import numpy as np

from .model import Network

__all__ = ["toy_a", "random_network"]


def toy_a() -> Network:
    """2-2-2 identity network on [-2, 2]²; its regions are the quadrants.

    Hidden pre-activations are (x1, x2), so the signature is the sign
    pattern of the input, logits are (relu(x1), relu(x2)), and class 0 wins
    everywhere except the upper-left wedge x2 > x1 > 0 ∪ (x1 ≤ 0 < x2).
    """
    eye = np.eye(2)
    zero = np.zeros(2)
    return Network(
        layers=[(eye, zero), (eye, zero)],
        output_activation="identity",
        input_bounds=[[-2.0, 2.0], [-2.0, 2.0]],
    )


def random_network(widths, seed: int, bounds=(-2.0, 2.0)) -> Network:
    """Seeded Gaussian network: widths = (input, hidden..., classes).

    Weights ~ N(0, 2/fan_in) (He-style so regions stay balanced), biases
    ~ N(0, 0.3²). Same (widths, seed) always builds the same network.
    """
    widths = [int(w) for w in widths]
    if len(widths) < 3:
        raise ValueError("need at least (input, one hidden, output) widths")
    if any(w < 1 for w in widths):
        raise ValueError("every layer width must be >= 1")
    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        W = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        b = rng.normal(0.0, 0.3, size=fan_out)
        layers.append((W, b))
    lo, hi = float(bounds[0]), float(bounds[1])
    return Network(
        layers=layers,
        output_activation="identity",
        input_bounds=[[lo, hi]] * widths[0],
    )
