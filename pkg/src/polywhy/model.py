"""Feed-forward ReLU networks: loading, validation, evaluation, signatures.

A network here is a stack of dense layers where every hidden layer is
followed by ReLU and the final layer is read through an argmax-preserving
output activation (identity or softmax). Decisions are always compared on
the pre-activation logits, never on softmax values.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "ModelError",
    "FormatError",
    "ShapeError",
    "DomainError",
    "Layer",
    "Network",
    "ActivationSignature",
    "Prediction",
    "load_network",
    "network_from_dict",
    "network_to_dict",
    "forward",
    "argmax_class",
    "softmax",
]

OUTPUT_ACTIVATIONS = ("identity", "softmax")


class ModelError(Exception):
    """Base class for model loading and validation failures."""


class FormatError(ModelError):
    """File is not a valid model document (syntax, missing keys, bad tag)."""


class ShapeError(ModelError):
    """Layer shapes do not chain, or a vector has the wrong arity."""


class DomainError(ModelError):
    """Input bounds are malformed or degenerate (lo >= hi)."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Layer:
    """One dense layer: x -> weights @ x + bias."""

    weights: np.ndarray  # (n_out, n_in)
    bias: np.ndarray  # (n_out,)

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]


class Network:
    """Immutable ReLU network plus the box of inputs it is explained on.

    All hidden layers use ReLU. The output activation only relabels the
    logits monotonically, so argmax decisions are taken on the logits.
    """

    def __init__(self, layers, output_activation, input_bounds, class_names=None):
        layers = tuple(
            Layer(_frozen(l.weights), _frozen(l.bias)) if isinstance(l, Layer) else Layer(_frozen(l[0]), _frozen(l[1]))
            for l in layers
        )
        if len(layers) < 2:
            raise ShapeError("network needs at least one hidden layer and an output layer")
        for layer in layers:
            if layer.weights.ndim != 2 or layer.bias.ndim != 1:
                raise ShapeError("layer weights must be a matrix and bias a vector")
            if layer.weights.shape[0] != layer.bias.shape[0]:
                raise ShapeError(
                    f"bias length {layer.bias.shape[0]} does not match weight rows {layer.weights.shape[0]}"
                )
        for k in range(1, len(layers)):
            if layers[k].n_in != layers[k - 1].n_out:
                raise ShapeError(
                    f"layer {k + 1} expects {layers[k].n_in} inputs but layer {k} emits {layers[k - 1].n_out}"
                )
        if output_activation not in OUTPUT_ACTIVATIONS:
            raise FormatError(f"unsupported output_activation {output_activation!r}")

        bounds = np.asarray(input_bounds, dtype=np.float64)
        if bounds.ndim != 2 or bounds.shape[1] != 2:
            raise DomainError("input_bounds must be a list of [lo, hi] pairs")
        if bounds.shape[0] != layers[0].n_in:
            raise ShapeError(
                f"input_bounds has {bounds.shape[0]} dimensions but the first layer expects {layers[0].n_in}"
            )
        if not np.all(bounds[:, 0] < bounds[:, 1]):
            raise DomainError("every input bound must satisfy lo < hi")

        self.layers = layers
        self.output_activation = output_activation
        self.lower = _frozen(bounds[:, 0])
        self.upper = _frozen(bounds[:, 1])
        if class_names is not None:
            class_names = tuple(str(c) for c in class_names)
            if len(class_names) != layers[-1].n_out:
                raise ShapeError(
                    f"{len(class_names)} class names for {layers[-1].n_out} output classes"
                )
        self.class_names = class_names

    @property
    def input_dim(self) -> int:
        return self.layers[0].n_in

    @property
    def hidden_layers(self) -> tuple[Layer, ...]:
        return self.layers[:-1]

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(l.n_out for l in self.layers[:-1])

    @property
    def total_hidden_neurons(self) -> int:
        return sum(self.hidden_widths)

    @property
    def num_classes(self) -> int:
        return self.layers[-1].n_out

    @property
    def input_bounds(self) -> tuple[tuple[float, float], ...]:
        return tuple((float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper))

    def class_name(self, index: int) -> str:
        if self.class_names is not None:
            return self.class_names[index]
        return f"class_{index}"

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def __repr__(self) -> str:
        widths = [self.input_dim, *self.hidden_widths, self.num_classes]
        return f"Network({'-'.join(map(str, widths))}, {self.output_activation})"


@dataclass(frozen=True)
class ActivationSignature:
    """Per-layer ReLU on/off pattern; identifies one linear region.

    `bits` holds one tuple per hidden layer; bit 1 means the neuron's
    pre-activation was strictly positive.
    """

    bits: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for layer_bits in self.bits:
            for b in layer_bits:
                if b not in (0, 1):
                    raise ValueError(f"signature bits must be 0 or 1, got {b!r}")

    @cached_property
    def flat(self) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(self.bits))

    @property
    def n(self) -> int:
        return sum(len(layer_bits) for layer_bits in self.bits)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(len(layer_bits) for layer_bits in self.bits)

    @classmethod
    def from_flat(cls, flat, widths) -> "ActivationSignature":
        flat = tuple(int(b) for b in flat)
        if len(flat) != sum(widths):
            raise ValueError(f"{len(flat)} bits for layer widths {tuple(widths)}")
        bits = []
        pos = 0
        for w in widths:
            bits.append(flat[pos : pos + w])
            pos += w
        return cls(tuple(bits))

    def flip(self, positions) -> "ActivationSignature":
        """New signature with the given flat bit positions inverted."""
        flat = list(self.flat)
        for p in positions:
            flat[p] = 1 - flat[p]
        return ActivationSignature.from_flat(flat, self.widths)

    def hamming(self, other: "ActivationSignature") -> int:
        if self.widths != other.widths:
            raise ValueError("signatures come from different network shapes")
        return sum(a != b for a, b in zip(self.flat, other.flat))

    def position(self, flat_index: int) -> tuple[int, int]:
        """Map a flat bit index to (hidden layer index, neuron index)."""
        pos = flat_index
        for li, w in enumerate(self.widths):
            if pos < w:
                return li, pos
            pos -= w
        raise IndexError(flat_index)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.flat)


@dataclass(frozen=True, eq=False)
class Prediction:
    logits: np.ndarray
    class_index: int
    signature: ActivationSignature
    boundary: bool  # some hidden pre-activation was exactly zero


def argmax_class(logits) -> int:
    """Index of the largest logit; ties break to the lowest index."""
    logits = np.asarray(logits, dtype=np.float64)
    if logits.size == 0:
        raise ValueError("argmax of an empty logits vector")
    return int(np.argmax(logits))


def softmax(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    shifted = v - np.max(v)
    e = np.exp(shifted)
    return e / np.sum(e)


def forward(net: Network, x) -> Prediction:
    """Evaluate the network and record which ReLUs fired.

    Signature bits use the strict rule: bit 1 iff the computed
    pre-activation is > 0; a value of exactly 0 gets bit 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ShapeError(f"input has shape {x.shape}, expected ({net.input_dim},)")
    if np.any(x < net.lower) or np.any(x > net.upper):
        warnings.warn(
            "input lies outside input_bounds; explanations are only guaranteed inside the domain box",
            stacklevel=2,
        )
    h = x
    bits = []
    boundary = False
    for layer in net.layers[:-1]:
        pre = layer.weights @ h + layer.bias
        active = pre > 0.0
        if np.any(pre == 0.0):
            boundary = True
        bits.append(tuple(int(b) for b in active))
        h = np.where(active, pre, 0.0)
    out_layer = net.layers[-1]
    logits = out_layer.weights @ h + out_layer.bias
    logits.flags.writeable = False
    return Prediction(
        logits=logits,
        class_index=argmax_class(logits),
        signature=ActivationSignature(tuple(bits)),
        boundary=boundary,
    )


def network_from_dict(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise FormatError("model document must be an object")
    for key in ("layers", "output_activation", "input_bounds"):
        if key not in doc:
            raise FormatError(f"model document is missing key {key!r}")
    raw_layers = doc["layers"]
    if not isinstance(raw_layers, list) or not raw_layers:
        raise FormatError("'layers' must be a non-empty array")
    layers = []
    for i, entry in enumerate(raw_layers):
        if not isinstance(entry, dict) or "weights" not in entry or "bias" not in entry:
            raise FormatError(f"layer {i + 1} must be an object with 'weights' and 'bias'")
        try:
            w = np.asarray(entry["weights"], dtype=np.float64)
            b = np.asarray(entry["bias"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"layer {i + 1} holds non-numeric data: {exc}") from exc
        if w.ndim != 2:
            raise ShapeError(f"layer {i + 1} weights must be a matrix of rows")
        layers.append((w, b))
    return Network(
        layers=layers,
        output_activation=doc["output_activation"],
        input_bounds=doc["input_bounds"],
        class_names=doc.get("class_names"),
    )


def network_to_dict(net: Network) -> dict:
    doc = {
        "layers": [
            {"weights": [[float(v) for v in row] for row in l.weights], "bias": [float(v) for v in l.bias]}
            for l in net.layers
        ],
        "output_activation": net.output_activation,
        "input_bounds": [[float(lo), float(hi)] for lo, hi in net.input_bounds],
    }
    if net.class_names is not None:
        doc["class_names"] = list(net.class_names)
    return doc


def load_network(path) -> Network:
    """Load and validate a model file (see README for the format)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file {path} is not valid JSON: {exc}") from exc
    return network_from_dict(doc)
