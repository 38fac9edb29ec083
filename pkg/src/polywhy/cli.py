"""Command-line front door: predict, explain, decompose, generate, serve.

Exit codes are scriptable: 0 success, 1 model file problems, 2 usage
errors, 3 for why-not runs that end Exhausted/Unreachable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import explain, fixtures, oracle
from .model import ModelError, forward, load_network, network_to_dict

__all__ = ["main", "main_entry", "build_parser"]

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_USAGE = 2
EXIT_UNREACHABLE = 3


class _CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_model(spec: str):
    """A model path, or the literal name of a built-in fixture."""
    if spec == "toy_a":
        return fixtures.toy_a()
    if not os.path.exists(spec):
        raise _CliError(f"model file not found: {spec}", EXIT_MODEL)
    try:
        return load_network(spec)
    except ModelError as exc:
        raise _CliError(f"cannot load model: {exc}", EXIT_MODEL) from exc


def _parse_input(text: str, dim: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise _CliError(f"--input must be comma-separated numbers: {exc}", EXIT_USAGE) from exc
    if len(vals) != dim:
        raise _CliError(f"--input has {len(vals)} coordinates, model expects {dim}", EXIT_USAGE)
    return np.asarray(vals)


def _fmt(v: float) -> str:
    s = f"{float(v):.6g}"
    return "0" if s == "-0" else s


def _emit(args, text_fn, json_doc):
    if args.format == "json":
        print(json.dumps(json_doc, indent=2))
    else:
        print(text_fn())
    return EXIT_OK


def cmd_predict(args) -> int:
    net = _load_model(args.model)
    x = _parse_input(args.input, net.input_dim)
    with warnings.catch_warnings():
        # the out-of-bounds warning becomes a printed note instead
        warnings.simplefilter("ignore")
        pred = forward(net, x)
    doc = {
        "input": [float(v) for v in x],
        "logits": [float(v) for v in pred.logits],
        "class_index": pred.class_index,
        "class_name": net.class_name(pred.class_index),
        "signature": list(pred.signature.flat),
        "boundary": pred.boundary,
        "inside_bounds": net.contains(x),
    }

    def text():
        lines = [
            f"input ({', '.join(_fmt(v) for v in x)}) → class {pred.class_index} ({net.class_name(pred.class_index)})",
            f"logits: ({', '.join(_fmt(v) for v in pred.logits)})",
            f"signature: {pred.signature}",
        ]
        if pred.boundary:
            lines.append("note: boundary point (some pre-activation is exactly 0)")
        if not net.contains(x):
            lines.append("note: input lies outside the model's input bounds")
        return "\n".join(lines)

    return _emit(args, text, doc)


def cmd_why(args) -> int:
    net = _load_model(args.model)
    x = _parse_input(args.input, net.input_dim)
    want_vrep = args.vrep or args.style == "vrep"
    e = explain.explain_why(net, x, want_vrep=want_vrep)
    return _emit(args, lambda: explain.render(e, args.style), explain.explanation_to_dict(e))


def cmd_whynot(args) -> int:
    net = _load_model(args.model)
    x = _parse_input(args.input, net.input_dim)
    if args.cf_class is None:
        raise _CliError("whynot requires --class (the counterfactual class index)", EXIT_USAGE)
    try:
        e = explain.explain_why_not(
            net,
            x,
            args.cf_class,
            max_distance=args.max_distance,
            budget=args.budget,
        )
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_USAGE) from exc
    style = args.style if args.style != "vrep" else "text"
    code = _emit(args, lambda: explain.render(e, style), explain.explanation_to_dict(e))
    if isinstance(e, explain.ClassUnreachable):
        return EXIT_UNREACHABLE
    return code


def cmd_decompose(args) -> int:
    net = _load_model(args.model)
    try:
        decomp = oracle.full_decompose(net)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_USAGE) from exc
    doc = oracle.decomposition_to_dict(decomp)

    def text():
        lines = [
            f"examined {decomp.examined} signatures, {len(decomp.feasible_regions)} feasible regions"
        ]
        for r in decomp.feasible_regions:
            w = "" if r.witness is None else f"  witness ({', '.join(_fmt(v) for v in r.witness)})"
            lines.append(f"  {r.signature}{w}")
        return "\n".join(lines)

    return _emit(args, text, doc)


def cmd_genfixture(args) -> int:
    if not args.widths:
        raise _CliError("genfixture requires --widths, e.g. --widths 2,6,2", EXIT_USAGE)
    try:
        widths = [int(v) for v in args.widths.split(",")]
        net = fixtures.random_network(widths, seed=args.seed)
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_USAGE) from exc
    doc = network_to_dict(net)
    with open(args.model, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {args.model} (widths {'-'.join(map(str, widths))}, seed {args.seed})")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    net = _load_model(args.model)
    app = create_app(net, ui_dir=args.ui)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polywhy",
        description="Exact why / why-not explanations for small ReLU networks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, input_arg=True):
        sp.add_argument("--model", required=True, help="model JSON path, or the built-in name toy_a")
        if input_arg:
            sp.add_argument("--input", required=True, help="input point as comma-separated reals")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("predict", help="forward pass: logits, class, signature")
    common(sp)
    sp.set_defaults(fn=cmd_predict)

    sp = sub.add_parser("why", help="minimal constraint explanation of the decision at a point")
    common(sp)
    sp.add_argument("--vrep", action="store_true", help="also compute polytope vertices")
    sp.add_argument("--style", choices=("hrep", "vrep", "text"), default="text")
    sp.set_defaults(fn=cmd_why)

    sp = sub.add_parser("whynot", help="why a different class lost, and where it first wins")
    common(sp)
    sp.add_argument("--class", dest="cf_class", type=int, help="counterfactual class index")
    sp.add_argument("--style", choices=("hrep", "vrep", "text"), default="text")
    sp.add_argument("--max-distance", type=int, default=None, help="cap on signature flips searched")
    sp.add_argument("--budget", type=int, default=10**6, help="cap on candidate signatures examined")
    sp.set_defaults(fn=cmd_whynot)

    sp = sub.add_parser("decompose", help="exhaustively enumerate feasible activation regions (≤16 neurons)")
    common(sp, input_arg=False)
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("genfixture", help="write a seeded random model file")
    sp.add_argument("--model", required=True, help="output path for the model JSON")
    sp.add_argument("--widths", required=True, help="layer widths, e.g. 2,6,2 (input,hidden...,classes)")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_genfixture)

    sp = sub.add_parser("serve", help="run the HTTP API (and optionally the bundled UI)")
    sp.add_argument("--model", required=True)
    sp.add_argument("--port", type=int, default=8080)
    sp.add_argument("--ui", default=None, help="directory of built UI assets to serve at /")
    sp.set_defaults(fn=cmd_serve)

    return p


def _glue_negative_values(argv):
    """Join `--input -1,-1` into `--input=-1,-1` so argparse does not read
    the leading minus sign as an option prefix."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--input":
            val = next(it, None)
            if val is None:
                out.append(tok)
            else:
                out.append(f"--input={val}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_glue_negative_values(list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


def main_entry() -> None:
    sys.exit(main())
