"""HTTP API over a single loaded network.

Stateless JSON wrappers around predict/why/why-not/regions. The model is
immutable for the life of the process, so responses are pure functions of
the request body — recorded sessions replay byte-identically.

For 2-D models the explanation endpoints also attach ready-to-draw
geometry (hyperplane segments clipped to the box, half-plane shading
polygons) so browser clients never do constraint math themselves.

Error contract: 400 malformed body or wrong arity, 404 unknown route,
422 counterfactual equals factual, 503 class unreachable within budget;
every error body is {code, message} (503 adds the explanation payload).
"""

from __future__ import annotations

import warnings

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import explain, geometry, marching
from .model import Network, forward

__all__ = ["create_app", "DEFAULT_MAX_REGIONS"]

DEFAULT_MAX_REGIONS = 64
_REGION_SCAN_CAP = 2**14  # signatures examined per /regions request


class PredictReq(BaseModel):
    input: list[float]
    request_id: str | None = None


class WhyReq(BaseModel):
    input: list[float]
    vrep: bool = False
    request_id: str | None = None


class WhyNotReq(BaseModel):
    input: list[float]
    counterfactual_class: int
    max_distance: int | None = None
    budget: int | None = None
    request_id: str | None = None


class RegionsReq(BaseModel):
    center: list[float]
    max_regions: int = DEFAULT_MAX_REGIONS
    request_id: str | None = None


def _error(status: int, code: str, message: str, payload=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if payload is not None:
        body["payload"] = payload
    return JSONResponse(status_code=status, content=body)


def _with_id(doc: dict, request_id) -> dict:
    if request_id is not None:
        doc["request_id"] = request_id
    return doc


def _constraint_draw_aids(net: Network, cdoc: dict) -> dict:
    """Attach segment/shade geometry to a serialized constraint (2-D only)."""
    seg = geometry.line_box_segment(cdoc["a"], cdoc["b"], net.lower, net.upper)
    shade = geometry.halfplane_box_polygon(cdoc["a"], cdoc["b"], net.lower, net.upper)
    cdoc["segment"] = None if seg is None else [list(seg[0]), list(seg[1])]
    cdoc["shade"] = None if shade is None else [list(q) for q in shade]
    return cdoc


def _attach_draw_aids(net: Network, doc: dict) -> dict:
    if net.input_dim != 2:
        return doc
    for cdoc in doc.get("minimal_constraints", []):
        _constraint_draw_aids(net, cdoc)
    if "delta_constraint" in doc:
        _constraint_draw_aids(net, doc["delta_constraint"])
    for pair in doc.get("differing_constraints", []):
        _constraint_draw_aids(net, pair["origin"])
        _constraint_draw_aids(net, pair["target"])
    return doc


def _check_arity(net: Network, point, name: str):
    if len(point) != net.input_dim:
        raise _ArityError(f"{name} has {len(point)} coordinates, model expects {net.input_dim}")


class _ArityError(Exception):
    pass


def create_app(net: Network, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="polywhy", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", "malformed request body")

    @app.exception_handler(_ArityError)
    async def _on_arity(request: Request, exc: _ArityError):
        return _error(400, "bad_request", str(exc))

    @app.exception_handler(StarletteHTTPException)
    async def _on_http(request: Request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "error"
        return _error(exc.status_code, code, str(exc.detail))

    @app.get("/model")
    def model_info():
        return {
            "input_dim": net.input_dim,
            "bounds": [[lo, hi] for lo, hi in net.input_bounds],
            "class_names": [net.class_name(i) for i in range(net.num_classes)],
            "layer_widths": [net.input_dim, *net.hidden_widths, net.num_classes],
            "output_activation": net.output_activation,
        }

    @app.post("/predict")
    def predict(req: PredictReq):
        _check_arity(net, req.input, "input")
        with warnings.catch_warnings():
            # inside_bounds in the response body replaces the library warning
            warnings.simplefilter("ignore")
            pred = forward(net, req.input)
        return _with_id(
            {
                "input": list(req.input),
                "logits": [float(v) for v in pred.logits],
                "class_index": pred.class_index,
                "class_name": net.class_name(pred.class_index),
                "signature": list(pred.signature.flat),
                "boundary": pred.boundary,
                "inside_bounds": net.contains(req.input),
            },
            req.request_id,
        )

    @app.post("/explain/why")
    def why(req: WhyReq):
        _check_arity(net, req.input, "input")
        e = explain.explain_why(net, req.input, want_vrep=req.vrep)
        doc = _attach_draw_aids(net, explain.explanation_to_dict(e))
        return _with_id(doc, req.request_id)

    @app.post("/explain/whynot")
    def whynot(req: WhyNotReq):
        _check_arity(net, req.input, "input")
        c_prime = req.counterfactual_class
        if not 0 <= c_prime < net.num_classes:
            return _error(400, "bad_request", f"counterfactual_class {c_prime} out of range")
        pred = forward(net, req.input)
        if c_prime == pred.class_index:
            return _error(
                422,
                "factual_class",
                f"class {c_prime} is already the prediction at this input",
            )
        e = explain.explain_why_not(
            net,
            req.input,
            c_prime,
            max_distance=req.max_distance,
            budget=req.budget or marching.DEFAULT_BUDGET,
        )
        doc = _attach_draw_aids(net, explain.explanation_to_dict(e))
        if isinstance(e, explain.ClassUnreachable):
            return _error(
                503,
                "class_unreachable",
                f"{e.counterfactual_name} is not reachable within the search budget",
                payload=_with_id(doc, req.request_id),
            )
        return _with_id(doc, req.request_id)

    @app.post("/regions")
    def regions(req: RegionsReq):
        if net.input_dim != 2:
            return _error(400, "bad_request", "region polygons are only available for 2-D models")
        _check_arity(net, req.center, "center")
        if req.max_regions < 1:
            return _error(400, "bad_request", "max_regions must be >= 1")
        s0 = forward(net, req.center).signature
        n = s0.n
        found = []
        examined = 0

        def consider(sig):
            nonlocal examined
            examined += 1
            poly = geometry.region_hrep(net, sig)
            if not poly.feasible:
                return
            res = geometry.open_interior(poly, net.lower, net.upper)
            if res is None:
                return
            verts = geometry.enumerate_vertices(poly).vertices
            if len(verts) < 3:
                return
            cls = forward(net, res.witness).class_index
            found.append(
                {
                    "signature": list(sig.flat),
                    "class_index": cls,
                    "class_name": net.class_name(cls),
                    "polygon": [list(q) for q in geometry.order_ccw(verts)],
                    "witness": [float(v) for v in res.witness],
                }
            )

        consider(s0)
        for d in range(1, n + 1):
            if len(found) >= req.max_regions or examined >= _REGION_SCAN_CAP:
                break
            for sig in marching.neighbors_at_distance(s0, d):
                if len(found) >= req.max_regions or examined >= _REGION_SCAN_CAP:
                    break
                consider(sig)

        return _with_id(
            {
                "regions": found[: req.max_regions],
                "examined": examined,
                "bounds": [[lo, hi] for lo, hi in net.input_bounds],
            },
            req.request_id,
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
