"""Command-line driver.

Every command reads an optional JSON config (``--config``), applies flag
overrides, runs one pipeline and writes a report as TSV (default) or JSON.
Exit status: 0 on success, 1 when a checked property fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import __version__
from .exact_linalg import as_int_matrix
from .holonomy import (
    ComplexTorusData,
    ConnectionAu,
    FactorOfAutomorphy,
    canonical_factor,
    check_cocycle,
    holonomy_formula_check,
    loop_holonomy,
    loop_holonomy_ode,
    segment_holonomy,
    triangle_identity,
)
from .klein_surface import KleinType, pic_torus, validate_curve_class
from .orientability import QuotSetup, orientability_report, stability_failures
from .real_torus import (
    LatticeInvolution,
    UCharacter,
    check_form,
    comessatti_basis,
    fixed_components,
    make_class,
    sw_function,
)
from .suites import SUITES, run_suite
from .theta_forms import (
    p0_boundary,
    realizable_boundary_data,
    theta_chars_per_component,
    theta_class_p0,
)

COMMANDS = ("classify-torus", "classify-curve", "theta-table", "orientability", "holonomy-check", "verify")

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InvalidInput(Exception):
    pass


@dataclass
class Report:
    command: str
    inputs: dict
    rows: list = field(default_factory=list)
    failed: bool = False

    def add(self, section: str, item: str, value: Any, provenance: str):
        self.rows.append((section, item, _fmt(value), provenance))

    def check(self, section: str, item: str, ok: bool, provenance: str, detail: str = ""):
        self.add(section, item, ("pass" if ok else "FAIL") + (f" ({detail})" if detail else ""), provenance)
        if not ok:
            self.failed = True

    def to_tsv(self) -> str:
        lines = [f"# realtheta {self.command}"]
        for k in sorted(self.inputs):
            lines.append(f"# {k}\t{_fmt(self.inputs[k])}")
        lines.append("section\titem\tvalue\tprovenance")
        for row in self.rows:
            lines.append("\t".join(row))
        lines.append(f"# status\t{'fail' if self.failed else 'ok'}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "input": {k: self.inputs[k] for k in sorted(self.inputs)},
            "rows": [dict(zip(("section", "item", "value", "provenance"), r)) for r in self.rows],
            "status": "fail" if self.failed else "ok",
        }
        return json.dumps(doc, indent=2, sort_keys=False, default=_fmt) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    if isinstance(v, np.ndarray):
        return _fmt(v.tolist())
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def _bits(bits) -> str:
    return "".join(str(int(b)) for b in bits) or "-"


# --- parameter helpers ----------------------------------------------------------


def _need(params: dict, key: str):
    if key not in params or params[key] is None:
        raise InvalidInput(f"missing parameter '{key}'")
    return params[key]


def _int(params: dict, key: str, default=None) -> int:
    v = params.get(key, default)
    if v is None:
        raise InvalidInput(f"missing parameter '{key}'")
    try:
        return int(v)
    except (TypeError, ValueError):
        raise InvalidInput(f"parameter '{key}' must be an integer")


def _matrix(params: dict, key: str) -> np.ndarray:
    v = _need(params, key)
    if isinstance(v, str):
        v = json.loads(v)
    try:
        M = as_int_matrix(v)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"parameter '{key}' is not an integer matrix: {e}")
    if M.shape[0] != M.shape[1]:
        raise InvalidInput(f"parameter '{key}' must be square")
    return M


def _vector(params: dict, key: str) -> Optional[list]:
    v = params.get(key)
    if v is None:
        return None
    if isinstance(v, str):
        v = json.loads(v)
    if isinstance(v, int):
        v = [v]
    return [int(x) for x in v]


def _klein(params: dict) -> KleinType:
    try:
        return KleinType(_int(params, "g"), _int(params, "r"), _int(params, "a"))
    except ValueError as e:
        raise InvalidInput(f"invalid Klein surface type: {e}")


# --- commands -------------------------------------------------------------------


def run_classify_torus(params: dict, seed: int) -> Report:
    try:
        L = LatticeInvolution(_matrix(params, "tau"))
    except ValueError as e:
        raise InvalidInput(str(e))
    u = _matrix(params, "u") if params.get("u") is not None else as_int_matrix([[0] * L.n for _ in range(L.n)])
    try:
        u = check_form(L, u)
    except ValueError as e:
        raise InvalidInput(str(e))
    rep = Report("classify-torus", {"tau": L.tau.tolist(), "u": u.tolist(), "w0": params.get("w0")})
    cb = comessatti_basis(L)
    rep.add("comessatti", "a", cb.a, "comessatti-normal-form")
    rep.add("comessatti", "s", cb.s, "comessatti-normal-form")
    rep.add("comessatti", "basis", cb.U.tolist(), "comessatti-normal-form")
    comps = fixed_components(L)
    rep.add("components", "count", len(comps), "tate-cohomology")
    for c in comps:
        rep.add("components", c.label, "2mu=" + _fmt(list(c.m)), "tate-cohomology")
    rep.add("fixed-lattice", "basis", L.fixed_basis.T.tolist(), "plumbing")
    rep.add("real-characters", "components", 2 ** (cb.a - cb.s), "real-character-count")
    w0 = _vector(params, "w0")
    k = L.fixed_basis.shape[1]
    choices = [w0] if w0 is not None else [list(b) for b in _product01(k)]
    valid = []
    for w in choices:
        try:
            valid.append(make_class(L, u, w))
        except ValueError as e:
            if w0 is not None:
                raise InvalidInput(str(e))
    rep.add("classes", "valid w0 count", len(valid), "fiber-product")
    for c in valid:
        sw = sw_function(c)
        for comp in sw.components:
            rep.add(f"sw w0={_bits(c.w0)}", comp.label, _bits(sw[comp]), "difference-formula")
    return rep


def _product01(k: int):
    from itertools import product

    return product((0, 1), repeat=k)


def run_classify_curve(params: dict, seed: int) -> Report:
    t = _klein(params)
    d = _int(params, "d", 0)
    w = _vector(params, "w")
    rep = Report("classify-curve", {"g": t.g, "r": t.r, "a": t.a, "d": d, "w": w})
    rep.add("type", "s", t.s, "comessatti-characteristic")
    p = pic_torus(t)
    rep.add("picard", "components", len(p.components), "picard-components")
    rep.add("picard", "expected components", 2 ** (t.r - 1), "picard-components")
    rep.add("picard", "tau", p.base.tau.tolist(), "picard-involution")
    rep.add("picard", "circle duals", p.circle_duals.T.tolist(), "poincare-duality")
    if w is not None:
        try:
            validate_curve_class(t, d, w)
        except ValueError as e:
            raise InvalidInput(str(e))
        rep.add("class", _bits(w), "valid", "degree-parity")
    else:
        admissible = [b for b in _product01(t.r) if sum(b) % 2 == d % 2]
        rep.add("class", "admissible w count", len(admissible), "degree-parity")
        for b in admissible:
            rep.add("class", _bits(b), "valid", "degree-parity")
    return rep


def run_theta_table(params: dict, seed: int) -> Report:
    t = _klein(params)
    rep = Report("theta-table", {"g": t.g, "r": t.r, "a": t.a})
    p = pic_torus(t)
    rep.add("counts", "components", len(p.components), "picard-components")
    rep.add("counts", "theta characteristics per component", theta_chars_per_component(t.g), "real-theta-count")
    rep.add("counts", "Real theta characteristics", theta_chars_per_component(t.g) * 2 ** (t.r - 1), "real-theta-count")
    parity = (t.g - 1) % 2
    for label, real_only in (("all refinements", False), ("Real refinements", True)):
        data = realizable_boundary_data(t, real_only=real_only)
        for w, mult in data.items():
            rep.add(f"boundary {label}", _bits(w), mult, "theta-realizability")
        rep.add(f"boundary {label}", "parity sum(w) = g-1", all(sum(w) % 2 == parity for w in data), "theta-realizability")
    for i0 in range(1, t.r + 1):
        c = theta_class_p0(p, i0)
        sw = sw_function(c)
        rep.add(f"p0 on C{i0}", "boundary", _bits(p0_boundary(t, i0)), "theta-base-point")
        for comp in sw.components:
            vals = [sw.value(comp, p.circle_dual(i)) for i in range(t.r)]
            rep.add(f"p0 on C{i0}", comp.label, _bits(vals), "difference-formula")
    return rep


def run_orientability(params: dict, seed: int) -> Report:
    t = _klein(params)
    d = _int(params, "d")
    r0 = _int(params, "r0", 1)
    e0 = _int(params, "e0", 0)
    try:
        mu_max = Fraction(str(params.get("mu_max", 0)))
    except ValueError:
        raise InvalidInput("mu_max must be a rational number")
    p0 = _int(params, "p0_circle", 1)
    comp = tuple(_vector(params, "det_component") or ())
    try:
        s = QuotSetup(t, r0, e0, mu_max, d, p0, comp)
    except ValueError as e:
        raise InvalidInput(str(e))
    rep = Report(
        "orientability",
        {"g": t.g, "r": t.r, "a": t.a, "d": d, "r0": r0, "e0": e0, "mu_max": str(mu_max), "p0_circle": p0, "det_component": list(comp)},
    )
    bad = stability_failures(s)
    if bad:
        raise InvalidInput("; ".join(bad))
    rep.add("setup", "fiber rank", s.fiber_rank, "fiber-rank")
    try:
        report = orientability_report(s)
    except ValueError as e:
        raise InvalidInput(str(e))
    for e in report.entries:
        rep.add(e.label, "w1 on circle duals", _bits(e.w1_on_circles), "difference-formula")
        rep.add(e.label, "w1 on fixed basis", _bits(e.w1_restriction), "difference-formula")
        rep.add(e.label, "orientable", e.orientable, "orientability-criterion")
    return rep


def run_holonomy_check(params: dict, seed: int) -> Report:
    u = _matrix(params, "u") if params.get("u") is not None else as_int_matrix([[0, 1], [-1, 0]])
    try:
        u = check_form(None, u)
    except ValueError as e:
        raise InvalidInput(str(e))
    n = u.shape[0]
    angles = params.get("angles")
    angles = [Fraction(str(x)) for x in angles] if angles is not None else [Fraction(0)] * n
    if len(angles) != n:
        raise InvalidInput("need one angle per basis vector")
    trials = _int(params, "trials", 20)
    rep = Report("holonomy-check", {"u": u.tolist(), "angles": [str(a) for a in angles], "trials": trials})
    rng = np.random.default_rng(seed)
    alpha = UCharacter(u, tuple(angles))
    f = FactorOfAutomorphy(u, alpha)
    c = ConnectionAu(u)
    rep.check("cocycle", "u-character cocycle", check_cocycle(f, trials, seed), "factor-of-automorphy")
    seg = loop = tri = 0.0
    for _ in range(trials):
        v0 = rng.uniform(-1, 1, n)
        w = rng.uniform(-1, 1, n)
        seg = max(seg, abs(segment_holonomy(c, v0, w) - segment_holonomy(c, v0, w, mode="ode")))
        lam = [int(x) for x in rng.integers(-2, 3, n)]
        lam2 = [int(x) for x in rng.integers(-2, 3, n)]
        mu = rng.uniform(-0.5, 0.5, n)
        loop = max(loop, abs(loop_holonomy(f, mu, lam) - loop_holonomy_ode(f, mu, lam)))
        tri = max(tri, triangle_identity(alpha, u, lam, lam2))
    rep.check("transport", "segment ODE vs closed form", seg < 1e-8, "segment-transport", f"max {seg:.1e}")
    rep.check("transport", "loop ODE vs closed form", loop < 1e-8, "holonomy-read-off", f"max {loop:.1e}")
    rep.check("transport", "triangle identity", tri < 1e-10, "curvature-flux", f"max {tri:.1e}")
    if n == 2:
        cell = holonomy_formula_check(c, [[0, 0], [1, 0], [1, 1], [0, 1]], grid=100)
        rep.check("transport", "unit cell flux", cell < 1e-6, "curvature-flux", f"residual {cell:.1e}")
        Jrot = [[0.0, -1.0], [1.0, 0.0]]
        try:
            cf = canonical_factor(ComplexTorusData(Jrot, u), alpha)
        except ValueError:
            cf = None
        if cf is not None:
            g = cf.gauge_residual(trials, seed)
            rep.check("canonical factor", "gauge relation", g < 1e-8, "canonical-factor", f"max {g:.1e}")
    return rep


def run_verify(params: dict, seed: int) -> Report:
    name = str(params.get("suite", "all"))
    if name != "all" and name not in SUITES:
        raise InvalidInput(f"unknown suite '{name}'; choose from all, " + ", ".join(SUITES))
    rep = Report("verify", {"suite": name, "seed": seed})
    for chk in run_suite(name, seed):
        rep.check(name, chk.name, chk.passed, chk.provenance, chk.detail)
    return rep


RUNNERS = {
    "classify-torus": run_classify_torus,
    "classify-curve": run_classify_curve,
    "theta-table": run_theta_table,
    "orientability": run_orientability,
    "holonomy-check": run_holonomy_check,
    "verify": run_verify,
}


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="realtheta", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"realtheta {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with parameters")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--format", choices=("tsv", "json"), default=None)
        sp.add_argument("--out", help="write the report here instead of stdout")
        if name == "classify-torus":
            sp.add_argument("--tau", help="involution as a JSON integer matrix")
            sp.add_argument("--u", help="alternating form as a JSON integer matrix")
            sp.add_argument("--w0", help="JSON list of bits on the fixed-lattice basis")
        if name in ("classify-curve", "theta-table", "orientability"):
            sp.add_argument("--g", type=int)
            sp.add_argument("--r", type=int)
            sp.add_argument("--a", type=int)
        if name in ("classify-curve", "orientability"):
            sp.add_argument("--d", type=int)
        if name == "classify-curve":
            sp.add_argument("--w", help="JSON list of circle values")
        if name == "orientability":
            sp.add_argument("--r0", type=int)
            sp.add_argument("--e0", type=int)
            sp.add_argument("--mu-max", dest="mu_max")
            sp.add_argument("--p0-circle", dest="p0_circle", type=int)
            sp.add_argument("--det-component", dest="det_component", help="JSON list of component bits")
        if name == "holonomy-check":
            sp.add_argument("--u", help="alternating form as a JSON integer matrix")
            sp.add_argument("--angles", help="JSON list of rational angles (strings allowed)")
            sp.add_argument("--trials", type=int)
        if name == "verify":
            sp.add_argument("--suite", help="suite name or 'all'")
    return ap


_COMMON = ("command", "config", "seed", "format", "out")


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    params: dict = {}
    try:
        if args.config:
            try:
                with open(args.config) as fh:
                    cfg = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise InvalidInput(f"cannot read config: {e}")
            if not isinstance(cfg, dict):
                raise InvalidInput("config must be a JSON object")
            if cfg.get("command", args.command) != args.command:
                raise InvalidInput(f"config is for command '{cfg['command']}'")
            params.update(cfg.get("parameters", {}))
            cfg_seed, cfg_format = cfg.get("seed"), cfg.get("format")
        else:
            cfg_seed = cfg_format = None
        for k, v in vars(args).items():
            if k not in _COMMON and v is not None:
                params[k] = json.loads(v) if k in ("tau", "u", "w0", "w", "angles", "det_component") else v
        seed = args.seed if args.seed is not None else int(cfg_seed or 0)
        fmt = args.format or cfg_format or "tsv"
        if fmt not in ("tsv", "json"):
            raise InvalidInput("format must be tsv or json")
        report = RUNNERS[args.command](params, seed)
    except (InvalidInput, json.JSONDecodeError) as e:
        print(f"realtheta: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    text = report.to_tsv() if fmt == "tsv" else report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
