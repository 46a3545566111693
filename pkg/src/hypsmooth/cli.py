"""Experiment runner: ``hypsmooth [global flags] <area> <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hypsmooth.group_kernel import CapExceeded, Group, GroupError, InvariantError
from hypsmooth.group_ring import RingElement, TensorElement

EXIT_CONFIG, EXIT_CAP, EXIT_INVARIANT = 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    group: str = "free:2"
    seed: int = 0
    cap_elements: int | None = None
    out: str | None = None
    format: str | None = None
    command: str = ""
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cap_elements is not None and self.cap_elements <= 0:
            raise ConfigError("--cap-elements must be positive")
        if self.format not in (None, "csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    def fingerprint(self) -> str:
        payload = {"group": self.group, "seed": self.seed, "cap": self.cap_elements,
                   "command": self.command, "options": self.options}
        return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()[:12]

    def load_group(self) -> Group:
        caps = {} if self.cap_elements is None else {"max_elements": self.cap_elements}
        return Group.from_tag(self.group, **caps)


# --------------------------------------------------------------------- parsing
def parse_ring(G: Group, text: str) -> RingElement:
    """``2*abA + 3*a - b``; coefficients may be complex (``(1+2j)*ab``), ``e`` is the identity."""
    out = RingElement.zero(G)
    s = text.replace(" ", "").replace("-", "+-")
    for term in filter(None, s.split("+")):
        sign = 1.0
        if term.startswith("-"):
            sign, term = -1.0, term[1:]
        coef, _, word = term.rpartition("*")
        try:
            c = complex(coef) if coef else 1.0
        except ValueError as err:
            raise ConfigError(f"bad coefficient {coef!r}") from err
        out = out + RingElement.monomial(G, G.parse(word), sign * c)
    return out


def parse_spec(text: str):
    from hypsmooth.norms import SeminormSpec

    try:
        return SeminormSpec.parse(text)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def parse_tau(G: Group, text: str):
    """``indicator:W``, ``finite:W=v,W=v``, ``constant``, ``exp_length:b``, ``power_length:p``."""
    from hypsmooth.traces_forms import ClassFunction

    kind, _, arg = text.partition(":")
    if kind == "indicator":
        return ClassFunction.indicator(G, arg)
    if kind == "finite":
        vals = {}
        for item in filter(None, arg.split(",")):
            w, _, v = item.partition("=")
            vals[w] = complex(v or 1)
        return ClassFunction.finite(G, vals)
    if kind in ("constant", "exp_length", "power_length"):
        return ClassFunction.parametric(G, kind, float(arg or 0))
    raise ConfigError(f"unknown class function {text!r}")


def load_matrix(G: Group, text: str) -> TensorElement:
    from hypsmooth.norms import example26

    if text in ("example26", "example26a", "example26b"):
        _, a, b = example26(G if G.name == "free:1" else None)
        return b if text.endswith("b") else a
    try:
        obj = json.loads(Path(text).read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read matrix {text!r}: {err}") from err
    rows = [G.parse(w) for w in obj["rows"]]
    cols = [G.parse(w) for w in obj["cols"]]
    return TensorElement.from_matrix(G, rows, cols, obj["matrix"])


# ---------------------------------------------------------------------- output
def _cell(v):
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, default=_jsonable)
    if isinstance(v, complex):
        return repr(v.real) if v.imag == 0 else str(v)
    return v


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def emit(cfg: ExperimentConfig, rows: list[dict], default_format: str, status: str = "ok") -> str:
    fmt = cfg.format or default_format
    stamped = [{"fingerprint": cfg.fingerprint(), "seed": cfg.seed, "status": status, **r} for r in rows]
    if fmt == "json":
        text = json.dumps(stamped if len(stamped) != 1 else stamped[0], indent=2, default=_jsonable) + "\n"
    else:
        buf = io.StringIO()
        keys = list(dict.fromkeys(k for r in stamped for k in r))
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in stamped:
            w.writerow({k: _cell(v) for k, v in r.items()})
        text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


# -------------------------------------------------------------------- handlers
def _group_info(G, a, rows):
    sp = G.spec
    rows.append({"group": G.name, "kind": sp.kind, "generators": list(G.alphabet.letters),
                 "relators": list(sp.relators), "max_elements": sp.max_elements,
                 "sphere_sizes": G.ball(a.radius).sphere_sizes()})
    return "json"


def _group_ball(G, a, rows):
    sizes = G.ball(a.radius).sphere_sizes()
    total = 0
    for r, s in enumerate(sizes):
        total += s
        rows.append({"radius": r, "sphere": s, "ball": total})
    return "csv"


def _group_delta(G, a, rows):
    raw = G.raw_slimness(a.radius)
    rows.append({"group": G.name, "radius": a.radius, "delta": max(1, raw), "raw_slimness": raw})
    return "csv"


def _qd_leibniz(G, a, rows):
    from hypsmooth.quasiderivation import exhaustive_leibniz

    delta = a.delta if a.delta is not None else G.estimate_delta(3)
    pairs, failures = exhaustive_leibniz(G, a.radius, delta)
    rows.append({"radius": a.radius, "delta": delta, "pairs": pairs, "failures": len(failures),
                 "examples": [[G.fmt(g), G.fmt(h)] for g, h in failures[:5]]})
    if failures:
        raise InvariantError(f"{len(failures)} monomial pairs violate the quasi-Leibniz domination")
    return "csv"


def _qd_c0(G, a, rows):
    from hypsmooth.quasiderivation import c0_constant

    spec = parse_spec(a.norm)
    rows.append({"norm": spec.label(), "delta": a.delta, "c0": c0_constant(spec, a.delta, G)})
    return "csv"


def _qd_gensets(G, a, rows):
    from hypsmooth.quasiderivation import compare_generating_sets

    extra = dict(item.split("=", 1) for item in a.extra)
    inverses = dict(item.split("=", 1) for item in a.inverse)
    rep = compare_generating_sets(G, extra, parse_ring(G, a.element), inverses, a.delta,
                                  spec=parse_spec(a.norm))
    rows.append({"rho": rep.rho, "c_double_prime": rep.c_double_prime, "cap": rep.cap,
                 "per_element": {G.fmt(g): r for g, r in rep.per_element.items()}})
    return "json"


def _qd_neumann(G, a, rows):
    from hypsmooth.quasiderivation import neumann_series_probe

    rep = neumann_series_probe(parse_ring(G, a.element), parse_spec(a.norm), a.delta, a.terms)
    for i, inc in enumerate(rep.increments, start=1):
        rows.append({"n": i, "graph_norm_power": inc, "partial_sum": rep.partial_sums[i],
                     "delta_norm": rep.delta_norms[i - 1],
                     "ratio": rep.ratios[i - 2] if 2 <= i <= len(rep.ratios) + 1 else None,
                     "bound_ratio": rep.bound_ratio, "c0": rep.c0})
    return "csv"


def _qd_growth(G, a, rows):
    from hypsmooth.conjugacy import conjugacy_engine

    psi = conjugacy_engine(G).psi_table(a.radius)
    psi.fn = conjugacy_engine(G).psi
    from hypsmooth.quasiderivation import special_growth_probe

    rep = special_growth_probe(psi, a.n, a.k, a.m_max)
    for m, r1, rs in zip(rep.ms, rep.l1_ratios, rep.sobolev_ratios):
        rows.append({"m": m, "l1_ratio": r1, "sobolev_ratio": rs, "degree_l1": rep.degree_l1,
                     "degree_sobolev": rep.degree_sobolev, "polynomial": rep.polynomial})
    return "csv"


def _conj_rep(G, a, rows):
    from hypsmooth.conjugacy import conjugacy_engine

    eng = conjugacy_engine(G)
    g = G.parse(a.element)
    rep = eng.class_representative(g)
    u, h2 = eng.minimal_conjugator(g)
    rows.append({"element": G.fmt(g), "representative": G.fmt(rep.representative),
                 "certified": rep.certified, "certified_radius": rep.certified_radius,
                 "conjugator": G.fmt(u), "rotation": G.fmt(h2)})
    return "csv"


def _conj_trace(G, a, rows):
    from hypsmooth.conjugacy import conjugacy_engine

    _, tr = conjugacy_engine(G).big_phi(G.parse(a.element))
    rows.append(tr.to_json_obj(G))
    return "json"


def _conj_profile(G, a, rows):
    from hypsmooth.conjugacy import conjugacy_engine

    prof = conjugacy_engine(G).convergence_profile(a.radius)
    for l, it in prof.max_by_length.items():
        rows.append({"length": l, "max_iterations": it, "c11": prof.c11, "c12": prof.c12})
    return "csv"


def _conj_gromov(G, a, rows):
    from hypsmooth.conjugacy import conjugacy_engine

    rep = conjugacy_engine(G).gromov_probe(a.radius)
    w = rep.worst_pair
    rows.append({"radius": rep.radius, "c10": rep.c10, "pairs": rep.pairs, "classes": rep.classes,
                 "worst": [G.fmt(w[0]), G.fmt(w[1]), w[2]] if w else None})
    return "csv"


def _norm_eval(G, a, rows):
    from hypsmooth.norms import evaluate

    spec = parse_spec(a.norm)
    rows.append({"norm": spec.label(), "element": a.element, "value": evaluate(spec, parse_ring(G, a.element))})
    return "csv"


def _norm_uc(G, a, rows):
    from hypsmooth.norms import projective_norm_l2, ucnorm_bounds

    T = load_matrix(G, a.matrix)
    sx, sy = parse_spec(a.norm), parse_spec(a.norm_y or a.norm)
    cert = ucnorm_bounds(T, sx, sy)
    if not cert.verify():
        raise InvariantError("; ".join(cert.problems()))
    row = cert.to_json_obj()
    if sx.tag == sy.tag == "sobolev2" and sx.k == sy.k == 0:
        row["projective"] = projective_norm_l2(T)
    rows.append(row)
    return "json"


def _norm_minimal(G, a, rows, k=None):
    from hypsmooth.norms import minimal_norm_bounds, sobolev_minimal_bounds

    x = parse_ring(G, a.element)
    spec = parse_spec(a.norm)
    cert = minimal_norm_bounds(x, a.n, spec) if k is None else sobolev_minimal_bounds(x, a.n, k, spec)
    if not cert.verify():
        raise InvariantError("; ".join(cert.problems()))
    rows.append(cert.to_json_obj())
    return "json"


def _trace_eval(G, a, rows):
    from hypsmooth.traces_forms import trace_eval

    v = trace_eval(parse_tau(G, a.tau), parse_ring(G, a.element))
    rows.append({"tau": a.tau, "element": a.element, "value": v})
    return "csv"


def _trace_tempered(G, a, rows):
    from hypsmooth.traces_forms import is_tempered

    rep = is_tempered(parse_tau(G, a.tau), a.k_max, a.radius)
    for k, verdict in rep.verdicts.items():
        sums = rep.partial_sums.get(k, [])
        rows.append({"tau": a.tau, "k": k, "verdict": verdict, "empirical": rep.empirical,
                     "partial_sum": sums[-1] if sums else None, "shell_classes": rep.shell_classes})
    return "csv"


def _trace_restriction(G, a, rows):
    from hypsmooth.traces_forms import restriction_probe

    rep = restriction_probe(a.x, a.n, parse_spec(a.norm), a.samples, G,
                            radii=tuple(range(2, a.radius + 1)), seed=a.seed)
    for r, s, w in rep.rows:
        rows.append({"radius": r, "samples": s, "max_ratio": w, "growth_flag": rep.growth_flag})
    return "csv"


def _forms_chain(G, a, rows):
    from hypsmooth.traces_forms import form_norm_chain_check

    factors = [parse_ring(G, f) for f in a.factors.split(";")]
    rep = form_norm_chain_check(factors, a.x, a.lam)
    rows.append({"x": a.x, "lam": a.lam, "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds})
    if not rep.holds:
        raise InvariantError(f"chain inequality fails: {rep.lhs} > {rep.rhs}")
    return "csv"


# ---------------------------------------------------------------------- parser
def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--group", default=argparse.SUPPRESS if suppress else "free:2",
                   help="free:k, surface:g, or a group specification file")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0)
    p.add_argument("--cap-elements", type=int, default=d)
    p.add_argument("--out", default=d)
    p.add_argument("--format", choices=["csv", "json"], default=d)
    p.add_argument("--config", default=d, help="JSON file with defaults for the global flags")


COMMANDS = {}


def _cmd(sub, area, name, fn, *opts, alias=None):
    p = sub.add_parser(name)
    _globals(p, suppress=True)
    for args, kw in opts:
        p.add_argument(*args, **kw)
    p.set_defaults(handler=fn, command=f"{area} {name}" if alias is None else alias)
    return p


def _o(*args, **kw):
    return args, kw


RADIUS = lambda d: _o("--radius", type=int, default=d)  # noqa: E731
ELEMENT = _o("--element", required=True)
NORM = _o("--norm", default="ell1")
DELTA = _o("--delta", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypsmooth", description=__doc__)
    _globals(ap, suppress=False)
    areas = ap.add_subparsers(dest="area", required=True)

    g = areas.add_parser("group").add_subparsers(dest="cmd", required=True)
    _cmd(g, "group", "info", _group_info, RADIUS(3))
    _cmd(g, "group", "ball", _group_ball, RADIUS(3))
    _cmd(g, "group", "delta", _group_delta, RADIUS(3))

    q = areas.add_parser("qd").add_subparsers(dest="cmd", required=True)
    _cmd(q, "qd", "check-leibniz", _qd_leibniz, RADIUS(3), _o("--delta", type=int, default=None))
    _cmd(q, "qd", "c0", _qd_c0, NORM, DELTA)
    _cmd(q, "qd", "compare-gensets", _qd_gensets, ELEMENT, NORM, DELTA,
         _o("--extra", action="append", default=[], help="NAME=WORD, repeatable"),
         _o("--inverse", action="append", default=[], help="NAME=INVERSE_NAME, repeatable"))
    _cmd(q, "qd", "neumann", _qd_neumann, _o("--element", default="0.0333333333333*a+0.0333333333333*A"
                                             "+0.0333333333333*b+0.0333333333333*B"),
         NORM, DELTA, _o("--terms", type=int, default=8))
    _cmd(q, "qd", "special-growth", _qd_growth, RADIUS(3), _o("--n", type=int, default=2),
         _o("--k", type=float, default=1.0), _o("--m-max", type=int, default=5))

    c = areas.add_parser("conj").add_subparsers(dest="cmd", required=True)
    _cmd(c, "conj", "rep", _conj_rep, ELEMENT)
    _cmd(c, "conj", "phi-trace", _conj_trace, ELEMENT)
    _cmd(c, "conj", "profile", _conj_profile, RADIUS(6))
    _cmd(c, "conj", "gromov", _conj_gromov, RADIUS(4))

    n = areas.add_parser("norm").add_subparsers(dest="cmd", required=True)
    _cmd(n, "norm", "eval", _norm_eval, ELEMENT, NORM)
    _cmd(n, "norm", "uc", _norm_uc, _o("--matrix", default="example26"), _o("--norm", default="l2"),
         _o("--norm-y", default=None))
    _cmd(n, "norm", "minimal", _norm_minimal, ELEMENT, NORM, _o("--n", type=int, default=2))
    _cmd(n, "norm", "sobolev", lambda G, a, rows: _norm_minimal(G, a, rows, k=a.k), ELEMENT, NORM,
         _o("--n", type=int, default=2), _o("--k", type=float, default=1.0))

    t = areas.add_parser("trace").add_subparsers(dest="cmd", required=True)
    _cmd(t, "trace", "eval", _trace_eval, ELEMENT, _o("--tau", default="indicator:e"))
    _cmd(t, "trace", "tempered", _trace_tempered, _o("--tau", default="constant"), RADIUS(5),
         _o("--k-max", type=int, default=3))
    _cmd(t, "trace", "restriction-probe", _trace_restriction, _o("--x", default="b"), _o("--n", type=int, default=2),
         NORM, _o("--samples", type=int, default=200), RADIUS(4))

    f = areas.add_parser("forms").add_subparsers(dest="cmd", required=True)
    _cmd(f, "forms", "chain-check", _forms_chain, _o("--factors", required=True, help="a0;a1;..."),
         _o("--x", required=True), _o("--lam", type=float, default=1.5))

    r = areas.add_parser("run").add_subparsers(dest="cmd", required=True)
    _cmd(r, "run", "delta", _group_delta, RADIUS(3), alias="run delta")
    _cmd(r, "run", "phi-profile", _conj_profile, RADIUS(6), alias="run phi-profile")
    _cmd(r, "run", "ucnorm", _norm_uc, _o("--matrix", default="example26"), _o("--norm", default="l2"),
         _o("--norm-y", default=None), alias="run ucnorm")
    return ap


def _config(args) -> ExperimentConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {args.config!r}: {err}") from err
    skip = {"handler", "command", "area", "cmd", "config", "group", "seed", "cap_elements", "out", "format"}
    opts = {k: v for k, v in vars(args).items() if k not in skip}
    given = lambda k: getattr(args, k, None)  # noqa: E731
    return ExperimentConfig(
        group=given("group") if given("group") != "free:2" or "group" not in base else base["group"],
        seed=given("seed") if given("seed") != 0 or "seed" not in base else int(base["seed"]),
        cap_elements=given("cap_elements") or base.get("cap_elements"),
        out=given("out") or base.get("out"),
        format=given("format") or base.get("format"),
        command=args.command,
        options=opts,
    )


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    rows: list[dict] = []
    try:
        cfg = _config(args)
        args.seed = cfg.seed
        G = cfg.load_group()
        fmt = args.handler(G, args, rows)
    except (ConfigError, GroupError, ValueError, KeyError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as err:
        print(f"cap exceeded: {err}", file=sys.stderr)
        emit(cfg, rows or [{}], "csv", status="partial:cap_exceeded")
        return EXIT_CAP
    except (InvariantError, AssertionError) as err:
        print(f"invariant failure: {err}", file=sys.stderr)
        if rows:
            emit(cfg, rows, "csv", status="invariant_failure")
        return EXIT_INVARIANT
    emit(cfg, rows, fmt)
    return 0
