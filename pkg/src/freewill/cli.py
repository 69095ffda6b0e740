"""Command-line front end.

Every command prints (or writes) a report::

    {"command": ..., "config": ..., "results": ..., "std_errors": ...,
     "version": ..., "wall_time": ...}

Exit status: 0 on success, 2 on usage errors, 3 on solver failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import secrets
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .chsh import TOY_SETTINGS, analytic_quad, bound_check, chsh_max, chsh_values, quantum_optimal_settings
from .core import RandomStream, UnitVec3, unit
from .estimator import estimate_correlator, estimate_joint, estimate_quad, marginal_scan
from .lpopt import SolverError, min_m_for_chsh, min_m_for_correlators
from .mdep import MI_CLOSED_FORM, free_will, m_supremum, mutual_information_onesided
from .models import KINDS, Model, ToyTable, make_model

COMMANDS = ("simulate", "chsh", "mdep", "mutualinfo", "optimize", "table", "sweep")
EXIT_USAGE = 2
EXIT_SOLVER = 3
MC_SIGMAS = 5.0
# analytic B against an M that came out of quadrature
QUADRATURE_TOL = 1e-9

DEFAULTS = {
    "model": "singlet-onesided",
    "p": 0.5,
    "a": 1,
    "b": 1,
    "settings": "optimal",
    "shots": 1_000_000,
    "seed": 0,
    "workers": 1,
    "format": "json",
    "output": None,
    "target_b": None,
    "quad": None,
    "p_range": None,
    "b_range": None,
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    model: str = DEFAULTS["model"]
    p: float = DEFAULTS["p"]
    a: int = DEFAULTS["a"]
    b: int = DEFAULTS["b"]
    settings: str = DEFAULTS["settings"]
    shots: int = DEFAULTS["shots"]
    seed: int = DEFAULTS["seed"]
    workers: int = DEFAULTS["workers"]
    format: str = DEFAULTS["format"]
    output: Optional[str] = None
    target_b: Optional[float] = None
    quad: Optional[str] = None
    p_range: Optional[str] = None
    b_range: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.model not in KINDS:
            raise UsageError(f"unknown model {self.model!r}; expected one of {KINDS}")
        if int(self.shots) < 1:
            raise UsageError("--shots must be >= 1")
        if not (0 <= int(self.seed) < 1 << 64):
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")

    def build_model(self) -> Model:
        try:
            if self.model == "toy-table":
                return make_model(self.model, p=float(self.p), a=int(self.a), b=int(self.b))
            return make_model(self.model)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def stream(self) -> RandomStream:
        return RandomStream(int(self.seed), 0, 0)


@dataclass
class Report:
    command: str
    config: dict
    results: dict
    std_errors: dict = field(default_factory=dict)
    version: str = __version__
    wall_time: float = 0.0
    rows: Optional[list] = None

    def payload(self) -> dict:
        """Everything except the wall time; identical configs give identical payloads."""
        d = {"command": self.command, "config": self.config, "results": self.results,
             "std_errors": self.std_errors, "version": self.version}
        if self.rows is not None:
            d["rows"] = self.rows
        return d

    def to_json(self) -> str:
        d = self.payload()
        d["wall_time"] = self.wall_time
        return json.dumps(d, indent=2, allow_nan=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.rows is not None:
            cols = list(self.rows[0].keys()) if self.rows else []
            w.writerow(cols)
            for row in self.rows:
                w.writerow([_fmt(row[c]) for c in cols])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(self.results):
                w.writerow([k, _fmt(v)])
            for k, v in _flatten(self.std_errors, "std_error"):
                w.writerow([k, _fmt(v)])
        return buf.getvalue()


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            yield from _flatten(v, key)
        elif isinstance(v, list):
            for i, item in enumerate(v):
                if isinstance(item, dict):
                    yield from _flatten(item, f"{key}.{i}")
                else:
                    yield f"{key}.{i}", item
        else:
            yield key, v


def parse_settings(text: str) -> dict[str, UnitVec3]:
    """Parse ``optimal`` or entries such as ``X=1,0,0 X'=0,1,0`` (also ``;``-separated)."""
    text = text.strip()
    if text == "optimal":
        return quantum_optimal_settings()
    out: dict[str, UnitVec3] = {}
    # entries are name=x,y,z; split on whitespace/';' or on a comma that starts a new name
    tokens = [t for chunk in text.replace(";", " ").split() for t in _split_entries(chunk)]
    if not tokens:
        raise UsageError("empty settings specification")
    for tok in tokens:
        name, sep, rest = tok.partition("=")
        parts = rest.split(",")
        if not sep or not name or len(parts) != 3:
            raise UsageError(f"cannot parse setting {tok!r}; expected name=x,y,z")
        try:
            out[name] = unit(*(float(p) for p in parts))
        except ValueError as exc:
            raise UsageError(f"bad setting {tok!r}: {exc}") from exc
    return out


def _split_entries(chunk: str) -> list[str]:
    pieces = chunk.split(",")
    entries, cur = [], []
    for piece in pieces:
        if "=" in piece and cur:
            entries.append(",".join(cur))
            cur = []
        cur.append(piece)
    if cur:
        entries.append(",".join(cur))
    return entries


def _parse_range(text: str, flag: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"{flag} expects start:stop:step, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"{flag}: need start <= stop and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.array([start + i * step for i in range(n)])


def _vec(v) -> list:
    return [v.x, v.y, v.z] if isinstance(v, UnitVec3) else v


def _model_settings(cfg: RunConfig, model: Model) -> dict:
    if isinstance(model, ToyTable):
        return dict(TOY_SETTINGS)
    return parse_settings(cfg.settings)


def _party(settings: dict, letter: str) -> list[str]:
    return [k for k in settings if k.startswith(letter)]


def _cmd_simulate(cfg, model):
    settings = _model_settings(cfg, model)
    alice, bob = _party(settings, "X"), _party(settings, "Y")
    if not alice or not bob:
        raise UsageError("simulate needs at least one X* and one Y* setting")
    stream = cfg.stream()
    pairs, errors = [], {}
    for i, x in enumerate(alice):
        for j, y in enumerate(bob):
            sub = stream.spawn(i * len(bob) + j)
            est = estimate_correlator(model, settings[x], settings[y], cfg.shots, sub, cfg.workers)
            joint = estimate_joint(model, settings[x], settings[y], cfg.shots, sub, cfg.workers)
            pairs.append({
                "alice": x, "bob": y,
                "correlator": est.mean,
                "analytic": model.correlator(settings[x], settings[y]),
                "joint": {f"{a:+d}{b:+d}": joint.p(a, b) for a in (1, -1) for b in (1, -1)},
            })
            errors[f"{x}{y}"] = est.std_error
    scan = marginal_scan(model, [settings[k] for k in alice], [settings[k] for k in bob],
                         cfg.shots, stream.spawn(10_000), cfg.workers)
    results = {
        "settings": {k: _vec(v) for k, v in settings.items()},
        "pairs": pairs,
        "marginals": {
            "alice_p_plus": scan.alice.tolist(),
            "bob_p_plus": scan.bob.tolist(),
            "alice_variation": scan.alice_variation.tolist(),
            "alice_variation_sigma": scan.alice_sigma.tolist(),
            "bob_variation": scan.bob_variation.tolist(),
            "bob_variation_sigma": scan.bob_sigma.tolist(),
        },
    }
    return results, errors


def _cmd_chsh(cfg, model):
    settings = _model_settings(cfg, model)
    missing = [k for k in ("X", "X'", "Y", "Y'") if k not in settings]
    if missing:
        raise UsageError(f"chsh needs settings X, X', Y, Y'; missing {missing}")
    exact = analytic_quad(model, settings).as_array()
    ests = estimate_quad(model, settings, cfg.shots, cfg.stream(), cfg.workers)
    mc = np.array([e.mean for e in ests])
    ses = np.array([e.std_error for e in ests])
    rep = m_supremum(model)
    b_exact, k_exact = chsh_max(exact)
    b_mc, k_mc = chsh_max(mc)
    sigma_b = float(np.sqrt(np.sum(ses ** 2)))
    tol_exact = QUADRATURE_TOL if rep.method == "quadrature" else 0.0
    results = {
        "settings": {k: _vec(v) for k, v in settings.items()},
        "correlators_analytic": exact.tolist(),
        "correlators_mc": mc.tolist(),
        "chsh_values_mc": chsh_values(mc).tolist(),
        "B_analytic": b_exact,
        "B_analytic_variant": k_exact,
        "B_mc": b_mc,
        "B_mc_variant": k_mc,
        "M": rep.m,
        "F": rep.f,
        "bound": 2.0 + rep.m,
        "satisfied_analytic": bound_check(b_exact, rep.m, tol_exact),
        "satisfied_mc": bound_check(b_mc, rep.m, MC_SIGMAS * sigma_b),
    }
    errors = {"correlators_mc": ses.tolist(), "B_mc": sigma_b}
    return results, errors


def _cmd_mdep(cfg, model):
    rep = m_supremum(model)
    return {
        "M": rep.m,
        "F": rep.f,
        "argmax_pair": rep.argmax_pair,
        "method": rep.method,
        "dependence_percent": rep.dependence_percent,
        "independence_percent": rep.independence_percent,
        "percent_convention": "dependence = 100*M/2, independence = 100*F",
    }, {}


def _cmd_mutualinfo(cfg, model):
    mi = mutual_information_onesided()
    return {"mutual_information_bits": mi, "closed_form": MI_CLOSED_FORM,
            "abs_difference": abs(mi - MI_CLOSED_FORM)}, {}


def _cmd_optimize(cfg, model):
    if (cfg.target_b is None) == (cfg.quad is None):
        raise UsageError("optimize needs exactly one of --target-b or --quad")
    try:
        if cfg.target_b is not None:
            sol = min_m_for_chsh(float(cfg.target_b))
        else:
            sol = min_m_for_correlators([float(v) for v in cfg.quad.split(",")])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = sol.to_dict()
    if sol.status == "optimal":
        out["F"] = free_will(min(max(sol.m_star, 0.0), 2.0))
    return out, {}


def _cmd_table(cfg, model):
    toy = ToyTable(float(cfg.p), int(cfg.a), int(cfg.b)) if not isinstance(model, ToyTable) else model
    exact = analytic_quad(toy, TOY_SETTINGS).as_array()
    ests = estimate_quad(toy, TOY_SETTINGS, cfg.shots, cfg.stream(), cfg.workers)
    mc = np.array([e.mean for e in ests])
    ses = np.array([e.std_error for e in ests])
    rep = m_supremum(toy)
    b = float(exact @ np.array([1, 1, 1, -1]))
    sigma_b = float(np.sqrt(np.sum(ses ** 2)))
    results = {
        "p": toy.p, "a": toy.a, "b": toy.b,
        "correlators_analytic": exact.tolist(),
        "correlators_mc": mc.tolist(),
        "B": b,
        "B_mc": float(mc @ np.array([1, 1, 1, -1])),
        "M": rep.m,
        "F": rep.f,
        "bound": 2.0 + rep.m,
        "satisfied": bound_check(b, rep.m, 0.0),
        "at_equality": b == 2.0 + rep.m,
    }
    return results, {"correlators_mc": ses.tolist(), "B_mc": sigma_b}


def _cmd_sweep(cfg, model):
    if (cfg.p_range is None) == (cfg.b_range is None):
        raise UsageError("sweep needs exactly one of --p-range or --b-range")
    rows = []
    if cfg.p_range is not None:
        for p in _parse_range(cfg.p_range, "--p-range"):
            if not (0.0 <= p <= 1.0 + 1e-12):
                raise UsageError(f"p={p} outside [0, 1]")
            toy = ToyTable(min(float(p), 1.0), int(cfg.a), int(cfg.b))
            b = float(analytic_quad(toy, TOY_SETTINGS).as_array() @ np.array([1, 1, 1, -1]))
            rep = m_supremum(toy)
            sol = min_m_for_chsh(b)
            rows.append({"p": toy.p, "chsh_B": b, "M": rep.m, "F": rep.f, "m_star": sol.m_star})
    else:
        for b in _parse_range(cfg.b_range, "--b-range"):
            if not (2.0 <= b <= 4.0 + 1e-12):
                raise UsageError(f"B={b} outside [2, 4]")
            b = min(float(b), 4.0)
            sol = min_m_for_chsh(b)
            m = min(max(sol.m_star, 0.0), 2.0)
            rows.append({"B": b, "chsh_B": b, "M": sol.m_star, "F": free_will(m), "m_star": sol.m_star})
    return {"n_rows": len(rows)}, {}, rows


_DISPATCH = {
    "simulate": _cmd_simulate,
    "chsh": _cmd_chsh,
    "mdep": _cmd_mdep,
    "mutualinfo": _cmd_mutualinfo,
    "optimize": _cmd_optimize,
    "table": _cmd_table,
    "sweep": _cmd_sweep,
}


def run(cfg: RunConfig) -> Report:
    """Execute one command and return its report."""
    t0 = time.perf_counter()
    model = cfg.build_model()
    out = _DISPATCH[cfg.command](cfg, model)
    rows = None
    if len(out) == 3:
        results, errors, rows = out
    else:
        results, errors = out
    config = {k: v for k, v in asdict(cfg).items() if k not in ("output", "format")}
    return Report(cfg.command, config, results, errors, __version__, time.perf_counter() - t0, rows)


def sweep(cfg: RunConfig) -> Report:
    if cfg.command != "sweep":
        cfg = RunConfig(**{**asdict(cfg), "command": "sweep"})
    return run(cfg)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [freewill] section; flags override it")
    common.add_argument("--model", choices=KINDS)
    common.add_argument("--p", type=float, help="toy-table parameter p in [0, 1]")
    common.add_argument("--a", type=int, choices=(1, -1), help="toy-table outcome sign a")
    common.add_argument("--b", type=int, choices=(1, -1), help="toy-table outcome sign b")
    common.add_argument("--settings", help="'optimal' or entries like X=1,0,0;X'=0,1,0")
    common.add_argument("--shots", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--entropy", action="store_true", help="draw the seed from the OS")
    common.add_argument("--workers", type=int)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--output", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="freewill", description="One-sided measurement-dependence lab")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "optimize":
            sp.add_argument("--target-b", type=float, dest="target_b")
            sp.add_argument("--quad", help="four correlators XY,XY',X'Y,X'Y'")
        if name == "sweep":
            sp.add_argument("--p-range", dest="p_range", help="start:stop:step")
            sp.add_argument("--b-range", dest="b_range", help="start:stop:step")
    return parser


_CASTS = {"p": float, "a": int, "b": int, "shots": int, "seed": int, "workers": int, "target_b": float}


def _read_config_file(path: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    if "freewill" not in cp:
        raise UsageError(f"config file {path!r} has no [freewill] section")
    out = {}
    for key, value in cp["freewill"].items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        out[key] = _CASTS.get(key, str)(value)
    return out


def config_from_args(argv=None) -> RunConfig:
    args = _build_parser().parse_args(argv)
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(_read_config_file(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if args.entropy:
        merged["seed"] = secrets.randbits(64)
    return RunConfig(command=args.command, **merged)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        report = run(cfg)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_json() if cfg.format == "json" else report.to_csv()
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
