"""Command-line interface.

    pdmse spectrum --model t1r1 --A 5 --B 1 --lambda 1 --nmax 4
    pdmse wavefunction --model t1r1 --A 5 --B 1 --lambda 1 --n 0
    pdmse verify [--suite hermite] [--perturb 1e-3]
    pdmse qes --case 2a --b2 2
    pdmse sweep [--lambdas 0.1,0.01,0.001,0.0001]
    pdmse poly --n 4

Exit codes: 0 pass, 2 usage or configuration error, 3 verification
failure, 4 numerical non-convergence. Data files hold no timestamps; with
``--output`` a sidecar ``<output>.meta.json`` carries the resolved
configuration and a timestamp.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import __version__, catalog, numerics, qes, special, susy, verify
from .catalog import CatalogError, ModelId, ModelParams
from .kernels import BACKEND

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_NUMERIC = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument parsing and configuration merge
# ---------------------------------------------------------------------------

_MODEL_DEFAULTS = {"model": None, "A": 0.0, "B": 0.0, "lam": 1.0, "alpha": 1.0, "row4_compat": False}

DEFAULTS = {
    "spectrum": dict(_MODEL_DEFAULTS, nmax=3, npoints=None, scale=1.0, tol=1e-6, form="z"),
    "wavefunction": dict(_MODEL_DEFAULTS, n=0, npoints=None, scale=1.0, case=None, tol=1e-6),
    "verify": {"suite": None, "nmax": None, "perturb": 0.0},
    "qes": {"case": "1", "b1": 0.0, "b2": 0.0, "b3": 0.0, "lam": 1.0, "npoints": 4001, "tol": 1e-7,
            "method": "analytic"},
    "sweep": {"alpha": 1.0, "lambdas": "0.1,0.01,0.001,0.0001", "nmax": 3, "include_zero": False,
              "npoints": 4001},
    "poly": {"n": None, "nmax": None, "route": "all"},
}

_COMMON = {"output": None, "format": None}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_model(p):
    p.add_argument("--model")
    p.add_argument("--A", type=float)
    p.add_argument("--B", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--row4-compat", dest="row4_compat", action="store_true")


def _add_common(p):
    p.add_argument("--config")
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser():
    parser = _Parser(prog="pdmse", description=__doc__.split("\n")[0],
                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=f"pdmse {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("spectrum", argument_default=argparse.SUPPRESS)
    _add_model(p)
    p.add_argument("--nmax", type=int)
    p.add_argument("--npoints", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--form", choices=("z", "x"))
    _add_common(p)

    p = sub.add_parser("wavefunction", argument_default=argparse.SUPPRESS)
    _add_model(p)
    p.add_argument("--n", type=int)
    p.add_argument("--npoints", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--case", choices=("ApBn", "AnBp"))
    p.add_argument("--tol", type=float)
    _add_common(p)

    p = sub.add_parser("verify", argument_default=argparse.SUPPRESS)
    p.add_argument("--suite", action="append")
    p.add_argument("--nmax", type=int)
    p.add_argument("--perturb", type=float)
    _add_common(p)

    p = sub.add_parser("qes", argument_default=argparse.SUPPRESS)
    p.add_argument("--case")
    p.add_argument("--b1", type=complex)
    p.add_argument("--b2", type=complex)
    p.add_argument("--b3", type=complex)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--npoints", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--method", choices=("analytic", "fd"))
    _add_common(p)

    p = sub.add_parser("sweep", argument_default=argparse.SUPPRESS)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambdas")
    p.add_argument("--nmax", type=int)
    p.add_argument("--include-zero", dest="include_zero", action="store_true")
    p.add_argument("--npoints", type=int)
    _add_common(p)

    p = sub.add_parser("poly", argument_default=argparse.SUPPRESS)
    p.add_argument("--n", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--route", choices=("all", "rodrigues", "generating", "recursion"))
    _add_common(p)
    return parser


def _load_config(path, command):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    out = {}
    allowed = set(DEFAULTS[command]) | set(_COMMON) | {"command", "lambda"}
    for key, value in data.items():
        if key not in allowed:
            raise ConfigError(f"unknown config field {key!r}")
        if key == "command":
            if value != command:
                raise ConfigError(f"config is for {value!r}, not {command!r}")
            continue
        if key == "model" and isinstance(value, dict):
            # a full model spec as accepted by the catalog
            try:
                mid, p = catalog.model_from_json(value)
            except CatalogError as exc:
                raise ConfigError(str(exc)) from exc
            out.update(model=mid.value, A=p.A, B=p.B, lam=p.lam, alpha=p.alpha, row4_compat=p.row4_compat)
            continue
        out["lam" if key == "lambda" else key] = value
    return out


def resolve(argv):
    """(command, cfg) with defaults < config file < command-line flags."""
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command", None)
    if command is None:
        raise ConfigError("a command is required")
    cfg = dict(DEFAULTS[command])
    cfg.update(_COMMON)
    path = ns.pop("config", None)
    if path:
        cfg.update(_load_config(path, command))
    cfg.update(ns)
    if cfg["format"] is None:
        cfg["format"] = "json" if command in ("verify", "qes", "poly") else "csv"
    return command, cfg


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json(obj):
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def _emit(cfg, command, text, meta):
    meta = dict(meta)
    meta.setdefault("command", command)
    meta.setdefault("config", {k: v for k, v in cfg.items() if k not in ("output",)})
    meta.setdefault("backend", BACKEND)
    meta.setdefault("version", __version__)
    if cfg.get("output"):
        with open(cfg["output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        sidecar = {"header": {"timestamp": datetime.now(timezone.utc).isoformat()}, "metadata": meta}
        with open(cfg["output"] + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_json(sidecar))
    else:
        sys.stdout.write(text)
        sys.stderr.write(json.dumps(_plain(meta), sort_keys=True) + "\n")


def _model(cfg):
    if not cfg.get("model"):
        raise ConfigError("--model is required")
    try:
        mid = ModelId(cfg["model"])
    except ValueError as exc:
        raise ConfigError(f"unknown model {cfg['model']!r}") from exc
    p = ModelParams(A=float(cfg["A"]), B=float(cfg["B"]), lam=float(cfg["lam"]),
                    alpha=float(cfg["alpha"]), row4_compat=bool(cfg["row4_compat"]))
    catalog.validate(mid, p)
    return mid, p


def _rel(a, b):
    if a is None or b is None:
        return None
    return abs(complex(a) - complex(b)) / max(1.0, abs(complex(b)))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _nlo_shape_levels(p, nmax):
    """eps_m through the shape-invariant row the oscillator maps onto."""
    if p.lam == 0:
        return [m + 0.5 for m in range(nmax + 1)]
    row = ModelId.T1R1 if p.lam > 0 else ModelId.T1R5
    q = ModelParams(A=p.alpha / p.k, B=0.0, lam=p.lam)
    shape = susy.shape_invariance_spectrum(row, q, nmax).energies()
    # g/lam - A^2 sign(lam) = alpha, so 2 alpha eps = E + alpha on either side
    return [(e.real + p.alpha) / (2 * p.alpha) for e in shape]


def cmd_spectrum(cfg):
    mid, p = _model(cfg)
    desc = catalog.describe(mid, p)
    nmax = int(cfg["nmax"])
    if desc.level_bound is not None and nmax > desc.level_bound:
        raise catalog.LevelBoundError(f"nmax {nmax} exceeds the level bound {desc.level_bound}")
    closed = [e for _, e in catalog.closed_form_spectrum(mid, p, nmax).levels]
    if mid is ModelId.NLO:
        shape = _nlo_shape_levels(p, nmax)
    else:
        shape = list(susy.shape_invariance_spectrum(mid, p, nmax).energies())
    num = catalog.numerical_spectrum(mid, p, nmax + 1, form=cfg["form"], npoints=cfg["npoints"],
                                     scale=float(cfg["scale"])).energies()
    tol = float(cfg["tol"])
    rows, worst = [], 0.0
    for n in range(nmax + 1):
        d = [_rel(closed[n], shape[n]), _rel(num[n], closed[n]), _rel(num[n], shape[n])]
        worst = max([worst] + [x for x in d if x is not None])
        rows.append([n, complex(closed[n]).real, complex(shape[n]).real, num[n].real, num[n].imag] + d)
    header = ["n", "E_closed", "E_shape", "E_numeric", "E_numeric_im",
              "dev_closed_shape", "dev_closed_numeric", "dev_shape_numeric"]
    overlaps = [] if mid is ModelId.NLO else catalog.level_overlaps(mid, p, nmax)
    ok = worst <= tol and all(v > 0.9 for v in overlaps)
    meta = {"max_deviation": worst, "pass": ok, "level_bound": desc.level_bound, "level_overlaps": overlaps}
    if cfg["format"] == "json":
        text = _json({"metadata": {"model": catalog.model_to_json(mid, p), "tol": tol},
                      "columns": header, "rows": rows})
    else:
        text = _csv(header, rows)
    _emit(cfg, "spectrum", text, meta)
    return EXIT_OK if ok else EXIT_FAIL


def _align(num, ref):
    ip = numerics.inner_product_mu(num, ref)
    ovl = abs(ip) / (numerics.norm_mu(num) * numerics.norm_mu(ref))
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return num.scaled(phase), ovl


def _wavefunction_broken(cfg):
    case = cfg["case"]
    if case is None:
        raise ConfigError("--case is required for the broken model")
    p = ModelParams(A=float(cfg["A"]), B=float(cfg["B"]), lam=float(cfg["lam"]))
    n = int(cfg["n"])
    if n < 0:
        raise catalog.LevelBoundError("level index must be non-negative")
    spec = susy.broken_superpotential(p)
    energy = susy.broken_susy_spectrum(p, case, n).levels[n][1]
    npts = int(cfg["npoints"] or numerics.DEFAULT_NPOINTS)
    grid = numerics.Grid("z", spec.z_domain[0], spec.z_domain[1], npts)
    z = grid.points
    x = np.sin(p.k * z) / p.k
    vals = np.zeros(z.size, dtype=complex)
    vals[1:-1] = susy.broken_susy_wavefunction(p, case, n, x[1:-1])
    closed = numerics.GridFunction(grid, vals)
    closed = closed.scaled(1.0 / numerics.norm_mu(closed))

    def pot(zz):
        with np.errstate(invalid="ignore", over="ignore"):
            w = spec.W(zz)
            return w * w - spec.dW(zz)

    op = numerics.build_operator_z(pot, grid)
    pairs = numerics.eigensolve(op, n + 1)
    num, ovl = _align(pairs[n][1], closed)
    xg = numerics.Grid("x", 1e-3 / p.k, (1.0 - 1e-3) / p.k, npts)
    psi_x = numerics.GridFunction(xg, susy.broken_susy_wavefunction(p, case, n, xg.points) + 0j)
    res = susy.pdmse_residual(lambda xx: susy.broken_partner_potential_x(p, xx, -1), p.lam, energy, psi_x)
    meta = {"overlap": ovl, "E_closed": energy, "E_numeric": pairs[n][0], "residual": res,
            "pass": bool(res < 1e-6 and 1.0 - ovl < 1e-6)}
    return x, closed, num, meta


def cmd_wavefunction(cfg):
    n = int(cfg["n"])
    if cfg.get("model") == "sp":
        x, closed, num, meta = _wavefunction_broken(cfg)
    else:
        mid, p = _model(cfg)
        desc = catalog.describe(mid, p)
        if n < 0 or (desc.level_bound is not None and n > desc.level_bound):
            raise catalog.LevelBoundError(f"level {n} exceeds the level bound {desc.level_bound}")
        npts = cfg["npoints"]
        if npts is None:
            npts = numerics.DEFAULT_NPOINTS if desc.hermitian else numerics.DEFAULT_COMPLEX_NPOINTS
        grid = catalog.default_z_grid(mid, p, int(npts), float(cfg["scale"]))
        z = grid.points
        vals = catalog.wavefunction_z(mid, p, n, z)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        closed = numerics.GridFunction(grid, vals)
        closed = closed.scaled(1.0 / numerics.norm_mu(closed))
        op = numerics.build_operator_z(lambda zz: catalog.potential_z(mid, p, zz), grid)
        pairs = numerics.eigensolve(op, n + 1)
        num, ovl = _align(pairs[n][1], closed)
        x = catalog.inverse_coordinate_map(z, p.lam) if p.lam >= 0 else np.sin(p.k * z) / p.k
        e_num = pairs[n][0] / (2 * p.alpha) if mid is ModelId.NLO else pairs[n][0]
        meta = {"overlap": ovl, "E_closed": catalog.energy_level(mid, p, n), "E_numeric": e_num,
                "pass": bool(1.0 - ovl < float(cfg["tol"]))}
    header = ["x", "psi_re", "psi_im", "psi_numeric_re", "psi_numeric_im"]
    rows = [[float(xi), c.real, c.imag, v.real, v.imag] for xi, c, v in zip(x, closed.values, num.values)]
    if cfg["format"] == "json":
        text = _json({"metadata": meta, "columns": header, "rows": rows})
    else:
        text = _csv(header, rows)
    _emit(cfg, "wavefunction", text, meta)
    return EXIT_OK if meta["pass"] else EXIT_FAIL


def _suite_names(cfg):
    names = []
    for item in cfg["suite"] or []:
        names.extend(s for s in str(item).split(",") if s)
    for s in names:
        if s not in verify.SUITES:
            raise ConfigError(f"unknown suite {s!r}; known: {', '.join(verify.SUITES)}")
    return names


def cmd_verify(cfg):
    names = _suite_names(cfg)
    report = verify.run_all(names, perturb=float(cfg["perturb"]),
                            nmax=None if cfg["nmax"] is None else int(cfg["nmax"]))
    for r in report["suites"]:
        r.pop("seconds", None)
    if cfg["format"] == "csv":
        rows = [[r["suite"], c["name"], c["value"], c["tol"], c["pass"]]
                for r in report["suites"] for c in r["checks"]]
        text = _csv(["suite", "check", "value", "tol", "pass"], rows)
    else:
        text = _json(report)
    _emit(cfg, "verify", text, {"pass": report["pass"],
                                "suites": {r["suite"]: r["pass"] for r in report["suites"]}})
    return EXIT_OK if report["pass"] else EXIT_FAIL


_QES_CASES = {"1": "C1", "2a": "C2a", "2b": "C2b", "3": "C3"}


def cmd_qes(cfg):
    key = str(cfg["case"]).lower().lstrip("c")
    if key not in _QES_CASES:
        raise ConfigError(f"unknown QES case {cfg['case']!r}")
    try:
        qcfg = qes.QesConfig(_QES_CASES[key], b1=complex(cfg["b1"]), b2=complex(cfg["b2"]),
                             b3=complex(cfg["b3"]), lam=float(cfg["lam"]))
        report = qes.qes_report(qcfg, qes.default_qes_grid(int(cfg["npoints"])), cfg["method"])
    except qes.QesError as exc:
        raise ConfigError(str(exc)) from exc
    ok = all(r < float(cfg["tol"]) for r in report["residual"])
    if cfg["format"] == "csv":
        rows = []
        for br, e, a0, res in zip(report["branch"], report["E"], report["a0"], report["residual"]):
            e = complex(*e) if isinstance(e, list) else complex(e)
            a = None if a0 is None else (complex(*a0) if isinstance(a0, list) else complex(a0))
            rows.append([br, e.real, e.imag, None if a is None else a.real, None if a is None else a.imag, res])
        text = _csv(["branch", "E_re", "E_im", "a0_re", "a0_im", "residual"], rows)
    else:
        text = _json(report)
    _emit(cfg, "qes", text, {"pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def _threads():
    raw = os.environ.get("PDMSE_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError as exc:
        raise ConfigError("PDMSE_THREADS must be an integer") from exc
    return max(1, cap)


def cmd_sweep(cfg):
    try:
        lams = [float(v) for v in str(cfg["lambdas"]).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad lambda list: {exc}") from exc
    if any(l < 0 for l in lams) or not lams:
        raise ConfigError("the sweep needs non-negative lambdas")
    if cfg["include_zero"] and 0.0 not in lams:
        lams.append(0.0)
    alpha, nmax, npts = float(cfg["alpha"]), int(cfg["nmax"]), int(cfg["npoints"])

    def one(lam):
        return catalog.harmonic_limit_report(alpha, (lam,), nmax=nmax, npoints=npts)["rows"][0]

    with ThreadPoolExecutor(max_workers=min(_threads(), len(lams))) as pool:
        rows = list(pool.map(one, lams))
    mono = catalog.monotone_summary(rows)
    ok = all(mono.values())
    pq = math.pi**-0.25
    header = ["lambda", "V_dev", "overlap0_dev", "E_dev_max", "E_harmonic_dev_max", "Nprime0", "Nprime0_dev"]
    table = [[r["lambda"], r["V_dev"], 1.0 - r["overlap"][0], max(r["E_dev"]), max(r["E_harmonic_dev"]),
              r["Nprime"][0], abs(r["Nprime"][0] - pq)] for r in rows]
    if cfg["format"] == "json":
        text = _json({"alpha": alpha, "monotone": mono, "columns": header, "rows": table})
    else:
        text = _csv(header, table)
    _emit(cfg, "sweep", text, {"monotone": mono, "pass": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_poly(cfg):
    if cfg["n"] is not None:
        degrees = [int(cfg["n"])]
    else:
        degrees = list(range(int(cfg["nmax"] if cfg["nmax"] is not None else 4) + 1))
    routes = ("rodrigues", "generating", "recursion") if cfg["route"] == "all" else (cfg["route"],)
    try:
        polys = {r: {n: special.deformed_hermite(n, r) for n in degrees} for r in routes}
    except special.DegreeLimitError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["format"] == "csv":
        rows = []
        for r in routes:
            for n in degrees:
                for (dy, dl), c in sorted(polys[r][n].coeffs.items()):
                    rows.append([r, n, dy, dl, str(c)])
        text = _csv(["route", "n", "deg_y", "deg_Lambda", "coefficient"], rows)
    else:
        text = _json({r: {str(n): polys[r][n].to_json() for n in degrees} for r in routes})
    agree = all(polys[routes[0]][n] == polys[r][n] for r in routes for n in degrees)
    _emit(cfg, "poly", text, {"routes_agree": agree})
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "qes": cmd_qes,
    "sweep": cmd_sweep,
    "poly": cmd_poly,
}


def main(argv=None):
    try:
        command, cfg = resolve(sys.argv[1:] if argv is None else argv)
        return COMMANDS[command](cfg)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ConfigError, CatalogError, qes.QesError, susy.GridTooCoarseError) as exc:
        sys.stderr.write(f"pdmse: error: {exc}\n")
        return EXIT_USAGE
    except (numerics.ConvergenceError, ArithmeticError) as exc:
        sys.stderr.write(f"pdmse: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
