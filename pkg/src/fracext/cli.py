"""Command-line surface: configure an operator, run computations, emit tables.

Config files are JSON with a schema-versioned header key; output tables
are CSV (RFC 4180) or JSON arrays of row objects.  Complex numbers are
serialized as {"re": x, "im": y} in JSON and "re;im" cells in CSV.

Exit codes: 0 ok, 2 usage/config error, 3 numerical failure.  The
FRACEXT_THREADS environment variable caps internal parallelism of the
z-grid evaluations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import verify as verify_mod
from .extension import (
    SIGMA_BAND,
    ExtensionSolver,
    neumann_trace,
    quotient_trace,
    solve_cosine_form,
    solve_cosine_fractional,
    solve_fractional_data,
    solve_regularized,
    solve_semigroup_form,
)
from .families import cosine_family, heat_semigroup, integrate_family, integrated_cosine
from .funcalc import balakrishnan_power, integrated_power, spectral_power_oracle
from .operators import LinearOperator, build_fourier_multiplier, build_laplacian_1d
from .quadrature import QuadratureError
from .specfun import ConvergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SCHEMA = "fracext/1"

_SYMBOLS = {
    "i_xi": lambda xi: 1j * xi,
    "i_xi3": lambda xi: 1j * xi ** 3,
    "minus_xi2": lambda xi: -xi ** 2,
}


class ConfigError(ValueError):
    pass


def _threads() -> int:
    raw = os.environ.get("FRACEXT_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"FRACEXT_THREADS must be an integer, got {raw!r}") from exc
        return max(1, n)
    return min(4, os.cpu_count() or 1)


def _decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, str) and ";" in v:
        re_s, im_s = v.split(";", 1)
        return complex(float(re_s), float(im_s))
    raise ConfigError(f"cannot parse complex value {v!r}")


def _encode_complex(z: complex):
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return {"re": z.real, "im": z.imag}


@dataclass
class ProblemConfig:
    operator: dict
    sigma: complex
    family: dict = field(default_factory=lambda: {"kind": "semigroup", "alpha": 0.0})
    method: str = "all"
    z_grid: list = field(default_factory=list)
    trace_grid: dict = field(default_factory=lambda: {
        "y0": 0.5, "ratio": 0.7, "count": 13, "theta": 0.0})
    f: object = None
    tol: float = 1e-6
    seed: int = 0
    output: dict = field(default_factory=lambda: {"path": "-", "format": "csv"})

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "operator": dict(self.operator),
            "sigma": _encode_complex(self.sigma),
            "family": dict(self.family),
            "method": self.method,
            "z_grid": [_encode_complex(z) for z in self.z_grid],
            "trace_grid": dict(self.trace_grid),
            "f": self.f,
            "tol": self.tol,
            "seed": self.seed,
            "output": dict(self.output),
        }


def parse_config(data: dict) -> ProblemConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ConfigError(f"config schema must be {SCHEMA!r}, got {data.get('schema')!r}")
    if "operator" not in data or "sigma" not in data:
        raise ConfigError("config needs 'operator' and 'sigma'")
    sigma = _decode_complex(data["sigma"])
    if not (SIGMA_BAND[0] < sigma.real < SIGMA_BAND[1]):
        raise ConfigError(
            f"Re(sigma) = {sigma.real:g} outside the supported band "
            f"({SIGMA_BAND[0]}, {SIGMA_BAND[1]})"
        )
    cfg = ProblemConfig(
        operator=dict(data["operator"]),
        sigma=sigma,
        family=dict(data.get("family", {"kind": "semigroup", "alpha": 0.0})),
        method=str(data.get("method", "all")),
        z_grid=[_decode_complex(z) for z in data.get("z_grid", [])],
        trace_grid=dict(data.get("trace_grid", {"y0": 0.5, "ratio": 0.7,
                                                "count": 13, "theta": 0.0})),
        f=data.get("f"),
        tol=float(data.get("tol", 1e-6)),
        seed=int(data.get("seed", 0)),
        output=dict(data.get("output", {"path": "-", "format": "csv"})),
    )
    if cfg.tol <= 0:
        raise ConfigError("tol must be positive")
    round_trip = parse_config_novalidate(cfg.to_dict())
    if round_trip.to_dict() != cfg.to_dict():
        raise ConfigError("config does not round-trip")
    return cfg


def parse_config_novalidate(data: dict) -> ProblemConfig:
    return ProblemConfig(
        operator=dict(data["operator"]),
        sigma=_decode_complex(data["sigma"]),
        family=dict(data.get("family")),
        method=str(data.get("method")),
        z_grid=[_decode_complex(z) for z in data.get("z_grid", [])],
        trace_grid=dict(data.get("trace_grid")),
        f=data.get("f"),
        tol=float(data.get("tol")),
        seed=int(data.get("seed")),
        output=dict(data.get("output")),
    )


def build_operator(cfg: ProblemConfig) -> LinearOperator:
    spec = cfg.operator
    kind = spec.get("kind")
    if kind == "laplacian":
        return build_laplacian_1d(int(spec.get("size", 8)),
                                  float(spec.get("spacing", 1.0)),
                                  str(spec.get("boundary", "dirichlet")))
    if kind == "diagonal":
        entries = [_decode_complex(v) for v in spec.get("entries", [])]
        if not entries:
            raise ConfigError("diagonal operator needs nonempty 'entries'")
        return LinearOperator("diagonal", entries)
    if kind == "fourier":
        name = spec.get("symbol")
        if name not in _SYMBOLS:
            raise ConfigError(f"unknown symbol {name!r}; choose from {sorted(_SYMBOLS)}")
        modes = spec.get("modes", [])
        if not modes:
            raise ConfigError("fourier operator needs nonempty 'modes'")
        return build_fourier_multiplier(_SYMBOLS[name], [float(m) for m in modes])
    raise ConfigError(f"unknown operator kind {kind!r}")


def build_family(cfg: ProblemConfig, A: LinearOperator):
    kind = cfg.family.get("kind", "semigroup")
    alpha = float(cfg.family.get("alpha", 0.0))
    if kind == "semigroup":
        return heat_semigroup(A)
    if kind == "integrated_semigroup":
        if alpha <= 0:
            raise ConfigError("integrated_semigroup needs alpha > 0")
        return integrate_family(heat_semigroup(A), alpha)
    if kind == "cosine":
        return cosine_family(A)
    if kind == "integrated_cosine":
        return integrated_cosine(A, alpha)
    raise ConfigError(f"unknown family kind {kind!r}")


def resolve_f(cfg: ProblemConfig, n: int) -> np.ndarray:
    spec = cfg.f
    if spec is None:
        return np.ones(n)
    if isinstance(spec, list):
        vec = np.array([_decode_complex(v) for v in spec])
        if vec.shape[0] != n:
            raise ConfigError(f"f has length {vec.shape[0]}, operator dimension is {n}")
        return vec
    if isinstance(spec, dict) and spec.get("kind") == "random":
        rng = np.random.default_rng(int(spec.get("seed", cfg.seed)))
        return rng.normal(size=n)
    raise ConfigError(f"cannot parse data vector spec {spec!r}")


def _fmt_cell(v):
    if isinstance(v, (complex, np.complexfloating)) and not isinstance(v, float):
        v = complex(v)
        return f"{v.real!r};{v.imag!r}"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _emit_table(rows, columns, out_path: str, fmt: str):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
        text = buf.getvalue()
    elif fmt == "json":
        payload = []
        for row in rows:
            obj = {}
            for key, v in zip(columns, row):
                if isinstance(v, (complex, np.complexfloating)) and not isinstance(v, float):
                    obj[key] = _encode_complex(complex(v))
                elif isinstance(v, (float, np.floating)):
                    obj[key] = float(v)
                elif isinstance(v, np.integer):
                    obj[key] = int(v)
                else:
                    obj[key] = v
            payload.append(obj)
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def cmd_fracpow(cfg: ProblemConfig):
    A = build_operator(cfg)
    f = resolve_f(cfg, A.dimension)
    oracle = spectral_power_oracle(A, cfg.sigma, f).value
    scale = max(float(np.linalg.norm(oracle)), 1e-300)
    methods = []
    if cfg.method in ("balakrishnan", "all"):
        methods.append(("balakrishnan",
                        balakrishnan_power(A, cfg.sigma, f, tol=1e-9).value))
    if cfg.method in ("integrated", "all"):
        fam = build_family(cfg, A)
        if fam.is_cosine:
            raise ConfigError("fracpow integrated method needs a semigroup-side family")
        methods.append((f"integrated(alpha={fam.alpha:g})",
                        integrated_power(fam, cfg.sigma, f, tol=1e-9).value))
    if cfg.method in ("oracle",):
        pass
    if not methods and cfg.method != "oracle":
        raise ConfigError(f"unknown fracpow method {cfg.method!r}")
    methods.append(("spectral_oracle", oracle))
    rows = []
    worst = 0.0
    for name, val in methods:
        for k in range(A.dimension):
            err = abs(val[k] - oracle[k]) / scale
            worst = max(worst, err)
            rows.append([name, cfg.sigma, k, complex(val[k]), complex(oracle[k]), err])
    columns = ["method", "sigma", "component", "value", "oracle", "rel_error"]
    code = EXIT_OK if worst <= cfg.tol else EXIT_NUMERICAL
    return rows, columns, code


_EXTEND_METHODS = ("semigroup", "regularized", "fractional_data",
                   "cosine", "cosine_fractional")


def _extend_at(cfg, A, fam, f, z):
    vals = {}
    wanted = _EXTEND_METHODS if cfg.method == "all" else (cfg.method,)
    power = None
    if any(m in ("regularized", "fractional_data", "cosine_fractional") for m in wanted):
        power = balakrishnan_power(A, cfg.sigma, f, tol=1e-10).value
    for m in wanted:
        if m == "semigroup":
            vals[m] = solve_semigroup_form(fam, cfg.sigma, z, f, tol=1e-10).value
        elif m == "regularized":
            vals[m] = solve_regularized(fam, cfg.sigma, z, f,
                                        (0.1, 0.01, 0.001, 1e-4, 1e-5, 1e-6),
                                        power_input=power, tol=1e-10).value
        elif m == "fractional_data":
            vals[m] = solve_fractional_data(fam, cfg.sigma, z, f,
                                            power_input=power, tol=1e-10).value
        elif m == "cosine":
            vals[m] = solve_cosine_form(cosine_family(A), cfg.sigma, z, f,
                                        tol=1e-9).value
        elif m == "cosine_fractional":
            vals[m] = solve_cosine_fractional(cosine_family(A), cfg.sigma, z, f,
                                              power_input=power, tol=1e-9).value
        else:
            raise ConfigError(f"unknown extend method {m!r}")
    return vals


def cmd_extend(cfg: ProblemConfig):
    if not cfg.z_grid:
        raise ConfigError("extend needs a nonempty z_grid")
    A = build_operator(cfg)
    f = resolve_f(cfg, A.dimension)
    fam = build_family(cfg, A)
    if fam.is_cosine:
        raise ConfigError("extend expects a semigroup-side family; cosine forms are "
                          "selected through 'method'")

    def work(z):
        return _extend_at(cfg, A, fam, f, z)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        all_vals = list(pool.map(work, cfg.z_grid))
    wanted = _EXTEND_METHODS if cfg.method == "all" else (cfg.method,)
    columns = (["z", "component"] + [f"u_{m}" for m in wanted]
               + ["error_estimate", "max_pairwise_delta"])
    rows = []
    worst = 0.0
    for z, vals in zip(cfg.z_grid, all_vals):
        arr = [vals[m] for m in wanted]
        delta = 0.0
        for i in range(len(arr)):
            for j in range(i + 1, len(arr)):
                delta = max(delta, float(np.max(np.abs(arr[i] - arr[j]))))
        worst = max(worst, delta)
        for k in range(A.dimension):
            rows.append([complex(z), k] + [complex(v[k]) for v in arr]
                        + [1e-9, delta])
    code = EXIT_OK if (len(wanted) < 2 or worst <= cfg.tol) else EXIT_NUMERICAL
    return rows, columns, code


def cmd_trace(cfg: ProblemConfig):
    A = build_operator(cfg)
    f = resolve_f(cfg, A.dimension)
    fam = build_family(cfg, A)
    if fam.is_cosine:
        raise ConfigError("traces run on semigroup-side families")
    gspec = cfg.trace_grid
    y0 = float(gspec.get("y0", 0.5))
    ratio = float(gspec.get("ratio", 0.7))
    count = int(gspec.get("count", 13))
    theta = float(gspec.get("theta", 0.0))
    if not (0 < ratio < 1) or count < 3 or y0 <= 0:
        raise ConfigError("trace_grid needs y0 > 0, 0 < ratio < 1, count >= 3")
    grid = [y0 * ratio ** k for k in range(count)]
    sol = ExtensionSolver(fam, cfg.sigma, f, tol=1e-11)
    oracle = spectral_power_oracle(A, cfg.sigma, f).value
    scale = max(float(np.linalg.norm(oracle)), 1e-300)
    which = "both" if cfg.method == "all" else cfg.method
    if which not in ("neumann", "quotient", "both"):
        raise ConfigError(f"unknown trace method {cfg.method!r}")
    estimates = {}
    if which in ("neumann", "both"):
        estimates["neumann"] = neumann_trace(sol, theta=theta, grid=grid)
    if which in ("quotient", "both"):
        estimates["quotient"] = quotient_trace(sol, theta=theta, grid=grid)
    consistency = math.nan
    if len(estimates) == 2:
        consistency = float(np.linalg.norm(
            estimates["quotient"].fractional_power
            - estimates["neumann"].fractional_power) / scale)
    from .quadrature import richardson_multi
    from .extension import _trace_exponents
    rows = []
    worst = 0.0
    for kind, est in sorted(estimates.items()):
        rel = float(np.linalg.norm(est.fractional_power - oracle) / scale)
        worst = max(worst, rel)
        running = []
        for k in range(len(est.samples)):
            if k >= 2:
                lim_k, _ = richardson_multi(est.samples[:k + 1],
                                            _trace_exponents(complex(cfg.sigma)))
                running.append(np.asarray(lim_k).reshape(-1))
            else:
                running.append(np.asarray(est.samples[k][1]).reshape(-1))
        for i, (y, raw) in enumerate(est.samples):
            raw = np.asarray(raw).reshape(-1)
            for k in range(A.dimension):
                rows.append([kind, float(y), k, complex(raw[k]),
                             complex(running[i][k]), complex(est.limit[k]),
                             complex(oracle[k]), rel, est.diagnostic, consistency])
    columns = ["kind", "y", "component", "raw_sample", "extrapolant",
               "final_limit", "oracle", "rel_error", "diagnostic", "consistency"]
    code = EXIT_OK if worst <= cfg.tol else EXIT_NUMERICAL
    return rows, columns, code


def cmd_verify(suite: str, seed: int):
    try:
        results = verify_mod.run_suite(suite, seed)
    except KeyError:
        raise ConfigError(
            f"unknown suite {suite!r}; choose from {('all',) + verify_mod.SUITES}"
        )
    rows = []
    ok = True
    for suite_name, check, passed, detail in results:
        ok = ok and passed
        rows.append([suite_name, check, "pass" if passed else "FAIL", detail])
    columns = ["suite", "check", "status", "detail"]
    return rows, columns, EXIT_OK if ok else EXIT_NUMERICAL


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracext",
        description="Fractional operator powers via extension-problem representations")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("fracpow", "compute (-A)^sigma f by the configured methods"),
        ("extend", "evaluate the extension solution u(z) on a z grid"),
        ("trace", "extract boundary traces recovering (-A)^sigma f"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", default=None, help="output path or '-' for stdout")
        p.add_argument("--format", default=None, choices=("csv", "json"))
        p.add_argument("--tol", type=float, default=None, help="override config tol")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
    v = sub.add_parser("verify", help="run a named invariant suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default="-")
    v.add_argument("--format", default="csv", choices=("csv", "json"))
    return ap


def _load_config(args) -> ProblemConfig:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    cfg = parse_config(data)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output["path"] = args.out
    if args.format is not None:
        cfg.output["format"] = args.format
    return cfg


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "verify":
            rows, columns, code = cmd_verify(args.suite, args.seed)
            _emit_table(rows, columns, args.out, args.format)
            return code
        cfg = _load_config(args)
        if args.command == "fracpow":
            rows, columns, code = cmd_fracpow(cfg)
        elif args.command == "extend":
            rows, columns, code = cmd_extend(cfg)
        else:
            rows, columns, code = cmd_trace(cfg)
        fmt = cfg.output.get("format", "csv")
        ext = os.path.splitext(str(cfg.output.get("path", "-")))[1].lower()
        if ext in (".json", ".csv") and args.format is None:
            fmt = ext[1:]
        _emit_table(rows, columns, cfg.output.get("path", "-"), fmt)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ConvergenceError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
