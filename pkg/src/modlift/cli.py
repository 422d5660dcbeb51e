"""Configuration-driven experiment runner.

Usage::

    modlift <suite> --config <path> [--out <dir>] [--seed <int>]

The config file holds one ``key = value`` pair per line (``#`` starts a
comment).  Outputs are written atomically to the output directory; floats are
printed with 17 significant digits so reruns are byte-identical.

Exit codes: 0 success, 1 identity-check failure, 2 parse error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .errors import ModliftError, ParameterError, SingularOperatorError, SpecParseError
from .lifting import (lift_ratio_report, parse_window_spec,
                      quadratic_identity_check, semigroup_error, spectral_invariance_report)
from .modspace import MixedExponents, mod_norm
from .phase_space import (Grid, PhaseFn, Signal, random_phase_fn, random_signal, reconstruct,
                          stft, symplectic_fourier, wigner)
from .quantize import (WEYL, LinOp, calculus_transform, quantize, symbol_of, toeplitz,
                       toeplitz_via_weyl, twisted_convolution, weyl_product)
from .weights import (Weight, corweyl_weights, equivalence_constants, moderate_constant,
                      omega3_weight, parse_weight_spec, submultiplicative_constant,
                      weyl_product_weight_check)

__all__ = ["ExperimentConfig", "load_config", "run", "emit_csv", "format_float", "dumps", "main"]

SUITES = ("verify", "lift", "weights", "spectral", "emit")
EMIT_ITEMS = ("window", "signal", "stft", "wigner", "source_weight", "target_weight",
              "symbol_weight", "toeplitz", "weyl", "modspace")

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    suite: str = "verify"
    n: int = 9
    window_spec: str = "gauss:1"
    source_weight: str = "poly:1"
    target_weight: str = "prod:poly:1|recip:conv:poly:2|gauss:1,1"
    symbol_weight: str = "conv:poly:2|gauss:1,1"
    moderate_weight: str = "poly:1"
    envelope_weight: str = "poly:1"
    p: str = "2"
    q: str = "2"
    norm_order: str = "mixed"
    operator: str = "toeplitz"
    samples: int = 100
    seed: int = 0
    semigroup_n: int = 33
    signal: str = "random"
    emit: tuple = field(default_factory=lambda: ("window", "source_weight", "stft"))

    def __post_init__(self):
        if self.suite not in SUITES:
            raise SpecParseError(f"unknown suite {self.suite!r}; expected one of {SUITES}")
        if self.n % 2 == 0 or not 3 <= self.n <= 129:
            raise SpecParseError(f"n must be odd with 3 <= n <= 129, got {self.n}")
        if self.semigroup_n % 2 == 0 or not 3 <= self.semigroup_n <= 129:
            raise SpecParseError(f"semigroup_n must be odd with 3 <= n <= 129, got {self.semigroup_n}")
        if self.samples < 1:
            raise SpecParseError(f"samples must be >= 1, got {self.samples}")
        if self.norm_order not in ("mixed", "amalgam"):
            raise SpecParseError(f"norm_order must be 'mixed' or 'amalgam', got {self.norm_order!r}")
        if self.operator not in ("toeplitz", "weyl"):
            raise SpecParseError(f"operator must be 'toeplitz' or 'weyl', got {self.operator!r}")
        for item in self.emit:
            if item not in EMIT_ITEMS:
                raise SpecParseError(f"unknown emit item {item!r}; expected one of {EMIT_ITEMS}")
        # validate every text spec up front so errors surface as parse errors
        grid = self.grid
        for name in ("source_weight", "target_weight", "symbol_weight", "moderate_weight",
                     "envelope_weight"):
            parse_weight_spec(getattr(self, name), grid)
        self.exponents
        self.window
        self.test_signal

    @property
    def grid(self) -> Grid:
        return Grid(self.n)

    @property
    def exponents(self) -> MixedExponents:
        return MixedExponents.parse(f"{self.p},{self.q}")

    @property
    def window(self) -> Signal:
        return parse_window_spec(self.window_spec, self.grid)

    @property
    def test_signal(self) -> Signal:
        if self.signal == "random":
            return random_signal(self.grid, np.random.default_rng(self.seed))
        return parse_window_spec(self.signal, self.grid)

    def weight(self, name: str) -> Weight:
        return parse_weight_spec(getattr(self, name), self.grid)


_INT_KEYS = ("n", "samples", "seed", "semigroup_n")
_ALIASES = {"window": "window_spec"}


def load_config(path: str, suite: str | None = None, seed: int | None = None) -> ExperimentConfig:
    """Read a flat ``key = value`` file; ``suite`` and ``seed`` override the file."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        with open(path) as fh:
            parser.read_string("[config]\n" + fh.read(), source=path)
    except OSError as exc:
        raise SpecParseError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise SpecParseError(f"malformed config {path}: {exc}") from None
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    kwargs = {}
    for key, val in parser["config"].items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise SpecParseError(f"unknown config key {key!r}")
        if key in _INT_KEYS:
            try:
                kwargs[key] = int(val)
            except ValueError:
                raise SpecParseError(f"{key} must be an integer, got {val!r}") from None
        elif key == "emit":
            kwargs[key] = tuple(s.strip() for s in val.split(",") if s.strip())
        else:
            kwargs[key] = val.strip()
    if suite is not None:
        kwargs["suite"] = suite
    if seed is not None:
        kwargs["seed"] = seed
    try:
        return ExperimentConfig(**kwargs)
    except ParameterError as exc:
        raise SpecParseError(str(exc)) from None


# -- serialization ---------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits; non-finite values as ``inf``, ``-inf``, ``nan``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".17g")
    if "." not in s and "e" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 0) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return format_float(x)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: str, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header.split(","))
    writer.writerows(rows)
    return buf.getvalue()


def emit_csv(kind: str, obj, path: str):
    """Write ``obj`` to ``path`` in the format for ``kind``.

    signal ``x,re,im``; phasefn ``x,xi,re,im``; weight ``x,xi,value``;
    linop ``row,col,re,im``; report is JSON.  Rows are row-major.
    """
    f = format_float
    if kind == "signal":
        text = _csv("x,re,im", ((str(x), f(v.real), f(v.imag)) for x, v in enumerate(obj.values)))
    elif kind in ("phasefn", "linop"):
        arr = obj.values if kind == "phasefn" else obj.matrix
        header = "x,xi,re,im" if kind == "phasefn" else "row,col,re,im"
        n = arr.shape[0]
        text = _csv(header, ((str(i), str(j), f(arr[i, j].real), f(arr[i, j].imag))
                             for i in range(n) for j in range(n)))
    elif kind == "weight":
        arr = obj.values
        n = arr.shape[0]
        text = _csv("x,xi,value", ((str(i), str(j), f(arr[i, j])) for i in range(n) for j in range(n)))
    elif kind == "report":
        if hasattr(obj, "to_dict"):
            obj = obj.to_dict()
        elif isinstance(obj, (list, tuple)):
            obj = [o.to_dict() if hasattr(o, "to_dict") else o for o in obj]
        text = dumps(obj) + "\n"
    else:
        raise ParameterError(f"unknown emit kind {kind!r}")
    _atomic_write(path, text)


# -- suites ----------------------------------------------------------------

def _threads() -> int:
    raw = os.environ.get("MODLIFT_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise SpecParseError(f"MODLIFT_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise SpecParseError(f"MODLIFT_THREADS must be a positive integer, got {raw!r}")
    return k


def _ordered_map(fn, items):
    """Map in parallel (capped by MODLIFT_THREADS); results keep input order."""
    k = _threads()
    if k == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def _rel(a, b) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale


def _verify_checks(cfg: ExperimentConfig):
    """(name, thunk) pairs; each thunk returns (error, tolerance)."""
    grid = cfg.grid
    n = grid.n
    rng = np.random.default_rng(cfg.seed)
    f = random_signal(grid, rng)
    g = random_signal(grid, rng)
    a = random_phase_fn(grid, rng)
    b = random_phase_fn(grid, rng)
    phi = cfg.window
    omega = Weight(grid, rng.uniform(0.5, 2.0, (n, n)))

    def orthogonality():
        V = stft(f, phi).values
        lhs = float(np.sum(np.abs(V) ** 2))
        rhs = f.norm() ** 2 * phi.norm() ** 2
        return abs(lhs - rhs) / rhs, 1e-12

    def stft_round_trip():
        back = reconstruct(stft(f, phi), phi)
        return _rel(back.values, f.values), 1e-12

    def quantize_round_trip():
        err = max(_rel(symbol_of(quantize(a, t), t).values, a.values) for t in (0, 0.5, 1))
        return err, 1e-12

    def toeplweyl_bridge():
        return _rel(toeplitz(phi, a).matrix, toeplitz_via_weyl(phi, a).matrix), 1e-10

    def calculus_transform_check():
        lhs = quantize(calculus_transform(a, 0, 0.5), 0.5).matrix
        return _rel(lhs, quantize(a, 0).matrix), 1e-12

    def weyl_product_compatibility():
        lhs = quantize(weyl_product(a, b), WEYL).matrix
        return _rel(lhs, (quantize(a, WEYL) @ quantize(b, WEYL)).matrix), 1e-12

    def symplectic_fourier_compatibility():
        lhs = symplectic_fourier(weyl_product(a, b)).values
        rhs = twisted_convolution(symplectic_fourier(a), symplectic_fourier(b)).values
        return _rel(lhs, rhs), 1e-10

    def triple_identity():
        # even theta: theta *_s theta *_s theta = c (theta # theta # theta)
        th = PhaseFn(grid, a.values + a.values[(-grid.points) % n][:, (-grid.points) % n])
        lhs = twisted_convolution(twisted_convolution(th, th), th).values
        rhs = constants.value("triple_identity", n) * weyl_product(weyl_product(th, th), th).values
        return _rel(lhs, rhs), 1e-10

    def quadratic_identity():
        lhs, rhs, err = quadratic_identity_check(omega, phi, g)
        return err / (1.0 + abs(rhs)), 1e-12

    def gaussian_semigroup():
        _, err = semigroup_error(Grid(cfg.semigroup_n), (1.0, 1.0), (1.0, 1.0))
        return err, 1e-6

    return [
        ("orthogonality", orthogonality),
        ("stft_round_trip", stft_round_trip),
        ("quantize_round_trip", quantize_round_trip),
        ("toeplweyl_bridge", toeplweyl_bridge),
        ("calculus_transform", calculus_transform_check),
        ("weyl_product_compatibility", weyl_product_compatibility),
        ("symplectic_fourier_compatibility", symplectic_fourier_compatibility),
        ("triple_identity", triple_identity),
        ("quadratic_identity", quadratic_identity),
        ("gaussian_semigroup", gaussian_semigroup),
    ]


def _suite_verify(cfg, out):
    checks = _verify_checks(cfg)

    def run_one(item):
        name, thunk = item
        err, tol = thunk()
        return {"check": name, "error": err, "tolerance": tol, "passed": bool(err <= tol)}

    results = _ordered_map(run_one, checks)
    emit_csv("report", {"suite": "verify", "n": cfg.n, "seed": cfg.seed, "checks": results},
             os.path.join(out, "verify.json"))
    failed = [r for r in results if not r["passed"]]
    for r in failed:
        print(dumps(r), file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def _operator(cfg, phi):
    a = PhaseFn(cfg.grid, cfg.weight("symbol_weight").values)
    if cfg.operator == "toeplitz":
        return toeplitz(phi, a)
    return quantize(a, WEYL)


def _suite_lift(cfg, out):
    phi = cfg.window
    T = _operator(cfg, phi)
    s = np.linalg.svd(T.matrix, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > 1e12:
        raise SingularOperatorError(f"operator is numerically singular, smallest singular "
                                    f"value {s[-1]:.3g}", smallest_singular_value=float(s[-1]))
    Tinv = LinOp(cfg.grid, np.linalg.solve(T.matrix, np.eye(cfg.n)))
    src, tgt = cfg.weight("source_weight"), cfg.weight("target_weight")
    desc = f"{cfg.operator}({cfg.symbol_weight})"
    jobs = [(T, src, tgt, desc, cfg.source_weight, cfg.target_weight),
            (Tinv, tgt, src, f"inverse({desc})", cfg.target_weight, cfg.source_weight)]

    def run_one(job):
        op, ws, wt, d, ss, ts = job
        return lift_ratio_report(op, phi, ws, wt, cfg.exponents, cfg.samples, cfg.seed,
                                 operator_desc=d, source_spec=ss, target_spec=ts,
                                 norm_order=cfg.norm_order)

    reports = _ordered_map(run_one, jobs)
    emit_csv("report", reports, os.path.join(out, "lift.json"))
    return EXIT_OK


def _suite_weights(cfg, out):
    grid = cfg.grid
    src, tgt = cfg.weight("source_weight"), cfg.weight("target_weight")
    sym, v = cfg.weight("symbol_weight"), cfg.weight("moderate_weight")
    sub_c, even = submultiplicative_constant(v)
    lo, hi = equivalence_constants(src, tgt)
    theta, w1, w2, _ = corweyl_weights(sym, v, v)
    mode = "exhaustive" if grid.n <= 9 else "sampled"
    C = weyl_product_weight_check(omega3_weight(theta), w1, w2, mode=mode, seed=cfg.seed)
    report = {
        "n": cfg.n,
        "source_weight_spec": cfg.source_weight,
        "target_weight_spec": cfg.target_weight,
        "symbol_weight_spec": cfg.symbol_weight,
        "moderate_weight_spec": cfg.moderate_weight,
        "moderate_constant_source": moderate_constant(src, v),
        "moderate_constant_target": moderate_constant(tgt, v),
        "submultiplicative_constant": sub_c,
        "moderate_weight_even": even,
        "equivalence_low": lo,
        "equivalence_high": hi,
        "weyl_product_constant": C,
        "weyl_product_mode": mode,
    }
    emit_csv("report", report, os.path.join(out, "weights.json"))
    return EXIT_OK


def _suite_spectral(cfg, out):
    phi = cfg.window
    rep = spectral_invariance_report(_operator(cfg, phi), phi, cfg.weight("envelope_weight"))
    body = {"operator_desc": f"{cfg.operator}({cfg.symbol_weight})",
            "envelope_weight_spec": cfg.envelope_weight, "n": cfg.n}
    body.update(rep.to_dict())
    emit_csv("report", body, os.path.join(out, "spectral.json"))
    return EXIT_OK


def _suite_emit(cfg, out):
    phi = cfg.window
    f = cfg.test_signal
    for item in cfg.emit:
        path = os.path.join(out, f"{item}.csv")
        if item == "window":
            emit_csv("signal", phi, path)
        elif item == "signal":
            emit_csv("signal", f, path)
        elif item == "stft":
            emit_csv("phasefn", stft(f, phi), path)
        elif item == "wigner":
            emit_csv("phasefn", wigner(f, f), path)
        elif item.endswith("_weight"):
            emit_csv("weight", cfg.weight(item), path)
        elif item == "toeplitz":
            emit_csv("linop", toeplitz(phi, PhaseFn(cfg.grid, cfg.weight("symbol_weight").values)),
                     path)
        elif item == "weyl":
            emit_csv("linop", quantize(PhaseFn(cfg.grid, cfg.weight("symbol_weight").values),
                                       WEYL), path)
        elif item == "modspace":
            e = cfg.exponents
            rows = []
            for name in ("source_weight", "target_weight"):
                w = cfg.weight(name)
                for order in ("mixed", "amalgam"):
                    val = mod_norm(f, phi, w, e, order)
                    rows.append((order, format_float(e.p), format_float(e.q),
                                 getattr(cfg, name), format_float(val)))
            _atomic_write(path, _csv("norm,p,q,weight_spec,value", rows))
    return EXIT_OK


_RUNNERS = {"verify": _suite_verify, "lift": _suite_lift, "weights": _suite_weights,
            "spectral": _suite_spectral, "emit": _suite_emit}


def run(config_path: str, suite: str | None = None, out: str = "modlift_out",
        seed: int | None = None) -> int:
    """Run one suite and return its exit code."""
    try:
        cfg = load_config(config_path, suite, seed)
    except (SpecParseError, ParameterError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        with np.errstate(all="ignore"):
            return _RUNNERS[cfg.suite](cfg, out)
    except (SingularOperatorError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ModliftError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="modlift", description=__doc__.split("\n")[0])
    ap.add_argument("suite", choices=SUITES)
    ap.add_argument("--config", required=True, help="flat 'key = value' config file")
    ap.add_argument("--out", default="modlift_out", help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override the config seed")
    args = ap.parse_args(argv)
    return run(args.config, args.suite, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
