"""Run configuration: JSON with matrices as nested lists of decimal strings.

Example::

    {"n": 1, "T": {"re": [["0"]], "im": [["1"]]}, "tau": [[0]]}

Missing fields get defaults (epsilon 1/24, a 9-point grid per axis, the
library tolerances).  Every schema problem raises :class:`ConfigError` with
the path of the offending field.
"""

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bundle_objects import SectionData
from .errors import ConfigError, GerbyMirrorError
from .gerbe import DEFAULT_EPSILON, check_epsilon
from .matrix_kernel import DEFAULT_TOL, ToleranceConfig
from .torus_gcs import ComplexTorus

DEFAULT_SAMPLES = {"gcs": 25, "objects": 200, "dhym": 100}
KNOWN_KEYS = {"n", "T", "tau", "epsilon", "objects", "grid_density", "tolerances", "seed", "samples"}


@dataclass(frozen=True, eq=False)
class RunConfig:
    torus: ComplexTorus
    tau: np.ndarray
    epsilon: Fraction = DEFAULT_EPSILON
    objects: tuple = ()
    grid_density: int = 9
    tol: ToleranceConfig = DEFAULT_TOL
    seed: int = 0
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))

    @property
    def n(self):
        return self.torus.n


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}")


def _decimal(value, path):
    if isinstance(value, bool):
        _fail(path, "expected a decimal string or number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            out = float(value)
        except ValueError:
            _fail(path, f"not a decimal number: {value!r}")
        if not np.isfinite(out):
            _fail(path, "must be finite")
        return out
    _fail(path, f"expected a decimal string or number, got {type(value).__name__}")


def _integer(value, path):
    if isinstance(value, bool):
        _fail(path, "expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
    _fail(path, f"expected an integer, got {value!r}")


def _vector(value, n, path, conv=_decimal):
    if not isinstance(value, list) or len(value) != n:
        _fail(path, f"expected a list of length {n}")
    return np.array([conv(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _matrix(value, n, path, conv=_decimal):
    if not isinstance(value, list) or len(value) != n:
        _fail(path, f"expected {n} rows")
    return np.array([_vector(row, n, f"{path}[{i}]", conv) for i, row in enumerate(value)])


def _epsilon(value, path):
    try:
        if isinstance(value, str):
            eps = Fraction(value)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            eps = Fraction(value).limit_denominator(10**6)
        else:
            raise ValueError(f"expected a fraction string such as '1/24', got {value!r}")
        return check_epsilon(eps)
    except (ValueError, ZeroDivisionError) as exc:
        _fail(path, str(exc))


def _section(raw, n, path):
    if not isinstance(raw, dict):
        _fail(path, "expected an object")
    extra = set(raw) - {"a", "c", "q", "modes"}
    if extra:
        _fail(path, f"unknown keys {sorted(extra)}")
    if "a" not in raw:
        _fail(f"{path}.a", "required")
    a = _matrix(raw["a"], n, f"{path}.a", _integer)
    c = _vector(raw["c"], n, f"{path}.c") if "c" in raw else None
    q = _vector(raw["q"], n, f"{path}.q") if "q" in raw else None
    modes = []
    raw_modes = raw.get("modes", [])
    if not isinstance(raw_modes, list):
        _fail(f"{path}.modes", "expected a list")
    for i, m in enumerate(raw_modes):
        mp = f"{path}.modes[{i}]"
        if not isinstance(m, dict) or set(m) != {"k", "u", "v"}:
            _fail(mp, "expected an object with keys k, u, v")
        modes.append(
            (
                tuple(_vector(m["k"], n, f"{mp}.k", _integer)),
                _vector(m["u"], n, f"{mp}.u"),
                _vector(m["v"], n, f"{mp}.v"),
            )
        )
    try:
        return SectionData(a, c, tuple(modes), q)
    except GerbyMirrorError as exc:
        _fail(path, str(exc))


def parse_config(raw):
    if not isinstance(raw, dict):
        _fail("<root>", "expected a JSON object")
    extra = set(raw) - KNOWN_KEYS
    if extra:
        _fail("<root>", f"unknown keys {sorted(extra)}")
    for key in ("n", "T", "tau"):
        if key not in raw:
            _fail(key, "required")
    n = _integer(raw["n"], "n")
    if not 1 <= n <= 4:
        _fail("n", f"must be between 1 and 4, got {n}")
    T = raw["T"]
    if not isinstance(T, dict) or set(T) != {"re", "im"}:
        _fail("T", "expected an object with keys re, im")
    X = _matrix(T["re"], n, "T.re")
    Y = _matrix(T["im"], n, "T.im")

    tol_raw = raw.get("tolerances", {})
    if not isinstance(tol_raw, dict) or set(tol_raw) - {"abs", "rel", "phase"}:
        _fail("tolerances", "expected an object with keys among abs, rel, phase")
    try:
        tol = ToleranceConfig(
            abs_tol=_decimal(tol_raw.get("abs", DEFAULT_TOL.abs_tol), "tolerances.abs"),
            rel_tol=_decimal(tol_raw.get("rel", DEFAULT_TOL.rel_tol), "tolerances.rel"),
            phase_tol=_decimal(tol_raw.get("phase", DEFAULT_TOL.phase_tol), "tolerances.phase"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        _fail("tolerances", str(exc))

    try:
        torus = ComplexTorus(X, Y, tol)
    except GerbyMirrorError as exc:
        _fail("T.im" if "positive definite" in str(exc) else "T", str(exc))

    tau = _matrix(raw["tau"], n, "tau", _integer).astype(np.int64)
    eps = _epsilon(raw.get("epsilon", "1/24"), "epsilon")
    objs = raw.get("objects", [])
    if not isinstance(objs, list):
        _fail("objects", "expected a list")
    objects = tuple(_section(o, n, f"objects[{i}]") for i, o in enumerate(objs))
    grid = _integer(raw.get("grid_density", 9), "grid_density")
    if not 2 <= grid <= 32:
        _fail("grid_density", f"must be between 2 and 32, got {grid}")
    seed = _integer(raw.get("seed", 0), "seed")
    if seed < 0:
        _fail("seed", "must be non-negative")
    samples = dict(DEFAULT_SAMPLES)
    s_raw = raw.get("samples", {})
    if not isinstance(s_raw, dict) or set(s_raw) - set(DEFAULT_SAMPLES):
        _fail("samples", f"expected an object with keys among {sorted(DEFAULT_SAMPLES)}")
    for k, v in s_raw.items():
        samples[k] = _integer(v, f"samples.{k}")
        if samples[k] < 0:
            _fail(f"samples.{k}", "must be non-negative")
    return RunConfig(torus, tau, eps, objects, grid, tol, seed, samples)


def load_config(source):
    """Parse a config from a path, ``"-"`` for stdin, or an open file."""
    try:
        if source == "-":
            raw = json.load(sys.stdin)
        elif hasattr(source, "read"):
            raw = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: invalid JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"<root>: cannot read config ({exc})") from None
    return parse_config(raw)


def _dec(x):
    return repr(float(x))


def _dec_matrix(m):
    return [[_dec(v) for v in row] for row in np.asarray(m)]


def _int_matrix(m):
    return [[int(v) for v in row] for row in np.asarray(m)]


def to_dict(cfg):
    """Canonical form: parse_config(to_dict(cfg)) reproduces cfg exactly."""
    objects = []
    for s in cfg.objects:
        objects.append(
            {
                "a": _int_matrix(s.a),
                "c": [_dec(v) for v in s.c],
                "q": [_dec(v) for v in s.q],
                "modes": [
                    {"k": list(k), "u": [_dec(v) for v in u], "v": [_dec(v) for v in w]} for k, u, w in s.modes
                ],
            }
        )
    return {
        "n": cfg.n,
        "T": {"re": _dec_matrix(cfg.torus.X), "im": _dec_matrix(cfg.torus.Y)},
        "tau": _int_matrix(cfg.tau),
        "epsilon": str(cfg.epsilon),
        "objects": objects,
        "grid_density": cfg.grid_density,
        "tolerances": {"abs": _dec(cfg.tol.abs_tol), "rel": _dec(cfg.tol.rel_tol), "phase": _dec(cfg.tol.phase_tol)},
        "seed": cfg.seed,
        "samples": dict(sorted(cfg.samples.items())),
    }


def dumps(cfg):
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True)
