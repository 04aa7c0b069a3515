"""Declarative experiment configuration.

Configs are single JSON files with an explicit schema_version.  Loading
validates every referenced module invariant (delta + r < 1, c in (0,1),
odd cyclic dimension, ...) before any computation starts, so a bad
parameter combination fails at load time with a clear message.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import games
from .micro import ConfigInvalid, MicroConfig, sample_simplex_uniform

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "two_strategies",
    "grazing",
    "rps_periodic",
    "folk_check",
    "meanfield_vs_replicator",
    "micro_free_run",
)


def build_game(spec: dict) -> games.PayoffMatrix:
    """Construct a payoff matrix from a config game spec."""
    if not isinstance(spec, dict) or "constructor" not in spec:
        raise ConfigInvalid(f"game spec must be a dict with a 'constructor', got {spec!r}")
    kind = spec["constructor"]
    if kind == "rps":
        return games.rps_matrix(spec.get("a", 1.0), spec.get("b"),
                                strict=spec.get("strict", True))
    if kind == "cyclic":
        return games.cyclic_matrix(int(spec["d"]))
    if kind == "two-strategy":
        return games.two_strategy_matrix(float(spec.get("b", 1.0)))
    if kind == "custom":
        return games.validate_payoff(spec["matrix"],
                                     allow_nonantisymmetric=spec.get("allow_nonantisymmetric", False))
    raise ConfigInvalid(f"unknown game constructor {kind!r}")


def _split_remainder(value: float, d: int, k: int) -> np.ndarray:
    p = np.full(d, (1.0 - value) / (d - 1))
    p[k] = value
    return p


def build_init(spec, n: int, d: int, rng: np.random.Generator,
               stratified: bool = False) -> np.ndarray:
    """Materialize an initial-condition spec into an (n, d) strategy array.

    Named initializers:
      "dirac:p1,...,pd"          every row at the given point
      "uniform-simplex"          flat Dirichlet draws
      "uniform-box:lo,hi@k"      coordinate k uniform in [lo, hi], the
                                 remainder split evenly over the others
      "ball:radius@c1,...,cd"    uniform in the simplex-hyperplane ball
    Structured forms: {"mixture": [{"fraction": f, "init": spec}, ...]}
    and {"csv": "path"} (one row per agent, d columns).

    stratified=True replaces random draws by deterministic quantile
    midpoints where meaningful (dirac, uniform-box), for use as a
    continuum reference in convergence studies.
    """
    if isinstance(spec, dict) and "mixture" in spec:
        parts = spec["mixture"]
        counts = [int(round(part["fraction"] * n)) for part in parts]
        counts[-1] = n - sum(counts[:-1])
        if min(counts) < 0:
            raise ConfigInvalid(f"mixture fractions {counts} do not partition {n}")
        blocks = [build_init(part["init"], cnt, d, rng, stratified)
                  for part, cnt in zip(parts, counts) if cnt > 0]
        return np.vstack(blocks)
    if isinstance(spec, dict) and "csv" in spec:
        arr = np.loadtxt(spec["csv"], delimiter=",", ndmin=2)
        if arr.shape != (n, d):
            raise ConfigInvalid(f"csv init has shape {arr.shape}, expected {(n, d)}")
        return arr
    if not isinstance(spec, str):
        raise ConfigInvalid(f"unrecognized init spec {spec!r}")

    if spec == "uniform-simplex":
        return sample_simplex_uniform(rng, n, d)
    if spec.startswith("dirac:"):
        p = games.as_simplex_point([float(x) for x in spec[len("dirac:"):].split(",")])
        if p.size != d:
            raise ConfigInvalid(f"dirac point has {p.size} coordinates, expected {d}")
        return np.tile(p, (n, 1))
    if spec.startswith("uniform-box:"):
        body = spec[len("uniform-box:"):]
        rng_part, _, k_part = body.partition("@")
        lo, hi = (float(x) for x in rng_part.split(","))
        k = int(k_part) if k_part else 0
        if not (0.0 <= lo <= hi <= 1.0):
            raise ConfigInvalid(f"uniform-box range [{lo}, {hi}] not inside [0, 1]")
        if stratified:
            vals = lo + (np.arange(n) + 0.5) * (hi - lo) / n
        else:
            vals = rng.uniform(lo, hi, size=n)
        return np.array([_split_remainder(v, d, k) for v in vals])
    if spec.startswith("ball:"):
        body = spec[len("ball:"):]
        r_part, _, c_part = body.partition("@")
        radius = float(r_part)
        center = games.as_simplex_point([float(x) for x in c_part.split(",")])
        if center.size != d:
            raise ConfigInvalid(f"ball center has {center.size} coordinates, expected {d}")
        dirs = rng.standard_normal((n, d))
        dirs -= dirs.mean(axis=1, keepdims=True)
        norms = np.linalg.norm(dirs, axis=1, keepdims=True)
        norms[norms < 1e-12] = 1.0
        radii = radius * rng.random(n) ** (1.0 / max(d - 1, 1))
        pts = center + radii[:, None] * dirs / norms
        if pts.min() < 0.0:
            raise ConfigInvalid("ball initializer leaves the simplex; shrink the radius")
        return pts
    raise ConfigInvalid(f"unknown init spec {spec!r}")


def config_hash(raw: dict) -> str:
    """Stable hash of a config, excluding the output location."""
    trimmed = {k: v for k, v in raw.items() if k != "out"}
    blob = json.dumps(trimmed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class ExperimentConfig:
    raw: dict
    path: str | None = None

    experiment: str = field(init=False)
    seed: int = field(init=False)

    def __post_init__(self):
        raw = self.raw
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ConfigInvalid(
                f"schema_version must be {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
        if raw.get("experiment") not in EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {raw.get('experiment')!r}; "
                                f"choose one of {', '.join(EXPERIMENTS)}")
        self.experiment = raw["experiment"]
        self.seed = int(raw.get("seed", 0))
        self.validate()

    # -- accessors -------------------------------------------------------
    @property
    def game(self) -> games.PayoffMatrix:
        return build_game(self.raw["game"])

    @property
    def dynamics(self) -> dict:
        return self.raw.get("dynamics", {})

    @property
    def params(self) -> dict:
        return self.raw.get("params", {})

    @property
    def thresholds(self) -> dict:
        return self.raw.get("thresholds", {})

    @property
    def init_spec(self):
        return self.raw.get("init")

    @property
    def out_dir(self) -> Path:
        return Path(self.raw.get("out", f"runs/{self.experiment}"))

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    def dyn(self, key, default=None):
        return self.dynamics.get(key, default)

    def par(self, key, default=None):
        return self.params.get(key, default)

    def thr(self, key, default=None):
        return self.thresholds.get(key, default)

    # -- validation ------------------------------------------------------
    def validate(self):
        """Reject parameter combinations violating module invariants."""
        game = self.game  # constructor validates the matrix
        if not game.antisymmetric:
            # display-only games exist, but every dynamics module needs A^T = -A
            raise ConfigInvalid("experiments require a strictly antisymmetric payoff matrix")
        dyn = self.dynamics
        for key in ("dt", "t_end", "snapshot_every"):
            if key in dyn and dyn[key] <= 0:
                raise ConfigInvalid(f"dynamics.{key} must be > 0, got {dyn[key]}")
        if "c" in dyn and not (0.0 < dyn["c"] < 1.0):
            raise ConfigInvalid(f"dynamics.c must be in (0,1), got {dyn['c']}")
        if "lambda" in dyn and dyn["lambda"] < 0:
            raise ConfigInvalid(f"dynamics.lambda must be >= 0, got {dyn['lambda']}")
        delta = dyn.get("delta")
        if delta is not None:
            # exercises delta in (0,1), delta + r < 1, N >= 2
            MicroConfig(delta=delta, r=dyn.get("r", 0.0), c=dyn.get("c", 0.1),
                        n_agents=dyn.get("n_agents", 2), seed=self.seed)
        if self.experiment == "two_strategies" and game.dim != 2:
            raise ConfigInvalid("two_strategies requires a 2-strategy game")
        if self.experiment == "grazing":
            deltas = self.par("deltas", [0.2, 0.1, 0.05])
            if any(dd <= 0 for dd in deltas):
                raise ConfigInvalid(f"grazing deltas must be > 0, got {deltas}")
            for dd in deltas:
                MicroConfig(delta=dd, r=dyn.get("r", 0.0), c=dyn.get("c", 0.1),
                            n_agents=dyn.get("n_agents", 2), seed=self.seed)
        if self.experiment == "rps_periodic" and game.dim % 2 == 0:
            raise ConfigInvalid("rps_periodic requires an odd-dimensional cyclic game")


def load_config(path, overrides=None) -> ExperimentConfig:
    raw = json.loads(Path(path).read_text())
    for key, value in (overrides or {}).items():
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return ExperimentConfig(raw=raw, path=str(path))
