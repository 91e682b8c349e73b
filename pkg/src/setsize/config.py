"""Experiment configuration: a YAML document describing one experiment.

Schema (top-level keys)::

    experiment: short identifier            (default "experiment")
    family: tank | interval | binomial | ztp | waiting | multiplier |
            crc2 | crck | nsum_general | nsum_hidden | ht
    regime: finite_population | infill | outfill
    model: {family parameters, see the model dataclasses}
    grid: [t values]                        (required)
    ratios: [outfill ratio targets]         (outfill only)
    growing_k: bool                         (crck outfill variant)
    estimators: [estimator ids]             (default: all for the family)
    replications: int                       (default 10000)
    eps: [floats]                           (default [0.5])
    seed: int                               (default 0)
    threads: int, 0 = auto                  (default 0)
    exact: auto | on | off                  (default auto)

Validation collects every error with its key path instead of stopping at
the first.
"""

import dataclasses
import math
from dataclasses import dataclass, field

import yaml

from . import models
from .engine import FAMILY_COLUMNS
from .regimes import KINDS, build_schedule

MODEL_CLASSES = {
    "tank": models.TankConfig,
    "interval": models.IntervalConfig,
    "binomial": models.BinomialCountConfig,
    "ztp": models.ZTPoissonConfig,
    "waiting": models.WaitingTimeConfig,
    "multiplier": models.MultiplierConfig,
    "crc2": models.CRC2Config,
    "crck": models.CRCkConfig,
    "nsum_general": models.NsumGeneralConfig,
    "nsum_hidden": models.NsumHiddenConfig,
    "ht": models.HTClusterConfig,
}

REGIME_SUPPORT = {
    "finite_population": ("tank", "crc2", "waiting"),
    "infill": tuple(MODEL_CLASSES),
    "outfill": tuple(MODEL_CLASSES),
}

_KNOWN_KEYS = {
    "experiment", "family", "regime", "model", "grid", "ratios",
    "growing_k", "estimators", "replications", "eps", "seed", "threads",
    "exact",
}


class ValidationError(ValueError):
    """Carries every collected configuration problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    family: str
    regime: str
    model: object           # family ModelConfig dataclass (base cell)
    grid: tuple
    ratios: tuple
    estimators: tuple
    replications: int
    eps: tuple
    seed: int
    threads: int
    exact: str              # auto | on | off
    growing_k: bool = False

    def build_schedule(self):
        return build_schedule(self.family, self.regime, self.model,
                              self.grid, self.ratios, self.growing_k)

    def to_dict(self):
        """Plain mapping that parses back to an identical config."""
        model = dataclasses.asdict(self.model)
        model = {k: (list(v) if isinstance(v, tuple) else v)
                 for k, v in model.items() if v is not None}
        if self.family == "waiting" and math.isinf(model.get("horizon",
                                                             0.0)):
            model["horizon"] = "inf"
        return {
            "experiment": self.experiment_id,
            "family": self.family,
            "regime": self.regime,
            "model": model,
            "grid": ["inf" if isinstance(g, float) and math.isinf(g)
                     else g for g in self.grid],
            "ratios": list(self.ratios),
            "growing_k": self.growing_k,
            "estimators": list(self.estimators),
            "replications": self.replications,
            "eps": list(self.eps),
            "seed": self.seed,
            "threads": self.threads,
            "exact": self.exact,
        }


def _coerce_number(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return math.inf
    return v


def parse_config(text):
    """Parse and validate a YAML experiment document.

    Raises ValidationError listing every problem found.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError([f"not valid YAML: {exc}"]) from exc
    if not isinstance(doc, dict):
        raise ValidationError(["document must be a mapping"])
    return config_from_dict(doc)


def config_from_dict(doc):
    errors = []
    for key in doc:
        if key not in _KNOWN_KEYS:
            errors.append(f"unknown key {key!r}")

    experiment_id = doc.get("experiment", "experiment")
    if not isinstance(experiment_id, str) or not experiment_id:
        errors.append("experiment: must be a non-empty string")
        experiment_id = "experiment"

    family = doc.get("family")
    if family not in MODEL_CLASSES:
        errors.append(
            f"family: must be one of {sorted(MODEL_CLASSES)}, "
            f"got {family!r}")
        family = None

    regime = doc.get("regime")
    if regime not in KINDS:
        errors.append(f"regime: must be one of {list(KINDS)}, got "
                      f"{regime!r}")
        regime = None
    elif family and family not in REGIME_SUPPORT[regime]:
        errors.append(
            f"regime: family {family!r} does not support {regime!r}")

    model = None
    model_doc = doc.get("model")
    if not isinstance(model_doc, dict):
        errors.append("model: must be a mapping of family parameters")
    elif family:
        cls = MODEL_CLASSES[family]
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for k, v in model_doc.items():
            if k not in names:
                errors.append(f"model.{k}: unknown parameter for family "
                              f"{family!r}")
                continue
            if isinstance(v, list):
                v = tuple(v)
            kwargs[k] = _coerce_number(v)
        missing = [f.name for f in dataclasses.fields(cls)
                   if f.default is dataclasses.MISSING
                   and f.name not in kwargs and f.init]
        if missing:
            errors.append(f"model: missing required parameter(s) {missing}")
        else:
            try:
                model = cls(**kwargs)
                model.validate()
            except (TypeError, ValueError) as exc:
                errors.append(f"model: {exc}")
                model = None

    grid = doc.get("grid")
    if (not isinstance(grid, list) or not grid
            or not all(isinstance(g, (int, float, str)) for g in grid)):
        errors.append("grid: must be a non-empty list of numbers")
        grid = ()
    else:
        grid = tuple(_coerce_number(g) for g in grid)
        if not all(isinstance(g, (int, float)) for g in grid):
            errors.append("grid: entries must be numbers (or 'inf')")
            grid = ()
        elif any(b <= a for a, b in zip(grid, grid[1:])):
            errors.append("grid: must be strictly increasing")

    ratios = doc.get("ratios", [])
    if not isinstance(ratios, list):
        errors.append("ratios: must be a list of numbers")
        ratios = ()
    else:
        for c in ratios:
            if not isinstance(c, (int, float)) or not 0 < c <= 1:
                errors.append(f"ratios: ratio outside (0,1): {c!r}")
        ratios = tuple(c for c in ratios if isinstance(c, (int, float)))
    if regime == "outfill" and family not in (None, "ztp", "waiting") \
            and not ratios:
        errors.append("ratios: required for an outfill schedule")

    growing_k = doc.get("growing_k", False)
    if not isinstance(growing_k, bool):
        errors.append("growing_k: must be a boolean")
        growing_k = False

    estimators = doc.get("estimators")
    if estimators is None:
        estimators = list(FAMILY_COLUMNS.get(family, ()))
    if not isinstance(estimators, list) or not estimators:
        errors.append("estimators: must be a non-empty list")
        estimators = []
    elif family:
        allowed = FAMILY_COLUMNS[family]
        for e in estimators:
            if e not in allowed:
                errors.append(
                    f"estimators: {e!r} is not compatible with family "
                    f"{family!r} (allowed: {list(allowed)})")

    replications = doc.get("replications", 10_000)
    if not isinstance(replications, int) or replications < 2:
        errors.append("replications: must be an integer >= 2")
        replications = 2

    eps = doc.get("eps", [0.5])
    if (not isinstance(eps, list) or not eps
            or not all(isinstance(e, (int, float)) and e > 0 for e in eps)):
        errors.append("eps: must be a non-empty list of positive numbers")
        eps = [0.5]

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        errors.append("seed: must be a non-negative integer")
        seed = 0

    threads = doc.get("threads", 0)
    if not isinstance(threads, int) or threads < 0:
        errors.append("threads: must be a non-negative integer (0 = auto)")
        threads = 0

    exact = doc.get("exact", "auto")
    if exact is True:
        exact = "on"
    elif exact is False:
        exact = "off"
    if exact not in ("auto", "on", "off"):
        errors.append("exact: must be auto, on or off")
        exact = "auto"

    cfg = None
    if not errors:
        cfg = ExperimentConfig(
            experiment_id, family, regime, model, grid, ratios,
            tuple(estimators), replications, tuple(float(e) for e in eps),
            seed, threads, exact, growing_k)
        try:
            cfg.build_schedule()
        except ValueError as exc:
            errors.append(f"schedule: {exc}")
    if errors:
        raise ValidationError(errors)
    return cfg
