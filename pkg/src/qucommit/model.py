"""Single-period unit-commitment instances: fleet data, validation, file I/O.

An instance couples a generator fleet with a target load, an optional spare
requirement, and the penalty configuration used by the spin encoding. All
values are resolved at construction time; instances are immutable afterwards
and safe to share.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError, InstanceFormatError, ValidationError

__all__ = [
    "UnitSpec",
    "PenaltyConfig",
    "UCInstance",
    "unit_cost",
    "load_instance",
    "save_instance",
    "bundled_instance_path",
]

# Resolution used when deriving the slack granularity from fleet data.
_GRANULARITY_TOL = 1e-9


@dataclass(frozen=True)
class UnitSpec:
    """One generator: cost curve coefficients and committed power.

    a: quadratic cost coefficient ($/MW^2)
    b: linear cost coefficient ($/MW)
    c: opening cost ($)
    p: committed power output when switched on (MW)
    p_max: optional maximum power (MW), required for spare-constrained fleets
    """

    a: float
    b: float
    c: float
    p: float
    p_max: float | None = None

    def validate(self, index: int) -> None:
        for name in ("a", "b", "c", "p"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"unit {index}: {name} must be finite")
        if self.c < 0:
            raise ValidationError(f"unit {index}: opening cost c must be >= 0")
        if self.p <= 0:
            raise ValidationError(f"unit {index}: committed power p must be > 0")
        if self.p_max is not None:
            if not math.isfinite(self.p_max):
                raise ValidationError(f"unit {index}: p_max must be finite")
            if self.p_max < self.p:
                raise ValidationError(f"unit {index}: p_max must be >= p")


def unit_cost(unit: UnitSpec) -> float:
    """Fuel cost of a switched-on unit: a*p^2 + b*p + c."""
    return unit.a * unit.p * unit.p + unit.b * unit.p + unit.c


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty weights and slack encoding for the spin Hamiltonian.

    lambda1: weight of the load-balance penalty
    lambda2: weight of the spare-capacity penalty (spare-constrained only)
    c_c: slack granularity in MW per slack unit (spare-constrained only)
    k: number of binary slack variables (spare-constrained only)
    """

    lambda1: float
    lambda2: float | None = None
    c_c: float | None = None
    k: int | None = None


def _default_penalty_weight(units: tuple[UnitSpec, ...]) -> float:
    # Chosen so the smallest possible balance violation (one minimum-size
    # unit) is penalized more than the whole fleet's fuel cost.
    total = sum(unit_cost(u) for u in units)
    grain = min(u.p for u in units)
    return 10.0 * total / (grain * grain)


def _granularity(values: list[float]) -> float:
    """Largest step that divides every value, to within 1e-9."""
    scale = round(1.0 / _GRANULARITY_TOL)
    g = 0
    for v in values:
        g = math.gcd(g, round(v * scale))
    if g == 0:
        raise ConfigurationError("cannot derive slack granularity from all-zero data")
    return g / scale


def _slack_bits(c_c: float, slack_range: float) -> int:
    # Smallest k with c_c * (2^k - 1) covering the range; at least one bit.
    k = 1
    while c_c * (2**k - 1) < slack_range - _GRANULARITY_TOL:
        k += 1
    return k


@dataclass(frozen=True)
class UCInstance:
    """A validated unit-commitment instance with all defaults resolved.

    Units are indexed 1..n in file order; that ordering is the canonical bit
    order everywhere downstream. The instance is spare-constrained
    ("double-constraint") exactly when `spare` is present.
    """

    units: tuple[UnitSpec, ...]
    load: float
    spare: float | None
    penalty: PenaltyConfig

    @property
    def n(self) -> int:
        return len(self.units)

    @property
    def double_constraint(self) -> bool:
        return self.spare is not None

    @property
    def slack_bits(self) -> int:
        return self.penalty.k if self.double_constraint else 0

    @property
    def n_vars(self) -> int:
        return self.n + self.slack_bits

    def total_cost(self, on_units: list[int]) -> float:
        """Fuel cost of a subset given as 1-based unit indices."""
        return sum(unit_cost(self.units[i - 1]) for i in on_units)

    @classmethod
    def build(
        cls,
        units: list[UnitSpec] | tuple[UnitSpec, ...],
        load: float,
        spare: float | None = None,
        lambda1: float | None = None,
        lambda2: float | None = None,
        c_c: float | None = None,
        k: int | None = None,
    ) -> "UCInstance":
        """Validate data and resolve every unspecified penalty parameter."""
        units = tuple(units)
        if len(units) < 1:
            raise ValidationError("instance needs at least one unit")
        for i, u in enumerate(units, start=1):
            u.validate(i)
        if not (math.isfinite(load) and load > 0):
            raise ValidationError("load must be finite and > 0")
        if spare is not None:
            if not (math.isfinite(spare) and spare >= 0):
                raise ValidationError("spare must be finite and >= 0")
            missing = [i for i, u in enumerate(units, start=1) if u.p_max is None]
            if missing:
                raise ValidationError(
                    f"spare constraint requires p_max on every unit; missing on unit {missing[0]}"
                )

        if lambda1 is None:
            lambda1 = _default_penalty_weight(units)
        if not (math.isfinite(lambda1) and lambda1 > 0):
            raise ValidationError("lambda1 must be finite and > 0")

        if spare is None:
            penalty = PenaltyConfig(lambda1=lambda1)
        else:
            if lambda2 is None:
                lambda2 = _default_penalty_weight(units)
            if not (math.isfinite(lambda2) and lambda2 > 0):
                raise ValidationError("lambda2 must be finite and > 0")
            if c_c is None:
                c_c = _granularity([u.p_max for u in units] + [load, spare])
            elif not (math.isfinite(c_c) and c_c > 0):
                raise ValidationError("c_c must be finite and > 0")
            slack_range = sum(u.p_max for u in units) - load - spare
            if k is None:
                k = _slack_bits(c_c, slack_range)
            elif k < 1:
                raise ValidationError("slack bit count k must be >= 1")
            if c_c * (2**k - 1) < slack_range - _GRANULARITY_TOL:
                raise ConfigurationError(
                    f"slack range insufficient: c_c*(2^k-1) = {c_c * (2 ** k - 1):g} "
                    f"< sum(p_max) - load - spare = {slack_range:g}"
                )
            penalty = PenaltyConfig(lambda1=lambda1, lambda2=lambda2, c_c=c_c, k=k)
        return cls(units=units, load=load, spare=spare, penalty=penalty)

    @classmethod
    def from_dict(cls, doc: dict) -> "UCInstance":
        """Parse a schema-conforming dict (see `load_instance`)."""
        if not isinstance(doc, dict):
            raise InstanceFormatError("instance document must be an object")
        unknown = set(doc) - {"units", "load", "spare", "penalty"}
        if unknown:
            raise InstanceFormatError(f"unknown top-level key: {sorted(unknown)[0]}")
        raw_units = doc.get("units")
        if not isinstance(raw_units, list) or not raw_units:
            raise InstanceFormatError("units: must be a non-empty array")
        units = []
        for i, entry in enumerate(raw_units, start=1):
            if not isinstance(entry, dict):
                raise InstanceFormatError(f"units[{i}]: must be an object")
            for key in ("a", "b", "c", "p"):
                if key not in entry:
                    raise InstanceFormatError(f"units[{i}].{key}: missing")
            bad = set(entry) - {"a", "b", "c", "p", "p_max"}
            if bad:
                raise InstanceFormatError(f"units[{i}].{sorted(bad)[0]}: unknown key")
            values = {}
            for key in ("a", "b", "c", "p", "p_max"):
                if key not in entry:
                    continue
                if not isinstance(entry[key], (int, float)) or isinstance(entry[key], bool):
                    raise InstanceFormatError(f"units[{i}].{key}: must be a number")
                values[key] = float(entry[key])
            units.append(UnitSpec(**values))
        if "load" not in doc:
            raise InstanceFormatError("load: missing")
        if not isinstance(doc["load"], (int, float)) or isinstance(doc["load"], bool):
            raise InstanceFormatError("load: must be a number")
        spare = doc.get("spare")
        if spare is not None:
            if not isinstance(spare, (int, float)) or isinstance(spare, bool):
                raise InstanceFormatError("spare: must be a number")
            spare = float(spare)
        overrides = {}
        raw_penalty = doc.get("penalty")
        if raw_penalty is not None:
            if not isinstance(raw_penalty, dict):
                raise InstanceFormatError("penalty: must be an object")
            bad = set(raw_penalty) - {"lambda1", "lambda2", "c_c", "k"}
            if bad:
                raise InstanceFormatError(f"penalty.{sorted(bad)[0]}: unknown key")
            for key in ("lambda1", "lambda2", "c_c"):
                if key in raw_penalty:
                    if not isinstance(raw_penalty[key], (int, float)) or isinstance(
                        raw_penalty[key], bool
                    ):
                        raise InstanceFormatError(f"penalty.{key}: must be a number")
                    overrides[key] = float(raw_penalty[key])
            if "k" in raw_penalty:
                if not isinstance(raw_penalty["k"], int) or isinstance(raw_penalty["k"], bool):
                    raise InstanceFormatError("penalty.k: must be an integer")
                overrides["k"] = raw_penalty["k"]
        return cls.build(units, float(doc["load"]), spare, **overrides)

    def to_dict(self) -> dict:
        """Schema-conforming dict with the resolved penalty written out."""
        doc: dict = {"units": [], "load": self.load}
        for u in self.units:
            entry = {"a": u.a, "b": u.b, "c": u.c, "p": u.p}
            if u.p_max is not None:
                entry["p_max"] = u.p_max
            doc["units"].append(entry)
        if self.spare is not None:
            doc["spare"] = self.spare
        penalty = {"lambda1": self.penalty.lambda1}
        if self.penalty.lambda2 is not None:
            penalty["lambda2"] = self.penalty.lambda2
        if self.penalty.c_c is not None:
            penalty["c_c"] = self.penalty.c_c
        if self.penalty.k is not None:
            penalty["k"] = self.penalty.k
        doc["penalty"] = penalty
        return doc


def load_instance(path: str | Path) -> UCInstance:
    """Load and validate a JSON instance file.

    Top-level keys: `units` (array of objects with `a`, `b`, `c`, `p`,
    optional `p_max`), `load`, optional `spare`, optional `penalty` (object
    with optional `lambda1`, `lambda2`, `c_c`, `k`).
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from exc
    return UCInstance.from_dict(doc)


def save_instance(instance: UCInstance, path: str | Path) -> None:
    """Write an instance back to JSON; reloading yields an equal instance."""
    Path(path).write_text(json.dumps(instance.to_dict(), indent=2) + "\n")


def bundled_instance_path(name: str) -> Path:
    """Path of a data file shipped with the package (e.g. "units5.json")."""
    path = Path(__file__).parent / "data" / name
    if not path.exists():
        raise FileNotFoundError(f"no bundled instance named {name!r}")
    return path
