"""Roommate-fit scorers ``w``: patient subsets to nonnegative integer scores.

Every scorer returns integers. The weighted age scorer works at a declared
fixed-point ``scale`` (its score is ``round(scale * (ratio - 1))``); all
other scorers have ``scale == 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from pra.errors import ConfigError, ScoreDataError


class ScoreType(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"


class Kind(enum.Enum):
    ZERO = "zero"
    ABSOLUTE_AGE = "abs-age"
    BOUNDED_AGE = "bounded-age"
    AGE_CLASS_COUNT = "age-class-count"
    AGE_CLASS_INDICATOR = "age-class-ind"
    WEIGHTED_AGE = "weighted-age"
    PRE_POST_SURGERY = "prepost"
    SIMILAR_ROOMMATE = "similar-age"
    BALANCED_CLASSES = "balanced-classes"


_TYPES = {
    Kind.ZERO: ScoreType.TYPE_I,
    Kind.ABSOLUTE_AGE: ScoreType.TYPE_I,
    Kind.AGE_CLASS_COUNT: ScoreType.TYPE_I,
    Kind.WEIGHTED_AGE: ScoreType.TYPE_I,
    Kind.BOUNDED_AGE: ScoreType.TYPE_II,
    Kind.PRE_POST_SURGERY: ScoreType.TYPE_II,
    Kind.SIMILAR_ROOMMATE: ScoreType.TYPE_II,
    Kind.BALANCED_CLASSES: ScoreType.TYPE_II,
    Kind.AGE_CLASS_INDICATOR: ScoreType.TYPE_III,
}


def _round_half_away(x: Fraction) -> int:
    if x >= 0:
        return math.floor(x + Fraction(1, 2))
    return -math.floor(-x + Fraction(1, 2))


def _age_class(age: int, k: int) -> int:
    return -(-age // k)


@dataclass(frozen=True)
class Scorer:
    """A named, parameterised scoring function.

    Use the module-level constructors (``absolute_age()``, ``bounded_age(10)``,
    ...) or ``parse_scorer("bounded-age:k=10")`` rather than building this
    directly.
    """

    kind: Kind
    k: int | None = None
    eps: Fraction | None = None
    scale: int = 1
    mode: str | None = None
    x: int | None = None
    singleton_penalty: bool = False

    def __post_init__(self):
        needs_k = {Kind.BOUNDED_AGE, Kind.AGE_CLASS_COUNT, Kind.AGE_CLASS_INDICATOR,
                   Kind.SIMILAR_ROOMMATE, Kind.BALANCED_CLASSES}
        if self.kind in needs_k and (self.k is None or self.k < 1):
            raise ConfigError(f"{self.kind.value}: k must be an integer >= 1")
        if self.kind == Kind.WEIGHTED_AGE:
            if self.eps is None or self.eps <= 0:
                raise ConfigError("weighted-age: eps must be > 0")
            object.__setattr__(self, "eps", Fraction(self.eps))
        if self.scale < 1:
            raise ConfigError("scale must be >= 1")
        if self.kind != Kind.WEIGHTED_AGE and self.scale != 1:
            raise ConfigError(f"{self.kind.value}: only weighted-age carries a scale")
        if self.kind == Kind.SIMILAR_ROOMMATE and self.mode not in ("diff", "class"):
            raise ConfigError("similar-age: mode must be 'diff' or 'class'")
        if self.kind == Kind.BALANCED_CLASSES and (self.x is None or self.x < 0):
            raise ConfigError("balanced-classes: x must be an integer >= 0")

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def score_type(self) -> ScoreType:
        return _TYPES[self.kind]

    @property
    def singletons_free(self) -> bool:
        """True when every single-patient set scores 0 (required by the pairwise IPs)."""
        if self.kind == Kind.AGE_CLASS_COUNT:
            return False
        if self.kind == Kind.PRE_POST_SURGERY:
            return not self.singleton_penalty
        return True

    def spec(self) -> str:
        """Inverse of :func:`parse_scorer`."""
        params = []
        if self.k is not None:
            params.append(f"k={self.k}")
        if self.eps is not None:
            params.append(f"eps={self.eps}")
        if self.kind == Kind.WEIGHTED_AGE:
            params.append(f"scale={self.scale}")
        if self.mode is not None:
            params.append(f"mode={self.mode}")
        if self.x is not None:
            params.append(f"x={self.x}")
        if self.singleton_penalty:
            params.append("singleton=1")
        return self.name + (":" + ",".join(params) if params else "")

    def _ages(self, patients) -> list[int]:
        ages = []
        for p in patients:
            if p.age is None:
                raise ScoreDataError(f"patient {p.id!r} has no age")
            ages.append(p.age)
        return ages

    def score(self, patients: Iterable) -> int:
        """Score of one occupant set (order does not matter)."""
        group = list(patients)
        kind = self.kind
        if kind == Kind.ZERO or not group:
            return 0
        if kind == Kind.PRE_POST_SURGERY:
            if len(group) == 1:
                return 1 if self.singleton_penalty else 0
            arrivals = [p.arrival for p in group]
            return 0 if max(arrivals) - min(arrivals) > 1 else 1
        ages = self._ages(group)
        lo, hi = min(ages), max(ages)
        if kind == Kind.ABSOLUTE_AGE:
            return hi - lo
        if kind == Kind.BOUNDED_AGE:
            return 0 if hi - lo <= self.k else 1
        if kind == Kind.AGE_CLASS_COUNT:
            return len({_age_class(a, self.k) for a in ages})
        if kind == Kind.AGE_CLASS_INDICATOR:
            return 0 if len({_age_class(a, self.k) for a in ages}) == 1 else 1
        if kind == Kind.WEIGHTED_AGE:
            ratio = (hi + self.eps) / (lo + self.eps)
            return _round_half_away(self.scale * (ratio - 1))
        if kind == Kind.SIMILAR_ROOMMATE:
            if len(group) == 1:
                return 0
            if self.mode == "diff":
                ok = all(any(abs(a - b) <= self.k for j, b in enumerate(ages) if j != i)
                         for i, a in enumerate(ages))
            else:
                classes = [_age_class(a, self.k) for a in ages]
                ok = all(any(c == d for j, d in enumerate(classes) if j != i)
                         for i, c in enumerate(classes))
            return 0 if ok else 1
        if kind == Kind.BALANCED_CLASSES:
            cells: dict[int, int] = {}
            for a in ages:
                c = _age_class(a, self.k)
                cells[c] = cells.get(c, 0) + 1
            sizes = cells.values()
            return 0 if max(sizes) - min(sizes) <= self.x else 1
        raise AssertionError(kind)

    def __call__(self, patients: Iterable) -> int:
        return self.score(patients)


def zero() -> Scorer:
    return Scorer(Kind.ZERO)


def absolute_age() -> Scorer:
    return Scorer(Kind.ABSOLUTE_AGE)


def bounded_age(k: int) -> Scorer:
    return Scorer(Kind.BOUNDED_AGE, k=k)


def age_class_count(k: int) -> Scorer:
    return Scorer(Kind.AGE_CLASS_COUNT, k=k)


def age_class_indicator(k: int) -> Scorer:
    return Scorer(Kind.AGE_CLASS_INDICATOR, k=k)


def weighted_age(eps=1, scale: int = 1000) -> Scorer:
    return Scorer(Kind.WEIGHTED_AGE, eps=Fraction(eps), scale=scale)


def pre_post_surgery(singleton_penalty: bool = False) -> Scorer:
    return Scorer(Kind.PRE_POST_SURGERY, singleton_penalty=singleton_penalty)


def similar_roommate(k: int, mode: str = "diff") -> Scorer:
    return Scorer(Kind.SIMILAR_ROOMMATE, k=k, mode=mode)


def balanced_classes(k: int, x: int = 0) -> Scorer:
    return Scorer(Kind.BALANCED_CLASSES, k=k, x=x)


def builtin_scorers() -> list[Scorer]:
    """One representative of every built-in kind, with the defaults used in tests and benches."""
    return [zero(), absolute_age(), bounded_age(10), age_class_count(10), age_class_indicator(10),
            weighted_age(1, 1000), pre_post_surgery(), similar_roommate(10), balanced_classes(10, 0)]


def classify(scorer: Scorer) -> ScoreType:
    return scorer.score_type


_INT_KEYS = {"k", "scale", "x"}


def parse_scorer(spec: str) -> Scorer:
    """Parse ``name[:key=value[,key=value]...]``, e.g. ``weighted-age:eps=1,scale=1000``."""
    name, _, rest = spec.strip().partition(":")
    try:
        kind = Kind(name)
    except ValueError:
        names = ", ".join(k.value for k in Kind)
        raise ConfigError(f"unknown scorer {name!r} (expected one of: {names})") from None
    params: dict = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ConfigError(f"malformed scorer parameter {item!r}")
            value = value.strip()
            try:
                if key in _INT_KEYS:
                    params[key] = int(value)
                elif key == "eps":
                    params[key] = Fraction(value)
                elif key == "mode":
                    params[key] = value
                elif key == "singleton":
                    params["singleton_penalty"] = value in ("1", "true", "yes")
                else:
                    raise ConfigError(f"unknown scorer parameter {key!r}")
            except ValueError:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from None
    defaults = {
        Kind.WEIGHTED_AGE: {"eps": Fraction(1), "scale": 1000},
        Kind.SIMILAR_ROOMMATE: {"mode": "diff"},
        Kind.BALANCED_CLASSES: {"x": 0},
    }.get(kind, {})
    return Scorer(kind, **{**defaults, **params})


def common_stay(p, q, start: int = 1, end: int | None = None) -> int:
    """Number of shared bed periods of two patients, optionally clipped to ``[start, end]``."""
    lo = max(p.arrival, q.arrival, start)
    hi = min(p.discharge, q.discharge)
    if end is not None:
        hi = min(hi, end + 1)
    return max(0, hi - lo)


class PairWeightTable(Mapping):
    """Symmetric ``w_pq`` for same-sex patient pairs with overlapping stays."""

    def __init__(self, weights: dict[tuple[str, str], int]):
        self._w = dict(weights)

    def __getitem__(self, key):
        p, q = key
        if (p, q) in self._w:
            return self._w[p, q]
        return self._w[q, p]

    def __contains__(self, key):
        p, q = key
        return (p, q) in self._w or (q, p) in self._w

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def get(self, key, default=None):
        return self[key] if key in self else default


def pair_weights(scorer: Scorer, instance) -> PairWeightTable:
    """``w({p, q})`` for every pair in P^R (same sex, positive common stay)."""
    table = {}
    pats = instance.patients
    for i, p in enumerate(pats):
        for q in pats[i + 1:]:
            if p.sex != q.sex or common_stay(p, q) <= 0:
                continue
            w = scorer.score((p, q))
            if w < 0:
                raise ConfigError(f"negative weight for pair ({p.id}, {q.id})")
            table[p.id, q.id] = w
    return PairWeightTable(table)
