"""Synthetic ward instances.

Arrivals are Poisson per period with a rate set by Little's law
(``occupancy * beds / mean_los``), lengths of stay geometric, ages
uniform. A patient that would make some period unpackable is rejected;
since rejections lower the occupancy, the arrival rate is recalibrated
over a few passes until the mean occupancy over the middle of the
horizon is close to the target. Period 1 starts with a steady-state
population that is preassigned to rooms.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from pra.errors import ConfigError
from pra.model import FEMALE, MALE, Instance, Patient, Room, sex_split_feasible


@dataclass(frozen=True)
class GeneratorParams:
    horizon: int = 365
    n_rooms: int = 20
    double_share: float = 0.8
    occupancy: float = 0.85
    mean_los: float = 5.0
    min_age: int = 18
    max_age: int = 90
    single_request_prob: float = 0.2
    female_share: float = 0.5
    mean_lead: float = 3.0
    calibration_passes: int = 6

    def __post_init__(self):
        if self.horizon < 2 or self.n_rooms < 1:
            raise ConfigError("need horizon >= 2 and at least one room")
        if not 0 <= self.double_share <= 1 or not 0 < self.occupancy <= 1:
            raise ConfigError("double_share must be in [0, 1] and occupancy in (0, 1]")
        if not 0 <= self.single_request_prob <= 1 or not 0 <= self.female_share <= 1:
            raise ConfigError("single_request_prob and female_share must be in [0, 1]")
        if self.calibration_passes < 1:
            raise ConfigError("calibration_passes must be >= 1")
        if self.mean_los < 1 or self.mean_lead < 0:
            raise ConfigError("mean_los must be >= 1 and mean_lead >= 0")
        if not 0 <= self.min_age <= self.max_age:
            raise ConfigError("bad age range")

    def as_dict(self) -> dict:
        return asdict(self)


def make_rooms(params: GeneratorParams) -> list[Room]:
    n_doubles = int(round(params.double_share * params.n_rooms))
    width = len(str(params.n_rooms))
    rooms = []
    for i in range(params.n_rooms):
        cap = 2 if i < n_doubles else 1
        rooms.append(Room(f"r{i + 1:0{width}d}", cap))
    return rooms


class _Ward:
    """Per-period sex counts used to reject unpackable patients."""

    def __init__(self, horizon: int, caps: list[int]):
        self.caps = caps
        self.count = {FEMALE: np.zeros(horizon + 2, np.int64), MALE: np.zeros(horizon + 2, np.int64)}

    def fits(self, sex: str, a: int, d: int) -> bool:
        f, m = self.count[FEMALE], self.count[MALE]
        for t in range(a, d):
            nf = f[t] + (sex == FEMALE)
            nm = m[t] + (sex == MALE)
            if not sex_split_feasible(int(nf), int(nm), self.caps):
                return False
        return True

    def add(self, sex: str, a: int, d: int) -> None:
        self.count[sex][a:d] += 1

    def occupancy(self) -> np.ndarray:
        return self.count[FEMALE] + self.count[MALE]


def _draw(params: GeneratorParams, rng: np.random.Generator, rate: float, caps: list[int]):
    T = params.horizon
    beds = sum(caps)
    ward = _Ward(T, caps)
    p_los = 1.0 / params.mean_los
    p_lead = 1.0 / (params.mean_lead + 1.0)
    pats = []

    def new(a, initial):
        los = int(rng.geometric(p_los))
        d = min(a + los, T)
        sex = FEMALE if rng.random() < params.female_share else MALE
        age = int(rng.integers(params.min_age, params.max_age + 1))
        req = bool(rng.random() < params.single_request_prob)
        lead = 0 if initial else int(rng.geometric(p_lead)) - 1
        reg = max(1, a - lead)
        if a >= d or not ward.fits(sex, a, d):
            return
        ward.add(sex, a, d)
        pats.append((a, d, sex, age, req, reg, initial))

    for _ in range(int(rng.poisson(params.occupancy * beds))):
        new(1, True)
    for t in range(2, T):
        for _ in range(int(rng.poisson(rate))):
            new(t, False)
    return pats, ward


def _middle(params: GeneratorParams) -> slice:
    lo = 1 + int(0.1 * params.horizon)
    hi = 1 + int(0.9 * params.horizon)
    return slice(lo, max(hi, lo + 1))


def _preassign(pats, rooms) -> dict[int, str]:
    """Rooms for the initial population: a sex split of period 1, filled greedily."""
    caps = [r.capacity for r in rooms]
    idx_f = [i for i, p in enumerate(pats) if p[6] and p[2] == FEMALE]
    idx_m = [i for i, p in enumerate(pats) if p[6] and p[2] == MALE]
    singles = [r for r in rooms if r.capacity == 1]
    doubles = [r for r in rooms if r.capacity == 2]
    others = [r for r in rooms if r.capacity > 2]
    if others or not sex_split_feasible(len(idx_f), len(idx_m), caps):
        raise ConfigError("initial population cannot be packed")
    # female share: as many doubles as needed, then singles
    for d in range(len(doubles) + 1):
        s_needed = max(0, len(idx_f) - 2 * d)
        if s_needed <= len(singles) and len(idx_m) <= 2 * (len(doubles) - d) + len(singles) - s_needed:
            break
    female_rooms = doubles[:d] + singles[:s_needed]
    male_rooms = doubles[d:] + singles[s_needed:]
    out = {}
    for idx, pool in ((idx_f, female_rooms), (idx_m, male_rooms)):
        # single rooms first, and requesters take them first
        slots = [r.id for r in pool if r.capacity == 1] + [r.id for r in pool if r.capacity == 2 for _ in (0, 1)]
        idx = sorted(idx, key=lambda i: not pats[i][4])
        out.update(zip(idx, slots))
    return out


def generate_instance(params: GeneratorParams | None = None, seed: int = 0) -> Instance:
    """Reproducible synthetic instance for ``params`` and ``seed``."""
    params = params or GeneratorParams()
    rooms = make_rooms(params)
    caps = [r.capacity for r in rooms]
    beds = sum(caps)
    target = params.occupancy * beds
    rate = target / params.mean_los
    seeds = np.random.SeedSequence(seed).spawn(params.calibration_passes)
    best = None
    for ss in seeds:
        rng = np.random.Generator(np.random.PCG64(ss))
        pats, ward = _draw(params, rng, rate, caps)
        achieved = float(ward.occupancy()[_middle(params)].mean())
        err = abs(achieved - target) / target
        if best is None or err < best[0]:
            best = (err, pats)
        if err <= 0.05:
            break
        rate *= target / max(achieved, 1e-9)
    pats = best[1]
    pats.sort(key=lambda p: (p[0], p[1]))
    width = len(str(len(pats)))
    pre = _preassign(pats, rooms)
    patients = []
    preassigned = set()
    for i, (a, d, sex, age, req, reg, initial) in enumerate(pats):
        pid = f"p{i + 1:0{width}d}"
        patients.append(Patient(pid, sex, a, d, age, req, reg))
        if i in pre:
            preassigned.add((pid, pre[i]))
    return Instance(params.horizon, rooms, patients, frozenset(preassigned))


def mean_occupancy(instance: Instance, middle: bool = True) -> float:
    """Average number of occupied beds, over the middle 80% of periods by default."""
    T = instance.horizon
    counts = np.zeros(T + 2)
    for p in instance.patients:
        counts[p.arrival:p.discharge] += 1
    if middle:
        lo = 1 + int(0.1 * T)
        hi = max(1 + int(0.9 * T), lo + 1)
        return float(counts[lo:hi].mean())
    return float(counts[1:T + 1].mean())
