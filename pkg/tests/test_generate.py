from __future__ import annotations

import pytest

from pra.errors import ConfigError
from pra.generate import GeneratorParams, generate_instance, make_rooms, mean_occupancy
from pra.io import write_instance
from pra.model import check_period_feasibility


def test_deterministic_per_seed():
    params = GeneratorParams(horizon=60, n_rooms=10)
    assert write_instance(generate_instance(params, 7)) == write_instance(generate_instance(params, 7))
    assert write_instance(generate_instance(params, 7)) != write_instance(generate_instance(params, 8))
    big = 2**64 - 1
    assert generate_instance(params, big) == generate_instance(params, big)


def test_rooms_follow_double_share():
    rooms = make_rooms(GeneratorParams(n_rooms=20, double_share=0.8))
    assert sum(r.capacity == 2 for r in rooms) == 16 and len(rooms) == 20


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_occupancy_and_feasibility(seed):
    params = GeneratorParams(horizon=120, n_rooms=20, double_share=0.8, occupancy=0.85)
    inst = generate_instance(params, seed)
    beds = sum(r.capacity for r in inst.rooms)
    target = params.occupancy * beds
    assert abs(mean_occupancy(inst) - target) <= 0.10 * target
    for t in inst.periods():
        assert len(inst.present_ids(t)) <= beds
        assert check_period_feasibility(inst, t)
    for pid, _ in inst.preassigned:
        assert inst.patient(pid).arrival == 1
    assert all(p.registered <= p.arrival for p in inst.patients)


def test_tiny_target_gives_empty_ward():
    inst = generate_instance(GeneratorParams(horizon=10, n_rooms=2, occupancy=1e-9), 0)
    assert inst.patients == ()


@pytest.mark.parametrize("kwargs", [
    {"occupancy": 0.0}, {"occupancy": 1.5}, {"double_share": -0.1}, {"horizon": 1}, {"n_rooms": 0},
    {"mean_los": 0.5}, {"min_age": 50, "max_age": 40}, {"single_request_prob": 1.2}, {"female_share": -1},
])
def test_bad_params(kwargs):
    with pytest.raises(ConfigError):
        GeneratorParams(**kwargs)
