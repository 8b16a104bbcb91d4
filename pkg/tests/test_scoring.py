from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pra.errors import ConfigError, ScoreDataError
from pra.model import Instance, Patient, Room
from pra.scoring import (
    ScoreType,
    absolute_age,
    age_class_count,
    age_class_indicator,
    balanced_classes,
    bounded_age,
    builtin_scorers,
    classify,
    pair_weights,
    parse_scorer,
    pre_post_surgery,
    similar_roommate,
    weighted_age,
    zero,
)


def ages(*values, sex="F"):
    return [Patient(f"p{i}", sex, 1, 2, a) for i, a in enumerate(values)]


def arrivals(*values):
    return [Patient(f"p{i}", "F", a, a + 1, 50) for i, a in enumerate(values)]


def test_documented_values():
    assert absolute_age().score(ages(30, 45)) == 15
    assert bounded_age(10).score(ages(30, 41)) == 1
    assert bounded_age(10).score(ages(30, 39)) == 0
    assert age_class_count(10).score(ages(9, 12)) == 2
    assert weighted_age(1, 100).score(ages(29, 59)) == 100
    assert pre_post_surgery().score(arrivals(3, 5)) == 0
    assert pre_post_surgery().score(arrivals(3, 4)) == 1


def test_extended_scorers():
    assert similar_roommate(5).score(ages(30, 34, 60, 63)) == 0
    assert similar_roommate(5).score(ages(30, 34, 60)) == 1
    assert similar_roommate(10, "class").score(ages(31, 39, 55, 58)) == 0
    assert similar_roommate(10, "class").score(ages(31, 41)) == 1
    assert balanced_classes(10, 0).score(ages(31, 35, 45, 48)) == 0
    assert balanced_classes(10, 0).score(ages(31, 35, 45)) == 1
    assert balanced_classes(10, 1).score(ages(31, 35, 45)) == 0


def test_weighted_age_rounds_half_away():
    # (2 + 1) / (1 + 1) - 1 = 0.5 -> 1 at scale 1
    assert weighted_age(1, 1).score(ages(1, 2)) == 1
    assert weighted_age(Fraction(1, 2), 3).score(ages(10, 20)) == round(3 * (Fraction(41, 21) - 1))


def test_empty_and_singletons_score_zero():
    for scorer in builtin_scorers():
        assert scorer.score(()) == 0
        if scorer.singletons_free:
            assert scorer.score(ages(47)) == 0
    assert age_class_count(10).score(ages(47)) == 1
    assert pre_post_surgery(singleton_penalty=True).score(ages(47)) == 1


def test_classification():
    assert classify(absolute_age()) is ScoreType.TYPE_I
    assert classify(age_class_count(5)) is ScoreType.TYPE_I
    assert classify(weighted_age()) is ScoreType.TYPE_I
    for s in (bounded_age(3), pre_post_surgery(), similar_roommate(3), balanced_classes(3)):
        assert classify(s) is ScoreType.TYPE_II
    assert classify(age_class_indicator(10)) is ScoreType.TYPE_III


def test_missing_age():
    with pytest.raises(ScoreDataError):
        absolute_age().score([Patient("p", "F", 1, 2), Patient("q", "F", 1, 2, 40)])


@pytest.mark.parametrize("spec", ["zero", "abs-age", "bounded-age:k=10", "age-class-count:k=7",
                                  "age-class-ind:k=10", "weighted-age:eps=1,scale=1000",
                                  "weighted-age:eps=1/2,scale=10", "prepost", "prepost:singleton=1",
                                  "similar-age:k=5,mode=class", "balanced-classes:k=10,x=2"])
def test_spec_round_trip(spec):
    scorer = parse_scorer(spec)
    assert parse_scorer(scorer.spec()) == scorer


@pytest.mark.parametrize("spec", ["nope", "bounded-age", "bounded-age:k=0", "abs-age:k", "weighted-age:eps=0",
                                  "bounded-age:k=ten", "similar-age:k=3,mode=odd", "abs-age:color=3",
                                  "abs-age:scale=10"])
def test_bad_specs(spec):
    with pytest.raises(ConfigError):
        parse_scorer(spec)


def test_pair_weights():
    pats = [Patient("a", "F", 1, 3, 30), Patient("b", "F", 2, 4, 40), Patient("m", "M", 1, 4, 50),
            Patient("c", "F", 3, 4, 60)]
    inst = Instance(4, [Room("r", 2)], pats)
    table = pair_weights(absolute_age(), inst)
    assert table["a", "b"] == table["b", "a"] == 10
    assert ("a", "m") not in table
    assert ("a", "c") not in table
    assert table["b", "c"] == 20
    assert len(table) == 2


def test_pair_weights_agree_with_score():
    rng = random.Random(11)
    for _ in range(30):
        pats = []
        for i in range(rng.randint(2, 20)):
            a = rng.randint(1, 8)
            pats.append(Patient(f"p{i}", rng.choice("FM"), a, rng.randint(a, 9), rng.randint(18, 90)))
        inst = Instance(9, [Room("r", 2)], pats)
        for scorer in builtin_scorers():
            table = pair_weights(scorer, inst)
            for i, p in enumerate(pats):
                for q in pats[i + 1:]:
                    overlap = min(p.discharge, q.discharge) - max(p.arrival, q.arrival)
                    if p.sex == q.sex and overlap > 0:
                        assert table[p.id, q.id] == scorer.score((p, q))
                    else:
                        assert (p.id, q.id) not in table


age_lists = st.lists(st.integers(0, 100), min_size=0, max_size=5)


@settings(max_examples=200, deadline=None)
@given(age_lists, st.randoms(use_true_random=False))
def test_order_invariance_and_range(values, rnd):
    group = ages(*values)
    shuffled = list(group)
    rnd.shuffle(shuffled)
    for scorer in builtin_scorers():
        s = scorer.score(group)
        assert s == scorer.score(shuffled) and s >= 0
        if scorer.score_type is not ScoreType.TYPE_I and len(group) >= 1:
            assert s in (0, 1)


@settings(max_examples=200, deadline=None)
@given(age_lists, st.integers(0, 100))
def test_absolute_age_monotone(values, extra):
    assert absolute_age().score(ages(*values, extra)) >= absolute_age().score(ages(*values))


def test_zero_scorer():
    assert zero().score(ages(1, 99)) == 0
