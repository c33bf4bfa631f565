"""Synthetic corpus generator: validity, determinism, label coercions."""

import collections

import numpy as np
import pytest

from stylebench.models import (
    ScenarioType,
    StyleLabel,
    clip_from_dict,
    clip_to_dict,
    validate_clip,
)
from stylebench.synthetic import (
    NATURAL_STYLE_WEIGHTS,
    generate_clip,
    mixed_corpus,
    scenario_corpus,
)

A, N, C = StyleLabel.AGGRESSIVE, StyleLabel.NORMAL, StyleLabel.CONSERVATIVE


@pytest.mark.parametrize("scenario", list(ScenarioType))
@pytest.mark.parametrize("style", list(StyleLabel))
def test_generated_clips_validate(scenario, style):
    rng = np.random.default_rng(hash((scenario.value, style.value)) % 2**32)
    for i in range(3):
        clip, actual = generate_clip(scenario, style, i, rng)
        assert validate_clip(clip.trajectory, clip.agents, clip.context).ok
        assert clip.context.scenario is scenario
        assert actual.value.lower() in clip.clip_id


def test_clip_ids_carry_scenario_and_index():
    rng = np.random.default_rng(0)
    clip, actual = generate_clip(ScenarioType.LANE_FOLLOWING, A, 7, rng)
    assert clip.clip_id == f"lane_following-00007-{actual.value.lower()}"


def test_serialization_round_trip():
    for clip, _ in mixed_corpus(2, seed=5):
        assert clip_from_dict(clip_to_dict(clip)) == clip


def test_same_seed_reproduces_corpus():
    a = mixed_corpus(4, seed=123)
    b = mixed_corpus(4, seed=123)
    assert [(clip_to_dict(c), s) for c, s in a] == [(clip_to_dict(c), s) for c, s in b]
    c = mixed_corpus(4, seed=124)
    assert [x.clip_id for x, _ in a] != [x.clip_id for x, _ in c] or any(
        clip_to_dict(x) != clip_to_dict(y) for (x, _), (y, _) in zip(a, c)
    )


def test_carpark_always_normal():
    for clip, actual in scenario_corpus(ScenarioType.CARPARK, 30, seed=9):
        assert actual is N
        assert clip.clip_id.endswith("-n")


def test_roundabout_interior_never_conservative():
    rng = np.random.default_rng(11)
    for i in range(20):
        _, actual = generate_clip(ScenarioType.ROUNDABOUT_INTERIOR, C, i, rng)
        assert actual in (N, A)


def test_natural_weights_skew_normal():
    counts = collections.Counter(
        actual for _, actual in scenario_corpus(
            ScenarioType.LANE_FOLLOWING, 400, seed=21, weights=NATURAL_STYLE_WEIGHTS
        )
    )
    assert counts[N] > counts[A] > 0
    assert counts[N] > counts[C] > 0
    assert counts[N] / 400 > 0.6


def test_uniform_weights_balance_styles():
    counts = collections.Counter(
        actual
        for _, actual in scenario_corpus(ScenarioType.COUNTRYSIDE_ROAD, 300, seed=3)
    )
    for style in (A, N, C):
        assert counts[style] > 60


def test_corpus_spans_requested_scenarios():
    subset = [ScenarioType.CARPARK, ScenarioType.CROSSWALK]
    corpus = mixed_corpus(3, seed=1, scenarios=subset)
    assert [c.context.scenario for c, _ in corpus] == [
        ScenarioType.CARPARK] * 3 + [ScenarioType.CROSSWALK] * 3
