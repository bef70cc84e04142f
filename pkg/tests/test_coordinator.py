from __future__ import annotations

from coordinator import Coordinator
from qualtensor.config import SamplingConfig, SearchConfig
from qualtensor.qualitative import SignTensor
from qualtensor.tensor import Shape


def test_remark_pipeline(remark_pattern):
    report = Coordinator(SearchConfig(restarts=3, iterations=200), SamplingConfig(samples=10)).analyze(remark_pattern)
    assert report["shape"] == [2, 2, 2]
    assert report["signs"] == {"positive": 3, "negative": 0, "zero": 5}
    assert report["term_rank"] == 1
    assert report["mr1"] is False
    assert report["sns_necessary"]["overall"] is True
    assert report["bounds"]["mr_low"] == 3
    assert report["bounds"]["Mr_high"] == 3
    assert report["seed"] == 0
    assert report["options"]["search"]["iterations"] == 200
    assert report["options"]["sampling"]["samples"] == 10


def test_non_cubical_skips_sns_test():
    S = SignTensor(Shape.of(2, 3), {(1, 1): 1, (2, 3): -1})
    report = Coordinator(SearchConfig(restarts=2), SamplingConfig(samples=5)).analyze(S)
    assert report["sns_necessary"] is None
    assert report["term_rank"] == 2
    assert report["bounds"]["mr_low"] == 2


def test_order_one_skips_bounds():
    report = Coordinator().analyze(SignTensor(Shape.of(3), {(2,): 1}))
    assert report["bounds"] is None
    assert report["mr1"] is True
    assert report["condensed_shape"] == [1]
