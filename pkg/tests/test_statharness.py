import json
import math
from fractions import Fraction

import numpy as np
import pytest

from treelab.growth import depth_profile
from treelab.samplers import RngStream
from treelab.statharness import (
    ExactLaw,
    concentration_check,
    enumerate_growth,
    enumerate_urn,
    event_frequency_F,
    exact_law_test,
    exponent_fit,
    f_event_bound,
    ks_distance_test,
    two_sample_test,
)


def test_exact_law_must_sum_to_one():
    with pytest.raises(ValueError):
        ExactLaw(outcomes={0: Fraction(1, 2)})
    ExactLaw(outcomes={0: Fraction(1, 2), 1: Fraction(1, 2)})


def test_enumerate_growth_path_counts():
    # The chain's number of equally likely paths is the product of the edge
    # counts at each step, so a constant statistic gets probability one.
    law = enumerate_growth(2, 4, lambda t: 0)
    assert law.outcomes == {0: Fraction(1)}


def test_enumerate_growth_first_leaf_depth_small_case():
    # One growth step at ell=1: the single edge splits and a new leaf
    # attaches to the midpoint, so leaf 1 sits at depth 2 with certainty.
    law = enumerate_growth(1, 1, lambda t: int(depth_profile(t)[t.leaf_ids[0]]))
    assert law.outcomes == {2: Fraction(1)}
    # Two steps: the second split hits one of 3 edges uniformly; the leaf-1
    # depth goes to 3 iff the split lands on one of the 2 edges on its path.
    law2 = enumerate_growth(1, 2, lambda t: int(depth_profile(t)[t.leaf_ids[0]]))
    assert law2.outcomes == {2: Fraction(1, 3), 3: Fraction(2, 3)}


def test_enumerate_urn_infinite_small():
    law = enumerate_urn("infinite", 2, {}, 2, lambda s: s)
    # two draws from a single ball, then a new color appears
    assert law.outcomes == {(3, 1): Fraction(1)}


def test_enumerate_urn_classical_is_polya():
    law = enumerate_urn("classical", 1, {"b": 2, "w": 1}, 3, lambda s: s[1])
    # white count after 3 draws from (b=2, w=1): Polya(1,2)
    total = sum(law.outcomes.values())
    assert total == 1
    assert law.outcomes[1] == Fraction(2 * 3 * 4, 3 * 4 * 5)


def test_exact_law_test_accepts_true_law_and_rejects_wrong_one():
    law = ExactLaw(outcomes={0: Fraction(1, 2), 1: Fraction(1, 2)})
    r = RngStream(5, 0)
    fair = (r.uniform(40000) < 0.5).astype(np.int64)
    rep = exact_law_test("fair coin", fair, law, seed=5)
    assert rep.passed and rep.op == ">"
    biased = (r.uniform(40000) < 0.56).astype(np.int64)
    rep2 = exact_law_test("biased coin", biased, law, seed=5)
    assert not rep2.passed


def test_exact_law_test_handles_tuple_outcomes():
    law = ExactLaw(
        outcomes={(0, 0): Fraction(1, 4), (0, 1): Fraction(1, 4), (1, 0): Fraction(1, 4), (1, 1): Fraction(1, 4)}
    )
    r = RngStream(6, 0)
    samples = (r.uniform((20000, 2)) < 0.5).astype(np.int64)
    assert exact_law_test("two fair bits", samples, law, seed=6).passed


def test_two_sample_test_same_and_different():
    r = RngStream(7, 0)
    a = (r.uniform(30000) * 6).astype(np.int64)
    b = (r.uniform(30000) * 6).astype(np.int64)
    assert two_sample_test("same die", a, b, seed=7).passed
    c = (r.uniform(30000) ** 1.35 * 6).astype(np.int64)
    assert not two_sample_test("different die", a, c, seed=7).passed


def test_ks_distance_test():
    r = RngStream(8, 0)
    from scipy import stats as sps

    x = r.uniform(50000)
    rep = ks_distance_test("uniform", x, sps.uniform.cdf, 0.01, seed=8)
    assert rep.passed
    assert not ks_distance_test("not exponential", x, sps.expon.cdf, 0.01, seed=8).passed


def test_exponent_fit_recovers_exact_power_law():
    pts = [(2**p, 3.0 * 2 ** (0.75 * p)) for p in range(4, 12)]
    fit = exponent_fit(pts)
    assert fit["slope"] == pytest.approx(0.75, abs=1e-12)
    assert fit["stderr"] == pytest.approx(0.0, abs=1e-9)
    assert math.exp(fit["intercept"]) == pytest.approx(3.0)


def test_exponent_fit_input_validation():
    with pytest.raises(ValueError):
        exponent_fit([(1.0, 2.0), (2.0, 3.0)])  # too few points
    with pytest.raises(ValueError):
        exponent_fit([(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)])


def test_f_event_bound_monotone_in_k():
    n = 2**15
    bounds = [f_event_bound(2, k, n) for k in (16, 64, 256, 1024)]
    assert all(bounds[i] < bounds[i + 1] for i in range(3))
    assert f_event_bound(2, 4000, 2**15) > 0.99


def test_event_frequency_smoke():
    d = event_frequency_F(2, 8, 256, 500, RngStream(9, 0))
    assert 0.0 <= d["frequency"] <= 1.0
    assert d["vacuous"] == (d["bound"] < 0.0)


def test_concentration_check_rejects_eps_below_floor():
    with pytest.raises(ValueError):
        concentration_check(2, 8, 4096, (0.0, 0.5), 1e-6, 100, RngStream(1, 0))


def test_concentration_check_smoke():
    ell, k, n = 2, 8, 4096
    floor = 80.0 * (2 / 3) * 8 ** (1 / 3) / 4096**0.25
    d = concentration_check(ell, k, n, (0.0, 0.5), floor * 1.1, 400, RngStream(2, 0))
    assert d["passed"] is True or d["frequency"] <= 1.0
    assert d["eps_floor"] == pytest.approx(floor)
    # the scaled count should at least be in the neighbourhood of the
    # segment length at this size
    assert abs(d["mhat_mean"] - d["segment_length"]) < 0.2


def test_report_serializes_to_plain_json():
    rep = exact_law_test(
        "serializable",
        np.zeros(10, dtype=np.int64),
        ExactLaw(outcomes={0: Fraction(1)}),
        seed=3,
    )
    doc = json.dumps(rep.to_dict())
    assert "serializable" in doc
