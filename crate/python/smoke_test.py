"""Smoke test for the Python bindings.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/definetti-*.whl

then run `python python/smoke_test.py` (or `pytest python/smoke_test.py`).
"""

from fractions import Fraction

import definetti as d


def test_prefix_probabilities():
    half = d.MixingMeasure([("1/2", "1")])
    assert half.is_exact
    assert half.prefix_prob("1,1,0") == "1/8"
    assert d.MomentVector.uniform(4).prefix_prob("1,1") == "1/3"
    mixed = d.MixingMeasure([(Fraction(1, 4), 1)])
    assert mixed.prefix_prob("10") == "3/16"
    floaty = d.MixingMeasure([(0.25, 1.0)])
    assert not floaty.is_exact
    assert abs(floaty.prefix_prob("10") - 0.1875) < 1e-15


def test_law_and_recovery():
    law = d.MixingMeasure([("1/2", "1")]).sample_mean_law(3)
    assert law.weights == ["1/8", "3/8", "3/8", "1/8"]
    assert len(law) == 4
    assert law.prefix_prob("1,1") == "1/4"
    rec = d.MomentVector(["1", "1/2", "1/3"]).recover()
    assert [a["p"] for a in rec["atoms"]] == ["0", "1/2", "1"]
    assert all(a["w"] == "1/3" for a in rec["atoms"])
    try:
        d.MomentVector(["1", "1/2", "0", "0"]).mean_law()
    except d.NotExtendableError as e:
        assert "-1/2" in str(e)
    else:
        raise AssertionError("non-extendable moments were accepted")
    assert d.MomentVector(["1", "1/2", "0", "0"]).check_extendable()["verdict"] == "reject"


def test_harness():
    mu = d.MixingMeasure([("0.2", "0.3"), ("0.5", "0.4"), ("0.9", "0.3")])
    report = d.verify("1,1,0,1", measure=mu, n=1000)
    assert report["within_budget"]
    assert Fraction(report["abs_diff"]) <= Fraction(report["sandwich_bound"])
    assert d.verify("1", measure=mu, n=200)["abs_diff"] == "0"
    scan = d.ratio_scan(1000, 1, 1)
    assert scan["eps_mid"] == "0"
    assert len(scan["rows"]) == 1001
    assert d.tail_check(10_000, 3, 1)["lower"]["ok"]
    assert d.oracle(6, seed=1)["max_abs_gap"] == "0"
    assert d.a_i(10, 2, 1, 5) == "5/18"
    assert d.b_i(10, 2, 1, 5) == "1/4"


def test_errors():
    for bad in (lambda: d.ratio_scan(7, 1, 1), lambda: d.oracle(21), lambda: d.MixingMeasure([("x", "1")])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("bad input was accepted")
    try:
        d.MixingMeasure([(0.5, 0.9)])
    except d.InvariantError:
        pass
    else:
        raise AssertionError("weights summing to 0.9 were accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok  {name}")
