"""Smoke test for the pymortgage extension.

Build and install first:

    pip install --no-build-isolation ./crates/python

then run `python python/smoke_test.py` or `pytest python/smoke_test.py`.
"""

import json
import math

import pymortgage as pm

PARAMS = pm.ModelParams(0.017825, 0.045, 0.1125, 0.9)


def test_exponent_identity():
    p1, p2 = PARAMS.exponents()
    assert p1 > 1 and p2 > 0
    assert math.isclose((1 + p2) / p2 * (p1 - 1) / p1, PARAMS.delta / PARAMS.r, rel_tol=1e-12)


def test_frm_boundaries_and_value():
    s = pm.solve(PARAMS, "frm", 0.0326)
    b = s.boundaries
    assert abs(b["h1"] - 0.54) < 0.01 and abs(b["h2"] - 1.43) < 0.01
    assert "h3" not in b
    assert s.action_at(0.3) == "Default" and s.action_at(1.0) == "Continue"
    assert s.value(b["h2"]) == PARAMS.b0
    assert [r[2] for r in s.regions] == ["Default", "Continue", "Prepay"]
    assert json.loads(s.to_json())["boundaries"]["h1"] == b["h1"]


def test_aprm_sharing_threshold():
    regime, m_star, alpha_star = pm.aprm_regime(PARAMS, 0.0326)
    assert regime == "LowRate" and m_star > 0.045
    assert abs(alpha_star - 0.0766) < 1e-3
    assert pm.solve(PARAMS, "aprm", 0.0326, alpha=0.08).boundaries == {}


def test_spread_and_options():
    spread = pm.endogenous_spread(PARAMS, 0.0326, 0.30, "abm", alpha=0.05)
    assert abs(spread - 19) < 2
    assert pm.prepay_option_value(PARAMS, "frm", 0.0326, 1.0) >= 0
    assert pm.default_option_value(PARAMS, "frm", 0.0326, 1.0) >= 0
    assert abs(pm.max_rate(PARAMS, "frm") - 0.0575) < 5e-4
    assert pm.frm_value_with_foreclosure(PARAMS, 0.0326, 0.3, 1.0) < pm.solve(PARAMS, "frm", 0.0326).value(1.0)


def test_oracles_agree():
    s = pm.solve(PARAMS, "frm", 0.0326)
    b = s.boundaries
    v = pm.threshold_policy_value(PARAMS, "frm", 0.0326, 1.0, lower=b["h1"], upper=b["h2"])
    assert abs(v - s.value(1.0)) < 1e-8
    fd = pm.psor_value(PARAMS, "frm", 0.0326, relaxation=1.9)
    assert fd["sup_error"] < 1e-3 and len(fd["nodes"]) == 2001


def test_errors_carry_codes():
    try:
        pm.solve(PARAMS, "frm", 0.01)
    except pm.MortgageError as e:
        assert e.args[0] == "NegativeSpread"
    else:
        raise AssertionError("expected MortgageError")
    try:
        pm.ModelParams(0.02, 0.045, -0.1, 0.9)
    except ValueError as e:
        assert e.args[0] == "InvalidParams"
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    tests = [f for name, f in sorted(globals().items()) if name.startswith("test_")]
    for t in tests:
        t()
        print(f"ok  {t.__name__}")
    print(f"{len(tests)} passed")
