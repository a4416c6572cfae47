import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blockquant.dist_models import (
    GaussianModel,
    GTransform,
    PowerLocalModel,
    cdf,
    g_apply,
    g_inverse,
    generalized_inverse,
    local_expansion,
    model_from_dict,
    quantile,
)


@pytest.mark.parametrize(
    "rho, m, t, expected",
    [
        (2.0, 0.5, 0.5, 0.625),
        (1.0, 0.5, 0.0, 0.5),
        (2.0, 0.5, -2.0, 0.0),
        (2.0, 0.5, 3.0, 1.0),
    ],
)
def test_power_cdf_examples(rho, m, t, expected):
    assert cdf(PowerLocalModel(rho, m), t) == expected


def test_canonical_support_is_unit_interval():
    for rho in (0.5, 1.0, 2.0, 3.0):
        model = PowerLocalModel(rho)
        assert model.support == (-1.0, 1.0)
        assert model.cdf(-1.0) == 0.0 and model.cdf(1.0) == 1.0


def test_support_for_general_m():
    model = PowerLocalModel(2.0, 2.0)
    half = (1 / (2 * 2.0)) ** 0.5
    assert model.lo == pytest.approx(-half)
    assert model.hi == pytest.approx(half)


def test_quantile_examples():
    canonical = PowerLocalModel(2.0)
    assert quantile(canonical, 0.5) == 0.0
    assert quantile(GaussianModel(0, 1), 0.5) == 0.0
    # algebraic inverse of 1/2 t^2 + 1/2 = 0.625
    assert quantile(canonical, 0.625) == pytest.approx(0.5, abs=1e-15)
    bisected = generalized_inverse(canonical.cdf, 0.625, -1.0, 1.0)
    assert bisected == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_rejects_out_of_range(q):
    with pytest.raises(ValueError):
        quantile(PowerLocalModel(2.0), q)
    with pytest.raises(ValueError):
        quantile(GaussianModel(), q)


@pytest.mark.parametrize(
    "rho, m, x, y",
    [(1.0, 2.0, 3.0, 6.0), (2.0, 0.5, -2.0, -2.0), (0.5, 1.0, 4.0, 2.0), (3.0, 1.0, 2.0, 8.0)],
)
def test_g_examples(rho, m, x, y):
    g = GTransform(rho, m)
    assert g_apply(g, x) == pytest.approx(y, rel=1e-15)
    assert g_inverse(g, y) == pytest.approx(x, rel=1e-15)


def test_g_round_trip_grid():
    x = np.linspace(-10, 10, 4001)
    for rho in (0.3, 0.5, 1.0, 2.0, 3.0):
        for m in (0.5, 1.0, 2.0, -1.5):
            g = GTransform(rho, m)
            back = g.inverse(g.apply(x))
            err = np.abs(back - x) / np.maximum(1.0, np.abs(x))
            assert err.max() <= 1e-12


@given(
    st.floats(0.1, 5.0),
    st.floats(0.1, 5.0),
    st.floats(-10.0, 10.0, allow_nan=False),
)
def test_g_round_trip_property(rho, m, x):
    g = GTransform(rho, m)
    assert abs(g.inverse(g.apply(x)) - x) <= 1e-12 * max(1.0, abs(x))


def test_g_is_odd_and_increasing():
    g = GTransform(2.5, 0.7)
    x = np.linspace(-3, 3, 601)
    y = g.apply(x)
    assert g.apply(0.0) == 0.0
    np.testing.assert_allclose(g.apply(-x), -y, rtol=0, atol=0)
    assert np.all(np.diff(y) > 0)


def test_g_rejects_bad_parameters():
    with pytest.raises(ValueError):
        GTransform(0.0, 1.0)
    with pytest.raises(ValueError):
        GTransform(1.0, 0.0)


MODELS = [
    PowerLocalModel(0.5),
    PowerLocalModel(1.0),
    PowerLocalModel(2.0),
    PowerLocalModel(3.0, 2.0, 1.5, 0.3),
    GaussianModel(0.0, 1.0),
    GaussianModel(2.0, 0.5),
    # small density: one ulp of t moves the cdf by far less than one ulp of q
    GaussianModel(1.0, 3.0),
    GaussianModel(5.0, 100.0),
]


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_generalized_inverse_law(model):
    q = np.linspace(0.001, 0.999, 999)
    t = model.quantile(q)
    assert np.all(model.cdf(t) >= q)
    # eps must exceed the float resolution of M eps^rho around 0.5 for rho = 3
    assert np.all(model.cdf(t - 1e-5) < q)


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_monotonicity(model):
    lo, hi = (model.lo - 0.5, model.hi + 0.5) if isinstance(model, PowerLocalModel) else (-8, 8)
    f = model.cdf(np.linspace(lo, hi, 10_000))
    assert np.all(np.diff(f) >= 0)
    assert f.min() >= 0 and f.max() <= 1
    qs = model.quantile(np.linspace(0.0005, 0.9995, 1000))
    assert np.all(np.diff(qs) >= 0)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 3.0])
def test_local_power_law_is_exact(rho):
    model = PowerLocalModel(rho, 0.5)
    for h in (1e-1, 1e-2, 1e-3, 1e-4):
        for s in (1.0, -1.0):
            hh = s * h
            excess = model.cdf(model.t_p + hh) - model.cdf(model.t_p) - 0.5 * h**rho * s
            assert abs(excess) / h**rho < 1e-3


def test_quantile_agrees_with_bisection():
    for model in MODELS:
        if isinstance(model, PowerLocalModel):
            lo, hi = model.lo, model.hi
        else:
            lo, hi = model.mean - 40 * model.sd, model.mean + 40 * model.sd
        # for rho > 1 the cdf is flat in floating point within (ulp / M)^(1/rho) of t_p
        tol = 2e-12
        if isinstance(model, PowerLocalModel):
            tol = max(tol, 4 * (1e-16 / model.m_coef) ** (1 / model.rho))
        else:
            tol = 2e-12 * max(1.0, model.sd)
        for q in (0.01, 0.2, 0.5, 0.77, 0.99):
            assert model.quantile(q) == pytest.approx(generalized_inverse(model.cdf, q, lo, hi), abs=tol)


def test_generalized_inverse_flat_spot():
    # cdf flat at 0.5 on [0, 1]: the infimum is the left end
    f = lambda t: float(np.clip(np.where(t < 0, 0.5 + 0.5 * t, np.where(t < 1, 0.5, 0.5 + 0.5 * (t - 1))), 0, 1))
    assert generalized_inverse(f, 0.5, -1.0, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_gaussian_quantile_round_trip():
    model = GaussianModel(1.0, 2.0)
    t = np.linspace(-5, 7, 101)
    np.testing.assert_allclose(model.quantile(model.cdf(t)), t, atol=1e-9)


def test_local_expansion():
    assert local_expansion(PowerLocalModel(2.0)) == (2.0, 0.5, 0.0, 0.5)
    rho, m, tp, p = local_expansion(GaussianModel(0, 2), 0.5)
    assert (rho, tp, p) == (1.0, 0.0, 0.5)
    assert m == pytest.approx(1 / (2 * math.sqrt(2 * math.pi)))


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_json_round_trip(model):
    d = json.loads(json.dumps(model.to_dict()))
    assert model_from_dict(d) == model


def test_json_schema_keys():
    assert set(PowerLocalModel(2.0).to_dict()) == {"kind", "rho", "m", "tp", "p", "lo", "hi"}
    assert set(GaussianModel().to_dict()) == {"kind", "mean", "sd"}


def test_model_from_dict_rejects_bad_input():
    with pytest.raises(ValueError):
        model_from_dict({"kind": "cauchy"})
    with pytest.raises(ValueError):
        model_from_dict({"kind": "gaussian", "mean": 0, "sd": 1, "nu": 3})
    with pytest.raises(ValueError):
        model_from_dict({"kind": "power_local", "rho": 2, "m": 0.5, "tp": 0, "p": 0.5, "lo": -3, "hi": 1})


def test_model_validation():
    with pytest.raises(ValueError):
        PowerLocalModel(0.0)
    with pytest.raises(ValueError):
        PowerLocalModel(2.0, -1.0)
    with pytest.raises(ValueError):
        PowerLocalModel(2.0, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        GaussianModel(0.0, 0.0)
