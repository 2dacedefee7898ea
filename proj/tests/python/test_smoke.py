import math

import numpy as np
import pytest

import bdpz


def test_example_constants():
    m = bdpz.load_model("ex1")
    env = bdpz.fit_envelope(m, bdpz.load_weights("ex1"))
    assert env.M == 1.0
    assert abs(env.beta - 13 / 28) < 1e-9
    env2 = bdpz.fit_envelope(bdpz.load_model("ex2"), bdpz.two_sided(2.0, 8 / 7))
    assert abs(env2.beta - 0.09375) < 1e-9


def test_truncation_plan():
    m = bdpz.load_model("ex1")
    d, ds = bdpz.mirror_geometric(8 / 7), bdpz.mirror_geometric(4 / 3)
    env, env_s = bdpz.fit_envelope(m, d), bdpz.fit_envelope(m, ds)
    n1, n2, value = bdpz.plan_truncation(m, d, ds, env, env_s, 1e-6)
    assert n1 == -n2 and n2 <= 150 and value <= 1e-6
    rep = bdpz.theorem2_bound(m, d, ds, env, env_s, -150, 150)
    assert rep["kind"] == "theorem2" and rep["value"] <= 1e-6


def test_integrate_skellam():
    out = bdpz.integrate(bdpz.constant_model(1.0, 1.0), -60, 60, t_end=1.0, output_every=1.0)
    p = out["p"][-1]
    assert p.shape == (121,)
    assert abs(p[60] - math.exp(-2) * 2.2795853023360673) < 1e-8
    assert abs(p.sum() - 1) < 1e-9
    assert np.all(np.diff(out["t"]) > 0)


def test_simulation_is_reproducible():
    m = bdpz.load_model("ex2")
    a = bdpz.empirical_distribution(m, 0, 1.0, 2000, 5, threads=1)
    b = bdpz.empirical_distribution(m, 0, 1.0, 2000, 5, threads=4)
    assert a["lo"] == b["lo"]
    assert np.array_equal(a["p_hat"], b["p_hat"])


def test_errors_map_to_exceptions():
    with pytest.raises(bdpz.NotErgodicWithTheseWeights):
        bdpz.fit_envelope(bdpz.load_model("ex1"), bdpz.mirror_geometric(2.0))
    with pytest.raises(bdpz.SchemaError):
        bdpz.load_model("/nonexistent.json")
    with pytest.raises(bdpz.StepTooLarge):
        bdpz.integrate(bdpz.load_model("ex1"), -10, 10, dt=0.5)
