import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from virlab import circle as cc
from virlab import virasoro as vr
from virlab.errors import InvalidParams, SingularInertia

VE, VA = vr.VirasoroElement, vr.VirasoroAlgebraElement

# Bott cocycle of f = x + 0.2 sin x, g = x + 0.1 cos 2x + 0.05 sin 3x + 0.5,
# frozen from adaptive quadrature of the closed-form integrand
B_REGRESSION = 0.017883855673657634


def _pair(n):
    f = cc.CircleDiffeo.from_displacement(lambda x: 0.2 * np.sin(x), n)
    g = cc.CircleDiffeo.from_displacement(
        lambda x: 0.1 * np.cos(2 * x) + 0.05 * np.sin(3 * x) + 0.5, n)
    return f, g


def test_bott_regression_against_quadrature():
    g = lambda x: x + 0.1 * np.cos(2 * x) + 0.05 * np.sin(3 * x) + 0.5
    gp = lambda x: 1 - 0.2 * np.sin(2 * x) + 0.15 * np.cos(3 * x)
    gpp = lambda x: -0.4 * np.cos(2 * x) - 0.45 * np.sin(3 * x)
    integrand = lambda x: (np.log(1 + 0.2 * np.cos(g(x))) + np.log(gp(x))) * gpp(x) / gp(x)
    ref, _ = quad(integrand, 0, 2 * np.pi, epsabs=1e-14, epsrel=1e-14, limit=200)
    assert ref == pytest.approx(B_REGRESSION, abs=1e-12)
    for n in (256, 512):
        assert vr.bott_cocycle(*_pair(n)) == pytest.approx(B_REGRESSION, abs=1e-12)


def test_bott_trivial_cases(cfg256, rng):
    f = cc.random_diffeo(rng, cfg256)
    assert abs(vr.bott_cocycle(f, cc.identity(cfg256))) < 1e-14
    assert abs(vr.bott_cocycle(cc.rotation(1.0, cfg256), cc.rotation(2.0, cfg256))) < 1e-14
    s = cc.CircleDiffeo.from_displacement(lambda x: 0.2 * np.sin(x), cfg256)
    assert abs(vr.bott_cocycle(s, s)) < 1e-14


def test_group_unit_and_inverse(cfg256, rng):
    e = vr.unit(cfg256)
    d = (e @ e).distance(e)
    assert d[0] == 0 and d[1] == 0
    x = VE(cc.random_diffeo(rng, cfg256, max_slope=0.3), 1.3)
    for y in (x @ vr.group_inverse(x), vr.group_inverse(x) @ x):
        df, dF = y.distance(e)
        assert df < 1e-7 and dF < 1e-7
    xx = vr.group_inverse(vr.group_inverse(x))
    assert max(xx.distance(x)) < 1e-8
    inv5 = vr.group_inverse(VE(cc.identity(cfg256), 5.0))
    assert inv5.F == -5.0 and inv5.f.distance(cc.identity(cfg256)) < 1e-14


def test_rotations_add_central(cfg256):
    r = VE(cc.rotation(0.3, cfg256), 1.5) @ VE(cc.rotation(0.4, cfg256), -0.25)
    df, dF = r.distance(VE(cc.rotation(0.7, cfg256), 1.25))
    assert df < 1e-14 and dF < 1e-14


def test_bracket_examples(cfg256, rng):
    s = cc.PeriodicFunction.from_callable(np.sin, cfg256)
    c = cc.PeriodicFunction.from_callable(np.cos, cfg256)
    b = vr.gelfand_fuchs_bracket(VA(s), VA(c))
    assert np.max(np.abs(b.v.samples - 1.0)) < 1e-13
    assert abs(b.a + np.pi) < 1e-10
    xi = VA(cc.random_trig_poly(rng, cfg256, 5, 1.0), 2.0)
    self_b = vr.gelfand_fuchs_bracket(xi, xi)
    assert np.all(self_b.v.samples == 0) and abs(self_b.a) < 1e-10
    center = VA(cc.PeriodicFunction.constant(0.0, cfg256), 3.0)
    z = vr.gelfand_fuchs_bracket(xi, center)
    assert z.v.sup_norm() == 0 and z.a == 0


def test_central_coordinate_ignored_by_bracket(cfg256, rng):
    v, w = (cc.random_trig_poly(rng, cfg256, 5, 1.0) for _ in range(2))
    a = vr.gelfand_fuchs_bracket(VA(v, 0.0), VA(w, 0.0))
    b = vr.gelfand_fuchs_bracket(VA(v, 7.0), VA(w, -2.0))
    assert a.a == b.a and np.array_equal(a.v.samples, b.v.samples)


def test_h1_examples(cfg256, rng):
    s = VA(cc.PeriodicFunction.from_callable(np.sin, cfg256))
    assert vr.h1_inner(s, s, vr.MetricParams(1, 1)) == pytest.approx(2 * np.pi, abs=1e-12)
    z = VA(cc.PeriodicFunction.constant(0.0, cfg256), 1.0)
    assert vr.h1_inner(z, z, vr.MetricParams(1, 1)) == 1.0
    xi, eta = (VA(cc.random_trig_poly(rng, cfg256), rng.normal()) for _ in range(2))
    m = vr.MetricParams(2, 0.5)
    assert vr.h1_inner(xi, eta, m) == pytest.approx(vr.h1_inner(eta, xi, m), abs=1e-14)


def test_inertia(cfg256, rng):
    xi = VA(cc.random_trig_poly(rng, cfg256, zero_mean=False), 0.5)
    same = vr.inertia_apply(xi, vr.MetricParams(1, 0))
    assert np.max(np.abs(same.v.samples - xi.v.samples)) < 1e-14
    s3 = VA(cc.PeriodicFunction.from_callable(lambda x: np.sin(3 * x), cfg256))
    m = vr.inertia_apply(s3, vr.MetricParams(1, 1))
    ratio = np.fft.rfft(m.v.samples)[3] / np.fft.rfft(s3.v.samples)[3]
    assert abs(ratio - 10.0) < 1e-12
    # roundoff in the top modes is amplified by k^2 ~ 1.6e4
    assert np.max(np.abs(m.v.samples - 10 * s3.v.samples)) < 1e-10
    for mp in (vr.MetricParams(1, 1), vr.MetricParams(2, 0.5)):
        back = vr.inertia_invert(vr.inertia_apply(xi, mp), mp)
        assert np.max(np.abs(back.v.samples - xi.v.samples)) < 1e-12


def test_inertia_singular_on_hs_branch(cfg256):
    mu = VA(cc.PeriodicFunction.constant(1.0, cfg256))
    with pytest.raises(SingularInertia):
        vr.inertia_invert(mu, vr.MetricParams(0, 1))


def test_metric_params_validation():
    for a, b in ((0, 0), (-1, 1), (1, np.nan)):
        with pytest.raises(InvalidParams):
            vr.MetricParams(a, b)


def test_json_round_trip(cfg64, rng):
    x = VE(cc.random_diffeo(rng, cfg64, modes=4), 0.25)
    y = VE.from_json(x.to_json())
    assert max(x.distance(y)) == 0
    xi = VA(cc.random_trig_poly(rng, cfg64, 4), 1.5)
    assert VA.from_json(xi.to_json()).a == 1.5


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cocycle_identity_property(seed):
    rng = np.random.default_rng(seed)
    f, g, h = (cc.random_diffeo(rng, 256) for _ in range(3))
    B = vr.bott_cocycle
    res = B(cc.compose(f, g), h) + B(f, g) - B(f, cc.compose(g, h)) - B(g, h)
    assert abs(res) < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 0), (0, 1), (1, 1), (2, 0.5)]))
def test_metric_compatibility_property(seed, ab):
    rng = np.random.default_rng(seed)
    m = vr.MetricParams(*ab)
    xi, eta = (VA(cc.random_trig_poly(rng, 256), rng.normal()) for _ in range(2))
    lhs = vr.h1_inner(xi, eta, m)
    rhs = vr.pairing(vr.inertia_apply(xi, m), eta)
    assert abs(lhs - rhs) < 1e-10
