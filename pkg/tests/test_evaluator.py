import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betaprod.evaluator import (
    DEFAULT_H,
    M2Path,
    build_model,
    cdf,
    evaluate,
    pdf,
    pdf_interpolated_alpha,
    quantile,
)
from betaprod.exceptions import DomainError, GenericityError
from betaprod.model import make_spec, mms_spec, moment, state_determinant_spec
from betaprod.oracles import conv_quadrature, moment_quadrature
from betaprod.series_origin import build_origin, origin_pdf_with_error
from betaprod.series_unit import unit_pdf_from_gap, unit_pdf_with_error

from conftest import random_generic_spec

UNIFORM = make_spec([(1, 2)])
LINEAR = make_spec([(1, 2), (2, 3)])        # density 2(1 - x)


@pytest.fixture(scope="module")
def mms():
    return build_model(mms_spec())


def test_mms_model(mms):
    assert mms.origin is not None
    assert mms.crossover == 0.55
    assert mms.m2_path is M2Path.NONE
    assert mms.leading_exponents == pytest.approx((-0.75, 0.5))


def test_integer_difference_model_has_no_origin():
    model = build_model(state_determinant_spec(0.5))
    assert model.origin is None and model.unit is not None
    assert any("no origin series" in d for d in model.diagnostics)
    assert build_model(LINEAR).m2_path is M2Path.CLOSED


def test_routing_labels(mms):
    x = np.array([0.0, 0.2, 0.549, 0.55, 0.9, 1.0])
    _, regions, _ = evaluate(mms, x)
    assert list(regions) == ["origin", "origin", "origin", "unit", "unit", "unit"]
    _, regions, _ = evaluate(build_model(LINEAR), np.array([0.01, 0.3, 0.7]))
    assert list(regions) == ["m2log", "m2closed", "unit"]
    _, regions, _ = evaluate(build_model(state_determinant_spec(0.5)), np.array([0.2, 0.7]))
    assert list(regions) == ["unit", "unit"]


def test_simple_densities():
    uni = build_model(UNIFORM)
    assert pdf(uni, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert cdf(uni, 0.3) == pytest.approx(0.3, rel=1e-14)
    assert quantile(uni, 0.5) == pytest.approx(0.5, abs=1e-11)
    lin = build_model(LINEAR)
    for x in (0.01, 0.25, 0.5, 0.9):
        assert pdf(lin, x) == pytest.approx(2 * (1 - x), rel=1e-12)
    assert cdf(lin, 0.5) == pytest.approx(0.75, abs=1e-12)
    assert quantile(lin, 0.75) == pytest.approx(0.5, abs=1e-10)


def test_leading_term_near_one(mms):
    a = math.sqrt(2) / (3 * math.pi)
    gaps = [abs(pdf(mms, 1 - t) / (a * math.sqrt(t)) - 1) for t in (1e-2, 1e-4, 1e-6)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-5


def test_endpoint_conventions(mms):
    assert pdf(mms, 0.0) == math.inf                       # min u < 1
    assert pdf(build_model(make_spec([(1.5, 2.5), (2.2, 3)])), 0.0) == 0.0
    assert pdf(build_model(UNIFORM), 0.0) == 1.0
    assert pdf(build_model(LINEAR), 0.0) == pytest.approx(2.0, rel=1e-9)
    assert pdf(mms, 1.0) == 0.0
    assert pdf(build_model(make_spec([(0.5, 0.8)])), 1.0) == math.inf
    assert cdf(mms, 0.0) == 0.0 and cdf(mms, 1.0) == 1.0


def test_domain_errors(mms):
    with pytest.raises(DomainError):
        pdf(mms, 1.2)
    with pytest.raises(DomainError):
        quantile(mms, 1.0)
    with pytest.raises(DomainError):
        build_model(mms_spec(), crossover=1.5)


def test_cdf_monotone_and_normalised(mms):
    x = np.linspace(0, 1, 2000)
    c = cdf(mms, x)
    assert np.min(np.diff(c)) >= -1e-10
    assert c[-1] - c[0] == pytest.approx(1.0, abs=1e-9)


def test_quantile_round_trip(mms):
    rng = np.random.default_rng(1)
    for p in rng.uniform(0.001, 0.999, 100):
        assert cdf(mms, quantile(mms, p)) == pytest.approx(p, abs=1e-9)


def test_continuity_on_overlap():
    rng = np.random.default_rng(41)
    x = np.linspace(0.35, 0.7, 15)
    for i in range(15):
        spec = random_generic_spec(rng, 2 + i % 3, gap_range=(0.2, 1.5))
        model = build_model(spec)
        o, _ = origin_pdf_with_error(model.origin, x)
        u, _ = unit_pdf_with_error(model.unit, x)
        assert np.max(np.abs(o - u) / np.abs(u)) <= 1e-7


def test_crossover_auto_and_rescan():
    model = build_model(mms_spec(), crossover="auto")
    assert 0.35 <= model.crossover <= 0.7
    # a deliberately short (1-x) series cannot match at 0.35, so the point moves
    short = build_model(mms_spec(), N=16, crossover=0.35)
    assert short.crossover != 0.35
    assert any("moved" in d for d in short.diagnostics)


def test_moments(mms):
    for model in (mms, build_model(state_determinant_spec(0.3)), build_model(LINEAR)):
        spec = model.spec
        for n in range(9):
            q = moment_quadrature(lambda x: pdf(model, x), n, min(spec.u), spec.delta,
                                  split=model.crossover,
                                  pdf_of_gap=lambda t: unit_pdf_from_gap(model.unit, t)[0])
            assert q == pytest.approx(moment(spec, n), abs=1e-6)


def test_agrees_with_convolution():
    rng = np.random.default_rng(43)
    for m in (2, 3):
        spec = random_generic_spec(rng, m, gap_range=(0.2, 1.5))
        model = build_model(spec)
        for x in np.linspace(0.1, 0.9, 9):
            assert pdf(model, x) == pytest.approx(conv_quadrature(spec, x), rel=1e-6)


def test_integer_difference_m3_small_x():
    # no origin series: the (1-x) series is used down to small x, with an error estimate
    spec = make_spec([(0.5, 1.3), (1.5, 2.2), (0.8, 1.9)])
    model = build_model(spec)
    values, _, err = evaluate(model, np.array([0.06, 0.3]))
    for x, v, e in zip((0.06, 0.3), values, err):
        assert v == pytest.approx(conv_quadrature(spec, x), rel=1e-6)
        assert e <= 1e-6 * v


# ---------------------------------------------------------------------------
# interpolation in the family parameter


def test_interpolation_weights_sum_to_one():
    spec = mms_spec()
    direct = origin_pdf_with_error(build_origin(spec), np.array([0.3]))[0][0]
    got = pdf_interpolated_alpha(lambda a: spec, 1.0, x=0.3)
    assert got == pytest.approx(direct, rel=1e-12)


def test_interpolation_matches_unit_series():
    target = pdf(build_model(state_determinant_spec(1.0)), 0.8)
    got = pdf_interpolated_alpha(state_determinant_spec, 1.0, x=0.8)
    assert abs(got - target) <= 1e-6


def test_interpolation_small_x():
    for alpha in (0.5, 1.0):
        model = build_model(state_determinant_spec(alpha))
        got = pdf_interpolated_alpha(state_determinant_spec, alpha, x=0.05)
        assert got == pytest.approx(pdf(model, 0.05), rel=1e-6)


def test_interpolation_fourth_order():
    target = pdf(build_model(state_determinant_spec(1.0)), 0.8)
    e1 = pdf_interpolated_alpha(state_determinant_spec, 1.0, h=1 / 16, x=0.8) - target
    e2 = pdf_interpolated_alpha(state_determinant_spec, 1.0, h=1 / 32, x=0.8) - target
    assert 12 <= e1 / e2 <= 20


def test_interpolation_retries_on_integer_collision():
    # alpha0 - 2h = 1/2 has integer u-differences for h = 1/4; the retry rescales h
    got = pdf_interpolated_alpha(state_determinant_spec, 1.0, h=0.25, x=0.3, max_retries=3)
    assert np.isfinite(got)
    with pytest.raises(GenericityError):
        pdf_interpolated_alpha(state_determinant_spec, 1.0, h=0.25, x=0.3, max_retries=0)


def test_default_step():
    assert DEFAULT_H == 1 / 64 + 1 / 1024


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.99))
def test_pdf_is_order_independent(x):
    # evaluating a grid and a single point gives identical values
    model = build_model(mms_spec())
    grid = np.array([0.1, x, 0.9])
    assert pdf(model, grid)[1] == pdf(model, x)
