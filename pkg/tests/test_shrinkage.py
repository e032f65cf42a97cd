import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import exact_complex_mse
from gswdenoise.errors import DomainError, UnsupportedConfigurationError
from gswdenoise.shrinkage import (
    GSW,
    JS,
    LS,
    SW,
    ST,
    Field,
    NoiseModel,
    ObservationVector,
    OracleMMSE,
    denoise,
    denoise_array,
    gsw_gain,
    parse_rule,
    rule_label,
    soft_gain,
    transform_denoise,
)


def _mp_gain(r):
    mpmath.mp.dps = 50
    r = mpmath.mpf(r)
    return (1 + mpmath.sqrt(1 - 4 / r ** 2)) / 2


# --- gain -------------------------------------------------------------------

def test_gain_examples():
    assert gsw_gain(1.5, 2.0) == 0.0
    assert gsw_gain(4.0, 4.09) == 0.0
    assert gsw_gain(4.09, 4.09) == 0.0  # threshold itself is killed
    assert gsw_gain(1e8, 2.0) == pytest.approx(1.0, abs=1e-15)


def test_gain_just_above_two_matches_extended_precision():
    # sqrt(1 - 4/r^2) ~ 3e-8 here, so the gain is 0.5 + 1.6e-8, not 0.5
    r = 2.0 + 1e-15
    assert gsw_gain(r, 2.0) == pytest.approx(float(_mp_gain(r)), rel=1e-15, abs=0)


@pytest.mark.parametrize("r", [2.5, 3.0, 4.1, 10.0, 1e3, 1e6])
def test_gain_matches_mpmath(r):
    assert gsw_gain(r, 2.0) == pytest.approx(float(_mp_gain(r)), rel=2e-16, abs=0)


def test_gain_solves_quadratic_on_log_grid():
    r = np.geomspace(2 + 1e-6, 1e8, 4000)
    g = gsw_gain(r, 2.0)
    assert np.max(np.abs(g * g - g + 1.0 / r ** 2)) <= 1e-12


@settings(max_examples=200)
@given(st.floats(2.0, 10.0), st.floats(1e-9, 1e9))
def test_gain_in_open_half_unit_interval(lam, excess):
    r = lam + excess
    g = gsw_gain(r, lam)
    assert 0.5 < g < 1.0 or (g == 1.0 and r > 1e7)


def test_gain_monotone_in_r():
    r = np.linspace(4.1, 50, 1000)
    assert np.all(np.diff(gsw_gain(r, 4.09)) > 0)


def test_gain_rejects_bad_arguments():
    with pytest.raises(DomainError):
        gsw_gain(3.0, 1.9)
    with pytest.raises(DomainError):
        gsw_gain(-1.0, 2.0)
    with pytest.raises(DomainError):
        gsw_gain(np.nan, 2.0)


def test_gain_remainder_bound_mathematical():
    # at 50 digits |remainder| * r^4 decreases towards 1 as r grows
    vals = [float(abs(_mp_gain(r) - (1 - mpmath.mpf(r) ** -2)) * mpmath.mpf(r) ** 4)
            for r in np.geomspace(8, 1e6, 40)]
    assert max(vals) < 1.04 and min(vals) > 0.999


def test_soft_gain():
    assert soft_gain(0.0, 1.0) == 0.0
    assert soft_gain(3.0, 1.0) == pytest.approx(2 / 3)
    assert soft_gain(1.0, 1.0) == 0.0


# --- rules ------------------------------------------------------------------

def test_parse_rule_variants():
    assert parse_rule("gsw(4.09)") == GSW(4.09)
    assert parse_rule(" GSW ( 3 ) ") == GSW(3.0)
    assert parse_rule("gsw", 5.0) == GSW(5.0)
    assert parse_rule("st(1.5)") == ST(1.5)
    assert isinstance(parse_rule("sw"), SW)
    assert isinstance(parse_rule("js"), JS)
    assert isinstance(parse_rule("ls"), LS)
    assert isinstance(parse_rule("oracle"), OracleMMSE)


@pytest.mark.parametrize("text", ["gsw", "gsw(1.5)", "foo", "ls(2)", "gsw(x)", "(("])
def test_parse_rule_errors(text):
    with pytest.raises(DomainError):
        parse_rule(text)


def test_rule_labels():
    assert rule_label(GSW(4.088613125)) == "GSW(4.08861)"
    assert rule_label(ST(2)) == "ST(2)"
    assert rule_label(SW()) == "SW"
    assert rule_label(OracleMMSE()) == "Oracle"


def test_gsw_rejects_small_threshold():
    with pytest.raises(DomainError):
        GSW(1.99)
    with pytest.raises(DomainError):
        ST(0.0)


# --- observation model ----------------------------------------------------------

def test_field_inference_and_parse():
    assert Field.of(np.ones(3)) is Field.REAL
    assert Field.of(np.ones(3, complex)) is Field.COMPLEX
    assert Field.parse("REAL") is Field.REAL
    with pytest.raises(DomainError):
        Field.parse("quaternion")


def test_noise_model_validation():
    assert NoiseModel(2.0).sigma_bar2() == 4.0
    het = NoiseModel(np.array([1.0, 2.0]))
    assert not het.homoscedastic
    with pytest.raises(UnsupportedConfigurationError):
        het.sigma_bar2()
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(DomainError):
            NoiseModel(bad)
    with pytest.raises(DomainError):
        NoiseModel(np.ones((2, 2)))


def test_observation_vector_validation():
    with pytest.raises(DomainError):
        ObservationVector(np.ones(3), NoiseModel(1.0, Field.COMPLEX))
    with pytest.raises(DomainError):
        ObservationVector.from_values(np.ones(3, complex), 1.0, Field.REAL)
    with pytest.raises(DomainError):
        ObservationVector.from_values([], 1.0)
    with pytest.raises(DomainError):
        ObservationVector.from_values([1.0, np.nan], 1.0)
    with pytest.raises(DomainError):
        ObservationVector.from_values([1.0, 2.0], [1.0, 1.0, 1.0])
    obs = ObservationVector.from_values([1.0, 2.0], 1.0, "complex")
    assert obs.field is Field.COMPLEX and obs.values.dtype == complex


# --- denoise ------------------------------------------------------------------

def test_ls_is_identity(rng):
    y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    obs = ObservationVector.from_values(y, 0.7)
    out = denoise(LS(), obs)
    assert np.array_equal(out, y) and out is not obs.values


def test_gsw_zeroes_small_and_keeps_phase():
    y = np.array([0.5 + 0.5j, 30 * np.exp(0.3j)])
    out = denoise(GSW(4.09), ObservationVector.from_values(y, 1.0))
    assert out[0] == 0
    assert np.angle(out[1]) == pytest.approx(0.3)
    assert abs(out[1]) == pytest.approx(30 * float(_mp_gain(30)), rel=1e-14)


def test_gsw_uses_normalized_magnitude():
    y = np.array([6.0])
    assert denoise(GSW(4.0), ObservationVector.from_values(y, 2.0))[0] == 0.0
    assert denoise(GSW(4.0), ObservationVector.from_values(y, 1.0))[0] > 0.0


def test_gsw_two_equals_sw_bitwise(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 50))
        y = 3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        obs = ObservationVector.from_values(y, float(rng.uniform(0.5, 2)))
        assert np.array_equal(denoise(SW(), obs), denoise(GSW(2.0), obs))


def test_soft_threshold_rule():
    y = np.array([-3.0, 0.5, 2.0])
    out = denoise(ST(1.0), ObservationVector.from_values(y, 1.0, Field.REAL))
    assert np.allclose(out, [-2.0, 0.0, 1.0])


def test_js_known_value_and_positive_part():
    y = np.array([3.0, 4.0, 0.0])  # ||y||^2 = 25, c = N - 2 = 1
    out = denoise(JS(), ObservationVector.from_values(y, 1.0, Field.REAL))
    assert np.allclose(out, y * (1 - 1 / 25))
    tiny = np.array([0.1, 0.1, 0.1])
    assert np.all(denoise(JS(), ObservationVector.from_values(tiny, 1.0, Field.REAL)) == 0)
    zero = np.zeros(4, complex)
    assert np.all(denoise(JS(), ObservationVector.from_values(zero, 1.0)) == 0)


def test_js_complex_constant():
    y = np.array([3.0 + 0j, 4.0])  # c = N - 1 = 1
    out = denoise(JS(), ObservationVector.from_values(y, 1.0))
    assert np.allclose(out, y * (1 - 1 / 25))


def test_js_rejects_heteroscedastic():
    obs = ObservationVector.from_values([1.0, 2.0, 3.0], [1.0, 2.0, 1.0], Field.REAL)
    with pytest.raises(UnsupportedConfigurationError):
        denoise(JS(), obs)


def test_js_row_wise_batching(rng):
    y = rng.standard_normal((4, 10))
    batch = denoise_array(JS(), y, 1.0, Field.REAL)
    for row, out in zip(y, batch):
        single = denoise(JS(), ObservationVector.from_values(row, 1.0, Field.REAL))
        assert np.array_equal(single, out)


def test_oracle_truth_contract():
    obs = ObservationVector.from_values([1.0, 2.0], 1.0)
    with pytest.raises(TypeError):
        denoise(OracleMMSE(), obs)
    with pytest.raises(TypeError):
        denoise(GSW(3.0), obs, truth=np.ones(2))
    with pytest.raises(DomainError):
        denoise(OracleMMSE(), obs, truth=np.ones(3))
    out = denoise(OracleMMSE(), obs, truth=np.array([1.0, 0.0]))
    assert np.allclose(out, [0.5, 0.0])


def test_heteroscedastic_gsw_uses_each_sigma():
    obs = ObservationVector.from_values([5.0, 5.0], [1.0, 2.0], Field.REAL)
    out = denoise(GSW(3.0), obs)
    assert out[0] > 0 and out[1] == 0


def test_gsw_risk_matches_bessel_quadrature_oracle(rng):
    # a direct check of the estimator against an independent exact MSE
    eta, lam, n = 5.0, 4.09, 400_000
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    z = eta + noise
    err = np.abs(denoise_array(GSW(lam), z, 1.0, Field.COMPLEX) - eta) ** 2
    exact = exact_complex_mse(eta, lambda r: gsw_gain(r, lam), [lam])
    assert abs(err.mean() - exact) <= 3 * err.std(ddof=1) / math.sqrt(n)


# --- transform domain ---------------------------------------------------------

def _random_unitary(rng, n, complex_=True):
    a = rng.standard_normal((n, n))
    if complex_:
        a = a + 1j * rng.standard_normal((n, n))
    q, _ = np.linalg.qr(a)
    return q


def test_transform_identity_matches_direct(rng):
    y = rng.standard_normal(16) * 4
    obs = ObservationVector.from_values(y, 1.0, Field.REAL)
    out = transform_denoise(GSW(2.5), obs, np.eye(16))
    assert np.allclose(out, denoise(GSW(2.5), obs))


def test_transform_sparse_in_basis(rng):
    U = _random_unitary(rng, 32)
    coeffs = np.zeros(32, complex)
    coeffs[[3, 17]] = [40.0, -25j]
    obs = ObservationVector.from_values(U @ coeffs, 1.0)
    out = transform_denoise(GSW(3.0), obs, U)
    expected = U @ denoise(GSW(3.0), ObservationVector.from_values(coeffs, 1.0))
    assert np.allclose(out, expected, atol=1e-10)


def test_transform_ls_is_identity(rng):
    U = _random_unitary(rng, 8)
    y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    out = transform_denoise(LS(), ObservationVector.from_values(y, 1.0), U)
    assert np.allclose(out, y)


def test_transform_errors(rng):
    obs = ObservationVector.from_values(np.ones(4), 1.0, Field.REAL)
    with pytest.raises(DomainError, match="unitary"):
        transform_denoise(GSW(2.0), obs, 2 * np.eye(4))
    with pytest.raises(DomainError):
        transform_denoise(GSW(2.0), obs, _random_unitary(rng, 4))
    with pytest.raises(DomainError):
        transform_denoise(GSW(2.0), obs, np.eye(3))
    het = ObservationVector.from_values(np.ones(4), [1.0, 1.0, 1.0, 2.0], Field.REAL)
    with pytest.raises(UnsupportedConfigurationError):
        transform_denoise(GSW(2.0), het, np.eye(4))


def test_transform_oracle_rotates_truth(rng):
    U = _random_unitary(rng, 6)
    x = U @ np.array([3.0, 0, 0, 0, 0, 0], complex)
    obs = ObservationVector.from_values(x, 1.0)
    out = transform_denoise(OracleMMSE(), obs, U, truth=x)
    assert np.allclose(out, 0.9 * x)
