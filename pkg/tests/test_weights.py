from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccal.errors import DomainError, SizeError, UnsupportedError
from fraccal.specfun import binom_real, gamma_real, zeta_real
from fraccal.weights import (
    DEFAULT_POLICY,
    SchemeKind,
    TailFamily,
    TailPolicy,
    binomial_weights,
    build_scheme,
    gamma_last_two,
    gamma_last_two_asym,
    gl_partial_sums,
    gl_weights,
    l1_last_weight_expansion,
    l1_mod_weights,
    l1_weights,
    shifted_head_weights,
    tail_expansion,
)

alphas = st.floats(min_value=0.05, max_value=0.95)


# {{{ Grünwald-Letnikov


@given(alphas, st.integers(min_value=0, max_value=40))
def test_gl_weights_are_signed_binomials(alpha: float, k: int) -> None:
    w = gl_weights(alpha, k)
    assert w[k] == pytest.approx((-1) ** k * binom_real(alpha, k), rel=1e-12, abs=1e-300)


def test_gl_weights_generating_function() -> None:
    # (1 - z)^a at z = 1/2 from the truncated series
    a = 0.3
    w = gl_weights(a, 200)
    assert math.fsum(w * 0.5 ** np.arange(201)) == pytest.approx(0.5**a, rel=1e-14)


def test_gl_weights_signs() -> None:
    w = gl_weights(0.4, 50)
    assert w[0] == 1.0
    assert np.all(w[1:] < 0)


def test_binomial_weights_negative_order() -> None:
    w = binomial_weights(-1.0, 10)
    np.testing.assert_allclose(w, np.ones(11))
    with pytest.raises(SizeError):
        binomial_weights(0.5, -1)


# }}}


# {{{ tails


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_gl2_tail_against_exact(alpha: float) -> None:
    k = np.arange(100, 400)
    w = gl_weights(alpha, 399)[100:]
    r = np.abs(w - tail_expansion(TailFamily.GL2, alpha, k))
    assert np.all(r * k ** (3.0 + alpha) < 1.0)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_glm_matches_gl2_for_two_terms(alpha: float) -> None:
    # gl2 keeps the first two terms of the general expansion
    k = np.arange(10.0, 50.0)
    m1 = tail_expansion(TailFamily.GLM, alpha, k, M=1)
    gl2 = tail_expansion(TailFamily.GL2, alpha, k)
    np.testing.assert_allclose(m1, gl2, rtol=1e-13)


@pytest.mark.parametrize("alpha", [0.3, 0.7])
def test_glm_converges_with_more_terms(alpha: float) -> None:
    k = 200
    exact = gl_weights(alpha, k)[k]
    errs = [abs(tail_expansion(TailFamily.GLM, alpha, k, M=M) - exact) for M in range(4)]
    assert errs[0] > errs[1] > errs[2] > errs[3]


def test_tail_expansion_errors() -> None:
    with pytest.raises(UnsupportedError):
        tail_expansion(TailFamily.GLM, 0.5, 10, M=4)
    with pytest.raises(DomainError):
        tail_expansion(TailFamily.GLM, 0.5, 10, M=-1)
    with pytest.raises(DomainError):
        tail_expansion(TailFamily.GL2, 0.5, 0)
    assert isinstance(tail_expansion("gl2", 0.5, 3), float)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_l1_tail_derived_beats_printed(alpha: float) -> None:
    k = np.arange(50.0, 500.0)
    s = l1_weights(alpha, 500)[50:500]
    derived = np.abs(s - tail_expansion(TailFamily.L1TAIL, alpha, k))
    printed = np.abs(s - tail_expansion(TailFamily.L1TAIL, alpha, k, printed=True))
    assert np.all(derived * k ** (5.0 + alpha) < 1.0)
    assert np.all(derived <= printed)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_l1_weights_against_mpmath(alpha: float) -> None:
    mp.mp.dps = 40
    b = mp.mpf(1) - mp.mpf(alpha)
    n = 300
    s = l1_weights(alpha, n)
    g = mp.gamma(2 - mp.mpf(alpha))
    for k in (1, 2, 7, 8, 9, 100, 299):
        ref = ((k - 1) ** b - 2 * mp.mpf(k) ** b + (k + 1) ** b) / g
        assert s[k] == pytest.approx(float(ref), rel=1e-13)
    ref = ((n - 1) ** b - mp.mpf(n) ** b) / g
    assert s[n] == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_l1_last_weight_expansion(alpha: float) -> None:
    errs = []
    for n in (100, 200):
        errs.append(abs(l1_last_weight_expansion(alpha, n) - l1_weights(alpha, n)[-1]))
    # three terms leave O(n^{-alpha-3})
    assert math.log2(errs[0] / errs[1]) == pytest.approx(3.0 + alpha, abs=0.1)


# }}}


# {{{ shifted heads


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_shifted_heads_moments(alpha: float) -> None:
    # both schemes (with the GL2 tail) annihilate constants: the sum over
    # all k of the weights vanishes, computed with the zeta regularization
    for kind, m in (("w_tilde", 2), ("w_hat", 3)):
        head = shifted_head_weights(kind, alpha)
        assert len(head) == m
        total = sum(head)
        # tail sum over k >= m of the GL2 terms via Hurwitz zeta
        tail = float(
            mp.zeta(1 + alpha, m) / gamma_real(-alpha)
            - alpha / (2.0 * gamma_real(-1.0 - alpha)) * mp.zeta(2 + alpha, m)
        )
        assert total + tail == pytest.approx(0.0, abs=1e-12)


def test_shifted_heads_unknown() -> None:
    with pytest.raises(ValueError):
        shifted_head_weights("w_bar", 0.5)


# }}}


# {{{ L1 modification and last-two weights


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_l1_mod_head(alpha: float) -> None:
    d = l1_mod_weights(alpha, 10)
    s = l1_weights(alpha, 10)
    c = zeta_real(alpha - 1.0) / gamma_real(2.0 - alpha)
    np.testing.assert_allclose(d[:3] - s[:3], [-c, 2 * c, -c], rtol=1e-13)
    np.testing.assert_array_equal(d[3:], s[3:])
    with pytest.raises(SizeError):
        l1_mod_weights(alpha, 1)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_gamma_last_two_linear_exactness(alpha: float) -> None:
    # sum_k lambda_k (n - k) = (n - a/2)^{1-a} / Gamma(2 - a)
    for n in (2, 3, 10, 57):
        c = build_scheme(SchemeKind.GL_LAST2, alpha, n).coeffs
        lhs = math.fsum(c * (n - np.arange(n + 1)))
        rhs = (n - alpha / 2.0) ** (1.0 - alpha) / gamma_real(2.0 - alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
def test_gamma_asymptotics_order(alpha: float) -> None:
    n = np.arange(100, 400, 50)
    ex = np.array([gamma_last_two(alpha, m) for m in n])
    asy = np.array([gamma_last_two_asym(alpha, m) for m in n])
    slope = np.polyfit(np.log(n), np.log(np.abs(ex - asy)), 1)[0]
    assert slope == pytest.approx(-(2.0 + alpha), abs=0.15)


def test_gamma_asymptotics_printed_scale_differs() -> None:
    a = gamma_last_two_asym(0.5, 100)
    b = gamma_last_two_asym(0.5, 100, printed_scale=True)
    assert a[0] == b[0]
    assert a[1] != b[1]
    with pytest.raises(SizeError):
        gamma_last_two(0.5, 1)
    with pytest.raises(SizeError):
        gamma_last_two_asym(0.5, 1)


@given(alphas, st.integers(min_value=2, max_value=300))
@settings(max_examples=60, deadline=None)
def test_partial_sum_identities(alpha: float, N: int) -> None:
    direct = gl_partial_sums(alpha, N)
    closed = gl_partial_sums(alpha, N, method="closed")
    assert direct.w0 == pytest.approx(closed.w0, abs=1e-11)
    assert direct.w1 == pytest.approx(closed.w1, abs=1e-11)


def test_partial_sums_errors() -> None:
    with pytest.raises(SizeError):
        gl_partial_sums(0.5, 1)
    with pytest.raises(ValueError):
        gl_partial_sums(0.5, 10, method="nope")


# }}}


# {{{ build_scheme


@given(
    st.sampled_from(list(SchemeKind)),
    alphas,
    st.integers(min_value=2, max_value=120),
    st.integers(min_value=0, max_value=120),
)
@settings(max_examples=150, deadline=None)
def test_build_scheme_shape_and_flags(kind: SchemeKind, alpha: float, n: int, extra: int) -> None:
    N = n + extra
    w = build_scheme(kind, alpha, n, N)
    assert len(w) == n + 1
    assert np.all(np.isfinite(w.coeffs))
    assert w.shift == (alpha / 2.0 if kind.shifted else 0.0)
    assert w.order == kind.order(alpha)
    assert not w.coeffs.flags.writeable
    if kind.zero_sum:
        assert abs(math.fsum(w.coeffs)) < 1e-14


@pytest.mark.parametrize("kind", list(SchemeKind))
def test_truncated_equals_exact_below_threshold(kind: SchemeKind) -> None:
    # with N large enough every index stays below ceil(N / p)
    n, N = 12, 1000
    exact = {
        SchemeKind.GL_TRUNC: SchemeKind.GL,
        SchemeKind.L1_TRUNC: SchemeKind.L1,
        SchemeKind.L1_MOD_TRUNC: SchemeKind.L1_MOD,
        SchemeKind.GL_LAST2_TRUNC: SchemeKind.GL_LAST2,
    }.get(kind, kind)
    np.testing.assert_allclose(
        build_scheme(kind, 0.4, n, N).coeffs, build_scheme(exact, 0.4, n, N).coeffs,
        rtol=1e-13, atol=1e-17,
    )


def test_truncation_threshold() -> None:
    N, n = 100, 100
    T = DEFAULT_POLICY.threshold(N)
    assert T == 20
    exact = build_scheme(SchemeKind.GL, 0.5, n, N).coeffs
    trunc = build_scheme(SchemeKind.GL_TRUNC, 0.5, n, N).coeffs
    np.testing.assert_array_equal(exact[: T + 1], trunc[: T + 1])
    assert np.all(exact[T + 1 : n] != trunc[T + 1 : n])
    assert trunc[n] == 0.0


def test_tail_policy() -> None:
    assert TailPolicy(p=3).threshold(10) == 4
    assert TailPolicy(p=100).threshold(10) == 1
    assert TailPolicy(p=0.5).threshold(10) == 10
    with pytest.raises(ValueError):
        TailPolicy(p=0.0)
    with pytest.raises(SizeError):
        DEFAULT_POLICY.threshold(0)


def test_scheme_kind_properties() -> None:
    assert SchemeKind.parse(" GL_Last2 ") is SchemeKind.GL_LAST2
    with pytest.raises(ValueError, match="unknown scheme"):
        SchemeKind.parse("gl3")
    assert SchemeKind.GL.requires_zero_ic
    assert not SchemeKind.GL_LAST2.requires_zero_ic
    assert SchemeKind.L1.order(0.3) == pytest.approx(1.7)
    assert SchemeKind.L1_MOD.order(0.3) == 2.0
    assert SchemeKind.SHIFT_2.shifted
    assert not SchemeKind.L1_TRUNC.shifted


def test_build_scheme_size_errors() -> None:
    with pytest.raises(SizeError):
        build_scheme(SchemeKind.GL_LAST2, 0.5, 1)
    with pytest.raises(SizeError):
        build_scheme(SchemeKind.GL, 0.5, 10, 5)
    with pytest.raises(SizeError):
        build_scheme(SchemeKind.GL, 0.5, 0)
    with pytest.raises(DomainError):
        build_scheme(SchemeKind.GL, 1.5, 4)


def test_weight_vector_csv() -> None:
    w = build_scheme(SchemeKind.L1, 0.5, 3)
    lines = w.to_csv().splitlines()
    assert lines[0] == "k,coeff"
    assert len(lines) == 5
    for k, line in enumerate(lines[1:]):
        idx, value = line.split(",")
        assert int(idx) == k
        assert float(value) == w.coeffs[k]


# }}}
