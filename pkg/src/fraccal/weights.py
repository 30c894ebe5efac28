"""Weight vectors of the Caputo derivative approximations.

Every approximation here has the form

.. math::

    D^\\alpha y(x_n - s h) \\approx \\frac{1}{h^\\alpha}
        \\sum_{k = 0}^{n} \\lambda_k y_{n - k},

where the shift :math:`s` is either ``0`` or :math:`\\alpha / 2`. A scheme is
realized for a given step index ``n`` (and global grid size ``N``, which sets
the truncation threshold) as a :class:`WeightVector` with ``n + 1``
coefficients.

Grünwald-Letnikov type weights are always built from the recurrence
:math:`w_k = w_{k - 1} (k - 1 - \\alpha) / k`, never from gamma quotients,
so that large indices do not overflow.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from fraccal.errors import DomainError, SizeError, UnsupportedError
from fraccal.specfun import gamma_real, gen_bernoulli_diag, zeta_real

# {{{ scheme kinds


class SchemeKind(str, enum.Enum):
    GL = "gl"
    GL_TRUNC = "gl_trunc"
    L1 = "l1"
    L1_MOD = "l1_mod"
    L1_TRUNC = "l1_trunc"
    L1_MOD_TRUNC = "l1_mod_trunc"
    SHIFT_2MA = "shift_2ma"
    SHIFT_2 = "shift_2"
    GL_LAST2 = "gl_last2"
    GL_LAST2_TRUNC = "gl_last2_trunc"

    @property
    def shifted(self) -> bool:
        return self in _SHIFTED

    @property
    def requires_zero_ic(self) -> bool:
        return self in _ZERO_IC

    @property
    def zero_sum(self) -> bool:
        return self in _ZERO_SUM

    @property
    def min_n(self) -> int:
        """Smallest step index for which the scheme is defined."""
        if self in (
            SchemeKind.L1_MOD,
            SchemeKind.L1_MOD_TRUNC,
            SchemeKind.GL_LAST2,
            SchemeKind.GL_LAST2_TRUNC,
        ):
            return 2
        return 1

    def order(self, alpha: float) -> float:
        """Claimed accuracy exponent of the approximation."""
        if self in (SchemeKind.L1, SchemeKind.L1_TRUNC, SchemeKind.SHIFT_2MA):
            return 2.0 - alpha
        return 2.0

    @classmethod
    def parse(cls, name: str | SchemeKind) -> SchemeKind:
        if isinstance(name, SchemeKind):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            known = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown scheme {name!r} (known: {known})") from None


_SHIFTED = frozenset({
    SchemeKind.GL,
    SchemeKind.GL_TRUNC,
    SchemeKind.SHIFT_2MA,
    SchemeKind.SHIFT_2,
    SchemeKind.GL_LAST2,
    SchemeKind.GL_LAST2_TRUNC,
})
_ZERO_IC = frozenset({
    SchemeKind.GL,
    SchemeKind.GL_TRUNC,
    SchemeKind.SHIFT_2MA,
    SchemeKind.SHIFT_2,
})
_ZERO_SUM = frozenset({SchemeKind.L1, SchemeKind.L1_MOD, SchemeKind.GL_LAST2})


@dataclass(frozen=True)
class TailPolicy:
    """Where asymptotic tails replace exact weights.

    Weights with index greater than ``ceil(N / p)`` are replaced.

    .. attribute:: l1_printed_tail

        Use ``alpha / 12`` instead of ``1 / 12`` as the second tail coefficient
        of the truncated L1 weights (the two variants are kept for comparison).

    .. attribute:: last2_printed_scale

        Use ``1 / 24`` as the scale of the leading term of the asymptotic last
        weight of the truncated last-two-weights scheme (comparison variant).
    """

    p: float = 5.0
    l1_printed_tail: bool = False
    last2_printed_scale: bool = False

    def __post_init__(self) -> None:
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"tail divisor p must be positive, got {self.p}")

    def threshold(self, N: int) -> int:
        if N < 1:
            raise SizeError(f"grid size must be positive, got N = {N}")
        return min(max(math.ceil(N / self.p), 1), N)


DEFAULT_POLICY = TailPolicy()


@dataclass(frozen=True)
class WeightVector:
    """Coefficients ``lambda_0, ..., lambda_n`` of one realized scheme."""

    kind: SchemeKind
    alpha: float
    n: int
    coeffs: np.ndarray = field(repr=False)
    shift: float
    order: float
    requires_zero_ic: bool

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.n + 1,):
            raise SizeError(
                f"expected {self.n + 1} coefficients, got {self.coeffs.shape}"
            )
        self.coeffs.setflags(write=False)

    def __len__(self) -> int:
        return self.coeffs.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("k,coeff\n")
        for k, c in enumerate(self.coeffs):
            buf.write(f"{k},{c:.17g}\n")
        return buf.getvalue()


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"fractional order must be in (0, 1), got {alpha}")


# }}}


# {{{ Grünwald-Letnikov weights


def binomial_weights(beta: float, n: int) -> np.ndarray:
    """Coefficients ``(-1)^k binom(beta, k)`` for ``k = 0, ..., n``.

    These are the Taylor coefficients of ``(1 - z)^beta``; *beta* may be any
    real number.
    """
    if n < 0:
        raise SizeError(f"n must be non-negative, got {n}")

    k = np.arange(1, n + 1, dtype=np.float64)
    w = np.empty(n + 1)
    w[0] = 1.0
    w[1:] = np.cumprod((k - 1.0 - beta) / k)
    return w


def gl_weights(alpha: float, n: int) -> np.ndarray:
    """Grünwald-Letnikov weights ``w_0, ..., w_n``."""
    return binomial_weights(alpha, n)


class TailFamily(str, enum.Enum):
    #: two-term expansion of the Grünwald-Letnikov weights
    GL2 = "gl2"
    #: M-term expansion of the Grünwald-Letnikov weights
    GLM = "glm"
    #: two-term expansion of the interior L1 weights
    L1TAIL = "l1tail"


def tail_expansion(
    family: TailFamily | str,
    alpha: float,
    k: int | np.ndarray,
    M: int = 2,
    *,
    printed: bool = False,
) -> float | np.ndarray:
    """Leading terms of the large-``k`` expansion of a weight family.

    :arg M: number of extra terms (``m = 0, ..., M``) for ``GLM``.
    :arg printed: for ``L1TAIL``, use ``alpha / 12`` as the second coefficient.
    """
    family = TailFamily(family)
    kk = np.asarray(k, dtype=np.float64)
    if np.any(kk < 1):
        raise DomainError("tail expansions need k >= 1")

    if family == TailFamily.GL2:
        result = (
            kk ** (-1.0 - alpha) / gamma_real(-alpha)
            - alpha / (2.0 * gamma_real(-1.0 - alpha)) * kk ** (-2.0 - alpha)
        )
    elif family == TailFamily.GLM:
        if M > 3:
            raise UnsupportedError(f"GLM expansion only available for M <= 3, got {M}")
        if M < 0:
            raise DomainError(f"M must be non-negative, got {M}")
        result = sum(
            gen_bernoulli_diag(m, alpha)
            / (math.factorial(m) * gamma_real(-m - alpha))
            * kk ** (-(m + alpha + 1.0))
            for m in range(M + 1)
        )
    else:
        c2 = alpha / 12.0 if printed else 1.0 / 12.0
        result = (
            kk ** (-1.0 - alpha) / gamma_real(-alpha)
            + c2 / gamma_real(-2.0 - alpha) * kk ** (-3.0 - alpha)
        )

    return float(result) if np.ndim(k) == 0 else result


def shifted_head_weights(kind: str, alpha: float) -> tuple[float, ...]:
    """Closed-form head weights of the zeta-corrected shifted schemes.

    ``"w_tilde"`` gives the two head weights of the order ``2 - alpha``
    scheme, ``"w_hat"`` the three head weights of the second-order scheme.
    The remaining weights of both are the ``GL2`` tail.
    """
    _check_alpha(alpha)
    a = alpha
    g = gamma_real(-a)
    z_m1, z0, z1, z2 = (zeta_real(a + j) for j in (-1.0, 0.0, 1.0, 2.0))

    kind = kind.lower()
    if kind == "w_tilde":
        w0 = (z0 + 0.5 * (a - 1.0) * (a + 2.0) * z1 - 0.5 * a * (a + 1.0) * z2) / g
        w1 = (0.5 * (a * a + a + 2.0) - z0 - 0.5 * a * (a + 1.0) * z1) / g
        return (w0, w1)

    if kind == "w_hat":
        w0 = -(
            2.0 * z_m1
            + (a + 3.0) * (a - 2.0) * z0
            - (3.0 * a * a + 3.0 * a - 4.0) * z1
            + 2.0 * a * (a + 1.0) * z2
        ) / (4.0 * g)
        w1 = (
            2.0 + a + a * a
            + 2.0 * z_m1
            + (a + a * a - 4.0) * z0
            - 2.0 * a * (a + 1.0) * z1
        ) / (2.0 * g)
        w2 = (
            (4.0 + a + a * a) / 2.0 ** (1.0 + a)
            - 2.0 * z_m1
            - (a * a + a - 2.0) * z0
            + a * (1.0 + a) * z1
        ) / (4.0 * g)
        return (w0, w1, w2)

    raise ValueError(f"unknown shifted head kind {kind!r} (known: w_tilde, w_hat)")


# }}}


# {{{ L1 weights


def _second_difference_power(b: float, k: np.ndarray) -> np.ndarray:
    """``(k - 1)^b - 2 k^b + (k + 1)^b`` without cancellation for ``k >= 8``.

    Uses ``(1 + x)^b + (1 - x)^b - 2 = 2 sum_m binom(b, 2m) x^{2m}`` with
    ``x = 1 / k``; twelve terms reach double precision for ``x <= 1/8``.
    """
    k = np.asarray(k, dtype=np.float64)
    out = (k - 1.0) ** b - 2.0 * k**b + (k + 1.0) ** b

    large = k >= 8.0
    if np.any(large):
        x2 = 1.0 / k[large] ** 2
        series = np.zeros_like(x2)
        coeff = 1.0
        power = np.ones_like(x2)
        for m in range(1, 13):
            # binom(b, 2m) from binom(b, 2m - 2)
            coeff *= (b - 2 * m + 2) * (b - 2 * m + 1) / ((2 * m - 1) * (2 * m))
            power = power * x2
            series += coeff * power
        out[large] = 2.0 * k[large] ** b * series

    return out


def l1_weights(alpha: float, n: int) -> np.ndarray:
    """L1 weights ``sigma_0, ..., sigma_n``."""
    _check_alpha(alpha)
    if n < 1:
        raise SizeError(f"L1 weights need n >= 1, got {n}")

    b = 1.0 - alpha
    s = np.empty(n + 1)
    s[0] = 1.0
    s[1:n] = _second_difference_power(b, np.arange(1, n, dtype=np.float64))
    # (n - 1)^b - n^b, written to avoid cancellation for large n
    s[n] = n**b * math.expm1(b * math.log1p(-1.0 / n)) if n > 1 else -1.0
    return s / gamma_real(2.0 - alpha)


def _l1_head_correction(alpha: float) -> np.ndarray:
    c = zeta_real(alpha - 1.0) / gamma_real(2.0 - alpha)
    return np.array([-c, 2.0 * c, -c])


def l1_mod_weights(alpha: float, n: int) -> np.ndarray:
    """Second-order modification of the L1 weights (corrected first three).

    For ``n = 2`` the correction lands on the last weight ``sigma_2``.
    """
    if n < 2:
        raise SizeError(f"modified L1 weights need n >= 2, got {n}")

    d = l1_weights(alpha, n)
    d[:3] += _l1_head_correction(alpha)
    return d


def l1_last_weight_expansion(alpha: float, n: int) -> float:
    """Three-term expansion of the last L1 weight ``sigma_n``."""
    return (
        -(n**-alpha) / gamma_real(1.0 - alpha)
        + n ** (-alpha - 1.0) / (2.0 * gamma_real(-alpha))
        - n ** (-alpha - 2.0) / (6.0 * gamma_real(-1.0 - alpha))
    )


# }}}


# {{{ last-two-weights correction


def _s_term(alpha: float, n: int) -> float:
    return (n - alpha / 2.0) ** (1.0 - alpha) / gamma_real(2.0 - alpha)


def gamma_last_two(alpha: float, n: int) -> tuple[float, float]:
    """Exact corrected last two weights ``(gamma_{n-1}, gamma_n)``."""
    _check_alpha(alpha)
    if n < 2:
        raise SizeError(f"last-two-weights correction needs n >= 2, got {n}")

    w2 = binomial_weights(alpha - 2.0, n - 2)[-1]
    s = _s_term(alpha, n)
    return ((n - 2.0 * alpha) / (1.0 + alpha - n) * w2 + s, w2 - s)


def gamma_last_two_asym(
    alpha: float, n: int, *, printed_scale: bool = False
) -> tuple[float, float]:
    """Large-``n`` expansions of the corrected last two weights."""
    _check_alpha(alpha)
    if n < 2:
        raise SizeError(f"last-two-weights correction needs n >= 2, got {n}")

    g = gamma_real(-alpha)
    lead = 1.0 / 24.0 if printed_scale else 1.0
    gm1 = (26.0 - alpha) / (24.0 * g * n ** (1.0 + alpha))
    gn = -lead / (gamma_real(1.0 - alpha) * n**alpha) + (13.0 * alpha + 10.0) / (
        24.0 * g * n ** (1.0 + alpha)
    )
    return (gm1, gn)


class PartialSums(NamedTuple):
    w0: float
    w1: float


def gl_partial_sums(alpha: float, N: int, *, method: str = "direct") -> PartialSums:
    """Sums ``W_N^0 = sum_{k<N} w_k`` and the linear-moment defect ``W_N^1``.

    ``method="direct"`` sums the weights, ``method="closed"`` uses the
    binomial identities ``W_N^0 = w^{(alpha-1)}_{N-1}`` and
    ``W_N^1 = w^{(alpha-2)}_{N-1} - (N - alpha/2)^{1-alpha} / Gamma(2-alpha)``.
    """
    _check_alpha(alpha)
    if N < 2:
        raise SizeError(f"partial sums need N >= 2, got {N}")

    s = _s_term(alpha, N)
    if method == "direct":
        w = gl_weights(alpha, N - 1)
        k = np.arange(N, dtype=np.float64)
        w0 = math.fsum(w)
        w1 = math.fsum((N - k) * w) - s
        return PartialSums(w0, w1)
    if method == "closed":
        w0 = binomial_weights(alpha - 1.0, N - 1)[-1]
        w1 = binomial_weights(alpha - 2.0, N - 1)[-1] - s
        return PartialSums(w0, w1)

    raise ValueError(f"unknown method {method!r} (known: direct, closed)")


# }}}


# {{{ build_scheme


def _gl2(alpha: float, k: np.ndarray) -> np.ndarray:
    return np.asarray(tail_expansion(TailFamily.GL2, alpha, k))


def _truncated_gl(alpha: float, last: int, threshold: int) -> np.ndarray:
    """Weights ``0..last`` with exact values up to *threshold*, GL2 after."""
    w = gl_weights(alpha, last)
    if last > threshold:
        w[threshold + 1 :] = _gl2(alpha, np.arange(threshold + 1, last + 1))
    return w


def _truncated_l1(alpha: float, n: int, threshold: int, policy: TailPolicy) -> np.ndarray:
    s = l1_weights(alpha, n)
    if n - 1 > threshold:
        k = np.arange(threshold + 1, n, dtype=np.float64)
        s[threshold + 1 : n] = tail_expansion(
            TailFamily.L1TAIL, alpha, k, printed=policy.l1_printed_tail
        )
    if n > threshold:
        s[n] = l1_last_weight_expansion(alpha, n)
    return s


def build_scheme(
    kind: SchemeKind | str,
    alpha: float,
    n: int,
    N: int | None = None,
    policy: TailPolicy = DEFAULT_POLICY,
) -> WeightVector:
    """Realize the coefficient vector of *kind* at step *n* on a grid of size *N*.

    Truncated kinds keep exact weights up to ``policy.threshold(N)`` and use
    asymptotic tails above it. Grünwald-Letnikov type kinds only define
    weights up to ``n - 1``; their ``n``-th entry is zero, except for the
    last-two-weights kinds that define it explicitly.
    """
    kind = SchemeKind.parse(kind)
    _check_alpha(alpha)
    if N is None:
        N = n
    if not 1 <= n <= N:
        raise SizeError(f"step index must satisfy 1 <= n <= N, got n = {n}, N = {N}")
    if n < kind.min_n:
        raise SizeError(f"scheme {kind.value!r} needs n >= {kind.min_n}, got n = {n}")

    T = policy.threshold(N)
    c = np.zeros(n + 1)

    if kind == SchemeKind.GL:
        c[:n] = gl_weights(alpha, n - 1)
    elif kind == SchemeKind.GL_TRUNC:
        c[:n] = _truncated_gl(alpha, n - 1, T)
    elif kind in (SchemeKind.SHIFT_2MA, SchemeKind.SHIFT_2):
        head = shifted_head_weights(
            "w_tilde" if kind == SchemeKind.SHIFT_2MA else "w_hat", alpha
        )
        if n > 1:
            c[1:n] = _gl2(alpha, np.arange(1, n))
        m = min(len(head), n)
        c[:m] = head[:m]
    elif kind == SchemeKind.L1:
        c[:] = l1_weights(alpha, n)
    elif kind == SchemeKind.L1_TRUNC:
        c[:] = _truncated_l1(alpha, n, T, policy)
    elif kind == SchemeKind.L1_MOD:
        c[:] = l1_mod_weights(alpha, n)
    elif kind == SchemeKind.L1_MOD_TRUNC:
        c[:] = _truncated_l1(alpha, n, T, policy)
        c[:3] += _l1_head_correction(alpha)
    elif kind == SchemeKind.GL_LAST2:
        c[: n - 1] = gl_weights(alpha, n - 2)
        c[n - 1], c[n] = gamma_last_two(alpha, n)
    elif kind == SchemeKind.GL_LAST2_TRUNC:
        # the expansions take over once the first corrected index n - 1 is
        # beyond the threshold, like every other truncated weight
        if n - 1 <= T:
            c[: n - 1] = gl_weights(alpha, n - 2)
            c[n - 1], c[n] = gamma_last_two(alpha, n)
        else:
            c[: n - 1] = _truncated_gl(alpha, n - 2, T)
            c[n - 1], c[n] = gamma_last_two_asym(
                alpha, n, printed_scale=policy.last2_printed_scale
            )
    else:  # pragma: no cover
        raise AssertionError(kind)

    if kind.zero_sum:
        # the weights sum to zero analytically; closing the sum with the last
        # weight keeps constants in the kernel to rounding accuracy
        c[n] = -math.fsum(c[:n])

    return WeightVector(
        kind=kind,
        alpha=alpha,
        n=n,
        coeffs=c,
        shift=alpha / 2.0 if kind.shifted else 0.0,
        order=kind.order(alpha),
        requires_zero_ic=kind.requires_zero_ic,
    )


# }}}
