"""Real-valued special functions used by the weight formulas and oracles.

Everything here works on Python floats and raises :class:`DomainError`
at poles instead of returning ``nan`` or ``inf``.
"""

from __future__ import annotations

import math

from scipy import special

from fraccal.errors import AccuracyError, DomainError, UnsupportedError

EULER_GAMMA = 0.57721566490153286060651209008240243


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _check_finite(x: float, name: str) -> None:
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


# {{{ gamma / digamma


def gamma_real(x: float) -> float:
    """Gamma function for real *x* that is not a non-positive integer."""
    x = float(x)
    _check_finite(x, "x")
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma has a pole at x = {x}")
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise DomainError(f"gamma({x}) overflows double precision") from exc


def rgamma(x: float) -> float:
    """Reciprocal gamma function ``1 / gamma(x)``; zero at the poles."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x > 171.0:
        return 0.0 if x > 200.0 else math.exp(-math.lgamma(x))
    return 1.0 / math.gamma(x)


def digamma(x: float) -> float:
    r"""Logarithmic derivative of the gamma function, :math:`\psi(x)`.

    Wraps :func:`scipy.special.digamma`, raising :class:`DomainError` at the
    poles instead of returning ``nan``.
    """
    x = float(x)
    _check_finite(x, "x")
    if _is_nonpositive_integer(x):
        raise DomainError(f"digamma has a pole at x = {x}")
    return float(special.digamma(x))


def harmonic(n: int) -> float:
    """The harmonic number ``H_n = 1 + 1/2 + ... + 1/n`` (``H_0 = 0``)."""
    if n < 0:
        raise DomainError(f"harmonic number needs n >= 0, got {n}")
    return math.fsum(1.0 / k for k in range(1, n + 1))


# }}}


# {{{ zeta


def zeta_real(s: float) -> float:
    r"""Riemann zeta function for real :math:`s \ne 1`.

    Thin wrapper over :func:`scipy.special.zeta` that raises
    :class:`DomainError` at the pole and on overflow instead of returning
    ``inf``.
    """
    s = float(s)
    _check_finite(s, "s")
    if s == 1.0:
        raise DomainError("zeta has a pole at s = 1")

    value = float(special.zeta(s))
    if not math.isfinite(value):
        raise DomainError(f"zeta({s}) is not representable")
    return value


# }}}


# {{{ Mittag-Leffler


def _gamma_sign(z: float) -> float:
    if z > 0.0:
        return 1.0
    return -1.0 if math.floor(-z) % 2 == 0 else 1.0


def mittag_leffler(
    a: float,
    b: float,
    x: float,
    *,
    tol: float = 1.0e-15,
    max_terms: int = 10_000,
    max_loss: float = 6.0,
) -> float:
    r"""Two-parameter Mittag-Leffler function
    :math:`E_{a, b}(x) = \sum_n x^n / \Gamma(a n + b)` by direct summation.

    Terms are evaluated through :func:`math.lgamma` so that large gamma
    arguments do not overflow, and accumulated with :func:`math.fsum`. Meant
    for moderate arguments, :math:`|x| \lesssim 20`. When the alternating
    terms grow so large that cancellation would destroy more than
    ``max_loss`` decimal digits an :class:`AccuracyError` is raised.
    """
    a = float(a)
    b = float(b)
    x = float(x)
    if not a > 0.0:
        raise DomainError(f"Mittag-Leffler parameter a must be positive, got {a}")
    _check_finite(b, "b")
    _check_finite(x, "x")

    if x == 0.0:
        return rgamma(b)

    logx = math.log(abs(x))
    xsign = -1.0 if x < 0.0 else 1.0

    terms: list[float] = []
    partial = 0.0
    prev = math.inf
    peak = -math.inf
    for n in range(max_terms):
        z = a * n + b
        if _is_nonpositive_integer(z):
            term = 0.0
            mag = -math.inf
        else:
            mag = n * logx - math.lgamma(z)
            term = (xsign**n) * _gamma_sign(z) * math.exp(mag)

        terms.append(term)
        partial += term
        peak = max(peak, mag)

        # only stop once the magnitudes are decreasing
        if mag < prev and abs(term) < tol * (1.0 + abs(partial)):
            result = math.fsum(terms)
            loss = (peak - math.log1p(abs(result))) / math.log(10.0)
            if loss > max_loss:
                raise AccuracyError(
                    f"Mittag-Leffler series E_{{{a}, {b}}}({x}) loses "
                    f"{loss:.1f} digits to cancellation",
                    estimate=result,
                )
            return result
        prev = mag

    raise AccuracyError(
        f"Mittag-Leffler series E_{{{a}, {b}}}({x}) did not converge "
        f"in {max_terms} terms",
        estimate=math.fsum(terms),
    )


# }}}


# {{{ combinatorial


def binom_real(alpha: float, k: int) -> float:
    """Generalized binomial coefficient ``alpha (alpha - 1) ... (alpha - k + 1) / k!``."""
    if k < 0:
        raise DomainError(f"binomial coefficient needs k >= 0, got {k}")

    result = 1.0
    for j in range(k):
        result *= (alpha - j) / (j + 1)
    return result


def rising_factorial(x: float, m: int) -> float:
    """Pochhammer symbol ``x (x + 1) ... (x + m - 1)``."""
    result = 1.0
    for j in range(m):
        result *= x + j
    return result


def gen_bernoulli_diag(m: int, alpha: float) -> float:
    r"""Diagonal generalized Bernoulli values :math:`B_m^{(-\alpha)}(-\alpha)`.

    Only ``m <= 3`` is available (closed forms).
    """
    if m == 0:
        return 1.0
    if m == 1:
        return -alpha / 2.0
    if m == 2:
        return alpha * (1.0 + 3.0 * alpha) / 12.0
    if m == 3:
        return -(alpha**2) * (1.0 + alpha) / 8.0
    if m < 0:
        raise DomainError(f"m must be non-negative, got {m}")
    raise UnsupportedError(f"B_m^(-a)(-a) is only available for m <= 3, got m = {m}")


# }}}
