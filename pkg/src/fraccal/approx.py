"""Applying weight schemes to samples, and the Caputo derivative oracles.

Two independent routes to :math:`D^\\alpha y(x)` are available:

* :func:`caputo_reference` -- closed forms (power rule, Mittag-Leffler,
  digamma) for a small catalog of functions;
* :func:`caputo_quadrature_oracle` -- adaptive quadrature of the defining
  integral after a change of variables that removes the kernel singularity.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from fraccal.errors import AccuracyError, DomainError, SizeError
from fraccal.specfun import EULER_GAMMA, digamma, gamma_real, mittag_leffler, rgamma
from fraccal.weights import DEFAULT_POLICY, SchemeKind, TailPolicy, WeightVector, build_scheme

# {{{ sampled functions


@dataclass(frozen=True)
class SampledFunction:
    """Samples ``y_k = y(k h)`` for ``k = 0, ..., N``."""

    h: float
    values: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise DomainError(f"step must be positive, got h = {self.h}")
        if self.values.ndim != 1 or self.values.size < 2:
            raise SizeError("need at least two samples (N >= 1)")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("samples must be finite")

    @property
    def N(self) -> int:
        return self.values.size - 1

    @classmethod
    def from_callable(
        cls, func: Callable[[float], float], h: float, N: int, label: str = ""
    ) -> SampledFunction:
        values = np.array([func(k * h) for k in range(N + 1)], dtype=np.float64)
        return cls(h=h, values=values, label=label)


def apply_scheme(scheme: WeightVector, f: SampledFunction, n: int | None = None) -> tuple[float, float]:
    """Evaluate ``h^-alpha sum_k lambda_k y_{n-k}``.

    :returns: the approximation and the point it approximates,
        ``(n - shift) h``.
    """
    if n is None:
        n = scheme.n
    if n != scheme.n:
        raise SizeError(f"scheme was built for n = {scheme.n}, asked for n = {n}")
    if n > f.N:
        raise SizeError(f"index n = {n} is beyond the last sample N = {f.N}")

    window = f.values[n::-1]
    value = math.fsum(scheme.coeffs * window) / f.h**scheme.alpha
    return value, (n - scheme.shift) * f.h


# }}}


# {{{ reference derivatives


class RefKind(str, enum.Enum):
    POWER = "power"
    EXP = "exp"
    SIN = "sin"
    COS = "cos"
    X3LNX = "x3lnx"
    LINEAR = "linear"
    CONST = "const"


@dataclass(frozen=True)
class ReferenceFunction:
    """A function with a closed-form Caputo derivative.

    ``POWER`` uses :attr:`p` as the exponent (any real ``p > alpha``, or
    ``p = 0``) and :attr:`scale` multiplies every function.
    """

    kind: RefKind
    p: float = 0.0
    scale: float = 1.0

    def __call__(self, x: float) -> float:
        return self.scale * _VALUES[self.kind](x, self.p)

    def derivative(self, x: float) -> float:
        return self.scale * _DERIVATIVES[self.kind](x, self.p)

    def caputo(self, alpha: float, x: float) -> float:
        return caputo_reference(self, alpha, x)


def _x3lnx(x: float) -> float:
    return 0.0 if x == 0.0 else x**3 * math.log(x)


def _dx3lnx(x: float) -> float:
    return 0.0 if x == 0.0 else x * x * (3.0 * math.log(x) + 1.0)


_VALUES: dict[RefKind, Callable[[float, float], float]] = {
    RefKind.POWER: lambda x, p: x**p,
    RefKind.EXP: lambda x, p: math.exp(x),
    RefKind.SIN: lambda x, p: math.sin(x),
    RefKind.COS: lambda x, p: math.cos(x),
    RefKind.X3LNX: lambda x, p: _x3lnx(x),
    RefKind.LINEAR: lambda x, p: x,
    RefKind.CONST: lambda x, p: 1.0,
}

_DERIVATIVES: dict[RefKind, Callable[[float, float], float]] = {
    RefKind.POWER: lambda x, p: 0.0 if p == 0 else p * x ** (p - 1.0),
    RefKind.EXP: lambda x, p: math.exp(x),
    RefKind.SIN: lambda x, p: math.cos(x),
    RefKind.COS: lambda x, p: -math.sin(x),
    RefKind.X3LNX: lambda x, p: _dx3lnx(x),
    RefKind.LINEAR: lambda x, p: 1.0,
    RefKind.CONST: lambda x, p: 0.0,
}


def caputo_x3lnx(alpha: float, x: float) -> float:
    """Caputo derivative of ``x^3 ln x``."""
    return (
        x ** (3.0 - alpha)
        * rgamma(4.0 - alpha)
        * (11.0 + 6.0 * math.log(x) - 6.0 * EULER_GAMMA - 6.0 * digamma(4.0 - alpha))
    )


def caputo_exp(alpha: float, x: float, c: float = 1.0) -> float:
    """Caputo derivative of ``exp(c x)``."""
    return c * x ** (1.0 - alpha) * mittag_leffler(1.0, 2.0 - alpha, c * x)


def caputo_sin(alpha: float, x: float) -> float:
    return x ** (1.0 - alpha) * mittag_leffler(2.0, 2.0 - alpha, -x * x)


def caputo_cos(alpha: float, x: float) -> float:
    return -(x ** (2.0 - alpha)) * mittag_leffler(2.0, 3.0 - alpha, -x * x)


def caputo_power(alpha: float, x: float, p: float) -> float:
    """Caputo derivative of ``x^p``; zero for ``p = 0``."""
    if p == 0:
        return 0.0
    if not p > alpha:
        raise DomainError(f"power rule needs p > alpha (or p = 0), got p = {p}")
    return gamma_real(p + 1.0) * rgamma(p + 1.0 - alpha) * x ** (p - alpha)


def caputo_reference(ref: ReferenceFunction, alpha: float, x: float) -> float:
    """Closed-form Caputo derivative of *ref* at ``x > 0``."""
    if not x > 0:
        raise DomainError(f"Caputo reference values need x > 0, got {x}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")

    kind = ref.kind
    if kind == RefKind.POWER:
        value = caputo_power(alpha, x, ref.p)
    elif kind == RefKind.EXP:
        value = caputo_exp(alpha, x)
    elif kind == RefKind.SIN:
        value = caputo_sin(alpha, x)
    elif kind == RefKind.COS:
        value = caputo_cos(alpha, x)
    elif kind == RefKind.X3LNX:
        value = caputo_x3lnx(alpha, x)
    elif kind == RefKind.LINEAR:
        value = x ** (1.0 - alpha) * rgamma(2.0 - alpha)
    elif kind == RefKind.CONST:
        value = 0.0
    else:  # pragma: no cover
        raise AssertionError(kind)

    return ref.scale * value


# }}}


# {{{ quadrature oracle


#: relative accuracy floor of :func:`caputo_quadrature_oracle`
REL_FLOOR = 1.0e-13


def caputo_quadrature_oracle(
    yprime: Callable[[float], float],
    alpha: float,
    x: float,
    tol: float = 1.0e-12,
) -> float:
    r"""Caputo derivative from its defining integral.

    With :math:`x - t = s^{1 / (1 - \alpha)}` the weakly singular kernel is
    absorbed exactly:

    .. math::

        \int_0^x \frac{y'(t)}{(x - t)^\alpha} \, dt
        = \frac{1}{1 - \alpha} \int_0^{x^{1 - \alpha}}
            y'\left(x - s^{1 / (1 - \alpha)}\right) \, ds.

    *tol* is an absolute tolerance; for large derivatives it is relaxed to
    a relative ``REL_FLOOR``, the best double precision quadrature can do.

    :raises AccuracyError: if the adaptive rule cannot reach the tolerance.
    """
    if not x > 0:
        raise DomainError(f"need x > 0, got {x}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")

    b = 1.0 - alpha
    upper = x**b

    def integrand(s: float) -> float:
        return yprime(max(x - s ** (1.0 / b), 0.0))

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(
                integrand, 0.0, upper, epsabs=0.1 * tol, epsrel=REL_FLOOR, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"quadrature did not converge: {exc}") from exc

    result = value / (b * gamma_real(1.0 - alpha))
    err = abserr / (b * gamma_real(1.0 - alpha))
    allowed = max(tol, REL_FLOOR * abs(result))
    if err > allowed:
        raise AccuracyError(
            f"quadrature error estimate {err:.3e} exceeds tolerance {allowed:.3e}",
            estimate=result,
        )
    return result


# }}}


# {{{ fractional integral


def frac_integral_riemann(f: SampledFunction, alpha: float, n: int | None = None) -> float:
    r"""Riemann sum ``h^a sum_{k=1}^{n-1} y_{n-k} / (Gamma(a) k^{1-a})``.

    For ``y(0) = 0`` it approximates the fractional integral with the expansion

    .. math::

        I^\alpha y(x_n) + \frac{\zeta(1 - \alpha)}{\Gamma(\alpha)} y_n h^\alpha
            + O(h^{1 + \alpha}).
    """
    if n is None:
        n = f.N
    if n < 2 or n > f.N:
        raise SizeError(f"need 2 <= n <= N = {f.N}, got n = {n}")

    k = np.arange(1, n, dtype=np.float64)
    terms = f.values[n - 1 : 0 : -1] * k ** (alpha - 1.0)
    return f.h**alpha * math.fsum(terms) / gamma_real(alpha)


# }}}


# {{{ order estimation


def _is_halving(hs: Sequence[float], rtol: float = 1.0e-9) -> bool:
    return all(abs(hs[i - 1] / hs[i] - 2.0) <= 2.0 * rtol for i in range(1, len(hs)))


def estimate_order(errors: Iterable[tuple[float, float]]) -> list[float]:
    """Empirical orders ``log2(E_{i-1} / E_i)`` for a halving step sequence."""
    errors = list(errors)
    hs = [h for h, _ in errors]
    if any(h <= 0 for h in hs) or not _is_halving(hs):
        raise ValueError(f"step sizes must be positive and strictly halving: {hs}")
    if any(not e > 0 for _, e in errors):
        raise ValueError("errors must be positive to define an order")

    return [
        math.log2(errors[i - 1][1] / errors[i][1]) for i in range(1, len(errors))
    ]


def fit_order(errors: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log E`` against ``log h``."""
    h = np.log([e[0] for e in errors])
    err = np.log([e[1] for e in errors])
    return float(np.polyfit(h, err, 1)[0])


@dataclass(frozen=True)
class OrderRow:
    h: float
    error: float
    order: float | None


def scheme_order_study(
    kind: SchemeKind | str,
    func: Callable[[float], float],
    caputo: Callable[[float], float],
    alpha: float,
    hs: Sequence[float],
    *,
    x: float = 1.0,
    policy: TailPolicy = DEFAULT_POLICY,
) -> list[OrderRow]:
    """Error of one scheme at the target point ``x - shift h`` for each ``h``.

    *caputo* is the exact derivative; the grid is ``[0, x]`` with ``N = x / h``.
    Rows come back sorted by decreasing ``h``.
    """
    kind = SchemeKind.parse(kind)
    rows = []
    for h in sorted(hs, reverse=True):
        N = round(x / h)
        if not math.isclose(N * h, x, rel_tol=1.0e-12):
            raise ValueError(f"h = {h} does not divide x = {x}")
        f = SampledFunction.from_callable(func, h, N)
        scheme = build_scheme(kind, alpha, N, N, policy)
        value, xs = apply_scheme(scheme, f)
        rows.append((h, abs(value - caputo(xs))))

    orders = [None, *estimate_order(rows)]
    return [OrderRow(h, e, o) for (h, e), o in zip(rows, orders)]


# }}}
