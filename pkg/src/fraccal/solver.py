"""Finite difference solvers for linear fractional relaxation equations.

Scalar problems :math:`D^\\alpha y + L y = f` use

* ``ns1`` with a non-shifted scheme (approximation at :math:`x_n`);
* ``ns2`` with a shifted scheme (approximation at :math:`x_n - \\alpha h / 2`).

Two-by-two systems :math:`D^\\alpha y + A y + B z = f`,
:math:`D^\\alpha z + C y + D z = g` use ``ns3`` / ``ns4`` analogously. All
solvers take their first step from the order-two starting value and then
march with the full history sum (``O(N^2)`` work).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from fraccal.errors import DomainError, SchemeMismatchError, SingularStepError, SizeError
from fraccal.specfun import gamma_real
from fraccal.weights import DEFAULT_POLICY, SchemeKind, TailPolicy, build_scheme

RealFunction = Callable[[float], float]


# {{{ problems


@dataclass(frozen=True)
class CaputoProblem:
    """Scalar relaxation equation ``D^alpha y + L y = f``, ``y(0) = y0``."""

    alpha: float
    L: float
    f: RealFunction
    y0: float
    exact: RealFunction | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class SystemProblem:
    """Linear system ``D^alpha y + A y + B z = f``, ``D^alpha z + C y + D z = g``."""

    alpha: float
    A: float
    B: float
    C: float
    D: float
    f: RealFunction
    g: RealFunction
    y0: float
    z0: float
    exact_y: RealFunction | None = None
    exact_z: RealFunction | None = None
    name: str = "custom"

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class Trajectory:
    """Numerical solution on the uniform grid ``x_n = n h``, ``n = 0..N``."""

    h: float
    u: np.ndarray = field(repr=False)
    v: np.ndarray | None = field(default=None, repr=False)
    scheme: str = ""
    solver: str = ""

    def __post_init__(self) -> None:
        if self.v is not None and self.v.shape != self.u.shape:
            raise SizeError("both components must have the same length")

    @property
    def N(self) -> int:
        return self.u.size - 1

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.N + 1)

    def to_csv(
        self,
        exact: RealFunction | None = None,
        exact_v: RealFunction | None = None,
    ) -> str:
        """Columns ``x,u[,v],exact[,err]`` with 17 significant digits.

        For systems the exact/error columns refer to the ``u`` component
        (and ``exact_v,err_v`` are appended when *exact_v* is given).
        """
        cols = ["x", "u"]
        data = [self.x, self.u]
        if self.v is not None:
            cols.append("v")
            data.append(self.v)
        if exact is not None:
            ex = np.array([exact(xi) for xi in self.x])
            cols += ["exact", "err"]
            data += [ex, np.abs(self.u - ex)]
        if exact_v is not None and self.v is not None:
            ex = np.array([exact_v(xi) for xi in self.x])
            cols += ["exact_v", "err_v"]
            data += [ex, np.abs(self.v - ex)]

        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for row in zip(*data):
            buf.write(",".join(f"{value:.17g}" for value in row) + "\n")
        return buf.getvalue()


def max_error(t: Trajectory, exact: RealFunction, *, component: str = "u") -> float:
    """Maximum of ``|u_n - exact(x_n)|`` over the whole grid, ``n = 0..N``."""
    values = t.u if component == "u" else t.v
    if values is None:
        raise ValueError(f"trajectory has no component {component!r}")
    ex = np.array([exact(xi) for xi in t.x])
    return float(np.max(np.abs(values - ex)))


# }}}


# {{{ helpers


def _grid(N: int) -> tuple[float, int]:
    if N < 1:
        raise SizeError(f"need at least one step, got N = {N}")
    return 1.0 / N, N


def _schemes(
    kind: SchemeKind, alpha: float, N: int, policy: TailPolicy
) -> Iterator[tuple[int, np.ndarray]]:
    for n in range(2, N + 1):
        yield n, build_scheme(kind, alpha, n, N, policy).coeffs


def _check_kind(kind: SchemeKind | str, *, shifted: bool, solver: str) -> SchemeKind:
    kind = SchemeKind.parse(kind)
    if kind.shifted != shifted:
        want = "shifted (x_n - alpha h / 2)" if shifted else "non-shifted (x_n)"
        got = "shifted" if kind.shifted else "non-shifted"
        raise SchemeMismatchError(
            f"solver {solver} needs a {want} scheme, but {kind.value!r} is {got}"
        )
    return kind


def _history_slice(c: np.ndarray, u: np.ndarray, n: int) -> float:
    # sum_{k=1}^{n} c_k u_{n-k}
    return float(c[1:] @ u[:n][::-1])


# }}}


# {{{ scalar


def first_step_scalar(problem: CaputoProblem, h: float) -> float:
    """Order-two starting value at ``x = h`` from the one-step L1 formula."""
    a = problem.alpha
    g = gamma_real(2.0 - a)
    ha = h**a
    denom = 1.0 + g * problem.L * ha
    if denom == 0.0:
        raise SingularStepError("starting step is singular", step=1)
    return (problem.y0 + g * ha * problem.f(h)) / denom


def solve_ns1(
    problem: CaputoProblem,
    scheme: SchemeKind | str,
    N: int,
    policy: TailPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """March a non-shifted scheme: ``(lambda_0 + L h^a) u_n = h^a f_n - history``."""
    kind = _check_kind(scheme, shifted=False, solver="ns1")
    h, N = _grid(N)
    a = problem.alpha
    ha = h**a

    u = np.empty(N + 1)
    u[0] = problem.y0
    u[1] = first_step_scalar(problem, h)
    for n, c in _schemes(kind, a, N, policy):
        denom = c[0] + problem.L * ha
        if denom == 0.0:
            raise SingularStepError(f"ns1 step {n} is singular", step=n)
        u[n] = (ha * problem.f(n * h) - _history_slice(c, u, n)) / denom

    return Trajectory(h=h, u=u, scheme=kind.value, solver="ns1")


def solve_ns2(
    problem: CaputoProblem,
    scheme: SchemeKind | str,
    N: int,
    policy: TailPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """March a shifted scheme at ``x_n - alpha h / 2``.

    The solution value at the shifted point is interpolated linearly,
    ``y_{n - a/2} ~ (a/2) u_{n-1} + (1 - a/2) u_n``, and ``f`` is evaluated
    directly at the shifted point.
    """
    kind = _check_kind(scheme, shifted=True, solver="ns2")
    h, N = _grid(N)
    a = problem.alpha
    ha = h**a
    L = problem.L

    u = np.empty(N + 1)
    u[0] = problem.y0
    u[1] = first_step_scalar(problem, h)
    for n, c in _schemes(kind, a, N, policy):
        denom = c[0] + L * (1.0 - a / 2.0) * ha
        if denom == 0.0:
            raise SingularStepError(f"ns2 step {n} is singular", step=n)
        xs = (n - a / 2.0) * h
        rhs = ha * problem.f(xs) - 0.5 * a * L * ha * u[n - 1] - _history_slice(c, u, n)
        u[n] = rhs / denom

    return Trajectory(h=h, u=u, scheme=kind.value, solver="ns2")


# }}}


# {{{ systems


def _solve2x2(
    a11: float, a12: float, a21: float, a22: float, s: float, q: float, step: int
) -> tuple[float, float]:
    det = a11 * a22 - a12 * a21
    if det == 0.0 or not math.isfinite(det):
        raise SingularStepError(f"2x2 step matrix is singular at step {step}", step=step)
    return (a22 * s - a12 * q) / det, (-a21 * s + a11 * q) / det


def first_step_system(problem: SystemProblem, h: float) -> tuple[float, float]:
    """Order-two starting values ``(u_1, v_1)`` from the one-step L1 formula."""
    a = problem.alpha
    ha = h**a
    s0 = 1.0 / gamma_real(2.0 - a)
    s = ha * problem.f(h) + s0 * problem.y0
    q = ha * problem.g(h) + s0 * problem.z0
    return _solve2x2(
        s0 + problem.A * ha, problem.B * ha, problem.C * ha, s0 + problem.D * ha,
        s, q, step=1,
    )


def _system_start(problem: SystemProblem, N: int) -> tuple[float, np.ndarray, np.ndarray]:
    h, N = _grid(N)
    u = np.empty(N + 1)
    v = np.empty(N + 1)
    u[0], v[0] = problem.y0, problem.z0
    u[1], v[1] = first_step_system(problem, h)
    return h, u, v


def solve_ns3(
    problem: SystemProblem,
    scheme: SchemeKind | str,
    N: int,
    policy: TailPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """Non-shifted scheme for the 2x2 system, one linear solve per step."""
    kind = _check_kind(scheme, shifted=False, solver="ns3")
    a = problem.alpha
    h, u, v = _system_start(problem, N)
    ha = h**a
    A, B, C, D = problem.A, problem.B, problem.C, problem.D

    for n, c in _schemes(kind, a, N, policy):
        x = n * h
        s = ha * problem.f(x) - _history_slice(c, u, n)
        q = ha * problem.g(x) - _history_slice(c, v, n)
        u[n], v[n] = _solve2x2(c[0] + A * ha, B * ha, C * ha, c[0] + D * ha, s, q, n)

    return Trajectory(h=h, u=u, v=v, scheme=kind.value, solver="ns3")


def solve_ns4(
    problem: SystemProblem,
    scheme: SchemeKind | str,
    N: int,
    policy: TailPolicy = DEFAULT_POLICY,
) -> Trajectory:
    """Shifted scheme for the 2x2 system, one linear solve per step."""
    kind = _check_kind(scheme, shifted=True, solver="ns4")
    a = problem.alpha
    h, u, v = _system_start(problem, N)
    ha = h**a
    r = 1.0 - a / 2.0
    A, B, C, D = problem.A, problem.B, problem.C, problem.D

    for n, c in _schemes(kind, a, N, policy):
        xs = (n - a / 2.0) * h
        s = ha * (problem.f(xs) - 0.5 * a * (A * u[n - 1] + B * v[n - 1])) - _history_slice(c, u, n)
        q = ha * (problem.g(xs) - 0.5 * a * (C * u[n - 1] + D * v[n - 1])) - _history_slice(c, v, n)
        u[n], v[n] = _solve2x2(
            c[0] + A * ha * r, B * ha * r, C * ha * r, c[0] + D * ha * r, s, q, n
        )

    return Trajectory(h=h, u=u, v=v, scheme=kind.value, solver="ns4")


# }}}
