"""Built-in test problems with known exact solutions.

* ``example1`` -- ``D^a y + y = 2 x^{2+a} + Gamma(3+a) x^2``, ``y = 2 x^{2+a}``;
* ``example2`` -- ``D^a y + y = f``, ``y = sin x + cos x + x^3 ln x``
  (nonzero ``y(0)`` and ``y'(0)``);
* ``example3`` -- the 2x2 system with ``y = e^{2x}``, ``z = e^x``;
* ``constant`` -- ``D^a y + y = 1``, ``y = 1`` (smoke test).

Custom problems are read from ``key = value`` files, see :func:`load_custom`.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

from fraccal.approx import caputo_cos, caputo_exp, caputo_power, caputo_sin, caputo_x3lnx
from fraccal.solver import CaputoProblem, SystemProblem
from fraccal.specfun import gamma_real

Problem = CaputoProblem | SystemProblem


def example1(alpha: float) -> CaputoProblem:
    g = gamma_real(3.0 + alpha)

    def f(x: float) -> float:
        return 2.0 * x ** (2.0 + alpha) + g * x * x

    return CaputoProblem(
        alpha=alpha, L=1.0, f=f, y0=0.0,
        exact=lambda x: 2.0 * x ** (2.0 + alpha),
        name="example1",
    )


def _example2_exact(x: float) -> float:
    lnx = 0.0 if x == 0.0 else x**3 * math.log(x)
    return math.sin(x) + math.cos(x) + lnx


def example2(alpha: float) -> CaputoProblem:
    def f(x: float) -> float:
        return (
            _example2_exact(x)
            + caputo_sin(alpha, x)
            + caputo_cos(alpha, x)
            + caputo_x3lnx(alpha, x)
        )

    return CaputoProblem(
        alpha=alpha, L=1.0, f=f, y0=1.0, exact=_example2_exact, name="example2"
    )


def example3(alpha: float) -> SystemProblem:
    def f(x: float) -> float:
        return 2.0 * math.exp(x) + math.exp(2.0 * x) + caputo_exp(alpha, x, 2.0)

    def g(x: float) -> float:
        return 4.0 * math.exp(x) + 3.0 * math.exp(2.0 * x) + caputo_exp(alpha, x)

    return SystemProblem(
        alpha=alpha, A=1.0, B=2.0, C=3.0, D=4.0, f=f, g=g, y0=1.0, z0=1.0,
        exact_y=lambda x: math.exp(2.0 * x),
        exact_z=math.exp,
        name="example3",
    )


def constant(alpha: float) -> CaputoProblem:
    return CaputoProblem(
        alpha=alpha, L=1.0, f=lambda x: 1.0, y0=1.0, exact=lambda x: 1.0,
        name="constant",
    )


BUILTIN: dict[str, Callable[[float], Problem]] = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
    "constant": constant,
}


# {{{ custom problems

#: Solutions with closed-form Caputo derivatives available to custom files.
#: Each entry maps a name to ``(y, D^a y)``.
SOLUTION_CATALOG: dict[str, tuple[Callable[[float], float], Callable[[float, float], float]]] = {
    "zero": (lambda x: 0.0, lambda a, x: 0.0),
    "one": (lambda x: 1.0, lambda a, x: 0.0),
    "x": (lambda x: x, lambda a, x: caputo_power(a, x, 1.0)),
    "x2": (lambda x: x * x, lambda a, x: caputo_power(a, x, 2.0)),
    "exp": (math.exp, lambda a, x: caputo_exp(a, x)),
    "exp2x": (lambda x: math.exp(2.0 * x), lambda a, x: caputo_exp(a, x, 2.0)),
    "sin": (math.sin, caputo_sin),
    "cos": (math.cos, caputo_cos),
    "x3lnx": (lambda x: 0.0 if x == 0 else x**3 * math.log(x), caputo_x3lnx),
}


def _solution(spec: str, alpha: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Parse ``name[+name...]`` into the solution and its Caputo derivative.

    The special name ``power:P`` denotes ``x^P``.
    """
    parts = []
    for raw in spec.split("+"):
        name = raw.strip().lower()
        if name.startswith("power:"):
            p = float(name.split(":", 1)[1])
            parts.append((
                lambda x, p=p: x**p,
                lambda x, p=p: 0.0 if x == 0 else caputo_power(alpha, x, p),
            ))
        elif name in SOLUTION_CATALOG:
            y, dy = SOLUTION_CATALOG[name]
            parts.append((y, lambda x, dy=dy: 0.0 if x == 0 else dy(alpha, x)))
        else:
            known = ", ".join([*SOLUTION_CATALOG, "power:P"])
            raise ValueError(f"unknown solution {name!r} (known: {known})")

    def y(x: float) -> float:
        return math.fsum(p[0](x) for p in parts)

    def dy(x: float) -> float:
        return math.fsum(p[1](x) for p in parts)

    return y, dy


def parse_custom(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    config = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        config[key.lower()] = value
    return config


def build_custom(config: dict[str, str], alpha: float) -> Problem:
    """Manufacture a problem from a parsed custom configuration.

    Scalar files give ``L`` and ``solution``; system files give ``A, B, C, D``
    plus ``solution_y`` and ``solution_z``. The forcing is derived from the
    chosen solutions, so the exact solution is always known.
    """
    try:
        if "l" in config:
            L = float(config["l"])
            y, dy = _solution(config.get("solution", "zero"), alpha)
            return CaputoProblem(
                alpha=alpha, L=L, f=lambda x: dy(x) + L * y(x), y0=y(0.0),
                exact=y, name="custom",
            )

        A, B, C, D = (float(config[k]) for k in ("a", "b", "c", "d"))
    except KeyError as exc:
        raise ValueError(f"custom problem is missing key {exc.args[0]!r}") from None

    y, dy = _solution(config.get("solution_y", "zero"), alpha)
    z, dz = _solution(config.get("solution_z", "zero"), alpha)
    return SystemProblem(
        alpha=alpha, A=A, B=B, C=C, D=D,
        f=lambda x: dy(x) + A * y(x) + B * z(x),
        g=lambda x: dz(x) + C * y(x) + D * z(x),
        y0=y(0.0), z0=z(0.0), exact_y=y, exact_z=z, name="custom",
    )


def load_custom(path: str | Path) -> dict[str, str]:
    return parse_custom(Path(path).read_text())


# }}}


def get_problem(name: str, alpha: float, custom: dict[str, str] | None = None) -> Problem:
    if name == "custom":
        if custom is None:
            raise ValueError("custom problem needs a configuration")
        return build_custom(custom, alpha)
    try:
        return BUILTIN[name](alpha)
    except KeyError:
        known = ", ".join([*BUILTIN, "custom"])
        raise ValueError(f"unknown problem {name!r} (known: {known})") from None
