from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccal.approx import estimate_order
from fraccal.errors import DomainError, SchemeMismatchError, SingularStepError, SizeError
from fraccal.problems import (
    build_custom,
    constant,
    example1,
    example2,
    example3,
    get_problem,
    parse_custom,
)
from fraccal.solver import (
    CaputoProblem,
    SystemProblem,
    Trajectory,
    first_step_scalar,
    max_error,
    solve_ns1,
    solve_ns2,
    solve_ns3,
    solve_ns4,
)
from fraccal.specfun import gamma_real
from fraccal.weights import SchemeKind, TailPolicy, build_scheme


def _errors(problem, solve, scheme, Ns, component="u", policy=TailPolicy()):
    out = []
    for N in Ns:
        t = solve(problem, scheme, N, policy)
        if isinstance(problem, SystemProblem):
            exact = problem.exact_y if component == "u" else problem.exact_z
        else:
            exact = problem.exact
        out.append((1.0 / N, max_error(t, exact, component=component)))
    return out


# {{{ scalar


def test_problem_validation() -> None:
    with pytest.raises(DomainError):
        CaputoProblem(alpha=1.0, L=1.0, f=math.sin, y0=0.0)
    with pytest.raises(DomainError):
        SystemProblem(alpha=0.0, A=1, B=0, C=0, D=1, f=math.sin, g=math.sin, y0=0, z0=0)


def test_first_step_is_second_order() -> None:
    p = example2(0.5)
    errs = [(h, abs(first_step_scalar(p, h) - p.exact(h))) for h in (0.01, 0.005, 0.0025)]
    assert min(estimate_order(errs)) > 1.9


@pytest.mark.parametrize(
    ("scheme", "expected"),
    [
        (SchemeKind.L1, lambda a: 2.0 - a),
        (SchemeKind.L1_MOD, lambda a: 2.0),
        (SchemeKind.L1_MOD_TRUNC, lambda a: 2.0),
    ],
)
def test_ns1_orders(scheme: SchemeKind, expected) -> None:
    a = 0.4
    orders = estimate_order(_errors(example2(a), solve_ns1, scheme, [160, 320, 640, 1280]))
    # the corrected schemes approach order two from below
    assert orders == sorted(orders)
    assert orders[-1] == pytest.approx(expected(a), abs=0.06)


@pytest.mark.parametrize("scheme", [SchemeKind.GL_LAST2, SchemeKind.GL_LAST2_TRUNC])
def test_ns2_nonzero_initial_data(scheme: SchemeKind) -> None:
    orders = estimate_order(_errors(example2(0.6), solve_ns2, scheme, [80, 160, 320]))
    assert orders[-1] == pytest.approx(2.0, abs=0.1)


def test_ns2_plain_gl_needs_zero_initial_data() -> None:
    # example1 has y(0) = y'(0) = 0: second order
    orders = estimate_order(_errors(example1(0.5), solve_ns2, SchemeKind.GL, [80, 160, 320]))
    assert orders[-1] == pytest.approx(2.0, abs=0.1)
    # with y(0) = 1 the same scheme does not converge
    err = _errors(example2(0.5), solve_ns2, SchemeKind.GL, [80])[0][1]
    assert err > 1e-2


def test_constant_solution_is_reproduced() -> None:
    p = constant(0.5)
    for solve, scheme in ((solve_ns1, "l1"), (solve_ns1, "l1_mod"), (solve_ns2, "gl_last2")):
        t = solve(p, scheme, 64)
        assert max_error(t, p.exact) < 1e-12


def test_scheme_mismatch() -> None:
    p = example1(0.5)
    with pytest.raises(SchemeMismatchError, match="shift"):
        solve_ns1(p, "gl_last2", 10)
    with pytest.raises(SchemeMismatchError, match="shift"):
        solve_ns2(p, "l1", 10)
    with pytest.raises(SizeError):
        solve_ns1(p, "l1", 0)


def test_singular_step() -> None:
    # L = -c_0 / h^a cancels the diagonal of the implicit step
    a, N = 0.5, 4
    ha = (1.0 / N) ** a
    c0 = build_scheme(SchemeKind.L1, a, 2).coeffs[0]
    p = CaputoProblem(alpha=a, L=-c0 / ha, f=lambda x: 0.0, y0=1.0)
    with pytest.raises(SingularStepError) as info:
        solve_ns1(p, "l1", N)
    assert info.value.step in (1, 2)


# }}}


# {{{ systems


def test_system_reduces_to_scalar() -> None:
    # decoupled system (B = C = 0) gives the scalar solution in each component
    a = 0.5
    p = example2(a)
    sys_p = SystemProblem(
        alpha=a, A=1.0, B=0.0, C=0.0, D=1.0, f=p.f, g=p.f, y0=p.y0, z0=p.y0,
        exact_y=p.exact, exact_z=p.exact,
    )
    for scalar, system, scheme in ((solve_ns1, solve_ns3, "l1_mod"), (solve_ns2, solve_ns4, "gl_last2")):
        s = scalar(p, scheme, 40)
        t = system(sys_p, scheme, 40)
        np.testing.assert_allclose(t.u, s.u, rtol=1e-13)
        np.testing.assert_allclose(t.v, s.u, rtol=1e-13)


@pytest.mark.parametrize(
    ("solve", "scheme"),
    [(solve_ns3, "l1_mod_trunc"), (solve_ns4, "gl_last2"), (solve_ns4, "gl_last2_trunc")],
)
@pytest.mark.parametrize("component", ["u", "v"])
def test_system_orders(solve, scheme: str, component: str) -> None:
    errs = _errors(example3(0.5), solve, scheme, [160, 320, 640, 1280], component=component)
    orders = estimate_order(errs)
    assert orders[-1] == pytest.approx(2.0, abs=0.08)
    assert orders[-1] >= orders[0] - 0.02


def test_system_singular() -> None:
    # with A = D = 0 and B = C = s0 / h^a the starting matrix has equal rows
    h = 0.5
    s0 = 1.0 / gamma_real(1.5)
    q = SystemProblem(alpha=0.5, A=0, B=s0 / h**0.5, C=s0 / h**0.5, D=0,
                      f=math.exp, g=math.exp, y0=0.0, z0=0.0)
    with pytest.raises(SingularStepError) as info:
        solve_ns3(q, "l1", 2)
    assert info.value.step == 1


# }}}


# {{{ trajectories and problems


def test_trajectory_csv() -> None:
    p = example3(0.5)
    t = solve_ns4(p, "gl_last2", 8)
    text = t.to_csv(p.exact_y, p.exact_z)
    lines = text.splitlines()
    assert lines[0] == "x,u,v,exact,err,exact_v,err_v"
    assert len(lines) == 10
    row = [float(v) for v in lines[-1].split(",")]
    assert row[0] == 1.0
    assert row[1] == t.u[-1]
    assert row[4] == pytest.approx(abs(t.u[-1] - math.exp(2.0)), rel=1e-15)

    assert Trajectory(h=0.5, u=np.zeros(3)).to_csv().splitlines()[0] == "x,u"
    with pytest.raises(SizeError):
        Trajectory(h=0.5, u=np.zeros(3), v=np.zeros(2))
    with pytest.raises(ValueError):
        max_error(Trajectory(h=0.5, u=np.zeros(3)), math.exp, component="v")


def test_examples_satisfy_their_equations() -> None:
    # forcing minus L y must be the Caputo derivative of the exact solution
    from fraccal.approx import caputo_quadrature_oracle

    a, x = 0.6, 0.7
    p = example2(a)
    dy = caputo_quadrature_oracle(lambda t: math.cos(t) - math.sin(t) + (t * t * (3 * math.log(t) + 1) if t > 0 else 0.0), a, x)
    assert p.f(x) - p.exact(x) == pytest.approx(dy, abs=1e-9)

    q = example3(a)
    dy = caputo_quadrature_oracle(lambda t: 2.0 * math.exp(2.0 * t), a, x)
    assert q.f(x) - q.exact_y(x) - 2.0 * q.exact_z(x) == pytest.approx(dy, abs=1e-9)


def test_custom_problems() -> None:
    cfg = parse_custom("# relaxation\nL = 2\nsolution = x2 + power:2.5\n")
    p = build_custom(cfg, 0.5)
    assert isinstance(p, CaputoProblem)
    t = solve_ns1(p, "l1_mod", 160)
    assert max_error(t, p.exact) < 1e-4

    cfg = parse_custom("A=1\nB=0.5\nC=0\nD=2\nsolution_y=exp\nsolution_z=cos\n")
    q = get_problem("custom", 0.3, cfg)
    assert isinstance(q, SystemProblem)
    t = solve_ns4(q, "gl_last2", 160)
    assert max_error(t, q.exact_z, component="v") < 1e-4


def test_custom_problem_errors() -> None:
    with pytest.raises(ValueError, match="line 1"):
        parse_custom("L 2")
    with pytest.raises(ValueError, match="missing key"):
        build_custom({"a": "1"}, 0.5)
    with pytest.raises(ValueError, match="unknown solution"):
        build_custom({"l": "1", "solution": "tan"}, 0.5)
    with pytest.raises(ValueError):
        get_problem("custom", 0.5)
    with pytest.raises(ValueError, match="unknown problem"):
        get_problem("example9", 0.5)


@given(
    st.floats(min_value=0.1, max_value=0.9),
    st.floats(min_value=0.0, max_value=3.0),
    st.sampled_from(["one", "x", "x2", "exp", "sin", "cos"]),
)
@settings(max_examples=25, deadline=None)
def test_manufactured_problems_converge(alpha: float, L: float, sol: str) -> None:
    p = build_custom({"l": str(L), "solution": sol}, alpha)
    t = solve_ns2(p, "gl_last2", 200)
    assert max_error(t, p.exact) < 1e-3


# }}}
