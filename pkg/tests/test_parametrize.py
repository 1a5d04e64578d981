import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurpick import (
    InterpolationError,
    NotSchurClass,
    ProblemData,
    RationalFunction,
    ReconstructionMismatch,
    SchurParameter,
    SingularPick,
    UniqueSolutionWarning,
    blaschke,
    build_pick_system,
    coefficient_matrix_at,
    coefficient_matrix_rational,
    extract_jet,
    rat_eval,
    rat_taylor,
    singular_solution,
    solve,
)
from schurpick.jsonio import dumps
from schurpick.parametrize import ResolventSolution, check_schur, entry_jets, pole_moduli
from schurpick.testing import random_system

from conftest import FIXTURES, disk_points

SQ2 = math.sqrt(2)


def single_node_closed_form(z):
    """Hand-derived coefficient matrix for t=1, c0=1, gamma=1."""
    z = np.asarray(z, dtype=complex)
    s0 = 1 / (2 - z)
    s12 = SQ2 * (1 - z) / (2 - z)
    return np.stack([np.stack([s0, s12], -1), np.stack([s12, z / (2 - z)], -1)], -2)


def jet_error(w, nodes):
    err = 0.0
    for nd in nodes:
        c = np.asarray(nd.c[: 2 * nd.n + 1])
        j = np.asarray(rat_taylor(w, nd.t, 2 * nd.n)) if isinstance(w, RationalFunction) else w.taylor_many(nd.t, 2 * nd.n)
        err = max(err, float((np.abs(j - c) / np.maximum(1.0, np.abs(c))).max()))
    return err


def coefficient_form_condition(w, nodes):
    """Rounding amplification of a pole of ``w`` at distance ``d`` from a node of order ``n``."""
    eps = np.finfo(float).eps
    roots = w.den.roots()
    return max((eps / abs(r - nd.t) ** (2 * nd.n + 1) for r in roots for nd in nodes), default=0.0)


class TestCoefficientMatrixAt:
    def test_single_node(self, single_sys, rng):
        for z in disk_points(rng, 8):
            np.testing.assert_allclose(coefficient_matrix_at(single_sys, z), single_node_closed_form(z), atol=1e-13)

    def test_singular_rejected(self, singular_data):
        with pytest.raises(SingularPick):
            coefficient_matrix_at(build_pick_system(singular_data), 0.1)

    def test_jets_match_closed_form(self, single_sys):
        # Taylor coefficients at z0 of 1/(2-z) are 1/(2-z0)^(k+1)
        z0 = 0.3 - 0.2j
        J = entry_jets(single_sys, np.array([z0]), 4)[:, 0]
        np.testing.assert_allclose(J[:, 0, 0], [1 / (2 - z0) ** (k + 1) for k in range(5)], rtol=1e-12)


class TestCoefficientMatrixRational:
    def test_single_node(self, single_S, rng):
        z = disk_points(rng, 32, 1.0)
        np.testing.assert_allclose(single_S(z), single_node_closed_form(z), atol=1e-12)

    def test_degree(self, single_S):
        assert single_S.degree == 1
        np.testing.assert_allclose(single_S.den.roots(), [2.0], atol=1e-12)

    def test_validation_at_pole(self, single_sys):
        with pytest.raises(ReconstructionMismatch):
            coefficient_matrix_rational(single_sys, validation_points=[2.0])

    def test_json_shape(self, single_S):
        out = single_S.to_json()
        assert set(out) == {"s0", "s1", "s2", "s", "den"}
        assert json.loads(dumps(out))["den"] == json.loads(dumps(single_S.den.coeffs))

    def test_inner_on_suite(self, suite):
        t = np.exp(2j * np.pi * np.arange(512) / 512)
        for rs in suite:
            sys_ = build_pick_system(rs.data)
            S = coefficient_matrix_rational(sys_)
            St = S(t)
            defect = np.abs(np.conj(np.swapaxes(St, -1, -2)) @ St - np.eye(2)).max()
            assert defect <= 1e-8
            assert S.degree <= sys_.N

    def test_poles_outside_disk(self, suite):
        for rs in suite[:10]:
            assert pole_moduli(build_pick_system(rs.data)).min() > 1

    def test_corner_vanishes_at_origin(self, suite):
        for rs in suite[:10]:
            S = coefficient_matrix_rational(build_pick_system(rs.data))
            assert abs(rat_eval(S.s, 0)) <= 1e-10

    def test_unimodular_corner_at_nodes(self, suite):
        for rs in suite[:20]:
            S = coefficient_matrix_rational(build_pick_system(rs.data))
            for nd in rs.data.nodes:
                assert abs(abs(rat_eval(S.s, nd.t)) - 1) <= 1e-9

    def test_offdiagonal_zero_order(self, suite):
        for rs in suite[:20]:
            S = coefficient_matrix_rational(build_pick_system(rs.data))
            for nd in rs.data.nodes:
                for f in (S.s1, S.s2):
                    j = np.asarray(rat_taylor(f, nd.t, nd.n + 1))
                    scale = max(1.0, np.abs(j).max())
                    assert np.abs(j[: nd.n + 1]).max() <= 1e-8 * scale
                    assert abs(j[nd.n + 1]) >= 1e-6 * scale


class TestSingularSolution:
    def test_identity(self, singular_data):
        w = singular_solution(build_pick_system(singular_data))
        z = np.linspace(-0.9, 0.9, 7) * np.exp(0.4j)
        np.testing.assert_allclose(w(z), z, atol=1e-10)

    def test_constant(self):
        sys_ = build_pick_system(ProblemData.load(FIXTURES / "constant_singular.json"))
        assert sys_.rank == 1
        w = singular_solution(sys_)
        np.testing.assert_allclose(w(np.array([0, 0.5j, -0.7])), 1, atol=1e-10)
        assert max(0, w.num.degree, w.den.degree) == 0

    @pytest.mark.parametrize(
        "zeros, nodes",
        [
            ([0.5], [(1, 0), (1j, 0), (-1, 0)]),
            ([0.3j, -0.4], [(1, 1), (-1j, 0)]),
            ([0.2, 0.6 - 0.1j], [(np.exp(0.5j), 0), (-1, 0), (-1j, 0), (1j, 0)]),
        ],
    )
    def test_recovers_blaschke(self, zeros, nodes):
        B = blaschke(zeros, np.exp(0.7j))
        data = ProblemData(tuple(extract_jet(B, t, n) for t, n in nodes))
        sys_ = build_pick_system(data)
        assert sys_.singular and sys_.rank == len(zeros)
        w = singular_solution(sys_)
        z = 0.8 * np.exp(2j * np.pi * np.arange(16) / 16)
        np.testing.assert_allclose(w(z), B(z), atol=1e-9)


class TestSchurParameter:
    def test_constant(self):
        p = SchurParameter.constant(0.6j)
        assert p.kind == "constant" and p.function(0.3) == 0.6j

    def test_constant_too_large(self):
        with pytest.raises(NotSchurClass):
            SchurParameter.constant(1.1)

    @pytest.mark.parametrize(
        "text, value",
        [
            ("const:0", 0),
            ("const:0.3,0.4", 0.3 + 0.4j),
            ("blaschke:0", 0.5),
            ("blaschke:0.5,0@3.141592653589793", 0),
            ("blaschke:0.5@3.141592653589793", 0),
            ("blaschke:-0.5", 0.8),
            ("blaschke:0;0@0,1", 0.25j),
        ],
    )
    def test_parse(self, text, value):
        # evaluated at z = 0.5
        assert abs(SchurParameter.parse(text).function(0.5) - value) <= 1e-12

    @pytest.mark.parametrize("text", ["nope", "const:", "const:a,b", "const:1,2,3", "const:2", "shape:1", "blaschke:1.5"])
    def test_parse_errors(self, text):
        with pytest.raises(InterpolationError):
            SchurParameter.parse(text)

    def test_parse_file(self):
        p = SchurParameter.parse(f"file:{FIXTURES / 'param_z.json'}")
        assert p.kind == "rational"
        assert abs(p.function(0.25j) - 0.25j) <= 1e-15

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            SchurParameter.parse(f"file:{tmp_path / 'absent.json'}")

    def test_rational_checked(self):
        with pytest.raises(NotSchurClass):
            SchurParameter.rational(RationalFunction([0, 2]))
        with pytest.raises(NotSchurClass):
            check_schur(RationalFunction([1], [0.5, -1]))


class TestSolve:
    @pytest.mark.parametrize(
        "param, expected",
        [
            ("const:0", lambda z: 1 / (2 - z)),
            ("const:1", lambda z: np.ones_like(z)),
            ("blaschke:0", lambda z: (1 + 2 * z) / (2 + z)),
        ],
    )
    def test_single_node(self, single_sys, param, expected, rng):
        z = disk_points(rng, 16, 1.0)
        w = solve(single_sys, SchurParameter.parse(param))
        np.testing.assert_allclose(w(z), expected(z), atol=1e-11)

    def test_symbolic_route_agrees(self, single_sys, single_S, rng):
        p = SchurParameter.constant(0.3 + 0.4j)
        z = disk_points(rng, 16)
        np.testing.assert_allclose(solve(single_sys, p, S=single_S)(z), solve(single_sys, p)(z), atol=1e-11)

    def test_parameter_required(self, single_sys):
        with pytest.raises(InterpolationError):
            solve(single_sys)

    def test_singular_warns(self, singular_data):
        sys_ = build_pick_system(singular_data)
        with pytest.warns(UniqueSolutionWarning):
            w = solve(sys_, SchurParameter.constant(0.5))
        assert abs(w(0.5) - 0.5) <= 1e-10
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            solve(sys_)

    def test_resolvent_matches_rational(self, suite, rng):
        p = SchurParameter.blaschke_product([0.5, -0.3j], np.exp(1j))
        for rs in suite[:10]:
            sys_ = build_pick_system(rs.data)
            z = disk_points(rng, 8)
            np.testing.assert_allclose(ResolventSolution(sys_, p)(z), solve(sys_, p)(z), atol=1e-9)

    def test_suite_interpolates(self, suite):
        params = [SchurParameter.constant(0), SchurParameter.constant(0.3 + 0.4j), SchurParameter.blaschke_product([0])]
        for rs in suite:
            sys_ = build_pick_system(rs.data)
            for p in params:
                assert jet_error(solve(sys_, p), rs.data.nodes) <= 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 2 * np.pi))
def test_resolvent_solution_interpolates(seed, r, phi):
    rs = random_system(np.random.default_rng(seed))
    w = ResolventSolution(build_pick_system(rs.data), SchurParameter.constant(r * np.exp(1j * phi)))
    assert jet_error(w, rs.data.nodes) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=0.9))
def test_rational_solution_interpolates(seed, a):
    rs = random_system(np.random.default_rng(seed))
    w = solve(build_pick_system(rs.data), SchurParameter.blaschke_product([a]))
    # a pole of w within d of a node of order n limits the jets to about eps / d^(2n+1)
    if coefficient_form_condition(w, rs.data.nodes) > 1e-9:
        return
    assert jet_error(w, rs.data.nodes) <= 1e-6
    assert np.abs(w(np.exp(2j * np.pi * np.arange(256) / 256))).max() <= 1 + 1e-8


def check_node_invariants(nd, s_t, j1, j2):
    n = nd.n
    assert abs(abs(s_t) - 1) <= 1e-9
    scale = max(1.0, np.abs(j1).max(), np.abs(j2).max())
    assert max(np.abs(j1[: n + 1]).max(), np.abs(j2[: n + 1]).max()) <= 1e-8 * scale
    assert min(abs(j1[n + 1]), abs(j2[n + 1])) >= 1e-6 * scale
    # the (n+1)! between derivatives and Taylor coefficients cancels
    rhs = (-1) ** n * nd.t ** (2 * n + 2) * np.conj(s_t) * j1[n + 1] * np.conj(nd.c[0])
    assert abs(np.conj(j2[n + 1]) - rhs) <= 1e-8 * abs(j2[n + 1])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coefficient_matrix_invariants(seed):
    rs = random_system(np.random.default_rng(seed))
    sys_ = build_pick_system(rs.data)
    S = coefficient_matrix_rational(sys_)
    St = S(np.exp(2j * np.pi * np.arange(512) / 512))
    assert np.abs(np.conj(np.swapaxes(St, -1, -2)) @ St - np.eye(2)).max() <= 1e-8
    rational_ok = coefficient_form_condition(S, rs.data.nodes) <= 1e-9
    for nd in rs.data.nodes:
        J = entry_jets(sys_, np.array([nd.t]), nd.n + 1)[:, 0]
        check_node_invariants(nd, J[0, 1, 1], J[:, 1, 0], J[:, 0, 1])
        if rational_ok:
            j1 = np.asarray(rat_taylor(S.s1, nd.t, nd.n + 1))
            j2 = np.asarray(rat_taylor(S.s2, nd.t, nd.n + 1))
            check_node_invariants(nd, rat_eval(S.s, nd.t), j1, j2)
