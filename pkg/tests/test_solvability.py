import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurpick.exceptions import NotHermitian
from schurpick.pickdata import InterpolationNode, ProblemData, build_pick_system, extract_jet
from schurpick.solvability import assess, check_admissible, psd_rank, stein_residual
from schurpick.testing import random_blaschke, random_nodes

from conftest import fixture_path


class TestCheckAdmissible:
    def test_bad_modulus(self):
        rep = check_admissible(ProblemData.load(fixture_path("bad_modulus.json")))
        assert not rep.admissible
        assert any("node 0" in m for m in rep.messages)

    def test_duplicate(self):
        nd = InterpolationNode(1, 0, (1,), 1.0)
        rep = check_admissible(ProblemData((nd, nd)))
        assert not rep.admissible
        assert any("coincide" in m for m in rep.messages)

    def test_z2_ok(self, z2_data):
        assert check_admissible(z2_data).admissible

    def test_non_hermitian_block(self):
        # the (0, 0) entry of the block is c_1, which must be real at t = 1
        nd = InterpolationNode(1, 1, (1, 2 + 1j, 1), 1.0)
        rep = check_admissible(ProblemData((nd,)))
        assert not rep.admissible
        assert any("Hermitian" in m for m in rep.messages)


class TestPsdRank:
    def test_positive_definite(self):
        psd, rank, lam = psd_rank(np.array([[2.0, 1.0], [1.0, 1.0]]))
        assert psd and rank == 2
        assert lam == pytest.approx((3 - np.sqrt(5)) / 2, abs=1e-15)

    def test_zero(self):
        assert psd_rank(np.zeros((1, 1))) == (True, 0, 0)

    def test_indefinite(self):
        psd, _, lam = psd_rank(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert not psd and lam == pytest.approx(-1)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            psd_rank(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestSteinResidual:
    def test_z2(self, z2_data):
        s = build_pick_system(z2_data)
        # hand computation: P - T*PT = [[0,-2],[-2,-4]] = E*E - M*M
        np.testing.assert_allclose(s.P - s.T.conj().T @ s.P @ s.T, [[0, -2], [-2, -4]], atol=1e-14)
        assert stein_residual(s) <= 1e-12

    def test_single(self, single_sys):
        assert stein_residual(single_sys) <= 1e-15

    def test_perturbed(self, z2_data):
        s = build_pick_system(z2_data)
        P = s.P.copy()
        P[0, 1] += 1e-3
        # only the (0,1) entry of P - T*PT moves, and by exactly the perturbation
        assert stein_residual(dataclasses.replace(s, P=P)) == pytest.approx(1e-3, rel=1e-6)


class TestAssess:
    def test_solvable_fixture(self, single_node):
        rep = assess(single_node)
        assert rep.solvable and rep.rank == 1
        assert rep.to_dict()["solvable"] is True

    def test_singular_marginal(self, singular_data):
        rep = assess(singular_data)
        assert rep.solvable and rep.rank == 1
        assert any("marginal" in m for m in rep.messages)

    def test_not_psd(self):
        rep = assess(ProblemData.load(fixture_path("not_psd.json")))
        assert rep.admissible and not rep.psd and not rep.solvable
        assert rep.min_eigenvalue == pytest.approx(-0.9)

    def test_inadmissible_stops_early(self):
        rep = assess(ProblemData.load(fixture_path("bad_modulus.json")))
        assert not rep.admissible and rep.rank == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_extracted_data_is_psd(seed):
    rng = np.random.default_rng(seed)
    B = random_blaschke(rng, int(rng.integers(1, 6)))
    k = int(rng.integers(1, 4))
    data = ProblemData([extract_jet(B, t, int(rng.integers(0, 3))) for t in random_nodes(rng, k)])
    assert assess(data).psd


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.01, 10))
def test_stein_residual_ignores_gamma(seed, delta):
    rng = np.random.default_rng(seed)
    B = random_blaschke(rng, int(rng.integers(1, 6)))
    k = int(rng.integers(1, 4))
    nodes = [extract_jet(B, t, int(rng.integers(0, 3))) for t in random_nodes(rng, k)]
    base = stein_residual(build_pick_system(ProblemData(nodes)))
    raised = stein_residual(build_pick_system(ProblemData([nd.inflated(delta) for nd in nodes])))
    assert abs(raised - base) <= 1e-12 * (1 + delta)
