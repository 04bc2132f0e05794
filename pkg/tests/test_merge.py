"""Unit tests for the slab-merge engine on both problem kinds."""

import random

import pytest

from okakit.cousin import Evaluable, QuadratureSpec, morera_residual
from okakit.cuboids import Cuboid
from okakit.division import CoordinateSubspace
from okakit.errors import NotHolomorphicDifference, NotInIdeal, PoleTooCloseToSeam
from okakit.merge import (
    ChiProblem,
    PoleTerm,
    PrincipalPartData,
    extract_principal_coefficient,
    ideal_witness,
    local_solution,
    seam_difference,
    series_evaluable,
    solve_chain,
    verify_solution,
)
from okakit.series import constant, evaluate_complex, make_series, monomial, variable


def pp(*poles):
    """Principal-part datum from (position, residue) pairs, n = 1."""
    return PrincipalPartData(
        tuple(PoleTerm(1, constant(0, c), constant(0, p)) for p, c in poles)
    )


def three_slab_problem(**kw):
    params = dict(
        kind="cousin1",
        cuboid=Cuboid(((-3.0, 3.0),), ((-0.6, 0.6),)),
        breakpoints=(-1.0, 1.0),
        data=(
            pp((-2.0 + 0.1j, 1.5 - 0.5j)),
            pp((0.2 + 0j, 0.7 + 0.2j), (-0.4 - 0.2j, -1.1 + 0.3j)),
            pp((2.1 - 0.3j, 0.9 + 0j)),
        ),
        delta=0.3,
        tol=1e-8,
    )
    params.update(kw)
    return ChiProblem(**params)


def extension_problem(**kw):
    # n = 2, S = {z1 = 0}, target g(z2) = z2^2 - 1, two slabs
    params = dict(
        kind="extension",
        cuboid=Cuboid(((-0.5, 0.5), (-2.0, 2.0)), ((-0.5, 0.5), (-0.5, 0.5))),
        breakpoints=(0.0,),
        codim=1,
        target=make_series(2, {(0, 2): 1, (0, 0): -1}),
        delta=0.2,
        tol=1e-8,
    )
    params.update(kw)
    return ChiProblem(**params)


class TestProblemValidation:
    def test_slab_count_mismatch(self):
        with pytest.raises(ValueError):
            three_slab_problem(data=(pp(), pp()))

    def test_asymmetric_im_rejected(self):
        with pytest.raises(ValueError):
            three_slab_problem(cuboid=Cuboid(((-3.0, 3.0),), ((-0.2, 0.6),)))

    def test_extension_target_must_avoid_constrained_axes(self):
        with pytest.raises(ValueError):
            extension_problem(target=monomial(2, (1, 0)))

    def test_default_seam_margin(self):
        prob = three_slab_problem(delta=None)
        assert prob.seam_margin() == pytest.approx(0.05 * 2.0)


class TestLocalSolution:
    def test_cousin1_local_matches_principal_part(self):
        prob = three_slab_problem()
        loc = local_solution(prob, 1)
        z = (0.5 + 0.1j,)
        want = (0.7 + 0.2j) / (z[0] - 0.2) + (-1.1 + 0.3j) / (z[0] - (-0.4 - 0.2j))
        assert abs(loc(z) - want) < 1e-12

    def test_pole_outside_slab_rejected(self):
        prob = three_slab_problem(data=(pp((0.5, 1.0)), pp(), pp()))
        with pytest.raises(PoleTooCloseToSeam):
            local_solution(prob, 0)

    def test_pole_within_margin_rejected(self):
        prob = three_slab_problem(data=(pp((-1.1, 1.0)), pp(), pp()))
        with pytest.raises(PoleTooCloseToSeam):
            local_solution(prob, 0)

    def test_extension_local_is_cylinder_extension(self):
        prob = extension_problem()
        loc = local_solution(prob, 0)
        z = (0.2 + 0.1j, -1.0 + 0.2j)
        assert abs(loc(z) - (z[1] ** 2 - 1)) < 1e-12


class TestSeamDifference:
    def test_holomorphic_difference_accepted(self):
        overlap = Cuboid(((-0.2, 0.2),), ((-0.5, 0.5),))
        a = Evaluable(lambda z: z[0] ** 2)
        b = Evaluable(lambda z: z[0] - 1)
        diff = seam_difference(a, b, overlap)
        assert abs(diff((0.1,)) - (0.01 - 0.1 + 1)) < 1e-12

    def test_antiholomorphic_difference_rejected(self):
        overlap = Cuboid(((-0.2, 0.2),), ((-0.5, 0.5),))
        a = Evaluable(lambda z: z[0].conjugate())
        b = Evaluable(lambda z: 0j)
        with pytest.raises(NotHolomorphicDifference) as err:
            seam_difference(a, b, overlap)
        assert err.value.residual > 1e-3


class TestIdealWitness:
    def test_witnesses_recombine(self):
        sub = CoordinateSubspace(2, 1)
        h = make_series(2, {(1, 0): 1, (1, 2): -3})
        ws = ideal_witness(h, sub)
        assert len(ws) == 1
        assert (ws[0] * variable(2, 0)) == h

    def test_non_member_rejected(self):
        sub = CoordinateSubspace(2, 1)
        with pytest.raises(NotInIdeal):
            ideal_witness(monomial(2, (0, 1)), sub)


class TestCousin1EndToEnd:
    def test_three_slab_solution_verifies(self):
        prob = three_slab_problem()
        sols = solve_chain(prob)
        assert len(sols) == 1
        report = sols[0].report
        assert report["pass"]
        assert max(report["patch_morera"]) <= 1e-8
        assert max(e["error"] for e in report["principal_part_errors"]) <= 1e-6

    def test_solution_equals_local_plus_correction(self):
        prob = three_slab_problem()
        sol = solve_chain(prob, verify=False)[0]
        z = (0.5 + 0.1j,)
        local = local_solution(prob, 1)
        corr = sol.corrections[1]
        assert abs(sol.solution(z) - local(z) - corr(z)) < 1e-12

    def test_residue_extraction_oracle(self):
        f = Evaluable(lambda z: (1.5 - 0.5j) / (z[0] - 0.3) + z[0] ** 2)
        got = extract_principal_coefficient(f, 0.3, 1, radius=0.2)
        assert abs(got - (1.5 - 0.5j)) < 1e-12

    def test_verification_detects_residue_change(self):
        """Altering a prescribed residue by 10% shows up in the report."""
        prob = three_slab_problem()
        sol = solve_chain(prob, verify=False)[0]
        wrong = three_slab_problem(data=(
            pp((-2.0 + 0.1j, 1.1 * (1.5 - 0.5j))),
            prob.data[1],
            prob.data[2],
        ))
        report = verify_solution(sol, wrong)
        assert not report["pass"]
        bad = max(e["error"] for e in report["principal_part_errors"])
        assert bad == pytest.approx(0.1 * abs(1.5 - 0.5j), rel=1e-4)

    def test_verification_detects_antiholomorphic_noise(self):
        prob = three_slab_problem()
        sol = solve_chain(prob, verify=False)[0]
        clean = sol.corrections[1]
        sol.corrections[1] = Evaluable(
            lambda z: clean.fn(z) + 1e-3 * z[0].conjugate(), clean.domain
        )
        report = verify_solution(sol, prob)
        assert not report["pass"]
        assert report["patch_morera"][1] > 1e-5

    def test_merge_order_gauge_freedom(self):
        """ltr and rtl give different but equally valid solutions: their
        difference is holomorphic on the whole chain region."""
        prob = three_slab_problem()
        a = solve_chain(prob, order="ltr", verify=False)[0]
        b = solve_chain(prob, order="rtl", verify=False)[0]
        diff = a.solution - b.solution
        assert morera_residual(diff, a.region, grid=8, nodes=20) < 2e-8
        # yet the two solutions genuinely differ
        assert abs(diff((0.0 + 0j,))) > 1e-6

    def test_two_slab_minimal(self):
        prob = ChiProblem(
            kind="cousin1",
            cuboid=Cuboid(((-2.0, 2.0),), ((-0.5, 0.5),)),
            breakpoints=(0.0,),
            data=(pp((-1.0, 1.0)), pp((0.9 + 0.1j, 2.0 - 1.0j))),
            delta=0.3,
        )
        report = solve_chain(prob)[0].report
        assert report["pass"]


class TestExtensionEndToEnd:
    def test_unperturbed_extension(self):
        prob = extension_problem()
        sols = solve_chain(prob)
        assert len(sols) == 1
        report = sols[0].report
        assert report["pass"]
        assert report["subspace_sup_error"] <= 1e-8

    def test_perturbed_locals_still_match_on_subspace(self):
        # perturb each slab's extension inside the ideal (z1)
        prob = extension_problem()
        g = prob.target
        bump0 = make_series(2, {(1, 0): 1, (1, 1): -2})
        bump1 = make_series(2, {(2, 0): 1, (1, 2): 1})
        prob2 = extension_problem(local_overrides=(g + bump0, g + bump1))
        sols = solve_chain(prob2)
        report = sols[0].report
        assert report["pass"], report
        assert report["subspace_sup_error"] <= 1e-8
        # the merged solution really differs from the plain extension off S
        sol = sols[0].solution
        z = (0.3 + 0.2j, 1.5 + 0.1j)
        assert abs(sol(z) - evaluate_complex(g, z)) > 1e-4

    def test_disconnected_chains_solved_separately(self):
        # shift the z1 box away from 0: no face meets S, three singleton chains
        prob = extension_problem(
            cuboid=Cuboid(((0.3, 0.8), (-2.0, 2.0)), ((-0.2, 0.2), (-0.5, 0.5))),
            breakpoints=(-0.5, 0.5),
            local_overrides=None,
        )
        sols = solve_chain(prob, verify=False)
        assert len(sols) == 3
        for sol in sols:
            assert sol.chain.start == sol.chain.stop


class TestDeterminism:
    def test_repeat_solve_identical(self):
        prob = three_slab_problem()
        a = solve_chain(prob, verify=False)[0]
        b = solve_chain(prob, verify=False)[0]
        rng = random.Random(0)
        for _ in range(10):
            z = (complex(rng.uniform(-2.9, 2.9), rng.uniform(-0.5, 0.5)),)
            assert a.solution(z) == b.solution(z)
