"""Unit tests for seam quadrature, the additive split, and the holomorphy
residual."""

import cmath
import random

import pytest

from okakit.cousin import (
    Evaluable,
    QuadratureSpec,
    SplitGeometry,
    cauchy_segment_integral,
    constant_evaluable,
    cousin_split,
    morera_residual,
    overlap_grid,
)
from okakit.cuboids import Cuboid
from okakit.errors import OnContour


def default_geom(**kw):
    params = dict(s=0.0, delta=0.25, theta=0.5, re_lo=-1.5, re_hi=1.5)
    params.update(kw)
    return SplitGeometry(**params)


def segment_log(a, b, z):
    """Closed form of the Cauchy integral of the constant density 1."""
    # single log of the ratio: branch-safe for a straight segment
    return cmath.log((b - z) / (a - z)) / (2j * cmath.pi)


class TestGeometry:
    def test_segment_and_slabs(self):
        g = default_geom()
        a, b = g.segment
        assert a == -0.75j and b == 0.75j
        assert g.left_slab.re == ((-1.5, 0.25),)
        assert g.right_slab.re == ((-0.25, 1.5),)
        assert g.overlap.re == ((-0.25, 0.25),)

    def test_seam_must_sit_inside_extents(self):
        with pytest.raises(ValueError):
            default_geom(s=1.4)
        with pytest.raises(ValueError):
            default_geom(delta=-0.1)

    def test_base_extends_dimension(self):
        base = Cuboid(((-1.0, 1.0),), ((-1.0, 1.0),))
        g = default_geom(base=base)
        assert g.ndim == 2
        assert g.left_slab.ndim == 2


class TestSegmentIntegral:
    def test_constant_density_oracle(self):
        g = default_geom()
        a, b = g.segment
        one = constant_evaluable(1.0)
        for z in (0.5 + 0.1j, -0.4 - 0.3j, 1.0j * 0.9 + 0.3):
            got = cauchy_segment_integral(one, g, (z,))
            assert abs(got - segment_log(a, b, z)) < 1e-12

    def test_linear_density_oracle(self):
        # integral of zeta/(zeta - z) = (b - a)/(2 pi i) + z * log-term
        g = default_geom()
        a, b = g.segment
        ident = Evaluable(lambda z: z[-1])
        for z in (0.6 - 0.2j, -0.5 + 0.4j):
            want = (b - a) / (2j * cmath.pi) + z * segment_log(a, b, z)
            got = cauchy_segment_integral(ident, g, (z,))
            assert abs(got - want) < 1e-12

    def test_linearity(self):
        g = default_geom()
        rng = random.Random(2)
        f = Evaluable(lambda z: z[-1] ** 2 - 1)
        h = Evaluable(lambda z: 3 * z[-1] + 0.5j)
        for _ in range(5):
            z = (complex(rng.uniform(0.3, 1.0), rng.uniform(-0.4, 0.4)),)
            lhs = cauchy_segment_integral(f + h, g, z)
            rhs = cauchy_segment_integral(f, g, z) + cauchy_segment_integral(h, g, z)
            assert abs(lhs - rhs) < 1e-12

    def test_on_contour_rejected(self):
        g = default_geom()
        with pytest.raises(OnContour):
            cauchy_segment_integral(constant_evaluable(1.0), g, (0.0j,))

    def test_adaptive_matches_fixed(self):
        g = default_geom()
        f = Evaluable(lambda z: cmath.exp(z[-1]))
        z = (0.7 + 0.2j,)
        fixed = cauchy_segment_integral(f, g, z, QuadratureSpec(panels=24))
        adaptive = cauchy_segment_integral(f, g, z, QuadratureSpec(tol=1e-12))
        assert abs(fixed - adaptive) < 1e-10


class TestCousinSplit:
    def test_jump_identity_polynomial(self):
        g = default_geom()
        phi = Evaluable(lambda z: z[-1] ** 3 - 2 * z[-1] + 1j)
        p1, p2 = cousin_split(phi, g)
        worst = max(abs(p1(z) - p2(z) - phi(z)) for z in overlap_grid(g))
        assert worst < 1e-8

    def test_jump_identity_constant(self):
        g = default_geom()
        p1, p2 = cousin_split(constant_evaluable(1.0), g)
        worst = max(abs(p1(z) - p2(z) - 1) for z in overlap_grid(g))
        assert worst < 1e-8

    def test_refinement_shrinks_residual(self):
        g = default_geom()
        phi = Evaluable(lambda z: (z[-1] - 0.2j) ** 4)
        spec = QuadratureSpec()
        p1, p2 = cousin_split(phi, g, spec)
        coarse = max(abs(p1(z) - p2(z) - phi(z)) for z in overlap_grid(g))
        q1, q2 = cousin_split(phi, g, spec.refined(4))
        fine = max(abs(q1(z) - q2(z) - phi(z)) for z in overlap_grid(g))
        assert fine < coarse / 10

    def test_branches_holomorphic_on_their_slabs(self):
        g = default_geom()
        phi = Evaluable(lambda z: z[-1] ** 2 + 0.3)
        p1, p2 = cousin_split(phi, g)
        # shrink slightly so test rectangles stay off the contours
        left = Cuboid(((-1.4, 0.1),), ((-0.4, 0.4),))
        right = Cuboid(((-0.1, 1.4),), ((-0.4, 0.4),))
        assert morera_residual(p1, left, grid=3) < 1e-8
        assert morera_residual(p2, right, grid=3) < 1e-8

    def test_linearity_of_split(self):
        g = default_geom()
        f = Evaluable(lambda z: z[-1] ** 2)
        h = Evaluable(lambda z: 1j * z[-1])
        f1, f2 = cousin_split(f, g)
        h1, h2 = cousin_split(h, g)
        s1, s2 = cousin_split(f + h, g)
        for z in overlap_grid(g, nx=3, ny=3):
            assert abs(s1(z) - f1(z) - h1(z)) < 1e-10
            assert abs(s2(z) - f2(z) - h2(z)) < 1e-10

    def test_adaptive_split_agrees(self):
        g = default_geom()
        phi = Evaluable(lambda z: z[-1] ** 2 - 0.5)
        p1, p2 = cousin_split(phi, g, QuadratureSpec(panels=24))
        a1, a2 = cousin_split(phi, g, QuadratureSpec(tol=1e-12))
        for z in [(0.1 + 0.2j,), (-0.6 - 0.1j,), (0.9 + 0.3j,)]:
            assert abs(p1(z) - a1(z)) < 1e-8

    def test_evaluations_stay_off_contours(self):
        """Points near the seam are fine: the branch uses the pushed contour."""
        g = default_geom()
        phi = Evaluable(lambda z: z[-1])
        p1, p2 = cousin_split(phi, g)
        # on-seam evaluation must not raise
        z = (0.0 + 0.1j,)
        assert abs(p1(z) - p2(z) - phi(z)) < 1e-8

    def test_two_dimensional_density(self):
        base = Cuboid(((-1.0, 1.0),), ((-0.2, 0.2),))
        g = default_geom(base=base)
        phi = Evaluable(lambda z: z[0] * z[1] + z[0] ** 2)
        p1, p2 = cousin_split(phi, g)
        worst = max(abs(p1(z) - p2(z) - phi(z)) for z in overlap_grid(g))
        assert worst < 1e-8


class TestMorera:
    def test_entire_functions_pass(self):
        region = Cuboid(((-1.0, 1.0),), ((-1.0, 1.0),))
        for fn in (lambda z: z[0] ** 5, lambda z: cmath.exp(z[0]), lambda z: 1.0 + 0j):
            assert morera_residual(Evaluable(fn), region) < 1e-10

    def test_conjugate_detected_with_stokes_area(self):
        # closed integral of conj(z) dz equals 2i * enclosed area
        region = Cuboid(((-1.0, 1.0),), ((-1.0, 1.0),))
        grid = 4
        got = morera_residual(Evaluable(lambda z: z[0].conjugate()), region, grid=grid)
        tile_area = (2.0 / grid) * (2.0 / grid)
        assert got == pytest.approx(2 * tile_area, rel=1e-9)

    def test_small_perturbation_scales(self):
        region = Cuboid(((-1.0, 1.0),), ((-1.0, 1.0),))
        eps = 1e-3
        f = Evaluable(lambda z: z[0] ** 2 + eps * z[0].conjugate())
        base = morera_residual(Evaluable(lambda z: z[0].conjugate()), region)
        assert morera_residual(f, region) == pytest.approx(eps * base, rel=1e-6)

    def test_degenerate_axes_skipped(self):
        region = Cuboid(((0.0, 0.0), (-1.0, 1.0)), ((0.0, 0.0), (-1.0, 1.0)))
        f = Evaluable(lambda z: z[0].conjugate() + z[1] ** 2)
        assert morera_residual(f, region) < 1e-10

    def test_axes_filter(self):
        region = Cuboid(((-1.0, 1.0), (-1.0, 1.0)), ((-1.0, 1.0), (-1.0, 1.0)))
        f = Evaluable(lambda z: z[0].conjugate() + z[1])
        assert morera_residual(f, region, axes=[1]) < 1e-10
        assert morera_residual(f, region, axes=[0]) > 1e-3
