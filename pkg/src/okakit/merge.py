"""Merging local solutions across a slab partition.

Two problem kinds share one engine.  For principal-part (Cousin-I) data the
local solution on a slab is the finite sum of its pole terms; for
holomorphic extension from a coordinate subspace it is the cylinder
extension of the target (possibly perturbed within the ideal).  At every
seam the difference of the two sides is holomorphic on the margin strip
(for extension: a polynomial multiple of the subspace generators, with
explicit cofactors), gets split by the seam contour integrals, and the two
halves are absorbed into the respective sides.  Chains of slabs pairwise
connected on the subspace are solved independently, left to right by
default.
"""

from __future__ import annotations

import os
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .cousin import Evaluable, QuadratureSpec, SplitGeometry, cousin_split, morera_residual
from .cuboids import ConnectivityChain, Cuboid, SlabPartition, connected_chains, make_partition
from .division import CoordinateSubspace, ideal_cofactors
from .errors import (
    InvalidPartition,
    NotHolomorphicDifference,
    NotInIdeal,
    PoleTooCloseToSeam,
)
from .series import TruncatedSeries, evaluate_complex


def series_evaluable(f: TruncatedSeries, domain: Cuboid | None = None) -> Evaluable:
    return Evaluable(lambda z: evaluate_complex(f, z), domain, label="polynomial")


# -- problem data --------------------------------------------------------


@dataclass(frozen=True)
class PoleTerm:
    """c(z') * (z_n - p(z'))^(-k) with polynomial coefficient and locus."""

    order: int
    coeff: TruncatedSeries  # dim n-1
    locus: TruncatedSeries  # dim n-1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("pole order must be >= 1")


@dataclass(frozen=True)
class PrincipalPartData:
    terms: tuple[PoleTerm, ...]

    def evaluable(self, domain: Cuboid | None = None) -> Evaluable:
        terms = self.terms

        def fn(z):
            zp, zn = z[:-1], z[-1]
            acc = 0j
            for t in terms:
                c = evaluate_complex(t.coeff, zp)
                p = evaluate_complex(t.locus, zp)
                acc += c / (zn - p) ** t.order
            return acc

        return Evaluable(fn, domain, label="principal part")


@dataclass(frozen=True)
class ChiProblem:
    kind: str  # "cousin1" | "extension"
    cuboid: Cuboid
    breakpoints: tuple[float, ...] = ()
    data: tuple[PrincipalPartData, ...] | None = None
    codim: int | None = None
    target: TruncatedSeries | None = None
    local_overrides: tuple[TruncatedSeries, ...] | None = None
    delta: float | None = None
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("cousin1", "extension"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        ilo, ihi = self.cuboid.im[-1]
        if abs(ilo + ihi) > 1e-12:
            raise ValueError("last-axis Im interval must be symmetric about 0")
        if self.kind == "cousin1":
            if self.data is None or len(self.data) != len(self.breakpoints) + 1:
                raise ValueError("cousin1 needs one principal-part datum per slab")
        else:
            if self.codim is None or self.target is None:
                raise ValueError("extension needs a codimension and a target")
            n = self.cuboid.ndim
            for axis in range(self.codim):
                if self.target.depends_on(axis):
                    raise ValueError("target must not depend on the constrained variables")
            if self.local_overrides is not None and len(self.local_overrides) != len(self.breakpoints) + 1:
                raise ValueError("need one local override per slab")

    @property
    def ndim(self) -> int:
        return self.cuboid.ndim

    @property
    def partition(self) -> SlabPartition:
        return make_partition(self.cuboid, self.breakpoints)

    @property
    def subspace(self) -> CoordinateSubspace | None:
        if self.kind == "extension":
            return CoordinateSubspace(self.ndim, self.codim)
        return None

    @property
    def theta(self) -> float:
        return self.cuboid.im[-1][1]

    def seam_margin(self) -> float:
        if self.delta is not None:
            return self.delta
        lo, hi = self.cuboid.re[-1]
        edges = [lo, *self.breakpoints, hi]
        widths = [b - a for a, b in zip(edges, edges[1:])]
        return 0.05 * min(widths)

    def slab_poly(self, alpha: int) -> TruncatedSeries | None:
        if self.kind != "extension":
            return None
        if self.local_overrides is not None:
            return self.local_overrides[alpha]
        return self.target


# -- local solutions -----------------------------------------------------


def _locus_positions(term: PoleTerm, base: Cuboid | None) -> list[complex]:
    if term.locus.dim == 0:
        return [evaluate_complex(term.locus, ())]
    pts = [base.midpoint()] if base is not None else [()]
    return [evaluate_complex(term.locus, p) for p in pts]


def local_solution(problem: ChiProblem, alpha: int) -> Evaluable:
    """The slab's own solution: its principal-part sum, or the cylinder
    extension of the target (or the supplied override)."""
    partition = problem.partition
    slab = partition.slabs[alpha]
    if problem.kind == "cousin1":
        datum = problem.data[alpha]
        delta = problem.seam_margin()
        base = None if problem.ndim == 1 else Cuboid(slab.re[:-1], slab.im[:-1])
        rlo, rhi = slab.re[-1]
        for term in datum.terms:
            for p in _locus_positions(term, base):
                if not (rlo - 1e-12 <= p.real <= rhi + 1e-12) or abs(p.imag) > problem.theta:
                    raise PoleTooCloseToSeam(
                        f"pole at {p} lies outside slab {alpha}"
                    )
                for edge in (rlo, rhi):
                    if abs(p.real - edge) < delta:
                        raise PoleTooCloseToSeam(
                            f"pole at {p} within margin {delta} of a slab edge"
                        )
        return datum.evaluable(slab)
    poly = problem.slab_poly(alpha)
    return series_evaluable(poly, slab)


def seam_difference(a: Evaluable, b: Evaluable, overlap: Cuboid, tol: float = 1e-8,
                    grid: int = 3, nodes: int = 24) -> Evaluable:
    """a - b, asserted holomorphic on the overlap via the Morera residual.

    The dense default rule keeps the quadrature noise of nearby poles (data
    may sit just outside the seam strip) well below the tolerance.
    """
    diff = a - b
    residual = morera_residual(diff, overlap, grid=grid, nodes=nodes)
    if residual > tol:
        raise NotHolomorphicDifference(
            f"seam difference residual {residual:.3e} exceeds {tol:.3e}", residual=residual
        )
    return diff


def ideal_witness(h: TruncatedSeries, subspace: CoordinateSubspace) -> list[TruncatedSeries]:
    """Cofactors a_j with h = sum a_j z_j, exact on the polynomial form."""
    cof = ideal_cofactors(h, subspace)
    rem = cof.remainder
    if h.backend.exact:
        if not rem.is_zero():
            raise NotInIdeal("difference does not vanish on the subspace")
    elif not all(h.backend.is_negligible(v, h.max_abs_coeff()) for v in rem.coeffs.values()):
        raise NotInIdeal("difference does not vanish on the subspace")
    return list(cof.cofactors)


# -- chain states --------------------------------------------------------


@dataclass
class _Branch:
    local: Evaluable
    local_poly: TruncatedSeries | None
    corrections: tuple[tuple[int | None, Evaluable], ...] = ()

    def correction_value(self, z, kind: str) -> complex:
        acc = 0j
        for axis, e in self.corrections:
            v = e.fn(z)
            if kind == "extension":
                v *= z[axis]
            acc += v
        return acc

    def value(self, z, kind: str) -> complex:
        return self.local.fn(z) + self.correction_value(z, kind)


@dataclass
class ChainState:
    """Piecewise representation of a (partially) merged solution."""

    kind: str
    branches: list[_Branch]
    seams: list[float]  # Re positions separating consecutive branches

    def branch_index(self, zn_re: float) -> int:
        return bisect_right(self.seams, zn_re)

    def value(self, z) -> complex:
        z = tuple(complex(v) for v in z)
        return self.branches[self.branch_index(z[-1].real)].value(z, self.kind)

    def evaluable(self, domain: Cuboid | None = None) -> Evaluable:
        return Evaluable(lambda z: self.value(z), domain, label="merged solution")

    def branch_correction(self, idx: int, domain: Cuboid | None = None) -> Evaluable:
        branch = self.branches[idx]
        kind = self.kind
        return Evaluable(lambda z: branch.correction_value(z, kind), domain, label="correction")


def _singleton_state(problem: ChiProblem, alpha: int) -> ChainState:
    return ChainState(
        problem.kind,
        [_Branch(local_solution(problem, alpha), problem.slab_poly(alpha))],
        [],
    )


def merge_pair(left: ChainState, right: ChainState, geom: SplitGeometry,
               problem: ChiProblem) -> ChainState:
    """Merge two adjacent partial solutions across the seam of ``geom``.

    The seam densities are split with the Cousin contours; the left halves
    are added (times the ideal generators, for extension problems) to every
    left branch and the right halves to every right branch, so the two
    sides agree on the seam strip.
    """
    lb = left.branches[-1]
    rb = right.branches[0]
    densities: list[tuple[int | None, Evaluable]] = []
    if problem.kind == "extension":
        witnesses = ideal_witness(rb.local_poly - lb.local_poly, problem.subspace)
        for axis, w in enumerate(witnesses):
            w_eval = series_evaluable(w)

            def fn(z, w_eval=w_eval, axis=axis):
                acc = w_eval.fn(z)
                for ax, e in rb.corrections:
                    if ax == axis:
                        acc += e.fn(z)
                for ax, e in lb.corrections:
                    if ax == axis:
                        acc -= e.fn(z)
                return acc

            densities.append((axis, Evaluable(fn, geom.overlap)))
    else:
        diff = seam_difference(
            Evaluable(lambda z: rb.value(z, "cousin1"), geom.overlap),
            Evaluable(lambda z: lb.value(z, "cousin1"), geom.overlap),
            geom.overlap,
            tol=max(problem.tol, 100 * _quad_floor(problem)),
        )
        densities.append((None, diff))
    new_left = [replace(b, corrections=b.corrections) for b in left.branches]
    new_right = [replace(b, corrections=b.corrections) for b in right.branches]
    for axis, density in densities:
        b_left, b_right = cousin_split(density, geom, problem.quad)
        for b in new_left:
            b.corrections = b.corrections + ((axis, b_left),)
        for b in new_right:
            b.corrections = b.corrections + ((axis, b_right),)
    return ChainState(problem.kind, new_left + new_right, left.seams + [geom.s] + right.seams)


def _quad_floor(problem: ChiProblem) -> float:
    # crude scale for seam-difference tolerance on merged inputs
    return 1e-12


# -- solving and verification -------------------------------------------


@dataclass
class ChiSolution:
    chain: ConnectivityChain
    state: ChainState
    solution: Evaluable
    patch_locals: list[Evaluable]
    corrections: list[Evaluable]
    region: Cuboid
    report: dict | None = None


def _chain_geometry(problem: ChiProblem, partition: SlabPartition,
                    chain: ConnectivityChain, alpha: int) -> SplitGeometry:
    lo = partition.slabs[chain.start].re[-1][0]
    hi = partition.slabs[chain.stop].re[-1][1]
    base = None
    if problem.ndim > 1:
        base = Cuboid(problem.cuboid.re[:-1], problem.cuboid.im[:-1])
    return SplitGeometry(
        s=partition.seam(alpha),
        delta=problem.seam_margin(),
        theta=problem.theta,
        re_lo=lo,
        re_hi=hi,
        base=base,
    )


def _solve_one_chain(problem: ChiProblem, partition: SlabPartition,
                     chain: ConnectivityChain, order: str) -> ChiSolution:
    states = [_singleton_state(problem, alpha) for alpha in chain.indices]
    seams = list(range(chain.start, chain.stop))  # seam alpha joins slab alpha, alpha+1
    if order == "ltr":
        acc = states[0]
        for k, alpha in enumerate(seams):
            geom = _chain_geometry(problem, partition, chain, alpha)
            acc = merge_pair(acc, states[k + 1], geom, problem)
    elif order == "rtl":
        acc = states[-1]
        for k, alpha in zip(range(len(seams) - 1, -1, -1), reversed(seams)):
            geom = _chain_geometry(problem, partition, chain, alpha)
            acc = merge_pair(states[k], acc, geom, problem)
    else:
        raise ValueError(f"unknown merge order {order!r}")
    lo = partition.slabs[chain.start].re[-1][0]
    hi = partition.slabs[chain.stop].re[-1][1]
    region = problem.cuboid.with_last_re(lo, hi)
    patch_locals = [local_solution(problem, alpha) for alpha in chain.indices]
    corrections = [
        acc.branch_correction(k, partition.slabs[alpha])
        for k, alpha in enumerate(chain.indices)
    ]
    return ChiSolution(
        chain=chain,
        state=acc,
        solution=acc.evaluable(region),
        patch_locals=patch_locals,
        corrections=corrections,
        region=region,
    )


def chain_decomposition(problem: ChiProblem) -> list[ConnectivityChain]:
    partition = problem.partition
    if problem.kind == "extension":
        return connected_chains(partition, problem.subspace)
    return [ConnectivityChain(0, partition.count - 1)]


def solve_chain(problem: ChiProblem, order: str = "ltr", verify: bool = True) -> list[ChiSolution]:
    """Solve every maximal connected chain of the partition; one solution each."""
    partition = problem.partition
    chains = chain_decomposition(problem)
    workers = int(os.environ.get("OKAKIT_THREADS", "1") or "1")
    if workers > 1 and len(chains) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sols = list(pool.map(lambda c: _solve_one_chain(problem, partition, c, order), chains))
    else:
        sols = [_solve_one_chain(problem, partition, c, order) for c in chains]
    if verify:
        for sol in sols:
            sol.report = verify_solution(sol, problem)
    return sols


def extract_principal_coefficient(f: Evaluable, pole: complex, order: int,
                                  radius: float, zp: tuple = (), samples: int = 64) -> complex:
    """(1/2 pi i) * circle integral of f(z)*(z_n - pole)^(order-1) dz_n."""
    thetas = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    ring = pole + radius * np.exp(1j * thetas)
    acc = 0j
    for zn in ring:
        acc += f.fn(zp + (complex(zn),)) * (zn - pole) ** (order - 1) * (zn - pole)
    return complex(acc / samples)


def _pole_positions(problem: ChiProblem, chain: ConnectivityChain) -> list[tuple[int, PoleTerm, complex]]:
    out = []
    for alpha in chain.indices:
        for term in problem.data[alpha].terms:
            if term.locus.dim != 0:
                continue  # contour extraction implemented for constant loci
            out.append((alpha, term, evaluate_complex(term.locus, ())))
    return out


def verify_solution(sol: ChiSolution, problem: ChiProblem, grid: int = 3,
                    s_samples: int = 101) -> dict:
    """Checkable form of the solution property.

    cousin1 (n = 1 pole loci): principal coefficients re-extracted by
    contour integrals around each pole must match the prescribed ones, and
    the per-patch corrections must pass the Morera residual.  extension:
    the solution restricted to the subspace must match the target on a
    sample grid, and the solution itself must be holomorphic per patch.
    """
    partition = problem.partition
    tol = problem.tol
    report: dict = {"kind": problem.kind, "chain": [sol.chain.start, sol.chain.stop]}
    morera_vals = []
    for k, alpha in enumerate(sol.chain.indices):
        slab = partition.slabs[alpha]
        morera_vals.append(morera_residual(sol.corrections[k], slab, grid=grid))
    report["patch_morera"] = morera_vals
    ok = all(v <= tol for v in morera_vals)
    if problem.kind == "cousin1":
        delta = problem.seam_margin()
        poles = _pole_positions(problem, sol.chain)
        errors = []
        for alpha, term, p in poles:
            others = [q for _, t2, q in poles if t2 is not term]
            sep = min((abs(p - q) for q in others), default=np.inf)
            radius = min(delta / 2, 0.45 * sep)
            if problem.theta > 0:
                radius = min(radius, max(problem.theta - abs(p.imag), delta / 4))
            got = extract_principal_coefficient(sol.solution, p, term.order, radius)
            want = evaluate_complex(term.coeff, ())
            errors.append({"slab": alpha, "order": term.order,
                           "pole": [p.real, p.imag], "error": abs(got - want)})
        report["principal_part_errors"] = errors
        ok = ok and all(e["error"] <= max(tol, 1e-6) for e in errors)
    else:
        n, q = problem.ndim, problem.codim
        lo = partition.slabs[sol.chain.start].re[-1][0]
        hi = partition.slabs[sol.chain.stop].re[-1][1]
        mids = problem.cuboid.midpoint()
        sup = 0.0
        for t in np.linspace(lo, hi, s_samples):
            z = tuple(0j for _ in range(q)) + mids[q:n - 1] + (complex(t, 0.0),)
            sup = max(sup, abs(sol.solution.fn(z) - evaluate_complex(problem.target, z)))
        report["subspace_sup_error"] = sup
        ok = ok and sup <= tol
    report["pass"] = bool(ok)
    return report
