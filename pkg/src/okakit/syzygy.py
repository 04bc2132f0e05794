"""Relations among coordinate functions and among general generators of the
ideal of a coordinate subspace.

A relation is a tuple (f_1,...,f_p) with sum f_j z_j = 0.  The module of
relations is generated by the Koszul-type vectors T_ij (with -z_j in slot i
and z_i in slot j), and every relation decomposes over them by repeatedly
splitting its components along the leading variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .division import split_variable
from .errors import InvalidArity, NotARelation
from .scalars import EXACT, Backend
from .series import (
    TruncatedSeries,
    invert_unit,
    make_series,
    mul,
    scale,
    variable,
    zero,
)


@dataclass(frozen=True)
class SyzygyVector:
    components: tuple[TruncatedSeries, ...]

    def __post_init__(self):
        if not self.components:
            raise InvalidArity("empty syzygy vector")
        ref = self.components[0]
        for c in self.components[1:]:
            if c.dim != ref.dim or c.center != ref.center or c.backend != ref.backend:
                raise InvalidArity("components must share dimension, center, and backend")

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def __add__(self, other: "SyzygyVector") -> "SyzygyVector":
        return SyzygyVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def scaled(self, f: TruncatedSeries) -> "SyzygyVector":
        return SyzygyVector(tuple(mul(f, c) for c in self.components))


@dataclass(frozen=True)
class TrivialSolution:
    """T_ij: -z_j in slot i, z_i in slot j (0-based indices, i < j)."""

    i: int
    j: int
    vector: SyzygyVector


def trivial_solution(i: int, j: int, p: int, dim: int | None = None, backend: Backend = EXACT) -> TrivialSolution:
    if not 0 <= i < j < p:
        raise InvalidArity(f"need 0 <= i < j < p, got i={i}, j={j}, p={p}")
    n = dim if dim is not None else p
    if n < p:
        raise InvalidArity("ambient dimension must be at least the arity")
    comps = []
    for slot in range(p):
        if slot == i:
            comps.append(scale(variable(n, j, backend=backend), -1))
        elif slot == j:
            comps.append(variable(n, i, backend=backend))
        else:
            comps.append(zero(n, backend=backend))
    return TrivialSolution(i, j, SyzygyVector(tuple(comps)))


def trivial_solutions(p: int, dim: int | None = None, backend: Backend = EXACT) -> list[TrivialSolution]:
    """All p(p-1)/2 trivial solutions in lexicographic (i, j) order.

    For p = 1 the trivial solution is 0 by convention, so the list is empty.
    """
    if p < 1:
        raise InvalidArity(f"arity must be positive, got {p}")
    out = []
    for i in range(p):
        for j in range(i + 1, p):
            out.append(trivial_solution(i, j, p, dim=dim, backend=backend))
    return out


def relation_residual(v: SyzygyVector) -> TruncatedSeries:
    """sum_j v_j * z_j; zero iff v is a relation."""
    acc = None
    for j, c in enumerate(v.components):
        zj = variable(c.dim, j, backend=c.backend, center=c.center)
        term = mul(c, zj)
        acc = term if acc is None else acc + term
    return acc


def verify_relation(v: SyzygyVector, eps: float | None = None) -> tuple[bool, TruncatedSeries]:
    residual = relation_residual(v)
    be = v.components[0].backend
    if be.exact:
        return residual.is_zero(), residual
    tol = eps if eps is not None else be.eps
    scale_ = max(max((c.max_abs_coeff() for c in v.components), default=0.0), 1.0)
    ok = all(abs(c) <= tol * scale_ for c in residual.coeffs.values())
    return ok, residual


def decompose_relation(v: SyzygyVector) -> dict[tuple[int, int], TruncatedSeries]:
    """Write a relation among z_1..z_p as sum b_ij T_ij.

    Recursion of the two-step proof: split each component along the leading
    active variable, subtract the matching multiples of T_1j, check that the
    forced first slot vanishes, and recurse on the shorter relation.  Exactly
    p-1 split rounds; coefficient degrees never exceed the input degree.
    """
    p = v.arity
    ref = v.components[0]
    for axis in range(min(p, ref.dim)):
        if not ref.backend.is_zero(ref.center[axis]):
            raise NotARelation("decomposition requires the center to lie on {z_1=...=z_p=0}")
    ok, residual = verify_relation(v)
    if not ok:
        raise NotARelation("input vector is not a relation", residual=residual)
    out: dict[tuple[int, int], TruncatedSeries] = {}
    comps = list(v.components)
    be = ref.backend
    for m in range(p - 1):
        splits = [split_variable(c, m) for c in comps[m:]]
        # slot m after subtracting sum_{j>m} h_j T_mj must vanish identically
        forced = comps[m]
        for offset, (h, _g) in enumerate(splits[1:], start=1):
            j = m + offset
            zj = variable(ref.dim, j, backend=be, center=ref.center)
            forced = forced + mul(h, zj)
            if not h.is_zero():
                out[(m, j)] = h
        if be.exact:
            if not forced.is_zero():
                raise NotARelation("forced slot did not vanish; inconsistent relation", residual=forced)
        else:
            scale_ = max(max((c.max_abs_coeff() for c in v.components), default=0.0), 1.0)
            if not all(abs(c) <= be.eps * scale_ for c in forced.coeffs.values()):
                raise NotARelation("forced slot did not vanish; inconsistent relation", residual=forced)
        comps[m] = zero(ref.dim, backend=be, center=ref.center, order=ref.order)
        for offset, (_h, g) in enumerate(splits[1:], start=1):
            comps[m + offset] = g
    # the surviving last component must vanish: its relation is g * z_p = 0
    last = comps[p - 1]
    if be.exact:
        if not last.is_zero():
            raise NotARelation("terminal component did not vanish", residual=last)
    else:
        scale_ = max(max((c.max_abs_coeff() for c in v.components), default=0.0), 1.0)
        if not all(abs(c) <= be.eps * scale_ for c in last.coeffs.values()):
            raise NotARelation("terminal component did not vanish", residual=last)
    return out


def recombine(coeffs: Mapping[tuple[int, int], TruncatedSeries], p: int, dim: int | None = None,
              backend: Backend = EXACT) -> SyzygyVector:
    """sum b_ij T_ij as a SyzygyVector of arity p."""
    n = dim
    for b in coeffs.values():
        n = b.dim
        backend = b.backend
        break
    if n is None:
        n = p
    comps = [zero(n, backend=backend) for _ in range(p)]
    for (i, j), b in coeffs.items():
        t = trivial_solution(i, j, p, dim=n, backend=backend)
        for slot in range(p):
            comps[slot] = comps[slot] + mul(b, t.vector.components[slot])
    return SyzygyVector(tuple(comps))


def off_axis_decomposition(v: SyzygyVector, order: int) -> dict[tuple[int, int], TruncatedSeries]:
    """Closed-form local decomposition valid when the center has a nonzero
    coordinate among z_1..z_p (so some z_m is a unit there).

    With m the first such index, the coefficients are f_j / z_m on T_mj for
    j > m and -f_j / z_m on T_jm for j < m; the inverse of z_m is expanded
    to ``order``.  Not used by the global algorithm.
    """
    p = v.arity
    ref = v.components[0]
    be = ref.backend
    m = None
    for axis in range(min(p, ref.dim)):
        if not be.is_zero(ref.center[axis]):
            m = axis
            break
    if m is None:
        raise NotARelation("center lies on the subspace; use decompose_relation instead")
    ok, residual = verify_relation(v)
    if not ok:
        raise NotARelation("input vector is not a relation", residual=residual)
    zm = variable(ref.dim, m, backend=be, center=ref.center)
    inv = invert_unit(zm, order)
    out: dict[tuple[int, int], TruncatedSeries] = {}
    for j in range(p):
        if j == m:
            continue
        c = mul(v.components[j], inv)
        if c.is_zero():
            continue
        if j > m:
            out[(m, j)] = c
        else:
            out[(j, m)] = scale(c, -1)
    return out


# -- general generator systems ------------------------------------------


@dataclass(frozen=True)
class GeneratorPresentation:
    """Generators sigma_1..sigma_N of the ideal (z_1,...,z_q), normalized so
    sigma_j = z_j for j <= q and sigma_i = sum_j a_ij z_j for i > q.

    ``coeffs`` maps (i, j) with q <= i < N, 0 <= j < q to the series a_ij.
    """

    dim: int
    codim: int
    total: int
    coeffs: Mapping[tuple[int, int], TruncatedSeries]
    backend: Backend = EXACT

    def __post_init__(self):
        if not 1 <= self.codim <= self.total:
            raise InvalidArity("need q <= N")
        if self.codim > self.dim:
            raise InvalidArity("need q <= n")
        for (i, j) in self.coeffs:
            if not (self.codim <= i < self.total and 0 <= j < self.codim):
                raise InvalidArity(f"coefficient index ({i},{j}) out of range")

    def coefficient(self, i: int, j: int) -> TruncatedSeries:
        got = self.coeffs.get((i, j))
        return got if got is not None else zero(self.dim, backend=self.backend)

    def generator(self, i: int) -> TruncatedSeries:
        if i < self.codim:
            return variable(self.dim, i, backend=self.backend)
        acc = zero(self.dim, backend=self.backend)
        for j in range(self.codim):
            a = self.coeffs.get((i, j))
            if a is not None:
                acc = acc + mul(a, variable(self.dim, j, backend=a.backend, center=a.center))
        return acc


@dataclass(frozen=True)
class TauGenerator:
    j: int
    k: int
    vector: SyzygyVector


@dataclass(frozen=True)
class PhiGenerator:
    i: int
    vector: SyzygyVector


@dataclass(frozen=True)
class GeneralSyzygyBasis:
    tau: tuple[TauGenerator, ...]
    phi: tuple[PhiGenerator, ...]


def apply_generators(v: SyzygyVector, pres: GeneratorPresentation) -> TruncatedSeries:
    """sum v_i sigma_i; zero iff v annihilates the generator tuple."""
    acc = None
    for i, c in enumerate(v.components):
        term = mul(c, pres.generator(i))
        acc = term if acc is None else acc + term
    return acc


def general_syzygy_generators(pres: GeneratorPresentation) -> GeneralSyzygyBasis:
    """Explicit generators of the relations among sigma_1..sigma_N: the
    trivial solutions in the first q slots padded with zeros, plus one
    vector phi_i per extra generator with -a_ij in slot j and 1 in slot i.
    """
    n, q, N = pres.dim, pres.codim, pres.total
    be = pres.backend
    taus = []
    for t in trivial_solutions(q, dim=n, backend=be):
        padded = tuple(t.vector.components) + tuple(zero(n, backend=be) for _ in range(N - q))
        taus.append(TauGenerator(t.i, t.j, SyzygyVector(padded)))
    phis = []
    for i in range(q, N):
        comps = []
        for j in range(q):
            comps.append(scale(pres.coefficient(i, j), -1))
        for slot in range(q, N):
            if slot == i:
                comps.append(constant_one(n, be))
            else:
                comps.append(zero(n, backend=be))
        phis.append(PhiGenerator(i, SyzygyVector(tuple(comps))))
    return GeneralSyzygyBasis(tuple(taus), tuple(phis))


def constant_one(dim: int, backend: Backend) -> TruncatedSeries:
    return make_series(dim, {(0,) * dim: 1}, backend=backend)


@dataclass(frozen=True)
class GeneralDecomposition:
    tau_coeffs: Mapping[tuple[int, int], TruncatedSeries]
    phi_coeffs: Mapping[int, TruncatedSeries]

    def recombined(self, pres: GeneratorPresentation) -> SyzygyVector:
        basis = general_syzygy_generators(pres)
        n, N = pres.dim, pres.total
        comps = [zero(n, backend=pres.backend) for _ in range(N)]
        for t in basis.tau:
            b = self.tau_coeffs.get((t.j, t.k))
            if b is None:
                continue
            for slot in range(N):
                comps[slot] = comps[slot] + mul(b, t.vector.components[slot])
        for ph in basis.phi:
            b = self.phi_coeffs.get(ph.i)
            if b is None:
                continue
            for slot in range(N):
                comps[slot] = comps[slot] + mul(b, ph.vector.components[slot])
        return SyzygyVector(tuple(comps))


def decompose_general_relation(v: SyzygyVector, pres: GeneratorPresentation) -> GeneralDecomposition:
    """Decompose a relation among sigma_1..sigma_N over the explicit basis.

    Folding the extra components into the first q slots via f'_j = f_j +
    sum_{i>q} f_i a_ij leaves a relation among z_1..z_q, which decomposes
    over the trivial solutions; the extra components ride on the phi_i.
    """
    q, N = pres.codim, pres.total
    if v.arity != N:
        raise InvalidArity(f"expected a vector of length {N}")
    residual = apply_generators(v, pres)
    be = pres.backend
    if be.exact:
        if not residual.is_zero():
            raise NotARelation("vector does not annihilate the generators", residual=residual)
    else:
        scale_ = max(max((c.max_abs_coeff() for c in v.components), default=0.0), 1.0)
        if not all(abs(c) <= be.eps * scale_ for c in residual.coeffs.values()):
            raise NotARelation("vector does not annihilate the generators", residual=residual)
    folded = []
    for j in range(q):
        fj = v.components[j]
        for i in range(q, N):
            a = pres.coeffs.get((i, j))
            if a is not None:
                fj = fj + mul(v.components[i], a)
        folded.append(fj)
    tau_coeffs = decompose_relation(SyzygyVector(tuple(folded))) if q >= 2 else {}
    if q == 1:
        # a single-variable relation forces the folded component to vanish
        if folded and not folded[0].is_zero() and be.exact:
            raise NotARelation("folded component did not vanish", residual=folded[0])
    phi_coeffs = {i: v.components[i] for i in range(q, N) if not v.components[i].is_zero()}
    return GeneralDecomposition(tau_coeffs, phi_coeffs)
