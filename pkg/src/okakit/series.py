"""Multivariate truncated power series / polynomials centered at a point of C^n.

A series is a sparse map from multi-indices (tuples of non-negative
integers) to coefficients, together with a center and a truncation order.
``order=None`` marks an exact polynomial (no truncation).  Canonical form
stores no zero coefficients, so equality of canonical series is equality
of their coefficient maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import IncompatibleOperands, RequiresExactPolynomial
from .scalars import EXACT, Backend, QQi, floating

MultiIndex = tuple  # tuple[int, ...]


def total_degree(exp: MultiIndex) -> int:
    return sum(exp)


@dataclass(frozen=True)
class TruncatedSeries:
    dim: int
    center: tuple
    coeffs: Mapping[MultiIndex, object]
    order: int | None  # None = exact polynomial
    backend: Backend

    def __post_init__(self):
        for exp in self.coeffs:
            if len(exp) != self.dim:
                raise ValueError(f"multi-index {exp} has wrong length for dim {self.dim}")
            if self.order is not None and total_degree(exp) > self.order:
                raise ValueError(f"term {exp} exceeds truncation order {self.order}")

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_polynomial(self) -> bool:
        return self.order is None

    def degree(self) -> int:
        """Largest total degree among stored terms (-1 for the zero series)."""
        if not self.coeffs:
            return -1
        return max(total_degree(e) for e in self.coeffs)

    def depends_on(self, axis: int) -> bool:
        return any(e[axis] > 0 for e in self.coeffs)

    def max_abs_coeff(self) -> float:
        if not self.coeffs:
            return 0.0
        return max(abs(c) for c in self.coeffs.values())

    def coefficient(self, exp: MultiIndex):
        return self.coeffs.get(tuple(exp), self.backend.zero())

    # -- operators -----------------------------------------------------

    def __add__(self, other):
        return add(self, _coerce_operand(self, other))

    def __radd__(self, other):
        return add(self, _coerce_operand(self, other))

    def __sub__(self, other):
        other = _coerce_operand(self, other)
        return add(self, scale(other, -1))

    def __rsub__(self, other):
        return add(_coerce_operand(self, other), scale(self, -1))

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __neg__(self):
        return scale(self, -1)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.backend == other.backend
            and self.order == other.order
            and self.center == other.center
            and dict(self.coeffs) == dict(other.coeffs)
        )

    def __hash__(self):
        return hash((self.dim, self.center, self.order, frozenset(self.coeffs.items())))

    def __repr__(self):
        n = len(self.coeffs)
        return f"TruncatedSeries(dim={self.dim}, terms={n}, order={self.order}, backend={self.backend.tag})"


def _coerce_operand(ref: TruncatedSeries, value):
    if isinstance(value, TruncatedSeries):
        return value
    return constant(ref.dim, value, backend=ref.backend, center=ref.center, order=ref.order)


# -- construction -------------------------------------------------------


def make_series(
    dim: int,
    coeffs: Mapping[MultiIndex, object],
    order: int | None = None,
    backend: Backend = EXACT,
    center: Sequence | None = None,
) -> TruncatedSeries:
    """Canonical-form constructor: coerces coefficients, drops zeros."""
    if center is None:
        center = (backend.zero(),) * dim
    else:
        center = tuple(backend.coerce(c) for c in center)
        if len(center) != dim:
            raise ValueError("center length does not match dimension")
    canon = {}
    for exp, value in coeffs.items():
        exp = tuple(int(e) for e in exp)
        if any(e < 0 for e in exp):
            raise ValueError(f"negative exponent in {exp}")
        v = backend.coerce(value)
        if exp in canon:
            v = canon[exp] + v
        if backend.is_zero(v):
            canon.pop(exp, None)
        else:
            canon[exp] = v
    if order is not None:
        canon = {e: v for e, v in canon.items() if total_degree(e) <= order}
    return TruncatedSeries(dim, center, canon, order, backend)


def zero(dim: int, backend: Backend = EXACT, center=None, order=None) -> TruncatedSeries:
    return make_series(dim, {}, order=order, backend=backend, center=center)


def constant(dim: int, value, backend: Backend = EXACT, center=None, order=None) -> TruncatedSeries:
    return make_series(dim, {(0,) * dim: value}, order=order, backend=backend, center=center)


def variable(dim: int, axis: int, backend: Backend = EXACT, center=None, order=None) -> TruncatedSeries:
    """The coordinate function z_axis expanded at ``center`` (0-based axis)."""
    if not 0 <= axis < dim:
        raise ValueError(f"axis {axis} out of range for dim {dim}")
    exp = tuple(1 if k == axis else 0 for k in range(dim))
    terms = {exp: 1}
    if center is not None:
        b = tuple(center)
        terms[(0,) * dim] = b[axis]
    return make_series(dim, terms, order=order, backend=backend, center=center)


def monomial(dim: int, exp: MultiIndex, coeff=1, backend: Backend = EXACT, center=None, order=None) -> TruncatedSeries:
    return make_series(dim, {tuple(exp): coeff}, order=order, backend=backend, center=center)


# -- ring operations ----------------------------------------------------


def _check_compatible(a: TruncatedSeries, b: TruncatedSeries):
    if a.dim != b.dim:
        raise IncompatibleOperands(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.backend != b.backend:
        raise IncompatibleOperands(f"backend mismatch: {a.backend.tag} vs {b.backend.tag}")
    if a.center != b.center:
        raise IncompatibleOperands("center mismatch")


def _min_order(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(a, b)
    order = _min_order(a.order, b.order)
    terms = dict(a.coeffs)
    for exp, v in b.coeffs.items():
        terms[exp] = terms[exp] + v if exp in terms else v
    return make_series(a.dim, terms, order=order, backend=a.backend, center=a.center)


def scale(a: TruncatedSeries, scalar) -> TruncatedSeries:
    s = a.backend.coerce(scalar)
    return make_series(
        a.dim, {e: v * s for e, v in a.coeffs.items()}, order=a.order, backend=a.backend, center=a.center
    )


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(a, b)
    order = _min_order(a.order, b.order)
    terms: dict = {}
    for ea, va in a.coeffs.items():
        for eb, vb in b.coeffs.items():
            exp = tuple(x + y for x, y in zip(ea, eb))
            if order is not None and total_degree(exp) > order:
                continue
            prod = va * vb
            terms[exp] = terms[exp] + prod if exp in terms else prod
    return make_series(a.dim, terms, order=order, backend=a.backend, center=a.center)


def _binomial_powers(delta, max_power: int, backend: Backend):
    """[(w + delta)^k for k in 0..max_power] as coefficient lists in w."""
    one = backend.one()
    rows = [[one]]
    for k in range(1, max_power + 1):
        prev = rows[-1]
        row = [backend.zero()] * (k + 1)
        for j, c in enumerate(prev):
            row[j] = row[j] + c * delta  # multiply by delta term
            row[j + 1] = row[j + 1] + c  # multiply by w term
        rows.append(row)
    return rows


def recenter(f: TruncatedSeries, new_center: Sequence) -> TruncatedSeries:
    """Re-expand an exact polynomial around a different center."""
    if not f.is_polynomial():
        raise RequiresExactPolynomial("recenter needs an untruncated polynomial")
    bnew = tuple(f.backend.coerce(c) for c in new_center)
    if len(bnew) != f.dim:
        raise ValueError("new center has wrong length")
    # z_k - b_k = (z_k - b'_k) + (b'_k - b_k)
    deltas = [bnew[k] - f.center[k] for k in range(f.dim)]
    max_pow = [0] * f.dim
    for exp in f.coeffs:
        for k, e in enumerate(exp):
            max_pow[k] = max(max_pow[k], e)
    tables = [_binomial_powers(deltas[k], max_pow[k], f.backend) for k in range(f.dim)]
    terms: dict = {}
    for exp, v in f.coeffs.items():
        partial = {(): v}
        for k, e in enumerate(exp):
            row = tables[k][e]
            nxt: dict = {}
            for pexp, pv in partial.items():
                for j, c in enumerate(row):
                    if f.backend.is_zero(c):
                        continue
                    key = pexp + (j,)
                    val = pv * c
                    nxt[key] = nxt[key] + val if key in nxt else val
            partial = nxt
        for pexp, pv in partial.items():
            terms[pexp] = terms[pexp] + pv if pexp in terms else pv
    return make_series(f.dim, terms, order=None, backend=f.backend, center=bnew)


def evaluate(f: TruncatedSeries, point: Sequence):
    """Sum of stored terms c_nu (z - b)^nu at ``point``."""
    z = tuple(f.backend.coerce(p) for p in point)
    if len(z) != f.dim:
        raise ValueError("point has wrong length")
    w = tuple(z[k] - f.center[k] for k in range(f.dim))
    # cache powers per axis
    max_pow = [0] * f.dim
    for exp in f.coeffs:
        for k, e in enumerate(exp):
            max_pow[k] = max(max_pow[k], e)
    powers = []
    for k in range(f.dim):
        row = [f.backend.one()]
        for _ in range(max_pow[k]):
            row.append(row[-1] * w[k])
        powers.append(row)
    acc = f.backend.zero()
    for exp, v in f.coeffs.items():
        term = v
        for k, e in enumerate(exp):
            if e:
                term = term * powers[k][e]
        acc = acc + term
    return acc


def evaluate_complex(f: TruncatedSeries, point: Sequence) -> complex:
    """Evaluate with plain complex arithmetic regardless of backend."""
    z = tuple(complex(p) for p in point)
    b = tuple(complex(c) for c in f.center)
    w = tuple(z[k] - b[k] for k in range(f.dim))
    acc = 0j
    for exp, v in f.coeffs.items():
        term = complex(v)
        for k, e in enumerate(exp):
            if e:
                term *= w[k] ** e
        acc += term
    return acc


def truncate(f: TruncatedSeries, order: int) -> TruncatedSeries:
    return make_series(f.dim, f.coeffs, order=order, backend=f.backend, center=f.center)


def invert_unit(f: TruncatedSeries, order: int) -> TruncatedSeries:
    """Multiplicative inverse of a series with nonzero constant term, to ``order``.

    Neumann recursion: 1/f = (1/c) * sum_k (1 - f/c)^k with c = f(b).
    """
    c = f.coeffs.get((0,) * f.dim)
    if c is None or f.backend.is_zero(c):
        raise ZeroDivisionError("series is not a unit (zero constant term)")
    ft = truncate(f, order)
    if f.backend.exact:
        cinv = f.backend.one() / c
    else:
        cinv = 1.0 / c
    w = constant(f.dim, 1, backend=f.backend, center=f.center, order=order) - scale(ft, cinv)
    acc = constant(f.dim, 1, backend=f.backend, center=f.center, order=order)
    pw = acc
    for _ in range(order):
        pw = mul(pw, w)
        if pw.is_zero():
            break
        acc = add(acc, pw)
    return scale(acc, cinv)


def to_floating(f: TruncatedSeries, eps: float = 1e-12) -> TruncatedSeries:
    be = floating(eps)
    return make_series(
        f.dim,
        {e: complex(v) for e, v in f.coeffs.items()},
        order=f.order,
        backend=be,
        center=[complex(c) for c in f.center],
    )


def close_to(a: TruncatedSeries, b: TruncatedSeries, eps: float | None = None) -> bool:
    """Coefficientwise comparison; exact equality on the exact backend."""
    if a.backend.exact and b.backend.exact:
        return a == b
    tol = eps if eps is not None else max(a.backend.eps, b.backend.eps)
    keys = set(a.coeffs) | set(b.coeffs)
    scale_ = max(a.max_abs_coeff(), b.max_abs_coeff(), 1.0)
    for k in keys:
        if abs(complex(a.coefficient(k)) - complex(b.coefficient(k))) > tol * scale_:
            return False
    return True


# -- JSON round trip -----------------------------------------------------


def _scalar_to_json(v, backend: Backend):
    if backend.exact:
        return [f"{v.re.numerator}/{v.re.denominator}", f"{v.im.numerator}/{v.im.denominator}"]
    return [v.real, v.imag]


def _scalar_from_json(pair, backend: Backend):
    re, im = pair
    if isinstance(re, str) or isinstance(im, str):
        return QQi(Fraction(re), Fraction(im))
    return complex(re, im)


def to_json(f: TruncatedSeries) -> dict:
    return {
        "dim": f.dim,
        "backend": f.backend.tag,
        "center": [_scalar_to_json(c, f.backend) for c in f.center],
        "terms": [
            {"exp": list(e), "coeff": _scalar_to_json(v, f.backend)}
            for e, v in sorted(f.coeffs.items())
        ],
        "order": "exact" if f.order is None else f.order,
    }


def from_json(data: dict, eps: float = 1e-12) -> TruncatedSeries:
    tag = data.get("backend", "exact")
    backend = EXACT if tag == "exact" else floating(eps)
    dim = int(data["dim"])
    center = [_scalar_from_json(c, backend) for c in data.get("center", [[0, 0]] * dim)]
    order = data.get("order", "exact")
    order = None if order == "exact" else int(order)
    terms = {tuple(t["exp"]): _scalar_from_json(t["coeff"], backend) for t in data.get("terms", [])}
    return make_series(dim, terms, order=order, backend=backend, center=center)


def dumps(f: TruncatedSeries) -> str:
    return json.dumps(to_json(f))
