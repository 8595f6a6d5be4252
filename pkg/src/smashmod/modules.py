"""Finite modules over functions and vector fields, given by action tensors.

A module here is a free module A^r over the polynomial ring in d variables
together with a compatible vector-field action.  The action of g*d_i is

    rho(g d_i)(m) = g * d_i(m) + sum_{|alpha| <= N} d^alpha(g) * D[i,alpha] * m

for r x r polynomial matrices D[i,alpha]; the Leibniz rule holds by
construction and bracket compatibility [rho(eta), rho(mu)] = rho([eta, mu])
is what ``validate`` checks.  N is the differential-operator order of the
module's Lie map, bounded by rank^2 for every valid module.

The annihilation test for a smash element with canonical components
P_i(x, y) is exact: the element kills the whole module iff every diagonal
restriction P_i|_{y=x} vanishes and the matrix

    sum_{i, alpha} (d_y^alpha P_i)|_{y=x} * D[i,alpha]

is identically zero (first-order operators vanish iff their symbol and
their values on a module basis vanish).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Mapping, Optional, Sequence

from .poly import (
    Coeff,
    Derivation,
    DimensionMismatch,
    MultiIndex,
    Poly,
    PolyError,
    index_order,
    monomials_per_variable,
    multi_binomial,
    multi_indices,
    parse_poly,
    partial_power,
    unit_index,
)
from .smash import SmashElement, VerificationReport, omega, omega_multi, restrict_to_diagonal

__all__ = [
    "Matrix",
    "ModuleElement",
    "AVModule",
    "ModuleSchemaError",
    "ValidationError",
    "validate_module",
    "min_annihilating_order",
    "oracle_order",
    "exterior_power",
    "tensor_product",
    "dual_module",
    "zoo",
    "trivial_dmodule",
    "differential_forms",
    "tangent_adjoint",
    "jet_module",
    "twist",
    "module_to_dict",
    "module_from_dict",
]

Matrix = tuple[tuple[Poly, ...], ...]


class ModuleSchemaError(PolyError):
    """The action-tensor data is structurally malformed."""


class ValidationError(PolyError):
    """A module failed (or has not passed) bracket-compatibility validation."""

    def __init__(self, message: str, report: Optional[VerificationReport] = None):
        super().__init__(message)
        self.report = report


# -- small matrix helpers ----------------------------------------------------------

def _mat_is_zero(mat: Matrix) -> bool:
    return all(p.is_zero() for row in mat for p in row)


def _mat_scale(mat: Matrix, c) -> Matrix:
    return tuple(tuple(p * c for p in row) for row in mat)


def _mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(p + q for p, q in zip(ra, rb)) for ra, rb in zip(a, b))


def _mat_vec(mat: Matrix, vec: Sequence[Poly], dim: int) -> list[Poly]:
    out = []
    for row in mat:
        acc = Poly.zero(dim)
        for p, v in zip(row, vec):
            if p.terms and v.terms:
                acc = acc + p * v
        out.append(acc)
    return out


def _mat_const(dim: int, r: int, fill) -> list[list[Poly]]:
    return [[fill(i, j) for j in range(r)] for i in range(r)]


def _identity(dim: int, r: int) -> Matrix:
    one = Poly.constant(dim, 1)
    zero = Poly.zero(dim)
    return tuple(tuple(one if i == j else zero for j in range(r)) for i in range(r))


def _zero_matrix(dim: int, r: int) -> Matrix:
    zero = Poly.zero(dim)
    return tuple((zero,) * r for _ in range(r))


def _kron(a: Matrix, b: Matrix, dim: int) -> Matrix:
    ra, rb = len(a), len(b)
    out = []
    for i1 in range(ra):
        for i2 in range(rb):
            row = []
            for j1 in range(ra):
                for j2 in range(rb):
                    p, q = a[i1][j1], b[i2][j2]
                    row.append(p * q if (p.terms and q.terms) else Poly.zero(dim))
            out.append(tuple(row))
    return tuple(out)


class ModuleElement:
    """An element of A^r: a tuple of r polynomials in the base variables."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries: Iterable[Poly]):
        entries = tuple(entries)
        if not entries:
            raise ValueError("a module element needs at least one entry")
        dim = entries[0].dim
        if any(p.dim != dim for p in entries):
            raise DimensionMismatch("entries disagree on dim")
        self.dim = dim
        self.entries = entries

    @classmethod
    def zero(cls, dim: int, rank: int) -> "ModuleElement":
        return cls(tuple(Poly.zero(dim) for _ in range(rank)))

    @property
    def rank(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return ModuleElement(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return ModuleElement(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return ModuleElement(tuple(-p for p in self.entries))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return ModuleElement(tuple(p * other for p in self.entries))
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.entries) + ")"

    def __repr__(self) -> str:
        return f"ModuleElement{self}"


class AVModule:
    """A free module with a differential-operator action tensor.

    ``tensor`` maps (i, alpha) to the r x r matrix D[i,alpha]; only nonzero
    matrices are stored.  An instance is usable only after ``validate()``
    has passed (the zoo constructors and file loader do this for you).
    Instances are immutable and safe to share.
    """

    __slots__ = ("dim", "rank", "order", "tensor", "name", "_validated")

    def __init__(self, dim: int, rank: int, order: int,
                 tensor: Mapping[tuple[int, MultiIndex], Matrix],
                 name: str = "", _sentinel_ok: bool = False):
        if dim < 1:
            raise ModuleSchemaError("dim must be a positive integer")
        if rank < 1 and not _sentinel_ok:
            raise ModuleSchemaError("rank must be >= 1")
        if rank < 0 or order < 0:
            raise ModuleSchemaError("rank and order must be nonnegative")
        clean: dict[tuple[int, MultiIndex], Matrix] = {}
        for (i, alpha), mat in tensor.items():
            alpha = tuple(alpha)
            if not 1 <= i <= dim:
                raise ModuleSchemaError(f"direction index {i} out of range 1..{dim}")
            if len(alpha) != dim or any(a < 0 for a in alpha):
                raise ModuleSchemaError(f"bad multi-index {alpha} for dim {dim}")
            if index_order(alpha) > order:
                raise ModuleSchemaError(
                    f"tensor entry at {alpha} exceeds declared order {order}")
            if len(mat) != rank or any(len(row) != rank for row in mat):
                raise ModuleSchemaError(f"matrix at ({i}, {alpha}) is not {rank}x{rank}")
            mat = tuple(tuple(row) for row in mat)
            for row in mat:
                for p in row:
                    if not isinstance(p, Poly) or p.dim != dim:
                        raise ModuleSchemaError(
                            f"matrix entries at ({i}, {alpha}) must be {dim}-variable polynomials")
            if not _mat_is_zero(mat):
                clean[(i, alpha)] = mat
        actual = max((index_order(a) for (_, a) in clean), default=0)
        if actual != order:
            raise ModuleSchemaError(
                f"declared order {order} is not tight (largest nonzero entry has order {actual})")
        self.dim = dim
        self.rank = rank
        self.order = order
        self.tensor = clean
        self.name = name
        self._validated = _sentinel_ok and rank == 0

    # -- bookkeeping ---------------------------------------------------------------

    @property
    def is_zero_module(self) -> bool:
        return self.rank == 0

    @property
    def validated(self) -> bool:
        return self._validated

    def _require_validated(self):
        if not self._validated:
            raise ValidationError(
                f"module {self.name or '<anonymous>'} has not passed validation")

    def __eq__(self, other) -> bool:
        if not isinstance(other, AVModule):
            return NotImplemented
        return (self.dim == other.dim and self.rank == other.rank
                and self.order == other.order and self.tensor == other.tensor)

    __hash__ = None

    def __repr__(self) -> str:
        return (f"AVModule(name={self.name!r}, dim={self.dim}, rank={self.rank}, "
                f"order={self.order})")

    def basis_element(self, j: int) -> ModuleElement:
        """The j-th standard basis vector (0-based)."""
        if not 0 <= j < self.rank:
            raise ValueError(f"basis index {j} out of range")
        one = Poly.constant(self.dim, 1)
        zero = Poly.zero(self.dim)
        return ModuleElement(tuple(one if t == j else zero for t in range(self.rank)))

    def basis(self) -> list[ModuleElement]:
        return [self.basis_element(j) for j in range(self.rank)]

    # -- actions -------------------------------------------------------------------

    def _act_derivation_unchecked(self, e: Derivation, m: ModuleElement) -> ModuleElement:
        d = self.dim
        out = [Poly.zero(d) for _ in range(self.rank)]
        for i in range(1, d + 1):
            g = e.coeffs[i - 1]
            if not g.terms:
                continue
            for j, entry in enumerate(m.entries):
                de = entry.partial_derivative(i)
                if de.terms:
                    out[j] = out[j] + g * de
        for (i, alpha), mat in self.tensor.items():
            c = partial_power(e.coeffs[i - 1], alpha)
            if not c.terms:
                continue
            mv = _mat_vec(mat, m.entries, d)
            for j in range(self.rank):
                if mv[j].terms:
                    out[j] = out[j] + c * mv[j]
        return ModuleElement(out)

    def act_derivation(self, e: Derivation, m: ModuleElement) -> ModuleElement:
        """Apply the vector field e to m through the action tensor."""
        self._require_validated()
        if e.dim != self.dim or m.dim != self.dim:
            raise DimensionMismatch("dimension mismatch with the module")
        if m.rank != self.rank:
            raise DimensionMismatch(f"element rank {m.rank} vs module rank {self.rank}")
        return self._act_derivation_unchecked(e, m)

    def act_smash(self, u: SmashElement, m: ModuleElement) -> ModuleElement:
        """Apply a function#vector-field element to m.

        Uses the canonical components P_i(x, y) directly: the symbol part is
        P_i|_{y=x} * d_i(m) and the tensor part reads off (d_y^alpha P_i)|_{y=x}.
        Agrees with expanding u into terms f # eta and summing f * rho(eta)m.
        """
        self._require_validated()
        if u.dim != self.dim or m.dim != self.dim:
            raise DimensionMismatch("dimension mismatch with the module")
        if m.rank != self.rank:
            raise DimensionMismatch(f"element rank {m.rank} vs module rank {self.rank}")
        d = self.dim
        out = [Poly.zero(d) for _ in range(self.rank)]
        for i in range(1, d + 1):
            comp = u.components[i - 1]
            if not comp.terms:
                continue
            s = restrict_to_diagonal(comp)
            if not s.terms:
                continue
            for j, entry in enumerate(m.entries):
                de = entry.partial_derivative(i)
                if de.terms:
                    out[j] = out[j] + s * de
        for (i, alpha), mat in self.tensor.items():
            comp = u.components[i - 1]
            if not comp.terms:
                continue
            c = restrict_to_diagonal(_partial_y(comp, alpha, d))
            if not c.terms:
                continue
            mv = _mat_vec(mat, m.entries, d)
            for j in range(self.rank):
                if mv[j].terms:
                    out[j] = out[j] + c * mv[j]
        return ModuleElement(out)

    def annihilates(self, u: SmashElement) -> bool:
        """Exact decision: does u act as zero on the whole module?"""
        self._require_validated()
        if u.dim != self.dim:
            raise DimensionMismatch("dimension mismatch with the module")
        d = self.dim
        for comp in u.components:
            if comp.terms and not restrict_to_diagonal(comp).is_zero():
                return False
        acc: Optional[list[list[Poly]]] = None
        for (i, alpha), mat in self.tensor.items():
            comp = u.components[i - 1]
            if not comp.terms:
                continue
            c = restrict_to_diagonal(_partial_y(comp, alpha, d))
            if not c.terms:
                continue
            if acc is None:
                acc = [[Poly.zero(d) for _ in range(self.rank)] for _ in range(self.rank)]
            for a in range(self.rank):
                row = mat[a]
                for b in range(self.rank):
                    if row[b].terms:
                        acc[a][b] = acc[a][b] + c * row[b]
        if acc is None:
            return True
        return all(p.is_zero() for row in acc for p in row)

    # -- validation ----------------------------------------------------------------

    def validate(self) -> VerificationReport:
        """Exact bracket-compatibility check; marks the module usable on pass.

        The defect [rho(g d_i), rho(h d_j)] - rho([g d_i, h d_j]) is A-linear
        in the argument and bilinear in the order-(N+1) jets of (g, h), so
        vanishing on all monomials of per-variable degree <= N+2 applied to
        the basis (and, as a redundant guard, to x_k * basis) proves it
        vanishes identically.
        """
        inputs = {"module": self.name or "<anonymous>", "dim": str(self.dim),
                  "rank": str(self.rank), "order": str(self.order)}
        if self.rank == 0:
            self._validated = True
            return VerificationReport("module-bracket-compatibility", inputs, "pass")
        d = self.dim
        exps = monomials_per_variable(d, self.order + 2)
        monos = [Poly.monomial(d, e) for e in exps]
        vectors = self.basis()
        for k in range(1, d + 1):
            xk = Poly.variable(d, k)
            vectors.extend(xk * b for b in self.basis())

        def direction(idx: int, g: Poly) -> Derivation:
            return Derivation(tuple(
                g if t == idx - 1 else Poly.zero(d) for t in range(d)))

        inner_cache: dict[tuple[int, int], list[ModuleElement]] = {}

        def images(idx: int, gidx: int) -> list[ModuleElement]:
            key = (idx, gidx)
            got = inner_cache.get(key)
            if got is None:
                eta = direction(idx, monos[gidx])
                got = [self._act_derivation_unchecked(eta, v) for v in vectors]
                inner_cache[key] = got
            return got

        for i in range(1, d + 1):
            for j in range(i, d + 1):
                for gi, g in enumerate(monos):
                    for hj, h in enumerate(monos):
                        if i == j and gi >= hj:
                            continue  # antisymmetric defect: ordered pairs suffice
                        eta = direction(i, g)
                        mu = direction(j, h)
                        lie = eta.bracket(mu)
                        mu_v = images(j, hj)
                        eta_v = images(i, gi)
                        for t, v in enumerate(vectors):
                            defect = self._act_derivation_unchecked(eta, mu_v[t]) \
                                - self._act_derivation_unchecked(mu, eta_v[t]) \
                                - self._act_derivation_unchecked(lie, v)
                            if not defect.is_zero():
                                witness = {
                                    "i": str(i), "j": str(j), "g": str(g), "h": str(h),
                                    "vector": str(v), "defect": str(defect),
                                }
                                return VerificationReport(
                                    "module-bracket-compatibility", inputs, "fail", witness)
        self._validated = True
        return VerificationReport("module-bracket-compatibility", inputs, "pass")

    def lie_map_order(self) -> int:
        """Order of the action tensor: max |alpha| with D[i,alpha] nonzero."""
        self._require_validated()
        got = max((index_order(a) for (_, a) in self.tensor), default=0)
        if self.rank and got > self.rank ** 2:
            raise ValidationError(
                f"order {got} exceeds the rank^2 bound {self.rank ** 2}")
        return got


def _partial_y(p: Poly, alpha: MultiIndex, d: int) -> Poly:
    """Iterated partial of a doubled polynomial in the y-block directions."""
    out = p
    for t, e in enumerate(alpha):
        for _ in range(e):
            if not out.terms:
                return out
            out = out.partial_derivative(d + t + 1)
    return out


def validate_module(module: AVModule) -> VerificationReport:
    return module.validate()


# ---------------------------------------------------------------------------------
# orders and annihilation profiles
# ---------------------------------------------------------------------------------

def min_annihilating_order(module: AVModule, f: Poly, e: Derivation) -> int:
    """Smallest p >= 1 such that omega(q, f, e) annihilates for every q >= p.

    Levels above the module order annihilate automatically: the components
    (f(x)-f(y))^q g_i(y) vanish on the diagonal to order q, so every
    y-derivative of order <= N dies there.  Constant f gives 1 since the
    elements vanish identically for every q >= 1.
    """
    module._require_validated()
    if f.dim != module.dim or e.dim != module.dim:
        raise DimensionMismatch("dimension mismatch with the module")
    if f.is_constant():
        return 1
    worst = 0
    for q in range(1, module.order + 1):
        if not module.annihilates(omega(q, f, e)):
            worst = q
    return worst + 1


def oracle_order(module: AVModule, n_max: int) -> int:
    """Differential-operator order of the Lie map, by the commutator criterion.

    Smallest n <= n_max such that the product elements over every choice of
    n+1 coordinate functions annihilate, for every direction d_i and every
    monomial coefficient of total degree <= order+1.  Iterated commutators
    with multiplication operators are spanned by the coordinate choices, and
    the monomial coefficients span all order-N jets, so this family decides
    the order exactly.  Returns n_max + 1 when no n suffices.
    """
    module._require_validated()
    d = module.dim
    coords = [Poly.variable(d, i) for i in range(1, d + 1)]
    gs = [Poly.monomial(d, a) for a in multi_indices(d, module.order + 1)]
    zero = Poly.zero(d)

    def direction(idx: int, g: Poly) -> Derivation:
        return Derivation(tuple(g if t == idx - 1 else zero for t in range(d)))

    for n in range(n_max + 1):
        ok = True
        for fs in combinations_with_replacement(coords, n + 1):
            for i in range(1, d + 1):
                for g in gs:
                    if not module.annihilates(omega_multi(fs, direction(i, g))):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return n
    return n_max + 1


# ---------------------------------------------------------------------------------
# functors
# ---------------------------------------------------------------------------------

def exterior_power(module: AVModule, k: int) -> AVModule:
    """k-th exterior power, with the action extended as a derivation on wedges.

    For k > rank the result is the rank-0 zero module (the only place a
    rank-0 module is produced); for k = rank it is the rank-1 module whose
    tensor entries are the traces.
    """
    module._require_validated()
    if k < 1:
        raise ValueError("exterior power needs k >= 1")
    r = module.rank
    name = f"wedge^{k}({module.name or 'M'})"
    if k > r:
        return AVModule(module.dim, 0, 0, {}, name=name, _sentinel_ok=True)
    if k == 1:
        out = AVModule(module.dim, r, module.order, module.tensor, name=name)
        out._validated = True
        return out
    subsets = list(combinations(range(r), k))
    index = {S: a for a, S in enumerate(subsets)}
    nr = len(subsets)
    d = module.dim
    tensor = {}
    for (i, alpha), mat in module.tensor.items():
        ent = [[Poly.zero(d) for _ in range(nr)] for _ in range(nr)]
        for col, T in enumerate(subsets):
            for pos, t in enumerate(T):
                for s in range(r):
                    c = mat[s][t]
                    if not c.terms:
                        continue
                    if s == t:
                        ent[col][col] = ent[col][col] + c
                    elif s in T:
                        continue  # repeated factor: wedge is zero
                    else:
                        lo, hi = (s, t) if s < t else (t, s)
                        between = sum(1 for u in T if u != t and lo < u < hi)
                        newT = tuple(sorted(T[:pos] + T[pos + 1:] + (s,)))
                        val = -c if between & 1 else c
                        ent[index[newT]][col] = ent[index[newT]][col] + val
        mat_out = tuple(tuple(row) for row in ent)
        if not _mat_is_zero(mat_out):
            tensor[(i, alpha)] = mat_out
    order = max((index_order(a) for (_, a) in tensor), default=0)
    out = AVModule(d, nr, order, tensor, name=name)
    report = out.validate()
    if not report.passed:
        raise ValidationError(f"exterior power failed validation: {name}", report)
    return out


def tensor_product(m1: AVModule, m2: AVModule) -> AVModule:
    """Tensor product over A, acting by rho(eta)(m x m') = rho m x m' + m x rho m'."""
    m1._require_validated()
    m2._require_validated()
    if m1.dim != m2.dim:
        raise DimensionMismatch(f"dim {m1.dim} vs {m2.dim}")
    d = m1.dim
    id1 = _identity(d, m1.rank)
    id2 = _identity(d, m2.rank)
    tensor = {}
    for key in set(m1.tensor) | set(m2.tensor):
        parts = []
        if key in m1.tensor:
            parts.append(_kron(m1.tensor[key], id2, d))
        if key in m2.tensor:
            parts.append(_kron(id1, m2.tensor[key], d))
        mat = parts[0] if len(parts) == 1 else _mat_add(parts[0], parts[1])
        if not _mat_is_zero(mat):
            tensor[key] = mat
    order = max((index_order(a) for (_, a) in tensor), default=0)
    name = f"({m1.name or 'M'})x({m2.name or 'N'})"
    out = AVModule(d, m1.rank * m2.rank, order, tensor, name=name)
    report = out.validate()
    if not report.passed:
        raise ValidationError(f"tensor product failed validation: {name}", report)
    return out


def dual_module(module: AVModule) -> AVModule:
    """Contragredient module: (rho*(eta) phi)(m) = eta(phi(m)) - phi(rho(eta) m)."""
    module._require_validated()
    tensor = {}
    for (i, alpha), mat in module.tensor.items():
        r = len(mat)
        tensor[(i, alpha)] = tuple(tuple(-mat[b][a] for b in range(r)) for a in range(r))
    name = f"dual({module.name or 'M'})"
    out = AVModule(module.dim, module.rank, module.order, tensor, name=name)
    report = out.validate()
    if not report.passed:
        raise ValidationError(f"dual failed validation: {name}", report)
    return out


# ---------------------------------------------------------------------------------
# the zoo
# ---------------------------------------------------------------------------------

def _validated(module: AVModule) -> AVModule:
    report = module.validate()
    if not report.passed:
        raise ValidationError(f"zoo module failed validation: {module.name}", report)
    return module


@lru_cache(maxsize=None)
def trivial_dmodule(dim: int = 1, rank: int = 1) -> AVModule:
    """Flat connection: rho(g d_i) = g d_i, order 0."""
    if dim < 1 or rank < 1:
        raise ValueError("trivial_dmodule needs dim >= 1 and rank >= 1")
    return _validated(AVModule(dim, rank, 0, {}, name=f"dmodule({dim},{rank})"))


@lru_cache(maxsize=None)
def differential_forms(dim: int = 1) -> AVModule:
    """One-forms with the Lie-derivative action; basis dx_1..dx_d.

    L_{g d_i}(dx_j) = delta_ij * sum_k d_k(g) dx_k, so D[i, e_k] has a single
    1 in row k, column i.
    """
    if dim < 1:
        raise ValueError("differential_forms needs dim >= 1")
    zero = Poly.zero(dim)
    one = Poly.constant(dim, 1)
    tensor = {}
    for i in range(1, dim + 1):
        for k in range(1, dim + 1):
            mat = tuple(tuple(
                one if (a == k - 1 and b == i - 1) else zero
                for b in range(dim)) for a in range(dim))
            tensor[(i, unit_index(dim, k))] = mat
    return _validated(AVModule(dim, dim, 1, tensor, name=f"forms({dim})"))


@lru_cache(maxsize=None)
def tangent_adjoint(dim: int = 1) -> AVModule:
    """Vector fields acting on themselves by the bracket; basis d_1..d_d.

    [g d_i, d_k] = -d_k(g) d_i, so D[i, e_k] = -E_{i,k}.
    """
    if dim < 1:
        raise ValueError("tangent_adjoint needs dim >= 1")
    zero = Poly.zero(dim)
    minus_one = Poly.constant(dim, -1)
    tensor = {}
    for i in range(1, dim + 1):
        for k in range(1, dim + 1):
            mat = tuple(tuple(
                minus_one if (a == i - 1 and b == k - 1) else zero
                for b in range(dim)) for a in range(dim))
            tensor[(i, unit_index(dim, k))] = mat
    return _validated(AVModule(dim, dim, 1, tensor, name=f"adjoint({dim})"))


@lru_cache(maxsize=None)
def jet_module(dim: int = 1, n: int = 0) -> AVModule:
    """Jets of order n: slots e_beta for the partials d^beta(h), |beta| <= n.

    The action prolongs rho(eta)(j h) = j(eta h) along the jet sections and
    extends A-linearly: expanding d^beta(g * d_i h) by the product rule gives

        (D[i,alpha] m)_beta = C(beta, alpha) * m_{beta - alpha + e_i}

    for 0 < alpha <= beta, with constant entries.  Rank C(n+d, d), order n.
    """
    if dim < 1 or n < 0:
        raise ValueError("jet_module needs dim >= 1 and n >= 0")
    betas = multi_indices(dim, n)
    index = {b: a for a, b in enumerate(betas)}
    r = len(betas)
    zero = Poly.zero(dim)
    tensor = {}
    for i in range(1, dim + 1):
        ei = unit_index(dim, i)
        for alpha in betas:
            if index_order(alpha) == 0:
                continue
            ent = [[zero] * r for _ in range(r)]
            nonzero = False
            for beta in betas:
                if any(b < a for b, a in zip(beta, alpha)):
                    continue
                target = tuple(b - a + e for b, a, e in zip(beta, alpha, ei))
                if target not in index:
                    continue  # |target| = |beta|-|alpha|+1 <= n always; guard anyway
                ent[index[beta]][index[target]] = Poly.constant(dim, multi_binomial(beta, alpha))
                nonzero = True
            if nonzero:
                tensor[(i, alpha)] = tuple(tuple(row) for row in ent)
    return _validated(AVModule(dim, r, n, tensor, name=f"jets({dim},{n})"))


@lru_cache(maxsize=None)
def twist(lam: Coeff = 0) -> AVModule:
    """The rank-one family on the line: rho(g d)(m) = g m' + lam g' m.

    lam = 0 is the trivial D-module point, lam = 1 the one-forms, lam = -1
    the adjoint action.
    """
    lam = Fraction(lam)
    if lam == 0:
        mod = AVModule(1, 1, 0, {}, name="twist(0)")
    else:
        mat = ((Poly.constant(1, lam),),)
        mod = AVModule(1, 1, 1, {(1, (1,)): mat}, name=f"twist({lam})")
    return _validated(mod)


_ZOO_ALIASES = {
    "trivial_dmodule": "trivial_dmodule",
    "dmodule": "trivial_dmodule",
    "differential_forms": "differential_forms",
    "forms": "differential_forms",
    "tangent_adjoint": "tangent_adjoint",
    "adjoint": "tangent_adjoint",
    "jet_module": "jet_module",
    "jets": "jet_module",
    "twist": "twist",
}


def zoo(name: str, **params) -> AVModule:
    """Construct a named example module; see the builders for parameters."""
    key = _ZOO_ALIASES.get(name)
    if key is None:
        raise ValueError(f"unknown zoo module {name!r}")
    dim = int(params.pop("dim", 1))
    if key == "trivial_dmodule":
        mod = trivial_dmodule(dim, int(params.pop("rank", 1)))
    elif key == "differential_forms":
        mod = differential_forms(dim)
    elif key == "tangent_adjoint":
        mod = tangent_adjoint(dim)
    elif key == "jet_module":
        mod = jet_module(dim, int(params.pop("n", 0)))
    else:
        if dim != 1:
            raise ValueError("twist is defined on the line (dim must be 1)")
        lam = params.pop("lam", 0)
        if isinstance(lam, str):
            lam = Fraction(lam)
        mod = twist(lam)
    if params:
        raise ValueError(f"unexpected parameters for {name!r}: {sorted(params)}")
    return mod


# ---------------------------------------------------------------------------------
# serialization (module-definition files)
# ---------------------------------------------------------------------------------

def module_to_dict(module: AVModule) -> dict:
    """Serialize to the module-definition schema; omitted entries are zero."""
    terms = []
    for (i, alpha) in sorted(module.tensor):
        mat = module.tensor[(i, alpha)]
        terms.append({
            "i": i,
            "alpha": list(alpha),
            "matrix": [[str(p) for p in row] for row in mat],
        })
    return {
        "name": module.name,
        "dim": module.dim,
        "rank": module.rank,
        "order": module.order,
        "terms": terms,
    }


def module_from_dict(data: Mapping) -> AVModule:
    """Parse and validate a module-definition mapping.

    Raises ModuleSchemaError for structural problems, PolyParseError for bad
    polynomial text, and ValidationError when the bracket check fails.
    """
    if not isinstance(data, Mapping):
        raise ModuleSchemaError("module definition must be a mapping")
    for field in ("dim", "rank", "order"):
        if field not in data:
            raise ModuleSchemaError(f"missing field {field!r}")
        if not isinstance(data[field], int):
            raise ModuleSchemaError(f"field {field!r} must be an integer")
    dim = data["dim"]
    rank = data["rank"]
    order = data["order"]
    if dim < 1:
        raise ModuleSchemaError("dim must be >= 1")
    if rank < 1:
        raise ModuleSchemaError("rank must be >= 1")
    name = str(data.get("name", ""))
    terms = data.get("terms", [])
    if not isinstance(terms, (list, tuple)):
        raise ModuleSchemaError("terms must be a list")
    tensor: dict[tuple[int, MultiIndex], Matrix] = {}
    for entry in terms:
        if not isinstance(entry, Mapping):
            raise ModuleSchemaError("each term must be a mapping")
        for field in ("i", "alpha", "matrix"):
            if field not in entry:
                raise ModuleSchemaError(f"term missing field {field!r}")
        i = entry["i"]
        alpha = entry["alpha"]
        if not isinstance(i, int) or not 1 <= i <= dim:
            raise ModuleSchemaError(f"term direction {i!r} out of range 1..{dim}")
        if (not isinstance(alpha, (list, tuple)) or len(alpha) != dim
                or any(not isinstance(a, int) or a < 0 for a in alpha)):
            raise ModuleSchemaError(f"bad multi-index {alpha!r}")
        if sum(alpha) > order:
            raise ModuleSchemaError(
                f"term multi-index {alpha!r} exceeds declared order {order}")
        key = (i, tuple(alpha))
        if key in tensor:
            raise ModuleSchemaError(f"duplicate term at {key}")
        rows = entry["matrix"]
        if not isinstance(rows, (list, tuple)) or len(rows) != rank \
                or any(not isinstance(row, (list, tuple)) or len(row) != rank for row in rows):
            raise ModuleSchemaError(f"matrix at {key} is not {rank}x{rank}")
        mat = tuple(tuple(parse_poly(str(cell), dim) for cell in row) for row in rows)
        tensor[key] = mat
    module = AVModule(dim, rank, order, tensor, name=name)
    report = module.validate()
    if not report.passed:
        raise ValidationError(
            f"module {name or '<anonymous>'} failed bracket-compatibility validation",
            report)
    return module
