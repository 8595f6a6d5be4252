"""Localization of a validated module at a fixed nonzero polynomial f.

Fractions are pairs (numerator, k) standing for numerator / f^k, kept over
the single base f (principal open sets only).  Normal form cancels f from
the numerator by exact trial division; the raw constructors deliberately do
NOT reduce, so representation-independence checks can feed unreduced
representatives through the action.

The localized vector-field action is the finite series

    (eta / f^k) m  =  sum_{p=0}^{N} omega(p, f^k, eta) m / f^{k(p+1)},

cut off at the module order N: beyond it the terms annihilate because the
doubled components vanish on the diagonal to order p > N.  Elements with
denominators act through the quotient rule
(eta/f^k)(m/f^l) = -l eta(f)/f^{k+l+1} m + f^{-l} (eta/f^k)(m).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .poly import Derivation, DimensionMismatch, Poly, PolyError
from .modules import AVModule, ModuleElement
from .smash import (
    SmashElement,
    VerificationReport,
    embed_coefficient,
    embed_function,
)

__all__ = [
    "LocalizedPoly",
    "LocalizedDerivation",
    "LocalizedModuleElement",
    "LocalizedModule",
    "act_localized",
    "apply_localized_derivation",
    "extend_base",
    "verify_localized",
    "LOCALIZED_CHECK_IDS",
]


class BaseMismatch(PolyError):
    """Operands live over different localizing polynomials."""


def _check_base(a, b):
    if a.base != b.base:
        raise BaseMismatch("localized values have different bases")


class LocalizedPoly:
    """numerator / base^denom_exp, over the fixed localizing polynomial."""

    __slots__ = ("base", "numerator", "denom_exp")

    def __init__(self, base: Poly, numerator: Poly, denom_exp: int = 0):
        if base.is_zero():
            raise ZeroDivisionError("localizing polynomial must be nonzero")
        if numerator.dim != base.dim:
            raise DimensionMismatch("numerator and base disagree on dim")
        if denom_exp < 0:
            raise ValueError("denominator exponent must be nonnegative")
        self.base = base
        self.numerator = numerator
        self.denom_exp = denom_exp

    def reduce(self) -> "LocalizedPoly":
        """Normal form: cancel the base out of the numerator (value-preserving)."""
        num, k = self.numerator, self.denom_exp
        if num.is_zero():
            return LocalizedPoly(self.base, num, 0)
        while k > 0:
            q = num.exact_divide(self.base)
            if q is None:
                break
            num, k = q, k - 1
        return LocalizedPoly(self.base, num, k)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalizedPoly):
            return NotImplemented
        if self.base != other.base:
            return False
        return (self.numerator * other.base ** other.denom_exp
                == other.numerator * self.base ** self.denom_exp)

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, LocalizedPoly):
            return NotImplemented
        _check_base(self, other)
        k = max(self.denom_exp, other.denom_exp)
        num = (self.numerator * self.base ** (k - self.denom_exp)
               + other.numerator * self.base ** (k - other.denom_exp))
        return LocalizedPoly(self.base, num, k).reduce()

    def __sub__(self, other):
        if not isinstance(other, LocalizedPoly):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return LocalizedPoly(self.base, -self.numerator, self.denom_exp)

    def __mul__(self, other):
        if isinstance(other, LocalizedPoly):
            _check_base(self, other)
            return LocalizedPoly(self.base, self.numerator * other.numerator,
                                 self.denom_exp + other.denom_exp).reduce()
        if isinstance(other, (int, Fraction, Poly)):
            return LocalizedPoly(self.base, self.numerator * other, self.denom_exp).reduce()
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.denom_exp == 0:
            return str(self.numerator)
        return f"({self.numerator}) / ({self.base})^{self.denom_exp}"

    def __repr__(self) -> str:
        return f"LocalizedPoly({self})"


class LocalizedDerivation:
    """A vector field divided by a power of the base: numerator / base^k."""

    __slots__ = ("base", "numerator", "denom_exp")

    def __init__(self, base: Poly, numerator: Derivation, denom_exp: int = 0):
        if base.is_zero():
            raise ZeroDivisionError("localizing polynomial must be nonzero")
        if numerator.dim != base.dim:
            raise DimensionMismatch("numerator and base disagree on dim")
        if denom_exp < 0:
            raise ValueError("denominator exponent must be nonnegative")
        self.base = base
        self.numerator = numerator
        self.denom_exp = denom_exp

    def reduce(self) -> "LocalizedDerivation":
        """Cancel the base out of all components simultaneously."""
        num, k = self.numerator, self.denom_exp
        if num.is_zero():
            return LocalizedDerivation(self.base, num, 0)
        while k > 0:
            quots = [c.exact_divide(self.base) for c in num.coeffs]
            if any(q is None for q in quots):
                break
            num, k = Derivation(tuple(quots)), k - 1
        return LocalizedDerivation(self.base, num, k)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalizedDerivation):
            return NotImplemented
        if self.base != other.base:
            return False
        return (self.numerator * other.base ** other.denom_exp
                == other.numerator * self.base ** self.denom_exp)

    __hash__ = None

    def __str__(self) -> str:
        if self.denom_exp == 0:
            return str(self.numerator)
        return f"({self.numerator}) / ({self.base})^{self.denom_exp}"

    def __repr__(self) -> str:
        return f"LocalizedDerivation({self})"


class LocalizedModuleElement:
    """A module element divided by a power of the base: numerator / base^l."""

    __slots__ = ("base", "module", "numerator", "denom_exp")

    def __init__(self, base: Poly, module: AVModule, numerator: ModuleElement,
                 denom_exp: int = 0):
        if base.is_zero():
            raise ZeroDivisionError("localizing polynomial must be nonzero")
        module._require_validated()
        if numerator.dim != base.dim or numerator.dim != module.dim:
            raise DimensionMismatch("numerator, base and module disagree on dim")
        if numerator.rank != module.rank:
            raise DimensionMismatch("element rank does not match the module")
        if denom_exp < 0:
            raise ValueError("denominator exponent must be nonnegative")
        self.base = base
        self.module = module
        self.numerator = numerator
        self.denom_exp = denom_exp

    def reduce(self) -> "LocalizedModuleElement":
        num, l = self.numerator, self.denom_exp
        if num.is_zero():
            return LocalizedModuleElement(self.base, self.module, num, 0)
        while l > 0:
            quots = [p.exact_divide(self.base) for p in num.entries]
            if any(q is None for q in quots):
                break
            num, l = ModuleElement(tuple(quots)), l - 1
        return LocalizedModuleElement(self.base, self.module, num, l)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalizedModuleElement):
            return NotImplemented
        if self.base != other.base or self.module is not other.module:
            return False
        a = self.numerator * (self.base ** other.denom_exp)
        b = other.numerator * (other.base ** self.denom_exp)
        return a == b

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, LocalizedModuleElement):
            return NotImplemented
        _check_base(self, other)
        l = max(self.denom_exp, other.denom_exp)
        num = (self.numerator * self.base ** (l - self.denom_exp)
               + other.numerator * self.base ** (l - other.denom_exp))
        return LocalizedModuleElement(self.base, self.module, num, l).reduce()

    def __sub__(self, other):
        if not isinstance(other, LocalizedModuleElement):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return LocalizedModuleElement(self.base, self.module, -self.numerator, self.denom_exp)

    def __mul__(self, other):
        if isinstance(other, LocalizedPoly):
            _check_base(self, other)
            return LocalizedModuleElement(
                self.base, self.module, self.numerator * other.numerator,
                self.denom_exp + other.denom_exp).reduce()
        if isinstance(other, (int, Fraction, Poly)):
            return LocalizedModuleElement(
                self.base, self.module, self.numerator * other, self.denom_exp).reduce()
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.denom_exp == 0:
            return str(self.numerator)
        return f"{self.numerator} / ({self.base})^{self.denom_exp}"

    def __repr__(self) -> str:
        return f"LocalizedModuleElement({self})"


class LocalizedModule:
    """The localized module context: a validated module plus the base f."""

    __slots__ = ("module", "base")

    def __init__(self, module: AVModule, base: Poly):
        module._require_validated()
        if base.dim != module.dim:
            raise DimensionMismatch("base and module disagree on dim")
        if base.is_zero():
            raise ZeroDivisionError("localizing polynomial must be nonzero")
        self.module = module
        self.base = base

    def include(self, m: ModuleElement) -> LocalizedModuleElement:
        """Embed an integral element as m / f^0."""
        return LocalizedModuleElement(self.base, self.module, m, 0)

    def derivation(self, e: Derivation, denom_exp: int = 0) -> LocalizedDerivation:
        return LocalizedDerivation(self.base, e, denom_exp)

    def act(self, ed: LocalizedDerivation, me: LocalizedModuleElement) -> LocalizedModuleElement:
        """Apply eta/f^k through the finite annihilator series; result reduced."""
        if ed.base != self.base or me.base != self.base:
            raise BaseMismatch("operands do not belong to this localized context")
        if me.module is not self.module:
            raise BaseMismatch("element does not belong to this module")
        module, f = self.module, self.base
        k, eta = ed.denom_exp, ed.numerator
        l, m = me.denom_exp, me.numerator
        N = module.order
        d = module.dim
        if k == 0:
            series = LocalizedModuleElement(
                f, module, module.act_derivation(eta, m), l)
        else:
            fk = f ** k
            F = embed_function(fk) - embed_coefficient(fk)
            fk_pow = [Poly.constant(d, 1)]
            for _ in range(N):
                fk_pow.append(fk_pow[-1] * fk)
            Fp = Poly.constant(2 * d, 1)
            acc = ModuleElement.zero(d, module.rank)
            for p in range(N + 1):
                u = SmashElement(d, tuple(Fp * embed_coefficient(g) for g in eta.coeffs))
                term = module.act_smash(u, m)
                if not term.is_zero():
                    acc = acc + term * fk_pow[N - p]
                if p < N:
                    Fp = Fp * F
            series = LocalizedModuleElement(f, module, acc, k * (N + 1) + l)
        if l:
            etaf = eta.apply(f)
            if not etaf.is_zero():
                leib = LocalizedModuleElement(
                    f, module, (m * etaf) * (-l), k + l + 1)
                series = series + leib
        return series.reduce()


def act_localized(context: LocalizedModule, ed: LocalizedDerivation,
                  me: LocalizedModuleElement) -> LocalizedModuleElement:
    return context.act(ed, me)


def apply_localized_derivation(ed: LocalizedDerivation, a: LocalizedPoly) -> LocalizedPoly:
    """(eta/f^k)(g/f^j) = (eta(g) f - j g eta(f)) / f^{k+j+1}, reduced."""
    _check_base(ed, a)
    f = ed.base
    eta, k = ed.numerator, ed.denom_exp
    g, j = a.numerator, a.denom_exp
    num = eta.apply(g) * f - (j * g) * eta.apply(f)
    return LocalizedPoly(f, num, k + j + 1).reduce()


def extend_base(value, extra: Poly):
    """Rewrite a localized value over base f as one over base f*extra.

    n / f^k maps to n * extra^k / (f*extra)^k; used to compare localizations
    at different polynomials inside their common refinement.
    """
    if extra.is_zero():
        raise ZeroDivisionError("base factor must be nonzero")
    new_base = value.base * extra
    scale = extra ** value.denom_exp
    if isinstance(value, LocalizedPoly):
        return LocalizedPoly(new_base, value.numerator * scale, value.denom_exp)
    if isinstance(value, LocalizedDerivation):
        return LocalizedDerivation(new_base, value.numerator * scale, value.denom_exp)
    if isinstance(value, LocalizedModuleElement):
        return LocalizedModuleElement(new_base, value.module,
                                      value.numerator * scale, value.denom_exp)
    raise TypeError(f"cannot rebase {type(value).__name__}")


# ---------------------------------------------------------------------------------
# exact checks of the localized-action laws
# ---------------------------------------------------------------------------------

LOCALIZED_CHECK_IDS = (
    "welldefined",
    "leibniz",
    "bracket",
    "inverse-square",
    "inverse-cube",
    "restriction",
)


def _test_vectors(module: AVModule) -> list[ModuleElement]:
    vectors = module.basis()
    for k in range(1, module.dim + 1):
        xk = Poly.variable(module.dim, k)
        vectors.extend(xk * b for b in module.basis())
    return vectors


def _series_by_coefficients(context: LocalizedModule, eta: Derivation,
                            m: ModuleElement, weights, extra_exp: int
                            ) -> LocalizedModuleElement:
    """sum_u weights(u) * omega(u, f, eta) m / f^{u + extra_exp}, u = 0..N."""
    module, f = context.module, context.base
    N = module.order
    d = module.dim
    F = embed_function(f) - embed_coefficient(f)
    f_pow = [Poly.constant(d, 1)]
    for _ in range(N):
        f_pow.append(f_pow[-1] * f)
    Fp = Poly.constant(2 * d, 1)
    acc = ModuleElement.zero(d, module.rank)
    for u in range(N + 1):
        smash_u = SmashElement(d, tuple(Fp * embed_coefficient(g) for g in eta.coeffs))
        term = module.act_smash(smash_u, m)
        if not term.is_zero():
            acc = acc + term * (weights(u) * f_pow[N - u])
        if u < N:
            Fp = Fp * F
    return LocalizedModuleElement(f, module, acc, N + extra_exp).reduce()


def verify_localized(name: str, module: AVModule, f: Poly,
                     inputs: Mapping) -> VerificationReport:
    """Check one localized-action law exactly on a basis and x_k-multiples.

    Check ids: welldefined (representation independence of eta f^j / f^j),
    leibniz (against a localized scalar), bracket (the [eta/f, mu/f]
    expansion), inverse-square / inverse-cube (the 1/f^2 and 1/f^3 series
    re-expanded in powers of f, with weights u+1 and (u+1)(u+2)/2), and
    restriction (actions of equal representatives over two bases agree in
    the common refinement).
    """
    if name not in LOCALIZED_CHECK_IDS:
        raise ValueError(f"unknown localized check id {name!r}")
    module._require_validated()
    if f.is_zero():
        raise ZeroDivisionError("localizing polynomial must be nonzero")
    context = LocalizedModule(module, f)
    echoed = {"module": module.name or "<anonymous>", "f": str(f)}
    for key in ("eta", "mu", "g", "j", "k", "a_num", "a_exp", "eta_exp", "mu_exp"):
        if key in inputs:
            echoed[key] = str(inputs[key])

    def done(witness: Optional[dict]) -> VerificationReport:
        return VerificationReport(
            identity=f"localized-{name}", inputs=echoed,
            status="pass" if witness is None else "fail", witness=witness)

    def require(*keys):
        missing = [k for k in keys if k not in inputs]
        if missing:
            raise ValueError(f"missing binding {missing[0]!r} for check {name!r}")
        return [inputs[k] for k in keys]

    vectors = _test_vectors(module)

    if name == "welldefined":
        (eta,) = require("eta")
        j = int(inputs.get("j", 1))
        if j < 1:
            raise ValueError("welldefined needs j >= 1")
        scaled = LocalizedDerivation(f, (f ** j) * eta, j)  # unreduced on purpose
        plain = LocalizedDerivation(f, eta, 0)
        for v in vectors:
            me = context.include(v)
            lhs = context.act(scaled, me)
            rhs = context.act(plain, me)
            if lhs != rhs:
                return done({"vector": str(v), "difference": str(lhs - rhs)})
        return done(None)

    if name == "leibniz":
        eta, a_num = require("eta", "a_num")
        k = int(inputs.get("k", 1))
        a = LocalizedPoly(f, a_num, int(inputs.get("a_exp", 1)))
        ed = LocalizedDerivation(f, eta, k)
        da = apply_localized_derivation(ed, a)
        for v in vectors:
            me = context.include(v)
            lhs = context.act(ed, a * me)
            rhs = da * me + a * context.act(ed, me)
            if lhs != rhs:
                return done({"vector": str(v), "difference": str(lhs - rhs)})
        return done(None)

    if name == "bracket":
        eta, mu = require("eta", "mu")
        ed = LocalizedDerivation(f, eta, 1)
        md = LocalizedDerivation(f, mu, 1)
        rhs_parts = (
            LocalizedDerivation(f, -eta.apply(f) * mu, 3),
            LocalizedDerivation(f, mu.apply(f) * eta, 3),
            LocalizedDerivation(f, eta.bracket(mu), 2),
        )
        for v in vectors:
            me = context.include(v)
            lhs = context.act(ed, context.act(md, me)) - context.act(md, context.act(ed, me))
            rhs = context.act(rhs_parts[0], me) + context.act(rhs_parts[1], me) \
                + context.act(rhs_parts[2], me)
            if lhs != rhs:
                return done({"vector": str(v), "difference": str(lhs - rhs)})
        return done(None)

    if name in ("inverse-square", "inverse-cube"):
        (eta,) = require("eta")
        if name == "inverse-square":
            k, weights = 2, (lambda u: u + 1)
        else:
            k, weights = 3, (lambda u: (u + 1) * (u + 2) // 2)
        ed = LocalizedDerivation(f, eta, k)
        for v in vectors:
            lhs = context.act(ed, context.include(v))
            rhs = _series_by_coefficients(context, eta, v, weights, k)
            if lhs != rhs:
                return done({"vector": str(v), "difference": str(lhs - rhs)})
        return done(None)

    # restriction
    eta, mu, g = require("eta", "mu", "g")
    if g.is_zero():
        raise ZeroDivisionError("second localizing polynomial must be nonzero")
    a = int(inputs.get("eta_exp", 0))
    b = int(inputs.get("mu_exp", 0))
    if eta * (g ** b) != mu * (f ** a):
        raise ValueError("representatives are not equal in the common localization")
    context_g = LocalizedModule(module, g)
    ed_f = LocalizedDerivation(f, eta, a)
    ed_g = LocalizedDerivation(g, mu, b)
    for v in vectors:
        lhs = extend_base(context.act(ed_f, context.include(v)), g)
        rhs = extend_base(context_g.act(ed_g, context_g.include(v)), f)
        if lhs != rhs:  # f*g == g*f structurally, so both live over the same base
            return done({"vector": str(v), "difference": str(lhs - rhs)})
    return done(None)
