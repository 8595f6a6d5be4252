"""The Lie algebra of function#vector-field pairs in canonical form.

An element sum_j f_j # eta_j (f_j a polynomial, eta_j a vector field in d
variables) is stored as d polynomials in 2d doubled variables: component i
collects sum_j f_j(x1..xd) * g_{j,i}(y1..yd), where g_{j,i} is the i-th
coefficient of eta_j.  The x-block carries the function tensor factor and
the y-block the vector-field coefficients, so two elements are equal exactly
when all d doubled polynomials are equal, and the A(x)A action
(a(x)b)(f # eta) = af # b*eta is plain multiplication by a(x)*b(y).

In this form the annihilator generators have closed components::

    omega(p, f, eta)      ->  (f(x) - f(y))^p * g_i(y)
    omega_multi(fs, eta)  ->  prod_j (f_j(x) - f_j(y)) * g_i(y)

and the commutator bracket is a first-order differential expression in the
doubled polynomials (derived by expanding [f#eta, g#mu] = fg#[eta,mu]
+ f*eta(g)#mu - g*mu(f)#eta term by term and collecting components).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Optional, Sequence

from .poly import (
    Coeff,
    Derivation,
    DimensionMismatch,
    Poly,
    _FIELD,
    _clean,
    _unpack,
)

__all__ = [
    "SmashElement",
    "VerificationReport",
    "from_term",
    "smash_bracket",
    "omega",
    "omega_definitional",
    "omega_multi",
    "omega_multi_definitional",
    "tensor_act",
    "function_commutator",
    "verify_identity",
    "IDENTITY_IDS",
    "embed_function",
    "embed_coefficient",
    "restrict_to_diagonal",
    "format_xy",
]


# -- packed-key block surgery ------------------------------------------------------
#
# A d-variable key is [deg | e1..ed]; a 2d-variable key is [deg | e1..ed | f1..fd].
# Fields are 16 bits, so shifting whole blocks moves exponents between the x- and
# y-blocks without unpacking.

def _embed_x_key(key: int, d: int) -> int:
    return key << (_FIELD * d)


def _embed_y_key(key: int, d: int) -> int:
    low = key & ((1 << (_FIELD * d)) - 1)
    deg = key >> (_FIELD * d)
    return (deg << (_FIELD * 2 * d)) | low


def embed_function(p: Poly) -> Poly:
    """View a d-variable polynomial as f(x) inside the doubled 2d variables."""
    d = p.dim
    return Poly._raw(2 * d, {_embed_x_key(k, d): c for k, c in p.terms.items()})


def embed_coefficient(p: Poly) -> Poly:
    """View a d-variable polynomial as g(y) inside the doubled 2d variables."""
    d = p.dim
    return Poly._raw(2 * d, {_embed_y_key(k, d): c for k, c in p.terms.items()})


def restrict_to_diagonal(p: Poly) -> Poly:
    """Substitute y := x in a doubled polynomial, returning a d-variable one."""
    if p.dim % 2:
        raise DimensionMismatch("diagonal restriction needs a doubled polynomial")
    d = p.dim // 2
    block = (1 << (_FIELD * d)) - 1
    out: dict[int, Coeff] = {}
    get = out.get
    for k, c in p.terms.items():
        deg = k >> (_FIELD * 2 * d)
        xpart = (k >> (_FIELD * d)) & block
        ypart = k & block
        kk = (deg << (_FIELD * d)) | (xpart + ypart)
        out[kk] = get(kk, 0) + c
    return Poly._raw(d, _clean(out))


def _diagonal_in_x(p: Poly, d: int) -> Poly:
    """y := x substitution kept inside the 2d variables (y-exponents zero)."""
    block = (1 << (_FIELD * d)) - 1
    out: dict[int, Coeff] = {}
    get = out.get
    for k, c in p.terms.items():
        deg = k >> (_FIELD * 2 * d)
        xpart = (k >> (_FIELD * d)) & block
        ypart = k & block
        kk = (deg << (_FIELD * 2 * d)) | ((xpart + ypart) << (_FIELD * d))
        out[kk] = get(kk, 0) + c
    return Poly._raw(2 * d, _clean(out))


def format_xy(p: Poly, d: int) -> str:
    """Render a doubled polynomial with variables named x1..xd, y1..yd."""
    if p.is_zero():
        return "0"
    parts = []
    for key in sorted(p.terms, reverse=True):
        c = p.terms[key]
        neg = c < 0
        mag = -c if neg else c
        exps = _unpack(key, 2 * d)
        names = [f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(d)]
        factors = "*".join(
            f"{names[i]}^{e}" if e > 1 else names[i]
            for i, e in enumerate(exps) if e)
        if factors and mag == 1:
            body = factors
        elif factors:
            body = f"{mag}*{factors}"
        else:
            body = str(mag)
        parts.append((("-" if neg else "") if not parts else (" - " if neg else " + ")) + body)
    return "".join(parts)


class SmashElement:
    """Canonical form of an element of the function#vector-field Lie algebra."""

    __slots__ = ("dim", "components")

    def __init__(self, dim: int, components: Iterable[Poly]):
        components = tuple(components)
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        if len(components) != dim:
            raise DimensionMismatch(f"{len(components)} components for dim {dim}")
        if any(c.dim != 2 * dim for c in components):
            raise DimensionMismatch("components must live in 2*dim doubled variables")
        self.dim = dim
        self.components = components

    @classmethod
    def zero(cls, dim: int) -> "SmashElement":
        z = Poly.zero(2 * dim)
        return cls(dim, (z,) * dim)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashElement):
            return NotImplemented
        return self.dim == other.dim and self.components == other.components

    __hash__ = None

    def _check(self, other: "SmashElement"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, SmashElement):
            return NotImplemented
        self._check(other)
        return SmashElement(self.dim, (a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        if not isinstance(other, SmashElement):
            return NotImplemented
        self._check(other)
        return SmashElement(self.dim, (a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return SmashElement(self.dim, (-c for c in self.components))

    def __mul__(self, scalar):
        if isinstance(scalar, (int, Fraction)):
            return SmashElement(self.dim, (c * scalar for c in self.components))
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self) -> str:
        body = ", ".join(format_xy(c, self.dim) for c in self.components)
        return f"[{body}]"

    def __repr__(self) -> str:
        return f"SmashElement({self.dim}, {self})"


def from_term(f: Poly, e: Derivation) -> SmashElement:
    """The single term f # e, with component i equal to f(x)*g_i(y)."""
    if f.dim != e.dim:
        raise DimensionMismatch(f"dim {f.dim} vs {e.dim}")
    fx = embed_function(f)
    return SmashElement(f.dim, (fx * embed_coefficient(g) for g in e.coeffs))


def tensor_act(a: Poly, b: Poly, u: SmashElement) -> SmashElement:
    """(a tensor b) acting by af # b*eta: multiply component i by a(x)*b(y)."""
    if a.dim != u.dim or b.dim != u.dim:
        raise DimensionMismatch(f"dim {a.dim}/{b.dim} vs {u.dim}")
    factor = embed_function(a) * embed_coefficient(b)
    return SmashElement(u.dim, (factor * c for c in u.components))


def smash_bracket(u: SmashElement, v: SmashElement) -> SmashElement:
    """Commutator bracket, computed on canonical components.

    With P_i, Q_i the components of u, v, component l of [u, v] is

        sum_i ( P_i dQ_l/dy_i - Q_i dP_l/dy_i
              + P_i|_{y=x} dQ_l/dx_i - Q_i|_{y=x} dP_l/dx_i ).

    The first pair comes from the vector-field bracket, the second from the
    eta(g) / mu(f) cross terms (where the function slot collapses products
    onto the diagonal).
    """
    u._check(v)
    d = u.dim
    P = u.components
    Q = v.components
    diagP = [_diagonal_in_x(p, d) if p.terms else p for p in P]
    diagQ = [_diagonal_in_x(q, d) if q.terms else q for q in Q]
    out = []
    for l in range(d):
        acc = Poly.zero(2 * d)
        Ql = Q[l]
        Pl = P[l]
        for i in range(d):
            if P[i].terms:
                dq = Ql.partial_derivative(d + i + 1)
                if dq.terms:
                    acc = acc + P[i] * dq
            if Q[i].terms:
                dp = Pl.partial_derivative(d + i + 1)
                if dp.terms:
                    acc = acc - Q[i] * dp
            if diagP[i].terms:
                dqx = Ql.partial_derivative(i + 1)
                if dqx.terms:
                    acc = acc + diagP[i] * dqx
            if diagQ[i].terms:
                dpx = Pl.partial_derivative(i + 1)
                if dpx.terms:
                    acc = acc - diagQ[i] * dpx
        out.append(acc)
    return SmashElement(d, out)


def omega(p: int, f: Poly, e: Derivation) -> SmashElement:
    """The annihilator element of level p for the pair (f, eta).

    Defined by the alternating sum over k of (-1)^k C(p,k) f^{p-k} # f^k eta;
    in canonical form component i is (f(x) - f(y))^p * g_i(y), which is what
    this constructor computes.  Level 0 is the plain embedding 1 # eta.
    """
    if p < 0:
        raise ValueError("level p must be nonnegative")
    if f.dim != e.dim:
        raise DimensionMismatch(f"dim {f.dim} vs {e.dim}")
    F = embed_function(f) - embed_coefficient(f)
    Fp = F ** p
    return SmashElement(f.dim, (Fp * embed_coefficient(g) for g in e.coeffs))


def omega_definitional(p: int, f: Poly, e: Derivation) -> SmashElement:
    """Same element built literally from the alternating binomial sum.

    Kept separate from omega() as the second route of the closed-form
    coherence check; do not fold the two together.
    """
    if p < 0:
        raise ValueError("level p must be nonnegative")
    if f.dim != e.dim:
        raise DimensionMismatch(f"dim {f.dim} vs {e.dim}")
    acc = SmashElement.zero(f.dim)
    fpow = [Poly.constant(f.dim, 1)]
    for _ in range(p):
        fpow.append(fpow[-1] * f)
    for k in range(p + 1):
        term = from_term(fpow[p - k], fpow[k] * e)
        acc = acc + ((-1) ** k * comb(p, k)) * term
    return acc


def omega_multi(fs: Sequence[Poly], e: Derivation) -> SmashElement:
    """Product form over several functions: component i is
    prod_j (f_j(x) - f_j(y)) * g_i(y).  Coincides with omega(p, f, e) when
    all p functions equal f."""
    fs = tuple(fs)
    if not fs:
        raise ValueError("need at least one function")
    dim = e.dim
    prod = Poly.constant(2 * dim, 1)
    for f in fs:
        if f.dim != dim:
            raise DimensionMismatch(f"dim {f.dim} vs {dim}")
        prod = prod * (embed_function(f) - embed_coefficient(f))
    return SmashElement(dim, (prod * embed_coefficient(g) for g in e.coeffs))


def omega_multi_definitional(fs: Sequence[Poly], e: Derivation) -> SmashElement:
    """Product form built one factor at a time through the tensor action,
    u -> (f tensor 1)u - (1 tensor f)u.  Second route for coherence checks."""
    fs = tuple(fs)
    if not fs:
        raise ValueError("need at least one function")
    one = Poly.constant(e.dim, 1)
    u = from_term(one, e)
    for f in fs:
        u = tensor_act(f, one, u) - tensor_act(one, f, u)
    return u


def function_commutator(u: SmashElement, g: Poly) -> Poly:
    """The pure-function part of [u, g#1], as a polynomial in x1..xd.

    For u = sum f#eta the commutator is sum f*eta(g) # 1; the vector-field
    part cancels identically.  Returns sum_i (P_i(x,y) * dg/dx_i(y))|_{y=x}.
    """
    if g.dim != u.dim:
        raise DimensionMismatch(f"dim {g.dim} vs {u.dim}")
    acc = Poly.zero(u.dim)
    for i in range(u.dim):
        gi = g.partial_derivative(i + 1)
        if gi.terms and u.components[i].terms:
            acc = acc + restrict_to_diagonal(u.components[i] * embed_coefficient(gi))
    return acc


# ---------------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one exact identity check.

    ``witness`` holds the serialized nonzero difference when the check fails
    and is None exactly when the status is "pass".
    """

    identity: str
    inputs: dict
    status: str
    witness: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        out = {"identity": self.identity, "inputs": dict(self.inputs), "status": self.status}
        if self.witness is not None:
            out["witness"] = dict(self.witness)
        return out


def _smash_witness(diff: SmashElement) -> Optional[dict]:
    if diff.is_zero():
        return None
    return {"difference": str(diff)}


def _check_lemma2(f, g, eta, p):
    if p < 1:
        raise ValueError("lemma2-commute-A needs p >= 1")
    w = function_commutator(omega(p, f, eta), g)
    return None if w.is_zero() else {"scalar_part": str(w)}


def _lemma3_rhs(f, eta, mu, p, q):
    rhs = omega(p + q, f, eta.bracket(mu))
    rhs = rhs + p * omega(p + q - 1, f, mu.apply(f) * eta)
    rhs = rhs - q * omega(p + q - 1, f, eta.apply(f) * mu)
    return rhs


def _check_lemma3(f, eta, mu, p, q):
    if p < 1 or q < 1:
        raise ValueError("lemma3-commutator needs p, q >= 1")
    lhs = smash_bracket(omega(p, f, eta), omega(q, f, mu))
    return _smash_witness(lhs - _lemma3_rhs(f, eta, mu, p, q))


def _check_lemma4_1(f, g, eta, mu, p, q):
    if p < 1 or q < 1:
        raise ValueError("lemma4-1 needs p, q >= 1")
    lhs = smash_bracket(omega(p, f, eta), omega(q, f, g * mu)) \
        - smash_bracket(omega(p, f, g * eta), omega(q, f, mu))
    rhs = omega(p + q, f, eta.apply(g) * mu + mu.apply(g) * eta)
    return _smash_witness(lhs - rhs)


def _check_lemma4_2(f, g, h, eta, p, q):
    # Stated with the two brackets in the orientation the proof establishes:
    # [omega_p(f,eta), omega_q(f,gh eta)] - [omega_p(f,g eta), omega_q(f,h eta)].
    if p < 1 or q < 1:
        raise ValueError("lemma4-2 needs p, q >= 1")
    lhs = smash_bracket(omega(p, f, eta), omega(q, f, (g * h) * eta)) \
        - smash_bracket(omega(p, f, g * eta), omega(q, f, h * eta))
    rhs = 2 * omega(p + q, f, (h * eta.apply(g)) * eta)
    return _smash_witness(lhs - rhs)


def _check_lemma4_3(f, g, eta, p, q):
    if p < 1 or q < 1:
        raise ValueError("lemma4-3 needs p, q >= 1")
    lhs = smash_bracket(omega(p, f, eta), omega(q, f, g * eta)) \
        - smash_bracket(omega(p, f, g * eta), omega(q, f, eta))
    rhs = 2 * omega(p + q, f, eta.apply(g) * eta)
    return _smash_witness(lhs - rhs)


def _check_lemma4_4(f, g, h, eta, p, q):
    if p < 1 or q < 1:
        raise ValueError("lemma4-4 needs p, q >= 1")
    eh = eta.apply(h)
    lhs = smash_bracket(omega(p, f, eta), omega(q, f, (g * eh) * eta)) \
        - smash_bracket(omega(p, f, g * eta), omega(q, f, eh * eta))
    rhs = 2 * omega(p + q, f, (eta.apply(g) * eh) * eta)
    return _smash_witness(lhs - rhs)


def _check_lemma4_5(f, g, h, eta, p, q):
    if p + q < 1:
        raise ValueError("lemma4-5 needs p + q >= 1")
    eh = eta.apply(h)
    lhs = omega(p + q, f, (g * eta.apply(eh)) * eta)
    rhs = omega(p + q, f, eta.apply(g * eh) * eta) \
        - omega(p + q, f, (eta.apply(g) * eh) * eta)
    return _smash_witness(lhs - rhs)


def _check_lemma5(f, eta, mu, p):
    if p < 1:
        raise ValueError("lemma5-deriv-bracket needs p >= 1")
    one = Poly.constant(f.dim, 1)
    lhs = smash_bracket(omega(p, f, eta), from_term(one, mu))
    muf = mu.apply(f)
    rhs = omega(p, f, eta.bracket(mu))
    rhs = rhs + p * omega(p - 1, f, muf * eta)
    rhs = rhs - p * tensor_act(muf, one, omega(p - 1, f, eta))
    return _smash_witness(lhs - rhs)


def _check_lemma4p1(f, eta, p):
    if p < 0:
        raise ValueError("lemma4.1-recurrence needs p >= 0")
    one = Poly.constant(f.dim, 1)
    lhs = omega(p, f, f * eta)
    rhs = tensor_act(f, one, omega(p, f, eta)) - omega(p + 1, f, eta)
    return _smash_witness(lhs - rhs)


_IDENTITIES = {
    "lemma2-commute-A": (("f", "g", "eta", "p"), _check_lemma2),
    "lemma3-commutator": (("f", "eta", "mu", "p", "q"), _check_lemma3),
    "lemma4-1": (("f", "g", "eta", "mu", "p", "q"), _check_lemma4_1),
    "lemma4-2": (("f", "g", "h", "eta", "p", "q"), _check_lemma4_2),
    "lemma4-3": (("f", "g", "eta", "p", "q"), _check_lemma4_3),
    "lemma4-4": (("f", "g", "h", "eta", "p", "q"), _check_lemma4_4),
    "lemma4-5": (("f", "g", "h", "eta", "p", "q"), _check_lemma4_5),
    "lemma5-deriv-bracket": (("f", "eta", "mu", "p"), _check_lemma5),
    "lemma4.1-recurrence": (("f", "eta", "p"), _check_lemma4p1),
}

IDENTITY_IDS = tuple(_IDENTITIES)


def verify_identity(name: str, inputs: Mapping) -> VerificationReport:
    """Check one named bracket identity exactly on the given bound values.

    ``inputs`` must bind every free symbol of the identity (f, g, h
    polynomials; eta, mu derivations; p, q integer levels).  Returns a
    report whose witness is the nonzero difference on failure.
    """
    try:
        symbols, checker = _IDENTITIES[name]
    except KeyError:
        raise ValueError(f"unknown identity id {name!r}") from None
    missing = [s for s in symbols if s not in inputs]
    if missing:
        raise ValueError(f"missing binding {missing[0]!r} for identity {name!r}")
    bound = {s: inputs[s] for s in symbols}
    witness = checker(**bound)
    echoed = {k: str(v) for k, v in bound.items()}
    return VerificationReport(
        identity=name,
        inputs=echoed,
        status="pass" if witness is None else "fail",
        witness=witness,
    )
