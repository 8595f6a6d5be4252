"""Exact sparse multivariate polynomials over the rationals, and derivations.

A polynomial in ``dim`` variables x1..x<dim> is a dictionary mapping packed
exponent keys to nonzero rational coefficients.  Coefficients are Python
``int`` whenever the value is integral and ``fractions.Fraction`` otherwise,
so identity checks are exact and the common integer case stays fast.

Exponent packing: a monomial x1^e1 * ... * xn^en is stored as a single
integer with n+1 fields of 16 bits, the total degree occupying the topmost
field::

    key = (e1+...+en) << 16*n  |  e1 << 16*(n-1)  |  ...  |  en

Because the degree field is most significant, comparing keys as integers is
exactly the graded-lexicographic order with x1 > x2 > ... > xn, and adding
two keys multiplies the monomials (fields never carry for the degrees that
occur here; see ``_MAX_EXPONENT``).

A derivation g1*d1 + ... + gn*dn is a tuple of coefficient polynomials,
where d<i> denotes the partial derivative in x<i>.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Iterator, Sequence, Union

Coeff = Union[int, Fraction]
MultiIndex = tuple[int, ...]

_FIELD = 16
_MASK = (1 << _FIELD) - 1

# Public constructors reject exponents above this; products of such
# polynomials stay below the 16-bit field limit for any power computed here.
_MAX_EXPONENT = 1 << 14


class PolyError(ValueError):
    """Base class for errors raised by this package."""


class DimensionMismatch(PolyError):
    """Operands live over different numbers of variables."""


class PolyParseError(PolyError):
    """Input text does not match the polynomial grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _norm(c: Coeff) -> Coeff:
    """Collapse integral Fractions to int; leave everything else alone."""
    return c.numerator if c.denominator == 1 else c


def _clean(terms: dict) -> dict:
    """Drop zero coefficients and normalize integral Fractions, in place."""
    dead = []
    for k, c in terms.items():
        if not c:
            dead.append(k)
        elif type(c) is not int and c.denominator == 1:
            terms[k] = c.numerator
    for k in dead:
        del terms[k]
    return terms


def _pack(exps: Sequence[int]) -> int:
    key = 0
    deg = 0
    for e in exps:
        key = (key << _FIELD) | e
        deg += e
    return (deg << (_FIELD * len(exps))) | key


def _unpack(key: int, dim: int) -> MultiIndex:
    return tuple((key >> (_FIELD * (dim - 1 - i))) & _MASK for i in range(dim))


class Poly:
    """An immutable exact polynomial in x1..x<dim> with rational coefficients.

    Values never mutate after construction; every operation returns a new
    Poly, so instances may be freely shared across threads.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[MultiIndex, Coeff] | None = None):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        self.dim = dim
        packed: dict[int, Coeff] = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != dim:
                    raise DimensionMismatch(
                        f"exponent tuple {exps} has length {len(exps)}, expected {dim}")
                if any(e < 0 or e >= _MAX_EXPONENT for e in exps):
                    raise ValueError(f"exponent out of range in {exps}")
                c = Fraction(c) if not isinstance(c, (int, Fraction)) else c
                packed[_pack(exps)] = packed.get(_pack(exps), 0) + c
        self.terms = _clean(packed)

    # -- fast internal constructor -------------------------------------------------

    @classmethod
    def _raw(cls, dim: int, packed: dict[int, Coeff]) -> "Poly":
        p = object.__new__(cls)
        p.dim = dim
        p.terms = packed
        return p

    @classmethod
    def zero(cls, dim: int) -> "Poly":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c: Coeff) -> "Poly":
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw(dim, {0: c} if c else {})

    @classmethod
    def variable(cls, dim: int, i: int) -> "Poly":
        """The polynomial x<i>, with 1 <= i <= dim."""
        if not 1 <= i <= dim:
            raise ValueError(f"variable index {i} out of range 1..{dim}")
        return cls.monomial(dim, tuple(1 if j == i - 1 else 0 for j in range(dim)))

    @classmethod
    def monomial(cls, dim: int, exps: Sequence[int], c: Coeff = 1) -> "Poly":
        return cls(dim, {tuple(exps): c})

    # -- queries -------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(k >> (_FIELD * self.dim) == 0 for k in self.terms)

    def constant_value(self) -> Coeff:
        """The coefficient of the constant monomial."""
        return self.terms.get(0, 0)

    def total_degree(self) -> int:
        """Largest total degree of a term, or -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(self.terms) >> (_FIELD * self.dim)

    def coefficient(self, exps: Sequence[int]) -> Coeff:
        return self.terms.get(_pack(tuple(exps)), 0)

    def items(self) -> list[tuple[MultiIndex, Coeff]]:
        """(exponent, coefficient) pairs in descending graded-lex order."""
        return [(_unpack(k, self.dim), self.terms[k]) for k in sorted(self.terms, reverse=True)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    __hash__ = None  # mutable-dict-backed; never used as a key

    # -- arithmetic ----------------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.dim, other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        get = out.get
        for k, c in other.terms.items():
            out[k] = get(k, 0) + c
        return Poly._raw(self.dim, _clean(out))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.dim, other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        get = out.get
        for k, c in other.terms.items():
            out[k] = get(k, 0) - c
        return Poly._raw(self.dim, _clean(out))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly._raw(self.dim, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            a, b = self.terms, other.terms
            if not a or not b:
                return Poly.zero(self.dim)
            out: dict[int, Coeff] = {}
            get = out.get
            for ka, ca in a.items():
                for kb, cb in b.items():
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
            return Poly._raw(self.dim, _clean(out))
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly.zero(self.dim)
            return Poly._raw(self.dim, _clean({k: c * other for k, c in self.terms.items()}))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def partial_derivative(self, i: int) -> "Poly":
        """Exact partial derivative with respect to x<i> (1-based)."""
        if not 1 <= i <= self.dim:
            raise ValueError(f"variable index {i} out of range 1..{self.dim}")
        sh = _FIELD * (self.dim - i)
        drop = (1 << sh) + (1 << (_FIELD * self.dim))
        out: dict[int, Coeff] = {}
        for k, c in self.terms.items():
            e = (k >> sh) & _MASK
            if e:
                out[k - drop] = _norm(c * e) if type(c) is not int else c * e
        return Poly._raw(self.dim, out)

    def exact_divide(self, divisor: "Poly") -> "Poly | None":
        """Quotient self/divisor when the division is exact, else None."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return Poly.zero(self.dim)
        dlead = max(divisor.terms)
        dexp = _unpack(dlead, self.dim)
        dc = divisor.terms[dlead]
        rem = dict(self.terms)
        quot: dict[int, Coeff] = {}
        while rem:
            lead = max(rem)
            lexp = _unpack(lead, self.dim)
            if any(le < de for le, de in zip(lexp, dexp)):
                return None
            c = _norm(Fraction(rem[lead]) / Fraction(dc))
            qk = lead - dlead
            quot[qk] = c
            get = rem.get
            for k, dcf in divisor.terms.items():
                kk = qk + k
                v = get(kk, 0) - c * dcf
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return Poly._raw(self.dim, _clean(quot))

    def evaluate(self, point: Sequence[Coeff]) -> Coeff:
        """Exact value at a rational point (one value per variable)."""
        if len(point) != self.dim:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.dim}")
        vals = [Fraction(v) for v in point]
        total: Coeff = 0
        for k, c in self.terms.items():
            term = c
            for i in range(self.dim):
                e = (k >> (_FIELD * (self.dim - 1 - i))) & _MASK
                if e:
                    term *= vals[i] ** e
            total += term
        return _norm(Fraction(total))

    # -- text form -----------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            c = self.terms[key]
            neg = c < 0
            mag = -c if neg else c
            exps = _unpack(key, self.dim)
            factors = "*".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}"
                for i, e in enumerate(exps) if e)
            if factors and mag == 1:
                body = factors
            elif factors:
                body = f"{mag}*{factors}"
            else:
                body = str(mag)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {str(self)!r})"


# ---------------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------------

_WS = " \t\r\n"
_SIGNS = "+-−"  # ASCII minus and the typographic minus both accepted


def parse_poly(text: str, dim: int) -> Poly:
    """Parse the flat polynomial grammar.

    term ::= [sign] (rational | [rational "*"] factor ("*" factor)*)
    factor ::= "x"<index> ["^"<exponent>]     rational ::= int ["/" positive-int]

    Terms are joined by "+"/"-"; whitespace is ignored; no parentheses.
    Raises PolyParseError with the offending position on bad input.
    """
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    n = len(text)
    terms: dict[int, Coeff] = {}

    def skip_ws(i: int) -> int:
        while i < n and text[i] in _WS:
            i += 1
        return i

    def read_int(i: int, what: str) -> tuple[int, int]:
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j == i:
            raise PolyParseError(f"expected {what}", i)
        return int(text[i:j]), j

    def read_factor(i: int, exps: list[int]) -> int:
        # caller guarantees text[i] == "x"
        pos = i
        idx, i = read_int(i + 1, "variable index")
        if not 1 <= idx <= dim:
            raise PolyParseError(f"variable index x{idx} out of range 1..{dim}", pos)
        e = 1
        if i < n and text[i] == "^":
            e, i = read_int(i + 1, "exponent")
            if e >= _MAX_EXPONENT:
                raise PolyParseError("exponent too large", pos)
        exps[idx - 1] += e
        return i

    i = skip_ws(0)
    if i == n:
        raise PolyParseError("empty polynomial", 0)
    first = True
    while True:
        i = skip_ws(i)
        sign = 1
        if i < n and text[i] in _SIGNS:
            if text[i] != "+":
                sign = -1
            i = skip_ws(i + 1)
        elif not first:
            raise PolyParseError("expected '+' or '-' between terms", i)
        first = False
        coeff: Coeff = 1
        exps = [0] * dim
        if i < n and text[i].isdigit():
            num, i = read_int(i, "number")
            den = 1
            if i < n and text[i] == "/":
                pos = i
                den, i = read_int(i + 1, "denominator")
                if den == 0:
                    raise PolyParseError("zero denominator", pos)
            coeff = _norm(Fraction(num, den))
            i = skip_ws(i)
            if i < n and text[i] == "*":
                i = skip_ws(i + 1)
                if i >= n or text[i] != "x":
                    raise PolyParseError("expected variable after '*'", i)
                i = read_factor(i, exps)
        elif i < n and text[i] == "x":
            i = read_factor(i, exps)
        else:
            raise PolyParseError("expected a term", i)
        # further "*"-joined factors
        while True:
            j = skip_ws(i)
            if j < n and text[j] == "*":
                j = skip_ws(j + 1)
                if j >= n or text[j] != "x":
                    raise PolyParseError("expected variable after '*'", j)
                i = read_factor(j, exps)
            else:
                i = j
                break
        key = _pack(exps)
        terms[key] = terms.get(key, 0) + sign * coeff
        i = skip_ws(i)
        if i == n:
            break
        if text[i] not in _SIGNS:
            raise PolyParseError(f"unexpected character {text[i]!r}", i)
    return Poly._raw(dim, _clean(terms))


# ---------------------------------------------------------------------------------
# derivations
# ---------------------------------------------------------------------------------

class Derivation:
    """A polynomial vector field g1*d1 + ... + g<dim>*d<dim>.

    Immutable; ``coeffs[i-1]`` is the coefficient of the partial derivative
    in x<i>.
    """

    __slots__ = ("dim", "coeffs")

    def __init__(self, coeffs: Iterable[Poly]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a derivation needs at least one component")
        dim = coeffs[0].dim
        if any(c.dim != dim for c in coeffs):
            raise DimensionMismatch("derivation components disagree on dim")
        if len(coeffs) != dim:
            raise DimensionMismatch(
                f"{len(coeffs)} components for {dim} variables")
        self.dim = dim
        self.coeffs = coeffs

    @classmethod
    def zero(cls, dim: int) -> "Derivation":
        return cls(tuple(Poly.zero(dim) for _ in range(dim)))

    @classmethod
    def partial(cls, dim: int, i: int) -> "Derivation":
        """The coordinate vector field d<i>."""
        if not 1 <= i <= dim:
            raise ValueError(f"variable index {i} out of range 1..{dim}")
        return cls(tuple(Poly.constant(dim, 1 if j == i - 1 else 0) for j in range(dim)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    __hash__ = None

    def apply(self, p: Poly) -> Poly:
        """eta(p) = sum_i g_i * dp/dx_i; satisfies the Leibniz rule exactly."""
        if p.dim != self.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {p.dim}")
        out = Poly.zero(self.dim)
        for i, g in enumerate(self.coeffs, start=1):
            if g.terms:
                out = out + g * p.partial_derivative(i)
        return out

    def bracket(self, other: "Derivation") -> "Derivation":
        """Lie bracket of vector fields: component j is self(other_j) - other(self_j)."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")
        return Derivation(tuple(
            self.apply(other.coeffs[j]) - other.apply(self.coeffs[j])
            for j in range(self.dim)))

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")
        return Derivation(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")
        return Derivation(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Derivation(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        """Scaling by a polynomial or rational: (g*eta) = sum g*g_i d_i."""
        if isinstance(other, (int, Fraction, Poly)):
            return Derivation(tuple(c * other for c in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.is_zero():
            return "0*d1"
        parts = []
        for i, g in enumerate(self.coeffs, start=1):
            for key in sorted(g.terms, reverse=True):
                c = g.terms[key]
                neg = c < 0
                mag = -c if neg else c
                exps = _unpack(key, self.dim)
                factors = "*".join(
                    f"x{j + 1}^{e}" if e > 1 else f"x{j + 1}"
                    for j, e in enumerate(exps) if e)
                body = f"d{i}"
                if factors:
                    body = f"{factors}*{body}"
                if mag != 1:
                    body = f"{mag}*{body}"
                if not parts:
                    parts.append(("-" if neg else "") + body)
                else:
                    parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Derivation({self.dim}, {str(self)!r})"


def parse_derivation(text: str, dim: int) -> Derivation:
    """Parse 'x1^2*d1 + 3/2*d2' style vector-field text.

    Each term is a polynomial term from the flat grammar whose final factor
    is d<i> naming the coordinate direction.
    """
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    n = len(text)
    comps = [Poly.zero(dim) for _ in range(dim)]

    i = 0
    while i < n and text[i] in _WS:
        i += 1
    if i == n:
        raise PolyParseError("empty derivation", 0)
    first = True
    while i < n:
        # split off one signed term ending at the next top-level sign
        j = i
        if text[j] in _SIGNS:
            j += 1
        while j < n and text[j] not in _SIGNS:
            j += 1
        chunk = text[i:j].strip()
        if not chunk:
            raise PolyParseError("expected a term", i)
        sign = 1
        body = chunk
        if body[0] in _SIGNS:
            if body[0] != "+":
                sign = -1
            body = body[1:].strip()
        elif not first:
            raise PolyParseError("expected '+' or '-' between terms", i)
        first = False
        # the trailing factor must be d<index>
        k = body.rfind("d")
        if k < 0:
            raise PolyParseError("term does not end in d<index>", i)
        idx_text = body[k + 1:].strip()
        if not idx_text.isdigit():
            raise PolyParseError("expected index after 'd'", i + k)
        idx = int(idx_text)
        if not 1 <= idx <= dim:
            raise PolyParseError(f"derivation index d{idx} out of range 1..{dim}", i + k)
        head = body[:k].strip()
        if head.endswith("*"):
            head = head[:-1].strip()
        elif head:
            raise PolyParseError("expected '*' before 'd'", i + k)
        coeff_poly = parse_poly(head, dim) if head else Poly.constant(dim, 1)
        comps[idx - 1] = comps[idx - 1] + sign * coeff_poly
        i = j
    return Derivation(tuple(comps))


# ---------------------------------------------------------------------------------
# multi-indices (iterated partials d^alpha)
# ---------------------------------------------------------------------------------

def multi_indices(dim: int, max_order: int) -> list[MultiIndex]:
    """All alpha in N^dim with |alpha| <= max_order, graded-lex ascending."""
    out: list[MultiIndex] = []
    for total in range(max_order + 1):
        out.extend(_compositions(total, dim))
    return out


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def monomials_per_variable(dim: int, max_per_var: int) -> list[MultiIndex]:
    """All exponent tuples with every entry <= max_per_var."""
    return [tuple(e) for e in product(range(max_per_var + 1), repeat=dim)]


def index_order(alpha: MultiIndex) -> int:
    return sum(alpha)


def unit_index(dim: int, i: int) -> MultiIndex:
    """The multi-index e_i (1-based i)."""
    return tuple(1 if j == i - 1 else 0 for j in range(dim))


def multi_binomial(beta: MultiIndex, alpha: MultiIndex) -> int:
    """Product of componentwise binomial coefficients C(beta_j, alpha_j)."""
    out = 1
    for b, a in zip(beta, alpha):
        out *= comb(b, a)
    return out


def partial_power(p: Poly, alpha: MultiIndex) -> Poly:
    """Iterated partial derivative d^alpha p."""
    if len(alpha) != p.dim:
        raise DimensionMismatch(f"multi-index length {len(alpha)} vs dim {p.dim}")
    out = p
    for i, e in enumerate(alpha, start=1):
        for _ in range(e):
            if out.is_zero():
                return out
            out = out.partial_derivative(i)
    return out
