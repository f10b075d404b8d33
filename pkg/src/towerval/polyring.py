"""Exact multivariate polynomial arithmetic over F_p, Q and Z.

Everything downstream (towers, jets, Groebner bases, the lifting checks)
reduces to arithmetic in this module, so the representation is kept as
plain as possible:

* a coefficient domain is one of ``GF(p)`` (p prime, elements the ints
  ``0..p-1``), ``QQ`` (elements ``fractions.Fraction``) and ``ZZ``
  (arbitrary-precision ints);
* a monomial is a dense exponent tuple of length ``nvars``;
* a polynomial is an immutable term map {exponent tuple: nonzero
  coefficient}.  Two polynomials are equal iff their term maps are equal,
  which makes canonical forms trivial and hashing cheap.

No floating point appears anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ConstantNotInField,
    NonPrimeModulus,
    RingMismatch,
    ScriptSyntaxError,
    ZeroIdeal,
    ZeroPolynomial,
)

Mono = tuple  # exponent tuple, one entry per variable


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Domain:
    """A coefficient domain: a prime field, the rationals, or the integers.

    Use the ``GF`` factory and the ``QQ``/``ZZ`` singletons instead of
    calling the constructor directly.
    """

    GF_KIND = "gf"
    Q_KIND = "rationals"
    Z_KIND = "integers"

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind == self.GF_KIND:
            if not isinstance(p, int) or not _is_prime(p):
                raise NonPrimeModulus(f"modulus {p!r} is not a prime")
        elif kind in (self.Q_KIND, self.Z_KIND):
            p = None
        else:
            raise ValueError(f"unknown domain kind {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p)

    def __setattr__(self, *a):
        raise AttributeError("Domain is immutable")

    # -- structure ------------------------------------------------------

    @property
    def is_field(self) -> bool:
        return self.kind != self.Z_KIND

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == self.GF_KIND else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Domain)
            and self.kind == other.kind
            and self.p == other.p
        )

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        if self.kind == self.GF_KIND:
            return f"GF({self.p})"
        return "QQ" if self.kind == self.Q_KIND else "ZZ"

    # -- element arithmetic ----------------------------------------------

    def coerce(self, c):
        """Return the canonical representative of ``c``, or raise.

        GF(p) accepts ints (reduced mod p); QQ accepts ints and Fractions;
        ZZ accepts ints only.
        """
        if self.kind == self.GF_KIND:
            if isinstance(c, bool) or not isinstance(c, int):
                raise ConstantNotInField(f"{c!r} is not an element of {self!r}")
            return c % self.p
        if self.kind == self.Q_KIND:
            if isinstance(c, bool):
                raise ConstantNotInField(f"{c!r} is not a rational")
            if isinstance(c, int):
                return Fraction(c)
            if isinstance(c, Fraction):
                return c
            raise ConstantNotInField(f"{c!r} is not a rational")
        if isinstance(c, bool) or not isinstance(c, int):
            raise ConstantNotInField(f"{c!r} is not an integer")
        return c

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        if self.kind == self.GF_KIND:
            return (a + b) % self.p
        return a + b

    def sub(self, a, b):
        if self.kind == self.GF_KIND:
            return (a - b) % self.p
        return a - b

    def neg(self, a):
        if self.kind == self.GF_KIND:
            return (-a) % self.p
        return -a

    def mul(self, a, b):
        if self.kind == self.GF_KIND:
            return (a * b) % self.p
        return a * b

    def inv(self, a):
        if self.kind == self.GF_KIND:
            if a % self.p == 0:
                raise ZeroDivisionError("inverse of 0")
            return pow(a, self.p - 2, self.p)
        if self.kind == self.Q_KIND:
            return Fraction(1) / a
        raise RingMismatch("ZZ is not a field")

    def pow(self, a, e: int):
        if self.kind == self.GF_KIND:
            return pow(a, e, self.p)
        return a ** e


def GF(p: int) -> Domain:
    return Domain(Domain.GF_KIND, p)


QQ = Domain(Domain.Q_KIND)
ZZ = Domain(Domain.Z_KIND)


# -- monomial helpers ---------------------------------------------------------

def mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def mono_deg(a: Mono) -> int:
    return sum(a)


def mono_divides(a: Mono, b: Mono) -> bool:
    """Whether x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(b: Mono, a: Mono) -> Mono:
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def grlex_key(a: Mono):
    """Sort key of the one canonical monomial order: total degree first,
    ties broken lexicographically with x1 > x2 > ... ."""
    return (sum(a), a)


def default_names(nvars: int) -> list[str]:
    return [f"x{i + 1}" for i in range(nvars)]


class Polynomial:
    """An immutable multivariate polynomial in canonical form."""

    __slots__ = ("domain", "nvars", "terms", "_hash")

    def __init__(self, domain: Domain, nvars: int, terms: dict):
        """``terms`` must already be canonical; prefer the classmethods."""
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_terms(cls, domain: Domain, nvars: int, items: Iterable) -> "Polynomial":
        """Build from (exponent tuple, coefficient) pairs, canonicalizing."""
        acc: dict = {}
        for exps, c in items:
            exps = tuple(exps)
            if len(exps) != nvars or any(e < 0 or not isinstance(e, int) for e in exps):
                raise ValueError(f"bad exponent tuple {exps!r} for {nvars} variables")
            c = domain.coerce(c)
            if exps in acc:
                c = domain.add(acc[exps], c)
            acc[exps] = c
        return cls(domain, nvars, {m: c for m, c in acc.items() if c != 0})

    @classmethod
    def zero(cls, domain: Domain, nvars: int) -> "Polynomial":
        return cls(domain, nvars, {})

    @classmethod
    def constant(cls, domain: Domain, nvars: int, c) -> "Polynomial":
        return cls.from_terms(domain, nvars, [((0,) * nvars, c)])

    @classmethod
    def variable(cls, domain: Domain, nvars: int, i: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range")
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(domain, nvars, {exps: domain.one()})

    # -- basic structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(mono_deg(m) == 0 for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, self.domain.zero())

    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        return max((mono_deg(m) for m in self.terms), default=-1)

    def order_at_origin(self) -> int:
        """Min total degree among terms (the vanishing order at 0)."""
        if not self.terms:
            raise ZeroPolynomial("order of the zero polynomial")
        return min(mono_deg(m) for m in self.terms)

    def support(self) -> frozenset:
        return frozenset(self.terms)

    def _check_ring(self, other: "Polynomial"):
        if self.domain != other.domain or self.nvars != other.nvars:
            raise RingMismatch(
                f"operands live in different rings: "
                f"{self.domain!r}[{self.nvars}] vs {other.domain!r}[{other.nvars}]"
            )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.domain == other.domain
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.domain, self.nvars, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        dom = self.domain
        acc = dict(self.terms)
        for m, c in other.terms.items():
            if m in acc:
                s = dom.add(acc[m], c)
                if s == 0:
                    del acc[m]
                else:
                    acc[m] = s
            else:
                acc[m] = c
        return Polynomial(dom, self.nvars, acc)

    def __neg__(self) -> "Polynomial":
        dom = self.domain
        return Polynomial(dom, self.nvars, {m: dom.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        dom = self.domain
        acc: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                c = dom.mul(ca, cb)
                if m in acc:
                    c = dom.add(acc[m], c)
                if c == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = c
        return Polynomial(dom, self.nvars, acc)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.domain, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        dom = self.domain
        c = dom.coerce(c)
        if c == 0:
            return Polynomial.zero(dom, self.nvars)
        return Polynomial(dom, self.nvars, {m: dom.mul(v, c) for m, v in self.terms.items()})

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Apply the ring map x_i -> images[i].

        All images must live in one common ring, which becomes the ring of
        the result; coefficients are coerced into it (so a ZZ polynomial can
        be substituted into a QQ or GF(p) context).
        """
        if len(images) != self.nvars:
            raise RingMismatch(f"expected {self.nvars} images, got {len(images)}")
        if not images:
            raise RingMismatch("cannot substitute in a ring with no variables")
        tdom, tn = images[0].domain, images[0].nvars
        for g in images[1:]:
            if g.domain != tdom or g.nvars != tn:
                raise RingMismatch("substitution images live in different rings")
        one = Polynomial.constant(tdom, tn, 1)
        power_cache: dict = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in power_cache:
                power_cache[key] = images[i] ** e
            return power_cache[key]

        out = Polynomial.zero(tdom, tn)
        for m, c in self.terms.items():
            piece = one.scale(_convert_coeff(c, self.domain, tdom))
            for i, e in enumerate(m):
                if e:
                    piece = piece * power(i, e)
            out = out + piece
        return out

    def evaluate(self, point: Sequence):
        """Exact evaluation at a tuple of constants; returns a coefficient."""
        if len(point) != self.nvars:
            raise RingMismatch(f"expected {self.nvars} coordinates, got {len(point)}")
        dom = self.domain
        vals = [dom.coerce(c) for c in point]
        total = dom.zero()
        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v = dom.mul(v, dom.pow(vals[i], e))
            total = dom.add(total, v)
        return total

    def substitute_constants(self, assignment: dict) -> "Polynomial":
        """Plug constants into some variables, keeping the rest symbolic."""
        dom, n = self.domain, self.nvars
        images = []
        for i in range(n):
            if i in assignment:
                images.append(Polynomial.constant(dom, n, dom.coerce(assignment[i])))
            else:
                images.append(Polynomial.variable(dom, n, i))
        return self.substitute(images)

    def order_at_point(self, point: Sequence) -> int:
        """Vanishing order at a point: translate the point to the origin by
        the exact substitution x -> x + q and take the minimal term degree."""
        if self.is_zero():
            raise ZeroPolynomial("order of the zero polynomial")
        dom, n = self.domain, self.nvars
        if len(point) != n:
            raise RingMismatch(f"expected {n} coordinates, got {len(point)}")
        images = [
            Polynomial.variable(dom, n, i) + Polynomial.constant(dom, n, dom.coerce(q))
            for i, q in enumerate(point)
        ]
        return self.substitute(images).order_at_origin()

    # -- per-variable structure ----------------------------------------------

    def var_min_exponent(self, i: int) -> int:
        """Largest e with x_i^e dividing the polynomial."""
        if self.is_zero():
            raise ZeroPolynomial("x-adic order of the zero polynomial")
        return min(m[i] for m in self.terms)

    def divide_var_power(self, i: int, e: int) -> "Polynomial":
        if e == 0:
            return self
        if any(m[i] < e for m in self.terms):
            raise ValueError(f"not divisible by variable {i} to the power {e}")
        out = {}
        for m, c in self.terms.items():
            mm = list(m)
            mm[i] -= e
            out[tuple(mm)] = c
        return Polynomial(self.domain, self.nvars, out)

    def derivative(self, i: int) -> "Polynomial":
        dom = self.domain
        acc: dict = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            cc = dom.mul(c, dom.coerce(e))
            if cc == 0:
                continue
            mm = list(m)
            mm[i] -= 1
            acc[tuple(mm)] = cc
        return Polynomial(dom, self.nvars, acc)

    # -- leading data under the canonical order -------------------------------

    def leading_monomial(self) -> Mono:
        if self.is_zero():
            raise ZeroPolynomial("leading monomial of zero")
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self) -> "Polynomial":
        dom = self.domain
        return self.scale(dom.inv(self.leading_coefficient()))

    # -- printing -------------------------------------------------------------

    def text(self, names: Sequence[str] | None = None) -> str:
        if self.is_zero():
            return "0"
        if names is None:
            names = default_names(self.nvars)
        pieces = []
        for m in sorted(self.terms, key=grlex_key, reverse=True):
            c = self.terms[m]
            vars_txt = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(m)
                if e
            )
            negative = self.domain.kind != Domain.GF_KIND and c < 0
            mag = -c if negative else c
            if not vars_txt:
                body = str(mag)
            elif mag == 1:
                body = vars_txt
            else:
                body = f"{mag}*{vars_txt}"
            pieces.append(("-" if negative else "+", body))
        sign0, body0 = pieces[0]
        out = ("-" if sign0 == "-" else "") + body0
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"<{self.domain!r}[{self.nvars}] {self.text()}>"


def _convert_coeff(c, src: Domain, dst: Domain):
    """Move a coefficient between domains along the canonical maps.

    Identity on matching domains; ZZ embeds into QQ and reduces into GF(p);
    GF(p) representatives lift to ZZ/QQ as the integers 0..p-1.
    """
    if src == dst:
        return c
    if src.kind == Domain.Z_KIND:
        return dst.coerce(c)
    if src.kind == Domain.GF_KIND and dst.kind in (Domain.Z_KIND, Domain.Q_KIND):
        return dst.coerce(c)
    if src.kind == Domain.Q_KIND and dst.kind == Domain.Q_KIND:
        return c
    raise RingMismatch(f"no canonical coefficient map {src!r} -> {dst!r}")


def change_domain(f: Polynomial, dst: Domain) -> Polynomial:
    """Apply the canonical coefficient map to every term."""
    return Polynomial.from_terms(
        dst, f.nvars, ((m, _convert_coeff(c, f.domain, dst)) for m, c in f.terms.items())
    )


# -- reduction and lifting -----------------------------------------------------

def reduce_mod_p(f: Polynomial, p: int) -> Polynomial:
    """Reduce an integer polynomial coefficient-wise mod a prime."""
    if f.domain != ZZ:
        raise RingMismatch("reduce_mod_p expects a ZZ polynomial")
    return change_domain(f, GF(p))


def lift_coefficientwise(f: Polynomial) -> Polynomial:
    """Lift a GF(p) polynomial to ZZ using representatives 0..p-1.

    The support is preserved exactly and reduce_mod_p inverts the map.
    Any other choice of representatives with the same support would do;
    this one is canonical.
    """
    if f.domain.kind != Domain.GF_KIND:
        raise RingMismatch("lift_coefficientwise expects a GF(p) polynomial")
    return change_domain(f, ZZ)


class Ideal:
    """A finite generator list in a fixed ring.

    Zero generators are dropped at construction; an empty generator list is
    the zero ideal, which every invariant computation rejects explicitly.
    """

    __slots__ = ("domain", "nvars", "gens")

    def __init__(self, domain: Domain, nvars: int, gens: Iterable[Polynomial]):
        gens = tuple(g for g in gens if not g.is_zero())
        for g in gens:
            if g.domain != domain or g.nvars != nvars:
                raise RingMismatch("generator not in the declared ring")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "gens", gens)

    def __setattr__(self, *a):
        raise AttributeError("Ideal is immutable")

    def is_zero(self) -> bool:
        return not self.gens

    def require_nonzero(self):
        if self.is_zero():
            raise ZeroIdeal("operation rejects the zero ideal")
        return self

    def is_monomial(self) -> bool:
        return bool(self.gens) and all(len(g.terms) == 1 for g in self.gens)

    def vanishes_at_origin(self) -> bool:
        return all(g.constant_term() == 0 for g in self.gens)

    def __eq__(self, other):
        return (
            isinstance(other, Ideal)
            and self.domain == other.domain
            and self.nvars == other.nvars
            and self.gens == other.gens
        )

    def __hash__(self):
        return hash((self.domain, self.nvars, self.gens))

    def __repr__(self):
        return f"<ideal ({', '.join(g.text() for g in self.gens) or '0'})>"


def coordinate_ideal(domain: Domain, nvars: int) -> Ideal:
    """The maximal ideal (x1, ..., xN) at the origin."""
    return Ideal(domain, nvars, [Polynomial.variable(domain, nvars, i) for i in range(nvars)])


def lift_ideal(a: Ideal) -> Ideal:
    """Generator-wise coefficient lift of a nonzero GF(p) ideal to ZZ."""
    a.require_nonzero()
    if a.domain.kind != Domain.GF_KIND:
        raise RingMismatch("lift_ideal expects a GF(p) ideal")
    return Ideal(ZZ, a.nvars, [lift_coefficientwise(g) for g in a.gens])


def ideal_change_domain(a: Ideal, dst: Domain) -> Ideal:
    return Ideal(dst, a.nvars, [change_domain(g, dst) for g in a.gens])


class MultiIdeal:
    """A formal product of ideals with positive rational exponents."""

    __slots__ = ("factors",)

    def __init__(self, factors: Iterable):
        out = []
        ring = None
        for ideal, e in factors:
            e = Fraction(e)
            if e <= 0:
                raise ValueError(f"exponent {e} is not positive")
            if ring is None:
                ring = (ideal.domain, ideal.nvars)
            elif (ideal.domain, ideal.nvars) != ring:
                raise RingMismatch("multi-ideal factors live in different rings")
            out.append((ideal, e))
        object.__setattr__(self, "factors", tuple(out))

    def __setattr__(self, *a):
        raise AttributeError("MultiIdeal is immutable")

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)


# -- parsing --------------------------------------------------------------------

def parse_polynomial(text: str, domain: Domain, nvars: int) -> Polynomial:
    """Parse the canonical text syntax into a polynomial.

    Grammar (strict, no implicit multiplication)::

        expr   := [sign] term (sign term)*        sign := '+' | '-'
        term   := factor ('*' factor)*
        factor := atom ['^' INT]
        atom   := NUM | VAR | '(' expr ')'
        NUM    := digits ['/' digits]             (no spaces inside a/b)
        VAR    := 'x' digits                      (1-based, up to nvars)
    """
    tokens = _lex(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", "", len(text))

    def take(kind=None):
        nonlocal pos
        tok = peek()
        if kind is not None and tok[0] != kind:
            raise ScriptSyntaxError(
                f"expected {kind} at column {tok[2] + 1}, found {tok[1] or 'end of input'!r}"
            )
        pos += 1
        return tok

    def parse_expr() -> Polynomial:
        sign = 1
        if peek()[0] in ("+", "-"):
            sign = -1 if take()[0] == "-" else 1
        out = parse_term().scale(sign)
        while peek()[0] in ("+", "-"):
            s = -1 if take()[0] == "-" else 1
            out = out + parse_term().scale(s)
        return out

    def parse_term() -> Polynomial:
        out = parse_factor()
        while peek()[0] == "*":
            take()
            out = out * parse_factor()
        return out

    def parse_factor() -> Polynomial:
        base = parse_atom()
        if peek()[0] == "^":
            take()
            tok = take("num")
            if "/" in tok[1]:
                raise ScriptSyntaxError(f"exponent must be an integer at column {tok[2] + 1}")
            return base ** int(tok[1])
        return base

    def parse_atom() -> Polynomial:
        tok = peek()
        if tok[0] == "num":
            take()
            if "/" in tok[1]:
                num, den = tok[1].split("/")
                value = Fraction(int(num), int(den))
                if value.denominator != 1 and domain.kind != Domain.Q_KIND:
                    raise ConstantNotInField(
                        f"literal {tok[1]} needs rational coefficients"
                    )
                c = value if domain.kind == Domain.Q_KIND else int(value)
            else:
                c = int(tok[1])
            return Polynomial.constant(domain, nvars, c)
        if tok[0] == "var":
            take()
            idx = int(tok[1][1:])
            if not 1 <= idx <= nvars:
                raise ScriptSyntaxError(
                    f"variable {tok[1]} out of range (ring has {nvars} variables)"
                    f" at column {tok[2] + 1}"
                )
            return Polynomial.variable(domain, nvars, idx - 1)
        if tok[0] == "(":
            take()
            inner = parse_expr()
            take(")")
            return inner
        raise ScriptSyntaxError(
            f"unexpected {tok[1] or 'end of input'!r} at column {tok[2] + 1}"
        )

    result = parse_expr()
    tok = peek()
    if tok[0] != "end":
        raise ScriptSyntaxError(f"trailing input {tok[1]!r} at column {tok[2] + 1}")
    return result


def _lex(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < len(text) and text[i].isdigit():
                i += 1
            if i < len(text) and text[i] == "/" and i + 1 < len(text) and text[i + 1].isdigit():
                i += 1
                while i < len(text) and text[i].isdigit():
                    i += 1
            tokens.append(("num", text[start:i], start))
            continue
        if ch == "x":
            start = i
            i += 1
            if i >= len(text) or not text[i].isdigit():
                raise ScriptSyntaxError(f"bad variable name at column {start + 1}")
            while i < len(text) and text[i].isdigit():
                i += 1
            tokens.append(("var", text[start:i], start))
            continue
        raise ScriptSyntaxError(f"unexpected character {ch!r} at column {i + 1}")
    return tokens
