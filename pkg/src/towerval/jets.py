"""Jet equations, a Groebner engine, and truncated contact-locus estimators.

The geometric quantity everything here feeds is the codimension, at a
finite truncation level, of a contact locus intersected with the fiber of
arcs through the origin.  That codimension turns into a Krull dimension
computation for an explicit polynomial ideal in the jet variables
x_l^(q), which a small Buchberger implementation handles; purely monomial
inputs take a combinatorial fast path that never touches a Groebner basis,
giving the test suite two independent routes to the same numbers.

Estimates produced here are upper bounds by construction: enlarging the
truncation cap can only lower them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    IdealNotAtOrigin,
    MathCheckFailed,
    RingMismatch,
    UnitIdeal,
    ZeroIdeal,
)
from .polyring import (
    Domain,
    Ideal,
    Polynomial,
    grlex_key,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)

DEFAULT_GB_BUDGET = 100_000


@dataclass(frozen=True)
class MonomialOrderSpec:
    """The one canonical order: total degree, ties broken by x1 > x2 > ..."""

    kind: str = "grlex"

    def key(self, exponents):
        return grlex_key(exponents)


GRLEX = MonomialOrderSpec()


class StepBudget:
    """Counts division steps; raises once the cap is crossed."""

    __slots__ = ("cap", "used")

    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self, amount: int = 1):
        self.used += amount
        if self.used > self.cap:
            raise BudgetExceeded(f"step budget of {self.cap} exhausted")


def _as_budget(budget) -> StepBudget:
    return budget if isinstance(budget, StepBudget) else StepBudget(int(budget))


def _times_term(g: Polynomial, mono, c) -> Polynomial:
    dom = g.domain
    return Polynomial(
        dom, g.nvars, {mono_mul(m, mono): dom.mul(cc, c) for m, cc in g.terms.items()}
    )


def normal_form(f: Polynomial, basis, budget: StepBudget) -> Polynomial:
    """Fully reduce f against a list of monic polynomials."""
    dom, n = f.domain, f.nvars
    lms = [g.leading_monomial() for g in basis]
    work = f
    tail: dict = {}
    while not work.is_zero():
        lm = work.leading_monomial()
        lc = work.terms[lm]
        hit = next((i for i, blm in enumerate(lms) if mono_divides(blm, lm)), None)
        if hit is None:
            tail[lm] = lc
            rest = dict(work.terms)
            del rest[lm]
            work = Polynomial(dom, n, rest)
        else:
            budget.spend()
            work = work - _times_term(basis[hit], mono_div(lm, lms[hit]), lc)
    return Polynomial(dom, n, tail)


def _spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    lf, lg = f.leading_monomial(), g.leading_monomial()
    lcm = mono_lcm(lf, lg)
    return _times_term(f, mono_div(lcm, lf), f.domain.one()) - _times_term(
        g, mono_div(lcm, lg), g.domain.one()
    )


def groebner_basis(gens, order: MonomialOrderSpec = GRLEX, budget=DEFAULT_GB_BUDGET):
    """Buchberger with normal pair selection and a hard step budget.

    Deterministic: pairs are processed by (lcm order, indices), and the
    returned basis is reduced, monic and sorted, hence unique for the ideal.
    """
    budget = _as_budget(budget)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    dom = gens[0].domain
    if not dom.is_field:
        raise RingMismatch("Groebner bases are computed over a field")
    for g in gens:
        if g.domain != dom or g.nvars != gens[0].nvars:
            raise RingMismatch("generators live in different rings")

    basis = []
    for g in gens:
        m = g.monic()
        if m not in basis:
            basis.append(m)
    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}

    def pair_key(p):
        i, j = p
        lcm = mono_lcm(basis[i].leading_monomial(), basis[j].leading_monomial())
        return (order.key(lcm), i, j)

    while pairs:
        i, j = min(pairs, key=pair_key)
        pairs.remove((i, j))
        budget.spend()
        li, lj = basis[i].leading_monomial(), basis[j].leading_monomial()
        if mono_lcm(li, lj) == mono_mul(li, lj):
            continue  # coprime leading monomials: S-polynomial reduces to zero
        nf = normal_form(_spoly(basis[i], basis[j]), basis, budget)
        if not nf.is_zero():
            basis.append(nf.monic())
            new = len(basis) - 1
            pairs.update((k, new) for k in range(new))
    return _reduce_basis(basis, budget)


def _reduce_basis(basis, budget: StepBudget):
    # minimal: drop anything whose leading monomial another one divides
    basis = sorted(basis, key=lambda g: grlex_key(g.leading_monomial()))
    minimal = []
    for g in basis:
        lm = g.leading_monomial()
        if any(mono_divides(h.leading_monomial(), lm) for h in minimal):
            continue
        minimal.append(g)
    # interreduce tails until stable
    changed = True
    while changed:
        changed = False
        for i, g in enumerate(minimal):
            others = minimal[:i] + minimal[i + 1 :]
            nf = normal_form(g, others, budget) if others else g
            if nf != g:
                minimal[i] = nf.monic()
                changed = True
    return sorted(minimal, key=lambda g: grlex_key(g.leading_monomial()))


def verify_groebner(basis, gens=None, budget=DEFAULT_GB_BUDGET) -> bool:
    """Check the defining property: all S-polynomials reduce to zero, and
    optionally that the original generators do too."""
    budget = _as_budget(budget)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if not normal_form(_spoly(basis[i], basis[j]), basis, budget).is_zero():
                return False
    for g in gens or ():
        if not normal_form(g, basis, budget).is_zero():
            return False
    return True


# -- dimension ------------------------------------------------------------------


def _minimal_supports(lms):
    supports = sorted({frozenset(i for i, e in enumerate(m) if e) for m in lms}, key=sorted)
    out = []
    for s in sorted(supports, key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return out


def _min_hitting_set_size(supports) -> int:
    best = [sum(len(s) for s in supports) + 1]

    def search(remaining, chosen):
        if chosen >= best[0]:
            return
        if not remaining:
            best[0] = chosen
            return
        pivot = min(remaining, key=len)
        for v in sorted(pivot):
            rest = [s for s in remaining if v not in s]
            search(rest, chosen + 1)

    search(supports, 0)
    return best[0]


def ideal_dimension(gens, order: MonomialOrderSpec = GRLEX, budget=DEFAULT_GB_BUDGET) -> int:
    """Krull dimension of the quotient by the ideal the generators span.

    Computed from the leading-term ideal of a Groebner basis as the largest
    number of variables no leading monomial lives entirely inside (via the
    complement, a minimum hitting set).  The zero ideal has the dimension
    of the whole space; the unit ideal is rejected distinctly.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("cannot infer the ring from an empty generator list")
    nvars = gens[0].nvars
    nonzero = [g for g in gens if not g.is_zero()]
    if not nonzero:
        return nvars
    gb = groebner_basis(nonzero, order=order, budget=budget)
    if any(g.is_constant() for g in gb):
        raise UnitIdeal("the generators span the whole ring")
    supports = _minimal_supports([g.leading_monomial() for g in gb])
    return nvars - _min_hitting_set_size(supports)


def height_of_ideal(gens, order: MonomialOrderSpec = GRLEX, budget=DEFAULT_GB_BUDGET) -> int:
    """Codimension: number of variables minus the dimension."""
    if isinstance(gens, Ideal):
        gens.require_nonzero()
        gens = list(gens.gens)
    gens = list(gens)
    if not gens or all(g.is_zero() for g in gens):
        raise ZeroIdeal("height of the zero ideal is undefined here")
    return gens[0].nvars - ideal_dimension(gens, order=order, budget=budget)


def compare_heights(a: Ideal, budget=DEFAULT_GB_BUDGET):
    """Height of a GF(p) ideal against its canonical lift over Q.

    Returns (ht_p, ht_q) and insists on ht_p <= ht_q: lifting can only
    grow the height, so a drop means a bug somewhere and raises.
    """
    from .polyring import QQ, ideal_change_domain, lift_ideal

    a.require_nonzero()
    lifted = ideal_change_domain(lift_ideal(a), QQ)
    ht_p = height_of_ideal(a, budget=budget)
    ht_q = height_of_ideal(lifted, budget=budget)
    if ht_p > ht_q:
        raise MathCheckFailed(f"height dropped under lifting: {ht_p} > {ht_q}")
    return ht_p, ht_q


# -- jet equations -----------------------------------------------------------------


@dataclass(frozen=True)
class JetSystem:
    """Truncated jet data of an ideal: level m, variables x_l^(q) for
    0 <= q <= m, and per generator the coefficients F^(0), ..., F^(m) of
    its expansion along x_l -> sum_q x_l^(q) t^q."""

    n: int
    level: int
    domain: Domain
    coefficients: tuple  # one tuple of m+1 polynomials per input generator

    @property
    def nvars(self) -> int:
        return self.n * (self.level + 1)

    def var_index(self, l: int, q: int) -> int:
        return l * (self.level + 1) + q

    def var_names(self) -> list:
        return [f"x{l + 1}_{q}" for l in range(self.n) for q in range(self.level + 1)]


def jet_equations(a: Ideal, m: int) -> JetSystem:
    """Expand each generator along truncated jets and split off t-powers."""
    a.require_nonzero()
    if m < 0:
        raise ValueError("jet level must be >= 0")
    n, dom = a.nvars, a.domain
    width = m + 1
    jet_nvars = n * width
    zero = Polynomial.zero(dom, jet_nvars)
    var_series = [
        [Polynomial.variable(dom, jet_nvars, l * width + q) for q in range(width)]
        for l in range(n)
    ]

    def series_mul(A, B):
        out = [zero] * width
        for i, ai in enumerate(A):
            if ai.is_zero():
                continue
            for j, bj in enumerate(B):
                if i + j >= width:
                    break
                if bj.is_zero():
                    continue
                out[i + j] = out[i + j] + ai * bj
        return out

    power_cache: dict = {}

    def series_power(l, e):
        if e == 0:
            return None
        key = (l, e)
        if key not in power_cache:
            if e == 1:
                power_cache[key] = var_series[l]
            else:
                power_cache[key] = series_mul(series_power(l, e - 1), var_series[l])
        return power_cache[key]

    out = []
    for g in a.gens:
        acc = [zero] * width
        for mono, c in g.terms.items():
            piece = None
            for l, e in enumerate(mono):
                if not e:
                    continue
                s = series_power(l, e)
                piece = s if piece is None else series_mul(piece, s)
            if piece is None:  # constant term
                piece = [Polynomial.constant(dom, jet_nvars, 1)] + [zero] * m
            scaled = [p.scale(c) for p in piece]
            acc = [x + y for x, y in zip(acc, scaled)]
        out.append(tuple(acc))
    return JetSystem(n=n, level=m, domain=dom, coefficients=tuple(out))


# -- contact loci ---------------------------------------------------------------------


def _check_factors(factors):
    if not factors:
        raise ValueError("need at least one (ideal, level) factor")
    ring = None
    for a, m in factors:
        a.require_nonzero()
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"contact level must be a positive integer, got {m!r}")
        if ring is None:
            ring = (a.domain, a.nvars)
        elif (a.domain, a.nvars) != ring:
            raise RingMismatch("contact factors live in different rings")
    return ring


def monomial_contact_codim(factors) -> int:
    """Fast path for monomial factors, independent of any Groebner basis.

    An arc lies in every contact condition iff its vector of coordinate
    orders a (componentwise >= 1 on the fiber over the origin) satisfies
    sum_l a_l * w_l >= m for each generator x^w; each such stratum has
    codimension sum(a).  Minimize over the finitely many a that matter.
    """
    dom_n = _check_factors(factors)
    n = dom_n[1]
    L = max(m for _, m in factors)
    constraints = []
    for a, m in factors:
        if not a.is_monomial():
            raise ValueError("fast path needs monomial ideals")
        for g in a.gens:
            (w,) = g.terms
            if sum(w) == 0:
                raise UnitIdeal("a unit generator empties the contact locus")
            constraints.append((w, m))
    best = None
    for vec in itertools.product(range(1, L + 1), repeat=n):
        if any(sum(a * w_l for a, w_l in zip(vec, w)) < m for w, m in constraints):
            continue
        total = sum(vec)
        if best is None or total < best:
            best = total
    if best is None:
        raise UnitIdeal("contact conditions are unsatisfiable")
    return best


def contact_codim_at_origin(factors, budget=DEFAULT_GB_BUDGET, force_groebner=False) -> int:
    """Codimension of the intersection of the contact loci with the arcs
    through the origin, evaluated at truncation level max(m_i).

    The defining ideal lives in the N*L jet variables with q < L: all
    x_l^(0), plus for factor i the coefficients F^(j), j < m_i, of each
    generator.  Monomial inputs use the combinatorial fast path unless
    ``force_groebner`` asks for the slow route (the tests compare the two).
    """
    (dom, n) = _check_factors(factors)
    if not force_groebner and all(a.is_monomial() for a, _ in factors):
        return monomial_contact_codim(factors)

    L = max(m for _, m in factors)
    width = L  # jet variables x_l^(q), 0 <= q <= L-1
    js_cache: dict = {}

    def system(a: Ideal) -> JetSystem:
        if a not in js_cache:
            js_cache[a] = jet_equations(a, L - 1)
        return js_cache[a]

    jet_nvars = n * width
    gens = [Polynomial.variable(dom, jet_nvars, l * width) for l in range(n)]
    kill_origin = [
        Polynomial.zero(dom, jet_nvars)
        if q == 0
        else Polynomial.variable(dom, jet_nvars, l * width + q)
        for l in range(n)
        for q in range(width)
    ]
    for a, m in factors:
        js = system(a)
        for coeffs in js.coefficients:
            for j in range(m):
                g = coeffs[j].substitute(kill_origin)
                if g.is_constant():
                    if g.is_zero():
                        continue
                    raise UnitIdeal("a contact condition is a nonzero constant")
                gens.append(g)
    dim = ideal_dimension(gens, budget=budget)
    return jet_nvars - dim


# -- estimators ------------------------------------------------------------------------


def mld_estimate(ma, cap: int, budget=DEFAULT_GB_BUDGET, nvars: int | None = None):
    """Truncated minimal log discrepancy bound at the origin.

    Minimizes codim - sum(e_i * m_i) over contact level vectors m in
    {0..cap}^r; the all-zero vector contributes the ambient dimension N.
    The result is an upper bound, non-increasing in cap.  Cells whose
    contact locus is empty are skipped.  Returns (value, minimizing m).

    An empty product has no ring attached, so ``nvars`` must be passed for
    that degenerate case (the answer is then just N).
    """
    factors = list(ma)
    for a, _ in factors:
        a.require_nonzero()
    if factors:
        n = factors[0][0].nvars
    elif nvars is not None:
        n = nvars
    else:
        raise ValueError("an empty product needs an explicit nvars")
    best = None
    for mvec in itertools.product(range(cap + 1), repeat=len(factors)):
        active = [(a, m) for (a, _), m in zip(factors, mvec) if m >= 1]
        if not active:
            value = Fraction(n)
        else:
            try:
                codim = contact_codim_at_origin(active, budget=budget)
            except UnitIdeal:
                continue
            value = Fraction(codim) - sum(e * m for (_, e), m in zip(factors, mvec))
        if best is None or value < best[0]:
            best = (value, mvec)
    return best


def lct_estimate_at_origin(a: Ideal, cap: int, budget=DEFAULT_GB_BUDGET):
    """Truncated log canonical threshold bound at the origin.

    min over 1 <= m <= cap of codim(contact >= m through origin) / m.
    Exact in the limit over the rationals; an upper bound in char p.
    Returns (value, minimizing level).
    """
    a.require_nonzero()
    if not a.vanishes_at_origin():
        raise IdealNotAtOrigin("the ideal's locus must pass through the origin")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    best = None
    for m in range(1, cap + 1):
        value = Fraction(contact_codim_at_origin([(a, m)], budget=budget), m)
        if best is None or value < best[0]:
            best = (value, m)
    return best
