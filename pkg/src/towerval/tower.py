"""Blow-up towers over A^N at coordinate-subspace centers.

A tower is a sequence of blow-ups, each centered at a locus of the form
{v_i = c_i : i in S} inside one chart of the model built so far, with
|S| >= 2 so that every step produces an exceptional divisor.  Each step
appends |S| affine charts, one per pivot index l in S, glued by

    v_l -> c_l + u_l,   v_j -> c_j + u_l * u_j (j in S, j != l),
    v_j -> u_j (j not in S),

and the new divisor is {u_l = 0} in each of them.

Per chart we keep the composite map down to the base (the "frame": every
base coordinate as a polynomial in chart coordinates) and a local defining
equation for the proper transform of every divisor born so far.  The frame
makes divisorial valuations a substitution followed by reading off the
pivot-adic order; the local equations make containment of a center in an
earlier divisor an exact substitution test, which drives the discrepancy
recursion

    k_new = (|S| - 1) + sum of k over divisors containing the center.

An independent cross-check of k via the order of the Jacobian determinant
of the frame is provided for tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadDimension,
    Codim1Center,
    GeneralPointNotFound,
    RingMismatch,
    UnknownChart,
    UnknownDivisor,
    ZeroIdeal,
)
from .polyring import Domain, Ideal, Polynomial, default_names


@dataclass(frozen=True)
class CenterSpec:
    """A blow-up center: chart id plus (variable index, constant) pairs."""

    chart: int
    constraints: tuple

    @classmethod
    def make(cls, chart: int, assignment: dict, domain: Domain) -> "CenterSpec":
        items = tuple(sorted((i, domain.coerce(c)) for i, c in assignment.items()))
        return cls(chart, items)

    def indices(self) -> tuple:
        return tuple(i for i, _ in self.constraints)

    def as_dict(self) -> dict:
        return dict(self.constraints)


@dataclass(frozen=True)
class Chart:
    cid: int
    parent: int | None
    pivot: int | None
    step: int
    pullback: tuple | None   # parent coordinates as polynomials here
    frame: tuple             # base coordinates as polynomials here
    divisor_eqs: dict        # divisor id -> local equation of its proper transform

    def __hash__(self):
        return hash(self.cid)


@dataclass(frozen=True)
class DivisorRecord:
    did: int
    k: int
    home_chart: int
    contained_in: tuple


@dataclass(frozen=True)
class Step:
    center: CenterSpec
    chart_ids: tuple
    divisor: DivisorRecord


class Tower:
    """Immutable; ``blow_up`` returns an extended copy."""

    __slots__ = ("domain", "n", "charts", "steps")

    def __init__(self, domain: Domain, n: int, charts: tuple, steps: tuple):
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "charts", charts)
        object.__setattr__(self, "steps", steps)

    def __setattr__(self, *a):
        raise AttributeError("Tower is immutable")

    def chart(self, cid: int) -> Chart:
        if not isinstance(cid, int) or not 0 <= cid < len(self.charts):
            raise UnknownChart(f"no chart {cid!r} (tower has charts 0..{len(self.charts) - 1})")
        return self.charts[cid]

    def divisor(self, did: int) -> DivisorRecord:
        if not isinstance(did, int) or not 1 <= did <= len(self.steps):
            raise UnknownDivisor(f"no divisor {did!r} (tower has divisors 1..{len(self.steps)})")
        return self.steps[did - 1].divisor

    @property
    def divisors(self) -> list:
        return [s.divisor for s in self.steps]

    def last_divisor_id(self) -> int:
        if not self.steps:
            raise UnknownDivisor("empty tower has no divisors")
        return len(self.steps)

    def first_step_at_origin(self) -> bool:
        if not self.steps:
            return False
        c = self.steps[0].center
        return (
            c.chart == 0
            and len(c.constraints) == self.n
            and all(v == self.domain.zero() for _, v in c.constraints)
        )

    def _check_base_ideal(self, a: Ideal):
        if a.domain != self.domain or a.nvars != self.n:
            raise RingMismatch("ideal does not live in the tower's base ring")
        a.require_nonzero()


def new_tower(n: int, domain: Domain) -> Tower:
    if not isinstance(n, int) or n < 2:
        raise BadDimension(f"towers need ambient dimension >= 2, got {n!r}")
    frame = tuple(Polynomial.variable(domain, n, i) for i in range(n))
    root = Chart(cid=0, parent=None, pivot=None, step=0, pullback=None, frame=frame, divisor_eqs={})
    return Tower(domain, n, (root,), ())


def blow_up(t: Tower, center: CenterSpec):
    """Blow up a coordinate-subspace center; returns (tower, divisor id)."""
    chart = t.chart(center.chart)
    dom, n = t.domain, t.n
    cmap = {}
    for i, c in center.constraints:
        if not isinstance(i, int) or not 0 <= i < n:
            raise ValueError(f"constrained variable index {i!r} out of range")
        if i in cmap:
            raise ValueError(f"variable {i} constrained twice")
        cmap[i] = dom.coerce(c)
    S = sorted(cmap)
    if len(S) < 2:
        raise Codim1Center(
            f"center has codimension {len(S)}; only centers of codimension >= 2 "
            "produce an exceptional divisor"
        )

    contained = tuple(
        did
        for did, eq in sorted(chart.divisor_eqs.items())
        if eq.substitute_constants(cmap).is_zero()
    )
    step_no = len(t.steps) + 1
    k = (len(S) - 1) + sum(t.divisor(d).k for d in contained)

    new_charts = []
    base_cid = len(t.charts)
    for pivot in S:
        pullback = []
        u_pivot = Polynomial.variable(dom, n, pivot)
        for j in range(n):
            u_j = Polynomial.variable(dom, n, j)
            cj = Polynomial.constant(dom, n, cmap[j]) if j in cmap else None
            if j == pivot:
                pullback.append(cj + u_pivot)
            elif j in cmap:
                pullback.append(cj + u_pivot * u_j)
            else:
                pullback.append(u_j)
        pullback = tuple(pullback)
        frame = tuple(f.substitute(pullback) for f in chart.frame)
        eqs = {}
        for did, eq in chart.divisor_eqs.items():
            g = eq.substitute(pullback)
            drop = g.var_min_exponent(pivot)
            if drop:
                g = g.divide_var_power(pivot, drop)
            eqs[did] = g
        eqs[step_no] = u_pivot
        new_charts.append(
            Chart(
                cid=base_cid + len(new_charts),
                parent=chart.cid,
                pivot=pivot,
                step=step_no,
                pullback=pullback,
                frame=frame,
                divisor_eqs=eqs,
            )
        )

    record = DivisorRecord(step_no, k, new_charts[0].cid, contained)
    step = Step(CenterSpec(center.chart, tuple(sorted(cmap.items()))), tuple(c.cid for c in new_charts), record)
    return Tower(dom, n, t.charts + tuple(new_charts), t.steps + (step,)), step_no


# -- valuations ---------------------------------------------------------------


def valuation_of_poly(t: Tower, did: int, f: Polynomial) -> int:
    """Order of the total transform of f along the divisor, in its home chart."""
    rec = t.divisor(did)
    if f.domain != t.domain or f.nvars != t.n:
        raise RingMismatch("polynomial does not live in the tower's base ring")
    chart = t.chart(rec.home_chart)
    total = f.substitute(list(chart.frame))
    return total.var_min_exponent(chart.pivot)


def valuation(t: Tower, did: int, a: Ideal) -> int:
    """v_E(a) = min of v_E over the generators."""
    t._check_base_ideal(a)
    return min(valuation_of_poly(t, did, g) for g in a.gens)


def weak_transform(t: Tower, a: Ideal, chart_id: int):
    """Transform a base ideal into a chart, stripping each step's divisor.

    Walks the chart's parent chain from the root.  At every step the
    generators are pulled back and then all divided by the step's pivot to
    the minimal power it carries, so the zero locus of the result contains
    no whole exceptional divisor of the chain.

    Returns (Ideal in chart coordinates, [(divisor id, stripped power)]).
    """
    t._check_base_ideal(a)
    path = []
    chart = t.chart(chart_id)
    while chart.parent is not None:
        path.append(chart)
        chart = t.chart(chart.parent)
    path.reverse()

    gens = list(a.gens)
    removed = []
    for ch in path:
        gens = [g.substitute(list(ch.pullback)) for g in gens]
        drop = min(g.var_min_exponent(ch.pivot) for g in gens)
        if drop:
            gens = [g.divide_var_power(ch.pivot, drop) for g in gens]
        removed.append((ch.step, drop))
    return Ideal(t.domain, t.n, gens), removed


# -- general points ------------------------------------------------------------


def _value_stream(domain: Domain, radius: int):
    if domain.kind == Domain.GF_KIND:
        return list(range(domain.p))
    if domain.kind == Domain.Q_KIND:
        out = [Fraction(0)]
        for v in range(1, radius + 1):
            out.append(Fraction(v))
            out.append(Fraction(-v))
        return out
    raise RingMismatch("point search needs a field")


def point_on_divisor_avoiding(
    t: Tower,
    did: int,
    avoid_divisors=(),
    avoid_loci=(),
    radius: int = 50,
) -> CenterSpec:
    """First point on the divisor passing all avoidance predicates.

    The point lives in the divisor's home chart with the pivot coordinate
    pinned to 0; the free coordinates run through a fixed enumeration
    (0..p-1 over F_p; 0, 1, -1, 2, -2, ... over Q), first coordinate
    slowest.  A point is accepted when every avoided divisor's local
    equation is nonzero there and every avoided locus has some generator
    nonzero there.  Exhaustion raises GeneralPointNotFound, which over a
    small prime field is a real possibility the caller must handle.
    """
    rec = t.divisor(did)
    chart = t.chart(rec.home_chart)
    dom, n = t.domain, t.n
    pivot = chart.pivot

    eqs = []
    for d in avoid_divisors:
        if d == did:
            continue
        if d not in chart.divisor_eqs:
            raise UnknownDivisor(f"divisor {d} has no trace in chart {chart.cid}")
        eqs.append(chart.divisor_eqs[d])
    loci = []
    for locus in avoid_loci:
        gens = locus.gens if isinstance(locus, Ideal) else tuple(locus)
        if not gens:
            raise ZeroIdeal("cannot avoid the zero locus of the zero ideal")
        loci.append(gens)

    stream = _value_stream(dom, radius)
    free = [i for i in range(n) if i != pivot]
    zero = dom.zero()
    for combo in itertools.product(stream, repeat=len(free)):
        pt = [zero] * n
        for i, v in zip(free, combo):
            pt[i] = v
        if any(eq.evaluate(pt) == 0 for eq in eqs):
            continue
        if any(all(g.evaluate(pt) == 0 for g in gens) for gens in loci):
            continue
        return CenterSpec.make(chart.cid, {i: pt[i] for i in range(n)}, dom)
    raise GeneralPointNotFound(
        f"no point on divisor {did} in chart {chart.cid} passes the "
        f"{len(eqs) + len(loci)} avoidance predicates"
    )


# -- suspension ------------------------------------------------------------------


def suspend(t: Tower, a: Ideal | None = None):
    """Replay the tower inside the hyperplane x_{N+1} = 0 of A^{N+1}.

    Every center gains the constraint x_{N+1} = 0 and the optional ideal is
    extended by reading its generators in N+1 variables.  Valuations along
    corresponding divisors are preserved; discrepancies shift.
    """
    dom, n = t.domain, t.n
    out = new_tower(n + 1, dom)
    chart_map = {0: 0}
    for step in t.steps:
        assignment = {i: c for i, c in step.center.constraints}
        assignment[n] = 0
        out, _ = blow_up(out, CenterSpec.make(chart_map[step.center.chart], assignment, dom))
        new_step = out.steps[-1]
        by_pivot = {out.chart(c).pivot: c for c in new_step.chart_ids}
        for cid in step.chart_ids:
            chart_map[cid] = by_pivot[t.chart(cid).pivot]
    if a is None:
        return out, None
    padded = Ideal(
        dom,
        n + 1,
        [
            Polynomial.from_terms(dom, n + 1, ((m + (0,), c) for m, c in g.terms.items()))
            for g in a.gens
        ],
    )
    return out, padded


# -- cross-checks and views -------------------------------------------------------


def _det(matrix, dom, n):
    size = len(matrix)
    if size == 1:
        return matrix[0][0]
    total = Polynomial.zero(dom, n)
    for j in range(size):
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        piece = matrix[0][j] * _det(minor, dom, n)
        total = total + (piece if j % 2 == 0 else -piece)
    return total


def discrepancy_via_jacobian(t: Tower, did: int) -> int:
    """Order of the frame's Jacobian determinant along the divisor.

    Independent of the containment recursion; the two must agree on every
    tower, which the test suite asserts.
    """
    rec = t.divisor(did)
    chart = t.chart(rec.home_chart)
    n = t.n
    matrix = [[chart.frame[i].derivative(j) for j in range(n)] for i in range(n)]
    jac = _det(matrix, t.domain, n)
    return jac.var_min_exponent(chart.pivot)


def equivalent_center_specs(t: Tower, center: CenterSpec) -> list:
    """Other-chart views of a point center, for chart-independence checks.

    A point in a chart created with pivot l is visible in the sibling chart
    with pivot j exactly when its j-th coordinate is nonzero; the returned
    specs name the same geometric point there.
    """
    chart = t.chart(center.chart)
    if chart.parent is None:
        return []
    cmap = dict(center.constraints)
    if len(cmap) != t.n:
        return []
    dom = t.domain
    parent_step = t.steps[chart.step - 1]
    prev_S = set(parent_step.center.indices())
    piv = chart.pivot
    out = []
    for sibling_cid in parent_step.chart_ids:
        sib = t.chart(sibling_cid)
        j = sib.pivot
        if j == piv or cmap[j] == dom.zero():
            continue
        inv = dom.inv(cmap[j])
        coords = {}
        for i in range(t.n):
            if i == j:
                coords[i] = dom.mul(cmap[piv], cmap[j])
            elif i == piv:
                coords[i] = inv
            elif i in prev_S:
                coords[i] = dom.mul(cmap[i], inv)
            else:
                coords[i] = cmap[i]
        out.append(CenterSpec.make(sibling_cid, coords, dom))
    return out


def describe(t: Tower) -> dict:
    """Deterministic plain-data view used by the CLI and serialization."""
    names = default_names(t.n)

    def const_text(c):
        return str(c)

    return {
        "N": t.n,
        "domain": repr(t.domain),
        "steps": [
            {
                "chart": s.center.chart,
                "set": [[names[i], const_text(c)] for i, c in s.center.constraints],
            }
            for s in t.steps
        ],
        "divisors": [
            {
                "id": d.did,
                "k": d.k,
                "home_chart": d.home_chart,
                "contained_in": list(d.contained_in),
            }
            for d in t.divisors
        ],
        "charts": len(t.charts),
    }
