"""Exact linear programming over slices of normal-surface cones.

The feasible region is ``{x >= 0, A x = 0, x_j = 0 (j in zero), sum x = 1}``.
Problems are solved with a dictionary-form simplex method over rationals
using Bland's rule, so results are exact and deterministic.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

ZERO = Fraction(0)


@dataclass(frozen=True)
class Optimum:
    status: str  # "optimal" or "infeasible"
    value: Fraction = None
    vertex: tuple = None
    basis: tuple = ()
    reduced_costs: tuple = ()  # all <= 0 at an optimum

    @property
    def feasible(self):
        return self.status == "optimal"


@dataclass(frozen=True)
class ConePolytope:
    """Slice ``sum x = 1`` of the cone cut out by ``rows`` (sparse dicts
    ``column -> coefficient``), non-negativity and the zero set."""

    rows: tuple
    column_count: int
    zero: frozenset = frozenset()


class _Dictionary:
    """``x_b = rhs[b] + sum_n coef[b][n] * x_n`` for each basic ``b``."""

    __slots__ = ("rhs", "coef", "nonbasic")

    def __init__(self, rhs, coef, nonbasic):
        self.rhs = rhs
        self.coef = coef
        self.nonbasic = nonbasic

    def copy(self):
        return _Dictionary(dict(self.rhs), {b: dict(r) for b, r in self.coef.items()}, set(self.nonbasic))

    def pivot(self, enter, leave):
        row = self.coef.pop(leave)
        r = self.rhs.pop(leave)
        a = row.pop(enter)
        # x_enter = (x_leave - r - sum row x_n) / a
        new = {n: -v / a for n, v in row.items()}
        new[leave] = 1 / a
        new_rhs = -r / a
        for b, brow in self.coef.items():
            c = brow.pop(enter, None)
            if c is None:
                continue
            self.rhs[b] += c * new_rhs
            for n, v in new.items():
                s = brow.get(n, ZERO) + c * v
                if s:
                    brow[n] = s
                else:
                    brow.pop(n, None)
        self.coef[enter] = new
        self.rhs[enter] = new_rhs
        self.nonbasic.discard(enter)
        self.nonbasic.add(leave)

    def drop_nonbasic(self, var):
        self.nonbasic.discard(var)
        for brow in self.coef.values():
            brow.pop(var, None)

    def objective_row(self, costs):
        """Value and reduced costs of ``sum costs[j] x_j``."""
        value = ZERO
        reduced = {n: costs.get(n, ZERO) for n in self.nonbasic}
        for b, brow in self.coef.items():
            c = costs.get(b)
            if not c:
                continue
            value += c * self.rhs[b]
            for n, v in brow.items():
                reduced[n] += c * v
        return value, reduced

    def maximize(self, costs):
        """Bland's rule simplex from a feasible dictionary.  Returns
        ``(value, reduced costs)``; raises on unboundedness."""
        while True:
            value, reduced = self.objective_row(costs)
            enter = None
            for n in sorted(self.nonbasic):
                if reduced[n] > 0:
                    enter = n
                    break
            if enter is None:
                return value, reduced
            leave = None
            best = None
            for b in sorted(self.coef):
                a = self.coef[b].get(enter)
                if a is not None and a < 0:
                    ratio = self.rhs[b] / -a
                    if best is None or ratio < best:
                        best, leave = ratio, b
            if leave is None:
                raise ArithmeticError("unbounded linear program")
            self.pivot(enter, leave)


_AUX = -1  # auxiliary phase-one variable; sorts before every column


def _make_feasible(d):
    """Phase one on a dictionary.  Returns False if infeasible."""
    negative = [b for b in d.coef if d.rhs[b] < 0]
    if not negative:
        return True
    for b in d.coef:
        d.coef[b][_AUX] = Fraction(1)
    d.nonbasic.add(_AUX)
    leave = min(negative, key=lambda b: (d.rhs[b], b))
    d.pivot(_AUX, leave)
    value, _ = d.maximize({_AUX: Fraction(-1)})
    if value < 0:
        return False
    if _AUX in d.coef:
        row = d.coef[_AUX]
        enter = min(row) if row else None
        if enter is None:
            del d.coef[_AUX]
            del d.rhs[_AUX]
            return True
        d.pivot(enter, _AUX)
    d.drop_nonbasic(_AUX)
    return True


def _initial_dictionary(rows, columns):
    """Reduced row echelon form of ``rows`` plus ``sum x = 1`` over the
    given columns, as a dictionary.  ``None`` when inconsistent."""
    cols = list(columns)
    colset = set(cols)
    work = []
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if c in colset and v}
        if r:
            work.append([r, ZERO])
    work.append([{c: Fraction(1) for c in cols}, Fraction(1)])
    pivots = {}
    remaining = work
    for c in cols:
        pick = None
        for k, (r, _) in enumerate(remaining):
            if c in r:
                pick = k
                break
        if pick is None:
            continue
        prow, prhs = remaining.pop(pick)
        a = prow[c]
        prow = {n: v / a for n, v in prow.items()}
        prhs = prhs / a
        for other in list(pivots.values()) + remaining:
            orow = other[0]
            f = orow.get(c)
            if f is None:
                continue
            for n, v in prow.items():
                s = orow.get(n, ZERO) - f * v
                if s:
                    orow[n] = s
                else:
                    orow.pop(n, None)
            other[1] -= f * prhs
        pivots[c] = [prow, prhs]
        remaining = [w for w in remaining if w[0] or w[1]]
    if any(not r and rhs for r, rhs in remaining):
        return None
    basic = set(pivots)
    nonbasic = set(cols) - basic
    rhs, coef = {}, {}
    for b, (prow, prhs) in pivots.items():
        rhs[b] = prhs
        coef[b] = {n: -v for n, v in prow.items() if n != b}
    return _Dictionary(rhs, coef, nonbasic)


class ConeSolver:
    """Reusable solver for one cone; extra coordinates can be zeroed per
    query (each query costs at most one pivot plus simplex iterations)."""

    def __init__(self, rows, column_count, zero=()):
        self.column_count = column_count
        zero = set(zero)
        self.columns = [c for c in range(column_count) if c not in zero]
        base = _initial_dictionary(rows, self.columns)
        if base is not None and not _make_feasible(base):
            base = None
        self._base = base
        self.lp_count = 0

    @property
    def feasible(self):
        return self._base is not None

    def maximize(self, costs, extra_zero=()):
        """Maximize ``sum costs[j] x_j``; ``costs`` is a sequence or dict."""
        self.lp_count += 1
        if self._base is None:
            return Optimum("infeasible")
        d = self._base.copy()
        for var in extra_zero:
            if var in d.nonbasic:
                d.drop_nonbasic(var)
            elif var in d.coef:
                row = d.coef[var]
                if not row:
                    if d.rhs[var]:
                        return Optimum("infeasible")
                    del d.coef[var]
                    del d.rhs[var]
                    continue
                d.pivot(min(row), var)
                d.drop_nonbasic(var)
        if not _make_feasible(d):
            return Optimum("infeasible")
        if not isinstance(costs, dict):
            costs = {j: Fraction(c) for j, c in enumerate(costs) if c}
        value, reduced = d.maximize(costs)
        vertex = [ZERO] * self.column_count
        for b, r in d.rhs.items():
            vertex[b] = r
        basis = tuple(sorted(d.coef))
        return Optimum(
            "optimal",
            value,
            tuple(vertex),
            basis,
            tuple(sorted(reduced.items())),
        )


def maximize(polytope, objective):
    solver = ConeSolver(polytope.rows, polytope.column_count, polytope.zero)
    return solver.maximize(objective)


def primitive_integer(vector):
    """Smallest non-negative integer vector on the ray through ``vector``."""
    vals = [Fraction(v) for v in vector]
    if not any(vals):
        raise ValueError("zero vector has no primitive multiple")
    if any(v < 0 for v in vals):
        raise ValueError("vector has negative entries")
    lcm = 1
    for v in vals:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vals]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


def _rank(rows):
    work = [dict(r) for r in rows if r]
    rank = 0
    while work:
        row = work.pop()
        if not row:
            continue
        c = min(row)
        a = row[c]
        rank += 1
        for other in work:
            f = other.get(c)
            if f is None:
                continue
            ratio = Fraction(f) / a
            for n, v in row.items():
                s = other.get(n, 0) - ratio * v
                if s:
                    other[n] = s
                else:
                    other.pop(n, None)
        work = [w for w in work if w]
    return rank


def on_extreme_ray(rows, column_count, x, zero=()):
    """True iff ``x`` spans an extreme ray of the cone ``{y >= 0, rows . y
    = 0, y_j = 0 for j in zero}``."""
    zero = set(zero)
    if any(v < 0 for v in x) or any(x[j] for j in zero):
        raise ValueError("vector violates the cone's sign pattern")
    if any(sum(c * x[j] for j, c in row.items()) for row in rows):
        raise ValueError("vector violates the cone's equations")
    if not any(x):
        return False
    active = [dict(r) for r in rows]
    active += [{j: 1} for j in range(column_count) if x[j] == 0]
    return column_count - _rank(active) == 1
