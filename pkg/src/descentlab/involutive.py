"""Poisson brackets, bracket-compatible composition, and smoothed covers.

Functions on a standard symplectic space are exact polynomials in the
position/momentum variables.  Cover sets cut out by sign conditions on such
functions get smooth replacements built from a hyperbola smoothing of the
coordinate cross; the smoothed values live in a tiny exact algebraic-number
type so that every sign decision and every comparison in the checkers is
made without floating point.
"""

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (BadSequence, HypothesisFailure, InputError,
                     LemmaViolation, ShapeMismatch)

INTERSECTION = "intersection"
UNION = "union"


# ---------------------------------------------------------------------------
# exact polynomials


class Poly:
    """Multivariate polynomial over the rationals, sparse monomial dict."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for exps, c in (terms or {}).items():
            c = Fraction(c)
            if not c:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise InputError(f"bad exponent vector {exps!r}")
            clean[exps] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def var(cls, nvars, i):
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, nvars, exps, c=1):
        return cls(nvars, {tuple(exps): Fraction(c)})

    def is_zero(self):
        return not self.terms

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def _check(self, other):
        if not isinstance(other, Poly) or other.nvars != self.nvars:
            raise ShapeMismatch("polynomials in different variable sets")

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.nvars, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly(self.nvars, out)

    def __pow__(self, k):
        if k < 0:
            raise InputError("negative power of a polynomial")
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                de = list(e)
                de[i] -= 1
                out[tuple(de)] = c * e[i]
        return Poly(self.nvars, out)

    def compose(self, args):
        """Substitute args[i] (all in a common variable set) for variable i."""
        if len(args) != self.nvars:
            raise ShapeMismatch(
                f"need {self.nvars} substitutions, got {len(args)}")
        nv = args[0].nvars
        for a in args:
            args[0]._check(a)
        out = Poly.zero(nv)
        for e, c in self.terms.items():
            prod = Poly.const(nv, c)
            for i, k in enumerate(e):
                if k:
                    prod = prod * args[i] ** k
            out = out + prod
        return out

    def __call__(self, point):
        if len(point) != self.nvars:
            raise ShapeMismatch("evaluation point has the wrong length")
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def __repr__(self):
        return f"Poly({self.nvars}, {format_poly(self)!r})"


def default_names(nvars):
    return [f"x{i + 1}" for i in range(nvars)]


def symplectic_names(npairs):
    """Position then momentum variables: q1..qn, p1..pn."""
    return ([f"q{i + 1}" for i in range(npairs)]
            + [f"p{i + 1}" for i in range(npairs)])


def format_poly(p, names=None):
    names = names or default_names(p.nvars)
    if len(names) != p.nvars:
        raise InputError("one name per variable required")
    if not p.terms:
        return "0"
    order = sorted(p.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
    chunks = []
    for e in order:
        c = p.terms[e]
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors or mag != 1:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if not chunks:
            chunks.append(body if c > 0 else f"-{body}")
        else:
            chunks.append(f"{'+' if c > 0 else '-'} {body}")
    return " ".join(chunks)


_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|[A-Za-z_][A-Za-z0-9_]*|\^|\*|\+|\-)")


def parse_poly(text, names):
    """Parse sums of '*'-joined factors; factors are rationals or name[^k]."""
    index = {n: i for i, n in enumerate(names)}
    nvars = len(names)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise InputError(f"cannot tokenize {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens:
        raise InputError("empty polynomial text")

    cursor = 0

    def peek():
        return tokens[cursor] if cursor < len(tokens) else None

    def take():
        nonlocal cursor
        tok = peek()
        cursor += 1
        return tok

    def factor():
        tok = take()
        if tok is None:
            raise InputError("truncated polynomial text")
        if tok[0].isdigit():
            return Poly.const(nvars, Fraction(tok))
        if tok in index:
            base = Poly.var(nvars, index[tok])
            if peek() == "^":
                take()
                exp = take()
                if exp is None or not exp.isdigit():
                    raise InputError("exponent must be a nonnegative integer")
                return base ** int(exp)
            return base
        raise InputError(f"unknown variable {tok!r}")

    def term():
        out = factor()
        while peek() == "*":
            take()
            out = out * factor()
        return out

    sign = 1
    if peek() in ("+", "-"):
        sign = -1 if take() == "-" else 1
    total = term().scale(sign)
    while peek() is not None:
        op = take()
        if op not in ("+", "-"):
            raise InputError(f"expected + or - at {op!r}")
        total = total + term().scale(-1 if op == "-" else 1)
    return total


# ---------------------------------------------------------------------------
# Poisson bracket and the composition property


def poisson_bracket(f, g):
    """Canonical bracket: variables split into positions then momenta."""
    f._check(g)
    if f.nvars % 2:
        raise ShapeMismatch("symplectic variables come in pairs")
    n = f.nvars // 2
    out = Poly.zero(f.nvars)
    for i in range(n):
        out = out + f.diff(i) * g.diff(n + i) - f.diff(n + i) * g.diff(i)
    return out


def check_composition_lemma(fs, g1, g2):
    """Pairwise-commuting fs stay commuting after substitution into g1, g2.

    Verifies {f_i, f_j} = 0 symbolically (HypothesisFailure otherwise),
    forms G_l = g_l(f_1, ..., f_N), and asserts {G_1, G_2} = 0 exactly.
    A violation at the second stage would be a bug in the bracket or in
    substitution, so it raises LemmaViolation rather than returning.
    """
    fs = list(fs)
    if not fs:
        raise InputError("need at least one inner function")
    for f in fs:
        fs[0]._check(f)
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            br = poisson_bracket(fs[i], fs[j])
            if not br.is_zero():
                raise HypothesisFailure((i, j, format_poly(br)))
    if g1.nvars != len(fs) or g2.nvars != len(fs):
        raise ShapeMismatch("outer functions must take one slot per inner one")
    G1 = g1.compose(fs)
    G2 = g2.compose(fs)
    br = poisson_bracket(G1, G2)
    if not br.is_zero():
        raise LemmaViolation(format_poly(br))
    return True


# ---------------------------------------------------------------------------
# exact values of the form (a + b*sqrt(disc)) / sqrt(2)


def _sgn(x):
    return (x > 0) - (x < 0)


def _exact_sqrt(d):
    """Rational square root of a nonnegative Fraction, or None."""
    if d == 0:
        return Fraction(0)
    rn = math.isqrt(d.numerator)
    rd = math.isqrt(d.denominator)
    if rn * rn == d.numerator and rd * rd == d.denominator:
        return Fraction(rn, rd)
    return None


def _sqrt_bounds(d, eps):
    lo, hi = Fraction(0), max(Fraction(1), Fraction(d))
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if mid * mid <= d:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _two_term_sign(a, b, d):
    """Sign of a + b*sqrt(d) with d positive and not a perfect square."""
    if a == 0:
        return _sgn(b)
    if _sgn(a) == _sgn(b):
        return _sgn(a)
    return _sgn(a) if a * a > b * b * d else _sgn(b)


class AlgebraicValue:
    """The exact number (a + b*sqrt(disc)) / sqrt(2).

    Rational square roots are folded into the rational part on
    construction, so afterwards disc is zero or irrational.  Instances
    compare exactly (a squaring argument settles equality; interval
    refinement of the square roots settles strict order), and adding a
    rational multiple of sqrt(2) stays in the representation — which is
    all the smoothing calculus needs.
    """

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b=0, disc=0):
        a, b, disc = Fraction(a), Fraction(b), Fraction(disc)
        if disc < 0:
            raise InputError("negative discriminant")
        root = _exact_sqrt(disc)
        if root is not None:
            a, b, disc = a + b * root, Fraction(0), Fraction(0)
        if b == 0:
            disc = Fraction(0)
        self.a, self.b, self.disc = a, b, disc

    @classmethod
    def from_rational(cls, r):
        return cls(0, Fraction(r), 2)

    def plus_sqrt2(self, s):
        """This value plus s*sqrt(2), exactly."""
        return AlgebraicValue(self.a + 2 * Fraction(s), self.b, self.disc)

    def sign(self):
        if self.b == 0:
            return _sgn(self.a)
        return _two_term_sign(self.a, self.b, self.disc)

    def _cmp(self, other):
        if not isinstance(other, AlgebraicValue):
            other = AlgebraicValue.from_rational(other)
        A = self.a - other.a
        B, d1 = self.b, self.disc
        C, d2 = -other.b, other.disc
        if B == 0 and C == 0:
            return _sgn(A)
        if B == 0:
            return _two_term_sign(A, C, d2)
        if C == 0:
            return _two_term_sign(A, B, d1)
        if d1 == d2:
            return AlgebraicValue(A, B + C, d1).sign()
        if A == 0 and B * B * d1 == C * C * d2 and _sgn(B) == -_sgn(C):
            return 0
        # nonzero: B*sqrt(d1) + C*sqrt(d2) = -A would force a rational
        # square root after squaring, so intervals must separate
        eps = Fraction(1, 4)
        while True:
            lo1, hi1 = _sqrt_bounds(d1, eps)
            lo2, hi2 = _sqrt_bounds(d2, eps)
            lo = A + B * (lo1 if B > 0 else hi1) + C * (lo2 if C > 0 else hi2)
            hi = A + B * (hi1 if B > 0 else lo1) + C * (hi2 if C > 0 else lo2)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            eps /= 16

    def __eq__(self, other):
        return self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    __hash__ = None

    def __float__(self):
        return ((float(self.a) + float(self.b) * math.sqrt(float(self.disc)))
                / math.sqrt(2.0))

    def __repr__(self):
        return f"AlgebraicValue({self.a}, {self.b}, {self.disc})"


# ---------------------------------------------------------------------------
# hyperbola smoothing of sign-cut regions


@dataclass(frozen=True)
class SmoothingCurve:
    """One hyperbola level set used to smooth a quadrant corner."""

    delta: Fraction
    mode: str = INTERSECTION

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if self.delta <= 0:
            raise InputError("smoothing parameter must be positive")
        if self.mode not in (INTERSECTION, UNION):
            raise InputError(f"unknown mode {self.mode!r}")


def smoothing_h(curve, x, y):
    """Signed slope-1 distance from (x, y) to the smoothing hyperbola.

    Closed form ((x+y) +/- sqrt((x-y)^2 + 4*delta)) / sqrt(2): plus for
    the intersection-corner branch (negative quadrant), minus for the
    union-corner branch (positive quadrant).  Negative exactly on the
    smoothed region, zero exactly on the curve.
    """
    x, y = Fraction(x), Fraction(y)
    disc = (x - y) ** 2 + 4 * curve.delta
    return AlgebraicValue(x + y, 1 if curve.mode == INTERSECTION else -1, disc)


def region_sign(curve, x, y):
    """Expected sign of smoothing_h from the raw region description."""
    x, y = Fraction(x), Fraction(y)
    if curve.mode == INTERSECTION:
        if x < 0 and y < 0:
            if x * y > curve.delta:
                return -1
            if x * y == curve.delta:
                return 0
        return 1
    if x > 0 and y > 0:
        if x * y > curve.delta:
            return 1
        if x * y == curve.delta:
            return 0
    return -1


@dataclass(frozen=True)
class CoverFunction:
    """Smoothed replacement g = h_delta(f1, f2) for one cover stage."""

    f1: Poly
    f2: Poly
    curve: SmoothingCurve

    def __call__(self, point):
        return smoothing_h(self.curve, self.f1(point), self.f2(point))


def _broadcast(fs, count, label):
    if isinstance(fs, Poly):
        return [fs] * count
    fs = list(fs)
    if len(fs) != count:
        raise InputError(f"{label}: need one function per smoothing parameter")
    return fs


def check_delta_sequence(deltas):
    deltas = [Fraction(d) for d in deltas]
    if any(d <= 0 for d in deltas):
        raise BadSequence("smoothing parameters must be positive")
    if any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise BadSequence("smoothing parameters must strictly decrease")
    return deltas


def build_cover_functions(f1_seq, f2_seq, mode, delta_seq):
    """Per-stage smoothed functions g_i = h_{delta_i}(f1_i, f2_i).

    A single polynomial in either slot is reused for every stage.  The
    smoothing parameters must be positive and strictly decreasing.
    """
    deltas = check_delta_sequence(delta_seq)
    f1s = _broadcast(f1_seq, len(deltas), "first slot")
    f2s = _broadcast(f2_seq, len(deltas), "second slot")
    return [CoverFunction(f1, f2, SmoothingCurve(d, mode))
            for f1, f2, d in zip(f1s, f2s, deltas)]


def _h_float(mode, delta, u, v):
    s = math.sqrt((u - v) ** 2 + 4.0 * float(delta))
    return ((u + v) + (s if mode == INTERSECTION else -s)) / math.sqrt(2.0)


def fold_cover_value(tree, deltas, point):
    """Smooth a union-of-intersections expression tree at one point.

    The tree is a Poly leaf or a tuple (mode, child, child, ...); each
    node is folded pairwise left to right, consuming one smoothing
    parameter per pairing in preorder.  Only the first pairing of a flat
    tree is exact arithmetic; nested folds feed irrational values back
    into the smoothing, so this evaluator works in floating point and is
    meant for sampling, not for exact certificates.
    """
    deltas = check_delta_sequence(deltas)
    feed = iter(deltas)

    def rec(node):
        if isinstance(node, Poly):
            return float(node(point))
        if not isinstance(node, tuple) or len(node) < 3 \
                or node[0] not in (INTERSECTION, UNION):
            raise InputError(f"bad tree node {node!r}")
        mode = node[0]
        value = rec(node[1])
        for child in node[2:]:
            try:
                delta = next(feed)
            except StopIteration:
                raise InputError("not enough smoothing parameters for tree")
            value = _h_float(mode, delta, value, rec(child))
        return value

    out = rec(tree)
    leftover = sum(1 for _ in feed)
    if leftover:
        raise InputError(f"{leftover} unused smoothing parameters")
    return out


# ---------------------------------------------------------------------------
# grid-sampled checkers


def grid_points(ranges):
    """Cartesian product of rational ranges [(lo, hi, step), ...]."""
    axes = []
    for lo, hi, step in ranges:
        lo, hi, step = Fraction(lo), Fraction(hi), Fraction(step)
        if step <= 0 or hi < lo:
            raise InputError("ranges need lo <= hi and positive step")
        axis = []
        x = lo
        while x <= hi:
            axis.append(x)
            x += step
        axes.append(axis)
    return [tuple(p) for p in itertools.product(*axes)]


def _point_repr(point):
    return [str(Fraction(x)) for x in point]


@dataclass
class WeakCoverReport:
    """Outcome of sampling the sign bullets for a candidate weak cover."""

    ok: bool
    violations: list
    bracket_checked: bool

    def to_json(self):
        return {"ok": self.ok, "bracket_checked": self.bracket_checked,
                "violations": self.violations}


def check_weak_cover_conditions(f_seqs, grid, predicates):
    """Sample the defining bullets of a weak cover candidate.

    For each set m with membership predicate predicates[m] and function
    sequence f_seqs[m], checks on every grid point that (a) members make
    every stage negative, (b) stages strictly increase, (c) all-stages-
    negative points are members; and symbolically that same-stage
    functions of different sets Poisson-commute (skipped unless every
    entry is a Poly).  Violations are reported with witnesses; nothing
    raises.
    """
    f_seqs = [list(seq) for seq in f_seqs]
    if len(predicates) != len(f_seqs):
        raise InputError("one membership predicate per function sequence")
    grid = list(grid)
    violations = []

    for m, seq in enumerate(f_seqs):
        for point in grid:
            values = [f(point) for f in seq]
            if predicates[m](point):
                for i, v in enumerate(values):
                    if not v < 0:
                        violations.append({
                            "bullet": "negative-on-set", "set": m,
                            "index": i, "point": _point_repr(point),
                            "value": str(v)})
            for i in range(len(values) - 1):
                if not values[i] < values[i + 1]:
                    violations.append({
                        "bullet": "strictly-increasing", "set": m,
                        "index": i, "point": _point_repr(point)})
            if values and all(v < 0 for v in values) \
                    and not predicates[m](point):
                violations.append({
                    "bullet": "captures-set", "set": m,
                    "point": _point_repr(point)})

    bracket_checked = all(isinstance(f, Poly)
                          for seq in f_seqs for f in seq)
    if bracket_checked and len(f_seqs) > 1:
        depth = min(len(seq) for seq in f_seqs)
        for i in range(depth):
            for m in range(len(f_seqs)):
                for m2 in range(m + 1, len(f_seqs)):
                    br = poisson_bracket(f_seqs[m][i], f_seqs[m2][i])
                    if not br.is_zero():
                        violations.append({
                            "bullet": "bracket", "sets": [m, m2],
                            "index": i, "value": format_poly(br)})

    return WeakCoverReport(ok=not violations, violations=violations,
                           bracket_checked=bracket_checked)


@dataclass
class MonotonicityReport:
    """Exact stage-monotonicity of smoothed functions, with the
    parameter bound each step imposes on the next smoothing level."""

    ok: bool
    violations: list
    step_bounds: list = field(default_factory=list)

    def to_json(self):
        return {"ok": self.ok, "violations": self.violations,
                "step_bounds": self.step_bounds}


def cover_monotonicity_report(cover_fns, grid):
    """Check g_i < g_{i+1} exactly on the grid.

    Shrinking the smoothing parameter pulls an intersection smoothing
    down and a union smoothing up, so strict growth of the inputs does
    not decide the matter by itself.  Alongside exact pass/fail this
    reports, per step, the binding constraint the sampled points place
    on the next parameter: a floor for intersections, a ceiling for
    unions (floating point, diagnostic only).
    """
    cover_fns = list(cover_fns)
    grid = list(grid)
    violations = []
    step_bounds = []
    for i in range(len(cover_fns) - 1):
        gi, gn = cover_fns[i], cover_fns[i + 1]
        mode = gi.curve.mode
        bound = None
        for point in grid:
            left, right = gi(point), gn(point)
            if not left < right:
                violations.append({
                    "step": i, "point": _point_repr(point),
                    "left": float(left), "right": float(right)})
            u, v = float(gi.f1(point)), float(gi.f2(point))
            u2, v2 = float(gn.f1(point)), float(gn.f2(point))
            root = math.sqrt((u - v) ** 2 + 4.0 * float(gi.curve.delta))
            if mode == INTERSECTION:
                reach = (u + v) - (u2 + v2) + root
                if reach > 0:
                    need = (reach ** 2 - (u2 - v2) ** 2) / 4.0
                    bound = need if bound is None else max(bound, need)
            else:
                reach = (u2 + v2) - (u + v) + root
                if reach > 0:
                    allow = (reach ** 2 - (u2 - v2) ** 2) / 4.0
                    bound = allow if bound is None else min(bound, allow)
        step_bounds.append({
            "step": i,
            "kind": "min_next_delta" if mode == INTERSECTION
            else "max_next_delta",
            "value": bound})
    return MonotonicityReport(ok=not violations, violations=violations,
                              step_bounds=step_bounds)
