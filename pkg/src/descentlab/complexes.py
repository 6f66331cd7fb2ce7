"""Bounded cochain complexes over Q or a truncated Novikov ring.

Conventions fixed here and relied on everywhere else:

* differentials raise degree by one, d_n : C^n -> C^{n+1};
* shift is C[k]^n = C^{n-k} with differential (-1)^k d;
* cone(f)^n = C^{n+1} (+) D^n with d(c, x) = (-d c, d x - f c);
* cocone(f) = cone(f)[1], which maps onto the source of f;
* tensor differential uses the Koszul sign (-1)^{deg of the left factor}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotAComplex, RingMismatch, ShapeMismatch, UnsupportedRing
from .linalg import (Echelon, SparseMatrix, TrackedEchelon, kernel_basis,
                     matrix_from_columns, rank, vec_axpy, vec_scale)
from .scalars import (QQ, NovikovElem, NovikovRing, coerce_scalar,
                      format_novikov, format_rational, parse_novikov,
                      scalar_is_zero)


class Complex:
    """A bounded cochain complex with explicit sparse differentials."""

    def __init__(self, ring, dims, diff, labels=None, meta=None, support=None):
        self.ring = ring
        self.dims = {n: d for n, d in dims.items()}
        if support is None:
            if self.dims:
                support = (min(self.dims), max(self.dims))
            else:
                support = (0, 0)
        self.support = support
        for n in range(support[0], support[1] + 1):
            self.dims.setdefault(n, 0)
        self.diff = dict(diff)
        self.labels = labels
        self.meta = dict(meta or {})

    # -- shape helpers ----------------------------------------------------

    def degrees(self):
        return range(self.support[0], self.support[1] + 1)

    def dim(self, n) -> int:
        return self.dims.get(n, 0)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def d(self, n) -> SparseMatrix:
        m = self.diff.get(n)
        if m is None:
            return SparseMatrix(self.dim(n + 1), self.dim(n))
        return m

    def label(self, n, i):
        if self.labels and n in self.labels:
            return self.labels[n][i]
        return (n, i)

    def validate(self):
        """Check shapes and d^2 = 0; raises NotAComplex / ShapeMismatch."""
        for n, m in self.diff.items():
            if (m.nrows, m.ncols) != (self.dim(n + 1), self.dim(n)):
                raise ShapeMismatch(
                    f"differential at degree {n} has shape {m.nrows}x{m.ncols}, "
                    f"expected {self.dim(n + 1)}x{self.dim(n)}")
        for n in self.degrees():
            if not (self.d(n + 1) @ self.d(n)).is_zero():
                raise NotAComplex(n)
        return True

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        if self.ring != other.ring or self.support != other.support:
            return False
        if any(self.dim(n) != other.dim(n) for n in self.degrees()):
            return False
        return all(self.d(n) == other.d(n) for n in self.degrees())

    def __repr__(self):
        dims = {n: self.dim(n) for n in self.degrees() if self.dim(n)}
        return f"Complex(ring={self.ring!r}, dims={dims})"


def zero_complex(ring=QQ) -> Complex:
    return Complex(ring, {0: 0}, {})


def single(ring=QQ, degree=0, dim=1) -> Complex:
    """A complex concentrated in one degree with zero differential."""
    return Complex(ring, {degree: dim}, {})


class ChainMap:
    """Degree-shifting map of complexes; shift s means f : C^n -> D^{n+s}."""

    def __init__(self, source: Complex, target: Complex, mats, shift=0):
        if source.ring != target.ring:
            raise RingMismatch("chain map between different coefficient rings")
        self.source = source
        self.target = target
        self.shift = shift
        self.mats = dict(mats)

    def mat(self, n) -> SparseMatrix:
        m = self.mats.get(n)
        if m is None:
            return SparseMatrix(self.target.dim(n + self.shift), self.source.dim(n))
        return m

    def validate(self):
        s = self.shift
        for n, m in self.mats.items():
            if (m.nrows, m.ncols) != (self.target.dim(n + s), self.source.dim(n)):
                raise ShapeMismatch(f"chain map block at degree {n} has wrong shape")
        sign = -1 if s % 2 else 1
        for n in self.source.degrees():
            lhs = self.target.d(n + s) @ self.mat(n)
            rhs = (self.mat(n + 1) @ self.source.d(n)).scale(sign)
            if lhs != rhs:
                raise ShapeMismatch(f"does not commute with differentials at degree {n}")
        return True

    def apply(self, n, vec: dict) -> dict:
        return self.mat(n).matvec(vec)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other (other then self)."""
        if other.target is not self.source and other.target != self.source:
            raise ShapeMismatch("composition target/source mismatch")
        mats = {}
        for n in other.source.degrees():
            m = self.mat(n + other.shift) @ other.mat(n)
            if not m.is_zero() or True:
                mats[n] = m
        return ChainMap(other.source, self.target, mats, self.shift + other.shift)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        if self.shift != other.shift:
            raise ShapeMismatch("cannot add maps with different shifts")
        mats = {n: self.mat(n) + other.mat(n) for n in self.source.degrees()}
        return ChainMap(self.source, self.target, mats, self.shift)

    def scale(self, s) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: m.scale(s) for n, m in self.mats.items()}, self.shift)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.shift != other.shift:
            return False
        return all(self.mat(n) == other.mat(n) for n in self.source.degrees())

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        mats = {n: SparseMatrix.identity(c.dim(n)) for n in c.degrees()}
        return cls(c, c, mats)

    @classmethod
    def zero(cls, source: Complex, target: Complex, shift=0) -> "ChainMap":
        return cls(source, target, {}, shift)


# ---------------------------------------------------------------------------
# constructors


def shift(c: Complex, k: int) -> Complex:
    """C[k] with C[k]^n = C^{n-k} and differential (-1)^k d."""
    dims = {n + k: c.dim(n) for n in c.degrees()}
    sign = -1 if k % 2 else 1
    diff = {n + k: c.d(n).scale(sign) for n in c.degrees() if not c.d(n).is_zero()}
    labels = None
    if c.labels is not None:
        labels = {n + k: list(c.labels.get(n, [])) for n in c.degrees()}
    return Complex(c.ring, dims, diff, labels=labels,
                   support=(c.support[0] + k, c.support[1] + k))


@dataclass
class MappingCone:
    """cone(f) together with its two canonical maps."""

    cx: Complex
    from_target: ChainMap      # D -> cone(f), degree 0
    to_shifted_source: ChainMap  # cone(f) -> C[-1], degree 0


def cone(f: ChainMap) -> MappingCone:
    """Mapping cone of a degree-0 chain map f : C -> D.

    Degree n part is C^{n+1} (+) D^n, source block listed first, with
    d(c, x) = (-d_C c, d_D x - f(c)).
    """
    if f.shift != 0:
        raise ShapeMismatch("cone expects a degree-0 chain map")
    C, D = f.source, f.target
    lo = min(C.support[0] - 1, D.support[0])
    hi = max(C.support[1] - 1, D.support[1])
    dims, labels = {}, {}
    for n in range(lo, hi + 1):
        dims[n] = C.dim(n + 1) + D.dim(n)
        labels[n] = [("src", C.label(n + 1, i)) for i in range(C.dim(n + 1))] + \
                    [("tgt", D.label(n, j)) for j in range(D.dim(n))]
    diff = {}
    for n in range(lo, hi):
        m = SparseMatrix(dims.get(n + 1, 0), dims.get(n, 0))
        cs = C.dim(n + 1)  # column split
        rs = C.dim(n + 2)  # row split
        m.paste(C.d(n + 1), 0, 0, -1)
        m.paste(f.mat(n + 1), rs, 0, -1)
        m.paste(D.d(n), rs, cs, 1)
        diff[n] = m
    cx = Complex(C.ring, dims, diff, labels=labels, support=(lo, hi))
    inc = {}
    for n in D.degrees():
        m = SparseMatrix(cx.dim(n), D.dim(n))
        m.paste(SparseMatrix.identity(D.dim(n)), C.dim(n + 1), 0)
        inc[n] = m
    from_target = ChainMap(D, cx, inc)
    Cm1 = shift(C, -1)
    proj = {}
    for n in cx.degrees():
        m = SparseMatrix(Cm1.dim(n), cx.dim(n))
        m.paste(SparseMatrix.identity(C.dim(n + 1)), 0, 0)
        proj[n] = m
    to_shifted_source = ChainMap(cx, Cm1, proj)
    return MappingCone(cx, from_target, to_shifted_source)


@dataclass
class MappingCocone:
    cx: Complex
    to_source: ChainMap  # cocone(f) -> C, degree 0


def cocone(f: ChainMap) -> MappingCocone:
    """cocone(f) = cone(f)[1]; degree n part is C^n (+) D^{n-1}."""
    mc = cone(f)
    cx = shift(mc.cx, 1)
    C = f.source
    proj = {}
    for n in cx.degrees():
        m = SparseMatrix(C.dim(n), cx.dim(n))
        m.paste(SparseMatrix.identity(C.dim(n)), 0, 0)
        proj[n] = m
    return MappingCocone(cx, ChainMap(cx, C, proj))


@dataclass
class DirectSum:
    cx: Complex
    inclusions: list
    projections: list


def direct_sum(parts) -> DirectSum:
    parts = list(parts)
    if not parts:
        raise ShapeMismatch("direct sum of no complexes")
    ring = parts[0].ring
    if any(p.ring != ring for p in parts):
        raise RingMismatch("direct sum over mixed rings")
    lo = min(p.support[0] for p in parts)
    hi = max(p.support[1] for p in parts)
    dims, labels, offs = {}, {}, {}
    for n in range(lo, hi + 1):
        off, labs = [], []
        acc = 0
        for i, p in enumerate(parts):
            off.append(acc)
            labs.extend((i, p.label(n, j)) for j in range(p.dim(n)))
            acc += p.dim(n)
        dims[n] = acc
        offs[n] = off
        labels[n] = labs
    diff = {}
    for n in range(lo, hi):
        m = SparseMatrix(dims[n + 1], dims[n])
        for i, p in enumerate(parts):
            m.paste(p.d(n), offs[n + 1][i], offs[n][i])
        diff[n] = m
    cx = Complex(ring, dims, diff, labels=labels, support=(lo, hi))
    incs, projs = [], []
    for i, p in enumerate(parts):
        inc, proj = {}, {}
        for n in range(lo, hi + 1):
            mi = SparseMatrix(dims[n], p.dim(n))
            mi.paste(SparseMatrix.identity(p.dim(n)), offs[n][i], 0)
            inc[n] = mi
            mp = SparseMatrix(p.dim(n), dims[n])
            mp.paste(SparseMatrix.identity(p.dim(n)), 0, offs[n][i])
            proj[n] = mp
        incs.append(ChainMap(p, cx, inc))
        projs.append(ChainMap(cx, p, proj))
    return DirectSum(cx, incs, projs)


class TensorComplex:
    """Tensor product A (x) B with basis bookkeeping.

    Degree-n basis elements are triples (i, a, b): a runs over the basis of
    A^i and b over B^{n-i}, ordered by ascending i then a then b.
    """

    def __init__(self, A: Complex, B: Complex):
        if A.ring != B.ring:
            raise RingMismatch("tensor over mixed rings")
        self.A, self.B = A, B
        lo = A.support[0] + B.support[0]
        hi = A.support[1] + B.support[1]
        dims, labels, self._pos = {}, {}, {}
        for n in range(lo, hi + 1):
            basis = []
            for i in A.degrees():
                j = n - i
                if B.dim(j) == 0 or A.dim(i) == 0:
                    continue
                for a in range(A.dim(i)):
                    for b in range(B.dim(j)):
                        self._pos[(n, i, a, b)] = len(basis)
                        basis.append((i, A.label(i, a), B.label(j, b)))
            dims[n] = len(basis)
            labels[n] = basis
        diff = {}
        for n in range(lo, hi):
            m = SparseMatrix(dims[n + 1], dims[n])
            for (nn, i, a, b), col in self._pos.items():
                if nn != n:
                    continue
                j = n - i
                sign = -1 if i % 2 else 1
                for r, v in self.A.d(i).column(a).items():
                    m.rows[self._pos[(n + 1, i + 1, r, b)]][col] = v
                for r, v in self.B.d(j).column(b).items():
                    row = self._pos[(n + 1, i, a, r)]
                    w = m.rows[row].get(col)
                    w = v * sign if w is None else w + v * sign
                    if scalar_is_zero(w):
                        m.rows[row].pop(col, None)
                    else:
                        m.rows[row][col] = w
            diff[n] = m
        self.cx = Complex(A.ring, dims, diff, labels=labels, support=(lo, hi))

    def pos(self, n, i, a, b):
        return self._pos[(n, i, a, b)]

    def blocks(self, n):
        """Pairs (i, j) with nonzero contribution in degree n."""
        seen = []
        for i in self.A.degrees():
            j = n - i
            if self.A.dim(i) and self.B.dim(j):
                seen.append((i, j))
        return seen


def tensor(A: Complex, B: Complex) -> TensorComplex:
    return TensorComplex(A, B)


def koszul_swap(t_ab: TensorComplex, t_ba: TensorComplex) -> ChainMap:
    """The symmetry A (x) B -> B (x) A, a (x) b -> (-1)^{ij} b (x) a."""
    A, B = t_ab.A, t_ab.B
    mats = {}
    for n in t_ab.cx.degrees():
        m = SparseMatrix(t_ba.cx.dim(n), t_ab.cx.dim(n))
        for i in A.degrees():
            j = n - i
            if not (A.dim(i) and B.dim(j)):
                continue
            sign = -1 if (i * j) % 2 else 1
            for a in range(A.dim(i)):
                for b in range(B.dim(j)):
                    m.rows[t_ba.pos(n, j, b, a)][t_ab.pos(n, i, a, b)] = Fraction(sign)
        mats[n] = m
    return ChainMap(t_ab.cx, t_ba.cx, mats)


@dataclass
class Telescope:
    cx: Complex
    to_last: ChainMap  # quasi-isomorphism onto the final term


def telescope(terms, maps) -> Telescope:
    """Finite telescope of C_1 -> C_2 -> ... -> C_L.

    Modeled as cone(kappa - incl) where kappa - incl maps the sum of the
    first L-1 terms into the sum of all L, sending c_i to kappa_i(c_i) - c_i.
    The summing map onto C_L (compose the remaining kappas) is the canonical
    quasi-isomorphism.
    """
    terms = list(terms)
    maps = list(maps)
    L = len(terms)
    if L == 0 or len(maps) != L - 1:
        raise ShapeMismatch("telescope needs L terms and L-1 maps")
    for i, f in enumerate(maps):
        if f.shift != 0:
            raise ShapeMismatch("telescope maps must have degree 0")
    tail = direct_sum(terms)
    if L == 1:
        cx = terms[0]
        return Telescope(cx, ChainMap.identity(cx))
    head = direct_sum(terms[:-1])
    mats = {}
    for n in head.cx.degrees():
        m = SparseMatrix(tail.cx.dim(n), head.cx.dim(n))
        for i in range(L - 1):
            blk_in = head.projections[i].mat(n)
            m_k = tail.inclusions[i + 1].mat(n) @ maps[i].mat(n) @ blk_in
            m_i = tail.inclusions[i].mat(n) @ blk_in
            m = m + m_k - m_i
        mats[n] = m
    g = ChainMap(head.cx, tail.cx, mats)
    mc = cone(g)
    # collapse map onto the last term: (a, b) -> sum of pushforwards of b
    push = []
    for i in range(L):
        f = ChainMap.identity(terms[L - 1]) if i == L - 1 else None
        if f is None:
            f = maps[L - 2]
            for j in range(L - 3, i - 1, -1):
                f = f.compose(maps[j])
        push.append(f)
    mats = {}
    last = terms[-1]
    for n in mc.cx.degrees():
        m = SparseMatrix(last.dim(n), mc.cx.dim(n))
        cs = head.cx.dim(n + 1)
        for i in range(L):
            blk = push[i].mat(n) @ tail.projections[i].mat(n)
            for r, row in enumerate(blk.rows):
                for c, v in row.items():
                    w = m.rows[r].get(c + cs)
                    w = v if w is None else w + v
                    if scalar_is_zero(w):
                        m.rows[r].pop(c + cs, None)
                    else:
                        m.rows[r][c + cs] = w
        mats[n] = m
    return Telescope(mc.cx, ChainMap(mc.cx, last, mats))


def telescope_comparison(terms, maps, L1: int, L2: int):
    """Canonical map telescope(first L1) -> telescope(first L2), L1 <= L2.

    Inclusion of summands; used to probe which classes survive lengthening.
    """
    if not (1 <= L1 <= L2 <= len(terms)):
        raise ShapeMismatch("need 1 <= L1 <= L2 <= L")
    t1 = telescope(terms[:L1], maps[:L1 - 1])
    t2 = telescope(terms[:L2], maps[:L2 - 1])
    mats = {}
    for n in t1.cx.degrees():
        m = SparseMatrix(t2.cx.dim(n), t1.cx.dim(n))
        if L1 == 1:
            # t1 is the bare first term, sitting inside the B-block of t2
            head2 = sum(terms[i].dim(n + 1) for i in range(L2 - 1))
            m.paste(SparseMatrix.identity(terms[0].dim(n)), head2, 0)
        else:
            head2 = sum(terms[i].dim(n + 1) for i in range(L2 - 1))
            head1 = sum(terms[i].dim(n + 1) for i in range(L1 - 1))
            m.paste(SparseMatrix.identity(head1), 0, 0)
            tail1 = sum(terms[i].dim(n) for i in range(L1))
            m.paste(SparseMatrix.identity(tail1), head2, head1)
        mats[n] = m
    return t1, t2, ChainMap(t1.cx, t2.cx, mats)


def complete(c: Complex) -> Complex:
    """Completion at the truncation level: the identity, plus provenance."""
    if c.ring == QQ:
        raise UnsupportedRing("completion only applies over a truncated Novikov ring")
    meta = dict(c.meta)
    meta["completed"] = True
    meta["cutoff"] = format_rational(c.ring.cutoff)
    return Complex(c.ring, dict(c.dims), dict(c.diff), labels=c.labels,
                   meta=meta, support=c.support)


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyReport:
    """Per-degree homology invariants.

    Over Q: ``betti`` holds dimensions.  Over a truncated Novikov ring:
    ``torsion`` maps degree to the multiset (sorted descending) of u-orders k,
    one per cyclic summand R/(u^k) where u = T^(1/den); k equal to the
    truncation order means the class is annihilated by nothing below the
    cutoff.
    """

    ring_desc: str
    kind: str                      # "betti" or "torsion"
    betti: dict | None = None
    torsion: dict | None = None
    den: int | None = None
    truncation_order: int | None = None

    def to_json(self):
        out = {"ring": self.ring_desc, "kind": self.kind}
        if self.kind == "betti":
            out["betti"] = {str(n): b for n, b in sorted(self.betti.items())}
        else:
            out["torsion_u_orders"] = {str(n): list(ks) for n, ks in sorted(self.torsion.items())}
            out["den"] = self.den
            out["truncation_order"] = self.truncation_order
        return out

    def text(self):
        lines = [f"homology over {self.ring_desc}"]
        if self.kind == "betti":
            for n in sorted(self.betti):
                lines.append(f"  H^{n}: dim {self.betti[n]}")
        else:
            for n in sorted(self.torsion):
                ks = self.torsion[n]
                orders = ", ".join(f"T^({format_rational(Fraction(k, self.den))})" for k in ks)
                lines.append(f"  H^{n}: {len(ks)} cyclic summand(s) of order {orders or '-'}")
        return "\n".join(lines)


def betti_numbers(c: Complex) -> dict:
    if c.ring != QQ:
        raise UnsupportedRing("betti numbers require Q coefficients")
    ranks = {n: rank(c.d(n)) for n in c.degrees()}
    out = {}
    for n in c.degrees():
        out[n] = c.dim(n) - ranks.get(n, 0) - ranks.get(n - 1, 0)
    return out


def _novikov_terms(elem):
    """(exponent, coefficient) pairs of a ring element.

    Plain rationals (which sneak in through identity and sign matrices)
    count as valuation-zero scalars.
    """
    if isinstance(elem, NovikovElem):
        return elem.terms.items()
    return [(Fraction(0), Fraction(elem))]


def novikov_q_expansion(c: Complex):
    """Flatten a truncated-Novikov complex to Q, with the u-action matrices.

    Basis in each degree: e_j (x) u^t for j the original index, 0 <= t < m.
    Returns (qdims, qdiff, uact) keyed by degree.
    """
    ring: NovikovRing = c.ring
    m = ring.truncation_order
    den = ring.den
    qdims = {n: c.dim(n) * m for n in c.degrees()}
    qdiff, uact = {}, {}
    for n in c.degrees():
        dm = c.d(n)
        q = SparseMatrix(qdims.get(n + 1, 0), qdims[n])
        for r, crow in enumerate(dm.rows):
            for ccol, elem in crow.items():
                for a, coeff in _novikov_terms(elem):
                    s = int(a * den)
                    for t in range(m - s):
                        q.rows[r * m + t + s][ccol * m + t] = coeff
        qdiff[n] = q
        u = SparseMatrix(qdims[n], qdims[n])
        for j in range(c.dim(n)):
            for t in range(m - 1):
                u.rows[j * m + t + 1][j * m + t] = Fraction(1)
        uact[n] = u
    return qdims, qdiff, uact


def novikov_q_expansion_complex(c: Complex) -> Complex:
    """The Q-complex underlying a truncated-Novikov complex."""
    qdims, qdiff, _ = novikov_q_expansion(c)
    return Complex(QQ, qdims, qdiff, support=c.support)


def novikov_q_expansion_map(f: ChainMap, qsrc: Complex, qtgt: Complex) -> ChainMap:
    """The Q-linear chain map underlying a truncated-Novikov chain map.

    qsrc and qtgt must be the expansions of f's source and target.
    """
    ring: NovikovRing = f.source.ring
    m, den = ring.truncation_order, ring.den
    mats = {}
    for n in f.source.degrees():
        blk = f.mat(n)
        q = SparseMatrix(qtgt.dim(n + f.shift), qsrc.dim(n))
        for r, row in enumerate(blk.rows):
            for c, elem in row.items():
                for a, coeff in _novikov_terms(elem):
                    s = int(a * den)
                    for t in range(m - s):
                        q.rows[r * m + t + s][c * m + t] = coeff
        mats[n] = q
    return ChainMap(qsrc, qtgt, mats, f.shift)


def _nilpotent_partition(mat: SparseMatrix, dim: int):
    """Jordan block sizes of a nilpotent operator, largest first."""
    if dim == 0:
        return []
    ranks = [dim]
    power = mat
    while ranks[-1] > 0:
        ranks.append(rank(power))
        power = power @ mat
    blocks = []
    for s in range(1, len(ranks)):
        b_s = ranks[s - 1] - ranks[s]
        b_next = ranks[s] - ranks[s + 1] if s + 1 < len(ranks) else 0
        blocks.extend([s] * (b_s - b_next))
    return sorted(blocks, reverse=True)


def homology(c: Complex) -> HomologyReport:
    """Homology invariants; see HomologyReport for the two shapes."""
    if c.ring == QQ:
        return HomologyReport("Q", "betti", betti=betti_numbers(c))
    ring: NovikovRing = c.ring
    m = ring.truncation_order
    qdims, qdiff, uact = novikov_q_expansion(c)
    torsion = {}
    for n in c.degrees():
        cycles = kernel_basis(qdiff[n]) if qdims[n] else []
        prev = qdiff.get(n - 1)
        te = TrackedEchelon()
        nb = 0
        if prev is not None:
            for j in range(prev.ncols):
                if te.add(prev.column(j), ("b", nb)):
                    pass
                nb += 1
        reps = []
        for z in cycles:
            if te.add(z, ("h", len(reps))):
                reps.append(z)
        h = len(reps)
        if h == 0:
            torsion[n] = []
            continue
        u = uact[n]
        umat = SparseMatrix(h, h)
        for j, z in enumerate(reps):
            coords = te.represent(u.matvec(z))
            for (tag, i), v in coords.items():
                if tag == "h":
                    umat.rows[i][j] = v
        torsion[n] = _nilpotent_partition(umat, h)
    desc = f"Novikov(den={ring.den}, cutoff={format_rational(ring.cutoff)})"
    return HomologyReport(desc, "torsion", torsion=torsion, den=ring.den,
                          truncation_order=m)


class HomologySpace:
    """Cycle representatives and projection-to-coordinates in one degree."""

    def __init__(self, c: Complex, n: int):
        if c.ring != QQ:
            raise UnsupportedRing("homology spaces require Q coefficients")
        self.cx, self.n = c, n
        self._te = TrackedEchelon()
        prev = c.d(n - 1)
        for j in range(prev.ncols):
            self._te.add(prev.column(j), ("b", j))
        self.reps = []
        for z in kernel_basis(c.d(n)):
            if self._te.add(z, ("h", len(self.reps))):
                self.reps.append(z)

    @property
    def dim(self):
        return len(self.reps)

    def project(self, vec: dict):
        """Coordinates of a cycle's class in the representative basis."""
        if not all(scalar_is_zero(v) for v in self.cx.d(self.n).matvec(vec).values()):
            raise ShapeMismatch("vector is not a cycle")
        coords = self._te.represent(vec)
        if coords is None:
            raise ShapeMismatch("cycle not in span of boundaries and representatives")
        return {i: v for (tag, i), v in coords.items() if tag == "h"}


def homology_map(f: ChainMap, n: int):
    """Matrix of H^n(f) in the HomologySpace representative bases."""
    hs, ht = HomologySpace(f.source, n), HomologySpace(f.target, n + f.shift)
    m = SparseMatrix(ht.dim, hs.dim)
    for j, z in enumerate(hs.reps):
        for i, v in ht.project(f.mat(n).matvec(z)).items():
            m.rows[i][j] = v
    return m, hs, ht


@dataclass
class QuasiIsoCertificate:
    ok: bool
    cone_betti: dict
    witness_degree: int | None

    def to_json(self):
        return {"quasi_iso": self.ok,
                "cone_betti": {str(n): b for n, b in sorted(self.cone_betti.items())},
                "witness_degree": self.witness_degree}


def is_quasi_iso(f: ChainMap) -> QuasiIsoCertificate:
    """f is a quasi-isomorphism iff cone(f) is acyclic (field coefficients)."""
    if f.source.ring != QQ:
        raise UnsupportedRing("quasi-isomorphism certificates require Q coefficients")
    if f.shift != 0:
        raise ShapeMismatch("expected a degree-0 chain map")
    cb = betti_numbers(cone(f).cx)
    witness = None
    for n in sorted(cb):
        if cb[n] != 0:
            witness = n
            break
    return QuasiIsoCertificate(witness is None, cb, witness)


def change_basis(c: Complex, mats: dict, inv: dict) -> Complex:
    """Conjugate the differential by degreewise isomorphisms U (with inverses)."""
    diff = {}
    for n in c.degrees():
        U1 = mats.get(n + 1, SparseMatrix.identity(c.dim(n + 1)))
        Uinv = inv.get(n, SparseMatrix.identity(c.dim(n)))
        diff[n] = U1 @ c.d(n) @ Uinv
    return Complex(c.ring, dict(c.dims), diff, support=c.support)


# ---------------------------------------------------------------------------
# serialization


def scalar_to_str(x) -> str:
    from .scalars import NovikovElem
    if isinstance(x, NovikovElem):
        return format_novikov(x)
    return format_rational(x)


def ring_to_json(ring):
    if ring == QQ:
        return "Q"
    return {"novikov": {"den": ring.den, "cutoff": format_rational(ring.cutoff)}}


def ring_from_json(obj):
    if obj == "Q":
        return QQ
    if isinstance(obj, dict) and "novikov" in obj:
        nv = obj["novikov"]
        return NovikovRing(int(nv["den"]), Fraction(str(nv["cutoff"])))
    raise ValueError(f"unknown ring descriptor {obj!r}")


def parse_scalar(ring, s):
    if ring == QQ:
        return Fraction(str(s))
    return parse_novikov(ring, str(s))


def complex_to_json(c: Complex):
    return {
        "coeff": ring_to_json(c.ring),
        "support": [c.support[0], c.support[1]],
        "dims": {str(n): c.dim(n) for n in c.degrees()},
        "diff": {str(n): [[r, col, scalar_to_str(v)] for r, col, v in sorted(c.d(n).entries())]
                 for n in c.degrees() if not c.d(n).is_zero()},
    }


def complex_from_json(obj) -> Complex:
    ring = ring_from_json(obj["coeff"])
    support = tuple(obj["support"])
    dims = {int(n): int(d) for n, d in obj["dims"].items()}
    diff = {}
    for n_str, triples in obj.get("diff", {}).items():
        n = int(n_str)
        entries = [(int(r), int(col), parse_scalar(ring, v)) for r, col, v in triples]
        diff[n] = SparseMatrix.from_entries(dims.get(n + 1, 0), dims.get(n, 0), entries)
    return Complex(ring, dims, diff, support=support)


def chain_map_to_json(f: ChainMap):
    return {
        "shift": f.shift,
        "mats": {str(n): [[r, c, scalar_to_str(v)] for r, c, v in sorted(f.mat(n).entries())]
                 for n in f.source.degrees() if not f.mat(n).is_zero()},
    }


def chain_map_from_json(source: Complex, target: Complex, obj) -> ChainMap:
    s = int(obj.get("shift", 0))
    mats = {}
    for n_str, triples in obj.get("mats", {}).items():
        n = int(n_str)
        entries = [(int(r), int(c), parse_scalar(source.ring, v)) for r, c, v in triples]
        mats[n] = SparseMatrix.from_entries(target.dim(n + s), source.dim(n), entries)
    return ChainMap(source, target, mats, s)
