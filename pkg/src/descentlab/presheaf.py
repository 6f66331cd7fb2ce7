"""Presheaves of complexes on a finite cover, and their descent machinery.

A cover presheaf assigns a complex to every nonempty subset J of the index
set {1..N} and, separately, to the symbol "top" (the covered space itself --
which is a union, not an intersection, so it is never one of the J's).
Restriction maps run along inclusions J into J' and from top to every J.

From this data we build:

* the cosimplicial nerve, level p = direct sum over |J| = p+1;
* the Cech complex (coefficient-ring generic);
* the cochain totalization: the equalizer, inside the level-wise tensor with
  normalized simplicial cochains, of the coface constraints (rationals only);
* the weight-truncated polynomial-form totalization, with the integration
  comparison map and its exact Whitney one-sided inverse;
* the two-set decomposition of a Cech complex as a mapping cocone, and the
  induction pipeline built on it;
* descent certificates: is the augmentation from the top value a
  quasi-isomorphism, and if not, in which degree does it first fail.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .complexes import (ChainMap, Complex, TensorComplex, betti_numbers,
                        cocone, direct_sum, is_quasi_iso)
from .errors import (CosimplicialIdentityFailure, CutoffTooSmall,
                     FunctorialityFailure, InputError, RingMismatch,
                     ShapeMismatch, UnsupportedRing)
from .linalg import SparseMatrix, TrackedEchelon, kernel_basis
from .scalars import QQ, scalar_is_zero
from .simplex import (InjMap, NCModel, OmegaModel, PolyForm, coface,
                      integration_cochain, nc_pullback, pf_pullback, whitney)

TOP = "top"


def subsets(n: int, size: int):
    """Size-`size` subsets of {1..n} as sorted tuples, in lex order."""
    return [tuple(c) for c in combinations(range(1, n + 1), size)]


def all_subsets(n: int):
    out = []
    for size in range(1, n + 1):
        out.extend(subsets(n, size))
    return out


def format_key(key) -> str:
    if key == TOP:
        return TOP
    return ",".join(str(j) for j in key)


def parse_key(s: str):
    s = s.strip()
    if s == TOP:
        return TOP
    try:
        return tuple(sorted(int(t) for t in s.split(",")))
    except ValueError as exc:
        raise InputError(f"bad subset key {s!r}") from exc


class CoverPresheaf:
    """Values on subsets plus top, with generating restriction maps.

    ``adjacent`` holds the one-step maps: (J, J u {j}) for each j not in J,
    and (TOP, (j,)) for each singleton when a top value is present.  All
    other restrictions are composites; ``validate`` checks they are
    path-independent.
    """

    def __init__(self, n_sets: int, values: dict, adjacent: dict, check=True):
        self.n_sets = n_sets
        self.values = dict(values)
        self.adjacent = dict(adjacent)
        rings = {cx.ring for cx in self.values.values()}
        if len(rings) != 1:
            raise RingMismatch("presheaf values over mixed coefficient rings")
        self.ring = rings.pop()
        for J in all_subsets(n_sets):
            if J not in self.values:
                raise InputError(f"missing value on {format_key(J)}")
        self._res_cache = {}
        if check:
            self.validate()

    @property
    def has_top(self):
        return TOP in self.values

    def value(self, key) -> Complex:
        return self.values[key]

    def _step(self, src, dst) -> ChainMap:
        try:
            return self.adjacent[(src, dst)]
        except KeyError:
            raise InputError(f"missing restriction {format_key(src)} -> {format_key(dst)}")

    def res(self, src, dst) -> ChainMap:
        """Restriction along src <= dst, composed along the canonical chain
        (insert missing indices in increasing order; from top, go through the
        smallest singleton of dst)."""
        if src == dst:
            return ChainMap.identity(self.value(src))
        key = (src, dst)
        got = self._res_cache.get(key)
        if got is not None:
            return got
        if src == TOP:
            first = (dst[0],)
            f = self._step(TOP, first)
            if dst != first:
                f = self.res(first, dst).compose(f)
        else:
            if not set(src) <= set(dst):
                raise InputError(f"{format_key(src)} is not a subset of {format_key(dst)}")
            missing = sorted(set(dst) - set(src))
            mid = tuple(sorted(src + (missing[0],)))
            f = self._step(src, mid)
            if mid != dst:
                f = self.res(mid, dst).compose(f)
        self._res_cache[key] = f
        return f

    def validate(self):
        """Chain-map checks on generators, diamond and top-triangle commutation."""
        n = self.n_sets
        for (src, dst), f in self.adjacent.items():
            if f.source is not self.value(src) and f.source != self.value(src):
                raise InputError(f"restriction {format_key(src)}->{format_key(dst)} has wrong source")
            f.validate()
        for J in all_subsets(n):
            rest = [j for j in range(1, n + 1) if j not in J]
            for a, b in combinations(rest, 2):
                Ja = tuple(sorted(J + (a,)))
                Jb = tuple(sorted(J + (b,)))
                Jab = tuple(sorted(J + (a, b)))
                left = self._step(Ja, Jab).compose(self._step(J, Ja))
                right = self._step(Jb, Jab).compose(self._step(J, Jb))
                if left != right:
                    raise FunctorialityFailure(
                        witness=(format_key(J), format_key(Jab)),
                    )
        if self.has_top:
            for J in all_subsets(n):
                for j in range(1, n + 1):
                    if j in J:
                        continue
                    Jj = tuple(sorted(J + (j,)))
                    left = self._step(J, Jj).compose(self.res(TOP, J))
                    right = self.res(TOP, Jj)
                    if left != right:
                        raise FunctorialityFailure(witness=(TOP, format_key(Jj)))
        return True

    @classmethod
    def from_full(cls, n_sets, values, restrictions, check=True):
        """Build from a possibly-overcomplete family of restriction maps."""
        adjacent = {}
        for (src, dst), f in restrictions.items():
            if src == TOP and len(dst) == 1:
                adjacent[(src, dst)] = f
            elif src != TOP and len(dst) == len(src) + 1:
                adjacent[(src, dst)] = f
        return cls(n_sets, values, adjacent, check=check)


# ---------------------------------------------------------------------------
# nerve


class Nerve:
    """Levelwise direct sums over equal-size subsets, with coface maps."""

    def __init__(self, F: CoverPresheaf):
        self.F = F
        n = F.n_sets
        self.level_subsets = [subsets(n, p + 1) for p in range(n)]
        self._sums = [direct_sum([F.value(J) for J in js]) for js in self.level_subsets]

    @property
    def n_levels(self):
        return self.F.n_sets

    def level(self, p) -> Complex:
        return self._sums[p].cx

    def include(self, p, J) -> ChainMap:
        return self._sums[p].inclusions[self.level_subsets[p].index(J)]

    def project(self, p, J) -> ChainMap:
        return self._sums[p].projections[self.level_subsets[p].index(J)]

    def locate(self, p, degree, index):
        """(J, local index) for a level-p coordinate in the given degree."""
        off = 0
        for J in self.level_subsets[p]:
            d = self.F.value(J).dim(degree)
            if index < off + d:
                return J, index - off
            off += d
        raise ShapeMismatch("index out of range in nerve level")

    def dmap(self, f: InjMap) -> ChainMap:
        """The map of levels induced by an injection [p] -> [q]:
        the component into J' (|J'| = q+1) restricts from the subset of J'
        picked out by the image of f."""
        p, q = f.p, f.q
        out = None
        for J2 in self.level_subsets[q]:
            J1 = tuple(sorted(J2[v] for v in f.verts))
            piece = self.include(q, J2).compose(
                self.F.res(J1, J2).compose(self.project(p, J1)))
            out = piece if out is None else out + piece
        return out

    def coface(self, p, i) -> ChainMap:
        return self.dmap(coface(p, i))

    def validate(self):
        for p in range(self.n_levels - 2):
            for i in range(p + 2):
                for j in range(i + 1, p + 3):
                    lhs = self.coface(p + 1, j).compose(self.coface(p, i))
                    rhs = self.coface(p + 1, i).compose(self.coface(p, j - 1))
                    if lhs != rhs:
                        raise CosimplicialIdentityFailure(f"levels {p}->{p+2}, (i,j)=({i},{j})")
        return True

    def augmentation_to_level(self, p) -> ChainMap:
        """F(top) -> level p, restricting into every component."""
        out = None
        for J in self.level_subsets[p]:
            piece = self.include(p, J).compose(self.F.res(TOP, J))
            out = piece if out is None else out + piece
        return out


def nerve_cosimplicial(F: CoverPresheaf) -> Nerve:
    return Nerve(F)


# ---------------------------------------------------------------------------
# Cech complex


class CechComplex:
    """Total complex of the nerve: degree n holds level-p pieces in internal
    degree n - p, with differential (Cech alternating sum) + (-1)^p d.

    Works over any supported coefficient ring.
    """

    def __init__(self, F: CoverPresheaf):
        self.F = F
        n_sets = F.n_sets
        los, his = [], []
        for J in all_subsets(n_sets):
            cx = F.value(J)
            los.append(cx.support[0] + len(J) - 1)
            his.append(cx.support[1] + len(J) - 1)
        lo, hi = min(los), max(his)
        self._blocks = {}   # n -> list of (p, J, offset, internal degree)
        self._pos = {}      # (n, p, J) -> offset
        dims = {}
        for n in range(lo, hi + 1):
            blocks, off = [], 0
            for p in range(n_sets):
                q = n - p
                for J in subsets(n_sets, p + 1):
                    d = F.value(J).dim(q)
                    if d:
                        blocks.append((p, J, off, q))
                        self._pos[(n, p, J)] = off
                        off += d
            self._blocks[n] = blocks
            dims[n] = off
        diff = {}
        one = 1
        for n in range(lo, hi):
            m = SparseMatrix(dims.get(n + 1, 0), dims[n])
            for p, J, off, q in self._blocks[n]:
                cx = F.value(J)
                # internal differential, sign (-1)^p
                tgt = self._pos.get((n + 1, p, J))
                if tgt is not None:
                    sign = -1 if p % 2 else 1
                    m.paste(cx.d(q), tgt, off, sign)
                # Cech differential into each J' = J + one vertex
                for j in range(1, n_sets + 1):
                    if j in J:
                        continue
                    J2 = tuple(sorted(J + (j,)))
                    tgt = self._pos.get((n + 1, p + 1, J2))
                    if tgt is None:
                        continue
                    i = J2.index(j)
                    sign = -1 if i % 2 else 1
                    m.paste(F.res(J, J2).mat(q), tgt, off, sign)
            diff[n] = m
        self.cx = Complex(F.ring, dims, diff, support=(lo, hi))

    def pos(self, n, p, J, i=0):
        return self._pos[(n, p, J)] + i

    def blocks(self, n):
        return self._blocks.get(n, [])

    def component(self, n, vec: dict, p, J) -> dict:
        """Extract the (p, J) component of a degree-n vector."""
        off = self._pos.get((n, p, J))
        if off is None:
            return {}
        d = self.F.value(J).dim(n - p)
        return {i - off: v for i, v in vec.items() if off <= i < off + d}

    def inject(self, n, p, J, ivec: dict) -> dict:
        off = self._pos[(n, p, J)]
        return {off + i: v for i, v in ivec.items()}

    def augmentation(self) -> ChainMap:
        """F(top) -> Cech, restricting into the level-0 components."""
        if not self.F.has_top:
            raise InputError("presheaf has no top value")
        top = self.F.value(TOP)
        mats = {}
        for n in top.degrees():
            m = SparseMatrix(self.cx.dim(n), top.dim(n))
            for j in range(1, self.F.n_sets + 1):
                J = (j,)
                off = self._pos.get((n, 0, J))
                if off is None:
                    continue
                m.paste(self.F.res(TOP, J).mat(n), off, 0)
            mats[n] = m
        return ChainMap(top, self.cx, mats)


def cech(F: CoverPresheaf) -> CechComplex:
    return CechComplex(F)


# ---------------------------------------------------------------------------
# totalizations


def _tensor_map(tsrc: TensorComplex, ttgt: TensorComplex, f: ChainMap,
                g: ChainMap) -> ChainMap:
    """f (x) g on tensor complexes, for degree-0 f and g (no Koszul signs)."""
    mats = {}
    for n in tsrc.cx.degrees():
        mats[n] = SparseMatrix(ttgt.cx.dim(n), tsrc.cx.dim(n))
    for (n, i, a, b), col in tsrc._pos.items():
        m = mats.get(n)
        if m is None:
            continue
        fa = f.mat(i).column(a)
        if not fa:
            continue
        gb = g.mat(n - i).column(b)
        for a2, va in fa.items():
            for b2, vb in gb.items():
                row = ttgt.pos(n, i, a2, b2)
                w = m.rows[row].get(col)
                prod = va * vb
                w = prod if w is None else w + prod
                if scalar_is_zero(w):
                    m.rows[row].pop(col, None)
                else:
                    m.rows[row][col] = w
    return ChainMap(tsrc.cx, ttgt.cx, mats)


def _model_pullback(m_to, m_from, f: InjMap) -> ChainMap:
    """Pullback along f as a chain map of simplex models (NC or forms)."""
    mats = {}
    for s in range(f.q + 1):
        entries = []
        for col, key in enumerate(m_from.basis(s)):
            if isinstance(m_from, NCModel):
                vec = m_to.to_vec(s, nc_pullback(f, {key: Fraction(1)}))
            else:
                form = pf_pullback(f, PolyForm(f.q, {key: Fraction(1)}))
                vec = m_to.to_vec(s, form)
            for r, v in vec.items():
                entries.append((r, col, v))
        mats[s] = SparseMatrix.from_entries(
            len(m_to.basis(s)), len(m_from.basis(s)), entries)
    return ChainMap(m_from.cx, m_to.cx, mats)


class EqualizerTotalization:
    """Kernel, levelwise, of the coface-compatibility constraints inside
    direct_sum_p (model_p (x) nerve level p); the simplex factor is written
    first, which is what makes top-face evaluation a sign-free chain map."""

    def __init__(self, F: CoverPresheaf, models):
        if F.ring != QQ:
            raise UnsupportedRing("totalizations are implemented over Q only")
        self.F = F
        self.models = models
        self.nerve = Nerve(F)
        N = F.n_sets
        self.tensors = [TensorComplex(models[p].cx, self.nerve.level(p))
                        for p in range(N)]
        amb = direct_sum([t.cx for t in self.tensors])
        self.ambient = amb.cx
        self._amb_inc = amb.inclusions
        self._amb_proj = amb.projections
        # cross tensors and the two legs of each constraint
        constraints = []   # list of ChainMap from ambient
        for p in range(N - 1):
            cross = TensorComplex(models[p].cx, self.nerve.level(p + 1))
            id_model = ChainMap.identity(models[p].cx)
            id_nerve = ChainMap.identity(self.nerve.level(p + 1))
            for i in range(p + 2):
                pb = _model_pullback(models[p], models[p + 1], coface(p, i))
                legA = _tensor_map(self.tensors[p + 1], cross, pb, id_nerve)
                legB = _tensor_map(self.tensors[p], cross, id_model,
                                   self.nerve.coface(p, i))
                constraints.append(
                    legA.compose(self._amb_proj[p + 1]) +
                    legB.compose(self._amb_proj[p]).scale(-1))
        self.kernel, self._kte = {}, {}
        dims = {}
        for n in self.ambient.degrees():
            rows_total = sum(c.target.dim(n) for c in constraints)
            mat = SparseMatrix(rows_total, self.ambient.dim(n))
            off = 0
            for c in constraints:
                mat.paste(c.mat(n), off, 0)
                off += c.target.dim(n)
            basis = kernel_basis(mat) if self.ambient.dim(n) else []
            self.kernel[n] = basis
            te = TrackedEchelon()
            for j, vec in enumerate(basis):
                te.add(vec, j)
            self._kte[n] = te
            dims[n] = len(basis)
        diff = {}
        for n in self.ambient.degrees():
            m = SparseMatrix(dims.get(n + 1, 0), dims[n])
            for j, vec in enumerate(self.kernel[n]):
                img = self.ambient.d(n).matvec(vec)
                coords = self.represent(n + 1, img)
                for r, v in coords.items():
                    m.rows[r][j] = v
            diff[n] = m
        self.cx = Complex(QQ, dims, diff, support=self.ambient.support)

    def represent(self, n, ambient_vec: dict) -> dict:
        """Coordinates of an ambient vector in the kernel basis."""
        if not ambient_vec:
            return {}
        coords = self._kte.get(n, TrackedEchelon()).represent(ambient_vec)
        if coords is None:
            raise ShapeMismatch("vector does not satisfy the coface constraints")
        return coords

    def ambient_vector(self, n, j) -> dict:
        return dict(self.kernel[n][j])

    def level_component(self, n, ambient_vec, p):
        """The level-p tensor component of an ambient degree-n vector."""
        return self._amb_proj[p].mat(n).matvec(ambient_vec)

    def augmentation(self) -> ChainMap:
        """Top value -> totalization: constant simplex unit tensor the
        levelwise restriction."""
        if not self.F.has_top:
            raise InputError("presheaf has no top value")
        top = self.F.value(TOP)
        N = self.F.n_sets
        augs = [self.nerve.augmentation_to_level(p) for p in range(N)]
        mats = {}
        for n in top.degrees():
            m = SparseMatrix(self.cx.dim(n), top.dim(n))
            for col in range(top.dim(n)):
                amb = {}
                for p in range(N):
                    lvl = augs[p].mat(n).column(col)
                    if not lvl:
                        continue
                    t = self.tensors[p]
                    inc = self._amb_inc[p]
                    for unit_key in self._unit_keys(p):
                        uidx = self.models[p]._index[0][unit_key]
                        for b, v in lvl.items():
                            pos_ = t._pos.get((n, 0, uidx, b))
                            if pos_ is None:
                                continue
                            for r, w in inc.mat(n).column(pos_).items():
                                amb[r] = amb.get(r, Fraction(0)) + w * v
                amb = {r: v for r, v in amb.items() if v}
                for r, v in self.represent(n, amb).items():
                    m.rows[r][col] = v
            mats[n] = m
        return ChainMap(top, self.cx, mats)

    def _unit_keys(self, p):
        """Basis decomposition of the multiplicative unit of the level model."""
        if isinstance(self.models[p], NCModel):
            return [(v,) for v in range(p + 1)]
        return [((0,) * p, ())]


class TotComplex(EqualizerTotalization):
    """Simplicial-cochain totalization, isomorphic to the Cech complex by
    evaluation at top faces."""

    def __init__(self, F: CoverPresheaf):
        super().__init__(F, [NCModel(p) for p in range(F.n_sets)])
        self.cech = CechComplex(F)

    def to_cech(self) -> ChainMap:
        """Evaluate at the top face of each level; sign-free by the
        forms-first tensor ordering."""
        mats = {}
        for n in self.cx.degrees():
            m = SparseMatrix(self.cech.cx.dim(n), self.cx.dim(n))
            for j, vec in enumerate(self.kernel[n]):
                for p in range(self.F.n_sets):
                    comp = self.level_component(n, vec, p)
                    if not comp:
                        continue
                    t = self.tensors[p]
                    top_idx = self.models[p]._index[p][tuple(range(p + 1))]
                    for b in range(self.nerve.level(p).dim(n - p)):
                        pos_ = t._pos.get((n, p, top_idx, b))
                        if pos_ is None:
                            continue
                        v = comp.get(pos_)
                        if v is None:
                            continue
                        J, loc = self.nerve.locate(p, n - p, b)
                        m.rows[self.cech.pos(n, p, J, loc)][j] = v
            mats[n] = m
        return ChainMap(self.cx, self.cech.cx, mats)


def tot(F: CoverPresheaf) -> TotComplex:
    return TotComplex(F)


class TwComplex(EqualizerTotalization):
    """Weight-truncated polynomial-form totalization."""

    def __init__(self, F: CoverPresheaf, weight_cutoff: int):
        if weight_cutoff < F.n_sets:
            raise CutoffTooSmall(
                f"weight cutoff {weight_cutoff} is below the number of levels {F.n_sets}")
        self.weight_cutoff = weight_cutoff
        super().__init__(F, [OmegaModel(p, weight_cutoff) for p in range(F.n_sets)])


def tw(F: CoverPresheaf, weight_cutoff: int) -> TwComplex:
    return TwComplex(F, weight_cutoff)


def tw_to_tot(twc: TwComplex, totc: TotComplex) -> ChainMap:
    """Levelwise elementwise integration, expressed kernel-to-kernel."""
    N = twc.F.n_sets
    mats = {}
    # per level and form degree: integration matrices Omega^s -> NC^s
    imats = {}
    for p in range(N):
        om, nc = twc.models[p], totc.models[p]
        for s in range(p + 1):
            entries = []
            for col, key in enumerate(om.basis(s)):
                coch = integration_cochain(PolyForm(p, {key: Fraction(1)}))
                for F_face, v in coch.items():
                    entries.append((nc._index[s][F_face], col, v))
            imats[(p, s)] = SparseMatrix.from_entries(
                len(nc.basis(s)), len(om.basis(s)), entries)
    for n in twc.cx.degrees():
        m = SparseMatrix(totc.cx.dim(n), twc.cx.dim(n))
        for j, vec in enumerate(twc.kernel[n]):
            amb = {}
            for p in range(N):
                comp = twc.level_component(n, vec, p)
                if not comp:
                    continue
                t_om, t_nc = twc.tensors[p], totc.tensors[p]
                for (nn, s, a, b), pos_ in t_om._pos.items():
                    if nn != n:
                        continue
                    v = comp.get(pos_)
                    if v is None:
                        continue
                    for a2, w in imats[(p, s)].column(a).items():
                        idx = t_nc.pos(n, s, a2, b)
                        vec2 = totc._amb_inc[p].mat(n).column(idx)
                        for r, u in vec2.items():
                            amb[r] = amb.get(r, Fraction(0)) + u * w * v
            amb = {r: v for r, v in amb.items() if v}
            for r, v in totc.represent(n, amb).items():
                m.rows[r][j] = v
        mats[n] = m
    return ChainMap(twc.cx, totc.cx, mats)


def whitney_section(totc: TotComplex, twc: TwComplex) -> ChainMap:
    """The Whitney map levelwise; a right inverse of tw_to_tot on the nose."""
    N = totc.F.n_sets
    emats = {}
    for p in range(N):
        nc, om = totc.models[p], twc.models[p]
        for s in range(p + 1):
            entries = []
            for col, F_face in enumerate(nc.basis(s)):
                form = whitney(p, {F_face: Fraction(1)})
                for key, v in form.terms.items():
                    entries.append((om._index[s][key], col, v))
            emats[(p, s)] = SparseMatrix.from_entries(
                len(om.basis(s)), len(nc.basis(s)), entries)
    mats = {}
    for n in totc.cx.degrees():
        m = SparseMatrix(twc.cx.dim(n), totc.cx.dim(n))
        for j, vec in enumerate(totc.kernel[n]):
            amb = {}
            for p in range(N):
                comp = totc.level_component(n, vec, p)
                if not comp:
                    continue
                t_nc, t_om = totc.tensors[p], twc.tensors[p]
                for (nn, s, a, b), pos_ in t_nc._pos.items():
                    if nn != n:
                        continue
                    v = comp.get(pos_)
                    if v is None:
                        continue
                    for a2, w in emats[(p, s)].column(a).items():
                        idx = t_om.pos(n, s, a2, b)
                        vec2 = twc._amb_inc[p].mat(n).column(idx)
                        for r, u in vec2.items():
                            amb[r] = amb.get(r, Fraction(0)) + u * w * v
            amb = {r: v for r, v in amb.items() if v}
            for r, v in twc.represent(n, amb).items():
                m.rows[r][j] = v
        mats[n] = m
    return ChainMap(totc.cx, twc.cx, mats)


# ---------------------------------------------------------------------------
# two-set decomposition and inclusion-exclusion


def drop_first_restrict(F: CoverPresheaf) -> CoverPresheaf:
    """The presheaf on {2..N}, relabeled to {1..N-1}."""
    n = F.n_sets - 1
    sh = lambda J: tuple(j + 1 for j in J)
    values = {J: F.value(sh(J)) for J in all_subsets(n)}
    adjacent = {}
    for J in all_subsets(n):
        for j in range(1, n + 1):
            if j in J:
                continue
            J2 = tuple(sorted(J + (j,)))
            adjacent[(J, J2)] = F.adjacent[(sh(J), sh(J2))]
    return CoverPresheaf(n, values, adjacent, check=False)


def first_intersections(F: CoverPresheaf) -> CoverPresheaf:
    """J' -> F({1} u shifted J') on {1..N-1} index labels."""
    n = F.n_sets - 1
    sh = lambda J: tuple(sorted((1,) + tuple(j + 1 for j in J)))
    values = {J: F.value(sh(J)) for J in all_subsets(n)}
    adjacent = {}
    for J in all_subsets(n):
        for j in range(1, n + 1):
            if j in J:
                continue
            J2 = tuple(sorted(J + (j,)))
            adjacent[(J, J2)] = F.adjacent[(sh(J), sh(J2))]
    return CoverPresheaf(n, values, adjacent, check=False)


@dataclass
class TwoSetDecomposition:
    """Cech(F) recovered as the cocone of comparing against the first set.

    phi : F({1}) (+) Cech(F without 1)  ->  Cech(intersections with 1),
    phi(u, v) = rho(v) - aug(u); the cocone is isomorphic to Cech(F) by pure
    reindexing, recorded as an explicit invertible chain map psi.
    """

    cocone_cx: Complex
    psi: ChainMap
    phi: ChainMap
    aug_first: ChainMap
    rho: ChainMap
    ok: bool


def inclusion_exclusion(F: CoverPresheaf) -> TwoSetDecomposition:
    if F.n_sets < 2:
        raise InputError("inclusion-exclusion needs at least two cover sets")
    F2 = drop_first_restrict(F)
    FI = first_intersections(F)
    c2, cI, cF = CechComplex(F2), CechComplex(FI), CechComplex(F)
    first = F.value((1,))
    A = direct_sum([first, c2.cx])
    B = cI.cx
    # aug : F({1}) -> Cech(FI), via res {1} -> {1, j+1} into each singleton {j}
    mats = {}
    for n in first.degrees():
        m = SparseMatrix(B.dim(n), first.dim(n))
        for j in range(1, FI.n_sets + 1):
            off = cI._pos.get((n, 0, (j,)))
            if off is None:
                continue
            old = tuple(sorted((1, j + 1)))
            m.paste(F.res((1,), old).mat(n), off, 0)
        mats[n] = m
    aug_first = ChainMap(first, B, mats)
    # rho : Cech(F2) -> Cech(FI), levelwise restriction J' -> {1} u J'
    mats = {}
    for n in c2.cx.degrees():
        m = SparseMatrix(B.dim(n), c2.cx.dim(n))
        for p, J, off, q in c2.blocks(n):
            tgt = cI._pos.get((n, p, J))
            if tgt is None:
                continue
            src_old = tuple(j + 1 for j in J)
            dst_old = tuple(sorted((1,) + src_old))
            m.paste(F.res(src_old, dst_old).mat(q), tgt, off)
        mats[n] = m
    rho = ChainMap(c2.cx, B, mats)
    phi = rho.compose(A.projections[1]) + aug_first.compose(A.projections[0]).scale(-1)
    cc = cocone(phi)
    # psi : cocone -> Cech(F), identity reindexing without signs
    mats = {}
    for n in cc.cx.degrees():
        m = SparseMatrix(cF.cx.dim(n), cc.cx.dim(n))
        off_first = 0
        d_first = first.dim(n)
        tgt = cF._pos.get((n, 0, (1,)))
        if tgt is not None:
            m.paste(SparseMatrix.identity(d_first), tgt, off_first)
        off_c2 = d_first
        for p, J, off, q in c2.blocks(n):
            J_old = tuple(j + 1 for j in J)
            tgt = cF._pos.get((n, p, J_old))
            if tgt is not None:
                m.paste(SparseMatrix.identity(F.value(J_old).dim(q)), tgt, off_c2 + off)
        off_B = A.cx.dim(n)
        for p, J, off, q in cI.blocks(n - 1):
            J_old = tuple(sorted((1,) + tuple(j + 1 for j in J)))
            tgt = cF._pos.get((n, p + 1, J_old))
            if tgt is not None:
                m.paste(SparseMatrix.identity(F.value(J_old).dim(q)), tgt, off_B + off)
        mats[n] = m
    psi = ChainMap(cc.cx, cF.cx, mats)
    ok = True
    try:
        psi.validate()
    except ShapeMismatch:
        ok = False
    if ok:
        for n in cc.cx.degrees():
            if cc.cx.dim(n) != cF.cx.dim(n):
                ok = False
                break
            mm = psi.mat(n)
            rows_hit = []
            for c in range(mm.ncols):
                col = mm.column(c)
                if len(col) != 1 or next(iter(col.values())) != 1:
                    ok = False
                    break
                rows_hit.extend(col)
            if not ok or sorted(rows_hit) != list(range(mm.nrows)):
                ok = False
                break
    return TwoSetDecomposition(cc.cx, psi, phi, aug_first, rho, ok)


@dataclass
class InductionPipelineReport:
    theta_ok: bool
    composite_ok: bool

    @property
    def ok(self):
        return self.theta_ok and self.composite_ok


def induction_pipeline(F: CoverPresheaf, G: CoverPresheaf, aug_rest: ChainMap,
                       aug_int: ChainMap) -> InductionPipelineReport:
    """Compare the two-set coarsening of a cover against inclusion-exclusion.

    G is a two-set cover presheaf whose first value is F({1}), whose second
    value maps by aug_rest into Cech(F without the first set), and whose
    intersection value maps by aug_int into Cech(intersections with 1).  The
    middle map theta : Cech(G) -> cocone(phi) places the three pieces in the
    corresponding slots; we check it is a chain map and that it carries the
    augmentation of Cech(G) to the augmentation of Cech(F) under psi.
    """
    if G.n_sets != 2:
        raise InputError("the coarse cover must have exactly two sets")
    dec = inclusion_exclusion(F)
    cG = CechComplex(G)
    c2 = CechComplex(drop_first_restrict(F))
    cI = CechComplex(first_intersections(F))
    first = F.value((1,))
    mats = {}
    for n in cG.cx.degrees():
        m = SparseMatrix(dec.cocone_cx.dim(n), cG.cx.dim(n))
        # slot sizes inside the cocone: first (+) cech2 (+) cechI[1]
        d_first = first.dim(n)
        d_c2 = c2.cx.dim(n)
        off = cG._pos.get((n, 0, (1,)))
        if off is not None:
            m.paste(SparseMatrix.identity(d_first), 0, off)
        off = cG._pos.get((n, 0, (2,)))
        if off is not None:
            m.paste(aug_rest.mat(n), d_first, off)
        off = cG._pos.get((n, 1, (1, 2)))
        if off is not None:
            m.paste(aug_int.mat(n - 1), d_first + d_c2, off)
        mats[n] = m
    theta = ChainMap(cG.cx, dec.cocone_cx, mats)
    theta_ok = True
    try:
        theta.validate()
    except ShapeMismatch:
        theta_ok = False
    composite_ok = False
    if theta_ok and F.has_top and G.has_top:
        lhs = dec.psi.compose(theta.compose(cG.augmentation()))
        rhs = CechComplex(F).augmentation()
        composite_ok = lhs == rhs
    return InductionPipelineReport(theta_ok, composite_ok)


# ---------------------------------------------------------------------------
# descent certificates


@dataclass
class DescentReport:
    ok: bool
    witness_degree: int | None
    cech_betti: dict
    top_betti: dict

    def to_json(self):
        return {
            "descends": self.ok,
            "witness_degree": self.witness_degree,
            "cech_betti": {str(n): b for n, b in sorted(self.cech_betti.items())},
            "top_betti": {str(n): b for n, b in sorted(self.top_betti.items())},
        }


def verify_descent(F: CoverPresheaf) -> DescentReport:
    """Is the augmentation from the top value a quasi-isomorphism?"""
    if F.ring != QQ:
        raise UnsupportedRing("descent certificates are computed over Q")
    if not F.has_top:
        raise InputError("presheaf has no top value")
    c = CechComplex(F)
    cert = is_quasi_iso(c.augmentation())
    return DescentReport(cert.ok, cert.witness_degree,
                         {n: b for n, b in betti_numbers(c.cx).items() if b},
                         {n: b for n, b in betti_numbers(F.value(TOP)).items() if b})


# ---------------------------------------------------------------------------
# serialization


def presheaf_to_json(F: CoverPresheaf):
    from .complexes import chain_map_to_json, complex_to_json
    values = {format_key(k): complex_to_json(cx) for k, cx in F.values.items()}
    restrictions = {}
    for (src, dst), f in F.adjacent.items():
        restrictions[f"{format_key(src)}->{format_key(dst)}"] = chain_map_to_json(f)
    return {"n_sets": F.n_sets, "values": values, "restrictions": restrictions}


def presheaf_from_json(obj, check=True) -> CoverPresheaf:
    from .complexes import chain_map_from_json, complex_from_json
    try:
        n = int(obj["n_sets"])
        values = {parse_key(k): complex_from_json(v) for k, v in obj["values"].items()}
        adjacent = {}
        for arrow, blob in obj["restrictions"].items():
            src_s, dst_s = arrow.split("->")
            src, dst = parse_key(src_s), parse_key(dst_s)
            adjacent[(src, dst)] = chain_map_from_json(values[src], values[dst], blob)
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed presheaf description: {exc}") from exc
    return CoverPresheaf(n, values, adjacent, check=check)
