"""Cochain models of the standard simplex.

Two models of the p-simplex on vertices {0, ..., p} are implemented:

* normalized simplicial cochains, with basis the indicator cochains of
  nonempty vertex subsets F (degree |F| - 1), with cup product;
* polynomial differential forms in the reduced coordinates t_1, ..., t_p
  (t_0 = 1 - sum is eliminated), graded by form degree and filtered by
  weight = polynomial degree + form degree.

Between them run the elementwise integration map (forms -> cochains, via
integrating pullbacks over faces) and the Whitney map (cochains -> forms),
which is a one-sided inverse: integrate(whitney(x)) == x exactly.
"""

from fractions import Fraction
from itertools import combinations
from math import factorial

from .complexes import Complex
from .errors import ShapeMismatch
from .linalg import SparseMatrix
from .scalars import QQ, scalar_is_zero


class InjMap:
    """Order-preserving injection [p] -> [q], stored by its vertex images."""

    __slots__ = ("verts", "q")

    def __init__(self, verts, q):
        verts = tuple(verts)
        if any(verts[i] >= verts[i + 1] for i in range(len(verts) - 1)):
            raise ShapeMismatch("vertex images must be strictly increasing")
        if verts and not (0 <= verts[0] and verts[-1] <= q):
            raise ShapeMismatch("vertex image out of range")
        self.verts = verts
        self.q = q

    @property
    def p(self):
        return len(self.verts) - 1

    def __call__(self, i):
        return self.verts[i]

    def __eq__(self, other):
        return isinstance(other, InjMap) and (self.verts, self.q) == (other.verts, other.q)

    def __hash__(self):
        return hash((self.verts, self.q))

    def __repr__(self):
        return f"InjMap({list(self.verts)} -> [{self.q}])"

    def compose(self, other: "InjMap") -> "InjMap":
        """self after other."""
        if other.q != self.p:
            raise ShapeMismatch("composition domain mismatch")
        return InjMap(tuple(self.verts[v] for v in other.verts), self.q)

    def image(self):
        return set(self.verts)

    def preimage_tuple(self, F):
        """Sorted tuple of f^{-1}(F), or None if F is not inside the image."""
        pos = {w: i for i, w in enumerate(self.verts)}
        out = []
        for w in F:
            if w not in pos:
                return None
            out.append(pos[w])
        return tuple(sorted(out))


def coface(p: int, i: int) -> InjMap:
    """The i-th coface [p] -> [p+1], skipping vertex i."""
    if not 0 <= i <= p + 1:
        raise ShapeMismatch(f"coface index {i} out of range for [{p}]")
    return InjMap(tuple(v for v in range(p + 2) if v != i), p + 1)

def vertex_map(p: int, v: int) -> InjMap:
    """[0] -> [p] hitting vertex v."""
    return InjMap((v,), p)


def face_inclusion(F, p: int) -> InjMap:
    """[k] -> [p] onto the face with vertex set F."""
    return InjMap(tuple(sorted(F)), p)


# ---------------------------------------------------------------------------
# normalized simplicial cochains
#
# A cochain is a dict {sorted vertex tuple F: scalar}; degree of F is
# |F| - 1.  All maps below are linear in that representation.


def nc_d_on(p: int, x: dict) -> dict:
    """Coboundary of a cochain on the p-simplex."""
    out = {}
    for F, val in x.items():
        if scalar_is_zero(val):
            continue
        Fs = set(F)
        for w in range(p + 1):
            if w in Fs:
                continue
            F2 = tuple(sorted(F + (w,)))
            i = F2.index(w)
            sign = -1 if i % 2 else 1
            cur = out.get(F2)
            cur = val * sign if cur is None else cur + val * sign
            if scalar_is_zero(cur):
                out.pop(F2, None)
            else:
                out[F2] = cur
    return out


def nc_cup(x: dict, y: dict) -> dict:
    """Cup product: (x . y)(F) = x(front of F) * y(back of F), overlapping pivot."""
    out = {}
    ydeg = {}
    for G, w in y.items():
        ydeg.setdefault(len(G), {})[G] = w
    for F1, v in x.items():
        if scalar_is_zero(v):
            continue
        pivot = F1[-1]
        for size, ys in ydeg.items():
            for F2, w in ys.items():
                if F2[0] != pivot or scalar_is_zero(w):
                    continue
                if len(set(F1) & set(F2)) != 1:
                    continue
                F = F1[:-1] + F2
                if any(F[i] >= F[i + 1] for i in range(len(F) - 1)):
                    continue
                cur = out.get(F)
                prod = v * w
                cur = prod if cur is None else cur + prod
                if scalar_is_zero(cur):
                    out.pop(F, None)
                else:
                    out[F] = cur
    return out


def nc_pullback(f: InjMap, x: dict) -> dict:
    """(f^* x)(F) = x(f(F)): delta_G pulls back to delta on the preimage of G
    when G lies inside the image of f, and to zero otherwise."""
    out = {}
    for G, v in x.items():
        if scalar_is_zero(v):
            continue
        F = f.preimage_tuple(G)
        if F is None:
            continue
        cur = out.get(F)
        cur = v if cur is None else cur + v
        if scalar_is_zero(cur):
            out.pop(F, None)
        else:
            out[F] = cur
    return out


class NCModel:
    """The normalized-cochain complex of the p-simplex, with basis indexing."""

    def __init__(self, p: int, ring=QQ):
        self.p = p
        self.ring = ring
        self._basis = {n: [tuple(F) for F in combinations(range(p + 1), n + 1)]
                       for n in range(p + 1)}
        self._index = {n: {F: i for i, F in enumerate(bs)}
                       for n, bs in self._basis.items()}
        dims = {n: len(bs) for n, bs in self._basis.items()}
        one = Fraction(1) if ring == QQ else ring.one()
        diff = {}
        for n in range(p):
            entries = []
            for col, F in enumerate(self._basis[n]):
                img = nc_d_on(p, {F: Fraction(1)})
                for F2, s in img.items():
                    entries.append((self._index[n + 1][F2], col, one * int(s)))
            diff[n] = SparseMatrix.from_entries(dims[n + 1], dims[n], entries)
        self.cx = Complex(ring, dims, diff, labels=dict(self._basis),
                          support=(0, p))

    def basis(self, n):
        return self._basis.get(n, [])

    def index(self, n, F):
        return self._index[n][tuple(F)]

    def to_vec(self, n, x: dict) -> dict:
        out = {}
        for F, v in x.items():
            if len(F) - 1 != n:
                raise ShapeMismatch("mixed-degree cochain")
            if not scalar_is_zero(v):
                out[self._index[n][F]] = v
        return out

    def from_vec(self, n, vec: dict) -> dict:
        return {self._basis[n][i]: v for i, v in vec.items() if not scalar_is_zero(v)}


# ---------------------------------------------------------------------------
# polynomial forms
#
# A form on the p-simplex is a dict {(exps, I): Fraction} where exps is a
# length-p tuple of exponents of t_1..t_p and I is the sorted tuple of dt
# indices.  Weight of a monomial is sum(exps) + len(I).


class PolyForm:
    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        self.terms = {}
        for key, c in (terms or {}).items():
            if c:
                cur = self.terms.get(key)
                cur = c if cur is None else cur + c
                if cur:
                    self.terms[key] = cur
                else:
                    self.terms.pop(key, None)

    @classmethod
    def zero(cls, p):
        return cls(p)

    @classmethod
    def const(cls, p, c=Fraction(1)):
        return cls(p, {((0,) * p, ()): Fraction(c)})

    @classmethod
    def coord(cls, p, j):
        """The reduced coordinate t_j (j >= 1), or 1 - sum(t) for j = 0."""
        if j == 0:
            terms = {((0,) * p, ()): Fraction(1)}
            for w in range(1, p + 1):
                e = [0] * p
                e[w - 1] = 1
                terms[(tuple(e), ())] = Fraction(-1)
            return cls(p, terms)
        e = [0] * p
        e[j - 1] = 1
        return cls(p, {(tuple(e), ()): Fraction(1)})

    @classmethod
    def dcoord(cls, p, j):
        """dt_j (j >= 1), or -sum(dt) for j = 0."""
        if j == 0:
            return cls(p, {(((0,) * p), (w,)): Fraction(-1) for w in range(1, p + 1)})
        return cls(p, {((0,) * p, (j,)): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, PolyForm) and self.p == other.p and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            cur = out.get(k)
            cur = c if cur is None else cur + c
            if cur:
                out[k] = cur
            else:
                out.pop(k, None)
        return PolyForm(self.p, out)

    def scale(self, s):
        s = Fraction(s)
        if not s:
            return PolyForm(self.p)
        return PolyForm(self.p, {k: c * s for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def wedge(self, other: "PolyForm") -> "PolyForm":
        if self.p != other.p:
            raise ShapeMismatch("wedge of forms on different simplices")
        out = {}
        for (e1, I1), c1 in self.terms.items():
            for (e2, I2), c2 in other.terms.items():
                if set(I1) & set(I2):
                    continue
                sign, merged = _merge_sign(I1, I2)
                e = tuple(a + b for a, b in zip(e1, e2))
                key = (e, merged)
                c = c1 * c2 * sign
                cur = out.get(key)
                cur = c if cur is None else cur + c
                if cur:
                    out[key] = cur
                else:
                    out.pop(key, None)
        return PolyForm(self.p, out)

    def d(self) -> "PolyForm":
        acc = {}
        for (exps, I), c in self.terms.items():
            for j in range(1, self.p + 1):
                a = exps[j - 1]
                if a == 0 or j in I:  # dt_j ^ dt_I = 0 when j in I
                    continue
                e = list(exps)
                e[j - 1] -= 1
                sign, merged = _merge_sign((j,), I)
                key = (tuple(e), merged)
                cc = c * a * sign
                cur = acc.get(key)
                cur = cc if cur is None else cur + cc
                if cur:
                    acc[key] = cur
                else:
                    acc.pop(key, None)
        return PolyForm(self.p, acc)

    def weight_truncate(self, P: int) -> "PolyForm":
        return PolyForm(self.p, {k: c for k, c in self.terms.items()
                                 if sum(k[0]) + len(k[1]) <= P})

    def max_weight(self):
        return max((sum(e) + len(I) for (e, I) in self.terms), default=0)

    def degrees(self):
        return sorted({len(I) for (_, I) in self.terms})

    def homogeneous(self, n) -> "PolyForm":
        return PolyForm(self.p, {k: c for k, c in self.terms.items() if len(k[1]) == n})

    def integrate_top(self) -> Fraction:
        """Integral over the simplex, orientation dt_1 ... dt_p positive."""
        total = Fraction(0)
        full = tuple(range(1, self.p + 1))
        for (exps, I), c in self.terms.items():
            if I != full:
                continue
            num = 1
            for a in exps:
                num *= factorial(a)
            total += c * Fraction(num, factorial(self.p + sum(exps)))
        if self.p == 0:
            total = self.terms.get(((), ()), Fraction(0))
        return total

    def __repr__(self):
        return f"PolyForm(p={self.p}, nnz={len(self.terms)})"


def _merge_sign(I1, I2):
    """Koszul sign and merged index tuple for dt_{I1} ^ dt_{I2} (disjoint)."""
    merged = I1 + I2
    arr = list(merged)
    sign = 1
    # insertion sort counting swaps (tuples are tiny)
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(arr)


def pf_pullback(f: InjMap, form: PolyForm) -> PolyForm:
    """Pull a form on the f-codomain simplex back along the affine map of f."""
    q, p = f.q, f.p
    if form.p != q:
        raise ShapeMismatch("form lives on the wrong simplex")
    # reduced coordinate s_j of the codomain restricts to the coordinate of
    # its unique preimage vertex (0 if j misses the image)
    pre = {w: v for v, w in enumerate(f.verts)}
    sub_t, sub_dt = {}, {}
    for j in range(1, q + 1):
        if j in pre:
            sub_t[j] = PolyForm.coord(p, pre[j])
            sub_dt[j] = PolyForm.dcoord(p, pre[j])
        else:
            sub_t[j] = PolyForm.zero(p)
            sub_dt[j] = PolyForm.zero(p)
    out = PolyForm.zero(p)
    for (exps, I), c in form.terms.items():
        acc = PolyForm.const(p, c)
        dead = False
        for j in range(1, q + 1):
            for _ in range(exps[j - 1]):
                acc = acc.wedge(sub_t[j])
                if acc.is_zero():
                    dead = True
                    break
            if dead:
                break
        if dead:
            continue
        for j in I:
            acc = acc.wedge(sub_dt[j])
            if acc.is_zero():
                break
        out = out + acc
    return out


def integrate_over_face(form: PolyForm, F) -> Fraction:
    """Integral of the form's restriction to the face with vertex set F."""
    inc = face_inclusion(F, form.p)
    return pf_pullback(inc, form).integrate_top()


def integration_cochain(form: PolyForm) -> dict:
    """Elementwise integration: the cochain F -> integral over F.

    Only faces of dimension equal to a form degree present can contribute.
    """
    p = form.p
    out = {}
    for n in form.degrees():
        part = form.homogeneous(n)
        for F in combinations(range(p + 1), n + 1):
            val = integrate_over_face(part, F)
            if val:
                out[F] = val
    return out


def whitney(p: int, x: dict) -> PolyForm:
    """Whitney form of a cochain: on delta_F with F = (v_0 .. v_k),

        k! * sum_j (-1)^j t_{v_j} dt_{v_0} ^ ... omit j ... ^ dt_{v_k},

    with t_0 and dt_0 rewritten in reduced coordinates.
    """
    out = PolyForm.zero(p)
    for F, c in x.items():
        if scalar_is_zero(c):
            continue
        k = len(F) - 1
        acc = PolyForm.zero(p)
        for j in range(k + 1):
            term = PolyForm.coord(p, F[j])
            for i in range(k + 1):
                if i == j:
                    continue
                term = term.wedge(PolyForm.dcoord(p, F[i]))
            acc = acc + term.scale(Fraction((-1) ** j))
        out = out + acc.scale(Fraction(c) * factorial(k))
    return out


class OmegaModel:
    """The weight-truncated polynomial form complex of the p-simplex.

    Degree-n basis: monomials t^a dt_I with |I| = n and weight <= P, ordered
    by I then exponents.  The differential preserves weight, so this is a
    subcomplex on the nose.
    """

    def __init__(self, p: int, P: int):
        self.p = p
        self.P = P
        self._basis, self._index = {}, {}
        for n in range(p + 1):
            basis = []
            for I in combinations(range(1, p + 1), n):
                for exps in _exps_upto(p, P - n):
                    basis.append((exps, I))
            basis.sort(key=lambda key: (key[1], key[0]))
            self._basis[n] = basis
            self._index[n] = {k: i for i, k in enumerate(basis)}
        dims = {n: len(b) for n, b in self._basis.items()}
        diff = {}
        for n in range(p):
            entries = []
            for col, key in enumerate(self._basis[n]):
                img = PolyForm(p, {key: Fraction(1)}).d()
                for k2, c in img.terms.items():
                    entries.append((self._index[n + 1][k2], col, c))
            diff[n] = SparseMatrix.from_entries(dims[n + 1], dims[n], entries)
        self.cx = Complex(QQ, dims, diff, labels=dict(self._basis), support=(0, p))

    def basis(self, n):
        return self._basis.get(n, [])

    def to_vec(self, n, form: PolyForm) -> dict:
        out = {}
        for key, c in form.terms.items():
            if len(key[1]) != n:
                raise ShapeMismatch("inhomogeneous form")
            idx = self._index[n].get(key)
            if idx is None:
                raise ShapeMismatch("monomial exceeds the weight cutoff")
            out[idx] = c
        return out

    def from_vec(self, n, vec: dict) -> PolyForm:
        return PolyForm(self.p, {self._basis[n][i]: c for i, c in vec.items()})


def _exps_upto(nvars: int, total: int):
    """All exponent tuples with sum <= total, lexicographically."""
    if total < 0:
        return []
    if nvars == 0:
        return [()]
    out = []
    for head in range(total + 1):
        for tail in _exps_upto(nvars - 1, total - head):
            out.append((head,) + tail)
    out.sort()
    return out
