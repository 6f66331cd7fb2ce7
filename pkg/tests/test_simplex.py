import random
from fractions import Fraction
from itertools import combinations

import pytest

from descentlab.complexes import betti_numbers
from descentlab.errors import ShapeMismatch
from descentlab.simplex import (InjMap, NCModel, OmegaModel, PolyForm, coface,
                                face_inclusion, integrate_over_face,
                                integration_cochain, nc_cup, nc_d_on,
                                nc_pullback, pf_pullback, vertex_map, whitney)


def strip(b):
    return {n: v for n, v in b.items() if v}


def random_cochain(rng, p, n, spread=3):
    model = NCModel(p)
    return {F: Fraction(rng.randint(-spread, spread)) for F in model.basis(n)}


def random_form(rng, p, P, nmax=None):
    om = OmegaModel(p, P)
    terms = {}
    for n in range((nmax if nmax is not None else p) + 1):
        bs = om.basis(n)
        for _ in range(3):
            if bs:
                terms[bs[rng.randrange(len(bs))]] = Fraction(rng.randint(-3, 3))
    return PolyForm(p, terms)


class TestInjMaps:
    def test_cosimplicial_identities(self):
        for p in range(3):
            for i in range(p + 2):
                for j in range(i + 1, p + 3):
                    lhs = coface(p + 1, j).compose(coface(p, i))
                    rhs = coface(p + 1, i).compose(coface(p, j - 1))
                    assert lhs == rhs

    def test_not_monotone_rejected(self):
        with pytest.raises(ShapeMismatch):
            InjMap((1, 0), 2)

    def test_preimage(self):
        f = InjMap((0, 2, 3), 4)
        assert f.preimage_tuple((0, 3)) == (0, 2)
        assert f.preimage_tuple((1,)) is None


class TestNormalizedCochains:
    def test_first_coboundary_sign(self):
        assert nc_d_on(1, {(0,): Fraction(1)}) == {(0, 1): Fraction(-1)}
        assert nc_d_on(1, {(1,): Fraction(1)}) == {(0, 1): Fraction(1)}

    def test_d_squared(self):
        rng = random.Random(0)
        for p in (2, 3):
            for n in range(p - 1):
                x = random_cochain(rng, p, n)
                assert nc_d_on(p, nc_d_on(p, x)) == {}

    def test_contractible(self):
        for p in range(4):
            m = NCModel(p)
            m.cx.validate()
            assert strip(betti_numbers(m.cx)) == {0: 1}

    def test_cup_examples(self):
        a = {(0,): Fraction(1)}
        b = {(0, 1): Fraction(1)}
        c = {(1,): Fraction(1)}
        assert nc_cup(a, b) == {(0, 1): Fraction(1)}
        assert nc_cup(b, a) == {}
        assert nc_cup(b, c) == {(0, 1): Fraction(1)}

    def test_cup_associative(self):
        rng = random.Random(1)
        for _ in range(10):
            p = 3
            x = random_cochain(rng, p, rng.randrange(2))
            y = random_cochain(rng, p, rng.randrange(2))
            z = random_cochain(rng, p, rng.randrange(2))
            assert nc_cup(nc_cup(x, y), z) == nc_cup(x, nc_cup(y, z))

    def test_cup_unit(self):
        p = 3
        one = {(v,): Fraction(1) for v in range(p + 1)}
        rng = random.Random(2)
        for n in range(p + 1):
            x = random_cochain(rng, p, n)
            assert nc_cup(one, x) == x
            assert nc_cup(x, one) == x

    def test_cup_leibniz(self):
        rng = random.Random(3)
        p = 3
        for _ in range(10):
            r = rng.randrange(2)
            s = rng.randrange(2)
            x = random_cochain(rng, p, r)
            y = random_cochain(rng, p, s)
            lhs = nc_d_on(p, nc_cup(x, y))
            sign = Fraction((-1) ** r)
            rhs = nc_cup(nc_d_on(p, x), y)
            for F, v in nc_cup(x, nc_d_on(p, y)).items():
                cur = rhs.get(F, Fraction(0)) + sign * v
                if cur:
                    rhs[F] = cur
                else:
                    rhs.pop(F, None)
            assert lhs == rhs

    def test_pullback_functorial(self):
        rng = random.Random(4)
        h = InjMap((0, 1, 3), 4)
        k = InjMap((0, 2), 2)
        comp = h.compose(k)
        for n in range(5):
            x = random_cochain(rng, 4, n)
            assert nc_pullback(k, nc_pullback(h, x)) == nc_pullback(comp, x)

    def test_pullback_chain_map(self):
        rng = random.Random(5)
        f = InjMap((0, 2, 3), 4)
        for n in range(4):
            x = random_cochain(rng, 4, n)
            assert nc_pullback(f, nc_d_on(4, x)) == nc_d_on(2, nc_pullback(f, x))


class TestPolyForms:
    def test_wedge_anticommutes(self):
        a = PolyForm.dcoord(3, 1)
        b = PolyForm.dcoord(3, 2)
        assert a.wedge(b) == b.wedge(a).scale(-1)
        assert a.wedge(a).is_zero()

    def test_wedge_associative(self):
        rng = random.Random(6)
        for _ in range(8):
            a = random_form(rng, 3, 2, nmax=1)
            b = random_form(rng, 3, 2, nmax=1)
            c = random_form(rng, 3, 2, nmax=1)
            assert a.wedge(b).wedge(c) == a.wedge(b.wedge(c))

    def test_d_squared(self):
        rng = random.Random(7)
        for p in (1, 2, 3):
            for _ in range(5):
                w = random_form(rng, p, 3)
                assert w.d().d().is_zero()

    def test_d_weight_preserving(self):
        rng = random.Random(8)
        for _ in range(5):
            w = random_form(rng, 3, 3)
            assert w.d().max_weight() <= max(w.max_weight(), 0)

    def test_leibniz(self):
        rng = random.Random(9)
        p = 2
        for _ in range(10):
            n1 = rng.randrange(2)
            a = random_form(rng, p, 3, nmax=0).homogeneous(0) if n1 == 0 else \
                random_form(rng, p, 3).homogeneous(1)
            b = random_form(rng, p, 3).homogeneous(rng.randrange(2))
            lhs = a.wedge(b).d()
            sign = (-1) ** n1
            rhs = a.d().wedge(b) + a.wedge(b.d()).scale(sign)
            assert lhs == rhs

    def test_reduced_coordinate_relations(self):
        # t_0 + t_1 + ... + t_p = 1, dt_0 + ... + dt_p = 0
        p = 3
        s = PolyForm.zero(p)
        ds = PolyForm.zero(p)
        for v in range(p + 1):
            s = s + PolyForm.coord(p, v)
            ds = ds + PolyForm.dcoord(p, v)
        assert s == PolyForm.const(p)
        assert ds.is_zero()
        assert PolyForm.coord(p, 0).d() == PolyForm.dcoord(p, 0)


class TestIntegration:
    def test_normalization(self):
        # volume of the p-simplex in reduced coordinates is 1/p!
        for p in (1, 2, 3):
            w = PolyForm(p, {((0,) * p, tuple(range(1, p + 1))): Fraction(1)})
            assert w.integrate_top() == Fraction(1, [1, 1, 2, 6][p])

    def test_monomial_formula(self):
        # int_{Delta^2} t1^a t2^b dt1 dt2 = a! b! / (2 + a + b)!
        from math import factorial
        for a in range(3):
            for b in range(3):
                w = PolyForm(2, {((a, b), (1, 2)): Fraction(1)})
                assert w.integrate_top() == Fraction(
                    factorial(a) * factorial(b), factorial(2 + a + b))

    def test_zero_simplex(self):
        w = PolyForm(0, {((), ()): Fraction(5, 3)})
        assert w.integrate_top() == Fraction(5, 3)

    def test_non_top_vanishes(self):
        w = PolyForm(2, {((1, 0), (1,)): Fraction(1)})
        assert w.integrate_top() == 0

    def test_stokes(self):
        rng = random.Random(10)
        for p in (1, 2, 3):
            for _ in range(5):
                w = random_form(rng, p, 3, nmax=p - 1)
                assert nc_d_on(p, integration_cochain(w)) == integration_cochain(w.d())


class TestWhitney:
    def test_edge_form(self):
        assert whitney(1, {(0, 1): Fraction(1)}).terms == {((0,), (1,)): Fraction(1)}

    def test_one_sided_inverse(self):
        for p in range(4):
            m = NCModel(p)
            for n in range(p + 1):
                for F in m.basis(n):
                    x = {F: Fraction(1)}
                    assert integration_cochain(whitney(p, x)) == x

    def test_chain_map(self):
        rng = random.Random(11)
        for p in (1, 2, 3):
            for n in range(p):
                x = random_cochain(rng, p, n)
                assert whitney(p, x).d() == whitney(p, nc_d_on(p, x))

    def test_natural_for_injections(self):
        for pp, qq in ((1, 2), (2, 3)):
            for verts in combinations(range(qq + 1), pp + 1):
                f = InjMap(verts, qq)
                m = NCModel(qq)
                for n in range(qq + 1):
                    for F in m.basis(n):
                        x = {F: Fraction(1)}
                        assert pf_pullback(f, whitney(qq, x)) == whitney(pp, nc_pullback(f, x))

    def test_weight_bound(self):
        # the Whitney form of a k-cochain has weight at most k + 1
        for p in (2, 3):
            m = NCModel(p)
            for n in range(p + 1):
                for F in m.basis(n):
                    assert whitney(p, {F: Fraction(1)}).max_weight() <= n + 1


class TestPullbackForms:
    def test_functorial(self):
        rng = random.Random(12)
        h = InjMap((0, 1, 3), 4)
        k = InjMap((0, 2), 2)
        for _ in range(5):
            w = random_form(rng, 4, 2)
            assert pf_pullback(k, pf_pullback(h, w)) == pf_pullback(h.compose(k), w)

    def test_chain_map(self):
        rng = random.Random(13)
        f = InjMap((0, 2), 3)
        for _ in range(5):
            w = random_form(rng, 3, 3)
            assert pf_pullback(f, w.d()) == pf_pullback(f, w).d()

    def test_weight_does_not_increase(self):
        rng = random.Random(14)
        f = InjMap((1, 2), 3)
        for _ in range(5):
            w = random_form(rng, 3, 3)
            assert pf_pullback(f, w).max_weight() <= max(w.max_weight(), 0)


class TestOmegaModel:
    def test_contractible(self):
        for p in range(3):
            om = OmegaModel(p, 3)
            om.cx.validate()
            assert strip(betti_numbers(om.cx)) == {0: 1}

    def test_roundtrip_vectors(self):
        om = OmegaModel(2, 3)
        rng = random.Random(15)
        w = random_form(rng, 2, 3).homogeneous(1)
        assert om.from_vec(1, om.to_vec(1, w)) == w

    def test_cutoff_enforced(self):
        om = OmegaModel(2, 1)
        heavy = PolyForm(2, {((2, 0), ()): Fraction(1)})
        with pytest.raises(ShapeMismatch):
            om.to_vec(0, heavy)
