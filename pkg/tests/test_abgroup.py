"""Finitely generated abelian groups: canonical forms, subgroups, homs."""

import itertools
import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form as sym_snf

from gradalg.abgroup import (
    FgAbGroup,
    GroupHom,
    Subgroup,
    enumerate_homs,
    enumerate_subgroups,
    group_from_presentation,
    quotient_by,
    torsion_and_free,
)
from gradalg.errors import CapExceeded, ShapeError
from gradalg.exactla import IntMatrix


def brute_force_subgroup_count(g: FgAbGroup) -> int:
    """Independent oracle: grow subgroups as closed element sets."""
    ident = g.identity()
    elems = g.elements()
    found = {frozenset([ident])}
    frontier = [frozenset([ident])]
    while frontier:
        nxt = []
        for sub in frontier:
            for x in elems:
                if x in sub:
                    continue
                closed = set(sub)
                todo = [x]
                while todo:
                    y = todo.pop()
                    if y in closed:
                        continue
                    closed.add(y)
                    todo.extend(y + s for s in list(closed))
                fs = frozenset(closed)
                if fs not in found:
                    found.add(fs)
                    nxt.append(fs)
        frontier = nxt
    return len(found)


def subset_closure_count(g: FgAbGroup) -> int:
    """Second oracle for tiny groups: test every subset for closure."""
    elems = g.elements()
    ident = g.identity()
    count = 0
    for size in range(1, len(elems) + 1):
        for subset in itertools.combinations(elems, size):
            s = set(subset)
            if ident not in s:
                continue
            if all((a + b) in s and (-a) in s for a in s for b in s):
                count += 1
    return count


class TestGroupBasics:
    def test_invariant_validation(self):
        with pytest.raises(ValueError):
            FgAbGroup(0, [1])
        with pytest.raises(ValueError):
            FgAbGroup(0, [4, 2])
        g = FgAbGroup(1, [2, 4])
        assert g.ngens == 3
        assert not g.is_finite
        assert FgAbGroup(0, [2, 4]).order() == 8

    def test_element_arithmetic(self):
        g = FgAbGroup(1, [3])
        a = g.element([2, 2])
        b = g.element([1, 2])
        assert (a + b).coords == (3, 1)
        assert (a - b).coords == (1, 0)
        assert (-a).coords == (-2, 1)
        assert (3 * b).coords == (3, 0)

    def test_element_order(self):
        g = FgAbGroup(1, [6])
        assert g.element([0, 2]).order() == 3
        assert g.element([0, 1]).order() == 6
        assert g.element([1, 0]).order() is None
        assert g.identity().order() == 1

    def test_elements_listing(self):
        assert len(FgAbGroup(0, [6]).elements()) == 6
        assert len(FgAbGroup(0, [2, 4]).elements()) == 8


class TestPresentation:
    def test_single_relation_z2(self):
        pres = group_from_presentation(1, IntMatrix([[2]]))
        assert pres.group == FgAbGroup(0, [2])

    def test_sl2_cartan_relations(self):
        # generators s_{-1}, s_0, s_1 with relations s_0 = 0 and
        # s_1 + s_{-1} = s_0: quotient is infinite cyclic
        rel = IntMatrix.from_columns([[0, 1, 0], [1, -1, 1]])
        pres = group_from_presentation(3, rel)
        assert pres.group == FgAbGroup(1, ())
        # check against the SNF diagonal of the relation matrix
        sm = sym_snf(sympy.Matrix(rel.data), domain=sympy.ZZ)
        nonzero = [abs(int(sm[i, i])) for i in range(2) if sm[i, i] != 0]
        assert all(d == 1 for d in nonzero)

    def test_z2_to_4_presentation(self):
        rel = IntMatrix.from_columns(
            [[2 if i == j else 0 for i in range(4)] for j in range(4)]
        )
        pres = group_from_presentation(4, rel)
        assert pres.group == FgAbGroup(0, [2, 2, 2, 2])

    def test_projection_kernel_is_relation_lattice(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(1, 4)
            m = rng.randint(0, 4)
            rel = IntMatrix([[rng.randint(-4, 4) for _ in range(m)] for _ in range(n)])
            pres = group_from_presentation(n, rel)
            # every relation column projects to zero
            for j in range(rel.cols):
                assert pres.project(rel.column(j)).is_identity()
            # the section is a right inverse of the projection
            for i in range(pres.group.ngens):
                gen = pres.group.generator(i)
                assert pres.project(pres.section(gen)) == gen
            # surjectivity: canonical generators are hit
            hom = GroupHom(
                FgAbGroup(n, ()),
                pres.group,
                pres.projection_matrix,
            )
            assert hom.is_surjective()


class TestTorsionAndQuotient:
    def test_free_group(self):
        g = FgAbGroup(2, ())
        t, proj = torsion_and_free(g)
        assert t.order() == 1
        assert proj.is_isomorphism()

    def test_mixed(self):
        g = FgAbGroup(1, [6])
        t, proj = torsion_and_free(g)
        assert t.order() == 6
        assert proj.codomain == FgAbGroup(1, ())
        assert proj.kernel() == t

    def test_quotient_z_by_2z(self):
        g = FgAbGroup(1, ())
        e = Subgroup.from_generators(g, [g.element([2])])
        q, hom = quotient_by(g, e)
        assert q == FgAbGroup(0, [2])
        assert hom.is_surjective()
        assert hom.kernel() == e

    def test_quotient_z2_4_by_order2(self):
        g = FgAbGroup(0, [2, 2, 2, 2])
        e = Subgroup.from_generators(g, [g.element([1, 1, 1, 1])])
        q, hom = quotient_by(g, e)
        assert q == FgAbGroup(0, [2, 2, 2])
        assert hom.kernel() == e

    def test_quotient_z_plus_z4(self):
        g = FgAbGroup(1, [4])
        e = Subgroup.from_generators(g, [g.element([0, 2])])
        q, hom = quotient_by(g, e)
        assert q == FgAbGroup(1, [2])
        # SNF oracle on the combined lattice
        sm = sym_snf(sympy.Matrix([[0, 0], [2, 4]]), domain=sympy.ZZ)
        diag = sorted(abs(int(sm[i, i])) for i in range(2))
        assert diag == [0, 2]

    def test_order_multiplicativity(self):
        rng = random.Random(9)
        for _ in range(20):
            g = FgAbGroup(0, rng.choice([[2, 4], [2, 2, 2], [3, 3], [2, 6], [8]]))
            elems = g.elements()
            gens = [rng.choice(elems) for _ in range(rng.randint(0, 2))]
            e = Subgroup.from_generators(g, gens)
            q, _ = quotient_by(g, e)
            assert e.order() * q.order() == g.order()


class TestSubgroups:
    def test_membership_and_canonical_form(self):
        g = FgAbGroup(0, [2, 2])
        e1 = Subgroup.from_generators(g, [g.element([1, 0])])
        e2 = Subgroup.from_generators(g, [g.element([1, 0]), g.element([1, 0])])
        assert e1 == e2
        assert e1.contains(g.element([1, 0]))
        assert not e1.contains(g.element([0, 1]))
        assert e1.order() == 2

    def test_elements_of_subgroup(self):
        g = FgAbGroup(0, [4])
        e = Subgroup.from_generators(g, [g.element([2])])
        assert [x.coords for x in e.elements()] == [(0,), (2,)]

    def test_infinite_subgroup(self):
        g = FgAbGroup(1, [2])
        e = Subgroup.from_generators(g, [g.element([3, 0])])
        assert not e.is_finite()
        assert e.order() is None


class TestEnumerateSubgroups:
    def test_z2(self):
        g = FgAbGroup(0, [2])
        subs = enumerate_subgroups(g.full_subgroup())
        assert len(subs) == 2

    def test_z2_squared(self):
        g = FgAbGroup(0, [2, 2])
        subs = enumerate_subgroups(g.full_subgroup())
        assert len(subs) == 5
        assert subset_closure_count(g) == 5

    def test_z2_to_4(self):
        g = FgAbGroup(0, [2, 2, 2, 2])
        subs = enumerate_subgroups(g.full_subgroup())
        assert len(subs) == 67
        assert brute_force_subgroup_count(g) == 67

    def test_mixed_orders_against_oracle(self):
        for invs in [[6], [2, 4], [12], [2, 6], [3, 3], [2, 2, 2]]:
            g = FgAbGroup(0, invs)
            subs = enumerate_subgroups(g.full_subgroup())
            assert len(subs) == brute_force_subgroup_count(g), invs
            assert len(subs) == len(set(subs))
            # sorted by order
            orders = [s.order() for s in subs]
            assert orders == sorted(orders)

    def test_predicate_and_cap(self):
        g = FgAbGroup(0, [2, 2])
        subs = enumerate_subgroups(g.full_subgroup(), predicate=lambda s: s.order() <= 2)
        assert len(subs) == 4
        with pytest.raises(CapExceeded):
            enumerate_subgroups(FgAbGroup(0, [3] * 9).full_subgroup())

    def test_proper_subgroup_of_owner(self):
        g = FgAbGroup(0, [2, 4])
        h = Subgroup.from_generators(g, [g.element([0, 2]), g.element([1, 0])])
        subs = enumerate_subgroups(h)
        assert all(h.contains_subgroup(s) for s in subs)
        # h is Z2 x Z2: five subgroups
        assert len(subs) == 5


class TestHoms:
    def test_counts(self):
        z = FgAbGroup(1, ())
        z2 = FgAbGroup(0, [2])
        z3 = FgAbGroup(0, [3])
        assert len(enumerate_homs(z, z2)) == 2
        assert len(enumerate_homs(z2, z3)) == 1
        v4 = FgAbGroup(0, [2, 2])
        assert len(enumerate_homs(v4, v4)) == 16

    def test_well_definedness_rejected(self):
        z2 = FgAbGroup(0, [2])
        z4 = FgAbGroup(0, [4])
        with pytest.raises(ValueError):
            GroupHom(z2, z4, IntMatrix([[1]]))
        # 2 times any image must vanish: image of order <= 2 is fine
        GroupHom(z2, z4, IntMatrix([[2]]))

    def test_brute_force_hom_count(self):
        g = FgAbGroup(0, [2, 4])
        h = FgAbGroup(0, [4])
        ours = enumerate_homs(g, h)
        # brute force: all matrices with the well-definedness property
        count = 0
        for a in range(4):
            for b in range(4):
                if (2 * a) % 4 == 0 and (4 * b) % 4 == 0:
                    count += 1
        assert len(ours) == count
        assert len(set(ours)) == len(ours)

    def test_kernel_image(self):
        z = FgAbGroup(1, ())
        z4 = FgAbGroup(0, [4])
        f = GroupHom(z, z4, IntMatrix([[2]]))
        assert f.image().order() == 2
        assert f.kernel().contains(z.element([2]))
        assert not f.kernel().contains(z.element([1]))

    def test_compose_and_identity(self):
        g = FgAbGroup(0, [2, 2])
        i = GroupHom.identity(g)
        f = GroupHom(g, g, IntMatrix([[0, 1], [1, 0]]))
        assert f.compose(i) == f
        assert f.compose(f) == i
        assert f.is_isomorphism()

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_homs(FgAbGroup(5, ()), FgAbGroup(0, [8, 8]), cap=100)


class TestRoundTrip:
    def test_presentation_of_hom_kernel_reproduces_image(self):
        rng = random.Random(21)
        for _ in range(15):
            g = FgAbGroup(rng.randint(0, 2), rng.choice([[], [2], [2, 4], [3]]))
            h = FgAbGroup(0, rng.choice([[4], [2, 2], [6], [2, 8]]))
            if g.ngens == 0:
                continue
            elems = h.elements()
            images = []
            ok = True
            for i in range(g.ngens):
                if i < g.free_rank:
                    images.append(rng.choice(elems))
                else:
                    d = g.invariants[i - g.free_rank]
                    opts = [x for x in elems if d % x.order() == 0]
                    images.append(rng.choice(opts))
            f = GroupHom.from_gen_images(g, h, images)
            # Z^{ngens} -> G -> H; presenting by the kernel of the composite
            # reproduces the image of f
            pres = group_from_presentation(g.ngens, f.kernel().lattice)
            img = f.image()
            q = pres.group
            assert q.order() == img.order()
