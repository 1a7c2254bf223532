"""Finitely generated abelian groups in invariant-factor form.

A group is Z^r + Z_{d1} + ... + Z_{dk} with d1 | d2 | ... | dk, di >= 2.
Elements are integer coordinate vectors of length r + k (free coordinates
first, torsion coordinates reduced modulo the invariants), so equality is
coordinate equality.  Subgroups are canonical Hermite-form lattices in
Z^{r+k} containing the relation lattice; homomorphisms are integer
matrices on canonical generators, checked for well-definedness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm, prod
from typing import Callable, Iterable, Sequence

from .errors import CapExceeded, NotASubgroup, ShapeError
from .exactla import (
    IntMatrix,
    column_hnf,
    hnf_solve,
    int_det,
    inverse,
    smith_normal_form,
)

DEFAULT_CAP = 10**4


class FgAbGroup:
    """Z^free_rank + Z_{d1} + ... + Z_{dk} with the di a divisibility chain."""

    __slots__ = ("free_rank", "invariants")

    def __init__(self, free_rank: int, invariants: Sequence[int] = ()):
        invariants = tuple(int(d) for d in invariants)
        if free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        if any(d < 2 for d in invariants):
            raise ValueError("invariant factors must be >= 2")
        for a, b in zip(invariants, invariants[1:]):
            if b % a != 0:
                raise ValueError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "free_rank", int(free_rank))
        object.__setattr__(self, "invariants", invariants)

    def __setattr__(self, name, value):
        raise AttributeError("FgAbGroup is immutable")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.invariants)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        """Group order, or None if infinite."""
        return prod(self.invariants) if self.is_finite else None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FgAbGroup)
            and self.free_rank == other.free_rank
            and self.invariants == other.invariants
        )

    def __hash__(self) -> int:
        return hash((self.free_rank, self.invariants))

    def __repr__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z_{d}" for d in self.invariants]
        return "FgAbGroup(" + (" + ".join(parts) if parts else "0") + ")"

    # -- elements -----------------------------------------------------------

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = [int(x) for x in coords]
        if len(coords) != self.ngens:
            raise ShapeError("coordinate length mismatch")
        r = self.free_rank
        for i, d in enumerate(self.invariants):
            coords[r + i] %= d
        return tuple(coords)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, self.reduce(coords))

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.ngens)

    def generator(self, i: int) -> "GroupElement":
        coords = [0] * self.ngens
        coords[i] = 1
        return self.element(coords)

    def generators(self) -> list["GroupElement"]:
        return [self.generator(i) for i in range(self.ngens)]

    def elements(self) -> list["GroupElement"]:
        """All elements; only for finite groups."""
        if not self.is_finite:
            raise ValueError("cannot list an infinite group")
        out = []
        for coords in itertools.product(*(range(d) for d in self.invariants)):
            out.append(GroupElement(self, coords))
        return out

    def relation_lattice(self) -> IntMatrix:
        """Columns spanning the kernel of Z^{r+k} -> G (canonical coords)."""
        n, r = self.ngens, self.free_rank
        cols = []
        for i, d in enumerate(self.invariants):
            v = [0] * n
            v[r + i] = d
            cols.append(v)
        if not cols:
            return IntMatrix.zeros(n, 0)
        return IntMatrix.from_columns(cols, rows=n)

    def full_subgroup(self) -> "Subgroup":
        return Subgroup.from_generators(self, self.generators())

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup.from_generators(self, [])


@dataclass(frozen=True)
class GroupElement:
    owner: FgAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.coords != self.owner.reduce(self.coords):
            object.__setattr__(self, "coords", self.owner.reduce(self.coords))

    def _check(self, other: "GroupElement"):
        if self.owner != other.owner:
            raise ValueError("elements of different groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self.owner.element([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return self.owner.element([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "GroupElement":
        return self.owner.element([-a for a in self.coords])

    def __rmul__(self, n: int) -> "GroupElement":
        return self.owner.element([n * a for a in self.coords])

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def order(self) -> int | None:
        """Element order, None if infinite."""
        r = self.owner.free_rank
        if any(self.coords[:r]):
            return None
        n = 1
        for i, d in enumerate(self.owner.invariants):
            c = self.coords[r + i]
            n = lcm(n, d // gcd(c, d))
        return n

    def __repr__(self) -> str:
        return f"GroupElement{self.coords}"


class Subgroup:
    """Subgroup of an FgAbGroup, stored as the canonical column-Hermite
    basis of its preimage lattice in Z^{r+k} (which always contains the
    relation lattice, so equal subgroups have equal lattices)."""

    __slots__ = ("owner", "generators", "lattice")

    def __init__(self, owner: FgAbGroup, generators: Sequence[GroupElement], lattice: IntMatrix):
        object.__setattr__(self, "owner", owner)
        object.__setattr__(self, "generators", tuple(generators))
        object.__setattr__(self, "lattice", lattice)

    def __setattr__(self, name, value):
        raise AttributeError("Subgroup is immutable")

    @classmethod
    def from_generators(cls, owner: FgAbGroup, gens: Iterable[GroupElement]) -> "Subgroup":
        gens = list(gens)
        for g in gens:
            if g.owner != owner:
                raise ValueError("generator from a different group")
        cols = [list(g.coords) for g in gens]
        rel = owner.relation_lattice()
        m = rel
        if cols:
            m = IntMatrix.from_columns(cols, rows=owner.ngens).hstack(rel)
        return cls(owner, gens, column_hnf(m))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.owner == other.owner
            and self.lattice == other.lattice
        )

    def __hash__(self) -> int:
        return hash((self.owner, self.lattice))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order()}, lattice={self.lattice!r})"

    def contains(self, g: GroupElement) -> bool:
        if g.owner != self.owner:
            return False
        return hnf_solve(self.lattice, list(g.coords)) is not None

    def contains_subgroup(self, other: "Subgroup") -> bool:
        if other.owner != self.owner:
            return False
        return all(
            hnf_solve(self.lattice, list(c)) is not None
            for c in other.lattice.columns()
        )

    def is_finite(self) -> bool:
        r = self.owner.free_rank
        return all(
            all(self.lattice[i, j] == 0 for i in range(r))
            for j in range(self.lattice.cols)
        )

    def order(self) -> int | None:
        """Subgroup order; None if infinite."""
        if not self.is_finite():
            return None
        k = len(self.owner.invariants)
        if k == 0:
            return 1
        r = self.owner.free_rank
        block = IntMatrix(
            [[self.lattice[r + i, j] for j in range(self.lattice.cols)] for i in range(k)]
        )
        # lattice contains diag(d_i), hence the torsion block is square
        # of full rank after dropping all-zero free rows.
        d = abs(int_det(block))
        total = prod(self.owner.invariants)
        assert d != 0 and total % d == 0
        return total // d

    def elements(self) -> list[GroupElement]:
        """All elements of a finite subgroup, by closure from generators."""
        if not self.is_finite():
            raise ValueError("cannot list an infinite subgroup")
        gens = [self.owner.element(list(c)) for c in self.lattice.columns()]
        seen = {self.owner.identity()}
        frontier = [self.owner.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x + g
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen, key=lambda e: e.coords)

    def canonical_generators(self) -> list[GroupElement]:
        return [self.owner.element(list(c)) for c in self.lattice.columns()]

    def sort_key(self):
        return (
            self.order() if self.is_finite() else float("inf"),
            tuple(self.lattice.columns()),
        )


class GroupHom:
    """Homomorphism between FgAbGroups, as an integer matrix acting on
    canonical coordinates (columns = images of canonical generators)."""

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: FgAbGroup, codomain: FgAbGroup, matrix: IntMatrix):
        # a matrix with no rows cannot carry a column count, so only check
        # the column count when there is at least one row
        if matrix.rows != codomain.ngens or (
            matrix.rows > 0 and matrix.cols != domain.ngens
        ):
            raise ShapeError("hom matrix shape mismatch")
        r = domain.free_rank
        for i, d in enumerate(domain.invariants):
            img = codomain.element([d * matrix[t, r + i] for t in range(codomain.ngens)])
            if not img.is_identity():
                raise ValueError(
                    f"not well defined: d_{i} times the generator image is nonzero"
                )
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("GroupHom is immutable")

    @classmethod
    def from_gen_images(
        cls, domain: FgAbGroup, codomain: FgAbGroup, images: Sequence[GroupElement]
    ) -> "GroupHom":
        if len(images) != domain.ngens:
            raise ShapeError("one image per canonical generator required")
        cols = [list(g.coords) for g in images]
        return cls(
            domain,
            codomain,
            IntMatrix.from_columns(cols, rows=codomain.ngens)
            if cols
            else IntMatrix.zeros(codomain.ngens, 0),
        )

    @classmethod
    def identity(cls, g: FgAbGroup) -> "GroupHom":
        return cls(g, g, IntMatrix.identity(g.ngens))

    def __call__(self, g: GroupElement) -> GroupElement:
        if g.owner != self.domain:
            raise ValueError("element outside the domain")
        if self.codomain.ngens == 0:
            return self.codomain.identity()
        return self.codomain.element(self.matrix.matvec(g.coords))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self after inner."""
        if inner.codomain != self.domain:
            raise ValueError("composition mismatch")
        return GroupHom(inner.domain, self.codomain, self.matrix * inner.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupHom) or self.domain != other.domain or self.codomain != other.codomain:
            return False
        # equality as maps: compare images of canonical generators
        return all(
            self(self.domain.generator(i)) == other(other.domain.generator(i))
            for i in range(self.domain.ngens)
        )

    def __hash__(self) -> int:
        imgs = tuple(
            self(self.domain.generator(i)).coords for i in range(self.domain.ngens)
        )
        return hash((self.domain, self.codomain, imgs))

    def __repr__(self) -> str:
        return f"GroupHom({self.domain!r} -> {self.codomain!r}, {self.matrix!r})"

    def image(self) -> Subgroup:
        return Subgroup.from_generators(
            self.codomain,
            [self(self.domain.generator(i)) for i in range(self.domain.ngens)],
        )

    def kernel(self) -> Subgroup:
        """Kernel as a subgroup of the domain."""
        if self.codomain.ngens == 0:
            return self.domain.full_subgroup()
        rel = self.codomain.relation_lattice()
        m = self.matrix.hstack(rel) if rel.cols else self.matrix
        from .exactla import integer_kernel

        ker = integer_kernel(m)
        gens = [
            self.domain.element([ker[i, j] for i in range(self.domain.ngens)])
            for j in range(ker.cols)
        ]
        return Subgroup.from_generators(self.domain, gens)

    def is_surjective(self) -> bool:
        return self.image() == self.codomain.full_subgroup()

    def is_injective(self) -> bool:
        return self.kernel().order() == 1 and self.kernel().is_finite()

    def is_isomorphism(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def inverse(self) -> "GroupHom":
        """Inverse of an isomorphism: pick a preimage of each canonical
        codomain generator by an integer solve modulo the relations."""
        from .exactla import integer_solve

        dn, cn = self.domain.ngens, self.codomain.ngens
        rel = self.domain.relation_lattice()
        crel = self.codomain.relation_lattice()
        # solve [M | R_cod] y = gen over Z; the first dn coordinates give
        # a preimage of the generator
        m = self.matrix.hstack(crel) if crel.cols else self.matrix
        images = []
        for i in range(cn):
            gen = [1 if t == i else 0 for t in range(cn)]
            y = integer_solve(m, gen)
            if y is None:
                raise ValueError("homomorphism is not surjective")
            images.append(self.domain.element(y[:dn]))
        inv = GroupHom.from_gen_images(self.codomain, self.domain, images)
        if inv.compose(self) != GroupHom.identity(self.domain) or self.compose(
            inv
        ) != GroupHom.identity(self.codomain):
            raise ValueError("homomorphism is not an isomorphism")
        return inv

    def conjugate(self, other: "GroupHom") -> "GroupHom":
        """self^{-1} o other o self (for transporting automorphisms)."""
        return self.inverse().compose(other).compose(self)


@dataclass(frozen=True)
class Presentation:
    """Result of presenting Z^n by a relation lattice: the canonical group,
    a projection from generator vectors, and a section picking generator
    vectors for the canonical generators."""

    group: FgAbGroup
    #: (r+k) x n integer matrix: canonical coords of the n presentation
    #: generators as columns (apply then reduce).
    projection_matrix: IntMatrix
    #: n x (r+k): representative generator-vector for each canonical generator.
    section_matrix: IntMatrix

    def project(self, vec: Sequence[int]) -> GroupElement:
        if self.group.ngens == 0:
            return self.group.identity()
        return self.group.element(self.projection_matrix.matvec([int(x) for x in vec]))

    def generator_image(self, i: int) -> GroupElement:
        return self.group.element(self.projection_matrix.column(i))

    def section(self, g: GroupElement) -> tuple[int, ...]:
        """A generator vector mapping onto g."""
        return self.section_matrix.matvec(g.coords)


def group_from_presentation(num_generators: int, relations: IntMatrix) -> Presentation:
    """Canonical form of Z^num_generators modulo the column span of
    ``relations``."""
    n = num_generators
    if relations.cols == 0:
        relations = IntMatrix.zeros(n, 0)
    if relations.rows != n:
        raise ShapeError("relations must have one row per generator")
    if relations.cols == 0:
        g = FgAbGroup(n, ())
        return Presentation(g, IntMatrix.identity(n), IntMatrix.identity(n))
    snf = smith_normal_form(relations)
    diag = list(snf.diagonal()) + [0] * (n - min(relations.rows, relations.cols))
    # In U-coordinates y = U x the relation lattice is spanned by d_i e_i.
    free_rows = [i for i in range(n) if diag[i] == 0]
    torsion_rows = [i for i in range(n) if diag[i] >= 2]
    invariants = [diag[i] for i in torsion_rows]
    g = FgAbGroup(len(free_rows), invariants)
    rows = free_rows + torsion_rows
    proj = IntMatrix([[snf.U[i, j] for j in range(n)] for i in rows])
    uinv = inverse(snf.U.to_rational())
    section_cols = []
    for i in rows:
        col = uinv.column(i)
        assert all(x.denominator == 1 for x in col)
        section_cols.append([x.numerator for x in col])
    section = IntMatrix.from_columns(section_cols, rows=n)
    return Presentation(g, proj, section)


def torsion_and_free(g: FgAbGroup) -> tuple[Subgroup, GroupHom]:
    """The torsion subgroup t(G) and the projection G -> G/t(G) = Z^r."""
    r = g.free_rank
    t = Subgroup.from_generators(g, [g.generator(r + i) for i in range(len(g.invariants))])
    free = FgAbGroup(r, ())
    proj = GroupHom(
        g,
        free,
        IntMatrix([[1 if i == j else 0 for j in range(g.ngens)] for i in range(r)]),
    )
    return t, proj


def quotient_by(g: FgAbGroup, e: Subgroup) -> tuple[FgAbGroup, GroupHom]:
    """Canonical form of G/E with the quotient homomorphism."""
    if e.owner != g:
        raise NotASubgroup("subgroup belongs to a different group")
    pres = group_from_presentation(g.ngens, e.lattice)
    q = pres.group
    hom = GroupHom(g, q, pres.projection_matrix)
    return q, hom


def quotient_presentation(g: FgAbGroup, e: Subgroup) -> tuple[Presentation, GroupHom]:
    """Like quotient_by but also returns the presentation (with section)."""
    if e.owner != g:
        raise NotASubgroup("subgroup belongs to a different group")
    pres = group_from_presentation(g.ngens, e.lattice)
    return pres, GroupHom(g, pres.group, pres.projection_matrix)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _subgroups_of_p_component(
    identity: GroupElement, elems: list[GroupElement], p: int
) -> list[frozenset[GroupElement]]:
    """All subgroups (as element sets) of a finite abelian p-group given by
    its full element list.

    BFS by index-p extensions: adjoin only elements x with p*x already in
    the subgroup, so each step is a union of p cosets.  Every subgroup is
    reached this way through a maximal chain.
    """
    owner = identity.owner
    mods = (0,) * owner.free_rank + tuple(owner.invariants)

    # raw coordinate tuples: orders of magnitude cheaper than GroupElement
    def addc(a, b):
        return tuple((x + y) % m if m else x + y for x, y, m in zip(a, b, mods))

    points = [x.coords for x in elems]
    trivial = frozenset([identity.coords])
    found = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for sub in frontier:
            for x in points:
                if x in sub:
                    continue
                px = x
                for _ in range(p - 1):
                    px = addc(px, x)
                if px not in sub:
                    continue
                new = set(sub)
                coset: Iterable[tuple[int, ...]] = sub
                for _ in range(p - 1):
                    coset = [addc(y, x) for y in coset]
                    new.update(coset)
                fs = frozenset(new)
                if fs not in found:
                    found.add(fs)
                    nxt.append(fs)
        frontier = nxt
    return [
        frozenset(GroupElement(owner, c) for c in fs) for fs in found
    ]


def enumerate_subgroups(
    h: Subgroup,
    predicate: Callable[[Subgroup], bool] | None = None,
    cap: int = DEFAULT_CAP,
) -> list[Subgroup]:
    """All subgroups of the finite subgroup ``h``, canonically ordered.

    Works p-primary component by p-primary component and takes products,
    so only p-groups are ever searched directly.
    """
    if not h.is_finite():
        raise ValueError("subgroup enumeration requires a finite subgroup")
    order = h.order()
    if order > cap:
        raise CapExceeded(f"subgroup order {order} exceeds cap {cap}")
    owner = h.owner
    ident = owner.identity()
    elems = h.elements()
    primes = _prime_factors(order)
    per_prime: list[list[frozenset[GroupElement]]] = []
    for p in primes:
        comp = [x for x in elems if (o := x.order()) is not None and _is_p_power(o, p)]
        per_prime.append(_subgroups_of_p_component(ident, comp, p))
    out = []
    seen = set()
    for combo in itertools.product(*per_prime) if per_prime else [()]:
        gens: list[GroupElement] = []
        for part in combo:
            gens.extend(part)
        sub = Subgroup.from_generators(owner, gens)
        if sub.lattice in seen:
            continue
        seen.add(sub.lattice)
        if predicate is None or predicate(sub):
            out.append(sub)
    out.sort(key=Subgroup.sort_key)
    return out


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def enumerate_homs(
    g: FgAbGroup, h: FgAbGroup, cap: int = DEFAULT_CAP
) -> list[GroupHom]:
    """All homomorphisms G -> H for finite H, canonically ordered."""
    if not h.is_finite:
        raise ValueError("homomorphism enumeration requires a finite codomain")
    elems = h.elements()
    choices: list[list[GroupElement]] = []
    total = 1
    for i in range(g.ngens):
        if i < g.free_rank:
            opts = elems
        else:
            d = g.invariants[i - g.free_rank]
            opts = [x for x in elems if x.order() is not None and d % x.order() == 0]
        choices.append(opts)
        total *= len(opts)
        if total > cap:
            raise CapExceeded(f"{total}+ homomorphisms exceeds cap {cap}")
    out = []
    for images in itertools.product(*choices):
        out.append(GroupHom.from_gen_images(g, h, list(images)))
    out.sort(key=lambda f: tuple(f.matrix.data))
    return out
