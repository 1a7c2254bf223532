"""Gradings of structure algebras by finitely generated abelian groups.

A grading assigns a degree to each vector of a homogeneous basis (an
optional change-of-basis matrix homogenizes the input basis first).
Compatibility is verified exactly against every structure-tensor entry.
On top: the universal abelian group of a grading, induced gradings along
group homomorphisms, per-degree derivation components, and verification
of supplied graded maps (equivalences and isomorphisms).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .abgroup import FgAbGroup, GroupElement, GroupHom, Presentation, group_from_presentation
from .algcore import (
    MultilinearOp,
    StructureAlgebra,
    Subspace,
    _incremental_kernel,
    _leibniz_row_blocks,
)
from .errors import (
    AxiomFailure,
    IncompatibleDegrees,
    NotAutomorphism,
    ShapeError,
    VerificationFailure,
)
from .exactla import IntMatrix, RatMatrix, inverse, mat_from_flat, rank

Q = Fraction


class Grading:
    """A G-grading of a structure algebra on a homogeneous basis.

    ``degrees[i]`` is the degree of the i-th column of ``basis_change``
    (default: the i-th standard basis vector).  Construction validates
    compatibility with every operation and caches the support and the
    structure tensors rewritten in the homogeneous basis.
    """

    __slots__ = (
        "algebra",
        "group",
        "degrees",
        "basis_change",
        "homog_algebra",
        "support",
        "_components",
    )

    def __init__(
        self,
        algebra: StructureAlgebra,
        group: FgAbGroup,
        degrees: Sequence[GroupElement],
        basis_change: RatMatrix | None = None,
    ):
        n = algebra.dimension
        degrees = tuple(degrees)
        if len(degrees) != n:
            raise ShapeError("one degree per basis vector required")
        for d in degrees:
            if d.owner != group:
                raise ShapeError("degree from a different group")
        if basis_change is None:
            basis_change = RatMatrix.identity(n)
        if basis_change.shape != (n, n) or rank(basis_change) != n:
            raise ShapeError("basis change must be an invertible n x n matrix")
        cinv = inverse(basis_change)
        homog_ops = []
        for op in algebra.operations:
            tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
            for key in product(range(n), repeat=op.arity):
                val = op.apply([basis_change.column(i) for i in key], n)
                if not any(val):
                    continue
                out = cinv.matvec(val)
                vec = {j: c for j, c in enumerate(out) if c}
                if vec:
                    tensor[key] = vec
            homog_ops.append(MultilinearOp(op.name, op.arity, tensor))
        homog = StructureAlgebra(algebra.name, n, homog_ops, algebra.flags)
        # compatibility: every nonzero entry lands in the product degree
        for op in homog.operations:
            for key, vec in op.tensor.items():
                total = degrees[key[0]]
                for i in key[1:]:
                    total = total + degrees[i]
                for j in vec:
                    if degrees[j] != total:
                        raise IncompatibleDegrees(
                            f"operation {op.name} maps degrees "
                            f"{[degrees[i].coords for i in key]} into basis vector {j} "
                            f"of degree {degrees[j].coords} != {total.coords}",
                            witness=(op.name, key, j),
                        )
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "basis_change", basis_change)
        object.__setattr__(self, "homog_algebra", homog)
        support = sorted({d for d in degrees}, key=lambda g: g.coords)
        object.__setattr__(self, "support", tuple(support))
        comps: dict[GroupElement, Subspace] = {}
        for g in support:
            cols = [basis_change.column(i) for i in range(n) if degrees[i] == g]
            comps[g] = Subspace.from_vectors(n, cols)
        object.__setattr__(self, "_components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("Grading is immutable")

    def __repr__(self) -> str:
        return (
            f"Grading({self.algebra.name}, {self.group!r}, "
            f"|S|={len(self.support)})"
        )

    @property
    def dimension(self) -> int:
        return self.algebra.dimension

    def component(self, g: GroupElement) -> Subspace:
        """Component of degree g in the original coordinates."""
        if g in self._components:
            return self._components[g]
        return Subspace.from_vectors(self.dimension, [])

    def components(self) -> dict[GroupElement, Subspace]:
        return dict(self._components)

    def indices_of_degree(self, g: GroupElement) -> list[int]:
        """Homogeneous-basis indices with degree g."""
        return [i for i, d in enumerate(self.degrees) if d == g]

    def identity_component(self) -> Subspace:
        return self.component(self.group.identity())

    def is_refinement_of(self, other: "Grading") -> bool:
        """Every component of ``self`` lies inside a component of ``other``."""
        if other.dimension != self.dimension:
            return False
        for g, comp in self._components.items():
            if not any(
                oc.contains_subspace(comp) for oc in other._components.values()
            ):
                return False
        return True

    def component_dims(self) -> dict[tuple[int, ...], int]:
        """Degree coords -> component dimension (plain data, for reports)."""
        return {g.coords: c.dim for g, c in self._components.items()}


def validate_grading(
    algebra: StructureAlgebra,
    group: FgAbGroup,
    degrees: Sequence[GroupElement],
    basis_change: RatMatrix | None = None,
) -> Grading:
    """Validate and construct a grading (IncompatibleDegrees on failure)."""
    return Grading(algebra, group, degrees, basis_change)


# ---------------------------------------------------------------------------
# Universal abelian group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UabResult:
    """Universal abelian group of a grading: generators are the support
    elements, with one relation s_1 + ... + s_k = s for every nonzero
    evaluation of an operation across components."""

    grading: Grading
    group: FgAbGroup
    #: support elements of the original grading, fixing the generator order
    support_order: tuple[GroupElement, ...]
    #: s in S -> its class in the universal group
    iota: Mapping[GroupElement, GroupElement]
    #: universal group -> original grading group, alpha o iota = inclusion
    alpha: GroupHom
    presentation: Presentation

    def universal_grading(self) -> Grading:
        """The same decomposition viewed as a grading by the universal group."""
        degrees = [self.iota[d] for d in self.grading.degrees]
        return Grading(
            self.grading.algebra,
            self.group,
            degrees,
            self.grading.basis_change,
        )

    def hom_from_support_images(
        self, codomain: FgAbGroup, images: Mapping[GroupElement, GroupElement]
    ) -> GroupHom:
        """The homomorphism U -> codomain sending the class of each support
        element s to images[s] (must respect the relations; ValueError if
        not well defined)."""
        cols = []
        for i in range(self.group.ngens):
            vec = self.presentation.section(self.group.generator(i))
            img = codomain.identity()
            for s, c in zip(self.support_order, vec):
                img = img + c * images[s]
            cols.append(img)
        hom = GroupHom.from_gen_images(self.group, codomain, cols)
        # well-definedness as a map on classes: check on every support element
        for idx, s in enumerate(self.support_order):
            e_s = [1 if t == idx else 0 for t in range(len(self.support_order))]
            if hom(self.presentation.project(e_s)) != images[s]:
                raise ValueError("images do not respect the defining relations")
        return hom


def universal_abelian_group(grading: Grading) -> UabResult:
    """Present the universal abelian group on the support of the grading."""
    support = list(grading.support)
    index = {s: i for i, s in enumerate(support)}
    degrees = grading.degrees
    nsup = len(support)
    relations: set[tuple[int, ...]] = set()
    for op in grading.homog_algebra.operations:
        for key, vec in op.tensor.items():
            for j in vec:
                row = [0] * nsup
                for i in key:
                    row[index[degrees[i]]] += 1
                row[index[degrees[j]]] -= 1
                if any(row):
                    relations.add(tuple(row))
    rel_cols = sorted(relations)
    rel = (
        IntMatrix.from_columns([list(c) for c in rel_cols], rows=nsup)
        if rel_cols
        else IntMatrix.zeros(nsup, 0)
    )
    pres = group_from_presentation(nsup, rel)
    u = pres.group
    iota = {}
    for i, s in enumerate(support):
        e = [1 if t == i else 0 for t in range(nsup)]
        iota[s] = pres.project(e)
    if len(set(iota.values())) != nsup:
        raise AxiomFailure("universal-group classes of distinct degrees collide")
    # alpha: generator of U -> sum of support elements per its section vector
    cols = []
    for i in range(u.ngens):
        vec = pres.section(u.generator(i))
        img = grading.group.identity()
        for s, c in zip(support, vec):
            img = img + c * s
        cols.append(img)
    alpha = GroupHom.from_gen_images(u, grading.group, cols)
    for s in support:
        if alpha(iota[s]) != s:
            raise AxiomFailure("alpha does not restrict to the support inclusion")
    return UabResult(grading, u, tuple(support), iota, alpha, pres)


# ---------------------------------------------------------------------------
# Induced gradings
# ---------------------------------------------------------------------------


def induce(grading: Grading, alpha: GroupHom) -> Grading:
    """The grading with degrees pushed forward along alpha."""
    if alpha.domain != grading.group:
        raise ShapeError("homomorphism domain must be the grading group")
    return Grading(
        grading.algebra,
        alpha.codomain,
        [alpha(d) for d in grading.degrees],
        grading.basis_change,
    )


# ---------------------------------------------------------------------------
# Graded derivations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedDerivations:
    """Per-degree derivation components of a grading, in homogeneous-basis
    coordinates (n^2 flat, row-major)."""

    grading: Grading
    #: degree g -> D_g = {derivations mapping each A_h into A_{g+h}}
    by_degree: Mapping[GroupElement, Subspace]
    identity_part: Subspace
    #: support of the induced grading on the derivation algebra
    sigma: tuple[GroupElement, ...]

    def total_dim(self) -> int:
        return sum(s.dim for s in self.by_degree.values())


def graded_derivations(grading: Grading) -> GradedDerivations:
    """Compute D_g for every candidate degree g.

    Degrees of derivation components are differences of support elements,
    and the entry patterns of distinct degrees are disjoint, so the
    per-degree systems are exactly the degree-blocks of the full Leibniz
    system and their direct sum is the whole derivation algebra.
    """
    homog = grading.homog_algebra
    n = homog.dimension
    degrees = grading.degrees
    candidates = sorted(
        {s - t for s in grading.support for t in grading.support},
        key=lambda g: g.coords,
    )
    ident = grading.group.identity()
    if ident not in candidates:
        candidates.insert(0, ident)
    by_degree: dict[GroupElement, Subspace] = {}
    sigma = []
    for g in candidates:
        cols = []
        for r in range(n):
            for c in range(n):
                if degrees[r] == g + degrees[c]:
                    v = [Q(0)] * (n * n)
                    v[r * n + c] = Q(1)
                    cols.append(v)
        if not cols:
            if g == ident:
                by_degree[g] = Subspace.from_vectors(n * n, [])
            continue
        initial = RatMatrix.from_columns(cols, rows=n * n)
        basis = _incremental_kernel(n * n, _leibniz_row_blocks(homog), initial=initial)
        space = Subspace(n * n, basis)
        if space.dim or g == ident:
            by_degree[g] = space
        if space.dim:
            sigma.append(g)
    sigma.sort(key=lambda g: g.coords)
    return GradedDerivations(
        grading, by_degree, by_degree[ident], tuple(sigma)
    )


# ---------------------------------------------------------------------------
# Verification of supplied graded maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedMapReport:
    """Outcome of checking a linear map against two gradings."""

    kind: str  # "isomorphism" | "equivalence" | "neither"
    #: support bijection s -> gamma(s) (equivalence / isomorphism)
    gamma: Mapping[GroupElement, GroupElement] | None
    #: induced automorphism between the universal groups (equivalence)
    uab_map: GroupHom | None


def _verify_automorphism(phi: RatMatrix, algebra: StructureAlgebra):
    n = algebra.dimension
    if phi.shape != (n, n) or rank(phi) != n:
        raise NotAutomorphism("map is not invertible", witness=None)
    for op in algebra.operations:
        for key in product(range(n), repeat=op.arity):
            val = op.basis_value(key, n)
            lhs = phi.matvec(val)
            rhs = op.apply([phi.column(i) for i in key], n)
            if tuple(lhs) != tuple(rhs):
                raise NotAutomorphism(
                    f"map fails to preserve operation {op.name} on basis tuple {key}",
                    witness=(op.name, key),
                )


def check_graded_map(phi: RatMatrix, src: Grading, dst: Grading) -> GradedMapReport:
    """Verify that phi (in original coordinates) is an algebra automorphism
    and classify it as a graded isomorphism, an equivalence, or neither."""
    if src.algebra.dimension != dst.algebra.dimension:
        raise ShapeError("gradings live on algebras of different dimension")
    if src.group != dst.group:
        raise ShapeError("gradings use different groups")
    _verify_automorphism(phi, src.algebra)
    gamma: dict[GroupElement, GroupElement] = {}
    for s in src.support:
        image_vectors = [phi.matvec(v) for v in src.component(s).vectors()]
        target = None
        for t in dst.support:
            if all(dst.component(t).contains(v) for v in image_vectors):
                target = t
                break
        if target is None:
            return GradedMapReport("neither", None, None)
        gamma[s] = target
    if len(set(gamma.values())) != len(gamma):
        return GradedMapReport("neither", None, None)
    if all(s == t for s, t in gamma.items()):
        return GradedMapReport("isomorphism", gamma, _induced_uab_map(src, dst, gamma))
    return GradedMapReport("equivalence", gamma, _induced_uab_map(src, dst, gamma))


def _induced_uab_map(src: Grading, dst: Grading, gamma: Mapping) -> GroupHom:
    """The automorphism w of the universal group with
    iota'(gamma(s)) = w(iota(s)) for all support elements s."""
    u_src = universal_abelian_group(src)
    u_dst = universal_abelian_group(dst)
    images = {s: u_dst.iota[gamma[s]] for s in u_src.support_order}
    try:
        w = u_src.hom_from_support_images(u_dst.group, images)
    except ValueError as exc:
        raise VerificationFailure(
            "support bijection does not respect the universal relations"
        ) from exc
    if not w.is_isomorphism():
        raise VerificationFailure(
            "induced map between universal groups is not an isomorphism"
        )
    for s in u_src.support_order:
        if w(u_src.iota[s]) != u_dst.iota[gamma[s]]:
            raise VerificationFailure("induced universal map disagrees on the support")
    return w


def endo_matrix(space_dim: int, flat: Sequence[Fraction]) -> RatMatrix:
    """Reshape an n^2 flat vector back into an endomorphism matrix."""
    return mat_from_flat(list(flat), space_dim, space_dim)
