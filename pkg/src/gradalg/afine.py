"""Toral rank, almost-fine gradings, canonical refinements, enumeration of
almost-fine coarsenings, admissibility, and classification of gradings by
a fixed finite group up to isomorphism.

The toral rank of a grading is realized in characteristic 0 through the
Lie algebra D_e of degree-preserving derivations: a Cartan subalgebra of
D_e is found by generic-element nilspace iteration, and the span of the
Jordan semisimple parts of its basis is a maximal toral subalgebra t,
whose dimension is the toral rank.  A grading is almost fine when the
free rank of its universal abelian group equals its toral rank; the
canonical refinement diagonalizes every component under t and grades the
eigenspaces by the weight lattice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from .abgroup import (
    DEFAULT_CAP,
    FgAbGroup,
    GroupElement,
    GroupHom,
    Subgroup,
    enumerate_homs,
    enumerate_subgroups,
    quotient_by,
    torsion_and_free,
)
from .algcore import MultilinearOp, StructureAlgebra, Subspace
from .errors import (
    AxiomFailure,
    DegenerateRetryExhausted,
    NonSplitError,
    NotARefinement,
)
from .exactla import (
    IntMatrix,
    RatMatrix,
    column_hnf,
    hnf_solve,
    mat_from_flat,
    nullspace,
    semisimple_part,
    simultaneous_eigenspaces,
    subspace_coords,
)
from .grading import (
    GradedDerivations,
    Grading,
    UabResult,
    graded_derivations,
    induce,
    universal_abelian_group,
)

Q = Fraction

DEFAULT_SEED = 0
_MAX_GENERIC_RETRIES = 40


# ---------------------------------------------------------------------------
# Cartan subalgebras and toral parts
# ---------------------------------------------------------------------------


def _lie_structure_on(space: Subspace, n: int) -> StructureAlgebra:
    """Commutator Lie algebra on a commutator-closed space of matrices
    (flattened n x n, basis = space columns)."""
    mats = [mat_from_flat(list(v), n, n) for v in space.vectors()]
    tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for i in range(len(mats)):
        for j in range(len(mats)):
            comm = mats[i] * mats[j] - mats[j] * mats[i]
            coords = space.coords(comm.flatten())
            if coords is None:
                raise AxiomFailure("matrix space is not closed under commutator")
            vec = {t: c for t, c in enumerate(coords) if c}
            if vec:
                tensor[(i, j)] = vec
    return StructureAlgebra("commutators", len(mats), [MultilinearOp("bracket", 2, tensor)], ["lie"])


def _is_nilpotent_subalgebra(alg: StructureAlgebra, basis: Subspace) -> bool:
    """Lower-central-series check for a bracket-closed subspace."""
    current = basis
    for _ in range(alg.dimension + 1):
        if current.dim == 0:
            return True
        vecs = []
        for x in basis.vectors():
            for y in current.vectors():
                z = alg.bracket(x, y)
                if any(z):
                    vecs.append(z)
        nxt = Subspace.from_vectors(alg.dimension, vecs)
        if nxt.dim == current.dim and nxt == current:
            return False
        current = nxt
    return current.dim == 0


def _normalizer(alg: StructureAlgebra, sub: Subspace) -> Subspace:
    """{y : [y, sub] subset of sub} inside the algebra."""
    n = alg.dimension
    if sub.dim == 0:
        return Subspace.full(n)
    ann = nullspace(sub.basis.transpose())  # functionals vanishing on sub
    rows = []
    for v in sub.vectors():
        adv = alg.ad_matrix(v)  # y -> [v, y]; [y, v] = -[v, y]
        for j in range(ann.cols):
            q = ann.column(j)
            row = [sum(-q[r] * adv[r, c] for r in range(n)) for c in range(n)]
            if any(row):
                rows.append(row)
    if not rows:
        return Subspace.full(n)
    return Subspace(n, nullspace(RatMatrix(rows)))


def _element_candidates(d: int, rng: random.Random):
    """Candidate elements whose adjoint nilspace may be a Cartan
    subalgebra: sparse deterministic combinations first (these tend to
    have rational spectra), then random vectors."""

    def vec(pairs):
        x = [Q(0)] * d
        for i, c in pairs:
            x[i] = Q(c)
        return x

    for i in range(d):
        yield vec([(i, 1)])
    for i in range(d):
        for j in range(i + 1, d):
            yield vec([(i, 1), (j, 1)])
            yield vec([(i, 1), (j, -1)])
            yield vec([(i, 2), (j, 1)])
    for attempt in range(_MAX_GENERIC_RETRIES):
        bound = 3 + attempt
        yield [Q(rng.randint(-bound, bound)) for _ in range(d)]


def cartan_candidates(alg: StructureAlgebra, rng: random.Random):
    """Verified Cartan subalgebras (nilpotent and self-normalizing),
    found as 0-generalized-eigenspaces of adjoints of candidate
    elements, lazily and in a deterministic order."""
    d = alg.dimension
    if d == 0:
        yield Subspace.from_vectors(0, [])
        return
    produced = False
    for x in _element_candidates(d, rng):
        if not any(x):
            continue
        adx = alg.ad_matrix(x)
        nil = Subspace(d, nullspace(adx.power(d)))
        if nil.dim == 0:
            continue
        # nilspace of a generic element is a Cartan subalgebra; verify
        closed = all(
            nil.contains(alg.bracket(a, b))
            for a in nil.vectors()
            for b in nil.vectors()
        )
        if not closed:
            continue
        if not _is_nilpotent_subalgebra(alg, nil):
            continue
        if _normalizer(alg, nil) != nil:
            continue
        produced = True
        yield nil
    if not produced:
        raise DegenerateRetryExhausted(
            "no candidate element produced a Cartan subalgebra"
        )


def cartan_subalgebra(alg: StructureAlgebra, rng: random.Random) -> Subspace:
    """The first verified Cartan subalgebra from the candidate stream."""
    return next(iter(cartan_candidates(alg, rng)))


@dataclass(frozen=True)
class ToralData:
    """Toral part of the degree-preserving derivations of a grading."""

    derivations: GradedDerivations
    #: D_e inside End(A) (homogeneous coordinates, n^2 flat)
    d_e: Subspace
    #: Cartan subalgebra of D_e, same coordinates
    cartan: Subspace
    #: span of the semisimple parts of the Cartan basis
    toral: Subspace
    trank: int

    def toral_matrices(self) -> list[RatMatrix]:
        n2 = self.toral.dim_ambient
        n = int(round(n2**0.5))
        return [mat_from_flat(list(v), n, n) for v in self.toral.vectors()]


def toral_rank(
    grading: Grading,
    seed: int = DEFAULT_SEED,
    derivations: GradedDerivations | None = None,
) -> ToralData:
    """Toral data of a grading: D_e, a Cartan subalgebra of it, and the
    span t of the semisimple parts of the Cartan basis; trank = dim t."""
    n = grading.dimension
    gd = derivations if derivations is not None else graded_derivations(grading)
    d_e = gd.identity_part
    if d_e.dim == 0:
        empty = Subspace.from_vectors(n * n, [])
        return ToralData(gd, d_e, empty, empty, 0)
    lie = _lie_structure_on(d_e, n)
    rng = random.Random(seed)
    cartan = toral = None
    nonsplit: NonSplitError | None = None
    for cartan_small in cartan_candidates(lie, rng):
        # back to ambient endomorphism coordinates
        cartan_vecs = [
            d_e.basis.matvec(c) for c in cartan_small.vectors()
        ]
        candidate = Subspace.from_vectors(n * n, cartan_vecs)
        try:
            toral_vecs = []
            for v in candidate.vectors():
                s = semisimple_part(mat_from_flat(list(v), n, n))
                if not s.is_zero():
                    toral_vecs.append(s.flatten())
        except NonSplitError as exc:
            # this Cartan subalgebra is not split; try the next candidate
            nonsplit = exc
            continue
        cartan = candidate
        toral = Subspace.from_vectors(n * n, toral_vecs)
        break
    if cartan is None:
        raise nonsplit if nonsplit is not None else DegenerateRetryExhausted(
            "no Cartan subalgebra of the derivations was found"
        )
    mats = [mat_from_flat(list(v), n, n) for v in toral.vectors()]
    for i, a in enumerate(mats):
        if not d_e.contains(a.flatten()):
            raise AxiomFailure("semisimple part left the derivation algebra")
        for b in mats[i + 1 :]:
            if a * b != b * a:
                raise AxiomFailure("toral part is not commutative")
    return ToralData(gd, d_e, cartan, toral, toral.dim)


# ---------------------------------------------------------------------------
# Almost-fine test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlmostFineCertificate:
    almost_fine: bool
    rank_uab: int
    trank: int
    #: only populated when the algebra asserts a reductive automorphism group
    dim_d_e: int | None


def is_almost_fine(
    grading: Grading,
    seed: int = DEFAULT_SEED,
    uab: UabResult | None = None,
    toral: ToralData | None = None,
) -> AlmostFineCertificate:
    """A grading is almost fine when the free rank of its universal
    abelian group equals its toral rank."""
    u = uab if uab is not None else universal_abelian_group(grading)
    td = toral if toral is not None else toral_rank(grading, seed=seed)
    rank_u = u.group.free_rank
    verdict = rank_u == td.trank
    dim_de = None
    if "aut_reductive" in grading.algebra.flags:
        # shortcut: D_e consists of toral elements, so trank = dim D_e
        dim_de = td.d_e.dim
        if (rank_u == dim_de) != verdict:
            raise AxiomFailure(
                "reductive shortcut disagrees with the toral-rank test"
            )
    return AlmostFineCertificate(verdict, rank_u, td.trank, dim_de)


# ---------------------------------------------------------------------------
# Canonical refinement
# ---------------------------------------------------------------------------


def _product_with_free(
    g: FgAbGroup, extra: int
) -> tuple[FgAbGroup, GroupHom]:
    """G x Z^extra in canonical coordinates (G-free, new-free, G-torsion),
    with the projection back onto G."""
    gp = FgAbGroup(g.free_rank + extra, g.invariants)
    rows = []
    for i in range(g.free_rank):
        rows.append([1 if j == i else 0 for j in range(gp.ngens)])
    for i in range(len(g.invariants)):
        rows.append(
            [1 if j == g.free_rank + extra + i else 0 for j in range(gp.ngens)]
        )
    proj = GroupHom(
        gp, g, IntMatrix(rows) if rows else IntMatrix.zeros(0, gp.ngens)
    )
    return gp, proj


def _product_element(
    gp: FgAbGroup, g: GroupElement, lam: Sequence[int], extra: int
) -> GroupElement:
    r = g.owner.free_rank
    coords = list(g.coords[:r]) + [int(x) for x in lam] + list(g.coords[r:])
    return gp.element(coords)


@dataclass(frozen=True)
class RefinementResult:
    original: Grading
    refined: Grading
    #: projection (G x weight lattice) -> G; inducing along it recovers the
    #: original grading
    coarsening: GroupHom
    #: degree in the refined group -> weight-lattice coordinates
    weights: Mapping[GroupElement, tuple[int, ...]]
    toral: ToralData
    certificate: AlmostFineCertificate


def canonical_refinement(
    grading: Grading,
    seed: int = DEFAULT_SEED,
    toral: ToralData | None = None,
) -> RefinementResult:
    """Refine a grading by the joint eigenspace decomposition of its
    components under the toral part of D_e, graded by G x (weight lattice).

    The result is almost fine with the same toral rank (verified)."""
    td = toral if toral is not None else toral_rank(grading, seed=seed)
    n = grading.dimension
    r = td.trank
    tmats = td.toral_matrices()
    # eigen-decompose every component in homogeneous coordinates
    pieces: list[tuple[GroupElement, tuple[Fraction, ...], list[tuple[Fraction, ...]]]] = []
    for g in grading.support:
        idx = grading.indices_of_degree(g)
        restr = [m.submatrix(idx, idx) for m in tmats]
        for weight, basis in simultaneous_eigenspaces(restr, dim=len(idx)):
            cols = []
            for j in range(basis.cols):
                v = [Q(0)] * n
                for pos, i in enumerate(idx):
                    v[i] = basis[pos, j]
                cols.append(tuple(v))
            pieces.append((g, weight, cols))
    # canonical weight lattice from the observed weights
    all_weights = sorted({w for _, w, _ in pieces})
    if r:
        denom = 1
        for w in all_weights:
            for x in w:
                denom = lcm(denom, x.denominator)
        scaled = [[int(x * denom) for x in w] for w in all_weights]
        lattice = column_hnf(IntMatrix.from_columns(scaled, rows=r))
        if lattice.cols != r:
            raise AxiomFailure("observed weights do not span the weight space")
        coords_of = {}
        for w, s in zip(all_weights, scaled):
            c = hnf_solve(lattice, s)
            assert c is not None
            coords_of[w] = tuple(c)
    else:
        coords_of = {(): ()}
    gp, proj = _product_with_free(grading.group, r)
    degrees: list[GroupElement] = []
    new_cols: list[tuple[Fraction, ...]] = []
    weight_by_degree: dict[GroupElement, tuple[int, ...]] = {}
    for g, w, cols in sorted(
        pieces, key=lambda p: (p[0].coords, p[1])
    ):
        deg = _product_element(gp, g, coords_of[w], r)
        weight_by_degree[deg] = coords_of[w]
        for v in cols:
            degrees.append(deg)
            new_cols.append(v)
    if len(new_cols) != n:
        raise AxiomFailure("eigenspace pieces do not fill the algebra")
    p = RatMatrix.from_columns(new_cols, rows=n)
    refined = Grading(
        grading.algebra, gp, degrees, grading.basis_change * p
    )
    if not refined.is_refinement_of(grading):
        raise NotARefinement("canonical refinement failed containment check")
    if induce(refined, proj).component_dims() != grading.component_dims():
        raise NotARefinement("projection does not recover the original grading")
    td2 = toral_rank(refined, seed=seed)
    cert = is_almost_fine(refined, seed=seed, toral=td2)
    if not cert.almost_fine or td2.trank != td.trank:
        raise AxiomFailure(
            "canonical refinement is not almost fine of equal toral rank"
        )
    return RefinementResult(grading, refined, proj, weight_by_degree, td, cert)


# ---------------------------------------------------------------------------
# Enumeration of almost-fine coarsenings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoarseningEntry:
    subgroup: Subgroup
    quotient: GroupHom
    grading: Grading
    #: "reductive" when certified wholesale by the reductive hypothesis,
    #: otherwise "per-candidate" with the toral ranks compared directly
    certificate: str
    orbit: int


def _subgroup_image(e: Subgroup, w: GroupHom) -> Subgroup:
    gens = [w(x) for x in e.canonical_generators()]
    return Subgroup.from_generators(e.owner, gens)


def enumerate_af_coarsenings(
    grading: Grading,
    weyl_generators: Sequence[GroupHom] = (),
    universal_only: bool = False,
    cap: int = DEFAULT_CAP,
    seed: int = DEFAULT_SEED,
) -> list[CoarseningEntry]:
    """Almost-fine coarsenings of an almost fine grading, one per subgroup
    E of the torsion of the universal group with E meeting the derivation
    support Sigma only at the identity.

    ``universal_only`` additionally requires E to be generated by its
    elements of the form u - v with u, v in the support.  Weyl generators
    (automorphisms of the universal group) are used for orbit labelling
    only; completeness of the orbits is exactly as complete as the
    supplied generators.
    """
    uab = universal_abelian_group(grading)
    ugr = uab.universal_grading()
    gd = graded_derivations(ugr)
    sigma = [s for s in gd.sigma if not s.is_identity()]
    t_u, _ = torsion_and_free(uab.group)
    candidates = enumerate_subgroups(t_u, cap=cap)
    support_classes = [uab.iota[s] for s in uab.support_order]
    diffs = {u - v for u in support_classes for v in support_classes}
    reductive = "aut_reductive" in grading.algebra.flags
    base_trank: int | None = None
    survivors: list[tuple[Subgroup, GroupHom, Grading, str]] = []
    for e in candidates:
        if any(e.contains(s) for s in sigma):
            continue
        if universal_only:
            gens = [x for x in e.elements() if x in diffs]
            if Subgroup.from_generators(uab.group, gens) != e:
                continue
        quotient, qhom = quotient_by(uab.group, e)
        coarse = induce(ugr, qhom)
        if reductive:
            survivors.append((e, qhom, coarse, "reductive"))
        else:
            if base_trank is None:
                base_trank = toral_rank(grading, seed=seed).trank
            if toral_rank(coarse, seed=seed).trank != base_trank:
                continue
            survivors.append((e, qhom, coarse, "per-candidate"))
    # orbit labelling under the supplied automorphisms of U
    lattice_to_pos = {e.lattice: i for i, (e, *_rest) in enumerate(survivors)}
    orbit_of = [-1] * len(survivors)
    next_orbit = 0
    for i, (e, *_rest) in enumerate(survivors):
        if orbit_of[i] != -1:
            continue
        orbit_of[i] = next_orbit
        frontier = [e]
        while frontier:
            cur = frontier.pop()
            for w in weyl_generators:
                img = _subgroup_image(cur, w)
                j = lattice_to_pos.get(img.lattice)
                if j is not None and orbit_of[j] == -1:
                    orbit_of[j] = next_orbit
                    frontier.append(img)
        next_orbit += 1
    return [
        CoarseningEntry(e, qhom, coarse, cert, orbit_of[i])
        for i, (e, qhom, coarse, cert) in enumerate(survivors)
    ]


# ---------------------------------------------------------------------------
# Admissibility and classification
# ---------------------------------------------------------------------------


def is_admissible(alpha: GroupHom, uab: UabResult) -> bool:
    """A homomorphism from the universal group is admissible when
    s -> (alpha(s), class of s modulo torsion) is injective on the support."""
    _, pi = torsion_and_free(uab.group)
    seen = set()
    for s in uab.support_order:
        u = uab.iota[s]
        key = (alpha(u).coords, pi(u).coords)
        if key in seen:
            return False
        seen.add(key)
    return True


@dataclass(frozen=True)
class ClassificationEntry:
    source: int
    alpha: GroupHom
    grading: Grading
    orbit: int
    #: number of admissible homomorphisms in this orbit
    orbit_size: int


def classify_gradings(
    catalog: Sequence[tuple[Grading, Sequence[GroupHom]]],
    group: FgAbGroup,
    cap: int = DEFAULT_CAP,
) -> list[ClassificationEntry]:
    """G-gradings induced from a catalog of almost fine gradings: for each
    catalog entry, enumerate homomorphisms from its universal group to G,
    keep the admissible ones, and group them into orbits under
    precomposition with the supplied Weyl generators, emitting one
    representative (and its induced grading) per orbit.

    The orbit decomposition is complete only if the supplied generators
    generate the relevant Weyl-group action."""
    out: list[ClassificationEntry] = []
    for idx, (grading, weyl) in enumerate(catalog):
        uab = universal_abelian_group(grading)
        ugr = uab.universal_grading()
        homs = enumerate_homs(uab.group, group, cap=cap)
        admissible = [a for a in homs if is_admissible(a, uab)]

        def key(a: GroupHom) -> tuple:
            return tuple(
                a(a.domain.generator(i)).coords for i in range(a.domain.ngens)
            )

        remaining = {key(a): a for a in admissible}
        orbit_id = 0
        while remaining:
            start_key = min(remaining)
            orbit = {start_key: remaining[start_key]}
            frontier = [remaining[start_key]]
            while frontier:
                a = frontier.pop()
                for w in weyl:
                    b = a.compose(w)
                    k = key(b)
                    if k in remaining and k not in orbit:
                        orbit[k] = remaining[k]
                        frontier.append(remaining[k])
            rep = orbit[min(orbit)]
            out.append(
                ClassificationEntry(
                    idx, rep, induce(ugr, rep), orbit_id, len(orbit)
                )
            )
            for k in orbit:
                del remaining[k]
            orbit_id += 1
    return out
