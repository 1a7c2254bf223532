"""Finite-dimensional algebras given by structure tensors.

An algebra is a rational vector space with any number of multilinear
operations, each stored as a sparse structure tensor.  Asserted flags
(lie, associative) are verified exactly at construction time.  On top of
this: derivation algebras (optionally preserving a family of subspaces),
centralizers, the Killing form, and a simplicity test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import FlagViolation, ShapeError, VerificationFailure
from .exactla import (
    RatMatrix,
    column_echelon,
    nullspace,
    rank,
    rational_solve,
    subspace_contains,
    subspace_coords,
    subspace_intersection,
    subspace_sum,
)

Q = Fraction


class MultilinearOp:
    """A k-ary multilinear operation as a sparse structure tensor:
    (i_1, ..., i_k) -> {j: coefficient} with
    op(e_{i_1}, ..., e_{i_k}) = sum_j c_j e_j."""

    __slots__ = ("name", "arity", "tensor")

    def __init__(self, name: str, arity: int, tensor: Mapping[tuple[int, ...], Mapping[int, Fraction]]):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        clean: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for key, vec in tensor.items():
            key = tuple(int(i) for i in key)
            if len(key) != arity:
                raise ShapeError("tensor key arity mismatch")
            v = {int(j): Q(c) for j, c in vec.items() if c}
            if v:
                clean[key] = v
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "arity", int(arity))
        object.__setattr__(self, "tensor", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultilinearOp is immutable")

    def basis_value(self, key: tuple[int, ...], dim: int) -> tuple[Fraction, ...]:
        out = [Q(0)] * dim
        for j, c in self.tensor.get(tuple(key), {}).items():
            out[j] = c
        return tuple(out)

    def apply(self, vectors: Sequence[Sequence[Fraction]], dim: int) -> tuple[Fraction, ...]:
        """Evaluate the operation on coordinate vectors."""
        if len(vectors) != self.arity:
            raise ShapeError("wrong number of arguments")
        out = [Q(0)] * dim
        for key, vec in self.tensor.items():
            coeff = Q(1)
            for t, i in enumerate(key):
                coeff *= vectors[t][i]
                if coeff == 0:
                    break
            if coeff == 0:
                continue
            for j, c in vec.items():
                out[j] += coeff * c
        return tuple(out)


class StructureAlgebra:
    """A finite-dimensional algebra over Q with verified flags."""

    __slots__ = ("name", "dimension", "operations", "flags")

    def __init__(
        self,
        name: str,
        dimension: int,
        operations: Sequence[MultilinearOp],
        flags: Iterable[str] = (),
    ):
        flags = frozenset(flags)
        unknown = flags - {"lie", "associative", "aut_reductive"}
        if unknown:
            raise ValueError(f"unknown flags {sorted(unknown)}")
        operations = tuple(operations)
        for op in operations:
            for key, vec in op.tensor.items():
                if any(not 0 <= i < dimension for i in key) or any(
                    not 0 <= j < dimension for j in vec
                ):
                    raise ShapeError("structure-tensor index out of range")
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "dimension", int(dimension))
        object.__setattr__(self, "operations", operations)
        object.__setattr__(self, "flags", flags)
        if "lie" in flags:
            self._verify_lie()
        if "associative" in flags:
            self._verify_associative()

    def __setattr__(self, name, value):
        raise AttributeError("StructureAlgebra is immutable")

    def __repr__(self) -> str:
        return f"StructureAlgebra({self.name!r}, dim={self.dimension})"

    # -- products -----------------------------------------------------------

    def binary_op(self) -> MultilinearOp:
        """The unique binary operation (bracket or product)."""
        binops = [op for op in self.operations if op.arity == 2]
        if len(binops) != 1:
            raise ValueError(
                f"expected exactly one binary operation, found {len(binops)}"
            )
        return binops[0]

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return self.binary_op().apply([x, y], self.dimension)

    def basis_vector(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Q(1) if j == i else Q(0) for j in range(self.dimension))

    def ad_matrix(self, x: Sequence[Fraction]) -> RatMatrix:
        """Matrix of y -> bracket(x, y) on the basis."""
        n = self.dimension
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(n)]
        return RatMatrix.from_columns(cols, rows=n)

    # -- flag verification --------------------------------------------------

    def _verify_lie(self):
        op = self.binary_op()
        n = self.dimension
        for i in range(n):
            for j in range(i, n):
                ij = op.basis_value((i, j), n)
                ji = op.basis_value((j, i), n)
                if any(a + b for a, b in zip(ij, ji)):
                    raise FlagViolation(
                        f"bracket is not antisymmetric on basis pair ({i}, {j})",
                        witness=(i, j),
                    )
        basis = [self.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                xy = op.basis_value((i, j), n)
                for k in range(j + 1, n):
                    yz = op.basis_value((j, k), n)
                    zx = op.basis_value((k, i), n)
                    total = [
                        a + b + c
                        for a, b, c in zip(
                            op.apply([xy, basis[k]], n),
                            op.apply([yz, basis[i]], n),
                            op.apply([zx, basis[j]], n),
                        )
                    ]
                    if any(total):
                        raise FlagViolation(
                            f"Jacobi identity fails on basis triple ({i}, {j}, {k})",
                            witness=(i, j, k),
                        )

    def _verify_associative(self):
        op = self.binary_op()
        n = self.dimension
        basis = [self.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                ij = op.basis_value((i, j), n)
                for k in range(n):
                    jk = op.basis_value((j, k), n)
                    lhs = op.apply([ij, basis[k]], n)
                    rhs = op.apply([basis[i], jk], n)
                    if lhs != rhs:
                        raise FlagViolation(
                            f"associativity fails on basis triple ({i}, {j}, {k})",
                            witness=(i, j, k),
                        )


class Subspace:
    """Subspace of an algebra's underlying space, canonical column basis."""

    __slots__ = ("dim_ambient", "basis")

    def __init__(self, dim_ambient: int, basis: RatMatrix):
        if basis.rows != dim_ambient:
            raise ShapeError("basis rows must equal the ambient dimension")
        basis = column_echelon(basis) if basis.cols else RatMatrix.zeros(dim_ambient, 0)
        object.__setattr__(self, "dim_ambient", dim_ambient)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def from_vectors(cls, dim_ambient: int, vectors: Sequence[Sequence]) -> "Subspace":
        if not vectors:
            return cls(dim_ambient, RatMatrix.zeros(dim_ambient, 0))
        return cls(dim_ambient, RatMatrix.from_columns(list(vectors), rows=dim_ambient))

    @classmethod
    def full(cls, dim_ambient: int) -> "Subspace":
        return cls(dim_ambient, RatMatrix.identity(dim_ambient))

    @property
    def dim(self) -> int:
        return self.basis.cols

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.columns()

    def contains(self, vec: Sequence) -> bool:
        return subspace_contains(self.basis, vec)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.vectors())

    def coords(self, vec: Sequence) -> tuple[Fraction, ...] | None:
        return subspace_coords(self.basis, vec)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim_ambient != other.dim_ambient:
            raise ShapeError("ambient mismatch")
        return Subspace(self.dim_ambient, subspace_intersection(self.basis, other.basis))

    def add(self, other: "Subspace") -> "Subspace":
        if self.dim_ambient != other.dim_ambient:
            raise ShapeError("ambient mismatch")
        return Subspace(self.dim_ambient, subspace_sum(self.basis, other.basis))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.dim_ambient == other.dim_ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.dim_ambient, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.dim_ambient}, dim={self.dim})"


# ---------------------------------------------------------------------------
# Construction from a plain description
# ---------------------------------------------------------------------------


def build_algebra(spec: Mapping) -> StructureAlgebra:
    """Build a StructureAlgebra from a plain dict:
    { "name", "dimension", "flags": {...}, "operations":
      [ {"name", "arity", "entries": [[i_1, ..., i_k, j, "p/q"], ...]}, ...] }.
    Flags given as a mapping of flag name to boolean.  Asserted lie /
    associative flags are verified (FlagViolation on failure)."""
    name = spec.get("name", "algebra")
    dimension = int(spec["dimension"])
    flags = [k for k, v in dict(spec.get("flags", {})).items() if v]
    ops = []
    for opspec in spec.get("operations", []):
        arity = int(opspec["arity"])
        tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for entry in opspec["entries"]:
            if len(entry) != arity + 2:
                raise ShapeError(
                    f"entry of length {len(entry)} in an arity-{arity} operation"
                )
            key = tuple(int(x) for x in entry[:arity])
            j = int(entry[arity])
            c = Q(entry[arity + 1]) if isinstance(entry[arity + 1], str) else Q(entry[arity + 1])
            tensor.setdefault(key, {})
            tensor[key][j] = tensor[key].get(j, Q(0)) + c
        ops.append(MultilinearOp(opspec.get("name", "op"), arity, tensor))
    return StructureAlgebra(name, dimension, ops, flags)


def algebra_to_dict(a: StructureAlgebra) -> dict:
    """Inverse of build_algebra (entries sorted for stable output)."""
    ops = []
    for op in a.operations:
        entries = []
        for key in sorted(op.tensor):
            for j in sorted(op.tensor[key]):
                c = op.tensor[key][j]
                entries.append(list(key) + [j, f"{c.numerator}/{c.denominator}"])
        ops.append({"name": op.name, "arity": op.arity, "entries": entries})
    return {
        "name": a.name,
        "dimension": a.dimension,
        "flags": {f: True for f in sorted(a.flags)},
        "operations": ops,
    }


def algebra_from_matrices(
    name: str,
    matrices: Sequence[RatMatrix],
    kind: str = "lie",
    extra_flags: Iterable[str] = (),
) -> StructureAlgebra:
    """Abstract algebra from a faithful matrix realization: structure
    constants of the commutator (kind="lie") or matrix product
    (kind="associative") expressed in the span of ``matrices``."""
    if not matrices:
        raise ValueError("need at least one matrix")
    n = len(matrices)
    flat = RatMatrix.from_columns([m.flatten() for m in matrices], rows=matrices[0].rows * matrices[0].cols)
    if rank(flat) != n:
        raise ValueError("matrices are linearly dependent")
    tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for i in range(n):
        for j in range(n):
            if kind == "lie":
                prod_m = matrices[i] * matrices[j] - matrices[j] * matrices[i]
            else:
                prod_m = matrices[i] * matrices[j]
            coords = subspace_coords(flat, prod_m.flatten())
            if coords is None:
                raise ValueError(f"span is not closed under the product ({i}, {j})")
            vec = {t: c for t, c in enumerate(coords) if c}
            if vec:
                tensor[(i, j)] = vec
    flags = [kind] + list(extra_flags)
    return StructureAlgebra(name, n, [MultilinearOp("bracket" if kind == "lie" else "product", 2, tensor)], flags)


def subalgebra_structure(
    a: StructureAlgebra, s: Subspace, name: str | None = None, flags: Iterable[str] | None = None
) -> tuple[StructureAlgebra, RatMatrix]:
    """Induced algebra on a subspace closed under all operations.

    Returns the abstract algebra on the subspace basis together with the
    inclusion matrix (columns = subspace basis in ambient coordinates).
    """
    basis = s.basis
    m = basis.cols
    ops = []
    for op in a.operations:
        tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for key in product(range(m), repeat=op.arity):
            val = op.apply([basis.column(i) for i in key], a.dimension)
            if not any(val):
                continue
            coords = s.coords(val)
            if coords is None:
                raise ValueError("subspace is not closed under an operation")
            vec = {t: c for t, c in enumerate(coords) if c}
            if vec:
                tensor[key] = vec
        ops.append(MultilinearOp(op.name, op.arity, tensor))
    use_flags = a.flags if flags is None else frozenset(flags)
    return StructureAlgebra(name or f"{a.name}-sub", m, ops, use_flags), basis


# ---------------------------------------------------------------------------
# Kernel machinery: intersect a large homogeneous system incrementally
# ---------------------------------------------------------------------------


def _incremental_kernel(
    nunknowns: int,
    row_blocks: Iterable[list[list[Fraction]]],
    initial: RatMatrix | None = None,
) -> RatMatrix:
    """Kernel of a tall stacked system, one row block at a time.

    Maintains a basis N of the running solution space (``initial`` columns,
    default the full space) and replaces each block E by the small system
    E*N, so the cost tracks the shrinking solution dimension instead of
    the full unknown count.
    """
    n_basis = RatMatrix.identity(nunknowns) if initial is None else initial
    if n_basis.cols == 0:
        return RatMatrix.zeros(nunknowns, 0)
    for block in row_blocks:
        if n_basis.cols == 0:
            break
        rows = [r for r in block if any(r)]
        if not rows:
            continue
        e = RatMatrix(rows)
        small = e * n_basis
        if small.is_zero():
            continue
        ker = nullspace(small)
        n_basis = n_basis * ker if ker.cols else RatMatrix.zeros(nunknowns, 0)
    return column_echelon(n_basis) if n_basis.cols else RatMatrix.zeros(nunknowns, 0)


def _leibniz_row_blocks(a: StructureAlgebra, block_size: int = 48):
    """Equation rows (in the n^2 unknowns D[r, c], index r*n + c) forcing
    D to satisfy the Leibniz rule for every operation, yielded in blocks."""
    n = a.dimension
    block: list[list[Fraction]] = []
    for op in a.operations:
        for key in product(range(n), repeat=op.arity):
            val = op.basis_value(key, n)
            # skip keys where both sides are trivially zero
            interesting = any(val)
            rhs_terms: list[tuple[int, tuple[int, ...], tuple[Fraction, ...]]] = []
            for t, it in enumerate(key):
                for b in range(n):
                    key2 = key[:t] + (b,) + key[t + 1 :]
                    v2 = op.tensor.get(key2)
                    if v2:
                        vec = op.basis_value(key2, n)
                        rhs_terms.append((t, (b, it), vec))
                        interesting = True
            if not interesting:
                continue
            for j in range(n):
                row = [Q(0)] * (n * n)
                # LHS: (D val)_j = sum_a D[j, a] val_a
                for aidx, c in enumerate(val):
                    if c:
                        row[j * n + aidx] += c
                # RHS: sum over slots t and basis vectors b of
                # D[b, i_t] * op(..., e_b in slot t, ...)_j
                for _t, (b, it), vec in rhs_terms:
                    if vec[j]:
                        row[b * n + it] -= vec[j]
                if any(row):
                    block.append(row)
                    if len(block) >= block_size:
                        yield block
                        block = []
    if block:
        yield block


def _stabilizer_row_blocks(n: int, constraints: Sequence[Subspace], block_size: int = 48):
    """Rows forcing D to preserve each constraint subspace."""
    block: list[list[Fraction]] = []
    for w in constraints:
        if w.dim == 0 or w.dim == n:
            continue
        # rows of ann annihilate the subspace: ann * basis = 0
        ann = nullspace(w.basis.transpose())  # columns q with basis^T q = 0
        for qj in range(ann.cols):
            qvec = ann.column(qj)
            for cj in range(w.basis.cols):
                wvec = w.basis.column(cj)
                row = [Q(0)] * (n * n)
                for r in range(n):
                    if qvec[r] == 0:
                        continue
                    for c in range(n):
                        if wvec[c]:
                            row[r * n + c] += qvec[r] * wvec[c]
                if any(row):
                    block.append(row)
                    if len(block) >= block_size:
                        yield block
                        block = []
    if block:
        yield block


@dataclass(frozen=True)
class DerivationAlgebra:
    """Derivations of an algebra (optionally preserving subspaces):
    a subspace of End(A) (n^2 coordinates, row-major) together with its
    own Lie algebra structure under the commutator."""

    space: Subspace
    algebra: StructureAlgebra

    @property
    def dim(self) -> int:
        return self.space.dim

    def matrices(self) -> list[RatMatrix]:
        from .exactla import mat_from_flat

        n2 = self.space.dim_ambient
        n = int(round(n2**0.5))
        assert n * n == n2
        return [mat_from_flat(list(v), n, n) for v in self.space.vectors()]


def derivation_algebra(
    a: StructureAlgebra, constraints: Sequence[Subspace] | None = None
) -> DerivationAlgebra:
    """All derivations of ``a`` (maps satisfying the k-ary Leibniz rule for
    every operation), intersected with the stabilizer of each constraint
    subspace; closed under commutator."""
    n = a.dimension

    def blocks():
        yield from _leibniz_row_blocks(a)
        if constraints:
            yield from _stabilizer_row_blocks(n, constraints)

    basis = _incremental_kernel(n * n, blocks())
    space = Subspace(n * n, basis)
    mats = []
    from .exactla import mat_from_flat

    for v in space.vectors():
        mats.append(mat_from_flat(list(v), n, n))
    tensor: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for i in range(len(mats)):
        for j in range(len(mats)):
            comm = mats[i] * mats[j] - mats[j] * mats[i]
            coords = space.coords(comm.flatten())
            if coords is None:
                raise VerificationFailure(
                    "derivation space is not closed under commutator", witness=(i, j)
                )
            vec = {t: c for t, c in enumerate(coords) if c}
            if vec:
                tensor[(i, j)] = vec
    alg = StructureAlgebra(
        f"Der({a.name})", len(mats), [MultilinearOp("bracket", 2, tensor)], ["lie"]
    )
    return DerivationAlgebra(space, alg)


# ---------------------------------------------------------------------------
# Centralizer, Killing form, simplicity
# ---------------------------------------------------------------------------


def _require_lie(a: StructureAlgebra):
    if "lie" not in a.flags:
        raise ValueError("operation requires the lie flag")


def centralizer(a: StructureAlgebra, s: Subspace) -> Subspace:
    """{x in A : [x, v] = 0 for all v in S}."""
    _require_lie(a)
    n = a.dimension
    rows = []
    for v in s.vectors():
        adv = a.ad_matrix(v)
        # [x, v] = -adv x = 0
        rows.extend(adv.data)
    if not rows:
        return Subspace.full(n)
    return Subspace(n, nullspace(RatMatrix(rows)))


def killing_form(a: StructureAlgebra) -> tuple[RatMatrix, bool, bool]:
    """Gram matrix K(e_i, e_j) = trace(ad e_i ad e_j); returns
    (gram, is_nondegenerate, is_semisimple)."""
    _require_lie(a)
    n = a.dimension
    ads = [a.ad_matrix(a.basis_vector(i)) for i in range(n)]
    gram = RatMatrix([[(ads[i] * ads[j]).trace() for j in range(n)] for i in range(n)])
    nondeg = rank(gram) == n
    return gram, nondeg, nondeg


def _ideal_closure(a: StructureAlgebra, seed: Sequence[Fraction]) -> Subspace:
    """Smallest ideal containing the seed vector."""
    n = a.dimension
    span = Subspace.from_vectors(n, [list(seed)])
    frontier = [tuple(seed)]
    while frontier:
        new_frontier = []
        for v in frontier:
            for i in range(n):
                w = a.bracket(a.basis_vector(i), v)
                if any(w) and not span.contains(w):
                    span = Subspace(n, span.basis.hstack(RatMatrix.column_vector(list(w))))
                    new_frontier.append(w)
        frontier = new_frontier
    return span


def centroid_dimension(a: StructureAlgebra) -> int:
    """Dimension of {C in End(A) : C[x, y] = [x, Cy] for all x, y}."""
    _require_lie(a)
    n = a.dimension

    def blocks():
        block = []
        for i in range(n):
            adi = a.ad_matrix(a.basis_vector(i))
            # C * adi - adi * C = 0, row (j, c): sum over a of
            # C[j,a] adi[a,c] - adi[j,a] C[a,c] = 0
            for j in range(n):
                for c in range(n):
                    row = [Q(0)] * (n * n)
                    for t in range(n):
                        if adi[t, c]:
                            row[j * n + t] += adi[t, c]
                        if adi[j, t]:
                            row[t * n + c] -= adi[j, t]
                    if any(row):
                        block.append(row)
                        if len(block) >= 48:
                            yield block
                            block = []
        if block:
            yield block

    return _incremental_kernel(n * n, blocks()).cols


def is_simple(a: StructureAlgebra) -> bool:
    """Simplicity of a Lie algebra with nondegenerate Killing form.

    Fast negative path: if a basis vector generates a proper ideal the
    algebra is not simple.  Otherwise the centroid decides: a semisimple
    split algebra is simple iff its centroid is one-dimensional.
    """
    _require_lie(a)
    _, nondeg, _ = killing_form(a)
    if not nondeg:
        raise ValueError("simplicity test requires a nondegenerate Killing form")
    n = a.dimension
    for i in range(n):
        if _ideal_closure(a, a.basis_vector(i)).dim < n:
            return False
    return centroid_dimension(a) == 1
