"""Right modules as quiver representations and their morphisms.

A module stores one vector space ``F^{d_v}`` per vertex and, for each arrow
``a: u -> v``, a ``d_u x d_v`` matrix acting on row vectors (``m -> m X``).
A morphism ``f: M -> N`` stores per vertex a ``dim M_v x dim N_v`` matrix,
so composition ``g o f`` is the matrix product ``F_v G_v``.

Hom spaces are computed from a minimal projective presentation of the
source: a map out of ``M`` is determined by the images of the top
generators, subject to the vanishing on the generators of the first syzygy.
"""

from __future__ import annotations

import random
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, ModuleLiteral
from .exactlin import (
    Field,
    Subspace,
    block_diag,
    factor_poly,
    hstack,
    is_zero,
    kernel_basis,
    left_kernel,
    min_poly,
    poly_eval,
    poly_pow,
    rank,
    solve_left,
    vstack,
)

DEFAULT_SEED = 20240601


class DecompositionError(RuntimeError):
    """No splitting element was found although locality was not certified."""


class AlgebraMismatch(ValueError):
    pass


class Module:
    """A finite-dimensional right module over ``A``."""

    def __init__(self, A: Algebra, dims: Sequence[int], maps: Sequence[np.ndarray], *, check: bool = True, name: str | None = None):
        self.A = A
        self.F: Field = A.field
        self.dims = tuple(int(d) for d in dims)
        self.maps = list(maps)
        self.name = name
        if len(self.dims) != A.n:
            raise ValueError(f"expected {A.n} dimensions, got {len(self.dims)}")
        if len(self.maps) != len(A.arrows):
            raise ValueError("one matrix per arrow is required")
        for a, X in zip(A.arrows, self.maps):
            if X.shape != (self.dims[a.source], self.dims[a.target]):
                raise ValueError(f"arrow {a.name}: matrix shape {X.shape} does not match dimensions")
        self._act: dict[int, np.ndarray] = {}
        self._pres: Presentation | None = None
        if check and not self.satisfies_relations():
            raise ValueError("module does not satisfy the relations")

    # -- basic data ---------------------------------------------------------
    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def n(self) -> int:
        return self.A.n

    def is_zero(self) -> bool:
        return self.dim == 0

    def act(self, k: int) -> np.ndarray:
        """Matrix of the basis element ``k`` of ``A`` acting on the module."""
        hit = self._act.get(k)
        if hit is not None:
            return hit
        s, t, word = self.A.basis[k]
        if not word:
            out = self.F.eye(self.dims[s])
        else:
            prefix = self.A.index[(s, self.A.arrows[word[-2]].target if len(word) > 1 else s, word[:-1])]
            out = self.F.mul(self.act(prefix), self.maps[word[-1]])
        self._act[k] = out
        return out

    def word_matrix(self, s: int, word: Sequence[int]) -> np.ndarray:
        out = self.F.eye(self.dims[s])
        for a in word:
            out = self.F.mul(out, self.maps[a])
        return out

    def satisfies_relations(self) -> bool:
        F = self.F
        for rel in self.A.relations:
            acc = None
            for word, c in rel.items():
                s = self.A.arrows[word[0]].source
                term = F.red(c * self.word_matrix(s, word))
                acc = term if acc is None else F.red(acc + term)
            if acc is not None and not is_zero(acc):
                return False
        return True

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        return out

    def presentation(self) -> Presentation:
        if self._pres is None:
            self._pres = Presentation(self)
        return self._pres

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"Module({label}dims={self.dims})"

    def same_as(self, other: Module) -> bool:
        """Literal equality of representations (same matrices)."""
        return (
            self.A is other.A
            and self.dims == other.dims
            and all(np.array_equal(x, y) for x, y in zip(self.maps, other.maps))
        )


class ModuleMap:
    """A morphism of modules given by per-vertex matrices."""

    def __init__(self, source: Module, target: Module, mats: Sequence[np.ndarray], *, check: bool = False):
        if source.A is not target.A:
            raise AlgebraMismatch("source and target live over different algebras")
        self.source = source
        self.target = target
        self.mats = list(mats)
        self.F = source.F
        for v, X in enumerate(self.mats):
            if X.shape != (source.dims[v], target.dims[v]):
                raise ValueError(f"vertex {v}: matrix shape {X.shape} does not match")
        if check and not self.is_homomorphism():
            raise ValueError("matrices do not intertwine the arrow actions")

    @classmethod
    def zero(cls, M: Module, N: Module) -> ModuleMap:
        return cls(M, N, [M.F.zeros(M.dims[v], N.dims[v]) for v in range(M.n)])

    @classmethod
    def identity(cls, M: Module) -> ModuleMap:
        return cls(M, M, [M.F.eye(d) for d in M.dims])

    def is_homomorphism(self) -> bool:
        F = self.F
        for k, a in enumerate(self.source.A.arrows):
            left = F.mul(self.source.maps[k], self.mats[a.target])
            right = F.mul(self.mats[a.source], self.target.maps[k])
            if not np.array_equal(left, right):
                return False
        return True

    def then(self, g: ModuleMap) -> ModuleMap:
        """The composite ``g o self``."""
        if g.source is not self.target and g.source.dims != self.target.dims:
            raise ValueError("maps are not composable")
        return ModuleMap(self.source, g.target, [self.F.mul(f, h) for f, h in zip(self.mats, g.mats)])

    def __add__(self, other: ModuleMap) -> ModuleMap:
        return ModuleMap(self.source, self.target, [self.F.red(x + y) for x, y in zip(self.mats, other.mats)])

    def __sub__(self, other: ModuleMap) -> ModuleMap:
        return ModuleMap(self.source, self.target, [self.F.red(x - y) for x, y in zip(self.mats, other.mats)])

    def scale(self, c) -> ModuleMap:
        return ModuleMap(self.source, self.target, [self.F.red(c * x) for x in self.mats])

    def is_zero(self) -> bool:
        return all(is_zero(x) for x in self.mats)

    def rank(self) -> int:
        return sum(rank(self.F, x) for x in self.mats)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dims == self.target.dims and self.is_injective()

    def inverse(self) -> ModuleMap:
        from .exactlin import inverse

        return ModuleMap(self.target, self.source, [inverse(self.F, x) for x in self.mats])

    def total_matrix(self) -> np.ndarray:
        return block_diag(self.F, self.mats)

    def equals(self, other: ModuleMap) -> bool:
        return all(np.array_equal(x, y) for x, y in zip(self.mats, other.mats))

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.dims} -> {self.target.dims})"


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """``g o f`` (apply ``f`` first)."""
    return f.then(g)


# -- constructors --------------------------------------------------------------


def from_literal(A: Algebra, lit: ModuleLiteral) -> Module:
    F = A.field
    maps = []
    for a in A.arrows:
        shape = (lit.dims[a.source], lit.dims[a.target])
        X = lit.maps.get(a.name)
        if X is None or X.size == 0:
            if X is not None and X.size == 0 and 0 not in shape:
                raise ValueError(f"arrow {a.name}: empty matrix for shape {shape}")
            maps.append(F.zeros(*shape))
        else:
            if X.shape != shape:
                raise ValueError(f"arrow {a.name}: expected shape {shape}, got {X.shape}")
            maps.append(X)
    return Module(A, lit.dims, maps, name=lit.name)


def _check_vertex(A: Algebra, i: int) -> None:
    if not 0 <= i < A.n:
        raise IndexError(f"vertex index {i} out of range 0..{A.n - 1}")


def projective(A: Algebra, i: int) -> Module:
    """``e_i A`` with its path basis, grouped by target vertex."""
    _check_vertex(A, i)
    F = A.field
    per = [A.basis_between.get((i, v), []) for v in range(A.n)]
    pos = {b: k for v in range(A.n) for k, b in enumerate(per[v])}
    maps = []
    for ai, a in enumerate(A.arrows):
        X = F.zeros(len(per[a.source]), len(per[a.target]))
        el = A.arrow_element(ai)
        for r, b in enumerate(per[a.source]):
            for k, c in A.mult_basis(b, el).items():
                X[r, pos[k]] = c
        maps.append(X)
    M = Module(A, [len(p) for p in per], maps, check=False, name=f"P({A.vertices[i]})")
    M.basis_paths = per
    return M


def simple(A: Algebra, i: int) -> Module:
    _check_vertex(A, i)
    F = A.field
    dims = [1 if v == i else 0 for v in range(A.n)]
    maps = [F.zeros(dims[a.source], dims[a.target]) for a in A.arrows]
    return Module(A, dims, maps, check=False, name=f"S({A.vertices[i]})")


def zero_module(A: Algebra) -> Module:
    return Module(A, [0] * A.n, [A.field.zeros(0, 0) for _ in A.arrows], check=False)


def dualize(M: Module) -> Module:
    """Vector-space dual, a module over the opposite algebra."""
    Aop = M.A.opposite()
    return Module(Aop, M.dims, [X.T.copy() for X in M.maps], check=False, name=f"D{M.name}" if M.name else None)


def dualize_map(f: ModuleMap, source: Module | None = None, target: Module | None = None) -> ModuleMap:
    """``D f: D N -> D M`` for ``f: M -> N``."""
    src = source if source is not None else dualize(f.target)
    tgt = target if target is not None else dualize(f.source)
    return ModuleMap(src, tgt, [X.T.copy() for X in f.mats])


def injective(A: Algebra, i: int) -> Module:
    """``D(A e_i)``, computed as the dual of a projective over the opposite algebra."""
    _check_vertex(A, i)
    M = dualize(projective(A.opposite(), i))
    M.name = f"I({A.vertices[i]})"
    return M


def direct_sum(mods: Sequence[Module]) -> tuple[Module, list[ModuleMap], list[ModuleMap]]:
    """Direct sum with its canonical inclusions and projections."""
    if not mods:
        raise ValueError("empty direct sum needs an algebra; use zero_module")
    A = mods[0].A
    F = A.field
    dims = [sum(m.dims[v] for m in mods) for v in range(A.n)]
    maps = [block_diag(F, [m.maps[k] for m in mods]) for k in range(len(A.arrows))]
    S = Module(A, dims, maps, check=False)
    incs, projs = [], []
    offs = [0] * A.n
    for m in mods:
        im, pm = [], []
        for v in range(A.n):
            X = F.zeros(m.dims[v], dims[v])
            for r in range(m.dims[v]):
                X[r, offs[v] + r] = F.one
            im.append(X)
            pm.append(X.T.copy())
            offs[v] += m.dims[v]
        incs.append(ModuleMap(m, S, im))
        projs.append(ModuleMap(S, m, pm))
    return S, incs, projs


def power(M: Module, d: int) -> Module:
    if d == 0:
        return zero_module(M.A)
    return direct_sum([M] * d)[0]


def map_matrix_sum(maps: Sequence[ModuleMap], source: Module, target: Module, axis: int) -> ModuleMap:
    """Block map out of a direct sum (axis 0) or into one (axis 1)."""
    F = source.F
    mats = []
    for v in range(source.n):
        if axis == 0:
            mats.append(vstack(F, [f.mats[v] for f in maps], target.dims[v]))
        else:
            mats.append(hstack(F, [f.mats[v] for f in maps], source.dims[v]))
    return ModuleMap(source, target, mats)


# -- sub and quotient modules ------------------------------------------------


def submodule(M: Module, spaces: Sequence[Subspace]) -> tuple[Module, ModuleMap]:
    """Submodule with the given per-vertex (echelon) spaces, plus its inclusion."""
    F = M.F
    maps = []
    for k, a in enumerate(M.A.arrows):
        Bu, Bw = spaces[a.source], spaces[a.target]
        img = F.mul(Bu.basis, M.maps[k])
        maps.append(img[:, Bw.pivots].copy() if Bw.pivots else F.zeros(Bu.dim, 0))
    S = Module(M.A, [s.dim for s in spaces], maps, check=False)
    inc = ModuleMap(S, M, [s.basis for s in spaces])
    return S, inc


def quotient(M: Module, spaces: Sequence[Subspace]) -> tuple[Module, ModuleMap]:
    """Quotient by the submodule with the given per-vertex spaces, plus the projection."""
    F = M.F
    Qs = [s.quotient_matrix() for s in spaces]
    Rs = [s.complement_basis() for s in spaces]
    maps = []
    for k, a in enumerate(M.A.arrows):
        maps.append(F.mul(F.mul(Rs[a.source], M.maps[k]), Qs[a.target]))
    Qm = Module(M.A, [s.codim for s in spaces], maps, check=False)
    return Qm, ModuleMap(M, Qm, Qs)


def generated_spaces(M: Module, gens: Sequence[tuple[int, np.ndarray]]) -> list[Subspace]:
    """Per-vertex spaces of the submodule generated by ``(vertex, vector)`` pairs."""
    F = M.F
    rows: list[list[np.ndarray]] = [[] for _ in range(M.n)]
    A = M.A
    by_vertex: dict[int, list[np.ndarray]] = {}
    for v, g in gens:
        by_vertex.setdefault(v, []).append(g)
    for v, gs in by_vertex.items():
        G = np.vstack([g.reshape(1, -1) for g in gs])
        for b in A.basis_from[v]:
            t = A.basis[b][1]
            if M.dims[t]:
                rows[t].append(F.mul(G, M.act(b)))
    return [Subspace(F, M.dims[v], np.vstack(rows[v]) if rows[v] else None) for v in range(M.n)]


def kernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    F = f.F
    spaces = [Subspace(F, f.source.dims[v], left_kernel(F, X), reduced=True) for v, X in enumerate(f.mats)]
    return submodule(f.source, spaces)


def image_spaces(f: ModuleMap) -> list[Subspace]:
    return [Subspace(f.F, f.target.dims[v], X) for v, X in enumerate(f.mats)]


def image(f: ModuleMap) -> tuple[Module, ModuleMap]:
    return submodule(f.target, image_spaces(f))


def cokernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    return quotient(f.target, image_spaces(f))


def restrict(f: ModuleMap, inc: ModuleMap) -> ModuleMap:
    """``f`` precomposed with an inclusion."""
    return inc.then(f)


def corestrict(f: ModuleMap, inc: ModuleMap) -> ModuleMap:
    """Factor ``f`` through an inclusion whose image contains ``im f``."""
    F = f.F
    mats = []
    for v, X in enumerate(f.mats):
        B = inc.mats[v]
        if B.shape[0] == 0:
            mats.append(F.zeros(X.shape[0], 0))
            continue
        res = solve_left(F, B, X)
        if res is None:
            raise ValueError("map does not factor through the inclusion")
        mats.append(res[0])
    return ModuleMap(f.source, inc.source, mats)


def radical_spaces(M: Module) -> list[Subspace]:
    F = M.F
    rows: list[list[np.ndarray]] = [[] for _ in range(M.n)]
    for k, a in enumerate(M.A.arrows):
        if M.dims[a.source] and M.dims[a.target]:
            rows[a.target].append(M.maps[k])
    return [Subspace(F, M.dims[v], np.vstack(rows[v]) if rows[v] else None) for v in range(M.n)]


def radical(M: Module) -> tuple[Module, ModuleMap]:
    return submodule(M, radical_spaces(M))


def top(M: Module) -> tuple[Module, ModuleMap]:
    return quotient(M, radical_spaces(M))


def socle_spaces(M: Module) -> list[Subspace]:
    F = M.F
    out = []
    for v in range(M.n):
        outgoing = [M.maps[k] for k, a in enumerate(M.A.arrows) if a.source == v]
        if outgoing and M.dims[v]:
            joint = hstack(F, outgoing, M.dims[v])
            out.append(Subspace(F, M.dims[v], left_kernel(F, joint), reduced=True))
        else:
            out.append(Subspace.full(F, M.dims[v]))
    return out


def socle(M: Module) -> tuple[Module, ModuleMap]:
    return submodule(M, socle_spaces(M))


def top_dims(M: Module) -> list[int]:
    return [s.codim for s in radical_spaces(M)]


def loewy_length(M: Module) -> int:
    cur = M
    k = 0
    while cur.dim:
        cur = radical(cur)[0]
        k += 1
    return k


# -- projective presentations and Hom -----------------------------------------


class Presentation:
    """Projective cover ``P0 -> M`` with the syzygy ``Omega M``.

    ``gens[k] = (vertex, vector)`` are top generators of ``M``; the cover
    ``P0 = sum_k e_{i_k} A`` has at vertex ``v`` the basis ``(k, b)`` with
    ``b`` a basis path from ``i_k`` to ``v``.
    """

    def __init__(self, M: Module):
        self.M = M
        F = M.F
        A = M.A
        gens = []
        for v, rad in enumerate(radical_spaces(M)):
            for c in rad.nonpivots:
                g = F.zero_vector(M.dims[v])
                g[c] = F.one
                gens.append((v, g))
        self.gens = gens
        self.cover_basis: list[list[tuple[int, int]]] = [[] for _ in range(A.n)]
        for k, (i, _) in enumerate(gens):
            for b in A.basis_from[i]:
                self.cover_basis[A.basis[b][1]].append((k, b))
        self.cover_pos = [{kb: r for r, kb in enumerate(cb)} for cb in self.cover_basis]
        cover_dims = [len(cb) for cb in self.cover_basis]
        maps = []
        for ai, a in enumerate(A.arrows):
            X = F.zeros(cover_dims[a.source], cover_dims[a.target])
            el = A.arrow_element(ai)
            pos = self.cover_pos[a.target]
            for r, (k, b) in enumerate(self.cover_basis[a.source]):
                for bb, c in A.mult_basis(b, el).items():
                    X[r, pos[(k, bb)]] = c
            maps.append(X)
        self.cover = Module(A, cover_dims, maps, check=False)
        pi = []
        for v in range(A.n):
            rows = [F.mul(gens[k][1].reshape(1, -1), M.act(b)) for k, b in self.cover_basis[v]]
            pi.append(vstack(F, rows, M.dims[v]))
        self.pi = ModuleMap(self.cover, M, pi)
        self.section = []
        for v in range(A.n):
            if M.dims[v] == 0:
                self.section.append(F.zeros(0, cover_dims[v]))
                continue
            res = solve_left(F, pi[v], F.eye(M.dims[v]))
            assert res is not None, "cover is not surjective"
            self.section.append(res[0])
        self._omega: tuple[Module, ModuleMap] | None = None
        self._syz: list[tuple[int, np.ndarray]] | None = None

    @property
    def omega(self) -> Module:
        return self.omega_pair[0]

    @property
    def omega_inclusion(self) -> ModuleMap:
        return self.omega_pair[1]

    @property
    def omega_pair(self) -> tuple[Module, ModuleMap]:
        if self._omega is None:
            self._omega = kernel(self.pi)
        return self._omega

    @property
    def syzygy_generators(self) -> list[tuple[int, np.ndarray]]:
        """Top generators of ``Omega M`` as vectors of the cover."""
        if self._syz is None:
            Om, inc = self.omega_pair
            self._syz = [(v, self.M.F.mul(g.reshape(1, -1), inc.mats[v]).reshape(-1)) for v, g in Om.presentation().gens]
        return self._syz

    def gen_offsets(self, N: Module) -> list[int]:
        out, acc = [], 0
        for i, _ in self.gens:
            out.append(acc)
            acc += N.dims[i]
        return out

    def constraint_matrix(self, N: Module) -> np.ndarray:
        """``Z`` with ``Hom(M, N) = {x : x Z = 0}``; ``x`` lists the images of the generators."""
        F = self.M.F
        offs = self.gen_offsets(N)
        nrows = sum(N.dims[i] for i, _ in self.gens)
        cols = []
        for v, z in self.syzygy_generators:
            block = F.zeros(nrows, N.dims[v])
            if N.dims[v]:
                for r in np.nonzero(z)[0]:
                    k, b = self.cover_basis[v][r]
                    i = self.gens[k][0]
                    if N.dims[i]:
                        block[offs[k] : offs[k] + N.dims[i]] += z[r] * N.act(b)
                block = F.red(block)
            cols.append(block)
        return hstack(F, cols, nrows)

    def map_from_values(self, N: Module, x: np.ndarray) -> ModuleMap:
        """The map sending generator ``k`` to the ``k``-th block of ``x``."""
        F = self.M.F
        offs = self.gen_offsets(N)
        mats = []
        for v in range(self.M.n):
            rows = []
            for k, b in self.cover_basis[v]:
                i = self.gens[k][0]
                xk = x[offs[k] : offs[k] + N.dims[i]].reshape(1, -1)
                rows.append(F.mul(xk, N.act(b)) if N.dims[i] else F.zeros(1, N.dims[v]))
            G = vstack(F, rows, N.dims[v])
            mats.append(F.mul(self.section[v], G))
        return ModuleMap(self.M, N, mats)

    def values_of(self, f: ModuleMap) -> np.ndarray:
        F = self.M.F
        parts = [F.mul(g.reshape(1, -1), f.mats[i]).reshape(-1) for i, g in self.gens]
        if not parts:
            return F.zero_vector(0)
        return np.concatenate(parts)

    def cover_map_from_values(self, N: Module, x: np.ndarray) -> ModuleMap:
        """The map ``P0 -> N`` sending generator ``k`` to the ``k``-th block of ``x``."""
        F = self.M.F
        offs = self.gen_offsets(N)
        mats = []
        for v in range(self.M.n):
            rows = []
            for k, b in self.cover_basis[v]:
                i = self.gens[k][0]
                xk = x[offs[k] : offs[k] + N.dims[i]].reshape(1, -1)
                rows.append(F.mul(xk, N.act(b)) if N.dims[i] else F.zeros(1, N.dims[v]))
            mats.append(vstack(F, rows, N.dims[v]))
        return ModuleMap(self.cover, N, mats)


class HomSpace:
    """``Hom(M, N)`` with a canonical basis (echelon rows of generator images)."""

    def __init__(self, M: Module, N: Module):
        if M.A is not N.A:
            raise AlgebraMismatch("modules over different algebras")
        self.M, self.N = M, N
        F = M.F
        self.pres = M.presentation()
        width = sum(N.dims[i] for i, _ in self.pres.gens)
        if width == 0:
            self.space = Subspace(F, 0)
        else:
            Z = self.pres.constraint_matrix(N)
            if Z.shape[1] == 0:
                self.space = Subspace.full(F, width)
            else:
                self.space = Subspace(F, width, left_kernel(F, Z), reduced=True)
        self._maps: list[ModuleMap] | None = None

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> list[ModuleMap]:
        if self._maps is None:
            self._maps = [self.pres.map_from_values(self.N, x) for x in self.space.basis]
        return self._maps

    def coords(self, f: ModuleMap) -> np.ndarray:
        return self.space.coords(self.pres.values_of(f))

    def element(self, c: Sequence) -> ModuleMap:
        F = self.M.F
        c = np.asarray(list(c), dtype=object).reshape(1, -1)
        x = F.mul(c, self.space.basis).reshape(-1) if self.dim else F.zero_vector(self.space.n)
        return self.pres.map_from_values(self.N, x)

    def random_element(self, rng: random.Random, bound: int = 5) -> ModuleMap:
        F = self.M.F
        return self.element([F(rng.randint(-bound, bound)) for _ in range(self.dim)])


def hom(M: Module, N: Module) -> list[ModuleMap]:
    return HomSpace(M, N).basis


def hom_dim(M: Module, N: Module) -> int:
    return HomSpace(M, N).dim


# -- endomorphism rings, radical, decomposition --------------------------------


def _flat(f: ModuleMap) -> np.ndarray:
    parts = [x.reshape(-1) for x in f.mats]
    return np.concatenate(parts) if parts else np.empty(0, dtype=object)


def _flat_t(f: ModuleMap) -> np.ndarray:
    parts = [x.T.reshape(-1) for x in f.mats]
    return np.concatenate(parts) if parts else np.empty(0, dtype=object)


def is_nilpotent(f: ModuleMap) -> bool:
    F = f.F
    mats = [x for x in f.mats if x.shape[0]]
    n = sum(x.shape[0] for x in mats)
    k = 1
    while k < n:
        mats = [F.mul(x, x) for x in mats]
        k *= 2
    return all(is_zero(x) for x in mats)


def map_power(f: ModuleMap, e: int) -> ModuleMap:
    F = f.F
    mats = [F.eye(x.shape[0]) for x in f.mats]
    base = list(f.mats)
    while e:
        if e & 1:
            mats = [F.mul(a, b) for a, b in zip(mats, base)]
        base = [F.mul(b, b) for b in base]
        e >>= 1
    return ModuleMap(f.source, f.target, mats)


class EndAlgebra:
    """``End(M)`` with structure data: composition table and Jacobson radical."""

    def __init__(self, M: Module):
        self.M = M
        self.F = M.F
        self.hom = HomSpace(M, M)
        self.basis = self.hom.basis
        self._rad: Subspace | None = None

    @property
    def dim(self) -> int:
        return self.hom.dim

    def coords(self, f: ModuleMap) -> np.ndarray:
        return self.hom.coords(f)

    def element(self, c) -> ModuleMap:
        return self.hom.element(c)

    @property
    def radical(self) -> Subspace:
        """Jacobson radical in basis coordinates."""
        if self._rad is None:
            self._rad = self._compute_radical()
        return self._rad

    def _compute_radical(self) -> Subspace:
        F = self.F
        e = self.dim
        if e == 0:
            return Subspace(F, 0)
        n = self.M.dim
        if F.p is None or F.p > n:
            U = np.vstack([_flat(f).reshape(1, -1) for f in self.basis])
            W = np.vstack([_flat_t(f).reshape(1, -1) for f in self.basis])
            G = F.mul(U, W.T)
            return Subspace(F, e, kernel_basis(F, G), reduced=True)
        return self._radical_modular()

    def _radical_modular(self) -> Subspace:
        """Radical in characteristic ``p <= dim M`` via p-power trace functionals."""
        F = self.F
        p = F.p
        n = self.M.dim
        e = self.dim
        current = F.eye(e)  # rows: coordinates of a basis of the current ideal
        i = 0
        while p ** i <= n and current.shape[0]:
            mod = p ** (i + 1)
            elems = [self.element(c) for c in current]
            table = F.zeros(len(elems), e)
            for r, a in enumerate(elems):
                for c, b in enumerate(self.basis):
                    ab = a.then(b)
                    table[r, c] = _power_trace(ab, p ** i, mod) // (p ** i) % p
            K = left_kernel(F, table)
            current = F.mul(K, current) if K.shape[0] else F.zeros(0, e)
            i += 1
        return Subspace(F, e, current if current.shape[0] else None)

    def is_local(self) -> bool:
        return local_status(self) == "local"


def _power_trace(f: ModuleMap, e: int, mod: int) -> int:
    """Trace of the integer lift of ``f`` raised to ``e``, modulo ``mod``."""
    total = 0
    wide = mod * mod * max((X.shape[0] for X in f.mats), default=1) >= 2**62
    dtype = object if wide else np.int64
    for X in f.mats:
        if X.shape[0] == 0:
            continue
        base = np.array([[int(x) % mod for x in row] for row in X], dtype=dtype)
        R = np.eye(base.shape[0], dtype=np.int64).astype(dtype)
        k = e
        while k:
            if k & 1:
                R = (R @ base) % mod
            base = (base @ base) % mod
            k >>= 1
        total += int(np.trace(R))
    return total % mod


def _squarefree_factors(F: Field, f: ModuleMap) -> list[tuple[list, int]]:
    return factor_poly(F, min_poly(F, f.mats))


def _candidates(E: EndAlgebra, rng: random.Random, budget: int):
    """Deterministic stream of endomorphisms used to search for splittings."""
    F = E.F
    basis = E.basis
    rad = E.radical
    keep = [k for k in range(E.dim) if k not in set(rad.pivots)] if rad.dim else list(range(E.dim))
    for k in keep:
        yield basis[k]
    for a in keep:
        for b in keep:
            if a < b:
                yield basis[a] + basis[b]
                yield basis[a].then(basis[b])
    for _ in range(budget):
        yield E.element([F(rng.randint(-4, 4)) for _ in range(E.dim)])


def _split_by(f: ModuleMap) -> list[list[Subspace]] | None:
    """Generalized eigenspace decomposition of ``f`` if it has two coprime factors."""
    F = f.F
    factors = _squarefree_factors(F, f)
    if len(factors) < 2:
        return None
    pieces = []
    for poly, mult in factors:
        P = poly_eval(F, poly_pow(F, poly, mult), f.mats)
        pieces.append([Subspace(F, X.shape[0], left_kernel(F, X), reduced=True) for X in P])
    return pieces


def local_status(E: EndAlgebra, budget: int = 40, seed: int = DEFAULT_SEED) -> str:
    """``'local'``, ``'split'`` or ``'unknown'``."""
    if E.dim == 0:
        return "split"  # the zero module is not indecomposable
    return _find_split(E, budget, seed)[0]


def _find_split(E: EndAlgebra, budget: int, seed: int):
    F = E.F
    rad = E.radical
    sdim = E.dim - rad.dim
    if sdim == 1:
        return "local", None
    rng = random.Random(seed)
    commutative = _quotient_commutative(E)
    for f in _candidates(E, rng, budget):
        pieces = _split_by(f)
        if pieces is not None:
            return "split", pieces
        if commutative:
            fac = _squarefree_factors(F, f)
            if len(fac) == 1 and len(fac[0][0]) - 1 == sdim:
                return "local", None
    for f in _annihilator_candidates(E, rng):
        pieces = _split_by(f)
        if pieces is not None:
            return "split", pieces
    return "unknown", None


def _quotient_commutative(E: EndAlgebra) -> bool:
    rad = E.radical
    basis = E.basis
    keep = [k for k in range(E.dim) if k not in set(rad.pivots)]
    for a in keep:
        for b in keep:
            if a < b:
                comm = basis[a].then(basis[b]) - basis[b].then(basis[a])
                if not rad.contains(E.coords(comm)):
                    return False
    return True


def _annihilator_candidates(E: EndAlgebra, rng: random.Random):
    """Endomorphisms killing a chosen element; they are zero divisors when nonzero."""
    F = E.F
    M = E.M
    for v in range(M.n):
        for c in range(M.dims[v]):
            table = vstack(F, [f.mats[v][c].reshape(1, -1) for f in E.basis], M.dims[v])
            K = left_kernel(F, table)
            for row in K:
                yield E.element(row)
            if K.shape[0] > 1:
                for _ in range(4):
                    coeff = [F(rng.randint(-3, 3)) for _ in range(K.shape[0])]
                    yield E.element(F.mul(np.array(coeff, dtype=object).reshape(1, -1), K).reshape(-1))


@dataclass
class Decomposition:
    """``M = sum_k image(inclusions[k])`` with ``summands[k]`` indecomposable.

    ``classes[k]`` groups isomorphic summands; ``multiplicities`` lists one
    representative index per class with its count.
    """

    module: Module
    summands: list[Module]
    inclusions: list[ModuleMap]
    projections: list[ModuleMap]
    classes: list[int]

    @property
    def multiplicities(self) -> list[tuple[int, int]]:
        out: dict[int, int] = {}
        for c in self.classes:
            out[c] = out.get(c, 0) + 1
        return sorted(out.items())

    def verify(self) -> bool:
        F = self.module.F
        M = self.module
        for v in range(M.n):
            inc = vstack(F, [f.mats[v] for f in self.inclusions], M.dims[v])
            proj = hstack(F, [p.mats[v] for p in self.projections], M.dims[v])
            if not np.array_equal(F.mul(inc, proj), F.eye(inc.shape[0])):
                return False
            if not np.array_equal(F.mul(proj, inc), F.eye(M.dims[v])):
                return False
        return all(f.is_homomorphism() for f in self.inclusions + self.projections)


def decompose(M: Module, budget: int = 40, seed: int = DEFAULT_SEED) -> Decomposition:
    """Krull-Schmidt decomposition with explicit inclusions and projections."""
    F = M.F
    pieces: list[tuple[Module, ModuleMap]] = []
    stack = [(M, ModuleMap.identity(M))]
    while stack:
        X, inc = stack.pop()
        if X.dim == 0:
            continue
        E = EndAlgebra(X)
        status, split = _find_split(E, budget, seed)
        if status == "local":
            pieces.append((X, inc))
            continue
        if status == "unknown":
            raise DecompositionError(f"could not split or certify locality for a module with dims {X.dims}")
        for spaces in reversed(split):
            Y, j = submodule(X, spaces)
            stack.append((Y, j.then(inc)))
    pieces.sort(key=lambda t: _summand_key(t[0], t[1]))
    summands = [p[0] for p in pieces]
    inclusions = [p[1] for p in pieces]
    projections = []
    total = [vstack(F, [f.mats[v] for f in inclusions], M.dims[v]) for v in range(M.n)]
    from .exactlin import inverse

    inv = [inverse(F, T) if T.shape[0] else F.zeros(0, 0) for T in total]
    offs = [0] * M.n
    for Y in summands:
        mats = []
        for v in range(M.n):
            mats.append(inv[v][:, offs[v] : offs[v] + Y.dims[v]].copy())
            offs[v] += Y.dims[v]
        projections.append(ModuleMap(M, Y, mats))
    classes: list[int] = []
    for k, Y in enumerate(summands):
        cls = k
        for j in range(k):
            if classes[j] == j and _indecomposables_isomorphic(summands[j], Y):
                cls = j
                break
        classes.append(cls)
    return Decomposition(M, summands, inclusions, projections, classes)


def _summand_key(Y: Module, inc: ModuleMap):
    F = Y.F
    return (Y.dims, [tuple(F.to_fraction(x) for x in X.reshape(-1)) for X in inc.mats])


def _indecomposables_isomorphic(X: Module, Y: Module) -> bool:
    if X.dims != Y.dims:
        return False
    fs = hom(X, Y)
    if not fs:
        return False
    gs = hom(Y, X)
    for f in fs:
        for g in gs:
            if not is_nilpotent(f.then(g)):
                return True
    return False


def is_indecomposable(M: Module) -> bool:
    if M.dim == 0:
        return False
    status = local_status(EndAlgebra(M))
    if status == "unknown":
        raise DecompositionError("locality of End(M) undecided")
    return status == "local"


def is_brick(M: Module) -> bool:
    """End(M) is a division ring: local with zero radical."""
    if M.dim == 0:
        return False
    E = EndAlgebra(M)
    if E.radical.dim:
        return False
    return local_status(E) == "local"


def is_isomorphic(M: Module, N: Module, seed: int = DEFAULT_SEED, tries: int | None = None) -> bool:
    if M.A is not N.A or M.dims != N.dims:
        return False
    if tries is None:
        # random maps are rarely invertible over tiny fields, so sample more before decomposing
        tries = 3 if M.F.p is None or M.F.p > 7 else 16
    if M.dim == 0:
        return True
    if top_dims(M) != top_dims(N) or [s.dim for s in socle_spaces(M)] != [s.dim for s in socle_spaces(N)]:
        return False
    H = HomSpace(M, N)
    if H.dim == 0:
        return False
    rng = random.Random(seed)
    for _ in range(min(tries, 3)):
        if H.random_element(rng).is_iso():
            return True
    end_dim = HomSpace(M, M).dim
    if end_dim != H.dim or end_dim != HomSpace(N, N).dim or end_dim != HomSpace(N, M).dim:
        return False
    for _ in range(tries - min(tries, 3)):
        if H.random_element(rng).is_iso():
            return True
    dm, dn = decompose(M), decompose(N)
    return _same_multiset(dm, dn)


def _same_multiset(dm: Decomposition, dn: Decomposition) -> bool:
    left = [(dm.summands[c], m) for c, m in dm.multiplicities]
    right = [(dn.summands[c], m) for c, m in dn.multiplicities]
    if len(left) != len(right):
        return False
    used = [False] * len(right)
    for X, m in left:
        for j, (Y, mm) in enumerate(right):
            if not used[j] and mm == m and _indecomposables_isomorphic(X, Y):
                used[j] = True
                break
        else:
            return False
    return True


def find_isomorphism(M: Module, N: Module, seed: int = DEFAULT_SEED, tries: int = 8) -> ModuleMap | None:
    """An explicit isomorphism when one is found by random search."""
    if M.dims != N.dims:
        return None
    if M.dim == 0:
        return ModuleMap.zero(M, N)
    H = HomSpace(M, N)
    rng = random.Random(seed)
    for k in range(H.dim):
        if H.basis[k].is_iso():
            return H.basis[k]
    for _ in range(tries):
        f = H.random_element(rng)
        if f.is_iso():
            return f
    return None


# -- minimal morphisms ---------------------------------------------------------


def fitting_split(r: ModuleMap) -> tuple[list[Subspace], list[Subspace]]:
    """``X = image(r^N) + kernel(r^N)`` for an endomorphism ``r`` of ``X``."""
    F = r.F
    X = r.source
    rN = map_power(r, max(X.dim, 1))
    im = [Subspace(F, X.dims[v], m) for v, m in enumerate(rN.mats)]
    ker = [Subspace(F, X.dims[v], left_kernel(F, m), reduced=True) for v, m in enumerate(rN.mats)]
    return im, ker


def _non_nilpotent_in(E: EndAlgebra, ideal_rows: np.ndarray, rng: random.Random, tries: int = 12) -> ModuleMap | None:
    F = E.F
    for row in ideal_rows:
        f = E.element(row)
        if not is_nilpotent(f):
            return f
    for _ in range(tries):
        coeff = np.array([F(rng.randint(-4, 4)) for _ in range(ideal_rows.shape[0])], dtype=object).reshape(1, -1)
        f = E.element(F.mul(coeff, ideal_rows).reshape(-1))
        if not is_nilpotent(f):
            return f
    for a in ideal_rows:
        for b in E.basis:
            f = E.element(a).then(b)
            if not is_nilpotent(f):
                return f
            f = b.then(E.element(a))
            if not is_nilpotent(f):
                return f
    return None


def right_minimal(f: ModuleMap, seed: int = DEFAULT_SEED) -> tuple[ModuleMap, ModuleMap, ModuleMap]:
    """Split the source of ``f`` as ``X' + X''`` with ``f`` zero on ``X'``.

    Returns ``(f'', incl'', incl')`` where ``f'' = f o incl''`` is right
    minimal and ``incl'`` embeds the discarded summand.
    """
    F = f.F
    X = f.source
    rng = random.Random(seed)
    inc = ModuleMap.identity(X)
    dropped: list[ModuleMap] = []
    cur = f
    while cur.source.dim:
        E = EndAlgebra(cur.source)
        H = HomSpace(cur.source, cur.target)
        cols = [H.pres.values_of(phi.then(cur)) for phi in E.basis]
        if not cols or cols[0].size == 0:
            ideal = F.eye(E.dim)
        else:
            T = np.vstack([c.reshape(1, -1) for c in cols])
            ideal = left_kernel(F, T)
        if ideal.shape[0] == 0 or all(E.radical.contains(r) for r in ideal):
            break
        r = _non_nilpotent_in(E, ideal, rng)
        if r is None:
            raise DecompositionError("no non-nilpotent element in a non-radical right ideal")
        im, ker = fitting_split(r)
        Y, jy = submodule(cur.source, im)
        Z, jz = submodule(cur.source, ker)
        dropped.append(jy.then(inc))
        inc = jz.then(inc)
        cur = jz.then(cur)
    if dropped:
        D, incs, _ = direct_sum([d.source for d in dropped])
        drop = map_matrix_sum(dropped, D, X, axis=0)
    else:
        drop = ModuleMap.zero(zero_module(X.A), X)
    return cur, inc, drop


def left_minimal(f: ModuleMap, seed: int = DEFAULT_SEED) -> tuple[ModuleMap, ModuleMap, ModuleMap]:
    """Dual of :func:`right_minimal`: ``(f'', proj'', proj')`` with ``f'' = proj'' o f``."""
    F = f.F
    X = f.target
    rng = random.Random(seed)
    proj = ModuleMap.identity(X)
    dropped: list[ModuleMap] = []
    cur = f
    while cur.target.dim:
        E = EndAlgebra(cur.target)
        S = cur.source
        if S.dim == 0:
            ideal = F.eye(E.dim)
        else:
            T = np.vstack([_flat(cur.then(phi)).reshape(1, -1) for phi in E.basis]) if E.dim else F.zeros(0, 0)
            ideal = left_kernel(F, T) if T.shape[1] else F.eye(E.dim)
        if ideal.shape[0] == 0 or all(E.radical.contains(r) for r in ideal):
            break
        r = _non_nilpotent_in(E, ideal, rng)
        if r is None:
            raise DecompositionError("no non-nilpotent element in a non-radical left ideal")
        im, ker = fitting_split(r)
        # cur lands in ker(r^N); project along image(r^N)
        Y = cur.target
        Zm, jz = submodule(Y, ker)
        Im, jy = submodule(Y, im)
        total = [vstack(F, [jz.mats[v], jy.mats[v]], Y.dims[v]) for v in range(Y.n)]
        from .exactlin import inverse

        inv = [inverse(F, t) if t.shape[0] else F.zeros(0, 0) for t in total]
        pz = ModuleMap(Y, Zm, [inv[v][:, : Zm.dims[v]].copy() for v in range(Y.n)])
        py = ModuleMap(Y, Im, [inv[v][:, Zm.dims[v] :].copy() for v in range(Y.n)])
        dropped.append(proj.then(py))
        proj = proj.then(pz)
        cur = cur.then(pz)
    if dropped:
        D, _, _ = direct_sum([d.target for d in dropped])
        drop = map_matrix_sum(dropped, X, D, axis=1)
    else:
        drop = ModuleMap.zero(X, zero_module(X.A))
    return cur, proj, drop


def is_right_minimal(f: ModuleMap) -> bool:
    return right_minimal(f)[0].source.dims == f.source.dims


def proj_cover(M: Module) -> ModuleMap:
    return M.presentation().pi


def proj_presentation(M: Module) -> tuple[ModuleMap, ModuleMap]:
    """``P1 -> P0 -> M`` with both maps minimal."""
    pres = M.presentation()
    Om, inc = pres.omega_pair
    cov = proj_cover(Om)
    return cov.then(inc), pres.pi


def syzygy(M: Module, k: int = 1) -> Module:
    X = M
    for _ in range(k):
        X = X.presentation().omega
    return X


def random_module_map(H: HomSpace, rng: random.Random) -> ModuleMap:
    return H.random_element(rng)


def minimal_left_approximation(X: Module, summands: Sequence[Module]) -> ModuleMap:
    """Left minimal ``add(summands)``-approximation of ``X``.

    The summands must be indecomposable and pairwise non-isomorphic.  For each
    summand ``W`` the chosen maps ``X -> W`` span a complement of the maps that
    factor through a radical map between summands.
    """
    F = X.F
    homs = [HomSpace(X, W) for W in summands]
    ends = [EndAlgebra(W) for W in summands]
    chosen: list[ModuleMap] = []
    targets: list[Module] = []
    for k, W in enumerate(summands):
        Hk = homs[k]
        if Hk.dim == 0:
            continue
        rows = []
        for j, Wj in enumerate(summands):
            if homs[j].dim == 0:
                continue
            if j == k:
                rad = [ends[k].element(c) for c in ends[k].radical.basis]
            else:
                rad = HomSpace(Wj, W).basis
            for g in homs[j].basis:
                for r in rad:
                    rows.append(Hk.coords(g.then(r)).reshape(1, -1))
        span = Subspace(F, Hk.dim)
        if rows:
            span = span.add(np.vstack(rows))
        for c in range(Hk.dim):
            e = F.zero_vector(Hk.dim)
            e[c] = F.one
            if span.contains(e):
                continue
            span = span.add(e.reshape(1, -1))
            chosen.append(Hk.basis[c])
            targets.append(W)
    if not chosen:
        return ModuleMap.zero(X, zero_module(X.A))
    S, _, _ = direct_sum(targets)
    return map_matrix_sum(chosen, X, S, axis=1)
