"""First extension groups, conflations and universal (co)extensions.

An extension class in ``Ext^1(M, N)`` is represented by a map
``Omega M -> N`` out of the first syzygy of the minimal projective cover
``P0 -> M``, recorded as its values ``y`` on the top generators of
``Omega M``.  Cocycles are all such maps, coboundaries are restrictions of
maps ``P0 -> N``, and the canonical form of a class is its reduction
modulo the coboundaries.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .exactlin import Subspace, is_zero, left_kernel, rank, solve_left, vstack
from .module import (
    HomSpace,
    Module,
    ModuleMap,
    corestrict,
    direct_sum,
    dualize,
    dualize_map,
    image_spaces,
    is_brick,
    is_indecomposable,
    kernel,
    power,
    quotient,
    zero_module,
)


def hom_space(M: Module, N: Module) -> HomSpace:
    cache = M.__dict__.setdefault("_hom_cache", {})
    hit = cache.get(id(N))
    if hit is None or hit[0] is not N:
        hit = (N, HomSpace(M, N))
        cache[id(N)] = hit
    return hit[1]


class ExtSpace:
    """``Ext^1(M, N)`` with a canonical basis."""

    def __init__(self, M: Module, N: Module):
        if M.A is not N.A:
            raise ValueError("modules over different algebras")
        F = M.F
        self.M, self.N, self.F = M, N, F
        self.pres = M.presentation()
        self.omega = self.pres.omega
        self.omega_pres = self.omega.presentation()
        self.blocks = [N.dims[v] for v, _ in self.omega_pres.gens]
        self.width = sum(self.blocks)
        w = self.width
        if w == 0:
            cocycles = F.zeros(0, 0)
            self.coboundaries = Subspace(F, 0)
        else:
            Z2 = self.omega_pres.constraint_matrix(N)
            cocycles = left_kernel(F, Z2) if Z2.shape[1] else F.eye(w)
            Z = self.pres.constraint_matrix(N)
            self.coboundaries = Subspace(F, w, Z if Z.shape[0] else None)
        self.cocycles = Subspace(F, w, cocycles if cocycles.shape[0] else None, reduced=True)
        reduced = self.coboundaries.reduce(self.cocycles.basis) if self.cocycles.dim else F.zeros(0, w)
        self.basis_space = Subspace(F, w, reduced if reduced.shape[0] else None)

    @property
    def dim(self) -> int:
        return self.basis_space.dim

    @property
    def basis(self) -> np.ndarray:
        """Canonical cocycle representatives, one row per basis class."""
        return self.basis_space.basis

    def canonical(self, y: np.ndarray) -> np.ndarray:
        return self.coboundaries.reduce(y)

    def coords(self, y: np.ndarray) -> np.ndarray:
        return self.basis_space.coords(self.canonical(y))

    def from_coords(self, c: Sequence) -> np.ndarray:
        F = self.F
        c = np.asarray(list(c), dtype=object).reshape(1, -1)
        if self.dim == 0:
            return F.zero_vector(self.width)
        return F.mul(c, self.basis).reshape(-1)

    def is_cocycle(self, y: np.ndarray) -> bool:
        return self.cocycles.contains(y)

    def is_zero_class(self, y: np.ndarray) -> bool:
        return is_zero(self.canonical(y))

    def map_of(self, y: np.ndarray) -> ModuleMap:
        """The map ``Omega M -> N`` with generator values ``y``."""
        return self.omega_pres.map_from_values(self.N, y)

    def blocks_of(self, y: np.ndarray) -> list[np.ndarray]:
        out, acc = [], 0
        for b in self.blocks:
            out.append(y[acc : acc + b])
            acc += b
        return out

    def push(self, y: np.ndarray, g: ModuleMap) -> np.ndarray:
        """Values of ``g o y`` for ``g: N -> N'``."""
        F = self.F
        parts = []
        for (v, _), blk in zip(self.omega_pres.gens, self.blocks_of(y)):
            parts.append(F.mul(blk.reshape(1, -1), g.mats[v]).reshape(-1) if blk.size else F.zero_vector(g.target.dims[v]))
        return np.concatenate(parts) if parts else F.zero_vector(0)

    def realize(self, y: np.ndarray) -> Conflation:
        return realize_values(self.M, self.N, y)


def ext_space(M: Module, N: Module) -> ExtSpace:
    cache = M.__dict__.setdefault("_ext_cache", {})
    hit = cache.get(id(N))
    if hit is None or hit[0] is not N:
        hit = (N, ExtSpace(M, N))
        cache[id(N)] = hit
    return hit[1]


def ext1(M: Module, N: Module) -> ExtSpace:
    return ext_space(M, N)


def ext1_dim(M: Module, N: Module) -> int:
    """From ``0 -> Hom(M, N) -> Hom(P0, N) -> Hom(Omega M, N) -> Ext^1(M, N) -> 0``."""
    hit = M.__dict__.get("_ext_cache", {}).get(id(N))
    if hit is not None and hit[0] is N:
        return hit[1].dim
    pres = M.presentation()
    cover_hom = sum(N.dims[i] for i, _ in pres.gens)
    return hom_space(pres.omega, N).dim - cover_hom + hom_space(M, N).dim


@dataclass
class Conflation:
    """A short exact sequence ``K -> E -> M``."""

    K: Module
    E: Module
    M: Module
    incl: ModuleMap
    proj: ModuleMap

    def verify(self) -> bool:
        if not (self.incl.is_homomorphism() and self.proj.is_homomorphism()):
            return False
        if not (self.incl.is_injective() and self.proj.is_surjective()):
            return False
        if not self.incl.then(self.proj).is_zero():
            return False
        return all(self.E.dims[v] == self.K.dims[v] + self.M.dims[v] for v in range(self.E.n))

    def is_split(self) -> bool:
        """Search for a retraction of the inclusion by linear algebra."""
        F = self.E.F
        if self.K.dim == 0 or self.M.dim == 0:
            return True
        H = hom_space(self.E, self.K)
        if H.dim == 0:
            return False
        target = np.concatenate([F.eye(d).reshape(-1) for d in self.K.dims])
        rows = [np.concatenate([m.reshape(-1) for m in self.incl.then(r).mats]).reshape(1, -1) for r in H.basis]
        T = np.vstack(rows)
        return solve_left(F, T, target.reshape(1, -1)) is not None

    def class_values(self) -> np.ndarray:
        return classify(self)

    def dim_vectors(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return self.K.dims, self.E.dims, self.M.dims


def identity_conflation(M: Module) -> Conflation:
    Z = zero_module(M.A)
    return Conflation(Z, M, M, ModuleMap.zero(Z, M), ModuleMap.identity(M))


def split_conflation(N: Module, M: Module) -> Conflation:
    S, incs, projs = direct_sum([N, M])
    return Conflation(N, S, M, incs[0], projs[1])


def _pushout_module(Omega: Module, h: ModuleMap, iota: ModuleMap, N: Module, P: Module):
    """Cokernel of ``Omega -> N + P``, ``w -> (-h(w), iota(w))``."""
    F = N.F
    S, incs, projs = direct_sum([N, P])
    mats = [np.hstack([F.red(-h.mats[v]), iota.mats[v]]) if Omega.dims[v] else F.zeros(0, S.dims[v]) for v in range(N.n)]
    phi = ModuleMap(Omega, S, mats)
    spaces = image_spaces(phi)
    E, q = quotient(S, spaces)
    return S, incs, projs, spaces, E, q


def _induced_from_quotient(spaces: Sequence[Subspace], E: Module, S_to_M: ModuleMap) -> ModuleMap:
    F = E.F
    mats = [F.mul(spaces[v].complement_basis(), S_to_M.mats[v]) for v in range(E.n)]
    return ModuleMap(E, S_to_M.target, mats)


def realize_values(M: Module, N: Module, y: np.ndarray) -> Conflation:
    """The pushout of ``Omega M -> P0`` along the map with generator values ``y``."""
    pres = M.presentation()
    Om, iota = pres.omega_pair
    h = Om.presentation().map_from_values(N, y)
    S, incs, projs, spaces, E, q = _pushout_module(Om, h, iota, N, pres.cover)
    incl = incs[0].then(q)
    to_M = projs[1].then(pres.pi)
    proj = _induced_from_quotient(spaces, E, to_M)
    return Conflation(N, E, M, incl, proj)


def realize(space: ExtSpace, coords: Sequence) -> Conflation:
    return realize_values(space.M, space.N, space.from_coords(coords))


def _lift_values(conf: Conflation, W: Module, values: Sequence[np.ndarray]) -> np.ndarray:
    """Class in ``Ext^1(W, K)`` of the pullback along the map ``W -> M``.

    ``values[k]`` is the image in ``M`` of the ``k``-th top generator of ``W``.
    """
    F = W.F
    presW = W.presentation()
    lifts = []
    for (i, _), val in zip(presW.gens, values):
        if conf.E.dims[i] == 0:
            lifts.append(F.zero_vector(0))
            continue
        res = solve_left(F, conf.proj.mats[i], val.reshape(1, -1))
        if res is None:
            raise ValueError("projection is not surjective")
        lifts.append(res[0].reshape(-1))
    x = np.concatenate(lifts) if lifts else F.zero_vector(0)
    ell = presW.cover_map_from_values(conf.E, x)
    parts = []
    for v, z in presW.syzygy_generators:
        if conf.K.dims[v] == 0:
            parts.append(F.zero_vector(0))
            continue
        e = F.mul(z.reshape(1, -1), ell.mats[v])
        res = solve_left(F, conf.incl.mats[v], e)
        if res is None:
            raise ValueError("lifted syzygy does not land in the kernel")
        parts.append(res[0].reshape(-1))
    return np.concatenate(parts) if parts else F.zero_vector(0)


def classify(conf: Conflation) -> np.ndarray:
    """Cocycle values of the class of ``conf`` in ``Ext^1(M, K)``."""
    presM = conf.M.presentation()
    return _lift_values(conf, conf.M, [g for _, g in presM.gens])


def class_coords(conf: Conflation) -> np.ndarray:
    return ext_space(conf.M, conf.K).coords(classify(conf))


def pushout(conf: Conflation, f: ModuleMap) -> Conflation:
    """Base change along ``f: K -> K'``."""
    F = conf.E.F
    S, incs, projs = direct_sum([f.target, conf.E])
    mats = [np.hstack([F.red(-f.mats[v]), conf.incl.mats[v]]) if conf.K.dims[v] else F.zeros(0, S.dims[v]) for v in range(S.n)]
    phi = ModuleMap(conf.K, S, mats)
    spaces = image_spaces(phi)
    E2, q = quotient(S, spaces)
    incl = incs[0].then(q)
    proj = _induced_from_quotient(spaces, E2, projs[1].then(conf.proj))
    return Conflation(f.target, E2, conf.M, incl, proj)


def pullback(conf: Conflation, g: ModuleMap) -> Conflation:
    """Cobase change along ``g: M' -> M``."""
    F = conf.E.F
    S, incs, projs = direct_sum([conf.E, g.source])
    to_M = ModuleMap(S, conf.M, [np.vstack([conf.proj.mats[v], F.red(-g.mats[v])]) if S.dims[v] else F.zeros(0, conf.M.dims[v]) for v in range(S.n)])
    E2, j = kernel(to_M)
    incl = corestrict(conf.incl.then(incs[0]), j)
    proj = j.then(projs[1])
    return Conflation(conf.K, E2, g.source, incl, proj)


# -- functoriality of Ext in coordinates --------------------------------------


def ext_push_matrix(X: Module, g: ModuleMap) -> np.ndarray:
    """Matrix of ``Ext^1(X, N) -> Ext^1(X, N')`` induced by ``g: N -> N'``."""
    F = X.F
    src = ext_space(X, g.source)
    tgt = ext_space(X, g.target)
    rows = [tgt.coords(src.push(y, g)).reshape(1, -1) for y in src.basis]
    return vstack(F, rows, tgt.dim)


def cover_lift(f: ModuleMap) -> ModuleMap:
    """A lift ``P0(X) -> P0(Y)`` of ``f: X -> Y`` along the projective covers."""
    F = f.F
    px, py = f.source.presentation(), f.target.presentation()
    vals = []
    for i, g in px.gens:
        img = F.mul(g.reshape(1, -1), f.mats[i])
        vals.append(F.mul(img, py.section[i]).reshape(-1) if f.target.dims[i] else F.zero_vector(py.cover.dims[i]))
    x = np.concatenate(vals) if vals else F.zero_vector(0)
    return px.cover_map_from_values(py.cover, x)


def ext_pull_matrix(f: ModuleMap, W: Module) -> np.ndarray:
    """Matrix of ``Ext^1(Y, W) -> Ext^1(X, W)`` induced by ``f: X -> Y``."""
    F = f.F
    X, Y = f.source, f.target
    src = ext_space(Y, W)
    tgt = ext_space(X, W)
    lift = cover_lift(f)
    py = Y.presentation()
    omega_spaces = [Subspace(F, py.cover.dims[v], m, reduced=True) for v, m in enumerate(py.omega_inclusion.mats)]
    images = []
    for v, z in X.presentation().syzygy_generators:
        w = F.mul(z.reshape(1, -1), lift.mats[v]).reshape(-1)
        images.append((v, omega_spaces[v].coords(w) if omega_spaces[v].dim else F.zero_vector(0)))
    rows = []
    for y in src.basis:
        h = src.map_of(y)
        parts = [F.mul(c.reshape(1, -1), h.mats[v]).reshape(-1) if c.size else F.zero_vector(W.dims[v]) for v, c in images]
        yy = np.concatenate(parts) if parts else F.zero_vector(0)
        rows.append(tgt.coords(yy).reshape(1, -1))
    return vstack(F, rows, tgt.dim)


def _hom_matrix(H_src: HomSpace, H_tgt: HomSpace, fn) -> np.ndarray:
    F = H_src.M.F
    rows = [H_tgt.coords(fn(phi)).reshape(1, -1) for phi in H_src.basis]
    return vstack(F, rows, H_tgt.dim)


def _exact_at(F, before: np.ndarray, after: np.ndarray, dim_mid: int) -> bool:
    """``im(before) = ker(after)`` for matrices acting on row vectors."""
    if before.shape[0] and after.shape[1]:
        if not is_zero(F.mul(before, after)):
            return False
    r_before = rank(F, before) if before.size else 0
    r_after = rank(F, after) if after.size else 0
    return r_before == dim_mid - r_after


def covariant_sequence(conf: Conflation, W: Module) -> dict:
    """Maps of ``0 -> Hom(W,K) -> Hom(W,E) -> Hom(W,M) -> Ext(W,K) -> Ext(W,E) -> Ext(W,M)``."""
    F = W.F
    hK, hE, hM = hom_space(W, conf.K), hom_space(W, conf.E), hom_space(W, conf.M)
    a1 = _hom_matrix(hK, hE, lambda p: p.then(conf.incl))
    a2 = _hom_matrix(hE, hM, lambda p: p.then(conf.proj))
    xK = ext_space(W, conf.K)
    presW = W.presentation()
    rows = []
    for phi in hM.basis:
        vals = [F.mul(g.reshape(1, -1), phi.mats[i]).reshape(-1) for i, g in presW.gens]
        rows.append(xK.coords(_lift_values(conf, W, vals)).reshape(1, -1))
    a3 = vstack(F, rows, xK.dim)
    a4 = ext_push_matrix(W, conf.incl)
    a5 = ext_push_matrix(W, conf.proj)
    dims = [hK.dim, hE.dim, hM.dim, xK.dim, ext_space(W, conf.E).dim, ext_space(W, conf.M).dim]
    return {"maps": [a1, a2, a3, a4, a5], "dims": dims}


def contravariant_sequence(conf: Conflation, W: Module) -> dict:
    """Maps of ``0 -> Hom(M,W) -> Hom(E,W) -> Hom(K,W) -> Ext(M,W) -> Ext(E,W) -> Ext(K,W)``."""
    F = W.F
    hM, hE, hK = hom_space(conf.M, W), hom_space(conf.E, W), hom_space(conf.K, W)
    b1 = _hom_matrix(hM, hE, lambda p: conf.proj.then(p))
    b2 = _hom_matrix(hE, hK, lambda p: conf.incl.then(p))
    xM = ext_space(conf.M, W)
    y = classify(conf)
    base = ext_space(conf.M, conf.K)
    rows = [xM.coords(base.push(y, h)).reshape(1, -1) for h in hK.basis]
    b3 = vstack(F, rows, xM.dim)
    b4 = ext_pull_matrix(conf.proj, W)
    b5 = ext_pull_matrix(conf.incl, W)
    dims = [hM.dim, hE.dim, hK.dim, xM.dim, ext_space(conf.E, W).dim, ext_space(conf.K, W).dim]
    return {"maps": [b1, b2, b3, b4, b5], "dims": dims}


def sequence_exact(seq: dict, F) -> list[bool]:
    """Exactness flags: injectivity of the first map, then each interior position."""
    maps, dims = seq["maps"], seq["dims"]
    out = [rank(F, maps[0]) == dims[0] if maps[0].size else dims[0] == 0]
    for k in range(1, len(maps)):
        out.append(_exact_at(F, maps[k - 1], maps[k], dims[k]))
    return out


# -- higher extensions ------------------------------------------------------


def default_degree_cap(A) -> int:
    return 2 * A.loewy_length * A.n


@dataclass
class ExtResult:
    degree: int
    dim: int | None
    status: str  # "exact" or "unknown beyond cap"


def ext_i(M: Module, N: Module, i: int, cap: int | None = None) -> ExtResult:
    """``dim Ext^i(M, N)`` by dimension shifting along syzygies."""
    if i < 1:
        raise ValueError("degree must be at least 1")
    cap = default_degree_cap(M.A) if cap is None else cap
    if i > cap:
        return ExtResult(i, None, "unknown beyond cap")
    X = M
    for _ in range(i - 1):
        X = X.presentation().omega
        if X.dim == 0:
            return ExtResult(i, 0, "exact")
    return ExtResult(i, ext1_dim(X, N), "exact")


def projective_dimension(M: Module, cap: int | None = None) -> int | None:
    """Projective dimension, or ``None`` when no syzygy vanishes within ``cap`` steps."""
    cap = default_degree_cap(M.A) if cap is None else cap
    X = M
    for k in range(cap + 1):
        Om = X.presentation().omega
        if Om.dim == 0:
            return k
        X = Om
    return None


# -- universal extensions ----------------------------------------------------


@dataclass
class UniversalExtension:
    conflation: Conflation
    d: int
    brick: bool
    classes: list[np.ndarray]


def division_basis(space: ExtSpace, brick: bool) -> list[np.ndarray]:
    """Greedy basis of ``Ext^1(M, N)`` over ``End(N)^op`` (or over the field)."""
    F = space.F
    if not brick:
        return [row.copy() for row in space.basis]
    ends = hom_space(space.N, space.N).basis
    span = Subspace(F, space.dim)
    chosen = []
    for k in range(space.dim):
        c = F.zero_vector(space.dim)
        c[k] = F.one
        if span.contains(c):
            continue
        y = space.basis[k]
        chosen.append(y.copy())
        orbit = np.vstack([space.coords(space.push(y, d)).reshape(1, -1) for d in ends])
        span = span.add(orbit)
    return chosen


def universal_extension(M: Module, N: Module, *, check_indecomposable: bool = True) -> UniversalExtension:
    """``N^d -> E -> M`` realizing a basis of ``Ext^1(M, N)`` over ``D_N``."""
    if check_indecomposable and not is_indecomposable(N):
        raise ValueError("target module must be indecomposable")
    brick = is_brick(N)
    space = ext_space(M, N)
    classes = division_basis(space, brick)
    d = len(classes)
    if d == 0:
        return UniversalExtension(identity_conflation(M), 0, brick, [])
    F = M.F
    Nd = power(N, d)
    parts = []
    for z in range(len(space.blocks)):
        for y in classes:
            parts.append(space.blocks_of(y)[z])
    y_total = np.concatenate(parts) if parts else F.zero_vector(0)
    conf = realize_values(M, Nd, y_total)
    return UniversalExtension(conf, d, brick, classes)


def dualize_conflation(conf: Conflation) -> Conflation:
    DK, DE, DM = dualize(conf.K), dualize(conf.E), dualize(conf.M)
    return Conflation(DM, DE, DK, dualize_map(conf.proj, DM, DE), dualize_map(conf.incl, DE, DK))


def universal_coextension(M: Module, N: Module, *, check_indecomposable: bool = True) -> UniversalExtension:
    """``M -> E -> N^d`` realizing a basis of ``Ext^1(N, M)`` over ``D_N``."""
    ue = universal_extension(dualize(M), dualize(N), check_indecomposable=check_indecomposable)
    conf = dualize_conflation(ue.conflation)
    if ue.d == 0:
        Z = zero_module(M.A)
        conf = Conflation(M, M, Z, ModuleMap.identity(M), ModuleMap.zero(M, Z))
    return UniversalExtension(conf, ue.d, ue.brick, ue.classes)


def connecting_map_rank(ue: UniversalExtension, N: Module) -> int:
    """Rank of ``Hom(N^d, N) -> Ext^1(M, N)``, ``h -> h o class``."""
    conf = ue.conflation
    F = N.F
    if ue.d == 0:
        return 0
    space = ext_space(conf.M, N)
    base = ext_space(conf.M, conf.K)
    y = classify(conf)
    H = hom_space(conf.K, N)
    rows = [space.coords(base.push(y, h)).reshape(1, -1) for h in H.basis]
    return rank(F, vstack(F, rows, space.dim))
