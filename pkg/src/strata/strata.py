"""Standard and proper standard modules, filtrations and mixed stratification.

Filtration membership peels layers from the top.  For a family ``Theta``
satisfying the Hom and Ext vanishing conditions, a module ``X`` filtered by
``Theta`` has a unique largest submodule ``X'`` filtered by the strata
above the smallest index ``j`` with ``Hom(X, Theta(j)) != 0``, namely the
stable value of ``R -> intersection of kernels of all maps R -> Theta(j)``,
and ``X / X'`` is filtered by ``Theta(j)`` alone.  When ``Theta(j)`` is a
brick its filtration category is wide, so any nonzero map to ``Theta(j)``
is a surjection with a filtered kernel; when it is a stone the quotient is a
direct sum of copies and a split surjection is found from the pairing
``Hom(Theta(j), Q) x Hom(Q, Theta(j)) -> End(Theta(j)) / rad``.  Every
decision is therefore forced and no backtracking is needed.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra
from .exactlin import Subspace, left_kernel
from .homext import ext1_dim, hom_space
from .module import (
    Module,
    ModuleMap,
    dualize,
    generated_spaces,
    is_brick,
    is_indecomposable,
    is_nilpotent,
    projective,
    quotient,
    radical_spaces,
    submodule,
)

DEFAULT_NODE_BUDGET = 10_000
DEFAULT_CHOICE_BOUND = 12

STANDARD = "d"
PROPER = "p"


class PreconditionError(ValueError):
    """The family does not satisfy the Hom and Ext vanishing conditions."""


# -- standard modules -----------------------------------------------------------


def standard_with_map(A: Algebra, i: int) -> tuple[Module, ModuleMap]:
    """``Delta(i)`` as ``e_i A`` modulo the trace of ``e_j A`` for ``j > i``."""
    P = projective(A, i)
    F = A.field
    gens = []
    for j in range(i + 1, A.n):
        for c in range(P.dims[j]):
            g = F.zero_vector(P.dims[j])
            g[c] = F.one
            gens.append((j, g))
    D, q = quotient(P, generated_spaces(P, gens))
    D.name = f"Delta({A.vertices[i]})"
    return D, q


def standard_module(A: Algebra, i: int) -> Module:
    return standard_with_map(A, i)[0]


def proper_standard_with_map(A: Algebra, i: int) -> tuple[Module, ModuleMap]:
    """``Delta(i)`` modulo the submodule generated by ``(rad Delta(i)) e_i``."""
    D, q = standard_with_map(A, i)
    rad = radical_spaces(D)[i]
    gens = [(i, row) for row in rad.basis]
    Db, q2 = quotient(D, generated_spaces(D, gens))
    Db.name = f"pDelta({A.vertices[i]})"
    return Db, q.then(q2)


def proper_standard_module(A: Algebra, i: int) -> Module:
    return proper_standard_with_map(A, i)[0]


def costandard_module(A: Algebra, i: int) -> Module:
    M = dualize(standard_module(A.opposite(), i))
    M.name = f"Nabla({A.vertices[i]})"
    return M


def proper_costandard_module(A: Algebra, i: int) -> Module:
    M = dualize(proper_standard_module(A.opposite(), i))
    M.name = f"pNabla({A.vertices[i]})"
    return M


def parse_choice(text: str, n: int) -> tuple[str, ...]:
    parts = [p.strip() for p in text.split(",")] if "," in text else list(text.strip())
    if len(parts) != n or any(p not in (STANDARD, PROPER) for p in parts):
        raise ValueError(f"choice must list {n} entries from 'd' and 'p'")
    return tuple(parts)


def family(A: Algebra, choice: Sequence[str]) -> list[Module]:
    if len(choice) != A.n:
        raise ValueError("choice length must equal the number of vertices")
    out = []
    for i, c in enumerate(choice):
        if c == STANDARD:
            out.append(standard_module(A, i))
        elif c == PROPER:
            out.append(proper_standard_module(A, i))
        else:
            raise ValueError(f"unknown tag {c!r}")
    return out


def costandard_family(A: Algebra, choice: Sequence[str]) -> list[Module]:
    return [costandard_module(A, i) if c == STANDARD else proper_costandard_module(A, i) for i, c in enumerate(choice)]


# -- brick / stone ------------------------------------------------------------


def is_stone(M: Module) -> bool:
    return M.dim > 0 and ext1_dim(M, M) == 0 and is_indecomposable(M)


@dataclass
class StandardizableReport:
    ms1: list[dict]
    ms2_witness: tuple[int, int] | None
    ms3_witness: tuple[int, int] | None
    ms4: str = "vacuous: negative extensions vanish for module categories"

    @property
    def passed(self) -> bool:
        return all(e["brick"] or e["stone"] for e in self.ms1) and self.ms2_witness is None and self.ms3_witness is None

    def to_json(self) -> dict:
        return {
            "MS1": self.ms1,
            "MS2": {"pass": self.ms2_witness is None, "witness": self.ms2_witness},
            "MS3": {"pass": self.ms3_witness is None, "witness": self.ms3_witness},
            "MS4": self.ms4,
            "pass": self.passed,
        }


def verify_mixed_standardizable(theta: Sequence[Module]) -> StandardizableReport:
    ms1 = []
    for M in theta:
        brick = is_brick(M)
        stone = is_stone(M)
        ms1.append({"brick": brick, "stone": stone})
    ms2 = ms3 = None
    t = len(theta)
    for i in range(t):
        for j in range(i):
            if ms2 is None and hom_space(theta[i], theta[j]).dim:
                ms2 = (i, j)
            if ms3 is None and ext1_dim(theta[i], theta[j]):
                ms3 = (i, j)
    return StandardizableReport(ms1, ms2, ms3)


# -- filtrations --------------------------------------------------------------


@dataclass
class FiltrationCertificate:
    """``0 = M_0 < M_1 < ... < M_l = M`` with ``M_k / M_{k-1} = Theta(indices[k-1])``.

    ``chain[k]`` holds per-vertex subspaces of ``M``; ``witnesses[k-1]`` is a
    surjection from the submodule ``M_k`` onto ``Theta(indices[k-1])`` whose
    kernel is ``M_{k-1}``.
    """

    module: Module
    chain: list[list[Subspace]]
    indices: list[int]
    witnesses: list[ModuleMap]

    @property
    def length(self) -> int:
        return len(self.indices)

    def multiplicities(self, t: int) -> list[int]:
        out = [0] * t
        for j in self.indices:
            out[j] += 1
        return out

    def verify(self, theta: Sequence[Module]) -> bool:
        M = self.module
        if any(s.dim for s in self.chain[0]) or [s.dim for s in self.chain[-1]] != list(M.dims):
            return False
        if any(a < b for a, b in zip(self.indices, self.indices[1:])):
            return False
        for k, (j, w) in enumerate(zip(self.indices, self.witnesses), start=1):
            upper, lower = self.chain[k], self.chain[k - 1]
            if not all(u.contains_space(l) for u, l in zip(upper, lower)):
                return False
            X, inc = submodule(M, upper)
            if not inc.is_homomorphism():
                return False
            if w.target is not theta[j] or [d for d in w.source.dims] != [u.dim for u in upper]:
                return False
            if not w.is_homomorphism() or not w.is_surjective():
                return False
            if [u.dim - l.dim for u, l in zip(upper, lower)] != list(theta[j].dims):
                return False
            for v in range(M.n):
                if lower[v].dim:
                    coords = upper[v].coords(lower[v].basis)
                    if np.any(M.F.mul(coords, w.mats[v]) != 0):
                        return False
        return True

    def to_json(self) -> dict:
        F = self.module.F
        return {
            "layers_bottom_to_top": self.indices,
            "chain_dims": [[s.dim for s in spaces] for spaces in self.chain],
            "chain": [[[[F.format(x) for x in row] for row in s.basis] for s in spaces] for spaces in self.chain],
        }


@dataclass
class NotFiltered:
    reason: str
    stuck_dims: tuple[int, ...]


@dataclass
class Undecided:
    reason: str


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self) -> bool:
        self.used += 1
        return self.used <= self.limit


def _sub_of(M: Module, spaces: list[Subspace]) -> tuple[Module, ModuleMap]:
    return submodule(M, spaces)


def _kernel_in_ambient(M: Module, spaces: list[Subspace], f: ModuleMap) -> list[Subspace]:
    """Kernel of ``f`` (defined on the submodule ``spaces``) as subspaces of ``M``."""
    F = M.F
    out = []
    for v, s in enumerate(spaces):
        if s.dim == 0:
            out.append(Subspace(F, M.dims[v]))
            continue
        K = left_kernel(F, f.mats[v]) if f.mats[v].shape[1] else F.eye(s.dim)
        out.append(Subspace(F, M.dims[v], F.mul(K, s.basis) if K.shape[0] else None))
    return out


def _rejection(M: Module, spaces: list[Subspace], T: Module, budget: _Budget) -> list[Subspace] | None:
    """Largest submodule of ``spaces`` with no nonzero map to ``T`` (iterated kernels)."""
    cur = spaces
    while True:
        if not budget.tick():
            return None
        X, _ = _sub_of(M, cur)
        H = hom_space(X, T)
        if H.dim == 0:
            return cur
        nxt = cur
        for f in H.basis:
            nxt = [a.intersect(b) for a, b in zip(nxt, _kernel_in_ambient(M, cur, f))]
        cur = nxt


def filtration_membership(
    M: Module,
    theta: Sequence[Module],
    *,
    budget: int = DEFAULT_NODE_BUDGET,
    check_family: bool = True,
    report: StandardizableReport | None = None,
):
    """A verified certificate, ``NotFiltered`` or ``Undecided``."""
    if check_family:
        report = report or verify_mixed_standardizable(theta)
        if not report.passed:
            raise PreconditionError("family fails the standardizable conditions")
    bricks = [e["brick"] for e in report.ms1] if report else [is_brick(T) for T in theta]
    F = M.F
    t = len(theta)
    B = _Budget(budget)
    current = [Subspace.full(F, d) for d in M.dims]
    top_down: list[tuple[list[Subspace], int, ModuleMap]] = []
    j = 0
    lower: list[Subspace] | None = None
    while any(s.dim for s in current):
        if not B.tick():
            return Undecided("node budget exhausted")
        X, _ = _sub_of(M, current)
        while j < t and hom_space(X, theta[j]).dim == 0:
            j += 1
            lower = None
        if j == t:
            return NotFiltered("no map to any remaining stratum", X.dims)
        T = theta[j]
        if lower is None:
            lower = _rejection(M, current, T, B)
            if lower is None:
                return Undecided("node budget exhausted")
        H = hom_space(X, T)
        f = _choose_layer_map(M, current, lower, X, H, T, bricks[j])
        if f is None:
            return NotFiltered(f"top part is not filtered by stratum {j}", X.dims)
        kern = _kernel_in_ambient(M, current, f)
        if [c.dim - k.dim for c, k in zip(current, kern)] != list(T.dims):
            return NotFiltered(f"map to stratum {j} is not surjective", X.dims)
        top_down.append((current, j, f))
        current = kern
    chain = [current] + [entry[0] for entry in reversed(top_down)]
    indices = [entry[1] for entry in reversed(top_down)]
    witnesses = [entry[2] for entry in reversed(top_down)]
    return FiltrationCertificate(M, chain, indices, witnesses)


def _choose_layer_map(M, current, lower, X, H, T, brick: bool) -> ModuleMap | None:
    if brick:
        for f in H.basis:
            if not f.is_zero():
                return f
        return None
    # stone: find a split surjection from X / lower onto T
    F = M.F
    rel = [Subspace(F, c.dim, c.coords(l.basis) if l.dim else None) for c, l in zip(current, lower)]
    Q, q = quotient(X, rel)
    back = hom_space(T, Q).basis
    for f in H.basis:
        fbar = ModuleMap(Q, T, [F.mul(r.complement_basis(), f.mats[v]) for v, r in enumerate(rel)])
        for s in back:
            if not is_nilpotent(s.then(fbar)):
                return f
    return None


def is_filtered(M: Module, theta: Sequence[Module], **kw) -> bool:
    return isinstance(filtration_membership(M, theta, **kw), FiltrationCertificate)


@dataclass
class StratifiedReport:
    choice: tuple[str, ...]
    theta: list[Module]
    standardizable: StandardizableReport
    results: list[object] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.standardizable.passed and all(isinstance(r, FiltrationCertificate) for r in self.results)

    @property
    def undecided(self) -> bool:
        return any(isinstance(r, Undecided) for r in self.results)

    def to_json(self) -> dict:
        out = {
            "choice": list(self.choice),
            "theta_dims": [list(T.dims) for T in self.theta],
            "standardizable": self.standardizable.to_json(),
            "projectives": [],
            "mixed_stratified": self.passed,
        }
        for i, r in enumerate(self.results):
            if isinstance(r, FiltrationCertificate):
                entry = {"vertex": i, "status": "filtered", "certificate": r.to_json()}
            elif isinstance(r, NotFiltered):
                entry = {"vertex": i, "status": "not_filtered", "reason": r.reason, "stuck_dims": list(r.stuck_dims)}
            else:
                entry = {"vertex": i, "status": "undecided", "reason": r.reason}
            out["projectives"].append(entry)
        return out


def is_mixed_stratified(A: Algebra, choice: Sequence[str], *, budget: int = DEFAULT_NODE_BUDGET) -> StratifiedReport:
    choice = tuple(choice)
    theta = family(A, choice)
    rep = verify_mixed_standardizable(theta)
    out = StratifiedReport(choice, theta, rep)
    if not rep.passed:
        return out
    for i in range(A.n):
        P = projective(A, i)
        cert = filtration_membership(P, theta, budget=budget, check_family=False, report=rep)
        if isinstance(cert, FiltrationCertificate) and not cert.verify(theta):
            raise AssertionError("certificate failed verification")
        out.results.append(cert)
    return out


def distinct_choices(A: Algebra) -> list[tuple[str, ...]]:
    """All choices, with ``p`` only where ``Delta(i) != pDelta(i)``."""
    options = []
    for i in range(A.n):
        same = standard_module(A, i).dims == proper_standard_module(A, i).dims
        options.append((STANDARD,) if same else (STANDARD, PROPER))
    return list(itertools.product(*options))


def enumerate_mixed_choices(A: Algebra, *, bound: int = DEFAULT_CHOICE_BOUND, budget: int = DEFAULT_NODE_BUDGET) -> list[StratifiedReport]:
    if A.n > bound:
        raise ValueError(f"{A.n} vertices exceed the enumeration bound {bound}")
    return [is_mixed_stratified(A, c, budget=budget) for c in distinct_choices(A)]


def canonical_choice(A: Algebra, choice: Sequence[str]) -> tuple[str, ...]:
    """Replace ``p`` by ``d`` where both modules coincide."""
    out = []
    for i, c in enumerate(choice):
        same = standard_module(A, i).dims == proper_standard_module(A, i).dims
        out.append(STANDARD if same else c)
    return tuple(out)
