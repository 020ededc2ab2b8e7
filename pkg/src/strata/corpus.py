"""Shipped example algebras and a seeded generator of small admissible algebras."""

from __future__ import annotations

import random
from importlib import resources

from .algebra import AdmissibilityError, Algebra, Arrow, ModuleLiteral, parse_document
from .exactlin import QQ, Field

CORPUS_NAMES = ("ex43", "ex414", "ex35a", "ex35b", "kron")


def corpus_text(name: str) -> str:
    if name not in CORPUS_NAMES:
        raise KeyError(f"unknown corpus algebra {name!r}")
    return resources.files("strata").joinpath("corpus").joinpath(f"{name}.alg").read_text()


def load(name: str, field: Field | None = None) -> tuple[Algebra, dict[str, ModuleLiteral]]:
    return parse_document(corpus_text(name), field)


def load_algebra(name: str, field: Field | None = None) -> Algebra:
    return load(name, field)[0]


def random_admissible_algebra(
    seed: int,
    *,
    max_vertices: int = 4,
    max_dim: int = 12,
    field: Field = QQ,
    attempts: int = 200,
) -> Algebra:
    """A basic algebra ``kQ/I`` with ``I`` admissible, drawn deterministically from ``seed``.

    Relations mix monomials with occasional commutativity relations; every path
    of a drawn length is killed so the ideal contains a power of the arrow ideal.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        n = rng.randint(1, max_vertices)
        arrows = []
        for k in range(rng.randint(0, n + 2)):
            s, t = rng.randrange(n), rng.randrange(n)
            arrows.append(Arrow(f"a{k + 1}", s, t))
        cap_len = rng.randint(2, 4)
        relations = _random_relations(rng, n, arrows, cap_len, field)
        try:
            A = Algebra(field, [str(i + 1) for i in range(n)], arrows, relations, length_cap=cap_len + 1)
        except AdmissibilityError:
            continue
        if A.dim <= max_dim and A.check_associativity():
            return A
    raise RuntimeError(f"no admissible algebra found for seed {seed}")


def _paths(arrows: list[Arrow], length: int) -> list[tuple[int, ...]]:
    out = [(k,) for k in range(len(arrows))]
    for _ in range(length - 1):
        out = [w + (k,) for w in out for k, a in enumerate(arrows) if arrows[w[-1]].target == a.source]
    return out


def _random_relations(rng: random.Random, n: int, arrows: list[Arrow], cap_len: int, field: Field) -> list[dict]:
    rels: list[dict] = []
    if not arrows:
        return rels
    two = _paths(arrows, 2)
    parallel: dict[tuple[int, int], list[tuple[int, ...]]] = {}
    for w in two:
        parallel.setdefault((arrows[w[0]].source, arrows[w[-1]].target), []).append(w)
    used: set[tuple[int, ...]] = set()
    for ws in parallel.values():
        if len(ws) >= 2 and rng.random() < 0.4:
            p, q = rng.sample(ws, 2)
            rels.append({p: field.one, q: field(-1)})
            used.update((p, q))
    for w in two:
        if w not in used and rng.random() < 0.35:
            rels.append({w: field.one})
    for w in _paths(arrows, cap_len):
        rels.append({w: field.one})
    return rels
