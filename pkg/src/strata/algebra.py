"""Quivers with relations: DSL parsing, path bases and structure constants.

Conventions: an arrow ``a: u -> v`` lies in ``e_u A e_v`` and paths are
written left to right, so ``a*b`` means ``a`` followed by ``b``.  Vertex
indices are 0-based internally; the DSL refers to vertices by label.

The path basis is computed in ``kQ / J^K`` for growing ``K``: the ideal
spanned by all truncated multiples ``p * r * q`` is put in reduced echelon
form with shorter paths to the left, so the pivots are the leading
(lowest length) monomials and the non-pivot paths form a basis.  Once every
path of length ``K - 1`` is a pivot the arrow ideal is nilpotent modulo the
relations and the truncation is exact.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from dataclasses import field as dc_field
from functools import cached_property

import numpy as np

from .exactlin import QQ, Field, FieldError, SparseEchelon

Path = tuple  # (source, target, arrows) with arrows a tuple of arrow indices

DEFAULT_LENGTH_CAP = 64
DEFAULT_PATH_LIMIT = 10_000


class DSLParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class AdmissibilityError(ValueError):
    """The relations do not generate an admissible ideal within the caps."""


@dataclass(frozen=True)
class Arrow:
    name: str
    source: int
    target: int


@dataclass
class ModuleLiteral:
    """Raw module block from a DSL file (matrices in row-vector convention)."""

    name: str
    dims: list[int]
    maps: dict[str, np.ndarray] = dc_field(default_factory=dict)


class Algebra:
    """A basic algebra ``kQ/I`` with an explicit path basis.

    ``basis[k]`` is a path ``(source, target, arrows)``; ``nf`` maps every
    path of length below the Loewy length to its normal form, a sparse
    ``{basis index: coefficient}`` dict.  Longer paths are zero.
    """

    def __init__(
        self,
        field: Field,
        vertices: Sequence[str],
        arrows: Sequence[Arrow],
        relations: Sequence[Mapping[tuple, object]],
        *,
        length_cap: int = DEFAULT_LENGTH_CAP,
        path_limit: int = DEFAULT_PATH_LIMIT,
        _structure: tuple | None = None,
    ):
        self.field = field
        self.vertices = list(vertices)
        self.arrows = list(arrows)
        self.relations = [dict(r) for r in relations]
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex labels must be distinct")
        if len({a.name for a in self.arrows}) != len(self.arrows):
            raise ValueError("arrow names must be distinct")
        n = len(self.vertices)
        for a in self.arrows:
            if not (0 <= a.source < n and 0 <= a.target < n):
                raise ValueError(f"arrow {a.name} has an unknown endpoint")
        for rel in self.relations:
            self._check_relation(rel)
        if _structure is None:
            self.basis, self.nf, self.loewy_length = _compute_basis(self, length_cap, path_limit)
        else:
            self.basis, self.nf, self.loewy_length = _structure
        self.index = {p: k for k, p in enumerate(self.basis)}
        self._opposite: Algebra | None = None
        self._mult_cache: dict[tuple[int, int], dict] = {}

    # -- construction helpers ---------------------------------------------
    def _check_relation(self, rel: Mapping[tuple, object]) -> None:
        if not rel:
            raise ValueError("empty relation")
        ends = set()
        for word in rel:
            if len(word) < 2:
                raise ValueError("relation paths must have length at least 2")
            for x, y in zip(word, word[1:]):
                if self.arrows[x].target != self.arrows[y].source:
                    raise ValueError(f"path {self.word_name(word)} is not composable")
            ends.add((self.arrows[word[0]].source, self.arrows[word[-1]].target))
        if len(ends) != 1:
            raise ValueError("relation paths are not parallel")

    # -- basic data ---------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def word_name(self, word: Sequence[int]) -> str:
        return "*".join(self.arrows[a].name for a in word)

    def path_name(self, path: Path) -> str:
        s, _, word = path
        return f"e{self.vertices[s]}" if not word else "".join(self.arrows[a].name for a in word)

    def arrow_index(self, name: str) -> int:
        for k, a in enumerate(self.arrows):
            if a.name == name:
                return k
        raise KeyError(name)

    def vertex_index(self, label: str) -> int:
        return self.vertices.index(label)

    def idempotent(self, i: int) -> int:
        return self.index[(i, i, ())]

    def arrow_element(self, a: int) -> int:
        arr = self.arrows[a]
        return self.index[(arr.source, arr.target, (a,))]

    @cached_property
    def basis_from(self) -> list[list[int]]:
        """``basis_from[i]``: basis indices of paths starting at vertex ``i``."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        for k, (s, _, _) in enumerate(self.basis):
            out[s].append(k)
        return out

    @cached_property
    def basis_between(self) -> dict[tuple[int, int], list[int]]:
        out: dict[tuple[int, int], list[int]] = {}
        for k, (s, t, _) in enumerate(self.basis):
            out.setdefault((s, t), []).append(k)
        return out

    def cartan(self) -> list[list[int]]:
        """``C[i][j] = dim e_i A e_j``."""
        return [[len(self.basis_between.get((i, j), [])) for j in range(self.n)] for i in range(self.n)]

    def arrow_counts(self) -> list[list[int]]:
        out = [[0] * self.n for _ in range(self.n)]
        for a in self.arrows:
            out[a.source][a.target] += 1
        return out

    # -- multiplication ---------------------------------------------------
    def path_nf(self, path: Path) -> dict:
        if len(path[2]) >= self.loewy_length:
            return {}
        return self.nf.get(path, {})

    def mult_basis(self, i: int, j: int) -> dict:
        key = (i, j)
        hit = self._mult_cache.get(key)
        if hit is not None:
            return hit
        s, t, w = self.basis[i]
        s2, t2, w2 = self.basis[j]
        out = {} if t != s2 else self.path_nf((s, t2, w + w2))
        self._mult_cache[key] = out
        return out

    def mult(self, x: dict, y: dict) -> dict:
        F = self.field
        out: dict[int, object] = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.mult_basis(i, j).items():
                    out[k] = out.get(k, F.zero) + a * b * c
        if F.p is not None:
            out = {k: v % F.p for k, v in out.items()}
        return {k: v for k, v in out.items() if v != 0}

    def evaluate_word(self, s: int, word: Sequence[int]) -> dict:
        """Normal form of an arbitrary (possibly long) path."""
        t = self.arrows[word[-1]].target if word else s
        return self.path_nf((s, t, tuple(word)))

    def check_associativity(self) -> bool:
        d = self.dim
        for i in range(d):
            for j in range(d):
                ij = self.mult_basis(i, j)
                for k in range(d):
                    left = self.mult(ij, {k: self.field.one})
                    right = self.mult({i: self.field.one}, self.mult_basis(j, k))
                    if left != right:
                        return False
        return True

    def relations_hold(self) -> bool:
        """Every relation reduces to zero in the computed basis."""
        F = self.field
        for rel in self.relations:
            acc: dict[int, object] = {}
            for word, c in rel.items():
                s = self.arrows[word[0]].source
                for k, v in self.evaluate_word(s, word).items():
                    acc[k] = F.red(np.array([acc.get(k, F.zero) + c * v], dtype=object))[0]
            if any(v != 0 for v in acc.values()):
                return False
        return True

    # -- opposite -----------------------------------------------------------
    def opposite(self) -> Algebra:
        """Opposite algebra: arrows and paths reversed, vertex order kept."""
        if self._opposite is None:
            arrows = [Arrow(a.name, a.target, a.source) for a in self.arrows]
            rels = [{tuple(reversed(w)): c for w, c in r.items()} for r in self.relations]
            rev = lambda p: (p[1], p[0], tuple(reversed(p[2])))
            basis = [rev(p) for p in self.basis]
            nf = {rev(p): v for p, v in self.nf.items()}
            op = Algebra(self.field, self.vertices, arrows, rels, _structure=(basis, nf, self.loewy_length))
            op._opposite = self
            self._opposite = op
        return self._opposite

    # -- printing -----------------------------------------------------------
    def relation_text(self, rel: Mapping[tuple, object]) -> str:
        F = self.field
        parts = []
        for word in sorted(rel, key=lambda w: (len(w), w)):
            c = F.to_fraction(rel[word])
            if F.p is not None and c > F.p // 2:
                c = c - F.p
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = self.word_name(word)
            term = body if mag == 1 else f"{mag}*{body}"
            parts.append((sign, term))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, term in parts[1:]:
            text += f" {sign} {term}"
        return text

    def to_dsl(self, modules: Iterable[ModuleLiteral] = ()) -> str:
        lines = [f"field {self.field.describe()}", "vertices " + " ".join(self.vertices)]
        for a in self.arrows:
            lines.append(f"arrow {a.name} : {self.vertices[a.source]} -> {self.vertices[a.target]}")
        for rel in self.relations:
            lines.append(f"relation {self.relation_text(rel)}")
        for lit in modules:
            lines.append(f"module {lit.name}")
            lines.append("  dims " + " ".join(str(d) for d in lit.dims))
            for a in self.arrows:
                if a.name in lit.maps:
                    lines.append(f"  map {a.name} = {format_matrix(self.field, lit.maps[a.name])}")
            lines.append("end")
        return "\n".join(lines) + "\n"

    def same_presentation(self, other: Algebra) -> bool:
        return (
            self.field == other.field
            and self.vertices == other.vertices
            and self.arrows == other.arrows
            and self.relations == other.relations
            and self.basis == other.basis
        )

    def __repr__(self) -> str:
        return f"Algebra(n={self.n}, arrows={len(self.arrows)}, dim={self.dim}, field={self.field.describe()})"


def _enumerate_paths(A: Algebra, max_len: int, limit: int) -> list[Path]:
    out: list[Path] = [(i, i, ()) for i in range(A.n)]
    layer = list(out)
    out_arrows: list[list[int]] = [[] for _ in range(A.n)]
    for k, a in enumerate(A.arrows):
        out_arrows[a.source].append(k)
    for _ in range(max_len):
        nxt = []
        for s, t, w in layer:
            for a in out_arrows[t]:
                nxt.append((s, A.arrows[a].target, w + (a,)))
        if not nxt:
            break
        out.extend(nxt)
        if len(out) > limit:
            raise AdmissibilityError(f"more than {limit} paths below length {max_len + 1}")
        layer = nxt
    return out


def _compute_basis(A: Algebra, length_cap: int, path_limit: int):
    F = A.field
    K = 2
    while True:
        if K - 1 > length_cap:
            raise AdmissibilityError(f"arrow ideal not nilpotent modulo relations below length {length_cap}")
        paths = _enumerate_paths(A, K - 1, path_limit)
        paths.sort(key=lambda p: (p[0], p[1], len(p[2]), p[2]))
        col = {p: k for k, p in enumerate(paths)}
        by_end: dict[tuple[int, int], list[Path]] = {}
        by_start: dict[tuple[int, int], list[Path]] = {}
        for p in paths:
            by_end.setdefault((p[1], len(p[2])), []).append(p)
            by_start.setdefault((p[0], len(p[2])), []).append(p)
        ech = SparseEchelon(F)
        for rel in A.relations:
            words = list(rel.items())
            first = words[0][0]
            s = A.arrows[first[0]].source
            t = A.arrows[first[-1]].target
            min_len = min(len(w) for w, _ in words)
            room = K - min_len
            pairs = (
                (p, q)
                for lp in range(room)
                for p in by_end.get((s, lp), [])
                for lq in range(room - lp)
                for q in by_start.get((t, lq), [])
            )
            for p, q in pairs:
                row = {}
                for w, c in words:
                    total = p[2] + w + q[2]
                    if len(total) < K:
                        key = col[(p[0], q[1], total)]
                        row[key] = row.get(key, F.zero) + c
                ech.insert(row)
        top = [col[p] for p in paths if len(p[2]) == K - 1]
        if all(c in ech.rows for c in top):
            break
        K += 1
    pivots = ech.rows
    basis = [p for p in paths if col[p] not in pivots]
    basis.sort(key=lambda p: (p[0], len(p[2]), p[2], p[1]))
    bindex = {p: k for k, p in enumerate(basis)}
    nf: dict[Path, dict] = {}
    for p in paths:
        c = col[p]
        if c in pivots:
            row = pivots[c]
            vec = {}
            for cc, x in row.items():
                if cc == c:
                    continue
                q = paths[cc]
                vec[bindex[q]] = F.red(np.array([-x], dtype=object))[0]
            nf[p] = {k: v for k, v in vec.items() if v != 0}
        else:
            nf[p] = {bindex[p]: F.one}
    loewy = K - 1
    return basis, nf, loewy


# -- DSL ----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


def _tokens(text: str, line_no: int, offset: int):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        kind = "num" if m.group(1) else "name" if m.group(2) else "sym"
        val = m.group(1) or m.group(2) or m.group(3)
        col = offset + m.start(m.lastindex) + 1
        out.append((kind, val, col))
        pos = m.end()
    return out


def parse_matrix(F: Field, text: str, line: int, col: int) -> np.ndarray:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise DSLParseError("matrix must be written as [a b; c d]", line, col)
    inner = body[1:-1].strip()
    if not inner:
        return F.zeros(0, 0)
    rows = []
    for r in inner.split(";"):
        entries = r.replace(",", " ").split()
        try:
            rows.append([F(e) for e in entries])
        except (FieldError, ValueError) as exc:
            raise DSLParseError(str(exc), line, col) from exc
    if any(len(r) != len(rows[0]) for r in rows):
        raise DSLParseError("ragged matrix", line, col)
    return F.matrix(rows)


def format_matrix(F: Field, M: np.ndarray) -> str:
    if M.size == 0:
        return "[]"
    return "[" + "; ".join(" ".join(F.format(x) for x in row) for row in M) + "]"


def _parse_relation(F: Field, tokens, arrows: dict[str, int], line: int) -> dict:
    rel: dict[tuple, object] = {}
    i = 0
    sign = 1
    expect_term = True
    if not tokens:
        raise DSLParseError("empty relation", line, 1)
    while i < len(tokens):
        kind, val, col = tokens[i]
        if kind == "sym" and val in "+-" and expect_term:
            sign = -sign if val == "-" else sign
            i += 1
            continue
        if not expect_term:
            if kind == "sym" and val in "+-":
                sign = -1 if val == "-" else 1
                expect_term = True
                i += 1
                continue
            raise DSLParseError(f"expected '+' or '-', got {val!r}", line, col)
        coeff = F.one
        if kind == "num":
            coeff = F(val)
            i += 1
            if i < len(tokens) and tokens[i][1] == "*":
                i += 1
        word = []
        while True:
            if i >= len(tokens) or tokens[i][0] != "name":
                c = tokens[i][2] if i < len(tokens) else col
                raise DSLParseError("expected an arrow name", line, c)
            name = tokens[i][1]
            if name not in arrows:
                raise DSLParseError(f"unknown arrow {name!r}", line, tokens[i][2])
            word.append(arrows[name])
            i += 1
            if i < len(tokens) and tokens[i][1] == "*":
                i += 1
                continue
            break
        key = tuple(word)
        val_total = rel.get(key, F.zero) + (coeff if sign > 0 else -coeff)
        if F.p is not None:
            val_total %= F.p
        rel[key] = val_total
        sign = 1
        expect_term = False
    if expect_term:
        raise DSLParseError("relation ends with an operator", line, tokens[-1][2])
    return {w: c for w, c in rel.items() if c != 0}


def parse_document(text: str, field: Field | None = None, **kwargs) -> tuple[Algebra, dict[str, ModuleLiteral]]:
    """Parse a DSL file into an algebra and its named module literals.

    ``field`` overrides the field line when given.
    """
    F: Field | None = None
    vertices: list[str] | None = None
    arrows: list[Arrow] = []
    arrow_idx: dict[str, int] = {}
    relations: list[tuple[int, list]] = []
    modules: dict[str, ModuleLiteral] = {}
    current: ModuleLiteral | None = None
    module_lines: dict[str, list] = {}

    lines = text.splitlines()
    for ln, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        indent = len(content) - len(content.lstrip())
        head, _, rest = stripped.partition(" ")
        rest_col = indent + len(head) + 2
        if current is not None:
            if head == "end":
                current = None
                continue
            if head == "dims":
                try:
                    current.dims = [int(x) for x in rest.split()]
                except ValueError as exc:
                    raise DSLParseError("dims must be integers", ln, rest_col) from exc
                continue
            if head == "map":
                name, eq, mat = rest.partition("=")
                if not eq:
                    raise DSLParseError("expected 'map <arrow> = [..]'", ln, rest_col)
                module_lines[current.name].append((name.strip(), mat, ln, rest_col + len(name) + 1))
                continue
            raise DSLParseError(f"unexpected {head!r} inside module block", ln, indent + 1)
        if head == "field":
            parts = rest.split()
            if parts == ["Q"]:
                F = QQ
            elif len(parts) == 2 and parts[0] in ("F", "Fp") and parts[1].isdigit():
                try:
                    F = Field(int(parts[1]))
                except FieldError as exc:
                    raise DSLParseError(str(exc), ln, rest_col) from exc
            else:
                raise DSLParseError("expected 'field Q' or 'field F <prime>'", ln, rest_col)
        elif head == "vertices":
            vertices = rest.split()
            if not vertices:
                raise DSLParseError("no vertices given", ln, rest_col)
            if len(set(vertices)) != len(vertices):
                raise DSLParseError("duplicate vertex label", ln, rest_col)
        elif head == "arrow":
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\S+)\s*->\s*(\S+)\s*", rest)
            if m is None:
                raise DSLParseError("expected 'arrow <name> : <u> -> <v>'", ln, rest_col)
            if vertices is None:
                raise DSLParseError("arrows must follow the vertices line", ln, indent + 1)
            name, u, v = m.groups()
            for lab in (u, v):
                if lab not in vertices:
                    raise DSLParseError(f"unknown vertex {lab!r}", ln, rest_col + rest.find(lab))
            if name in arrow_idx:
                raise DSLParseError(f"duplicate arrow {name!r}", ln, rest_col)
            arrow_idx[name] = len(arrows)
            arrows.append(Arrow(name, vertices.index(u), vertices.index(v)))
        elif head == "relation":
            relations.append((ln, _tokens(rest, ln, rest_col - 1)))
        elif head == "module":
            name = rest.strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
                raise DSLParseError("expected 'module <name>'", ln, rest_col)
            if name in modules:
                raise DSLParseError(f"duplicate module {name!r}", ln, rest_col)
            current = ModuleLiteral(name, [])
            modules[name] = current
            module_lines[name] = []
        else:
            raise DSLParseError(f"unknown directive {head!r}", ln, indent + 1)
    if current is not None:
        raise DSLParseError(f"module {current.name!r} is missing 'end'", len(lines), 1)
    if vertices is None:
        raise DSLParseError("missing vertices line", max(len(lines), 1), 1)
    if F is None:
        F = QQ
    if field is not None:
        F = field
    rels = []
    for ln, toks in relations:
        rel = _parse_relation(F, toks, arrow_idx, ln)
        if not rel:
            raise DSLParseError("relation is zero", ln, 1)
        try:
            Algebra._check_relation_static(arrows, rel)
        except ValueError as exc:
            raise DSLParseError(str(exc), ln, toks[0][2] if toks else 1) from exc
        rels.append(rel)
    A = Algebra(F, vertices, arrows, rels, **kwargs)
    for name, lit in modules.items():
        if len(lit.dims) != A.n:
            raise DSLParseError(f"module {name!r} needs {A.n} dimensions", len(lines), 1)
        for arrow_name, mat, ln, col in module_lines[name]:
            if arrow_name not in arrow_idx:
                raise DSLParseError(f"unknown arrow {arrow_name!r}", ln, col)
            lit.maps[arrow_name] = parse_matrix(F, mat, ln, col)
    return A, modules


def _check_relation_static(arrows: Sequence[Arrow], rel: Mapping[tuple, object]) -> None:
    ends = set()
    for word in rel:
        if len(word) < 2:
            raise ValueError("relation paths must have length at least 2")
        for x, y in zip(word, word[1:]):
            if arrows[x].target != arrows[y].source:
                raise ValueError("relation path is not composable")
        ends.add((arrows[word[0]].source, arrows[word[-1]].target))
    if len(ends) != 1:
        raise ValueError("relation paths are not parallel")


Algebra._check_relation_static = staticmethod(_check_relation_static)


def parse_algebra(text: str, field: Field | None = None, **kwargs) -> Algebra:
    return parse_document(text, field, **kwargs)[0]


def opposite_algebra(A: Algebra) -> Algebra:
    return A.opposite()


def path_algebra(
    n: int,
    arrows: Sequence[tuple[str, int, int]],
    relations: Sequence[Mapping[tuple, object]] | Sequence[Sequence[str]] = (),
    field: Field = QQ,
    labels: Sequence[str] | None = None,
    length_cap: int = DEFAULT_LENGTH_CAP,
) -> Algebra:
    """Convenience constructor; monomial relations may be given as name lists."""
    arrs = [Arrow(name, s, t) for name, s, t in arrows]
    idx = {a.name: k for k, a in enumerate(arrs)}
    rels = []
    for r in relations:
        if isinstance(r, Mapping):
            rels.append({tuple(w): field(c) for w, c in r.items()})
        else:
            rels.append({tuple(idx[x] for x in r): field.one})
    verts = list(labels) if labels is not None else [str(i + 1) for i in range(n)]
    return Algebra(field, verts, arrs, rels, length_cap=length_cap)
