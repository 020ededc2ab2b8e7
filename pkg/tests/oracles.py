"""Independent reference computations used to check the library."""

from __future__ import annotations

import itertools

import sympy

from strata.exactlin import Field


def _to_sympy(F: Field, x):
    fr = F.to_fraction(x)
    return sympy.Rational(fr.numerator, fr.denominator)


def _nullity(F: Field, rows: list[list], ncols: int) -> int:
    if ncols == 0:
        return 0
    if not rows:
        return ncols
    if F.p is None:
        M = sympy.Matrix(rows)
        return ncols - M.rank()
    M = sympy.Matrix(rows)
    return ncols - _rank_mod(M, F.p)


def _rank_mod(M, p: int) -> int:
    rows = [[int(x) % p for x in M.row(i)] for i in range(M.rows)]
    rank, col, ncols = 0, 0, M.cols
    while rank < len(rows) and col < ncols:
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [(x - c * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def _mat(F: Field, X):
    return sympy.Matrix(X.shape[0], X.shape[1], [_to_sympy(F, x) for x in X.reshape(-1)])


def hom_dim(M, N) -> int:
    """Solve ``M_a H_t = H_s N_a`` for all arrows by brute linear algebra."""
    A, F = M.A, M.F
    offs, total = [], 0
    for v in range(A.n):
        offs.append(total)
        total += M.dims[v] * N.dims[v]

    def var(v, i, j):
        return offs[v] + i * N.dims[v] + j

    rows = []
    for k, a in enumerate(A.arrows):
        s, t = a.source, a.target
        Ma, Na = _mat(F, M.maps[k]), _mat(F, N.maps[k])
        for i in range(M.dims[s]):
            for j in range(N.dims[t]):
                row = [0] * total
                for l in range(M.dims[t]):
                    row[var(t, l, j)] += Ma[i, l]
                for l in range(N.dims[s]):
                    row[var(s, i, l)] -= Na[l, j]
                rows.append(row)
    return _nullity(F, rows, total)


def ext1_dim(M, N) -> int:
    """Cocycles ``Z_a: M_s -> N_t`` making the block-triangular representation satisfy the relations, modulo coboundaries."""
    A, F = M.A, M.F
    offs, total = [], 0
    for a in A.arrows:
        offs.append(total)
        total += M.dims[a.source] * N.dims[a.target]
    Mm = [_mat(F, X) for X in M.maps]
    Nm = [_mat(F, X) for X in N.maps]

    def word(mats, w, s):
        d = (M if mats is Mm else N).dims[s]
        out = sympy.eye(d)
        for k in w:
            out = out * mats[k]
        return out

    rows = []
    for rel in A.relations:
        w0 = next(iter(rel))
        s, t = A.arrows[w0[0]].source, A.arrows[w0[-1]].target
        # coefficient of each cocycle variable in the off-diagonal block of the relation
        for i in range(M.dims[s]):
            for j in range(N.dims[t]):
                row = [0] * total
                for w, c in rel.items():
                    cc = _to_sympy(F, c)
                    for pos, k in enumerate(w):
                        a = A.arrows[k]
                        left = word(Mm, w[:pos], s)
                        right = word(Nm, w[pos + 1 :], a.target)
                        for x in range(M.dims[a.source]):
                            for y in range(N.dims[a.target]):
                                coeff = left[i, x] * right[y, j]
                                if coeff:
                                    row[offs[k] + x * N.dims[a.target] + y] += cc * coeff
                rows.append(row)
    cocycles = _nullity(F, rows, total)
    # coboundaries: Z_a = H_s N_a - M_a H_t
    hoffs, htotal = [], 0
    for v in range(A.n):
        hoffs.append(htotal)
        htotal += M.dims[v] * N.dims[v]
    cols = []
    for v in range(A.n):
        for i in range(M.dims[v]):
            for j in range(N.dims[v]):
                vec = [0] * total
                for k, a in enumerate(A.arrows):
                    if a.source == v:
                        for y in range(N.dims[a.target]):
                            vec[offs[k] + i * N.dims[a.target] + y] += Nm[k][j, y]
                    if a.target == v:
                        for x in range(M.dims[a.source]):
                            vec[offs[k] + x * N.dims[a.target] + j] -= Mm[k][x, i]
                cols.append(vec)
    if not cols or total == 0:
        coboundaries = 0
    else:
        Mc = sympy.Matrix(cols)
        coboundaries = Mc.rank() if F.p is None else _rank_mod(Mc, F.p)
    return cocycles - coboundaries


def enumerate_hom(H, p: int):
    """Every element of a Hom space over ``F_p``."""
    F = H.M.F
    for coeffs in itertools.product(range(p), repeat=H.dim):
        yield H.element([F(c) for c in coeffs])
