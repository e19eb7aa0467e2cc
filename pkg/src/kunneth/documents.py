"""Builders and a serialization format for chain complexes.

Builders produce small standard complexes (spheres, Moore complexes,
real projective spaces) plus seeded random complexes, free and finitely
presented.  Random free complexes are assembled from primitive summands
(spheres, Moore complexes, acyclic two-term pieces) and then mixed by
elementary unimodular changes of basis, so d o d = 0 holds by
construction while boundary entries stay within a requested bound.

The document format is canonical JSON with every integer rendered as a
decimal string, so documents survive any parser without precision loss
and serialization round-trips bit-for-bit.
"""

import json
from math import gcd

from .linalg import Mat
from .abgroups import FpAbGroup, GroupMorphism
from .complexes import FreeChainComplex, FpChainComplex, ChainMap


class DocumentError(ValueError):
    """Raised when a complex document cannot be parsed or validated."""


# ---------------------------------------------------------------------------
# standard complexes


def sphere(n):
    """Chain complex of an n-sphere (reduced): a single Z in degree n.

    >>> sphere(2).homology(2).group.free_rank
    1
    """
    return FreeChainComplex(n, [1], {})


def point():
    """A single Z in degree 0."""
    return sphere(0)


def moore(m, n):
    """Moore complex: Z --(* m)--> Z in degrees n+1, n, so H_n = Z/m.

    >>> moore(2, 1).homology(1).group.invariant_factors
    (2,)
    >>> moore(2, 1).homology(2).group.is_trivial
    True
    """
    return FreeChainComplex(n, [1, 1], {n + 1: Mat([[m]])})


def acyclic(n):
    """Z --(* 1)--> Z in degrees n+1, n; no homology at all."""
    return moore(1, n)


def rp(n):
    """Cellular chain complex of real projective n-space.

    One cell per degree 0..n, boundary maps alternating 0, 2, 0, 2, ...

    >>> [rp(3).homology(k).group.invariant_factors for k in range(4)]
    [(), (2,), (), ()]
    """
    if n < 0:
        raise ValueError("rp(n) needs n >= 0")
    boundaries = {}
    for k in range(1, n + 1):
        boundaries[k] = Mat([[1 + (-1) ** k]])
    return FreeChainComplex(0, [1] * (n + 1), boundaries)


# ---------------------------------------------------------------------------
# random free complexes


def _assemble(summands, lo, hi):
    """Direct sum of small free complexes, with per-summand offsets."""
    ranks = [0] * (hi - lo + 1)
    offsets = []
    for piece in summands:
        offs = {}
        for n in piece.degrees():
            offs[n] = ranks[n - lo]
            ranks[n - lo] += piece.rank(n)
        offsets.append(offs)
    boundaries = {}
    for n in range(lo + 1, hi + 1):
        if not (ranks[n - lo] and ranks[n - 1 - lo]):
            continue
        rows = [[0] * ranks[n - lo] for _ in range(ranks[n - 1 - lo])]
        for piece, offs in zip(summands, offsets):
            block = piece.boundary_matrix(n)
            if block.rows == 0 or block.cols == 0:
                continue
            r0, c0 = offs[n - 1], offs[n]
            for i in range(block.rows):
                for j in range(block.cols):
                    rows[r0 + i][c0 + j] = block.data[i][j]
        boundaries[n] = Mat(rows)
    return FreeChainComplex(lo, ranks, boundaries), offsets


def _mix_free(C, rng, max_entry, ops):
    """Elementary unimodular basis changes in every degree.

    Returns (mixed complex, U, Uinv) where U[n] maps new coordinates to
    old ones, so a chain map f transports to Vinv[n] * f[n] * U[n].
    An operation that would push a boundary entry past max_entry is
    skipped, never clamped.
    """
    bounds = {n: [list(row) for row in C.boundary_matrix(n).data]
              for n in C.degrees() if C.rank(n) and C.rank(n - 1)}
    U = {n: [[1 if i == j else 0 for j in range(C.rank(n))]
             for i in range(C.rank(n))] for n in C.degrees()}
    Uinv = {n: [list(row) for row in U[n]] for n in C.degrees()}
    for _ in range(ops):
        n = rng.randrange(C.lo, C.hi + 1)
        k = C.rank(n)
        if k < 2:
            continue
        i = rng.randrange(k)
        j = rng.randrange(k - 1)
        if j >= i:
            j += 1
        c = rng.choice((1, -1))
        # new basis vector e_i + c*e_j in degree n: column i of d_n gains
        # c * column j, row j of d_{n+1} loses c * row i.
        down = bounds.get(n)
        up = bounds.get(n + 1)
        ok = True
        if down is not None:
            ok = all(abs(row[i] + c * row[j]) <= max_entry for row in down)
        if ok and up is not None:
            ok = all(abs(up[j][col] - c * up[i][col]) <= max_entry
                     for col in range(len(up[0])))
        if not ok:
            continue
        if down is not None:
            for row in down:
                row[i] += c * row[j]
        if up is not None:
            for col in range(len(up[0])):
                up[j][col] -= c * up[i][col]
        for row in U[n]:
            row[i] += c * row[j]
        for col in range(k):
            Uinv[n][j][col] -= c * Uinv[n][i][col]
    mixed = FreeChainComplex(C.lo, [C.rank(n) for n in C.degrees()],
                             {n: Mat(rows) for n, rows in bounds.items()})
    mixed.validate()
    return (mixed,
            {n: Mat(rows) for n, rows in U.items()},
            {n: Mat(rows) for n, rows in Uinv.items()})


def _random_summands(rng, lo, hi, max_rank, max_entry):
    ranks = [0] * (hi - lo + 1)
    summands = []

    def fits(piece):
        return all(ranks[n - lo] < max_rank for n in piece.degrees())

    for _ in range(rng.randrange(2, 2 * max_rank + 2)):
        kind = rng.randrange(4)
        if kind == 0 or hi == lo:
            piece = sphere(rng.randrange(lo, hi + 1))
        elif kind in (1, 2):
            piece = moore(rng.randrange(2, max_entry + 1),
                          rng.randrange(lo, hi))
        else:
            piece = acyclic(rng.randrange(lo, hi))
        if fits(piece):
            summands.append(piece)
            for n in piece.degrees():
                ranks[n - lo] += piece.rank(n)
    if not summands:
        summands.append(sphere(lo))
    return summands


def random_free_complex(rng, max_degree=5, max_rank=4, max_entry=6):
    """Seeded random free complex with bounded degrees, ranks and entries.

    Homology is a direct sum of Z's and Z/m's with 2 <= m <= max_entry,
    but the basis is scrambled so boundary matrices are not diagonal.
    """
    hi = rng.randrange(1, max_degree + 1)
    summands = _random_summands(rng, 0, hi, max_rank, max_entry)
    C, _ = _assemble(summands, 0, hi)
    total = sum(C.rank(n) for n in C.degrees())
    mixed, _, _ = _mix_free(C, rng, max_entry, ops=3 * total)
    return mixed


def _primitive_maps(P, Q):
    """All chain maps between two primitives (rank <= 1 per degree) with
    scalar entries bounded by 2, enumerated exactly."""
    shared = [n for n in P.degrees() if Q.rank(n) == 1 and P.rank(n) == 1]
    if not shared:
        return [{}]
    span = range(min(P.lo, Q.lo), max(P.hi, Q.hi) + 2)

    def ok(assign):
        for n in span:
            dP = P.boundary_matrix(n)
            dQ = Q.boundary_matrix(n)
            lhs = (assign.get(n - 1, 0) * dP.data[0][0]
                   if dP.rows and dP.cols else 0)
            rhs = (dQ.data[0][0] * assign.get(n, 0)
                   if dQ.rows and dQ.cols else 0)
            if lhs != rhs:
                return False
        return True

    out = []
    counts = [5] * len(shared)
    total = 1
    for c in counts:
        total *= c
    for code in range(total):
        assign = {}
        x = code
        for n in shared:
            assign[n] = x % 5 - 2
            x //= 5
        if ok(assign):
            out.append(assign)
    return out


def random_free_map(rng, max_degree=4, max_rank=3, max_entry=6):
    """A seeded random chain map between two random free complexes.

    Source and target are primitive sums sharing degrees, so blockwise
    maps between aligned primitives exist; the bases of both sides are
    then scrambled and the map transported, producing a dense-looking
    chain map that is frequently nonzero on homology and torsion.
    """
    hi = rng.randrange(1, max_degree + 1)
    src = _random_summands(rng, 0, hi, max_rank, max_entry)
    tgt = _random_summands(rng, 0, hi, max_rank, max_entry)
    C, offC = _assemble(src, 0, hi)
    D, offD = _assemble(tgt, 0, hi)
    rows = {n: [[0] * C.rank(n) for _ in range(D.rank(n))]
            for n in C.degrees()}
    for P, offs_p in zip(src, offC):
        for Q, offs_q in zip(tgt, offD):
            choices = _primitive_maps(P, Q)
            assign = rng.choice(choices)
            if rng.randrange(3) == 0:
                assign = {}
            for n, a in assign.items():
                rows[n][offs_q[n]][offs_p[n]] += a
    Cm, UC, _ = _mix_free(C, rng, max_entry,
                          ops=3 * sum(C.rank(n) for n in C.degrees()))
    Dm, _, VinvD = _mix_free(D, rng, max_entry,
                             ops=3 * sum(D.rank(n) for n in D.degrees()))
    mats = {}
    for n in C.degrees():
        if C.rank(n) and D.rank(n):
            mats[n] = VinvD[n] * Mat(rows[n]) * UC[n]
    return ChainMap(Cm, Dm, mats)


# ---------------------------------------------------------------------------
# random finitely presented complexes


def _cyclic_entry(rng, a, b):
    """A random t with t*a = 0 in Z/b: a valid image for a generator of
    Z/a inside Z/b (order 0 means an infinite cyclic factor)."""
    if b == 0:
        return rng.randrange(-2, 3) if a == 0 else 0
    if a == 0:
        return rng.randrange(b)
    step = b // gcd(a, b)
    return step * rng.randrange(gcd(a, b))


def random_fp_complex(rng, max_degree=4, max_gens=3, max_order=24):
    """Seeded random finitely presented complex.

    Degreewise groups are direct sums of cyclic groups of order at most
    max_order (order 0 meaning Z); boundaries come from two-term
    primitives, so d o d = 0 by construction; generators are then mixed
    by a unimodular change of presentation in every degree.
    """
    hi = rng.randrange(1, max_degree + 1)
    orders = {n: [] for n in range(hi + 1)}
    arrows = []   # (degree n, gen index in n, gen index in n-1, scalar)
    menu = (0, 0, 2, 2, 3, 4, 4, 6, 8, 9, 12, 24)
    for _ in range(rng.randrange(2, 3 * max_gens)):
        n = rng.randrange(hi + 1)
        order = rng.choice([m for m in menu if m <= max_order])
        if len(orders[n]) >= max_gens:
            continue
        orders[n].append(order)
        src = len(orders[n]) - 1
        if n > 0 and orders[n - 1] and rng.randrange(2):
            tgt = rng.randrange(len(orders[n - 1]))
            t = _cyclic_entry(rng, order, orders[n - 1][tgt])
            if t:
                arrows.append((n, src, tgt, t))
    for n in range(hi + 1):
        if not orders[n]:
            orders[n].append(rng.choice((0, 2, 4)))
    # A generator that is hit from above must not also map down, or
    # d o d = 0 could fail; dropping such arrows keeps sources and
    # targets disjoint.
    hit = {(n - 1, tgt) for (n, _, tgt, _) in arrows}
    arrows = [a for a in arrows if (a[0], a[1]) not in hit]

    groups = []
    unimix = []
    for n in range(hi + 1):
        k = len(orders[n])
        rel = [[orders[n][i] if i == j else 0 for j in range(k)]
               for i in range(k)]
        U = Mat.identity(k)
        Uinv = Mat.identity(k)
        for _ in range(2 * k):
            if k < 2:
                break
            i = rng.randrange(k)
            j = rng.randrange(k - 1)
            if j >= i:
                j += 1
            c = rng.choice((1, -1))
            E = [[1 if r == s else 0 for s in range(k)] for r in range(k)]
            E[j][i] = c
            Einv = [[1 if r == s else 0 for s in range(k)] for r in range(k)]
            Einv[j][i] = -c
            U = U * Mat(E)
            Uinv = Mat(Einv) * Uinv
        groups.append(FpAbGroup(k, Uinv * Mat(rel)))
        unimix.append((U, Uinv))
    boundaries = {}
    for n in range(1, hi + 1):
        rows = [[0] * len(orders[n]) for _ in range(len(orders[n - 1]))]
        for (m, src, tgt, t) in arrows:
            if m == n:
                rows[tgt][src] = t
        mat = unimix[n - 1][1] * Mat(rows) * unimix[n][0]
        if not mat.is_zero:
            boundaries[n] = GroupMorphism(groups[n], groups[n - 1], mat)
    C = FpChainComplex(0, groups, boundaries)
    C.validate()
    return C


# ---------------------------------------------------------------------------
# document format


def _int_str(x):
    return str(int(x))


def _mat_rows(M):
    return [[_int_str(e) for e in row] for row in M.data]


def _parse_int(token, where):
    if isinstance(token, int) and not isinstance(token, bool):
        return token
    if isinstance(token, str):
        body = token[1:] if token[:1] == "-" else token
        if body.isdigit():
            return int(token)
    raise DocumentError("%s: expected a decimal integer string, got %r"
                        % (where, token))


def _parse_matrix(entries, nrows, ncols, where):
    if not isinstance(entries, list):
        raise DocumentError("%s: expected a list of rows" % where)
    if len(entries) != nrows:
        raise DocumentError("%s: expected %d rows, got %d"
                            % (where, nrows, len(entries)))
    rows = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != ncols:
            raise DocumentError("%s: row %d should have %d entries"
                                % (where, i, ncols))
        rows.append([_parse_int(e, where) for e in row])
    return Mat(rows, cols=ncols) if nrows else Mat.zero(0, ncols)


def complex_document(C, name="complex"):
    """Serializable document (a plain dict) describing the complex."""
    doc = {"name": name, "lo": _int_str(C.lo)}
    degs = list(C.degrees())
    if C.is_free:
        doc["kind"] = "free"
        doc["ranks"] = [_int_str(C.rank(n)) for n in degs]
    else:
        doc["kind"] = "fp"
        doc["groups"] = [
            {"ngens": _int_str(C.group(n).ngens),
             "nrels": _int_str(C.group(n).rel.cols),
             "relations": _mat_rows(C.group(n).rel)}
            for n in degs]
    doc["boundaries"] = {
        _int_str(n): _mat_rows(C.boundary_matrix(n))
        for n in degs[1:] if not C.boundary_matrix(n).is_zero}
    return doc


def document_complex(doc):
    """Build and validate the complex a document describes."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a mapping")
    kind = doc.get("kind")
    if kind not in ("free", "fp"):
        raise DocumentError("kind must be 'free' or 'fp', got %r" % (kind,))
    lo = _parse_int(doc.get("lo", "0"), "lo")
    raw_bounds = doc.get("boundaries", {})
    if not isinstance(raw_bounds, dict):
        raise DocumentError("boundaries must be a mapping degree -> matrix")

    if kind == "free":
        ranks_doc = doc.get("ranks")
        if not isinstance(ranks_doc, list) or not ranks_doc:
            raise DocumentError("free document needs a nonempty 'ranks' list")
        ranks = [_parse_int(r, "ranks") for r in ranks_doc]
        if any(r < 0 for r in ranks):
            raise DocumentError("ranks must be nonnegative")
        dims = {lo + i: r for i, r in enumerate(ranks)}
    else:
        groups_doc = doc.get("groups")
        if not isinstance(groups_doc, list) or not groups_doc:
            raise DocumentError("fp document needs a nonempty 'groups' list")
        groups = []
        for i, g in enumerate(groups_doc):
            where = "group in degree %d" % (lo + i)
            if not isinstance(g, dict):
                raise DocumentError("%s: expected a mapping" % where)
            ngens = _parse_int(g.get("ngens", "0"), where)
            nrels = _parse_int(g.get("nrels", "0"), where)
            rel = _parse_matrix(g.get("relations", []), ngens, nrels, where)
            groups.append(FpAbGroup(ngens, rel))
        dims = {lo + i: g.ngens for i, g in enumerate(groups)}

    hi = lo + len(dims) - 1
    mats = {}
    for key in raw_bounds:
        n = _parse_int(key, "boundary degree")
        if not (lo < n <= hi):
            raise DocumentError(
                "boundary matrix in degree %d is outside the range %d..%d"
                % (n, lo + 1, hi))
        where = "boundary matrix in degree %d" % n
        mats[n] = _parse_matrix(raw_bounds[key], dims[n - 1], dims[n], where)

    try:
        if kind == "free":
            C = FreeChainComplex(lo, ranks, mats)
        else:
            bounds = {n: GroupMorphism(groups[n - lo], groups[n - lo - 1], m)
                      for n, m in mats.items()}
            C = FpChainComplex(lo, groups, bounds)
        C.validate()
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    return C


def dump_document(doc):
    """Canonical text form: sorted keys, two-space indent, final newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_document(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("not valid JSON: %s" % exc) from exc


def serialize_complex(C, name="complex"):
    return dump_document(complex_document(C, name))


def parse_complex(text):
    return document_complex(load_document(text))
