"""Bounded chain complexes over Z, their homology, tensor products, weak
splittings and free approximations.

Two kinds of complexes coexist here:

* `FreeChainComplex`: free modules with chosen bases, boundaries as integer
  matrices.  Cycles and boundaries are honest sublattices (cycles come out
  saturated automatically, boundary lattices get canonical Hermite bases).
* `FpChainComplex`: degreewise finitely presented groups with boundary
  morphisms.  Homology is computed by kernel/cokernel arithmetic.

Both expose the same coordinate-level interface (group(n), boundary
matrices/morphisms, homology with class_of/rep), so the splitting machinery
upstairs does not care which kind it is handed.

Sign convention, fixed once: d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroups import FpAbGroup, GroupMorphism, direct_sum
from .linalg import (
    ColumnReduction,
    Mat,
    hermite_column_basis,
    solve_matrix,
)


class ComplexError(ValueError):
    pass


class Chain:
    """An element of C_n, as coordinates in the chosen generators."""

    __slots__ = ("complex", "degree", "coords")

    def __init__(self, complex, degree, coords):
        self.complex = complex
        self.degree = degree
        self.coords = tuple(int(x) for x in coords)
        if len(self.coords) != complex.ngens(degree):
            raise ComplexError("chain of wrong length in degree %d" % degree)

    def __add__(self, other):
        if self.degree != other.degree or self.complex is not other.complex:
            raise ComplexError("cannot add chains in different places")
        return Chain(self.complex, self.degree,
                     tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, k):
        return Chain(self.complex, self.degree, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    def boundary(self):
        return Chain(self.complex, self.degree - 1,
                     self.complex.boundary_matrix(self.degree).apply(self.coords))

    @property
    def is_cycle(self):
        return self.complex.is_zero_coords(self.degree - 1, self.boundary().coords)

    @property
    def is_zero(self):
        return self.complex.is_zero_coords(self.degree, self.coords)

    def __eq__(self, other):
        return (isinstance(other, Chain) and self.degree == other.degree
                and self.complex is other.complex and (self - other).is_zero)

    def __hash__(self):
        return hash((self.degree, self.coords))

    def __repr__(self):
        return "Chain(deg=%d, %r)" % (self.degree, list(self.coords))


class FreeChainComplex:
    """Bounded complex of finitely generated free abelian groups."""

    is_free = True

    def __init__(self, lo, ranks, boundaries):
        """ranks: list of ranks for degrees lo, lo+1, ...; boundaries: dict
        n -> Mat of shape rank(n-1) x rank(n)."""
        self.lo = lo
        self.hi = lo + len(ranks) - 1
        self._ranks = tuple(int(r) for r in ranks)
        self._d = {}
        for n in range(self.lo, self.hi + 1):
            d = boundaries.get(n)
            if d is None:
                d = Mat.zero(self.rank(n - 1), self.rank(n))
            if (d.rows, d.cols) != (self.rank(n - 1), self.rank(n)):
                raise ComplexError("boundary in degree %d has shape %dx%d, wanted %dx%d"
                                   % (n, d.rows, d.cols, self.rank(n - 1), self.rank(n)))
            self._d[n] = d
        self._homology = {}
        self._groups = {}
        self._cycle_reds = {}

    # -- structure ----------------------------------------------------

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def rank(self, n):
        if self.lo <= n <= self.hi:
            return self._ranks[n - self.lo]
        return 0

    ngens = rank

    def boundary_matrix(self, n):
        d = self._d.get(n)
        if d is None:
            d = Mat.zero(self.rank(n - 1), self.rank(n))
        return d

    def group(self, n):
        g = self._groups.get(n)
        if g is None:
            g = FpAbGroup.free(self.rank(n))
            self._groups[n] = g
        return g

    def boundary_morphism(self, n):
        return GroupMorphism(self.group(n), self.group(n - 1),
                             self.boundary_matrix(n), check=False)

    def is_zero_coords(self, n, coords):
        return not any(coords)

    def chain(self, n, coords):
        return Chain(self, n, coords)

    def zero_chain(self, n):
        return Chain(self, n, (0,) * self.rank(n))

    def basis_chain(self, n, i):
        return Chain(self, n, tuple(1 if j == i else 0 for j in range(self.rank(n))))

    def validate(self):
        for n in self.degrees():
            dd = self.boundary_matrix(n - 1) * self.boundary_matrix(n)
            if not dd.is_zero:
                raise ComplexError("d o d != 0 leaving degree %d" % n)
        return True

    # -- homology -----------------------------------------------------

    def cycle_reduction(self, n):
        red = self._cycle_reds.get(n)
        if red is None:
            red = ColumnReduction(self.boundary_matrix(n))
            self._cycle_reds[n] = red
        return red

    def homology(self, n):
        h = self._homology.get(n)
        if h is None:
            Z = self.cycle_reduction(n).kernel()
            B = hermite_column_basis(self.boundary_matrix(n + 1))
            rel = solve_matrix(Z, B)
            if rel is None:
                raise ComplexError("boundaries escape cycles in degree %d "
                                   "(is d o d = 0?)" % n)
            h = FreeHomology(self, n, Z, B, FpAbGroup(Z.cols, rel))
            self._homology[n] = h
        return h

    def __repr__(self):
        return "FreeChainComplex(degrees %d..%d, ranks %r)" % (
            self.lo, self.hi, list(self._ranks))


class FreeHomology:
    """H_n of a free complex: cycle lattice (saturated, canonical basis),
    boundary lattice (canonical basis), and the quotient group presented on
    the cycle basis."""

    def __init__(self, complex, n, cycles, boundaries, group):
        self.complex = complex
        self.n = n
        self.cycles = cycles          # Mat: columns a basis of Z_n
        self.boundaries = boundaries  # Mat: columns the canonical basis of B_n
        self.group = group            # FpAbGroup on the cycle basis
        self._red = ColumnReduction(cycles)

    def class_of_coords(self, coords):
        if any(self.complex.boundary_matrix(self.n).apply(coords)):
            raise ComplexError("not a cycle in degree %d" % self.n)
        sol = self._red.solve(coords)
        if sol is None:
            raise ComplexError("cycle lattice solve failed")  # cannot happen: saturated
        return self.group.element(sol)

    def class_of(self, chain):
        if chain.degree != self.n:
            raise ComplexError("chain in the wrong degree")
        return self.class_of_coords(chain.coords)

    def rep_coords(self, helem):
        return self.cycles.apply(helem.coords)

    def rep(self, helem):
        return Chain(self.complex, self.n, self.rep_coords(helem))

    def is_boundary(self, chain):
        return self.class_of(chain).is_zero


def homology(C, n):
    """HomologyData of C in degree n; a zero group outside the support."""
    return C.homology(n)


def class_of(C, chain):
    return C.homology(chain.degree).class_of(chain)


def is_boundary(C, chain):
    return C.homology(chain.degree).is_boundary(chain)


# ------------------------------------------------------------ fp complexes


class FpChainComplex:
    """Degreewise finitely presented complex with boundary morphisms."""

    is_free = False

    def __init__(self, lo, groups, boundaries):
        """groups: list of FpAbGroup for degrees lo..; boundaries: dict
        n -> GroupMorphism groups[n] -> groups[n-1] (omitted means zero)."""
        self.lo = lo
        self.hi = lo + len(groups) - 1
        self._groups = {lo + i: g for i, g in enumerate(groups)}
        self._trivial = FpAbGroup.trivial()
        self._d = {}
        for n in range(self.lo, self.hi + 1):
            f = boundaries.get(n)
            if f is None:
                f = GroupMorphism.zero(self.group(n), self.group(n - 1))
            if f.source is not self.group(n) or f.target is not self.group(n - 1):
                raise ComplexError("boundary morphism in degree %d connects wrong groups" % n)
            self._d[n] = f
        self._homology = {}

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def group(self, n):
        return self._groups.get(n, self._trivial)

    def ngens(self, n):
        return self.group(n).ngens

    def rank(self, n):  # generator count; the groups need not be free
        return self.ngens(n)

    def boundary_morphism(self, n):
        f = self._d.get(n)
        if f is None:
            f = GroupMorphism.zero(self.group(n), self.group(n - 1))
        return f

    def boundary_matrix(self, n):
        return self.boundary_morphism(n).mat

    def is_zero_coords(self, n, coords):
        return self.group(n).is_zero_coords(coords)

    def chain(self, n, coords):
        return Chain(self, n, coords)

    def zero_chain(self, n):
        return Chain(self, n, (0,) * self.ngens(n))

    def validate(self):
        for n in self.degrees():
            f = self.boundary_morphism(n - 1).compose(self.boundary_morphism(n))
            for g in self.group(n).generators():
                if not f.apply(g).is_zero:
                    raise ComplexError("d o d != 0 leaving degree %d" % n)
        return True

    def homology(self, n):
        h = self._homology.get(n)
        if h is None:
            K, incl = self.boundary_morphism(n).kernel()
            up = self.boundary_morphism(n + 1)
            cols = []
            for g in up.source.generators():
                v = incl.preimage(up.apply(g))
                if v is None:
                    raise ComplexError("boundaries escape cycles in degree %d" % n)
                cols.append(v.coords)
            fact = GroupMorphism(up.source, K, Mat.from_cols(cols, rows=K.ngens), check=False)
            H, _ = fact.cokernel()
            h = FpHomology(self, n, K, incl, H)
            self._homology[n] = h
        return h

    def __repr__(self):
        return "FpChainComplex(degrees %d..%d)" % (self.lo, self.hi)


class FpHomology:
    def __init__(self, complex, n, cycles_group, cycles_incl, group):
        self.complex = complex
        self.n = n
        self.cycles_group = cycles_group
        self.cycles_incl = cycles_incl   # cycles_group -> C_n
        self.group = group               # presented on the cycle generators

    @property
    def cycles(self):
        return self.cycles_incl.mat

    def class_of_coords(self, coords):
        elem = self.complex.group(self.n).element(coords)
        if not self.complex.boundary_morphism(self.n).apply(elem).is_zero:
            raise ComplexError("not a cycle in degree %d" % self.n)
        v = self.cycles_incl.preimage(elem)
        if v is None:
            raise ComplexError("cycle subgroup solve failed")
        return self.group.element(v.coords)

    def class_of(self, chain):
        return self.class_of_coords(chain.coords)

    def rep_coords(self, helem):
        return self.cycles_incl.mat.apply(helem.coords)

    def rep(self, helem):
        return Chain(self.complex, self.n, self.rep_coords(helem))

    def is_boundary(self, chain):
        return self.class_of(chain).is_zero


# --------------------------------------------------------------- chain maps


class ChainMap:
    """A degree-zero map of complexes, one matrix per degree."""

    def __init__(self, source, target, mats, check=True):
        self.source = source
        self.target = target
        self.mats = {}
        for n in set(source.degrees()) | set(target.degrees()):
            m = mats.get(n)
            if m is None:
                m = Mat.zero(target.ngens(n), source.ngens(n))
            if (m.rows, m.cols) != (target.ngens(n), source.ngens(n)):
                raise ComplexError("chain map matrix in degree %d has wrong shape" % n)
            self.mats[n] = m
        if check:
            self.verify()

    def mat(self, n):
        m = self.mats.get(n)
        if m is None:
            m = Mat.zero(self.target.ngens(n), self.source.ngens(n))
        return m

    def verify(self):
        # well-definedness degreewise, then the commuting squares
        for n in self.source.degrees():
            GroupMorphism(self.source.group(n), self.target.group(n), self.mat(n))
        for n in self.source.degrees():
            left = self.mat(n - 1) * self.source.boundary_matrix(n)
            right = self.target.boundary_matrix(n) * self.mat(n)
            diff = left - right
            for j in range(diff.cols):
                if not self.target.is_zero_coords(n - 1, diff.col(j)):
                    raise ComplexError("not a chain map: square fails in degree %d" % n)
        return True

    def apply(self, chain):
        return Chain(self.target, chain.degree, self.mat(chain.degree).apply(chain.coords))

    def compose(self, other):
        if other.target is not self.source:
            raise ComplexError("chain map composition mismatch")
        return ChainMap(other.source, self.target,
                        {n: self.mat(n) * other.mat(n)
                         for n in set(self.mats) | set(other.mats)},
                        check=False)

    def __add__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.mat(n) + other.mat(n) for n in self.mats}, check=False)

    def __sub__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.mat(n) - other.mat(n) for n in self.mats}, check=False)

    def __neg__(self):
        return ChainMap(self.source, self.target,
                        {n: -self.mat(n) for n in self.mats}, check=False)

    @classmethod
    def identity(cls, C):
        return cls(C, C, {n: Mat.identity(C.ngens(n)) for n in C.degrees()}, check=False)

    def induced(self, n):
        """The induced map H_n(source) -> H_n(target)."""
        hs = self.source.homology(n)
        ht = self.target.homology(n)
        cols = []
        for g in hs.group.generators():
            image = self.mat(n).apply(hs.rep_coords(g))
            cols.append(ht.class_of_coords(image).coords)
        return GroupMorphism(hs.group, ht.group,
                             Mat.from_cols(cols, rows=ht.group.ngens))

    def is_quasi_iso(self):
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        return all(self.induced(n).is_isomorphism for n in range(lo, hi + 1))


def is_quasi_iso(f):
    return f.is_quasi_iso()


def direct_sum_complexes(C, D):
    """(C + D, include_C, include_D, project_C, project_D) for free C, D."""
    if not (C.is_free and D.is_free):
        raise ComplexError("direct sum implemented for free complexes")
    lo = min(C.lo, D.lo)
    hi = max(C.hi, D.hi)
    ranks = [C.rank(n) + D.rank(n) for n in range(lo, hi + 1)]
    bnd = {}
    for n in range(lo, hi + 1):
        dc, dd = C.boundary_matrix(n), D.boundary_matrix(n)
        rows = C.rank(n - 1) + D.rank(n - 1)
        cols = []
        for j in range(dc.cols):
            cols.append(tuple(dc.col(j)) + (0,) * D.rank(n - 1))
        for j in range(dd.cols):
            cols.append((0,) * C.rank(n - 1) + tuple(dd.col(j)))
        bnd[n] = Mat.from_cols(cols, rows=rows)
    S = FreeChainComplex(lo, ranks, bnd)
    inc_C = ChainMap(C, S, {n: Mat.from_cols(
        [tuple(1 if i == j else 0 for i in range(S.rank(n))) for j in range(C.rank(n))],
        rows=S.rank(n)) for n in range(lo, hi + 1)}, check=False)
    inc_D = ChainMap(D, S, {n: Mat.from_cols(
        [tuple(1 if i == C.rank(n) + j else 0 for i in range(S.rank(n))) for j in range(D.rank(n))],
        rows=S.rank(n)) for n in range(lo, hi + 1)}, check=False)
    prj_C = ChainMap(S, C, {n: Mat([[1 if j == i else 0 for j in range(S.rank(n))]
                                    for i in range(C.rank(n))], cols=S.rank(n))
                            for n in range(lo, hi + 1)}, check=False)
    prj_D = ChainMap(S, D, {n: Mat([[1 if j == C.rank(n) + i else 0 for j in range(S.rank(n))]
                                    for i in range(D.rank(n))], cols=S.rank(n))
                            for n in range(lo, hi + 1)}, check=False)
    return S, inc_C, inc_D, prj_C, prj_D


# ------------------------------------------------------------------ tensor


class TensorComplex(FreeChainComplex):
    """C (x) D for free C and D, with the block bookkeeping exposed.

    Basis of degree n: pairs (e^p_i, f^q_j) with p + q = n, ordered by p
    ascending, then i, then j.
    """

    def __init__(self, C, D):
        if not (C.is_free and D.is_free):
            raise ComplexError("tensor_complex needs free complexes; "
                               "use a free approximation first")
        self.left = C
        self.right = D
        lo = C.lo + D.lo
        hi = C.hi + D.hi
        self._blocks = {}
        ranks = []
        for n in range(lo, hi + 1):
            blocks = []
            offset = 0
            for p in C.degrees():
                q = n - p
                if C.rank(p) and D.rank(q):
                    blocks.append((p, q, offset))
                    offset += C.rank(p) * D.rank(q)
            self._blocks[n] = blocks
            ranks.append(offset)
        boundaries = {}
        for n in range(lo, hi + 1):
            rows = ranks[n - 1 - lo] if n > lo else 0
            entries = [[0] * ranks[n - lo] for _ in range(rows)]
            for (p, q, off) in self._blocks[n]:
                dc = C.boundary_matrix(p)
                dd = D.boundary_matrix(q)
                sgn = -1 if p % 2 else 1
                for i in range(C.rank(p)):
                    for j in range(D.rank(q)):
                        src = off + i * D.rank(q) + j
                        # dC part: block (p-1, q)
                        t = self._find_offset(n - 1, p - 1, q)
                        if t is not None:
                            for k in range(C.rank(p - 1)):
                                v = dc.data[k][i]
                                if v:
                                    entries[t + k * D.rank(q) + j][src] += v
                        # dD part: block (p, q-1), Koszul sign (-1)^p
                        t = self._find_offset(n - 1, p, q - 1)
                        if t is not None:
                            for l in range(D.rank(q - 1)):
                                v = dd.data[l][j]
                                if v:
                                    entries[t + i * D.rank(q - 1) + l][src] += sgn * v
            boundaries[n] = Mat(entries, cols=ranks[n - lo])
        super().__init__(lo, ranks, boundaries)

    def _find_offset(self, n, p, q):
        for (pp, qq, off) in self._blocks.get(n, ()):
            if pp == p and qq == q:
                return off
        return None

    def blocks(self, n):
        return list(self._blocks.get(n, ()))

    def pair_index(self, p, q, i, j):
        off = self._find_offset(p + q, p, q)
        if off is None:
            raise ComplexError("no (%d, %d) block in degree %d" % (p, q, p + q))
        return off + i * self.right.rank(q) + j

    def pair_chain(self, x, y):
        """x (x) y for chains x of C and y of D."""
        n = x.degree + y.degree
        coords = [0] * self.rank(n)
        off = self._find_offset(n, x.degree, y.degree)
        if off is None and any(x.coords) and any(y.coords):
            raise ComplexError("no block for that bidegree")
        if off is not None:
            w = self.right.rank(y.degree)
            for i, a in enumerate(x.coords):
                if a:
                    for j, b in enumerate(y.coords):
                        if b:
                            coords[off + i * w + j] = a * b
        return Chain(self, n, coords)

    def component_matrix(self, chain, p, q):
        """The (p, q) block of a chain, as a rank C_p x rank D_q matrix."""
        off = self._find_offset(p + q, p, q)
        rc, rd = self.left.rank(p), self.right.rank(q)
        if off is None:
            return Mat.zero(rc, rd)
        return Mat([[chain.coords[off + i * rd + j] for j in range(rd)] for i in range(rc)],
                   cols=rd)


def tensor_complex(C, D):
    """The tensor product complex of two *free* complexes; inputs with
    relations are rejected (approximate them freely first)."""
    return TensorComplex(C, D)


class FpTensorComplex(FpChainComplex):
    """C (x) D where at most one factor is merely finitely presented.

    Used internally (Dold-style comparisons of approximations); the public
    tensor_complex stays free-only per the interface contract.
    """

    def __init__(self, C, D):
        self.left = C
        self.right = D
        lo = C.lo + D.lo
        hi = C.hi + D.hi
        self._blocks = {}
        groups = []
        gens_count = []
        for n in range(lo, hi + 1):
            blocks = []
            offset = 0
            for p in C.degrees():
                q = n - p
                if C.ngens(p) and D.ngens(q):
                    blocks.append((p, q, offset))
                    offset += C.ngens(p) * D.ngens(q)
            self._blocks[n] = blocks
            gens_count.append(offset)
        # relations: rel(C_p) (x) gen + gen (x) rel(D_q), blockwise
        for n in range(lo, hi + 1):
            total = gens_count[n - lo]
            cols = []
            for (p, q, off) in self._blocks[n]:
                relC = C.group(p).rel
                relD = D.group(q).rel
                w = D.ngens(q)
                for jrel in range(relC.cols):
                    r = relC.col(jrel)
                    for j in range(w):
                        col = [0] * total
                        for i in range(C.ngens(p)):
                            if r[i]:
                                col[off + i * w + j] = r[i]
                        cols.append(tuple(col))
                for i in range(C.ngens(p)):
                    for jrel in range(relD.cols):
                        s = relD.col(jrel)
                        col = [0] * total
                        for j in range(w):
                            if s[j]:
                                col[off + i * w + j] = s[j]
                        cols.append(tuple(col))
            groups.append(FpAbGroup(total, hermite_column_basis(
                Mat.from_cols(cols, rows=total))))
        boundaries = {}
        for n in range(lo + 1, hi + 1):
            rows = gens_count[n - 1 - lo]
            entries = [[0] * gens_count[n - lo] for _ in range(rows)]
            for (p, q, off) in self._blocks[n]:
                dc = C.boundary_matrix(p)
                dd = D.boundary_matrix(q)
                sgn = -1 if p % 2 else 1
                w = D.ngens(q)
                for i in range(C.ngens(p)):
                    for j in range(w):
                        src = off + i * w + j
                        t = self._find_offset(n - 1, p - 1, q)
                        if t is not None:
                            for k in range(C.ngens(p - 1)):
                                v = dc.data[k][i]
                                if v:
                                    entries[t + k * w + j][src] += v
                        t = self._find_offset(n - 1, p, q - 1)
                        if t is not None:
                            wd = D.ngens(q - 1)
                            for l in range(wd):
                                v = dd.data[l][j]
                                if v:
                                    entries[t + i * wd + l][src] += sgn * v
            boundaries[n] = Mat(entries, cols=gens_count[n - lo])
        super().__init__(lo, groups, {})
        for n in range(lo + 1, hi + 1):
            self._d[n] = GroupMorphism(self.group(n), self.group(n - 1), boundaries[n])

    def _find_offset(self, n, p, q):
        for (pp, qq, off) in self._blocks.get(n, ()):
            if pp == p and qq == q:
                return off
        return None

    def blocks(self, n):
        return list(self._blocks.get(n, ()))

    def pair_chain(self, x, y):
        n = x.degree + y.degree
        coords = [0] * self.ngens(n)
        off = self._find_offset(n, x.degree, y.degree)
        if off is not None:
            w = self.right.ngens(y.degree)
            for i, a in enumerate(x.coords):
                if a:
                    for j, b in enumerate(y.coords):
                        if b:
                            coords[off + i * w + j] = a * b
        return Chain(self, n, coords)


def tensor_complex_general(C, D):
    """Tensor product allowing finitely presented factors."""
    if C.is_free and D.is_free:
        return TensorComplex(C, D)
    return FpTensorComplex(C, D)


def tensor_chain_map(f, g, T_source, T_target):
    """f (x) g on tensor complexes (both maps of degree zero, so no signs)."""
    mats = {}
    for n in set(T_source.degrees()):
        rows = T_target.ngens(n)
        entries = [[0] * T_source.ngens(n) for _ in range(rows)]
        for (p, q, off) in T_source.blocks(n):
            fm = f.mat(p)
            gm = g.mat(q)
            t_off = T_target._find_offset(n, p, q)
            if t_off is None:
                if not (fm.is_zero or gm.is_zero):
                    raise ComplexError("image block missing in degree %d" % n)
                continue
            ws = T_source.right.ngens(q)
            wt = T_target.right.ngens(q)
            for i in range(fm.cols):
                for j in range(ws):
                    src = off + i * ws + j
                    for k in range(fm.rows):
                        a = fm.data[k][i]
                        if a:
                            for l in range(wt):
                                b = gm.data[l][j]
                                if b:
                                    entries[t_off + k * wt + l][src] += a * b
        mats[n] = Mat(entries, cols=T_source.ngens(n))
    return ChainMap(T_source, T_target, mats, check=False)


# ------------------------------------------------------------ mod reduction


@dataclass(frozen=True)
class ModReduction:
    base: object          # the original complex
    complex: FpChainComplex
    r: int

    def reduce_chain(self, chain):
        """The image of a chain of the base complex."""
        return Chain(self.complex, chain.degree, chain.coords)

    def lift_chain(self, chain):
        """An integer lift (free base complexes only): same coordinates."""
        return Chain(self.base, chain.degree, chain.coords)


def mod_reduction(C, r):
    """C (x) Z/r, presented on the same generators.

    >>> C = FreeChainComplex(1, [1, 1], {2: Mat([[2]])})  # Z --2--> Z
    >>> M = mod_reduction(C, 2)
    >>> M.complex.homology(1).group.invariant_factors
    (2,)
    >>> M.complex.homology(2).group.invariant_factors
    (2,)
    """
    if r == 0:
        raise ComplexError("modulus must be nonzero")
    r = abs(r)
    groups = []
    for n in C.degrees():
        k = C.ngens(n)
        rel = C.group(n).rel.hstack(r * Mat.identity(k))
        groups.append(FpAbGroup(k, rel))
    red = FpChainComplex(C.lo, groups, {})
    for n in range(C.lo + 1, C.hi + 1):
        red._d[n] = GroupMorphism(red.group(n), red.group(n - 1),
                                  C.boundary_matrix(n), check=False)
    return ModReduction(base=C, complex=red, r=r)


# -------------------------------------------------------- boundary splitting


class BoundarySplitting:
    """A section sigma: B_n -> C_{n+1} of the boundary map, degreewise, for
    a free complex.  sigma is stored on the canonical basis of each boundary
    lattice; apply() solves an arbitrary boundary into that basis first."""

    def __init__(self, complex, sections):
        self.complex = complex
        self.sections = sections  # {n: Mat rank(n+1) x B_n.cols}
        self._reds = {}

    def section_matrix(self, n):
        return self.sections.get(n, Mat.zero(self.complex.rank(n + 1), 0))

    def apply(self, chain):
        """sigma(b) for a boundary chain b in degree n."""
        n = chain.degree
        h = self.complex.homology(n)
        red = self._reds.get(n)
        if red is None:
            red = ColumnReduction(h.boundaries)
            self._reds[n] = red
        c = red.solve(chain.coords)
        if c is None:
            raise ComplexError("chain is not a boundary in degree %d" % n)
        return Chain(self.complex, n + 1, self.section_matrix(n).apply(c))

    def verify(self):
        for n, s in self.sections.items():
            d = self.complex.boundary_matrix(n + 1)
            if d * s != self.complex.homology(n).boundaries:
                raise ComplexError("section fails d o sigma = id on B_%d" % n)
        return True


def boundary_splitting(C, rng=None):
    """A boundary splitting of a free complex; deterministic by default,
    randomized over the allowed indeterminacy (cycle-valued shifts) when an
    rng is supplied."""
    if not C.is_free:
        raise ComplexError("boundary splittings live on free complexes")
    sections = {}
    for n in C.degrees():
        B = C.homology(n).boundaries
        if B.cols == 0:
            sections[n] = Mat.zero(C.rank(n + 1), 0)
            continue
        S = solve_matrix(C.boundary_matrix(n + 1), B)
        if S is None:
            raise ComplexError("boundary basis is not in the image in degree %d" % n)
        if rng is not None:
            Z = C.homology(n + 1).cycles
            if Z.cols:
                R = Mat([[rng.randrange(-2, 3) for _ in range(B.cols)]
                         for _ in range(Z.cols)], cols=B.cols)
                S = S + Z * R
        sections[n] = S
    return BoundarySplitting(C, sections)


# ------------------------------------------------------------ weak splitting


class WeakSplitting:
    """Per degree n, a free resolution 0 -> Bhat_n --iota--> Zhat_n -> H_n -> 0
    together with phi_n: Zhat_n -> Z_n(C) and psi_n: Bhat_n -> C_{n+1}
    satisfying [phi(z)] = pi(z) and d(psi(b)) = phi(iota(b)).

    Zhat_n is free on the generators H_n is presented on (so pi is the
    identity matrix), Bhat_n is the canonical basis of the relation lattice.
    """

    def __init__(self, complex, data):
        self.complex = complex
        self.data = data  # {n: (iota: Mat, phi: Mat, psi: Mat)}

    def zhat_rank(self, n):
        return self.complex.homology(n).group.ngens

    def bhat_rank(self, n):
        return self.iota(n).cols

    def iota(self, n):
        return self.data[n][0] if n in self.data else Mat.zero(self.zhat_rank(n), 0)

    def phi(self, n):
        return self.data[n][1] if n in self.data else Mat.zero(self.complex.ngens(n), 0)

    def psi(self, n):
        return self.data[n][2] if n in self.data else Mat.zero(self.complex.ngens(n + 1), 0)

    def lift(self, helem, n):
        """A Zhat-vector mapping onto a homology class (pi = id: coordinates)."""
        return tuple(helem.coords)

    def iota_preimage(self, n, zvec):
        """The unique b with iota(b) = zvec (zvec must be in the relation
        lattice, i.e. represent 0 in H_n)."""
        sol = ColumnReduction(self.iota(n)).solve(zvec)
        if sol is None:
            raise ComplexError("vector is not in the image of iota")
        return sol

    def verify(self):
        C = self.complex
        for n, (iota, phi, psi) in self.data.items():
            h = C.homology(n)
            # iota is the relation lattice of H_n: both inclusions
            for j in range(h.group.rel.cols):
                if ColumnReduction(iota).solve(h.group.rel.col(j)) is None:
                    raise ComplexError("iota misses a relation in degree %d" % n)
            for j in range(iota.cols):
                if not h.group.is_zero_coords(iota.col(j)):
                    raise ComplexError("iota column is not a relation in degree %d" % n)
            # phi lands on cycles representing the right classes
            for j in range(phi.cols):
                cls = h.class_of_coords(phi.col(j))
                if cls != h.group.gen(j):
                    raise ComplexError("phi misrepresents generator %d in degree %d" % (j, n))
            # d psi = phi iota
            lhs = C.boundary_matrix(n + 1) * psi
            rhs = phi * iota
            diff = lhs - rhs
            for j in range(diff.cols):
                if not C.is_zero_coords(n, diff.col(j)):
                    raise ComplexError("d psi != phi iota in degree %d" % n)
        return True


def weak_splitting(C, rng=None):
    """A weak splitting of a free or finitely presented complex.

    phi is chosen onto the cycles (so the induced free approximation is
    surjective); with an rng, phi is shifted by boundary-valued maps and psi
    by cycle-valued maps, which walks over genuinely different weak
    splittings of the same resolution.
    """
    data = {}
    for n in C.degrees():
        h = C.homology(n)
        zmat = h.cycles                       # Zhat generators as chains
        iota = hermite_column_basis(h.group.rel)
        phi = zmat
        if rng is not None and zmat.cols:
            bgen = boundary_generators(C, n)
            if bgen.cols:
                R = Mat([[rng.randrange(-2, 3) for _ in range(zmat.cols)]
                         for _ in range(bgen.cols)], cols=zmat.cols)
                phi = phi + bgen * R
        # psi: solve d x = phi(iota(b)) for each Bhat generator
        target = phi * iota
        psi_cols = []
        for j in range(iota.cols):
            x = boundary_preimage(C, n + 1, target.col(j))
            psi_cols.append(x)
        psi = Mat.from_cols(psi_cols, rows=C.ngens(n + 1))
        if rng is not None and psi.cols:
            zup = cycle_generators(C, n + 1)
            if zup.cols:
                R = Mat([[rng.randrange(-2, 3) for _ in range(psi.cols)]
                         for _ in range(zup.cols)], cols=psi.cols)
                psi = psi + zup * R
        data[n] = (iota, phi, psi)
    return WeakSplitting(C, data)


def cycle_generators(C, n):
    """Generators of the cycles in degree n, as columns in chain coordinates."""
    return C.homology(n).cycles


def boundary_generators(C, n):
    """Generators of the boundaries in degree n, as chain coordinates."""
    if C.is_free:
        return C.homology(n).boundaries
    up = C.boundary_matrix(n + 1)
    return up


def boundary_preimage(C, n, coords):
    """Some x in C_n with d x = the given degree n-1 coordinates (as an
    element: modulo relations for fp complexes)."""
    if C.is_free:
        sol = C.cycle_reduction(n).solve(coords)
    else:
        f = C.boundary_morphism(n)
        e = f.preimage(C.group(n - 1).element(coords))
        sol = e.coords if e is not None else None
    if sol is None:
        raise ComplexError("not a boundary in degree %d" % (n - 1))
    return sol


# --------------------------------------------------------- free approximation


class FreeApproximation:
    """A free complex Fhat with a quasi-isomorphism nu onto C and a chosen
    boundary splitting of Fhat.

    When built by free_approximation(), Fhat_n = Bhat_{n-1} + Zhat_n with
    differential (b, z) -> (0, iota(b)), nu = psi + phi, and the canonical
    splitting sigma(0, iota(b)) = (b, 0)."""

    def __init__(self, complex, F, nu, splitting, ws=None, block_info=None):
        self.complex = complex
        self.F = F
        self.nu = nu
        self.splitting = splitting
        self.ws = ws
        self.block_info = block_info or {}

    def is_surjective(self):
        for n in self.complex.degrees():
            red = ColumnReduction(self.nu.mat(n).hstack(self.complex.group(n).rel))
            for i in range(self.complex.ngens(n)):
                e = tuple(1 if k == i else 0 for k in range(self.complex.ngens(n)))
                if not red.contains(e):
                    return False
        return True

    def verify(self):
        self.F.validate()
        self.nu.verify()
        if not self.nu.is_quasi_iso():
            raise ComplexError("nu is not a quasi-isomorphism")
        return True


def free_approximation(C, ws=None, rng=None):
    """The free approximation built from a weak splitting of C."""
    if ws is None:
        ws = weak_splitting(C, rng=rng)
    lo = C.lo
    hi = C.hi + 1 if ws.bhat_rank(C.hi) else C.hi
    ranks = []
    block_info = {}
    for n in range(lo, hi + 1):
        b = ws.bhat_rank(n - 1)
        z = ws.zhat_rank(n) if n <= C.hi else 0
        block_info[n] = (b, z)
        ranks.append(b + z)
    boundaries = {}
    for n in range(lo + 1, hi + 1):
        b_lo, z_lo = block_info[n - 1]
        b_hi, z_hi = block_info[n]
        rows = b_lo + z_lo
        entries = [[0] * (b_hi + z_hi) for _ in range(rows)]
        iota = ws.iota(n - 1)
        for j in range(b_hi):
            for i in range(iota.rows):
                entries[b_lo + i][j] = iota.data[i][j]
        boundaries[n] = Mat(entries, cols=b_hi + z_hi)
    F = FreeChainComplex(lo, ranks, boundaries)
    nu_mats = {}
    for n in range(lo, hi + 1):
        b, z = block_info[n]
        psi = ws.psi(n - 1)
        phi = ws.phi(n)
        cols = [psi.col(j) for j in range(b)] + [phi.col(j) for j in range(z)]
        nu_mats[n] = Mat.from_cols(cols, rows=C.ngens(n))
    nu = ChainMap(F, C, nu_mats, check=False)
    # canonical splitting: sigma(0, iota(b)) = (b, 0)
    sections = {}
    for n in range(lo, hi + 1):
        # boundaries of F in degree n sit inside the Zhat block as iota(Bhat_n)
        b, z = block_info[n]
        b_up, z_up = block_info.get(n + 1, (0, 0))
        iota = ws.iota(n) if n <= C.hi else Mat.zero(z, 0)
        Bcols = [(0,) * b + tuple(iota.col(j)) for j in range(iota.cols)]
        Bmat = Mat.from_cols(Bcols, rows=b + z)
        canon = F.homology(n).boundaries
        coords = solve_matrix(Bmat, canon) if canon.cols else Mat.zero(iota.cols, 0)
        if coords is None:
            raise ComplexError("canonical boundary basis escaped iota(Bhat)")
        sig = []
        for j in range(coords.cols):
            c = coords.col(j)
            sig.append(tuple(c) + (0,) * z_up)
        sections[n] = Mat.from_cols(sig, rows=b_up + z_up)
    splitting = BoundarySplitting(F, sections)
    return FreeApproximation(C, F, nu, splitting, ws=ws, block_info=block_info)


# ------------------------------------------------- pullbacks along surjections


def cover_surjective(f, approx_target):
    """Given a surjective chain map f: C -> D and a (surjective) free
    approximation nu_D of D, produce a free approximation nu_C of C and a
    surjective chain map fhat: Fhat_C -> Fhat_D with nu_D fhat = f nu_C.

    Built from the degreewise pullback P = C x_D Fhat_D."""
    C, D = f.source, f.target
    FD = approx_target.F
    nuD = approx_target.nu
    lo = min(C.lo, FD.lo)
    hi = max(C.hi, FD.hi)

    # P_n = kernel of [f, -nu]: C_n + FhatD_n -> D_n
    ambient = {}
    kernels = {}
    for n in range(lo, hi + 1):
        G, incs, prjs = direct_sum([C.group(n), FD.group(n)])
        big = f.mat(n).hstack(-nuD.mat(n))
        ker_group, ker_incl = GroupMorphism(G, D.group(n), big, check=False).kernel()
        ambient[n] = (G, incs, prjs)
        kernels[n] = (ker_group, ker_incl)

    groups = [kernels[n][0] for n in range(lo, hi + 1)]
    P = FpChainComplex(lo, groups, {})
    for n in range(lo + 1, hi + 1):
        Kn, incl_n = kernels[n]
        Km, incl_m = kernels[n - 1]
        cols = []
        for j in range(Kn.ngens):
            v = incl_n.mat.col(j)
            c_part = v[:C.ngens(n)]
            x_part = v[C.ngens(n):]
            dc = C.boundary_matrix(n).apply(c_part)
            dx = FD.boundary_matrix(n).apply(x_part)
            w = incl_m.preimage(ambient[n - 1][0].element(tuple(dc) + tuple(dx)))
            if w is None:
                raise ComplexError("pullback boundary escaped the pullback")
            cols.append(w.coords)
        P._d[n] = GroupMorphism(P.group(n), P.group(n - 1),
                                Mat.from_cols(cols, rows=Km.ngens), check=False)

    proj_C = ChainMap(P, C, {n: Mat(kernels[n][1].mat.data[:C.ngens(n)],
                                    cols=kernels[n][0].ngens)
                             for n in range(lo, hi + 1)}, check=False)
    proj_F = ChainMap(P, FD, {n: Mat(kernels[n][1].mat.data[C.ngens(n):],
                                     cols=kernels[n][0].ngens)
                              for n in range(lo, hi + 1)}, check=False)

    approx_P = free_approximation(P)
    nu_C = proj_C.compose(approx_P.nu)
    fhat = proj_F.compose(approx_P.nu)
    out = FreeApproximation(C, approx_P.F, nu_C, approx_P.splitting)
    return out, fhat


# ------------------------------------------------------- short exact sequences


class ShortExactSequence:
    """0 -> A --f--> B --g--> Q -> 0 of complexes: f injective, g surjective,
    ker g = im f degreewise."""

    def __init__(self, f, g):
        if f.target is not g.source:
            raise ComplexError("maps do not compose")
        self.f = f
        self.g = g
        self.A, self.B, self.Q = f.source, f.target, g.target

    def verify(self):
        self.f.verify()
        self.g.verify()
        lo = min(self.A.lo, self.B.lo, self.Q.lo)
        hi = max(self.A.hi, self.B.hi, self.Q.hi)
        for n in range(lo, hi + 1):
            fm = GroupMorphism(self.A.group(n), self.B.group(n), self.f.mat(n), check=False)
            gm = GroupMorphism(self.B.group(n), self.Q.group(n), self.g.mat(n), check=False)
            if not fm.is_injective:
                raise ComplexError("first map not injective in degree %d" % n)
            if not gm.is_surjective:
                raise ComplexError("second map not surjective in degree %d" % n)
            # im f = ker g: mutual containment
            K, incl = gm.kernel()
            for j in range(fm.mat.cols):
                if incl.preimage(self.B.group(n).element(fm.mat.col(j))) is None:
                    raise ComplexError("im f escapes ker g in degree %d" % n)
            red = ColumnReduction(fm.mat.hstack(self.B.group(n).rel))
            for j in range(K.ngens):
                if red.solve(incl.mat.col(j)) is None:
                    raise ComplexError("ker g escapes im f in degree %d" % n)
        return True


@dataclass(frozen=True)
class SESApproximation:
    """A short exact sequence of free approximations over a short exact
    sequence of complexes: 0 -> FhatA -> FhatB -> FhatQ -> 0 with commuting
    squares over f and g."""

    ses: ShortExactSequence
    approx_A: FreeApproximation
    approx_B: FreeApproximation
    approx_Q: FreeApproximation
    fhat: ChainMap
    ghat: ChainMap

    def verify(self):
        ShortExactSequence(self.fhat, self.ghat).verify()
        for ap in (self.approx_A, self.approx_B, self.approx_Q):
            ap.verify()
        # the two squares
        lhs = self.ses.f.compose(self.approx_A.nu)
        rhs = self.approx_B.nu.compose(self.fhat)
        _assert_equal_maps(lhs, rhs, "f-square")
        lhs = self.ses.g.compose(self.approx_B.nu)
        rhs = self.approx_Q.nu.compose(self.ghat)
        _assert_equal_maps(lhs, rhs, "g-square")
        return True


def _assert_equal_maps(u, v, label):
    for n in set(u.mats) | set(v.mats):
        diff = u.mat(n) - v.mat(n)
        for j in range(diff.cols):
            if not u.target.is_zero_coords(n, diff.col(j)):
                raise ComplexError("%s does not commute in degree %d" % (label, n))


def ses_free_approximation(ses, rng=None):
    """Free approximations of A, B, Q fitting into a short exact sequence of
    free complexes with commuting squares.

    Construction: approximate Q, cover g by a surjection ghat out of a free
    approximation of B (pullback construction), then take FhatA = ker ghat
    with nu_A the restriction of nu_B pulled back through the injection f.
    An rng varies the approximation of Q, which varies the whole witness.
    """
    approx_Q = free_approximation(ses.Q, rng=rng)
    approx_B, ghat = cover_surjective(ses.g, approx_Q)
    FB, FQ = approx_B.F, approx_Q.F
    lo, hi = FB.lo, FB.hi

    # kernel complex of ghat (free: degreewise kernel lattices)
    ker_bases = {}
    ranks = []
    for n in range(lo, hi + 1):
        K = ColumnReduction(ghat.mat(n)).kernel()
        ker_bases[n] = K
        ranks.append(K.cols)
    boundaries = {}
    for n in range(lo + 1, hi + 1):
        amb = FB.boundary_matrix(n) * ker_bases[n]
        coords = solve_matrix(ker_bases[n - 1], amb)
        if coords is None:
            raise ComplexError("kernel complex boundary escaped the kernel")
        boundaries[n] = coords
    FA = FreeChainComplex(lo, ranks, boundaries)
    incl = ChainMap(FA, FB, {n: ker_bases[n] for n in range(lo, hi + 1)}, check=False)

    # nu_A: solve f(nu_A(x)) = nu_B(incl(x)); f is injective so this is unique
    A, f = ses.A, ses.f
    nu_mats = {}
    for n in range(lo, hi + 1):
        targets = approx_B.nu.mat(n) * ker_bases[n]
        fred = ColumnReduction(f.mat(n).hstack(ses.B.group(n).rel))
        cols = []
        for j in range(targets.cols):
            sol = fred.solve(targets.col(j))
            if sol is None:
                raise ComplexError("nu_B of the kernel misses the image of f")
            cols.append(sol[:A.ngens(n)])
        nu_mats[n] = Mat.from_cols(cols, rows=A.ngens(n))
    nu_A = ChainMap(FA, A, nu_mats, check=False)
    approx_A = FreeApproximation(A, FA, nu_A, boundary_splitting(FA))
    return SESApproximation(ses=ses, approx_A=approx_A, approx_B=approx_B,
                            approx_Q=approx_Q, fhat=incl, ghat=ghat)


# ------------------------------------------------------------- tor acyclicity


def tor_complex_homology_trivial(C, D):
    """Whether the degreewise-Tor complex of C and D has trivial homology
    everywhere: (C tor D)_n = sum of Tor(C_p, D_q) over p + q = n, with the
    boundary induced by functoriality (Koszul sign on the right factor).

    This is the hypothesis under which the Kunneth machinery applies; it is
    vacuous when either complex is degreewise free.
    """
    from .abgroups import tor_group, elementary_tor_reduce, ElementaryTor
    if C.is_free or D.is_free:
        return True
    pieces = {}   # (p, q) -> TorProduct
    for p in C.degrees():
        for q in D.degrees():
            pieces[(p, q)] = tor_group(C.group(p), D.group(q))
    lo, hi = C.lo + D.lo, C.hi + D.hi
    layout = {}
    groups = []
    for n in range(lo, hi + 1):
        items = [(p, n - p) for p in C.degrees() if (p, n - p) in pieces]
        gs = [pieces[key].group for key in items]
        G, incs, _ = direct_sum(gs) if gs else (FpAbGroup.trivial(), [], [])
        layout[n] = (items, incs)
        groups.append(G)
    T = FpChainComplex(lo, groups, {})
    for n in range(lo + 1, hi + 1):
        items, _ = layout[n]
        t_items, t_incs = layout[n - 1]
        cols = []
        for (p, q) in items:
            tor = pieces[(p, q)]
            for k, slot in enumerate(tor.slots):
                for s in range(slot.subgroup.ngens):
                    b = slot.inclusion.apply(slot.subgroup.gen(s))
                    gamma = _tor_slot_generator(tor, k)
                    col = [0] * T.group(n - 1).ngens
                    # dC part into (p-1, q)
                    if (p - 1, q) in t_items:
                        img = _tor_functorial(pieces[(p - 1, q)],
                                              C.boundary_morphism(p).apply(gamma),
                                              slot.order, b)
                        idx = t_items.index((p - 1, q))
                        vec = t_incs[idx].apply(img)
                        col = [a + x for a, x in zip(col, vec.coords)]
                    # dD part into (p, q-1), sign (-1)^p
                    if (p, q - 1) in t_items:
                        sgn = -1 if p % 2 else 1
                        img = _tor_functorial(pieces[(p, q - 1)], gamma, slot.order,
                                              D.boundary_morphism(q).apply(b))
                        idx = t_items.index((p, q - 1))
                        vec = t_incs[idx].apply(sgn * img)
                        col = [a + x for a, x in zip(col, vec.coords)]
                    cols.append(tuple(col))
        T._d[n] = GroupMorphism(T.group(n), T.group(n - 1),
                                Mat.from_cols(cols, rows=T.group(n - 1).ngens),
                                check=False)
    for n in range(lo, hi + 1):
        if not T.homology(n).group.is_trivial:
            return False
    return True


def _tor_slot_generator(tor, k):
    """The element of the left group whose cyclic summand indexes slot k."""
    dec = tor.left.canonical_decomposition()
    return tor.left.element(dec.from_canonical.mat.col(k))


def _tor_functorial(target_tor, a, r, b):
    from .abgroups import ElementaryTor, elementary_tor_reduce
    return elementary_tor_reduce(ElementaryTor(a, r, b), tor=target_tor)
