"""The interchange map, weak exact sequences, and the connecting map.

Three families of exact statements about the product structure:

* `interchange` is the chain map T(x (x) y) = (-1)^{|x||y|} y (x) x.  It
  squares to the identity, swaps cross products with the sign
  (-1)^{|a||b|}, and carries the section value on <a, r, b> to
  (-1)^{ij+1} times the value on <b, r, a> computed with the same two
  splittings in the opposite order (`flip_check`); the two facts assemble
  into a commuting ladder between the product decompositions of C (x) D
  and D (x) C (`flip_kunneth_diagram`).
* A *weak exact sequence* is a composable pair that becomes a genuine
  short exact sequence after free approximation; the witness row is
  carried explicitly, every honest short exact sequence is weak exact
  (`weak_exact_from_ses`), and tensoring with a complex preserves weak
  exactness under degreewise-Tor acyclicity (`tensor_weak_exact`) even
  where honest exactness is destroyed by torsion.
* The connecting map of the long homology sequence (`connecting`) is
  computed by the zig-zag for honest sequences and transported through
  the witness for weak ones.  Against the product structure it satisfies
  exact laws: it kills nothing more nor less than the long-sequence
  pattern (`exact_at`), it anti-commutes with the Bockstein, it crosses
  through the first factor on tensor summands, and it carries the coset
  of section values on <q, r, e> into minus the coset on <dq, r, e>
  (`boundary_tor_check`, `boundary_kunneth_diagram`).
"""

from .linalg import ColumnReduction, Mat
from .abgroups import (ElementaryTor, FpAbGroup, GroupMorphism,
                       elementary_tor_reduce, tor_morphism, tor_slot_source)
from .complexes import (ChainMap, ComplexError, FreeApproximation,
                        FreeChainComplex, ShortExactSequence,
                        boundary_splitting, direct_sum_complexes,
                        free_approximation, mod_reduction,
                        ses_free_approximation, tensor_chain_map,
                        tensor_complex, tensor_complex_general,
                        tor_complex_homology_trivial)
from .splitting import KunnethPair, bockstein, degree_of, tor_coset


class ExactnessError(ValueError):
    pass


# ----------------------------------------------------------- interchange


def interchange(C, D, T_source=None, T_target=None):
    """The chain map T: C (x) D -> D (x) C with the Koszul sign.

    >>> from .documents import moore
    >>> C = moore(2, 1)
    >>> T = interchange(C, C)
    >>> T.compose(interchange(C, C, T.target, T.source)).mat(3) == Mat.identity(2)
    True
    """
    if not (C.is_free and D.is_free):
        raise ExactnessError("the interchange map is built for free factors")
    if T_source is None:
        T_source = tensor_complex(C, D)
    if T_target is None:
        T_target = tensor_complex(D, C)
    mats = {}
    for n in T_source.degrees():
        entries = [[0] * T_source.ngens(n) for _ in range(T_target.ngens(n))]
        for (p, q, off) in T_source.blocks(n):
            t_off = T_target._find_offset(n, q, p)
            if t_off is None:
                raise ExactnessError("mismatched tensor layout in degree %d" % n)
            sign = -1 if (p % 2 and q % 2) else 1
            for i in range(C.rank(p)):
                for j in range(D.rank(q)):
                    entries[t_off + j * C.rank(p) + i][off + i * D.rank(q) + j] = sign
        mats[n] = Mat(entries, cols=T_source.ngens(n))
    return ChainMap(T_source, T_target, mats)


def tor_interchange(src, tgt):
    """Tor(A, B) -> Tor(B, A) on elementary symbols: <a, r, b> -> <b, r, a>."""
    cols = []
    for k, slot in enumerate(src.slots):
        gamma, d = tor_slot_source(src, k)
        for l in range(slot.subgroup.ngens):
            b = slot.inclusion.apply(slot.subgroup.gen(l))
            cols.append(elementary_tor_reduce(ElementaryTor(b, d, gamma), tgt).coords)
    return GroupMorphism(src.group, tgt.group,
                         Mat.from_cols(cols, rows=tgt.group.ngens))


def flip_pair(pair):
    """The opposite product pair, reusing the same two weak splittings."""
    return KunnethPair(pair.D, pair.C, wsC=pair.wsD, wsD=pair.wsC)


def flip_check(pair, t, flipped=None, i=None, j=None):
    """T carries the section value on <a, r, b> to (-1)^(ij+1) times the
    value on <b, r, a> taken with the same splittings in the opposite
    order.  Returns the flipped value; raises when the identity fails."""
    t.check()
    if i is None:
        i = degree_of(pair.C, t.a)
    if j is None:
        j = degree_of(pair.D, t.b)
    if flipped is None:
        flipped = flip_pair(pair)
    T = interchange(pair.C, pair.D, pair.T, flipped.T)
    left = T.induced(i + j + 1).apply(pair.lam(t, i, j))
    sign = 1 if (i * j) % 2 else -1   # (-1)^(ij+1)
    right = flipped.lam(ElementaryTor(t.b, t.r, t.a), j, i) * sign
    if left != right:
        raise ExactnessError("flip law fails: %r != %r" % (left, right))
    return left


def flip_kunneth_diagram(C, D, n, pair=None, flipped=None):
    """Both squares of the interchange ladder in total degree n: the cross
    products commute up to (-1)^(ij) and the torsion components up to
    (-1)^(ij+1) with the symbol swap.  Returns True; raises on failure."""
    if pair is None:
        pair = KunnethPair(C, D)
    if flipped is None:
        flipped = flip_pair(pair)
    T = interchange(pair.C, pair.D, pair.T, flipped.T)
    Tn = T.induced(n)
    for (i, j) in pair.tensor_degrees(n):
        sign = -1 if (i * j) % 2 else 1
        for a in pair.hC(i).group.generators():
            for b in pair.hD(j).group.generators():
                if Tn.apply(pair.cross(a, b, i, j)) != flipped.cross(b, a, j, i) * sign:
                    raise ExactnessError(
                        "cross square fails at bidegree (%d, %d)" % (i, j))
    for (i, j) in pair.tor_degrees(n):
        sign = 1 if (i * j) % 2 else -1
        swap = tor_interchange(pair.tor(i, j), flipped.tor(j, i))
        lhs = flipped.mu_morphism(j, i).compose(Tn)
        rhs = swap.compose(pair.mu_morphism(i, j))
        for g in pair.hT(n).group.generators():
            if lhs.apply(g) != rhs.apply(g) * sign:
                raise ExactnessError(
                    "torsion square fails at bidegree (%d, %d)" % (i, j))
    return True


# ------------------------------------------------------ weak exact sequences


def _check_square(top, down_left, down_right, bottom, label):
    """bottom o down_left = down_right o top, allowing fp equality."""
    lhs = bottom.compose(down_left)
    rhs = down_right.compose(top)
    for n in set(lhs.mats) | set(rhs.mats):
        diff = lhs.mat(n) - rhs.mat(n)
        for j in range(diff.cols):
            if not lhs.target.is_zero_coords(n, diff.col(j)):
                raise ExactnessError("%s square fails in degree %d" % (label, n))


class WeakExactSequence:
    """A composable pair f: A -> B, g: B -> Q together with a witness: an
    honest short exact sequence 0 -> FA -> FB -> FQ -> 0 of free complexes
    and quasi-isomorphisms onto A, B, Q making both squares commute.

    The connecting map of the long homology sequence is transported from
    the free row: connecting(n) = (nu_A)_* o del_free o (nu_Q)_*^{-1}.
    The witness is stored, never re-derived, so the connecting map is
    deterministic; that it does not depend on the witness is a tested
    property, not an assumption.
    """

    def __init__(self, f, g, approx_A, approx_B, approx_Q, fhat, ghat, check=True):
        if f.target is not g.source:
            raise ExactnessError("maps do not compose")
        self.f = f
        self.g = g
        self.A, self.B, self.Q = f.source, f.target, g.target
        self.approx_A = approx_A
        self.approx_B = approx_B
        self.approx_Q = approx_Q
        self.fhat = fhat
        self.ghat = ghat
        self._connecting = {}
        if check:
            self.verify()

    def verify(self):
        ShortExactSequence(self.fhat, self.ghat).verify()
        for ap in (self.approx_A, self.approx_B, self.approx_Q):
            ap.verify()
        _check_square(self.fhat, self.approx_A.nu, self.approx_B.nu, self.f, "f")
        _check_square(self.ghat, self.approx_B.nu, self.approx_Q.nu, self.g, "g")
        return True

    def free_connecting(self, n):
        """The textbook zig-zag on the witness row."""
        return _zigzag_connecting(self.fhat, self.ghat, n)

    def connecting(self, n):
        """H_n(Q) -> H_{n-1}(A) through the witness."""
        mor = self._connecting.get(n)
        if mor is None:
            inv = self.approx_Q.nu.induced(n).inverse()
            mor = (self.approx_A.nu.induced(n - 1)
                   .compose(self.free_connecting(n)).compose(inv))
            self._connecting[n] = mor
        return mor


def _zigzag_connecting(f, g, n):
    """The connecting homomorphism H_n(Q) -> H_{n-1}(A) of a degreewise
    exact pair, by lifting a cycle through g, taking its boundary, and
    pulling back through f.  Fails loudly when a preimage is missing,
    which cannot happen for an exact pair."""
    A, B, Q = f.source, f.target, g.target
    hQ = Q.homology(n)
    hA = A.homology(n - 1)
    gm = GroupMorphism(B.group(n), Q.group(n), g.mat(n), check=False)
    fm = GroupMorphism(A.group(n - 1), B.group(n - 1), f.mat(n - 1), check=False)
    cols = []
    for qgen in hQ.group.generators():
        b = gm.preimage(Q.group(n).element(hQ.rep_coords(qgen)))
        if b is None:
            raise ExactnessError("cycle does not lift through the surjection")
        db = B.group(n - 1).element(B.boundary_matrix(n).apply(b.coords))
        a = fm.preimage(db)
        if a is None:
            raise ExactnessError("boundary of the lift escapes the subcomplex")
        cols.append(hA.class_of_coords(a.coords).coords)
    return GroupMorphism(hQ.group, hA.group,
                         Mat.from_cols(cols, rows=hA.group.ngens))


def connecting(seq, n):
    """The connecting homomorphism H_n(Q) -> H_{n-1}(A): the zig-zag for an
    honest short exact sequence, the transported one for a weak one."""
    if isinstance(seq, WeakExactSequence):
        return seq.connecting(n)
    return _zigzag_connecting(seq.f, seq.g, n)


def weak_exact_from_ses(ses, rng=None):
    """Every short exact sequence is weak exact: the witness is the pullback
    free-approximation row.  An rng varies the witness."""
    ap = ses_free_approximation(ses, rng=rng)
    return WeakExactSequence(ses.f, ses.g, ap.approx_A, ap.approx_B,
                             ap.approx_Q, ap.fhat, ap.ghat)


def exact_at(incoming, outgoing):
    """Exactness of X --incoming--> Y --outgoing--> Z at Y: the composite
    vanishes and the kernel of outgoing lies in the image of incoming."""
    for g in incoming.source.generators():
        if not outgoing.apply(incoming.apply(g)).is_zero:
            return False
    K, incl = outgoing.kernel()
    for g in K.generators():
        if incoming.preimage(incl.apply(g)) is None:
            return False
    return True


def long_exact_check(seq, n):
    """Exactness of the long homology sequence at H_n(A), H_n(B), H_n(Q)."""
    fst = seq.f.induced(n)
    snd = seq.g.induced(n)
    above = connecting(seq, n + 1)
    below = connecting(seq, n)
    return (exact_at(above, fst) and exact_at(fst, snd)
            and exact_at(snd, below))


# ------------------------------------------------- standard exact sequences


def multiplication_ses(C, r):
    """0 -> C --r--> C --reduce--> C mod r -> 0 for a free complex.
    Its connecting map is the Bockstein of level r.  Returns (ses, red)."""
    if r == 0:
        raise ExactnessError("multiplication by zero is not injective")
    if not C.is_free:
        raise ExactnessError("the multiplication sequence needs a free complex")
    red = mod_reduction(C, r)
    mul = ChainMap(C, C, {n: r * Mat.identity(C.rank(n)) for n in C.degrees()},
                   check=False)
    quo = ChainMap(C, red.complex,
                   {n: Mat.identity(C.rank(n)) for n in C.degrees()}, check=False)
    return ShortExactSequence(mul, quo), red


def truncation_ses(C, k):
    """0 -> (degrees < k) -> C -> (degrees >= k) -> 0 for a free complex:
    the subcomplex of low degrees and the quotient with the cut boundary."""
    if not C.is_free:
        raise ExactnessError("truncation implemented for free complexes")
    if not C.lo < k <= C.hi:
        raise ExactnessError("cut degree must fall inside the support")
    low = FreeChainComplex(C.lo, [C.rank(n) for n in range(C.lo, k)],
                           {n: C.boundary_matrix(n) for n in range(C.lo + 1, k)})
    high = FreeChainComplex(k, [C.rank(n) for n in range(k, C.hi + 1)],
                            {n: C.boundary_matrix(n) for n in range(k + 1, C.hi + 1)})
    inc = ChainMap(low, C, {n: Mat.identity(C.rank(n)) for n in range(C.lo, k)},
                   check=False)
    prj = ChainMap(C, high, {n: Mat.identity(C.rank(n)) for n in range(k, C.hi + 1)},
                   check=False)
    return ShortExactSequence(inc, prj)


def split_ses(A, Q):
    """The split sequence 0 -> A -> A + Q -> Q -> 0 of free complexes; its
    connecting map is zero."""
    S, iA, _, _, pQ = direct_sum_complexes(A, Q)
    return ShortExactSequence(iA, pQ)


def connecting_bockstein_anticommute(ses, r, n):
    """For a short exact sequence of free complexes and its mod-r reduction,
    the connecting maps anti-commute with the Bocksteins:

        del o beta^r = - beta^r o del_mod_r

    both ways around H_n(Q mod r) -> H_{n-2}(A).  Returns True."""
    A, B, Q = ses.A, ses.B, ses.Q
    if not (A.is_free and B.is_free and Q.is_free):
        raise ExactnessError("the Bockstein route needs free complexes")
    redA, redB, redQ = mod_reduction(A, r), mod_reduction(B, r), mod_reduction(Q, r)
    fr = ChainMap(redA.complex, redB.complex,
                  {k: ses.f.mat(k) for k in A.degrees()}, check=False)
    gr = ChainMap(redB.complex, redQ.complex,
                  {k: ses.g.mat(k) for k in B.degrees()}, check=False)
    ses_r = ShortExactSequence(fr, gr)
    del_mod = connecting(ses_r, n)
    del_low = connecting(ses, n - 1)
    for x in redQ.complex.homology(n).group.generators():
        lhs = del_low.apply(bockstein(redQ, x, r=r))
        y = del_mod.apply(x)
        if y.group.is_trivial:
            # the mod-r connecting map already killed x
            if not lhs.is_zero:
                raise ExactnessError(
                    "Bockstein and connecting fail to anti-commute")
            continue
        if lhs != -bockstein(redA, y, r=r):
            raise ExactnessError("Bockstein and connecting fail to anti-commute")
    return True


# --------------------------------------------- tensoring weak exact sequences


def tensor_weak_exact(wes, E, side="right", approx_E=None):
    """Tensor a weak exact sequence with E (on the stated side).

    Requires the degreewise torsion complexes Tor(A, E), Tor(B, E),
    Tor(Q, E) to be acyclic.  The witness row is the tensor of the old
    witness with a free approximation of E -- a genuine short exact
    sequence because free rows stay exact under (x) with a free complex.
    The bottom row may fail honest exactness; only weak exactness is
    claimed or checked.
    """
    for X in (wes.A, wes.B, wes.Q):
        ok = (tor_complex_homology_trivial(X, E) if side == "right"
              else tor_complex_homology_trivial(E, X))
        if not ok:
            raise ExactnessError(
                "degreewise torsion obstruction: the Tor complex is not acyclic")
    if approx_E is None:
        approx_E = free_approximation(E)
    FE, nuE = approx_E.F, approx_E.nu
    idE, idFE = ChainMap.identity(E), ChainMap.identity(FE)

    def build(X, ap):
        if side == "right":
            TL = tensor_complex_general(X, E)
            TF = tensor_complex(ap.F, FE)
            nu = tensor_chain_map(ap.nu, nuE, TF, TL)
        else:
            TL = tensor_complex_general(E, X)
            TF = tensor_complex(FE, ap.F)
            nu = tensor_chain_map(nuE, ap.nu, TF, TL)
        return TL, TF, FreeApproximation(TL, TF, nu, boundary_splitting(TF))

    TA, FTA, apTA = build(wes.A, wes.approx_A)
    TB, FTB, apTB = build(wes.B, wes.approx_B)
    TQ, FTQ, apTQ = build(wes.Q, wes.approx_Q)
    if side == "right":
        f2 = tensor_chain_map(wes.f, idE, TA, TB)
        g2 = tensor_chain_map(wes.g, idE, TB, TQ)
        fhat2 = tensor_chain_map(wes.fhat, idFE, FTA, FTB)
        ghat2 = tensor_chain_map(wes.ghat, idFE, FTB, FTQ)
    else:
        f2 = tensor_chain_map(idE, wes.f, TA, TB)
        g2 = tensor_chain_map(idE, wes.g, TB, TQ)
        fhat2 = tensor_chain_map(idFE, wes.fhat, FTA, FTB)
        ghat2 = tensor_chain_map(idFE, wes.ghat, FTB, FTQ)
    return WeakExactSequence(f2, g2, apTA, apTB, apTQ, fhat2, ghat2)


# ------------------------------------------------- boundary vs the product


class BoundaryContext:
    """The tensored weak exact sequence of (wes, E) with the two product
    pairs living on its ends; built once, shared across symbol checks."""

    def __init__(self, wes, E, side="right", approx_E=None):
        self.wes = wes
        self.E = E
        self.side = side
        self.twes = tensor_weak_exact(wes, E, side=side, approx_E=approx_E)
        if side == "right":
            self.pairQ = KunnethPair(wes.Q, E, T=self.twes.Q)
            self.pairA = KunnethPair(wes.A, E, T=self.twes.A)
        else:
            self.pairQ = KunnethPair(E, wes.Q, T=self.twes.Q)
            self.pairA = KunnethPair(E, wes.A, T=self.twes.A)


def boundary_tor_check(wes, E, t, side="right", ctx=None):
    """The connecting map against the coset of section values:

        right:  del <<q, r, e>>  is contained in  - <<del q, r, e>>
        left:   del <<e, r, q>>  is contained in  (-1)^(j+1) <<e, r, del q>>

    with j the degree of the E-class.  Checks the representative and every
    indeterminacy generator.  Returns True; raises on failure."""
    t.check()
    if ctx is None:
        ctx = BoundaryContext(wes, E, side=side)
    pairQ, pairA, twes = ctx.pairQ, ctx.pairA, ctx.twes
    if side == "right":
        i = degree_of(wes.Q, t.a)
        j = degree_of(E, t.b)
        dq = connecting(wes, i).apply(t.a)
        target = tor_coset(pairA, ElementaryTor(dq, t.r, t.b), i - 1, j)
        sign = -1
        src = tor_coset(pairQ, t, i, j)
    else:
        j = degree_of(E, t.a)
        i = degree_of(wes.Q, t.b)
        dq = connecting(wes, i).apply(t.b)
        target = tor_coset(pairA, ElementaryTor(t.a, t.r, dq), j, i - 1)
        sign = 1 if j % 2 else -1   # (-1)^(j+1)
        src = tor_coset(pairQ, t, j, i)
    D = twes.connecting(i + j + 1)
    if not target.contains(D.apply(src.representative) * sign):
        raise ExactnessError("connecting image of the representative escapes "
                             "the signed target coset")
    for gen in src.generators:
        if not target.contains(target.representative + D.apply(gen)):
            raise ExactnessError("connecting image of the indeterminacy escapes "
                                 "the target subgroup")
    return True


def boundary_kunneth_diagram(wes, E, n, ctx=None):
    """The connecting ladder between the product decompositions in total
    degree n + 1 over Q and n over A: the cross column commutes with
    del (x) id on the nose, the torsion column with -(del tor id).
    Returns True; raises on failure."""
    if ctx is None:
        ctx = BoundaryContext(wes, E, side="right")
    pairQ, pairA, twes = ctx.pairQ, ctx.pairA, ctx.twes
    D = twes.connecting(n + 1)
    for (i, j) in pairQ.tensor_degrees(n + 1):
        del_i = connecting(wes, i)
        for a in pairQ.hC(i).group.generators():
            da = del_i.apply(a)
            for e in pairQ.hD(j).group.generators():
                if D.apply(pairQ.cross(a, e, i, j)) != pairA.cross(da, e, i - 1, j):
                    raise ExactnessError(
                        "cross square fails at bidegree (%d, %d)" % (i, j))
    for (i, j) in pairQ.tor_degrees(n + 1):
        src_tor = pairQ.tor(i, j)
        tgt_tor = pairA.tor(i - 1, j)
        push = tor_morphism(src_tor, tgt_tor, connecting(wes, i),
                            GroupMorphism.identity(pairQ.hD(j).group))
        lhs = pairA.mu_morphism(i - 1, j).compose(D)
        rhs = push.compose(pairQ.mu_morphism(i, j))
        for g in pairQ.hT(n + 1).group.generators():
            if lhs.apply(g) != -rhs.apply(g):
                raise ExactnessError(
                    "torsion square fails at bidegree (%d, %d)" % (i, j))
    return True


__all__ = [
    "ExactnessError", "interchange", "tor_interchange", "flip_pair",
    "flip_check", "flip_kunneth_diagram", "WeakExactSequence",
    "weak_exact_from_ses", "connecting", "exact_at", "long_exact_check",
    "multiplication_ses", "truncation_ses", "split_ses",
    "connecting_bockstein_anticommute", "tensor_weak_exact",
    "BoundaryContext", "boundary_tor_check", "boundary_kunneth_diagram",
]
