"""How chain maps interact with weak splittings of homology.

A chain map f: A -> B induces maps on homology, but it has no reason to
respect chosen weak splittings on the two sides.  The mismatch is measured
in layers:

* `WeakSplitChainMap` carries f together with splittings on both ends and
  compatibility data: lifts Phihat_n of the induced maps to the splitting
  resolutions, and correction chains omega_n with
  d(omega) = phi_B Phihat - f phi_A.  `complete` produces such data for any
  chain map, deterministically or randomized over the full indeterminacy.
* From the data one derives the defect `theta_bar`, a map out of the
  relation lattice whose columns are cycles of B one degree up, and from
  its classes the homomorphisms

      theta^r : (r-torsion of H_n(A)) -> H_{n+1}(B) (x) Z/r,

  which do not depend on how the map was completed.  theta vanishes for
  identity maps and survives composition, sums and chain homotopies by
  explicit formulas, all verified here.
* `deviation_check` confirms the exact correction law for pushing section
  values of the torsion part through f (x) g: the pushforward of a value on
  <a, r, b> differs from the value on <f a, r, g b> by cross products with
  the theta classes of the two maps.
* `cosets_natural_check` confirms the choice-free statement: the whole
  coset of section values maps into the target coset.
"""

from .linalg import ColumnReduction, Mat
from .abgroups import ElementaryTor, FpAbGroup, GroupMorphism, r_torsion
from .complexes import (ChainMap, boundary_preimage, cycle_generators,
                        direct_sum_complexes, tensor_chain_map, weak_splitting,
                        WeakSplitting)
from .splitting import KunnethPair, degree_of, tor_coset


class NaturalityError(ValueError):
    pass


def _block_diag(m1, m2):
    top = m1.hstack(Mat.zero(m1.rows, m2.cols))
    bottom = Mat.zero(m2.rows, m1.cols).hstack(m2)
    return top.vstack(bottom)


class WeakSplitChainMap:
    """A chain map f: A -> B, weak splittings of both ends, and lifts

        phihat_n : Zhat_n(A) -> Zhat_n(B)     with  [phi_B phihat] = f_* pi,
        omega_n  : Zhat_n(A) -> B_{n+1}       with  d omega = phi_B phihat - f phi_A.

    phihat automatically carries the relation lattice Bhat_n(A) into
    Bhat_n(B) (solved by `boundary_restriction`), and the defect

        theta_bar = psi_B (phihat|Bhat) - f psi_A - omega iota_A

    lands in the cycles of B_{n+1}.  Its classes only depend on f and the
    two splittings, not on the completion: that is what the recompletion
    tests certify, and what makes `theta` well defined.

    >>> from .documents import moore
    >>> from .complexes import FreeChainComplex
    >>> A = moore(4, 1)
    >>> B = FreeChainComplex(1, [1, 2], {2: Mat([[2, 0]], cols=2)})
    >>> f = ChainMap(A, B, {1: Mat([[1]], cols=1), 2: Mat([[2], [1]], cols=1)})
    >>> m = complete(f)                      # f sends the 4-cell to 2b + s
    >>> th = m.theta(4, 1)                   # Z/4 = H_1(A) -> H_2(B) (x) Z/4
    >>> th.apply(A.homology(1).group.gen(0))   # minus the sphere class
    elt[-1]@FpAbGroup<Z/4>
    >>> complete(ChainMap.identity(A)).theta(4, 1).is_zero
    True
    """

    def __init__(self, f, wsA, wsB, phihat, omega, check=True):
        if wsA.complex is not f.source or wsB.complex is not f.target:
            raise NaturalityError("splittings must belong to the ends of the map")
        self.f = f
        self.wsA = wsA
        self.wsB = wsB
        self._phihat = dict(phihat)
        self._omega = dict(omega)
        self._theta_bar = {}
        if check:
            self.verify()

    @property
    def source(self):
        return self.f.source

    @property
    def target(self):
        return self.f.target

    def phihat(self, n):
        m = self._phihat.get(n)
        if m is None:
            m = Mat.zero(self.wsB.zhat_rank(n), self.wsA.zhat_rank(n))
        return m

    def omega(self, n):
        m = self._omega.get(n)
        if m is None:
            m = Mat.zero(self.target.ngens(n + 1), self.wsA.zhat_rank(n))
        return m

    def verify(self):
        A, B, f = self.source, self.target, self.f
        for n in A.degrees():
            ph, om = self.phihat(n), self.omega(n)
            if (ph.rows, ph.cols) != (self.wsB.zhat_rank(n), self.wsA.zhat_rank(n)):
                raise NaturalityError("phihat has the wrong shape in degree %d" % n)
            if (om.rows, om.cols) != (B.ngens(n + 1), self.wsA.zhat_rank(n)):
                raise NaturalityError("omega has the wrong shape in degree %d" % n)
            # phihat descends to the induced map on homology
            hB = B.homology(n)
            induced = f.induced(n)
            for j, g in enumerate(A.homology(n).group.generators()):
                if hB.group.element(ph.col(j)) != induced.apply(g):
                    raise NaturalityError(
                        "phihat does not lift f_* on generator %d in degree %d" % (j, n))
            # omega repairs the mismatch on the chosen cycle representatives
            lhs = B.boundary_matrix(n + 1) * om
            rhs = self.wsB.phi(n) * ph - f.mat(n) * self.wsA.phi(n)
            diff = lhs - rhs
            for j in range(diff.cols):
                if not B.is_zero_coords(n, diff.col(j)):
                    raise NaturalityError(
                        "omega does not repair the cycle mismatch in degree %d" % n)
            self.theta_bar(n)  # asserts that the defect columns are cycles
        return True

    def boundary_restriction(self, n):
        """The unique X with iota_B X = phihat iota_A (phihat carries
        relations to relations because it lifts a map of homology)."""
        target = self.phihat(n) * self.wsA.iota(n)
        red = ColumnReduction(self.wsB.iota(n))
        cols = []
        for j in range(target.cols):
            x = red.solve(target.col(j))
            if x is None:
                raise NaturalityError(
                    "phihat escapes the relation lattice in degree %d" % n)
            cols.append(x)
        return Mat.from_cols(cols, rows=self.wsB.bhat_rank(n))

    def theta_bar(self, n):
        """The defect Bhat_n(A) -> B_{n+1}; every column is a cycle."""
        tb = self._theta_bar.get(n)
        if tb is None:
            tb = (self.wsB.psi(n) * self.boundary_restriction(n)
                  - self.f.mat(n + 1) * self.wsA.psi(n)
                  - self.omega(n) * self.wsA.iota(n))
            d = self.target.boundary_matrix(n + 1)
            for j in range(tb.cols):
                if not self.target.is_zero_coords(n, d.apply(tb.col(j))):
                    raise AssertionError("defect column is not a cycle")
            self._theta_bar[n] = tb
        return tb

    def theta(self, r, n):
        """theta^r on the r-torsion of H_n(A); see ThetaMap."""
        return ThetaMap(self, r, n)


class ThetaMap:
    """theta^r in degree n: (r-torsion of H_n(A)) -> H_{n+1}(B) (x) Z/r.

    On a class a with r a = 0 the value is the class of
    theta_bar(iota_A^{-1}(r zhat_a)) reduced mod r; that this is additive
    and kills the torsion-subgroup relations is checked on construction.
    Negating r negates the map; the codomain only sees |r|.
    """

    def __init__(self, m, r, n):
        if r == 0:
            raise NaturalityError("theta needs a nonzero torsion level")
        self.m = m
        self.r = r
        self.n = n
        hA = m.source.homology(n)
        self._hB = m.target.homology(n + 1)
        self.domain, self.inclusion = r_torsion(hA.group, r)
        hgroup = self._hB.group
        self.codomain = FpAbGroup(
            hgroup.ngens, hgroup.rel.hstack(abs(r) * Mat.identity(hgroup.ngens)))
        cols = [self._value_coords(self.inclusion.apply(g))
                for g in self.domain.generators()]
        self.morphism = GroupMorphism(
            self.domain, self.codomain,
            Mat.from_cols(cols, rows=self.codomain.ngens))

    def _value_coords(self, a):
        zv = self.m.wsA.lift(a, self.n)
        bv = self.m.wsA.iota_preimage(self.n, tuple(self.r * v for v in zv))
        return self._hB.class_of_coords(self.m.theta_bar(self.n).apply(bv)).coords

    def apply(self, a):
        """The value on an ambient class a of H_n(A) with r a = 0."""
        if not (a * self.r).is_zero:
            raise NaturalityError("class is not %d-torsion" % self.r)
        return self.codomain.element(self._value_coords(a))

    def lift(self, value):
        """An integral lift of a value into H_{n+1}(B) (same coordinates)."""
        return self._hB.group.element(value.coords)

    def reduce(self, h):
        """A class of H_{n+1}(B) reduced into the mod-r codomain."""
        return self.codomain.element(h.coords)

    @property
    def is_zero(self):
        return all(self.codomain.is_zero_coords(self.morphism.mat.col(j))
                   for j in range(self.morphism.mat.cols))

    def __eq__(self, other):
        if not isinstance(other, ThetaMap):
            return NotImplemented
        if (self.r, self.n) != (other.r, other.n):
            return False
        diff = self.morphism.mat - other.morphism.mat
        return all(self.codomain.is_zero_coords(diff.col(j))
                   for j in range(diff.cols))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq


def complete(f, wsA=None, wsB=None, rng=None):
    """Compatibility data for a chain map, from the induced maps on homology.

    Deterministic without an rng; with one, phihat is shifted by relation
    columns and omega by cycles, which walks over every completion of the
    same f (used to certify that theta does not notice).
    """
    if wsA is None:
        wsA = weak_splitting(f.source)
    if wsB is None:
        wsB = weak_splitting(f.target)
    phihat, omega = {}, {}
    for n in f.source.degrees():
        ph = f.induced(n).mat
        if rng is not None and ph.cols:
            ib = wsB.iota(n)
            if ib.cols:
                L = Mat([[rng.randrange(-2, 3) for _ in range(ph.cols)]
                         for _ in range(ib.cols)], cols=ph.cols)
                ph = ph + ib * L
        mismatch = wsB.phi(n) * ph - f.mat(n) * wsA.phi(n)
        om = Mat.from_cols([boundary_preimage(f.target, n + 1, mismatch.col(j))
                            for j in range(mismatch.cols)],
                           rows=f.target.ngens(n + 1))
        if rng is not None and om.cols:
            zup = cycle_generators(f.target, n + 1)
            if zup.cols:
                L = Mat([[rng.randrange(-2, 3) for _ in range(om.cols)]
                         for _ in range(zup.cols)], cols=om.cols)
                om = om + zup * L
        phihat[n] = ph
        omega[n] = om
    return WeakSplitChainMap(f, wsA, wsB, phihat, omega)


def compose(mF, mG):
    """g o f with composite data (requires the shared middle splitting):
    phihat composes, and omega_{gf} = g omega_f + omega_g phihat_f."""
    if mG.wsA is not mF.wsB:
        raise NaturalityError("composition needs one splitting in the middle")
    g = mG.f
    phihat, omega = {}, {}
    for n in mF.source.degrees():
        phihat[n] = mG.phihat(n) * mF.phihat(n)
        omega[n] = g.mat(n + 1) * mF.omega(n) + mG.omega(n) * mF.phihat(n)
    return WeakSplitChainMap(g.compose(mF.f), mF.wsA, mG.wsB, phihat, omega)


def internal_sum(mF, mG):
    """f + g between the same ends, with added data; theta is additive."""
    if mF.wsA is not mG.wsA or mF.wsB is not mG.wsB:
        raise NaturalityError("internal sum needs identical splittings")
    phihat = {n: mF.phihat(n) + mG.phihat(n) for n in mF.source.degrees()}
    omega = {n: mF.omega(n) + mG.omega(n) for n in mF.source.degrees()}
    return WeakSplitChainMap(mF.f + mG.f, mF.wsA, mF.wsB, phihat, omega)


def _sum_splitting(S, inc1, inc2, ws1, ws2):
    """A weak splitting of a direct sum, blockwise from the parts.

    Sound because both the cycle and boundary lattices of the sum have
    block-diagonal canonical bases, so the homology presentation of S is
    the concatenation of the two; verify() would fail loudly otherwise.
    """
    data = {}
    for n in S.degrees():
        iota = _block_diag(ws1.iota(n), ws2.iota(n))
        phi = (inc1.mat(n) * ws1.phi(n)).hstack(inc2.mat(n) * ws2.phi(n))
        psi = (inc1.mat(n + 1) * ws1.psi(n)).hstack(inc2.mat(n + 1) * ws2.psi(n))
        data[n] = (iota, phi, psi)
    ws = WeakSplitting(S, data)
    ws.verify()
    return ws


def direct_sum(mF, mG):
    """The block sum f + g: A1 + A2 -> B1 + B2 of weak-split maps of free
    complexes.  Returns (m, (iA1, iA2), (iB1, iB2)) with the inclusion
    chain maps of the summands; theta restricts blockwise through them."""
    SA, iA1, iA2, _, _ = direct_sum_complexes(mF.source, mG.source)
    SB, iB1, iB2, _, _ = direct_sum_complexes(mF.target, mG.target)
    wsSA = _sum_splitting(SA, iA1, iA2, mF.wsA, mG.wsA)
    wsSB = _sum_splitting(SB, iB1, iB2, mF.wsB, mG.wsB)
    f = ChainMap(SA, SB, {n: _block_diag(mF.f.mat(n), mG.f.mat(n))
                          for n in SA.degrees()}, check=False)
    phihat = {n: _block_diag(mF.phihat(n), mG.phihat(n)) for n in SA.degrees()}
    omega = {n: (iB1.mat(n + 1) * mF.omega(n)).hstack(iB2.mat(n + 1) * mG.omega(n))
             for n in SA.degrees()}
    return (WeakSplitChainMap(f, wsSA, wsSB, phihat, omega),
            (iA1, iA2), (iB1, iB2))


def homotopy_transport(m, D, g):
    """Transport completion data along a chain homotopy g - f = d D + D d
    (D given as {n: Mat of shape B_{n+1} x A_n}).  phihat survives, omega
    picks up -D phi_A, and theta is preserved on the nose."""
    f = m.f
    A, B = f.source, f.target
    if g.source is not A or g.target is not B:
        raise NaturalityError("the homotopic map must share both ends")

    def dmat(n):
        mm = D.get(n)
        if mm is None:
            mm = Mat.zero(B.ngens(n + 1), A.ngens(n))
        return mm

    for n in A.degrees():
        diff = (g.mat(n) - f.mat(n)
                - B.boundary_matrix(n + 1) * dmat(n)
                - dmat(n - 1) * A.boundary_matrix(n))
        for j in range(diff.cols):
            if not B.is_zero_coords(n, diff.col(j)):
                raise NaturalityError("not a homotopy from f to g in degree %d" % n)
    omega = {n: m.omega(n) - dmat(n) * m.wsA.phi(n) for n in A.degrees()}
    return WeakSplitChainMap(g, m.wsA, m.wsB,
                             {n: m.phihat(n) for n in A.degrees()}, omega)


def _paired_kunneth(mF, mG, src_pair, tgt_pair):
    if src_pair is None:
        src_pair = KunnethPair(mF.source, mG.source, wsC=mF.wsA, wsD=mG.wsA)
    if tgt_pair is None:
        tgt_pair = KunnethPair(mF.target, mG.target, wsC=mF.wsB, wsD=mG.wsB)
    if (src_pair.wsC is not mF.wsA or src_pair.wsD is not mG.wsA
            or tgt_pair.wsC is not mF.wsB or tgt_pair.wsD is not mG.wsB):
        raise NaturalityError("the pairs must be built on the maps' splittings")
    return src_pair, tgt_pair


def deviation_check(mF, mG, t, src_pair=None, tgt_pair=None):
    """The correction law for pushing a section value through f (x) g:

        lambda''<f a, r, g b> = (f x g)_* lambda<a, r, b>
                                + (-1)^(i+1) (f a) x theta_g(b)
                                + theta_f(a) x (g b)

    where the theta values are crossed through integral lifts (well
    defined: the partner class is r-torsion).  Returns the common value;
    raises NaturalityError if the two sides disagree.
    """
    t.check()
    src_pair, tgt_pair = _paired_kunneth(mF, mG, src_pair, tgt_pair)
    i = degree_of(mF.source, t.a)
    j = degree_of(mG.source, t.b)
    fa = mF.f.induced(i).apply(t.a)
    gb = mG.f.induced(j).apply(t.b)
    lhs = tgt_pair.lam(ElementaryTor(fa, t.r, gb), i, j)
    push = tensor_chain_map(mF.f, mG.f, src_pair.T, tgt_pair.T)
    pushed = push.induced(i + j + 1).apply(src_pair.lam(t, i, j))
    thf = mF.theta(t.r, i)
    thg = mG.theta(t.r, j)
    sign = 1 if i % 2 else -1
    rhs = (pushed
           + tgt_pair.cross(fa, thg.lift(thg.apply(t.b)), i, j + 1) * sign
           + tgt_pair.cross(thf.lift(thf.apply(t.a)), gb, i + 1, j))
    if lhs != rhs:
        raise NaturalityError("deviation law fails: %r != %r" % (lhs, rhs))
    return lhs


def cosets_natural_check(mF, mG, t, src_pair=None, tgt_pair=None):
    """f (x) g carries the whole coset of section values on <a, r, b> into
    the coset on <f a, r, g b>: the pushed representative lands in the
    target coset and the pushed indeterminacy lands in its subgroup.
    Returns True; raises NaturalityError otherwise."""
    t.check()
    src_pair, tgt_pair = _paired_kunneth(mF, mG, src_pair, tgt_pair)
    i = degree_of(mF.source, t.a)
    j = degree_of(mG.source, t.b)
    fa = mF.f.induced(i).apply(t.a)
    gb = mG.f.induced(j).apply(t.b)
    src = tor_coset(src_pair, t, i, j)
    tgt = tor_coset(tgt_pair, ElementaryTor(fa, t.r, gb), i, j)
    push = tensor_chain_map(mF.f, mG.f, src_pair.T, tgt_pair.T).induced(i + j + 1)
    if not tgt.contains(push.apply(src.representative)):
        raise NaturalityError("pushed representative escapes the target coset")
    for gen in src.generators:
        if not tgt.contains(tgt.representative + push.apply(gen)):
            raise NaturalityError("pushed indeterminacy escapes the target coset")
    return True


__all__ = [
    "NaturalityError", "WeakSplitChainMap", "ThetaMap", "complete", "compose",
    "internal_sum", "direct_sum", "homotopy_transport", "deviation_check",
    "cosets_natural_check",
]
