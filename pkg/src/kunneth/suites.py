"""Named verification suites: every theorem in the library, run at
configurable scale with seeded random instances.

Each suite is a family of independent cases.  A case is built from the
suite seed and its index alone, checks one or more named properties, and
on failure produces a counterexample payload: the serialized complexes
and maps, the elementary symbol, and the two sides of the identity that
broke.  `replay(payload)` re-executes exactly that check from the payload
with no further input, so failures travel well.

Cases are independent by construction, so `run_suite(..., jobs=k)` may
fan them out over processes; reports aggregate by case index and are
identical whatever the completion order.
"""

import random
from concurrent.futures import ProcessPoolExecutor
from math import gcd, lcm

from .linalg import Mat, smith_normal_form
from .abgroups import (ElementaryTor, FpAbGroup, GroupMorphism, annihilator,
                       direct_sum, elementary_tor_reduce, tor_group,
                       tor_slot_source)
from .complexes import (ChainMap, ShortExactSequence, boundary_splitting,
                        ses_free_approximation, tensor_chain_map,
                        tensor_complex, tensor_complex_general,
                        free_approximation, weak_splitting)
from .documents import (_mat_rows, _parse_matrix, complex_document,
                        document_complex, moore, random_fp_complex,
                        random_free_complex, random_free_map, rp, sphere)
from .splitting import (KunnethPair, bockstein, bockstein_form_check,
                        bockstein_split_kappa, compatible_family, tor_coset,
                        verify_compatible)
from .naturality import (complete, compose, cosets_natural_check,
                         deviation_check, homotopy_transport)
from .exactness import (BoundaryContext, boundary_kunneth_diagram,
                        boundary_tor_check, connecting, flip_check,
                        flip_kunneth_diagram, flip_pair, multiplication_ses,
                        truncation_ses, weak_exact_from_ses)


class SuiteError(ValueError):
    pass


class SuiteCounterexample(Exception):
    """A failed property with the extra payload fields that pin it down."""

    def __init__(self, message, extra=None):
        super().__init__(message)
        self.extra = dict(extra or {})


# -------------------------------------------------- payload (de)serialization


def _istr(x):
    return str(int(x))


def _coords_doc(coords):
    return [_istr(v) for v in coords]


def _coords(doc):
    return tuple(int(v) for v in doc)


def _symbol_doc(t, i, j):
    return {"a": _coords_doc(t.a.coords), "r": _istr(t.r),
            "b": _coords_doc(t.b.coords), "i": _istr(i), "j": _istr(j)}


def _map_doc(f):
    return {_istr(n): _mat_rows(f.mat(n))
            for n in f.mats if not f.mat(n).is_zero}


def _map_from(doc, src, tgt, where):
    mats = {}
    for key, rows in doc.items():
        n = int(key)
        mats[n] = _parse_matrix(rows, tgt.ngens(n), src.ngens(n),
                                "%s, degree %d" % (where, n))
    return ChainMap(src, tgt, mats)


def _cx(payload, key):
    return document_complex(payload[key])


def _fail(message, **extra):
    raise SuiteCounterexample(message, extra)


def _slot_symbols(tor):
    """One elementary symbol per Tor generator: <gamma_k, d_k, b_l>."""
    out = []
    for k, slot in enumerate(tor.slots):
        gamma, d = tor_slot_source(tor, k)
        for l in range(slot.subgroup.ngens):
            out.append(ElementaryTor(gamma, d, slot.inclusion.apply(slot.subgroup.gen(l))))
    return out


def _torsion_symbols(left, right):
    """Symbols over the torsion generators of two homology groups."""
    out = []
    for a in left.generators():
        da = annihilator(a)
        if da in (0, 1):
            continue
        for b in right.generators():
            db = annihilator(b)
            if db in (0, 1):
                continue
            out.append(ElementaryTor(a, lcm(da, db), b))
    return out


# ------------------------------------------------------------------ checks
#
# Each check rebuilds its instance from the payload and raises
# SuiteCounterexample when the property fails, so a stored payload
# replays to the same verdict.


def _check_mu_lambda_identity(payload):
    pair = KunnethPair(_cx(payload, "C"), _cx(payload, "D"))
    for n in range(pair.T.lo, pair.T.hi + 1):
        for (i, j) in pair.tor_degrees(n):
            tor = pair.tor(i, j)
            comp = pair.mu_morphism(i, j).compose(pair.lam_morphism(i, j))
            for t, g in zip(_slot_symbols(tor), tor.group.generators()):
                back = comp.apply(g)
                if back != g:
                    _fail("mu o lambda moved a generator",
                          symbol=_symbol_doc(t, i, j),
                          lhs=repr(back), rhs=repr(g))


def _check_mu_vanishes_elsewhere(payload):
    pair = KunnethPair(_cx(payload, "C"), _cx(payload, "D"))
    for n in range(pair.T.lo, pair.T.hi + 1):
        degrees = pair.tor_degrees(n)
        for (i, j) in degrees:
            lam = pair.lam_morphism(i, j)
            for (k, l) in degrees:
                if (k, l) == (i, j):
                    continue
                other = pair.mu_morphism(k, l).compose(lam)
                for t, g in zip(_slot_symbols(pair.tor(i, j)),
                                pair.tor(i, j).group.generators()):
                    leak = other.apply(g)
                    if not leak.is_zero:
                        _fail("lambda leaks into bidegree (%d, %d)" % (k, l),
                              symbol=_symbol_doc(t, i, j), lhs=repr(leak),
                              rhs="0")


def _check_tor_symbol_relations(payload):
    m, n = int(payload["m"]), int(payload["n"])
    A, B = FpAbGroup.cyclic(m), FpAbGroup.cyclic(n)
    tor = tor_group(A, B)
    rmax = int(payload["rmax"])

    def reduce(a, r, b):
        return elementary_tor_reduce(
            ElementaryTor(A.element((a,)), r, B.element((b,))), tor)

    for a in range(m):
        for b in range(n):
            base = lcm(m // gcd(a, m), n // gcd(b, n))
            for r in range(base, rmax + 1, base):
                # additivity, both slots, against every admissible shift
                for a2 in range(m):
                    if (a2 * r) % m:
                        continue
                    if reduce((a + a2) % m, r, b) != reduce(a, r, b) + reduce(a2, r, b):
                        _fail("left additivity broke",
                              data=[_istr(v) for v in (a, a2, r, b)])
                for b2 in range(n):
                    if (b2 * r) % n:
                        continue
                    if reduce(a, r, (b + b2) % n) != reduce(a, r, b) + reduce(a, r, b2):
                        _fail("right additivity broke",
                              data=[_istr(v) for v in (a, r, b, b2)])
                # shifts <a, r1 r2, b> = <r1 a, r2, b> = <a, r1, r2 b>
                for r1 in range(1, r + 1):
                    if r % r1:
                        continue
                    r2 = r // r1
                    if (b * r2) % n == 0:
                        if reduce(a, r, b) != reduce((a * r1) % m, r2, b):
                            _fail("left shift broke",
                                  data=[_istr(v) for v in (a, r1, r2, b)])
                    if (a * r1) % m == 0:
                        if reduce(a, r, b) != reduce(a, r1, (b * r2) % n):
                            _fail("right shift broke",
                                  data=[_istr(v) for v in (a, r1, r2, b)])


def _check_tor_lambda_relations(payload):
    m, n = int(payload["m"]), int(payload["n"])
    C, D = moore(m, 1), moore(n, 1)
    pair = KunnethPair(C, D)
    hC, hD = pair.hC(1).group, pair.hD(1).group

    def lam(a, r, b):
        return pair.lam(ElementaryTor(hC.element((a,)), r,
                                      hD.element((b,))), 1, 1)

    L = lcm(m, n)
    for a in range(m):
        for b in range(n):
            base = lcm(m // gcd(a, m), n // gcd(b, n))
            for r in (base, 2 * base):
                if r > 2 * L:
                    continue
                for a2 in range(m):
                    if (a2 * r) % m:
                        continue
                    if lam((a + a2) % m, r, b) != lam(a, r, b) + lam(a2, r, b):
                        _fail("lambda is not additive on the left",
                              data=[_istr(v) for v in (a, a2, r, b)])
                for r1 in range(1, r + 1):
                    if r % r1:
                        continue
                    r2 = r // r1
                    if (a * r1) % m == 0:
                        if lam(a, r, b) != lam(a, r1, (b * r2) % n):
                            _fail("lambda ignores the shift relation",
                                  data=[_istr(v) for v in (a, r1, r2, b)])


def _check_concrete_moore_square(payload):
    C = moore(2, 1)
    pair = KunnethPair(C, C)
    if pair.hT(2).group.invariant_factors != (2,):
        _fail("H_2 of the product is wrong",
              lhs=repr(pair.hT(2).group.invariant_factors), rhs="(2,)")
    if pair.hT(3).group.invariant_factors != (2,):
        _fail("H_3 of the product is wrong",
              lhs=repr(pair.hT(3).group.invariant_factors), rhs="(2,)")
    if not pair.hT(4).group.is_trivial:
        _fail("H_4 of the product should vanish",
              lhs=repr(pair.hT(4).group.invariant_factors), rhs="()")
    g = C.homology(1).group.gen(0)
    t = ElementaryTor(g, 2, g)
    value = pair.lam(t, 1, 1)
    # the class of e1 (x) f2 + e2 (x) f1 generates H_3
    expected = pair.hT(3).class_of(pair.T.chain(3, (1, 1)))
    if value != expected:
        _fail("lambda misses the hand-computed representative",
              symbol=_symbol_doc(t, 1, 1), lhs=repr(value), rhs=repr(expected))
    if value.is_zero:
        _fail("lambda value should generate H_3", lhs=repr(value), rhs="gen")


def _check_concrete_rp3(payload):
    C = rp(3)
    facts = {0: ((), 1), 1: ((2,), 0), 2: ((), 0), 3: ((), 1)}
    for n, (tors, free) in facts.items():
        g = C.homology(n).group
        if g.invariant_factors != tors or g.free_rank != free:
            _fail("H_%d of rp(3) is wrong" % n,
                  lhs="%r + Z^%d" % (g.invariant_factors, g.free_rank),
                  rhs="%r + Z^%d" % (tors, free))


def _check_concrete_sphere_product(payload):
    pair = KunnethPair(sphere(2), sphere(3))
    for n in range(pair.T.lo, pair.T.hi + 1):
        if pair.tor_degrees(n):
            _fail("sphere product grew a Tor summand in degree %d" % n)
    if pair.hT(5).group.free_rank != 1:
        _fail("H_5 of the sphere product is wrong",
              lhs=repr(pair.hT(5).group.free_rank), rhs="1")


def _check_lambda_splitting_choice(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    T = tensor_complex_general(C, D)
    pairA = KunnethPair(C, D, wsC=weak_splitting(C, rng=random.Random(payload["sA"])),
                        wsD=weak_splitting(D, rng=random.Random(payload["sA"] + 1)), T=T)
    pairB = KunnethPair(C, D, wsC=weak_splitting(C, rng=random.Random(payload["sB"])),
                        wsD=weak_splitting(D, rng=random.Random(payload["sB"] + 1)), T=T)
    for n in range(T.lo, T.hi + 1):
        for (i, j) in pairA.tor_degrees(n):
            for t in _slot_symbols(pairA.tor(i, j)):
                coset = tor_coset(pairA, t, i, j)
                other = pairB.lam(t, i, j)
                if not coset.contains(other):
                    _fail("second splitting escaped the indeterminacy coset",
                          symbol=_symbol_doc(t, i, j), lhs=repr(other),
                          rhs=repr(coset.representative))


def _check_pushforward_coset(payload):
    A, Ap = _cx(payload, "A"), _cx(payload, "Ap")
    B, Bp = _cx(payload, "B"), _cx(payload, "Bp")
    f = _map_from(payload["f"], A, Ap, "f")
    g = _map_from(payload["g"], B, Bp, "g")
    mF = complete(f, rng=random.Random(payload["sf"]))
    mG = complete(g, rng=random.Random(payload["sg"]))
    src = KunnethPair(A, B, wsC=mF.wsA, wsD=mG.wsA)
    tgt = KunnethPair(Ap, Bp, wsC=mF.wsB, wsD=mG.wsB)
    for i in A.degrees():
        for j in B.degrees():
            for t in _torsion_symbols(src.hC(i).group, src.hD(j).group):
                try:
                    cosets_natural_check(mF, mG, t, src_pair=src, tgt_pair=tgt)
                except ValueError as exc:
                    _fail(str(exc), symbol=_symbol_doc(t, i, j))


def _check_bockstein_forms(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    sigma, tau = boundary_splitting(C), boundary_splitting(D)
    pair = KunnethPair(C, D)
    T = pair.T
    for n in range(T.lo, T.hi + 1):
        for (i, j) in pair.tor_degrees(n):
            for t in _slot_symbols(pair.tor(i, j)):
                try:
                    bockstein_form_check(sigma, tau, t, T=T)
                except ValueError as exc:
                    _fail(str(exc), symbol=_symbol_doc(t, i, j))


def _check_kappa_in_coset(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    wsC = weak_splitting(C, rng=random.Random(payload["sC"]))
    wsD = weak_splitting(D, rng=random.Random(payload["sD"]))
    pair = KunnethPair(C, D, wsC=wsC, wsD=wsD)
    for n in range(pair.T.lo, pair.T.hi + 1):
        for (i, j) in pair.tor_degrees(n):
            tor = pair.tor(i, j)
            famC = compatible_family(wsC, i)
            famD = compatible_family(wsD, j)
            for t in _slot_symbols(tor):
                kappa = bockstein_split_kappa(pair, famC, famD, t, i, j)
                if pair.mu(kappa, i, j) != elementary_tor_reduce(t, tor):
                    _fail("kappa is not a section of mu",
                          symbol=_symbol_doc(t, i, j), lhs=repr(kappa))
                if not tor_coset(pair, t, i, j).contains(kappa):
                    _fail("kappa escaped the indeterminacy coset",
                          symbol=_symbol_doc(t, i, j), lhs=repr(kappa))


def _check_compatible_family(payload):
    C = _cx(payload, "C")
    ws = weak_splitting(C, rng=random.Random(payload["s"]))
    for n in C.degrees():
        fam = compatible_family(ws, n)
        for (r1, r2) in ((2, 2), (2, 3), (3, 2), (4, 2), (6, 4)):
            if not verify_compatible(fam, r1, r2):
                _fail("a compatibility square of the section family broke",
                      data=[_istr(n), _istr(r1), _istr(r2)])


def _check_deviation_law(payload):
    A, Ap = _cx(payload, "A"), _cx(payload, "Ap")
    B, Bp = _cx(payload, "B"), _cx(payload, "Bp")
    f = _map_from(payload["f"], A, Ap, "f")
    g = _map_from(payload["g"], B, Bp, "g")
    mF = complete(f, rng=random.Random(payload["sf"]))
    mG = complete(g, rng=random.Random(payload["sg"]))
    src = KunnethPair(A, B, wsC=mF.wsA, wsD=mG.wsA)
    tgt = KunnethPair(Ap, Bp, wsC=mF.wsB, wsD=mG.wsB)
    for i in A.degrees():
        for j in B.degrees():
            for t in _torsion_symbols(src.hC(i).group, src.hD(j).group):
                try:
                    deviation_check(mF, mG, t, src_pair=src, tgt_pair=tgt)
                except ValueError as exc:
                    _fail(str(exc), symbol=_symbol_doc(t, i, j))


def _theta_levels(m):
    out = []
    for n in m.source.degrees():
        for d in sorted(set(m.source.homology(n).group.invariant_factors)):
            if d > 1:
                out.extend([(d, n), (2 * d, n), (-d, n)])
    return out


def _check_theta_recompletion(payload):
    A, Ap = _cx(payload, "A"), _cx(payload, "Ap")
    f = _map_from(payload["f"], A, Ap, "f")
    wsA, wsB = weak_splitting(A), weak_splitting(Ap)
    m1 = complete(f, wsA, wsB, rng=random.Random(payload["s1"]))
    m2 = complete(f, wsA, wsB, rng=random.Random(payload["s2"]))
    for (r, n) in _theta_levels(m1):
        t1, t2 = m1.theta(r, n), m2.theta(r, n)
        if t1 != t2:
            _fail("theta changed under recompletion",
                  data=[_istr(r), _istr(n)], lhs=repr(t1.mat), rhs=repr(t2.mat))


def _check_theta_composition(payload):
    A, B = _cx(payload, "A"), _cx(payload, "B")
    f = _map_from(payload["f"], A, B, "f")
    g = _map_from(payload["g"], B, B, "g")
    rng = random.Random(payload["s"])
    wsB = weak_splitting(B)
    mF = complete(f, wsB=wsB, rng=rng)
    mG = complete(g, wsA=wsB, rng=rng)
    mGF = compose(mF, mG)
    for (r, n) in _theta_levels(mF):
        thGF, thF, thG = mGF.theta(r, n), mF.theta(r, n), mG.theta(r, n)
        gstar = mG.f.induced(n + 1)
        for gen in thF.domain.generators():
            a = thF.inclusion.apply(gen)
            fa = mF.f.induced(n).apply(a)
            expect = (thGF.codomain.element(thG.apply(fa).coords)
                      + thGF.reduce(gstar.apply(thF.lift(thF.apply(a)))))
            got = thGF.apply(a)
            if got != expect:
                _fail("composition law broke at level %d, degree %d" % (r, n),
                      lhs=repr(got), rhs=repr(expect))


def _check_theta_homotopy(payload):
    A, B = _cx(payload, "A"), _cx(payload, "B")
    f = _map_from(payload["f"], A, B, "f")
    m = complete(f, rng=random.Random(payload["s"]))
    D = {}
    for key, rows in payload["D"].items():
        n = int(key)
        D[n] = _parse_matrix(rows, B.ngens(n + 1), A.ngens(n), "homotopy")
    mats = {}
    for n in A.degrees():
        up = D.get(n, Mat.zero(B.ngens(n + 1), A.ngens(n)))
        dn = D.get(n - 1, Mat.zero(B.ngens(n), A.ngens(n - 1)))
        mats[n] = f.mat(n) + B.boundary_matrix(n + 1) * up + dn * A.boundary_matrix(n)
    g = ChainMap(A, B, mats)
    m2 = homotopy_transport(m, D, g)
    for (r, n) in _theta_levels(m):
        if m.theta(r, n) != m2.theta(r, n):
            _fail("theta moved across a homotopy",
                  data=[_istr(r), _istr(n)])


def _check_flip_symbol_law(payload):
    pair = KunnethPair(_cx(payload, "C"), _cx(payload, "D"))
    flipped = flip_pair(pair)
    for n in range(pair.T.lo, pair.T.hi + 1):
        for (i, j) in pair.tor_degrees(n):
            for t in _slot_symbols(pair.tor(i, j)):
                try:
                    flip_check(pair, t, flipped=flipped, i=i, j=j)
                except ValueError as exc:
                    _fail(str(exc), symbol=_symbol_doc(t, i, j))


def _check_flip_diagram(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    pair = KunnethPair(C, D)
    flipped = flip_pair(pair)
    for n in range(pair.T.lo, pair.T.hi + 1):
        try:
            flip_kunneth_diagram(C, D, n, pair=pair, flipped=flipped)
        except ValueError as exc:
            _fail(str(exc), data=[_istr(n)])


def _rebuild_ses(payload):
    A, B, Q = _cx(payload, "A"), _cx(payload, "B"), _cx(payload, "Q")
    f = _map_from(payload["f"], A, B, "f")
    g = _map_from(payload["g"], B, Q, "g")
    return ShortExactSequence(f, g)


def _check_boundary_coset(payload):
    ses = _rebuild_ses(payload)
    wes = weak_exact_from_ses(ses, rng=random.Random(payload["sw"]))
    E = _cx(payload, "E")
    side = payload["side"]
    ctx = BoundaryContext(wes, E, side=side)
    for i in wes.Q.degrees():
        hq = wes.Q.homology(i).group
        for j in E.degrees():
            he = E.homology(j).group
            left, right = (hq, he) if side == "right" else (he, hq)
            for t in _torsion_symbols(left, right):
                try:
                    boundary_tor_check(wes, E, t, side=side, ctx=ctx)
                except ValueError as exc:
                    _fail(str(exc), symbol=_symbol_doc(t, i, j))


def _check_boundary_diagram(payload):
    ses = _rebuild_ses(payload)
    wes = weak_exact_from_ses(ses, rng=random.Random(payload["sw"]))
    E = _cx(payload, "E")
    ctx = BoundaryContext(wes, E)
    for n in range(ctx.twes.Q.lo, ctx.twes.Q.hi + 1):
        try:
            boundary_kunneth_diagram(wes, E, n, ctx=ctx)
        except ValueError as exc:
            _fail(str(exc), data=[_istr(n)])


def _check_mod_bockstein_agreement(payload):
    C = _cx(payload, "C")
    r = int(payload["r"])
    ses, red = multiplication_ses(C, r)
    for n in red.complex.degrees():
        d = connecting(ses, n)
        for x in red.complex.homology(n).group.generators():
            got, want = d.apply(x), bockstein(red, x, r=r)
            if got != want:
                _fail("connecting map disagrees with the Bockstein",
                      data=[_istr(n)], lhs=repr(got), rhs=repr(want))


def _check_nu_quasi_iso(payload):
    C = _cx(payload, "C")
    ap = free_approximation(C, rng=random.Random(payload["s"]))
    try:
        ap.verify()
    except ValueError as exc:
        _fail(str(exc))


def _check_ses_squares(payload):
    C = _cx(payload, "C")
    ses, _ = multiplication_ses(C, int(payload["r"]))
    ap = ses_free_approximation(ses, rng=random.Random(payload["s"]))
    try:
        ap.verify()
    except ValueError as exc:
        _fail(str(exc))


def _check_dold_tensor(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    rng = random.Random(payload["s"])
    apC = free_approximation(C, rng=rng)
    apD = free_approximation(D, rng=rng)
    TL = tensor_complex_general(C, D)
    TF = tensor_complex(apC.F, apD.F)
    nu = tensor_chain_map(apC.nu, apD.nu, TF, TL)
    if not nu.is_quasi_iso():
        _fail("tensored approximation is not a quasi-isomorphism")


def _check_smith_witnesses(payload):
    M = _parse_matrix(payload["M"], int(payload["rows"]), int(payload["cols"]),
                      "matrix")
    dec = smith_normal_form(M)
    if dec.U * M * dec.V != dec.S:
        _fail("U A V != S")
    if dec.U * dec.Uinv != Mat.identity(M.rows) or \
            dec.V * dec.Vinv != Mat.identity(M.cols):
        _fail("transform witnesses are not inverses")
    facs = dec.invariant_factors
    for a, b in zip(facs, facs[1:]):
        if a <= 0 or b % a:
            _fail("invariant factors break the divisibility chain",
                  lhs=repr(facs))
    for i in range(dec.S.rows):
        for j in range(dec.S.cols):
            if i != j and dec.S.data[i][j]:
                _fail("S is not diagonal")


def _check_tor_order_formula(payload):
    A = FpAbGroup(int(payload["na"]),
                  _parse_matrix(payload["A"], int(payload["na"]),
                                len(payload["A"][0]) if payload["A"] else 0, "A"))
    B = FpAbGroup(int(payload["nb"]),
                  _parse_matrix(payload["B"], int(payload["nb"]),
                                len(payload["B"][0]) if payload["B"] else 0, "B"))
    expected = 1
    for d in A.invariant_factors:
        for e in B.invariant_factors:
            expected *= gcd(d, e)
    got = tor_group(A, B).group.order()
    if got != expected:
        _fail("Tor order misses the gcd formula",
              lhs=_istr(got), rhs=_istr(expected))


def _check_cross_kernel(payload):
    C, D = _cx(payload, "C"), _cx(payload, "D")
    pair = KunnethPair(C, D)
    for n in range(pair.T.lo, pair.T.hi + 1):
        hT = pair.hT(n).group
        degrees = pair.tor_degrees(n)
        if degrees:
            groups = [pair.tor(i, j).group for (i, j) in degrees]
            total, _, prjs = direct_sum(groups)
            mat = Mat.from_cols(
                [sum((tuple(pair.mu_morphism(i, j).mat.col(c))
                      for (i, j) in degrees), ())
                 for c in range(hT.ngens)], rows=total.ngens)
            mu_all = GroupMorphism(hT, total, mat, check=False)
        else:
            total = FpAbGroup.trivial()
            mu_all = GroupMorphism.zero(hT, total)
        cross_cols = []
        for (i, j) in pair.tensor_degrees(n):
            for a in pair.hC(i).group.generators():
                for b in pair.hD(j).group.generators():
                    cross_cols.append(pair.cross(a, b, i, j).coords)
        span = GroupMorphism(FpAbGroup.free(len(cross_cols)), hT,
                             Mat.from_cols(cross_cols, rows=hT.ngens),
                             check=False)
        for k in range(len(cross_cols)):
            img = span.apply(span.source.gen(k))
            if not mu_all.apply(img).is_zero:
                _fail("a cross product escaped the kernel of mu in degree %d" % n)
        K, incl = mu_all.kernel()
        for g in K.generators():
            if span.preimage(incl.apply(g)) is None:
                _fail("kernel of mu is not generated by cross products "
                      "in degree %d" % n)


CHECKS = {
    "mu_lambda_identity": _check_mu_lambda_identity,
    "mu_vanishes_elsewhere": _check_mu_vanishes_elsewhere,
    "tor_symbol_relations": _check_tor_symbol_relations,
    "tor_lambda_relations": _check_tor_lambda_relations,
    "concrete_moore_square": _check_concrete_moore_square,
    "concrete_rp3": _check_concrete_rp3,
    "concrete_sphere_product": _check_concrete_sphere_product,
    "lambda_splitting_choice": _check_lambda_splitting_choice,
    "pushforward_coset": _check_pushforward_coset,
    "bockstein_forms": _check_bockstein_forms,
    "kappa_in_coset": _check_kappa_in_coset,
    "compatible_family": _check_compatible_family,
    "deviation_law": _check_deviation_law,
    "theta_recompletion": _check_theta_recompletion,
    "theta_composition": _check_theta_composition,
    "theta_homotopy": _check_theta_homotopy,
    "flip_symbol_law": _check_flip_symbol_law,
    "flip_diagram": _check_flip_diagram,
    "boundary_coset": _check_boundary_coset,
    "boundary_coset_mirrored": _check_boundary_coset,
    "boundary_diagram": _check_boundary_diagram,
    "mod_bockstein_agreement": _check_mod_bockstein_agreement,
    "nu_quasi_iso": _check_nu_quasi_iso,
    "ses_squares": _check_ses_squares,
    "dold_tensor": _check_dold_tensor,
    "smith_witnesses": _check_smith_witnesses,
    "tor_order_formula": _check_tor_order_formula,
    "cross_kernel": _check_cross_kernel,
}


def run_check(payload):
    """Execute the check a payload describes; raises SuiteCounterexample."""
    name = payload.get("check")
    fn = CHECKS.get(name)
    if fn is None:
        raise SuiteError("unknown check %r" % (name,))
    fn(payload)


def replay(payload):
    """Re-run a counterexample payload.  Returns (still_failing, message)."""
    try:
        run_check(payload)
    except SuiteCounterexample as exc:
        return True, str(exc)
    return False, "check passes now"


# ------------------------------------------------------------------ suites


def _doc(C, name="complex"):
    return complex_document(C, name=name)


def _free_pair(rng, max_degree=5, max_rank=4, max_entry=6):
    C = random_free_complex(rng, max_degree=max_degree, max_rank=max_rank,
                            max_entry=max_entry)
    D = random_free_complex(rng, max_degree=max_degree, max_rank=max_rank,
                            max_entry=max_entry)
    return C, D


def _build_splitting(rng, index):
    C, D = _free_pair(rng)
    docs = {"C": _doc(C, "C"), "D": _doc(D, "D")}
    return [("mu_lambda_identity", dict(check="mu_lambda_identity", **docs)),
            ("mu_vanishes_elsewhere",
             dict(check="mu_vanishes_elsewhere", **docs))]


def _build_tor_relations(rng, index):
    m = 2 + (index // 11) % 11
    n = 2 + index % 11
    return [("tor_symbol_relations",
             {"check": "tor_symbol_relations", "m": _istr(m), "n": _istr(n),
              "rmax": "24"}),
            ("tor_lambda_relations",
             {"check": "tor_lambda_relations", "m": _istr(m), "n": _istr(n)})]


def _build_concrete(rng, index):
    return [("concrete_moore_square", {"check": "concrete_moore_square"}),
            ("concrete_rp3", {"check": "concrete_rp3"}),
            ("concrete_sphere_product", {"check": "concrete_sphere_product"})]


def _build_cosets(rng, index):
    C, D = _free_pair(rng, max_degree=4, max_rank=3)
    out = [("lambda_splitting_choice",
            {"check": "lambda_splitting_choice", "C": _doc(C, "C"),
             "D": _doc(D, "D"), "sA": rng.randrange(10 ** 6),
             "sB": rng.randrange(10 ** 6)})]
    f = random_free_map(rng)
    g = random_free_map(rng)
    out.append(("pushforward_coset",
                {"check": "pushforward_coset",
                 "A": _doc(f.source, "A"), "Ap": _doc(f.target, "Ap"),
                 "B": _doc(g.source, "B"), "Bp": _doc(g.target, "Bp"),
                 "f": _map_doc(f), "g": _map_doc(g),
                 "sf": rng.randrange(10 ** 6), "sg": rng.randrange(10 ** 6)}))
    return out


def _build_bockstein(rng, index):
    if index == 0:
        C, D = moore(4, 1), moore(4, 1)
    elif index == 1:
        C, D = moore(6, 1), moore(6, 1)
    else:
        C, D = _free_pair(rng, max_degree=3, max_rank=2)
    docs = {"C": _doc(C, "C"), "D": _doc(D, "D")}
    return [("bockstein_forms", dict(check="bockstein_forms", **docs)),
            ("kappa_in_coset", dict(check="kappa_in_coset",
                                    sC=rng.randrange(10 ** 6),
                                    sD=rng.randrange(10 ** 6), **docs)),
            ("compatible_family",
             {"check": "compatible_family", "C": docs["C"],
              "s": rng.randrange(10 ** 6)})]


def _build_deviation(rng, index):
    f = random_free_map(rng)
    g = random_free_map(rng)
    sf, sg = rng.randrange(10 ** 6), rng.randrange(10 ** 6)
    out = [("deviation_law",
            {"check": "deviation_law",
             "A": _doc(f.source, "A"), "Ap": _doc(f.target, "Ap"),
             "B": _doc(g.source, "B"), "Bp": _doc(g.target, "Bp"),
             "f": _map_doc(f), "g": _map_doc(g), "sf": sf, "sg": sg})]
    out.append(("theta_recompletion",
                {"check": "theta_recompletion", "A": _doc(f.source, "A"),
                 "Ap": _doc(f.target, "Ap"), "f": _map_doc(f),
                 "s1": rng.randrange(10 ** 6), "s2": rng.randrange(10 ** 6)}))
    # post-composable partner: k id + a null-homotopic perturbation
    B = f.target
    k = rng.choice((1, 2, 3, -1))
    D = {n: Mat([[rng.randrange(-1, 2) for _ in range(B.rank(n))]
                 for _ in range(B.rank(n + 1))], cols=B.rank(n))
         for n in B.degrees()}
    mats = {}
    for n in B.degrees():
        dm = D.get(n, Mat.zero(B.rank(n + 1), B.rank(n)))
        dm1 = D.get(n - 1, Mat.zero(B.rank(n), B.rank(n - 1)))
        mats[n] = (k * Mat.identity(B.rank(n))
                   + B.boundary_matrix(n + 1) * dm + dm1 * B.boundary_matrix(n))
    g2 = ChainMap(B, B, mats)
    out.append(("theta_composition",
                {"check": "theta_composition", "A": _doc(f.source, "A"),
                 "B": _doc(B, "B"), "f": _map_doc(f), "g": _map_doc(g2),
                 "s": rng.randrange(10 ** 6)}))
    hom = {n: [[rng.randrange(-1, 2) for _ in range(f.source.rank(n))]
               for _ in range(B.rank(n + 1))]
           for n in f.source.degrees() if B.rank(n + 1)}
    out.append(("theta_homotopy",
                {"check": "theta_homotopy", "A": _doc(f.source, "A"),
                 "B": _doc(B, "B"), "f": _map_doc(f),
                 "D": {_istr(n): [[_istr(v) for v in row] for row in rows]
                       for n, rows in hom.items()},
                 "s": rng.randrange(10 ** 6)}))
    return out


def _build_flip(rng, index):
    C, D = _free_pair(rng, max_degree=4, max_rank=3)
    docs = {"C": _doc(C, "C"), "D": _doc(D, "D")}
    return [("flip_symbol_law", dict(check="flip_symbol_law", **docs)),
            ("flip_diagram", dict(check="flip_diagram", **docs))]


def _build_boundary(rng, index):
    if index % 3 == 0:
        # the multiplication-by-2 family over Moore complexes
        C = moore(2, 1 + index % 2)
        ses, _ = multiplication_ses(C, 2)
        r = 2
    elif index % 3 == 1:
        C = random_free_complex(rng, max_degree=3, max_rank=2, max_entry=5)
        r = rng.choice((2, 3, 4))
        ses, _ = multiplication_ses(C, r)
    else:
        C = random_free_complex(rng, max_degree=3, max_rank=2, max_entry=5)
        r = rng.choice((2, 3, 4))
        if C.hi > C.lo:
            ses = truncation_ses(C, rng.randrange(C.lo + 1, C.hi + 1))
        else:
            ses, _ = multiplication_ses(C, r)
    E = random_free_complex(rng, max_degree=2, max_rank=2, max_entry=5)
    ses_doc = {"A": _doc(ses.A, "A"), "B": _doc(ses.B, "B"),
               "Q": _doc(ses.Q, "Q"), "f": _map_doc(ses.f),
               "g": _map_doc(ses.g), "E": _doc(E, "E"),
               "sw": rng.randrange(10 ** 6)}
    out = [("boundary_coset",
            dict(check="boundary_coset", side="right", **ses_doc)),
           ("boundary_coset_mirrored",
            dict(check="boundary_coset_mirrored", side="left", **ses_doc)),
           ("boundary_diagram", dict(check="boundary_diagram", **ses_doc))]
    if ses.A is ses.B:  # multiplication kind
        out.append(("mod_bockstein_agreement",
                    {"check": "mod_bockstein_agreement", "C": _doc(ses.A, "C"),
                     "r": _istr(r)}))
    return out


def _build_approximation(rng, index):
    C = random_fp_complex(rng, max_degree=3, max_gens=2, max_order=12)
    out = [("nu_quasi_iso", {"check": "nu_quasi_iso", "C": _doc(C, "C"),
                             "s": rng.randrange(10 ** 6)})]
    F = random_free_complex(rng, max_degree=3, max_rank=2, max_entry=5)
    out.append(("ses_squares",
                {"check": "ses_squares", "C": _doc(F, "C"),
                 "r": _istr(rng.choice((2, 3, 4))),
                 "s": rng.randrange(10 ** 6)}))
    E = random_free_complex(rng, max_degree=2, max_rank=2, max_entry=5)
    first, second = (C, E) if index % 2 == 0 else (E, C)
    out.append(("dold_tensor",
                {"check": "dold_tensor", "C": _doc(first, "C"),
                 "D": _doc(second, "D"), "s": rng.randrange(10 ** 6)}))
    return out


def _build_oracles(rng, index):
    rows = rng.randrange(1, 5)
    cols = rng.randrange(1, 5)
    M = [[rng.randrange(-9, 10) for _ in range(cols)] for _ in range(rows)]
    out = [("smith_witnesses",
            {"check": "smith_witnesses",
             "M": [[_istr(v) for v in row] for row in M],
             "rows": _istr(rows), "cols": _istr(cols)})]

    def group_doc(ngens):
        nrels = rng.randrange(0, ngens + 2)
        rel = [[rng.randrange(-12, 13) for _ in range(nrels)]
               for _ in range(ngens)]
        return [[_istr(v) for v in row] for row in rel]

    na, nb = rng.randrange(1, 4), rng.randrange(1, 4)
    out.append(("tor_order_formula",
                {"check": "tor_order_formula", "na": _istr(na),
                 "nb": _istr(nb), "A": group_doc(na), "B": group_doc(nb)}))
    C, D = _free_pair(rng, max_degree=3, max_rank=2)
    out.append(("cross_kernel",
                {"check": "cross_kernel", "C": _doc(C, "C"),
                 "D": _doc(D, "D")}))
    return out


class Suite:
    def __init__(self, name, build, default_cases, about):
        self.name = name
        self.build = build
        self.default_cases = default_cases
        self.about = about


SUITES = {
    s.name: s for s in (
        Suite("splitting", _build_splitting, 200,
              "mu o lambda = id and all other mu components vanish"),
        Suite("tor-relations", _build_tor_relations, 121,
              "elementary symbol relations, group and homology level"),
        Suite("concrete", _build_concrete, 1,
              "pinned instances with hand-computed answers"),
        Suite("cosets", _build_cosets, 100,
              "splitting choices and pushforwards stay in the coset"),
        Suite("bockstein", _build_bockstein, 50,
              "Bockstein forms of lambda, kappa, compatible families"),
        Suite("deviation", _build_deviation, 100,
              "the deviation law, recompletion, composition, homotopy"),
        Suite("flip", _build_flip, 100,
              "interchange against lambda and the full ladder"),
        Suite("boundary", _build_boundary, 50,
              "connecting maps against cosets, products, Bocksteins"),
        Suite("approximation", _build_approximation, 100,
              "free approximations: quasi-isos, squares, tensors"),
        Suite("oracles", _build_oracles, 100,
              "normal-form witnesses, Tor order formula, ker mu = im cross"),
    )
}


def suite_names():
    return sorted(SUITES)


def _suite_spec(name):
    spec = SUITES.get(name)
    if spec is None:
        raise SuiteError("unknown suite %r; available: %s"
                         % (name, ", ".join(suite_names())))
    return spec


def _case_seed(seed, index):
    return seed * 1_000_003 + index


def _case_results(name, seed, index):
    """[(property, counterexample payload or None)] for one case."""
    spec = _suite_spec(name)
    rng = random.Random(_case_seed(seed, index))
    out = []
    for prop, payload in spec.build(rng, index):
        err = None
        try:
            run_check(payload)
        except SuiteCounterexample as exc:
            err = dict(payload)
            err.update(exc.extra)
            err["message"] = str(exc)
            err["property"] = prop
            err["case"] = index
        out.append((prop, err))
    return out


class VerificationReport:
    """Aggregated pass/fail per property plus replayable counterexamples."""

    def __init__(self, suite, seed, cases):
        self.suite = suite
        self.seed = seed
        self.cases = cases
        self.properties = {}
        self.counterexamples = []

    def record(self, prop, err):
        passed, failed = self.properties.get(prop, (0, 0))
        if err is None:
            self.properties[prop] = (passed + 1, failed)
        else:
            self.properties[prop] = (passed, failed + 1)
            self.counterexamples.append(err)

    @property
    def ok(self):
        return not self.counterexamples

    def lines(self):
        out = ["suite %s: seed %d, %d cases" % (self.suite, self.seed, self.cases)]
        for prop in sorted(self.properties):
            passed, failed = self.properties[prop]
            flag = "ok  " if not failed else "FAIL"
            out.append("  %s %-26s %d passed, %d failed"
                       % (flag, prop, passed, failed))
        out.append("result: %s" % ("all pass" if self.ok
                                   else "%d counterexamples" % len(self.counterexamples)))
        return out

    def to_payload(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "ok": self.ok,
            "properties": {p: {"passed": v[0], "failed": v[1]}
                           for p, v in self.properties.items()},
            "counterexamples": self.counterexamples,
        }


def run_suite(name, seed=0, cases=None, jobs=1):
    """Run a named suite; deterministic for a given (name, seed, cases)."""
    spec = _suite_spec(name)
    if cases is None:
        cases = spec.default_cases
    if cases < 1:
        raise SuiteError("need at least one case")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ordered = list(pool.map(_case_results, [name] * cases,
                                    [seed] * cases, range(cases)))
    else:
        ordered = [_case_results(name, seed, k) for k in range(cases)]
    report = VerificationReport(name, seed, cases)
    for results in ordered:
        for prop, err in results:
            report.record(prop, err)
    return report


__all__ = [
    "SuiteError", "SuiteCounterexample", "VerificationReport",
    "run_suite", "run_check", "replay", "suite_names", "SUITES",
]
