"""Command-line front end.

Verbs: homology (groups with generator cycles), kunneth (the decomposition
of the homology of a tensor product, with section values), split (weak
splitting report), verify (named theorem suites), gen (complex documents).

Inputs are either builtin specs ("moore 2 1", "sphere 3", "rp 4", "point")
or paths to complex documents as produced by gen.  Reports print human
text followed by a machine block; exit status is 0 on success, 1 when a
verified property fails, 2 on usage or parse errors.
"""

import argparse
import os
import random
import sys

from .abgroups import annihilator
from .complexes import ComplexError, weak_splitting
from .documents import (DocumentError, document_complex, dump_document,
                        load_document, moore, point, random_free_complex, rp,
                        serialize_complex, sphere)
from .splitting import KunnethError, KunnethPair, kunneth_decomposition
from .suites import SuiteError, run_suite, suite_names


class CliError(ValueError):
    pass


MACHINE_MARK = "--- machine ---"


def _machine(doc):
    return MACHINE_MARK + "\n" + dump_document(doc)


def group_name(g):
    """Z^k + Z/d1 + ... rendering of a finitely presented abelian group."""
    parts = []
    if g.free_rank == 1:
        parts.append("Z")
    elif g.free_rank > 1:
        parts.append("Z^%d" % g.free_rank)
    parts.extend("Z/%d" % d for d in g.invariant_factors)
    return " + ".join(parts) if parts else "0"


def _group_doc(g):
    return {"free_rank": str(g.free_rank),
            "invariant_factors": [str(d) for d in g.invariant_factors]}


# ------------------------------------------------------------------ inputs


def resolve_complex(text):
    """A complex from a builtin spec string or a document path."""
    if os.path.exists(text):
        try:
            with open(text) as fh:
                return document_complex(load_document(fh.read()))
        except DocumentError as exc:
            raise CliError("%s: %s" % (text, exc))
    toks = text.split()
    kind, params = toks[0] if toks else "", toks[1:]
    want = {"moore": 2, "sphere": 1, "rp": 1, "point": 0}.get(kind)
    if want is None:
        raise CliError("unknown complex %r: not a file, and builtins are "
                       "moore m n, sphere n, rp n, point" % text)
    if len(params) != want or not all(p.lstrip("-").isdigit() for p in params):
        raise CliError("builtin %r takes %d integer parameter%s"
                       % (kind, want, "" if want == 1 else "s"))
    try:
        return {"moore": moore, "sphere": sphere, "rp": rp,
                "point": point}[kind](*[int(p) for p in params])
    except ValueError as exc:
        raise CliError(str(exc))


def _seed(args):
    """Flag seed if given, else KUNNETH_SEED from the environment, else 0."""
    explicit = _seed_or_none(args)
    return 0 if explicit is None else explicit


def _seed_or_none(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("KUNNETH_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise CliError("KUNNETH_SEED must be an integer, not %r" % env)


def _opt_rng(args):
    """An rng when a seed was chosen (flag or environment), else None: the
    canonical deterministic choices."""
    seed = _seed_or_none(args)
    return None if seed is None else random.Random(seed)


# ---------------------------------------------------------------- rendering


def _cumulative_label(C, letter, p, i):
    before = sum(C.rank(t) for t in C.degrees() if t < p)
    return "%s%d" % (letter, before + i + 1)


def _tensor_labels(T, n):
    """Basis labels of T_n, block order: e3*f1 for (gen 3 of C) (x) (gen 1)."""
    labels = []
    for (p, q, _) in T.blocks(n):
        for i in range(T.left.rank(p)):
            for j in range(T.right.rank(q)):
                labels.append("%s*%s" % (_cumulative_label(T.left, "e", p, i),
                                         _cumulative_label(T.right, "f", q, j)))
    return labels


def chain_str(coords, labels):
    terms = []
    for c, lab in zip(coords, labels):
        if not c:
            continue
        mag = "" if abs(c) == 1 else "%d*" % abs(c)
        terms.append(("-" if c < 0 else "+", mag + lab))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in terms[1:]:
        out += " %s %s" % (sign, term)
    return out


# ------------------------------------------------------------------- verbs


def cmd_homology(args, out):
    C = resolve_complex(args.complex)
    summary = []
    doc = {}
    detail = []
    for n in C.degrees():
        h = C.homology(n)
        summary.append("H_%d = %s" % (n, group_name(h.group)))
        gens = []
        for g in h.group.generators():
            z = h.rep(g)
            gens.append([str(v) for v in z.coords])
            detail.append("  H_%d %s generator: cycle (%s)"
                          % (n, _order_word(g),
                             ", ".join(str(v) for v in z.coords)))
        doc[str(n)] = dict(_group_doc(h.group), generators=gens)
    out.write(", ".join(summary) + "\n")
    for line in detail:
        out.write(line + "\n")
    out.write(_machine({"homology": doc}) + "\n")
    return 0


def _order_word(g):
    d = annihilator(g)
    return "free" if d == 0 else "order-%d" % d


def cmd_kunneth(args, out):
    C = resolve_complex(args.left)
    D = resolve_complex(args.right)
    rng = _opt_rng(args)
    try:
        pair = KunnethPair(C, D, rng=rng)
    except KunnethError as exc:
        raise CliError(str(exc))
    degrees = [args.degree] if args.degree is not None else \
        list(range(pair.T.lo, pair.T.hi + 1))
    doc = {}
    code = 0
    for n in degrees:
        dec = kunneth_decomposition(pair=pair, n=n)
        out.write("degree %d: H_%d(T) = %s\n"
                  % (n, n, group_name(dec.homology)))
        if dec.tensor_summands:
            for p in dec.tensor_summands:
                out.write("  tensor summand H_%d (x) H_%d = %s\n"
                          % (p.i, p.j, group_name(p.product.group)))
        else:
            out.write("  tensor summands: none\n")
        lam_docs = []
        if dec.tor_summands:
            for p in dec.tor_summands:
                out.write("  tor summand Tor(H_%d, H_%d) = %s\n"
                          % (p.i, p.j, group_name(p.product.group)))
                labels = _tensor_labels(pair.T, n)
                hT = pair.hT(n)
                for g in p.product.group.generators():
                    cls = p.lam.apply(g)
                    z = hT.rep(cls)
                    rep = chain_str(z.coords, labels)
                    out.write("    lambda sends a Tor generator to the "
                              "class of %s\n" % rep)
                    lam_docs.append({"i": str(p.i), "j": str(p.j),
                                     "cycle": [str(v) for v in z.coords]})
        else:
            out.write("  tor summands: none\n")
        try:
            dec.verify_split()
            dec.verify_exact()
            verdict = "OK"
        except AssertionError as exc:
            verdict = "FAILED (%s)" % exc
            code = 1
        out.write("  mu o lambda = id and exactness: %s\n" % verdict)
        doc[str(n)] = {
            "homology": _group_doc(dec.homology),
            "tensor": [{"i": str(p.i), "j": str(p.j),
                        "group": _group_doc(p.product.group)}
                       for p in dec.tensor_summands],
            "tor": [{"i": str(p.i), "j": str(p.j),
                     "group": _group_doc(p.product.group)}
                    for p in dec.tor_summands],
            "lambda": lam_docs,
            "split": verdict == "OK",
        }
    out.write(_machine({"kunneth": doc}) + "\n")
    return code


def cmd_split(args, out):
    C = resolve_complex(args.complex)
    ws = weak_splitting(C, rng=_opt_rng(args))
    doc = {}
    for n in C.degrees():
        h = C.homology(n).group
        out.write("degree %d: H_%d = %s; presentation rank %d, "
                  "relation rank %d\n"
                  % (n, n, group_name(h), ws.zhat_rank(n), ws.bhat_rank(n)))
        doc[str(n)] = dict(_group_doc(h), zhat=str(ws.zhat_rank(n)),
                           bhat=str(ws.bhat_rank(n)))
    try:
        ws.verify()
        out.write("weak splitting verified: OK\n")
        code = 0
    except (ComplexError, AssertionError) as exc:
        out.write("weak splitting verified: FAILED (%s)\n" % exc)
        code = 1
    out.write(_machine({"split": doc, "ok": code == 0}) + "\n")
    return code


def cmd_verify(args, out):
    try:
        report = run_suite(args.suite, seed=_seed(args), cases=args.cases,
                           jobs=args.jobs)
    except SuiteError as exc:
        raise CliError(str(exc))
    for line in report.lines():
        out.write(line + "\n")
    out.write(_machine(report.to_payload()) + "\n")
    return 0 if report.ok else 1


def cmd_gen(args, out):
    kind, params = args.kind, args.params
    builders = {"moore": (moore, 2), "sphere": (sphere, 1), "rp": (rp, 1),
                "random": (None, 0)}
    if kind not in builders:
        raise CliError("unknown generator %r: moore, sphere, rp or random"
                       % kind)
    builder, want = builders[kind]
    if len(params) != want:
        raise CliError("gen %s takes %d integer parameter%s"
                       % (kind, want, "" if want == 1 else "s"))
    if kind == "random":
        rng = random.Random(_seed(args))
        C = random_free_complex(rng, max_degree=args.max_degree,
                                max_rank=args.max_rank,
                                max_entry=args.max_entry)
        name = "random-seed%d" % _seed(args)
    else:
        try:
            C = builder(*[int(p) for p in params])
        except ValueError as exc:
            raise CliError(str(exc))
        name = "-".join([kind] + [str(int(p)) for p in params])
    text = serialize_complex(C, name=name)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        out.write("wrote %s\n" % args.output)
    else:
        out.write(text + "\n")
    return 0


# ------------------------------------------------------------------ parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kunneth",
        description="Exact homology of integral chain complexes and the "
                    "split Kunneth sequence of a tensor product.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("homology", help="homology groups with generator cycles")
    p.add_argument("complex", help="builtin spec or document path")
    p.set_defaults(fn=cmd_homology)

    p = sub.add_parser("kunneth", help="decomposition of H_n of a tensor product")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="splitting choice seed (default: KUNNETH_SEED or 0)")
    p.set_defaults(fn=cmd_kunneth)

    p = sub.add_parser("split", help="weak splitting report of one complex")
    p.add_argument("complex")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("verify", help="run a theorem suite")
    p.add_argument("suite", help="one of: %s" % ", ".join(suite_names()))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cases", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="write a complex document")
    p.add_argument("kind", help="moore | sphere | rp | random")
    p.add_argument("params", nargs="*")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--max-rank", type=int, default=4)
    p.add_argument("--max-entry", type=int, default=6)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_gen)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, sys.stdout)
    except (CliError, DocumentError, SuiteError, KunnethError,
            ComplexError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
