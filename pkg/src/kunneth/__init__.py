"""Exact integer homology of bounded chain complexes, with explicit,
verifiable splittings of the Kunneth short exact sequence of a tensor
product, the torsion cosets those splittings live in, and the naturality
and boundary behaviour of all of it.

All arithmetic is exact (Python ints); every map constructed here comes
with enough witnesses to be checked, and the `kunneth verify` command line
re-derives the main theorems on randomized inputs.
"""

__version__ = "0.1.0"
