"""Sharp constants for embeddings of Dirichlet Sobolev spaces on [0, 1].

The package computes the pointwise bounds ``A_{n,k,p}(a)`` in
``|y^(k)(a)| <= A ||y^(n)||_p`` and their suprema ``Lambda_{n,k,p}`` over
a, by best polynomial approximation of explicit two-piece kernels.
"""

__version__ = "0.1.0"
