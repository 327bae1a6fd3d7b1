"""Overcomplete analysis operator: construction, file IO, patch analysis.

The operator is a dense k x N matrix with k > N acting on vectorized
zero-mean, unit-norm gray patches. The informative part of the response
a = O s is the set of entries close to zero, so all rows are kept at unit
norm to make a single smoothing width meaningful across rows.
"""

from __future__ import annotations

import math

import numpy as np

OPERATOR_MAGIC = "cosparse-operator"
OPERATOR_VERSION = "v1"


class OperatorError(ValueError):
    """Invalid operator parameters or a malformed operator file."""


class AnalysisOperator:
    """Dense overcomplete analysis operator for vectorized patches.

    rows:      number of analysis atoms k (must exceed patch_len)
    patch_len: patch dimension N = side * side
    weights:   (k, N) float64, every row unit-norm and non-constant

    Rows are re-normalized to unit norm on construction. Instances are
    immutable in practice (the weight array is marked read-only) and safe
    to share across threads.
    """

    def __init__(self, weights):
        w = np.array(weights, dtype=np.float64, copy=True)
        if w.ndim != 2:
            raise OperatorError(f"operator weights must be 2-D, got shape {w.shape}")
        k, n = w.shape
        if k <= n:
            raise OperatorError(f"not overcomplete: k={k} rows for patch length {n}")
        bad = np.flatnonzero(~np.isfinite(w).all(axis=1))
        if bad.size:
            raise OperatorError(f"non-finite entries in row {bad[0]}")
        spread = w.max(axis=1) - w.min(axis=1)
        flat = np.flatnonzero(spread < 1e-12)
        if flat.size:
            raise OperatorError(f"row {flat[0]} is constant")
        norms = np.linalg.norm(w, axis=1, keepdims=True)
        # only touch rows that actually deviate, so writing and re-loading a
        # normalized operator reproduces it bitwise
        off = np.abs(norms - 1.0) > 1e-12
        if off.any():
            w = np.where(off, w / norms, w)
        w.flags.writeable = False
        self.weights = w

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def patch_len(self):
        return self.weights.shape[1]

    def analyze(self, patch):
        """Return the response O s of a vectorized patch. Pure function."""
        s = np.asarray(patch, dtype=np.float64)
        if s.shape != (self.patch_len,):
            raise ValueError(
                f"patch length {s.shape} does not match operator patch length {self.patch_len}"
            )
        return self.weights @ s

    def analyze_many(self, patches):
        """Response matrix (m, k) for a stack of patches (m, N)."""
        s = np.asarray(patches, dtype=np.float64)
        if s.ndim != 2 or s.shape[1] != self.patch_len:
            raise ValueError(
                f"patch stack shape {s.shape} does not match operator patch length {self.patch_len}"
            )
        return s @ self.weights.T


def analyze(op, patch):
    return op.analyze(patch)


def default_operator(patch_side, overcompleteness=2.0):
    """Deterministic operator from the separable cosine basis of the patch grid.

    The constant atom is removed (patches are zero-mean), the remaining
    side^2 - 1 atoms are cycled with alternating sign until
    k = ceil(overcompleteness * side^2) rows are filled, and every row is
    made exactly zero-mean and unit-norm. Same inputs give a bitwise
    identical matrix.
    """
    if patch_side < 3 or patch_side % 2 == 0:
        raise OperatorError(f"patch_side must be odd and >= 3, got {patch_side}")
    if overcompleteness < 1.0:
        raise OperatorError(f"overcompleteness must be >= 1, got {overcompleteness}")
    p = int(patch_side)
    n = p * p
    k = math.ceil(overcompleteness * n)
    if k <= n:
        raise OperatorError(f"not overcomplete: k={k} rows for patch length {n}")

    i = np.arange(p)
    # cos(pi*(2i+1)*u/(2p)) for all frequencies u; u=0 is the constant vector
    table = np.cos(np.pi * (2.0 * i[None, :] + 1.0) * np.arange(p)[:, None] / (2.0 * p))
    atoms = []
    for u in range(p):
        for v in range(p):
            if u == 0 and v == 0:
                continue
            atoms.append(np.outer(table[u], table[v]).ravel())
    atoms = np.stack(atoms)

    rows = np.empty((k, n))
    for r in range(k):
        sign = -1.0 if (r // len(atoms)) % 2 else 1.0
        rows[r] = sign * atoms[r % len(atoms)]
    rows -= rows.mean(axis=1, keepdims=True)
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return AnalysisOperator(rows)


def write_operator(op, path):
    """Write the self-describing text format; 17 significant digits round-trip."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{OPERATOR_MAGIC} {OPERATOR_VERSION} k={op.rows} n={op.patch_len}\n")
        for row in op.weights:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")


def load_operator(path):
    """Load an operator file, re-normalizing rows to unit norm.

    Raises OperatorError naming the offending row or header field for a
    malformed header, a dimension mismatch (k <= N), a wrong entry count,
    or non-finite entries.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 4 or parts[0] != OPERATOR_MAGIC or parts[1] != OPERATOR_VERSION:
            raise OperatorError(f"malformed operator header: {header!r}")
        try:
            k = int(parts[2].removeprefix("k="))
            n = int(parts[3].removeprefix("n="))
        except ValueError:
            raise OperatorError(f"malformed operator header fields: {header!r}") from None
        if k <= n:
            raise OperatorError(f"not overcomplete: header declares k={k}, n={n}")
        rows = np.empty((k, n))
        for r in range(k):
            line = fh.readline()
            if not line:
                raise OperatorError(f"row {r}: unexpected end of file")
            fields = line.split()
            if len(fields) != n:
                raise OperatorError(f"row {r}: expected {n} entries, got {len(fields)}")
            try:
                rows[r] = [float(x) for x in fields]
            except ValueError:
                raise OperatorError(f"row {r}: unparseable entry") from None
            if not np.isfinite(rows[r]).all():
                raise OperatorError(f"row {r}: non-finite entry")
    return AnalysisOperator(rows)
