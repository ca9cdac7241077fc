"""Symplectic and passive (orthogonal symplectic) matrix construction and checks.

All public matrices use the interleaved quadrature ordering (x1, p1, x2, p2, ...).
The grouped ordering (x1..xn, p1..pn) appears only inside the unitary round-trip
helpers and the Haar sampler, which build in grouped form and reindex.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-12


def omega(n: int) -> np.ndarray:
    """Symplectic form for n modes: direct sum of n copies of [[0, 1], [-1, 0]]."""
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _even_square_modes(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] % 2:
        raise ValueError(f"matrix dimension must be even, got {m.shape[0]}")
    return m.shape[0] // 2


def is_symplectic(s, tol: float = DEFAULT_TOL) -> bool:
    """True iff S preserves the symplectic form: |S Omega S^T - Omega|_max <= tol."""
    s = np.asarray(s, dtype=float)
    n = _even_square_modes(s)
    om = omega(n)
    return float(np.abs(s @ om @ s.T - om).max()) <= tol


def is_passive(s, tol: float = DEFAULT_TOL) -> bool:
    """True iff S is both symplectic and orthogonal (an interferometer; no squeezing)."""
    s = np.asarray(s, dtype=float)
    n = _even_square_modes(s)
    if float(np.abs(s @ s.T - np.eye(2 * n)).max()) > tol:
        return False
    return is_symplectic(s, tol)


def grouped_to_interleaved_indices(n: int) -> np.ndarray:
    """Permutation p with v_interleaved = v_grouped[p]."""
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    p = np.empty(2 * n, dtype=int)
    p[0::2] = np.arange(n)
    p[1::2] = np.arange(n) + n
    return p


def interleaved_to_grouped_indices(n: int) -> np.ndarray:
    """Inverse permutation of grouped_to_interleaved_indices."""
    return np.argsort(grouped_to_interleaved_indices(n))


def reorder_to_interleaved(m) -> np.ndarray:
    """Reindex a grouped-ordering matrix into interleaved ordering."""
    m = np.asarray(m, dtype=float)
    n = _even_square_modes(m)
    p = grouped_to_interleaved_indices(n)
    return m[np.ix_(p, p)]


def reorder_to_grouped(m) -> np.ndarray:
    """Reindex an interleaved-ordering matrix into grouped ordering."""
    m = np.asarray(m, dtype=float)
    n = _even_square_modes(m)
    p = interleaved_to_grouped_indices(n)
    return m[np.ix_(p, p)]


@dataclass(frozen=True, eq=False)
class PassiveTransform:
    """An orthogonal symplectic matrix in interleaved ordering, validated on construction."""

    matrix: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)  # defensive copy, frozen below
        n = _even_square_modes(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not is_passive(m, self.tol):
            om = omega(n)
            orth = float(np.abs(m @ m.T - np.eye(2 * n)).max())
            symp = float(np.abs(m @ om @ m.T - om).max())
            raise ValueError(
                f"matrix is not passive: |Z Z^T - 1|_max = {orth:.3e}, "
                f"|Z Omega Z^T - Omega|_max = {symp:.3e} (tol {self.tol:.1e})"
            )

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def _as_matrix(z) -> np.ndarray:
    return z.matrix if isinstance(z, PassiveTransform) else np.asarray(z, dtype=float)


def unitary_to_passive(u, tol: float = DEFAULT_TOL) -> PassiveTransform:
    """Real interleaved representation of a unitary mode transformation.

    U = X + iY maps to [[X, Y], [-Y, X]] in grouped ordering, then reindexed;
    every 2x2 submatrix of the result has the form [[x, y], [-y, x]].
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    x, y = u.real, u.imag
    grouped = np.block([[x, y], [-y, x]])
    return PassiveTransform(reorder_to_interleaved(grouped), tol=tol)


def passive_to_unitary(z) -> np.ndarray:
    """Complex unitary underlying a passive transform (inverse of unitary_to_passive)."""
    m = _as_matrix(z)
    n = _even_square_modes(m)
    g = reorder_to_grouped(m)
    return g[:n, :n] + 1j * g[:n, n:]


def _haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_passive(modes: int, seed) -> PassiveTransform:
    """Haar-random interferometer on the given number of modes.

    Args:
        modes: number of modes acted on (matrix is 2*modes square).
        seed: integer seed or numpy Generator; equal integer seeds give
            bit-identical samples.
    """
    if modes < 1:
        raise ValueError(f"mode count must be >= 1, got {modes}")
    rng = np.random.default_rng(seed)
    return unitary_to_passive(_haar_unitary(modes, rng))


def beam_splitter(eta: float) -> PassiveTransform:
    """Two-mode beam splitter with transmissivity eta.

    Transmitted block sqrt(eta)*1_2, reflected block sqrt(1-eta)*1_2; the lower
    block row completes the matrix orthogonally with the (-sqrt(1-eta), sqrt(eta))
    sign convention.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    eye = np.eye(2)
    return PassiveTransform(np.block([[t * eye, r * eye], [-r * eye, t * eye]]))


def block_decompose(z, m: int, l: int):
    """Split Z into blocks (E, F, G, H): rows cut at 2m, columns cut at 2l.

    E is the 2m x 2l upper-left block routing the first l input ports into the
    m fed-back ports; F covers the remaining (ancilla) columns.
    """
    mat = _as_matrix(z)
    rows, cols = mat.shape
    if m < 1 or 2 * m > rows:
        raise ValueError(f"row split m={m} outside matrix with {rows} rows")
    if l < 0 or 2 * l > cols:
        raise ValueError(f"column split l={l} outside matrix with {cols} columns")
    return mat[: 2 * m, : 2 * l], mat[: 2 * m, 2 * l :], mat[2 * m :, : 2 * l], mat[2 * m :, 2 * l :]


def epsilon_sum(e) -> float:
    """Sum of the (1,1) entries of every 2x2 submatrix of a block E."""
    e = np.asarray(e, dtype=float)
    if e.ndim != 2 or e.shape[0] % 2 or e.shape[1] % 2:
        raise ValueError(f"expected even-dimensioned block, got shape {e.shape}")
    return float(e[0::2, 0::2].sum())


def submatrix_asymmetry(z) -> float:
    """Max deviation from the [[x, y], [-y, x]] form over all 2x2 submatrices."""
    m = _as_matrix(z)
    if m.shape[0] % 2 or m.shape[1] % 2:
        raise ValueError(f"expected even-dimensioned matrix, got shape {m.shape}")
    diag_dev = np.abs(m[0::2, 0::2] - m[1::2, 1::2]).max()
    off_dev = np.abs(m[0::2, 1::2] + m[1::2, 0::2]).max()
    return float(max(diag_dev, off_dev))


def _to_complex_rows(block: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if submatrix_asymmetry(block) > tol:
        raise ValueError("2x2 submatrices lack the passive [[x, y], [-y, x]] structure")
    return block[0::2, 0::2] + 1j * block[0::2, 1::2]


def complete_passive(e, f, seed: int = 0) -> PassiveTransform:
    """Extend the block row (E | F) of a passive matrix to a full passive transform.

    (E | F) must be the top 2m rows of some passive transform, i.e. orthonormal
    rows in the complex picture.  The missing rows are a Haar-random orthonormal
    completion of the complement, so different seeds give distinct but equally
    valid interferometers sharing the same top block row.
    """
    top = np.hstack([np.asarray(e, dtype=float), np.asarray(f, dtype=float)])
    if top.ndim != 2 or top.shape[0] % 2 or top.shape[1] % 2:
        raise ValueError(f"expected even-dimensioned blocks, got stacked shape {top.shape}")
    m, k = top.shape[0] // 2, top.shape[1] // 2
    if m > k:
        raise ValueError(f"cannot complete {m} block rows over {k} modes")
    t = _to_complex_rows(top)
    if float(np.abs(t @ t.conj().T - np.eye(m)).max()) > 1e-9:
        raise ValueError("block rows are not orthonormal; (E | F) is not a passive block row")
    if m == k:
        return unitary_to_passive(t)
    _, _, vh = np.linalg.svd(t)
    null_rows = vh[m:, :]  # rows spanning the orthogonal complement
    w = _haar_unitary(k - m, np.random.default_rng(seed))
    bottom = w.conj().T @ null_rows
    return unitary_to_passive(np.vstack([t, bottom]))
