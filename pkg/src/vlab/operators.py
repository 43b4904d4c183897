"""Lattice operators: one-site operators, transfer matrices, spin-1 chains.

Builds the 9x9 one-site operator from a weight set, verifies the 27x27
intertwining identity numerically, assembles row-to-row transfer matrices
and the two equivalent spin-1 chain Hamiltonians (coupling table vs.
logarithmic derivative), and diagonalizes charge sectors.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spsla

from .errors import BudgetError, NoConvergenceError
from .weights import (Branch, branch_d_alignment, effective_gamma,
                      make_weights)

# (name, x, y, u, v): amplitude at e_{x,y} (x) e_{u,v}; first factor is
# the horizontal (auxiliary) space, second the vertical (quantum) one.
VERTEX_PLACEMENTS = (
    ("a+", 1, 1, 1, 1), ("b+", 1, 1, 2, 2), ("b+", 2, 2, 1, 1),
    ("f", 1, 1, 3, 3), ("f", 3, 3, 1, 1),
    ("b-", 2, 2, 3, 3), ("b-", 3, 3, 2, 2),
    ("g", 2, 2, 2, 2), ("a-", 3, 3, 3, 3),
    ("h", 1, 3, 3, 1), ("ht", 3, 1, 1, 3),
    ("c+", 1, 2, 2, 1), ("ct+", 2, 1, 1, 2),
    ("c-", 2, 3, 3, 2), ("ct-", 3, 2, 2, 3),
    ("d", 1, 2, 3, 2), ("d", 2, 3, 2, 1),
    ("dt", 2, 1, 2, 3), ("dt", 3, 2, 1, 2),
)

DEFAULT_BUDGET_DIM = 3 ** 8


def budget_dim():
    """Dense-dimension cap; override with the VLAB_BUDGET_DIM env var."""
    raw = os.environ.get("VLAB_BUDGET_DIM")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_BUDGET_DIM


@dataclass(frozen=True)
class LinearOperator:
    """Complex matrix with explicit dimensions, dense or triplet storage."""

    dim_row: int
    dim_col: int
    data: object  # ndarray or scipy sparse matrix

    @classmethod
    def from_dense(cls, arr):
        arr = np.asarray(arr, dtype=complex)
        return cls(arr.shape[0], arr.shape[1], arr)

    @classmethod
    def from_triplets(cls, dim_row, dim_col, rows, cols, values):
        m = sps.coo_matrix((values, (rows, cols)),
                           shape=(dim_row, dim_col), dtype=complex)
        m.sum_duplicates()
        return cls(dim_row, dim_col, m.tocsr())

    @property
    def is_sparse(self):
        return sps.issparse(self.data)

    def dense(self):
        if self.is_sparse:
            return self.data.toarray()
        return np.asarray(self.data)

    def sparse(self):
        if self.is_sparse:
            return self.data.tocsr()
        return sps.csr_matrix(self.data)

    def triplets(self):
        """Deduplicated triplets sorted by (row, col)."""
        coo = self.sparse().tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def block(self, rows, cols=None):
        cols = rows if cols is None else cols
        if self.is_sparse:
            return self.data.tocsr()[rows][:, cols].toarray()
        return self.data[np.ix_(rows, cols)]


@dataclass(frozen=True)
class SectorBasis:
    """Configurations of an L-site spin-1 chain with fixed total S^z."""

    chain_length: int
    sz_total: int
    states: np.ndarray  # base-3 codes, ascending

    @classmethod
    def build(cls, chain_length, sz_total):
        sz = _sz_diagonal(chain_length)
        states = np.nonzero(sz == sz_total)[0]
        return cls(chain_length, sz_total, states)

    def __len__(self):
        return len(self.states)


def _sz_diagonal(length):
    """Total-S^z value of every base-3 configuration (digit d -> spin 1-d)."""
    n = 3 ** length
    idx = np.arange(n)
    out = np.zeros(n, dtype=np.int64)
    for _ in range(length):
        out += 1 - (idx % 3)
        idx //= 3
    return out


def sector_dimensions(length):
    """Map sz -> dimension; the sizes sum to 3**length."""
    sz = _sz_diagonal(length)
    vals, counts = np.unique(sz, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


@dataclass(frozen=True)
class SpinMatrices:
    """Spin-1 generators in the basis (+, 0, -)."""

    s_plus: np.ndarray
    s_minus: np.ndarray
    s_z: np.ndarray


def spin1_matrices():
    sp = np.sqrt(2.0) * np.diag([1.0, 1.0], 1).astype(complex)
    return SpinMatrices(s_plus=sp, s_minus=sp.T.conj().copy(),
                        s_z=np.diag([1.0, 0.0, -1.0]).astype(complex))


def l_tensor(w):
    """One-site operator as a (3,3,3,3) tensor T[x,y,u,v]."""
    t = np.zeros((3, 3, 3, 3), dtype=complex)
    for nm, x, y, u, v in VERTEX_PLACEMENTS:
        t[x - 1, y - 1, u - 1, v - 1] += w.slot(nm)
    return t


def l_operator(w):
    """9x9 one-site operator; row index (x,u), column index (y,v)."""
    mat = l_tensor(w).transpose(0, 2, 1, 3).reshape(9, 9)
    return LinearOperator.from_dense(mat)


# The horizontal-space weights obey the same layout, so the intertwiner
# uses the identical constructor.
r_matrix = l_operator


def ybe_residual(branch, params, lam1, lam2):
    """Scale-free residual of the 27x27 intertwining identity.

    Builds the intertwiner at lam1-lam2 and the two one-site operators at
    lam1, lam2 and returns max |LHS - RHS| / max |LHS| over all tensor
    components.  Vanishes (to rounding) on every integrable family.
    """
    r = l_tensor(make_weights(branch, params, complex(lam1) - complex(lam2)))
    t1 = l_tensor(make_weights(branch, params, lam1))
    t2 = l_tensor(make_weights(branch, params, lam2))
    lhs = np.einsum("ipjq,plkr,qmrn->ijklmn", r, t1, t2)
    rhs = np.einsum("jqkr,iprn,plqm->ijklmn", t2, t1, r)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


def _transfer_dense_small(t, length):
    # full contraction; intermediate is 9*3^(2L) complex entries
    m = t
    for _ in range(length - 1):
        m = np.einsum("xy...,yzuv->xz...uv", m, t)
    tr = np.einsum("xx...->...", m)
    perm = list(range(0, 2 * length, 2)) + list(range(1, 2 * length, 2))
    n = 3 ** length
    return tr.transpose(perm).reshape(n, n)


def _transfer_sector_block(t, length, bra_states, ket_states):
    """Transfer block via batched 3x3 auxiliary-space products."""
    bra = np.asarray(bra_states)
    ket = np.asarray(ket_states)
    rows = np.repeat(np.arange(len(bra)), len(ket))
    cols = np.tile(np.arange(len(ket)), len(bra))
    # digits, most significant digit = site 0
    def digits(codes):
        out = np.empty((len(codes), length), dtype=np.int64)
        c = codes.copy()
        for k in range(length - 1, -1, -1):
            out[:, k] = c % 3
            c //= 3
        return out

    db = digits(bra)[rows]
    dk = digits(ket)[cols]
    batch = np.broadcast_to(np.eye(3, dtype=complex),
                            (len(rows), 3, 3)).copy()
    for site in range(length):
        site_mats = t[:, :, db[:, site], dk[:, site]].transpose(2, 0, 1)
        batch = batch @ site_mats
    vals = np.trace(batch, axis1=1, axis2=2)
    block = np.zeros((len(bra), len(ket)), dtype=complex)
    block[rows, cols] = vals
    return block


def transfer_matrix(branch, params, lam, length, representation="dense"):
    """Row-to-row transfer matrix with periodic boundary conditions.

    Trace over the 3-dimensional auxiliary space of the ordered product
    of one-site operators.  Exactly block diagonal across the 2L+1 total
    S^z sectors.  ``representation`` picks dense ndarray or CSR storage.
    Raises BudgetError when 3**length exceeds the configured cap.
    """
    if length < 2:
        raise ValueError("chain length must be >= 2")
    n = _check_budget(length)
    t = l_tensor(make_weights(branch, params, lam))
    if length <= 6:
        full = _transfer_dense_small(t, length)
        if representation == "sparse":
            return LinearOperator(n, n, sps.csr_matrix(full))
        return LinearOperator.from_dense(full)
    # sector-blockwise assembly keeps the intermediates small
    sz = _sz_diagonal(length)
    if representation == "sparse":
        out = sps.lil_matrix((n, n), dtype=complex)
    else:
        out = np.zeros((n, n), dtype=complex)
    for value in np.unique(sz):
        states = np.nonzero(sz == value)[0]
        block = _transfer_sector_block(t, length, states, states)
        out[np.ix_(states, states)] = block
    if representation == "sparse":
        return LinearOperator(n, n, out.tocsr())
    return LinearOperator.from_dense(out)


def _periodic_chain(two_site, length):
    """Sparse sum of a two-site operator over all periodic bonds."""
    n = 3 ** length
    h = sps.csr_matrix(np.asarray(two_site, dtype=complex))
    total = sps.csr_matrix((n, n), dtype=complex)
    for i in range(length - 1):
        total = total + sps.kron(
            sps.identity(3 ** i, format="csr"),
            sps.kron(h, sps.identity(3 ** (length - i - 2), format="csr")),
            format="csr")
    # wrap bond (site L-1, site 0): site 0 is the most significant digit
    h4 = np.asarray(two_site, dtype=complex).reshape(3, 3, 3, 3)
    rows, cols, vals = [], [], []
    mid = 3 ** (length - 2)
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(3):
                    v = h4[a, b, c, d]
                    if v != 0:
                        m = np.arange(mid)
                        rows.append(b * 3 ** (length - 1) + m * 3 + a)
                        cols.append(d * 3 ** (length - 1) + m * 3 + c)
                        vals.append(np.full(mid, v))
    wrap = sps.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n))
    return (total + wrap.tocsr())


def table_couplings(branch, params):
    """Two-site coupling constants of the branch spin-1 chains.

    The +- choice tied to the d-amplitude follows params.d_sign in the
    same convention as make_weights (see branch_d_alignment).  Not
    available for the isolated points 1S/2S.
    """
    branch = Branch(branch)
    if branch in (Branch.S1S, Branch.S2S):
        raise ValueError(f"no coupling table for branch {branch.value}; "
                         "use hamiltonian_from_log_derivative")
    sinh, cosh, exp = np.sinh, np.cosh, np.exp
    e1, e2 = params.epsilon1, params.epsilon2
    gamma = effective_gamma(branch, params)
    pm = params.d_sign * branch_d_alignment(branch, params)
    r3 = np.sqrt(3.0)
    if branch is Branch.B1A:
        gb = 1j * np.pi * (1 - e1) / 4
        j1 = pm / (2 * sinh(gamma / 2 + gb))
        j2 = 1 / sinh(gamma) - pm / sinh(gamma / 2 + gb)
        j3 = -e1 / (4 * sinh(gamma))
        j4 = jt4 = -j2 / 2
        j5 = jt5 = j2 / 2
        d1 = (2 * cosh(gamma) + e1) / (2 * sinh(gamma))
        d2, d3, d4 = -d1, 0.0, 0.0
        h1, h2 = 0.0, cosh(gamma) / sinh(gamma)
    elif branch is Branch.B1B:
        g0 = 1j * np.pi * e1 / 3
        r = sinh(gamma) * sinh(gamma - g0)
        sr = np.sqrt(r + 0j)
        j1 = pm / (2 * sr)
        j2 = r3 * sinh(gamma - g0 / 2) / (2 * r) - pm / sr
        j3 = -1j * r3 * e1 / (8 * r)
        j4 = jt4 = -1 / (2 * sinh(gamma - g0)) + pm / (2 * sr)
        j5 = jt5 = 1 / (2 * sinh(gamma)) - pm / (2 * sr)
        d1 = d2 = d3 = d4 = 0.0
        h1 = sinh(2 * gamma - g0) / (2 * r)
        h2 = -r3 * cosh(gamma + g0 / 2) / (4 * r * sinh(gamma - g0))
    elif branch is Branch.B2A:
        gb = 1j * np.pi * (1 - e1) / 4
        ch = cosh(3 * gamma / 2 + gb)
        j1 = pm / (2 * exp(e2 * gamma) * ch)
        j2 = 1 / sinh(gamma) + pm * sinh(e2 * gamma) / ch
        j3 = cosh(gamma / 2 + gb) / (4 * sinh(gamma) * ch)
        j4 = jt4 = -1 / (2 * sinh(gamma)) + pm * exp(-e2 * gamma) / (2 * ch)
        j5 = jt5 = -j4
        den = 2 * (-e1 * sinh(gamma) + sinh(2 * gamma))
        d1 = cosh(2 * e2 * gamma) / den
        d2 = (4 * e1 * cosh(gamma) - cosh(2 * e2 * gamma)) / den
        d3 = -np.tanh(2 * e2 * gamma) * d1
        d4 = -d3
        h1 = 0.0
        h2 = (-3 * e1 + 2 * cosh(gamma)) * cosh(gamma) * 2 / den
    else:  # B2B
        om = exp(1j * np.pi * e2 / 3)
        j1 = -pm * e1 * e2 * om ** 2 / 2
        j2 = -pm * e1 * e2 / 2
        j3 = -1j * r3 * e1 / 4
        j4 = jt4 = -1j - pm * e1 * e2 * om ** 2 / 2
        j5 = jt5 = -1j + pm * e1 * e2 * om ** 2 / 2
        d1 = -1j * r3 * e1 / 4
        d2 = 3 * d1
        d3 = 1j * e2 * r3 * d1
        d4 = -d3
        h1 = h2 = 0.0
    return {"J1": j1, "Jt1": j1, "J2": j2, "Jt2": j2, "J3": j3, "Jt3": j3,
            "J4": j4, "Jt4": jt4, "J5": j5, "Jt5": jt5,
            "h1": h1, "h2": h2,
            "delta1": d1, "delta2": d2, "delta3": d3, "delta4": d4}


def two_site_from_couplings(c):
    """9x9 bond operator assembled from a coupling dictionary."""
    s = spin1_matrices()
    sp, sm, sz = s.s_plus, s.s_minus, s.s_z
    eye = np.eye(3, dtype=complex)
    k = np.kron
    return (c["J1"] * k(sp, sm) + c["Jt1"] * k(sm, sp)
            + c["J2"] * k(sp @ sz, sm @ sz) + c["Jt2"] * k(sz @ sm, sz @ sp)
            + c["J3"] * k(sp @ sp, sm @ sm) + c["Jt3"] * k(sm @ sm, sp @ sp)
            + c["J4"] * k(sp @ sz, sm) + c["Jt4"] * k(sz @ sm, sp)
            + c["J5"] * k(sp, sm @ sz) + c["Jt5"] * k(sm, sz @ sp)
            + c["h1"] * (k(sz, eye) + k(eye, sz))
            + c["h2"] * (k(sz @ sz, eye) + k(eye, sz @ sz))
            + c["delta1"] * k(sz, sz) + c["delta2"] * k(sz @ sz, sz @ sz)
            + c["delta3"] * k(sz @ sz, sz) + c["delta4"] * k(sz, sz @ sz))


def _check_budget(length):
    n = 3 ** length
    if n > budget_dim():
        raise BudgetError(
            f"3^{length} = {n} exceeds budget {budget_dim()}; "
            "raise VLAB_BUDGET_DIM to override")
    return n


def hamiltonian_from_couplings(branch, params, length):
    """Periodic spin-1 chain built from the branch coupling table."""
    if length < 2:
        raise ValueError("chain length must be >= 2")
    n = _check_budget(length)
    h2 = two_site_from_couplings(table_couplings(branch, params))
    return LinearOperator(n, n, params.j0 * _periodic_chain(h2, length))


def two_site_from_log_derivative(branch, params, step=1e-4):
    """Bond generator P * dL/dlambda at the identity point.

    Central difference with one Richardson level (fourth order); the
    one-site operator at lambda = 0 is the permutation, so the product
    with the derivative is the chain generator.
    """
    perm = np.zeros((9, 9), dtype=complex)
    for a in range(3):
        for b in range(3):
            perm[3 * a + b, 3 * b + a] = 1.0

    def lmat(x):
        return l_operator(make_weights(branch, params, x)).dense()

    d1 = (lmat(step) - lmat(-step)) / (2 * step)
    d2 = (lmat(step / 2) - lmat(-step / 2)) / step
    return perm @ ((4 * d2 - d1) / 3)


def hamiltonian_from_log_derivative(branch, params, length, step=1e-4):
    """Periodic chain from the transfer-matrix logarithmic derivative.

    Differs from hamiltonian_from_couplings only inside the span of
    {identity, total S^z, total (S^z)^2} (terms dropped from the coupling
    table because they cancel or shift trivially under periodic
    boundaries).
    """
    if length < 2:
        raise ValueError("chain length must be >= 2")
    n = _check_budget(length)
    h2 = two_site_from_log_derivative(branch, params, step=step)
    return LinearOperator(n, n, params.j0 * _periodic_chain(h2, length))


def chemical_potential_projection(op_a, op_b, length):
    """Least-squares match of op_a - op_b against the chemical span.

    Projects the difference onto span{identity, sum S^z, sum (S^z)^2}
    and returns (max |residual entry|, coefficients).  Both operators
    must live on the full 3**length space.
    """
    da = op_a.dense() if isinstance(op_a, LinearOperator) else np.asarray(op_a)
    db = op_b.dense() if isinstance(op_b, LinearOperator) else np.asarray(op_b)
    diff = da - db
    n = 3 ** length
    sz = _sz_diagonal(length).astype(float)
    idx = np.arange(n)
    sz2 = np.zeros(n)
    ii = idx.copy()
    for _ in range(length):
        sz2 += (1 - (ii % 3)) ** 2
        ii //= 3
    basis = np.stack([np.eye(n).ravel(), np.diag(sz).ravel(),
                      np.diag(sz2).ravel()], axis=1)
    coef, *_ = np.linalg.lstsq(basis, diff.ravel(), rcond=None)
    resid = diff.ravel() - basis @ coef
    return float(np.max(np.abs(resid))), coef


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    method: str
    residuals: np.ndarray | None = None


def eigenspectrum(op, sector=None, method="dense", k=6, dense_cap=4000,
                  maxiter=None):
    """Eigenvalues of an operator (or of one charge-sector block).

    Dense path returns the full block spectrum; the iterative path runs
    restarted Arnoldi (non-hermitian safe) for the k eigenvalues of
    smallest real part and reports per-vector residuals |Av - mu v|/|v|.
    Eigenvalues are sorted by ascending real part.
    """
    if sector is not None:
        block = op.block(sector.states)
    else:
        block = op.dense() if method == "dense" else op.sparse()
    dim = block.shape[0]
    if method == "dense":
        if dim > dense_cap:
            raise BudgetError(f"sector dimension {dim} exceeds dense cap "
                              f"{dense_cap}; use method='iterative'")
        vals = np.linalg.eigvals(np.asarray(block))
        order = np.argsort(vals.real)
        return Spectrum(vals[order], "dense")
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    mat = sps.csr_matrix(block)
    k_eff = min(k, dim - 2)
    if k_eff < 1:
        vals = np.linalg.eigvals(np.asarray(block.toarray()
                                            if sps.issparse(block) else block))
        order = np.argsort(vals.real)
        return Spectrum(vals[order], "dense")
    try:
        vals, vecs = spsla.eigs(mat, k=k_eff, which="SR", maxiter=maxiter)
    except spsla.ArpackNoConvergence as exc:
        raise NoConvergenceError(
            "Arnoldi iteration did not converge",
            iterations=maxiter, residual=None) from exc
    resid = np.array([np.linalg.norm(mat @ vecs[:, i] - vals[i] * vecs[:, i])
                      / np.linalg.norm(vecs[:, i])
                      for i in range(len(vals))])
    order = np.argsort(vals.real)
    return Spectrum(vals[order], "iterative", resid[order])


def spectrum_rows(branch, length, sz, spec):
    """Rows for the spectrum CSV export."""
    rows = []
    for idx, val in enumerate(spec.eigenvalues):
        res = "" if spec.residuals is None else f"{spec.residuals[idx]:.3e}"
        rows.append((branch, length, sz, idx, float(val.real),
                     float(val.imag), spec.method, res))
    return rows


SPECTRUM_HEADER = ("branch", "L", "sz_sector", "index", "re", "im",
                   "method", "residual")

_MAGIC = b"VLAB-OP1"


def write_operator_dump(op, fh):
    """Binary triplet dump: 16-byte header (magic + dims), then triplets.

    Each triplet is (u64 row, u64 col, f64 re, f64 im), little endian,
    sorted by (row, col) with duplicates merged.
    """
    rows, cols, vals = op.triplets()
    fh.write(_MAGIC)
    fh.write(struct.pack("<II", op.dim_row, op.dim_col))
    for r, c, v in zip(rows, cols, vals):
        fh.write(struct.pack("<QQdd", int(r), int(c),
                             float(v.real), float(v.imag)))


def read_operator_dump(fh):
    header = fh.read(16)
    if header[:8] != _MAGIC:
        raise ValueError("not an operator dump (bad magic)")
    dim_row, dim_col = struct.unpack("<II", header[8:])
    rows, cols, vals = [], [], []
    while True:
        chunk = fh.read(32)
        if not chunk:
            break
        r, c, re, im = struct.unpack("<QQdd", chunk)
        rows.append(r)
        cols.append(c)
        vals.append(complex(re, im))
    return LinearOperator.from_triplets(dim_row, dim_col, rows, cols, vals)
