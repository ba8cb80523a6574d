"""NumPy/SciPy implementations of the computational kernels.

Selected by :mod:`spinwire.backend` when the compiled extension is not
available (or is disabled).  Must stay numerically interchangeable with
``spinwire._core``: both diagonalize through LAPACK's MRRR routine
(``?stemr``), so eigenvalues and eigenvectors agree bit for bit.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError
from scipy.linalg import eigh_tridiagonal as _scipy_eigh_tridiagonal

NAME = "python"


def eigh_tridiagonal(diag, offdiag):
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    try:
        lam, w = _scipy_eigh_tridiagonal(diag, offdiag, lapack_driver="stemr")
    except LinAlgError as exc:
        raise ArithmeticError(f"tridiagonal eigensolver failed: {exc}") from exc
    return lam, w


def _real_matvec(m, v):
    # m real, v complex: route through two real gemv calls instead of
    # promoting m to complex128.
    return m @ v.real + 1j * (m @ v.imag)


def evolve_piecewise(diag, coupling_rows, tau, horizon,
                     sender0, receiver0, record_times, keep_states=False):
    """Propagate through piecewise-constant intervals, recording <r|psi(t)>.

    ``coupling_rows[k]`` holds the couplings of interval k, which covers
    [k*tau, min((k+1)*tau, horizon)].  Returns (amps, final_state, states)
    where ``states[k]`` is the state at the start of interval k (or None).
    """
    n = diag.shape[0]
    n_int = coupling_rows.shape[0]
    psi = np.zeros(n, dtype=np.complex128)
    psi[sender0] = 1.0
    amps = np.empty(len(record_times), dtype=np.complex128)
    states = np.empty((n_int, n), dtype=np.complex128) if keep_states else None

    lam = w = None
    prev_row = None
    k_rec = 0
    for k in range(n_int):
        t0 = k * tau
        dt_k = min(tau, horizon - t0)
        if dt_k <= 0:
            break
        row = coupling_rows[k]
        if prev_row is None or not np.array_equal(row, prev_row):
            lam, w = eigh_tridiagonal(diag, -2.0 * row)
            prev_row = row
        if keep_states:
            states[k] = psi
        y = _real_matvec(w.T, psi)
        wr = w[receiver0]
        while k_rec < len(record_times) and record_times[k_rec] < t0 + dt_k:
            dt = record_times[k_rec] - t0
            amps[k_rec] = wr @ (np.exp(-1j * lam * dt) * y)
            k_rec += 1
        psi = _real_matvec(w, np.exp(-1j * lam * dt_k) * y)
    while k_rec < len(record_times):
        amps[k_rec] = psi[receiver0]
        k_rec += 1
    return amps, psi, states
