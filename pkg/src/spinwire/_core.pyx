# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: tridiagonal eigensolver and the piecewise-noise loop.

Diagonalization goes straight to LAPACK's ``dstemr`` (the MRRR solver that
SciPy's ``eigh_tridiagonal`` dispatches to), so the compiled and fallback
backends produce identical spectra; the win here is fusing the
re-diagonalize / rotate / record loop of the dynamic-noise evolution into
one C pass per realization.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin
from scipy.linalg.cython_lapack cimport dstemr

cnp.import_array()

NAME = "compiled"


cdef int _dstemr_full(double* d, double* e_scratch, int n,
                      double* w, double* z, int ldz,
                      double* work, int lwork, int* iwork, int liwork,
                      int* isuppz) nogil:
    """All eigenvalues/eigenvectors of a symmetric tridiagonal matrix."""
    cdef char jobz = b'V', rng_all = b'A'
    cdef double vl = 0.0, vu = 0.0
    cdef int il = 1, iu = n, m = 0, nzc = n, info = 0
    cdef bint tryrac = 1
    dstemr(&jobz, &rng_all, &n, d, e_scratch, &vl, &vu, &il, &iu, &m,
           w, z, &ldz, &nzc, isuppz, &tryrac,
           work, &lwork, iwork, &liwork, &info)
    return info


cdef void _query_workspace(int n, int* lwork, int* liwork):
    cdef char jobz = b'V', rng_all = b'A'
    cdef double vl = 0.0, vu = 0.0
    cdef int il = 1, iu = n, m = 0, nzc = n, info = 0, ldz = n
    cdef bint tryrac = 1
    cdef double wkopt = 0.0
    cdef int iwkopt = 0
    cdef int lq = -1, liq = -1
    dstemr(&jobz, &rng_all, &n, NULL, NULL, &vl, &vu, &il, &iu, &m,
           NULL, NULL, &ldz, &nzc, NULL, &tryrac,
           &wkopt, &lq, &iwkopt, &liq, &info)
    lwork[0] = <int>wkopt
    liwork[0] = iwkopt


def eigh_tridiagonal(double[::1] diag, double[::1] offdiag):
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""
    cdef int n = diag.shape[0]
    if offdiag.shape[0] != n - 1:
        raise ValueError("offdiagonal length must be n - 1")
    cdef cnp.ndarray[double, ndim=1] d = np.array(diag, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e = np.empty(n, dtype=np.float64)
    cdef int i
    for i in range(n - 1):
        e[i] = offdiag[i]
    e[n - 1] = 0.0
    cdef cnp.ndarray[double, ndim=1] lam = np.empty(n, dtype=np.float64)
    # LAPACK is column-major; the transposed C-order view makes z[j, i]
    # component i of eigenvector j, so return the transpose at the end.
    cdef cnp.ndarray[double, ndim=2] zt = np.empty((n, n), dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] isuppz = np.empty(2 * n, dtype=np.intc)
    cdef int lwork = 0, liwork = 0
    _query_workspace(n, &lwork, &liwork)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(lwork, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] iwork = np.empty(liwork, dtype=np.intc)
    cdef int info = _dstemr_full(&d[0], &e[0], n, &lam[0], &zt[0, 0], n,
                                 &work[0], lwork, &iwork[0], liwork,
                                 &isuppz[0])
    if info != 0:
        raise ArithmeticError(
            f"tridiagonal eigensolver failed to converge (dstemr info={info})")
    return lam, zt.T.copy()


def evolve_piecewise(double[::1] diag, double[:, ::1] coupling_rows,
                     double tau, double horizon,
                     int sender0, int receiver0,
                     double[::1] record_times, bint keep_states=False):
    """Propagate through piecewise-constant intervals, recording <r|psi(t)>.

    Mirrors ``spinwire._fallback.evolve_piecewise``; see there for the
    contract.
    """
    cdef int n = diag.shape[0]
    cdef int n_int = coupling_rows.shape[0]
    cdef int n_rec = record_times.shape[0]
    if coupling_rows.shape[1] != n - 1:
        raise ValueError("coupling rows must have n - 1 columns")

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] amps = np.empty(n_rec, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] psi_arr = np.zeros(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] states_arr
    if keep_states:
        states_arr = np.empty((n_int, n), dtype=np.complex128)
    else:
        states_arr = np.empty((0, n), dtype=np.complex128)

    # scratch
    cdef cnp.ndarray[double, ndim=1] d = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lam = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] zt = np.empty((n, n), dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] isuppz = np.empty(2 * n, dtype=np.intc)
    cdef cnp.ndarray[double, ndim=2] y = np.empty((2, n), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] pr = np.empty((2, n), dtype=np.float64)
    cdef int lwork = 0, liwork = 0
    _query_workspace(n, &lwork, &liwork)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(lwork, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] iwork = np.empty(liwork, dtype=np.intc)

    cdef double complex* psi = <double complex*>cnp.PyArray_DATA(psi_arr)
    psi[sender0] = 1.0

    cdef int k, i, j, info, k_rec = 0
    cdef bint have_eig = 0, same
    cdef double t0, dt_k, dt, ph, c, s, re, im, zji
    cdef double complex acc
    for k in range(n_int):
        t0 = k * tau
        dt_k = horizon - t0
        if dt_k > tau:
            dt_k = tau
        if dt_k <= 0:
            break
        same = have_eig
        if have_eig:
            for i in range(n - 1):
                if coupling_rows[k, i] != coupling_rows[k - 1, i]:
                    same = 0
                    break
        if not same:
            for i in range(n):
                d[i] = diag[i]
            for i in range(n - 1):
                e[i] = -2.0 * coupling_rows[k, i]
            e[n - 1] = 0.0
            info = _dstemr_full(&d[0], &e[0], n, &lam[0], &zt[0, 0], n,
                                &work[0], lwork, &iwork[0], liwork,
                                &isuppz[0])
            if info != 0:
                raise ArithmeticError(
                    f"tridiagonal eigensolver failed in interval {k} "
                    f"(dstemr info={info})")
            have_eig = 1
        if keep_states:
            for i in range(n):
                states_arr[k, i] = psi[i]
        # y = W^T psi (rows of zt are eigenvectors)
        for j in range(n):
            re = 0.0
            im = 0.0
            for i in range(n):
                zji = zt[j, i]
                re += zji * psi[i].real
                im += zji * psi[i].imag
            y[0, j] = re
            y[1, j] = im
        while k_rec < n_rec and record_times[k_rec] < t0 + dt_k:
            dt = record_times[k_rec] - t0
            acc = 0.0
            for j in range(n):
                ph = lam[j] * dt
                c = cos(ph)
                s = sin(ph)
                # e^{-i ph} * y_j, projected on the receiver component
                acc = acc + zt[j, receiver0] * (
                    (c * y[0, j] + s * y[1, j])
                    + 1j * (c * y[1, j] - s * y[0, j]))
            amps[k_rec] = acc
            k_rec += 1
        # psi = W (e^{-i lam dt_k} y)
        for j in range(n):
            ph = lam[j] * dt_k
            c = cos(ph)
            s = sin(ph)
            pr[0, j] = c * y[0, j] + s * y[1, j]
            pr[1, j] = c * y[1, j] - s * y[0, j]
        for i in range(n):
            re = 0.0
            im = 0.0
            for j in range(n):
                zji = zt[j, i]
                re += zji * pr[0, j]
                im += zji * pr[1, j]
            psi[i] = re + 1j * im
    while k_rec < n_rec:
        amps[k_rec] = psi[receiver0]
        k_rec += 1
    return amps, psi_arr, (states_arr if keep_states else None)
