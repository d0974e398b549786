# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled gate kernel. Same contract as ``_kernels_py``."""

from libc.stdlib cimport free, malloc


def apply_unitary(double complex[:, ::1] state,
                  const double complex[:, ::1] matrix,
                  const long long[::1] targets,
                  const long long[::1] controls,
                  int n_qubits):
    cdef Py_ssize_t ncols = state.shape[1]
    cdef int k = targets.shape[0]
    cdef Py_ssize_t sub = (<Py_ssize_t>1) << k
    cdef Py_ssize_t nbase = state.shape[0] >> k
    cdef Py_ssize_t cmask = 0
    cdef Py_ssize_t i, base, rest, low, col, r, s, row, tmp
    cdef int t, u
    cdef double re, im, mr, mi, br, bi
    cdef double complex m

    cdef Py_ssize_t *offsets = <Py_ssize_t *> malloc(sub * sizeof(Py_ssize_t))
    cdef Py_ssize_t *bits = <Py_ssize_t *> malloc(k * sizeof(Py_ssize_t))
    # rows of the current 2**k block, split into real and imaginary parts
    cdef double *buf_re = <double *> malloc(sub * ncols * sizeof(double))
    cdef double *buf_im = <double *> malloc(sub * ncols * sizeof(double))
    if not (offsets and bits and buf_re and buf_im):
        free(offsets); free(bits); free(buf_re); free(buf_im)
        raise MemoryError()

    try:
        for s in range(sub):
            offsets[s] = 0
            for t in range(k):
                if (s >> (k - 1 - t)) & 1:
                    offsets[s] |= (<Py_ssize_t>1) << (n_qubits - 1 - targets[t])
        # target bit positions in ascending order, for zero insertion
        for t in range(k):
            bits[t] = n_qubits - 1 - targets[t]
        for t in range(1, k):
            u = t
            while u > 0 and bits[u - 1] > bits[u]:
                tmp = bits[u]; bits[u] = bits[u - 1]; bits[u - 1] = tmp
                u -= 1
        for t in range(controls.shape[0]):
            cmask |= (<Py_ssize_t>1) << (n_qubits - 1 - controls[t])

        with nogil:
            for i in range(nbase):
                base = i
                for t in range(k):
                    low = base & (((<Py_ssize_t>1) << bits[t]) - 1)
                    rest = base >> bits[t]
                    base = (rest << (bits[t] + 1)) | low
                if (base & cmask) != cmask:
                    continue
                for s in range(sub):
                    row = base + offsets[s]
                    for col in range(ncols):
                        buf_re[s * ncols + col] = state[row, col].real
                        buf_im[s * ncols + col] = state[row, col].imag
                for r in range(sub):
                    row = base + offsets[r]
                    for col in range(ncols):
                        re = 0.0
                        im = 0.0
                        for s in range(sub):
                            m = matrix[r, s]
                            mr = m.real
                            mi = m.imag
                            br = buf_re[s * ncols + col]
                            bi = buf_im[s * ncols + col]
                            re = re + mr * br - mi * bi
                            im = im + mr * bi + mi * br
                        state[row, col].real = re
                        state[row, col].imag = im
    finally:
        free(offsets)
        free(bits)
        free(buf_re)
        free(buf_im)


def apply_diagonal(double complex[:, ::1] state, const double complex[::1] diag, int n_qubits):
    cdef Py_ssize_t i, col
    with nogil:
        for i in range(state.shape[0]):
            for col in range(state.shape[1]):
                state[i, col] = state[i, col] * diag[i]
