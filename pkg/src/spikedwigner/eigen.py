"""
Hermitian eigenvalues by Householder tridiagonalization followed by the
implicit-shift QL iteration.

The reduction is blocked: reflectors are accumulated for ``block`` columns
and the trailing submatrix is updated with one rank-``2*block`` product, so
most of the work runs through matrix-matrix kernels.
"""

import math

import numpy

from .errors import ConvergenceError

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

__all__ = ['tridiagonalize', 'tridiagonal_eigenvalues', 'hermitian_eigenvalues']

MAX_SWEEPS = 50


def tridiagonalize(a, block=32):
    """
    Reduce a Hermitian matrix to real symmetric tridiagonal form.

    Parameters
    ----------
    a : array_like
        Hermitian ``(n, n)`` matrix. Only copied, never modified.
    block : int
        Panel width of the blocked reduction.

    Returns
    -------
    d : numpy.ndarray
        Diagonal, length ``n``.
    e : numpy.ndarray
        Off-diagonal moduli, length ``n - 1``.

    Notes
    -----
    Each reflector is ``I - tau v v^H`` with ``tau = 2 / |v|^2``, which maps
    the subcolumn onto a complex multiple of the first unit vector. The
    resulting tridiagonal matrix has complex off-diagonal entries, but a
    diagonal unitary similarity makes them real and nonnegative without
    changing the spectrum, so only their moduli are kept.
    """
    a = numpy.array(a, dtype=numpy.complex128, copy=True)
    n = a.shape[0]
    d = numpy.zeros(n)
    e = numpy.zeros(max(n - 1, 0))
    if n == 1:
        d[0] = a[0, 0].real
        return d, e

    k0 = 0
    while k0 < n - 2:
        kb = min(block, n - 2 - k0)
        m = n - k0
        V = numpy.zeros((m, kb), dtype=numpy.complex128)
        W = numpy.zeros((m, kb), dtype=numpy.complex128)

        for j in range(kb):
            k = k0 + j
            r = j
            col = a[k:, k].copy()
            if j > 0:
                col -= V[r:, :j] @ W[r, :j].conj() + W[r:, :j] @ V[r, :j].conj()
            d[k] = col[0].real
            x = col[1:]

            xnorm = numpy.linalg.norm(x)
            if xnorm == 0.0:
                e[k] = 0.0
                continue
            alpha = x[0]
            phase = alpha / abs(alpha) if alpha != 0 else 1.0
            v = x.copy()
            v[0] += phase * xnorm
            tau = 1.0 / (xnorm * (xnorm + abs(alpha)))
            e[k] = xnorm

            p = a[k + 1:, k + 1:] @ v
            if j > 0:
                Vr = V[r + 1:, :j]
                Wr = W[r + 1:, :j]
                p -= Vr @ (Wr.conj().T @ v) + Wr @ (Vr.conj().T @ v)
            p *= tau
            K = 0.5 * tau * numpy.vdot(v, p).real
            V[r + 1:, j] = v
            W[r + 1:, j] = p - K * v

        Vt = V[kb:]
        Wt = W[kb:]
        a[k0 + kb:, k0 + kb:] -= (
            numpy.hstack((Vt, Wt)) @ numpy.hstack((Wt, Vt)).conj().T)
        k0 += kb

    d[n - 2] = a[n - 2, n - 2].real
    d[n - 1] = a[n - 1, n - 1].real
    e[n - 2] = abs(a[n - 1, n - 2])
    return d, e


@njit(cache=True)
def _tql(d, e, max_sweeps):
    # e[i] couples d[i] and d[i+1]; e[n-1] is workspace and must be 0.
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def tridiagonal_eigenvalues(d, e, max_sweeps=MAX_SWEEPS):
    """Eigenvalues (unsorted) of the symmetric tridiagonal matrix (d, e)."""
    d = numpy.array(d, dtype=float, copy=True)
    work = numpy.zeros(d.shape[0])
    work[:d.shape[0] - 1] = e
    failed = _tql(d, work, max_sweeps)
    if failed >= 0:
        raise ConvergenceError(
            f'QL iteration did not converge for eigenvalue {failed} '
            f'within {max_sweeps} sweeps',
            residual=float(abs(work[failed])))
    return d


def hermitian_eigenvalues(a, block=32):
    """All eigenvalues of a Hermitian matrix, in descending order."""
    d, e = tridiagonalize(a, block=block)
    return numpy.sort(tridiagonal_eigenvalues(d, e))[::-1]
