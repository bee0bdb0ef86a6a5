from __future__ import print_function
# import
## batteries
import logging
## 3rd party
import numpy as np
## package
from pySemiflowLab import Utils

EPS = np.finfo(float).eps


class TaylorPoly(object):
    """Truncated power series c_0 + c_1 z + ... + c_N z^N.
    coeffs : complex coefficients
    sample_radius : radius of the sampling circle the coefficients came from
    alias_bound : bound on the per-coefficient error (aliasing + rounding)
    source : evaluator the coefficients were sampled from (or None)
    n_samples : number of sample points used (or None)
    """
    def __init__(self, coeffs, sample_radius=None, alias_bound=0.0,
                 source=None, n_samples=None):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.sample_radius = sample_radius
        self.alias_bound = float(alias_bound)
        self.source = source
        self.n_samples = n_samples
        if self.alias_bound < 0:
            raise ValueError('alias_bound must be >= 0')

    @property
    def N(self):
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, z):
        # Horner
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def __repr__(self):
        x = 'TaylorPoly(N={}, sample_radius={}, alias_bound={:.3g})'
        return x.format(self.N, self.sample_radius, self.alias_bound)


def default_radius(N):
    """1 - 1/(2N)
    """
    return 1.0 - 1.0 / (2.0 * max(N, 1))

def default_samples(N):
    return Utils.pow2(max(4 * (N + 1), 1024))

def alias_bound(sup, r, M, k):
    """Aliasing error bound of the k-th sampled coefficient plus FFT rounding
    """
    alias = sup * r ** (M - k) / (1.0 - r ** M)
    rounding = EPS * M * sup * r ** (-k)
    return alias + rounding

def taylor_from_samples(f, N, r=None, M=None):
    """Taylor coefficients c_0..c_N of f by the discretized Cauchy formula
    c_k = r^-k * (1/M) * sum_j f(r w^j) w^-jk, w = exp(2 pi i/M)
    f : evaluator accepting numpy arrays of complex points
    N : truncation order
    r : sampling radius in (0,1), default 1 - 1/(2N)
    M : number of samples, default max(4(N+1), 1024) rounded to a power of 2
    """
    N = int(N)
    if N < 0:
        raise ValueError('Truncation order must be >= 0: {}'.format(N))
    if r is None:
        r = default_radius(N)
    if not 0 < r < 1:
        msg = 'Sample radius must be in (0,1): {}'
        raise ValueError(msg.format(r))
    if M is None:
        M = default_samples(N)
    if M < 4 * (N + 1):
        msg = 'Number of samples ({}) must be >= 4(N+1) = {} (truncation order N = {})'
        raise ValueError(msg.format(M, 4 * (N + 1), N))
    _,z = Utils.circle(M, r)
    vals = np.asarray(f(z), dtype=complex)
    bad = ~np.isfinite(vals)
    if bad.any():
        msg = 'Evaluator failed at {} of {} sample points on |z| = {} (first: {})'
        raise ValueError(msg.format(bad.sum(), M, r, z[bad][0]))
    c = np.fft.fft(vals) / M
    k = np.arange(N + 1)
    coeffs = c[:N+1] * r ** (-k.astype(float))
    sup = np.abs(vals).max()
    return TaylorPoly(coeffs, sample_radius=r, alias_bound=alias_bound(sup, r, M, N),
                      source=f, n_samples=M)

def mul(a, b, N):
    """Truncated product of two coefficient arrays
    """
    return np.convolve(a, b)[:N+1]

def _power_conv(p, n):
    N = p.N
    out = np.zeros(N + 1, dtype=complex)
    out[0] = 1.0
    base = p.coeffs.copy()
    e = n
    while e > 0:
        if e & 1:
            out = mul(out, base, N)
        e >>= 1
        if e:
            base = mul(base, base, N)
    # first-order error propagation
    l1 = max(1.0, np.abs(p.coeffs).sum())
    err = n * p.alias_bound * l1 ** max(n - 1, 0)
    return TaylorPoly(out, sample_radius=p.sample_radius, alias_bound=err)

def power(p, n):
    """Coefficients of p^n truncated at the order of p.
    Uses binary truncated convolution; if p carries its source evaluator,
    f^n is also resampled and the result with the smaller alias_bound wins.
    """
    n = int(n)
    if n < 0:
        raise ValueError('Exponent must be >= 0: {}'.format(n))
    if n == 0:
        c = np.zeros(p.N + 1, dtype=complex)
        c[0] = 1.0
        return TaylorPoly(c, sample_radius=p.sample_radius)
    conv = _power_conv(p, n)
    if p.source is None:
        return conv
    f = p.source
    resampled = taylor_from_samples(lambda z: f(z) ** n, p.N,
                                    r=p.sample_radius, M=p.n_samples)
    if resampled.alias_bound < conv.alias_bound:
        return resampled
    return conv

def sup_on_circle(f, r, M=4096, n_refine=40):
    """max |f| over M equispaced points on |z| = r, then a bisection
    refinement around the maximizing sample.
    """
    theta,z = Utils.circle(M, r)
    vals = np.abs(np.asarray(f(z), dtype=complex))
    bad = ~np.isfinite(vals)
    if bad.any():
        msg = 'Evaluator failed at {} of {} points on |z| = {}'
        raise ValueError(msg.format(bad.sum(), M, r))
    j = int(np.argmax(vals))
    best = vals[j]
    h = 2 * np.pi / M
    lo,hi = theta[j] - h, theta[j] + h
    for _ in range(n_refine):
        mid = 0.5 * (lo + hi)
        t = np.array([0.5 * (lo + mid), 0.5 * (mid + hi)])
        v = np.abs(np.asarray(f(r * np.exp(1j * t)), dtype=complex))
        if not np.isfinite(v).all():
            logging.warning('Non-finite value during sup refinement on |z| = {}'.format(r))
            break
        best = max(best, v.max())
        if v[0] >= v[1]:
            hi = mid
        else:
            lo = mid
    return float(best)

def parseval_gap(p, f, M=None):
    """mean(|f|^2) on the sample circle minus sum |c_k|^2 r^2k (>= -tolerance)
    """
    r = p.sample_radius
    if M is None:
        M = p.n_samples or default_samples(p.N)
    _,z = Utils.circle(M, r)
    mean = np.mean(np.abs(np.asarray(f(z), dtype=complex)) ** 2)
    k = np.arange(p.N + 1)
    return float(mean - np.sum(np.abs(p.coeffs) ** 2 * r ** (2 * k)))


# main
if __name__ == '__main__':
    pass
