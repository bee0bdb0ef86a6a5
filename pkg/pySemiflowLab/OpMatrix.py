from __future__ import print_function
# import
## batteries
import argparse
import logging
import collections
## 3rd party
import numpy as np
import pandas as pd
from scipy.linalg import expm, svdvals
## package
from pySemiflowLab import Utils
from pySemiflowLab import Expr
from pySemiflowLab import Series
from pySemiflowLab import Semiflow

ALIAS_TOL = 1e-6
MAX_SAMPLES = 2 ** 18
WEIGHT_KINDS = ('hardy', 'dirichlet', 'bergman', 'custom')


class NotComposition(ValueError):
    """Matrix violates a hypothesis of the composition characterization
    """
    pass


class WeightSequence(object):
    """beta_0..beta_N of H^2(beta): ||f||^2 = sum |c_n|^2 beta_n^2
    """
    def __init__(self, kind, values):
        if kind not in WEIGHT_KINDS:
            msg = 'Weight kind not recognized: "{}"'
            raise ValueError(msg.format(kind))
        self.kind = kind
        self.values = np.asarray(values, dtype=float)
        if not np.all(self.values > 0):
            raise ValueError('All weights must be > 0')

    @property
    def N(self):
        return len(self.values) - 1

    def __eq__(self, other):
        return (isinstance(other, WeightSequence) and self.kind == other.kind and
                np.array_equal(self.values, other.values))

    def __ne__(self, other):
        return not self.__eq__(other)

def weights(kind, N, values=None):
    """hardy: 1; dirichlet: beta_0 = 1, sqrt(n); bergman: 1/sqrt(n+1); custom: values
    """
    n = np.arange(N + 1, dtype=float)
    if kind == 'hardy':
        v = np.ones(N + 1)
    elif kind == 'dirichlet':
        v = np.sqrt(n)
        v[0] = 1.0
    elif kind == 'bergman':
        v = 1.0 / np.sqrt(n + 1)
    elif kind == 'custom':
        if values is None or len(values) != N + 1:
            msg = 'Custom weights need N+1 = {} values'
            raise ValueError(msg.format(N + 1))
        v = values
    else:
        msg = 'Weight kind not recognized: "{}"'
        raise ValueError(msg.format(kind))
    return WeightSequence(kind, v)


class OperatorMatrix(object):
    """Dense (N+1)x(N+1) matrix in the orthonormal basis z^n/beta_n of H^2(beta).
    entries[m,n] : m-th coordinate of the image of the n-th basis vector
    entry_error : propagated bound on the per-entry error
    """
    def __init__(self, entries, beta, entry_error=0.0):
        self.entries = np.asarray(entries, dtype=complex)
        self.beta = beta
        self.entry_error = float(entry_error)
        n = self.entries.shape
        if len(n) != 2 or n[0] != n[1] or n[0] != len(beta.values):
            raise ValueError('Matrix must be (N+1)x(N+1) with N+1 = number of weights')
        if not (np.isfinite(self.entry_error) and self.entry_error >= 0):
            raise ValueError('entry_error must be finite and >= 0')

    @property
    def N(self):
        return self.entries.shape[0] - 1

    def monomial(self):
        """Coefficient matrix in the monomial basis: column n = coefficients of T(z^n)
        """
        b = self.beta.values
        return self.entries * b[None,:] / b[:,None]

    def table(self):
        """Long format: row, col, re, im
        """
        m,n = np.indices(self.entries.shape)
        return pd.DataFrame({'row' : m.ravel(), 'col' : n.ravel(),
                             're' : self.entries.real.ravel(),
                             'im' : self.entries.imag.ravel()})

    def to_csv(self, file_name):
        return Utils.table_atomic(self.table(), file_name)

def from_monomial(coeffs, beta, entry_error=0.0):
    """OperatorMatrix from column n = coefficients of T(z^n)
    """
    b = beta.values
    coeffs = np.asarray(coeffs, dtype=complex)
    return OperatorMatrix(coeffs * b[:,None] / b[None,:], beta, entry_error)


def _sampled_columns(column_values, N, r, M):
    """Coefficients 0..N (per column) of sampled functions; returns (coeffs, err)
    """
    C = np.fft.fft(column_values, axis=0) / M
    k = np.arange(N + 1, dtype=float)
    coeffs = C[:N+1,:] * (r ** -k)[:,None]
    sup = np.abs(column_values).max(axis=0)
    err = max(Series.alias_bound(s, r, M, N) for s in sup)
    return coeffs, err

def _sample(f, z, what):
    v = np.asarray(f(z), dtype=complex)
    bad = ~np.isfinite(v)
    if bad.any():
        msg = '{} evaluation failed at {} of {} sample points (first: {})'
        raise ValueError(msg.format(what, bad.sum(), len(z), z[bad][0]))
    return v

def _columns_matrix(make_columns, beta, N, r, M):
    if r is None:
        r = Series.default_radius(N)
    if not 0 < r < 1:
        raise ValueError('Sample radius must be in (0,1): {}'.format(r))
    if M is None:
        M = Series.default_samples(N)
    while True:
        _,z = Utils.circle(M, r)
        coeffs,err = _sampled_columns(make_columns(z), N, r, M)
        if err <= ALIAS_TOL or M >= MAX_SAMPLES:
            break
        logging.info('Alias bound {:.3g} > {}; resampling with M = {}'.format(err, ALIAS_TOL, 2 * M))
        M *= 2
    if err > ALIAS_TOL:
        logging.warning('Alias bound {:.3g} exceeds {} at M = {}'.format(err, ALIAS_TOL, M))
    b = beta.values
    ratio = (b[:,None] / b[None,:]).max()
    return from_monomial(coeffs, beta, err * ratio)

def composition_matrix(phi, beta, N=None, r=None, M=None):
    """Matrix of C_phi: column n = (beta_m/beta_n) a_m(phi^n), each phi^n
    sampled directly on |z| = r
    """
    if N is None:
        N = beta.N
    if N != beta.N:
        raise ValueError('Weights have order {} but N = {}'.format(beta.N, N))
    def cols(z):
        v = _sample(phi, z, 'Symbol')
        P = np.ones((len(z), N + 1), dtype=complex)
        if N > 0:
            P[:,1:] = np.cumprod(np.repeat(v[:,None], N, axis=1), axis=1)
        return P
    return _columns_matrix(cols, beta, N, r, M)

def weighted_composition_matrix(w, phi, beta, N=None, r=None, M=None):
    """Matrix of M_w C_phi: columns w phi^n
    """
    if N is None:
        N = beta.N
    def cols(z):
        v = _sample(phi, z, 'Symbol')
        wv = _sample(w, z, 'Weight function')
        P = np.ones((len(z), N + 1), dtype=complex)
        if N > 0:
            P[:,1:] = np.cumprod(np.repeat(v[:,None], N, axis=1), axis=1)
        return wv[:,None] * P
    return _columns_matrix(cols, beta, N, r, M)


def _beta_norm(c, b):
    return float(np.sqrt(np.sum(np.abs(c) ** 2 * b ** 2)))

def characterization_defect(T):
    """max over n <= N/2 of ||T e_n - (T e_1)^n||_beta (truncated at N)
    """
    a = T.monomial()
    b = T.beta.values
    N = T.N
    te1 = a[:,1] if N >= 1 else np.zeros(N + 1)
    p = np.zeros(N + 1, dtype=complex)
    p[0] = 1.0
    defect = 0.0
    for n in range(N // 2 + 1):
        defect = max(defect, _beta_norm(a[:,n] - p, b))
        p = Series.mul(p, te1, N)
    return defect

def weighted_characterization_defect(T, zero_tol=1e-14):
    """max over 1 <= n <= N/2 of ||(T e_0)^(n-1) T e_n - (T e_1)^n||_beta
    """
    a = T.monomial()
    b = T.beta.values
    N = T.N
    te0 = a[:,0]
    if np.all(np.abs(te0) <= zero_tol):
        raise NotComposition('T e_0 vanishes identically')
    te1 = a[:,1]
    p0 = np.zeros(N + 1, dtype=complex)
    p0[0] = 1.0
    p1 = te1.copy()
    defect = 0.0
    for n in range(1, N // 2 + 1):
        defect = max(defect, _beta_norm(Series.mul(p0, a[:,n], N) - p1, b))
        p0 = Series.mul(p0, te0, N)
        p1 = Series.mul(p1, te1, N)
    return defect

def generator_matrix(G, beta, N=None, r=None, M=None):
    """Matrix of A f = G f': [A]_{m,n} = n g_{m-n+1} beta_m/beta_n
    """
    if N is None:
        N = beta.N
    if r is None:
        r = Series.default_radius(N + 1)
    if M is None:
        M = Series.default_samples(N + 1)
    while True:
        g = Series.taylor_from_samples(G, N + 1, r, M)
        if g.alias_bound <= ALIAS_TOL or M >= MAX_SAMPLES:
            break
        logging.info('Generator alias bound {:.3g}; resampling with M = {}'.format(g.alias_bound, 2 * M))
        M *= 2
    if g.alias_bound > ALIAS_TOL:
        logging.warning('Generator alias bound {:.3g} exceeds {}'.format(g.alias_bound, ALIAS_TOL))
    a = np.zeros((N + 1, N + 1), dtype=complex)
    for n in range(1, N + 1):
        m = np.arange(max(n - 1, 0), N + 1)
        a[m, n] = n * g.coeffs[m - n + 1]
    b = beta.values
    ratio = (b[:,None] / b[None,:]).max()
    return from_monomial(a, beta, N * g.alias_bound * ratio)

def expm_compare(A, t, C, block):
    """max |exp(tA) - C| over the leading block x block corner
    """
    if A.beta != C.beta or A.N != C.N:
        raise ValueError('Generator and composition matrices differ in weights or order')
    if not 0 < block <= A.N + 1:
        raise ValueError('block must be in [1, N+1]: {}'.format(block))
    if block > A.N // 2 + 1:
        logging.warning('block {} > N/2; tail pollution of exp(tA) possible'.format(block))
    with np.errstate(all='ignore'):
        E = expm(t * A.entries)
    if not np.isfinite(E).all():
        raise OverflowError('Matrix exponential overflow (t = {}, ||A|| = {:.3g})'.format(
            t, np.abs(A.entries).max()))
    return float(np.max(np.abs(E[:block,:block] - C.entries[:block,:block])))

def singular_values(T):
    """Singular values, descending
    """
    if not np.isfinite(T.entries).all():
        raise ValueError('Matrix has non-finite entries')
    return svdvals(T.entries)

def hs_norm_matrix(T):
    """Frobenius norm (partial Hilbert-Schmidt norm)
    """
    return float(np.linalg.norm(T.entries, 'fro'))


# Hardy-space HS integral
HSIntegral = collections.namedtuple('HSIntegral', ['value', 'value_2M', 'diverges', 'radial'])

def _hs_mean(phi, r, M):
    _,z = Utils.circle(M, r)
    a = np.abs(np.asarray(phi(z), dtype=complex))
    if not (np.isfinite(a).all() and np.all(a < 1)):
        return np.inf
    return float(np.mean(1.0 / (1.0 - a ** 2)))

def hs_integral_hardy(phi, M=2 ** 18, radius=1 - 1e-6, ratio=1.5, cap=1e6,
                      sweep=(2, 3, 4)):
    """(1/2pi) int 1/(1 - |phi(r e^it)|^2) dt by the trapezoid rule at M and
    2M points. Divergence flagged if the refinements differ by a factor > ratio,
    exceed cap, |phi| >= 1 somewhere, or if the radial sweep r = 1 - 10^-k
    shows increments that do not shrink by half per decade.
    """
    v1 = _hs_mean(phi, radius, M)
    v2 = _hs_mean(phi, radius, 2 * M)
    diverges = (not np.isfinite(v1) or not np.isfinite(v2) or
                max(v1, v2) > cap or max(v1, v2) > ratio * min(v1, v2))
    radial = []
    for k in sweep:
        Mk = Utils.pow2(32 * 10 ** k)
        radial.append((1 - 10.0 ** -k, _hs_mean(phi, 1 - 10.0 ** -k, Mk)))
    I = [x[1] for x in radial]
    if len(I) >= 3 and np.isfinite(I).all():
        d1 = I[-2] - I[-3]
        d2 = I[-1] - I[-2]
        if d2 > 0.5 * d1 and d2 > 1e-3 * I[-1]:
            diverges = True
    elif not np.isfinite(I).all():
        diverges = True
    return HSIntegral(v1, v2, bool(diverges), radial)

def trace_class_flag(phi, M=4096):
    """sup |phi| near the circle (radially extrapolated) < 1 - 1e-9
    """
    s1 = Series.sup_on_circle(phi, 1 - 1e-6, M)
    s2 = Series.sup_on_circle(phi, 1 - 2e-6, M)
    return max(s1, 2 * s1 - s2) < 1 - 1e-9

UnivalentRatio = collections.namedtuple('UnivalentRatio', ['values', 'tends_to_zero'])

def univalent_compactness_ratio(phi, xi=1.0, kmax=30, tail=5):
    """(1 - |z|^2)/(1 - |phi(z)|^2) along z = (1 - 2^-k) xi
    """
    r = 1 - 2.0 ** -np.arange(1, kmax + 1)
    z = r * complex(xi)
    a = np.abs(np.asarray(phi(z), dtype=complex))
    q = (1 - r ** 2) / (1 - a ** 2)
    t = q[-tail:]
    zero = bool(np.all(np.diff(t) <= 0) and t[-1] < 1e-3)
    return UnivalentRatio(q, zero)

def iterate(phi, k):
    """phi o ... o phi (k times); expression trees stay trees
    """
    if k < 1:
        raise ValueError('Iterate count must be >= 1: {}'.format(k))
    if isinstance(phi, Expr.node):
        out = phi
        for _ in range(k - 1):
            out = Expr.substitute(phi, out)
        return out
    def f(z):
        for _ in range(k):
            z = phi(z)
        return z
    return f


# CLI
def get_desc():
    desc = 'Truncated matrices of composition operators and generators'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    Build the (N+1)x(N+1) matrix of C_phi on H^2(beta) in the orthonormal
    basis z^n/beta_n and report its spectrum and norms.
    * --G/--example: phi = phi_t of the semiflow (closed form if the example
      has one, otherwise the ODE flow); also builds the generator matrix
      and compares exp(tA) with C on the leading block.
    * --phi: a single static self-map.

    Outputs: JSON report, matrix CSV (row, col, re, im) and spectrum CSV.
    """
    if subparsers:
        parser = subparsers.add_parser('matrix', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    # args
    Utils.add_symbol_args(parser, phi=True)
    mat = parser.add_argument_group('Matrix')
    mat.add_argument('--beta', type=str, default='hardy', choices=WEIGHT_KINDS,
                     help='Weight sequence (default: %(default)s)')
    mat.add_argument('--beta-values', type=str, default=None,
                     help='Custom weights beta_0..beta_N (comma-delimited)')
    mat.add_argument('--N', type=int, default=64,
                     help='Truncation order (default: %(default)s)')
    mat.add_argument('--t', type=float, default=1.0,
                     help='Semigroup time (default: %(default)s)')
    mat.add_argument('--block', type=int, default=None,
                     help='Leading block compared with exp(tA) (default: N/2)')
    mat.add_argument('--hs-integral', action='store_true', default=False,
                     help='Also compute the Hardy-space HS boundary integral')
    Semiflow.add_flow_args(parser)

    # parse & return
    if test_args:
        args = parser.parse_args(Utils.join_expr_args(test_args))
        return args
    return parser

def check_args(args):
    """Checking user input
    """
    Utils.apply_job(args)
    assert args.N >= 1, '--N must be >= 1'
    assert args.t >= 0, '--t must be >= 0'
    if args.block is None:
        args.block = args.N // 2
    assert 0 < args.block <= args.N + 1, '--block must be in [1, N+1]'
    if args.beta == 'custom':
        args.beta_values = Utils.make_values(args.beta_values)
        if args.beta_values is None:
            raise ValueError('--beta custom requires --beta-values')

def symbol_map(G, case, t, cfg):
    """phi_t: closed form > model > ODE flow
    """
    if case is not None and case.closed_form_flow is not None:
        f = case.closed_form_flow
        return lambda z: f(z, t=t)
    if case is not None and case.model is not None and case.model.h_inv is not None:
        m = case.model
        return lambda z: Semiflow.model_flow(m, z, t)
    return Semiflow.flow_evaluator(G, t, cfg)

def spectrum_table(s):
    return pd.DataFrame({'k' : np.arange(len(s)), 'sigma' : s})

def main(args=None):
    # package
    from pySemiflowLab import Report
    # Input
    if args is None:
        args = parse_args()
    check_args(args)
    sym,case,kind = Utils.resolve_symbol(args)
    beta = weights(args.beta, args.N, args.beta_values)
    cfg = Semiflow.flow_config(args)

    rep = Report.report(args)
    if kind == 'G':
        phi = symbol_map(sym, case, args.t, cfg)
    else:
        phi = sym
    C = rep.run('composition_matrix', composition_matrix, phi, beta, args.N)
    if C is not None:
        rep.set('entry_error', C.entry_error)
        rep.add('characterization_defect', characterization_defect, C)
        rep.add('weighted_characterization_defect', weighted_characterization_defect, C)
        s = rep.add('singular_values', singular_values, C)
        rep.add('hs_norm_matrix', hs_norm_matrix, C)
        if s is not None:
            rep.set('trace_sum', float(np.sum(s)))
    if kind == 'G':
        A = rep.run('generator_matrix', generator_matrix, sym, beta, args.N)
        if A is not None and C is not None:
            rep.add('expm_compare', expm_compare, A, args.t, C, args.block)
        if args.t > 0:
            rep.add('trace_class_flag', trace_class_flag, phi)
    else:
        rep.add('trace_class_flag', trace_class_flag, phi)
    if args.hs_integral:
        rep.add('hs_integral_hardy', hs_integral_hardy, phi)

    # writing
    files = [args.prefix + '.json']
    if C is not None:
        files.append(C.to_csv(args.prefix + '_matrix.csv'))
        s = rep.get('singular_values')
        if s is not None:
            files.append(Utils.table_atomic(spectrum_table(s), args.prefix + '_spectrum.csv'))
    rep.write(files[0])

    # status
    for f in files:
        Utils.file_written(f)
    return tuple(files)


# main
if __name__ == '__main__':
    pass
