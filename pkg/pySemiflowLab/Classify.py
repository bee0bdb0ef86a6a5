from __future__ import print_function
# import
## batteries
import argparse
import logging
import collections
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Utils
from pySemiflowLab import Semiflow

NEAR_BOUNDARY = 1 - 1e-6
THETA_RESOLUTION = 1e-3


class BoundaryProfile(object):
    """Samples of conj(z) G(z) on a circle |z| = radius.
    thetas : sample angles
    values : complex samples (NaN where excluded)
    excluded : mask of samples dropped because G was singular there
    """
    def __init__(self, radius, thetas, values, excluded=None):
        self.radius = radius
        self.thetas = np.asarray(thetas, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        if excluded is None:
            excluded = ~np.isfinite(self.values)
        self.excluded = np.asarray(excluded, dtype=bool)
        if len(self.thetas) != len(self.values):
            raise ValueError('Profile thetas and values differ in length')
        if not 0 < radius <= 1:
            raise ValueError('Profile radius must be in (0,1]: {}'.format(radius))

    @property
    def valid(self):
        return self.values[~self.excluded]

    def __len__(self):
        return len(self.values)

    def table(self):
        return pd.DataFrame({'theta' : self.thetas,
                             're' : self.values.real,
                             'im' : self.values.imag,
                             'excluded' : self.excluded})


def _zbar_G(G, z):
    with np.errstate(all='ignore'):
        return np.conj(z) * np.asarray(G(z), dtype=complex)

def boundary_profile(G, M=4096, radius=NEAR_BOUNDARY, extrapolate=True):
    """conj(z) G(z) at z = radius exp(i theta_j), theta_j = 2 pi j/M.
    With extrapolate (radius < 1), the radial limit is estimated as
    2 v(r) - v(r') with 1 - r' = 2(1 - r).
    radius = 1 samples the circle itself; singular samples are excluded.
    """
    if not 0 < radius <= 1:
        raise ValueError('Profile radius must be in (0,1]: {}'.format(radius))
    thetas,z = Utils.circle(M, radius)
    v = _zbar_G(G, z)
    if extrapolate and radius < 1:
        v2 = _zbar_G(G, z * (1 - 2 * (1 - radius)) / radius)
        v = 2 * v - v2
    excluded = ~np.isfinite(v)
    if excluded.any():
        logging.info('{} of {} profile samples excluded (singular)'.format(excluded.sum(), M))
    if excluded.all():
        raise ValueError('Generator singular at every profile sample')
    v[excluded] = complex(np.nan, np.nan)
    return BoundaryProfile(radius, thetas, v, excluded)

def classify_semigroup(profile, tol=1e-9):
    """(generates, s0) with s0 = max Re conj(z)G(z) over the profile
    """
    v = profile.valid
    if len(v) == 0:
        raise ValueError('Empty boundary profile')
    s0 = float(np.max(v.real))
    return s0 <= tol, s0

def sector_feasible(profile, theta, tol=1e-9):
    v = profile.valid
    for a in (-theta, 0.0, theta):
        if np.max((np.exp(1j * a) * v).real) > tol:
            return False
    return True

def sector_angle(G, tol=1e-9, profile=None, resolution=THETA_RESOLUTION):
    """Largest theta in (0, pi/2) with Re(exp(i a) conj(z)G(z)) <= tol for
    a in {-theta, 0, theta}, by bisection to `resolution`; 0 if none.
    """
    if profile is None:
        profile = boundary_profile(G)
    if not sector_feasible(profile, resolution, tol):
        return 0.0
    lo,hi = resolution, np.pi / 2
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if sector_feasible(profile, mid, tol):
            lo = mid
        else:
            hi = mid
    return float(lo)

def is_group(profile, tol=1e-9):
    """max |Re conj(z)G(z)| <= tol
    """
    return bool(np.max(np.abs(profile.valid.real)) <= tol)


# immediate compactness
def _annulus_sup(G, eps, n_radial=32, n_angular=1024):
    """sup of Re conj(z)G(z) on a grid of 1-eps < |z| < 1 (+ |z| = 1-1e-6)
    """
    r = 1 - eps * np.linspace(1, 0, n_radial + 2)[1:-1]
    r = np.append(r, NEAR_BOUNDARY)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    z = (r[:,None] * np.exp(1j * theta[None,:])).ravel()
    v = _zbar_G(G, z).real
    bad = ~np.isfinite(v)
    if bad.any():
        logging.info('{} annulus grid points excluded (singular)'.format(bad.sum()))
    if bad.all():
        raise ValueError('Generator singular on the whole annulus grid')
    return float(np.max(v[~bad]))

def immediate_compactness_sufficient(G, delta, eps, tol=1e-9, n_radial=32, n_angular=1024):
    """True iff Re conj(z)G(z) <= -delta + tol on the annulus grid 1-eps < |z| < 1
    """
    if delta <= 0:
        raise ValueError('delta must be > 0: {}'.format(delta))
    if not 0 < eps < 1:
        raise ValueError('eps must be in (0,1): {}'.format(eps))
    return _annulus_sup(G, eps, n_radial, n_angular) <= -delta + tol

def find_compactness_witness(G, tol=1e-9, eps_values=(0.5, 0.3, 0.1, 0.05, 0.01), min_delta=1e-3):
    """First (delta, eps) with sup <= -delta on the annulus and delta >= min_delta, else None
    """
    for eps in eps_values:
        s = _annulus_sup(G, eps)
        if s < -max(tol, min_delta):
            return (-s, eps)
    return None


# compactness criterion |G(z)/(z - xi)| -> inf
CompactDiagnostic = collections.namedtuple('CompactDiagnostic', ['xi', 'verdict', 'rays'])

def _growth_verdict(q, threshold, tail=10):
    q = np.asarray(q, dtype=float)
    if np.isnan(q).any():
        return 'inconclusive'
    if np.isinf(q[-tail:]).any():
        return 'diverges'
    t = q[-tail:]
    d = np.diff(t)
    flat = np.abs(d) <= 1e-12 * max(1.0, np.abs(t).max())
    increasing = np.all(d > 0) and not flat.all()
    decaying = abs(d[-1]) < 0.5 * abs(d[0]) or flat.all()
    if increasing and (t[-1] > threshold or not decaying):
        return 'diverges'
    if t[-1] <= threshold and (np.all((d <= 0) | flat) or decaying):
        return 'bounded'
    return 'inconclusive'

def compact_criterion(G, xi=1.0, radii=None, threshold=1e4):
    """q_k = |G(z_k)/(z_k - xi)| along z_k = r_k xi (radial) and along the two
    oblique rays xi(1 - (1 - r_k) exp(+-i pi/4)); default r_k = 1 - 2^-k, k=1..40.
    verdict (radial): 'diverges' | 'bounded' | 'inconclusive'; rays holds
    (verdict, q) for 'radial', 'oblique+' and 'oblique-'.
    """
    xi = complex(xi)
    if abs(abs(xi) - 1) > 1e-12:
        raise ValueError('xi must be unimodular: {}'.format(xi))
    if radii is None:
        radii = 1 - 2.0 ** -np.arange(1, 41)
    eps = 1 - np.atleast_1d(np.asarray(radii, dtype=float))
    if len(eps) < 3:
        msg = 'At least 3 radii required for the growth test; got {}'
        raise ValueError(msg.format(len(eps)))
    if np.any(np.diff(eps) >= 0) or np.any(eps <= 0):
        raise ValueError('radii must increase strictly towards 1')
    rays = collections.OrderedDict()
    for name,direction in (('radial', 1), ('oblique+', np.exp(1j * np.pi / 4)),
                           ('oblique-', np.exp(-1j * np.pi / 4))):
        z = xi * (1 - eps * direction)
        with np.errstate(all='ignore'):
            q = np.abs(np.asarray(G(z), dtype=complex) / (z - xi))
        rays[name] = (_growth_verdict(q, threshold), q)
    return CompactDiagnostic(xi, rays['radial'][0], rays)

def compact_criterion_all(G, n=64, points=(), threshold=1e4):
    """compact_criterion at the n-th roots of unity plus extra points
    """
    xis = list(np.exp(2j * np.pi * np.arange(n) / n)) + [complex(p) for p in points]
    return [compact_criterion(G, xi / abs(xi), threshold=threshold) for xi in xis]


def bp_decomposition(G, alpha, n_radial=20, n_angular=64, r_max=0.99):
    """min Re F over a disc grid, F(z) = G(z)/((alpha - z)(1 - conj(alpha) z))
    """
    alpha = complex(alpha)
    if abs(alpha) > 1 + 1e-9:
        raise ValueError('alpha must lie in the closed disc: {}'.format(alpha))
    z = Utils.disc_grid(n_radial, n_angular, r_max)
    z = np.append(z, 0j)
    z = z[np.abs(z - alpha) >= 1e-8]
    with np.errstate(all='ignore'):
        F = np.asarray(G(z), dtype=complex) / ((alpha - z) * (1 - np.conj(alpha) * z))
    F = F[np.isfinite(F)]
    if len(F) == 0:
        raise ValueError('Berkson-Porta factor not finite on the grid')
    return float(np.min(F.real))


# report
class ClassificationReport(object):
    """Verdicts for a disc generator plus the raw boundary profile
    """
    def __init__(self, s0, generates_semigroup, is_group, theta_max, imm_witness,
                 compact_criterion, bp_min_reF, dw, profile, tol):
        self.s0 = s0
        self.generates_semigroup = generates_semigroup
        self.is_group = is_group
        self.theta_max = theta_max
        self.imm_witness = imm_witness
        self.compact_criterion = compact_criterion
        self.bp_min_reF = bp_min_reF
        self.dw = dw
        self.profile = profile
        self.tol = tol

    @property
    def imm_compact_sufficient(self):
        return self.imm_witness is not None

    @property
    def dw_point(self):
        return None if self.dw is None else self.dw.point

    def to_dict(self):
        d = collections.OrderedDict()
        d['s0'] = self.s0
        d['generates_semigroup'] = self.generates_semigroup
        d['is_group'] = self.is_group
        d['theta_max'] = self.theta_max
        d['imm_compact_sufficient'] = self.imm_compact_sufficient
        if self.imm_witness is not None:
            d['imm_compact_witness'] = {'delta' : self.imm_witness[0], 'eps' : self.imm_witness[1]}
        d['compact_criterion'] = [
            {'xi' : c.xi, 'verdict' : c.verdict,
             'rays' : {k : v[0] for k,v in c.rays.items()}} for c in self.compact_criterion]
        d['bp_min_reF'] = self.bp_min_reF
        if self.dw is not None:
            d['dw_point'] = self.dw.point
            d['dw_boundary'] = self.dw.boundary
            d['dw_status'] = self.dw.status
        d['profile_radius'] = self.profile.radius
        d['profile_samples'] = len(self.profile)
        d['profile_excluded'] = int(self.profile.excluded.sum())
        d['tol'] = self.tol
        return d

def classification_report(G, M=4096, radius=NEAR_BOUNDARY, tol=1e-9, xi_points=(),
                          n_xi=64, cfg=None):
    profile = boundary_profile(G, M, radius)
    generates,s0 = classify_semigroup(profile, tol)
    group = is_group(profile, tol)
    theta = 0.0
    if generates and not group:
        theta = sector_angle(G, tol, profile)
    witness = find_compactness_witness(G, tol) if generates else None
    crit = compact_criterion_all(G, n_xi, xi_points)
    dw = None
    bp = None
    if generates:
        dw = Semiflow.denjoy_wolff(G, cfg)
        if dw.status != 'indeterminate':
            bp = bp_decomposition(G, dw.point)
    return ClassificationReport(s0, generates, group, theta, witness, crit, bp, dw, profile, tol)


# CLI
def get_desc():
    desc = 'Classify a disc generator G'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    Classify the composition semigroup generated by G on the Hardy space:
    * generation: s0 = sup Re conj(z)G(z) near the unit circle <= tol
    * group property: Re conj(z)G(z) = 0 on the circle
    * analyticity sector half-angle theta_max
    * immediate compactness witness (delta, eps)
    * growth of |G(z)/(z - xi)| at boundary points xi
    * Denjoy-Wolff point and min Re F of G = (a - z)(1 - conj(a) z) F

    Writes a JSON report and the boundary profile as CSV.
    """
    if subparsers:
        parser = subparsers.add_parser('classify', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    # args
    Utils.add_symbol_args(parser)
    cl = parser.add_argument_group('Classification')
    cl.add_argument('--M', type=int, default=4096,
                    help='Boundary samples (default: %(default)s)')
    cl.add_argument('--radius', type=float, default=NEAR_BOUNDARY,
                    help='Profile radius; 1 = on the circle (default: %(default)s)')
    cl.add_argument('--tol', type=float, default=1e-9,
                    help='Sign tolerance (default: %(default)s)')
    cl.add_argument('--xi', type=str, default=None,
                    help='Extra boundary points for the growth test, e.g. "1,-1,1j"')
    cl.add_argument('--n-xi', type=int, default=64,
                    help='Roots of unity tested by the growth test (default: %(default)s)')

    # parse & return
    if test_args:
        args = parser.parse_args(Utils.join_expr_args(test_args))
        return args
    return parser

def check_args(args):
    """Checking user input
    """
    Utils.apply_job(args)
    assert args.M > 0, '--M must be > 0'
    assert 0 < args.radius <= 1, '--radius must be in (0,1]'
    assert args.tol >= 0, '--tol must be >= 0'
    args.xi = Utils.make_points(args.xi)

def main(args=None):
    # package
    from pySemiflowLab import Report
    # Input
    if args is None:
        args = parse_args()
    check_args(args)
    G,case,kind = Utils.resolve_symbol(args)
    if kind != 'G':
        raise ValueError('The classify command needs a generator, not a static map')

    rep = Report.report(args)
    cr = rep.add('classification', classification_report, G, args.M, args.radius,
                 args.tol, args.xi, args.n_xi)
    if case is not None:
        rep.set('expected', case.expected)

    # writing
    files = [rep.write(args.prefix + '.json')]
    if cr is not None:
        files.append(Utils.table_atomic(cr.profile.table(), args.prefix + '_profile.csv'))

    # status
    for f in files:
        Utils.file_written(f)
    return tuple(files)


# main
if __name__ == '__main__':
    pass
