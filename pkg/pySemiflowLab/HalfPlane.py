from __future__ import print_function
# import
## batteries
import argparse
import collections
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Utils
from pySemiflowLab import Semiflow

RAY_ANGLES = (0.0, np.pi / 4, -np.pi / 4)
ANALYTIC_THETAS = (-0.5, -0.3, -0.1, 0.1, 0.3, 0.5)


def _values(G, w):
    with np.errstate(all='ignore'):
        return np.asarray(G(np.asarray(w, dtype=complex)), dtype=complex)

def berkson_porta_check(G, grid=None, step=None):
    """max over grid of x du/dx - u, u = Re G, x = Re w (central differences,
    step 1e-5 max(1, x) unless given). <= tol means x du/dx <= u holds.
    """
    if grid is None:
        grid = Utils.halfplane_grid()
    w = np.asarray(grid, dtype=complex)
    x = w.real
    if np.any(x <= 0):
        raise ValueError('Grid must lie in the right half-plane')
    h = 1e-5 * np.maximum(1.0, x) if step is None else np.full(x.shape, float(step))
    if np.any(h >= x):
        raise ValueError('Difference step must be < Re w on the grid')
    u = _values(G, w).real
    du = (_values(G, w + h).real - _values(G, w - h).real) / (2 * h)
    v = x * du - u
    if not np.isfinite(v).all():
        raise ValueError('Generator not finite on the grid')
    return float(np.max(v))


def _ray_limit(q, rtol=1e-6):
    """Aitken-accelerated limit of a sequence, or None if it does not settle
    """
    q = np.asarray(q, dtype=complex)
    if not np.isfinite(q).all():
        return None
    d = np.diff(q)
    scale = max(1.0, np.abs(q).max())
    if np.all(np.abs(d[-3:]) <= 1e-14 * scale):
        return complex(q[-1])
    if abs(d[-2]) == 0 or abs(d[-1] / d[-2]) >= 1:
        return None
    dd = d[1:] - d[:-1]
    with np.errstate(all='ignore'):
        acc = q[2:] - d[1:] ** 2 / dd
    acc = acc[np.isfinite(acc)]
    if len(acc) < 2:
        return None
    if abs(acc[-1] - acc[-2]) > rtol * max(1.0, abs(acc[-1])):
        return None
    return complex(acc[-1])

def angular_limit(f, ray_points=None, angles=RAY_ANGLES, rtol=1e-6):
    """lim f(z)/z along rays z = x exp(i a), x = 2^k (k=3..20); None unless
    every ray settles and the rays agree within rtol
    """
    if ray_points is None:
        ray_points = 2.0 ** np.arange(3, 21)
    x = np.asarray(ray_points, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ValueError('Ray points must be increasing')
    limits = []
    for a in angles:
        z = x * np.exp(1j * a)
        lim = _ray_limit(_values(f, z) / z, rtol)
        if lim is None:
            return None
        limits.append(lim)
    for lim in limits[1:]:
        if abs(lim - limits[0]) > rtol * max(1.0, abs(limits[0])):
            return None
    return limits[0]

def delta_limit(G, ray_points=None):
    """Real angular limit of G(z)/z at infinity, or None
    """
    lim = angular_limit(G, ray_points)
    if lim is None or abs(lim.imag) > 1e-6 * max(1.0, abs(lim.real)):
        return None
    return float(lim.real)

def comp_norm_from_delta(delta, t):
    """||C_phi_t|| = exp(-delta t/2)
    """
    return float(np.exp(-delta * t / 2.0))

def norm_from_phi(phi, ray_points=None):
    """phi'(inf)^(-1/2); inf when the angular derivative at infinity is not
    a positive real (unbounded operator)
    """
    lim = angular_limit(phi, ray_points)
    if lim is None or lim.real <= 0 or abs(lim.imag) > 1e-6 * abs(lim.real):
        return np.inf
    return float(lim.real ** -0.5)


KernelDissipativity = collections.namedtuple('KernelDissipativity',
                                             ['inf', 'contractive', 'bounded_below', 'rayleigh_sup'])

def kernel_dissipativity(G, grid=None, tol=1e-9):
    """inf over grid of Re G(w)/Re w, with the contractive (inf >= -tol) and
    bounded-below verdicts; rayleigh_sup = sup of -Re G(w)/(2 Re w)
    """
    if grid is None:
        grid = Utils.halfplane_grid()
    w = np.asarray(grid, dtype=complex)
    x = w.real
    ratio = _values(G, w).real / x
    ok = np.isfinite(ratio)
    if not ok.any():
        raise ValueError('Generator not finite on the grid')
    m2 = float(ratio[ok].min())
    small = ok & (x <= x.max() / 100)
    m1 = float(ratio[small].min()) if small.any() else m2
    bounded = not (m2 < -1 and m2 < 10 * m1)
    return KernelDissipativity(m2, m2 >= -tol, bounded, -m2 / 2)


GroupFit = collections.namedtuple('GroupFit', ['p', 'q', 'flow'])

def group_flow(p, q):
    """Closed-form flow of G = pz + iq for real t of either sign
    """
    def phi(z, t):
        z = np.asarray(z, dtype=complex)
        if abs(p) > 1e-12:
            e = np.exp(p * t)
            return z * e + (1j * q / p) * (e - 1)
        return z + 1j * q * t
    return phi

def group_classify(G, fit_points=(1.0, 1 + 1j, 2 - 1j), n_check=20, tol=1e-10, seed=0):
    """Fit G(z) = pz + iq (p, q real) at the fit_points, validate at random
    half-plane points. Returns GroupFit or None.
    """
    fit_points = np.asarray(fit_points, dtype=complex)
    X = np.column_stack([fit_points, np.ones(len(fit_points))])
    y = _values(G, fit_points)
    if not np.isfinite(y).all():
        return None
    coef = np.linalg.lstsq(X, y, rcond=None)[0]
    a,b = coef
    scale = max(1.0, abs(a), abs(b))
    if abs(a.imag) > tol * scale or abs(b.real) > tol * scale:
        return None
    p,q = float(a.real), float(b.imag)
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.1, 10, n_check) + 1j * rng.uniform(-5, 5, n_check)
    g = _values(G, w)
    fit = p * w + 1j * q
    if not np.all(np.abs(g - fit) <= tol * np.maximum(1.0, np.abs(g))):
        return None
    return GroupFit(p, q, group_flow(p, q))

def analytic_diagnostic(G, grid=None, thetas=ANALYTIC_THETAS):
    """Berkson-Porta violation of exp(-i theta) G per theta
    """
    out = collections.OrderedDict()
    for th in thetas:
        rot = np.exp(-1j * th)
        out[th] = berkson_porta_check(lambda w, rot=rot: rot * _values(G, w), grid)
    return out

def flow(G, z0, t, cfg=None):
    """Half-plane semiflow by ODE integration (guard Re w > 0)
    """
    return Semiflow.integrate(G, z0, t, cfg, domain='halfplane')


class HalfPlaneReport(object):
    def __init__(self, bp_violation, delta, norm_at, kernel, group, analytic, tol):
        self.bp_violation = bp_violation
        self.delta = delta
        self.norm_at = norm_at
        self.kernel = kernel
        self.group = group
        self.analytic = analytic
        self.tol = tol

    @property
    def kernel_inf(self):
        return self.kernel.inf

    @property
    def group_params(self):
        return None if self.group is None else (self.group.p, self.group.q)

    def to_dict(self):
        d = collections.OrderedDict()
        d['bp_violation'] = self.bp_violation
        d['bp_satisfied'] = self.bp_violation <= self.tol
        d['delta'] = self.delta
        d['norm_at'] = None if self.norm_at is None else \
            [{'t' : t, 'norm' : v} for t,v in self.norm_at]
        d['kernel_inf'] = self.kernel.inf
        d['kernel_contractive'] = self.kernel.contractive
        d['kernel_bounded_below'] = self.kernel.bounded_below
        d['rayleigh_sup'] = self.kernel.rayleigh_sup
        d['group_params'] = None if self.group is None else \
            {'p' : self.group.p, 'q' : self.group.q}
        d['analytic_diagnostic'] = [{'theta' : k, 'violation' : v}
                                    for k,v in self.analytic.items()]
        return d

def halfplane_report(G, t_values=(0.5, 1.0), grid=None, tol=1e-9):
    if grid is None:
        grid = Utils.halfplane_grid()
    bp = berkson_porta_check(G, grid)
    delta = delta_limit(G)
    norm_at = None
    if delta is not None:
        norm_at = [(t, comp_norm_from_delta(delta, t)) for t in t_values]
    return HalfPlaneReport(bp, delta, norm_at, kernel_dissipativity(G, grid, tol),
                           group_classify(G), analytic_diagnostic(G, grid), tol)


# CLI
def get_desc():
    desc = 'Generator diagnostics on the right half-plane'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    For a generator G on the right half-plane:
    * Berkson-Porta condition x du/dx <= u (u = Re G, x = Re w) on a log grid
    * angular limit delta of G(z)/z at infinity and ||C_phi_t|| = exp(-delta t/2)
    * inf Re G(w)/Re w (reproducing-kernel dissipativity)
    * group test G = pz + iq with closed-form flows
    * rotated conditions for exp(-i theta) G (analyticity diagnostic)

    Writes a JSON report and the kernel ratios as CSV.
    """
    if subparsers:
        parser = subparsers.add_parser('halfplane', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    # args
    Utils.add_symbol_args(parser)
    hp = parser.add_argument_group('Half-plane')
    hp.add_argument('--t', type=str, default='0.5,1',
                    help='Times for the norm formula (default: %(default)s)')
    hp.add_argument('--nx', type=int, default=32,
                    help='Grid points along Re w (log-spaced) (default: %(default)s)')
    hp.add_argument('--ny', type=int, default=32,
                    help='Grid points along Im w (default: %(default)s)')
    hp.add_argument('--tol', type=float, default=1e-9,
                    help='Sign tolerance (default: %(default)s)')

    # parse & return
    if test_args:
        args = parser.parse_args(Utils.join_expr_args(test_args))
        return args
    return parser

def check_args(args):
    """Checking user input
    """
    Utils.apply_job(args)
    args.t = Utils.make_values(args.t)
    assert args.t, '--t must give at least one value'
    assert min(args.t) >= 0, '--t values must be >= 0'
    assert args.nx > 1 and args.ny > 0, '--nx must be > 1 and --ny > 0'

def main(args=None):
    # package
    from pySemiflowLab import Report
    # Input
    if args is None:
        args = parse_args()
    check_args(args)
    G,case,kind = Utils.resolve_symbol(args)
    if kind != 'G':
        raise ValueError('The halfplane command needs a generator')
    if case is not None and case.space != 'halfplane':
        raise ValueError('Example "{}" is not a half-plane example'.format(case.name))
    grid = Utils.halfplane_grid(args.nx, args.ny)

    rep = Report.report(args)
    rep.add('halfplane', halfplane_report, G, args.t, grid, args.tol)
    if case is not None:
        rep.set('expected', case.expected)

    # writing
    w = grid
    df = pd.DataFrame({'x' : w.real, 'y' : w.imag,
                       'ratio' : _values(G, w).real / w.real})
    json_file = rep.write(args.prefix + '.json')
    kern_file = Utils.table_atomic(df, args.prefix + '_kernel.csv')

    # status
    Utils.file_written(json_file)
    Utils.file_written(kern_file)
    return json_file, kern_file


# main
if __name__ == '__main__':
    pass
