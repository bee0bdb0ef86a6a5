from __future__ import print_function
# import
## batteries
import argparse
import logging
import collections
from concurrent.futures import ThreadPoolExecutor
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Utils
from pySemiflowLab import Expr


# Cash-Karp 5(4) tableau
_A = [[],
      [1/5],
      [3/40, 9/40],
      [3/10, -9/10, 6/5],
      [-11/54, 5/2, -70/27, 35/27],
      [1631/55296, 175/512, 575/13824, 44275/110592, 253/4096]]
_B5 = [37/378, 0, 250/621, 125/594, 0, 512/1771]
_TR = [-277/64512, 0, 6925/370944, -6925/202752, -277/14336, 277/7084]

DW_BOUNDARY = 1 - 1e-6
NEAR_BOUNDARY = 1 - 1e-6


class FlowError(ValueError):
    """Integration failed (step-size underflow or repeated guard violation)
    """
    pass


class FlowConfig(object):
    """Integrator settings
    abs_tol, rel_tol : local error tolerances
    max_step : largest time step
    boundary_guard : outputs with |w| >= boundary_guard are rejected (disc)
    max_halvings : consecutive step halvings before FlowError
    """
    def __init__(self, abs_tol=1e-10, rel_tol=1e-10, max_step=0.1,
                 boundary_guard=1.0, max_halvings=60):
        if abs_tol <= 0 or rel_tol <= 0:
            raise ValueError('Integrator tolerances must be > 0')
        if max_step <= 0:
            raise ValueError('max_step must be > 0')
        if not 0 < boundary_guard <= 1:
            raise ValueError('boundary_guard must be in (0,1]: {}'.format(boundary_guard))
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.max_step = max_step
        self.boundary_guard = boundary_guard
        self.max_halvings = int(max_halvings)

    def to_dict(self):
        return {'abs_tol' : self.abs_tol, 'rel_tol' : self.rel_tol,
                'max_step' : self.max_step, 'boundary_guard' : self.boundary_guard,
                'max_halvings' : self.max_halvings}


def _inside(w, cfg, domain):
    if domain == 'halfplane':
        return w.real > 0
    return np.abs(w) < cfg.boundary_guard

def _ck_step(f, w, h):
    k = []
    for i in range(6):
        wi = w
        for j,a in enumerate(_A[i]):
            wi = wi + h * a * k[j]
        k.append(f(wi))
    w5 = w + h * sum(b * kk for b,kk in zip(_B5, k) if b != 0)
    err = np.abs(h * sum(e * kk for e,kk in zip(_TR, k) if e != 0))
    return w5, err, k

def integrate(G, z0, t, cfg=None, domain='disc'):
    """Solve w' = G(w), w(0) = z0 up to time t >= 0 with an adaptive
    Cash-Karp 5(4) pair. z0 may be an array; all points share one step.
    domain : 'disc' (guard |w| < boundary_guard) or 'halfplane' (guard Re w > 0)
    """
    if cfg is None:
        cfg = FlowConfig()
    t = float(t)
    if t < 0:
        raise ValueError('Flow time must be >= 0: {}'.format(t))
    scalar = np.ndim(z0) == 0
    w = np.atleast_1d(np.array(z0, dtype=complex))
    if t == 0 or w.size == 0:
        return complex(w[0]) if scalar else w
    if not _inside(w, cfg, domain).all():
        msg = 'Starting point outside the {}: {}'
        raise FlowError(msg.format(domain, w[~_inside(w, cfg, domain)][0]))

    def f(x):
        with np.errstate(all='ignore'):
            return np.asarray(G(x), dtype=complex)

    g0 = np.abs(f(w))
    if not np.isfinite(g0).all():
        raise FlowError('Generator not finite at a starting point')
    h = min(cfg.max_step, t, 1e-2 / max(1.0, g0.max()))
    s = 0.0
    halvings = 0
    while s < t:
        h = min(h, t - s)
        with np.errstate(all='ignore'):
            w_new,err,k = _ck_step(f, w, h)
        ok = all(np.isfinite(kk).all() for kk in k) and np.isfinite(w_new).all()
        if ok:
            ok = _inside(w_new, cfg, domain).all()
        if not ok:
            h *= 0.5
            halvings += 1
            if halvings > cfg.max_halvings:
                msg = 'Guard violation persisted after {} step halvings at t = {}'
                raise FlowError(msg.format(cfg.max_halvings, s))
            continue
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(w), np.abs(w_new))
        e = float(np.max(err / scale))
        if e <= 1.0:
            s = t if t - (s + h) <= 1e-14 * t else s + h
            w = w_new
            halvings = 0
        fac = 5.0 if e == 0 else min(5.0, max(0.2, 0.9 * e ** -0.2))
        h = min(cfg.max_step, h * fac)
        if h < 1e-15 * max(1.0, t):
            msg = 'Step size underflow at t = {}'
            raise FlowError(msg.format(s))
    return complex(w[0]) if scalar else w

def flow(G, z0, t, cfg=None):
    """phi_t(z0) for the disc semiflow generated by G
    """
    return integrate(G, z0, t, cfg, domain='disc')

def flow_evaluator(G, t, cfg=None, domain='disc'):
    """phi_t as an evaluator (callable on arrays)
    """
    def phi(z):
        return integrate(G, z, t, cfg, domain=domain)
    return phi

def backward(G):
    """Generator of the reversed flow
    """
    return lambda z: -np.asarray(G(z))

def semiflow_defect(G, grid, s, t, cfg=None):
    """max |phi_{s+t}(z) - phi_s(phi_t(z))| over grid
    """
    grid = np.asarray(grid, dtype=complex)
    if s == 0 or t == 0:
        return 0.0
    a = flow(G, grid, s + t, cfg)
    b = flow(G, flow(G, grid, t, cfg), s, cfg)
    return float(np.max(np.abs(a - b)))


# Denjoy-Wolff point
def _newton(G, seeds, n_iter=100, h=1e-7):
    z = np.array(seeds, dtype=complex)
    with np.errstate(all='ignore'):
        for _ in range(n_iter):
            g = np.asarray(G(z), dtype=complex)
            dg = (np.asarray(G(z + h), dtype=complex) - np.asarray(G(z - h), dtype=complex)) / (2 * h)
            step = np.where((dg != 0) & np.isfinite(dg) & np.isfinite(g), g / dg, 0)
            z = z - step
            if np.all(np.abs(step) < 1e-15):
                break
        g = np.abs(np.asarray(G(z), dtype=complex))
    return z, g

DWResult = collections.namedtuple('DWResult', ['point', 'boundary', 'status'])

def denjoy_wolff(G, cfg=None, n_iter=200):
    """Locate the Denjoy-Wolff point of the semiflow of G.
    Newton on G(z)=0 from 0 and 8 points on |z|=1/2 (an interior zero wins);
    else iterate phi_1 from 0, reporting a boundary point once |z| >= 1-1e-6.
    Returns DWResult(point, boundary, status); status is 'interior',
    'boundary' or 'indeterminate'.
    """
    seeds = [0] + list(0.5 * np.exp(2j * np.pi * np.arange(8) / 8))
    z,g = _newton(G, seeds)
    ok = np.isfinite(z) & np.isfinite(g) & (g < 1e-10)
    interior = ok & (np.abs(z) < DW_BOUNDARY)
    if interior.any():
        i = int(np.argmin(np.where(interior, np.abs(z), np.inf)))
        return DWResult(complex(z[i]), False, 'interior')
    # boundary candidates from Newton
    cand = z[ok & (np.abs(z) < 1 + 1e-6)]
    # orbit of phi_1
    w = 0j
    orbit = [w]
    try:
        for _ in range(n_iter):
            w_next = flow(G, w, 1.0, cfg)
            orbit.append(w_next)
            if abs(w_next) >= DW_BOUNDARY:
                return DWResult(w_next / abs(w_next), True, 'boundary')
            if abs(w_next - w) < 1e-13:
                return DWResult(complex(w_next), False, 'interior')
            w = w_next
    except FlowError as e:
        logging.warning('Denjoy-Wolff orbit stopped: {}'.format(e))
    if len(cand) > 0 and len(orbit) > 10:
        last = np.array(orbit[-10:])
        for zeta in cand:
            d = np.abs(last - zeta)
            if np.all(np.diff(d) < 0):
                zeta = zeta / abs(zeta) if abs(zeta) >= DW_BOUNDARY else zeta
                return DWResult(complex(zeta), abs(zeta) >= DW_BOUNDARY, 'boundary')
    logging.warning('Denjoy-Wolff point indeterminate')
    return DWResult(complex(orbit[-1]), False, 'indeterminate')


SupNorm = collections.namedtuple('SupNorm', ['value', 'failures'])

def sup_norm_flow(G, t, M=512, cfg=None, radius=NEAR_BOUNDARY):
    """max |phi_t| over M points on |z| = 1-1e-6 (maximum principle).
    Points whose integration fails are excluded and counted.
    """
    if t <= 0:
        raise ValueError('sup_norm_flow requires t > 0: {}'.format(t))
    _,z = Utils.circle(M, radius)
    try:
        w = flow(G, z, t, cfg)
        return SupNorm(float(np.abs(w).max()), 0)
    except FlowError:
        logging.info('Shared-step integration failed; integrating points separately')

    def one(z0):
        try:
            return abs(flow(G, z0, t, cfg))
        except FlowError:
            return np.nan
    with ThreadPoolExecutor(max_workers=Utils.n_threads()) as pool:
        vals = np.array(list(pool.map(one, z)))
    failures = int(np.isnan(vals).sum())
    if failures:
        logging.warning('sup_norm_flow: {} of {} points failed'.format(failures, M))
    if failures == M:
        raise FlowError('Flow failed at every sample point (t = {})'.format(t))
    return SupNorm(float(np.nanmax(vals)), failures)


# semiflow model
class SemiflowModel(object):
    """phi_t(z) = h_inv(exp(-c t) h(z)) with h(0) = 0 and Re c >= 0.
    h_inv may be None; model_flow then is unavailable but model_residual works.
    """
    def __init__(self, h, c, h_inv=None, check_grid=None, tol=1e-9):
        self.h = h
        self.h_inv = h_inv
        self.c = complex(c)
        if self.c.real < 0:
            raise ValueError('Model constant must have Re c >= 0: {}'.format(c))
        if abs(self.h(0j)) > tol:
            raise ValueError('Model map must satisfy h(0) = 0')
        if h_inv is not None:
            if check_grid is None:
                check_grid = Utils.disc_grid(5, 8, 0.5)
            d = self.round_trip_defect(check_grid)
            if not d <= tol * 1e3:
                msg = 'h_inv(h(z)) != z on the check grid (defect {:.3g})'
                raise ValueError(msg.format(d))

    def round_trip_defect(self, grid):
        grid = np.asarray(grid, dtype=complex)
        return float(np.max(np.abs(self.h_inv(self.h(grid)) - grid)))

    def to_dict(self):
        return {'h' : str(self.h), 'h_inv' : None if self.h_inv is None else str(self.h_inv),
                'c' : self.c}

def model_flow(m, z, t, tol=1e-9):
    """h_inv(exp(-c t) h(z)); t may be complex
    """
    if m.h_inv is None:
        raise ValueError('Model has no inverse map')
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    target = np.exp(-m.c * complex(t)) * m.h(z)
    w = np.asarray(m.h_inv(target), dtype=complex)
    back = np.asarray(m.h(w), dtype=complex)
    defect = np.abs(back - target) / np.maximum(1.0, np.abs(target))
    bad = ~np.isfinite(w) | ~(defect <= tol) | ~(np.abs(w) < 1)
    if bad.any():
        msg = 'Model flow left the model domain at z = {} (t = {})'
        raise ValueError(msg.format(z[bad][0], t))
    return complex(w[0]) if scalar else w

def model_defect(G, m, grid, t, cfg=None):
    """max |flow(G,z,t) - model_flow(m,z,t)| over grid
    """
    grid = np.asarray(grid, dtype=complex)
    return float(np.max(np.abs(flow(G, grid, t, cfg) - model_flow(m, grid, t))))

def model_residual(m, G, grid, t, cfg=None):
    """max |h(phi_t(z)) - exp(-c t) h(z)| over grid (no h_inv needed)
    """
    grid = np.asarray(grid, dtype=complex)
    w = flow(G, grid, t, cfg)
    return float(np.max(np.abs(m.h(w) - np.exp(-m.c * t) * m.h(grid))))

def model_bounded(m, M=4096, radius=NEAR_BOUNDARY, cap=1e6):
    """(sup |h| near the circle, bounded?) for the Omega-boundedness criterion
    """
    _,z = Utils.circle(M, radius)
    v = np.abs(np.asarray(m.h(z), dtype=complex))
    v = np.where(np.isfinite(v), v, np.inf)
    s = float(v.max())
    _,z2 = Utils.circle(M, 1 - 2 * (1 - radius))
    s2 = float(np.nanmax(np.abs(np.asarray(m.h(z2), dtype=complex))))
    bounded = np.isfinite(s) and s < cap and s < 1.5 * s2
    return s, bool(bounded and m.c.real > 0)

def conjugate_to_origin(G, alpha):
    """Generator of b_a o phi_t o b_a with b_a(z) = (a - z)/(1 - conj(a) z):
    G(b_a(z)) (1 - conj(a) z)^2 / (|a|^2 - 1), as an expression tree
    """
    alpha = complex(alpha)
    if abs(alpha) >= 1:
        raise ValueError('Conjugation point must lie in the open disc: {}'.format(alpha))
    z = Expr.var()
    one_minus = Expr.binary('-', Expr.const(1), Expr.binary('*', Expr.const(alpha.conjugate()), z))
    b = Expr.binary('/', Expr.binary('-', Expr.const(alpha), z), one_minus)
    factor = Expr.binary('/', Expr.binary('^', one_minus, Expr.const(2)),
                         Expr.const(abs(alpha) ** 2 - 1))
    return Expr.binary('*', Expr.substitute(G, b), factor)


# analysis
class FlowAnalysis(object):
    """dw_point, sup_norm_curve (t -> ||phi_t||_inf), semiflow_defect
    """
    def __init__(self, dw, sup_norm_curve, semiflow_defect, failures=0):
        self.dw = dw
        self.sup_norm_curve = sup_norm_curve
        self.semiflow_defect = semiflow_defect
        self.failures = failures

    @property
    def dw_point(self):
        return self.dw.point

    def to_dict(self):
        return {'dw_point' : self.dw.point,
                'dw_boundary' : self.dw.boundary,
                'dw_status' : self.dw.status,
                'sup_norm_curve' : [{'t' : t, 'sup' : v} for t,v in self.sup_norm_curve],
                'sup_norm_failures' : self.failures,
                'semiflow_defect' : self.semiflow_defect}

def analyse_flow(G, t_values, grid=None, cfg=None, M=512):
    """Denjoy-Wolff point, sup-norm curve and semiflow defect for G
    """
    if grid is None:
        grid = Utils.disc_grid()
    dw = denjoy_wolff(G, cfg)
    curve = []
    failures = 0
    for t in sorted(t_values):
        if t <= 0:
            curve.append((t, 1.0))
            continue
        s = sup_norm_flow(G, t, M, cfg)
        curve.append((t, s.value))
        failures += s.failures
    defect = 0.0
    for s in t_values:
        for t in t_values:
            defect = max(defect, semiflow_defect(G, grid, s, t, cfg))
    return FlowAnalysis(dw, curve, defect, failures)


# CLI
def get_desc():
    desc = 'Integrate the semiflow of a disc generator'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    Integrate w' = G(w) on a polar grid of starting points in the disc and
    write the trajectories as CSV plot data, plus a JSON report with the
    Denjoy-Wolff point, the sup-norm curve t -> ||phi_t||_inf and the
    semiflow defect |phi_(s+t) - phi_s o phi_t|.

    If the example has a closed-form flow (or a semiflow model), the
    deviation of the ODE flow from it is reported too.
    """
    if subparsers:
        parser = subparsers.add_parser('flow', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    # args
    Utils.add_symbol_args(parser)
    fl = parser.add_argument_group('Flow')
    fl.add_argument('--t', type=str, default='0.1,0.5,1',
                    help='Flow times ("0.1,0.5" or "start:stop:n") (default: %(default)s)')
    fl.add_argument('--grid', type=int, default=10,
                    help='Grid size n (n radii x n angles, |z| <= 0.9) (default: %(default)s)')
    fl.add_argument('--sup-samples', type=int, default=512,
                    help='Samples for ||phi_t||_inf (default: %(default)s)')
    add_flow_args(parser)

    # parse & return
    if test_args:
        args = parser.parse_args(Utils.join_expr_args(test_args))
        return args
    return parser

def add_flow_args(parser):
    ode = parser.add_argument_group('Integrator')
    ode.add_argument('--abs-tol', type=float, default=1e-10,
                     help='Absolute tolerance (default: %(default)s)')
    ode.add_argument('--rel-tol', type=float, default=1e-10,
                     help='Relative tolerance (default: %(default)s)')
    ode.add_argument('--max-step', type=float, default=0.1,
                     help='Max time step (default: %(default)s)')
    return parser

def flow_config(args):
    return FlowConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol, max_step=args.max_step)

def check_args(args):
    """Checking user input
    """
    Utils.apply_job(args)
    args.t = Utils.make_values(args.t)
    assert args.t, '--t must give at least one value'
    assert min(args.t) >= 0, '--t values must be >= 0'
    assert args.grid > 0, '--grid must be > 0'
    assert args.sup_samples > 0, '--sup-samples must be > 0'

def trajectories(G, grid, t_values, cfg=None, case=None):
    """Flow of every grid point at every t (long-format table); includes the
    deviation from the closed-form flow or model when the example has one
    """
    rows = []
    for t in t_values:
        w = flow(G, grid, t, cfg)
        exact = None
        if case is not None and case.closed_form_flow is not None:
            exact = case.closed_form_flow(grid, t=t)
        elif case is not None and case.model is not None and case.model.h_inv is not None:
            exact = model_flow(case.model, grid, t)
        for i in range(len(grid)):
            row = {'z0_re' : grid[i].real, 'z0_im' : grid[i].imag, 't' : t,
                   're' : w[i].real, 'im' : w[i].imag}
            if exact is not None:
                row['defect'] = abs(w[i] - exact[i])
            rows.append(row)
    return pd.DataFrame(rows)

def main(args=None):
    # package
    from pySemiflowLab import Report
    # Input
    if args is None:
        args = parse_args()
    check_args(args)
    G,case,kind = Utils.resolve_symbol(args)
    if kind != 'G':
        raise ValueError('The flow command needs a generator, not a static map')
    cfg = flow_config(args)
    grid = Utils.disc_grid(args.grid, args.grid)

    rep = Report.report(args)
    rep.add('flow_analysis', analyse_flow, G, args.t, grid, cfg, args.sup_samples)
    df = rep.run('trajectories', trajectories, G, grid, args.t, cfg, case)
    if case is not None and case.model is not None:
        times = [t for t in args.t if t > 0]
        rep.add('model_residual', lambda: max(model_residual(case.model, G, grid, t, cfg)
                                              for t in times) if times else 0.0)

    # writing
    files = []
    json_file = args.prefix + '.json'
    if df is not None:
        if 'defect' in df.columns:
            rep.set('closed_form_defect', float(df['defect'].max()))
        traj_file = Utils.table_atomic(df, args.prefix + '_trajectory.csv')
        files.append(traj_file)
    rep.write(json_file)
    files.insert(0, json_file)

    # status
    for f in files:
        Utils.file_written(f)
    return tuple(files)


# main
if __name__ == '__main__':
    pass
