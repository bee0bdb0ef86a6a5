from __future__ import print_function
# import
## batteries
import json
import time
import logging
import argparse
import collections
from concurrent.futures import ThreadPoolExecutor
## 3rd party
import numpy as np
import pandas as pd
## package
import pySemiflowLab
from pySemiflowLab import Utils
from pySemiflowLab import Expr
from pySemiflowLab import Registry
from pySemiflowLab import Classify
from pySemiflowLab import Semiflow
from pySemiflowLab import OpMatrix
from pySemiflowLab import HalfPlane

SCHEMA = 1
GRID_KEYS = ('M', 'N', 'grid', 'nx', 'ny', 'sup_samples', 'n_xi', 'block')


def to_jsonable(x):
    """Converting results to JSON-compatible values.
    complex -> {"re", "im"}; nan/inf -> {"nonfinite": "nan"|"inf"|"-inf"};
    numpy arrays/scalars, namedtuples and objects with to_dict() are unpacked.
    """
    if x is None or isinstance(x, (bool, np.bool_, str)):
        return bool(x) if isinstance(x, np.bool_) else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isfinite(x):
            return x
        return {'nonfinite' : 'nan' if np.isnan(x) else ('inf' if x > 0 else '-inf')}
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        if np.isnan(x.real) or np.isnan(x.imag):
            return {'nonfinite' : 'nan'}
        if np.isinf(x.real) or np.isinf(x.imag):
            # a signed inf only on the real axis
            if x.imag == 0:
                return to_jsonable(x.real)
            return {'nonfinite' : 'inf'}
        return {'re' : x.real, 'im' : x.imag}
    if isinstance(x, np.ndarray):
        return [to_jsonable(y) for y in x.tolist()]
    if isinstance(x, Expr.node):
        return str(x)
    if hasattr(x, 'to_dict') and not isinstance(x, (dict, pd.DataFrame)):
        return to_jsonable(x.to_dict())
    if isinstance(x, pd.DataFrame):
        return to_jsonable(x.to_dict(orient='records'))
    if hasattr(x, '_asdict'):
        return to_jsonable(x._asdict())
    if isinstance(x, dict):
        return collections.OrderedDict((str(k), to_jsonable(v)) for k,v in x.items())
    if isinstance(x, (list, tuple, set)):
        return [to_jsonable(y) for y in x]
    if callable(x):
        return '<function>'
    msg = 'Cannot serialize type: {}'
    raise TypeError(msg.format(type(x).__name__))


class report(object):
    """Collects per-operation results of one job.
    Exceptions raised by an operation are embedded in place of its result
    as {"error": <class>, "message": <text>}.
    """
    def __init__(self, args=None):
        self.job = collections.OrderedDict()
        if args is not None:
            for k,v in sorted(vars(args).items()):
                if k != 'func':
                    self.job[k] = v
        self.args = args
        self.results = collections.OrderedDict()
        self.errors = []
        self.timing = collections.OrderedDict()

    def _call(self, name, func, *args, **kwargs):
        start = time.time()
        try:
            return True, func(*args, **kwargs)
        except Exception as e:
            logging.warning('{} failed: {}: {}'.format(name, type(e).__name__, e))
            err = {'error' : type(e).__name__, 'message' : str(e)}
            self.results[name] = err
            self.errors.append(collections.OrderedDict([('operation', name)] + list(err.items())))
            return False, None
        finally:
            self.timing[name] = round(time.time() - start, 6)

    def add(self, name, func, *args, **kwargs):
        """Run func and store its result under name; returns the result (None on error)
        """
        ok,x = self._call(name, func, *args, **kwargs)
        if ok:
            self.results[name] = x
        return x

    def run(self, name, func, *args, **kwargs):
        """Like add, but only errors are stored
        """
        ok,x = self._call(name, func, *args, **kwargs)
        return x

    def set(self, name, value):
        self.results[name] = value

    def get(self, name, default=None):
        x = self.results.get(name, default)
        if isinstance(x, dict) and 'error' in x and 'message' in x:
            return default
        return x

    def merge(self, prefix, other):
        """Nesting another report's results (and errors) under prefix
        """
        self.results[prefix] = other.results
        for e in other.errors:
            e = collections.OrderedDict(e)
            e['operation'] = '{}/{}'.format(prefix, e['operation'])
            self.errors.append(e)
        for k,v in other.timing.items():
            self.timing['{}/{}'.format(prefix, k)] = v

    def has_errors(self):
        return len(self.errors) > 0

    def exit_code(self):
        return 1 if self.has_errors() else 0

    def provenance(self):
        d = collections.OrderedDict()
        d['version'] = pySemiflowLab.__version__
        d['numpy'] = np.__version__
        d['tolerances'] = collections.OrderedDict(
            (k, v) for k,v in self.job.items() if 'tol' in k)
        d['grid_sizes'] = collections.OrderedDict(
            (k, v) for k,v in self.job.items() if k in GRID_KEYS)
        return d

    def to_dict(self):
        d = collections.OrderedDict()
        d['schema'] = SCHEMA
        d['job'] = self.job
        d['results'] = self.results
        d['provenance'] = self.provenance()
        d['errors'] = self.errors
        d['timing'] = self.timing
        return to_jsonable(d)

    def write(self, file_name):
        """Writing the report (JSON); the job's exit code is set on args
        """
        d = self.to_dict()
        Utils.write_atomic(file_name, lambda outF: json.dump(d, outF, indent=2,
                                                             sort_keys=True, allow_nan=False))
        if self.args is not None:
            self.args.exit_code = self.exit_code()
        return file_name


# report-all
def _close(a, b, tol):
    if a is None or b is None:
        return a is None and b is None
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))

def compare(expected, observed, tol=1e-3):
    """Per-key comparison of expected and observed outcomes.
    Returns rows: key, expected, observed, match (None if not observed)
    """
    rows = []
    for k,v in expected.items():
        if k not in observed:
            rows.append({'key' : k, 'expected' : v, 'observed' : None, 'match' : None})
            continue
        o = observed[k]
        if isinstance(v, bool) or isinstance(o, bool) or isinstance(v, str):
            match = v == o
        else:
            match = _close(v, o, tol)
        rows.append({'key' : k, 'expected' : v, 'observed' : o, 'match' : bool(match)})
    return rows

def closed_form_defect(case, t=0.5, cfg=None):
    """max |ODE flow - closed-form flow| on the check grid of the example
    """
    z = case.check_grid()
    domain = 'halfplane' if case.space == 'halfplane' else 'disc'
    w = Semiflow.integrate(case.G, z, t, cfg, domain=domain)
    return float(np.max(np.abs(w - case.closed_form_flow(z, t=t))))

def _observe_disc(case, M, tol, rep):
    obs = collections.OrderedDict()
    cr = rep.add('classification', Classify.classification_report, case.G, M,
                 Classify.NEAR_BOUNDARY, tol)
    if cr is not None:
        obs['generates'] = cr.generates_semigroup
        obs['is_group'] = cr.is_group
        obs['theta_zero'] = cr.theta_max == 0
        obs['imm_compact'] = cr.imm_compact_sufficient
        for c in cr.compact_criterion:
            if abs(c.xi - 1) < 1e-12:
                obs['compact_criterion_at_1'] = c.verdict
        if cr.dw is not None:
            obs['dw_point'] = [cr.dw.point.real, cr.dw.point.imag]
            obs['dw_boundary'] = cr.dw.boundary
    if case.closed_form_flow is not None:
        rep.add('closed_form_defect', closed_form_defect, case)
    phi = OpMatrix.symbol_map(case.G, case, 1.0, None)
    tc = rep.add('trace_class_flag', OpMatrix.trace_class_flag, phi)
    if tc is not None:
        obs['trace_class'] = bool(tc)
    return obs

def _observe_static(case, rep):
    obs = collections.OrderedDict()
    hs = rep.add('hs_integral_hardy', OpMatrix.hs_integral_hardy, case.phi)
    if hs is not None:
        obs['hilbert_schmidt'] = not hs.diverges
    hs2 = rep.add('hs_integral_hardy_iterate', OpMatrix.hs_integral_hardy,
                  OpMatrix.iterate(case.phi, 2))
    if hs2 is not None:
        obs['hilbert_schmidt_iterate'] = not hs2.diverges
    return obs

def _observe_halfplane(case, tol, rep):
    obs = collections.OrderedDict()
    hp = rep.add('halfplane', HalfPlane.halfplane_report, case.G, (0.5, 1.0), None, tol)
    if hp is not None:
        obs['bp_satisfied'] = hp.bp_violation <= tol
        obs['delta'] = hp.delta
        obs['group'] = None if hp.group_params is None else list(hp.group_params)
    if case.closed_form_flow is not None:
        rep.add('closed_form_defect', closed_form_defect, case)
    return obs

def run_example(case, M=4096, tol=1e-9):
    """Runs the pipelines relevant to one catalogue example.
    Returns (report, comparison rows)
    """
    rep = report()
    if case.space == 'halfplane':
        obs = _observe_halfplane(case, tol, rep)
    elif case.G is None:
        obs = _observe_static(case, rep)
    else:
        obs = _observe_disc(case, M, tol, rep)
    rows = compare(case.expected, obs)
    rep.set('observed', obs)
    rep.set('comparison', rows)
    return rep, rows

def report_all(names=None, M=4096, tol=1e-9, threads=None):
    """All (or the named) catalogue examples, in catalogue order.
    Returns (report, summary table)
    """
    cases = Registry.builtin_examples()
    if names is not None:
        cases = [Registry.lookup(x) for x in names]
    if threads is None:
        threads = Utils.n_threads()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        out = list(pool.map(lambda c: run_example(c, M, tol), cases))
    rep = report()
    rows = []
    for case,(r,cmp) in zip(cases, out):
        rep.merge(case.name, r)
        for x in cmp:
            x = dict(x, example=case.name)
            if x['match'] is False:
                logging.warning('{}: {} expected {} observed {}'.format(
                    case.name, x['key'], x['expected'], x['observed']))
            rows.append(x)
    cols = ['example', 'key', 'expected', 'observed', 'match']
    return rep, pd.DataFrame(rows, columns=cols)


# CLI
def get_desc():
    desc = 'Run every built-in example and compare with the expected verdicts'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    Disc generators are classified (generation, group, sector angle,
    immediate compactness, growth criterion at 1, Denjoy-Wolff point) and
    phi_1 is tested for ||phi_1||_inf < 1. Static maps get the Hardy-space
    Hilbert-Schmidt integral of phi and phi o phi. Half-plane generators get
    the Berkson-Porta check, delta and the group test.

    Writes one JSON report and a CSV summary (example, key, expected,
    observed, match). SEMIFLOW_LAB_THREADS sets the number of examples run
    in parallel.
    """
    if subparsers:
        parser = subparsers.add_parser('report-all', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    # args
    groupIO = parser.add_argument_group('I/O')
    groupIO.add_argument('--prefix', type=str, default='semiflow_all',
                         help='Output file name prefix (default: %(default)s)')
    groupIO.add_argument('--job', type=str, default=None,
                         help='JSON job file; keys are long option names and override flags')
    run = parser.add_argument_group('Run')
    run.add_argument('--examples', type=str, default=None,
                     help='Comma-delimited example names (default: all)')
    run.add_argument('--M', type=int, default=4096,
                     help='Boundary samples (default: %(default)s)')
    run.add_argument('--tol', type=float, default=1e-9,
                     help='Sign tolerance (default: %(default)s)')
    run.add_argument('--strict', action='store_true', default=False,
                     help='Nonzero exit code on any mismatch with the expected verdicts')

    # parse & return
    if test_args is not None:
        args = parser.parse_args(test_args)
        return args
    return parser

def check_args(args):
    """Checking user input
    """
    Utils.apply_job(args)
    if isinstance(args.examples, str):
        args.examples = [x.strip() for x in args.examples.split(',') if x.strip()]
    assert args.M > 0, '--M must be > 0'
    assert args.tol >= 0, '--tol must be >= 0'

def main(args=None):
    # Input
    if args is None:
        args = parse_args()
    check_args(args)

    rep,summary = report_all(args.examples, args.M, args.tol)
    top = report(args)
    for k,v in rep.results.items():
        top.set(k, v)
    top.errors = rep.errors
    top.timing = rep.timing
    n_mismatch = int(sum(1 for x in summary['match'] if x is False))
    top.set('mismatches', n_mismatch)

    # writing
    json_file = top.write(args.prefix + '.json')
    csv_file = Utils.table_atomic(summary, args.prefix + '_summary.csv')
    if args.strict and n_mismatch > 0:
        args.exit_code = 1

    # status
    Utils.file_written(json_file)
    Utils.file_written(csv_file)
    return json_file, csv_file


# main
if __name__ == '__main__':
    pass
