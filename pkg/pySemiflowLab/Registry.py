from __future__ import print_function
# import
## batteries
import os
import sys
import json
import argparse
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Utils
from pySemiflowLab import Expr
from pySemiflowLab import Semiflow

SPACES = ('disc', 'halfplane')


class catalogue(object):
    """Database of worked examples.
    Stored in JSON format (database/examples.json)
    """
    def __init__(self, database_file=None):
        if database_file is None:
            d = os.path.join(os.path.split(__file__)[0], 'database')
            database_file = os.path.join(d, 'examples.json')
        with open(database_file) as inF:
            self.examples = json.load(inF)

    def names(self):
        return list(self.examples.keys())

    def get_example(self, value):
        try:
            return self.examples[value]
        except KeyError:
            msg = 'Example not in database: "{}"'
            raise KeyError(msg.format(value))


class ExampleCase(object):
    """Worked example: generator G (or static map phi), optional closed-form
    flow in (z, t), optional semiflow model and the expected verdicts
    """
    def __init__(self, name, space, G=None, closed_form_flow=None, model=None,
                 phi=None, expected=None, description=''):
        if space not in SPACES:
            msg = 'Space not recognized for example "{}": {}'
            raise ValueError(msg.format(name, space))
        if G is None and phi is None:
            msg = 'Example "{}" needs a generator or a static map'
            raise ValueError(msg.format(name))
        self.name = name
        self.space = space
        self.G = G
        self.closed_form_flow = closed_form_flow
        self.model = model
        self.phi = phi
        self.expected = expected or {}
        self.description = description
        if closed_form_flow is not None:
            self._check_identity()

    def check_grid(self):
        if self.space == 'halfplane':
            return Utils.halfplane_grid(5, 5)
        return Utils.disc_grid(5, 8)

    def _check_identity(self, tol=1e-12):
        z = self.check_grid()
        d = np.max(np.abs(self.closed_form_flow(z, t=0.0) - z) / np.maximum(1.0, np.abs(z)))
        if not d <= tol:
            msg = 'Closed-form flow of "{}" is not the identity at t = 0 (defect {:.3g})'
            raise ValueError(msg.format(self.name, d))

    def flow_at(self, t):
        """phi_t as an evaluator from the closed form, or None
        """
        if self.closed_form_flow is None:
            return None
        f = self.closed_form_flow
        return lambda z: f(z, t=t)

    def to_dict(self):
        return {'name' : self.name, 'space' : self.space,
                'G' : None if self.G is None else str(self.G),
                'phi' : None if self.phi is None else str(self.phi),
                'closed_form_flow' : None if self.closed_form_flow is None else
                    str(self.closed_form_flow),
                'model' : None if self.model is None else self.model.to_dict(),
                'description' : self.description}


def _case(name, d):
    parse = Expr.parse
    model = None
    if d.get('model') is not None:
        m = d['model']
        h_inv = parse(m['h_inv']) if m.get('h_inv') else None
        model = Semiflow.SemiflowModel(parse(m['h']), m['c'], h_inv)
    return ExampleCase(name, d['space'],
                       G=parse(d['G']) if d.get('G') else None,
                       closed_form_flow=parse(d['flow'], params=('t',)) if d.get('flow') else None,
                       model=model,
                       phi=parse(d['phi']) if d.get('phi') else None,
                       expected=d.get('expected'),
                       description=d.get('description', ''))

_CACHE = {}

def builtin_examples():
    """All catalogue entries as ExampleCase objects (in file order)
    """
    if 'all' not in _CACHE:
        db = catalogue()
        _CACHE['all'] = [_case(k, db.get_example(k)) for k in db.names()]
    return list(_CACHE['all'])

def lookup(name):
    for case in builtin_examples():
        if case.name == name:
            return case
    msg = 'Example not in database: "{}"'
    raise KeyError(msg.format(name))

def table():
    rows = []
    for case in builtin_examples():
        rows.append({'name' : case.name, 'space' : case.space,
                     'symbol' : str(case.G if case.G is not None else case.phi),
                     'closed_form_flow' : case.closed_form_flow is not None,
                     'model' : case.model is not None,
                     'description' : case.description})
    return pd.DataFrame(rows, columns=['name', 'space', 'symbol', 'closed_form_flow',
                                       'model', 'description'])


# CLI
def get_desc():
    desc = 'List the built-in examples'
    return desc

def parse_args(test_args=None, subparsers=None):
    # desc
    desc = get_desc()
    epi = """DESCRIPTION:
    Print the example catalogue (tab-delimited) to STDOUT, or write it to
    a file with --output. Names are usable with --example.
    """
    if subparsers:
        parser = subparsers.add_parser('list-examples', description=desc, epilog=epi,
                                       formatter_class=argparse.RawTextHelpFormatter)
    else:
        parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                         formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument('--output', type=str, default=None,
                        help='Output file (default: STDOUT)')
    # parse & return
    if test_args is not None:
        args = parser.parse_args(test_args)
        return args
    return parser

def main(args=None):
    # Input
    if args is None:
        args = parse_args()
    df = table()
    if args.output is None:
        df.to_csv(sys.stdout, sep='\t', index=False)
        return ()
    Utils.write_atomic(args.output, lambda outF: df.to_csv(outF, sep='\t', index=False))
    Utils.file_written(args.output)
    return (args.output,)


# main
if __name__ == '__main__':
    pass
