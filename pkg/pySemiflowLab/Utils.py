from __future__ import print_function

# import
import os
import sys
import json
import logging
import tempfile
import numpy as np

# functions
def file_written(file_name):
    """Status on writing file
    file_name: string
    """
    print('File written: {}'.format(file_name), file=sys.stderr)

def make_values(x):
    """Making a list of floats from a string of comma-delimited numbers
    and/or "start:stop:n" linspace blocks.
    If x = None or 'none', None returned
    x : string, number or list
    Example: 0.1,0.5,1
    Example: 0:1:5  => [0, 0.25, 0.5, 0.75, 1]
    """
    if x is None:
        return None
    if isinstance(x, (list, tuple)):
        return [float(y) for y in x]
    if isinstance(x, (int, float)):
        return [float(x)]
    x = str(x).strip()
    if x.lower() == 'none':
        return None
    z = []
    for i in x.split(','):
        j = i.split(':')
        if len(j) == 3:
            n = int(j[2])
            if n < 1:
                msg = 'Number of values must be >= 1: "{}"'
                raise ValueError(msg.format(i))
            z += [float(y) for y in np.linspace(float(j[0]), float(j[1]), n)]
        elif len(j) == 1:
            z.append(float(j[0]))
        else:
            msg = 'Cannot parse value range: "{}"'
            raise ValueError(msg.format(i))
    return z

def make_points(x):
    """Parsing complex points from a comma-delimited string (Python complex
    syntax, e.g. "1,-1,1j")
    """
    if x is None:
        return []
    if isinstance(x, (list, tuple)):
        return [complex(y) for y in x]
    try:
        return [complex(y.strip().replace(' ', '')) for y in str(x).split(',') if y.strip()]
    except ValueError:
        msg = 'Cannot parse complex points: "{}"'
        raise ValueError(msg.format(x))

def n_threads(default=1):
    """Max number of worker threads (env: SEMIFLOW_LAB_THREADS)
    """
    x = os.environ.get('SEMIFLOW_LAB_THREADS')
    if x is None:
        return default
    try:
        n = int(x)
    except ValueError:
        logging.warning('Ignoring SEMIFLOW_LAB_THREADS="{}"'.format(x))
        return default
    return max(1, n)

def write_atomic(file_name, writer, mode='w'):
    """Write a file via a temp file in the same directory + rename.
    writer : function taking an open file handle
    """
    d = os.path.dirname(os.path.abspath(file_name))
    fd,tmp = tempfile.mkstemp(prefix='.tmp_', dir=d)
    try:
        with os.fdopen(fd, mode) as outF:
            writer(outF)
        os.replace(tmp, file_name)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    return file_name

def table_atomic(df, file_name):
    """Write a pandas DataFrame as CSV (with header), atomically
    """
    return write_atomic(file_name, lambda outF: df.to_csv(outF, index=False))

def disc_grid(n_radial=10, n_angular=10, r_max=0.9):
    """Polar grid of n_radial x n_angular points in |z| <= r_max
    """
    r = np.linspace(r_max / n_radial, r_max, n_radial)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    return (r[:,None] * np.exp(1j * theta[None,:])).ravel()

def halfplane_grid(nx=32, ny=32, x_min=1e-2, x_max=10.0, y_max=5.0):
    """Logarithmic-in-x grid of the right half-plane
    """
    x = np.logspace(np.log10(x_min), np.log10(x_max), nx)
    y = np.linspace(-y_max, y_max, ny)
    return (x[:,None] + 1j * y[None,:]).ravel()

def circle(M, r=1.0):
    """M equispaced points on |z| = r (first point on the positive real axis)
    """
    theta = 2 * np.pi * np.arange(M) / M
    return theta, r * np.exp(1j * theta)

def pow2(n):
    """Smallest power of two >= n
    """
    return int(2 ** np.ceil(np.log2(max(n, 1))))

# arg helpers
EXPR_OPTIONS = ('--G', '--phi', '--xi')

def join_expr_args(argv, options=EXPR_OPTIONS):
    """Joining expression options with their value: ['--G', '-z'] -> ['--G=-z'].
    Expression values may start with '-', which argparse reads as an option.
    """
    argv = list(argv)
    joined = []
    i = 0
    while i < len(argv):
        x = argv[i]
        if x in options and i + 1 < len(argv):
            joined.append('{}={}'.format(x, argv[i + 1]))
            i += 2
            continue
        joined.append(x)
        i += 1
    return joined

def add_symbol_args(parser, phi=False):
    """Symbol & job-file args shared by the subcommands
    """
    groupIO = parser.add_argument_group('I/O')
    groupIO.add_argument('--prefix', type=str, default='semiflow',
                         help='Output file name prefix (default: %(default)s)')
    groupIO.add_argument('--job', type=str, default=None,
                         help='JSON job file; keys are long option names and override flags')
    sym = parser.add_argument_group('Symbol (exactly one)')
    sym.add_argument('--G', type=str, default=None,
                     help='Generator expression in z, e.g. "1 - z^2"')
    sym.add_argument('--example', type=str, default=None,
                     help='Name of a built-in example (see "list-examples")')
    if phi:
        sym.add_argument('--phi', type=str, default=None,
                         help='Static self-map expression in z (single composition operator)')
    return parser

def apply_job(args):
    """Overriding args with the values in the --job JSON file (in-place edit)
    """
    if getattr(args, 'job', None) is None:
        return args
    with open(args.job) as inF:
        job = json.load(inF)
    if not isinstance(job, dict):
        raise ValueError('Job file must contain a JSON object: {}'.format(args.job))
    for k,v in job.items():
        attr = k.lstrip('-').replace('-', '_')
        if attr in ('job', 'func') or not hasattr(args, attr):
            msg = 'Unknown job file key: "{}"'
            raise ValueError(msg.format(k))
        setattr(args, attr, v)
    return args

def resolve_symbol(args):
    """Returns (symbol expression, ExampleCase or None, kind); kind is 'G' or 'phi'
    """
    # package
    from pySemiflowLab import Expr
    from pySemiflowLab import Registry
    sources = [x for x in ('G', 'example', 'phi') if getattr(args, x, None) is not None]
    if len(sources) != 1:
        msg = 'Exactly one symbol source required (--G, --example{}); got: {}'
        extra = ', --phi' if hasattr(args, 'phi') else ''
        raise ValueError(msg.format(extra, ', '.join(sources) if sources else 'none'))
    if sources[0] == 'G':
        return Expr.parse(args.G), None, 'G'
    if sources[0] == 'phi':
        return Expr.parse(args.phi), None, 'phi'
    case = Registry.lookup(args.example)
    if case.G is None:
        return case.phi, case, 'phi'
    return case.G, case, 'G'


# main
if __name__ == '__main__':
    pass
