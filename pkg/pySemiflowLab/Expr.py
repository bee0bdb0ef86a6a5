from __future__ import print_function
# import
## batteries
import re
import collections
## 3rd party
import numpy as np


# errors
class ExprSyntaxError(ValueError):
    """Malformed expression; `position` is the 0-based character offset
    """
    def __init__(self, msg, position):
        self.position = position
        super(ExprSyntaxError, self).__init__('{} (at position {})'.format(msg, position))

class UnknownIdentifier(KeyError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        msg = 'Unknown identifier: "{}"'.format(name)
        if position is not None:
            msg += ' (at position {})'.format(position)
        super(UnknownIdentifier, self).__init__(msg)

class SingularityError(ZeroDivisionError):
    """Evaluation hit a pole or branch point (x/0, log(0), 0^-n)
    """
    pass

class EvalOverflow(OverflowError):
    pass


# nodes
FUNCTIONS = {
    'exp' : np.exp,
    'log' : np.log,
    'sqrt' : np.sqrt,
    'sin' : np.sin,
    'cos' : np.cos,
    'tanh' : np.tanh
}
BINARY_OPS = ('+', '-', '*', '/', '^')


class node(collections.namedtuple('node', ['kind', 'value', 'children'])):
    """Immutable expression tree node.
    kind : 'const' | 'var' | 'param' | 'neg' | 'binop' | 'func'
    value : complex constant, operator symbol, function or parameter name
    children : tuple of child nodes
    Equality is structural (tuple equality).
    Calling a node evaluates it; singular points become NaN.
    """
    __slots__ = ()

    def __call__(self, z, **env):
        return evaluate(self, z, env, strict=False)

    def __str__(self):
        return to_string(self)

    def params(self):
        """Names of free parameters in the tree
        """
        if self.kind == 'param':
            return set([self.value])
        x = set()
        for c in self.children:
            x |= c.params()
        return x


def const(value):
    return node('const', complex(value), ())

def var():
    return node('var', 'z', ())

def param(name):
    return node('param', name, ())

def neg(child):
    return node('neg', '-', (child,))

def binary(op, left, right):
    if op not in BINARY_OPS:
        raise ValueError('Unsupported operator: "{}"'.format(op))
    return node('binop', op, (left, right))

def func(name, arg):
    if name not in FUNCTIONS:
        raise UnknownIdentifier(name)
    return node('func', name, (arg,))


# printing
def _fmt_const(v):
    if v.imag == 0:
        s = repr(float(v.real))
        return s if v.real >= 0 else '(' + s + ')'
    if v.real == 0 and v.imag > 0:
        return repr(float(v.imag)) + 'i'
    return '({} + {}i)'.format(_fmt_const(complex(v.real)), repr(float(v.imag)))

def to_string(e):
    """Fully parenthesized text form; `parse(to_string(e)) == e` for parsed trees
    """
    if e.kind == 'const':
        return _fmt_const(e.value)
    if e.kind in ('var', 'param'):
        return e.value
    if e.kind == 'neg':
        return '(-' + to_string(e.children[0]) + ')'
    if e.kind == 'binop':
        l,r = e.children
        return '({} {} {})'.format(to_string(l), e.value, to_string(r))
    if e.kind == 'func':
        return '{}({})'.format(e.value, to_string(e.children[0]))
    raise ValueError('Unknown node kind: {}'.format(e.kind))


# tokens (Pratt parser)
class _token(object):
    lbp = 0
    def __init__(self, value=None, pos=0):
        self.value = value
        self.pos = pos
    def nud(self, p):
        raise ExprSyntaxError('Unexpected token "{}"'.format(self.value), self.pos)
    def led(self, p, left):
        raise ExprSyntaxError('Unexpected token "{}"'.format(self.value), self.pos)

class _number(_token):
    def nud(self, p):
        return const(self.value)

class _name(_token):
    def nud(self, p):
        name = self.value
        if name in FUNCTIONS:
            p.advance('(')
            arg = p.expression()
            p.advance(')')
            return func(name, arg)
        if name == 'z':
            return var()
        if name == 'i':
            return const(1j)
        if name == 'pi':
            return const(np.pi)
        if name in p.params:
            return param(name)
        raise UnknownIdentifier(name, self.pos)

class _add(_token):
    lbp = 10
    def nud(self, p):
        return p.expression(25)
    def led(self, p, left):
        return binary('+', left, p.expression(self.lbp))

class _sub(_token):
    lbp = 10
    def nud(self, p):
        return neg(p.expression(25))
    def led(self, p, left):
        return binary('-', left, p.expression(self.lbp))

class _mul(_token):
    lbp = 20
    def led(self, p, left):
        return binary('*', left, p.expression(self.lbp))

class _div(_token):
    lbp = 20
    def led(self, p, left):
        return binary('/', left, p.expression(self.lbp))

class _pow(_token):
    lbp = 30
    def led(self, p, left):
        # right associative
        return binary('^', left, p.expression(self.lbp - 1))

class _lparen(_token):
    def nud(self, p):
        e = p.expression()
        p.advance(')')
        return e

class _rparen(_token):
    pass

class _end(_token):
    def nud(self, p):
        raise ExprSyntaxError('Unexpected end of expression', self.pos)


_OPERATORS = {'+' : _add, '-' : _sub, '*' : _mul, '/' : _div, '^' : _pow,
              '(' : _lparen, ')' : _rparen}
_token_pat = re.compile(r'\s*(?:((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(i(?![A-Za-z0-9_]))?'
                        r'|([A-Za-z_][A-Za-z0-9_]*)|(\S))')


def tokenize(src):
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _token_pat.match(src, pos)
        if m is None:
            break
        number, imag, name, op = m.groups()
        if number is not None:
            start = m.start(1)
            x = float(number)
            if not np.isfinite(x):
                msg = 'Numeric literal out of range: "{}"'
                raise ExprSyntaxError(msg.format(number), start)
            yield _number(complex(0, x) if imag else x, start)
        elif name is not None:
            yield _name(name, m.start(3))
        else:
            start = m.start(4)
            try:
                yield _OPERATORS[op](op, start)
            except KeyError:
                raise ExprSyntaxError('Unknown character "{}"'.format(op), start)
        pos = m.end()
    yield _end(None, len(src))


class _parser(object):
    def __init__(self, src, params=()):
        self.src = src
        self.params = set(params)
        self.tokens = tokenize(src)
        self.token = next(self.tokens)

    def next(self):
        t = self.token
        self.token = next(self.tokens)
        return t

    def advance(self, value):
        if self.token.value != value:
            msg = 'Expected "{}" but found "{}"'
            found = 'end of expression' if isinstance(self.token, _end) else self.token.value
            raise ExprSyntaxError(msg.format(value, found), self.token.pos)
        self.next()

    def expression(self, rbp=0):
        t = self.next()
        left = t.nud(self)
        while rbp < self.token.lbp:
            t = self.next()
            left = t.led(self, left)
        return left


def parse(src, params=()):
    """Parse an expression in the variable z.
    src : expression text, e.g. "(1-z)*log(1-z)"
    params : extra identifiers (e.g. 't') left free until evaluation
    """
    if not isinstance(src, str) or src.strip() == '':
        raise ExprSyntaxError('Empty expression', 0)
    p = _parser(src, params)
    e = p.expression()
    if not isinstance(p.token, _end):
        msg = 'Unexpected token "{}"'
        raise ExprSyntaxError(msg.format(p.token.value), p.token.pos)
    return e


# evaluation
def _integer_exponent(e):
    if e.kind != 'const' or e.value.imag != 0:
        return None
    x = e.value.real
    if np.isfinite(x) and x == int(x) and abs(x) < 100:
        return int(x)
    return None

def _eval(e, z, env):
    """Returns (values, singular mask)
    """
    if e.kind == 'const':
        return np.full(z.shape, e.value, dtype=complex), np.zeros(z.shape, dtype=bool)
    if e.kind == 'var':
        return z, np.zeros(z.shape, dtype=bool)
    if e.kind == 'param':
        try:
            v = env[e.value]
        except KeyError:
            raise UnknownIdentifier(e.value)
        v = np.broadcast_to(np.asarray(v, dtype=complex), z.shape)
        return v, np.zeros(z.shape, dtype=bool)
    if e.kind == 'neg':
        v,s = _eval(e.children[0], z, env)
        return -v, s
    if e.kind == 'func':
        v,s = _eval(e.children[0], z, env)
        if e.value == 'log':
            s = s | (v == 0)
        return FUNCTIONS[e.value](v), s
    # binary
    l,sl = _eval(e.children[0], z, env)
    n = _integer_exponent(e.children[1]) if e.value == '^' else None
    if n is not None:
        if n < 0:
            sl = sl | (l == 0)
        return np.power(l, n), sl
    r,sr = _eval(e.children[1], z, env)
    s = sl | sr
    if e.value == '+':
        return l + r, s
    if e.value == '-':
        return l - r, s
    if e.value == '*':
        return l * r, s
    if e.value == '/':
        return l / r, s | (r == 0)
    # general complex power, principal branch
    zero = (l == 0)
    out = np.exp(r * np.log(np.where(zero, 1, l)))
    out = np.where(zero & (r.real > 0), 0, out)
    out = np.where(zero & (r == 0), 1, out)
    return out, s | (zero & (r.real <= 0) & (r != 0))


def evaluate(e, z, env=None, strict=True):
    """Evaluate tree `e` at z (complex scalar or array) with principal branches.
    env : values for free parameters, e.g. {'t' : 0.5}
    strict : raise SingularityError/EvalOverflow instead of returning NaN
    """
    if env is None:
        env = {}
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    with np.errstate(all='ignore'):
        v,s = _eval(e, z, env)
        v = np.array(v, dtype=complex)
    if strict:
        if s.any():
            msg = 'Singularity of "{}" at z = {}'
            raise SingularityError(msg.format(to_string(e), z[s][0]))
        bad = ~np.isfinite(v)
        if bad.any():
            msg = 'Overflow evaluating "{}" at z = {}'
            raise EvalOverflow(msg.format(to_string(e), z[bad][0]))
    else:
        v[s] = complex(np.nan, np.nan)
    if scalar:
        return complex(v[0])
    return v


def substitute(e, inner):
    """Replace every z in `e` by the tree `inner` (composition e∘inner)
    """
    if e.kind == 'var':
        return inner
    if not e.children:
        return e
    return node(e.kind, e.value, tuple(substitute(c, inner) for c in e.children))


def coefficients(e, degree):
    """Exact Taylor coefficients of a polynomial tree up to `degree`, by
    polynomial arithmetic on coefficient arrays. Raises ValueError if `e`
    is not a polynomial in z with non-negative integer powers.
    """
    def rec(x):
        if x.kind == 'const':
            return np.array([x.value], dtype=complex)
        if x.kind == 'var':
            return np.array([0, 1], dtype=complex)
        if x.kind == 'neg':
            return -rec(x.children[0])
        if x.kind == 'binop' and x.value in '+-*':
            a = rec(x.children[0])
            b = rec(x.children[1])
            if x.value == '*':
                return np.convolve(a, b)
            n = max(len(a), len(b))
            a = np.pad(a, (0, n - len(a)))
            b = np.pad(b, (0, n - len(b)))
            return a + b if x.value == '+' else a - b
        if x.kind == 'binop' and x.value == '^':
            n = _integer_exponent(x.children[1])
            if n is None or n < 0:
                raise ValueError('Not a polynomial: {}'.format(to_string(x)))
            a = rec(x.children[0])
            out = np.array([1], dtype=complex)
            for _ in range(n):
                out = np.convolve(out, a)
            return out
        raise ValueError('Not a polynomial: {}'.format(to_string(x)))
    c = rec(e)
    out = np.zeros(degree + 1, dtype=complex)
    k = min(len(c), degree + 1)
    out[:k] = c[:k]
    return out


# main
if __name__ == '__main__':
    pass
