#!/usr/bin/env python
# -*- coding: utf-8 -*-

# import
## batteries
import os
import json
import shutil
import argparse
import tempfile
import unittest
import collections
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Expr
from pySemiflowLab import Registry
from pySemiflowLab import Report
from pySemiflowLab.__main__ import main as cli_main


# data dir
test_dir = os.path.join(os.path.dirname(__file__))
data_dir = os.path.join(test_dir, 'data')


def fail(x):
    raise ArithmeticError('no value for {}'.format(x))


# tests
class Test_jsonable(unittest.TestCase):

    def test_scalars(self):
        self.assertEqual(Report.to_jsonable(1 + 2j), {'re' : 1.0, 'im' : 2.0})
        self.assertEqual(Report.to_jsonable(np.nan), {'nonfinite' : 'nan'})
        self.assertEqual(Report.to_jsonable(-np.inf), {'nonfinite' : '-inf'})
        self.assertEqual(Report.to_jsonable(np.float64(0.5)), 0.5)
        self.assertIs(Report.to_jsonable(np.bool_(True)), True)
        self.assertEqual(Report.to_jsonable(np.int64(3)), 3)
        self.assertIsNone(Report.to_jsonable(None))
        self.assertEqual(Report.to_jsonable(complex(np.inf, 0)), {'nonfinite' : 'inf'})
        self.assertEqual(Report.to_jsonable(complex(-np.inf, 0)), {'nonfinite' : '-inf'})
        self.assertEqual(Report.to_jsonable(complex(1, np.inf)), {'nonfinite' : 'inf'})
        self.assertEqual(Report.to_jsonable(complex(np.nan, 2)), {'nonfinite' : 'nan'})
        self.assertEqual(Report.to_jsonable(np.complex128(np.nan)), {'nonfinite' : 'nan'})

    def test_nonfinite_in_complex_array(self):
        x = Report.to_jsonable(np.array([1 + 1j, np.nan]))
        self.assertEqual(x, [{'re' : 1.0, 'im' : 1.0}, {'nonfinite' : 'nan'}])

    def test_containers(self):
        x = Report.to_jsonable(np.array([1j, 2]))
        self.assertEqual(x, [{'re' : 0.0, 'im' : 1.0}, {'re' : 2.0, 'im' : 0.0}])
        P = collections.namedtuple('P', ['a', 'b'])
        self.assertEqual(Report.to_jsonable(P(1, (2, 3))), {'a' : 1, 'b' : [2, 3]})
        df = pd.DataFrame({'k' : [0, 1], 'v' : [0.5, np.inf]})
        x = Report.to_jsonable(df)
        self.assertEqual(x[1]['v'], {'nonfinite' : 'inf'})
        self.assertEqual(Report.to_jsonable(Expr.parse('1 - z')), '(1.0 - z)')
        self.assertEqual(Report.to_jsonable(lambda z: z), '<function>')
        self.assertEqual(Report.to_jsonable({1 : 2}), {'1' : 2})
        # strict JSON
        json.dumps(Report.to_jsonable({'x' : [np.nan, 1j]}), allow_nan=False)

    def test_unsupported(self):
        with self.assertRaises(TypeError):
            Report.to_jsonable(object())


class Test_report(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_add_and_errors(self):
        rep = Report.report()
        self.assertEqual(rep.add('square', lambda x: x * x, 3), 9)
        self.assertIsNone(rep.add('broken', fail, 'x'))
        self.assertEqual(rep.run('silent', lambda: 5), 5)
        self.assertNotIn('silent', rep.results)
        self.assertEqual(rep.results['broken']['error'], 'ArithmeticError')
        self.assertIsNone(rep.get('broken'))
        self.assertEqual(rep.get('square'), 9)
        self.assertTrue(rep.has_errors())
        self.assertEqual(rep.exit_code(), 1)
        self.assertEqual(rep.errors[0]['operation'], 'broken')
        self.assertIn('square', rep.timing)

    def test_merge(self):
        a = Report.report()
        b = Report.report()
        b.add('broken', fail, 'y')
        b.set('value', 1)
        a.merge('ex', b)
        self.assertEqual(a.results['ex']['value'], 1)
        self.assertEqual(a.errors[0]['operation'], 'ex/broken')
        self.assertIn('ex/broken', a.timing)

    def test_write(self):
        args = argparse.Namespace(M=1024, tol=1e-9, abs_tol=1e-10, prefix='x',
                                  func=lambda a: a)
        rep = Report.report(args)
        rep.set('value', np.array([1 + 1j, np.nan]))
        f = rep.write(os.path.join(self.tmp_dir, 'report.json'))
        self.assertEqual(args.exit_code, 0)
        with open(f) as inF:
            d = json.load(inF)
        self.assertEqual(d['schema'], Report.SCHEMA)
        self.assertNotIn('func', d['job'])
        self.assertEqual(d['provenance']['grid_sizes'], {'M' : 1024})
        self.assertEqual(sorted(d['provenance']['tolerances'].keys()), ['abs_tol', 'tol'])
        self.assertEqual(d['results']['value'][1], {'nonfinite' : 'nan'})
        self.assertListEqual(sorted(d.keys()),
                             ['errors', 'job', 'provenance', 'results', 'schema', 'timing'])


class Test_compare(unittest.TestCase):

    def test_compare(self):
        expected = {'generates' : True, 'delta' : 2.0, 'group' : None,
                    'verdict' : 'diverges', 'dw_point' : [0.0, 0.0], 'missing' : 1}
        observed = {'generates' : True, 'delta' : 2.0000001, 'group' : None,
                    'verdict' : 'bounded', 'dw_point' : [0.1, 0.0]}
        rows = {x['key'] : x for x in Report.compare(expected, observed)}
        self.assertTrue(rows['generates']['match'])
        self.assertTrue(rows['delta']['match'])
        self.assertTrue(rows['group']['match'])
        self.assertFalse(rows['verdict']['match'])
        self.assertFalse(rows['dw_point']['match'])
        self.assertIsNone(rows['missing']['match'])

    def test_closed_form_defect(self):
        self.assertLess(Report.closed_form_defect(Registry.lookup('mobius-group')), 1e-8)
        self.assertLess(Report.closed_form_defect(Registry.lookup('halfplane-affine')), 1e-8)

    def test_run_example(self):
        rep,rows = Report.run_example(Registry.lookup('halfplane-group'))
        self.assertEqual(len(rows), 3)
        self.assertTrue(all(x['match'] for x in rows))
        self.assertFalse(rep.has_errors())

    def test_report_all(self):
        names = ['lotto-map', 'halfplane-translation']
        rep,summary = Report.report_all(names, threads=2)
        self.assertListEqual(list(rep.results.keys()), names)
        self.assertListEqual(list(summary.columns), ['example', 'key', 'expected', 'observed', 'match'])
        self.assertListEqual(summary['example'].unique().tolist(), names)
        self.assertTrue(all(x is True for x in summary['match']))


class Test_Report_CLI(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.prefix = os.path.join(self.tmp_dir, 'all')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_main_all(self):
        args = Report.parse_args(['--prefix', self.prefix, '--strict'])
        json_file,csv_file = Report.main(args)
        with open(json_file) as inF:
            d = json.load(inF)
        self.assertEqual(d['results']['mismatches'], 0)
        self.assertIn('classification', d['results']['mobius-group'])
        df = pd.read_csv(csv_file)
        self.assertEqual(len(df['example'].unique()), 12)
        self.assertFalse((df['match'].astype(str) == 'False').any())

    def test_main_examples(self):
        args = ['--prefix', self.prefix, '--examples', 'halfplane-affine, halfplane-group']
        args = Report.parse_args(args)
        Report.main(args)
        self.assertListEqual(args.examples, ['halfplane-affine', 'halfplane-group'])

    def test_main_unknown_example(self):
        args = Report.parse_args(['--prefix', self.prefix, '--examples', 'nope'])
        with self.assertRaises(KeyError):
            Report.main(args)


class Test_main(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.prefix = os.path.join(self.tmp_dir, 'main')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_syntax_error(self):
        ret = cli_main(['classify', '--G', '1 + * z', '--prefix', self.prefix])
        self.assertEqual(ret, 2)

    def test_two_symbols(self):
        ret = cli_main(['classify', '--G', '1 - z^2', '--example', 'mobius-group',
                        '--prefix', self.prefix])
        self.assertEqual(ret, 2)

    def test_embedded_errors(self):
        ret = cli_main(['flow', '--G', 'z', '--t', '0.5', '--grid', '3',
                        '--sup-samples', '8', '--prefix', self.prefix])
        self.assertEqual(ret, 1)
        self.assertTrue(os.path.isfile(self.prefix + '.json'))

    def test_list_examples(self):
        out_file = os.path.join(self.tmp_dir, 'examples.tsv')
        ret = cli_main(['list-examples', '--output', out_file])
        self.assertEqual(ret, 0)
        self.assertTrue(os.path.isfile(out_file))

    def test_halfplane(self):
        ret = cli_main(['halfplane', '--example', 'halfplane-translation',
                        '--nx', '4', '--ny', '4', '--prefix', self.prefix])
        self.assertEqual(ret, 0)

    def test_matrix_negative_G(self):
        ret = cli_main(['matrix', '--G', '-z', '--beta', 'hardy', '--N', '64',
                        '--t', '1.0', '--prefix', self.prefix])
        self.assertEqual(ret, 0)
        with open(self.prefix + '.json') as inF:
            d = json.load(inF)
        self.assertEqual(d['job']['G'], '-z')
        self.assertLess(d['results']['expm_compare'], 1e-8)


if __name__ == '__main__':
    unittest.main()
