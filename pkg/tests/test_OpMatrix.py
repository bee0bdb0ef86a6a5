#!/usr/bin/env python
# -*- coding: utf-8 -*-

# import
## batteries
import os
import json
import shutil
import tempfile
import unittest
## 3rd party
import numpy as np
import pandas as pd
## package
from pySemiflowLab import Expr
from pySemiflowLab import Registry
from pySemiflowLab import OpMatrix


# data dir
test_dir = os.path.join(os.path.dirname(__file__))
data_dir = os.path.join(test_dir, 'data')


# tests
class Test_weights(unittest.TestCase):

    def test_kinds(self):
        b = OpMatrix.weights('hardy', 4)
        np.testing.assert_array_equal(b.values, np.ones(5))
        self.assertEqual(b.N, 4)
        b = OpMatrix.weights('dirichlet', 4)
        np.testing.assert_allclose(b.values, [1, 1, np.sqrt(2), np.sqrt(3), 2])
        b = OpMatrix.weights('bergman', 3)
        np.testing.assert_allclose(b.values, [1, 1 / np.sqrt(2), 1 / np.sqrt(3), 0.5])
        b = OpMatrix.weights('custom', 2, [1, 2, 3])
        np.testing.assert_array_equal(b.values, [1, 2, 3])
        self.assertEqual(OpMatrix.weights('hardy', 3), OpMatrix.weights('hardy', 3))
        self.assertNotEqual(OpMatrix.weights('hardy', 3), OpMatrix.weights('bergman', 3))

    def test_bad_weights(self):
        with self.assertRaises(ValueError):
            OpMatrix.weights('sobolev', 4)
        with self.assertRaises(ValueError):
            OpMatrix.weights('custom', 4, [1, 2])
        with self.assertRaises(ValueError):
            OpMatrix.weights('custom', 1, [1, 0])


class Test_composition(unittest.TestCase):

    def test_diagonal(self):
        beta = OpMatrix.weights('hardy', 64)
        C = OpMatrix.composition_matrix(Expr.parse('exp(-1)*z'), beta)
        d = np.diag(C.entries)
        np.testing.assert_allclose(d, np.exp(-np.arange(65)), rtol=0, atol=1e-12)
        off = C.entries - np.diag(d)
        self.assertLess(np.abs(off).max(), 1e-10)
        self.assertLess(C.entry_error, 1e-6)

    def test_constant(self):
        beta = OpMatrix.weights('hardy', 8)
        C = OpMatrix.composition_matrix(Expr.parse('0.5'), beta)
        np.testing.assert_allclose(C.entries[0,:], 0.5 ** np.arange(9), rtol=0, atol=1e-12)
        self.assertLess(np.abs(C.entries[1:,:]).max(), 1e-12)

    def test_weighted_basis(self):
        # monomial coefficients do not depend on the weights
        phi = Expr.parse('z/2 + 0.25*z^2')
        Ch = OpMatrix.composition_matrix(phi, OpMatrix.weights('hardy', 12))
        Cb = OpMatrix.composition_matrix(phi, OpMatrix.weights('bergman', 12))
        np.testing.assert_allclose(Ch.monomial(), Cb.monomial(), rtol=0, atol=1e-12)
        self.assertFalse(np.allclose(Ch.entries, Cb.entries))

    def test_singular_symbol(self):
        with self.assertRaises(ValueError):
            OpMatrix.composition_matrix(Expr.parse('1/(z - 0.9921875)'),
                                        OpMatrix.weights('hardy', 64))

    def test_order_mismatch(self):
        with self.assertRaises(ValueError):
            OpMatrix.composition_matrix(Expr.parse('z'), OpMatrix.weights('hardy', 8), N=4)

    def test_table(self):
        beta = OpMatrix.weights('hardy', 3)
        C = OpMatrix.composition_matrix(Expr.parse('z'), beta)
        df = C.table()
        self.assertEqual(df.shape[0], 16)
        self.assertListEqual(list(df.columns), ['row', 'col', 're', 'im'])


class Test_characterization(unittest.TestCase):

    def test_mobius(self):
        case = Registry.lookup('mobius-group')
        beta = OpMatrix.weights('hardy', 32)
        C = OpMatrix.composition_matrix(case.flow_at(0.5), beta)
        self.assertLess(OpMatrix.characterization_defect(C), 1e-8)

    def test_closed_forms(self):
        beta = OpMatrix.weights('hardy', 32)
        for case in Registry.builtin_examples():
            if case.space != 'disc' or case.closed_form_flow is None:
                continue
            C = OpMatrix.composition_matrix(case.flow_at(0.5), beta)
            self.assertLess(OpMatrix.characterization_defect(C), 1e-7, case.name)
            self.assertLess(OpMatrix.weighted_characterization_defect(C), 1e-7, case.name)

    def test_not_composition(self):
        beta = OpMatrix.weights('hardy', 8)
        T = OpMatrix.OperatorMatrix(np.diag([1, 1, 2, 1, 1, 1, 1, 1, 1]), beta)
        self.assertGreaterEqual(OpMatrix.characterization_defect(T), 1)
        T = OpMatrix.OperatorMatrix(np.eye(9), beta)
        self.assertEqual(OpMatrix.characterization_defect(T), 0)

    def test_weighted(self):
        beta = OpMatrix.weights('hardy', 16)
        T = OpMatrix.weighted_composition_matrix(Expr.parse('1 + z/2'), Expr.parse('z/2'), beta)
        self.assertLess(OpMatrix.weighted_characterization_defect(T), 1e-8)
        self.assertGreater(OpMatrix.characterization_defect(T), 0.1)

    def test_weighted_zero(self):
        beta = OpMatrix.weights('hardy', 8)
        T = OpMatrix.OperatorMatrix(np.zeros((9, 9)), beta)
        with self.assertRaises(OpMatrix.NotComposition):
            OpMatrix.weighted_characterization_defect(T)

    def test_bad_matrix(self):
        beta = OpMatrix.weights('hardy', 8)
        with self.assertRaises(ValueError):
            OpMatrix.OperatorMatrix(np.eye(4), beta)
        with self.assertRaises(ValueError):
            OpMatrix.OperatorMatrix(np.eye(9), beta, entry_error=np.inf)


class Test_generator(unittest.TestCase):

    def test_linear(self):
        A = OpMatrix.generator_matrix(Expr.parse('-z'), OpMatrix.weights('hardy', 8))
        np.testing.assert_allclose(A.entries, np.diag(-np.arange(9.0)), rtol=0, atol=1e-10)

    def test_translation(self):
        A = OpMatrix.generator_matrix(Expr.parse('1'), OpMatrix.weights('hardy', 8))
        x = np.diag(np.arange(1.0, 9.0), k=1)
        np.testing.assert_allclose(A.entries, x, rtol=0, atol=1e-10)

    def test_group(self):
        A = OpMatrix.generator_matrix(Expr.parse('1 - z^2'), OpMatrix.weights('hardy', 8))
        x = np.diag(np.arange(1.0, 9.0), k=1) - np.diag(np.arange(0.0, 8.0), k=-1)
        np.testing.assert_allclose(A.entries, x, rtol=0, atol=1e-10)

    def test_expm_linear(self):
        beta = OpMatrix.weights('hardy', 32)
        A = OpMatrix.generator_matrix(Expr.parse('-z'), beta)
        C = OpMatrix.composition_matrix(Expr.parse('exp(-1)*z'), beta)
        self.assertLess(OpMatrix.expm_compare(A, 1.0, C, 16), 1e-10)

    def test_expm_group(self):
        case = Registry.lookup('mobius-group')
        beta = OpMatrix.weights('hardy', 48)
        A = OpMatrix.generator_matrix(case.G, beta)
        C = OpMatrix.composition_matrix(case.flow_at(0.25), beta)
        self.assertLess(OpMatrix.expm_compare(A, 0.25, C, 16), 1e-6)

    def test_expm_identity(self):
        beta = OpMatrix.weights('hardy', 16)
        A = OpMatrix.generator_matrix(Expr.parse('1 - z^2'), beta)
        C = OpMatrix.composition_matrix(Expr.parse('z'), beta)
        self.assertLess(OpMatrix.expm_compare(A, 0, C, 8), 1e-12)

    def test_expm_bad(self):
        A = OpMatrix.generator_matrix(Expr.parse('-z'), OpMatrix.weights('hardy', 8))
        C = OpMatrix.composition_matrix(Expr.parse('z'), OpMatrix.weights('bergman', 8))
        with self.assertRaises(ValueError):
            OpMatrix.expm_compare(A, 1.0, C, 4)
        C = OpMatrix.composition_matrix(Expr.parse('z'), OpMatrix.weights('hardy', 8))
        with self.assertRaises(ValueError):
            OpMatrix.expm_compare(A, 1.0, C, 0)


class Test_spectrum(unittest.TestCase):

    def test_singular_values(self):
        beta = OpMatrix.weights('hardy', 32)
        C = OpMatrix.composition_matrix(Expr.parse('exp(-1)*z'), beta)
        s = OpMatrix.singular_values(C)
        np.testing.assert_allclose(s[:20], np.exp(-np.arange(20)), rtol=0, atol=1e-10)
        self.assertTrue(np.all(np.diff(s) <= 0))
        C = OpMatrix.composition_matrix(Expr.parse('z'), beta)
        np.testing.assert_allclose(OpMatrix.singular_values(C), np.ones(33), rtol=0, atol=1e-12)

    def test_hs_norm(self):
        beta = OpMatrix.weights('hardy', 32)
        C = OpMatrix.composition_matrix(Expr.parse('z/2'), beta)
        self.assertAlmostEqual(OpMatrix.hs_norm_matrix(C), np.sqrt(4 / 3.0), places=10)
        C = OpMatrix.composition_matrix(Expr.parse('0.5'), beta)
        self.assertAlmostEqual(OpMatrix.hs_norm_matrix(C), np.sqrt(4 / 3.0), places=10)
        C = OpMatrix.composition_matrix(Expr.parse('z'), beta)
        self.assertAlmostEqual(OpMatrix.hs_norm_matrix(C), np.sqrt(33), places=10)


class Test_truncation(unittest.TestCase):

    def test_expm_refinement(self):
        for name in ('linear-contraction', 'mobius-group', 'cubic-contraction'):
            case = Registry.lookup(name)
            err = []
            for N in (48, 96, 192):
                beta = OpMatrix.weights('hardy', N)
                A = OpMatrix.generator_matrix(case.G, beta)
                C = OpMatrix.composition_matrix(case.flow_at(0.25), beta)
                err.append(OpMatrix.expm_compare(A, 0.25, C, 24))
            self.assertLessEqual(err[1], err[0] + 1e-9, name)
            self.assertLessEqual(err[2], err[1] + 1e-9, name)
            self.assertLess(err[1], 1e-4, name)

    def test_sigma_max_grows_with_N(self):
        for name,t in (('linear-contraction', 1.0), ('mobius-group', 0.25),
                       ('parabolic-analytic', 1.0), ('cubic-contraction', 0.5)):
            phi = Registry.lookup(name).flow_at(t)
            s = [OpMatrix.singular_values(
                    OpMatrix.composition_matrix(phi, OpMatrix.weights('hardy', N)))[0]
                 for N in (16, 32, 64)]
            self.assertLessEqual(s[0], s[1] + 1e-8, name)
            self.assertLessEqual(s[1], s[2] + 1e-8, name)

    def test_trace_sum(self):
        # trace class: sum e^-k = 1/(1 - e^-1)
        phi = Registry.lookup('linear-contraction').flow_at(1.0)
        x = [np.sum(OpMatrix.singular_values(
                OpMatrix.composition_matrix(phi, OpMatrix.weights('hardy', N))))
             for N in (32, 64)]
        self.assertLess(abs(x[1] - x[0]) / x[1], 1e-3)
        self.assertAlmostEqual(x[1], 1 / (1 - np.exp(-1)), places=8)
        # boundary fixed point: no plateau of the sum
        phi = Registry.lookup('parabolic-analytic').flow_at(1.0)
        x = []
        for N in (16, 32, 64):
            s = OpMatrix.singular_values(
                OpMatrix.composition_matrix(phi, OpMatrix.weights('hardy', N)))
            x.append(np.sum(s))
        self.assertGreater(x[1], x[0] * (1 + 1e-3))
        self.assertGreater(x[2], x[1] * (1 + 1e-3))
        self.assertGreaterEqual(s[0], 1 - 1e-3)


class Test_hardy_integrals(unittest.TestCase):

    def test_hs_integral(self):
        x = OpMatrix.hs_integral_hardy(Expr.parse('z/2'), M=2 ** 12)
        self.assertAlmostEqual(x.value, 4 / 3.0, delta=2e-6)
        self.assertAlmostEqual(x.value_2M, x.value, places=10)
        self.assertFalse(x.diverges)
        self.assertEqual(len(x.radial), 3)

    def test_lotto(self):
        phi = Registry.lookup('lotto-map').phi
        x = OpMatrix.hs_integral_hardy(phi)
        self.assertTrue(x.diverges)
        x = OpMatrix.hs_integral_hardy(OpMatrix.iterate(phi, 2))
        self.assertFalse(x.diverges)
        self.assertLess(abs(x.value - x.value_2M) / x.value_2M, 1e-3)

    def test_inner_function(self):
        x = OpMatrix.hs_integral_hardy(Expr.parse('z^2'), M=2 ** 10)
        self.assertTrue(x.diverges)

    def test_trace_class(self):
        self.assertTrue(OpMatrix.trace_class_flag(Expr.parse('z/2')))
        case = Registry.lookup('parabolic-analytic')
        self.assertFalse(OpMatrix.trace_class_flag(case.flow_at(1.0)))
        case = Registry.lookup('exp-functional')
        phi = OpMatrix.symbol_map(case.G, case, 0.5, None)
        self.assertTrue(OpMatrix.trace_class_flag(phi, M=256))

    def test_univalent_ratio(self):
        x = OpMatrix.univalent_compactness_ratio(Expr.parse('z/2'))
        self.assertTrue(x.tends_to_zero)
        self.assertEqual(len(x.values), 30)
        x = OpMatrix.univalent_compactness_ratio(Expr.parse('z'))
        self.assertFalse(x.tends_to_zero)

    def test_iterate(self):
        phi = OpMatrix.iterate(Expr.parse('z/2'), 3)
        self.assertIsInstance(phi, Expr.node)
        self.assertAlmostEqual(phi(0.8), 0.1)
        f = OpMatrix.iterate(lambda z: z ** 2, 2)
        self.assertAlmostEqual(f(0.5), 0.0625)
        with self.assertRaises(ValueError):
            OpMatrix.iterate(phi, 0)


class Test_OpMatrix_CLI(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.prefix = os.path.join(self.tmp_dir, 'matrix')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_main_G(self):
        args = ['--G', '-z', '--N', '64', '--t', '1', '--prefix', self.prefix]
        args = OpMatrix.parse_args(args)
        files = OpMatrix.main(args)
        self.assertEqual(len(files), 3)
        self.assertEqual(args.exit_code, 0)
        df = pd.read_csv(files[2])
        np.testing.assert_allclose(df['sigma'][:20], np.exp(-np.arange(20)), rtol=0, atol=1e-8)
        with open(files[0]) as inF:
            d = json.load(inF)
        self.assertLess(d['results']['expm_compare'], 1e-8)
        self.assertTrue(d['results']['trace_class_flag'])
        self.assertEqual(args.block, 32)

    def test_main_phi(self):
        args = ['--phi', 'z/2', '--N', '16', '--hs-integral', '--prefix', self.prefix]
        args = OpMatrix.parse_args(args)
        files = OpMatrix.main(args)
        with open(files[0]) as inF:
            d = json.load(inF)
        self.assertNotIn('expm_compare', d['results'])
        self.assertFalse(d['results']['hs_integral_hardy']['diverges'])
        self.assertAlmostEqual(d['results']['hs_norm_matrix'], np.sqrt(4 / 3.0), places=8)
        df = pd.read_csv(files[1])
        self.assertEqual(df.shape[0], 17 * 17)

    def test_main_custom_weights(self):
        args = ['--phi', 'z/2', '--N', '2', '--beta', 'custom', '--prefix', self.prefix]
        args = OpMatrix.parse_args(args)
        with self.assertRaises(ValueError):
            OpMatrix.main(args)
        args = ['--phi', 'z/2', '--N', '2', '--beta', 'custom', '--beta-values', '1,2,4',
                '--prefix', self.prefix]
        args = OpMatrix.parse_args(args)
        files = OpMatrix.main(args)
        self.assertEqual(args.exit_code, 0)


if __name__ == '__main__':
    unittest.main()
