# -*- coding: utf-8 -*-
# import
## batteries
from __future__ import print_function
import sys
import logging
import argparse
## package
from pySemiflowLab import Classify
from pySemiflowLab import Semiflow
from pySemiflowLab import OpMatrix
from pySemiflowLab import HalfPlane
from pySemiflowLab import Registry
from pySemiflowLab import Report
from pySemiflowLab import Utils

# main
def main(args=None):
  if args is None:
    args = sys.argv[1:]
  logging.basicConfig(format='%(levelname)s: %(message)s', level=logging.WARNING)

  # main parser
  desc = 'pySemiflowLab: numerical lab for composition semigroups'
  epi = """DESCRIPTION:
  Classify semiflow generators on the disc and the right half-plane,
  integrate their flows and compute truncated composition-operator
  matrices on weighted Hardy spaces. Writes JSON reports and CSV plot data.
  """

  parser = argparse.ArgumentParser(description=desc, epilog=epi,
                                   formatter_class=argparse.RawTextHelpFormatter)

  # subparsers
  subparsers = parser.add_subparsers()
  ## classify
  classify = Classify.parse_args(subparsers=subparsers)
  classify.set_defaults(func=Classify.main)
  ## flow
  flow = Semiflow.parse_args(subparsers=subparsers)
  flow.set_defaults(func=Semiflow.main)
  ## matrix
  matrix = OpMatrix.parse_args(subparsers=subparsers)
  matrix.set_defaults(func=OpMatrix.main)
  ## half-plane
  halfplane = HalfPlane.parse_args(subparsers=subparsers)
  halfplane.set_defaults(func=HalfPlane.main)
  ## report-all
  report_all = Report.parse_args(subparsers=subparsers)
  report_all.set_defaults(func=Report.main)
  ## list-examples
  list_examples = Registry.parse_args(subparsers=subparsers)
  list_examples.set_defaults(func=Registry.main)

  # parsing args
  if args:
    args = parser.parse_args(Utils.join_expr_args(args))
  else:
    args = parser.parse_args()

  # running subcommands
  if len(vars(args)) == 0:
    parser.parse_args(['--help'])
  try:
    args.func(args)
  except (ValueError, KeyError, AssertionError, ArithmeticError, IOError) as e:
    logging.error('{}: {}'.format(type(e).__name__, e))
    return 2
  return getattr(args, 'exit_code', 0)


if __name__ == '__main__':
  sys.exit(main())
