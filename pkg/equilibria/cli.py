# **************************************************************************
# *
# * Authors:     scipion-em-equilibria contributors
# *
# * This program is free software; you can redistribute it and/or modify
# * it under the terms of the GNU General Public License as published by
# * the Free Software Foundation; either version 2 of the License, or
# * (at your option) any later version.
# *
# * This program is distributed in the hope that it will be useful,
# * but WITHOUT ANY WARRANTY; without even the implied warranty of
# * MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# * GNU General Public License for more details.
# *
# * You should have received a copy of the GNU General Public License
# * along with this program; if not, write to the Free Software
# * Foundation, Inc., 59 Temple Place, Suite 330, Boston, MA
# * 02111-1307  USA
# *
# *  All comments concerning this program package may be sent to the
# *  e-mail address 'scipion@cnb.csic.es'
# *
# **************************************************************************
"""
Command-line frontend. Results go to stdout (or --output), logs and error
messages to stderr.

    equilibria solve --side lowest market.json
    equilibria example1 --V 11 --trace trace.csv --plot trace.png
"""
import argparse
import itertools
import logging
import sys

import numpy as np

from equilibria import __version__
from equilibria.constants import (LOWEST, HIGHEST, SIDES, EPS_EQ, AUCTION_STEP,
                                  AUCTION_MAX_STEPS, EXIT_OK, EXIT_VALIDATION,
                                  EXIT_VERIFICATION, EXIT_SIZE_LIMIT)
from equilibria.exceptions import (EquilibriaError, SizeLimit, ParseError,
                                   ValidationError, DomainError)
from equilibria.core.document import (load_market, load_equilibrium, to_json,
                                      equilibrium_to_dict)
from equilibria.core.market import verify_equilibrium
from equilibria.core.solver import solve
from equilibria.core.lattice import meet, join, interpolate_continuum
from equilibria.core.verification import (tightness_check, structure_checks,
                                          vcg_oracle, strategyproof_probe,
                                          MisreportGrid)
from equilibria.core.auction import (run_auction, example1_market,
                                     oscillation_oracle, write_trace_csv)
from equilibria.core.mechanisms import (SIDE_I, SIDE_J, reduce_two_sided,
                                        two_sided_outcome, run_ad_auction,
                                        welfare_report)
from equilibria.core.utility import Quasilinear

logger = logging.getLogger('equilibria')

CONTINUUM_POINTS = (0.25, 0.5, 0.75)


def _emit(args, payload):
    text = payload if isinstance(payload, str) else to_json(payload)
    if not text.endswith('\n'):
        text += '\n'
    if args.output:
        with open(args.output, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _verdict_dict(verdict):
    return {'ok': verdict.ok,
            'violations': [{'condition': v.condition, 'buyer': v.buyer,
                            'good': v.good, 'magnitude': float(v.magnitude),
                            'detail': v.detail} for v in verdict.violations]}


def _status(verdict):
    return EXIT_OK if verdict.ok else EXIT_VERIFICATION


# -------------------------- commands --------------------------------------

def cmdSolve(args):
    market = load_market(args.file).solving_market()
    eq = solve(market, args.side, eps=args.eps)
    out = equilibrium_to_dict(eq)
    if not args.verify:
        _emit(args, out)
        return EXIT_OK
    verdict = verify_equilibrium(eq, args.eps)
    out['verdict'] = _verdict_dict(verdict)
    _emit(args, out)
    return _status(verdict)


def cmdVerify(args):
    market = load_market(args.file).solving_market()
    verdict = verify_equilibrium(load_equilibrium(args.equilibrium, market), args.eps)
    _emit(args, _verdict_dict(verdict))
    return _status(verdict)


def cmdLattice(args):
    market = load_market(args.file).solving_market()
    a = load_equilibrium(args.first, market)
    b = load_equilibrium(args.second, market)
    combined = (meet if args.operation == 'meet' else join)(a, b, eps=args.eps)
    _emit(args, equilibrium_to_dict(combined.with_side(args.operation)))
    return EXIT_OK


def cmdContinuum(args):
    market = load_market(args.file).solving_market()
    eq = interpolate_continuum(market, args.t, eps=args.eps)
    _emit(args, equilibrium_to_dict(eq))
    return EXIT_OK


def _traceSummary(trace):
    return {'terminated': trace.terminated,
            'stalled': trace.stalled,
            'steps': trace.steps,
            'demand_change_count': trace.demand_change_count,
            'final_prices': {g: float(p) for g, p in zip(trace.goods, trace.final_prices)}}


def _writeTrace(args, trace, title):
    if args.trace:
        write_trace_csv(trace, args.trace)
        logger.info('trace written to %s', args.trace)
    if args.plot:
        from equilibria.core.plotting import save_price_plot
        save_price_plot(trace, args.plot, title=title)
        logger.info('plot written to %s', args.plot)


def cmdAuction(args):
    market = load_market(args.file).solving_market()
    trace = run_auction(market, step=args.step, max_steps=args.max_steps,
                        eps=args.eps, sample_every=args.sample_every)
    _writeTrace(args, trace, 'Ascending auction')
    _emit(args, _traceSummary(trace))
    return EXIT_OK


def cmdExample1(args):
    market = example1_market(args.V)
    trace = run_auction(market, step=args.step, max_steps=args.max_steps,
                        eps=args.eps, sample_every=args.sample_every)
    _writeTrace(args, trace, 'Oscillating market, V=%g' % args.V)
    out = _traceSummary(trace)
    cap = trace.max_price()
    out['oracle_sign_changes'] = {
        variant: oscillation_oracle(args.V, min(cap, args.V - 1e-12), variant)
        for variant in ('sin', 'cos')}
    out['overlap_transitions'] = {g: n for g, n in zip(trace.goods, trace.overlap_transitions)}
    _emit(args, out)
    return EXIT_OK


def cmdAdAuction(args):
    config = load_market(args.file).ad_auction_config()
    outcome = run_ad_auction(config, eps=args.eps)
    report = welfare_report(config, outcome, eps=args.eps)
    out = {
        'assignment': outcome.assignment,
        'base_prices': {s: float(p) for s, p in zip(config.slots, outcome.base_prices)},
        'charged': {},
        'revenue': report.revenue,
        'utilities': report.utilities,
        'coalition_welfare': report.coalition_welfare,
    }
    for adv in config.advertisers:
        price = outcome.charged(adv.id)
        out['charged'][adv.id] = (None if price is None
                                  else {'amount': price.amount, 'unit': price.unit})
    if report.vcg is not None:
        out['vcg'] = {'welfare': report.vcg.welfare,
                      'welfare_match': report.vcg_welfare_match,
                      'payment_match': report.vcg_payment_match}
    _emit(args, out)
    return EXIT_OK


def cmdReduceTwoSided(args):
    ts = load_market(args.file).two_sided_market()
    market = reduce_two_sided(ts, args.side)
    eq = solve(market, LOWEST, eps=args.eps)
    outcome = two_sided_outcome(ts, eq, args.side)
    out = {'side': args.side,
           'transfers': [{'from': ts.agents_i[i], 'to': ts.agents_j[j], 'amount': x}
                         for (i, j), x in sorted(outcome.transfers.items())],
           'payoffs_i': {a: float(u) for a, u in zip(ts.agents_i, outcome.payoffs_i)},
           'payoffs_j': {a: float(u) for a, u in zip(ts.agents_j, outcome.payoffs_j)}}
    _emit(args, out)
    return EXIT_OK


def _quasilinearValues(market):
    values = np.zeros((market.n_buyers, market.n_goods))
    for i, row in enumerate(market.utilities):
        for j, spec in enumerate(row):
            if not isinstance(spec, Quasilinear):
                raise ValidationError('the vcg suite needs quasilinear utilities, '
                                      'buyer %s good %s is %s'
                                      % (market.buyers[i], market.goods[j],
                                         type(spec).__name__))
            values[i, j] = spec.v
    return values


def _checkTightness(market, args):
    results = {}
    for side in SIDES:
        eq = solve(market, side, eps=args.eps)
        results[side] = tightness_check(eq, side, eps=args.eps)
    return results


def _checkStructure(market, args):
    low = solve(market, LOWEST, eps=args.eps)
    high = solve(market, HIGHEST, eps=args.eps)
    family = [low, high] + [interpolate_continuum(market, t, eps=args.eps,
                                                  lowest=low, highest=high)
                            for t in CONTINUUM_POINTS]
    return {'structure': structure_checks(family, eps=args.eps)}


def _checkVcg(market, args):
    from equilibria.core.verdict import Verdict, Violation
    vcg = vcg_oracle(_quasilinearValues(market))
    eq = solve(market, LOWEST, eps=args.eps)
    expected = vcg.good_payments(market.n_goods)
    violations = [Violation('vcg-payment', good=j, magnitude=float(abs(p - q)))
                  for j, (p, q) in enumerate(zip(eq.prices, expected))
                  if abs(p - q) > args.eps]
    return {'vcg': Verdict.from_violations(violations)}


def _checkStrategyproof(market, args):
    grid = MisreportGrid(mode=args.misreports)
    results = {}
    for size in range(1, args.coalition_size + 1):
        for coalition in itertools.combinations(range(market.n_buyers), size):
            key = ','.join(market.buyers[i] for i in coalition)
            results[key] = strategyproof_probe(market, coalition, grid,
                                               eps=args.eps, workers=args.workers)
    return results


SUITES = {
    'tightness': _checkTightness,
    'structure': _checkStructure,
    'vcg': _checkVcg,
    'strategyproof': _checkStrategyproof,
}


def cmdCheck(args):
    market = load_market(args.file).solving_market()
    results = SUITES[args.suite](market, args)
    ok = all(v.ok for v in results.values())
    _emit(args, {'suite': args.suite, 'ok': ok,
                 'results': {k: _verdict_dict(v) for k, v in results.items()}})
    return EXIT_OK if ok else EXIT_VERIFICATION


# -------------------------- parser ----------------------------------------

def _addAuctionArgs(p):
    p.add_argument('--step', type=float, default=AUCTION_STEP)
    p.add_argument('--max-steps', type=int, default=AUCTION_MAX_STEPS)
    p.add_argument('--sample-every', type=int, default=1,
                   help='keep one price sample every N steps')
    p.add_argument('--trace', help='write the price trace as CSV')
    p.add_argument('--plot', help='write a price trajectory image')


def buildParser():
    parser = argparse.ArgumentParser(
        prog='equilibria',
        description='Competitive equilibria of unit-demand markets with '
                    'general utilities.')
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='debug logging on stderr')
    parser.add_argument('-o', '--output', help='write the result here instead of stdout')
    parser.add_argument('--eps', type=float, default=EPS_EQ,
                        help='equilibrium tolerance')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('solve', help='lowest or highest equilibrium')
    p.add_argument('--side', choices=SIDES, default=LOWEST)
    p.add_argument('--verify', action='store_true')
    p.add_argument('file')
    p.set_defaults(func=cmdSolve)

    p = sub.add_parser('verify', help='check an equilibrium file')
    p.add_argument('file')
    p.add_argument('equilibrium')
    p.set_defaults(func=cmdVerify)

    p = sub.add_parser('lattice', help='meet or join of two equilibria')
    p.add_argument('operation', choices=('meet', 'join'))
    p.add_argument('file')
    p.add_argument('first')
    p.add_argument('second')
    p.set_defaults(func=cmdLattice)

    p = sub.add_parser('continuum', help='equilibrium between lowest and highest')
    p.add_argument('--t', type=float, required=True)
    p.add_argument('file')
    p.set_defaults(func=cmdContinuum)

    p = sub.add_parser('auction', help='ascending price auction')
    _addAuctionArgs(p)
    p.add_argument('file')
    p.set_defaults(func=cmdAuction)

    p = sub.add_parser('example1', help='auction on the oscillating market')
    p.add_argument('--V', type=float, default=11.0)
    _addAuctionArgs(p)
    p.set_defaults(func=cmdExample1)

    p = sub.add_parser('adauction', help='ad auction with CPC and CPM advertisers')
    p.add_argument('file')
    p.set_defaults(func=cmdAdAuction)

    p = sub.add_parser('reduce-two-sided', help='solve a two-sided market')
    p.add_argument('--side', choices=(SIDE_I, SIDE_J), default=SIDE_I)
    p.add_argument('file')
    p.set_defaults(func=cmdReduceTwoSided)

    p = sub.add_parser('check', help='property checks on a market')
    p.add_argument('--suite', choices=sorted(SUITES), required=True)
    p.add_argument('--coalition-size', type=int, default=2)
    p.add_argument('--misreports', choices=('uniform', 'single', 'perturb'),
                   default='uniform')
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('file')
    p.set_defaults(func=cmdCheck)
    return parser


def main(argv=None):
    args = buildParser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except SizeLimit as e:
        print('size limit: %s' % e, file=sys.stderr)
        return EXIT_SIZE_LIMIT
    except (ParseError, ValidationError, DomainError) as e:
        print('invalid input: %s' % e, file=sys.stderr)
        return EXIT_VALIDATION
    except EquilibriaError as e:
        print('failed: %s' % e, file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == '__main__':
    sys.exit(main())
