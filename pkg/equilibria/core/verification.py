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
Independent checks of solver output: subset tightness at the extreme
equilibria, entanglement and conservation across equilibria, the VCG
outcome of quasilinear markets, a grid-search equilibrium oracle and a
probe for profitable coalition misreports.
"""
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from equilibria.constants import (EPS_EQ, LOWEST, HIGHEST, MAX_GRID_GOODS,
                                  getMaxSubsetGoods)
from equilibria.exceptions import MarketMismatch, MatchingFailure, SizeLimit
from equilibria.core.market import (induced_payoffs, induced_prices,
                                    inverse_matrix, realized_payoffs)
from equilibria.core.solver import solve_lowest
from equilibria.core.utility import Quasilinear, evaluate, invert
from equilibria.core.verdict import Verdict, Violation

logger = logging.getLogger(__name__)

MAX_PROFILES = 1000000


# -------------------------- tightness -------------------------------------

def _first_deficient(candidates, neighbours, cap, what):
    if len(candidates) > cap:
        raise SizeLimit('%d positive %s exceed the subset enumeration cap %d'
                        % (len(candidates), what, cap))
    for size in range(1, len(candidates) + 1):
        for subset in itertools.combinations(candidates, size):
            reach = set().union(*(neighbours[k] for k in subset))
            if len(reach) < size + 1:
                return subset, reach
    return None, None


def tightness_check(eq, side=LOWEST, eps=EPS_EQ, max_subset=None):
    """ At the lowest equilibrium every set T of positively priced goods is
    demanded by at least |T| + 1 buyers; at the highest every set S of
    buyers with positive payoff demands at least |S| + 1 goods. The first
    deficient set in (size, lexicographic) order is the witness. """
    market = eq.market
    cap = getMaxSubsetGoods() if max_subset is None else max_subset
    if side == LOWEST:
        candidates = [j for j in range(market.n_goods) if eq.prices[j] > eps]
        if not candidates:
            return Verdict(ok=True)
        inverses = inverse_matrix(market, eq.payoffs)
        prices = induced_prices(market, eq.payoffs)
        neighbours = {j: {i for i in range(market.n_buyers)
                          if abs(inverses[i, j] - prices[j]) <= eps}
                      for j in candidates}
        what = 'goods'
    elif side == HIGHEST:
        candidates = [i for i in range(market.n_buyers) if eq.payoffs[i] > eps]
        if not candidates:
            return Verdict(ok=True)
        values = market.value_matrix(eq.prices)
        payoffs = induced_payoffs(market, eq.prices)
        neighbours = {i: {j for j in range(market.n_goods)
                          if abs(values[i, j] - payoffs[i]) <= eps}
                      for i in candidates}
        what = 'buyers'
    else:
        raise ValueError('unknown side %r' % side)

    subset, reach = _first_deficient(candidates, neighbours, cap, what)
    if subset is None:
        return Verdict(ok=True)
    first = subset[0]
    violation = Violation('tightness',
                          buyer=first if side == HIGHEST else -1,
                          good=first if side == LOWEST else -1,
                          magnitude=float(len(subset) + 1 - len(reach)),
                          detail='%s %s reach only %s' % (what, list(subset),
                                                          sorted(reach)))
    return Verdict(ok=False, violations=(violation,), witness=tuple(subset))


# -------------------------- structure -------------------------------------

def _sign(x, eps):
    return 0 if abs(x) <= eps else (1 if x > 0 else -1)


def structure_checks(equilibria, eps=EPS_EQ, slack=None):
    """ Entanglement of matched pairs and conservation of the matched sets
    across several equilibria of one market. A move of only one of price
    and payoff counts once it exceeds slack, which defaults to eps. """
    equilibria = list(equilibria)
    slack = eps if slack is None else slack
    if len(equilibria) < 2:
        raise ValueError('structure checks need at least two equilibria')
    market = equilibria[0].market
    for other in equilibria[1:]:
        if other.market is not market and other.market != market:
            raise MarketMismatch('equilibria belong to different markets')

    violations = []
    for a, b in itertools.permutations(equilibria, 2):
        for i, j in enumerate(a.matching):
            if j is None:
                continue
            dp = b.prices[j] - a.prices[j]
            du = b.payoffs[i] - a.payoffs[i]
            sp, su = _sign(dp, eps), _sign(du, eps)
            if sp == su and sp != 0:
                violations.append(Violation('entanglement', i, j, abs(dp) + abs(du),
                                            'price and payoff moved together'))
            elif (sp == 0) != (su == 0) and max(abs(dp), abs(du)) > slack:
                violations.append(Violation('entanglement', i, j, max(abs(dp), abs(du)),
                                            'only one of price and payoff moved'))

    for e in equilibria:
        for i in range(market.n_buyers):
            if e.payoffs[i] > eps and any(o.matching[i] is None for o in equilibria):
                violations.append(Violation('conservation', i, -1, float(e.payoffs[i]),
                                            'buyer with positive payoff left unmatched'))
        for j in range(market.n_goods):
            if e.prices[j] > eps and any(j not in o.buyer_of() for o in equilibria):
                violations.append(Violation('conservation', -1, j, float(e.prices[j]),
                                            'good with positive price left unmatched'))
    return Verdict.from_violations(set(violations))


# -------------------------- VCG -------------------------------------------

@dataclass(frozen=True)
class VcgOutcome:
    assignment: Tuple[Optional[int], ...]
    payments: Tuple[float, ...]
    welfare: float

    def good_payments(self, n_goods):
        """ Payment attached to each good, 0 for goods left unassigned. """
        out = np.zeros(n_goods)
        for i, j in enumerate(self.assignment):
            if j is not None:
                out[j] = self.payments[i]
        return out


def _max_welfare(values):
    if values.size == 0:
        return 0.0, [], []
    rows, cols = linear_sum_assignment(values, maximize=True)
    return float(values[rows, cols].sum()), rows, cols


def vcg_oracle(values):
    """ Welfare-maximizing assignment and the externality payment of each
    winner. """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError('value matrix must be two dimensional')
    n = values.shape[0]
    welfare, rows, cols = _max_welfare(values)
    assignment = [None] * n
    for i, j in zip(rows, cols):
        if values[i, j] > 0:
            assignment[i] = int(j)
    payments = [0.0] * n
    for i, j in enumerate(assignment):
        if j is None:
            continue
        without_i, _, _ = _max_welfare(np.delete(values, i, axis=0))
        payments[i] = without_i - (welfare - values[i, j])
    return VcgOutcome(tuple(assignment), tuple(payments), welfare)


# -------------------------- grid oracle -----------------------------------

def _candidate_matchings(n_buyers, n_goods):
    """ Injective partial assignments of goods to buyers. """
    for choice in itertools.product([None] + list(range(n_buyers)), repeat=n_goods):
        taken = [b for b in choice if b is not None]
        if len(taken) == len(set(taken)):
            yield choice


def brute_force_lowest(market, grid_step, eps=EPS_EQ, max_price=None):
    """ Component-wise minimum over grid points that are equilibrium prices
    up to the grid tolerance. """
    m, n = market.n_goods, market.n_buyers
    if m > MAX_GRID_GOODS:
        raise SizeLimit('grid oracle supports at most %d goods' % MAX_GRID_GOODS)
    if m == 0:
        return np.zeros(0)
    if max_price is None:
        roots = [invert(spec, 0.0) for row in market.utilities for spec in row]
        max_price = max(roots + [0.0])
    grid = np.arange(0.0, max_price + grid_step / 2, grid_step)
    tol = max(eps, grid_step)
    curves = np.array([[[evaluate(market.spec(i, j), x, extend=True) for x in grid]
                        for j in range(m)] for i in range(n)]).reshape(n, m, grid.size)
    matchings = list(_candidate_matchings(n, m))
    rest = grid.size ** (m - 1)
    best = np.full(m, np.inf)
    for k0 in range(grid.size):
        idx = np.unravel_index(np.arange(rest), (grid.size,) * (m - 1)) if m > 1 else ()
        index = [np.full(rest, k0)] + list(idx)
        values = np.stack([np.stack([curves[i, j][index[j]] for j in range(m)])
                           for i in range(n)]) if n else np.zeros((0, m, rest))
        payoffs = np.maximum(values.max(axis=1), 0.0) if n else np.zeros((0, rest))
        tight = (np.abs(payoffs[:, None, :] - values) <= tol) & (values >= -tol)
        zero_price = np.stack([grid[index[j]] <= tol for j in range(m)])
        idle = payoffs <= tol
        feasible = np.zeros(rest, dtype=bool)
        for choice in matchings:
            ok = np.ones(rest, dtype=bool)
            for j, b in enumerate(choice):
                ok &= zero_price[j] if b is None else tight[b, j]
            for i in set(range(n)) - {b for b in choice if b is not None}:
                ok &= idle[i]
            feasible |= ok
        if feasible.any():
            for j in range(m):
                best[j] = min(best[j], grid[index[j][feasible]].min())
    if np.isinf(best).any():
        raise MatchingFailure('no grid point below %g is an equilibrium' % max_price)
    return best


# -------------------------- strategyproofness -----------------------------

@dataclass(frozen=True)
class MisreportGrid:
    """ Quasilinear misreports: 'uniform' reports one value on every good,
    'single' reports a value on one good and 0 elsewhere, 'perturb' moves
    each true value at price 0 by its own offset. The first two ignore how
    a buyer ranks the goods, so with several goods they cover far fewer
    lies than 'perturb', whose size grows as len(offsets) ** n_goods. """
    values: Tuple[float, ...] = tuple(np.arange(0.0, 10.5, 0.5))
    mode: str = 'uniform'
    offsets: Tuple[float, ...] = (-1.0, -0.5, 0.0, 0.5, 1.0)

    def reports(self, n_goods):
        if self.mode == 'uniform':
            return [(float(v),) * n_goods for v in self.values]
        if self.mode == 'single':
            return [tuple(float(v) if g == j else 0.0 for g in range(n_goods))
                    for j in range(n_goods) for v in self.values]
        if self.mode == 'perturb':
            offsets = [float(d) for d in self.offsets]
            return list(itertools.product(offsets, repeat=n_goods))
        raise ValueError('unknown misreport mode %r' % self.mode)

    def realize(self, true_values, report):
        if self.mode == 'perturb':
            return tuple(max(0.0, v + d) for v, d in zip(true_values, report))
        return report


def _misreport_gains(market, coalition, profile, truthful, eps, grid):
    reports = {i: grid.realize([evaluate(spec, 0.0, extend=True)
                                for spec in market.utilities[i]], report)
               for i, report in zip(coalition, profile)}
    lied = market.map_specs(lambda i, j, spec: Quasilinear(reports[i][j])
                            if i in reports else spec)
    eq = solve_lowest(lied, eps=eps)
    true = realized_payoffs(lied, eq.prices, eq.matching, true_market=market)
    return [float(true[i] - truthful[i]) for i in coalition]


def _evaluate_chunk(args):
    market, coalition, profiles, truthful, eps, grid = args
    return [_misreport_gains(market, coalition, p, truthful, eps, grid) for p in profiles]


def strategyproof_probe(market, coalition, grid=None, eps=EPS_EQ, workers=1):
    """ Fails iff some joint misreport of the coalition on the grid raises
    every member's true payoff by more than eps. """
    grid = grid or MisreportGrid()
    coalition = sorted(set(int(i) for i in coalition))
    if not coalition:
        return Verdict(ok=True)
    options = grid.reports(market.n_goods)
    total = len(options) ** len(coalition)
    if total > MAX_PROFILES:
        raise SizeLimit('%d misreport profiles exceed the cap %d' % (total, MAX_PROFILES))

    eq = solve_lowest(market, eps=eps)
    truthful = realized_payoffs(market, eq.prices, eq.matching)
    profiles = list(itertools.product(options, repeat=len(coalition)))
    if workers > 1:
        chunks = [profiles[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk,
                                  [(market, coalition, c, truthful, eps, grid)
                                   for c in chunks]))
        gains = [None] * len(profiles)
        for k, part in enumerate(parts):
            gains[k::workers] = part
    else:
        gains = _evaluate_chunk((market, coalition, profiles, truthful, eps, grid))

    logger.debug('probed %d misreports of coalition %s', len(profiles), coalition)
    for profile, gain in zip(profiles, gains):
        if all(g > eps for g in gain):
            violation = Violation('misreport', buyer=coalition[0], magnitude=min(gain),
                                  detail='reports %s gain %s' % (list(profile), gain))
            return Verdict(ok=False, violations=(violation,), witness=tuple(profile))
    return Verdict(ok=True)
