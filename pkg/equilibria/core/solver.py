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
Lowest and highest competitive equilibria by memoized induction over
submarkets, supporting matchings, critical alternating paths, buyer
re-insertion and bounded equilibria.

The lowest payoff of a buyer is its induced payoff at the highest prices of
the market without it; the highest price of a good is its induced price at
the lowest payoffs of the market without it. Both recursions share one memo
table keyed by the removed buyers and goods.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from equilibria.constants import EPS_EQ, LOWEST, HIGHEST, getMaxMarketSize
from equilibria.exceptions import (DomainError, MatchingFailure, PathNotFound,
                                   SizeLimit)
from equilibria.core.market import (Equilibrium, induced_payoffs,
                                    induced_prices, tight_graph,
                                    verify_equilibrium, pad_market, pad_vector,
                                    strip_padding)
from equilibria.core.utility import evaluate, invert, shift_for_bounds
from equilibria.core.verdict import Verdict, Violation

logger = logging.getLogger(__name__)

GOOD = 'good'
BUYER = 'buyer'


@dataclass(frozen=True)
class SubmarketKey:
    removed_buyers: int
    removed_goods: int

    def without_buyer(self, i):
        return SubmarketKey(self.removed_buyers | (1 << i), self.removed_goods)

    def without_good(self, j):
        return SubmarketKey(self.removed_buyers, self.removed_goods | (1 << j))


FULL_MARKET = SubmarketKey(0, 0)


@dataclass(frozen=True)
class BoundEnvelope:
    price_lower: Tuple[float, ...]
    payoff_lower: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'price_lower', tuple(float(x) for x in self.price_lower))
        object.__setattr__(self, 'payoff_lower', tuple(float(x) for x in self.payoff_lower))
        if any(x < 0 for x in self.price_lower + self.payoff_lower):
            raise DomainError('bounds must be nonnegative')

    @classmethod
    def zeros(cls, market):
        return cls((0.0,) * market.n_goods, (0.0,) * market.n_buyers)


class _Infeasible:
    """ Returned by bounded solves when no bounded equilibrium exists. """

    def __bool__(self):
        return False

    def __repr__(self):
        return 'INFEASIBLE'


INFEASIBLE = _Infeasible()


class InductiveSolver:
    """ Memoized lowest payoffs and highest prices of every submarket of one
    market. Entries of removed agents are NaN. """

    def __init__(self, market):
        self.market = market
        self._lowest = {}
        self._highest = {}

    @property
    def states(self):
        return len(self._lowest) + len(self._highest)

    def _remaining(self, key):
        buyers = [i for i in range(self.market.n_buyers)
                  if not key.removed_buyers >> i & 1]
        goods = [j for j in range(self.market.n_goods)
                 if not key.removed_goods >> j & 1]
        return buyers, goods

    def lowest_payoffs(self, key=FULL_MARKET):
        if key in self._lowest:
            return self._lowest[key]
        buyers, goods = self._remaining(key)
        payoffs = np.full(self.market.n_buyers, np.nan)
        for i in buyers:
            if not goods:
                payoffs[i] = 0.0
                continue
            prices = self.highest_prices(key.without_buyer(i))
            best = max(evaluate(self.market.spec(i, j), prices[j], extend=True)
                       for j in goods)
            payoffs[i] = max(best, 0.0)
        self._lowest[key] = payoffs
        return payoffs

    def highest_prices(self, key=FULL_MARKET):
        if key in self._highest:
            return self._highest[key]
        buyers, goods = self._remaining(key)
        prices = np.full(self.market.n_goods, np.nan)
        for j in goods:
            if not buyers:
                prices[j] = 0.0
                continue
            payoffs = self.lowest_payoffs(key.without_good(j))
            best = max(invert(self.market.spec(i, j), payoffs[i]) for i in buyers)
            prices[j] = max(best, 0.0)
        self._highest[key] = prices
        return prices


def check_size(market, max_size=None):
    cap = getMaxMarketSize() if max_size is None else max_size
    if market.size > cap:
        raise SizeLimit('market has %d agents, the inductive solver is capped '
                        'at %d' % (market.size, cap))
    if market.size > cap / 2:
        logger.warning('market with %d agents is above half the solver cap %d; '
                       'the submarket table grows exponentially', market.size, cap)


def supporting_matching(market, prices, payoffs, eps=EPS_EQ):
    """ A matching on tight edges with nonnegative realized payoff covering
    every buyer with positive payoff and every good with positive price. """
    prices = np.asarray(prices, dtype=float)
    payoffs = np.asarray(payoffs, dtype=float)
    n, m = market.n_buyers, market.n_goods
    need_buyer = payoffs > eps
    need_good = prices > eps
    matching = [None] * n
    if n and m:
        values = market.value_matrix(prices)
        tight = (np.abs(values - payoffs[:, None]) <= eps) & (values >= -eps)
        weight = need_buyer[:, None].astype(float) + need_good[None, :]
        big = float(n + m + 1)
        rows, cols = linear_sum_assignment(np.where(tight, weight, -big),
                                           maximize=True)
        for i, j in zip(rows, cols):
            if tight[i, j] and weight[i, j] > 0:
                matching[i] = int(j)
    covered_goods = {j for j in matching if j is not None}
    missing_buyers = [i for i in range(n) if need_buyer[i] and matching[i] is None]
    missing_goods = [j for j in range(m) if need_good[j] and j not in covered_goods]
    if missing_buyers or missing_goods:
        raise MatchingFailure('no supporting matching covers buyers %s and goods %s'
                              % (missing_buyers, missing_goods))
    return tuple(matching)


def solve_lowest(market, eps=EPS_EQ, max_size=None):
    check_size(market, max_size)
    solver = InductiveSolver(market)
    payoffs = solver.lowest_payoffs()
    prices = induced_prices(market, payoffs)
    logger.debug('lowest equilibrium used %d submarket states', solver.states)
    matching = supporting_matching(market, prices, payoffs, eps)
    return Equilibrium(market, prices, payoffs, matching, LOWEST)


def solve_highest(market, eps=EPS_EQ, max_size=None):
    check_size(market, max_size)
    solver = InductiveSolver(market)
    prices = solver.highest_prices()
    payoffs = induced_payoffs(market, prices)
    logger.debug('highest equilibrium used %d submarket states', solver.states)
    matching = supporting_matching(market, prices, payoffs, eps)
    return Equilibrium(market, prices, payoffs, matching, HIGHEST)


def solve(market, side=LOWEST, **kwargs):
    if side == LOWEST:
        return solve_lowest(market, **kwargs)
    if side == HIGHEST:
        return solve_highest(market, **kwargs)
    raise ValueError('unknown side %r' % side)


# -------------------------- alternating paths -----------------------------

def _index(value, names):
    return names.index(value) if isinstance(value, str) else int(value)


def _trace_back(end, parent):
    """ Walk parent links from the end vertex back to the start vertex. """
    path = [end]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def critical_alternating_path(eq, start_good, eps=EPS_EQ):
    """ Tight alternating path from a good, through its matched buyer, to a
    buyer with zero payoff or to an unmatched good. Exists at the highest
    equilibrium. """
    market = eq.market
    j = _index(start_good, market.goods)
    graph = tight_graph(eq, eps)
    owner = eq.buyer_of()
    if j not in owner:
        return ((GOOD, j),)
    i = owner[j]
    if eq.payoffs[i] <= eps:
        return ((GOOD, j), (BUYER, i))

    parent = {(GOOD, j): None, (BUYER, i): (GOOD, j)}
    frontier = [i]
    for _ in range(market.n_buyers):
        step = next(((b, g) for b in frontier for g in graph.goods_of(b)
                     if (GOOD, g) not in parent
                     and not graph.is_matching_edge(b, g)), None)
        if step is None:
            break
        b, g = step
        parent[(GOOD, g)] = (BUYER, b)
        if g not in owner:
            return _trace_back((GOOD, g), parent)
        nxt = owner[g]
        parent[(BUYER, nxt)] = (GOOD, g)
        if eq.payoffs[nxt] <= eps:
            return _trace_back((BUYER, nxt), parent)
        frontier.append(nxt)
    raise PathNotFound('no critical alternating path from good %s'
                       % market.goods[j])


def critical_alternating_path_from_buyer(eq, start_buyer, eps=EPS_EQ):
    """ Lowest-equilibrium form: from a buyer, through its matched good, to a
    good with zero price or to an unmatched buyer. """
    market = eq.market
    i = _index(start_buyer, market.buyers)
    graph = tight_graph(eq, eps)
    j = eq.matching[i]
    if j is None:
        return ((BUYER, i),)
    if eq.prices[j] <= eps:
        return ((BUYER, i), (GOOD, j))

    parent = {(BUYER, i): None, (GOOD, j): (BUYER, i)}
    frontier = [j]
    for _ in range(market.n_goods):
        step = next(((g, b) for g in frontier for b in graph.buyers_of(g)
                     if (BUYER, b) not in parent
                     and not graph.is_matching_edge(b, g)), None)
        if step is None:
            break
        g, b = step
        parent[(BUYER, b)] = (GOOD, g)
        nxt = eq.matching[b]
        if nxt is None:
            return _trace_back((BUYER, b), parent)
        parent[(GOOD, nxt)] = (BUYER, b)
        if eq.prices[nxt] <= eps:
            return _trace_back((GOOD, nxt), parent)
        frontier.append(nxt)
    raise PathNotFound('no critical alternating path from buyer %s'
                       % market.buyers[i])


def insert_buyer(eq_minus_i, market, buyer, eps=EPS_EQ):
    """ Add a buyer to the highest equilibrium of the market without it,
    keeping prices and rerouting the matching along a critical path. """
    i = _index(buyer, market.buyers)
    sub = eq_minus_i.market
    full_index = [market.buyer_index(b) for b in sub.buyers]
    if sub.goods != market.goods or sorted(full_index + [i]) != list(range(market.n_buyers)):
        raise ValueError('equilibrium does not belong to the market without buyer %s'
                         % market.buyers[i])
    prices = np.array(eq_minus_i.prices)
    values = [evaluate(market.spec(i, j), prices[j], extend=True)
              for j in range(market.n_goods)]
    best = max(values + [0.0])

    sub_matching = list(eq_minus_i.matching)
    own = None
    if best > eps:
        own = int(np.argmax(values))
        path = critical_alternating_path(eq_minus_i, own, eps)
        for k in range(1, len(path), 2):
            b = path[k][1]
            sub_matching[b] = path[k + 1][1] if k + 1 < len(path) else None

    payoffs = np.zeros(market.n_buyers)
    matching = [None] * market.n_buyers
    for k, b in enumerate(full_index):
        payoffs[b] = eq_minus_i.payoffs[k]
        matching[b] = sub_matching[k]
    payoffs[i] = best
    matching[i] = own
    return Equilibrium(market, prices, payoffs, matching)


# -------------------------- bounded equilibria ----------------------------

def _solve_bounded(market, bounds, side, eps, max_size):
    padded = pad_market(market)
    price_bound = pad_vector(bounds.price_lower, padded.n_goods)
    payoff_bound = pad_vector(bounds.payoff_lower, padded.n_buyers)
    shifted = padded.map_specs(
        lambda i, j, spec: shift_for_bounds(spec, price_bound[j], payoff_bound[i]))
    check_size(shifted, max_size)
    solver = InductiveSolver(shifted)
    if side == LOWEST:
        payoffs = solver.lowest_payoffs()
        prices = induced_prices(shifted, payoffs)
    else:
        prices = solver.highest_prices()
        payoffs = induced_payoffs(shifted, prices)
    prices = prices + price_bound
    payoffs = payoffs + payoff_bound
    try:
        matching = supporting_matching(padded, prices, payoffs, eps)
    except MatchingFailure as e:
        logger.debug('bounded %s equilibrium infeasible: %s', side, e)
        return INFEASIBLE, padded
    eq = Equilibrium(padded, prices, payoffs, matching, side)
    return eq, padded


def _finish_bounded(market, eq, eps):
    if eq is INFEASIBLE:
        return INFEASIBLE
    stripped = strip_padding(eq, market)
    verdict = verify_equilibrium(stripped, eps)
    if not verdict.ok:
        logger.debug('bounded equilibrium rejected:\n%s', verdict.describe())
        return INFEASIBLE
    return stripped


def solve_lowest_bounded(market, bounds, eps=EPS_EQ, max_size=None):
    """ Lowest equilibrium with prices and payoffs above the bounds, or
    INFEASIBLE when none exists. """
    eq, _ = _solve_bounded(market, bounds, LOWEST, eps, max_size)
    return _finish_bounded(market, eq, eps)


def solve_highest_bounded(market, bounds, eps=EPS_EQ, max_size=None):
    eq, _ = _solve_bounded(market, bounds, HIGHEST, eps, max_size)
    return _finish_bounded(market, eq, eps)


def continuity_check(market, bounds, side=LOWEST, eps=EPS_EQ, max_size=None):
    """ On the balanced market, the lowest bounded equilibrium has a good at
    its price bound and the highest one a buyer at its payoff bound. """
    eq, padded = _solve_bounded(market, bounds, side, eps, max_size)
    if eq is INFEASIBLE:
        return Verdict.from_violations([Violation('infeasible',
                                                  detail='no bounded equilibrium')])
    if side == LOWEST:
        gaps = eq.prices - pad_vector(bounds.price_lower, padded.n_goods)
        condition = 'price-bound'
    else:
        gaps = eq.payoffs - pad_vector(bounds.payoff_lower, padded.n_buyers)
        condition = 'payoff-bound'
    if gaps.size and np.min(gaps) <= eps:
        return Verdict(ok=True, witness=(int(np.argmin(gaps)),))
    return Verdict.from_violations([Violation(condition, magnitude=float(np.min(gaps)) if gaps.size else 0.0,
                                              detail='no agent sits at its bound')])
