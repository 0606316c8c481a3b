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
Markets of unit-demand buyers and goods, equilibria, and the quantities
derived from them: induced payoffs and prices, demand sets, tight graphs and
the competitive-equilibrium conditions.
"""
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

import numpy as np

from equilibria.constants import EPS_EQ, DUMMY_PREFIX
from equilibria.exceptions import ValidationError
from equilibria.core.utility import (UtilitySpec, evaluate, invert,
                                     validate_spec, dummy_spec)
from equilibria.core.verdict import Verdict, Violation

logger = logging.getLogger(__name__)

Matching = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class Market:
    """ Buyers, goods and the utility curve of every buyer for every good.
    Rows of ``utilities`` follow ``buyers`` and columns follow ``goods``. """
    buyers: Tuple[str, ...]
    goods: Tuple[str, ...]
    utilities: Tuple[Tuple[UtilitySpec, ...], ...]
    trusted: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'buyers', tuple(str(b) for b in self.buyers))
        object.__setattr__(self, 'goods', tuple(str(g) for g in self.goods))
        object.__setattr__(self, 'utilities',
                           tuple(tuple(row) for row in self.utilities))
        if len(set(self.buyers)) != len(self.buyers):
            raise ValidationError('buyer identifiers must be unique')
        if len(set(self.goods)) != len(self.goods):
            raise ValidationError('good identifiers must be unique')
        if len(self.utilities) != len(self.buyers):
            raise ValidationError('expected %d utility rows, got %d'
                                  % (len(self.buyers), len(self.utilities)))
        for i, row in enumerate(self.utilities):
            if len(row) != len(self.goods):
                raise ValidationError('utility row of buyer %s has %d entries, '
                                      'expected %d' % (self.buyers[i], len(row),
                                                       len(self.goods)))
        if self.trusted:
            return
        for i, row in enumerate(self.utilities):
            for j, spec in enumerate(row):
                verdict = validate_spec(spec)
                if not verdict.ok:
                    raise ValidationError('utility of buyer %s for good %s: %s'
                                          % (self.buyers[i], self.goods[j],
                                             verdict.describe()))

    @property
    def n_buyers(self):
        return len(self.buyers)

    @property
    def n_goods(self):
        return len(self.goods)

    @property
    def size(self):
        return self.n_buyers + self.n_goods

    def spec(self, i, j):
        return self.utilities[i][j]

    def buyer_index(self, buyer):
        return self.buyers.index(buyer)

    def good_index(self, good):
        return self.goods.index(good)

    def submarket(self, buyer_idx, good_idx):
        buyer_idx, good_idx = list(buyer_idx), list(good_idx)
        return Market(tuple(self.buyers[i] for i in buyer_idx),
                      tuple(self.goods[j] for j in good_idx),
                      tuple(tuple(self.utilities[i][j] for j in good_idx)
                            for i in buyer_idx),
                      trusted=True)

    def without_buyer(self, i):
        return self.submarket([b for b in range(self.n_buyers) if b != i],
                              range(self.n_goods))

    def without_good(self, j):
        return self.submarket(range(self.n_buyers),
                              [g for g in range(self.n_goods) if g != j])

    def map_specs(self, fn):
        """ New market with fn(i, j, spec) in place of every curve. """
        return Market(self.buyers, self.goods,
                      tuple(tuple(fn(i, j, spec) for j, spec in enumerate(row))
                            for i, row in enumerate(self.utilities)),
                      trusted=True)

    def value_matrix(self, prices):
        """ u_i^j(p^j) for every pair. """
        values = np.empty((self.n_buyers, self.n_goods))
        for i, row in enumerate(self.utilities):
            for j, spec in enumerate(row):
                values[i, j] = evaluate(spec, prices[j], extend=True)
        return values


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """ Prices, payoffs and a supporting matching (buyer index to good
    index, or None) on a market. """
    market: Market
    prices: np.ndarray
    payoffs: np.ndarray
    matching: Matching
    side: Optional[str] = None

    def __post_init__(self):
        prices = np.array(self.prices, dtype=float)
        payoffs = np.array(self.payoffs, dtype=float)
        prices.setflags(write=False)
        payoffs.setflags(write=False)
        object.__setattr__(self, 'prices', prices)
        object.__setattr__(self, 'payoffs', payoffs)
        object.__setattr__(self, 'matching', tuple(
            None if j is None else int(j) for j in self.matching))

    def buyer_of(self):
        """ Inverse matching: good index to buyer index. """
        return {j: i for i, j in enumerate(self.matching) if j is not None}

    def same_as(self, other, tol=EPS_EQ):
        return (self.prices.shape == other.prices.shape
                and self.payoffs.shape == other.payoffs.shape
                and np.allclose(self.prices, other.prices, rtol=0, atol=tol)
                and np.allclose(self.payoffs, other.payoffs, rtol=0, atol=tol))

    def with_side(self, side):
        return Equilibrium(self.market, self.prices, self.payoffs,
                           self.matching, side)


@dataclass(frozen=True)
class TightGraph:
    edges: FrozenSet[Tuple[int, int]]
    matching_edges: FrozenSet[Tuple[int, int]]

    def is_matching_edge(self, i, j):
        return (i, j) in self.matching_edges

    def goods_of(self, i):
        return sorted(j for (b, j) in self.edges if b == i)

    def buyers_of(self, j):
        return sorted(i for (i, g) in self.edges if g == j)


def induced_payoffs(market, prices):
    """ Best payoff of each buyer at the given prices, the outside option
    included. """
    if market.n_buyers == 0:
        return np.zeros(0)
    if market.n_goods == 0:
        return np.zeros(market.n_buyers)
    values = market.value_matrix(np.asarray(prices, dtype=float))
    return np.maximum(values.max(axis=1), 0.0)


def inverse_matrix(market, payoffs):
    """ p_i^j(u_i) for every pair. """
    inverses = np.empty((market.n_buyers, market.n_goods))
    for i, row in enumerate(market.utilities):
        for j, spec in enumerate(row):
            inverses[i, j] = invert(spec, payoffs[i])
    return inverses


def induced_prices(market, payoffs):
    """ Highest price any buyer would pay for each good while keeping its
    payoff, floored at 0. """
    if market.n_goods == 0:
        return np.zeros(0)
    if market.n_buyers == 0:
        return np.zeros(market.n_goods)
    inverses = inverse_matrix(market, np.asarray(payoffs, dtype=float))
    return np.maximum(inverses.max(axis=0), 0.0)


def demand_set_of_buyers(market, prices, buyers, eps=EPS_EQ):
    """ Goods at which some buyer of the subset attains its induced payoff. """
    buyers = list(buyers)
    if not buyers:
        raise ValueError('demand set of an empty buyer subset')
    prices = np.asarray(prices, dtype=float)
    payoffs = induced_payoffs(market, prices)
    demanded = set()
    for i in buyers:
        for j in range(market.n_goods):
            if abs(evaluate(market.spec(i, j), prices[j], extend=True) - payoffs[i]) <= eps:
                demanded.add(j)
    return frozenset(demanded)


def demand_set_of_goods(market, payoffs, goods, eps=EPS_EQ):
    """ Buyers whose inverse price for some good of the subset reaches the
    induced price of that good. """
    goods = list(goods)
    if not goods:
        raise ValueError('demand set of an empty good subset')
    payoffs = np.asarray(payoffs, dtype=float)
    prices = induced_prices(market, payoffs)
    demanders = set()
    for j in goods:
        for i in range(market.n_buyers):
            if abs(invert(market.spec(i, j), payoffs[i]) - prices[j]) <= eps:
                demanders.add(i)
    return frozenset(demanders)


def verify_equilibrium(eq, tol=EPS_EQ):
    """ Check the competitive-equilibrium conditions and report every
    violation, ordered by (condition, buyer, good). """
    market = eq.market
    prices, payoffs = eq.prices, eq.payoffs
    violations = []
    if prices.shape != (market.n_goods,) or payoffs.shape != (market.n_buyers,):
        return Verdict.from_violations([Violation('shape', detail='vector sizes do not match the market')])

    owners = {}
    for i, j in enumerate(eq.matching):
        if j is None:
            continue
        if not 0 <= j < market.n_goods:
            violations.append(Violation('matching', i, j, detail='good index out of range'))
        elif j in owners:
            violations.append(Violation('matching', i, j,
                                        detail='good also assigned to buyer %d' % owners[j]))
        else:
            owners[j] = i
    if violations:
        return Verdict.from_violations(violations)

    values = market.value_matrix(prices) if market.n_buyers and market.n_goods \
        else np.zeros((market.n_buyers, market.n_goods))
    for i in range(market.n_buyers):
        j = eq.matching[i]
        if j is not None:
            gap = abs(payoffs[i] - values[i, j])
            if gap > tol:
                violations.append(Violation('matched-payoff', i, j, gap,
                                            'payoff differs from utility of the matched good'))
        for g in range(market.n_goods):
            envy = values[i, g] - payoffs[i]
            if envy > tol:
                violations.append(Violation('envy', i, g, envy,
                                            'buyer prefers this good'))
        if j is None and abs(payoffs[i]) > tol:
            violations.append(Violation('unmatched-buyer', i, -1, abs(payoffs[i]),
                                        'unmatched buyer with nonzero payoff'))
        if payoffs[i] < -tol:
            violations.append(Violation('negative-payoff', i, -1, -payoffs[i],
                                        'negative payoff'))
    for j in range(market.n_goods):
        if j not in owners and abs(prices[j]) > tol:
            violations.append(Violation('unmatched-good', -1, j, abs(prices[j]),
                                        'unmatched good with nonzero price'))
        if prices[j] < -tol:
            violations.append(Violation('negative-price', -1, j, -prices[j],
                                        'negative price'))
    return Verdict.from_violations(violations)


def tight_graph(eq, eps=EPS_EQ):
    market = eq.market
    if market.n_buyers == 0 or market.n_goods == 0:
        return TightGraph(frozenset(), frozenset())
    values = market.value_matrix(eq.prices)
    edges = frozenset((i, j) for i in range(market.n_buyers)
                      for j in range(market.n_goods)
                      if abs(eq.payoffs[i] - values[i, j]) <= eps)
    matched = frozenset((i, j) for i, j in enumerate(eq.matching)
                        if j is not None)
    return TightGraph(edges | matched, matched)


# -------------------------- dummy padding ---------------------------------

def is_dummy(identifier):
    return identifier.startswith(DUMMY_PREFIX)


def pad_market(market):
    """ Add dummy buyers or goods with u(x) = -x until both sides have the
    same size. Real agents keep their indices. """
    extra_buyers = max(market.n_goods - market.n_buyers, 0)
    extra_goods = max(market.n_buyers - market.n_goods, 0)
    if not extra_buyers and not extra_goods:
        return market
    dummy = dummy_spec()
    buyers = market.buyers + tuple('%sb%d' % (DUMMY_PREFIX, k + 1)
                                   for k in range(extra_buyers))
    goods = market.goods + tuple('%sg%d' % (DUMMY_PREFIX, k + 1)
                                 for k in range(extra_goods))
    rows = [tuple(row) + (dummy,) * extra_goods for row in market.utilities]
    rows += [(dummy,) * len(goods)] * extra_buyers
    logger.debug('padded market with %d dummy buyers and %d dummy goods',
                 extra_buyers, extra_goods)
    return Market(buyers, goods, tuple(rows), trusted=True)


def pad_vector(vector, size):
    vector = np.asarray(vector, dtype=float)
    return np.concatenate([vector, np.zeros(size - vector.size)])


def strip_padding(eq, market):
    """ Restrict an equilibrium of pad_market(market) to the real agents. """
    n, m = market.n_buyers, market.n_goods
    matching = tuple(j if j is not None and j < m else None
                     for j in eq.matching[:n])
    return Equilibrium(market, eq.prices[:m], eq.payoffs[:n], matching, eq.side)


def realized_payoffs(market, prices, matching, true_market=None):
    """ Payoff each buyer obtains from its assigned good, 0 when unmatched,
    measured with the curves of true_market when given. """
    source = true_market if true_market is not None else market
    out = np.zeros(source.n_buyers)
    for i, j in enumerate(matching):
        if j is not None:
            out[i] = evaluate(source.spec(i, j), prices[j], extend=True)
    return out
