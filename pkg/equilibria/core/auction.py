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
Discrete ascending-price auction: at each step the prices of a minimal
over-demanded set of goods rise by one step. Also builds the four-buyer,
three-good market whose auction never settles, and counts the sign changes
that drive its demand oscillation.
"""
import bisect
import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from equilibria.constants import (EPS_EQ, AUCTION_STEP, AUCTION_MAX_STEPS,
                                  AUCTION_PRICE_GUARD, FINGERPRINT_FACTOR,
                                  FINGERPRINT_BAND)
from equilibria.exceptions import DomainError
from equilibria.core.market import Market
from equilibria.core.utility import Quasilinear, Oscillatory, domain_ceiling

logger = logging.getLogger(__name__)


@dataclass
class AuctionTrace:
    goods: Tuple[str, ...]
    samples: List[Tuple[int, Tuple[float, ...]]] = field(default_factory=list)
    events: List[Tuple[int, frozenset]] = field(default_factory=list)
    changed_steps: List[int] = field(default_factory=list)
    overlap_transitions: List[int] = field(default_factory=list)
    terminated: bool = False
    stalled: bool = False
    steps: int = 0

    @property
    def demand_change_count(self):
        return len(self.changed_steps)

    @property
    def final_prices(self):
        return np.array(self.samples[-1][1]) if self.samples else np.zeros(len(self.goods))

    def max_price(self, good=None):
        if not self.samples:
            return 0.0
        prices = self.samples[-1][1]
        return float(max(prices) if good is None else prices[good])


def demand_sets(values, tie, eps=EPS_EQ):
    """ Goods within tie of each buyer's best value, for buyers whose best
    value strictly beats the outside option. """
    out = []
    for row in values:
        best = row.max() if row.size else 0.0
        out.append(frozenset(np.nonzero(row >= best - tie)[0].tolist())
                   if best > eps else frozenset())
    return out


def _max_matching_size(demand, n_goods):
    rows = [d for d in demand if d]
    if not rows or not n_goods:
        return 0
    weights = np.zeros((len(rows), n_goods))
    for r, d in enumerate(rows):
        weights[r, list(d)] = 1.0
    r, c = linear_sum_assignment(weights, maximize=True)
    return int(weights[r, c].sum())


def minimal_over_demanded(demand, n_goods):
    """ First set T in (size, lexicographic) order strictly demanded by more
    than |T| buyers; empty when every demanding buyer can be served. """
    demanding = [d for d in demand if d]
    if _max_matching_size(demanding, n_goods) == len(demanding):
        return frozenset()
    goods = sorted(set().union(*demanding))
    for size in range(1, len(goods) + 1):
        for subset in itertools.combinations(goods, size):
            s = set(subset)
            if sum(1 for d in demanding if d <= s) > size:
                return frozenset(subset)
    return frozenset()


def over_demanded_set(market, prices, eps=EPS_EQ, tie=None):
    prices = np.asarray(prices, dtype=float)
    values = market.value_matrix(prices)
    return minimal_over_demanded(demand_sets(values, eps if tie is None else tie, eps),
                                 market.n_goods)


def demand_structure(values, previous, enter, leave, eps=EPS_EQ):
    """ Demanded (buyer, good) pairs with hysteresis: a pair joins within
    enter of the buyer's best value and stays until it falls more than
    leave behind. """
    pairs = set()
    for i, row in enumerate(values):
        best = row.max() if row.size else 0.0
        if best <= eps:
            continue
        for j in range(row.size):
            gap = best - row[j]
            if gap <= enter or (gap <= leave and (i, j) in previous):
                pairs.add((i, j))
    return frozenset(pairs)


def run_auction(market, step=AUCTION_STEP, max_steps=AUCTION_MAX_STEPS,
                eps=EPS_EQ, sample_every=1):
    """ Raise the prices of the minimal over-demanded set by step until no
    set is over-demanded, max_steps is reached or every over-demanded good
    sits at the price guard. """
    if step <= 0:
        raise DomainError('auction step must be positive')
    n_goods = market.n_goods
    tie = max(eps, step / 2)
    enter = FINGERPRINT_FACTOR * tie
    leave = max(FINGERPRINT_BAND * step, enter)
    ceiling = min([domain_ceiling(spec, AUCTION_PRICE_GUARD)
                   for row in market.utilities for spec in row] + [math.inf])
    prices = np.zeros(n_goods)
    trace = AuctionTrace(goods=market.goods,
                         overlap_transitions=[0] * n_goods)
    previous = None
    overlapping = None
    k = 0
    for k in range(max_steps):
        values = market.value_matrix(prices)
        fingerprint = demand_structure(values, previous or frozenset(),
                                       enter, leave, eps)
        if previous is not None and fingerprint != previous:
            trace.changed_steps.append(k)
            trace.events.append((k, fingerprint))
        elif previous is None:
            trace.events.append((k, fingerprint))
        previous = fingerprint

        low = prices.min() if n_goods else 0.0
        now = prices - low <= tie
        if overlapping is not None:
            for j in np.nonzero(now != overlapping)[0]:
                trace.overlap_transitions[j] += 1
        overlapping = now

        if k % sample_every == 0:
            trace.samples.append((k, tuple(prices.tolist())))

        over = minimal_over_demanded(demand_sets(values, tie, eps), n_goods)
        if not over:
            trace.terminated = True
            break
        logger.debug('step %d over-demanded goods %s', k, sorted(over))
        raised = False
        for j in over:
            target = min(prices[j] + step, ceiling)
            if target > prices[j]:
                prices[j] = target
                raised = True
        if not raised:
            trace.stalled = True
            logger.warning('auction stalled at the price guard after %d steps, '
                           'prices %s', k, prices.round(6).tolist())
            break
    else:
        k = max_steps
    trace.steps = k
    if not trace.samples or trace.samples[-1][0] != k:
        trace.samples.append((k, tuple(prices.tolist())))
    return trace


def example1_market(V=11.0):
    """ Four buyers, three goods. Buyer 1 values every good at V + 1 and
    buyers 2 and 3 value only goods 2 and 3, also at V + 1. Buyer 4 values
    good 1 at V and goods 2 and 3 through the oscillating sin and cos costs. """
    if not math.isfinite(V) or V < 2:
        raise DomainError('the oscillating market needs V >= 2, got %r' % V)
    top = Quasilinear(V + 1.0)
    zero = Quasilinear(0.0)
    rows = (
        (top, top, top),
        (zero, top, zero),
        (zero, zero, top),
        (Quasilinear(V), Oscillatory(V, 'sin'), Oscillatory(V, 'cos')),
    )
    return Market(('1', '2', '3', '4'), ('1', '2', '3'), rows)


def oscillation_oracle(V, price_cap, variant='sin'):
    """ Zeros of sin(V log(V - x)) (or cos) for x in [0, price_cap]. """
    if not math.isfinite(V) or V < 2:
        raise DomainError('V must be at least 2')
    if not 0 <= price_cap < V:
        raise DomainError('price cap must lie in [0, V)')
    if price_cap == 0:
        return 0
    offset = 0.0 if variant == 'sin' else math.pi / 2
    hi = (V * math.log(V) - offset) / math.pi
    lo = (V * math.log(V - price_cap) - offset) / math.pi
    return max(int(math.ceil(hi) - math.floor(lo) - 1), 0)


def write_trace_csv(trace, path):
    changed = sorted(trace.changed_steps)
    last = -1
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['step'] + ['price_good_%d' % (j + 1)
                                    for j in range(len(trace.goods))] + ['changed'])
        for k, prices in trace.samples:
            flag = int(bisect.bisect_right(changed, k) > bisect.bisect_right(changed, last))
            writer.writerow([k] + ['%.9f' % p for p in prices] + [flag])
            last = k


def read_trace_csv(path):
    """ Steps, price matrix (steps x goods) and change flags of a trace
    file. """
    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    steps = np.array([int(r[0]) for r in body], dtype=int)
    prices = np.array([[float(x) for x in r[1:-1]] for r in body]).reshape(len(body), len(header) - 2)
    changed = np.array([int(r[-1]) for r in body], dtype=int)
    return steps, prices, changed
