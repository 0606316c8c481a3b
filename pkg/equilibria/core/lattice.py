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
Meet and join of equilibria of one market, and the path of equilibria
between the lowest and the highest one.
"""
import logging

import numpy as np

from equilibria.constants import EPS_EQ
from equilibria.exceptions import DomainError, MarketMismatch, MatchingFailure
from equilibria.core.market import Equilibrium, verify_equilibrium
from equilibria.core.solver import (BoundEnvelope, INFEASIBLE, solve_lowest,
                                    solve_highest, solve_lowest_bounded,
                                    supporting_matching)

logger = logging.getLogger(__name__)


def _same_market(a, b):
    if a.market is not b.market and a.market != b.market:
        raise MarketMismatch('equilibria belong to different markets')


def _combine(a, prices, payoffs, matching, eps):
    eq = Equilibrium(a.market, prices, payoffs, matching)
    if verify_equilibrium(eq, eps).ok:
        return eq
    # Payoff ties within eps can hand one good to two buyers.
    logger.debug('case-rule matching rejected, rebuilding on the tight graph')
    matching = supporting_matching(a.market, prices, payoffs, eps)
    return Equilibrium(a.market, prices, payoffs, matching)


def meet(a, b, eps=EPS_EQ):
    """ Lower prices, higher payoffs. Each buyer keeps the good it holds in
    the equilibrium where its payoff is higher, ties going to the first. """
    _same_market(a, b)
    prices = np.minimum(a.prices, b.prices)
    payoffs = np.maximum(a.payoffs, b.payoffs)
    matching = [a.matching[i] if a.payoffs[i] >= b.payoffs[i] - eps
                else b.matching[i] for i in range(len(payoffs))]
    return _combine(a, prices, payoffs, matching, eps)


def join(a, b, eps=EPS_EQ):
    """ Higher prices, lower payoffs; ties go to the second equilibrium. """
    _same_market(a, b)
    prices = np.maximum(a.prices, b.prices)
    payoffs = np.minimum(a.payoffs, b.payoffs)
    matching = [a.matching[i] if a.payoffs[i] < b.payoffs[i] - eps
                else b.matching[i] for i in range(len(payoffs))]
    return _combine(a, prices, payoffs, matching, eps)


def interpolate_continuum(market, t, eps=EPS_EQ, max_size=None,
                          lowest=None, highest=None):
    """ Lowest equilibrium whose prices are at least
    (1 - t) * lowest prices + t * highest prices. """
    if not 0.0 <= t <= 1.0:
        raise DomainError('t must lie in [0, 1], got %r' % t)
    lowest = lowest or solve_lowest(market, eps=eps, max_size=max_size)
    highest = highest or solve_highest(market, eps=eps, max_size=max_size)
    bound = (1.0 - t) * lowest.prices + t * highest.prices
    bounds = BoundEnvelope(np.maximum(bound, 0.0), np.zeros(market.n_buyers))
    eq = solve_lowest_bounded(market, bounds, eps=eps, max_size=max_size)
    if eq is INFEASIBLE:
        raise MatchingFailure('no equilibrium above the interpolated prices '
                              'at t=%g' % t)
    return eq.with_side('continuum')
