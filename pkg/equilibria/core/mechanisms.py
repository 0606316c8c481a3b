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
Mechanisms built on the lowest equilibrium: the reduction of two-sided
markets with transfers to buyer/good markets, markets with personalized
prices, and the sponsored-search auction that charges per click or per
impression.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from equilibria.constants import EPS_EQ, CPC, CPM, PER_CLICK, PER_IMPRESSION
from equilibria.exceptions import DomainError, ValidationError
from equilibria.core.market import Market
from equilibria.core.solver import solve_lowest
from equilibria.core.utility import (Identity, Scale, Transfer, Quasilinear,
                                     UtilitySpec, apply_price_map, evaluate, map_price,
                                     standard_cpc_spec, validate_spec,
                                     validate_price_map)
from equilibria.core.verification import VcgOutcome, vcg_oracle

logger = logging.getLogger(__name__)

CURVE_MATCH_TOL = 1e-9

SIDE_I = 'I'
SIDE_J = 'J'


# -------------------------- two-sided markets -----------------------------

@dataclass(frozen=True)
class TwoSidedMarket:
    """ Agents on side I pay a transfer x to agents on side J. u[i][j] is
    the payoff of i as a function of x, q[i][j] the payoff of j as a
    function of -x. """
    agents_i: Tuple[str, ...]
    agents_j: Tuple[str, ...]
    buyer_utilities: Tuple[Tuple[UtilitySpec, ...], ...]
    seller_utilities: Tuple[Tuple[UtilitySpec, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'agents_i', tuple(self.agents_i))
        object.__setattr__(self, 'agents_j', tuple(self.agents_j))
        for name in ('buyer_utilities', 'seller_utilities'):
            rows = tuple(tuple(r) for r in getattr(self, name))
            object.__setattr__(self, name, rows)
            if len(rows) != len(self.agents_i) or any(len(r) != len(self.agents_j) for r in rows):
                raise ValidationError('%s must be a %d x %d matrix'
                                      % (name, len(self.agents_i), len(self.agents_j)))
            for i, row in enumerate(rows):
                for j, spec in enumerate(row):
                    verdict = validate_spec(spec)
                    if not verdict.ok:
                        raise ValidationError('%s of %s and %s is not invertible: %s'
                                              % (name, self.agents_i[i], self.agents_j[j],
                                                 verdict.describe()))


@dataclass(frozen=True)
class TwoSidedOutcome:
    transfers: Dict[Tuple[int, int], float]
    payoffs_i: np.ndarray
    payoffs_j: np.ndarray


def reduce_two_sided(ts, side=SIDE_I):
    """ Buyer/good market whose goods are the agents of the other side and
    whose price of a good is that agent's payoff. """
    n, m = len(ts.agents_i), len(ts.agents_j)
    if side == SIDE_I:
        rows = [[apply_price_map(ts.buyer_utilities[i][j],
                                 Transfer(ts.seller_utilities[i][j]))
                 for j in range(m)] for i in range(n)]
        return Market(ts.agents_i, ts.agents_j, rows, trusted=True)
    if side == SIDE_J:
        rows = [[apply_price_map(ts.seller_utilities[i][j],
                                 Transfer(ts.buyer_utilities[i][j]))
                 for i in range(n)] for j in range(m)]
        return Market(ts.agents_j, ts.agents_i, rows, trusted=True)
    raise ValueError('side must be %r or %r' % (SIDE_I, SIDE_J))


def two_sided_outcome(ts, eq, side=SIDE_I):
    """ Transfers from side I to side J and the payoffs of both sides for an
    equilibrium of the reduced market. """
    transfers = {}
    for a, b in enumerate(eq.matching):
        if b is None:
            continue
        if side == SIDE_I:
            i, j = a, b
            transfers[(i, j)] = Transfer(ts.seller_utilities[i][j]).apply(eq.prices[j])
        else:
            j, i = a, b
            transfers[(i, j)] = -Transfer(ts.buyer_utilities[i][j]).apply(eq.prices[i])
    if side == SIDE_I:
        return TwoSidedOutcome(transfers, np.array(eq.payoffs), np.array(eq.prices))
    return TwoSidedOutcome(transfers, np.array(eq.prices), np.array(eq.payoffs))


# -------------------------- price discrimination --------------------------

def discriminated_market(market, maps):
    """ Market whose buyer i sees good j at the personalized price
    g_ij(p_j). The maps must be fixed before any curve is read. """
    maps = tuple(tuple(row) for row in maps)
    if len(maps) != market.n_buyers or any(len(r) != market.n_goods for r in maps):
        raise ValidationError('price maps must form a %d x %d matrix'
                              % (market.n_buyers, market.n_goods))
    for i, row in enumerate(maps):
        for j, price_map in enumerate(row):
            verdict = validate_price_map(price_map)
            if not verdict.ok:
                raise ValidationError('price map of buyer %s for good %s: %s'
                                      % (market.buyers[i], market.goods[j],
                                         verdict.describe()))
    return market.map_specs(lambda i, j, spec: apply_price_map(spec, maps[i][j]))


def observed_prices(maps, prices):
    return np.array([[map_price(maps[i][j], prices[j]) for j in range(len(prices))]
                     for i in range(len(maps))])


# -------------------------- ad auction ------------------------------------

@dataclass(frozen=True)
class LabeledPrice:
    amount: float
    unit: str


@dataclass(frozen=True)
class AdvertiserSpec:
    """ Reported curves per slot, in the advertiser's payment unit. Standard
    advertisers also carry their click value (or impression value for CPM)
    and, for CPC, their clickthrough beliefs. """
    id: str
    mode: str
    curves: Tuple[UtilitySpec, ...]
    values: Optional[Tuple[float, ...]] = None
    ctrs: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.values is None:
            return
        if len(self.values) != len(self.curves):
            raise ValidationError('advertiser %s has %d values for %d slots'
                                  % (self.id, len(self.values), len(self.curves)))
        if self.mode not in (CPC, CPM):
            raise ValidationError('unknown payment mode %r' % self.mode)
        if self.mode == CPC and self.ctrs is None:
            return
        if self.mode == CPC and len(self.ctrs) != len(self.values):
            raise ValidationError('advertiser %s has %d clickthrough rates for %d slots'
                                  % (self.id, len(self.ctrs), len(self.values)))
        for j, (v, curve) in enumerate(zip(self.values, self.curves)):
            expected = self._standard_curve(j)
            for x in (0.0, v / 2, v):
                if abs(evaluate(curve, x, extend=True)
                       - evaluate(expected, x, extend=True)) > CURVE_MATCH_TOL:
                    raise ValidationError(
                        'advertiser %s: curve for slot %d does not match its '
                        'declared value %g' % (self.id, j, v))

    def _standard_curve(self, j):
        if self.mode == CPM:
            return Quasilinear(self.values[j])
        try:
            return standard_cpc_spec(self.values[j], self.ctrs[j])
        except DomainError as e:
            raise ValidationError('advertiser %s: %s' % (self.id, e))

    @classmethod
    def standard(cls, id, mode, values, ctrs=None):
        values = tuple(float(v) for v in values)
        if mode == CPC:
            if ctrs is None:
                raise ValidationError('CPC advertiser %s needs clickthrough rates' % id)
            ctrs = tuple(float(c) for c in ctrs)
            curves = tuple(standard_cpc_spec(v, c) for v, c in zip(values, ctrs))
        elif mode == CPM:
            curves = tuple(Quasilinear(v) for v in values)
        else:
            raise ValidationError('unknown payment mode %r' % mode)
        return cls(str(id), mode, curves, values, ctrs)

    @property
    def is_standard(self):
        return self.values is not None and (self.mode == CPM or self.ctrs is not None)

    def expected_value(self, j):
        if self.mode == CPC:
            return self.ctrs[j] * self.values[j]
        return self.values[j]

    def agrees(self, engine_ctrs, tol=1e-12):
        if self.mode == CPM:
            return True
        return self.ctrs is not None and all(abs(a - b) <= tol
                                             for a, b in zip(self.ctrs, engine_ctrs))


@dataclass(frozen=True)
class AdAuctionConfig:
    slots: Tuple[str, ...]
    advertisers: Tuple[AdvertiserSpec, ...]
    ctr: Tuple[Tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'slots', tuple(str(s) for s in self.slots))
        object.__setattr__(self, 'advertisers', tuple(self.advertisers))
        object.__setattr__(self, 'ctr', tuple(tuple(float(c) for c in row) for row in self.ctr))
        if len(self.ctr) != len(self.advertisers):
            raise ValidationError('need one clickthrough row per advertiser')
        for adv, row in zip(self.advertisers, self.ctr):
            if len(row) != len(self.slots) or len(adv.curves) != len(self.slots):
                raise ValidationError('advertiser %s must cover %d slots'
                                      % (adv.id, len(self.slots)))
            if any(not 0 < c <= 1 for c in row):
                raise ValidationError('clickthrough rates of %s must lie in (0, 1]' % adv.id)
            if adv.mode not in (CPC, CPM):
                raise ValidationError('unknown payment mode %r' % adv.mode)

    def engine_maps(self):
        """ Per-click advertisers see p / c_hat, per-impression ones see p.
        Built from modes and engine rates only. """
        return tuple(tuple(Scale(c) if adv.mode == CPC else Identity() for c in row)
                     for adv, row in zip(self.advertisers, self.ctr))

    def reported_market(self):
        return Market(tuple(a.id for a in self.advertisers), self.slots,
                      tuple(a.curves for a in self.advertisers))


@dataclass(frozen=True, eq=False)
class AdAuctionOutcome:
    equilibrium: object
    maps: Tuple[Tuple[object, ...], ...]
    assignment: Dict[str, Optional[str]]
    base_prices: np.ndarray
    observed: Tuple[Tuple[LabeledPrice, ...], ...]

    def charged(self, advertiser):
        """ Observed price the advertiser pays for its slot, or None. """
        i = list(self.assignment).index(advertiser)
        j = self.equilibrium.matching[i]
        return None if j is None else self.observed[i][j]


def run_ad_auction(config, eps=EPS_EQ):
    maps = config.engine_maps()
    market = discriminated_market(config.reported_market(), maps)
    eq = solve_lowest(market, eps=eps)
    units = [PER_CLICK if a.mode == CPC else PER_IMPRESSION for a in config.advertisers]
    seen = observed_prices(maps, eq.prices) if config.advertisers else np.zeros((0, len(config.slots)))
    observed = tuple(tuple(LabeledPrice(float(seen[i, j]), units[i])
                           for j in range(len(config.slots)))
                     for i in range(len(config.advertisers)))
    assignment = {a.id: (None if eq.matching[i] is None else config.slots[eq.matching[i]])
                  for i, a in enumerate(config.advertisers)}
    logger.debug('ad auction base prices %s', eq.prices.tolist())
    return AdAuctionOutcome(eq, maps, assignment, np.array(eq.prices), observed)


@dataclass(frozen=True, eq=False)
class WelfareReport:
    revenue: float
    utilities: Dict[str, float]
    coalition_welfare: float
    assignment_value: float
    vcg: Optional[VcgOutcome] = None
    vcg_welfare_match: Optional[bool] = None
    vcg_payment_match: Optional[bool] = None


def welfare_report(config, outcome, coalition=None, eps=EPS_EQ):
    """ Engine revenue plus the expected utilities of a coalition of
    standard advertisers whose beliefs agree with the engine, and a VCG
    comparison when every advertiser is standard and agrees. """
    eq = outcome.equilibrium
    matched = [(i, j) for i, j in enumerate(eq.matching) if j is not None]
    revenue = float(sum(eq.prices[j] for _, j in matched))
    eligible = [i for i, a in enumerate(config.advertisers)
                if a.is_standard and a.agrees(config.ctr[i])]
    if coalition is None:
        members = eligible
    else:
        ids = [a.id for a in config.advertisers]
        members = [ids.index(c) if isinstance(c, str) else int(c) for c in coalition]
        if not set(members) <= set(eligible):
            raise ValueError('coalition members must be standard advertisers '
                             'agreeing with the engine')
    owned = dict(matched)
    utilities = {}
    for i in members:
        adv = config.advertisers[i]
        j = owned.get(i)
        utilities[adv.id] = 0.0 if j is None else adv.expected_value(j) - float(eq.prices[j])

    report = dict(revenue=revenue, utilities=utilities,
                  coalition_welfare=revenue + sum(utilities.values()),
                  assignment_value=0.0)
    if config.advertisers and len(eligible) == len(config.advertisers):
        values = np.array([[a.expected_value(j) for j in range(len(config.slots))]
                           for a in config.advertisers])
        vcg = vcg_oracle(values)
        value = float(sum(values[i, j] for i, j in matched))
        report.update(assignment_value=value, vcg=vcg,
                      vcg_welfare_match=abs(value - vcg.welfare) <= eps,
                      vcg_payment_match=bool(np.allclose(
                          eq.prices, vcg.good_payments(len(config.slots)),
                          rtol=0, atol=eps)))
    return WelfareReport(**report)
