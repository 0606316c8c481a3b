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
JSON market documents and equilibrium files.

A market document lists buyers, goods and a matrix of tagged utility
curves, optionally with personalized price maps, an ad-auction block
(payment modes and engine clickthrough rates) and a two-sided block (the
curves of the receiving side).
"""
import json
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from equilibria.constants import (SCHEMA_VERSION, PRICE_DECIMALS, CPC, CPM,
                                  BUDGET_SLOPE)
from equilibria.exceptions import ParseError, ValidationError
from equilibria.core.market import Equilibrium, Market
from equilibria.core.utility import (Quasilinear, PiecewiseLinear, Budgeted,
                                     Oscillatory, Shifted, PriceMapped,
                                     Identity, Scale, PiecewiseLinearIncreasing,
                                     Transfer, financed_spec)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdAuctionBlock:
    modes: Tuple[str, ...]
    ctr: Tuple[Tuple[float, ...], ...]
    values: Optional[Tuple[Tuple[float, ...], ...]] = None
    beliefs: Optional[Tuple[Tuple[float, ...], ...]] = None


@dataclass(frozen=True)
class MarketDocument:
    market: Market
    schema: int = SCHEMA_VERSION
    price_maps: Optional[Tuple[Tuple[object, ...], ...]] = None
    ad_auction: Optional[AdAuctionBlock] = None
    seller_utilities: Optional[Tuple[Tuple[object, ...], ...]] = None

    def solving_market(self):
        """ The market the solvers see: personalized when maps are given. """
        if self.price_maps is None:
            return self.market
        from equilibria.core.mechanisms import discriminated_market
        return discriminated_market(self.market, self.price_maps)

    def ad_auction_config(self):
        from equilibria.core.mechanisms import AdAuctionConfig, AdvertiserSpec
        if self.ad_auction is None:
            raise ValidationError('document has no ad_auction block')
        block = self.ad_auction
        advertisers = []
        for i, buyer in enumerate(self.market.buyers):
            values = tuple(block.values[i]) if block.values else None
            beliefs = tuple(block.beliefs[i]) if block.beliefs else None
            advertisers.append(AdvertiserSpec(buyer, block.modes[i],
                                              self.market.utilities[i],
                                              values, beliefs))
        return AdAuctionConfig(self.market.goods, tuple(advertisers), block.ctr)

    def two_sided_market(self):
        from equilibria.core.mechanisms import TwoSidedMarket
        if self.seller_utilities is None:
            raise ValidationError('document has no two_sided block')
        return TwoSidedMarket(self.market.buyers, self.market.goods,
                              self.market.utilities, self.seller_utilities)


# -------------------------- parsing ---------------------------------------

def _need(obj, key, where):
    if not isinstance(obj, dict):
        raise ParseError('%s: expected an object' % where)
    if key not in obj:
        raise ParseError('%s: missing field %r' % (where, key))
    return obj[key]


def _number(obj, key, where, default=None):
    if default is not None and key not in obj:
        return default
    value = _need(obj, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError('%s.%s: expected a number' % (where, key))
    return float(value)


def _points(obj, where):
    raw = _need(obj, 'points', where)
    try:
        return tuple((float(x), float(y)) for x, y in raw)
    except (TypeError, ValueError):
        raise ParseError('%s.points: expected a list of [price, value] pairs' % where)


def _optional_slope(obj, key, where):
    return _number(obj, key, where) if key in obj else None


def parse_spec(obj, where='spec'):
    kind = _need(obj, 'type', where)
    if kind == 'quasilinear':
        return Quasilinear(_number(obj, 'v', where))
    if kind == 'piecewise_linear':
        return PiecewiseLinear(_points(obj, where),
                               _optional_slope(obj, 'left_slope', where),
                               _optional_slope(obj, 'right_slope', where))
    if kind == 'budgeted':
        return Budgeted(_number(obj, 'v', where), _number(obj, 'b', where),
                        _number(obj, 'K', where, default=BUDGET_SLOPE))
    if kind == 'oscillatory':
        variant = obj.get('variant', 'sin')
        return Oscillatory(_number(obj, 'V', where), str(variant))
    if kind == 'financed':
        return financed_spec(_number(obj, 'value', where), _number(obj, 'budget', where),
                             _number(obj, 'rate', where))
    if kind == 'shifted':
        return Shifted(parse_spec(_need(obj, 'inner', where), where + '.inner'),
                       _number(obj, 'price_shift', where),
                       _number(obj, 'payoff_shift', where))
    if kind == 'price_mapped':
        return PriceMapped(parse_spec(_need(obj, 'inner', where), where + '.inner'),
                           parse_map(_need(obj, 'map', where), where + '.map'))
    raise ValidationError('%s: unknown utility type %r' % (where, kind))


def parse_map(obj, where='map'):
    kind = _need(obj, 'type', where)
    if kind == 'identity':
        return Identity()
    if kind == 'scale':
        return Scale(_number(obj, 'c', where))
    if kind == 'piecewise_increasing':
        return PiecewiseLinearIncreasing(_points(obj, where),
                                         _optional_slope(obj, 'left_slope', where),
                                         _optional_slope(obj, 'right_slope', where))
    if kind == 'transfer':
        return Transfer(parse_spec(_need(obj, 'seller', where), where + '.seller'))
    raise ValidationError('%s: unknown price map type %r' % (where, kind))


def _matrix(raw, n, m, parse, where):
    if not isinstance(raw, list) or len(raw) != n:
        raise ParseError('%s: expected %d rows' % (where, n))
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError('%s[%d]: expected %d entries' % (where, i, m))
        rows.append(tuple(parse(cell, '%s[%d][%d]' % (where, i, j))
                          for j, cell in enumerate(row)))
    return tuple(rows)


def _number_matrix(raw, n, m, where):
    def cell(value, at):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError('%s: expected a number' % at)
        return float(value)
    return _matrix(raw, n, m, cell, where)


def document_from_dict(data):
    if not isinstance(data, dict):
        raise ParseError('document: expected an object')
    schema = int(data.get('schema', SCHEMA_VERSION))
    if schema != SCHEMA_VERSION:
        raise ValidationError('unsupported schema version %r' % schema)
    buyers = [str(b) for b in _need(data, 'buyers', 'document')]
    goods = [str(g) for g in _need(data, 'goods', 'document')]
    n, m = len(buyers), len(goods)
    utilities = _matrix(_need(data, 'utilities', 'document'), n, m, parse_spec, 'utilities')
    market = Market(buyers, goods, utilities)

    price_maps = None
    if data.get('price_maps') is not None:
        price_maps = _matrix(data['price_maps'], n, m, parse_map, 'price_maps')

    ad_auction = None
    if data.get('ad_auction') is not None:
        block = data['ad_auction']
        modes = tuple(str(x) for x in _need(block, 'modes', 'ad_auction'))
        if len(modes) != n or any(x not in (CPC, CPM) for x in modes):
            raise ValidationError('ad_auction.modes: expected %d entries of %s or %s'
                                  % (n, CPC, CPM))
        ctr = _number_matrix(_need(block, 'ctr', 'ad_auction'), n, m, 'ad_auction.ctr')
        values = beliefs = None
        if block.get('values') is not None:
            values = _number_matrix(block['values'], n, m, 'ad_auction.values')
        if block.get('beliefs') is not None:
            beliefs = _number_matrix(block['beliefs'], n, m, 'ad_auction.beliefs')
        ad_auction = AdAuctionBlock(modes, ctr, values, beliefs)

    sellers = None
    if data.get('two_sided') is not None:
        raw = _need(data['two_sided'], 'seller_utilities', 'two_sided')
        sellers = _matrix(raw, n, m, parse_spec, 'two_sided.seller_utilities')

    return MarketDocument(market, schema, price_maps, ad_auction, sellers)


def load_market(path):
    """ Read and validate a market document. """
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError('%s:%d:%d: %s' % (path, e.lineno, e.colno, e.msg))
    except OSError as e:
        raise ParseError('%s: %s' % (path, e.strerror))
    doc = document_from_dict(data)
    logger.debug('loaded %s with %d buyers and %d goods', path,
                 doc.market.n_buyers, doc.market.n_goods)
    return doc


# -------------------------- serialization ---------------------------------

def spec_to_dict(spec):
    if isinstance(spec, Quasilinear):
        return {'type': 'quasilinear', 'v': spec.v}
    if isinstance(spec, PiecewiseLinear):
        out = {'type': 'piecewise_linear', 'points': [list(p) for p in spec.points]}
        if spec.left_slope is not None:
            out['left_slope'] = spec.left_slope
        if spec.right_slope is not None:
            out['right_slope'] = spec.right_slope
        return out
    if isinstance(spec, Budgeted):
        return {'type': 'budgeted', 'v': spec.v, 'b': spec.b, 'K': spec.K}
    if isinstance(spec, Oscillatory):
        return {'type': 'oscillatory', 'V': spec.V, 'variant': spec.variant}
    if isinstance(spec, Shifted):
        return {'type': 'shifted', 'inner': spec_to_dict(spec.inner),
                'price_shift': spec.price_shift, 'payoff_shift': spec.payoff_shift}
    if isinstance(spec, PriceMapped):
        return {'type': 'price_mapped', 'inner': spec_to_dict(spec.inner),
                'map': map_to_dict(spec.price_map)}
    raise ValidationError('cannot serialize %r' % (spec,))


def map_to_dict(price_map):
    if isinstance(price_map, Identity):
        return {'type': 'identity'}
    if isinstance(price_map, Scale):
        return {'type': 'scale', 'c': price_map.c}
    if isinstance(price_map, PiecewiseLinearIncreasing):
        out = {'type': 'piecewise_increasing',
               'points': [list(p) for p in price_map.points]}
        if price_map.left_slope is not None:
            out['left_slope'] = price_map.left_slope
        if price_map.right_slope is not None:
            out['right_slope'] = price_map.right_slope
        return out
    if isinstance(price_map, Transfer):
        return {'type': 'transfer', 'seller': spec_to_dict(price_map.seller)}
    raise ValidationError('cannot serialize %r' % (price_map,))


def market_to_dict(market):
    return {'schema': SCHEMA_VERSION,
            'buyers': list(market.buyers),
            'goods': list(market.goods),
            'utilities': [[spec_to_dict(s) for s in row] for row in market.utilities]}


def document_to_dict(doc):
    data = market_to_dict(doc.market)
    data['schema'] = doc.schema
    if doc.price_maps is not None:
        data['price_maps'] = [[map_to_dict(g) for g in row] for row in doc.price_maps]
    if doc.ad_auction is not None:
        block = doc.ad_auction
        data['ad_auction'] = {'modes': list(block.modes),
                              'ctr': [list(r) for r in block.ctr]}
        if block.values is not None:
            data['ad_auction']['values'] = [list(r) for r in block.values]
        if block.beliefs is not None:
            data['ad_auction']['beliefs'] = [list(r) for r in block.beliefs]
    if doc.seller_utilities is not None:
        data['two_sided'] = {'seller_utilities': [[spec_to_dict(s) for s in row]
                                                  for row in doc.seller_utilities]}
    return data


def dump_market(doc):
    """ Inverse of load_market, as JSON text. """
    return json.dumps(document_to_dict(doc), indent=2) + '\n'


def write_market(doc, path):
    with open(path, 'w') as f:
        f.write(dump_market(doc))


# -------------------------- fixed-decimal output --------------------------

def _fixed(x):
    if not math.isfinite(x):
        raise ValueError('cannot print non-finite number %r' % x)
    text = '%.*f' % (PRICE_DECIMALS, x)
    if text.lstrip('-').strip('0.') == '':
        text = text.lstrip('-')
    return text


def to_json(value, indent=0):
    """ JSON text with every float printed at fixed precision so that
    identical results give byte-identical output. """
    pad = '  ' * (indent + 1)
    end = '  ' * indent
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = ['%s%s: %s' % (pad, json.dumps(str(k)), to_json(v, indent + 1))
                 for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + end + '}'
    if isinstance(value, (list, tuple)):
        if not value:
            return '[]'
        items = [pad + to_json(v, indent + 1) for v in value]
        return '[\n' + ',\n'.join(items) + '\n' + end + ']'
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    return _fixed(float(value))


def equilibrium_to_dict(eq):
    market = eq.market
    return {'side': eq.side,
            'prices': {g: float(p) for g, p in zip(market.goods, eq.prices)},
            'payoffs': {b: float(u) for b, u in zip(market.buyers, eq.payoffs)},
            'matching': {b: (None if j is None else market.goods[j])
                         for b, j in zip(market.buyers, eq.matching)}}


def equilibrium_from_dict(data, market):
    try:
        prices = [float(data['prices'][g]) for g in market.goods]
        payoffs = [float(data['payoffs'][b]) for b in market.buyers]
        matching = []
        for b in market.buyers:
            good = data['matching'].get(b)
            matching.append(None if good is None else market.good_index(good))
    except (KeyError, TypeError, AttributeError) as e:
        raise ParseError('equilibrium: missing or malformed entry %s' % e)
    except ValueError as e:
        raise ValidationError('equilibrium: %s' % e)
    return Equilibrium(market, prices, payoffs, matching, data.get('side'))


def load_equilibrium(path, market):
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError('%s:%d:%d: %s' % (path, e.lineno, e.colno, e.msg))
    except OSError as e:
        raise ParseError('%s: %s' % (path, e.strerror))
    return equilibrium_from_dict(data, market)
