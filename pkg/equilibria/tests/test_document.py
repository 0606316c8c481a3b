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
import json

import pytest

from equilibria.constants import CPC, CPM
from equilibria.exceptions import ParseError, ValidationError
from equilibria.core.document import (load_market, dump_market, write_market,
                                      document_from_dict, to_json,
                                      equilibrium_to_dict, load_equilibrium,
                                      parse_spec)
from equilibria.core.market import verify_equilibrium
from equilibria.core.solver import solve_lowest
from equilibria.core.utility import (Quasilinear, PiecewiseLinear, Budgeted,
                                     Oscillatory, Shifted, PriceMapped, Scale,
                                     Transfer, PiecewiseLinearIncreasing)

QUASILINEAR = {'schema': 1, 'buyers': ['1', '2'], 'goods': ['g1'],
               'utilities': [[{'type': 'quasilinear', 'v': 5}],
                             [{'type': 'quasilinear', 'v': 3}]]}


def write(tmp_path, data, name='market.json'):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def ad_document(click_value=10):
    cpc = [{'type': 'piecewise_linear', 'points': [[0, c * v]],
            'left_slope': -c, 'right_slope': -c}
           for v, c in ((click_value, 0.5), (8, 0.2))]
    return {
        'schema': 1,
        'buyers': ['a', 'b'],
        'goods': ['x', 'y'],
        'utilities': [cpc, [{'type': 'quasilinear', 'v': 3},
                            {'type': 'quasilinear', 'v': 2}]],
        'ad_auction': {'modes': [CPC, CPM], 'ctr': [[0.5, 0.2], [1, 1]],
                       'values': [[10, 8], [3, 2]], 'beliefs': [[0.5, 0.2], [1, 1]]},
    }


def full_document():
    return {
        'schema': 1,
        'buyers': ['a', 'b'],
        'goods': ['x', 'y'],
        'utilities': [
            [{'type': 'piecewise_linear', 'points': [[0, 6], [2, 2]], 'right_slope': -1},
             {'type': 'budgeted', 'v': 5, 'b': 2, 'K': 4}],
            [{'type': 'shifted', 'inner': {'type': 'oscillatory', 'V': 11, 'variant': 'cos'},
              'price_shift': 1, 'payoff_shift': 0.5},
             {'type': 'price_mapped', 'inner': {'type': 'quasilinear', 'v': 4},
              'map': {'type': 'piecewise_increasing', 'points': [[0, 0], [1, 2]]}}],
        ],
        'price_maps': [[{'type': 'scale', 'c': 0.5}, {'type': 'identity'}],
                       [{'type': 'identity'},
                        {'type': 'transfer', 'seller': {'type': 'quasilinear', 'v': 0}}]],
        'ad_auction': {'modes': [CPC, CPM], 'ctr': [[0.5, 0.2], [1, 1]],
                       'beliefs': [[0.5, 0.2], [1, 1]]},
        'two_sided': {'seller_utilities': [[{'type': 'quasilinear', 'v': -1}] * 2] * 2},
    }


class TestLoad:

    def test_quasilinear(self, tmp_path):
        doc = load_market(write(tmp_path, QUASILINEAR))
        assert doc.market.buyers == ('1', '2')
        assert doc.market.utilities[0][0] == Quasilinear(5.0)
        assert doc.price_maps is None and doc.ad_auction is None

    def test_all_tags(self, tmp_path):
        doc = load_market(write(tmp_path, full_document()))
        row0, row1 = doc.market.utilities
        assert row0[0] == PiecewiseLinear(((0.0, 6.0), (2.0, 2.0)), None, -1.0)
        assert row0[1] == Budgeted(5.0, 2.0, 4.0)
        assert row1[0] == Shifted(Oscillatory(11.0, 'cos'), 1.0, 0.5)
        assert row1[1] == PriceMapped(Quasilinear(4.0),
                                      PiecewiseLinearIncreasing(((0.0, 0.0), (1.0, 2.0))))
        assert doc.price_maps[0][0] == Scale(0.5)
        assert doc.price_maps[1][1] == Transfer(Quasilinear(0.0))
        assert doc.ad_auction.modes == (CPC, CPM)

    def test_invalid_oscillatory(self, tmp_path):
        data = dict(QUASILINEAR, utilities=[[{'type': 'oscillatory', 'V': 1.0, 'variant': 'sin'}],
                                            [{'type': 'quasilinear', 'v': 3}]])
        with pytest.raises(ValidationError, match='buyer 1 for good g1'):
            load_market(write(tmp_path, data))

    def test_truncated(self, tmp_path):
        text = json.dumps(QUASILINEAR)[:40]
        with pytest.raises(ParseError, match=r':1:\d+'):
            load_market(write(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_market(str(tmp_path / 'absent.json'))

    def test_unknown_tag(self):
        with pytest.raises(ValidationError, match='unknown utility type'):
            parse_spec({'type': 'cubic'})

    def test_missing_field(self):
        with pytest.raises(ParseError, match=r"utilities\[0\]\[0\]: missing field 'v'"):
            document_from_dict(dict(QUASILINEAR, utilities=[[{'type': 'quasilinear'}],
                                                            [{'type': 'quasilinear', 'v': 3}]]))

    def test_wrong_shape(self):
        with pytest.raises(ParseError):
            document_from_dict(dict(QUASILINEAR, utilities=[[{'type': 'quasilinear', 'v': 5}]]))

    def test_schema_version(self):
        with pytest.raises(ValidationError):
            document_from_dict(dict(QUASILINEAR, schema=2))

    def test_bad_mode(self):
        data = dict(QUASILINEAR, ad_auction={'modes': ['CPX', CPC], 'ctr': [[1], [1]]})
        with pytest.raises(ValidationError):
            document_from_dict(data)

    def test_financed_sugar(self):
        spec = parse_spec({'type': 'financed', 'value': 10, 'budget': 4, 'rate': 0.5})
        assert isinstance(spec, PiecewiseLinear)


class TestRoundTrip:

    def test_full_document(self, tmp_path):
        first = load_market(write(tmp_path, full_document()))
        text = dump_market(first)
        second = load_market(write(tmp_path, text, 'again.json'))
        assert second == first
        assert dump_market(second) == text

    def test_write_market(self, tmp_path):
        doc = load_market(write(tmp_path, QUASILINEAR))
        path = tmp_path / 'out.json'
        write_market(doc, str(path))
        assert load_market(str(path)) == doc


class TestDocumentViews:

    def test_solving_market_applies_maps(self, tmp_path):
        doc = load_market(write(tmp_path, full_document()))
        market = doc.solving_market()
        assert market.utilities[0][0] == PriceMapped(doc.market.utilities[0][0], Scale(0.5))

    def test_ad_auction_config(self, tmp_path):
        config = load_market(write(tmp_path, ad_document())).ad_auction_config()
        assert [a.id for a in config.advertisers] == ['a', 'b']
        assert config.advertisers[0].ctrs == (0.5, 0.2)
        assert config.advertisers[1].is_standard

    def test_ad_curves_must_match_declared_values(self, tmp_path):
        doc = load_market(write(tmp_path, ad_document(click_value=20)))
        with pytest.raises(ValidationError):
            doc.ad_auction_config()

    def test_missing_blocks(self, tmp_path):
        doc = load_market(write(tmp_path, QUASILINEAR))
        with pytest.raises(ValidationError):
            doc.ad_auction_config()
        with pytest.raises(ValidationError):
            doc.two_sided_market()

    def test_two_sided(self, tmp_path):
        ts = load_market(write(tmp_path, full_document())).two_sided_market()
        assert ts.agents_j == ('x', 'y')


class TestEquilibriumFiles:

    def test_fixed_decimals(self, second_price):
        text = to_json(equilibrium_to_dict(solve_lowest(second_price)))
        assert '"g1": 3.000000000' in text
        assert '"2": null' in text
        assert '"side": "lowest"' in text

    def test_negative_zero(self):
        assert to_json(-0.0) == '0.000000000'
        assert to_json([]) == '[]'

    def test_non_finite(self):
        with pytest.raises(ValueError):
            to_json(float('nan'))

    def test_load(self, tmp_path, second_price):
        eq = solve_lowest(second_price)
        path = write(tmp_path, to_json(equilibrium_to_dict(eq)), 'eq.json')
        loaded = load_equilibrium(path, second_price)
        assert loaded.same_as(eq)
        assert loaded.matching == eq.matching
        assert verify_equilibrium(loaded).ok

    def test_load_unknown_good(self, tmp_path, second_price):
        data = {'side': 'lowest', 'prices': {'g1': 3}, 'payoffs': {'1': 2, '2': 0},
                'matching': {'1': 'g9', '2': None}}
        with pytest.raises(ValidationError):
            load_equilibrium(write(tmp_path, data, 'eq.json'), second_price)

    def test_load_missing_entry(self, tmp_path, second_price):
        data = {'prices': {}, 'payoffs': {'1': 2, '2': 0}, 'matching': {}}
        with pytest.raises(ParseError):
            load_equilibrium(write(tmp_path, data, 'eq.json'), second_price)
