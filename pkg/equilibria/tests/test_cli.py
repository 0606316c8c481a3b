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

from equilibria.cli import main
from equilibria.constants import (EQUILIBRIA_MAX_MARKET_SIZE, EXIT_OK,
                                  EXIT_VALIDATION, EXIT_VERIFICATION,
                                  EXIT_SIZE_LIMIT)


def quasilinear_doc(values):
    return {'schema': 1,
            'buyers': [str(i + 1) for i in range(len(values))],
            'goods': ['g%d' % (j + 1) for j in range(len(values[0]))],
            'utilities': [[{'type': 'quasilinear', 'v': v} for v in row]
                          for row in values]}


def cpc_curve(value, ctr):
    return {'type': 'piecewise_linear', 'points': [[0, value * ctr]],
            'left_slope': -ctr, 'right_slope': -ctr}


AD_DOC = {'schema': 1, 'buyers': ['a', 'b'], 'goods': ['slot'],
          'utilities': [[cpc_curve(10, 0.2)], [cpc_curve(2, 0.5)]],
          'ad_auction': {'modes': ['CPC', 'CPC'], 'ctr': [[0.2], [0.5]],
                         'values': [[10], [2]], 'beliefs': [[0.2], [0.5]]}}

TWO_SIDED_DOC = {'schema': 1, 'buyers': ['a'], 'goods': ['x'],
                 'utilities': [[{'type': 'quasilinear', 'v': 5}]],
                 'two_sided': {'seller_utilities': [[{'type': 'quasilinear', 'v': -1}]]}}


@pytest.fixture
def write(tmp_path):
    def _write(data, name='market.json'):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr().out
    return status, (json.loads(out) if out.strip() else None)


class TestSolve:

    def test_lowest(self, capsys, write):
        status, out = run(capsys, 'solve', write(quasilinear_doc([[5], [3]])))
        assert status == EXIT_OK
        assert out['side'] == 'lowest'
        assert out['prices'] == {'g1': 3.0}
        assert out['payoffs'] == {'1': 2.0, '2': 0.0}
        assert out['matching'] == {'1': 'g1', '2': None}

    def test_highest_with_verify(self, capsys, write):
        status, out = run(capsys, 'solve', '--side', 'highest', '--verify',
                          write(quasilinear_doc([[5], [3]])))
        assert status == EXIT_OK
        assert out['prices'] == {'g1': 5.0}
        assert out['verdict'] == {'ok': True, 'violations': []}

    def test_invalid_document(self, capsys, write):
        doc = quasilinear_doc([[5]])
        doc['utilities'][0][0] = {'type': 'oscillatory', 'V': 1.0}
        status, out = run(capsys, 'solve', write(doc))
        assert status == EXIT_VALIDATION
        assert out is None

    def test_unreadable_document(self, capsys, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"schema": 1, "buyers": [')
        assert main(['solve', str(path)]) == EXIT_VALIDATION
        assert 'broken.json:1:' in capsys.readouterr().err

    def test_size_limit(self, capsys, write, monkeypatch):
        monkeypatch.setenv(EQUILIBRIA_MAX_MARKET_SIZE, '2')
        status, _ = run(capsys, 'solve', write(quasilinear_doc([[5], [3]])))
        assert status == EXIT_SIZE_LIMIT

    def test_output_file_is_deterministic(self, capsys, write, tmp_path):
        market = write(quasilinear_doc([[3, 1], [2, 2]]))
        first, second = tmp_path / 'a.json', tmp_path / 'b.json'
        assert main(['-o', str(first), 'solve', market]) == EXIT_OK
        assert main(['-o', str(second), 'solve', market]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert capsys.readouterr().out == ''


class TestVerifyAndLattice:

    @pytest.fixture
    def solved(self, write, tmp_path):
        market = write(quasilinear_doc([[3, 1], [2, 2]]))
        files = {}
        for side in ('lowest', 'highest'):
            files[side] = str(tmp_path / ('%s.json' % side))
            assert main(['-o', files[side], 'solve', '--side', side, market]) == EXIT_OK
        return market, files

    def test_verify_ok(self, capsys, solved):
        market, files = solved
        status, out = run(capsys, 'verify', market, files['lowest'])
        assert status == EXIT_OK
        assert out['ok']

    def test_verify_tampered(self, capsys, solved, write):
        market, files = solved
        with open(files['lowest']) as f:
            eq = json.load(f)
        eq['prices']['g1'] += 0.5
        status, out = run(capsys, 'verify', market, write(eq, 'tampered.json'))
        assert status == EXIT_VERIFICATION
        assert not out['ok']
        assert out['violations']

    def test_meet_and_join(self, capsys, solved):
        market, files = solved
        _, low = run(capsys, 'solve', market)
        _, high = run(capsys, 'solve', '--side', 'highest', market)
        status, met = run(capsys, 'lattice', 'meet', market, files['lowest'], files['highest'])
        assert status == EXIT_OK
        assert met['prices'] == low['prices']
        assert met['side'] == 'meet'
        _, joined = run(capsys, 'lattice', 'join', market, files['lowest'], files['highest'])
        assert joined['prices'] == high['prices']

    def test_continuum(self, capsys, solved):
        market, _ = solved
        _, low = run(capsys, 'solve', market)
        _, high = run(capsys, 'solve', '--side', 'highest', market)
        status, mid = run(capsys, 'continuum', '--t', '0.5', market)
        assert status == EXIT_OK
        for g in mid['prices']:
            assert low['prices'][g] - 1e-6 <= mid['prices'][g] <= high['prices'][g] + 1e-6

    def test_continuum_out_of_range(self, capsys, solved):
        market, _ = solved
        status, _ = run(capsys, 'continuum', '--t', '1.5', market)
        assert status == EXIT_VALIDATION


class TestAuction:

    def test_auction_with_trace_and_plot(self, capsys, write, tmp_path):
        trace, plot = tmp_path / 'trace.csv', tmp_path / 'trace.png'
        status, out = run(capsys, 'auction', '--step', '0.01', '--trace', str(trace),
                          '--plot', str(plot), write(quasilinear_doc([[5], [3]])))
        assert status == EXIT_OK
        assert out['terminated']
        assert out['final_prices']['g1'] == pytest.approx(3.0, abs=0.02)
        assert trace.read_text().splitlines()[0]
        assert plot.stat().st_size > 0

    def test_example1(self, capsys):
        status, out = run(capsys, 'example1', '--V', '11', '--step', '0.01',
                          '--max-steps', '300')
        assert status == EXIT_OK
        assert out['steps'] <= 300
        assert set(out['oracle_sign_changes']) == {'sin', 'cos'}
        assert set(out['overlap_transitions']) == {'1', '2', '3'}


class TestMechanisms:

    def test_adauction(self, capsys, write):
        status, out = run(capsys, 'adauction', write(AD_DOC))
        assert status == EXIT_OK
        assert out['assignment'] == {'a': 'slot', 'b': None}
        assert out['base_prices']['slot'] == pytest.approx(1.0)
        assert out['charged']['a'] == {'amount': pytest.approx(5.0), 'unit': 'per-click'}
        assert out['charged']['b'] is None
        assert out['revenue'] == pytest.approx(1.0)
        assert out['vcg']['welfare_match'] and out['vcg']['payment_match']

    def test_adauction_needs_block(self, capsys, write):
        status, _ = run(capsys, 'adauction', write(quasilinear_doc([[5]])))
        assert status == EXIT_VALIDATION

    def test_reduce_two_sided(self, capsys, write):
        status, out = run(capsys, 'reduce-two-sided', '--side', 'I', write(TWO_SIDED_DOC))
        assert status == EXIT_OK
        assert out['transfers'] == [{'from': 'a', 'to': 'x', 'amount': pytest.approx(1.0)}]
        assert out['payoffs_i'] == {'a': pytest.approx(4.0)}
        assert out['payoffs_j'] == {'x': pytest.approx(0.0)}


class TestCheck:

    @pytest.mark.parametrize('suite', ['tightness', 'structure', 'vcg'])
    def test_quasilinear_suites(self, capsys, write, suite):
        status, out = run(capsys, 'check', '--suite', suite,
                          write(quasilinear_doc([[3, 1], [2, 2]])))
        assert status == EXIT_OK
        assert out['suite'] == suite and out['ok']

    def test_strategyproof(self, capsys, write):
        status, out = run(capsys, 'check', '--suite', 'strategyproof',
                          '--coalition-size', '1', write(quasilinear_doc([[5], [3]])))
        assert status == EXIT_OK
        assert set(out['results']) == {'1', '2'}

    def test_vcg_needs_quasilinear(self, capsys, write):
        doc = quasilinear_doc([[5]])
        doc['utilities'][0][0] = {'type': 'budgeted', 'v': 5, 'b': 2}
        status, _ = run(capsys, 'check', '--suite', 'vcg', write(doc))
        assert status == EXIT_VALIDATION


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(['--version'])
    assert capsys.readouterr().out.strip() == '0.1.0'
