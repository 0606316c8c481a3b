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
import pytest

pytest.importorskip('pwem')

from equilibria.objects import EquilibriumFile, AuctionTraceFile
from equilibria.protocols import EquilibriaSolveProtocol, EquilibriaAuctionProtocol


@pytest.fixture
def market_file(tmp_path):
    path = tmp_path / 'market.json'
    path.write_text('{"schema": 1, "buyers": ["1"], "goods": ["g1"], '
                    '"utilities": [[{"type": "quasilinear", "v": 5}]]}')
    return str(path)


class TestObjects:

    def test_equilibrium_file(self):
        out = EquilibriumFile(filename='equilibrium.json')
        out.setSide('highest')
        out.setVerified(True)
        assert out.getSide() == 'highest'
        assert out.isVerified()

    def test_trace_file(self):
        out = AuctionTraceFile(filename='trace.csv')
        out.setTerminated(False)
        out.setDemandChangeCount(14)
        assert not out.getTerminated()
        assert out.getDemandChangeCount() == 14


class TestSolveProtocol:

    def test_valid(self, market_file):
        prot = EquilibriaSolveProtocol()
        prot.marketFile.set(market_file)
        assert prot._validate() == []

    def test_missing_file(self, tmp_path):
        prot = EquilibriaSolveProtocol()
        prot.marketFile.set(str(tmp_path / 'absent.json'))
        assert len(prot._validate()) == 1

    def test_continuum_range(self, market_file):
        prot = EquilibriaSolveProtocol()
        prot.marketFile.set(market_file)
        prot.side.set(EquilibriaSolveProtocol.SIDE_CONTINUUM)
        prot.t.set(1.5)
        assert len(prot._validate()) == 1


class TestAuctionProtocol:

    def test_oscillating_defaults(self):
        prot = EquilibriaAuctionProtocol()
        prot.source.set(EquilibriaAuctionProtocol.OSCILLATING)
        assert prot._validate() == []

    def test_small_v(self):
        prot = EquilibriaAuctionProtocol()
        prot.source.set(EquilibriaAuctionProtocol.OSCILLATING)
        prot.V.set(1.0)
        assert prot._validate() == ["V must be at least 2."]
