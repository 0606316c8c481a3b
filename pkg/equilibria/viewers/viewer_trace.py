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
Price trajectories of an ascending auction run.
"""
import os

import matplotlib.pyplot as plt

from pwem.viewers.plotter import EmPlotter

from pyworkflow.protocol.params import LabelParam
from pyworkflow.viewer import ProtocolViewer, DESKTOP_TKINTER, WEB_DJANGO

from equilibria.core.auction import read_trace_csv
from equilibria.core.plotting import draw_price_trajectories
from equilibria.protocols import EquilibriaAuctionProtocol

_invalidInputStr = 'Invalid input'


class EquilibriaTraceViewer(ProtocolViewer):
    """ Plots the price of every good along the auction. """
    _label = 'Auction price viewer'
    _targets = [EquilibriaAuctionProtocol]
    _environments = [DESKTOP_TKINTER, WEB_DJANGO]

    def _defineParams(self, form):
        form.addSection(label='Visualization')
        form.addParam('displayTrace', LabelParam,
                      label="Plot price trajectories?",
                      help="Demand changes are marked with ticks.")

    def _getVisualizeDict(self):
        return {'displayTrace': self._viewTrace}

    def _viewTrace(self, paramName):
        filename = self.protocol._getTraceFile()
        if not os.path.exists(filename):
            return [self.errorMessage("No trace found at %s.\n"
                                      "Run the protocol first." % filename,
                                      title=_invalidInputStr)]
        steps, prices, changed = read_trace_csv(filename)
        goods = [str(j + 1) for j in range(prices.shape[1])]

        plotter = EmPlotter()
        draw_price_trajectories(plt.gca(), steps, prices, goods, changed)
        return [plotter]
