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
Ascending price auction on a market file or on the oscillating
four-buyer market.
"""
import json
import os

from pwem.protocols import EMProtocol
from pyworkflow.protocol import params

import equilibria
from equilibria.constants import AUCTION_STEP, AUCTION_MAX_STEPS
from equilibria.objects import AuctionTraceFile
from equilibria.protocols.protocol_solve import CLI


class EquilibriaAuctionProtocol(EMProtocol):
    """
    Runs the discrete ascending price auction and records the price trace.
    """
    _label = 'Ascending auction'

    FROM_FILE = 0
    OSCILLATING = 1

    # -------------------------- DEFINE param functions ----------------------
    def _defineParams(self, form):
        form.addSection(label='Inputs')

        form.addParam('source', params.EnumParam,
                      choices=['market file', 'oscillating market'],
                      default=self.FROM_FILE,
                      display=params.EnumParam.DISPLAY_HLIST,
                      label="Market",
                      help='A JSON market document, or the built-in four-buyer '
                           'market whose auction never settles.')
        form.addParam('marketFile', params.PathParam,
                      condition='source == FROM_FILE',
                      label="Market file")
        form.addParam('V', params.FloatParam, default=11.0,
                      condition='source == OSCILLATING',
                      label="V",
                      help='Value constant of the oscillating market, at least 2.')

        form.addSection(label='Auction')
        form.addParam('step', params.FloatParam, default=AUCTION_STEP,
                      label="Price step")
        form.addParam('maxSteps', params.IntParam, default=AUCTION_MAX_STEPS,
                      label="Maximum number of steps")
        form.addParam('sampleEvery', params.IntParam, default=10,
                      expertLevel=params.LEVEL_ADVANCED,
                      label="Keep one sample every",
                      help='Thins the trace file; demand changes are kept in full '
                           'in the summary.')
        form.addParam('doPlot', params.BooleanParam, default=True,
                      label="Save a trajectory plot?")

    # --------------------------- STEPS functions ------------------------------
    def _insertAllSteps(self):
        self._insertFunctionStep('auctionStep')
        self._insertFunctionStep('createOutputStep')

    def _getTraceFile(self):
        return self._getExtraPath('trace.csv')

    def _getSummaryFile(self):
        return self._getExtraPath('summary.json')

    def _getPlotFile(self):
        return self._getExtraPath('trace.png')

    def auctionStep(self):
        args = "-o {0} ".format(self._getSummaryFile())
        if self.source.get() == self.OSCILLATING:
            args += "example1 --V {0}".format(self.V.get())
        else:
            args += "auction"
        args += " --step {0} --max-steps {1} --sample-every {2} --trace {3}".format(
            self.step.get(), self.maxSteps.get(), self.sampleEvery.get(),
            self._getTraceFile())
        if self.doPlot.get():
            args += " --plot {0}".format(self._getPlotFile())
        if self.source.get() == self.FROM_FILE:
            args += " {0}".format(self.marketFile.get())
        self.runJob(equilibria.Plugin.getEquilibriaCmd(CLI), args,
                    env=equilibria.Plugin.getEnviron())

    def createOutputStep(self):
        summary = self.getAuctionSummary()
        outFile = AuctionTraceFile(filename=self._getTraceFile())
        outFile.setTerminated(summary['terminated'])
        outFile.setDemandChangeCount(summary['demand_change_count'])
        self._defineOutputs(outputTrace=outFile)

    def getAuctionSummary(self):
        with open(self._getSummaryFile()) as f:
            return json.load(f)

    # --------------------------- INFO functions -----------------------------------
    def _validate(self):
        errors = []
        if self.source.get() == self.FROM_FILE:
            path = self.marketFile.get()
            if not path or not os.path.exists(path):
                errors.append("Market file %s does not exist." % path)
        elif self.V.get() < 2:
            errors.append("V must be at least 2.")
        if self.step.get() <= 0:
            errors.append("The price step must be positive.")
        if self.maxSteps.get() < 1 or self.sampleEvery.get() < 1:
            errors.append("Step counts must be positive.")
        return errors

    def _summary(self):
        summary = []
        if self.isFinished() and os.path.exists(self._getSummaryFile()):
            result = self.getAuctionSummary()
            summary.append("Terminated: %s after %d steps"
                           % (result['terminated'], result['steps']))
            summary.append("Demand changes: %d" % result['demand_change_count'])
            if 'oracle_sign_changes' in result:
                summary.append("Sign changes of the oscillating costs: %s"
                               % result['oracle_sign_changes'])
        return summary

    def _methods(self):
        methods = []
        if self.isFinished():
            methods.append("An ascending price auction raised the prices of a minimal "
                           "over-demanded set by %g per step." % self.step.get())
        return methods
