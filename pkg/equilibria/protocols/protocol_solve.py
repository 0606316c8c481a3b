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
Solve a market file for its lowest, highest or an intermediate equilibrium.
"""
import json
import os

from pwem.protocols import EMProtocol
from pyworkflow.protocol import params

import equilibria
from equilibria.constants import LOWEST, HIGHEST
from equilibria.objects import EquilibriumFile

CLI = "python3 -m equilibria.cli"


class EquilibriaSolveProtocol(EMProtocol):
    """
    Computes a competitive equilibrium of a unit-demand market with general
    utilities and optionally verifies it.
    """
    _label = 'Solve equilibrium'

    SIDE_LOWEST = 0
    SIDE_HIGHEST = 1
    SIDE_CONTINUUM = 2

    # -------------------------- DEFINE param functions ----------------------
    def _defineParams(self, form):
        form.addSection(label='Inputs')

        form.addParam('marketFile', params.PathParam,
                      label="Market file",
                      help='JSON market document with buyers, goods and utilities.')
        form.addParam('side', params.EnumParam,
                      choices=[LOWEST, HIGHEST, 'continuum'],
                      default=self.SIDE_LOWEST,
                      display=params.EnumParam.DISPLAY_HLIST,
                      label="Equilibrium",
                      help='Lowest prices, highest prices, or the lowest '
                           'equilibrium above an interpolation of the two.')
        form.addParam('t', params.FloatParam, default=0.5,
                      condition='side == SIDE_CONTINUUM',
                      label="Interpolation point",
                      help='0 gives the lowest and 1 the highest equilibrium.')
        form.addParam('doVerify', params.BooleanParam, default=True,
                      condition='side != SIDE_CONTINUUM',
                      label="Verify the result?")
        form.addParam('eps', params.FloatParam, default=1e-6,
                      expertLevel=params.LEVEL_ADVANCED,
                      label="Tolerance",
                      help='Tolerance used for tightness and equilibrium checks.')

    # --------------------------- STEPS functions ------------------------------
    def _insertAllSteps(self):
        self._insertFunctionStep('solveStep')
        self._insertFunctionStep('createOutputStep')

    def _getResultFile(self):
        return self._getExtraPath('equilibrium.json')

    def solveStep(self):
        args = "--eps {0} -o {1} ".format(self.eps.get(), self._getResultFile())
        side = self.side.get()
        if side == self.SIDE_CONTINUUM:
            args += "continuum --t {0} {1}".format(self.t.get(), self.marketFile.get())
        else:
            args += "solve --side {0}".format(LOWEST if side == self.SIDE_LOWEST else HIGHEST)
            if self.doVerify.get():
                args += " --verify"
            args += " {0}".format(self.marketFile.get())
        self.runJob(equilibria.Plugin.getEquilibriaCmd(CLI), args,
                    env=equilibria.Plugin.getEnviron())

    def createOutputStep(self):
        with open(self._getResultFile()) as f:
            result = json.load(f)
        outFile = EquilibriumFile(filename=self._getResultFile())
        outFile.setSide(result['side'])
        outFile.setVerified(bool(result.get('verdict', {}).get('ok', False)))
        self._defineOutputs(outputEquilibrium=outFile)

    # --------------------------- INFO functions -----------------------------------
    def _validate(self):
        errors = []
        path = self.marketFile.get()
        if not path or not os.path.exists(path):
            errors.append("Market file %s does not exist." % path)
        if self.side.get() == self.SIDE_CONTINUUM and not 0 <= self.t.get() <= 1:
            errors.append("The interpolation point must lie in [0, 1].")
        if self.eps.get() <= 0:
            errors.append("The tolerance must be positive.")
        return errors

    def _summary(self):
        summary = []
        if self.isFinished() and os.path.exists(self._getResultFile()):
            with open(self._getResultFile()) as f:
                result = json.load(f)
            summary.append("Side: %s" % result['side'])
            for good, price in result['prices'].items():
                summary.append("Price of %s: %.6f" % (good, price))
            if 'verdict' in result:
                summary.append("Verified: %s" % result['verdict']['ok'])
        return summary

    def _methods(self):
        methods = []
        if self.isFinished():
            methods.append("The %s competitive equilibrium of the market in %s was "
                           "computed by induction over buyer and good removals."
                           % (['lowest', 'highest', 'interpolated'][self.side.get()],
                              self.marketFile.get()))
        return methods
