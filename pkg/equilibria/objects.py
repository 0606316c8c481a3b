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
from pwem.objects import EMFile
from pyworkflow.object import String, Boolean, Integer


class EquilibriumFile(EMFile):
    """ JSON file with the prices, payoffs and matching of an equilibrium. """

    def __init__(self, **kwargs):
        EMFile.__init__(self, **kwargs)
        self._side = String()
        self._verified = Boolean()

    def getSide(self):
        return self._side.get()

    def setSide(self, value):
        self._side.set(value)

    def isVerified(self):
        return self._verified.get()

    def setVerified(self, value):
        self._verified.set(value)


class AuctionTraceFile(EMFile):
    """ CSV price trace of an ascending auction run. """

    def __init__(self, **kwargs):
        EMFile.__init__(self, **kwargs)
        self._terminated = Boolean()
        self._demandChangeCount = Integer()

    def getTerminated(self):
        return self._terminated.get()

    def setTerminated(self, value):
        self._terminated.set(value)

    def getDemandChangeCount(self):
        return self._demandChangeCount.get()

    def setDemandChangeCount(self, value):
        self._demandChangeCount.set(value)
