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
Exceptions raised by the equilibria library. Verdict-returning checks never
raise; these signal malformed inputs or solver invariants that did not hold.
"""


class EquilibriaError(Exception):
    """ Base class for every error raised by the library. """


class DomainError(EquilibriaError, ValueError):
    """ A price or parameter lies outside the domain of a curve. """


class InversionFailure(EquilibriaError):
    """ Bracketing an inverse exceeded the expansion cap. """


class MatchingFailure(EquilibriaError):
    """ No supporting matching covers the required buyers and goods. """


class PathNotFound(EquilibriaError):
    """ No critical alternating path exists from the start vertex. """


class MarketMismatch(EquilibriaError):
    """ Two equilibria do not belong to the same market. """


class SizeLimit(EquilibriaError):
    """ The input exceeds a configured enumeration cap. """


class ParseError(EquilibriaError):
    """ A market or equilibrium document could not be parsed. """


class ValidationError(EquilibriaError, ValueError):
    """ A document or market parsed but failed validation. """
