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

import os
import equilibria

EQUILIBRIA_URL = 'https://github.com/scipion-em/scipion-em-equilibria'

CONDA_YML = os.path.join(equilibria.__path__[0], 'conda.yaml')

def getEquilibriaEnvName(version):
    return "equilibria-%s" % version

V0_1_0 = "0.1.0"

VERSIONS = [V0_1_0]
EQUILIBRIA_DEFAULT_VER_NUM = V0_1_0

DEFAULT_ENV_NAME = getEquilibriaEnvName(EQUILIBRIA_DEFAULT_VER_NUM)
DEFAULT_ACTIVATION_CMD = 'conda activate ' + DEFAULT_ENV_NAME
EQUILIBRIA_ENV_ACTIVATION = 'EQUILIBRIA_ENV_ACTIVATION'

# Environment overrides for the enumeration caps
EQUILIBRIA_MAX_MARKET_SIZE = 'EQUILIBRIA_MAX_MARKET_SIZE'
EQUILIBRIA_MAX_SUBSET_GOODS = 'EQUILIBRIA_MAX_SUBSET_GOODS'

# Numerical tolerances
EPS_EQ = 1e-6
EPS_INV = 1e-9
MAX_BRACKET_EXPANSIONS = 60

# Utility curve shapes
OSCILLATORY_GUARD = 1e-6
OSCILLATORY_VARIANTS = ('sin', 'cos')
BUDGET_SLOPE = 1e9
MIN_EXTENSION_SLOPE = 1e-3

# Enumeration caps
MAX_MARKET_SIZE = 16
MAX_SUBSET_GOODS = 20
MAX_GRID_GOODS = 3

# Ascending auction
AUCTION_STEP = 1e-3
AUCTION_PRICE_GUARD = 1e-4
AUCTION_MAX_STEPS = 200000
FINGERPRINT_FACTOR = 3
# A demanded pair leaves the demand structure once it falls this many steps behind
FINGERPRINT_BAND = 30

# Lowest/highest side labels
LOWEST = 'lowest'
HIGHEST = 'highest'
SIDES = (LOWEST, HIGHEST)

# Ad auction payment modes
CPC = 'CPC'
CPM = 'CPM'
PER_CLICK = 'per-click'
PER_IMPRESSION = 'per-impression'

# Dummy agents used to balance |I| and |J|
DUMMY_PREFIX = '~'

# Documents and outputs
SCHEMA_VERSION = 1
PRICE_DECIMALS = 9

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3
EXIT_SIZE_LIMIT = 4


def _getIntVar(name, default):
    value = os.environ.get(name)
    if value is None or value == '':
        return default
    return int(value)


def getMaxMarketSize():
    return _getIntVar(EQUILIBRIA_MAX_MARKET_SIZE, MAX_MARKET_SIZE)


def getMaxSubsetGoods():
    return _getIntVar(EQUILIBRIA_MAX_SUBSET_GOODS, MAX_SUBSET_GOODS)
