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

__version__ = "0.1.0"

try:
    import pwem
except ImportError:  # plain library use, outside Scipion
    pwem = None

if pwem is not None:
    import pyworkflow.utils as pwutils

    from equilibria.constants import *

    _references = []

    class Plugin(pwem.Plugin):
        _supportedVersions = VERSIONS
        _url = EQUILIBRIA_URL

        @classmethod
        def _defineVariables(cls):
            cls._defineVar(EQUILIBRIA_ENV_ACTIVATION, DEFAULT_ACTIVATION_CMD)
            cls._defineVar(EQUILIBRIA_MAX_MARKET_SIZE, str(MAX_MARKET_SIZE))
            cls._defineVar(EQUILIBRIA_MAX_SUBSET_GOODS, str(MAX_SUBSET_GOODS))

        @classmethod
        def getEnviron(cls):
            environ = pwutils.Environ(os.environ)
            environ.update({
                EQUILIBRIA_MAX_MARKET_SIZE: cls.getVar(EQUILIBRIA_MAX_MARKET_SIZE),
                EQUILIBRIA_MAX_SUBSET_GOODS: cls.getVar(EQUILIBRIA_MAX_SUBSET_GOODS),
            }, position=pwutils.Environ.REPLACE)
            return environ

        @classmethod
        def getEquilibriaCmd(cls, args):
            cmd = '%s %s && ' % (cls.getCondaActivationCmd(), cls.getEquilibriaEnvActivation())
            cmd += args
            return cmd

        @classmethod
        def getActivationCmd(cls):
            """ Return the activation command. """
            return '%s %s' % (cls.getCondaActivationCmd(),
                              cls.getEquilibriaEnvActivation())

        @classmethod
        def getEquilibriaEnvActivation(cls):
            """ Activate the conda environment. """
            return cls.getVar(EQUILIBRIA_ENV_ACTIVATION)

        @classmethod
        def isVersionActive(cls):
            return cls.getActiveVersion().startswith(__version__)

        @classmethod
        def defineBinaries(cls, env):
            for ver in VERSIONS:
                cls.addEquilibriaPackage(env, ver,
                                         default=ver == EQUILIBRIA_DEFAULT_VER_NUM)

        @classmethod
        def addEquilibriaPackage(cls, env, version, default=False):

            def getCondaInstallationEquilibria():
                ENV_NAME = getEquilibriaEnvName(version)
                pluginPath = os.path.dirname(equilibria_path())
                installationCmd = cls.getCondaActivationCmd()
                installationCmd += f" conda env create -n {ENV_NAME} -f {CONDA_YML} --force && "
                installationCmd += f"conda activate {ENV_NAME} && "
                installationCmd += f"pip install -e {pluginPath} && "
                installationCmd += "touch equilibria_installed"
                return installationCmd

            commands = [(getCondaInstallationEquilibria(), ["equilibria_installed"])]

            env.addPackage('equilibria', version=version,
                           commands=commands,
                           tar="void.tgz",
                           default=default)


def equilibria_path():
    return os.path.dirname(os.path.abspath(__file__))
