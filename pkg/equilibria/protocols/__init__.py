# -*- coding: utf-8 -*-
# **************************************************************************
# Module to declare protocols
# **************************************************************************
from .protocol_solve import EquilibriaSolveProtocol
from .protocol_auction import EquilibriaAuctionProtocol
