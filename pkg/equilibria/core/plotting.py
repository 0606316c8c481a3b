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
Price-trajectory figures for auction traces.
"""
import numpy as np
from matplotlib.figure import Figure


def draw_price_trajectories(ax, steps, prices, goods, changed=None):
    """ One line per good; steps where the demand structure changed are
    marked on the first curve when changed flags are given. """
    steps = np.asarray(steps)
    prices = np.asarray(prices, dtype=float).reshape(len(steps), -1)
    for j, good in enumerate(goods):
        ax.plot(steps, prices[:, j], label='good %s' % good, linewidth=1)
    if changed is not None and len(steps):
        flags = np.asarray(changed, dtype=bool)
        if flags.any():
            ax.plot(steps[flags], prices[flags].max(axis=1), 'k|', markersize=6,
                    label='demand change')
    ax.set_xlabel('Auction step')
    ax.set_ylabel('Price')
    ax.legend(loc='upper left')
    return ax


def save_price_plot(trace, path, title=None):
    """ Render an AuctionTrace to an image file. """
    steps = [k for k, _ in trace.samples]
    prices = [p for _, p in trace.samples]
    changed = set(trace.changed_steps)
    flags = [k in changed for k in steps]
    fig = Figure(figsize=(8, 5))
    ax = fig.add_subplot(111)
    draw_price_trajectories(ax, steps, prices, trace.goods, flags)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    return path
