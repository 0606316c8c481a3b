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
import numpy as np
import pytest

from equilibria.constants import LOWEST, HIGHEST
from equilibria.exceptions import SizeLimit
from equilibria.core.market import Equilibrium
from equilibria.core.solver import solve_lowest, solve_highest
from equilibria.core.verification import (tightness_check, structure_checks,
                                          vcg_oracle, brute_force_lowest,
                                          MisreportGrid, strategyproof_probe)
from equilibria.tests.markets import quasilinear_market


class TestTightness:

    def test_lowest_passes(self, second_price):
        assert tightness_check(solve_lowest(second_price), LOWEST).ok

    def test_non_lowest_fails_with_witness(self, second_price):
        eq = Equilibrium(second_price, [4], [1, 0], [0, None])
        verdict = tightness_check(eq, LOWEST)
        assert not verdict.ok
        assert verdict.witness == (0,)

    def test_zero_prices_vacuous(self, square):
        assert tightness_check(solve_lowest(square), LOWEST).ok

    def test_highest_side(self, square):
        assert tightness_check(solve_highest(square), HIGHEST).ok
        verdict = tightness_check(solve_lowest(square), HIGHEST)
        assert not verdict.ok

    def test_subset_cap(self, square):
        with pytest.raises(SizeLimit):
            tightness_check(solve_highest(square), LOWEST, max_subset=1)


class TestStructure:

    def test_second_price_extremes(self, second_price):
        family = [solve_lowest(second_price), solve_highest(second_price)]
        assert structure_checks(family).ok

    def test_square_extremes(self, square):
        assert structure_checks([solve_lowest(square), solve_highest(square)]).ok

    def test_fabricated_violation(self, second_price):
        a = Equilibrium(second_price, [3], [2, 0], [0, None])
        b = Equilibrium(second_price, [4], [3, 0], [0, None])
        verdict = structure_checks([a, b])
        assert not verdict.ok
        assert {v.condition for v in verdict.violations} == {'entanglement'}

    def test_one_sided_move(self, second_price):
        a = Equilibrium(second_price, [3], [2, 0], [0, None])
        b = Equilibrium(second_price, [3], [2 + 1e-4, 0], [0, None])
        verdict = structure_checks([a, b])
        assert {v.condition for v in verdict.violations} == {'entanglement'}
        assert structure_checks([a, b], slack=1e-3).ok

    def test_conservation(self, second_price):
        a = Equilibrium(second_price, [3], [2, 0], [0, None])
        b = Equilibrium(second_price, [3], [2, 0], [None, None])
        verdict = structure_checks([a, b])
        assert 'conservation' in {v.condition for v in verdict.violations}

    def test_needs_two(self, square):
        with pytest.raises(ValueError):
            structure_checks([solve_lowest(square)])


class TestVcg:

    def test_second_price(self):
        out = vcg_oracle([[5], [3]])
        assert out.assignment == (0, None)
        assert out.payments == (3.0, 0.0)

    def test_square(self):
        out = vcg_oracle([[3, 1], [2, 2]])
        assert out.assignment == (0, 1)
        assert out.payments == (0.0, 0.0)
        assert out.welfare == 5

    def test_no_competition(self):
        assert vcg_oracle([[7]]).payments == (0.0,)

    def test_good_payments(self):
        np.testing.assert_allclose(vcg_oracle([[5, 0], [3, 0]]).good_payments(2), [3, 0])


class TestBruteForce:

    def test_second_price(self, second_price):
        assert brute_force_lowest(second_price, 0.01)[0] == pytest.approx(3.0, abs=0.015)

    def test_single(self, single):
        assert brute_force_lowest(single, 0.01)[0] == pytest.approx(0.0, abs=0.01)

    def test_square(self, square):
        np.testing.assert_allclose(brute_force_lowest(square, 0.05), [0, 0], atol=0.05)

    def test_goods_cap(self):
        with pytest.raises(SizeLimit):
            brute_force_lowest(quasilinear_market(np.ones((1, 4))), 0.5)

    def test_solver_below_oracle(self):
        market = quasilinear_market([[4, 2], [3, 3], [1, 2]])
        oracle = brute_force_lowest(market, 0.01)
        assert np.all(solve_lowest(market).prices <= oracle + 0.01)


class TestStrategyproof:

    def test_loser_cannot_win_profitably(self, second_price):
        grid = MisreportGrid(values=tuple(range(7)))
        assert strategyproof_probe(second_price, [1], grid).ok

    def test_winner_payment_fixed(self, second_price):
        grid = MisreportGrid(values=(3.5, 4.0, 6.0))
        assert strategyproof_probe(second_price, [0], grid).ok

    def test_singleton(self, single):
        assert strategyproof_probe(single, [0]).ok

    def test_coalition_on_square(self, square):
        assert strategyproof_probe(square, [0, 1], MisreportGrid(mode='single')).ok

    def test_per_good_perturbations(self, square):
        grid = MisreportGrid(mode='perturb', offsets=(-1.0, 0.0, 2.0))
        reports = grid.reports(2)
        assert len(reports) == 9
        assert (-1.0, 2.0) in reports
        assert grid.realize([3.0, 0.5], (2.0, -1.0)) == (5.0, 0.0)
        assert strategyproof_probe(square, [0, 1], grid).ok

    def test_uniform_reports_ignore_true_values(self):
        grid = MisreportGrid(values=(1.0,))
        assert grid.realize([3.0, 0.5], (1.0, 1.0)) == (1.0, 1.0)

    def test_unknown_mode(self, square):
        with pytest.raises(ValueError):
            strategyproof_probe(square, [0], MisreportGrid(mode='random'))

    def test_profile_cap(self, square):
        grid = MisreportGrid(values=tuple(range(1001)))
        with pytest.raises(SizeLimit):
            strategyproof_probe(square, [0, 1], grid)
