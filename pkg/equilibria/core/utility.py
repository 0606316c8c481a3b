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
Utility curves u(x) of a buyer for a good at price x, their inverses p(u),
and the wrappers used by bounded solves, price discrimination and the
two-sided reduction.

Every curve is continuous and strictly decreasing. Below price 0 each curve
continues linearly so that inverses of large payoffs are defined.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import optimize

from equilibria.constants import (EPS_INV, MAX_BRACKET_EXPANSIONS,
                                  OSCILLATORY_GUARD, OSCILLATORY_VARIANTS,
                                  BUDGET_SLOPE, MIN_EXTENSION_SLOPE)
from equilibria.exceptions import DomainError, InversionFailure
from equilibria.core.verdict import Verdict, Violation

logger = logging.getLogger(__name__)

_SAMPLES = 33


def _bisect_inverse(value_fn, target, lo, hi, eps):
    """ Root of value_fn(x) = target for a decreasing value_fn, expanding the
    bracket [lo, hi] outwards until it straddles the target. """
    f = lambda x: value_fn(x) - target
    expansions = 0
    while f(lo) < 0:
        if expansions >= MAX_BRACKET_EXPANSIONS:
            raise InversionFailure('cannot bracket payoff %r from below' % target)
        lo -= (hi - lo)
        expansions += 1
    while f(hi) > 0:
        if expansions >= MAX_BRACKET_EXPANSIONS:
            raise InversionFailure('cannot bracket payoff %r from above' % target)
        hi += (hi - lo)
        expansions += 1
    if expansions:
        logger.debug('bracket for payoff %g expanded %d times to [%g, %g]',
                     target, expansions, lo, hi)
    if f(lo) == 0:
        return lo
    if f(hi) == 0:
        return hi
    return optimize.bisect(f, lo, hi, xtol=eps * 1e-2, maxiter=200)


class _Piecewise:
    """ Shared breakpoint arithmetic for piecewise-linear curves and maps. """

    def _slopes(self):
        xs, ys = self.xs(), self.ys()
        left, right = self.left_slope, self.right_slope
        if len(xs) > 1:
            if left is None:
                left = (ys[1] - ys[0]) / (xs[1] - xs[0])
            if right is None:
                right = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        return left, right

    def xs(self):
        return np.array([p[0] for p in self.points], dtype=float)

    def ys(self):
        return np.array([p[1] for p in self.points], dtype=float)

    def _forward(self, x):
        xs, ys = self.xs(), self.ys()
        left, right = self._slopes()
        if x < xs[0]:
            return ys[0] + left * (x - xs[0])
        if x > xs[-1]:
            return ys[-1] + right * (x - xs[-1])
        return float(np.interp(x, xs, ys))

    def _backward(self, y):
        xs, ys = self.xs(), self.ys()
        left, right = self._slopes()
        first, last = ys[0], ys[-1]
        if left > 0:
            if y < first:
                return xs[0] + (y - first) / left
            if y > last:
                return xs[-1] + (y - last) / right
            return float(np.interp(y, ys, xs))
        if y > first:
            return xs[0] + (y - first) / left
        if y < last:
            return xs[-1] + (y - last) / right
        return float(np.interp(y, ys[::-1], xs[::-1]))

    def _check_breakpoints(self, sign, name):
        problems = []
        if not self.points:
            return ['%s needs at least one breakpoint' % name]
        xs, ys = self.xs(), self.ys()
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            problems.append('%s breakpoints must be finite' % name)
        if np.any(np.diff(xs) <= 0):
            problems.append('%s breakpoint prices must increase' % name)
        if np.any(sign * np.diff(ys) <= 0):
            problems.append('%s has a segment with the wrong direction' % name)
        left, right = self._slopes()
        if left is None or right is None:
            problems.append('%s with one breakpoint needs both extension slopes' % name)
        elif sign * left <= 0 or sign * right <= 0:
            problems.append('%s extension slopes have the wrong sign' % name)
        return problems


# -------------------------- price maps ------------------------------------

@dataclass(frozen=True)
class Identity:
    def apply(self, x):
        return x

    def inverse(self, y):
        return y

    def check(self):
        return []


@dataclass(frozen=True)
class Scale:
    """ g(x) = x / c """
    c: float

    def apply(self, x):
        return x / self.c

    def inverse(self, y):
        return y * self.c

    def check(self):
        if not (math.isfinite(self.c) and self.c > 0):
            return ['scale divisor must be positive, got %r' % self.c]
        return []


@dataclass(frozen=True)
class PiecewiseLinearIncreasing(_Piecewise):
    points: Tuple[Tuple[float, float], ...]
    left_slope: Optional[float] = None
    right_slope: Optional[float] = None

    def apply(self, x):
        return self._forward(x)

    def inverse(self, y):
        return self._backward(y)

    def check(self):
        problems = self._check_breakpoints(+1, 'price map')
        if not problems and self.apply(0.0) < 0:
            problems.append('price map must satisfy g(0) >= 0')
        return problems


@dataclass(frozen=True)
class Transfer:
    """ g(y) = -q^(-1)(y) for a seller curve q, mapping the seller's payoff
    back to the money transferred to the seller. g(0) may be negative. """
    seller: 'UtilitySpec'

    def apply(self, y):
        return -invert(self.seller, y)

    def inverse(self, x):
        return evaluate(self.seller, -x, extend=True)

    def check(self):
        verdict = validate_spec(self.seller)
        return [v.detail for v in verdict.violations]


PriceMap = Union[Identity, Scale, PiecewiseLinearIncreasing, Transfer]


# -------------------------- utility curves --------------------------------

@dataclass(frozen=True)
class Quasilinear:
    """ u(x) = v - x """
    v: float

    def value(self, x, extend):
        return self.v - x

    def inverse(self, t, eps):
        return self.v - t

    def check(self):
        if not math.isfinite(self.v):
            return ['quasilinear value must be finite']
        return []

    def ceiling(self, guard):
        return math.inf


@dataclass(frozen=True)
class PiecewiseLinear(_Piecewise):
    """ Decreasing curve through (price, utility) breakpoints. Outside the
    breakpoints it follows the given slopes, by default those of the first
    and last segments. """
    points: Tuple[Tuple[float, float], ...]
    left_slope: Optional[float] = None
    right_slope: Optional[float] = None

    def value(self, x, extend):
        return self._forward(x)

    def inverse(self, t, eps):
        return self._backward(t)

    def check(self):
        return self._check_breakpoints(-1, 'piecewise-linear curve')

    def ceiling(self, guard):
        return math.inf


@dataclass(frozen=True)
class Budgeted:
    """ v - x up to the budget b, then slope -K. """
    v: float
    b: float
    K: float = BUDGET_SLOPE

    def value(self, x, extend):
        if x <= self.b:
            return self.v - x
        return self.v - self.b - self.K * (x - self.b)

    def inverse(self, t, eps):
        if t >= self.v - self.b:
            return self.v - t
        return self.b + (self.v - self.b - t) / self.K

    def check(self):
        problems = []
        if not all(math.isfinite(a) for a in (self.v, self.b, self.K)):
            problems.append('budgeted parameters must be finite')
        if self.b < 0:
            problems.append('budget must be nonnegative')
        if self.K <= 0:
            problems.append('slope beyond the budget must be positive')
        return problems

    def ceiling(self, guard):
        return math.inf


@dataclass(frozen=True)
class Oscillatory:
    """ u(x) = V - c(x) with c(x) = x + (V-x)/V * sin(V log(V-x)), or cos for
    the second variant. Defined for x < V - OSCILLATORY_GUARD; past the guard
    it continues with slope -1 when evaluated with extend=True. """
    V: float
    variant: str = 'sin'

    def _trig(self):
        return math.sin if self.variant == 'sin' else math.cos

    def cost(self, x):
        w = self.V - x
        return x + w / self.V * self._trig()(self.V * math.log(w))

    def cost_slope(self, x):
        theta = self.V * math.log(self.V - x)
        if self.variant == 'sin':
            return 1.0 - math.sin(theta) / self.V - math.cos(theta)
        return 1.0 - math.cos(theta) / self.V + math.sin(theta)

    def costs(self, xs):
        """ Vectorized cost over an array of prices inside the domain. """
        w = self.V - np.asarray(xs, dtype=float)
        trig = np.sin if self.variant == 'sin' else np.cos
        return (self.V - w) + w / self.V * trig(self.V * np.log(w))

    def guard_price(self):
        return self.V - OSCILLATORY_GUARD

    def value(self, x, extend):
        xg = self.guard_price()
        if x >= xg:
            if not extend:
                raise DomainError('price %r outside the domain x < %r'
                                  % (x, xg))
            return self.V - self.cost(xg) - (x - xg)
        if x < 0:
            slope = max(self.cost_slope(0.0), MIN_EXTENSION_SLOPE)
            return self.V - self.cost(0.0) - slope * x
        return self.V - self.cost(x)

    def inverse(self, t, eps):
        fn = lambda x: self.value(x, True)
        root = _bisect_inverse(fn, t, -1.0, self.V, eps)
        return self._last_crossing(root, t, eps)

    def _last_crossing(self, root, t, eps):
        # c is only approximately monotone: its slope dips below zero in
        # short windows, one per period of the phase. Scan one period past
        # the root and move to the last crossing found there.
        xg = self.guard_price()
        start = max(root, 0.0)
        if start >= xg:
            return root
        theta0 = self.V * math.log(self.V - start)
        step = 0.5 / self.V
        thetas = theta0 - step * np.arange(1, int(math.ceil(2 * math.pi / step)) + 1)
        xs = self.V - np.exp(thetas / self.V)
        xs = xs[xs < xg]
        if xs.size == 0:
            return root
        above = np.nonzero(self.V - self.costs(xs) >= t)[0]
        if above.size == 0:
            return root
        k = above[-1]
        lo = xs[k]
        hi = xs[k + 1] if k + 1 < xs.size else xg
        logger.debug('oscillatory inverse of %g moved from %g past %g', t, root, lo)
        return _bisect_inverse(lambda x: self.value(x, True), t, lo, hi, eps)

    def check(self):
        problems = []
        if self.variant not in OSCILLATORY_VARIANTS:
            problems.append('unknown oscillatory variant %r' % self.variant)
        if not math.isfinite(self.V) or self.V < 2:
            problems.append('oscillatory curve needs V >= 2, got %r' % self.V)
        return problems

    def ceiling(self, guard):
        return self.V - guard


@dataclass(frozen=True)
class Shifted:
    """ u'(x) = u(x + price_shift) - payoff_shift """
    inner: 'UtilitySpec'
    price_shift: float
    payoff_shift: float

    def value(self, x, extend):
        return self.inner.value(x + self.price_shift, extend) - self.payoff_shift

    def inverse(self, t, eps):
        return self.inner.inverse(t + self.payoff_shift, eps) - self.price_shift

    def check(self):
        problems = list(self.inner.check())
        if not (math.isfinite(self.price_shift) and math.isfinite(self.payoff_shift)):
            problems.append('shifts must be finite')
        return problems

    def ceiling(self, guard):
        return self.inner.ceiling(guard) - self.price_shift


@dataclass(frozen=True)
class PriceMapped:
    """ u'(x) = u(g(x)) """
    inner: 'UtilitySpec'
    price_map: PriceMap

    def value(self, x, extend):
        return self.inner.value(self.price_map.apply(x), extend)

    def inverse(self, t, eps):
        return self.price_map.inverse(self.inner.inverse(t, eps))

    def check(self):
        return list(self.inner.check()) + list(self.price_map.check())

    def ceiling(self, guard):
        top = self.inner.ceiling(guard)
        if math.isinf(top):
            return top
        return self.price_map.inverse(top)


UtilitySpec = Union[Quasilinear, PiecewiseLinear, Budgeted, Oscillatory,
                    Shifted, PriceMapped]


def contains_oscillatory(spec):
    if isinstance(spec, Oscillatory):
        return True
    if isinstance(spec, (Shifted, PriceMapped)):
        if isinstance(spec, PriceMapped) and isinstance(spec.price_map, Transfer):
            if contains_oscillatory(spec.price_map.seller):
                return True
        return contains_oscillatory(spec.inner)
    return False


# -------------------------- operations ------------------------------------

def evaluate(spec, price, extend=False):
    """ Utility of the curve at the given price. With extend=False prices past
    an oscillatory domain guard raise DomainError. """
    return float(spec.value(float(price), extend))


def invert(spec, target, eps=EPS_INV):
    """ Largest price at which the curve attains the target payoff. """
    return float(spec.inverse(float(target), eps))


def validate_spec(spec):
    """ Check that the curve is well formed, strictly decreasing and has a
    root. Oscillatory curves are judged by their closed-form parameter rule
    alone since their slope dips are below sampling resolution. """
    try:
        problems = spec.check()
    except AttributeError:
        return Verdict.from_violations([Violation('type', detail='not a utility spec: %r' % (spec,))])
    violations = [Violation('parameter', detail=p) for p in problems]
    if violations:
        return Verdict.from_violations(violations)

    try:
        root = invert(spec, 0.0)
    except (InversionFailure, DomainError, ArithmeticError) as e:
        return Verdict.from_violations([Violation('root', detail=str(e))])

    if not contains_oscillatory(spec):
        xs = np.linspace(-1.0, max(root, 0.0) + 1.0, _SAMPLES)
        values = np.array([evaluate(spec, x, extend=True) for x in xs])
        drops = np.diff(values)
        if np.any(drops >= 0):
            k = int(np.argmax(drops))
            violations.append(Violation('monotone', magnitude=float(drops[k]),
                                        detail='curve does not decrease near price %g' % xs[k]))
    return Verdict.from_violations(violations)


def shift_for_bounds(spec, price_bound, payoff_bound):
    """ Curve of the transformed market used for bounded equilibria. """
    return Shifted(spec, float(price_bound), float(payoff_bound))


def apply_price_map(spec, price_map):
    return PriceMapped(spec, price_map)


def map_price(price_map, x):
    return float(price_map.apply(float(x)))


def inverse_price_map(price_map, y):
    return float(price_map.inverse(float(y)))


def validate_price_map(price_map):
    problems = price_map.check()
    return Verdict.from_violations([Violation('parameter', detail=p) for p in problems])


def domain_ceiling(spec, guard=OSCILLATORY_GUARD):
    """ Highest price at which the curve may be evaluated strictly. """
    return float(spec.ceiling(guard))


def dummy_spec():
    """ u(x) = -x, the curve of every pair involving a dummy agent. """
    return Quasilinear(0.0)


def financed_spec(value, budget, rate):
    """ v - x up to the budget, paid from savings; beyond it every unit of
    price is financed at the given interest rate. """
    if rate < 0:
        raise DomainError('interest rate must be nonnegative')
    return PiecewiseLinear(points=((0.0, float(value)),
                                   (float(budget), float(value) - float(budget))),
                           left_slope=-1.0, right_slope=-(1.0 + float(rate)))


def standard_cpc_spec(value, ctr):
    """ c * (v - x): expected utility of a per-click price x for an
    advertiser valuing a click at v with clickthrough rate c. """
    if ctr <= 0:
        raise DomainError('clickthrough rate must be positive')
    return PiecewiseLinear(points=((0.0, float(ctr) * float(value)),),
                           left_slope=-float(ctr), right_slope=-float(ctr))
