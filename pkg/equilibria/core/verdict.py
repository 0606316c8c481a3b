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
Pass/fail verdicts shared by every checker in the library.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple


@dataclass(frozen=True, order=True)
class Violation:
    """ One violated condition. Ordering is (condition, buyer, good) so that
    sorted reports are reproducible. """
    condition: str
    buyer: int = -1
    good: int = -1
    magnitude: float = 0.0
    detail: str = field(default='', compare=False)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: Tuple[Violation, ...] = ()
    witness: Optional[Tuple] = None

    def __bool__(self):
        return self.ok

    @classmethod
    def from_violations(cls, violations, witness=None):
        ordered = tuple(sorted(violations))
        return cls(ok=not ordered, violations=ordered, witness=witness)

    def describe(self):
        if self.ok:
            return 'pass'
        lines = []
        for v in self.violations:
            where = []
            if v.buyer >= 0:
                where.append('buyer %d' % v.buyer)
            if v.good >= 0:
                where.append('good %d' % v.good)
            lines.append('%s %s: %g %s' % (v.condition, ', '.join(where),
                                           v.magnitude, v.detail))
        return '\n'.join(lines)

