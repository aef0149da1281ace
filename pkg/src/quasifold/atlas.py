"""The canonical affine atlas of a toric quasifold, computed exactly.

For each maximal cone the chart records the cone matrix, its inverse, the
fixed point, and the exponent matrix of the discrete group acting on the
chart.  Chart changes are monomial maps: the exponent matrix of the map
from cone tau to cone sigma is  E = A_sigma^-1 A_tau, whose rows render as
generalized Laurent monomials with exact (possibly irrational) exponents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from .linalg import Matrix
from .triples import FundamentalTriple

__all__ = [
    "Atlas",
    "Chart",
    "CocycleReport",
    "MonomialMap",
    "OrbitRow",
    "RelationSet",
    "build_chart",
    "cocycle_check",
    "fixed_point",
    "orbit_report",
    "relations",
    "render_monomial_map",
    "transition_map",
]


def _exponent_text(scalar):
    """Exponent rendering: bare for signed atoms, parenthesized otherwise."""
    text = scalar.text()
    body = text[1:] if text.startswith("-") else text
    if body and (body.isdigit() or body.isalpha()):
        return text
    return f"({text})"


def _variable(ray_index, fan_dim):
    return "z" if fan_dim == 1 else f"z{ray_index}"


@dataclass(frozen=True)
class Chart:
    """One affine chart of the atlas."""

    cone: Tuple[int, ...]
    matrix: Matrix              # columns are the cone's rays, increasing index
    inverse: Matrix
    fixed_point: Tuple[int, ...]
    group_exponents: Matrix     # n x k; column l is A^-1 (l-th lattice generator)

    def group_columns(self):
        return [self.group_exponents.column(j)
                for j in range(self.group_exponents.cols)]


@dataclass(frozen=True)
class MonomialMap:
    """A chart change written as a matrix of monomial exponents."""

    source: Tuple[int, ...]     # I_tau: indices of the input coordinates
    target: Tuple[int, ...]     # I_sigma: indices of the output coordinates
    exponents: Matrix           # rows labeled by target, columns by source
    shared: Tuple[int, ...]
    dense_only: bool            # True when the index sets are disjoint (h = n)

    @property
    def h(self):
        return len(self.source) - len(self.shared)

    def render(self, fan_dim: Optional[int] = None):
        if fan_dim is None:
            fan_dim = self.exponents.rows
        return render_monomial_map(self.exponents, fan_dim)

    def scope(self):
        return "dense-orbit extension" if self.dense_only else "chart overlap"


def render_monomial_map(exponents: Matrix, fan_dim: int) -> str:
    """Rows as monomials in the source variables, joined homogeneous-style.

    Factors follow increasing ray index; exponent 0 factors are omitted and
    exponent 1 is suppressed.  A row of zeros renders as "1".
    """
    source = exponents.col_labels or tuple(range(1, exponents.cols + 1))
    rows = []
    for i in range(exponents.rows):
        factors = []
        for j in range(exponents.cols):
            e = exponents[i, j]
            if e.is_zero():
                continue
            var = _variable(source[j], fan_dim)
            if e == 1:
                factors.append(var)
            else:
                factors.append(f"{var}^{_exponent_text(e)}")
        rows.append(" ".join(factors) if factors else "1")
    return "[" + " : ".join(rows) + "]"


@dataclass(frozen=True)
class RelationSet:
    """How the rays outside a cone decompose over the cone's rays.

    coefficients[j] gives the coordinates of ray j over the cone's rays (in
    increasing cone-index order); kernel_vectors[j] is the corresponding
    length-d kernel basis vector of the ray map, with entry 1 at position j.
    """

    cone: Tuple[int, ...]
    coefficients: Dict[int, Tuple]
    kernel_vectors: Dict[int, Tuple]


def fixed_point(triple: FundamentalTriple, cone: Sequence[int]) -> Tuple[int, ...]:
    """0/1 homogeneous pattern: zeros exactly at the cone's indices."""
    indices = set(cone)
    return tuple(0 if j in indices else 1 for j in range(1, triple.ray_count + 1))


def build_chart(triple: FundamentalTriple, cone: Sequence[int]) -> Chart:
    """Compile the chart of a maximal cone."""
    indices = tuple(sorted(cone))
    if indices not in triple.fan.max_cones:
        raise ValueError(f"{indices} is not a maximal cone of the fan")
    matrix = triple.cone_matrix(indices)
    inverse = matrix.inverse()
    raw = inverse @ triple.lattice.generators
    # exact integers act trivially under exp, so drop them
    reduced = [entry.domain.zero() if entry.is_integer() else entry
               for entry in raw.entries]
    group = Matrix(raw.domain, raw.rows, raw.cols, reduced,
                   row_labels=indices,
                   col_labels=tuple(range(1, raw.cols + 1)))
    return Chart(
        cone=indices,
        matrix=matrix,
        inverse=inverse,
        fixed_point=fixed_point(triple, indices),
        group_exponents=group,
    )


def transition_map(triple: FundamentalTriple, source: Sequence[int],
                   target: Sequence[int],
                   charts: Optional[Dict[Tuple[int, ...], Chart]] = None) -> MonomialMap:
    """The monomial chart change from the source cone to the target cone."""
    src = tuple(sorted(source))
    tgt = tuple(sorted(target))
    if src == tgt:
        raise ValueError("source and target cones must differ")
    if charts is not None and tgt in charts:
        inverse = charts[tgt].inverse
    else:
        inverse = triple.cone_matrix(tgt).inverse()
    exponents = inverse @ triple.cone_matrix(src)
    shared = tuple(sorted(set(src) & set(tgt)))
    return MonomialMap(
        source=src,
        target=tgt,
        exponents=exponents,
        shared=shared,
        dense_only=not shared,
    )


def relations(triple: FundamentalTriple, cone: Sequence[int],
              charts: Optional[Dict[Tuple[int, ...], Chart]] = None) -> RelationSet:
    """Decompose every ray outside the cone over the cone's rays."""
    indices = tuple(sorted(cone))
    if charts is not None and indices in charts:
        inverse = charts[indices].inverse
    else:
        inverse = triple.cone_matrix(indices).inverse()
    zero = triple.domain.zero()
    one = triple.domain.one()
    coefficients = {}
    kernel_vectors = {}
    for j in range(1, triple.ray_count + 1):
        if j in indices:
            continue
        coords = inverse.apply(triple.ray(j))
        coefficients[j] = tuple(coords)
        vector = [zero] * triple.ray_count
        vector[j - 1] = one
        for t, i in enumerate(indices):
            vector[i - 1] = -coords[t]
        kernel_vectors[j] = tuple(vector)
    return RelationSet(cone=indices, coefficients=coefficients,
                       kernel_vectors=kernel_vectors)


@dataclass
class CocycleReport:
    pairs_checked: int
    triples_checked: int
    violations: tuple

    @property
    def passed(self):
        return not self.violations


def cocycle_check(triple: FundamentalTriple,
                  atlas: Optional["Atlas"] = None) -> CocycleReport:
    """Exact consistency of all chart changes.

    Checks E_{sigma tau} E_{tau sigma} = identity over ordered pairs and
    E_{sigma rho} = E_{sigma tau} E_{tau rho} over ordered triples of
    distinct maximal cones.
    """
    if atlas is None:
        atlas = Atlas.compile(triple)
    cones = triple.fan.max_cones
    violations = []
    pairs = 0
    identity = Matrix.identity(triple.domain, triple.dim)
    for a, b in itertools.permutations(cones, 2):
        pairs += 1
        product = atlas.transition(b, a).exponents @ atlas.transition(a, b).exponents
        if product != identity:
            violations.append(("pair", a, b))
    count = 0
    for a, b, c in itertools.permutations(cones, 3):
        count += 1
        direct = atlas.transition(c, a).exponents
        composed = atlas.transition(b, a).exponents @ atlas.transition(c, b).exponents
        if direct != composed:
            violations.append(("triple", a, b, c))
    return CocycleReport(pairs_checked=pairs, triples_checked=count,
                         violations=tuple(violations))


@dataclass(frozen=True)
class OrbitRow:
    cone_dim: int
    orbit_dim: int
    count: int


def orbit_report(triple: FundamentalTriple):
    """Count the implicit cones of each dimension.

    Faces of a simplicial cone correspond to subsets of its index set, so
    the m-dimensional cones are the distinct m-subsets of the maximal
    index sets.  Each m-cone carries an (n - m)-dimensional orbit; the empty
    set is the dense open orbit.
    """
    n = triple.dim
    rows = []
    for m in range(n + 1):
        subsets = set()
        for cone in triple.fan.max_cones:
            subsets.update(itertools.combinations(cone, m))
        rows.append(OrbitRow(cone_dim=m, orbit_dim=n - m, count=len(subsets)))
    return rows


class Atlas:
    """All charts and chart changes of a triple, computed once and cached."""

    def __init__(self, triple: FundamentalTriple):
        self.triple = triple
        self._charts: Dict[Tuple[int, ...], Chart] = {}
        self._transitions: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], MonomialMap] = {}
        self._relations: Dict[Tuple[int, ...], RelationSet] = {}

    @classmethod
    def compile(cls, triple: FundamentalTriple) -> "Atlas":
        atlas = cls(triple)
        for cone in triple.fan.max_cones:
            atlas.chart(cone)
        for a, b in itertools.permutations(triple.fan.max_cones, 2):
            atlas.transition(a, b)
        return atlas

    def chart(self, cone) -> Chart:
        key = tuple(sorted(cone))
        if key not in self._charts:
            self._charts[key] = build_chart(self.triple, key)
        return self._charts[key]

    def transition(self, source, target) -> MonomialMap:
        key = (tuple(sorted(source)), tuple(sorted(target)))
        if key not in self._transitions:
            self.chart(key[1])
            self._transitions[key] = transition_map(
                self.triple, key[0], key[1], charts=self._charts)
        return self._transitions[key]

    def relation_set(self, cone) -> RelationSet:
        key = tuple(sorted(cone))
        if key not in self._relations:
            self.chart(key)
            self._relations[key] = relations(self.triple, key, charts=self._charts)
        return self._relations[key]

    @property
    def cones(self):
        return self.triple.fan.max_cones
