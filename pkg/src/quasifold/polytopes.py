"""Simple convex polytopes in facet form and their normal fans.

A polytope is a list of inequalities <X_j, x> >= lambda_j with inward
normals X_j.  Vertices are enumerated by solving every n-subset of facet
equalities exactly and keeping the solutions that satisfy all remaining
inequalities; the normal fan then has one maximal cone per vertex, spanned
by the normals of the facets through it.

Over a parameter field, inequality signs that cannot be decided from
coefficient signs are evaluated at two generic sample values which must
agree; disagreement means the combinatorics depend on the parameter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .linalg import Matrix, SingularMatrixError, dot
from .scalars import IndeterminateSignError, Scalar, ScalarDomain
from .triples import (Fan, FundamentalTriple, Quasilattice,
                      with_recovered_witnesses)

__all__ = [
    "Facet",
    "GenericityError",
    "NormalFanResult",
    "Polytope",
    "SimplicityError",
    "Vertex",
    "enumerate_vertices",
    "normal_fan",
    "to_triple",
]

_GENERIC_SAMPLES = (Fraction("1.41421356237309"), Fraction("1.73205080756888"))


class SimplicityError(ValueError):
    """A vertex lies on more facets than the dimension allows."""


class GenericityError(ValueError):
    """The vertex/facet combinatorics depend on the parameter value."""


@dataclass(frozen=True)
class Facet:
    normal: Tuple[Scalar, ...]
    offset: Scalar


@dataclass(frozen=True)
class Vertex:
    coordinates: Tuple[Scalar, ...]
    incident: Tuple[int, ...]  # 1-based facet indices, sorted


class Polytope:
    """A simple convex polytope presented by facet inequalities."""

    def __init__(self, domain: ScalarDomain, facets: Sequence[Facet]):
        if not facets:
            raise ValueError("a polytope needs at least one facet")
        dim = len(facets[0].normal)
        for f in facets:
            if len(f.normal) != dim:
                raise ValueError("facet normals have inconsistent dimensions")
        self.domain = domain
        self.facets = tuple(facets)
        self.dim = dim

    @classmethod
    def from_strings(cls, domain, facet_rows):
        facets = [Facet(tuple(domain.scalar(x) for x in normal), domain.scalar(offset))
                  for normal, offset in facet_rows]
        return cls(domain, facets)

    @property
    def facet_count(self):
        return len(self.facets)


def _parameter_samples(polytope: Polytope, samples):
    if polytope.domain.kind != "rational_function":
        return None
    if samples is not None:
        pair = tuple(Fraction(str(s)) for s in samples)
        if len(pair) != 2:
            raise ValueError("exactly two parameter samples are required")
        return pair
    first = polytope.domain.default_sample or _GENERIC_SAMPLES[0]
    second = _GENERIC_SAMPLES[1] if first != _GENERIC_SAMPLES[1] else _GENERIC_SAMPLES[0]
    return (first, second)


def _inequality_sign(value: Scalar, samples):
    """Sign of a nonzero inequality slack, with dual-sample fallback."""
    try:
        return value.sign()
    except IndeterminateSignError:
        if samples is None:
            raise
        signs = {value.sign(parameter_sample=s) for s in samples}
        if len(signs) != 1:
            raise GenericityError(
                f"the sign of {value.text()} differs between parameter samples "
                f"{samples[0]} and {samples[1]}")
        return signs.pop()


def enumerate_vertices(polytope: Polytope, samples=None) -> Tuple[Vertex, ...]:
    """All vertices with their exact coordinates and facet incidence.

    Raises SimplicityError when some vertex lies on more than n facets.
    """
    n = polytope.dim
    if polytope.facet_count < n + 1:
        raise ValueError("a bounded polytope needs at least n + 1 facets")
    samples = _parameter_samples(polytope, samples)
    seen = {}
    for subset in itertools.combinations(range(polytope.facet_count), n):
        matrix = Matrix.from_rows(
            polytope.domain, [polytope.facets[i].normal for i in subset])
        rhs = [polytope.facets[i].offset for i in subset]
        try:
            point = matrix.solve(rhs)
        except SingularMatrixError:
            continue
        key = tuple(x.payload for x in point)
        if key in seen:
            continue
        incident = []
        feasible = True
        for j, facet in enumerate(polytope.facets):
            slack = dot(facet.normal, point) - facet.offset
            if slack.is_zero():
                incident.append(j + 1)
                continue
            if _inequality_sign(slack, samples) < 0:
                feasible = False
                break
        if feasible:
            seen[key] = Vertex(coordinates=point, incident=tuple(incident))
    vertices = sorted(seen.values(), key=lambda v: v.incident)
    if not vertices:
        raise ValueError("the inequality system has no vertices")
    for vertex in vertices:
        if len(vertex.incident) != n:
            coords = ", ".join(x.text() for x in vertex.coordinates)
            raise SimplicityError(
                f"vertex ({coords}) lies on facets {vertex.incident}; "
                f"a simple polytope allows exactly {n}")
    return tuple(vertices)


@dataclass(frozen=True)
class NormalFanResult:
    fan: Fan
    vertices: Tuple[Vertex, ...]          # aligned with fan.max_cones

    def table(self):
        """Rows of (cone index set, vertex), in cone order."""
        return tuple(zip(self.fan.max_cones, self.vertices))


def normal_fan(polytope: Polytope, vertices: Optional[Sequence[Vertex]] = None,
               samples=None) -> NormalFanResult:
    """The fan with one maximal cone per vertex, spanned by its facet normals."""
    if vertices is None:
        vertices = enumerate_vertices(polytope, samples=samples)
    by_cone = sorted(vertices, key=lambda v: v.incident)
    fan = Fan(
        dim=polytope.dim,
        rays=[facet.normal for facet in polytope.facets],
        max_cones=[v.incident for v in by_cone],
    )
    return NormalFanResult(fan=fan, vertices=tuple(by_cone))


def to_triple(polytope: Polytope, lattice: Quasilattice,
              witnesses: Optional[Sequence[Optional[Sequence[int]]]] = None,
              samples=None, witness_box: int = 10):
    """Assemble the fundamental triple of the polytope's normal fan.

    Missing witnesses are recovered by the bounded search.  Returns
    (triple, normal_fan_result); the vertex/cone table is kept for reporting.
    """
    result = normal_fan(polytope, samples=samples)
    triple = FundamentalTriple(result.fan, lattice, witnesses)
    triple = with_recovered_witnesses(triple, box=witness_box)
    return triple, result
