"""Fundamental triples: a simplicial fan, a quasilattice, and ray generators.

The triple is the input datum of the whole pipeline.  Rays carry integer
witness vectors expressing each generator as a Z-combination of the
quasilattice generators; that certificate is what makes quasirationality
checkable.  Index sets are 1-based everywhere in I/O.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

from .linalg import Matrix, solve_general
from .scalars import RationalDomain, Scalar, ScalarDomain

__all__ = [
    "AdjacencyReport",
    "Fan",
    "FundamentalTriple",
    "Quasilattice",
    "TripleValidationError",
    "ValidationReport",
    "WitnessRecoveryError",
    "cone_adjacency",
    "ray_membership",
    "validate",
    "with_recovered_witnesses",
]


class TripleValidationError(ValueError):
    """A hard validation failure (simpliciality or quasirationality)."""


class WitnessRecoveryError(ValueError):
    """No integer witness could be found within the search bounds."""


class Quasilattice:
    """Z-span of finitely many vectors, given as the columns of a matrix."""

    def __init__(self, domain: ScalarDomain, generators: Matrix):
        if generators.rows > generators.cols:
            raise ValueError("a quasilattice needs at least n generators in R^n")
        if generators.rank() != generators.rows:
            raise ValueError("quasilattice generators must span R^n")
        self.domain = domain
        self.generators = generators

    @property
    def dim(self):
        return self.generators.rows

    @property
    def count(self):
        return self.generators.cols

    def combination(self, coefficients: Sequence[int]):
        """The lattice element with the given integer coordinates."""
        vec = [self.domain.scalar(int(c)) for c in coefficients]
        return self.generators.apply(vec)


class Fan:
    """A simplicial fan: labeled ray generators plus maximal-cone index sets."""

    def __init__(self, dim: int, rays: Sequence[Sequence[Scalar]],
                 max_cones: Sequence[Sequence[int]]):
        self.dim = dim
        self.rays = tuple(tuple(r) for r in rays)
        cones = []
        for cone in max_cones:
            indices = tuple(sorted(int(i) for i in cone))
            if len(set(indices)) != self.dim:
                raise ValueError(
                    f"maximal cone {indices} must have {self.dim} distinct ray indices")
            for i in indices:
                if not 1 <= i <= len(self.rays):
                    raise ValueError(f"ray index {i} out of range")
            cones.append(indices)
        self.max_cones = tuple(sorted(set(cones)))
        covered = set(itertools.chain.from_iterable(self.max_cones))
        missing = sorted(set(range(1, len(self.rays) + 1)) - covered)
        if missing:
            raise ValueError(f"rays {missing} appear in no maximal cone")
        for ray in self.rays:
            if len(ray) != dim:
                raise ValueError("ray coordinate count does not match the fan dimension")

    @property
    def ray_count(self):
        return len(self.rays)


class FundamentalTriple:
    """(fan, quasilattice, ray witnesses) over one scalar domain."""

    def __init__(self, fan: Fan, lattice: Quasilattice,
                 witnesses: Optional[Sequence[Optional[Sequence[int]]]] = None):
        if lattice.dim != fan.dim:
            raise ValueError("fan and quasilattice dimensions differ")
        self.fan = fan
        self.lattice = lattice
        self.domain = lattice.domain
        if witnesses is None:
            witnesses = [None] * fan.ray_count
        if len(witnesses) != fan.ray_count:
            raise ValueError("one witness slot per ray is required")
        self.witnesses = tuple(
            None if w is None else tuple(int(c) for c in w) for w in witnesses)

    @property
    def dim(self):
        return self.fan.dim

    @property
    def ray_count(self):
        return self.fan.ray_count

    def ray(self, index: int):
        """Ray generator by 1-based index."""
        return self.fan.rays[index - 1]

    def ray_matrix(self) -> Matrix:
        """n x d matrix whose labeled columns are the ray generators."""
        return Matrix.from_columns(
            self.domain, list(self.fan.rays),
            col_labels=tuple(range(1, self.ray_count + 1)))

    def cone_matrix(self, cone: Sequence[int]) -> Matrix:
        """n x n matrix of the cone's rays, columns in increasing ray index."""
        indices = tuple(sorted(cone))
        return Matrix.from_columns(
            self.domain, [self.ray(i) for i in indices], col_labels=indices)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    simplicial: bool
    simplicial_failures: tuple
    quasirational: bool
    witness_failures: tuple
    face_condition: bool
    face_pairs_checked: int
    probe_ran: bool
    probe_directions: int
    probe_gaps: int
    probe_overlaps: int
    probe_note: str = ""

    @property
    def passed(self):
        return self.simplicial and self.quasirational and self.face_condition

    @property
    def advisory_flags(self):
        flags = []
        if self.probe_ran and self.probe_gaps:
            flags.append(f"support probe: {self.probe_gaps} uncovered directions")
        if self.probe_ran and self.probe_overlaps:
            flags.append(f"support probe: {self.probe_overlaps} multiply covered directions")
        return flags


def _numeric_matrix(matrix: Matrix, parameter_sample=None, precision=15):
    values = [float(e.eval_numeric(precision, parameter_sample))
              for e in matrix.entries]
    return np.array(values, dtype=float).reshape(matrix.rows, matrix.cols)


def validate(triple: FundamentalTriple, probe_directions: int = 64,
             seed: int = 0, parameter_sample=None,
             probe_tolerance: float = 1e-9) -> ValidationReport:
    """Run the structural checks and the advisory numeric support probe."""
    simplicial_failures = []
    for cone in triple.fan.max_cones:
        if triple.cone_matrix(cone).rank() != triple.dim:
            simplicial_failures.append(cone)

    witness_failures = []
    for j in range(1, triple.ray_count + 1):
        witness = triple.witnesses[j - 1]
        if witness is None:
            witness_failures.append((j, "missing witness"))
            continue
        if len(witness) != triple.lattice.count:
            witness_failures.append((j, "witness length mismatch"))
            continue
        value = triple.lattice.combination(witness)
        if any(not (x - y).is_zero() for x, y in zip(value, triple.ray(j))):
            witness_failures.append((j, "witness does not reproduce the ray"))

    face_ok = True
    pairs = 0
    if not simplicial_failures:
        for a, b in itertools.combinations(triple.fan.max_cones, 2):
            shared = sorted(set(a) & set(b))
            pairs += 1
            if not shared:
                continue
            sub = Matrix.from_columns(triple.domain, [triple.ray(i) for i in shared])
            if sub.rank() != len(shared):
                face_ok = False

    probe_ran = False
    gaps = overlaps = 0
    note = ""
    can_probe = True
    if triple.domain.kind == "rational_function" and parameter_sample is None:
        parameter_sample = triple.domain.default_sample
        if parameter_sample is None:
            can_probe = False
            note = "skipped: parameter field without a sample value"
    if simplicial_failures:
        can_probe = False
        note = "skipped: simpliciality failed"
    if can_probe and probe_directions > 0:
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
        directions = rng.normal(size=(probe_directions, triple.dim))
        norms = np.linalg.norm(directions, axis=1)
        norms[norms == 0] = 1.0
        directions = directions / norms[:, None]
        counts = np.zeros(probe_directions, dtype=int)
        for cone in triple.fan.max_cones:
            a = _numeric_matrix(triple.cone_matrix(cone), parameter_sample)
            coords = np.linalg.solve(a, directions.T)
            inside = np.all(coords >= -probe_tolerance, axis=0)
            counts += inside.astype(int)
        gaps = int(np.sum(counts == 0))
        overlaps = int(np.sum(counts >= 2))
        probe_ran = True

    return ValidationReport(
        simplicial=not simplicial_failures,
        simplicial_failures=tuple(simplicial_failures),
        quasirational=not witness_failures,
        witness_failures=tuple(witness_failures),
        face_condition=face_ok,
        face_pairs_checked=pairs,
        probe_ran=probe_ran,
        probe_directions=probe_directions if probe_ran else 0,
        probe_gaps=gaps,
        probe_overlaps=overlaps,
        probe_note=note,
    )


# ---------------------------------------------------------------------------
# witness recovery
# ---------------------------------------------------------------------------

def _rational_rows(domain, coefficients, target):
    """Expand one linear equation over the domain into rational equations.

    Returns a list of (row, rhs) pairs with Fraction entries whose integer
    solutions coincide with those of  sum coeff_l * m_l = target.
    """
    if domain.kind == "rational":
        return [([c.as_rational() for c in coefficients], target.as_rational())]
    if domain.kind == "number_field":
        deg = domain.degree
        rows = []
        for t in range(deg):
            rows.append(([c.payload[t] for c in coefficients], target.payload[t]))
        return rows
    # rational functions: clear denominators, then compare coefficients of
    # each power of the parameter
    from .scalars import _pdivmod, _pgcd, _pmul
    dens = [c.payload[1] for c in coefficients] + [target.payload[1]]
    common = (Fraction(1),)
    for den in dens:
        g = _pgcd(common, den)
        common = _pmul(common, _pdivmod(den, g)[0])
    cleared = []
    for c in coefficients + [target]:
        num, den = c.payload
        cleared.append(_pmul(num, _pdivmod(common, den)[0]))
    width = max((len(p) for p in cleared), default=1)
    rows = []
    for t in range(max(width, 1)):
        row = [p[t] if t < len(p) else Fraction(0) for p in cleared[:-1]]
        rhs = cleared[-1][t] if t < len(cleared[-1]) else Fraction(0)
        rows.append((row, rhs))
    return rows


def ray_membership(triple: FundamentalTriple, j: int, box: int = 10):
    """Verify or recover the integer witness for ray j (1-based).

    A supplied witness is verified exactly.  Otherwise the rational solution
    set of  G m = X_j  is computed and integer points are searched by
    enumerating integer coefficient offsets in [-box, box] on the kernel
    directions.
    """
    if not 1 <= j <= triple.ray_count:
        raise ValueError(f"ray index {j} out of range")
    witness = triple.witnesses[j - 1]
    target_ray = triple.ray(j)
    if witness is not None:
        value = triple.lattice.combination(witness)
        if all((x - y).is_zero() for x, y in zip(value, target_ray)):
            return witness
        raise WitnessRecoveryError(
            f"stored witness for ray {j} does not reproduce the ray")

    rational = RationalDomain()
    rows, rhs = [], []
    generators = triple.lattice.generators
    for i in range(triple.dim):
        coeff_row = [generators[i, l] for l in range(generators.cols)]
        for row, value in _rational_rows(triple.domain, coeff_row, target_ray[i]):
            rows.append([rational.scalar(x) for x in row])
            rhs.append(rational.scalar(value))
    system = Matrix.from_rows(rational, rows)
    solved = solve_general(system, rhs)
    if solved is None:
        raise WitnessRecoveryError(
            f"ray {j} is not a rational combination of the lattice generators")
    particular, kernel = solved

    def integer_vector(vec):
        out = []
        for x in vec:
            q = x.as_rational()
            if q.denominator != 1:
                return None
            out.append(int(q))
        return out

    scaled_kernel = []
    for vec in kernel:
        denominators = [x.as_rational().denominator for x in vec]
        scale = lcm(*denominators) if denominators else 1
        scaled_kernel.append([x * scale for x in vec])

    free_dim = len(scaled_kernel)
    if (2 * box + 1) ** free_dim > 2_000_000:
        raise WitnessRecoveryError(
            f"witness search space too large ({free_dim} free directions); "
            "supply witnesses explicitly")
    candidates = []
    for offsets in itertools.product(range(-box, box + 1), repeat=free_dim):
        point = list(particular)
        for c, direction in zip(offsets, scaled_kernel):
            if c:
                point = [p + c * v for p, v in zip(point, direction)]
        m = integer_vector(point)
        if m is not None:
            size = (max(abs(c) for c in m), sum(abs(c) for c in m)) if m else (0, 0)
            candidates.append((size, m))
    if not candidates:
        particular_txt = [x.text() for x in particular]
        raise WitnessRecoveryError(
            f"no integer witness for ray {j} within box {box}; "
            f"rational solution {particular_txt} plus {free_dim} kernel directions")
    candidates.sort(key=lambda pair: (pair[0], pair[1]))
    m = candidates[0][1]
    value = triple.lattice.combination(m)
    if any(not (x - y).is_zero() for x, y in zip(value, target_ray)):
        raise WitnessRecoveryError(f"recovered witness for ray {j} failed verification")
    return tuple(m)


def with_recovered_witnesses(triple: FundamentalTriple,
                             box: int = 10) -> FundamentalTriple:
    """Fill in any missing ray witnesses by the bounded recovery search."""
    if all(w is not None for w in triple.witnesses):
        return triple
    witnesses = [triple.witnesses[j - 1] if triple.witnesses[j - 1] is not None
                 else ray_membership(triple, j, box=box)
                 for j in range(1, triple.ray_count + 1)]
    return FundamentalTriple(triple.fan, triple.lattice, witnesses)


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------

@dataclass
class AdjacencyReport:
    overlapping: tuple  # (cone_a, cone_b, shared, h) with shared nonempty
    disjoint: tuple     # (cone_a, cone_b, h) with h == n


def cone_adjacency(triple: FundamentalTriple) -> AdjacencyReport:
    """All unordered cone pairs, split by whether their index sets meet."""
    overlapping = []
    disjoint = []
    for a, b in itertools.combinations(triple.fan.max_cones, 2):
        shared = tuple(sorted(set(a) & set(b)))
        h = len(set(b) - set(a))
        if shared:
            overlapping.append((a, b, shared, h))
        else:
            disjoint.append((a, b, h))
    return AdjacencyReport(tuple(overlapping), tuple(disjoint))
