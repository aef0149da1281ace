import itertools

import pytest

from quasifold import (Fan, FundamentalTriple, Matrix, Quasilattice,
                       WitnessRecoveryError, cone_adjacency, ray_membership,
                       validate)

# index sets of the twenty maximal cones of the dodecahedron fan
DODECAHEDRON_CONES = [
    (1, 2, 3), (1, 2, 4), (1, 3, 6), (1, 4, 11), (1, 6, 11),
    (2, 3, 5), (2, 4, 12), (2, 5, 12), (3, 5, 10), (3, 6, 10),
    (4, 9, 11), (4, 9, 12), (5, 7, 10), (5, 7, 12), (6, 8, 10),
    (6, 8, 11), (7, 8, 9), (7, 8, 10), (7, 9, 12), (8, 9, 11),
]


def quasisphere_triple(parameter):
    lattice = Quasilattice(parameter,
                           Matrix.from_rows(parameter, [["1", "a"]]))
    rays = [[parameter.generator()], [-parameter.one()]]
    fan = Fan(1, rays, [[1], [2]])
    return FundamentalTriple(fan, lattice, [(0, 1), (-1, 0)])


def test_validate_quasisphere(parameter):
    triple = quasisphere_triple(parameter)
    report = validate(triple)
    assert report.passed
    assert report.simplicial and report.quasirational and report.face_condition
    assert report.probe_ran
    assert report.probe_gaps == 0 and report.probe_overlaps == 0


def test_validate_repeated_ray_fails(rational):
    # two rays with equal coordinates spanning one cone: rank < n
    lattice = Quasilattice(rational, Matrix.identity(rational, 2))
    rays = [[1, 0], [1, 0], [0, 1]]
    fan = Fan(2, [[rational.scalar(x) for x in r] for r in rays],
              [[1, 2], [2, 3]])
    triple = FundamentalTriple(fan, lattice,
                               [(1, 0), (1, 0), (0, 1)])
    report = validate(triple)
    assert not report.simplicial
    assert (1, 2) in report.simplicial_failures
    assert not report.passed


def test_validate_dodecahedron_witnesses(gallery):
    _, triple, _ = gallery["dodecahedron"]
    report = validate(triple)
    assert report.quasirational
    assert report.passed


def test_validate_probe_skipped_without_sample():
    from quasifold import RationalFunctionDomain
    domain = RationalFunctionDomain("a")  # no default sample
    lattice = Quasilattice(domain, Matrix.from_rows(domain, [["1", "a"]]))
    fan = Fan(1, [[domain.generator()], [-domain.one()]], [[1], [2]])
    triple = FundamentalTriple(fan, lattice, [(0, 1), (-1, 0)])
    report = validate(triple)
    assert report.passed
    assert not report.probe_ran
    assert "sample" in report.probe_note


def test_validate_simplicial_iff_invertible(gallery):
    from quasifold import SingularMatrixError
    for name, (_, triple, _) in gallery.items():
        report = validate(triple, probe_directions=0)
        for cone in triple.fan.max_cones:
            try:
                triple.cone_matrix(cone).inverse()
                invertible = True
            except SingularMatrixError:
                invertible = False
            assert invertible == (cone not in report.simplicial_failures)
        assert report.simplicial


def test_validate_probe_flags_support_gap(rational):
    # a fan covering only one quadrant: the probe reports gaps but the
    # structural checks still pass (advisory only)
    lattice = Quasilattice(rational, Matrix.identity(rational, 2))
    rays = [[rational.one(), rational.zero()],
            [rational.zero(), rational.one()]]
    fan = Fan(2, rays, [[1, 2]])
    triple = FundamentalTriple(fan, lattice, [(1, 0), (0, 1)])
    report = validate(triple, probe_directions=128)
    assert report.passed
    assert report.probe_gaps > 0
    assert report.advisory_flags


def test_validate_deterministic(gallery):
    _, triple, _ = gallery["cp2-11a"]
    first = validate(triple, seed=3)
    second = validate(triple, seed=3)
    assert first == second


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def test_witness_recovery_generator_ray(parameter):
    triple = quasisphere_triple(parameter)
    stripped = FundamentalTriple(triple.fan, triple.lattice, [None, None])
    assert tuple(ray_membership(stripped, 1)) == (0, 1)
    assert tuple(ray_membership(stripped, 2)) == (-1, 0)


def test_witness_kite_unit(gallery):
    _, triple, _ = gallery["kite"]
    assert tuple(ray_membership(triple, 3)) == (0, 0, 1, 0, 0)
    # recovery without stored witnesses searches along the one-dimensional
    # rational kernel of the five pentagonal generators and still lands on
    # the sparse unit witness
    stripped = FundamentalTriple(triple.fan, triple.lattice, [None] * 4)
    assert tuple(ray_membership(stripped, 3)) == (0, 0, 1, 0, 0)


def test_witness_dodecahedron_negated(gallery):
    _, triple, _ = gallery["dodecahedron"]
    assert tuple(ray_membership(triple, 7)) == (-1, 0, 0, 0, 0, 0)
    # recovery finds the same witness when none is stored
    stripped = FundamentalTriple(triple.fan, triple.lattice,
                                 [None] * triple.ray_count)
    assert tuple(ray_membership(stripped, 7)) == (-1, 0, 0, 0, 0, 0)


def test_witness_not_found(rational):
    lattice = Quasilattice(rational, Matrix.identity(rational, 2))
    rays = [[rational.scalar("1/2"), rational.zero()],
            [rational.zero(), rational.one()],
            [-rational.one(), -rational.one()]]
    fan = Fan(2, rays, [[1, 2], [2, 3], [1, 3]])
    triple = FundamentalTriple(fan, lattice, [None, (0, 1), (-1, -1)])
    with pytest.raises(WitnessRecoveryError):
        ray_membership(triple, 1)


def test_witness_bad_stored(parameter):
    triple = quasisphere_triple(parameter)
    bad = FundamentalTriple(triple.fan, triple.lattice, [(1, 1), (-1, 0)])
    with pytest.raises(WitnessRecoveryError):
        ray_membership(bad, 1)
    report = validate(bad)
    assert not report.quasirational


# ---------------------------------------------------------------------------
# adjacency
# ---------------------------------------------------------------------------

def test_adjacency_quasisphere(parameter):
    triple = quasisphere_triple(parameter)
    report = cone_adjacency(triple)
    assert report.overlapping == ()
    assert report.disjoint == (((1,), (2,), 1),)


def test_adjacency_weighted_projective(gallery):
    _, triple, _ = gallery["cp2-11a"]
    report = cone_adjacency(triple)
    assert len(report.overlapping) == 3
    assert all(len(shared) == 1 for _, _, shared, _ in report.overlapping)
    assert report.disjoint == ()


def test_adjacency_dodecahedron(gallery):
    _, triple, _ = gallery["dodecahedron"]
    report = cone_adjacency(triple)
    # brute-force oracle over the known index sets: the 30 edge pairs
    # share two indices and the 60 facet-diagonal pairs (five diagonals on
    # each of the twelve pentagonal facets) share one
    share2 = share1 = disjoint = 0
    for a, b in itertools.combinations(DODECAHEDRON_CONES, 2):
        overlap = len(set(a) & set(b))
        if overlap == 2:
            share2 += 1
        elif overlap == 1:
            share1 += 1
        else:
            disjoint += 1
    assert share2 == 30 and share1 == 60 and disjoint == 100
    assert triple.fan.max_cones == tuple(DODECAHEDRON_CONES)
    got2 = sum(1 for _, _, shared, _ in report.overlapping if len(shared) == 2)
    got1 = sum(1 for _, _, shared, _ in report.overlapping if len(shared) == 1)
    assert got2 == share2 and got1 == share1
    assert len(report.disjoint) == disjoint
    for _, _, shared, h in report.overlapping:
        assert h == 3 - len(shared)
