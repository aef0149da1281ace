import itertools
import math
import random

from quasifold import (Fan, FundamentalTriple, Matrix, Quasilattice,
                       build_chart, cocycle_check, fixed_point, orbit_report,
                       relations, render_monomial_map, transition_map)


def expected_matrix(domain, rows):
    return Matrix.from_rows(domain, rows)


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def test_quasisphere_charts(gallery):
    doc, triple, _ = gallery["quasisphere"]
    chart1 = build_chart(triple, (1,))
    assert [e.text() for e in chart1.group_exponents.entries] == ["1/a", "0"]
    chart2 = build_chart(triple, (2,))
    assert [e.text() for e in chart2.group_exponents.entries] == ["0", "-a"]
    assert chart1.fixed_point == (0, 1)
    assert chart2.fixed_point == (1, 0)
    assert chart1.matrix @ chart1.inverse == Matrix.identity(doc.domain, 1)


def test_dodecahedron_first_chart_group(gallery):
    doc, triple, _ = gallery["dodecahedron"]
    chart = build_chart(triple, (1, 2, 3))
    inv_phi = doc.domain.scalar("alpha^2 - 3")
    zero = doc.domain.zero()
    # columns for the first three generators are unit vectors, reduced away
    for col in range(3):
        assert all(x.is_zero() for x in chart.group_exponents.column(col))
    # the columns for the other generators keep 1/phi and drop the -1 entries
    assert chart.group_exponents.column(3) == (inv_phi, inv_phi, zero)
    assert chart.group_exponents.column(4) == (zero, inv_phi, inv_phi)
    assert chart.group_exponents.column(5) == (inv_phi, zero, inv_phi)


def test_group_exponent_columns_are_lattice_compatible(gallery):
    # A_sigma times each reduced column must land back in the lattice with
    # integer coordinates, reconstructible from the stored witnesses
    for name, (doc, triple, _) in gallery.items():
        for cone in triple.fan.max_cones:
            chart = build_chart(triple, cone)
            for col in range(chart.group_exponents.cols):
                reduced = chart.group_exponents.column(col)
                raw = chart.inverse.apply(triple.lattice.generators.column(col))
                dropped = [x - y for x, y in zip(raw, reduced)]
                coefficients = [0] * triple.lattice.count
                coefficients[col] += 1
                for entry, ray_index in zip(dropped, cone):
                    q = entry.as_rational()
                    assert q is not None and q.denominator == 1
                    witness = triple.witnesses[ray_index - 1]
                    for t, w in enumerate(witness):
                        coefficients[t] -= int(q) * w
                value = triple.lattice.combination(coefficients)
                target = chart.matrix.apply(reduced)
                assert all((x - y).is_zero() for x, y in zip(value, target))


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def test_fixed_point_patterns(gallery):
    _, dodeca, _ = gallery["dodecahedron"]
    assert fixed_point(dodeca, (1, 2, 3)) == (0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1)
    assert fixed_point(dodeca, (8, 9, 11)) == (1, 1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1)
    _, sphere, _ = gallery["quasisphere"]
    assert fixed_point(sphere, (1,)) == (0, 1)


def test_fixed_point_zero_count(gallery):
    for _, triple, _ in gallery.values():
        for cone in triple.fan.max_cones:
            pattern = fixed_point(triple, cone)
            assert sum(1 for x in pattern if x == 0) == triple.dim
            assert all(pattern[i - 1] == 0 for i in cone)


# ---------------------------------------------------------------------------
# transitions
# ---------------------------------------------------------------------------

def test_transition_quasisphere(gallery):
    doc, triple, _ = gallery["quasisphere"]
    tmap = transition_map(triple, (1,), (2,))
    assert tmap.exponents == expected_matrix(doc.domain, [["-a"]])
    assert tmap.render(triple.dim) == "[z^-a]"
    assert tmap.dense_only and tmap.h == 1


def test_transition_weighted_projective(gallery):
    doc, triple, _ = gallery["cp2-11a"]
    tmap = transition_map(triple, (2, 3), (1, 3))
    assert tmap.exponents == expected_matrix(doc.domain,
                                             [["-1", "0"], ["-a", "1"]])
    assert tmap.render(triple.dim) == "[z2^-1 : z2^-a z3]"
    assert not tmap.dense_only and tmap.h == 1


def test_transition_kite(gallery):
    doc, triple, _ = gallery["kite"]
    tmap = transition_map(triple, (1, 4), (2, 4))
    phi_inv = "1/(alpha^2 - 2)"
    assert tmap.exponents == expected_matrix(
        doc.domain, [[f"-{phi_inv}", "0"], [phi_inv, "1"]])
    assert tmap.render(triple.dim) == \
        "[z1^(-alpha^2 + 3) : z1^(alpha^2 - 3) z4]"


def test_transition_dodecahedron_edge_pair(gallery):
    doc, triple, _ = gallery["dodecahedron"]
    tmap = transition_map(triple, (1, 2, 3), (1, 2, 4))
    phi_inv = "1/(alpha^2 - 2)"
    assert tmap.exponents == expected_matrix(doc.domain, [
        ["1", "0", phi_inv],
        ["0", "1", phi_inv],
        ["0", "0", "-1"],
    ])
    assert tmap.render(triple.dim) == \
        "[z1 z3^(alpha^2 - 3) : z2 z3^(alpha^2 - 3) : z3^-1]"


def test_transition_dodecahedron_facet_pair(gallery):
    doc, triple, _ = gallery["dodecahedron"]
    tmap = transition_map(triple, (1, 2, 4), (1, 3, 6))
    phi_inv = "1/(alpha^2 - 2)"
    assert tmap.exponents == expected_matrix(doc.domain, [
        ["1", phi_inv, "1"],
        ["0", phi_inv, f"-{phi_inv}"],
        ["0", "-1", f"-{phi_inv}"],
    ])
    assert tmap.render(triple.dim) == ("[z1 z2^(alpha^2 - 3) z4 : "
                                       "z2^(alpha^2 - 3) z4^(-alpha^2 + 3) : "
                                       "z2^-1 z4^(-alpha^2 + 3)]")


def test_render_edge_cases(rational):
    exponents = Matrix.from_rows(rational, [["0", "0"], ["1", "-2"]],
                                 col_labels=(4, 7))
    assert render_monomial_map(exponents, 2) == "[1 : z4 z7^-2]"
    half = Matrix.from_rows(rational, [["1/2"]], col_labels=(1,))
    assert render_monomial_map(half, 2) == "[z1^(1/2)]"


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

def test_relations_dodecahedron_base(gallery):
    doc, triple, _ = gallery["dodecahedron"]
    inv_phi = doc.domain.scalar("alpha^2 - 3")
    one = doc.domain.one()
    relation = relations(triple, (1, 2, 3))
    assert relation.coefficients[4] == (inv_phi, inv_phi, -one)
    assert relation.coefficients[5] == (-one, inv_phi, inv_phi)
    assert relation.coefficients[6] == (inv_phi, -one, inv_phi)
    assert set(relation.coefficients) == set(range(4, 13))


def test_relations_dodecahedron_rewritten(gallery):
    doc, triple, _ = gallery["dodecahedron"]
    inv_phi = doc.domain.scalar("alpha^2 - 3")
    one = doc.domain.one()
    relation = relations(triple, (1, 2, 4))
    assert relation.coefficients[3] == (inv_phi, inv_phi, -one)
    assert relation.coefficients[5] == (-inv_phi, one, -inv_phi)
    assert relation.coefficients[6] == (one, -inv_phi, -inv_phi)


def test_relations_skip_cone_members(gallery):
    for _, triple, _ in gallery.values():
        for cone in triple.fan.max_cones:
            relation = relations(triple, cone)
            assert set(relation.coefficients) == \
                set(range(1, triple.ray_count + 1)) - set(cone)


def test_relation_kernel_soundness(gallery):
    for _, triple, _ in gallery.values():
        pi = triple.ray_matrix()
        for cone in triple.fan.max_cones:
            relation = relations(triple, cone)
            for j, vector in relation.kernel_vectors.items():
                assert vector[j - 1] == triple.domain.one()
                assert all(x.is_zero() for x in pi.apply(vector))


# ---------------------------------------------------------------------------
# cocycle and orbits
# ---------------------------------------------------------------------------

def test_cocycle_single_cone(rational):
    lattice = Quasilattice(rational, Matrix.identity(rational, 2))
    rays = [[rational.one(), rational.zero()],
            [rational.zero(), rational.one()]]
    fan = Fan(2, rays, [[1, 2]])
    triple = FundamentalTriple(fan, lattice, [(1, 0), (0, 1)])
    report = cocycle_check(triple)
    assert report.pairs_checked == 0 and report.triples_checked == 0
    assert report.passed


def test_cocycle_weighted_projective(gallery, gallery_atlases):
    _, triple, _ = gallery["cp2-11a"]
    report = cocycle_check(triple, gallery_atlases["cp2-11a"])
    assert report.pairs_checked == 6
    assert report.triples_checked == 6
    assert report.passed


def test_orbit_reports(gallery):
    _, sphere, _ = gallery["quasisphere"]
    rows = orbit_report(sphere)
    assert [(r.cone_dim, r.orbit_dim, r.count) for r in rows] == \
        [(0, 1, 1), (1, 0, 2)]
    _, cp2, _ = gallery["cp2-11a"]
    rows = orbit_report(cp2)
    assert [(r.cone_dim, r.orbit_dim, r.count) for r in rows] == \
        [(0, 2, 1), (1, 1, 3), (2, 0, 3)]
    _, dodeca, _ = gallery["dodecahedron"]
    rows = orbit_report(dodeca)
    assert [(r.cone_dim, r.orbit_dim, r.count) for r in rows] == \
        [(0, 3, 1), (1, 2, 12), (2, 1, 30), (3, 0, 20)]


# ---------------------------------------------------------------------------
# structural invariants across the gallery
# ---------------------------------------------------------------------------

def test_shared_column_property(gallery, gallery_atlases):
    for name, (_, triple, _) in gallery.items():
        atlas = gallery_atlases[name]
        for source, target in itertools.permutations(triple.fan.max_cones, 2):
            tmap = atlas.transition(source, target)
            for j in tmap.shared:
                col = tmap.source.index(j)
                row = tmap.target.index(j)
                for i in range(tmap.exponents.rows):
                    entry = tmap.exponents[i, col]
                    if i == row:
                        assert entry == triple.domain.one()
                    else:
                        assert entry.is_zero()


def test_inverse_pair_property(gallery, gallery_atlases):
    for name, (_, triple, _) in gallery.items():
        atlas = gallery_atlases[name]
        identity = Matrix.identity(triple.domain, triple.dim)
        for a, b in itertools.combinations(triple.fan.max_cones, 2):
            forward = atlas.transition(a, b).exponents
            backward = atlas.transition(b, a).exponents
            assert forward @ backward == identity


def random_plane_fan(rng, rational):
    """A random complete-ish simplicial fan in the plane over Z^2."""
    rays = []
    seen = set()
    count = rng.randint(3, 7)
    while len(rays) < count:
        x, y = rng.randint(-9, 9), rng.randint(-9, 9)
        if (x, y) == (0, 0):
            continue
        g = math.gcd(abs(x), abs(y))
        x, y = x // g, y // g
        # keep directions pairwise non-parallel so consecutive pairs span
        if (x, y) in seen or (-x, -y) in seen:
            continue
        seen.add((x, y))
        rays.append((x, y))
    rays.sort(key=lambda v: math.atan2(v[1], v[0]))
    cones = [[i + 1, (i + 1) % len(rays) + 1] for i in range(len(rays))]
    fan = Fan(2, [[rational.scalar(x), rational.scalar(y)] for x, y in rays],
              cones)
    lattice = Quasilattice(rational, Matrix.identity(rational, 2))
    return FundamentalTriple(fan, lattice, [tuple(r) for r in rays])


def test_randomized_rational_triples_cocycle(rational):
    rng = random.Random(424242)
    for _ in range(50):
        triple = random_plane_fan(rng, rational)
        report = cocycle_check(triple)
        assert report.passed
        expected_pairs = len(triple.fan.max_cones) * (len(triple.fan.max_cones) - 1)
        assert report.pairs_checked == expected_pairs
