import numpy as np
import pytest

from fsgrating import PmlConfig
from fsgrating import mesh as msh


@pytest.fixture
def unit_pml():
    return PmlConfig(1.0, 1.0, 1 + 1j, 1 + 1j, 2.0)


def test_initial_flat_strip_counts(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    # 3 columns, 9 row lines (2 rows per band)
    assert m.n_nodes == 3 * 9
    assert m.n_elems == 2 * 2 * 8
    assert msh.audit(m) == []


def test_initial_mesh_area_partition(corner_cfg, unit_pml):
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.22)
    height = (corner_cfg.h1 - corner_cfg.h2
              + unit_pml.delta1 + unit_pml.delta2)
    assert m.areas().sum() == pytest.approx(corner_cfg.period * height,
                                            abs=1e-10)
    assert msh.audit(m) == []


def test_initial_mesh_boundary_tags(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    top = m.topology
    boundary = top.edge_elems[:, 1] < 0
    tags = top.edge_tags[boundary]
    assert set(tags) == {msh.LEFT, msh.RIGHT, msh.DIRICHLET_TOP,
                         msh.DIRICHLET_BOTTOM}
    assert (top.edge_tags == msh.INTERFACE).sum() == 2
    assert (top.edge_tags == msh.GAMMA_PLUS).sum() == 2
    assert (top.edge_tags == msh.GAMMA_MINUS).sum() == 2


def test_initial_mesh_periodic_mirror(corner_cfg, unit_pml):
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.3)
    top = m.topology
    left = np.unique(top.edge_nodes[top.edge_tags == msh.LEFT])
    for node in left:
        partner = top.node_partner[node]
        assert partner >= 0
        assert m.nodes[partner, 0] == corner_cfg.period
        assert m.nodes[partner, 1] == m.nodes[node, 1]
        assert top.node_partner[partner] == node


def test_profile_vertices_are_nodes(corner_cfg, unit_pml):
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.37)
    for x, y in corner_cfg.profile:
        hit = np.isclose(m.nodes[:, 0], x, atol=1e-12) \
            & np.isclose(m.nodes[:, 1], y, atol=1e-12)
        assert hit.any()


def test_bisect_single_element_conforming(corner_cfg, unit_pml):
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.3)
    interior = np.nonzero(
        (m.centroids()[:, 1] > -0.5) & (m.centroids()[:, 1] < -0.2))[0]
    m2 = msh.bisect(m, [interior[0]])
    assert msh.audit(m2) == []
    assert m2.n_elems > m.n_elems
    assert m2.areas().sum() == pytest.approx(m.areas().sum(), abs=1e-10)


def test_bisect_mark_all_doubles(corner_cfg, ex1_cfg, unit_pml):
    for cfg in (ex1_cfg, corner_cfg):
        m = msh.generate_initial_mesh(cfg, unit_pml, 0.3)
        m2 = msh.bisect(m, np.arange(m.n_elems))
        assert m2.n_elems == 2 * m.n_elems
        assert msh.audit(m2) == []


def test_bisect_mirrors_periodic_edges(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    top = m.topology
    left_edge = np.nonzero(top.edge_tags == msh.LEFT)[0][0]
    owner = top.edge_elems[left_edge, 0]
    # force the left edge to be cut by marking until it splits
    n_left = (top.edge_tags == msh.LEFT).sum()
    m2 = msh.bisect(m, [owner])
    top2 = m2.topology
    n_left2 = (top2.edge_tags == msh.LEFT).sum()
    n_right2 = (top2.edge_tags == msh.RIGHT).sum()
    assert n_left2 == n_right2
    assert msh.audit(m2) == []


def test_bisect_rejects_bad_input(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    with pytest.raises(ValueError):
        msh.bisect(m, [])
    with pytest.raises(ValueError):
        msh.bisect(m, [m.n_elems + 3])


def test_random_refinement_stays_sound(corner_cfg, unit_pml):
    rng = np.random.default_rng(1)
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.3)
    a0 = m.min_angle()
    area = m.areas().sum()
    for _ in range(10):
        marked = rng.choice(m.n_elems, size=rng.integers(1, m.n_elems + 1),
                            replace=False)
        m = msh.bisect(m, marked)
        assert msh.audit(m) == []
    assert m.min_angle() >= a0 / 2 - 1e-12
    assert m.areas().sum() == pytest.approx(area, abs=1e-10)


def test_interface_polyline_preserved(corner_cfg, unit_pml):
    rng = np.random.default_rng(2)
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.3)
    for _ in range(4):
        m = msh.bisect(m, rng.choice(m.n_elems, size=m.n_elems // 3,
                                     replace=False))
    top = m.topology
    iface = top.edge_nodes[top.edge_tags == msh.INTERFACE]
    x = m.nodes[iface]
    assert np.max(np.abs(x[..., 1] - m.profile_height(x[..., 0]))) <= 1e-12
    spans = np.sort(x[..., 0], axis=1)
    spans = spans[np.argsort(spans[:, 0])]
    assert spans[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert spans[-1, 1] == pytest.approx(corner_cfg.period, abs=1e-12)
    assert np.max(np.abs(spans[1:, 0] - spans[:-1, 1])) <= 1e-12


def test_audit_detects_broken_pairing(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    nodes = m.nodes.copy()
    right = np.nonzero(np.abs(nodes[:, 0] - ex1_cfg.period) < 1e-12)[0]
    inner = right[(np.abs(nodes[right, 1]) < 0.9)][0]
    nodes[inner, 1] += 1e-6
    broken = msh.Mesh(nodes=nodes, elems=m.elems, regions=m.regions,
                      period=m.period, h1=m.h1, h2=m.h2,
                      delta1=m.delta1, delta2=m.delta2, profile=m.profile)
    problems = msh.audit(broken)
    assert len(problems) == 1
    assert "mirror" in problems[0]


def test_region_codes_partition(corner_cfg, unit_pml):
    m = msh.generate_initial_mesh(corner_cfg, unit_pml, 0.22)
    cents = m.centroids()
    f = m.profile_height(cents[:, 0])
    assert ((m.regions == msh.FLUID) == (
        (cents[:, 1] > f) & (cents[:, 1] < corner_cfg.h1))).all()
    assert ((m.regions == msh.SOLID_PML) == (cents[:, 1] < corner_cfg.h2)).all()


def test_uniform_refine_harness(ex1_cfg, unit_pml):
    m = msh.generate_initial_mesh(ex1_cfg, unit_pml, 0.5)
    m2 = msh.uniform_refine(m, 2)
    assert m2.n_elems == 4 * m.n_elems
    assert msh.audit(m2) == []
