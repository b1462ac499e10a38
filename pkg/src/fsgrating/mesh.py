"""Conforming triangulation of the truncated period cell.

The cell [0, period] x [h2-delta2, h1+delta1] is split into four horizontal
bands: solid absorbing layer, solid, fluid, fluid absorbing layer, with the
interface polyline separating solid from fluid.  The initial mesh is a
terrain-following structured grid whose columns contain every profile
vertex, so the interface is a union of mesh edges exactly.  Refinement is
newest-vertex bisection: each element stores its peak first, the edge
opposite the peak is the refinement edge, and conformity is restored in a
single pass by growing the set of cut edges to a fixed point.  Edges on the
left boundary are always cut together with their mirror partners on the
right boundary so the periodic node pairing survives refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import PmlConfig, ProblemConfig
from .errors import GeometryError

__all__ = [
    "Mesh", "MeshTopology", "generate_initial_mesh", "bisect", "audit",
    "FLUID", "FLUID_PML", "SOLID", "SOLID_PML",
    "INTERIOR", "INTERFACE", "LEFT", "RIGHT", "GAMMA_PLUS", "GAMMA_MINUS",
    "DIRICHLET_TOP", "DIRICHLET_BOTTOM",
]

# region codes
FLUID, FLUID_PML, SOLID, SOLID_PML = 0, 1, 2, 3

# edge tags
INTERIOR, INTERFACE, LEFT, RIGHT = 0, 1, 2, 3
GAMMA_PLUS, GAMMA_MINUS, DIRICHLET_TOP, DIRICHLET_BOTTOM = 4, 5, 6, 7

_TOL = 1e-12


def _is_fluid(regions):
    return regions <= FLUID_PML


@dataclass
class MeshTopology:
    """Derived edge connectivity of a mesh snapshot."""

    edge_nodes: np.ndarray      # (E, 2) node ids, sorted per edge
    elem_edges: np.ndarray      # (M, 3) edge ids; column 0 is the refinement edge
    edge_elems: np.ndarray      # (E, 2) adjacent element ids, -1 when absent
    edge_tags: np.ndarray       # (E,) tag codes
    edge_partner: np.ndarray    # (E,) mirror edge id for LEFT/RIGHT edges, else -1
    node_partner: np.ndarray    # (N,) mirror node id for boundary nodes, else -1
    edge_lengths: np.ndarray    # (E,)


@dataclass
class Mesh:
    """Triangulation with region codes and the strip geometry it discretizes.

    nodes: (N, 2) coordinates; elems: (M, 3) node ids, counterclockwise,
    peak vertex first (the refinement edge is opposite the peak);
    regions: (M,) codes in {FLUID, FLUID_PML, SOLID, SOLID_PML}.
    """

    nodes: np.ndarray
    elems: np.ndarray
    regions: np.ndarray
    period: float
    h1: float
    h2: float
    delta1: float
    delta2: float
    profile: tuple
    _topology: MeshTopology | None = field(default=None, repr=False, compare=False)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elems(self):
        return self.elems.shape[0]

    def corner_coords(self):
        """Element corner coordinates, shape (M, 3, 2)."""
        return self.nodes[self.elems]

    def areas(self):
        c = self.corner_coords()
        d1 = c[:, 1] - c[:, 0]
        d2 = c[:, 2] - c[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def diameters(self):
        c = self.corner_coords()
        e = np.stack([c[:, 2] - c[:, 1], c[:, 0] - c[:, 2], c[:, 1] - c[:, 0]], axis=1)
        return np.sqrt((e ** 2).sum(-1)).max(axis=1)

    def centroids(self):
        return self.corner_coords().mean(axis=1)

    def min_angle(self):
        """Smallest interior angle over all elements, in radians."""
        c = self.corner_coords()
        angles = []
        for k in range(3):
            u = c[:, (k + 1) % 3] - c[:, k]
            v = c[:, (k + 2) % 3] - c[:, k]
            cosv = (u * v).sum(-1) / np.sqrt((u ** 2).sum(-1) * (v ** 2).sum(-1))
            angles.append(np.arccos(np.clip(cosv, -1.0, 1.0)))
        return float(np.min(angles))

    def profile_height(self, x1):
        pts = np.asarray(self.profile)
        return np.interp(x1, pts[:, 0], pts[:, 1])

    def fluid_node_mask(self):
        """Nodes incident to a fluid-side element (pressure unknowns live here)."""
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.elems[_is_fluid(self.regions)].ravel()] = True
        return mask

    def solid_node_mask(self):
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.elems[~_is_fluid(self.regions)].ravel()] = True
        return mask

    @property
    def topology(self) -> MeshTopology:
        if self._topology is None:
            self._topology = _build_topology(self)
        return self._topology


def _build_topology(mesh: Mesh) -> MeshTopology:
    elems = mesh.elems
    n_elems = elems.shape[0]
    # local edge k is opposite vertex k
    local = np.stack([elems[:, [1, 2]], elems[:, [2, 0]], elems[:, [0, 1]]], axis=1)
    pairs = np.sort(local.reshape(-1, 2), axis=1)
    keys = pairs[:, 0].astype(np.int64) * mesh.n_nodes + pairs[:, 1]
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    edge_nodes = pairs[first]
    elem_edges = inverse.reshape(n_elems, 3)

    n_edges = edge_nodes.shape[0]
    edge_elems = np.full((n_edges, 2), -1, dtype=np.int64)
    owner = np.repeat(np.arange(n_elems), 3)
    order = np.argsort(inverse, kind="stable")
    sorted_edges = inverse[order]
    sorted_owner = owner[order]
    starts = np.searchsorted(sorted_edges, np.arange(n_edges))
    counts = np.bincount(sorted_edges, minlength=n_edges)
    if counts.max() > 2:
        raise GeometryError("an edge is shared by more than two elements")
    edge_elems[:, 0] = sorted_owner[starts]
    two = counts == 2
    edge_elems[two, 1] = sorted_owner[starts[two] + 1]

    x = mesh.nodes[edge_nodes]          # (E, 2, 2)
    lengths = np.sqrt(((x[:, 1] - x[:, 0]) ** 2).sum(-1))

    scale = max(1.0, mesh.period, mesh.h1 - mesh.h2)
    tol = _TOL * scale
    tags = np.full(n_edges, INTERIOR, dtype=np.int8)
    on_line = lambda coords, value: np.all(np.abs(coords - value) <= tol, axis=1)
    x1 = x[..., 0]
    x2 = x[..., 1]
    tags[on_line(x1, 0.0)] = LEFT
    tags[on_line(x1, mesh.period)] = RIGHT
    tags[on_line(x2, mesh.h1 + mesh.delta1)] = DIRICHLET_TOP
    tags[on_line(x2, mesh.h2 - mesh.delta2)] = DIRICHLET_BOTTOM

    interior_like = tags == INTERIOR
    both = edge_elems[:, 1] >= 0
    grp0 = _is_fluid(mesh.regions[edge_elems[:, 0]])
    grp1 = np.where(both, _is_fluid(mesh.regions[edge_elems[:, 1]]), grp0)
    tags[interior_like & both & (grp0 != grp1)] = INTERFACE
    interior_like = tags == INTERIOR
    tags[interior_like & on_line(x2, mesh.h1)] = GAMMA_PLUS
    tags[interior_like & on_line(x2, mesh.h2)] = GAMMA_MINUS

    # mirror pairing of boundary nodes and edges by matching heights
    node_partner = np.full(mesh.n_nodes, -1, dtype=np.int64)
    left_nodes = np.unique(edge_nodes[tags == LEFT])
    right_nodes = np.unique(edge_nodes[tags == RIGHT])
    if left_nodes.size != right_nodes.size:
        raise GeometryError("left/right boundary node counts differ")
    lorder = left_nodes[np.argsort(mesh.nodes[left_nodes, 1], kind="stable")]
    rorder = right_nodes[np.argsort(mesh.nodes[right_nodes, 1], kind="stable")]
    if left_nodes.size and np.max(np.abs(
            mesh.nodes[lorder, 1] - mesh.nodes[rorder, 1])) > tol:
        raise GeometryError("periodic boundary nodes do not mirror")
    node_partner[lorder] = rorder
    node_partner[rorder] = lorder

    edge_partner = np.full(n_edges, -1, dtype=np.int64)
    left_edges = np.nonzero(tags == LEFT)[0]
    right_edges = np.nonzero(tags == RIGHT)[0]
    if left_edges.size != right_edges.size:
        raise GeometryError("left/right boundary edge counts differ")
    if left_edges.size:
        lmid = mesh.nodes[edge_nodes[left_edges]].mean(axis=1)[:, 1]
        rmid = mesh.nodes[edge_nodes[right_edges]].mean(axis=1)[:, 1]
        lsort = left_edges[np.argsort(lmid, kind="stable")]
        rsort = right_edges[np.argsort(rmid, kind="stable")]
        edge_partner[lsort] = rsort
        edge_partner[rsort] = lsort

    return MeshTopology(edge_nodes=edge_nodes, elem_edges=elem_edges,
                        edge_elems=edge_elems, edge_tags=tags,
                        edge_partner=edge_partner, node_partner=node_partner,
                        edge_lengths=lengths)


# ----------------------------------------------------------------------
# initial mesh

def generate_initial_mesh(cfg: ProblemConfig, pml: PmlConfig, h0: float) -> Mesh:
    """Structured terrain-following mesh of the truncated cell.

    Columns contain every profile vertex and are at most h0 apart; each of
    the four bands is divided into rows of height at most h0 (interpolated
    per column for the profile-bounded bands).  Every quad is split along
    its shorter diagonal and both triangles take the diagonal as their
    refinement edge, so a mark-everything pass doubles the element count
    without closure.
    """
    if not h0 > 0:
        raise GeometryError("h0 must be positive")
    pts = cfg.profile_array
    ys = pts[:, 1]
    if not (cfg.h2 < ys.min() and ys.max() < cfg.h1):
        raise GeometryError("profile exits the strip between h2 and h1")

    xs = [np.asarray([pts[0, 0]])]
    for (xa, ya), (xb, yb) in zip(pts[:-1], pts[1:]):
        nseg = max(1, int(math.ceil((xb - xa) / h0)))
        xs.append(np.linspace(xa, xb, nseg + 1)[1:])
    columns = np.concatenate(xs)
    f_col = cfg.profile_height(columns)

    n_bot = max(1, int(math.ceil(pml.delta2 / h0)))
    n_top = max(1, int(math.ceil(pml.delta1 / h0)))
    n_sol = max(1, int(math.ceil((ys.max() - cfg.h2) / h0)))
    n_flu = max(1, int(math.ceil((cfg.h1 - ys.min()) / h0)))
    n_rows = n_bot + n_sol + n_flu + n_top + 1

    def column_stack(fc):
        return np.concatenate([
            np.linspace(cfg.h2 - pml.delta2, cfg.h2, n_bot + 1),
            np.linspace(cfg.h2, fc, n_sol + 1)[1:],
            np.linspace(fc, cfg.h1, n_flu + 1)[1:],
            np.linspace(cfg.h1, cfg.h1 + pml.delta1, n_top + 1)[1:],
        ])

    stacks = [column_stack(fc) for fc in f_col]
    stacks[-1] = stacks[0].copy()  # exact mirror of the periodic boundary

    n_cols = columns.size
    nodes = np.empty((n_cols * n_rows, 2))
    for c in range(n_cols):
        sl = slice(c * n_rows, (c + 1) * n_rows)
        nodes[sl, 0] = columns[c]
        nodes[sl, 1] = stacks[c]

    band_of_row = np.empty(n_rows - 1, dtype=np.int8)
    band_of_row[:n_bot] = SOLID_PML
    band_of_row[n_bot:n_bot + n_sol] = SOLID
    band_of_row[n_bot + n_sol:n_bot + n_sol + n_flu] = FLUID
    band_of_row[n_bot + n_sol + n_flu:] = FLUID_PML

    elems = []
    regions = []
    for c in range(n_cols - 1):
        for r in range(n_rows - 1):
            sw = c * n_rows + r
            se = (c + 1) * n_rows + r
            ne = se + 1
            nw = sw + 1
            d_sw_ne = np.sum((nodes[sw] - nodes[ne]) ** 2)
            d_se_nw = np.sum((nodes[se] - nodes[nw]) ** 2)
            if d_sw_ne <= d_se_nw:
                elems.append((se, ne, sw))
                elems.append((nw, sw, ne))
            else:
                elems.append((sw, se, nw))
                elems.append((ne, nw, se))
            regions.extend((band_of_row[r], band_of_row[r]))

    mesh = Mesh(nodes=nodes, elems=np.asarray(elems, dtype=np.int64),
                regions=np.asarray(regions, dtype=np.int8),
                period=cfg.period, h1=cfg.h1, h2=cfg.h2,
                delta1=pml.delta1, delta2=pml.delta2, profile=cfg.profile)
    if (mesh.areas() <= 0).any():
        raise GeometryError("initial mesh produced a non-positive element")
    return mesh


# ----------------------------------------------------------------------
# newest-vertex bisection

def bisect(mesh: Mesh, marked) -> Mesh:
    """Bisect the marked elements; returns a new conforming mesh.

    The set of cut edges grows from the refinement edges of the marked
    elements until (a) every element with a cut edge has its refinement
    edge cut and (b) every cut boundary edge has its periodic mirror cut.
    Each element is then split at its cut edges in one pass (two, three or
    four children).
    """
    marked = np.asarray(list(marked), dtype=np.int64)
    if marked.size == 0:
        raise ValueError("bisect needs a nonempty marked set")
    if marked.min() < 0 or marked.max() >= mesh.n_elems:
        raise ValueError("marked contains invalid element ids")
    top = mesh.topology
    elem_edges = top.elem_edges
    n_edges = top.edge_nodes.shape[0]

    cut = np.zeros(n_edges, dtype=bool)
    cut[elem_edges[marked, 0]] = True
    partner = top.edge_partner
    cap = n_edges + 10
    for _ in range(cap):
        changed = False
        mirror = (partner >= 0) & cut & ~cut[np.maximum(partner, 0)]
        if mirror.any():
            cut[partner[mirror]] = True
            changed = True
        has_cut = cut[elem_edges].any(axis=1)
        need = has_cut & ~cut[elem_edges[:, 0]]
        if need.any():
            cut[elem_edges[need, 0]] = True
            changed = True
        if not changed:
            break
    else:
        raise GeometryError("bisection closure did not terminate")

    cut_ids = np.nonzero(cut)[0]
    mid_index = np.full(n_edges, -1, dtype=np.int64)
    mid_index[cut_ids] = mesh.n_nodes + np.arange(cut_ids.size)
    midpoints = mesh.nodes[top.edge_nodes[cut_ids]].mean(axis=1)
    new_nodes = np.vstack([mesh.nodes, midpoints])

    e = mesh.elems
    c0 = cut[elem_edges[:, 0]]
    c1 = cut[elem_edges[:, 1]]
    c2 = cut[elem_edges[:, 2]]
    m0 = mid_index[elem_edges[:, 0]]
    m1 = mid_index[elem_edges[:, 1]]
    m2 = mid_index[elem_edges[:, 2]]
    p, a, b = e[:, 0], e[:, 1], e[:, 2]

    chunks = []
    regions = []

    keep = ~c0
    chunks.append(e[keep])
    regions.append(mesh.regions[keep])

    # child over corner a: (m0, p, a), bisected again at edge (p, a) if cut
    plain = c0 & ~c2
    chunks.append(np.stack([m0[plain], p[plain], a[plain]], axis=1))
    regions.append(mesh.regions[plain])
    twice = c0 & c2
    chunks.append(np.stack([m2[twice], m0[twice], p[twice]], axis=1))
    chunks.append(np.stack([m2[twice], a[twice], m0[twice]], axis=1))
    regions.extend([mesh.regions[twice]] * 2)

    # child over corner b: (m0, b, p), bisected again at edge (b, p) if cut
    plain = c0 & ~c1
    chunks.append(np.stack([m0[plain], b[plain], p[plain]], axis=1))
    regions.append(mesh.regions[plain])
    twice = c0 & c1
    chunks.append(np.stack([m1[twice], m0[twice], b[twice]], axis=1))
    chunks.append(np.stack([m1[twice], p[twice], m0[twice]], axis=1))
    regions.extend([mesh.regions[twice]] * 2)

    new_elems = np.vstack([ch for ch in chunks if len(ch)])
    new_regions = np.concatenate([r for r in regions if len(r)])
    return Mesh(nodes=new_nodes, elems=new_elems.astype(np.int64),
                regions=new_regions.astype(np.int8),
                period=mesh.period, h1=mesh.h1, h2=mesh.h2,
                delta1=mesh.delta1, delta2=mesh.delta2, profile=mesh.profile)


def uniform_refine(mesh: Mesh, rounds: int = 1) -> Mesh:
    """Mark-everything refinement, the uniform comparison harness."""
    for _ in range(rounds):
        mesh = bisect(mesh, np.arange(mesh.n_elems))
    return mesh


# ----------------------------------------------------------------------
# audit

def audit(mesh: Mesh) -> list:
    """Check mesh invariants; returns a list of violation strings."""
    problems = []
    areas = mesh.areas()
    if (areas <= 0).any():
        problems.append(f"{int((areas <= 0).sum())} elements with non-positive area")

    try:
        top = mesh.topology
    except GeometryError as exc:
        problems.append(str(exc))
        return problems

    boundary = top.edge_elems[:, 1] < 0
    bad = boundary & ~np.isin(top.edge_tags,
                              (LEFT, RIGHT, DIRICHLET_TOP, DIRICHLET_BOTTOM))
    if bad.any():
        problems.append(f"{int(bad.sum())} hanging or mistagged boundary edges")
    inner = ~boundary
    bad = inner & np.isin(top.edge_tags, (DIRICHLET_TOP, DIRICHLET_BOTTOM))
    if bad.any():
        problems.append("outer layer boundary edge with two adjacent elements")

    # region purity: vertices stay inside their band
    scale = max(1.0, mesh.period, mesh.h1 - mesh.h2)
    tol = 1e-9 * scale
    corners = mesh.corner_coords()
    fy = mesh.profile_height(corners[..., 0])
    y = corners[..., 1]
    lo = {FLUID: None, FLUID_PML: mesh.h1, SOLID: mesh.h2,
          SOLID_PML: mesh.h2 - mesh.delta2}
    hi = {FLUID: mesh.h1, FLUID_PML: mesh.h1 + mesh.delta1, SOLID: None,
          SOLID_PML: mesh.h2}
    for reg in (FLUID, FLUID_PML, SOLID, SOLID_PML):
        sel = mesh.regions == reg
        if not sel.any():
            continue
        lo_b = fy[sel] if lo[reg] is None else lo[reg]
        hi_b = fy[sel] if hi[reg] is None else hi[reg]
        if (y[sel] < lo_b - tol).any() or (y[sel] > hi_b + tol).any():
            problems.append(f"region {reg} has elements leaving their band")

    # interface polyline: edges must tile [0, period] in x1 and lie on the profile
    iface = top.edge_tags == INTERFACE
    if not iface.any():
        problems.append("no interface edges found")
    else:
        en = top.edge_nodes[iface]
        xe = mesh.nodes[en]
        off = np.abs(xe[..., 1] - mesh.profile_height(xe[..., 0]))
        if (off > tol).any():
            problems.append("interface edge off the profile polyline")
        spans = np.sort(xe[..., 0], axis=1)
        order = np.argsort(spans[:, 0], kind="stable")
        spans = spans[order]
        if abs(spans[0, 0]) > tol or abs(spans[-1, 1] - mesh.period) > tol:
            problems.append("interface polyline does not span the period")
        gaps = spans[1:, 0] - spans[:-1, 1]
        if spans.shape[0] > 1 and np.max(np.abs(gaps)) > tol:
            problems.append("interface polyline has gaps or overlaps")

    # periodic pairing
    lmask = top.edge_tags == LEFT
    rmask = top.edge_tags == RIGHT
    if int(lmask.sum()) != int(rmask.sum()):
        problems.append("left/right edge counts differ")
    else:
        lp = top.edge_partner[lmask]
        if (lp < 0).any():
            problems.append("unpaired periodic edge")
        else:
            if np.max(np.abs(top.edge_lengths[lmask]
                             - top.edge_lengths[lp])) > tol:
                problems.append("periodic partner edges differ in length")
    ln = np.unique(top.edge_nodes[lmask])
    rn = np.unique(top.edge_nodes[rmask])
    if ln.size != rn.size:
        problems.append("left/right node counts differ")
    else:
        ly = np.sort(mesh.nodes[ln, 1])
        ry = np.sort(mesh.nodes[rn, 1])
        if ln.size and np.max(np.abs(ly - ry)) > _TOL * scale:
            problems.append("periodic node heights do not mirror to 1e-12")
        pp = top.node_partner
        if ln.size and not (pp[pp[ln]] == ln).all():
            problems.append("node pairing is not an involution")

    return problems
