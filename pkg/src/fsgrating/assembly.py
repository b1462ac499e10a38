"""Assembly of the discrete coupled pressure/displacement system.

The variational problem on the truncated cell reads: find (p, u) with
homogeneous values on the outer absorbing boundaries and quasi-periodic
side traces such that for all admissible (phi, psi)

    int_fluid  s*p_x1*phi_x1 + (1/s)*p_x2*phi_x2 - kappa^2*s*p*conj(phi)
  + int_solid  stretched-elasticity(u, psi) - omega^2*rho*s*u.conj(psi)
  + int_iface  p (n.conj(psi)) + rho_f*omega^2 (u.n) conj(phi)
  = int_iface  dn(p_in) conj(phi) - p_in (n.conj(psi)),

with s = s(x2) the complex layer stretch (identically one in the physical
bands) and n the interface normal pointing into the fluid.  P1 elements on
both fields; interface nodes carry one pressure and two displacement
unknowns.  Quasi-periodic constraints are eliminated by folding each
right-boundary column into its left master with multiplier exp(i*alpha*L)
and each row with the conjugate multiplier, which preserves the
sesquilinear pairing.  Volume terms use the 7-point degree-5 triangle rule;
interface integrals use 4-point Gauss lines (the incident wave
oscillates).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import quadrature as quad
from .config import PmlConfig, ProblemConfig, derive
from .errors import GeometryError
from .mesh import INTERFACE, Mesh, _is_fluid

__all__ = [
    "stretch", "stretch_derivative", "DofMap", "LinearSystem",
    "build_dofmap", "fluid_element_matrix", "solid_element_matrix",
    "interface_coupling", "load_vector", "assemble", "dump_matrix_market",
]

FREE, DIRICHLET, PERIODIC_SLAVE = 0, 1, 2


def stretch(x2, cfg: ProblemConfig, pml: PmlConfig):
    """Complex medium function s(x2); 1 in the physical strip, ramped in the
    layers as 1 + sigma*((distance into layer)/delta)^t."""
    x2 = np.asarray(x2, dtype=float)
    s = np.ones(x2.shape, dtype=complex)
    up = x2 > cfg.h1
    dn = x2 < cfg.h2
    s[up] = 1.0 + complex(pml.sigma1) * ((x2[up] - cfg.h1) / pml.delta1) ** pml.t
    s[dn] = 1.0 + complex(pml.sigma2) * ((cfg.h2 - x2[dn]) / pml.delta2) ** pml.t
    return s if s.shape else complex(s)


def stretch_derivative(x2, cfg: ProblemConfig, pml: PmlConfig):
    """d s / d x2, used by the strong-form residual of the estimator."""
    x2 = np.asarray(x2, dtype=float)
    ds = np.zeros(x2.shape, dtype=complex)
    up = x2 > cfg.h1
    dn = x2 < cfg.h2
    t = pml.t
    ds[up] = (complex(pml.sigma1) * t / pml.delta1
              * ((x2[up] - cfg.h1) / pml.delta1) ** (t - 1))
    ds[dn] = (-complex(pml.sigma2) * t / pml.delta2
              * ((cfg.h2 - x2[dn]) / pml.delta2) ** (t - 1))
    return ds if ds.shape else complex(ds)


# ----------------------------------------------------------------------
# degrees of freedom

@dataclass
class DofMap:
    """Raw nodal unknowns and their constraint classification.

    Raw numbering: one pressure dof per fluid-side node followed by an
    (x1, x2) displacement pair per solid-side node.  kind marks each raw
    dof FREE, DIRICHLET (outer layer boundaries) or PERIODIC_SLAVE (right
    boundary, folded onto its left partner with multiplier
    exp(i*alpha*period)).  C is the (n_raw x n_free) elimination matrix:
    solving the reduced system and expanding with C reproduces the
    constrained solution.
    """

    fluid_dof: np.ndarray   # (N,) raw id or -1
    solid_dof: np.ndarray   # (N, 2) raw ids or -1
    n_raw: int
    kind: np.ndarray        # (n_raw,)
    master: np.ndarray      # (n_raw,) raw master id for slaves, else -1
    multiplier: complex
    C: sp.csr_matrix
    n_free: int


def build_dofmap(mesh: Mesh, cfg: ProblemConfig) -> DofMap:
    top = mesh.topology
    fmask = mesh.fluid_node_mask()
    smask = mesh.solid_node_mask()
    n_fluid = int(fmask.sum())

    fluid_dof = np.full(mesh.n_nodes, -1, dtype=np.int64)
    fluid_dof[fmask] = np.arange(n_fluid)
    solid_dof = np.full((mesh.n_nodes, 2), -1, dtype=np.int64)
    sids = np.nonzero(smask)[0]
    solid_dof[sids, 0] = n_fluid + 2 * np.arange(sids.size)
    solid_dof[sids, 1] = n_fluid + 2 * np.arange(sids.size) + 1
    n_raw = n_fluid + 2 * sids.size

    scale = max(1.0, mesh.period, mesh.h1 - mesh.h2)
    tol = 1e-12 * scale
    on_top = np.abs(mesh.nodes[:, 1] - (mesh.h1 + mesh.delta1)) <= tol
    on_bottom = np.abs(mesh.nodes[:, 1] - (mesh.h2 - mesh.delta2)) <= tol
    on_right = np.abs(mesh.nodes[:, 0] - mesh.period) <= tol

    kind = np.full(n_raw, FREE, dtype=np.int8)
    master = np.full(n_raw, -1, dtype=np.int64)

    fd = fluid_dof[fmask & on_top]
    kind[fd] = DIRICHLET
    sd = solid_dof[smask & on_bottom].ravel()
    kind[sd] = DIRICHLET

    d = derive(cfg)
    multiplier = cmath.exp(1j * d.alpha * cfg.period)
    for node in np.nonzero(on_right)[0]:
        partner = top.node_partner[node]
        if partner < 0:
            raise GeometryError(f"right-boundary node {node} has no partner")
        pairs = [(fluid_dof[node], fluid_dof[partner]),
                 (solid_dof[node, 0], solid_dof[partner, 0]),
                 (solid_dof[node, 1], solid_dof[partner, 1])]
        for raw, src in pairs:
            if raw < 0 or kind[raw] == DIRICHLET:
                continue
            if src < 0:
                raise GeometryError(
                    f"partner of node {node} lacks the mirrored dof")
            kind[raw] = PERIODIC_SLAVE
            master[raw] = src

    free = kind == FREE
    n_free = int(free.sum())
    free_index = np.full(n_raw, -1, dtype=np.int64)
    free_index[free] = np.arange(n_free)

    rows, cols, vals = [], [], []
    raw_ids = np.arange(n_raw)
    rows.append(raw_ids[free])
    cols.append(free_index[free])
    vals.append(np.ones(n_free, dtype=complex))
    slaves = kind == PERIODIC_SLAVE
    mast = master[slaves]
    if (kind[mast] != FREE).any():
        raise GeometryError("periodic master dof is not free")
    rows.append(raw_ids[slaves])
    cols.append(free_index[mast])
    vals.append(np.full(int(slaves.sum()), multiplier, dtype=complex))
    C = sp.csr_matrix((np.concatenate(vals),
                       (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_raw, n_free))
    return DofMap(fluid_dof=fluid_dof, solid_dof=solid_dof, n_raw=n_raw,
                  kind=kind, master=master, multiplier=multiplier,
                  C=C, n_free=n_free)


# ----------------------------------------------------------------------
# element matrices

def _p1_gradients(corners):
    """Constant P1 shape gradients and areas for corners of shape (M, 3, 2)."""
    x = corners[..., 0]
    y = corners[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area2 = x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2]
    grads = np.stack([b, c], axis=-1) / area2[:, None, None]
    return grads, 0.5 * area2


def _stretch_sums(corners, cfg, pml, bary, w):
    """Quadrature sums of s, 1/s and the s-weighted mass over each element."""
    pts = np.einsum("qk,ekd->eqd", bary, corners)
    s = stretch(pts[..., 1], cfg, pml)
    s_avg = np.einsum("q,eq->e", w, s)
    sinv_avg = np.einsum("q,eq->e", w, 1.0 / s)
    mass = np.einsum("eq,q,qi,qj->eij", s, w, bary, bary)
    return s_avg, sinv_avg, mass


def _fluid_matrices(corners, cfg, pml, bary=quad.TRI5_BARY, w=quad.TRI5_W):
    grads, area = _p1_gradients(corners)
    if (area <= 0).any():
        raise GeometryError("degenerate fluid element")
    s_avg, sinv_avg, mass = _stretch_sums(corners, cfg, pml, bary, w)
    gx = grads[..., 0]
    gy = grads[..., 1]
    kxx = np.einsum("ei,ej->eij", gx, gx)
    kyy = np.einsum("ei,ej->eij", gy, gy)
    return area[:, None, None] * (s_avg[:, None, None] * kxx
                                  + sinv_avg[:, None, None] * kyy
                                  - cfg.kappa ** 2 * mass)


def _solid_matrices(corners, cfg, pml, bary=quad.TRI5_BARY, w=quad.TRI5_W):
    grads, area = _p1_gradients(corners)
    if (area <= 0).any():
        raise GeometryError("degenerate solid element")
    s_avg, sinv_avg, mass = _stretch_sums(corners, cfg, pml, bary, w)
    gx = grads[..., 0]
    gy = grads[..., 1]
    kxx = np.einsum("ei,ej->eij", gx, gx)
    kyy = np.einsum("ei,ej->eij", gy, gy)
    mu, lam = cfg.mu, cfg.lam
    w2r = cfg.omega ** 2 * cfg.rho
    a = area[:, None, None]
    s1 = s_avg[:, None, None]
    s2 = sinv_avg[:, None, None]
    m = w2r * a * mass
    k11 = a * ((2 * mu + lam) * s1 * kxx + mu * s2 * kyy) - m
    k22 = a * ((2 * mu + lam) * s2 * kyy + mu * s1 * kxx) - m
    # cross blocks carry no stretch weight; row i tests, column j is trial
    k12 = a * (lam * np.einsum("ej,ei->eij", gy, gx)
               + mu * np.einsum("ej,ei->eij", gx, gy))
    k21 = a * (lam * np.einsum("ej,ei->eij", gx, gy)
               + mu * np.einsum("ej,ei->eij", gy, gx))
    out = np.zeros(corners.shape[:1] + (6, 6), dtype=complex)
    out[:, 0::2, 0::2] = k11
    out[:, 0::2, 1::2] = k12
    out[:, 1::2, 0::2] = k21
    out[:, 1::2, 1::2] = k22
    return out


def fluid_element_matrix(corners, cfg: ProblemConfig, pml: PmlConfig,
                         rule=None) -> np.ndarray:
    """3x3 pressure element matrix for one triangle given its corners."""
    bary, w = rule if rule is not None else (quad.TRI5_BARY, quad.TRI5_W)
    return _fluid_matrices(np.asarray(corners, float)[None], cfg, pml, bary, w)[0]


def solid_element_matrix(corners, cfg: ProblemConfig, pml: PmlConfig,
                         rule=None) -> np.ndarray:
    """6x6 displacement element matrix, dofs interleaved (u1, u2) per node."""
    bary, w = rule if rule is not None else (quad.TRI5_BARY, quad.TRI5_W)
    return _solid_matrices(np.asarray(corners, float)[None], cfg, pml, bary, w)[0]


# ----------------------------------------------------------------------
# interface terms

def _interface_geometry(mesh: Mesh):
    """Interface edges with their fluid/solid neighbours and fluid-directed
    unit normals."""
    top = mesh.topology
    ids = np.nonzero(top.edge_tags == INTERFACE)[0]
    nodes = top.edge_nodes[ids]
    el = top.edge_elems[ids]
    fluid0 = _is_fluid(mesh.regions[el[:, 0]])
    efluid = np.where(fluid0, el[:, 0], el[:, 1])
    esolid = np.where(fluid0, el[:, 1], el[:, 0])
    xa = mesh.nodes[nodes[:, 0]]
    xb = mesh.nodes[nodes[:, 1]]
    tang = xb - xa
    length = np.sqrt((tang ** 2).sum(-1))
    normal = np.stack([tang[:, 1], -tang[:, 0]], axis=-1) / length[:, None]
    mid = 0.5 * (xa + xb)
    cf = mesh.centroids()[efluid]
    flip = ((cf - mid) * normal).sum(-1) < 0
    normal[flip] *= -1
    if (((cf - mid) * normal).sum(-1) <= 0).any():
        raise GeometryError("fluid element not on the normal side of an "
                            "interface edge")
    return ids, nodes, efluid, esolid, normal, length, xa, xb


def interface_coupling(edge_coords, normal, cfg: ProblemConfig):
    """Local interface blocks for one straight edge.

    Returns (solid_rows_by_fluid_cols, fluid_rows_by_solid_cols): the 4x2
    block of int_e p (n . conj(psi)) and the 2x4 block of
    rho_f*omega^2 int_e (u . n) conj(phi), both exact for linear traces.
    Solid dofs are interleaved (u1, u2) per edge node.
    """
    xa, xb = np.asarray(edge_coords, float)
    h = float(np.hypot(*(xb - xa)))
    me = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    n = np.asarray(normal, float)
    b1 = np.zeros((4, 2), dtype=complex)   # row (node i, comp c), col node j
    for i in range(2):
        for c in range(2):
            for j in range(2):
                b1[2 * i + c, j] = n[c] * me[i, j]
    b2 = np.zeros((2, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for c in range(2):
                b2[i, 2 * j + c] = cfg.rho_f * cfg.omega ** 2 * n[c] * me[i, j]
    return b1, b2


def _incident(cfg, x):
    d = derive(cfg)
    ph = np.exp(1j * (d.alpha * x[..., 0] - d.beta * x[..., 1]))
    grad = np.stack([1j * d.alpha * ph, -1j * d.beta * ph], axis=-1)
    return ph, grad


def load_vector(mesh: Mesh, cfg: ProblemConfig) -> np.ndarray:
    """Raw incident-wave load: dn(p_in) against pressure tests and
    -p_in n against displacement tests, 4-point Gauss per interface edge."""
    dofmap = build_dofmap(mesh, cfg)
    return _load_raw(mesh, cfg, dofmap)


def _load_raw(mesh, cfg, dofmap):
    b = np.zeros(dofmap.n_raw, dtype=complex)
    ids, nodes, efluid, esolid, normal, length, xa, xb = _interface_geometry(mesh)
    tq, wq = quad.EDGE4_X, quad.EDGE4_W
    pts = xa[:, None, :] + tq[None, :, None] * (xb - xa)[:, None, :]
    ph, grad = _incident(cfg, pts)
    dn = (grad * normal[:, None, :]).sum(-1)            # (E, Q)
    shape = np.stack([1.0 - tq, tq], axis=1)            # (Q, 2)
    wl = wq[None, :] * length[:, None]
    fluid_loads = np.einsum("eq,qi,eq->ei", dn, shape, np.broadcast_to(wl, dn.shape))
    solid_loads = -np.einsum("eq,qi,eq,ec->eic", ph, shape,
                             np.broadcast_to(wl, ph.shape), normal)
    np.add.at(b, dofmap.fluid_dof[nodes], fluid_loads)
    np.add.at(b, dofmap.solid_dof[nodes], solid_loads)
    return b


@dataclass
class LinearSystem:
    """Reduced system over free dofs plus the raw nodal system behind it."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofmap: DofMap
    matrix_raw: sp.csr_matrix
    rhs_raw: np.ndarray


def assemble(mesh: Mesh, cfg: ProblemConfig, pml: PmlConfig,
             rule=None) -> LinearSystem:
    """Assemble the reduced complex sparse system of the truncated problem."""
    bary, w = rule if rule is not None else (quad.TRI5_BARY, quad.TRI5_W)
    dofmap = build_dofmap(mesh, cfg)
    corners = mesh.corner_coords()
    fluid_sel = _is_fluid(mesh.regions)

    rows, cols, vals = [], [], []

    fcorners = corners[fluid_sel]
    if len(fcorners):
        kf = _fluid_matrices(fcorners, cfg, pml, bary, w)
        fdofs = dofmap.fluid_dof[mesh.elems[fluid_sel]]          # (Ef, 3)
        rows.append(np.repeat(fdofs, 3, axis=1).ravel())
        cols.append(np.tile(fdofs, (1, 3)).ravel())
        vals.append(kf.ravel())

    scorners = corners[~fluid_sel]
    if len(scorners):
        ks = _solid_matrices(scorners, cfg, pml, bary, w)
        snodes = mesh.elems[~fluid_sel]
        sdofs = dofmap.solid_dof[snodes].reshape(-1, 6)          # (Es, 6)
        rows.append(np.repeat(sdofs, 6, axis=1).ravel())
        cols.append(np.tile(sdofs, (1, 6)).ravel())
        vals.append(ks.ravel())

    ids, nodes, efluid, esolid, normal, length, xa, xb = _interface_geometry(mesh)
    me = (length[:, None, None] / 6.0) * np.array([[2.0, 1.0], [1.0, 2.0]])
    fdofs = dofmap.fluid_dof[nodes]                              # (E, 2)
    sdofs = dofmap.solid_dof[nodes]                              # (E, 2, 2)
    # pressure trial against displacement test: n_c * me[i, j]
    b1 = normal[:, None, :, None] * me[:, :, None, :]            # (E, i, c, j)
    rows.append(sdofs[:, :, :, None].repeat(2, axis=3).ravel())
    cols.append(fdofs[:, None, None, :].repeat(2, 1).repeat(2, 2).ravel())
    vals.append(b1.astype(complex).ravel())
    # displacement trial against pressure test: rho_f omega^2 n_c me[i, j]
    b2 = (cfg.rho_f * cfg.omega ** 2
          * normal[:, None, None, :] * me[:, :, :, None])        # (E, i, j, c)
    rows.append(fdofs[:, :, None, None].repeat(2, 2).repeat(2, 3).ravel())
    cols.append(sdofs[:, None, :, :].repeat(2, 1).ravel())
    vals.append(b2.astype(complex).ravel())

    a_raw = sp.coo_matrix(
        (np.concatenate(vals),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(dofmap.n_raw, dofmap.n_raw)).tocsr()
    b_raw = _load_raw(mesh, cfg, dofmap)

    ch = dofmap.C.conj().T.tocsr()
    a_red = (ch @ a_raw @ dofmap.C).tocsr()
    b_red = ch @ b_raw
    return LinearSystem(matrix=a_red, rhs=b_red, dofmap=dofmap,
                        matrix_raw=a_raw, rhs_raw=b_raw)


def dump_matrix_market(path, system: LinearSystem):
    """Write the reduced matrix in Matrix-Market coordinate format."""
    from scipy.io import mmwrite
    mmwrite(str(path), system.matrix)
