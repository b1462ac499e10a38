"""Residual error indicators and the a priori error of the discrete solution.

Each element T carries the indicator

    eta_T = h_T * ||R||_{L2(T)} + (1/2 * sum_e h_e ||J_e||^2_{L2(e)})^(1/2)

with the element residual R the strong operator applied to the P1 field
(only lower-order terms survive: the stretched-gradient derivative and the
mass term) and J_e the flux/traction jumps over the element edges.  Edge
families: interior edges jump the stretched pressure flux or the
layer-consistent traction (the flux the stretched strain form produces by
parts; off the layers it is the standard traction), interface edges weigh
the physical transmission mismatch with a factor two, and left/right
boundary edges jump against their periodic mirror with phase factors
exp(-+ i*alpha*period).  Edges on the outer absorbing boundaries are
skipped.  The two global quantities are

    eps_f^2 = sum_T eta_T^2
    eps_p   = F1*||p_h||_{L2(top line)} + F2*||u_h||_{L2(bottom line)},

the discretization and layer-truncation parts of the error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature as quad
from . import spectral
from .assembly import _p1_gradients, stretch, stretch_derivative
from .config import PmlConfig, ProblemConfig, derive
from .errors import GeometryError
from .mesh import (DIRICHLET_BOTTOM, DIRICHLET_TOP, FLUID, GAMMA_MINUS,
                   GAMMA_PLUS, INTERFACE, INTERIOR, LEFT, SOLID, Mesh,
                   _is_fluid)
from .solver import SystemState

__all__ = ["IndicatorField", "EdgeJumps", "element_residuals",
           "edge_jumps", "indicators", "apriori_error"]


@dataclass
class IndicatorField:
    """Per-element indicators and the global error split."""

    eta: np.ndarray          # (M,) nonnegative
    fluid_side: np.ndarray   # (M,) bool
    eps_f: float
    eps_p: float
    trace_p: float           # ||p_h|| on the upper artificial boundary
    trace_u: float           # ||u_h|| on the lower artificial boundary


@dataclass
class EdgeJumps:
    """L2 norms of the jump residuals per edge.

    norm_fluid[e] is the pressure-side jump, norm_solid[e] the
    displacement-side jump; for interface edges both are present, for other
    edges exactly one (zeros mark edges without that field or excluded
    outer-boundary edges).
    """

    norm_fluid: np.ndarray
    norm_solid: np.ndarray


def element_residuals(mesh: Mesh, state: SystemState, cfg: ProblemConfig,
                      pml: PmlConfig) -> np.ndarray:
    """L2(T) norms of the strong residual per element, degree-5 quadrature.

    For P1 fields the second derivatives vanish and the stretch depends on
    x2 only, so the fluid residual is d(1/s)/dx2 * dp/dx2 + kappa^2*s*p and
    the displacement residual couples each component with its own
    lower-order pair; in the physical bands this collapses to
    kappa^2*|p| or omega^2*rho*|u|.
    """
    corners = mesh.corner_coords()
    grads, area = _p1_gradients(corners)
    pts = np.einsum("qk,ekd->eqd", quad.TRI5_BARY, corners)
    s = stretch(pts[..., 1], cfg, pml)
    dsinv = -stretch_derivative(pts[..., 1], cfg, pml) / s ** 2

    fluid = _is_fluid(mesh.regions)
    out = np.zeros(mesh.n_elems)

    if fluid.any():
        gp = np.einsum("ei,eid->ed", state.p[mesh.elems[fluid]],
                       grads[fluid].astype(complex))
        pq = np.einsum("qi,ei->eq", quad.TRI5_BARY, state.p[mesh.elems[fluid]])
        r = dsinv[fluid] * gp[:, None, 1] + cfg.kappa ** 2 * s[fluid] * pq
        out[fluid] = np.sqrt(area[fluid]
                             * np.einsum("q,eq->e", quad.TRI5_W, np.abs(r) ** 2))

    solid = ~fluid
    if solid.any():
        un = state.u[mesh.elems[solid]]                       # (E, 3, 2)
        gu = np.einsum("eic,eid->ecd", un, grads[solid].astype(complex))
        uq = np.einsum("qi,eic->eqc", quad.TRI5_BARY, un)
        w2r = cfg.omega ** 2 * cfg.rho
        r1 = cfg.mu * dsinv[solid] * gu[:, None, 0, 1] + w2r * s[solid] * uq[..., 0]
        r2 = ((2 * cfg.mu + cfg.lam) * dsinv[solid] * gu[:, None, 1, 1]
              + w2r * s[solid] * uq[..., 1])
        mag = np.abs(r1) ** 2 + np.abs(r2) ** 2
        out[solid] = np.sqrt(area[solid]
                             * np.einsum("q,eq->e", quad.TRI5_W, mag))
    return out


def _edge_points(mesh, edge_ids, tq):
    xa = mesh.nodes[mesh.topology.edge_nodes[edge_ids, 0]]
    xb = mesh.nodes[mesh.topology.edge_nodes[edge_ids, 1]]
    return xa[:, None, :] + tq[None, :, None] * (xb - xa)[:, None, :]


def edge_jumps(mesh: Mesh, state: SystemState, cfg: ProblemConfig,
               pml: PmlConfig, incident: bool = True) -> EdgeJumps:
    """Jump residual norms on every edge not on the outer layer boundaries.

    incident=False drops the incoming-wave terms from the interface
    mismatch (a homogeneous problem, useful for exactness checks).
    """
    top = mesh.topology
    n_edges = top.edge_nodes.shape[0]
    norm_f = np.zeros(n_edges)
    norm_s = np.zeros(n_edges)
    tq, wq = quad.EDGE4_X, quad.EDGE4_W
    fluid_elem = _is_fluid(mesh.regions)

    grads_all, _ = _p1_gradients(mesh.corner_coords())
    grad_p = np.einsum("ei,eid->ed", state.p[mesh.elems], grads_all.astype(complex))
    gu = np.einsum("eic,eid->ecd", state.u[mesh.elems], grads_all.astype(complex))

    en = top.edge_nodes
    xa = mesh.nodes[en[:, 0]]
    xb = mesh.nodes[en[:, 1]]
    tang = xb - xa
    lengths = top.edge_lengths
    nvec = np.stack([tang[:, 1], -tang[:, 0]], axis=-1) / lengths[:, None]
    centroids = mesh.centroids()

    def flux_p(elems, normals, pts):
        """Stretched pressure flux s*px1*n1 + (1/s)*px2*n2 at edge points."""
        s = stretch(pts[..., 1], cfg, pml)
        g = grad_p[elems]
        return (s * g[:, None, 0] * normals[:, None, 0]
                + g[:, None, 1] * normals[:, None, 1] / s)

    def flux_u(elems, normals, pts):
        """Layer-consistent traction at edge points, shape (E, Q, 2).

        The flux produced by parts from the stretched strain form; off the
        layers (s = 1) it is the standard traction sigma(u).nu, which is
        what the physical-region and interface jumps use.
        """
        s = stretch(pts[..., 1], cfg, pml)
        g = gu[elems]
        mu, lam = cfg.mu, cfg.lam
        n1 = normals[:, None, 0]
        n2 = normals[:, None, 1]
        g11, g12 = g[:, None, 0, 0], g[:, None, 0, 1]
        g21, g22 = g[:, None, 1, 0], g[:, None, 1, 1]
        f1 = ((2 * mu + lam) * s * g11 + lam * g22) * n1 \
            + mu * (g12 / s + g21) * n2
        f2 = mu * (s * g21 + g12) * n1 \
            + ((2 * mu + lam) * g22 / s + lam * g11) * n2
        return np.stack([f1, f2], axis=-1)

    def l2norm(vals2, eids):
        """sqrt(int_e |.|^2) from squared magnitudes at the edge points."""
        return np.sqrt(lengths[eids] * np.einsum("q,eq->e", wq, vals2))

    # interior edges (including the band-boundary lines inside each side)
    inner = np.isin(top.edge_tags, (INTERIOR, GAMMA_PLUS, GAMMA_MINUS))
    ids = np.nonzero(inner)[0]
    if ids.size:
        e0, e1 = top.edge_elems[ids, 0], top.edge_elems[ids, 1]
        if (e1 < 0).any():
            raise GeometryError("interior edge with a single element")
        pts = _edge_points(mesh, ids, tq)
        isf = fluid_elem[e0]
        fids = ids[isf]
        if fids.size:
            j = (flux_p(top.edge_elems[fids, 0], _orient(
                    centroids[top.edge_elems[fids, 0]], mesh, fids, nvec), pts[isf])
                 + flux_p(top.edge_elems[fids, 1], _orient(
                    centroids[top.edge_elems[fids, 1]], mesh, fids, nvec), pts[isf]))
            norm_f[fids] = l2norm(np.abs(j) ** 2, fids)
        sids = ids[~isf]
        if sids.size:
            n0 = _orient(centroids[top.edge_elems[sids, 0]], mesh, sids, nvec)
            n1 = _orient(centroids[top.edge_elems[sids, 1]], mesh, sids, nvec)
            j = (flux_u(top.edge_elems[sids, 0], n0, pts[~isf])
                 + flux_u(top.edge_elems[sids, 1], n1, pts[~isf]))
            norm_s[sids] = l2norm((np.abs(j) ** 2).sum(-1), sids)

    # interface edges: transmission mismatch against the incident wave
    ids = np.nonzero(top.edge_tags == INTERFACE)[0]
    if ids.size:
        e0, e1 = top.edge_elems[ids, 0], top.edge_elems[ids, 1]
        isf0 = fluid_elem[e0]
        ef = np.where(isf0, e0, e1)
        es = np.where(isf0, e1, e0)
        mid = 0.5 * (xa[ids] + xb[ids])
        n = nvec[ids].copy()
        flip = ((centroids[ef] - mid) * n).sum(-1) < 0
        n[flip] *= -1
        pts = _edge_points(mesh, ids, tq)
        if incident:
            pin, gin = _incident_vals(cfg, pts)
        else:
            pin = np.zeros(pts.shape[:-1], dtype=complex)
            gin = np.zeros(pts.shape, dtype=complex)
        dn_in = (gin * n[:, None, :]).sum(-1)
        dn_ph = (grad_p[ef][:, None, :] * n[:, None, :]).sum(-1)
        u_q = np.einsum("qi,eic->eqc", np.stack([1 - tq, tq], 1), state.u[en[ids]])
        un = (u_q * n[:, None, :]).sum(-1)
        jf = 2.0 * (dn_in + dn_ph - cfg.rho_f * cfg.omega ** 2 * un)
        norm_f[ids] = l2norm(np.abs(jf) ** 2, ids)

        p_q = np.einsum("qi,ei->eq", np.stack([1 - tq, tq], 1), state.p[en[ids]])
        tr = flux_u(es, n, pts)
        js = -2.0 * ((pin + p_q)[..., None] * n[:, None, :] + tr)
        norm_s[ids] = l2norm((np.abs(js) ** 2).sum(-1), ids)

    # periodic pairs: left edge against phase-shifted mirror partner
    ids = np.nonzero(top.edge_tags == LEFT)[0]
    if ids.size:
        mates = top.edge_partner[ids]
        if (mates < 0).any():
            raise GeometryError("left edge without periodic partner")
        t1 = top.edge_elems[ids, 0]
        t2 = top.edge_elems[mates, 0]
        phase = np.exp(-1j * derive(cfg).alpha * cfg.period)
        n1 = np.array([-1.0, 0.0])
        n2 = np.array([1.0, 0.0])
        pts = _edge_points(mesh, ids, tq)
        s = stretch(pts[..., 1], cfg, pml)
        isf = fluid_elem[t1]
        f = ids[isf]
        if f.size:
            sf = s[isf]
            j = (-(sf * grad_p[t1[isf], None, 0] * n1[0]
                   + phase * sf * grad_p[t2[isf], None, 0] * n2[0]))
            val = l2norm(np.abs(j) ** 2, f)
            norm_f[f] = val
            norm_f[mates[isf]] = val
        sl = ids[~isf]
        if sl.size:
            nn1 = np.broadcast_to(n1, (sl.size, 2))
            nn2 = np.broadcast_to(n2, (sl.size, 2))
            j = -(flux_u(t1[~isf], nn1, pts[~isf])
                  + phase * flux_u(t2[~isf], nn2, pts[~isf]))
            val = l2norm((np.abs(j) ** 2).sum(-1), sl)
            norm_s[sl] = val
            norm_s[mates[~isf]] = val

    return EdgeJumps(norm_fluid=norm_f, norm_solid=norm_s)


def _orient(cent, mesh, eids, nvec):
    """Outward normal of the element with centroid cent on each edge."""
    top = mesh.topology
    mid = mesh.nodes[top.edge_nodes[eids]].mean(axis=1)
    n = nvec[eids].copy()
    flip = ((cent - mid) * n).sum(-1) > 0
    n[flip] *= -1
    return n


def _incident_vals(cfg, pts):
    d = derive(cfg)
    ph = np.exp(1j * (d.alpha * pts[..., 0] - d.beta * pts[..., 1]))
    grad = np.stack([1j * d.alpha * ph, -1j * d.beta * ph], axis=-1)
    return ph, grad


def indicators(mesh: Mesh, state: SystemState, cfg: ProblemConfig,
               pml: PmlConfig, incident: bool = True) -> IndicatorField:
    """Combine residuals and jumps into eta_T and the global eps_f/eps_p."""
    top = mesh.topology
    resid = element_residuals(mesh, state, cfg, pml)
    jumps = edge_jumps(mesh, state, cfg, pml, incident=incident)
    fluid_elem = _is_fluid(mesh.regions)

    jump_sq = np.zeros(mesh.n_elems)
    skip = np.isin(top.edge_tags, (DIRICHLET_TOP, DIRICHLET_BOTTOM))
    he = top.edge_lengths
    for side in (0, 1):
        el = top.edge_elems[:, side]
        ok = (el >= 0) & ~skip
        contrib = np.where(fluid_elem[np.maximum(el, 0)],
                           jumps.norm_fluid, jumps.norm_solid) ** 2 * he
        np.add.at(jump_sq, el[ok], contrib[ok])

    eta = mesh.diameters() * resid + np.sqrt(0.5 * jump_sq)
    eps_f = float(np.sqrt((eta ** 2).sum()))

    trace_p = _trace_norm(mesh, state.p, GAMMA_PLUS)
    trace_u = _trace_norm_vec(mesh, state.u, GAMMA_MINUS)
    eps_p = float(spectral.bound_F1(cfg, pml) * trace_p
                  + spectral.bound_F2(cfg, pml) * trace_u)
    return IndicatorField(eta=eta, fluid_side=fluid_elem, eps_f=eps_f,
                          eps_p=eps_p, trace_p=trace_p, trace_u=trace_u)


def _trace_norm(mesh, values, tag):
    top = mesh.topology
    ids = np.nonzero(top.edge_tags == tag)[0]
    if not ids.size:
        return 0.0
    en = top.edge_nodes[ids]
    tq, wq = quad.EDGE3_X, quad.EDGE3_W
    vq = np.einsum("qi,ei->eq", np.stack([1 - tq, tq], 1), values[en])
    return float(np.sqrt((top.edge_lengths[ids]
                          * np.einsum("q,eq->e", wq, np.abs(vq) ** 2)).sum()))


def _trace_norm_vec(mesh, values, tag):
    top = mesh.topology
    ids = np.nonzero(top.edge_tags == tag)[0]
    if not ids.size:
        return 0.0
    en = top.edge_nodes[ids]
    tq, wq = quad.EDGE3_X, quad.EDGE3_W
    vq = np.einsum("qi,eic->eqc", np.stack([1 - tq, tq], 1), values[en])
    mag = (np.abs(vq) ** 2).sum(-1)
    return float(np.sqrt((top.edge_lengths[ids]
                          * np.einsum("q,eq->e", wq, mag)).sum()))


def apriori_error(mesh: Mesh, state: SystemState, exact, cfg: ProblemConfig):
    """Energy-norm error against analytic evaluators over the physical bands.

    exact provides pressure/pressure_gradient/displacement/
    displacement_gradient callables on point arrays (the flat-interface
    oracle does).  The absorbing layers are excluded; the norm is the
    natural one of the coupled problem: H1 for the pressure, the elastic
    strain form plus L2 for the displacement.
    """
    corners = mesh.corner_coords()
    grads, area = _p1_gradients(corners)
    pts = np.einsum("qk,ekd->eqd", quad.TRI5_BARY, corners)
    total = 0.0

    fl = mesh.regions == FLUID
    if fl.any():
        gp = np.einsum("ei,eid->ed", state.p[mesh.elems[fl]],
                       grads[fl].astype(complex))
        pq = np.einsum("qi,ei->eq", quad.TRI5_BARY, state.p[mesh.elems[fl]])
        eg = gp[:, None, :] - exact.pressure_gradient(pts[fl])
        ev = pq - exact.pressure(pts[fl])
        dens = (np.abs(eg) ** 2).sum(-1) + np.abs(ev) ** 2
        total += float((area[fl] * np.einsum("q,eq->e", quad.TRI5_W, dens)).sum())

    so = mesh.regions == SOLID
    if so.any():
        gu = np.einsum("eic,eid->ecd", state.u[mesh.elems[so]],
                       grads[so].astype(complex))
        uq = np.einsum("qi,eic->eqc", quad.TRI5_BARY, state.u[mesh.elems[so]])
        ge = gu[:, None, :, :] - exact.displacement_gradient(pts[so])
        ue = uq - exact.displacement(pts[so])
        mu, lam = cfg.mu, cfg.lam
        g11, g12 = ge[..., 0, 0], ge[..., 0, 1]
        g21, g22 = ge[..., 1, 0], ge[..., 1, 1]
        dens = ((2 * mu + lam) * (np.abs(g11) ** 2 + np.abs(g22) ** 2)
                + mu * (np.abs(g12) ** 2 + np.abs(g21) ** 2)
                + 2 * lam * (g11 * np.conj(g22)).real
                + 2 * mu * (g12 * np.conj(g21)).real
                + (np.abs(ue) ** 2).sum(-1))
        total += float((area[so] * np.einsum("q,eq->e", quad.TRI5_W, dens)).sum())
    return float(np.sqrt(total))
