"""Riemannian distances on the disk by shortest paths on nested polar graphs.

Two metrics share one mesh: the tau-metric with density ``1/tau(|w|)`` and
the phi-metric with density ``phi'(|w|)``. Edge lengths integrate the density
along straight segments with 5-point Gauss-Legendre.

Global meshes are centred at the origin with rings equally spaced in the
radial tau-arclength; patch meshes are centred at a point with equally spaced
rings and serve local queries. Each level refines the previous one (rings and
angular counts double) and keeps all of its edges, so graph distances never
increase with the level.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .errors import HypothesisViolated, MeshTooLarge, OutsideTruncation
from .weight import WeightModel

NODE_CAP = 5_000_000
TOL_REL = 0.01
MAX_LEVEL = 9
R_OUT_LADDER = (0.95, 0.99, 0.999, 0.9999)
CERTIFIED_D = 40.0

_GX, _GW = np.polynomial.legendre.leggauss(5)
GL_T = 0.5 * (_GX + 1.0)
GL_W = 0.5 * _GW


def _pow2_ceil(x: np.ndarray) -> np.ndarray:
    return 2.0 ** np.ceil(np.log2(np.maximum(x, 1.0)))


# -- densities and segment integrals ----------------------------------------


def density(model: WeightModel, r: np.ndarray, metric: str) -> np.ndarray:
    if metric == "tau":
        with np.errstate(divide="ignore"):
            return 1.0 / model.tau(r)
    if metric == "phi":
        return model.dphi(r)
    raise ValueError(f"metric must be 'tau' or 'phi', got {metric!r}")


def segment_lengths(model: WeightModel, p: np.ndarray, q: np.ndarray, metric: str) -> np.ndarray:
    """Integral of the density along straight segments ``p -> q``.

    Segments starting (or ending) at the origin use ``t = x^2`` so the
    ``r^(-1/2)`` growth of ``1/tau`` there is integrated exactly enough.
    """
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    swap = np.abs(q) < 1e-300
    p, q = np.where(swap, q, p), np.where(swap, p, q)
    at0 = np.abs(p) < 1e-300
    d = q - p
    out = np.zeros(p.size)
    at0 &= d != 0
    reg = ~at0 & (d != 0)
    if reg.any():
        pts = p[reg, None] + GL_T[None, :] * d[reg, None]
        out[reg] = np.abs(d[reg]) * (density(model, np.abs(pts), metric) @ GL_W)
    if at0.any():
        x = GL_T[None, :]
        pts = (x**2) * d[at0, None]
        out[at0] = np.abs(d[at0]) * ((2.0 * x * density(model, np.abs(pts), metric)) @ GL_W)
    return out


def segment_length(model: WeightModel, p: complex, q: complex, metric: str, pieces: int = 8) -> float:
    """Composite version of :func:`segment_lengths` for a single segment."""
    if p == q:
        return 0.0
    t = np.linspace(0.0, 1.0, pieces + 1)
    a = p + t[:-1] * (q - p)
    b = p + t[1:] * (q - p)
    return float(np.sum(segment_lengths(model, a, b, metric)))


# -- polar graph construction -----------------------------------------------


@dataclass(frozen=True)
class _Topology:
    """Rings, nodes (in local polar form) and stencil edges of one level."""

    ring_radii: np.ndarray
    ring_counts: np.ndarray
    offsets: np.ndarray
    radius: np.ndarray  # per node
    angle: np.ndarray  # per node, before theta0
    edges: np.ndarray  # (E, 2) int, i < j
    parent_map: np.ndarray | None


def _ring_stencil(offsets, counts, k0: int, k1: int, spread: int) -> np.ndarray:
    """Edges from every node of ring k0 to the ``2*spread+1`` angularly
    nearest nodes of ring k1."""
    n0, n1 = int(counts[k0]), int(counts[k1])
    j = np.arange(n0)
    near = np.floor(j * (n1 / n0) + 0.5).astype(np.int64)
    offs = np.arange(-spread, spread + 1)
    tgt = (near[:, None] + offs[None, :]) % n1
    src = np.broadcast_to(j[:, None], tgt.shape)
    return np.stack([offsets[k0] + src.ravel(), offsets[k1] + tgt.ravel()], axis=1)


def _stencil_edges(offsets, counts) -> np.ndarray:
    K = len(counts)
    parts = []
    # centre to rings 1 and 2
    for k in (1, 2):
        if k < K:
            idx = offsets[k] + np.arange(counts[k])
            parts.append(np.stack([np.zeros_like(idx), idx], axis=1))
    for k in range(1, K):
        n = int(counts[k])
        j = np.arange(n)
        parts.append(np.stack([offsets[k] + j, offsets[k] + (j + 1) % n], axis=1))
        for dk, spread in ((1, 2), (2, 1)):
            if k + dk < K:
                parts.append(_ring_stencil(offsets, counts, k, k + dk, spread))
                parts.append(_ring_stencil(offsets, counts, k + dk, k, spread))
    e = np.concatenate(parts).astype(np.int64)
    e = np.sort(e, axis=1)
    e = e[e[:, 0] != e[:, 1]]
    return np.unique(e, axis=0)


def _topology(ring_radii: np.ndarray, ring_counts: np.ndarray, parent: _Topology | None) -> _Topology:
    counts = ring_counts.astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    radius = np.repeat(ring_radii, counts)
    angle = np.concatenate([2 * np.pi * np.arange(n) / n for n in counts])
    edges = _stencil_edges(offsets, counts)
    pmap = None
    if parent is not None:
        rk = np.searchsorted(ring_radii, parent.ring_radii)
        if not np.allclose(ring_radii[rk], parent.ring_radii, rtol=0, atol=1e-15):
            raise AssertionError("rings are not nested")
        fac = counts[rk] // parent.ring_counts
        pmap = np.concatenate(
            [offsets[k] + f * np.arange(n) for k, f, n in zip(rk, fac, parent.ring_counts)]
        )
        carried = np.sort(pmap[parent.edges], axis=1)
        edges = np.unique(np.concatenate([edges, carried]), axis=0)
    return _Topology(ring_radii, counts, offsets, radius, angle, edges, pmap)


def _global_rings(model: WeightModel, level: int, r_out: float) -> tuple[np.ndarray, np.ndarray]:
    ln2 = np.log(2.0)
    u_out = model.s_of_r(r_out) / ln2
    step = 2.0 ** (-level)
    u = np.arange(0.0, u_out, step)
    # a grid ring within half a step of r_out would duplicate the outer ring
    u = u[(u_out - u > 0.5 * step) | (u == 0)]
    rho = model.r_of_s(u * ln2)
    rho = rho[rho < r_out * (1 - 1e-9)]
    rho = np.append(rho, r_out)
    n0 = _pow2_ceil(2 * np.pi * rho[1:] / (ln2 * model.tau(rho[1:])))
    n0 = np.maximum(8, n0)
    counts = np.concatenate([[1], n0 * 2**level]).astype(np.int64)
    rho[0] = 0.0
    return rho, counts


def _patch_rings(level: int, rings0: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(rings0 * 2**level + 1)
    rho = k * 2.0 ** (-level)
    n0 = np.maximum(8, _pow2_ceil(2 * np.pi * rho[1:]))
    counts = np.concatenate([[1], n0 * 2**level]).astype(np.int64)
    return rho, counts


# -- meshes -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiskMesh:
    """A polar graph over (part of) the truncated disk.

    ``kind`` is ``"global"`` (centred at the origin, covering ``|w| <=
    r_out``) or ``"patch"`` (centred at ``center``). Nodes beyond ``r_max``
    are kept in the arrays but have no edges.
    """

    model: WeightModel
    level: int
    kind: str
    center: complex
    r_out: float
    scale: float
    theta0: float
    ring_radii: np.ndarray
    ring_counts: np.ndarray
    offsets: np.ndarray
    nodes: np.ndarray
    edges: np.ndarray
    len_tau: np.ndarray
    len_phi: np.ndarray
    parent_map: np.ndarray | None
    beta: float
    active: np.ndarray = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    def lengths(self, metric: str) -> np.ndarray:
        if metric == "tau":
            return self.len_tau
        if metric == "phi":
            return self.len_phi
        raise ValueError(f"metric must be 'tau' or 'phi', got {metric!r}")

    def graph(self, metric: str):
        cache = self.__dict__.setdefault("_graphs", {})
        if metric not in cache:
            w = self.lengths(metric)
            n = self.n_nodes
            cache[metric] = coo_matrix((w, (self.edges[:, 0], self.edges[:, 1])), shape=(n, n)).tocsr()
        return cache[metric]

    @property
    def tree(self) -> cKDTree:
        if "_tree" not in self.__dict__:
            idx = np.nonzero(self.active)[0]
            pts = np.stack([self.nodes[idx].real, self.nodes[idx].imag], axis=1)
            self.__dict__["_tree"] = (cKDTree(pts), idx)
        return self.__dict__["_tree"]

    def snap(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Nearest active node index and displacement for each point."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        tree, idx = self.tree
        d, i = tree.query(np.stack([z.real, z.imag], axis=1))
        return idx[i], d

    def ring_of(self, node: int) -> int:
        return int(np.searchsorted(self.offsets, node, side="right") - 1)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "level": self.level,
            "n_nodes": self.n_nodes,
            "n_edges": int(self.edges.shape[0]),
            "r_out": self.r_out,
            "beta": self.beta,
        }


def _assemble(model, level, kind, center, r_out, scale, theta0, topo: _Topology, lt=None, lp=None):
    nodes = center + scale * topo.radius * np.exp(1j * (topo.angle + theta0))
    active = np.abs(nodes) <= model.r_max
    e = topo.edges
    keep = active[e[:, 0]] & active[e[:, 1]]
    e = e[keep]
    if lt is None:
        p, q = nodes[e[:, 0]], nodes[e[:, 1]]
        lt = segment_lengths(model, p, q, "tau")
        lp = segment_lengths(model, p, q, "phi")
    else:
        lt, lp = lt[keep], lp[keep]
    beta = _spacing_ratio(model, topo, center, scale)
    return DiskMesh(
        model, level, kind, complex(center), float(r_out), float(scale), float(theta0),
        topo.ring_radii * scale, topo.ring_counts, topo.offsets, nodes, e.astype(np.int32),
        lt, lp, topo.parent_map, beta, active,
    )


def _spacing_ratio(model, topo: _Topology, center, scale) -> float:
    """Largest ring or arc spacing over tau, away from the centre node."""
    rho = topo.ring_radii * scale
    if rho.size < 2:
        return float("nan")
    dr = np.diff(rho)
    arc = 2 * np.pi * rho[1:] / topo.ring_counts[1:]
    sp = np.maximum(dr, arc)
    t = model.tau(np.abs(center) + rho[1:]) if center == 0 else model.tau(np.abs(center) * np.ones_like(dr))
    ok = t > 0
    return float(np.max(sp[ok] / t[ok])) if ok.any() else float("nan")


def global_node_count(model: WeightModel, level: int, r_out: float) -> int:
    return int(_global_rings(model, level, r_out)[1].sum())


_MEMO: dict = {}


def _cache_path(key: tuple) -> Path | None:
    root = os.environ.get("DISKGEO_CACHE")
    if not root:
        return None
    h = hashlib.sha256(repr(key).encode()).hexdigest()[:24]
    return Path(root) / f"mesh-{h}.npz"


def build_mesh(
    model: WeightModel, level: int, r_out: float | None = None, node_cap: int = NODE_CAP
) -> DiskMesh:
    """Global mesh at ``level`` covering ``|w| <= r_out`` (default
    ``min(0.95, r_max)``).

    Raises MeshTooLarge when the node count would exceed ``node_cap``.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    r_out = min(0.95, model.r_max) if r_out is None else min(float(r_out), model.r_max)
    key = (str(model.spec), model.r_max, int(level), r_out)
    if key in _MEMO:
        return _MEMO[key]
    n = global_node_count(model, level, r_out)
    if n > node_cap:
        raise MeshTooLarge(f"level {level} mesh to r_out={r_out} has {n} nodes > cap {node_cap}")
    parent = build_mesh(model, level - 1, r_out, node_cap) if level > 0 else None
    rho, counts = _global_rings(model, level, r_out)
    topo = _global_topology(key, rho, counts, parent)
    path = _cache_path(key)
    mesh = None
    if path is not None and path.exists():
        with np.load(path) as f:
            mesh = _assemble(model, level, "global", 0j, r_out, 1.0, 0.0, topo, f["len_tau"], f["len_phi"])
    if mesh is None:
        mesh = _assemble(model, level, "global", 0j, r_out, 1.0, 0.0, topo)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            # stored against the unfiltered edge list so reload can re-mask
            lt = np.zeros(topo.edges.shape[0])
            lp = np.zeros(topo.edges.shape[0])
            keep = mesh.active[topo.edges[:, 0]] & mesh.active[topo.edges[:, 1]]
            lt[keep], lp[keep] = mesh.len_tau, mesh.len_phi
            np.savez_compressed(path, len_tau=lt, len_phi=lp)
    _MEMO[key] = mesh
    return mesh


_TOPO: dict = {}


def _global_topology(key, rho, counts, parent: DiskMesh | None) -> _Topology:
    if key not in _TOPO:
        ptopo = None
        if parent is not None:
            pk = key[:2] + (key[2] - 1, key[3])
            ptopo = _TOPO[pk]
        _TOPO[key] = _topology(rho, counts, ptopo)
    return _TOPO[key]


@lru_cache(maxsize=16)
def _patch_topology(level: int, rings0: int) -> _Topology:
    parent = _patch_topology(level - 1, rings0) if level > 0 else None
    rho, counts = _patch_rings(level, rings0)
    return _topology(rho, counts, parent)


def build_patch(
    model: WeightModel,
    center: complex,
    h0: float,
    level: int,
    rings0: int = 6,
    anchor: complex | None = None,
) -> DiskMesh:
    """Patch mesh of radius ``rings0 * h0`` around ``center``.

    With an ``anchor`` the angular origin points at it, so a point at
    distance ``k * h0`` along that direction is a node.
    """
    if not h0 > 0:
        raise ValueError("patch spacing must be positive")
    topo = _patch_topology(int(level), int(rings0))
    theta0 = 0.0 if anchor is None else float(np.angle(anchor - center))
    if topo.radius.size > NODE_CAP:
        raise MeshTooLarge(f"patch level {level} has {topo.radius.size} nodes")
    r_out = min(model.r_max, abs(center) + rings0 * h0)
    return _assemble(model, int(level), "patch", complex(center), r_out, float(h0), theta0, topo)


# -- distances ------------------------------------------------------------------


@dataclass
class DistanceResult:
    """Shortest-path estimate of a distance.

    ``value`` is the graph distance between the snapped nodes plus the
    lengths of the two straight snapping segments, so it is the length of an
    actual path and bounds the true distance from above. With
    ``certified_lower`` set the value is instead a proven lower bound.
    """

    value: float
    level_used: int
    converged: bool
    path: np.ndarray
    metric: str = "tau"
    snap: tuple[float, float] = (0.0, 0.0)
    history: list = field(default_factory=list)
    certified_lower: bool = False
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "level": int(self.level_used),
            "converged": bool(self.converged),
            "metric": self.metric,
            "path": [[float(p.real), float(p.imag)] for p in self.path],
            "snap": [float(s) for s in self.snap],
            "history": [float(h) for h in self.history],
            "certified_lower": bool(self.certified_lower),
            "flags": list(self.flags),
        }


def _trace(pred: np.ndarray, a: int, b: int) -> list[int]:
    out = [b]
    while out[-1] != a and out[-1] >= 0:
        out.append(int(pred[out[-1]]))
    return out[::-1]


SNAP_K = 12


def _augmented(mesh: DiskMesh, points: np.ndarray, metric: str):
    """Graph with each point appended as a virtual node joined by straight
    segments to its ``SNAP_K`` nearest active nodes."""
    from scipy.sparse import csr_matrix

    model = mesh.model
    g = mesh.graph(metric)
    n, m = mesh.n_nodes, points.size
    tree, idx = mesh.tree
    k = min(SNAP_K, idx.size)
    dd, ii = tree.query(np.stack([points.real, points.imag], axis=1), k=k)
    ii = idx[np.asarray(ii).reshape(m, k)]
    dd = np.asarray(dd).reshape(m, k)
    src = np.repeat(points, k)
    seg = segment_lengths(model, src, mesh.nodes[ii.ravel()], metric)
    seg = np.where(seg > 0, seg, 1e-300)
    rows = np.repeat(n + np.arange(m), k)
    indptr = np.concatenate([g.indptr, np.full(m, g.indptr[-1])])
    base = csr_matrix((g.data, g.indices, indptr), shape=(n + m, n + m))
    extra = coo_matrix((seg, (rows, ii.ravel())), shape=(n + m, n + m)).tocsr()
    return (base + extra).tocsr(), dd[:, 0]


def mesh_distance(mesh: DiskMesh, z: complex, w: complex, metric: str = "tau", with_path: bool = True):
    """Single-level distance estimate (no escalation).

    Both endpoints join the graph through straight segments to their nearest
    nodes, so the value is the length of an actual path.
    """
    z, w = complex(z), complex(w)
    if z == w:
        return 0.0, np.array([z]), (0.0, 0.0)
    g, disp = _augmented(mesh, np.array([z, w]), metric)
    n = mesh.n_nodes
    dist, pred = dijkstra(g, directed=False, indices=n, return_predecessors=True)
    v = float(dist[n + 1])
    path = np.array([z, w])
    if with_path and np.isfinite(v):
        ids = _trace(pred, n, n + 1)
        path = np.concatenate([[z], mesh.nodes[[i for i in ids if i < n]], [w]])
    return v, path, (float(disp[0]), float(disp[1]))


def r_out_for(model: WeightModel, *points) -> float:
    rmax = max(float(np.max(np.abs(np.asarray(p)))) for p in points)
    for r in R_OUT_LADDER:
        if r >= model.r_max:
            return model.r_max
        if rmax <= r:
            return r
    return model.r_max


def _distance(
    model_or_mesh, z, w, metric: str, tol_rel: float, max_level: int, start_level: int | None
) -> DistanceResult:
    if isinstance(model_or_mesh, DiskMesh):
        model, level0, r_out = model_or_mesh.model, model_or_mesh.level, model_or_mesh.r_out
    else:
        model, level0, r_out = model_or_mesh, 0, None
    if start_level is not None:
        level0 = start_level
    model.check_inside(z, w)
    need = r_out_for(model, z, w)
    if r_out is None or r_out < max(abs(z), abs(w)):
        r_out = need
    z, w = complex(z), complex(w)
    if z == w:
        return DistanceResult(0.0, level0, True, np.array([z]), metric)
    hist, flags = [], []
    prev = None
    last = None
    for level in range(level0, max_level + 1):
        try:
            mesh = build_mesh(model, level, r_out)
        except MeshTooLarge as exc:
            flags.append(f"MeshTooLarge: {exc}")
            break
        v, path, snap = mesh_distance(mesh, z, w, metric)
        hist.append(v)
        last = DistanceResult(v, level, False, path, metric, snap, list(hist), flags=flags)
        if prev is not None and abs(v - prev) <= tol_rel * v:
            last.converged = True
            return last
        prev = v
    if last is None:
        raise MeshTooLarge("; ".join(flags))
    last.flags.append("NotConverged")
    return last


def dist_tau(model_or_mesh, z, w, tol_rel: float = TOL_REL, max_level: int = MAX_LEVEL, start_level=None):
    """d_tau estimate with level escalation until the relative change
    between consecutive levels is at most ``tol_rel``."""
    return _distance(model_or_mesh, z, w, "tau", tol_rel, max_level, start_level)


def dist_phi(model_or_mesh, z, w, tol_rel: float = TOL_REL, max_level: int = MAX_LEVEL, start_level=None):
    """d_phi estimate (density ``phi'(|w|)``), escalated like :func:`dist_tau`."""
    return _distance(model_or_mesh, z, w, "phi", tol_rel, max_level, start_level)


@dataclass(frozen=True)
class RhoValue:
    rho: float
    distance: DistanceResult

    @property
    def converged(self) -> bool:
        return self.distance.converged


def rho_of(d):
    return -np.expm1(-np.asarray(d, dtype=float))


def rho_tau(model_or_mesh, z, w, **kw) -> RhoValue:
    d = dist_tau(model_or_mesh, z, w, **kw)
    return RhoValue(float(rho_of(d.value)), d)


def surrogate_f(model: WeightModel, z, w):
    """``1 - exp(-|z - w| / min(tau(z), tau(w)))``, mesh free."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    model.check_inside(z, w)
    gap = np.abs(z - w)
    t = np.minimum(model.tau_z(z), model.tau_z(w))
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(gap > 0, gap / t, 0.0)
    out = rho_of(x)
    return float(out) if out.ndim == 0 else out


def local_distance(
    model: WeightModel,
    a: complex,
    b: complex,
    metric: str = "tau",
    tol_rel: float = TOL_REL,
    start_level: int = 1,
    max_level: int = 5,
    rings0: int = 6,
) -> DistanceResult:
    """Distance between nearby points on an anchored patch mesh.

    The patch is centred at ``a`` with ``b`` an exact node, radius
    ``1.5 |a - b|``. For the tau-metric a lower bound ``|a - b| / max tau``
    over the disk ``D(a, |a - b|)`` is tried first: when it reaches
    ``CERTIFIED_D`` the pair is reported with that bound, at which point
    ``1 - exp(-d)`` equals 1 in double precision.
    """
    a, b = complex(a), complex(b)
    model.check_inside(a, b)
    if a == b:
        return DistanceResult(0.0, start_level, True, np.array([a]), metric)
    gap = abs(a - b)
    if metric == "tau":
        lb = gap / model.max_tau_on(abs(a) - gap, abs(a) + gap)
        if lb >= CERTIFIED_D:
            return DistanceResult(lb, 0, True, np.array([a, b]), metric, certified_lower=True)
    h0 = gap / 4.0
    hist, prev, last = [], None, None
    for level in range(start_level, max_level + 1):
        mesh = build_patch(model, a, h0, level, rings0, anchor=b)
        target = mesh.offsets[4 * 2**level]
        if not mesh.active[target]:
            # anchor node coincides with b, which is inside; keep it reachable
            raise AssertionError("anchor node inactive")
        dist, pred = dijkstra(mesh.graph(metric), directed=False, indices=0, return_predecessors=True)
        v = float(dist[target])
        hist.append(v)
        path = mesh.nodes[_trace(pred, 0, int(target))] if np.isfinite(v) else np.array([a, b])
        last = DistanceResult(v, level, False, path, metric, (0.0, 0.0), list(hist))
        if prev is not None and abs(v - prev) <= tol_rel * v:
            last.converged = True
            return last
        prev = v
    last.flags.append("NotConverged")
    return last


@dataclass
class BallResult:
    center_node: int
    nodes: np.ndarray
    points: np.ndarray
    distances: np.ndarray
    radius: float

    def __len__(self) -> int:
        return int(self.nodes.size)


def ball_tau(mesh: DiskMesh, z: complex, r: float, metric: str = "tau") -> BallResult:
    """Mesh nodes at graph distance ``< r`` from the node nearest ``z``."""
    if not r > 0:
        raise ValueError("ball radius must be positive")
    (a,), _ = mesh.snap([z])
    dist = dijkstra(mesh.graph(metric), directed=False, indices=int(a), limit=r)
    inside = np.nonzero(dist < r)[0]
    return BallResult(int(a), inside, mesh.nodes[inside], dist[inside], float(r))


# -- inclusion checks -------------------------------------------------------------


@dataclass
class InclusionReport:
    z: complex
    r: float
    level: int
    converged: bool
    n_ball: int
    n_disk: int
    violations_ball_in_disk: int
    violations_disk_in_ball: int
    ball_extent: float
    R: float | None = None
    R_prime: float | None = None
    R_prime_truncated: bool = False

    @property
    def ok(self) -> bool:
        return self.violations_ball_in_disk == 0 and self.violations_disk_in_ball == 0

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["z"] = [self.z.real, self.z.imag]
        d["ok"] = self.ok
        return d


def check_inclusions(
    model: WeightModel,
    mesh: DiskMesh | None,
    z: complex,
    r: float,
    R: float | None = None,
    tol_rel: float = TOL_REL,
    start_level: int = 2,
    max_level: int = 5,
) -> InclusionReport:
    """Check ``B(z, r) in D(z, 2 r tau(z)) in B(z, 4 r (1 + tol))`` and, given
    ``R``, the smallest ``R'`` with ``B_phi(z, R) in D(z, R'/phi'(|z|))``.

    Balls are computed on a patch mesh centred at ``z`` (the optional global
    ``mesh`` is not needed for this local question and is ignored). The level
    is raised until the Euclidean extent of the ball changes by at most
    ``tol_rel``.
    """
    model.require_class_w("check_inclusions")
    if not (0 < r < model.m_tau / 2):
        raise HypothesisViolated(f"need 0 < r < m_tau/2 = {model.m_tau / 2:.6g}, got r={r}")
    z = complex(z)
    model.check_inside(z)
    tz = float(model.tau_z(z))
    if tz == 0.0:
        return InclusionReport(z, r, 0, True, 1, 0, 0, 0, 0.0, R)
    rings0 = 6
    h0 = 3.0 * r * tz / rings0
    rad_disk = 2 * r * tz
    prev, rep = None, None
    for level in range(start_level, max_level + 1):
        mesh_p = build_patch(model, z, h0, level, rings0)
        dist = dijkstra(mesh_p.graph("tau"), directed=False, indices=0, limit=4 * r * (1 + tol_rel) * 1.5)
        sep = np.abs(mesh_p.nodes - z)
        act = mesh_p.active
        in_ball = act & (dist < r)
        in_disk = act & (sep < rad_disk)
        v1 = int(np.count_nonzero(in_ball & (sep >= rad_disk)))
        v2 = int(np.count_nonzero(in_disk & ~(dist < 4 * r * (1 + tol_rel))))
        ext = float(sep[in_ball].max() / (r * tz))
        rep = InclusionReport(z, r, level, False, int(in_ball.sum()), int(in_disk.sum()), v1, v2, ext, R)
        if prev is not None and abs(ext - prev) <= tol_rel * ext:
            rep.converged = True
            break
        prev = ext
    if R is not None:
        rep.R_prime, rep.R_prime_truncated = _r_prime(model, z, R, rep.level)
    return rep


def _r_prime(model: WeightModel, z: complex, R: float, level: int) -> tuple[float, bool]:
    dp = float(model.dphi(abs(z)))
    rings0 = 8
    h0 = 3.0 * R / dp / rings0
    mesh_p = build_patch(model, z, h0, level, rings0)
    dist = dijkstra(mesh_p.graph("phi"), directed=False, indices=0, limit=R)
    inside = mesh_p.active & (dist < R)
    ext = float(np.abs(mesh_p.nodes[inside] - z).max())
    outer = mesh_p.offsets[-1]
    truncated = bool(np.any(inside[outer:]))
    return ext * dp, truncated


# -- metric axioms ------------------------------------------------------------------


@dataclass
class MetricReport:
    n_triples: int
    triangle_violations: int
    symmetry_violations: int
    identity_violations: int
    scalar_violations: int
    scalar_grid: int
    worst_triangle_excess: float
    slack_factor: float
    level: int

    @property
    def ok(self) -> bool:
        return (
            self.triangle_violations == 0
            and self.symmetry_violations == 0
            and self.identity_violations == 0
            and self.scalar_violations == 0
        )

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def scalar_subadditivity(n: int = 1000, x_max: float = 10.0) -> int:
    """Count grid failures of ``f(x + h) <= f(x) + f(h)``, ``f = 1 - e^-x``."""
    x = np.linspace(0.0, x_max, n)
    f = rho_of(x)
    lhs = rho_of(x[:, None] + x[None, :])
    return int(np.count_nonzero(lhs > f[:, None] + f[None, :]))


def _distances_from(mesh: DiskMesh, sources: np.ndarray, targets: np.ndarray, metric: str) -> np.ndarray:
    """Distances from each source point to each target point (all points
    attached to the graph as virtual nodes)."""
    pts, inv = np.unique(np.concatenate([sources, targets]), return_inverse=True)
    g, _ = _augmented(mesh, pts, metric)
    n = mesh.n_nodes
    si, ti = inv[: sources.size], inv[sources.size :]
    us, sinv = np.unique(si, return_inverse=True)
    d = dijkstra(g, directed=False, indices=n + us)
    out = d[sinv][:, n + ti]
    out[sources[:, None] == targets[None, :]] = 0.0
    return out


def metric_axiom_suite(mesh: DiskMesh, triples, tol_rel: float = TOL_REL, metric: str = "tau") -> MetricReport:
    """Triangle inequality, symmetry and identity for ``rho = 1 - e^-d`` on
    triples of points, plus the scalar subadditivity of ``1 - e^-x``."""
    t = np.asarray(triples, dtype=complex).reshape(-1, 3)
    a, b, c = t[:, 0], t[:, 1], t[:, 2]
    tri_v = sym_v = id_v = 0
    worst = -np.inf
    for lo in range(0, t.shape[0], 200):
        sl = slice(lo, lo + 200)
        A, B, C = a[sl], b[sl], c[sl]
        dA = _distances_from(mesh, A, np.concatenate([B, C, A]), metric)
        dB = _distances_from(mesh, B, np.concatenate([A, C]), metric)
        m = A.size
        i = np.arange(m)
        ab, ac, aa = dA[i, i], dA[i, m + i], dA[i, 2 * m + i]
        ba, bc = dB[i, i], dB[i, m + i]
        r_ab, r_ac, r_bc, r_ba = rho_of(ab), rho_of(ac), rho_of(bc), rho_of(ba)
        scale = np.maximum.reduce([r_ab, r_ac, r_bc])
        slack = 3 * tol_rel * scale
        excess = r_ac - (r_ab + r_bc)
        worst = max(worst, float(excess.max()))
        tri_v += int(np.count_nonzero(excess > slack))
        sym_v += int(np.count_nonzero(np.abs(r_ab - r_ba) > slack))
        id_v += int(np.count_nonzero(aa != 0.0))
    return MetricReport(
        int(t.shape[0]), tri_v, sym_v, id_v, scalar_subadditivity(), 1000, worst, 3 * tol_rel, mesh.level
    )


def random_disk_points(n: int, seed, radius: float) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def check_points_inside(model: WeightModel, *pts) -> None:
    try:
        model.check_inside(*pts)
    except OutsideTruncation:
        raise
