"""Fitted uniform meshes of the truncation box and region bookkeeping.

The computational domain is the box Omega_R = (-R, R)^d containing the
interior domain Omega = (-omega_half, omega_half)^d, a separating collar of
width eps_gap, and the observation region W = Omega_R \\ closure of the
inflated box.  All region boundaries must lie on mesh lines, so every element
belongs to exactly one region and the interior P1 space embeds in the zero
extension space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ConfigurationError


class Region(IntEnum):
    INTERIOR = 0        # strictly inside Omega
    OMEGA_BOUNDARY = 1  # on the boundary of Omega (nodes only)
    COLLAR = 2          # between Omega and W
    OBSERVATION = 3     # in the closure of W, excluding the outer boundary
    OUTER = 4           # on the boundary of Omega_R (nodes only)


def _ratio_as_int(length: float, h: float, name: str) -> int:
    r = length / h
    n = round(r)
    if n <= 0 or abs(r - n) > 1e-9 * max(1.0, abs(r)):
        raise ConfigurationError(
            f"{name}={length} is not an integer multiple of the mesh spacing h={h}"
        )
    return int(n)


@dataclass(frozen=True)
class DomainSpec:
    """Geometry of one reconstruction problem.

    Parameters
    ----------
    dim : 1 or 2.
    R : half-width of the truncation box Omega_R = (-R, R)^dim.
    omega_half : half-width of the interior domain Omega.
    eps_gap : separation between Omega and the observation region W.
    h : mesh spacing; R, omega_half and eps_gap must be multiples of h.
    omega_prime : optional coefficient subdomain, one (lo, hi) pair per axis;
        must be strictly contained in Omega.
    """

    dim: int
    R: float
    omega_half: float
    eps_gap: float
    h: float
    omega_prime: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigurationError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.h > 0 and self.R > 0 and self.omega_half > 0 and self.eps_gap > 0):
            raise ConfigurationError("R, omega_half, eps_gap and h must be positive")
        if self.omega_half + self.eps_gap >= self.R:
            raise ConfigurationError(
                f"omega_half + eps_gap = {self.omega_half + self.eps_gap} must be < R = {self.R}"
                " (the observation region would be empty)"
            )
        _ratio_as_int(self.R, self.h, "R")
        _ratio_as_int(self.omega_half, self.h, "omega_half")
        _ratio_as_int(self.eps_gap, self.h, "eps_gap")
        if self.omega_prime is not None:
            box = tuple(tuple(map(float, ab)) for ab in self.omega_prime)
            if len(box) != self.dim:
                raise ConfigurationError("omega_prime must give one (lo, hi) pair per axis")
            for lo, hi in box:
                if not (-self.omega_half < lo < hi < self.omega_half):
                    raise ConfigurationError(
                        f"omega_prime interval ({lo}, {hi}) is not strictly inside Omega"
                    )
            object.__setattr__(self, "omega_prime", box)

    def refined(self, factor: int) -> "DomainSpec":
        """Same geometry with the mesh spacing divided by `factor`."""
        return DomainSpec(self.dim, self.R, self.omega_half, self.eps_gap,
                          self.h / factor, self.omega_prime)


@dataclass(frozen=True)
class Mesh:
    """Uniform fitted mesh of Omega_R with region tags.

    Nodes are ordered lexicographically by coordinates.  In 2D every grid
    cell is split along its lower-left to upper-right diagonal into a lower
    triangle (a, b, c) and an upper triangle (a, c, d).
    """

    spec: DomainSpec
    nodes: np.ndarray          # (N, dim)
    elements: np.ndarray       # (M, dim+1) vertex indices
    node_region: np.ndarray    # (N,) Region
    element_region: np.ndarray  # (M,) Region
    interior_dofs: np.ndarray  # node indices spanning V_{h,0}
    obs_nodes: np.ndarray      # node indices sampling W
    node_to_dof: np.ndarray    # (N,) dof index or -1
    lattice: np.ndarray = field(repr=False, default=None)  # (N, dim) integer coords

    @property
    def h(self) -> float:
        return self.spec.h

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def n_interior(self) -> int:
        return len(self.interior_dofs)

    @property
    def n_obs(self) -> int:
        return len(self.obs_nodes)

    def element_measure(self) -> float:
        """Measure of a single element (all elements are congruent)."""
        return self.h if self.dim == 1 else 0.5 * self.h ** 2

    def elements_in_region(self, region: Region) -> np.ndarray:
        return np.flatnonzero(self.element_region == region)

    def dof_values_to_nodal(self, v: np.ndarray) -> np.ndarray:
        """Zero-extend an interior coefficient vector to all mesh nodes."""
        out = np.zeros(len(self.nodes))
        out[self.interior_dofs] = v
        return out


def build_mesh(spec: DomainSpec) -> Mesh:
    """Build the fitted uniform mesh for `spec` and classify nodes/elements."""
    h, R = spec.h, spec.R
    n = _ratio_as_int(2 * R, h, "2R")
    grid = -R + h * np.arange(n + 1)

    if spec.dim == 1:
        nodes = grid[:, None]
        lat = np.arange(n + 1)[:, None]
        elements = np.column_stack([np.arange(n), np.arange(1, n + 1)])
        centroids = 0.5 * (nodes[elements[:, 0], 0] + nodes[elements[:, 1], 0])[:, None]
    else:
        ix, iy = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        lat = np.column_stack([ix.ravel(), iy.ravel()])
        nodes = -R + h * lat.astype(float)
        cx, cy = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        a = cx.ravel() * (n + 1) + cy.ravel()
        b = a + (n + 1)
        c = b + 1
        d = a + 1
        lower = np.column_stack([a, b, c])
        upper = np.column_stack([a, c, d])
        elements = np.empty((2 * n * n, 3), dtype=np.int64)
        elements[0::2] = lower
        elements[1::2] = upper
        centroids = nodes[elements].mean(axis=1)

    tol = 1e-9 * h
    t_node = np.abs(nodes).max(axis=1)
    node_region = np.full(len(nodes), Region.COLLAR, dtype=np.int8)
    node_region[t_node < spec.omega_half - tol] = Region.INTERIOR
    node_region[np.abs(t_node - spec.omega_half) <= tol] = Region.OMEGA_BOUNDARY
    w_inner = spec.omega_half + spec.eps_gap
    node_region[t_node > w_inner - tol] = Region.OBSERVATION
    node_region[np.abs(t_node - R) <= tol] = Region.OUTER

    t_cen = np.abs(centroids).max(axis=1)
    element_region = np.full(len(elements), Region.COLLAR, dtype=np.int8)
    element_region[t_cen < spec.omega_half] = Region.INTERIOR
    element_region[t_cen > w_inner] = Region.OBSERVATION

    interior_dofs = np.flatnonzero(node_region == Region.INTERIOR)
    obs_nodes = np.flatnonzero(node_region == Region.OBSERVATION)
    node_to_dof = np.full(len(nodes), -1, dtype=np.int64)
    node_to_dof[interior_dofs] = np.arange(len(interior_dofs))

    return Mesh(spec=spec, nodes=nodes, elements=np.asarray(elements, dtype=np.int64),
                node_region=node_region, element_region=element_region,
                interior_dofs=interior_dofs, obs_nodes=obs_nodes,
                node_to_dof=node_to_dof, lattice=lat)


def coefficient_elements(mesh: Mesh, omega_prime=None) -> np.ndarray:
    """Indices of elements contained in the coefficient subdomain Omega'.

    These elements carry the piecewise constant coefficient space.  The box
    defaults to the one in the domain spec.
    """
    box = omega_prime if omega_prime is not None else mesh.spec.omega_prime
    if box is None:
        raise ConfigurationError("no coefficient subdomain: omega_prime was not set")
    if mesh.dim == 1 and np.ndim(box) == 1:
        box = (tuple(box),)
    box = tuple(tuple(map(float, ab)) for ab in box)
    if len(box) != mesh.dim:
        raise ConfigurationError("omega_prime must give one (lo, hi) pair per axis")
    oh = mesh.spec.omega_half
    for lo, hi in box:
        if lo >= hi:
            raise ConfigurationError(f"empty omega_prime interval ({lo}, {hi})")
        if lo < -oh - 1e-12 or hi > oh + 1e-12 or (lo <= -oh + 1e-12 and hi >= oh - 1e-12):
            raise ConfigurationError(
                f"omega_prime interval ({lo}, {hi}) is not strictly contained in Omega"
            )

    verts = mesh.nodes[mesh.elements]  # (M, dim+1, dim)
    tol = 1e-9 * mesh.h
    inside = np.ones(len(mesh.elements), dtype=bool)
    for axis, (lo, hi) in enumerate(box):
        ax = verts[:, :, axis]
        inside &= (ax.min(axis=1) >= lo - tol) & (ax.max(axis=1) <= hi + tol)
    idx = np.flatnonzero(inside)
    if len(idx) == 0:
        raise ConfigurationError("omega_prime contains no full element; refine the mesh")
    return idx


def element_centers(mesh: Mesh, element_ids: np.ndarray) -> np.ndarray:
    """Centroids of the given elements, shape (len(element_ids), dim)."""
    return mesh.nodes[mesh.elements[element_ids]].mean(axis=1)
