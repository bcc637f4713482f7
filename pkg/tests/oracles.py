"""Independent numerical oracles used only by the test suite.

These deliberately avoid the library's closed-form paths: marginals are
checked by tensor Gauss-Legendre integration of pointwise Wigner values over
a truncation box, and moments by Gauss-Hermite quadrature after whitening,
which is exact for polynomial-times-Gaussian integrands.
"""

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss


def marginal_by_quadrature(wigner_fn, dim, keep_coords, kept_values, radius=14.0, nodes=90):
    """Integrate a 2m-dim Wigner function over the discarded coordinate plane.

    ``wigner_fn`` maps a batch of phase-space points (N x dim) to values;
    ``keep_coords`` lists the coordinate indices held fixed at
    ``kept_values``.  Tensor Gauss-Legendre over [-radius, radius] per
    discarded coordinate.
    """
    drop = [i for i in range(dim) if i not in keep_coords]
    x, w = leggauss(nodes)
    x = x * radius
    w = w * radius
    grids = np.meshgrid(*([x] * len(drop)), indexing="ij")
    weights = np.meshgrid(*([w] * len(drop)), indexing="ij")
    pts = np.zeros((grids[0].size, dim))
    pts[:, keep_coords] = np.asarray(kept_values)
    for ax, g in zip(drop, grids):
        pts[:, ax] = g.ravel()
    wtot = np.ones(grids[0].size)
    for wg in weights:
        wtot *= wg.ravel()
    return float(np.sum(wtot * wigner_fn(pts)))


def moment_by_quadrature(wigner, f, order):
    """Gauss-Hermite moment of (f, beta)^order under a poly-Gaussian Wigner.

    Whitens with the Cholesky factor of Sigma; exact (up to roundoff) because
    the integrand is a polynomial times the Gaussian weight.
    """
    L = np.linalg.cholesky(wigner.sigma)
    n = wigner.sigma.shape[0]
    deg = order + 2
    x, w = hermegauss(deg)  # weight e^{-z^2/2}, sum of weights = sqrt(2 pi)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    z = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.meshgrid(*([w] * n), indexing="ij")
    wtot = np.ones(z.shape[0])
    for wg in weights:
        wtot *= wg.ravel()
    beta = z @ L.T
    quad = np.sum(beta * (beta @ wigner.M), axis=1)
    proj = beta @ np.asarray(f)
    integrand = 0.5 * (quad + wigner.c) * proj**order
    return float(np.sum(wtot * integrand) / (2.0 * np.pi) ** (n / 2.0))


def grid_minimum(wigner_fn, dim, radius, step):
    """Minimum Wigner value over a dense hypercube grid (contains the origin)."""
    axis = np.arange(-radius, radius + step / 2, step)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return float(np.min(wigner_fn(pts)))
