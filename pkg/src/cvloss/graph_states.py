"""Finitely squeezed CV graph states and the four square-graph loss scenarios.

A graph state on m vertices starts from the product squeezed vacuum
V0 = diag(s_1..s_m, 1/s_1..1/s_m) (p squeezed, x anti-squeezed for positive
dB) and applies one x-x coupling gate per graph edge, acting on the
covariance as V = G^T V0 G with G = [[1, A],[0, 1]].
"""

from dataclasses import dataclass, field

import numpy as np

from .loss_channel import LossChannel
from .phase_space import validate_covariance


@dataclass(frozen=True)
class GraphSpec:
    """Vertex count, 0/1 adjacency (symmetric, hollow) and per-mode squeezing in dB."""

    adjacency: np.ndarray = field(repr=False)
    squeezing_db: tuple = ()

    def __post_init__(self):
        A = np.asarray(self.adjacency, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.array_equal(A, A.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diagonal(A) != 0):
            raise ValueError("adjacency must have a zero diagonal")
        if not np.all(np.isin(A, (0.0, 1.0))):
            raise ValueError("only unweighted 0/1 adjacency matrices are supported")
        db = tuple(float(x) for x in self.squeezing_db)
        if len(db) != A.shape[0]:
            raise ValueError("one squeezing value per vertex required")
        if not all(np.isfinite(x) for x in db):
            raise ValueError("squeezing values must be finite")
        A.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        object.__setattr__(self, "squeezing_db", db)

    @property
    def m(self):
        return self.adjacency.shape[0]


def initial_cov(squeezing_db):
    """Product squeezed vacuum: s_j = 10^(dB_j/10), V0 = diag(s, 1/s).

    Positive dB squeezes the p quadrature below vacuum; the x block carries
    the anti-squeezing.
    """
    s = np.power(10.0, np.asarray(squeezing_db, dtype=float) / 10.0)
    return validate_covariance(np.diag(np.concatenate([s, 1.0 / s])))


def cz_symplectic(adjacency):
    """Symplectic matrix of the x-x coupling network: G = [[1, A],[0, 1]]."""
    A = np.asarray(adjacency, dtype=float)
    m = A.shape[0]
    G = np.eye(2 * m)
    G[:m, m:] = A
    return G


def graph_cov(spec):
    """Graph-state covariance V = G^T V0 G; pure for every finite squeezing."""
    V0 = initial_cov(spec.squeezing_db).V
    G = cz_symplectic(spec.adjacency)
    return validate_covariance(G.T @ V0 @ G)


def square_graph_adjacency():
    """4-cycle adjacency: vertices 1-2-3-4-1."""
    return np.array(
        [
            [0, 1, 0, 1],
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [1, 0, 1, 0],
        ],
        dtype=float,
    )


SCENARIOS = ("vertex-loss", "uniform", "off-support", "overlapping")


def square_graph_scenario(name, squeezing_db=10.0, gamma=1.0):
    """One of the four named loss scenarios on the uniformly squeezed square graph.

    Subtraction always happens at vertex 1.  The loss channel is:

    - "vertex-loss":  loss on vertex 1 only,
    - "uniform":      equal loss on all four vertices,
    - "off-support":  one lossy mode (e2 + e3 + e4)/sqrt(3), disjoint from
                      the subtraction vertex,
    - "overlapping":  one lossy mode (e1 + e4)/sqrt(2), overlapping it.

    Returns (GraphSpec, subtraction mode, LossChannel).
    """
    spec = GraphSpec(adjacency=square_graph_adjacency(), squeezing_db=(float(squeezing_db),) * 4)
    basis = np.eye(8)
    g = basis[0]
    if name == "vertex-loss":
        channel = LossChannel.single_mode(4, basis[0], gamma)
    elif name == "uniform":
        channel = LossChannel.uniform(4, gamma)
    elif name == "off-support":
        d = (basis[1] + basis[2] + basis[3]) / np.sqrt(3.0)
        channel = LossChannel.single_mode(4, d, gamma)
    elif name == "overlapping":
        d = (basis[0] + basis[3]) / np.sqrt(2.0)
        channel = LossChannel.single_mode(4, d, gamma)
    else:
        raise ValueError(f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    return spec, g, channel
