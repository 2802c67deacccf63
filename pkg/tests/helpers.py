"""Shared builders for randomized test instances."""

import numpy as np

from isingreg import InteractionMatrix, IsingModel


def random_symmetric_matrix(rng, n, zero_diag=True):
    """Dense symmetric matrix normalized to unit infinity norm."""
    m = rng.normal(size=(n, n))
    m = 0.5 * (m + m.T)
    if zero_diag:
        np.fill_diagonal(m, 0.0)
    m /= np.abs(m).sum(axis=1).max()
    return InteractionMatrix.from_dense(m)


def random_graph_matrix(rng, n, p=0.3):
    """Erdos-Renyi adjacency divided by max degree."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    return InteractionMatrix.from_adjacency(edges, n)


def random_model(rng, n, beta_scale=0.9, field_scale=1.0, graph=False):
    A = (random_graph_matrix(rng, n) if graph
         else random_symmetric_matrix(rng, n))
    h = rng.uniform(-field_scale, field_scale, size=n)
    beta = float(rng.uniform(-beta_scale, beta_scale))
    return IsingModel(A, h, beta)


def random_spins(rng, n):
    return rng.choice([-1.0, 1.0], size=n)


def enumeration_conditional(summary, state_index, i, n):
    """E[sigma_i | sigma_{-i}] read off the exact probability table."""
    flip = state_index ^ (1 << i)
    if (state_index >> i) & 1:
        p_plus, p_minus = summary.full_table[state_index], summary.full_table[flip]
    else:
        p_plus, p_minus = summary.full_table[flip], summary.full_table[state_index]
    return (p_plus - p_minus) / (p_plus + p_minus)
