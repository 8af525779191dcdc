import networkx as nx
import numpy as np
import pytest

import graphprox as gp


@pytest.fixture
def single_edge():
    return gp.preprocess([(0, 1)])


@pytest.fixture
def triangle():
    return gp.preprocess([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return gp.preprocess([(0, 1), (1, 2)])


@pytest.fixture
def star4():
    # center 0 with leaves 1..3
    return gp.preprocess([(0, 1), (0, 2), (0, 3)])


def er_graph(n, p, seed):
    """Largest component of an Erdos-Renyi graph, as a package Graph."""
    nxg = nx.gnp_random_graph(n, p, seed=seed)
    comp = max(nx.connected_components(nxg), key=len)
    return gp.preprocess(list(nxg.subgraph(comp).edges()))


def pa_graph(n, m, seed):
    """Preferential-attachment graph (always connected)."""
    nxg = nx.barabasi_albert_graph(n, m, seed=seed)
    return gp.preprocess(list(nxg.edges()))


def random_spd(n, rng, lo=0.5, hi=10.0):
    """Random SPD matrix with eigenvalues in [lo, hi]; returns (Z, eigs)."""
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.sort(rng.uniform(lo, hi, n))
    return (basis * eigs) @ basis.T, eigs
