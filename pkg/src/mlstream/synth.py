"""Synthetic graph generators for tests, benchmarks, and demos."""
from __future__ import annotations

import random
from typing import List, Optional

from .model import Aspect, BuildMode, GraphBuilder, MultilayerStreamGraph

_LAYER_NAMES = ("a", "b", "c", "d", "e")


def random_mls_graph(rng: random.Random, *, max_nodes: int = 5,
                     max_layers: int = 3, span: int = 200,
                     max_links: int = 12,
                     resolution: int = 1) -> MultilayerStreamGraph:
    """A small random multilayer stream graph (single aspect).

    Generates a mix of situations the measures must survive: instantaneous
    links, interlayer links, idle node-layers, isolated nodes, restricted
    layer lifetimes, and presence wider than link activity.
    """
    t_end = rng.randint(10, span)
    n_layers = rng.randint(1, max_layers)
    layers = [(name,) for name in _LAYER_NAMES[:n_layers]]
    aspect = Aspect("layer", tuple(_LAYER_NAMES[:n_layers]))
    n_nodes = rng.randint(1, max_nodes)
    nodes = list(range(1, n_nodes + 1))
    b = GraphBuilder((0, t_end), [aspect], BuildMode.AUTO_MATERIALIZE,
                     resolution=resolution)

    def rand_interval(max_len: Optional[int] = None):
        s = rng.randint(0, t_end)
        if rng.random() < 0.1:
            return (s, s)
        top = t_end if max_len is None else min(t_end, s + max_len)
        return (s, rng.randint(s, top))

    for layer in layers:
        if rng.random() < 0.3:
            b.declare_layer_presence(
                layer, [rand_interval() for _ in range(rng.randint(1, 2))])

    n_links = rng.randint(0, max_links)
    for _ in range(n_links):
        a_nl = (rng.choice(nodes), rng.choice(layers))
        b_nl = (rng.choice(nodes), rng.choice(layers))
        if a_nl == b_nl:
            continue
        b.add_link(rand_interval(span // 4), a_nl, b_nl)

    # presence beyond link activity, plus link-free node-layers
    for _ in range(rng.randint(0, 4)):
        nl = (rng.choice(nodes), rng.choice(layers))
        b.declare_node_layer(nl, [rand_interval()])
    if rng.random() < 0.2:
        b.add_node(n_nodes + 1)
    return b.finish()


def graph_corpus(seed: int, count: int, **kwargs) -> List[MultilayerStreamGraph]:
    """Deterministic list of random graphs for oracle-equivalence sweeps."""
    rng = random.Random(seed)
    return [random_mls_graph(rng, **kwargs) for _ in range(count)]


def planted_flight_network(seed: int = 0, *, carriers: int = 5,
                           airports: int = 30,
                           horizon: int = 7 * 1440
                           ) -> MultilayerStreamGraph:
    """A flight-style network with planted carrier importance.

    Carrier ``C0`` is the biggest: each later carrier serves a nested
    prefix of the airports and flies geometrically fewer routes, so any
    sane importance measure (walker coverage, exposure variance) should
    recover the index order. Nodes are airport numbers; one carrier
    aspect; every link is an intralayer [departure, arrival] interval in
    minutes.
    """
    rng = random.Random(seed)
    names = tuple(f"C{c}" for c in range(carriers))
    b = GraphBuilder((0, horizon), [Aspect("carrier", names)],
                     BuildMode.AUTO_MATERIALIZE)
    for c, name in enumerate(names):
        served = max(3, round(airports * 0.72 ** c))
        flights = max(6, round(240 * 0.5 ** c))
        layer = (name,)
        for _ in range(flights):
            o, d = rng.sample(range(served), 2)
            dep = rng.randint(0, horizon - 360)
            b.add_link((dep, dep + rng.randint(45, 300)),
                       (o, layer), (d, layer))
    return b.finish()
