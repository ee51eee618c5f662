"""
DOT export of labelled transition systems
"""
from typing import Optional

import graphviz

from teamata.core.config import OutputConfig, config
from teamata.models.lts import Lts
from teamata.utils.helpers import format_label, format_state

START = "__start"


def export_dot(lts: Lts, name: str = "lts", style: Optional[OutputConfig] = None) -> str:
    """
    Render an LTS as a DOT digraph

    Nodes are numbered in canonical state order and edges follow the sorted
    transitions, so equal LTSs render to identical text. An arrow from a
    point-shaped start node marks the initial state.

    Args:
        lts: The LTS to render
        name: Graph name
        style: Layout options; defaults to the configured output section

    Returns:
        DOT source
    """
    style = style or config.output
    shown = lts if style.show_unreachable else lts.restrict_to_reachable()
    ids = {state: f"s{i}" for i, state in enumerate(shown.sorted_states())}

    dot = graphviz.Digraph(name=name, graph_attr={"rankdir": style.rankdir})
    dot.node(START, label="", shape="point")
    for state, node_id in ids.items():
        dot.node(node_id, label=graphviz.escape(format_state(state)), shape="circle")
    dot.edge(START, ids[shown.initial])
    for source, label, target in shown.sorted_transitions():
        dot.edge(ids[source], ids[target], label=graphviz.escape(format_label(label)))
    return dot.source
