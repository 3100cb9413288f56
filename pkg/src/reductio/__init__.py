"""Gadget-based reductions between graph decision problems.

Parsing and canonical serialization of marked graphs, first-order sentence
evaluation, constraint checking, brute-force problem oracles, gadget
application, counterexample-driven verification, exercise workflows, an HTTP
service, and a command-line interface.
"""

from reductio.graphs import (
    Graph,
    GraphError,
    ProblemInstance,
    enumerate_instances,
    graph_from_obj,
    graph_to_obj,
    instance_from_obj,
    instance_to_obj,
    is_acyclic,
    isomorphic,
    parse_graph,
    parse_instance,
    remove_nodes,
    serialize_graph,
    serialize_instance,
    to_dot,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphError",
    "ProblemInstance",
    "enumerate_instances",
    "graph_from_obj",
    "graph_to_obj",
    "instance_from_obj",
    "instance_to_obj",
    "is_acyclic",
    "isomorphic",
    "parse_graph",
    "parse_instance",
    "remove_nodes",
    "serialize_graph",
    "serialize_instance",
    "to_dot",
    "__version__",
]
