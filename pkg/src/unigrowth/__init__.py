"""Growth of right-angled Artin groups, labeled trivalent graph evolutions
and triangulation flip balls, with exact finite-radius checks."""
from ._kernels import BACKEND
from .codes import (Code, MalformedCodeError, VertexLabeling, canonical_representative, count_wr_exact,
                    decode, entropy_rate, entropy_rate_closed, verify_code, wr_bound)
from .groups import GroupDescriptor, conjugate_equal
from .labeled_graph import (Edge, LabeledGraph, Split, apply_split, canonical_key, double_split,
                            enumerate_graph_ball, loop_split, normalize_orientation)
from .raag import (DefiningGraph, Letter, ResourceGuardError, build_complement, enumerate_ball,
                   growth_bound, normal_form)

__all__ = [
    "BACKEND", "Code", "DefiningGraph", "Edge", "GroupDescriptor", "LabeledGraph", "Letter",
    "MalformedCodeError", "ResourceGuardError", "Split", "VertexLabeling", "apply_split",
    "build_complement", "canonical_key", "canonical_representative", "conjugate_equal",
    "count_wr_exact", "decode", "double_split", "entropy_rate", "entropy_rate_closed",
    "enumerate_ball", "enumerate_graph_ball", "growth_bound", "loop_split", "normal_form",
    "normalize_orientation", "verify_code", "wr_bound",
]
