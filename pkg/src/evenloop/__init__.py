"""Even-subgraph loop measures, random-cluster sampling, and cycle-popping
spanning-tree machinery on finite multigraphs, exactly verified at small
scale."""

from .graphs import (Graph, GraphError, PercolationConfig, attach_ghost,
                     build_graph, components, enhance, graph_from_json,
                     graph_to_json, odd_boundary, parse_family_spec,
                     wired_quotient)
from .cyclespace import (EdgeVector, GeneratingSet, count_even_subgraphs,
                         face_generating_set, forest_generating_set,
                         fundamental_cycles, gaussian_basis,
                         greedy_generating_set, project, project_space,
                         sample_uniform_even, spanning_tree, xor_sum)
from .exact import (CapExceeded, ExactDistribution, ZeroPartition,
                    empirical_distribution, enumerate_configs,
                    exact_distribution, pushforward, tv_distance)
from .fk import (CoalescenceFailure, FKParams, cftp_sample, cftp_samples,
                 exact_fk_distribution, fk_marginals, fk_weight, glauber_step,
                 monotone_sandwich_trace)
from .loops import (LoopParams, bernoulli_union, conditional_uniformity_check,
                    couple_sample, couple_samples, exact_loop_distribution,
                    loop_params, loop_weight, p_to_x, x_to_p)
from .wilson import (ArrowStacks, OrientedTree, cycle_pop_run, lerw,
                     legal_order_invariance_check, wilson_ust, wilson_wired)
from .planar import (PlanarMap, cycle_map, dual_map, duality_check, gradient,
                     grid_map, ising_from_fk, map_from_json)
from .families import get_family
from . import lab, verify

__version__ = "0.1.0"
