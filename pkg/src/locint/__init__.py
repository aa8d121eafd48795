"""Exact analysis of local integration in discrete dynamical networks.

The package measures how strongly the parts of a spatiotemporal
pattern hang together, stratifies whole trajectories into
disintegration levels, extracts the completely integrated patterns,
and interprets them as entities that act on and perceive their
environments. All probability arithmetic is rational and exact.
"""

from ._backend import BACKEND
from .errors import (CapExceeded, ImpossiblePattern, LocintError, ParseError,
                     PerceptionNotUnique, UndefinedCli)
from .model import (BayesNet, MarkovSpec, Mechanism, NodeId, StateSpace,
                    build_markov_chain, conditional_probability,
                    deterministic_pattern_count, enumerate_trajectories,
                    joint_probability, marginal_probability, mc_const_spec,
                    mc_eps_spec, morph, node, verify_time_slice_markov)
from .pattern import (Pattern, TimeSlice, anti_patterns, anti_patterns_wrt,
                      ascii_grid, classify_composite, occurs_in,
                      parse_pattern, pgm_grid, trajectory_set, traverses_dof,
                      variation)
from .partition import (PARTITION_CAP, PartitionPoset, SetPartition, bell,
                        covers, enumerate_partitions, hasse_edges, join, meet,
                        refines, restrict, sli_workload, stirling2)
from .integration import (CliResult, JointTable, SliValue, cli, delta_sli,
                          max_sli_fixture, negative_sli_fixture,
                          normalized_sli, sli, sli_deterministic,
                          sli_upper_bound)
from .disintegration import (Hierarchy, IotaEntity, RefinementFreeHierarchy,
                             disintegration_hierarchy, entity_set_union,
                             iota_entities, refinement_free,
                             verify_disintegration_theorem)
from .symmetry import (GeneratedGroup, Permutation, act_on_distribution,
                       act_on_partition, act_on_pattern, check_sli_symmetry,
                       check_markov_symmetry_propagation, is_symmetry,
                       mc_const_symmetry_group, orbit, row_time_permutation,
                       spatial_flip, spatial_permutation, time_shift)
from .agency import (BranchMorph, CoActionPair, CoPerceptionContext,
                     EntitySet, ExtendedPaLoop, PaLoop, PerceptionPartition,
                     branch_morph, branching_partition,
                     co_perception_entities, co_perception_environments,
                     dist_over_mutually_exclusive, environment_of,
                     extend_pa_loop, find_co_actions, non_heteronomy,
                     pa_action_partition, pa_sensor_partition,
                     perception_partition, set_predicates)
from .sysfile import (SystemFile, format_permutation, load_system,
                      loads_system, parse_permutation, save_system,
                      write_system)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
