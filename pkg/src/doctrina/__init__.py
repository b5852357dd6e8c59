"""Doctrines over finite bases: existential completions, their characterization,
regular and exact completions, and exhaustive theorem checks on small instances."""
from .analysis import (characterize_completion, check_choice_rules, check_epsilon_operators, doctrine_equivalence,
                       epsilon_iff, existential_free_subdoctrine, free_element_report, is_completion_of,
                       morita_exact, morita_regular, reconstruction, unique_choice_conditions)
from .completion import (build_comparison_groth, build_comparison_pred, check_comprehension_properties,
                         comprehension_completion, existential_completion, extensional_reflection, groth_category,
                         predicates_category)
from .doctrine import (Doctrine, check_existential, check_full_existential, check_lambda_existential,
                       doctrine_from_tables, find_elementary_structure, localic_doctrine, m_subobjects_doctrine,
                       powerset_doctrine, restrict_subdoctrine, terminal_doctrine, trivial_doctrine,
                       weak_subobjects_doctrine)
from .errors import *  # noqa: F401,F403
from .fincat import (ChosenStructure, FinCategory, FinSetCategory, LeftClass, all_morphisms, identities,
                     isomorphisms, monomorphisms, preorder_category, projections, search_equivalence,
                     validate_category, verify_left_class)
from .instance import InstanceFile, parse_instance, serialize
from .order import (InfSemilattice, boolean_lattice, chain, check_supercoherent, downset_frame,
                    supercompact_elements, supercompact_oracle, validate_frame, validate_semilattice)
from .regexact import (build_exact_functor, build_reg_functor, ex_lex, ex_reg, exact_completion, reg_lex_direct,
                       regular_completion)
from .theorems import THEOREM_IDS, run_all, run_theorem_suite

__version__ = "0.1.0"
