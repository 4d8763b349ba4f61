"""
fmtbench
========
Finite model theory workbench: homomorphisms, classes of finite structures,
Fraïssé approximants, T-colored structures and oligomorphy at desk scale.

Single-import usage::

    from fmtbench import Structure, GRAPH_SIGNATURE, find_homomorphism, core

Structures
----------
- ``Signature``, ``Structure``   - immutable relational structures
- ``parse_structure``            - JSON → Structure (typed errors on bad input)

Morphisms
---------
- ``find_homomorphism`` / ``find_embedding`` / ``find_isomorphism``
- ``core``, ``automorphism_group``, ``is_homomorphism_homogeneous``

Classes
-------
- ``AllFinite``, ``KLF``, ``CSP``, ``ForbHom``, ``Explicit``, ``Colored``
- ``member``, ``age``, ``check_property``, ``free_amalgam``, ``eppa_witness``

Fraïssé approximants
--------------------
- ``build_generic``, ``verify_extension_property``, ``verify_homogeneity``

Colored structures
------------------
- ``make_colored``, ``weak_automorphisms``, ``build_universal_colored``
- ``encode_S`` / ``decode_S``, ``tilde_expansion``, ``check_caut_identity``

Oligomorphy
-----------
- ``pe_type_leq``, ``count_pe_types``, ``count_orbits``, ``check_woRN``

Exceptions
----------
- ``FMTBenchError``          - root exception
- ``InputError``             - malformed or inconsistent input (CLI exit 3)
- ``BudgetExceededError``    - search gave up; never means "absent" (exit 2)
- ``AmalgamationRefusedError`` - construction refused at the requested bound
"""

# Search budget
from ._search import SearchBudget

# Models
from .models import ClassProperty, MorphismKind, OrbitMode, OutputFormat

# Structures
from .structures import (
    GRAPH_SIGNATURE,
    Signature,
    Structure,
    Symbol,
    canonical_key,
    component_count,
    disjoint_union,
    empty_structure,
    gaifman_graph,
    induced_substructure,
    is_connected,
    is_link_structure,
    is_packed,
    is_tight,
    parse_structure,
    relabel,
    serialize,
    structure_from_dict,
    to_dot,
)

# Morphisms
from .morphisms import (
    Morphism,
    automorphism_group,
    compose,
    core,
    count_homomorphisms,
    endomorphisms,
    enumerate_embeddings,
    enumerate_homomorphisms,
    find_embedding,
    find_homomorphism,
    find_isomorphism,
    is_core,
    is_homomorphism_homogeneous,
    is_isomorphic,
    make_morphism,
    minimum_retracts,
    verify_morphism,
)

# Classes
from .classes import (
    CSP,
    KLF,
    AllFinite,
    ClassSpec,
    Colored,
    Explicit,
    ForbHom,
    age,
    check_property,
    enumerate_members,
    eppa_witness,
    free_amalgam,
    homo_amalgam,
    member,
    one_point_extensions,
    parse_class_spec,
    verify_pushout,
)

# Fraïssé approximants
from .fraisse import (
    GenericApproximant,
    build_generic,
    verify_extension_property,
    verify_homogeneity,
    verify_universality,
)

# Colored structures
from .colored import (
    ColoredStructure,
    WeakMorphism,
    build_universal_colored,
    check_caut_identity,
    check_saut_identity,
    color_automorphisms,
    count_colored_orbits,
    decode_S,
    encode_S,
    find_strong_embedding,
    find_strong_hom,
    generate_group,
    hat_expansion,
    is_retraction,
    make_colored,
    parse_colored,
    stabilizer_check,
    strong_automorphisms,
    tilde_expansion,
    verify_colored_homogeneity,
    verify_colored_universality,
    verify_w_homogeneity,
    weak_automorphisms,
)

# Oligomorphy
from .oligomorphy import (
    PointedStructure,
    check_woRN,
    count_orbits,
    count_pe_types,
    is_oligomorphic_report,
    is_weakly_oligomorphic_report,
    make_pointed,
    oligomorphy_profile,
    pe_type_leq,
)

# Exceptions
from .exceptions import (
    AmalgamationRefusedError,
    ArityMismatchError,
    BudgetExceededError,
    ClassSpecError,
    ColoringError,
    DecodeError,
    FMTBenchError,
    InputError,
    MorphismKindError,
    PartialMapError,
    SignatureMismatchError,
    StructureParseError,
    UnknownElementError,
    UnknownSymbolError,
)

try:
    from importlib.metadata import version as _v
    __version__: str = _v("fmtbench")
except Exception:
    __version__ = "0.1.0"

__all__ = [
    "SearchBudget",
    # Models
    "ClassProperty",
    "MorphismKind",
    "OrbitMode",
    "OutputFormat",
    # Structures
    "GRAPH_SIGNATURE",
    "Signature",
    "Structure",
    "Symbol",
    "canonical_key",
    "component_count",
    "disjoint_union",
    "empty_structure",
    "gaifman_graph",
    "induced_substructure",
    "is_connected",
    "is_link_structure",
    "is_packed",
    "is_tight",
    "parse_structure",
    "relabel",
    "serialize",
    "structure_from_dict",
    "to_dot",
    # Morphisms
    "Morphism",
    "automorphism_group",
    "compose",
    "core",
    "count_homomorphisms",
    "endomorphisms",
    "enumerate_embeddings",
    "enumerate_homomorphisms",
    "find_embedding",
    "find_homomorphism",
    "find_isomorphism",
    "is_core",
    "is_homomorphism_homogeneous",
    "is_isomorphic",
    "make_morphism",
    "minimum_retracts",
    "verify_morphism",
    # Classes
    "CSP",
    "KLF",
    "AllFinite",
    "ClassSpec",
    "Colored",
    "Explicit",
    "ForbHom",
    "age",
    "check_property",
    "enumerate_members",
    "eppa_witness",
    "free_amalgam",
    "homo_amalgam",
    "member",
    "one_point_extensions",
    "parse_class_spec",
    "verify_pushout",
    # Fraïssé
    "GenericApproximant",
    "build_generic",
    "verify_extension_property",
    "verify_homogeneity",
    "verify_universality",
    # Colored
    "ColoredStructure",
    "WeakMorphism",
    "build_universal_colored",
    "check_caut_identity",
    "check_saut_identity",
    "color_automorphisms",
    "count_colored_orbits",
    "decode_S",
    "encode_S",
    "find_strong_embedding",
    "find_strong_hom",
    "generate_group",
    "hat_expansion",
    "is_retraction",
    "make_colored",
    "parse_colored",
    "stabilizer_check",
    "strong_automorphisms",
    "tilde_expansion",
    "verify_colored_homogeneity",
    "verify_colored_universality",
    "verify_w_homogeneity",
    "weak_automorphisms",
    # Oligomorphy
    "PointedStructure",
    "check_woRN",
    "count_orbits",
    "count_pe_types",
    "is_oligomorphic_report",
    "is_weakly_oligomorphic_report",
    "make_pointed",
    "oligomorphy_profile",
    "pe_type_leq",
    # Exceptions
    "AmalgamationRefusedError",
    "ArityMismatchError",
    "BudgetExceededError",
    "ClassSpecError",
    "ColoringError",
    "DecodeError",
    "FMTBenchError",
    "InputError",
    "MorphismKindError",
    "PartialMapError",
    "SignatureMismatchError",
    "StructureParseError",
    "UnknownElementError",
    "UnknownSymbolError",
]
