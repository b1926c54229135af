"""Translation quivers, their mesh categories and truncated coverings."""
from meshkit.covering import (
    CoveringBall,
    ball_isomorphic,
    ball_morphism,
    build_covering_ball,
    check_covering,
    collapse_ball,
    lift_path,
    walks_homotopic,
)
from meshkit.criteria import (
    depth_certificate,
    find_shortcut_targets,
    n2_mesh_analysis,
    radical_verdict,
    theoremB_fiber_sum,
)
from meshkit.errors import (
    MeshkitError,
    OracleTooLarge,
    OutOfWindowError,
    ParseError,
    PreconditionError,
    QuiverError,
)
from meshkit.generators import TreeSpec, gen_kronecker, gen_triangle_An, gen_tube, gen_ztree
from meshkit.mesh import class_of_path, compose_classes, graded_dims, hom_space, relation_generators
from meshkit.quiver import (
    Path,
    TranslationQuiver,
    Walk,
    collapse,
    enumerate_paths,
    is_sectional,
    mesh_at,
    validate,
)
from meshkit.textio import emit_covering, emit_quiver, parse_covering, parse_quiver

__version__ = "0.1.0"
