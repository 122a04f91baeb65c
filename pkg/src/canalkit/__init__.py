"""Canal surfaces: construction, curvature (K, H, K_II), Weingarten tests and export."""

from .errors import (
    AllSingular,
    CanalError,
    DegenerateQ,
    DegenerateSecondForm,
    EmptyGrid,
    InvalidParams,
    NonPositiveRadius,
    NotASurface,
    NotUnitSpeed,
    RankDeficient,
    SingularPoint,
    SlopeExceedsOne,
    VanishingCurvature,
)
from .curve import (
    AnalyticJetCurve,
    Circle,
    CurveSpec,
    FrameJet,
    FramedCurve,
    Helix,
    Line,
    frenet_apparatus,
    make_curve,
    validate_unit_speed,
)
from .radius import (
    RadiusJet,
    RadiusSpec,
    RegularityVerdict,
    Status,
    TubeFunctions,
    radius_jet,
    regularity_check,
    tube_functions,
)
from .surface import (
    CanalSurface,
    FormCoefficients,
    area2_expanded,
    evaluate,
    first_form,
    forms,
    forms_oracle,
    normal,
    orientation_factor,
    partials,
    second_form,
)
from .curvature import (
    CurvatureTriple,
    KiiCoefficients,
    brioschi,
    brioschi_oracle,
    curvature_arrays,
    curvature_triple,
    gaussian,
    kii_coefficients,
    mean,
    second_gaussian,
)
from .weingarten import (
    ClassificationReport,
    Grid,
    PairVerdict,
    LinearFit,
    Pair,
    classify,
    default_grid,
    fit_linear,
    jacobi,
    leading_obstruction,
    linear_residual,
)
from .mesh import SurfaceMesh, export_csv, export_obj, tessellate

__version__ = "0.1.0"
