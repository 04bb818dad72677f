from ._core import (
    FormatError,
    IntersectionRecord,
    Mesh,
    PipelineConfig,
    SamplingError,
    SimplicialComplex,
    SmoothMap,
    TransversalityReport,
    beta,
    grid_triangulation,
    make_transverse,
    read_mesh_file,
    rho,
    rho_l,
    run_scenario,
    subdivision_top_count,
    transversality_margin,
    verify,
    warp,
)

__all__ = [name for name in dir() if not name.startswith("_")]
