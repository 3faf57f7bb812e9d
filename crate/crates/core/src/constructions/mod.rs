//! New Hessian charts from old ones, the example catalog and line
//! integrals of 1-forms along paths.

mod catalog;
mod lorentz;
mod quadrature;
mod warped;

pub use catalog::{
    example_catalog, harmonic, hyperbolic_n, lorentz_cone_3d, maschke_sextic_on, orthant, polar_flat,
    CatalogEntry, ExpectedValues, CATALOG_NAMES, MASCHKE_SEXTIC,
};
pub use lorentz::{
    cone_chart, cone_curvature, deck_path, isometry_check, loop_period, lorentz_isometry_check, phi,
    phi_expressions, ConeCurvature, IsometryReport, IsometrySample, LoopPath, CONE_POTENTIAL,
    PATH_PARAMETER,
};
pub use quadrature::{adaptive_simpson, integrate, QUADRATURE_MAX_DEPTH, QUADRATURE_TOLERANCE};
pub use warped::{
    truncated_integral, warped_metric_check, warped_potential_value, IntegralStatus,
    TruncatedIntegral, WarpedMetricCheck, WarpedPotentialValue, WarpedSpec, DIVERGENCE_RATIO,
    WARP_VARIABLE,
};
