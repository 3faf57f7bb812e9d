use nalgebra::DMatrix;
use serde::Serialize;

use super::potential_file::{PotentialFile, SampleOrigin};
use super::{Bound, Verdict, TOOL, VERSION};
use crate::chart::PotentialChart;
use crate::constructions::{cone_curvature, example_catalog, ExpectedValues};
use crate::duality::{
    conjugate_connection, dual_flatness_check, legendre_euler_field, levi_civita_residual,
    musical_sharp_commutation, radiant_to_koszul, DualChart, DEFECT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{
    differential, flatness_test_2d, gaussian_curvature_2d, koszul_form, riemann_closed_form, PointGeometry,
    Signature, CLOSEDNESS_TOLERANCE, FLATNESS_TOLERANCE,
};
use crate::oracle::riemann_from_christoffel;

/// Relative tolerance for the internal consistency residuals of a report.
const CONSISTENCY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct ChartInfo {
    pub name: String,
    pub variables: Vec<String>,
    pub potential: String,
    pub domain: Vec<String>,
}

impl ChartInfo {
    fn of(file: &PotentialFile) -> Self {
        ChartInfo {
            name: file.name.clone(),
            variables: file.variables.clone(),
            potential: file.potential.clone(),
            domain: file.domain.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Curvature {
    pub scalar: f64,
    pub ricci: Vec<Vec<f64>>,
    pub max_abs_riemann: f64,
    /// Sectional curvature of each coordinate plane `(i, j)`, `i < j`.
    pub coordinate_planes: Vec<(usize, usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KoszulRecord {
    pub covector: Vec<f64>,
    pub log_abs_det: f64,
    pub closedness_residual: f64,
}

/// Residuals scaled by `max(1, max |R|)`.
#[derive(Debug, Clone, Serialize)]
pub struct PointResiduals {
    pub riemann_symmetry: f64,
    pub oracle: f64,
    pub koszul_closedness: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub origin: SampleOrigin,
    pub point: Vec<f64>,
    pub metric: Vec<Vec<f64>>,
    pub signature: Signature,
    pub determinant: f64,
    pub eigenvalues: Vec<f64>,
    pub amari_chentsov: Vec<Vec<Vec<f64>>>,
    pub curvature: Curvature,
    pub koszul: KoszulRecord,
    pub residuals: PointResiduals,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcludedPoint {
    pub index: usize,
    pub point: Vec<f64>,
    pub determinant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub chart: ChartInfo,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedValues>,
    pub points: Vec<PointRecord>,
    pub excluded: Vec<ExcludedPoint>,
    /// Consistency checks; any failure is a failed run.
    pub verdicts: Vec<Verdict>,
    /// Properties of the metric, reported either way.
    pub classification: Vec<Verdict>,
}

impl AnalyzeReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn point_record(chart: &PotentialChart, index: usize, origin: SampleOrigin, g: &PointGeometry) -> Result<PointRecord> {
    let p = &g.point;
    let n = g.dim();
    let r = riemann_closed_form(chart, p)?;
    let oracle = riemann_from_christoffel(chart, p)?;
    let scale = r.max_abs().max(1.0);
    let oracle_residual = max_of(r.components.iter().zip(oracle.components.iter()).map(|(a, b)| (a - b).abs()));
    let k = koszul_form(chart, p)?;
    let mut planes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut x = vec![0.0; n];
            let mut y = vec![0.0; n];
            x[i] = 1.0;
            y[j] = 1.0;
            planes.push((i, j, r.sectional(&g.metric.matrix, &x, &y)));
        }
    }
    let ac = &g.ac.lower;
    Ok(PointRecord {
        index,
        origin,
        point: p.clone(),
        metric: rows(&g.metric.matrix),
        signature: g.metric.signature,
        determinant: g.metric.determinant,
        eigenvalues: g.metric.eigenvalues.clone(),
        amari_chentsov: (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| ac[[i, j, l]]).collect()).collect())
            .collect(),
        curvature: Curvature {
            scalar: r.scalar,
            ricci: rows(&r.ricci),
            max_abs_riemann: r.max_abs(),
            coordinate_planes: planes,
            gaussian: if n == 2 { Some(gaussian_curvature_2d(chart, p)?) } else { None },
        },
        koszul: KoszulRecord {
            covector: k.covector.iter().copied().collect(),
            log_abs_det: k.log_abs_det,
            closedness_residual: k.closedness_residual,
        },
        residuals: PointResiduals {
            riemann_symmetry: r.symmetry_residual() / scale,
            oracle: oracle_residual / scale,
            koszul_closedness: k.closedness_residual / k.derivative.abs().max().max(1.0),
        },
    })
}

/// Metric, Amari-Chentsov tensor, curvature and Koszul form at every sample
/// of the file. Degenerate points are listed and skipped.
/// Every sample was excluded; an empty report would pass vacuously.
fn all_degenerate(chart: &PotentialChart, p: &[f64]) -> Error {
    Error::DegenerateMetric {
        point: p.to_vec(),
        det: chart.hessian(p).map_or(0.0, |h| h.determinant()),
    }
}

pub fn analyze(file: &PotentialFile, count: Option<usize>, seed: Option<u64>) -> Result<AnalyzeReport> {
    let chart = &file.chart;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for (index, (origin, p)) in file.samples(count, seed)?.into_iter().enumerate() {
        let metric = crate::geometry::hessian_metric(chart, &p)?;
        if metric.is_degenerate() {
            excluded.push(ExcludedPoint {
                index,
                point: p,
                determinant: metric.determinant,
            });
            continue;
        }
        let g = PointGeometry::at(chart, &p)?;
        points.push(point_record(chart, index, origin, &g)?);
    }
    if points.is_empty() {
        return Err(all_degenerate(chart, &excluded[0].point));
    }

    let tol = |t: f64| Bound::AtMost { tolerance: t };
    let mut verdicts = vec![
        Verdict::new(
            "riemann_symmetries",
            max_of(points.iter().map(|r| r.residuals.riemann_symmetry)),
            tol(CONSISTENCY_TOLERANCE),
        ),
        Verdict::new(
            "closed_form_matches_christoffel",
            max_of(points.iter().map(|r| r.residuals.oracle)),
            tol(CONSISTENCY_TOLERANCE),
        ),
        Verdict::new(
            "koszul_form_closed",
            max_of(points.iter().map(|r| r.residuals.koszul_closedness)),
            tol(CLOSEDNESS_TOLERANCE),
        ),
    ];
    let max_riemann = max_of(points.iter().map(|r| r.curvature.max_abs_riemann));
    let mut classification = vec![Verdict::new("flat", max_riemann, tol(FLATNESS_TOLERANCE))];
    if chart.dim() == 2 {
        classification.push(Verdict::new(
            "flat_gaussian",
            max_of(points.iter().filter_map(|r| r.curvature.gaussian.map(f64::abs))),
            tol(FLATNESS_TOLERANCE),
        ));
    }
    if let Some(first) = points.first() {
        let s0 = first.curvature.scalar;
        classification.push(Verdict::new(
            "constant_scalar_curvature",
            max_of(points.iter().map(|r| (r.curvature.scalar - s0).abs())),
            tol(CONSISTENCY_TOLERANCE),
        ));
        let changes = points.iter().filter(|r| r.signature != first.signature).count();
        classification.push(Verdict::new(
            "constant_signature",
            changes as f64,
            Bound::AtMost { tolerance: 0.0 },
        ));
    }

    let expected = example_catalog(&file.name)
        .ok()
        .filter(|e| e.chart.dim() == chart.dim())
        .map(|e| e.expected);
    if let Some(exp) = &expected {
        expectation_verdicts(chart, exp, &points, &mut verdicts)?;
    }

    Ok(AnalyzeReport {
        tool: TOOL,
        version: VERSION,
        chart: ChartInfo::of(file),
        seed: seed.unwrap_or(file.seed),
        expected,
        points,
        excluded,
        verdicts,
        classification,
    })
}

/// Compares samples with the catalog entry of the same name.
fn expectation_verdicts(
    chart: &PotentialChart,
    exp: &ExpectedValues,
    points: &[PointRecord],
    out: &mut Vec<Verdict>,
) -> Result<()> {
    let tol = Bound::AtMost {
        tolerance: CONSISTENCY_TOLERANCE,
    };
    if let Some(sig) = exp.signature {
        let bad = points.iter().filter(|r| r.signature != sig).count();
        out.push(Verdict::new("expected_signature", bad as f64, Bound::AtMost { tolerance: 0.0 }));
    }
    if let Some(s) = exp.scalar_curvature {
        let dev = max_of(points.iter().map(|r| (r.curvature.scalar - s).abs()));
        out.push(Verdict::new("expected_scalar_curvature", dev, tol));
    }
    if let Some(k) = exp.sectional_curvature {
        let dev = max_of(
            points
                .iter()
                .flat_map(|r| r.curvature.coordinate_planes.iter().map(move |&(_, _, c)| (c - k).abs())),
        );
        out.push(Verdict::new("expected_sectional_curvature", dev, tol));
    }
    if let Some(k) = exp.reported_scalar_curvature {
        let mut dev: f64 = 0.0;
        for r in points {
            dev = dev.max((cone_curvature(chart, &r.point)?.hyperbolic_block - k).abs());
        }
        out.push(Verdict::new("hyperbolic_block_sectional", dev, tol));
    }
    if let Some(c) = exp.koszul_multiple {
        let df = differential(chart)?;
        let mut dev: f64 = 0.0;
        for r in points {
            for (kc, d) in r.koszul.covector.iter().zip(&df) {
                dev = dev.max((kc - c * d.eval(&r.point)?).abs());
            }
        }
        out.push(Verdict::new("koszul_multiple_of_df", dev, tol));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessSample {
    pub index: usize,
    pub point: Vec<f64>,
    pub curvature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub chart: ChartInfo,
    /// `gaussian` in two dimensions, `max_abs_riemann` otherwise.
    pub measure: &'static str,
    pub flat: bool,
    pub max_abs_curvature: f64,
    pub tolerance: f64,
    pub samples: Vec<FlatnessSample>,
    pub excluded: Vec<Vec<f64>>,
}

pub fn flatness_report(file: &PotentialFile, count: Option<usize>, seed: Option<u64>) -> Result<FlatnessReport> {
    let chart = &file.chart;
    let pts: Vec<Vec<f64>> = file.samples(count, seed)?.into_iter().map(|(_, p)| p).collect();
    let (measure, samples, excluded) = if chart.dim() == 2 {
        let v = flatness_test_2d(chart, &pts)?;
        let samples = v.curvatures.into_iter().map(|(p, k)| (p, k)).collect::<Vec<_>>();
        ("gaussian", samples, v.excluded)
    } else {
        let mut samples = Vec::new();
        let mut excluded = Vec::new();
        for p in pts {
            if crate::geometry::hessian_metric(chart, &p)?.is_degenerate() {
                excluded.push(p);
            } else {
                let m = riemann_closed_form(chart, &p)?.max_abs();
                samples.push((p, m));
            }
        }
        ("max_abs_riemann", samples, excluded)
    };
    if samples.is_empty() {
        return Err(all_degenerate(chart, &excluded[0]));
    }
    let max_abs_curvature = max_of(samples.iter().map(|(_, k)| k.abs()));
    Ok(FlatnessReport {
        tool: TOOL,
        version: VERSION,
        chart: ChartInfo::of(file),
        measure,
        flat: max_abs_curvature < FLATNESS_TOLERANCE,
        max_abs_curvature,
        tolerance: FLATNESS_TOLERANCE,
        samples: samples
            .into_iter()
            .enumerate()
            .map(|(index, (point, curvature))| FlatnessSample {
                index,
                point,
                curvature,
            })
            .collect(),
        excluded,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DualPoint {
    pub index: usize,
    pub point: Vec<f64>,
    /// `p_i = ∂f/∂x^i`.
    pub dual_coordinates: Vec<f64>,
    /// `(df)♯`, an Euler field of the dual connection.
    pub euler_field: Vec<f64>,
    pub euler_defect: f64,
    pub product_rule_residual: f64,
    pub levi_civita_residual: f64,
    /// `∇*(x♭) - h` for the position field `x`.
    pub radiant_defect: f64,
    pub musical_sharp_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub chart: ChartInfo,
    pub points: Vec<DualPoint>,
    pub dual_curvature: f64,
    pub excluded: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
}

impl DualReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Legendre duality at every nondegenerate sample of the file.
pub fn dual_report(file: &PotentialFile, count: Option<usize>, seed: Option<u64>) -> Result<DualReport> {
    let chart = &file.chart;
    let dual = DualChart::new(chart)?;
    let position: Vec<Expr> = chart
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| Expr::var(i, n.as_str()))
        .collect();
    let df = differential(chart)?;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    let mut kept = Vec::new();
    for (index, (_, p)) in file.samples(count, seed)?.into_iter().enumerate() {
        if crate::geometry::hessian_metric(chart, &p)?.is_degenerate() {
            excluded.push(p);
            continue;
        }
        let euler = legendre_euler_field(chart, &p)?;
        points.push(DualPoint {
            index,
            dual_coordinates: dual.eval(&p)?.iter().copied().collect(),
            euler_field: euler.field.iter().copied().collect(),
            euler_defect: euler.defect_norm(),
            product_rule_residual: conjugate_connection(chart, &p)?.product_rule_residual,
            levi_civita_residual: levi_civita_residual(chart, &p)?,
            radiant_defect: radiant_to_koszul(chart, &position, &p)?.defect,
            musical_sharp_residual: musical_sharp_commutation(chart, &df, &p)?,
            point: p.clone(),
        });
        kept.push(p);
    }
    if kept.is_empty() {
        return Err(all_degenerate(chart, &excluded[0]));
    }
    let dual_curvature = dual_flatness_check(chart, &kept)?.max_abs_curvature;
    let tol = |t: f64| Bound::AtMost { tolerance: t };
    let verdicts = vec![
        Verdict::new("dual_connection_flat", dual_curvature, tol(FLATNESS_TOLERANCE)),
        Verdict::new(
            "product_rule",
            max_of(points.iter().map(|d| d.product_rule_residual)),
            tol(1e-9),
        ),
        Verdict::new(
            "levi_civita_is_mean",
            max_of(points.iter().map(|d| d.levi_civita_residual)),
            tol(1e-10),
        ),
        Verdict::new(
            "legendre_euler_field",
            max_of(points.iter().map(|d| d.euler_defect)),
            tol(DEFECT_TOLERANCE),
        ),
        Verdict::new(
            "radiant_koszul",
            max_of(points.iter().map(|d| d.radiant_defect)),
            tol(DEFECT_TOLERANCE),
        ),
        Verdict::new(
            "musical_sharp",
            max_of(points.iter().map(|d| d.musical_sharp_residual)),
            tol(DEFECT_TOLERANCE),
        ),
    ];
    Ok(DualReport {
        tool: TOOL,
        version: VERSION,
        chart: ChartInfo::of(file),
        points,
        dual_curvature,
        excluded,
        verdicts,
    })
}
