use serde::Serialize;

use super::lorentz::cone_chart;
use crate::chart::PotentialChart;
use crate::error::{Error, Result};
use crate::geometry::Signature;
use crate::sampling::SampleBox;

/// Values the literature asserts for a catalog chart. `None` means no claim.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExpectedValues {
    pub signature: Option<Signature>,
    /// Constant sectional curvature (in 2D the Gaussian curvature).
    pub sectional_curvature: Option<f64>,
    /// Scalar curvature under `S = h^{jl} Ric_jl`.
    pub scalar_curvature: Option<f64>,
    /// The cone example's published "scalar curvature", which equals the
    /// sectional curvature of its hyperbolic factor.
    pub reported_scalar_curvature: Option<f64>,
    pub flat: Option<bool>,
    /// `κ = c·df` for this `c`.
    pub koszul_multiple: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub chart: PotentialChart,
    pub expected: ExpectedValues,
    /// Suggested sampling region.
    pub sample_box: SampleBox,
}

pub const CATALOG_NAMES: [&str; 7] = [
    "hyperbolic2",
    "hyperbolic_n(n)",
    "lorentz_cone_3d",
    "polar_flat",
    "harmonic(expr)",
    "maschke_sextic",
    "orthant(n)",
];

fn riemannian(n: usize) -> Option<Signature> {
    Some(Signature {
        positive: n,
        negative: 0,
    })
}

/// `(y_1² + … + y_{n-1}²)/(8 y_n) - ¼ log y_n`, the upper half-space metric.
pub fn hyperbolic_n(n: usize) -> Result<CatalogEntry> {
    if n < 2 {
        return Err(Error::InvalidArgument("hyperbolic_n needs n >= 2".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let last = &names[n - 1];
    let squares: Vec<String> = names[..n - 1].iter().map(|v| format!("{v}^2")).collect();
    let src = format!("({})/(8*{last}) - 0.25*log({last})", squares.join(" + "));
    let chart = PotentialChart::parse(&refs, &src, &[last.as_str()])?;
    let mut lo = vec![-1.0; n];
    let mut hi = vec![1.0; n];
    lo[n - 1] = 0.2;
    hi[n - 1] = 2.0;
    let nf = n as f64;
    Ok(CatalogEntry {
        name: if n == 2 { "hyperbolic2".into() } else { format!("hyperbolic_n({n})") },
        chart,
        expected: ExpectedValues {
            signature: riemannian(n),
            sectional_curvature: Some(-1.0),
            scalar_curvature: Some(-nf * (nf - 1.0)),
            ..Default::default()
        },
        sample_box: SampleBox::new(lo, hi)?,
    })
}

pub fn orthant(n: usize) -> Result<CatalogEntry> {
    if n < 1 {
        return Err(Error::InvalidArgument("orthant needs n >= 1".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let src = names.iter().map(|v| format!("-log({v})")).collect::<Vec<_>>().join(" ");
    let chart = PotentialChart::parse(&refs, &src, &refs)?;
    Ok(CatalogEntry {
        name: format!("orthant({n})"),
        chart,
        expected: ExpectedValues {
            signature: riemannian(n),
            sectional_curvature: Some(0.0),
            scalar_curvature: Some(0.0),
            flat: Some(true),
            koszul_multiple: Some(1.0),
            ..Default::default()
        },
        sample_box: SampleBox::cube(n, 0.2, 3.0),
    })
}

pub fn lorentz_cone_3d() -> CatalogEntry {
    CatalogEntry {
        name: "lorentz_cone_3d".into(),
        chart: cone_chart(),
        expected: ExpectedValues {
            signature: riemannian(3),
            sectional_curvature: None,
            scalar_curvature: Some(-2.0),
            reported_scalar_curvature: Some(-1.0),
            koszul_multiple: Some(3.0),
            ..Default::default()
        },
        sample_box: SampleBox::new(vec![-1.0, -1.0, 1.5], vec![1.0, 1.0, 3.0]).expect("static box"),
    }
}

pub fn polar_flat() -> CatalogEntry {
    CatalogEntry {
        name: "polar_flat".into(),
        chart: PotentialChart::parse(&["x", "y"], "x^2/(2*y) + 0.25*log(y)*y", &["y"])
            .expect("static chart"),
        expected: ExpectedValues {
            signature: riemannian(2),
            sectional_curvature: Some(0.0),
            flat: Some(true),
            ..Default::default()
        },
        sample_box: SampleBox::new(vec![-2.0, 0.2], vec![2.0, 3.0]).expect("static box"),
    }
}

/// A harmonic function of `(x, y)`; its Hessian metric is Lorentzian and flat.
pub fn harmonic(source: &str) -> Result<CatalogEntry> {
    let chart = PotentialChart::parse(&["x", "y"], source, &[])?;
    Ok(CatalogEntry {
        name: format!("harmonic({source})"),
        chart,
        expected: ExpectedValues {
            signature: Some(Signature {
                positive: 1,
                negative: 1,
            }),
            sectional_curvature: Some(0.0),
            flat: Some(true),
            ..Default::default()
        },
        sample_box: SampleBox::cube(2, -2.0, 2.0),
    })
}

pub const MASCHKE_SEXTIC: &str = "x^6 + y^6 + z^6 - 10*(x^3*y^3 + y^3*z^3 + z^3*x^3)";

/// The Maschke sextic sampled on the given box; degenerate points are
/// rejected by the samplers, not by the chart.
pub fn maschke_sextic_on(sample_box: SampleBox) -> Result<CatalogEntry> {
    if sample_box.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: sample_box.dim(),
        });
    }
    Ok(CatalogEntry {
        name: "maschke_sextic".into(),
        chart: PotentialChart::parse(&["x", "y", "z"], MASCHKE_SEXTIC, &[])?,
        expected: ExpectedValues {
            flat: Some(true),
            ..Default::default()
        },
        sample_box,
    })
}

/// Looks up a catalog chart by name, e.g. `hyperbolic2`, `orthant(3)`,
/// `harmonic(x^3 - 3*x*y^2)`.
pub fn example_catalog(name: &str) -> Result<CatalogEntry> {
    let name = name.trim();
    let arg = |prefix: &str| -> Option<&str> {
        name.strip_prefix(prefix)?
            .trim_start()
            .strip_prefix('(')?
            .strip_suffix(')')
            .map(str::trim)
    };
    let int_arg = |prefix: &str| -> Option<Result<usize>> {
        arg(prefix).map(|a| {
            a.parse::<usize>()
                .map_err(|_| Error::UnknownExample(format!("{name}: `{a}` is not a dimension")))
        })
    };
    match name {
        "hyperbolic2" => return hyperbolic_n(2),
        "lorentz_cone_3d" => return Ok(lorentz_cone_3d()),
        "polar_flat" => return Ok(polar_flat()),
        "maschke_sextic" => return maschke_sextic_on(SampleBox::cube(3, 0.1, 1.0)),
        _ => {}
    }
    if let Some(n) = int_arg("hyperbolic_n") {
        return hyperbolic_n(n?);
    }
    if let Some(n) = int_arg("orthant") {
        return orthant(n?);
    }
    if let Some(src) = arg("harmonic") {
        return harmonic(src);
    }
    Err(Error::UnknownExample(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gaussian_curvature_2d, hessian_metric};

    #[test]
    fn lookups() {
        for name in ["hyperbolic2", "hyperbolic_n(3)", "lorentz_cone_3d", "polar_flat", "maschke_sextic", "orthant(2)"] {
            assert!(example_catalog(name).is_ok(), "{name}");
        }
        assert_eq!(example_catalog("harmonic(x^3 - 3*x*y^2)").unwrap().chart.dim(), 2);
        assert!(matches!(example_catalog("torus"), Err(Error::UnknownExample(_))));
        assert!(example_catalog("orthant(k)").is_err());
        assert!(example_catalog("hyperbolic_n(1)").is_err());
    }

    #[test]
    fn hyperbolic2_matches_literal_potential() {
        let e = example_catalog("hyperbolic2").unwrap();
        let lit = PotentialChart::parse(&["y1", "y2"], "y1^2/(8*y2) - 0.25*log(y2)", &["y2"]).unwrap();
        let p = [0.4, 1.3];
        assert_eq!(e.chart.value(&p).unwrap(), lit.value(&p).unwrap());
        assert!((gaussian_curvature_2d(&e.chart, &p).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_signature() {
        let e = example_catalog("harmonic(x^3 - 3*x*y^2)").unwrap();
        let m = hessian_metric(&e.chart, &[1.0, 0.3]).unwrap();
        assert_eq!(Some(m.signature), e.expected.signature);
    }
}
