//! The separable quartic as a non-flat control. It cannot pass: the
//! Hessian `diag(12x², 12y²)` is a product of one-dimensional metrics.

use hessian_core::geometry::flatness_test_2d;
use hessian_core::sampling::{rng, sample_points, SampleBox};
use hessian_core::PotentialChart;

fn verdict(potential: &str) -> bool {
    let chart = PotentialChart::parse(&["x", "y"], potential, &[]).unwrap();
    let pts = sample_points(&chart, &SampleBox::cube(2, 0.2, 1.5), 20, 1e-6, &mut rng(42)).unwrap();
    flatness_test_2d(&chart, &pts).unwrap().flat
}

#[test]
#[ignore = "x^4 + y^4 is flat; kept to document the control that cannot work"]
fn separable_quartic_reports_non_flat() {
    assert!(!verdict("x^4 + y^4"));
}

#[test]
fn coupled_quartic_reports_non_flat() {
    assert!(!verdict("x^4 + y^4 + x*y"));
}

#[test]
fn separable_quartic_is_in_fact_flat() {
    assert!(verdict("x^4 + y^4"));
}
