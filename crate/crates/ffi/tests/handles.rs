use std::ffi::{CStr, CString};
use std::ptr;

use hessian_ffi::*;

fn last_error() -> String {
    let p = hessian_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { hessian_string_free(p) };
    s
}

fn chart(names: &[&str], potential: &str, domain: &[&str]) -> (HessianStatus, *mut HessianChart) {
    let names: Vec<CString> = names.iter().map(|s| CString::new(*s).unwrap()).collect();
    let domain: Vec<CString> = domain.iter().map(|s| CString::new(*s).unwrap()).collect();
    let np: Vec<_> = names.iter().map(|s| s.as_ptr()).collect();
    let dp: Vec<_> = domain.iter().map(|s| s.as_ptr()).collect();
    let f = CString::new(potential).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { hessian_chart_new(np.as_ptr(), np.len(), f.as_ptr(), dp.as_ptr(), dp.len(), &mut out) };
    (st, out)
}

#[test]
fn hyperbolic_plane_through_the_c_interface() {
    let (st, c) = chart(&["x", "y"], "x^2/(8*y) - 0.25*log(y)", &["y"]);
    assert_eq!(st, HessianStatus::Ok);
    unsafe {
        assert_eq!(hessian_chart_dim(c), 2);
        let p = [0.3, 1.7];
        let mut h = [0.0; 4];
        assert_eq!(hessian_chart_metric(c, p.as_ptr(), 2, h.as_mut_ptr(), 4), HessianStatus::Ok);
        assert!((h[1] - h[2]).abs() < 1e-15);
        let mut s = 0.0;
        assert_eq!(hessian_chart_scalar_curvature(c, p.as_ptr(), 2, &mut s), HessianStatus::Ok);
        // Upper half-plane metric (dx² + dy²)/(4y²): K = -1, R = -2.
        assert!((s + 2.0).abs() < 1e-10, "{s}");
        let (mut pos, mut neg) = (0, 0);
        assert_eq!(hessian_chart_signature(c, p.as_ptr(), 2, &mut pos, &mut neg), HessianStatus::Ok);
        assert_eq!((pos, neg), (2, 0));
        let mut a = [0.0; 8];
        assert_eq!(hessian_chart_amari_chentsov(c, p.as_ptr(), 2, a.as_mut_ptr(), 8), HessianStatus::Ok);
        // Slot [1][1][1] is last: f_yyy = -3x²/(4y⁴) - 1/(2y³).
        let (x, y): (f64, f64) = (0.3, 1.7);
        assert!((a[7] - (-0.75 * x * x / y.powi(4) - 0.5 / y.powi(3))).abs() < 1e-12, "{}", a[7]);
        hessian_chart_free(c);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let (st, c) = chart(&["x"], "log(x", &["x"]);
    assert_eq!(st, HessianStatus::InvalidInput);
    assert!(c.is_null());
    assert!(!last_error().is_empty());

    let (st, c) = chart(&["x"], "-log(x)", &["x"]);
    assert_eq!(st, HessianStatus::Ok);
    unsafe {
        let mut out = [0.0; 1];
        let bad = [-1.0];
        assert_eq!(hessian_chart_metric(c, bad.as_ptr(), 1, out.as_mut_ptr(), 1), HessianStatus::Numerical);
        assert!(last_error().contains("outside"));
        let good = [2.0];
        assert_eq!(hessian_chart_metric(c, good.as_ptr(), 2, out.as_mut_ptr(), 1), HessianStatus::InvalidInput);
        assert_eq!(hessian_chart_metric(c, good.as_ptr(), 1, out.as_mut_ptr(), 0), HessianStatus::BufferTooSmall);
        assert_eq!(hessian_chart_metric(c, good.as_ptr(), 1, ptr::null_mut(), 1), HessianStatus::NullPointer);
        let mut k = [0.0];
        assert_eq!(hessian_chart_koszul_form(c, good.as_ptr(), 1, k.as_mut_ptr(), 1), HessianStatus::Ok);
        // det h = 1/x^2, so kappa = -1/x.
        assert!((k[0] + 0.5).abs() < 1e-14);
        hessian_chart_free(c);
        hessian_chart_free(ptr::null_mut());
        assert_eq!(hessian_chart_dim(ptr::null()), 0);
    }
}

#[test]
fn cheng_yau_solution_handle() {
    let mut sol = ptr::null_mut();
    unsafe {
        let st = hessian_cheng_yau_solve(HessianCone::Orthant, 0.5, 1.5, 0.5, 1.5, 17, &mut sol);
        assert_eq!(st, HessianStatus::Ok);
        let n = hessian_solution_grid_size(sol);
        assert_eq!(n, 19);
        let mut v = vec![0.0; n * n];
        assert_eq!(hessian_solution_values(sol, v.as_mut_ptr(), v.len()), HessianStatus::Ok);
        // Corner (0.5, 0.5): u = -log(0.5) - log(2)/2.
        assert!((v[0] - (-(0.5f64.ln()) - 0.5 * 2f64.ln())).abs() < 1e-14);
        let (mut r, mut e) = (0.0, 0.0);
        assert_eq!(hessian_solution_errors(sol, &mut r, &mut e), HessianStatus::Ok);
        assert!(r < 1e-10 && e < 1e-3, "{r} {e}");
        hessian_solution_free(sol);

        let st = hessian_cheng_yau_solve(HessianCone::Lorentz, -0.5, 0.5, 1.0, 2.0, 3, &mut sol);
        assert_eq!(st, HessianStatus::InvalidInput);
        assert!(sol.is_null());
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(hessian_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
