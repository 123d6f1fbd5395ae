use std::sync::Arc;

use jetcurv_core::applications::{free_connection, lemniscate, random_connection, standard_context};
use jetcurv_core::connection::{Connection, Slice, SplitFrame};
use jetcurv_core::curvature::*;
use jetcurv_core::oracle::{check_equal_vvf, check_zero_vvf};
use symcore::{Expr, ZeroTester};

fn basis(n: usize, a: usize) -> Vec<Expr> {
    (0..n)
        .map(|i| if i == a { Expr::one() } else { Expr::zero() })
        .collect()
}

fn frame(c: &Connection, phi: Vec<Expr>, v: Vec<Expr>) -> SplitFrame {
    let t = ZeroTester::default();
    let s = Slice::new(c.ctx(), phi, v, &t).unwrap();
    SplitFrame::build(c, &s, &t).unwrap()
}

fn assert_const(t: &ZeroTester, e: &Expr, value: i64, label: &str) {
    let gap = e - Expr::int(value);
    assert!(t.check(&gap).unwrap().is_zero, "{label}: {e} != {value}");
}

#[test]
fn lemniscate_jacobi_values() {
    let t = ZeroTester::default();
    let c = lemniscate();
    let expected = [(0, [[1, 0], [0, 0]]), (1, [[0, 0], [0, 4]])];
    for (a, table) in expected {
        let f = frame(&c, basis(2, a), basis(2, a));
        let report = CurvatureReport::compute_checked(&f, &t).unwrap();
        assert!(check_zero_vvf(c.ctx(), "R_Gamma", &t, &report.r_gamma).passed);
        for (i, row) in table.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                assert_const(
                    &t,
                    report.phi_components.get(0, i, 0, j),
                    value,
                    &format!("slice {a} Phi[{i}][{j}]"),
                );
            }
        }
    }
}

#[test]
fn standalone_operators_agree_with_report() {
    let t = ZeroTester::default();
    let ctx = Arc::new(standard_context(2, 2));
    let c = random_connection(ctx.clone(), 21, 2);
    let f = frame(&c, basis(2, 0), vec![Expr::one(), ctx.parse("x2").unwrap()]);
    let report = CurvatureReport::compute_checked(&f, &t).unwrap();
    let (phi, comps) = jacobi_curvature(&f, &t).unwrap();
    assert!(check_equal_vvf(&ctx, "Phi", &t, &phi, &report.phi).passed);
    assert_eq!(comps, report.phi_components);
    assert!(check_equal_vvf(&ctx, "R_Gamma", &t, &r_gamma(&f).unwrap(), &report.r_gamma).passed);
    assert!(check_equal_vvf(&ctx, "R_H", &t, &r_h(&f, &t).unwrap(), &report.r_h).passed);
    assert!(check_equal_vvf(&ctx, "r_plus", &t, &r_plus_vertical(&f, &t).unwrap(), &report.r_plus).passed);
}

#[test]
fn refined_operators_sum_to_the_whole() {
    let t = ZeroTester::default();
    let ctx = Arc::new(standard_context(2, 1));
    let c = random_connection(ctx.clone(), 5, 3);
    let f = frame(&c, vec![Expr::one(), Expr::int(1)], vec![Expr::one(), Expr::zero()]);
    let r = CurvatureReport::compute_checked(&f, &t).unwrap();
    assert!(check_equal_vvf(&ctx, "Phi", &t, &r.phi_tilde.add(&r.phi_plus), &r.phi).passed);
    assert!(check_equal_vvf(&ctx, "R_Gamma", &t, &r.r_gamma_tilde.add(&r.r_gamma_plus), &r.r_gamma).passed);
    assert!(check_equal_vvf(&ctx, "R_H", &t, &r.r_h_tilde.add(&r.r_h_plus), &r.r_h).passed);
}

#[test]
fn structure_identities_on_random_systems() {
    let t = ZeroTester::default();
    for (n, m, seed) in [(2, 1, 1u64), (2, 2, 2), (3, 1, 3)] {
        let ctx = Arc::new(standard_context(n, m));
        let c = random_connection(ctx.clone(), seed, 2);
        let f = frame(&c, basis(n, 0), basis(n, 0));
        let report = CurvatureReport::compute_checked(&f, &t).unwrap();
        assert!(check_vertical_structure_equation(&f, &report, &t).passed, "n={n} m={m}");
        assert!(check_plus_structure_equation(&f, &report, &t).passed, "n={n} m={m}");
        for check in check_bracket_table(&f, &report, &t).unwrap() {
            assert!(check.passed, "n={n} m={m} {} {:?}", check.name, check.failures);
        }
    }
}

#[test]
fn free_system_is_flat() {
    let t = ZeroTester::default();
    let c = free_connection(2, 2);
    let f = frame(&c, basis(2, 1), basis(2, 1));
    let r = CurvatureReport::compute_checked(&f, &t).unwrap();
    for (name, op) in [
        ("R_Gamma", &r.r_gamma),
        ("R_H", &r.r_h),
        ("Phi", &r.phi),
        ("r_plus", &r.r_plus),
    ] {
        assert!(op.is_zero() || check_zero_vvf(c.ctx(), name, &t, op).passed, "{name}");
    }
}

#[test]
fn curvature_detects_nonintegrability() {
    // y_11 = 0, y_12 = 0, y_22 = x1 has no solutions: d/dx1 of y_22 disagrees with d/dx2 of y_12
    let t = ZeroTester::default();
    let ctx = Arc::new(standard_context(2, 1));
    let p = ctx.parse("x1").unwrap();
    let c = Connection::new(
        ctx.clone(),
        |_, i, j| if i == 1 && j == 1 { p.clone() } else { Expr::zero() },
    );
    let f = frame(&c, basis(2, 0), basis(2, 0));
    let r = CurvatureReport::compute_checked(&f, &t).unwrap();
    assert!(!check_zero_vvf(&ctx, "R_Gamma", &t, &r.r_gamma).passed);
    assert!(check_vertical_structure_equation(&f, &r, &t).passed);
}

#[test]
fn bracket_table_is_consistent() {
    let t = ZeroTester::default();
    let c = lemniscate();
    let f = frame(&c, basis(2, 1), vec![Expr::one(), Expr::one()]);
    let b = BracketTable::compute(&f).unwrap();
    let sum = b.gamma_v_tilde.add(&b.gamma_v_plus);
    assert!(check_equal_vvf(c.ctx(), "[[Gamma,v]] split", &t, &sum, &b.gamma_v).passed);
}
