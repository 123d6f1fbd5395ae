use std::sync::Arc;

use jetcurv_core::applications::{free_connection, lemniscate, random_connection, standard_context};
use jetcurv_core::connection::*;
use jetcurv_core::jetcalc::{interior_vvf, vvf_compose, VectorField};
use jetcurv_core::oracle::{assemble, check_zero_field, check_zero_vvf, rank, JetPoint, MATRIX_TOLERANCE};
use jetcurv_core::secondorder::probe_points;
use symcore::{Expr, ZeroTester};

fn basis(n: usize, a: usize) -> Vec<Expr> {
    (0..n)
        .map(|i| if i == a { Expr::one() } else { Expr::zero() })
        .collect()
}

#[test]
fn free_ode_gamma_is_the_total_derivative() {
    let c = free_connection(1, 1);
    let ctx = c.ctx();
    let g = &c.gamma_fields()[0];
    let mut expected = VectorField::basis(ctx.dim(), ctx.x_idx(0));
    expected.set(ctx.y_idx(0), ctx.dy(0, 0));
    assert_eq!(g, &expected);
}

#[test]
fn slices_are_validated_and_normalized() {
    let c = lemniscate();
    let ctx = c.ctx();
    let t = ZeroTester::default();
    let p = |s: &str| ctx.parse(s).unwrap();

    let s = Slice::new(ctx, vec![Expr::one(), Expr::zero()], vec![Expr::int(2), p("t")], &t).unwrap();
    assert!(s.is_normalized());
    assert_eq!(s.pairing().simplify(), Expr::one());
    assert_eq!(s.adapted_index(), Some(0));

    let err = Slice::new(ctx, vec![p("th"), Expr::zero()], vec![Expr::one(), Expr::zero()], &t);
    assert!(matches!(err, Err(ConnectionError::NotClosed { i: 1, j: 2 })));
    let err = Slice::new(
        ctx,
        vec![Expr::one(), Expr::zero()],
        vec![Expr::zero(), Expr::one()],
        &t,
    );
    assert!(matches!(err, Err(ConnectionError::Degenerate)));
    let err = Slice::new(ctx, vec![p("r"), Expr::zero()], vec![Expr::one(), Expr::zero()], &t);
    assert!(matches!(
        err,
        Err(ConnectionError::NotBaseFunction { what: "phi", index: 1 })
    ));
    let err = Slice::new(
        ctx,
        vec![Expr::zero(), Expr::zero()],
        vec![Expr::one(), Expr::zero()],
        &t,
    );
    assert!(matches!(err, Err(ConnectionError::ZeroPhi)));

    let raw = Slice::unnormalized(
        ctx,
        vec![Expr::one(), Expr::zero()],
        vec![Expr::int(3), Expr::zero()],
        &t,
    )
    .unwrap();
    let point = JetPoint::from_names(
        ctx,
        &[("t", 0.3), ("th", 0.2), ("r", 1.1), ("r_t", 0.4), ("r_th", -0.7)],
    )
    .unwrap();
    assert!(matches!(
        verify_eigensplitting(&c, &raw, &point, MATRIX_TOLERANCE),
        Err(ConnectionError::NotNormalized)
    ));
}

#[test]
fn s1_is_nilpotent_and_kills_gamma_v() {
    let ctx = Arc::new(standard_context(2, 2));
    let c = random_connection(ctx.clone(), 11, 2);
    let t = ZeroTester::default();
    let p = |s: &str| ctx.parse(s).unwrap();
    let s = Slice::new(&ctx, vec![p("x2"), p("x1")], vec![Expr::one(), Expr::one()], &t).unwrap();
    let s1 = s1_phi(&c, &s);
    assert!(check_zero_vvf(&ctx, "S1^2", &t, &vvf_compose(&ctx, &s1, &s1).unwrap()).passed);
    let gv = c.gamma_along(s.v());
    assert!(check_zero_vvf(&ctx, "i S1", &t, &interior_vvf(&ctx, &gv, &s1).unwrap()).passed);
}

#[test]
fn lemniscate_horizontal_coefficients() {
    let c = lemniscate();
    let ctx = c.ctx();
    let t = ZeroTester::default();
    let s = Slice::new(ctx, basis(2, 0), basis(2, 0), &t).unwrap();
    let h = horizontal_coefficients(&c, &s, &t).unwrap();
    assert!(t.check(h.get(0, 0, 0)).unwrap().is_zero);
    assert!(
        t.check(&(h.get(0, 0, 1) - ctx.parse("r_th/r").unwrap()))
            .unwrap()
            .is_zero
    );
}

#[test]
fn free_system_spectrum() {
    let c = free_connection(2, 1);
    let ctx = c.ctx();
    let t = ZeroTester::default();
    let s = Slice::new(ctx, basis(2, 0), basis(2, 0), &t).unwrap();
    for point in probe_points(&c, &s, 5, 3).unwrap() {
        let l = assemble(&deformation(&c, &s), &point).unwrap();
        let id = nalgebra::DMatrix::<f64>::identity(5, 5);
        assert_eq!(rank(&(&l - &id), MATRIX_TOLERANCE), 4);
        assert_eq!(rank(&(&l + &id), MATRIX_TOLERANCE), 4);
        assert_eq!(rank(&l, MATRIX_TOLERANCE), 2);
        assert!(verify_eigensplitting(&c, &s, &point, MATRIX_TOLERANCE)
            .unwrap()
            .passed());
    }
}

#[test]
fn frame_verifies_for_general_slices() {
    let ctx = Arc::new(standard_context(3, 2));
    let c = random_connection(ctx.clone(), 0x5EED, 3);
    let t = ZeroTester::default();
    let p = |s: &str| ctx.parse(s).unwrap();
    let slices = [
        (basis(3, 0), basis(3, 0)),
        (basis(3, 1), vec![p("x1"), Expr::one(), p("x3")]),
        (
            vec![Expr::one(), Expr::int(2), Expr::zero()],
            vec![Expr::one(), Expr::zero(), Expr::one()],
        ),
    ];
    for (phi, v) in slices {
        let s = Slice::new(&ctx, phi, v, &t).unwrap();
        let frame = SplitFrame::build(&c, &s, &t).unwrap();
        for check in frame.verify(&t).into_iter().chain(frame.eigen_checks(&t)) {
            assert!(check.passed, "{} {:?}", check.name, check.failures);
        }
        for point in probe_points(&c, &s, 3, 9).unwrap() {
            assert!(verify_eigensplitting(&c, &s, &point, MATRIX_TOLERANCE)
                .unwrap()
                .passed());
        }
    }
}

#[test]
fn horizontal_fields_span_the_minus_eigenspace() {
    let c = lemniscate();
    let ctx = c.ctx();
    let t = ZeroTester::default();
    let s = Slice::new(ctx, basis(2, 1), vec![Expr::one(), Expr::one()], &t).unwrap();
    let frame = SplitFrame::build(&c, &s, &t).unwrap();
    let l = deformation(&c, &s);
    for h in &frame.horizontal {
        assert!(check_zero_field(ctx, "L H + H", &t, &l.apply(ctx, h).add(h)).passed);
    }
    for g in &frame.gamma {
        assert!(check_zero_field(ctx, "L Gamma", &t, &l.apply(ctx, g)).passed);
    }
    for u in &frame.plus {
        let image = l.apply(ctx, u);
        assert!(check_zero_field(ctx, "L U - U", &t, &image.sub(u)).passed);
    }
}

#[test]
fn deformation_bracket_identities() {
    let t = ZeroTester::default();
    let c = lemniscate();
    let ctx = c.ctx();
    for (phi, v) in [(basis(2, 0), basis(2, 0)), (basis(2, 1), basis(2, 1))] {
        let s = Slice::new(ctx, phi, v, &t).unwrap();
        for check in check_deformation_bracket(&c, &s, &t) {
            assert!(check.passed, "{} {:?}", check.name, check.failures);
        }
    }
}

#[test]
fn guards_collect_denominators() {
    let c = lemniscate();
    let ctx = c.ctx();
    let t = ZeroTester::default();
    let s = Slice::new(ctx, basis(2, 0), basis(2, 0), &t).unwrap();
    let g = guards(&c, &s);
    assert_eq!(g, vec![ctx.parse("r").unwrap()]);
}
