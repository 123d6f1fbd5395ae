use jetcurv_core::jetcalc::*;
use jetcurv_core::oracle::{check_equal_vvf, check_zero_field, check_zero_form, check_zero_vvf};
use symcore::{Expr, ZeroTester};

fn ctx() -> JetContext {
    JetContext::new(&["x1", "x2"], &["y1"]).unwrap()
}

fn one_form(ctx: &JetContext, texts: &[&str]) -> DiffForm {
    DiffForm::one_form(texts.iter().map(|t| ctx.parse(t).unwrap()).collect())
}

fn field(ctx: &JetContext, texts: &[&str]) -> VectorField {
    VectorField::new(texts.iter().map(|t| ctx.parse(t).unwrap()).collect())
}

#[test]
fn d_squared_vanishes() {
    let c = ctx();
    let t = ZeroTester::default();
    let f = DiffForm::function(c.dim(), c.parse("sin(x1*y1) + y1_x2^2*x2").unwrap());
    let df = exterior_d(&c, &f).unwrap();
    let ddf = exterior_d(&c, &df).unwrap();
    assert!(check_zero_form(&c, "ddf", &t, &ddf).passed);

    let g = DiffForm::function(c.dim(), c.parse("x1*y1_x2 + y1^3/(1 + x2^2)").unwrap());
    let dg = exterior_d(&c, &g).unwrap();
    assert!(check_zero_form(&c, "ddg", &t, &exterior_d(&c, &dg).unwrap()).passed);
}

#[test]
fn wedge_is_antisymmetric_and_d_is_a_derivation() {
    let c = ctx();
    let t = ZeroTester::default();
    let a = one_form(&c, &["y1", "x1", "0", "y1_x1", "x2"]);
    let b = one_form(&c, &["1", "y1_x2", "x1*x2", "0", "y1"]);
    let ab = a.wedge(&b).unwrap();
    let ba = b.wedge(&a).unwrap();
    assert!(check_zero_form(&c, "ab + ba", &t, &ab.add(&ba)).passed);

    let f = c.parse("x1*y1 + y1_x1^2").unwrap();
    let ff = DiffForm::function(c.dim(), f.clone());
    let lhs = exterior_d(&c, &a.scale(&f)).unwrap();
    let rhs = exterior_d(&c, &ff)
        .unwrap()
        .wedge(&a)
        .unwrap()
        .add(&exterior_d(&c, &a).unwrap().scale(&f));
    assert!(check_zero_form(&c, "d(fa)", &t, &lhs.sub(&rhs)).passed);
}

#[test]
fn cartan_formula_for_one_forms() {
    let c = ctx();
    let t = ZeroTester::default();
    let u = field(&c, &["1", "y1_x1", "x2*y1", "x1", "y1^2"]);
    let a = one_form(&c, &["y1*x2", "x1", "y1_x2", "0", "x1*y1"]);
    let lie = lie_derivative(&c, &u, &a);
    let cartan = interior(&c, &u, &exterior_d(&c, &a).unwrap())
        .unwrap()
        .add(&exterior_d(&c, &interior(&c, &u, &a).unwrap()).unwrap());
    assert!(check_zero_form(&c, "L = i d + d i", &t, &lie.sub(&cartan)).passed);
}

#[test]
fn lie_bracket_jacobi_identity() {
    let c = ctx();
    let t = ZeroTester::default();
    let u = field(&c, &["1", "0", "y1_x1", "x2", "y1"]);
    let v = field(&c, &["x2", "y1", "0", "y1_x2^2", "1"]);
    let w = field(&c, &["0", "x1*y1", "1", "0", "sin(x1)"]);
    let br = |a: &VectorField, b: &VectorField| lie_bracket(&c, a, b).unwrap();
    let total = br(&u, &br(&v, &w)).add(&br(&v, &br(&w, &u))).add(&br(&w, &br(&u, &v)));
    assert!(check_zero_field(&c, "jacobi", &t, &total).passed);
    assert!(check_zero_field(&c, "antisymmetry", &t, &br(&u, &v).add(&br(&v, &u))).passed);
}

#[test]
fn fn_bracket_of_fields_is_the_lie_bracket() {
    let c = ctx();
    let t = ZeroTester::default();
    let u = field(&c, &["1", "y1", "x1", "0", "y1_x1"]);
    let v = field(&c, &["x2", "0", "y1_x2", "1", "x1*y1"]);
    let fnb = fn_bracket(
        &c,
        &VectorValuedForm::from_vector_field(&u),
        &VectorValuedForm::from_vector_field(&v),
    )
    .unwrap();
    let lie = VectorValuedForm::from_vector_field(&lie_bracket(&c, &u, &v).unwrap());
    assert!(check_equal_vvf(&c, "[[u,v]] = [u,v]", &t, &fnb, &lie).passed);
}

#[test]
fn fn_bracket_graded_antisymmetry() {
    let c = ctx();
    let t = ZeroTester::default();
    let u = field(&c, &["1", "y1_x2", "x1", "y1", "0"]);
    let a = VectorValuedForm::from_terms(
        c.dim(),
        1,
        &[
            (
                one_form(&c, &["y1", "0", "1", "x2", "0"]),
                field(&c, &["0", "1", "0", "0", "y1_x1"]),
            ),
            (
                one_form(&c, &["0", "x1", "0", "0", "y1"]),
                field(&c, &["x2", "0", "0", "1", "0"]),
            ),
        ],
    );
    let b = VectorValuedForm::from_terms(
        c.dim(),
        1,
        &[(
            one_form(&c, &["x1*y1", "1", "y1_x1", "0", "0"]),
            field(&c, &["0", "0", "1", "x1", "0"]),
        )],
    );
    let uf = VectorValuedForm::from_vector_field(&u);
    // degrees (1,1): [[A,B]] = -(-1)^{1*1}[[B,A]] = [[B,A]]
    let ab = fn_bracket(&c, &a, &b).unwrap();
    let ba = fn_bracket(&c, &b, &a).unwrap();
    assert!(check_equal_vvf(&c, "[[A,B]] = [[B,A]]", &t, &ab, &ba).passed);
    // degrees (0,1): [[U,A]] = -[[A,U]] = L_U A
    let ua = fn_bracket(&c, &uf, &a).unwrap();
    let au = fn_bracket(&c, &a, &uf).unwrap();
    assert!(check_zero_vvf(&c, "[[U,A]] + [[A,U]]", &t, &ua.add(&au)).passed);
    assert!(check_equal_vvf(&c, "[[U,A]] = L_U A", &t, &ua, &lie_derivative_vvf(&c, &u, &a)).passed);
}

#[test]
fn identity_commutes_with_everything() {
    let c = ctx();
    let t = ZeroTester::default();
    let a = VectorValuedForm::from_terms(
        c.dim(),
        1,
        &[(
            one_form(&c, &["y1", "x1", "0", "0", "1"]),
            field(&c, &["0", "y1_x2", "1", "0", "x2"]),
        )],
    );
    let br = fn_bracket(&c, &VectorValuedForm::identity(c.dim()), &a).unwrap();
    assert!(check_zero_vvf(&c, "[[I,A]]", &t, &br).passed);
}

#[test]
fn interior_and_composition() {
    let c = ctx();
    let t = ZeroTester::default();
    let u = field(&c, &["1", "0", "y1_x1", "0", "0"]);
    let theta = contact_form(&c, 0).unwrap();
    assert!(interior(&c, &u, &theta).unwrap().value().is_zero());

    let id = VectorValuedForm::identity(c.dim());
    let a = VectorValuedForm::from_terms(c.dim(), 1, &[(theta.clone(), field(&c, &["0", "0", "0", "1", "0"]))]);
    let left = vvf_compose(&c, &id, &a).unwrap();
    let right = vvf_compose(&c, &a, &id).unwrap();
    assert!(check_equal_vvf(&c, "I A", &t, &left, &a).passed);
    assert!(check_equal_vvf(&c, "A I", &t, &right, &a).passed);
    // θ ⊗ ∂/∂y1_x1 squares to zero since θ(∂/∂y1_x1) = 0
    assert!(check_zero_vvf(&c, "A^2", &t, &vvf_compose(&c, &a, &a).unwrap()).passed);
    let applied = id.apply(&c, &u);
    assert_eq!(applied, u);
    assert_eq!(interior_vvf(&c, &u, &a).unwrap().degree(), 0);
}

#[test]
fn context_rejects_bad_input() {
    assert!(JetContext::new(&["x", "x"], &["y"]).is_err());
    let c = ctx();
    assert!(contact_form(&c, 3).is_err());
    let two = DiffForm::basis(c.dim(), 0).wedge(&DiffForm::basis(c.dim(), 1)).unwrap();
    assert!(two.wedge(&DiffForm::basis(c.dim(), 2)).is_err());
    assert!(exterior_d(&c, &two).is_err());
    assert_eq!(c.name(c.dy_idx(0, 1)), "y1_x2");
    assert_eq!(c.dim(), 5);
    assert!(c.is_base_function(&c.parse("sin(x1)*x2").unwrap()));
    assert!(!c.is_base_function(&(c.x(0) * Expr::sym(c.coord(c.y_idx(0))))));
}
