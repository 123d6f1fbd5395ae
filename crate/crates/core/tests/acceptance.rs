//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use jetcurv_core::applications::*;
use jetcurv_core::connection::*;
use jetcurv_core::curvature::*;
use jetcurv_core::jetcalc::*;
use jetcurv_core::oracle::*;
use jetcurv_core::secondorder::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symcore::{diff, Expr, Func, Symbol, ZeroMethod, ZeroTester};

const TOL_SYM: f64 = 1e-9;
const TOL_NUM: f64 = 1e-8;
const TOL_FD: f64 = 1e-5;
const RANDOM_SEED: u64 = 0x5EED;

type Outcome = Result<String, String>;

fn tester() -> ZeroTester {
    ZeroTester {
        tolerance: TOL_SYM,
        ..ZeroTester::default()
    }
}

fn basis(n: usize, a: usize) -> Vec<Expr> {
    (0..n)
        .map(|i| if i == a { Expr::one() } else { Expr::zero() })
        .collect()
}

fn require(check: &IdentityCheck, what: &str) -> Result<(), String> {
    if check.passed {
        Ok(())
    } else {
        Err(format!(
            "{what}: {} fails at {:?} {:?}",
            check.name, check.failures, check.error
        ))
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn frame(c: &Connection, phi: Vec<Expr>, v: Vec<Expr>) -> Result<SplitFrame, String> {
    let t = tester();
    let s = Slice::new(c.ctx(), phi, v, &t).map_err(err)?;
    SplitFrame::build(c, &s, &t).map_err(err)
}

fn random_system() -> Connection {
    random_connection(Arc::new(standard_context(3, 2)), RANDOM_SEED, 3)
}

/// Named systems with the slices exercised by the structural criteria.
fn systems() -> Vec<(&'static str, Connection, Vec<Expr>, Vec<Expr>)> {
    vec![
        ("free n=2 m=1", free_connection(2, 1), basis(2, 0), basis(2, 0)),
        ("lemniscate dt", lemniscate(), basis(2, 0), basis(2, 0)),
        ("lemniscate dth", lemniscate(), basis(2, 1), basis(2, 1)),
        ("random n=3 m=2", random_system(), basis(3, 0), basis(3, 0)),
    ]
}

fn lemniscate_phi_expected(a: usize) -> [[i64; 2]; 2] {
    if a == 0 {
        [[1, 0], [0, 0]]
    } else {
        [[0, 0], [0, 4]]
    }
}

fn check_lemniscate_phi(report: &CurvatureReport, a: usize, symbolic_only: bool) -> Result<f64, String> {
    let t = tester();
    let expected = lemniscate_phi_expected(a);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let gap = report.phi_components.get(0, i, 0, j) - Expr::int(expected[i][j]);
            let verdict = t.check(&gap).map_err(err)?;
            if !verdict.is_zero {
                return Err(format!("Phi[{i}][{j}] = {}", report.phi_components.get(0, i, 0, j)));
            }
            if symbolic_only && verdict.method != ZeroMethod::Symbolic {
                return Err(format!("Phi[{i}][{j}] only vanishes numerically"));
            }
            worst = worst.max(verdict.max_residual);
        }
    }
    Ok(worst)
}

fn criterion_1() -> Outcome {
    let t = tester();
    let c = lemniscate();
    for a in 0..2 {
        let f = frame(&c, basis(2, a), basis(2, a))?;
        let report = CurvatureReport::compute_checked(&f, &t).map_err(err)?;
        let rg = check_zero_vvf(c.ctx(), "R_Gamma = 0", &t, &report.r_gamma);
        require(&rg, "lemniscate")?;
        if rg.method != ZeroMethod::Symbolic {
            return Err("R_Gamma vanishes only numerically".into());
        }
        check_lemniscate_phi(&report, a, true)?;
    }
    Ok("R_Gamma = 0; Phi(t) = diag(1,0), Phi(th) = diag(0,4); symbolic".into())
}

fn criterion_2() -> Outcome {
    let t = tester();
    let mut worst: f64 = 0.0;
    let cases = [
        ("free", free_connection(2, 1), 2),
        ("lemniscate", lemniscate(), 2),
        ("random", random_system(), 3),
    ];
    for (name, c, n) in cases {
        let s = Slice::new(c.ctx(), basis(n, 0), basis(n, 0), &t).map_err(err)?;
        for p in probe_points(&c, &s, 5, RANDOM_SEED).map_err(err)? {
            let report = verify_eigensplitting(&c, &s, &p, TOL_NUM).map_err(err)?;
            if !report.passed() {
                let bad: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|k| !k.passed)
                    .map(|k| (k.name, k.value))
                    .collect();
                return Err(format!("{name}: {bad:?}"));
            }
            for k in &report.checks {
                if k.tolerance > 0.0 {
                    worst = worst.max((k.value - k.expected).abs());
                }
            }
        }
    }
    Ok(format!(
        "3 systems x 5 points, worst deviation {worst:.1e} <= {TOL_NUM:.0e}"
    ))
}

fn criterion_3() -> Outcome {
    let t = tester();
    let mut worst: f64 = 0.0;
    for (name, c, phi, v) in systems() {
        let f = frame(&c, phi, v)?;
        let report = CurvatureReport::compute_checked(&f, &t).map_err(err)?;
        for check in [
            check_vertical_structure_equation(&f, &report, &t),
            check_plus_structure_equation(&f, &report, &t),
        ] {
            require(&check, name)?;
            worst = worst.max(check.max_residual);
        }
    }
    Ok(format!("4 system/slice pairs, max residual {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let t = tester();
    let mut rows = 0;
    for (name, c, phi, v) in systems().into_iter().skip(1) {
        let f = frame(&c, phi, v)?;
        let report = CurvatureReport::compute_checked(&f, &t).map_err(err)?;
        let checks = check_bracket_table(&f, &report, &t).map_err(err)?;
        if checks.len() != 11 {
            return Err(format!("{name}: expected 11 rows, got {}", checks.len()));
        }
        for check in &checks {
            require(check, name)?;
        }
        rows += checks.len();
    }
    Ok(format!(
        "{rows} rows (6 bracket + 5 Lie per system) on lemniscate and random"
    ))
}

fn harmonic_pair(g_diag: [&str; 2], h_diag: [&str; 2]) -> Result<(RiemannData, RiemannData), String> {
    let t = tester();
    let ctx = Arc::new(standard_context(2, 2));
    let d = |e: [&str; 2]| -> Result<Vec<Vec<Expr>>, String> {
        let a = ctx.parse(e[0]).map_err(err)?;
        let b = ctx.parse(e[1]).map_err(err)?;
        Ok(vec![vec![a, Expr::zero()], vec![Expr::zero(), b]])
    };
    let g = BaseMetric::on_base(ctx.clone(), d(g_diag)?, &t).map_err(err)?;
    let h = BaseMetric::on_fibre(ctx.clone(), d(h_diag)?, &t).map_err(err)?;
    Ok((RiemannData::christoffel(g), RiemannData::christoffel(h)))
}

fn criterion_5() -> Outcome {
    let t = tester();
    let mut cases = systems();
    let (g, h) = harmonic_pair(["1", "1"], ["1", "sin(y1)^2"])?;
    let hc = harmonic_connection(&g, &h).map_err(err)?;
    cases.push(("harmonic", hc.clone(), basis(2, 0), basis(2, 0)));
    let rc = random_system();
    let p = |s: &str| rc.ctx().parse(s).unwrap();
    cases.push((
        "random, curved slice",
        rc.clone(),
        vec![p("1 + x2"), p("x1"), Expr::zero()],
        vec![Expr::one(), p("x1"), p("x3")],
    ));
    let sep_ctx = Arc::new(standard_context(2, 2));
    let sep = Connection::new(
        sep_ctx.clone(),
        |s, i, j| if i == j { sep_ctx.y(s).pow(2) } else { Expr::zero() },
    );
    cases.push(("separable", sep, basis(2, 0), vec![Expr::one(), Expr::one()]));
    let count = cases.len();
    for (name, c, phi, v) in cases {
        let s = Slice::new(c.ctx(), phi, v, &t).map_err(err)?;
        for check in check_deformation_bracket(&c, &s, &t) {
            require(&check, name)?;
        }
    }
    Ok(format!(
        "i_(Gamma_v)[[Gamma,S1]] = L_(Gamma_v) S1 on {count} system/slice pairs"
    ))
}

fn criterion_6() -> Outcome {
    let t = tester();
    // ᵍΓ¹_pq = -½ ∂g_pq/∂x¹ = 0 since g depends on x2 only
    let (g, h) = harmonic_pair(["1", "(1 + x2^2)^2"], ["1", "sin(y1)^2"])?;
    let c = harmonic_connection(&g, &h).map_err(err)?;
    let ctx = c.ctx();
    let p = |s: &str| ctx.parse(s).unwrap();
    let adapted = Slice::new(ctx, basis(2, 0), basis(2, 0), &t).map_err(err)?;
    let compat = check_compatibility(&c, &adapted, &t).map_err(err)?;
    if !compat.compatible {
        return Err(format!("harmonic system not compatible: {:?}", compat.witnesses));
    }
    let vs = [
        vec![Expr::one(), Expr::zero()],
        vec![Expr::one(), Expr::int(2)],
        vec![Expr::one(), p("x1*x2")],
    ];
    let mut method = ZeroMethod::Symbolic;
    for v in vs {
        let s = Slice::new(ctx, basis(2, 0), v.clone(), &t).map_err(err)?;
        let dm = d_minus_frame(&c, &s, &t).map_err(err)?;
        let first = horizontal_coefficients(&c, &s, &t).map_err(err)?;
        let check = check_zero_exprs("D- = first order", &t, dm.coefficients().differences(&first));
        require(&check, &format!("v = {v:?}"))?;
        if check.method == ZeroMethod::Numeric {
            method = ZeroMethod::Numeric;
        }
    }
    Ok(format!("3 slices v = (1,0), (1,2), (1,x1 x2); {method:?} equality"))
}

fn criterion_7() -> Outcome {
    let t = tester();
    let c = lemniscate();
    let ctx = c.ctx().clone();
    let euclid = vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), Expr::one()]];
    let g = BaseMetric::on_base(ctx.clone(), euclid, &t).map_err(err)?;
    for a in 0..2 {
        let mr = metric_reduction(&c, basis(2, a), &g, &t).map_err(err)?;
        require(&mr.reduced_check, "lemniscate")?;
        let s = Slice::new(&ctx, basis(2, a), g.sharp(&basis(2, a)), &t).map_err(err)?;
        let first = horizontal_coefficients(&c, &s, &t).map_err(err)?;
        require(
            &check_zero_exprs("metric = first order", &t, mr.coefficients.differences(&first)),
            "lemniscate",
        )?;
        let report = CurvatureReport::compute_checked(&mr.frame, &t).map_err(err)?;
        check_lemniscate_phi(&report, a, false)?;
    }
    Ok("Euclidean (t,th): both slices match first order and reproduce Phi".into())
}

fn criterion_8() -> Outcome {
    let t = tester();
    let cases = [
        ("g flat, h sphere", ["1", "1"], ["1", "sin(y1)^2"]),
        ("g warped, h flat", ["1", "(1 + x1^2)^2"], ["1", "1"]),
    ];
    let mut worst: f64 = 0.0;
    for (name, gd, hd) in cases {
        let (g, h) = harmonic_pair(gd, hd)?;
        let report = harmonic_curvature_check(&g, &h, &t).map_err(err)?;
        for check in &report.checks {
            require(check, name)?;
            worst = worst.max(check.max_residual);
        }
    }
    Ok(format!(
        "R_Gamma, R_H, Phi, r_plus displays on 2 metric pairs, max residual {worst:.1e}"
    ))
}

fn criterion_9() -> Outcome {
    let t = tester();
    let ctx = Arc::new(standard_context(2, 2));
    let c = Connection::new(
        ctx.clone(),
        |s, i, j| if i == j { ctx.y(s).pow(2) } else { Expr::zero() },
    );
    let report = separability_check(&c, &t).map_err(err)?;
    if !report.separable() {
        return Err(format!("hypothesis violated: {:?}", report.violations));
    }
    for s in &report.slices {
        require(&s.r_h_vanishes, &s.name)?;
        require(&s.phi_diagonal, &s.name)?;
        require(&s.coefficients, &s.name)?;
    }
    Ok(format!(
        "slices {}: R_H = 0, Phi diagonal",
        report
            .slices
            .iter()
            .map(|s| s.name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let t = tester();
    let ctx = Arc::new(standard_context(1, 2));
    let p = |s: &str| ctx.parse(s).unwrap();
    let fs = [p("y1_x1^2*y2 + x1*y2_x1 - y1"), p("y1_x1*y2_x1 - y1^2 + y2_x1^3")];
    let cases = [
        ("hand", Connection::new(ctx.clone(), |s, _, _| fs[s].clone())),
        ("random", random_connection(ctx.clone(), RANDOM_SEED, 4)),
    ];
    let mut names = Vec::new();
    for (label, c) in cases {
        for check in ode_reduction_check(&c, &t).map_err(err)? {
            require(&check, label)?;
            if label == "hand" {
                names.push(check.name);
            }
        }
    }
    Ok(names.join("; "))
}

fn random_expr(rng: &mut ChaCha8Rng, syms: &[Symbol], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.7) {
            Expr::sym(&syms[rng.gen_range(0..syms.len())])
        } else {
            Expr::ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
        };
    }
    let a = random_expr(rng, syms, depth - 1);
    let positive = Expr::raw_sum(vec![Expr::one(), Expr::raw_pow(a.clone(), 2)]);
    match rng.gen_range(0..8) {
        0 => Expr::raw_sum(vec![a, random_expr(rng, syms, depth - 1)]),
        1 | 2 => Expr::raw_product(vec![a, random_expr(rng, syms, depth - 1)]),
        3 => Expr::raw_pow(a, rng.gen_range(2..=3)),
        4 => Expr::raw_pow(positive, -1),
        5 => Expr::raw_func(Func::Sin, a),
        6 => Expr::raw_func(Func::Ln, positive),
        _ => Expr::raw_func(Func::Sqrt, positive),
    }
}

fn criterion_11() -> Outcome {
    let t = tester();
    let ctx = standard_context(2, 1);
    let syms: Vec<Symbol> = ctx.coords().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut sampler = JetSampler::new(&ctx, vec![], RANDOM_SEED);
    let points: Vec<JetPoint> = (0..5)
        .map(|_| sampler.next_point())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut fd_worst: f64 = 0.0;
    for k in 0..200 {
        let e = random_expr(&mut rng, &syms, 4);
        let s = &syms[rng.gen_range(0..syms.len())];
        let r = fd_audit(&e, s, &points).map_err(err)?;
        if r > TOL_FD {
            return Err(format!("FD audit #{k}: {e} d/d{s} residual {r:.2e}"));
        }
        fd_worst = fd_worst.max(r);
    }
    for k in 0..60 {
        let a = random_expr(&mut rng, &syms, 3);
        let b = random_expr(&mut rng, &syms, 3);
        let s = &syms[rng.gen_range(0..syms.len())];
        let (da, db) = (diff(&a, s), diff(&b, s));
        let product = diff(&(&a * &b), s) - (&da * &b + &a * &db);
        let chain = diff(&a.sin(), s) - a.cos() * &da;
        let chain_pow = diff(&b.pow(3), s) - Expr::int(3) * b.pow(2) * &db;
        for (what, r) in [("product", product), ("chain", chain), ("chain pow", chain_pow)] {
            if !t.check(&r).map_err(err)?.is_zero {
                return Err(format!("{what} rule #{k} on {a}, {b}"));
            }
        }
        let once = a.simplify();
        if once.simplify() != once {
            return Err(format!("simplify not idempotent on {a}"));
        }
        let f = DiffForm::function(ctx.dim(), Expr::raw_product(vec![a.clone(), b.clone()]).simplify());
        let dd = exterior_d(&ctx, &exterior_d(&ctx, &f).map_err(err)?).map_err(err)?;
        require(&check_zero_form(&ctx, "d d f = 0", &t, &dd), "d o d")?;
    }
    let poly = |rng: &mut ChaCha8Rng| {
        let terms: Vec<Expr> = (0..2)
            .map(|_| {
                Expr::int(rng.gen_range(-2..=2))
                    * Expr::sym(&syms[rng.gen_range(0..syms.len())]).pow(rng.gen_range(0..=2))
            })
            .collect();
        Expr::sum(terms)
    };
    let dim = ctx.dim();
    for _ in 0..8 {
        let field = |rng: &mut ChaCha8Rng| VectorField::new((0..dim).map(|_| poly(rng)).collect());
        let form = |rng: &mut ChaCha8Rng| DiffForm::one_form((0..dim).map(|_| poly(rng)).collect());
        let (u, w) = (field(&mut rng), field(&mut rng));
        let a = VectorValuedForm::from_terms(
            dim,
            1,
            &[(form(&mut rng), field(&mut rng)), (form(&mut rng), field(&mut rng))],
        );
        let b = VectorValuedForm::from_terms(dim, 1, &[(form(&mut rng), field(&mut rng))]);
        let (uf, wf) = (
            VectorValuedForm::from_vector_field(&u),
            VectorValuedForm::from_vector_field(&w),
        );
        let br = |x: &VectorValuedForm, y: &VectorValuedForm| fn_bracket(&ctx, x, y).map_err(err);
        // [[K,L]] = -(-1)^{kl} [[L,K]]
        require(
            &check_zero_vvf(&ctx, "[[U,W]] + [[W,U]]", &t, &br(&uf, &wf)?.add(&br(&wf, &uf)?)),
            "degrees 0,0",
        )?;
        require(
            &check_zero_vvf(&ctx, "[[U,A]] + [[A,U]]", &t, &br(&uf, &a)?.add(&br(&a, &uf)?)),
            "degrees 0,1",
        )?;
        require(
            &check_equal_vvf(&ctx, "[[A,B]] = [[B,A]]", &t, &br(&a, &b)?, &br(&b, &a)?),
            "degrees 1,1",
        )?;
    }
    Ok(format!(
        "200 FD audits (worst {fd_worst:.1e} <= {TOL_FD:.0e}), 60 rule/idempotence/dd cases, 8 FN antisymmetry cases"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 11] = [
        ("lemniscate regression", criterion_1, Some(Duration::from_secs(5))),
        ("eigenvalue spectrum", criterion_2, Some(Duration::from_secs(10))),
        ("structure equations", criterion_3, None),
        ("bracket table", criterion_4, None),
        ("deformation bracket", criterion_5, None),
        ("second-order equivalence", criterion_6, None),
        ("metric reduction", criterion_7, None),
        ("harmonic-map displays", criterion_8, Some(Duration::from_secs(30))),
        ("separability", criterion_9, None),
        ("ordinary reduction", criterion_10, None),
        ("symbolic core properties", criterion_11, Some(Duration::from_secs(20))),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > *l => Err(format!("took {elapsed:?}, limit {l:?}")),
            (o, _) => o,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        println!(
            "criterion {:>2} {status} {name} [{} ms]: {detail}",
            k + 1,
            elapsed.as_millis()
        );
        if outcome.is_err() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
