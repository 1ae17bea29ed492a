//! End-to-end acceptance suite: the worked examples, the level bound on sampled
//! pencils, the property suites and boundedness. Prints one line per criterion.

mod common;

use common::*;
use lmi_sos::certificates::{
    boundedness_certificate, check_strong_infeasibility, classify, find_membership, infeasibility_level,
    level_bound, lowdim_certificate, random_strongly_infeasible, FeasibilityClass, InfeasibilityCertificate,
    LevelSearch, MembershipCertificate, Search,
};
use lmi_sos::duals::{gap_report, SdpInstance};
use lmi_sos::gram::{GramSos, GramSosMatrix};
use lmi_sos::io::{self, LoadedCertificate};
use lmi_sos::pencil::{cube_pencil, trace_pair, LinearPencil};
use lmi_sos::poly::{basis_len, reduce_mod_linear, MonomialBasis, Polynomial, Reduction};
use lmi_sos::scalar::{Rational, Scalar};
use lmi_sos::sdp::{self, Functional, SdpProblem, SdpStatus, Sense, Settings};
use lmi_sos::verify::{check_eps_membership, verify_certificate, Certificate};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::Cell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn settings() -> Settings {
    Settings::default()
}

fn poly(s: &str, n: usize) -> Polynomial<Rational> {
    Polynomial::parse(s, n).unwrap()
}

/// `-1 = tr(A * (1/2) u u^T)` with the vector `u` written out by hand.
fn half_outer_certificate(pencil: &LinearPencil<Rational>, u: &[&str], level: usize) -> Certificate<Rational> {
    let n = pencil.nvars();
    let u: Vec<_> = u.iter().map(|s| poly(s, n)).collect();
    let mut big = GramSosMatrix::from_vectors(pencil.size(), n, level, &[u]).unwrap();
    big.gram = big.gram.map(|v| v * q("1/2"));
    Certificate::Infeasibility(InfeasibilityCertificate {
        level,
        s: GramSos::zero(n, level),
        big,
        residual: 0.0,
    })
}

fn exact_pass(pencil: &LinearPencil<Rational>, cert: &Certificate<Rational>) -> Result<(), String> {
    let r = verify_certificate(pencil, cert).map_err(|e| e.to_string())?;
    ensure!(r.pass && r.max_residual() == 0.0, "exact verification failed: {r:?}");
    Ok(())
}

fn shipped(pencil: &LinearPencil<Rational>, file: &str) -> Result<(), String> {
    let text = std::fs::read_to_string(data_path(file)).map_err(|e| e.to_string())?;
    match io::read_certificate(&text).map_err(|e| e.to_string())? {
        LoadedCertificate::Exact(c) => exact_pass(pencil, &c),
        LoadedCertificate::Float(_) => Err(format!("{file} is not an exact certificate")),
    }
}

fn example_51() -> Outcome {
    let a = ex51();
    let af = a.to_float();
    let class = classify(&af, &settings()).map_err(|e| e.to_string())?;
    ensure!(
        matches!(&class, FeasibilityClass::WeaklyInfeasible(c) if c.level == 1),
        "classify gave {}",
        class.describe()
    );
    match infeasibility_level(&af, None, &settings()).map_err(|e| e.to_string())? {
        LevelSearch::Found(c) => ensure!(c.level == 1, "level {}", c.level),
        other => return Err(format!("no level found: {other:?}")),
    }
    exact_pass(&a, &half_outer_certificate(&a, &["1", "-1 - 1/2*x1"], 1))?;
    shipped(&a, "ex51.cert.json")?;
    Ok("weakly infeasible, k = 1, u verifies with residual 0".into())
}

fn example_52() -> Outcome {
    let a = ex52();
    let af = a.to_float();
    let minus_one = Polynomial::constant(2, -1.0);
    let level1 = find_membership(&af, &minus_one, 1, &settings()).map_err(|e| e.to_string())?;
    let Search::NotFound { residual } = level1 else {
        return Err("a level-1 certificate was accepted".into());
    };
    let cert = match infeasibility_level(&af, None, &settings()).map_err(|e| e.to_string())? {
        LevelSearch::Found(c) => c,
        other => return Err(format!("no level found: {other:?}")),
    };
    ensure!(cert.level == 2, "level {}", cert.level);
    let report = verify_certificate(&af, &Certificate::Infeasibility(cert)).map_err(|e| e.to_string())?;
    ensure!(report.pass, "level-2 certificate rejected: {report:?}");
    let u = ["1/2 + 1/2*x2 + 1/8*x2^2", "-1", "1 + 1/2*x2"];
    exact_pass(&a, &half_outer_certificate(&a, &u, 2))?;
    shipped(&a, "ex52.cert.json")?;
    Ok(format!("level 1 rejected (residual {residual:.1e}), level 2 verified, u exact"))
}

fn example_54() -> Outcome {
    let mut shown = Vec::new();
    for alpha in [1.0, 0.5, 2.0] {
        let inst = SdpInstance::new(ex54(alpha), Polynomial::var(2, 1)).map_err(|e| e.to_string())?;
        let r = gap_report(&inst, &settings()).map_err(|e| e.to_string())?;
        let p = r.primal.value.finite().ok_or("primal value not finite")?;
        let d = r.dual.value.finite().ok_or("dual value not finite")?;
        let ds = r.sos_dual.value.finite().ok_or("sos dual value not finite")?;
        let dual_tol = if alpha == 1.0 { 1e-6 } else { 1e-5 };
        ensure!(p.abs() <= 1e-6, "alpha {alpha}: P* = {p:e}");
        ensure!((d + alpha).abs() <= dual_tol, "alpha {alpha}: D* = {d:e}");
        ensure!(ds.abs() <= 1e-5, "alpha {alpha}: Dsos* = {ds:e}");
        ensure!(
            r.sos_dual.status == SdpStatus::Optimal && r.sos_dual.attained,
            "alpha {alpha}: sos dual {:?}, attained {}",
            r.sos_dual.status,
            r.sos_dual.attained
        );
        shown.push(format!("a={alpha}: P={p:.1e} D={d:.6} Dsos={ds:.1e}"));
    }
    Ok(shown.join("; "))
}

fn example_53() -> Outcome {
    let a = ex53().to_float();
    let Search::Found(c) = lowdim_certificate(&a, &settings()).map_err(|e| e.to_string())? else {
        return Err("no certificate".into());
    };
    let (c0, lin) = c.f.linear_parts().map_err(|e| e.to_string())?;
    let lead = lin[0].abs();
    let others = c0.abs().max(lin[1].abs()).max(lin[2].abs());
    ensure!(lead > 0.0 && others <= 1e-5 * lead, "f = {}", c.f);
    Ok(format!("f = {} (off-axis ratio {:.1e})", c.f, others / lead))
}

fn example_41() -> Outcome {
    let a = ex41().to_float();
    let class = classify(&a, &settings()).map_err(|e| e.to_string())?;
    ensure!(matches!(class, FeasibilityClass::WeaklyFeasible { .. }), "classify gave {}", class.describe());
    let x = Polynomial::var(1, 0);
    for k in 0..=2 {
        let r = check_eps_membership(&a, &x, 0.0, k, &settings()).map_err(|e| e.to_string())?;
        ensure!(r.found().is_none(), "x accepted at level {k}");
    }
    let hit = (0..=3)
        .map(|k| check_eps_membership(&a, &x, 0.1, k, &settings()))
        .find_map(|r| r.ok().and_then(|s| s.found().cloned()))
        .ok_or("x + 0.1 not found for k <= 3")?;
    let report = verify_certificate(&a, &Certificate::Membership(hit.clone())).map_err(|e| e.to_string())?;
    ensure!(report.pass, "certificate rejected: {report:?}");
    Ok(format!("weakly feasible, x not found for k <= 2, x + 0.1 at k = {}", hit.level))
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        // Quarter-integer entries keep the transformed pencils well scaled.
        let m = DMatrix::from_fn(n, n, |i, j| {
            let e = f64::from(rng.gen_range(-2..=2)) / 4.0;
            if i == j {
                1.0 + e
            } else {
                e
            }
        });
        if m.determinant().abs() > 0.25 {
            return m;
        }
    }
}

fn level_of(pencil: &LinearPencil<f64>) -> Result<usize, String> {
    match infeasibility_level(pencil, None, &settings()).map_err(|e| e.to_string())? {
        LevelSearch::Found(c) => {
            let r = verify_certificate(pencil, &Certificate::Infeasibility(c.clone())).map_err(|e| e.to_string())?;
            ensure!(r.pass, "certificate rejected");
            Ok(c.level)
        }
        LevelSearch::NoneUpToBound { bound, residuals } => Err(format!("none up to {bound}: {residuals:?}")),
    }
}

fn level_bound_sample() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..50 {
        let size = rng.gen_range(1..=4);
        let nvars = rng.gen_range(1..=3);
        let a = random_strongly_infeasible(&mut rng, size, nvars);
        let c = check_strong_infeasibility(&a, &settings()).map_err(|e| e.to_string())?;
        let Search::Found(c) = c else {
            return Err(format!("strongly infeasible pencil {i} ({size}x{size}, n = {nvars}) not certified"));
        };
        let r = verify_certificate(&a, &Certificate::Infeasibility(c)).map_err(|e| e.to_string())?;
        ensure!(r.pass, "pencil {i}: certificate rejected");
    }
    let bases = [(ex51().to_float(), 1), (ex52().to_float(), 2)];
    for i in 0..20 {
        let (base, level) = &bases[i % 2];
        let q = random_invertible(&mut rng, base.size());
        let t = random_invertible(&mut rng, base.nvars());
        let b: Vec<f64> = (0..base.nvars()).map(|_| f64::from(rng.gen_range(-4..=4)) / 4.0).collect();
        let a = base.congruence(&q).and_then(|p| p.affine_change(&t, &b)).map_err(|e| e.to_string())?;
        let k = level_of(&a).map_err(|e| format!("transform {i}: {e}"))?;
        ensure!(k == *level, "transform {i}: level {k}, base level {level}");
        ensure!(k <= level_bound(a.size(), a.nvars()), "transform {i}: level {k} above bound");
    }
    Ok("50 strongly infeasible at level 0; 20 transforms keep levels 1 and 2".into())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0),
        ..Config::default()
    })
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: usize) -> Polynomial<f64> {
    let basis = MonomialBasis::new(n, degree);
    Polynomial::from_terms(n, basis.monomials().iter().map(|m| (m.clone(), rng.gen_range(-1.0..1.0))))
}

fn gram_round_trip(seed: u64) -> Result<f64, TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let degree = rng.gen_range(0..=2);
    let size = rng.gen_range(1..=3);
    let factors: Vec<_> = (0..rng.gen_range(1..=3)).map(|_| random_poly(&mut rng, n, degree)).collect();
    let expect = factors.iter().fold(Polynomial::zero(n), |acc, p| &acc + &(p * p));
    let g = GramSos::from_factors(n, degree, &factors).unwrap();
    let mut worst = (&g.expand() - &expect).max_abs_coeff();

    let vectors: Vec<Vec<_>> = (0..rng.gen_range(1..=3))
        .map(|_| (0..size).map(|_| random_poly(&mut rng, n, degree)).collect())
        .collect();
    let big = GramSosMatrix::from_vectors(size, n, degree, &vectors).unwrap().expand();
    for i in 0..size {
        for j in 0..size {
            let e = vectors.iter().fold(Polynomial::zero(n), |acc, u| &acc + &(&u[i] * &u[j]));
            worst = worst.max((big.get(i, j) - &e).max_abs_coeff());
        }
    }
    prop_assert!(worst <= 1e-10, "residual {worst:e}");
    Ok(worst)
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

fn ideal_member(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let t = rng.gen_range(1..=n);
    let gens: Vec<Polynomial<Rational>> = (0..t)
        .map(|_| {
            let lin: Vec<_> = (0..n).map(|_| small_rational(&mut rng)).collect();
            Polynomial::linear(small_rational(&mut rng), &lin)
        })
        .collect();
    let f = gens.iter().fold(Polynomial::zero(n), |acc, l| {
        let basis = MonomialBasis::new(n, 2);
        let qi = Polynomial::from_terms(n, basis.monomials().iter().map(|m| (m.clone(), small_rational(&mut rng))));
        &acc + &(&qi * l)
    });
    match reduce_mod_linear(&f, &gens).unwrap() {
        Reduction::Combination {
            cofactors, remainder, ..
        } => {
            prop_assert!(remainder.is_zero(), "remainder {remainder}");
            let back = cofactors.iter().zip(&gens).fold(remainder, |acc, (c, l)| &acc + &(c * l));
            prop_assert_eq!(back, f);
        }
        Reduction::Unit { multipliers } => {
            let one = multipliers
                .iter()
                .zip(&gens)
                .fold(Polynomial::zero(n), |acc, (c, l)| &acc + &l.scale(c));
            prop_assert_eq!(one, Polynomial::one(n));
        }
    }
    Ok(())
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let r = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&r + r.transpose()) * 0.5
}

fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let r = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &r * r.transpose() + DMatrix::identity(n, n) * 0.1
}

/// A random SDP with strictly feasible primal and dual, so both optima exist.
fn weak_duality(seed: u64) -> Result<f64, TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=4)).collect();
    let m = rng.gen_range(1..=4);
    let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    let mut p = SdpProblem::new(blocks.clone(), sense);
    let x0: Vec<_> = blocks.iter().map(|&n| random_pd(&mut rng, n)).collect();
    let z0: Vec<_> = blocks.iter().map(|&n| random_pd(&mut rng, n)).collect();
    let y0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sign = if sense == Sense::Minimize { 1.0 } else { -1.0 };
    let mut c: Vec<DMatrix<f64>> = z0.iter().map(|z| z * sign).collect();
    for yi in &y0 {
        let a: Vec<_> = blocks.iter().map(|&n| random_symmetric(&mut rng, n)).collect();
        let mut f = Functional::new();
        let mut rhs = 0.0;
        for (k, ak) in a.iter().enumerate() {
            f.add_matrix(k, ak, 1.0);
            rhs += ak.dot(&x0[k]);
            c[k] += ak * *yi;
        }
        p.add_constraint(f, rhs);
    }
    for (k, ck) in c.iter().enumerate() {
        p.objective.add_matrix(k, ck, 1.0);
    }
    let sol = sdp::solve(&p, &Settings::default()).unwrap();
    prop_assert_eq!(sol.status, SdpStatus::Optimal);
    let primal: f64 = c.iter().zip(&sol.x).map(|(ck, xk)| ck.dot(xk)).sum();
    let dual: f64 = p.constraints.iter().zip(&sol.y).map(|(con, yi)| con.rhs * yi).sum();
    let gap = sign * (primal - dual);
    prop_assert!(gap >= -1e-7, "gap {gap:e}");
    Ok(gap)
}

/// A valid membership certificate built from random PSD Gram data, and the same
/// certificate with one Gram entry moved by 1e-3.
fn perturbed_pair(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=2);
    let size = rng.gen_range(1..=3);
    let level = rng.gen_range(0..=1);
    let coeffs: Vec<_> = (0..=n).map(|_| random_symmetric(&mut rng, size)).collect();
    let pencil = LinearPencil::new(coeffs).unwrap();
    let s = GramSos::new(
        MonomialBasis::new(n, level),
        random_pd(&mut rng, basis_len(n, level)),
    )
    .unwrap();
    let big = GramSosMatrix::new(
        size,
        MonomialBasis::new(n, level),
        random_pd(&mut rng, size * basis_len(n, level)),
    )
    .unwrap();
    let target = &s.expand() + &trace_pair(&pencil, &big.expand()).unwrap();
    let cert = MembershipCertificate { target, level, s, big };
    let good = verify_certificate(&pencil, &Certificate::Membership(cert.clone())).unwrap();
    prop_assert!(good.pass, "unperturbed certificate rejected: {good:?}");

    let mut bad = cert;
    let g = if rng.gen_bool(0.5) { &mut bad.s.gram } else { &mut bad.big.gram };
    let (i, j) = (rng.gen_range(0..g.nrows()), rng.gen_range(0..g.nrows()));
    g[(i, j)] += 1e-3;
    if i != j {
        g[(j, i)] += 1e-3;
    }
    let r = verify_certificate(&pencil, &Certificate::Membership(bad)).unwrap();
    prop_assert!(!r.pass, "perturbed certificate accepted");
    Ok(())
}

fn property_suites() -> Outcome {
    let worst_gram = Cell::new(0.0f64);
    runner(100)
        .run(&any::<u64>(), |seed| {
            worst_gram.set(worst_gram.get().max(gram_round_trip(seed)?));
            Ok(())
        })
        .map_err(|e| format!("gram round trip: {e}"))?;
    runner(100)
        .run(&any::<u64>(), ideal_member)
        .map_err(|e| format!("reduce_mod_linear: {e}"))?;
    let worst_gap = Cell::new(f64::INFINITY);
    runner(50)
        .run(&any::<u64>(), |seed| {
            worst_gap.set(worst_gap.get().min(weak_duality(seed)?));
            Ok(())
        })
        .map_err(|e| format!("weak duality: {e}"))?;
    runner(50)
        .run(&any::<u64>(), perturbed_pair)
        .map_err(|e| format!("verifier: {e}"))?;
    Ok(format!(
        "gram residual <= {:.1e}, ideal reconstruction exact, min gap {:.1e}, 50/50 rejected and accepted",
        worst_gram.get(),
        worst_gap.get()
    ))
}

fn boundedness() -> Outcome {
    let cube = cube_pencil::<f64>(2);
    let Search::Found(c) = boundedness_certificate(&cube, 0, &settings()).map_err(|e| e.to_string())? else {
        return Err("cube not certified at level 0".into());
    };
    ensure!(c.level == 0 && (c.bound - 1.0).abs() < 1e-9, "N = {}, level {}", c.bound, c.level);
    let r = verify_certificate(&cube, &Certificate::Boundedness(c)).map_err(|e| e.to_string())?;
    ensure!(r.pass, "cube certificate rejected");
    let line = line();
    let found = boundedness_certificate(&line, 2, &settings()).map_err(|e| e.to_string())?;
    ensure!(found.found().is_none(), "[x] reported bounded");
    Ok("cube N = 1 at level 0; [x] not found for k <= 2".into())
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "first weakly infeasible example", budget: Duration::from_secs(1), run: example_51 },
        Criterion { id: 2, name: "2-infeasible 3x3 pencil", budget: Duration::from_secs(5), run: example_52 },
        Criterion { id: 3, name: "duality gap family", budget: Duration::from_secs(10), run: example_54 },
        Criterion { id: 4, name: "low dimensional certificate", budget: Duration::from_secs(5), run: example_53 },
        Criterion { id: 5, name: "weakly feasible pencil", budget: Duration::from_secs(5), run: example_41 },
        Criterion { id: 6, name: "level bound on sampled pencils", budget: Duration::from_secs(60), run: level_bound_sample },
        Criterion { id: 7, name: "property suites", budget: Duration::from_secs(60), run: property_suites },
        Criterion { id: 8, name: "boundedness", budget: Duration::from_secs(5), run: boundedness },
    ];
    let total = Instant::now();
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over budget {:?}", c.budget)),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {} {tag} [{:.2}s] {}: {detail}", c.id, elapsed.as_secs_f64(), c.name);
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    println!("total {:.2}s", total.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
