//! Feasibility classification of pencils and the certificate searches built on
//! truncated quadratic modules.

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::gram::{self, GramError, GramSos, GramSosMatrix, MembershipProblem};
use crate::linalg;
use crate::pencil::LinearPencil;
use crate::poly::{Monomial, MonomialBasis, Polynomial};
use crate::scalar::{Rational, Scalar};
use crate::sdp::{self, Functional, LmiBlock, LmiStatus, SdpError, SdpProblem, Sense, Settings};
use crate::verify::{self, Certificate, VerifyError};

/// Margin above which a pencil value counts as positive definite.
pub const STRICT_TOL: f64 = 1e-7;
/// Trust-region radii for the strict feasibility test.
pub const TRUST_RADII: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];
/// Shifts `eps` for which feasibility of `A + eps I` is probed.
pub const EPS_PROBES: [f64; 3] = [1e-2, 1e-4, 1e-6];
/// Candidate values of `N` for `N +- x_i` in the module.
pub const BOUND_SCALES: [f64; 5] = [1.0, 1e1, 1e2, 1e3, 1e4];
/// Smallest admissible max-coefficient of a low-dimensionality form.
pub const LOWDIM_MIN_NORM: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Gram(#[from] GramError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Invalid(String),
}

/// `f = s + tr(A S)` with Gram data of degree `level`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipCertificate<T> {
    pub target: Polynomial<T>,
    pub level: usize,
    pub s: GramSos<T>,
    pub big: GramSosMatrix<T>,
}

impl MembershipCertificate<f64> {
    pub fn to_exact(&self) -> MembershipCertificate<Rational> {
        MembershipCertificate {
            target: self.target.to_exact(),
            level: self.level,
            s: self.s.to_exact(),
            big: self.big.to_exact(),
        }
    }
}

/// `-1 = s + tr(A S)`: the pencil has no feasible point.
#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate<T> {
    pub level: usize,
    pub s: GramSos<T>,
    pub big: GramSosMatrix<T>,
    pub residual: f64,
}

/// `-f^2 = s + tr(A S)` with `f` linear and nonzero: the spectrahedron lies in `f = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowDimCertificate<T> {
    pub f: Polynomial<T>,
    pub s: GramSos<T>,
    pub big: GramSosMatrix<T>,
    pub residual: f64,
}

impl<T: Scalar> LowDimCertificate<T> {
    /// Whether the certificate has the pure form `-f^2 = tr(A S)`.
    pub fn is_strict(&self, tol: f64) -> bool {
        linalg::max_abs(&self.s.gram) <= tol
    }
}

/// `N + x_i` and `N - x_i` in the module for every variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessCertificate<T> {
    pub bound: T,
    pub level: usize,
    /// Ordered `N + x_1, N - x_1, N + x_2, ...`.
    pub certs: Vec<MembershipCertificate<T>>,
    pub residual: f64,
}

/// Targets `N + x_1, N - x_1, ..., N - x_n` in certificate order.
pub fn bound_targets<T: Scalar>(nvars: usize, bound: &T) -> Vec<Polynomial<T>> {
    let mut out = Vec::with_capacity(2 * nvars);
    for i in 0..nvars {
        for sign in [1, -1] {
            let mut p = Polynomial::constant(nvars, bound.clone());
            p.add_term(Monomial::var(nvars, i), T::from_i64(sign));
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityClass {
    /// `A(x)` positive definite at the witness.
    StronglyFeasible { witness: Vec<f64>, margin: f64 },
    /// Feasible up to tolerance with no interior point; the witness is a near-boundary point.
    WeaklyFeasible { witness: Vec<f64>, min_eigenvalue: f64 },
    WeaklyInfeasible(InfeasibilityCertificate<f64>),
    StronglyInfeasible(InfeasibilityCertificate<f64>),
    Unknown { reason: String },
}

impl FeasibilityClass {
    pub fn tag(&self) -> &'static str {
        match self {
            FeasibilityClass::StronglyFeasible { .. } => "strongly-feasible",
            FeasibilityClass::WeaklyFeasible { .. } => "weakly-feasible",
            FeasibilityClass::WeaklyInfeasible(_) => "weakly-infeasible",
            FeasibilityClass::StronglyInfeasible(_) => "strongly-infeasible",
            FeasibilityClass::Unknown { .. } => "unknown",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FeasibilityClass::StronglyFeasible { .. } => "strongly feasible".into(),
            FeasibilityClass::WeaklyFeasible { .. } => "weakly feasible".into(),
            FeasibilityClass::WeaklyInfeasible(c) => format!("weakly infeasible, level {}", c.level),
            FeasibilityClass::StronglyInfeasible(_) => "strongly infeasible".into(),
            FeasibilityClass::Unknown { reason } => format!("unknown ({reason})"),
        }
    }

    pub fn level(&self) -> Option<usize> {
        match self {
            FeasibilityClass::WeaklyInfeasible(c) | FeasibilityClass::StronglyInfeasible(c) => Some(c.level),
            _ => None,
        }
    }
}

/// Result of a search that can only succeed constructively.
#[derive(Debug, Clone, PartialEq)]
pub enum Search<C> {
    Found(C),
    /// Nothing within tolerance; `residual` is the best identity residual seen
    /// (infinite when the solver returned an infeasibility ray).
    NotFound { residual: f64 },
}

impl<C> Search<C> {
    pub fn found(&self) -> Option<&C> {
        match self {
            Search::Found(c) => Some(c),
            Search::NotFound { .. } => None,
        }
    }
}

/// Outcome of [`infeasibility_level`].
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSearch {
    Found(InfeasibilityCertificate<f64>),
    /// No certificate at levels `0..=bound`; `residuals[k]` is the best residual at level `k`.
    NoneUpToBound { bound: usize, residuals: Vec<f64> },
}

/// The level `2^min(alpha-1, n) - 1` at which every infeasible pencil has a certificate.
pub fn level_bound(size: usize, nvars: usize) -> usize {
    let e = size.saturating_sub(1).min(nvars).min(62);
    (1usize << e) - 1
}

/// Membership search for `target` in `M_A^(level)`, verified before it is returned.
pub fn find_membership(
    pencil: &LinearPencil<f64>,
    target: &Polynomial<f64>,
    level: usize,
    settings: &Settings,
) -> Result<Search<MembershipCertificate<f64>>, CertError> {
    let m = MembershipProblem {
        pencil: pencil.clone(),
        target: target.clone(),
        level,
    };
    let out = gram::solve_membership(&m, settings)?;
    let Some((s, big)) = out.found else {
        return Ok(Search::NotFound { residual: out.residual });
    };
    let cert = MembershipCertificate {
        target: target.clone(),
        level,
        s,
        big,
    };
    let report = verify::verify_certificate(pencil, &Certificate::Membership(cert.clone()))?;
    if !report.pass {
        return Ok(Search::NotFound {
            residual: report.max_residual(),
        });
    }
    Ok(Search::Found(cert))
}

fn infeasibility_at(
    pencil: &LinearPencil<f64>,
    level: usize,
    settings: &Settings,
) -> Result<Search<InfeasibilityCertificate<f64>>, CertError> {
    let target = Polynomial::constant(pencil.nvars(), -1.0);
    Ok(match find_membership(pencil, &target, level, settings)? {
        Search::Found(c) => {
            let residual = gram::membership_residual(pencil, &target, &c.s, &c.big).max_abs_coeff();
            Search::Found(InfeasibilityCertificate {
                level,
                s: c.s,
                big: c.big,
                residual,
            })
        }
        Search::NotFound { residual } => Search::NotFound { residual },
    })
}

/// Searches `-1 = c + tr(A S)` with constant `S`, i.e. `-1` in `M_A^(0)`.
pub fn check_strong_infeasibility(
    pencil: &LinearPencil<f64>,
    settings: &Settings,
) -> Result<Search<InfeasibilityCertificate<f64>>, CertError> {
    infeasibility_at(pencil, 0, settings)
}

/// Smallest `k <= max_level` with `-1` in `M_A^(k)`. `None` uses the degree bound.
pub fn infeasibility_level(
    pencil: &LinearPencil<f64>,
    max_level: Option<usize>,
    settings: &Settings,
) -> Result<LevelSearch, CertError> {
    levels_from(pencil, 0, max_level, settings)
}

fn levels_from(
    pencil: &LinearPencil<f64>,
    start: usize,
    max_level: Option<usize>,
    settings: &Settings,
) -> Result<LevelSearch, CertError> {
    let bound = max_level.unwrap_or_else(|| level_bound(pencil.size(), pencil.nvars()));
    let mut residuals = Vec::new();
    for k in start..=bound {
        match infeasibility_at(pencil, k, settings)? {
            Search::Found(c) => return Ok(LevelSearch::Found(c)),
            Search::NotFound { residual } => residuals.push(residual),
        }
    }
    Ok(LevelSearch::NoneUpToBound { bound, residuals })
}

/// Best `lambda` with `A(x) - lambda I` PSD over the box `|x_i| <= radius`, with
/// `lambda` capped at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginProbe {
    pub radius: f64,
    pub lambda: f64,
    pub x: Vec<f64>,
    pub status: LmiStatus,
}

fn margin_at(pencil: &LinearPencil<f64>, radius: f64, settings: &Settings) -> Result<MarginProbe, CertError> {
    let n = pencil.nvars();
    let a = pencil.size();
    let mut coeffs: Vec<DMatrix<f64>> = pencil.coeffs()[1..].to_vec();
    coeffs.push(-DMatrix::<f64>::identity(a, a));
    let mut blocks = vec![LmiBlock {
        constant: pencil.coeff(0).clone(),
        coeffs,
    }];
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n + 1];
            c[i] = sign;
            blocks.push(LmiBlock::scalar(radius, &c));
        }
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = -1.0;
    blocks.push(LmiBlock::scalar(1.0, &cap));
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    let sol = sdp::lmi_maximize(&blocks, &b, settings)?;
    Ok(MarginProbe {
        radius,
        lambda: sol.y[n],
        x: sol.y[..n].to_vec(),
        status: sol.status,
    })
}

/// Maximizes the smallest eigenvalue of `A(x)` over growing boxes. Stops at the first
/// strictly positive margin, or once the box constraint is no longer active.
pub fn max_margin(pencil: &LinearPencil<f64>, settings: &Settings) -> Result<MarginProbe, CertError> {
    let mut last = None;
    for &r in &TRUST_RADII {
        let probe = margin_at(pencil, r, settings)?;
        let inner = probe.x.iter().all(|v| v.abs() < 0.5 * r);
        let done = probe.status == LmiStatus::Optimal && (probe.lambda > STRICT_TOL || inner);
        last = Some(probe);
        if done {
            break;
        }
    }
    Ok(last.expect("at least one radius"))
}

/// Sorts a pencil into the four feasibility classes.
///
/// Strict feasibility is decided by the margin search, strong infeasibility by a
/// level-0 certificate, and the rest by the certificate hierarchy up to the degree
/// bound. Shift probes on `A + eps I` corroborate the weakly feasible verdict.
pub fn classify(pencil: &LinearPencil<f64>, settings: &Settings) -> Result<FeasibilityClass, CertError> {
    let probe = max_margin(pencil, settings)?;
    if probe.status == LmiStatus::Optimal && probe.lambda > STRICT_TOL {
        let value = pencil.evaluate(&probe.x).map_err(|e| CertError::Invalid(e.to_string()))?;
        let margin = linalg::min_eigenvalue(&value);
        if margin > 0.0 {
            return Ok(FeasibilityClass::StronglyFeasible {
                witness: probe.x,
                margin,
            });
        }
    }
    if let Search::Found(c) = check_strong_infeasibility(pencil, settings)? {
        return Ok(FeasibilityClass::StronglyInfeasible(c));
    }
    if let LevelSearch::Found(c) = levels_from(pencil, 1, None, settings)? {
        return Ok(FeasibilityClass::WeaklyInfeasible(c));
    }
    // Feasibility of A + eps I is exactly lambda* >= -eps at the largest radius tried.
    let passed: Vec<bool> = EPS_PROBES.iter().map(|&e| probe.lambda >= -e).collect();
    if probe.status != LmiStatus::Optimal || !passed[0] {
        return Ok(FeasibilityClass::Unknown {
            reason: format!(
                "no certificate up to the level bound, but A + {}I is not feasible (margin {:.3e})",
                EPS_PROBES[0], probe.lambda
            ),
        });
    }
    if passed.iter().any(|p| !p) {
        log::warn!(
            "shift probes disagree with the hierarchy (margin {:.3e}); keeping the hierarchy verdict",
            probe.lambda
        );
    }
    let value = pencil.evaluate(&probe.x).map_err(|e| CertError::Invalid(e.to_string()))?;
    Ok(FeasibilityClass::WeaklyFeasible {
        min_eigenvalue: linalg::min_eigenvalue(&value),
        witness: probe.x,
    })
}

/// Searches a linear `f != 0` with `-f^2 = s + tr(A S)` for a quadratic sos-matrix `S`.
///
/// The SDP looks for `U` PSD with `tr U = 1` and `vec_1^T U vec_1 + s + tr(A S) = 0`.
/// The dominant factor of `U` becomes `f`; the rest of `U` is folded into `s`.
pub fn lowdim_certificate(
    pencil: &LinearPencil<f64>,
    settings: &Settings,
) -> Result<Search<LowDimCertificate<f64>>, CertError> {
    let n = pencil.nvars();
    let a = pencil.size();
    let basis = MonomialBasis::new(n, 1);
    let support = MonomialBasis::new(n, 3);
    let nb = basis.len();
    let mut p = SdpProblem::new(vec![nb, nb, a * nb], Sense::Minimize);
    let mut rows = vec![Functional::new(); support.len()];
    gram::add_sos_terms(&mut rows, &support, 0, &basis, 1.0);
    gram::add_sos_terms(&mut rows, &support, 1, &basis, 1.0);
    gram::add_trace_pair_terms(&mut rows, &support, pencil, 2, &basis, 1.0);
    for row in rows {
        p.add_constraint(row, 0.0);
    }
    let mut tr = Functional::new();
    for i in 0..nb {
        tr.add_term(0, i, i, 1.0);
    }
    p.add_constraint(tr, 1.0);
    let res = sdp::solve_feasibility(&p, settings)?;
    if res.infeasible() || res.residual > gram::MEMBERSHIP_TOL {
        return Ok(Search::NotFound { residual: res.residual });
    }
    let u = &res.x[0];
    let w = sdp::psd_factor(u, 0.0).map_err(|e| CertError::Invalid(e.to_string()))?;
    if w.nrows() == 0 {
        return Ok(Search::NotFound { residual: res.residual });
    }
    let top: Vec<f64> = w.row(0).iter().copied().collect();
    let f = Polynomial::linear(top[0], &top[1..]);
    let mut rest = u.clone();
    for i in 0..nb {
        for j in 0..nb {
            rest[(i, j)] -= top[i] * top[j];
        }
    }
    let s = GramSos {
        basis: basis.clone(),
        gram: linalg::project_psd(&(&res.x[1] + linalg::project_psd(&rest))),
    };
    let big = GramSosMatrix {
        size: a,
        basis,
        gram: res.x[2].clone(),
    };
    let mut cert = LowDimCertificate { f, s, big, residual: 0.0 };
    let report = verify::verify_certificate(pencil, &Certificate::LowDim(cert.clone()))?;
    cert.residual = report.max_residual();
    if !report.pass {
        return Ok(Search::NotFound { residual: cert.residual });
    }
    Ok(Search::Found(cert))
}

/// Searches `N +- x_i` in `M_A^(k)` for `k = 0..=max_level` and `N` in [`BOUND_SCALES`].
pub fn boundedness_certificate(
    pencil: &LinearPencil<f64>,
    max_level: usize,
    settings: &Settings,
) -> Result<Search<BoundednessCertificate<f64>>, CertError> {
    let n = pencil.nvars();
    let mut worst = f64::INFINITY;
    'level: for k in 0..=max_level {
        // Membership is monotone in N: a larger N only adds a positive constant to s.
        let mut found = Vec::with_capacity(2 * n);
        let mut scale = 0;
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut hit = None;
                for (si, &big_n) in BOUND_SCALES.iter().enumerate().skip(scale) {
                    let mut target = Polynomial::constant(n, big_n);
                    target.add_term(Monomial::var(n, i), sign);
                    match find_membership(pencil, &target, k, settings)? {
                        Search::Found(c) => {
                            hit = Some(c);
                            scale = si;
                            break;
                        }
                        Search::NotFound { residual } => worst = worst.min(residual),
                    }
                }
                match hit {
                    Some(c) => found.push(c),
                    None => continue 'level,
                }
            }
        }
        let bound = BOUND_SCALES[scale];
        let certs: Vec<MembershipCertificate<f64>> = found
            .into_iter()
            .zip(bound_targets(n, &bound))
            .map(|(mut c, target)| {
                let lift = bound - c.target.constant_term();
                c.s.gram[(0, 0)] += lift;
                c.target = target;
                c
            })
            .collect();
        let mut cert = BoundednessCertificate {
            bound,
            level: k,
            certs,
            residual: 0.0,
        };
        let report = verify::verify_certificate(pencil, &Certificate::Boundedness(cert.clone()))?;
        cert.residual = report.max_residual();
        if report.pass {
            return Ok(Search::Found(cert));
        }
    }
    Ok(Search::NotFound { residual: worst })
}

/// A point `x` with `|x|_inf <= 1` and `sum x_i A_i` positive definite, if one exists.
pub fn pd_in_span(mats: &[DMatrix<f64>], settings: &Settings) -> Result<Option<Vec<f64>>, CertError> {
    let first = mats.first().ok_or_else(|| CertError::Invalid("empty matrix list".into()))?;
    let a = first.nrows();
    if mats.iter().any(|m| m.nrows() != a || m.ncols() != a) {
        return Err(CertError::Invalid("matrices differ in size".into()));
    }
    let mut coeffs = vec![DMatrix::zeros(a, a)];
    coeffs.extend(mats.iter().cloned());
    let pencil = LinearPencil::new(coeffs).map_err(|e| CertError::Invalid(e.to_string()))?;
    let n = mats.len();
    let mut lam = pencil.coeffs()[1..].to_vec();
    lam.push(-DMatrix::<f64>::identity(a, a));
    let mut blocks = vec![LmiBlock {
        constant: DMatrix::zeros(a, a),
        coeffs: lam,
    }];
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n + 1];
            c[i] = sign;
            blocks.push(LmiBlock::scalar(1.0, &c));
        }
    }
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    let sol = sdp::lmi_maximize(&blocks, &b, settings)?;
    if sol.status != LmiStatus::Optimal || sol.y[n] <= STRICT_TOL {
        return Ok(None);
    }
    let x = sol.y[..n].to_vec();
    let value = pencil.evaluate(&x).map_err(|e| CertError::Invalid(e.to_string()))?;
    Ok((linalg::min_eigenvalue(&value) > 0.0).then_some(x))
}


/// A random strongly infeasible pencil: `tr(A_i B) = 0` for `i >= 1` and
/// `tr(A_0 B) = -1` for a random PSD `B`, so `-1 = tr(A(x) B)` identically.
pub fn random_strongly_infeasible<R: Rng>(rng: &mut R, size: usize, nvars: usize) -> LinearPencil<f64> {
    let c = DMatrix::from_fn(size, size, |_, _| rng.gen_range(-1.0..1.0));
    let b = &c * c.transpose();
    let bb = b.dot(&b);
    let mut coeffs = Vec::with_capacity(nvars + 1);
    for i in 0..=nvars {
        let r = DMatrix::from_fn(size, size, |_, _| rng.gen_range(-1.0..1.0));
        let mut m = (&r + r.transpose()) * 0.5;
        let target = if i == 0 { -1.0 } else { 0.0 };
        let shift = (m.dot(&b) - target) / bb;
        m -= &b * shift;
        coeffs.push(m);
    }
    LinearPencil::new(coeffs).expect("square symmetric coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn fm(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn pencil(ms: &[&[&[f64]]]) -> LinearPencil<f64> {
        LinearPencil::new(ms.iter().map(|m| fm(m)).collect()).unwrap()
    }

    #[test]
    fn level_bound_values() {
        assert_eq!(level_bound(1, 5), 0);
        assert_eq!(level_bound(2, 1), 1);
        assert_eq!(level_bound(3, 2), 3);
        assert_eq!(level_bound(3, 1), 1);
        assert_eq!(level_bound(5, 10), 15);
    }

    #[test]
    fn bound_targets_order() {
        let t = bound_targets(2, &2.0);
        let shown: Vec<String> = t.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown.len(), 4);
        assert_eq!(t[0].constant_term(), 2.0);
        assert_eq!(t[1], Polynomial::parse("2 - x1", 2).unwrap());
        assert_eq!(t[2], Polynomial::parse("2 + x2", 2).unwrap());
    }

    #[test]
    fn negative_constant_is_strongly_infeasible() {
        let a = pencil(&[&[&[-1.0]]]);
        let s = &Settings::default();
        let cert = check_strong_infeasibility(&a, s).unwrap();
        assert!(cert.found().is_some());
        assert_eq!(classify(&a, s).unwrap().tag(), "strongly-infeasible");
    }

    #[test]
    fn interior_point_is_strongly_feasible() {
        let a = pencil(&[&[&[1.0, 0.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[0.0, -1.0]]]);
        match classify(&a, &Settings::default()).unwrap() {
            FeasibilityClass::StronglyFeasible { witness, margin } => {
                assert!(margin > 0.0);
                assert!(witness[0].abs() < 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn half_line_is_unbounded() {
        let a = pencil(&[&[&[0.0]], &[&[1.0]]]);
        let r = boundedness_certificate(&a, 1, &Settings::default()).unwrap();
        assert!(r.found().is_none());
    }

    #[test]
    fn segment_is_bounded() {
        // 1 - x^2 >= 0 written as diag(1 + x, 1 - x).
        let a = pencil(&[&[&[1.0, 0.0], &[0.0, 1.0]], &[&[1.0, 0.0], &[0.0, -1.0]]]);
        let cert = boundedness_certificate(&a, 0, &Settings::default()).unwrap();
        let cert = cert.found().expect("bounded");
        assert_eq!(cert.bound, 1.0);
        assert_eq!(cert.level, 0);
    }

    #[test]
    fn pd_in_span_detects_definite_combinations() {
        let s = &Settings::default();
        let x = pd_in_span(&[fm(&[&[1.0, 0.0], &[0.0, -1.0]]), fm(&[&[0.0, 0.0], &[0.0, 1.0]])], s).unwrap();
        let x = x.expect("diag(x1, x2 - x1) is definite for x2 > x1 > 0");
        assert!(x[0] > 0.0 && x[1] > x[0]);
        assert!(pd_in_span(&[fm(&[&[0.0, 1.0], &[1.0, 0.0]])], s).unwrap().is_none());
        assert!(pd_in_span(&[], s).is_err());
    }

    #[test]
    fn random_generator_has_a_level_zero_certificate() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let a = random_strongly_infeasible(&mut rng, 3, 2);
        assert_eq!((a.size(), a.nvars()), (3, 2));
        let cert = check_strong_infeasibility(&a, &Settings::default()).unwrap();
        assert!(cert.found().is_some());
    }
}
