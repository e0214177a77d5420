//! Necessary-condition tests for TCF classes.
//!
//! Every test can refute membership; none can prove it. A `Pass` means the
//! candidate survived the test on the evaluation grid and nothing more.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{Endpoint, Quadrature};
use crate::operators::neg_deriv_sqrt;
use crate::tcf_models::{erfc_power, RadialFunction};

/// Evidence attached to a failed test.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Point(f64),
    /// Midpoint convexity violated: f(b) > (f(a) + f(c))/2.
    Triple(f64, f64, f64),
    /// Derivative of the given order has the wrong sign at t.
    Order {
        order: usize,
        at: f64,
        value: f64,
    },
    /// Triangle inequality of 1 - χ violated for this pair.
    Pair {
        s: f64,
        t: f64,
    },
    /// Sites whose Gram matrix has a negative eigenvalue.
    Configuration {
        points: Vec<Vec<f64>>,
        min_eigenvalue: f64,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Point(t) => write!(f, "t={t}"),
            Witness::Triple(a, b, c) => write!(f, "midpoint ({a}; {b}; {c})"),
            Witness::Order { order, at, value } => {
                write!(f, "order {order} at t={at}: signed derivative {value:e}")
            }
            Witness::Pair { s, t } => write!(f, "(s;t)=({s}; {t})"),
            Witness::Configuration { points, min_eigenvalue } => {
                write!(f, "min eigenvalue {min_eigenvalue:e} at [")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    let c: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
                    write!(f, "({})", c.join(" "))?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    Inconclusive(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

/// log-spaced grid with `n` points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

pub fn default_grid() -> Vec<f64> {
    log_grid(1e-3, 1e2, 200)
}

/// Grid for tests on -φ'(√t). Jets composed through √t lose about k digits
/// per decade of t at order k, so the grid starts at 1e-2.
pub fn sqrt_composed_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 200)
}

/// Midpoint convexity of f at every grid point, with half-widths of 50%, 10%
/// and 1% of the point.
fn midpoint_convexity(f: &dyn Fn(f64) -> f64, grid: &[f64], tol: f64) -> Verdict {
    let scale = grid.iter().map(|&t| f(t).abs()).fold(0.0, f64::max).max(1e-300);
    for &t in grid {
        let mid = f(t);
        for rho in [0.5, 0.1, 0.01] {
            let h = rho * t;
            let (a, c) = (f(t - h), f(t + h));
            if !(mid.is_finite() && a.is_finite() && c.is_finite()) {
                return Verdict::Inconclusive(format!("non-finite value near t={t}"));
            }
            if mid > 0.5 * (a + c) + tol * scale {
                return Verdict::Fail(Witness::Triple(t - h, t, t + h));
            }
        }
    }
    Verdict::Pass
}

/// T¹_MMMr: χ(0) = 1, convex, and decaying to 0.
///
/// Convexity is checked by the midpoint inequality on a dyadic grid of
/// [0, t_max]; the limit counts as 0 once χ(t_max) ≤ `limit_tol`.
pub fn test_t1_mmmr(chi: &RadialFunction, t_max: f64, levels: u32, limit_tol: f64) -> Verdict {
    let at0 = chi.eval(0.0);
    if (at0 - 1.0).abs() > 1e-12 {
        return Verdict::Fail(Witness::Point(0.0));
    }
    for level in 1..=levels {
        let n = 1usize << level;
        let h = t_max / n as f64;
        for i in 1..n {
            let t = i as f64 * h;
            let (a, b, c) = (chi.eval(t - h), chi.eval(t), chi.eval(t + h));
            if b > 0.5 * (a + c) + 1e-12 {
                return Verdict::Fail(Witness::Triple(t - h, t, t + h));
            }
        }
    }
    let end = chi.eval(t_max);
    if end <= limit_tol {
        Verdict::Pass
    } else if end < chi.eval(0.5 * t_max) {
        Verdict::Inconclusive(format!(
            "χ({t_max}) = {end} still decreasing above the limit tolerance {limit_tol}"
        ))
    } else {
        Verdict::Fail(Witness::Point(t_max))
    }
}

/// Highest order checked by finite differences.
pub const DIFF_MAX_ORDER: usize = 8;
/// Highest order checked through a jet. erfc(t^0.6) first shows a wrong sign
/// at order 24, near t = 11.
pub const JET_MAX_ORDER: usize = 32;

/// (-1)^k f^{(k)} ≥ 0 for k = 1..=max_order on the grid.
///
/// Exact through a jet when f has one (up to [`JET_MAX_ORDER`]), otherwise
/// finite differences with error bars (up to [`DIFF_MAX_ORDER`]). A declared
/// kink is a failure: completely monotone functions are analytic on (0, ∞).
///
/// The tolerance at a grid point is 1e-10 of the largest magnitude among its
/// neighbours, so a wrong sign in the tail is not hidden by the size of the
/// derivatives near 0.
pub fn test_completely_monotone(f: &RadialFunction, max_order: usize, grid: &[f64]) -> Verdict {
    let cap = if f.has_jet() { JET_MAX_ORDER } else { DIFF_MAX_ORDER };
    let max_order = max_order.min(cap);
    if let Some(&k) = f.kinks().iter().find(|&&k| k > 0.0) {
        return Verdict::Fail(Witness::Point(k));
    }
    let mut straddle = None;
    for order in 1..=max_order {
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let mut vals = Vec::with_capacity(grid.len());
        for &t in grid {
            match f.derivative(order, t) {
                Ok(e) => vals.push((t, sign * e.value, e.abs_error)),
                Err(e) => return Verdict::Inconclusive(format!("order {order} at t={t}: {e}")),
            }
        }
        for (i, &(t, v, err)) in vals.iter().enumerate() {
            let window = &vals[i.saturating_sub(4)..(i + 5).min(vals.len())];
            let tol = 1e-10 * window.iter().map(|w| w.1.abs()).fold(0.0, f64::max);
            if v + err < -tol {
                return Verdict::Fail(Witness::Order { order, at: t, value: v });
            }
            if v - err < -tol && straddle.is_none() {
                straddle = Some((order, t));
            }
        }
    }
    match straddle {
        Some((order, t)) => Verdict::Inconclusive(format!(
            "order {order} derivative at t={t} is zero within its error bar"
        )),
        None => Verdict::Pass,
    }
}

/// T^∞_MMMr: t ↦ -φ'(√t) completely monotone.
pub fn test_tinfty_mmmr(phi: &RadialFunction, max_order: usize, grid: &[f64]) -> Verdict {
    if let Some(&k) = phi.kinks().iter().find(|&&k| k > 0.0) {
        return Verdict::Fail(Witness::Point(k * k));
    }
    match neg_deriv_sqrt(phi) {
        Ok(g) => test_completely_monotone(&g, max_order, grid),
        Err(e) => Verdict::Inconclusive(e.to_string()),
    }
}

/// η(s + t) ≤ η(s) + η(t) and η(|s - t|) ≤ η(s) + η(t) for η = 1 - χ.
pub fn test_triangle(chi: &RadialFunction, pairs: &[(f64, f64)]) -> Verdict {
    let eta = |t: f64| 1.0 - chi.eval(t.abs());
    for &(s, t) in pairs {
        let bound = eta(s) + eta(t) + 1e-12;
        if eta(s + t) > bound || eta(s - t) > bound {
            return Verdict::Fail(Witness::Pair { s, t });
        }
    }
    Verdict::Pass
}

/// All pairs from a grid.
pub fn grid_pairs(grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for (i, &s) in grid.iter().enumerate() {
        for &t in &grid[..=i] {
            out.push((s, t));
        }
    }
    out
}

fn min_eigenvalue(chi: &RadialFunction, points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        let r: f64 = points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        chi.eval(r)
    });
    gram.symmetric_eigenvalues().min()
}

/// Gram matrix of an explicit configuration.
pub fn test_configuration(chi: &RadialFunction, points: &[Vec<f64>]) -> Verdict {
    if points.len() < 2 {
        return Verdict::Pass;
    }
    let min = min_eigenvalue(chi, points);
    if min < -1e-9 {
        Verdict::Fail(Witness::Configuration {
            points: points.to_vec(),
            min_eigenvalue: min,
        })
    } else {
        Verdict::Pass
    }
}

/// Random configurations of `n_points` sites in a cube of ℝ^d whose side is
/// drawn log-uniformly around the support (or [0.1, 10] without one).
pub fn test_positive_definite(chi: &RadialFunction, d: usize, n_configs: usize, n_points: usize, seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = match chi.support_bound() {
        Some(b) => (0.25 * b, 2.0 * b),
        None => (0.1, 10.0),
    };
    for _ in 0..n_configs {
        let side = (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp();
        let points: Vec<Vec<f64>> = (0..n_points)
            .map(|_| (0..d).map(|_| side * rng.random::<f64>()).collect())
            .collect();
        let v = test_configuration(chi, &points);
        if v.is_fail() {
            return v;
        }
    }
    Verdict::Pass
}

/// Necessary condition for H_3: t ↦ -φ'(√t) convex.
pub fn test_h3_condition(phi: &RadialFunction, grid: &[f64]) -> Verdict {
    let (g, tol): (Box<dyn Fn(f64) -> f64>, f64) = match neg_deriv_sqrt(phi) {
        Ok(g) => (Box::new(move |t| g.eval(t)), 1e-10),
        Err(_) => {
            let p = phi.clone();
            (
                Box::new(move |t: f64| p.derivative(1, t.sqrt()).map_or(f64::NAN, |e| -e.value)),
                1e-7,
            )
        }
    };
    midpoint_convexity(&*g, grid, tol)
}

/// c_φ(t) = ∫_0^t √(v/(t - v)) (-φ'(1/√v)) dv, computed with v = t(1 - w²).
pub fn h2_transform(phi: &RadialFunction, t: f64) -> crate::error::Result<f64> {
    let slope = |x: f64| -> f64 {
        if !x.is_finite() {
            return 0.0;
        }
        phi.derivative(1, x)
            .or_else(|_| phi.one_sided_derivative(1, x, crate::numerics::Side::Right))
            .map_or(f64::NAN, |e| -e.value)
    };
    let cuts: Vec<f64> = phi
        .kinks()
        .iter()
        .filter_map(|&k| {
            let w2 = 1.0 - 1.0 / (t * k * k);
            (w2 > 0.0 && w2 < 1.0).then(|| w2.sqrt())
        })
        .collect();
    let est = Quadrature::new(1e-12)
        .rel_tol(1e-11)
        .right(Endpoint::Singular(0.5))
        .breakpoints(&cuts)
        .integrate(
            |w| {
                let v = t * (1.0 - w * w);
                if v <= 0.0 {
                    return 0.0;
                }
                2.0 * t * (1.0 - w * w).sqrt() * slope(1.0 / v.sqrt())
            },
            0.0,
            1.0,
        )?;
    Ok(est.value)
}

/// Necessary condition for H_2: c_φ convex.
pub fn test_h2_condition(phi: &RadialFunction, grid: &[f64]) -> Verdict {
    let c = |t: f64| h2_transform(phi, t).unwrap_or(f64::NAN);
    midpoint_convexity(&c, grid, 1e-8)
}

/// Conclusion about one class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassVerdict {
    Member(String),
    NotMember(String),
    NotRefuted,
    Unknown(String),
}

impl fmt::Display for ClassVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassVerdict::Member(r) => write!(f, "member ({r})"),
            ClassVerdict::NotMember(r) => write!(f, "not a member ({r})"),
            ClassVerdict::NotRefuted => write!(f, "not refuted"),
            ClassVerdict::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub name: String,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Test outcomes plus class-level conclusions for one candidate.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub function: String,
    pub dim: usize,
    pub tests: Vec<TestResult>,
    pub classes: Vec<(String, ClassVerdict)>,
    pub grid: Vec<f64>,
}

impl MembershipReport {
    pub fn verdict(&self, test: &str) -> Option<&Verdict> {
        self.tests.iter().find(|r| r.name == test).map(|r| &r.verdict)
    }

    pub fn class(&self, name: &str) -> Option<&ClassVerdict> {
        self.classes.iter().find(|c| c.0 == name).map(|c| &c.1)
    }

    /// `kind,name,verdict,witness,tolerance` rows behind a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,name,verdict,witness,tolerance\n");
        for r in &self.tests {
            let detail = match &r.verdict {
                Verdict::Pass => String::new(),
                Verdict::Fail(w) => w.to_string(),
                Verdict::Inconclusive(why) => why.clone(),
            };
            s.push_str(&format!(
                "test,{},{},\"{}\",{:e}\n",
                r.name,
                r.verdict.label(),
                detail.replace('"', "'"),
                r.tolerance
            ));
        }
        for (name, v) in &self.classes {
            let (label, why) = match v {
                ClassVerdict::Member(w) => ("member", w.as_str()),
                ClassVerdict::NotMember(w) => ("not-member", w.as_str()),
                ClassVerdict::NotRefuted => ("not-refuted", ""),
                ClassVerdict::Unknown(w) => ("unknown", w.as_str()),
            };
            s.push_str(&format!("class,{name},{label},\"{}\",\n", why.replace('"', "'")));
        }
        s
    }
}

fn from_test(v: &Verdict, what: &str) -> ClassVerdict {
    match v {
        Verdict::Pass => ClassVerdict::NotRefuted,
        Verdict::Fail(w) => ClassVerdict::NotMember(format!("{what} fails at {w}")),
        Verdict::Inconclusive(r) => ClassVerdict::Unknown(r.clone()),
    }
}

/// Runs every test on χ and derives class verdicts. `seed` drives the
/// positive-definiteness configurations.
pub fn classify(chi: &RadialFunction, d: usize, seed: u64) -> MembershipReport {
    let grid = default_grid();
    let pair_grid = log_grid(1e-2, 10.0, 25);
    let mut tests = vec![
        TestResult {
            name: "T1_MMMr".into(),
            verdict: test_t1_mmmr(chi, 100.0, 12, 0.05),
            tolerance: 1e-12,
        },
        TestResult {
            name: "completely_monotone".into(),
            verdict: test_completely_monotone(chi, JET_MAX_ORDER, &grid),
            tolerance: 1e-10,
        },
        TestResult {
            name: "Tinfty_MMMr".into(),
            verdict: test_tinfty_mmmr(chi, 6, &sqrt_composed_grid()),
            tolerance: 1e-10,
        },
        TestResult {
            name: "triangle".into(),
            verdict: test_triangle(chi, &grid_pairs(&pair_grid)),
            tolerance: 1e-12,
        },
        TestResult {
            name: "positive_definite".into(),
            verdict: test_positive_definite(chi, d, 50, 8, seed),
            tolerance: 1e-9,
        },
        TestResult {
            name: "H3".into(),
            verdict: test_h3_condition(chi, &grid),
            tolerance: 1e-10,
        },
    ];
    if d == 2 {
        tests.push(TestResult {
            name: "H2".into(),
            verdict: test_h2_condition(chi, &log_grid(1e-2, 20.0, 60)),
            tolerance: 1e-8,
        });
    }
    let get = |n: &str| tests.iter().find(|r| r.name == n).map(|r| r.verdict.clone()).unwrap();
    let mut classes = Vec::new();
    let tcf_refuted = [get("triangle"), get("positive_definite")]
        .iter()
        .find(|v| v.is_fail())
        .cloned();
    if let Some(Verdict::Fail(w)) = &tcf_refuted {
        classes.push(("TCF".into(), ClassVerdict::NotMember(format!("refuted at {w}"))));
    } else {
        classes.push(("TCF".into(), ClassVerdict::NotRefuted));
    }
    classes.push((
        "MPS".into(),
        from_test(&get("completely_monotone"), "complete monotonicity"),
    ));
    classes.push(("T1_MMMr".into(), from_test(&get("T1_MMMr"), "convexity")));
    classes.push((
        "Tinfty_MMMr".into(),
        from_test(&get("Tinfty_MMMr"), "complete monotonicity of -φ'(√t)"),
    ));
    if d == 3 {
        classes.push(("H3".into(), from_test(&get("H3"), "convexity of -φ'(√t)")));
    }
    if d == 2 {
        classes.push(("H2".into(), from_test(&get("H2"), "convexity of c")));
    }
    if let Some(b) = chi.support_bound() {
        classes.push((
            "VBR".into(),
            ClassVerdict::NotMember(format!("compact support within [0, {b}]")),
        ));
    }
    MembershipReport {
        function: chi.name().to_string(),
        dim: d,
        tests,
        classes,
        grid,
    }
}

/// [`classify`] for erfc(t^α), with the known verdicts for that family:
/// BR iff α ∈ (0, 1], MPS ∩ BR iff α ∈ (0, 1/2].
pub fn classify_erfc_power(alpha: f64, d: usize, seed: u64) -> MembershipReport {
    let mut rep = classify(&erfc_power(alpha), d, seed);
    let br = if alpha > 0.0 && alpha <= 1.0 {
        ClassVerdict::Member(format!("erfc(t^α) with α = {alpha} ≤ 1"))
    } else {
        ClassVerdict::NotMember(format!("erfc(t^α) with α = {alpha} > 1"))
    };
    let mps = if alpha > 0.0 && alpha <= 0.5 {
        ClassVerdict::Member(format!("erfc(t^α) with α = {alpha} ≤ 1/2"))
    } else {
        ClassVerdict::NotMember(format!("erfc(t^α) with α = {alpha} > 1/2"))
    };
    rep.classes.retain(|c| c.0 != "MPS");
    rep.classes.push(("BR".into(), br));
    rep.classes.push(("MPS".into(), mps));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{chi_d_radial, phi_d_radial};
    use crate::tcf_models::{erfc_sqrt, exponential, h_d_radial, tent};

    fn bumpy() -> RadialFunction {
        RadialFunction::new("bump", |t: f64| {
            (-t).exp() + 0.05 * (-(t - 1.0).powi(2) / 0.01).exp() * (t > 0.5) as u8 as f64
        })
    }

    #[test]
    fn t1() {
        assert!(test_t1_mmmr(&tent(), 100.0, 12, 0.05).is_pass());
        assert!(test_t1_mmmr(&exponential(1.0), 100.0, 12, 0.05).is_pass());
        assert!(matches!(
            test_t1_mmmr(&bumpy(), 100.0, 12, 0.05),
            Verdict::Fail(Witness::Triple(..))
        ));
    }

    #[test]
    fn complete_monotonicity() {
        let g = default_grid();
        assert!(test_completely_monotone(&exponential(1.0), 8, &g).is_pass());
        assert!(test_completely_monotone(&erfc_sqrt(), 6, &g).is_pass());
        match test_completely_monotone(&erfc_power(1.0), 6, &g) {
            Verdict::Fail(Witness::Order { order, .. }) => assert_eq!(order, 3),
            v => panic!("{v:?}"),
        }
        let fd = RadialFunction::new("e^-t", |t: f64| (-t).exp());
        assert!(!test_completely_monotone(&fd, 4, &log_grid(0.1, 5.0, 20)).is_fail());
        assert!(!test_completely_monotone(&fd, 20, &log_grid(0.1, 5.0, 20)).is_fail());
    }

    #[test]
    fn erfc_power_is_completely_monotone_iff_alpha_at_most_half() {
        let g = default_grid();
        for i in 1..=10 {
            let alpha = i as f64 / 10.0;
            let v = test_completely_monotone(&erfc_power(alpha), JET_MAX_ORDER, &g);
            if alpha <= 0.5 {
                assert!(v.is_pass(), "alpha={alpha}: {v:?}");
            } else {
                assert!(v.is_fail(), "alpha={alpha}: {v:?}");
            }
        }
    }

    #[test]
    fn tinfty() {
        let g = sqrt_composed_grid();
        assert!(test_tinfty_mmmr(&erfc_power(1.0), 6, &g).is_pass());
        assert!(test_tinfty_mmmr(&exponential(0.5), 6, &g).is_pass());
        assert!(test_tinfty_mmmr(&tent(), 6, &g).is_fail());
    }

    #[test]
    fn triangle() {
        assert!(test_triangle(&erfc_sqrt(), &[(1.0, 1.0)]).is_pass());
        assert!(test_triangle(&RadialFunction::new("1", |_| 1.0), &[(0.3, 2.0)]).is_pass());
        let flat = RadialFunction::new("1-t^3", |t: f64| (1.0 - t.powi(3)).max(0.0));
        assert_eq!(
            test_triangle(&flat, &[(0.5, 0.5)]),
            Verdict::Fail(Witness::Pair { s: 0.5, t: 0.5 })
        );
    }

    #[test]
    fn positive_definiteness() {
        assert!(test_positive_definite(&erfc_sqrt(), 3, 50, 8, 1).is_pass());
        assert!(test_configuration(&erfc_sqrt(), &[vec![0.0, 0.0]]).is_pass());
        let flat = RadialFunction::new("1-t^3", |t: f64| (1.0 - t.powi(3)).max(0.0));
        let collinear = vec![vec![0.0], vec![0.5], vec![1.0]];
        assert!(test_configuration(&flat, &collinear).is_fail());
    }

    #[test]
    fn gneiting_conditions() {
        let g = default_grid();
        for d in 2..=4 {
            assert!(test_h3_condition(&phi_d_radial(d), &g).is_fail(), "d={d}");
        }
        assert!(test_h3_condition(&chi_d_radial(3), &g).is_fail());
        assert!(test_h3_condition(&exponential(1.0), &g).is_pass());
        let c = h2_transform(&phi_d_radial(3), 1.7).unwrap();
        let want = crate::operators::counterexample_c(1.7, 3).unwrap();
        assert!((c - want).abs() < 1e-9, "{c} vs {want}");
        assert!(test_h2_condition(&phi_d_radial(2), &log_grid(0.05, 20.0, 60)).is_fail());
    }

    #[test]
    fn classification() {
        let r = classify_erfc_power(0.5, 2, 3);
        assert!(matches!(r.class("MPS"), Some(ClassVerdict::Member(_))));
        assert!(r.verdict("Tinfty_MMMr").unwrap().is_pass());
        let r = classify_erfc_power(0.75, 2, 3);
        assert!(matches!(r.class("BR"), Some(ClassVerdict::Member(_))));
        assert!(matches!(r.class("MPS"), Some(ClassVerdict::NotMember(_))));
        let h = classify(&h_d_radial(3), 3, 3);
        assert!(matches!(h.class("VBR"), Some(ClassVerdict::NotMember(_))));
        assert!(h.verdict("T1_MMMr").unwrap().is_pass());
        assert!(h.to_csv().starts_with("kind,name,verdict"));
    }
}
