//! Self-verification suites: algebraic identities and rotation invariance.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::angular::{clebsch_gordan, wigner_d_matrix, EulerAngles, HalfInt, TensorOperator};
use crate::error::Result;
use crate::invariants::{verify_invariance, PAIRWISE_TOL};
use crate::multiaxial::antipodal_closure_defect;
use crate::sampling::{random_density_matrix, random_euler, random_pure, random_spherical_tensor};

use super::format::fmt_f64;

pub const ALGEBRA_TOL: f64 = 1e-12;
pub const CLOSURE_TOL: f64 = 1e-8;

/// Deliberate defects for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Scales every tensor operator by `1 + 1e-3`.
    TauNormalization,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tau-normalization" => Ok(Fault::TauNormalization),
            _ => Err(format!("unknown fault `{s}` (known: tau-normalization)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckOptions {
    pub seed: u64,
    pub trials: usize,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// First failing case, enough to replay it.
    pub failure: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteResult>,
    pub warnings: Vec<String>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failed_suites(&self) -> Vec<&str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<22} {}  cases {:>6}  max deviation {}  (tol {:e})",
                s.name,
                if s.passed { "pass" } else { "FAIL" },
                s.cases,
                fmt_f64(s.max_deviation),
                s.tolerance
            );
            if let Some(f) = &s.failure {
                let _ = writeln!(out, "  replay: {f}");
            }
        }
        let _ = writeln!(out, "{}", if self.passed() { "selfcheck passed" } else { "selfcheck FAILED" });
        out
    }
}

struct Tracker {
    result: SuiteResult,
}

impl Tracker {
    fn new(name: &str, tolerance: f64) -> Self {
        Tracker {
            result: SuiteResult {
                name: name.to_string(),
                cases: 0,
                max_deviation: 0.0,
                tolerance,
                passed: true,
                failure: None,
            },
        }
    }

    fn record(&mut self, deviation: f64, case: impl FnOnce() -> Value) {
        let r = &mut self.result;
        r.cases += 1;
        r.max_deviation = r.max_deviation.max(deviation);
        if (deviation.is_nan() || deviation > r.tolerance) && r.failure.is_none() {
            r.passed = false;
            let mut case = case();
            case["deviation"] = json!(deviation);
            r.failure = Some(case);
        }
    }

    fn fail(&mut self, case: Value) {
        self.result.passed = false;
        self.result.failure.get_or_insert(case);
    }
}

fn tensor_operators(j: HalfInt, fault: Option<Fault>) -> Result<Vec<TensorOperator>> {
    let mut basis = TensorOperator::basis(j)?;
    if fault == Some(Fault::TauNormalization) {
        for op in &mut basis {
            op.matrix *= Complex64::new(1.0 + 1e-3, 0.0);
        }
    }
    Ok(basis)
}

fn tau_suite(fault: Option<Fault>) -> Result<SuiteResult> {
    let mut t = Tracker::new("tau-orthogonality", ALGEBRA_TOL);
    for tj in 0..=6 {
        let j = HalfInt::from_twice(tj);
        let basis = tensor_operators(j, fault)?;
        let dim = j.dim() as f64;
        for a in &basis {
            for b in &basis {
                let overlap = (a.matrix.adjoint() * &b.matrix).trace();
                let expected = if a.k == b.k && a.q == b.q { dim } else { 0.0 };
                t.record((overlap - expected).norm(), || {
                    json!({"twice_j": tj, "k": a.k, "q": a.q, "k2": b.k, "q2": b.q, "check": "orthogonality"})
                });
            }
            let partner = basis.iter().find(|o| o.k == a.k && o.q == -a.q).expect("basis is complete");
            let sign = if a.q % 2 == 0 { 1.0 } else { -1.0 };
            let defect = (a.matrix.adjoint() - partner.matrix.scale(sign)).camax();
            t.record(defect, || json!({"twice_j": tj, "k": a.k, "q": a.q, "check": "conjugation"}));
        }
    }
    Ok(t.result)
}

fn cg_suite() -> Result<SuiteResult> {
    let mut t = Tracker::new("cg-orthogonality", ALGEBRA_TOL);
    for tj1 in 0..=4 {
        for tj2 in 0..=4 {
            let (j1, j2) = (HalfInt::from_twice(tj1), HalfInt::from_twice(tj2));
            let totals: Vec<HalfInt> = ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2).map(HalfInt::from_twice).collect();
            let states: Vec<(HalfInt, HalfInt)> = totals
                .iter()
                .flat_map(|&jt| jt.projections().map(move |m| (jt, m)))
                .collect();
            let mut gram = DMatrix::<f64>::zeros(states.len(), states.len());
            for m1 in j1.projections() {
                for m2 in j2.projections() {
                    let column: Vec<f64> = states
                        .iter()
                        .map(|&(jt, m)| clebsch_gordan(j1, j2, jt, m1, m2, m))
                        .collect::<Result<_>>()?;
                    for (a, ca) in column.iter().enumerate() {
                        for (b, cb) in column.iter().enumerate() {
                            gram[(a, b)] += ca * cb;
                        }
                    }
                }
            }
            let defect = (gram - DMatrix::identity(states.len(), states.len())).amax();
            t.record(defect, || json!({"twice_j1": tj1, "twice_j2": tj2}));
        }
    }
    Ok(t.result)
}

fn wigner_suite(rng: &mut ChaCha8Rng, trials: usize) -> Result<SuiteResult> {
    let mut t = Tracker::new("wigner-unitarity", ALGEBRA_TOL);
    let mut angles = vec![EulerAngles::new(0.3, 1.1, -2.0), EulerAngles::new(4.0, 3.0, 0.5)];
    angles.extend((0..trials).map(|_| random_euler(rng)));
    for tj in 0..=6 {
        let j = HalfInt::from_twice(tj);
        for &a in &angles {
            let d = wigner_d_matrix(j, a)?;
            let n = j.dim();
            let defect = (d.adjoint() * &d - DMatrix::<Complex64>::identity(n, n)).camax();
            t.record(defect, || json!({"twice_j": tj, "angles": a}));
        }
    }
    Ok(t.result)
}

fn closure_suite(rng: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut t = Tracker::new("root-closure", CLOSURE_TOL);
    for k in 1..=4 {
        for _ in 0..trials {
            let tensor = random_spherical_tensor(k, rng);
            match antipodal_closure_defect(&tensor) {
                Ok(d) => t.record(d, || json!({"k": k, "components": tensor.components()})),
                Err(e) => t.fail(json!({"k": k, "components": tensor.components(), "error": e.to_string()})),
            }
        }
    }
    t.result
}

fn invariance_suite(rng: &mut ChaCha8Rng, seed: u64, trials: usize) -> SuiteResult {
    let mut t = Tracker::new("rotation-invariance", PAIRWISE_TOL);
    for tj in 1..=4 {
        let j = HalfInt::from_twice(tj);
        for (kind, rho) in [("mixed", random_density_matrix(j, rng)), ("pure", random_pure(j, rng))] {
            let case = |extra: Value| {
                let rows: Vec<Vec<[f64; 2]>> = rho
                    .matrix()
                    .row_iter()
                    .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                    .collect();
                let mut v = json!({"twice_j": tj, "kind": kind, "seed": seed, "state": rows});
                v["detail"] = extra;
                v
            };
            match verify_invariance(&rho, trials, seed ^ (tj as u64) << 8) {
                Ok(report) => {
                    let deviation = if report.passed() { report.max_deviation() } else { f64::INFINITY };
                    let failure = report.failures.first().cloned();
                    t.record(deviation, || case(json!(failure)));
                }
                Err(e) => t.fail(case(json!(e.to_string()))),
            }
        }
    }
    t.result
}

pub fn selfcheck(options: SelfcheckOptions) -> Result<SelfcheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut warnings = Vec::new();
    if options.trials == 0 {
        warnings.push("trials = 0: randomized suites ran no cases".to_string());
    }
    let suites = vec![
        tau_suite(options.fault)?,
        cg_suite()?,
        wigner_suite(&mut rng, options.trials)?,
        closure_suite(&mut rng, options.trials),
        invariance_suite(&mut rng, options.seed, options.trials),
    ];
    Ok(SelfcheckReport {
        seed: options.seed,
        trials: options.trials,
        suites,
        warnings,
    })
}
