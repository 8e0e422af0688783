//! Inequality checkers. Every check returns an [`InequalityReport`] for a
//! claim of the form `lhs ≤ rhs`; claims stated the other way round are
//! recorded with the sides swapped so that `slack = rhs − lhs` throughout.

mod classical;
mod concavity;
mod ssa;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use classical::{
    check_classical_mutual_info, check_convexity_cl_minus_q, check_cq_chain, check_cqq,
    check_holevo, check_improved_subadd, conditional_states, counterexample_report,
    counterexample_two_sided,
};
pub use concavity::{check_concave_map, check_gibbs_variational, trace_exp_map, ConcavityInstance};
pub use ssa::{
    check_cpt_monotonicity, check_sandwich, check_ssa, check_stronger_ssa, stronger_ssa_exploratory,
};

/// Mixing weights used for convexity and concavity checks.
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];

/// Meta key marking a report whose claim is expected to fail.
pub const EXPECTED_VIOLATION: &str = "expected-violation";

/// `1e-8 · max(1, |lhs|, |rhs|)`.
pub fn default_tol(lhs: f64, rhs: f64) -> f64 {
    let scale = [1.0, lhs.abs(), rhs.abs()]
        .into_iter()
        .filter(|x| x.is_finite())
        .fold(1.0, f64::max);
    1e-8 * scale
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub seed: Option<u64>,
    pub dims: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
    pub status: Status,
    pub meta: BTreeMap<String, Value>,
}

impl InequalityReport {
    /// Report for the claim `lhs ≤ rhs` with the default tolerance.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, dims: &[usize]) -> Self {
        let tol = default_tol(lhs, rhs);
        let mut r = Self {
            name: name.into(),
            seed: None,
            dims: dims.to_vec(),
            lhs,
            rhs,
            slack: rhs - lhs,
            tol,
            pass: false,
            status: Status::Ok,
            meta: BTreeMap::new(),
        };
        r.pass = r.recompute_pass();
        r
    }

    /// A check that could not be evaluated (e.g. infinite relative entropy).
    pub fn skipped(name: impl Into<String>, dims: &[usize], reason: &str) -> Self {
        let mut meta = BTreeMap::new();
        meta.insert("skip_reason".to_string(), Value::from(reason));
        Self {
            name: name.into(),
            seed: None,
            dims: dims.to_vec(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            tol: 0.0,
            pass: false,
            status: Status::Skipped,
            meta,
        }
    }

    /// `pass ⇔ slack ≥ −tol`, recomputed from `lhs`, `rhs` and `tol`.
    pub fn recompute_pass(&self) -> bool {
        self.status == Status::Ok && (self.rhs - self.lhs) >= -self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        if self.status == Status::Ok {
            self.tol = tol;
            self.pass = self.recompute_pass();
        }
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta.get(key).and_then(Value::as_f64)
    }

    pub fn expects_violation(&self) -> bool {
        self.meta.get("label").and_then(Value::as_str) == Some(EXPECTED_VIOLATION)
    }

    /// Whether the report counts as a success for exit-code purposes:
    /// skipped reports are neutral, expected violations succeed by failing.
    pub fn is_success(&self) -> bool {
        match self.status {
            Status::Skipped => true,
            Status::Ok if self.expects_violation() => !self.pass,
            Status::Ok => self.pass,
        }
    }
}

/// Picks the mixing weight with the smallest slack among `lambdas`;
/// `eval(λ)` returns `(lhs, rhs)` at that weight.
pub fn worst_lambda(
    lambdas: &[f64],
    mut eval: impl FnMut(f64) -> crate::Result<(f64, f64)>,
) -> crate::Result<(f64, f64, f64)> {
    if lambdas.is_empty() {
        return Err(crate::Error::InvalidArgument(
            "no mixing weights given".into(),
        ));
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for &l in lambdas {
        if !(0.0..=1.0).contains(&l) {
            return Err(crate::Error::InvalidArgument(format!(
                "mixing weight {l} outside [0,1]"
            )));
        }
        let (lhs, rhs) = eval(l)?;
        if best.is_none_or(|(_, bl, br)| rhs - lhs < br - bl) {
            best = Some((l, lhs, rhs));
        }
    }
    Ok(best.expect("nonempty"))
}
