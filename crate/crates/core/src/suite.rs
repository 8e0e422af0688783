//! Seeded check suites. Instance `i` of a suite draws everything from
//! `Seed(base).derive(suite_id).derive(i)`, so adding trials or running
//! suites separately never changes earlier instances, and output is sorted
//! by (suite, instance, sub-index) before rendering.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde_json::Value;

use crate::checks::{
    check_classical_mutual_info, check_concave_map, check_convexity_cl_minus_q,
    check_cpt_monotonicity, check_cq_chain, check_cqq, check_gibbs_variational, check_holevo,
    check_improved_subadd, check_sandwich, check_ssa, check_stronger_ssa, counterexample_report,
    ConcavityInstance, InequalityReport, Status, DEFAULT_LAMBDAS,
};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::linalg::{DensityMatrix, HilbertDims};
use crate::random::{
    random_density, random_hermitian, random_kraus, random_povm, random_probabilities, Seed,
};
use crate::wehrl::{check_wehrl_bound, check_wehrl_convexity, check_wehrl_mutual_info};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Ssa,
    StrongerSsa,
    Sandwich,
    Concavity,
    Gibbs,
    Cpt,
    ImprovedSubadd,
    MutualInfo,
    CqChain,
    Cqq,
    Convexity,
    Holevo,
    Wehrl,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Ssa,
        Suite::StrongerSsa,
        Suite::Sandwich,
        Suite::Concavity,
        Suite::Gibbs,
        Suite::Cpt,
        Suite::ImprovedSubadd,
        Suite::MutualInfo,
        Suite::CqChain,
        Suite::Cqq,
        Suite::Convexity,
        Suite::Holevo,
        Suite::Wehrl,
        Suite::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ssa => "ssa",
            Suite::StrongerSsa => "stronger-ssa",
            Suite::Sandwich => "sandwich",
            Suite::Concavity => "concavity",
            Suite::Gibbs => "gibbs",
            Suite::Cpt => "cpt",
            Suite::ImprovedSubadd => "improved-subadd",
            Suite::MutualInfo => "mutual-info",
            Suite::CqChain => "cq-chain",
            Suite::Cqq => "cqq",
            Suite::Convexity => "convexity",
            Suite::Holevo => "holevo",
            Suite::Wehrl => "wehrl",
            Suite::Counterexample => "counterexample",
        }
    }

    fn id(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }

    /// Factor dimensions used when none are given.
    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Suite::Ssa | Suite::StrongerSsa | Suite::Sandwich | Suite::Cpt | Suite::Cqq => {
                vec![2, 2, 2]
            }
            Suite::ImprovedSubadd | Suite::MutualInfo | Suite::CqChain | Suite::Convexity => {
                vec![2, 3]
            }
            Suite::Gibbs | Suite::Wehrl => vec![2, 2],
            Suite::Holevo => vec![3],
            // Sized per instance (concavity) or by `d` (counterexample).
            Suite::Concavity | Suite::Counterexample => vec![1],
        }
    }

    fn required_factors(self) -> Option<&'static [usize]> {
        match self {
            Suite::Ssa | Suite::StrongerSsa | Suite::Sandwich | Suite::Cpt | Suite::Cqq => {
                Some(&[3])
            }
            Suite::ImprovedSubadd | Suite::MutualInfo | Suite::CqChain | Suite::Convexity => {
                Some(&[2])
            }
            Suite::Wehrl => Some(&[1, 2]),
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// `all` or a comma-separated list of suite names.
pub fn parse_suites(spec: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::UnknownSuite(spec.to_string()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `a,b,c` into factor dimensions.
pub fn parse_dims(spec: &str) -> Result<HilbertDims> {
    let dims = spec
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidDims(format!("cannot parse {p:?} in {spec:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    HilbertDims::new(dims)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    pub dims: Option<HilbertDims>,
    pub trials: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    /// Dimension for the counterexample suite.
    pub d: usize,
    /// Spin for the single-spin part of the Wehrl suite.
    pub two_j: u32,
    pub exec: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            dims: None,
            trials: 100,
            seed: 0,
            tol: None,
            d: 3,
            two_j: 2,
            exec: Execution::available(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {t} must be finite and ≥ 0"
                )));
            }
        }
        if let Some(dims) = &self.dims {
            for s in &self.suites {
                if let Some(req) = s.required_factors() {
                    if !req.contains(&dims.factors()) {
                        return Err(Error::InvalidDims(format!(
                            "suite {s} needs {req:?} factors, got dims {dims}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn dims_for(&self, suite: Suite) -> Result<HilbertDims> {
        match &self.dims {
            Some(d) => Ok(d.clone()),
            None => HilbertDims::new(suite.default_dims()),
        }
    }
}

/// One report tagged with its position in the run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRecord {
    pub suite: Suite,
    pub instance: usize,
    pub sub: usize,
    pub report: InequalityReport,
}

fn full_rank(dims: &HilbertDims, seed: Seed) -> Result<DensityMatrix> {
    random_density(dims, dims.total(), seed)
}

const KRAUS_COUNTS: [usize; 3] = [1, 2, 4];

fn instance_reports(
    suite: Suite,
    cfg: &SuiteConfig,
    i: usize,
    seed: Seed,
) -> Result<Vec<InequalityReport>> {
    let dims = cfg.dims_for(suite)?;
    let s = |k: u64| seed.derive(k);
    let reports = match suite {
        Suite::Ssa => vec![check_ssa(&full_rank(&dims, s(0))?)?],
        Suite::StrongerSsa | Suite::Cpt => {
            let rho = full_rank(&dims, s(0))?;
            let (acts_on, kdim) = if i.is_multiple_of(2) {
                (vec![0], dims.dim(0))
            } else {
                (vec![0, 1], dims.dim(0) * dims.dim(1))
            };
            let k = random_kraus(kdim, KRAUS_COUNTS[i % 3], s(1))?.with_acts_on(acts_on)?;
            if suite == Suite::Cpt {
                vec![check_cpt_monotonicity(&rho, &k)?]
            } else {
                vec![check_stronger_ssa(&rho, &k)?]
            }
        }
        Suite::Sandwich => {
            let rho = full_rank(&dims, s(0))?;
            let k = random_kraus(dims.dim(0), 2 + i % 3, s(1))?;
            let (l, r) = check_sandwich(&rho, &k)?;
            vec![l, r]
        }
        Suite::Concavity => {
            let dim = match &cfg.dims {
                Some(d) => d.total(),
                None => 2 + i % 3,
            };
            let m = 1 + (i / 3) % 3;
            let (a, b) = ConcavityInstance::random_pair(dim, m, s(0))?;
            vec![check_concave_map(&a, &b, &DEFAULT_LAMBDAS)?]
        }
        Suite::Gibbs => {
            let rho = random_density(&dims, 1 + i % dims.total(), s(0))?;
            let h = random_hermitian(dims.total(), 1.0, &mut s(1).rng(0));
            vec![check_gibbs_variational(&rho, &h)?]
        }
        Suite::ImprovedSubadd => {
            let rho = full_rank(&dims, s(0))?;
            let p = random_povm(dims.dim(0), 2 + i % 3, s(1))?;
            let (l, r) = check_improved_subadd(&rho, &p)?;
            vec![l, r]
        }
        Suite::MutualInfo => {
            let rho = full_rank(&dims, s(0))?;
            let p = random_povm(dims.dim(0), 2 + i % 3, s(1))?;
            let q = random_povm(dims.dim(1), 2 + (i / 3) % 3, s(2))?;
            vec![check_classical_mutual_info(&rho, &p, &q)?]
        }
        Suite::CqChain => {
            let rho = full_rank(&dims, s(0))?;
            let p = random_povm(dims.dim(0), 2 + i % 3, s(1))?;
            let q = random_povm(dims.dim(1), 2 + (i / 3) % 3, s(2))?;
            let (l, r) = check_cq_chain(&rho, &p, &q)?;
            vec![l, r]
        }
        Suite::Cqq => {
            let rho = full_rank(&dims, s(0))?;
            let p = random_povm(dims.dim(0), 2 + i % 3, s(1))?;
            vec![check_cqq(&rho, &p)?]
        }
        Suite::Convexity => {
            let a = full_rank(&dims, s(0))?;
            let b = random_density(&dims, 1 + i % dims.total(), s(1))?;
            let p = random_povm(dims.dim(0), 2 + i % 3, s(2))?;
            vec![check_convexity_cl_minus_q(&a, &b, &p, &DEFAULT_LAMBDAS)?]
        }
        Suite::Holevo => {
            let m = 2 + i % 3;
            let weights = random_probabilities(m, &mut s(0).rng(0));
            let states = (0..m)
                .map(|k| random_density(&dims, 1 + (i + k) % dims.total(), s(1 + k as u64)))
                .collect::<Result<Vec<_>>>()?;
            let q = random_povm(dims.total(), 2 + i % 4, s(100))?;
            vec![check_holevo(&weights, &states, &q)?]
        }
        Suite::Wehrl => {
            let (single, pair) = if dims.factors() == 1 {
                (dims.clone(), HilbertDims::new(vec![dims.dim(0); 2])?)
            } else if cfg.dims.is_some() {
                (HilbertDims::single(dims.dim(0))?, dims.clone())
            } else {
                (HilbertDims::single(cfg.two_j as usize + 1)?, dims.clone())
            };
            let d = single.total();
            let rho = random_density(&single, 1 + i % d, s(0))?;
            let rho12 = random_density(&pair, 1 + i % pair.total(), s(1))?;
            let a = random_density(&single, 1 + (i + 1) % d, s(2))?;
            let b = random_density(&single, 1 + (i + 2) % d, s(3))?;
            vec![
                check_wehrl_bound(&rho)?,
                check_wehrl_mutual_info(&rho12)?,
                check_wehrl_convexity(&a, &b, &DEFAULT_LAMBDAS)?,
            ]
        }
        Suite::Counterexample => vec![counterexample_report(cfg.d)?],
    };
    Ok(reports)
}

/// Runs every configured suite and returns the records in canonical order.
pub fn run(cfg: &SuiteConfig) -> Result<Vec<SuiteRecord>> {
    cfg.validate()?;
    let mut records = Vec::new();
    for &suite in &cfg.suites {
        let base = Seed(cfg.seed).derive(suite.id());
        let trials = if suite == Suite::Counterexample {
            1
        } else {
            cfg.trials
        };
        let per_instance = map_range(cfg.exec, trials, |i| {
            let seed = base.derive(i as u64);
            instance_reports(suite, cfg, i, seed).map(|rs| (i, seed, rs))
        });
        for item in per_instance {
            let (i, seed, reports) = item?;
            for (sub, r) in reports.into_iter().enumerate() {
                let mut r = r.with_seed(seed.0).with_meta("instance", i);
                if let Some(t) = cfg.tol {
                    r = r.with_tol(t);
                }
                records.push(SuiteRecord {
                    suite,
                    instance: i,
                    sub,
                    report: r,
                });
            }
        }
    }
    records.sort_by_key(|r| (r.suite, r.instance, r.sub));
    Ok(records)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
    pub skipped: usize,
    pub expected_violations: usize,
}

impl Summary {
    pub fn of(records: &[SuiteRecord]) -> Self {
        let mut s = Summary {
            total: records.len(),
            ..Default::default()
        };
        for r in records {
            let rep = &r.report;
            if rep.status == Status::Skipped {
                s.skipped += 1;
            } else if rep.expects_violation() {
                s.expected_violations += 1;
            }
            if !rep.is_success() {
                s.failed += 1;
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} reports, {} failed, {} skipped, {} expected violations",
            self.total, self.failed, self.skipped, self.expected_violations
        )
    }
}

/// One JSON object per line.
pub fn render_ndjson(records: &[SuiteRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r.report).expect("reports serialize"));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn meta_string(meta: &serde_json::Map<String, Value>) -> String {
    meta.iter()
        .map(|(k, v)| match v {
            Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Flat CSV with metadata folded into one `key=value;…` column.
pub fn render_csv(records: &[SuiteRecord]) -> String {
    let mut out =
        String::from("suite,instance,name,seed,dims,lhs,rhs,slack,tol,pass,status,meta\n");
    for r in records {
        let rep = &r.report;
        let dims = rep
            .dims
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join("x");
        let status = match rep.status {
            Status::Ok => "ok",
            Status::Skipped => "skipped",
        };
        let meta: serde_json::Map<String, Value> = rep.meta.clone().into_iter().collect();
        let seed = rep.seed.map_or(String::new(), |s| s.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{:?},{:?},{:?},{:?},{},{},{}",
            r.suite,
            r.instance,
            csv_field(&rep.name),
            seed,
            dims,
            rep.lhs,
            rep.rhs,
            rep.slack,
            rep.tol,
            rep.pass,
            status,
            csv_field(&meta_string(&meta))
        )
        .expect("writing to a String");
    }
    out
}
