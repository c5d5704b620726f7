//! Monte-Carlo harness: single trials, parameter sweeps and bound tables.
//!
//! Every trial draws from streams derived from `(master seed, purpose, trial
//! index)`, so results do not depend on thread count or scheduling.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::bounds;
use crate::error::{HspError, Result};
use crate::learner::{self, LearnerPlan};
use crate::oracle::{random_instance, RahspParams};
use crate::rng;

/// Header of the sweep CSV.
pub const CSV_HEADER: &str =
    "p,n,k,delta,A,B,iterations,samples_used,trials,successes,success_rate,theta,ratio,seed";

/// Result of one learner run on a freshly generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// The learned subgroup equals the hidden one.
    pub success: bool,
    /// The learned subgroup is contained in the hidden one.
    pub contained: bool,
    /// Examples drawn.
    pub samples: u64,
}

/// Builds an instance from stream `(seed, "inst", trial)` and learns it with
/// example stream `(seed, "sample", trial)` and selection stream `(seed, "learn", trial)`.
pub fn run_trial(params: &RahspParams, delta: f64, trial: u64, seed: u64) -> Result<TrialOutcome> {
    let inst = random_instance(params, &mut rng::stream(seed, "inst", trial))?;
    let plan = LearnerPlan::for_family(inst.family(), delta)?;
    let mut sampler = inst.sampler(rng::stream(seed, "sample", trial));
    let learned = learner::learn(&mut sampler, &plan, &mut rng::stream(seed, "learn", trial))?;
    Ok(TrialOutcome {
        success: &learned == inst.hidden(),
        contained: learned.is_subgroup_of(inst.hidden()),
        samples: sampler.drawn(),
    })
}

/// Runs trials `0..trials` in parallel, returned in trial order.
pub fn run_trials(
    params: &RahspParams,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|t| run_trial(params, delta, t, seed))
        .collect()
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: u32,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub probe_size: u64,
    pub batch_size: u64,
    pub iterations: u64,
    pub samples_used: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub theta: f64,
    pub ratio: f64,
    pub seed: u64,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.n,
            self.k,
            format_g6(self.delta),
            self.probe_size,
            self.batch_size,
            self.iterations,
            self.samples_used,
            self.trials,
            self.successes,
            format_g6(self.success_rate),
            format_g6(self.theta),
            format_g6(self.ratio),
            self.seed
        )
    }
}

/// Runs `trials` trials of `GSP(p, n, k)` and summarizes them.
pub fn sweep_point(params: &RahspParams, delta: f64, trials: u64, seed: u64) -> Result<SweepRow> {
    let (p, n, k) = params.as_gsp().ok_or_else(|| {
        HspError::domain(format!(
            "sweep points must be single-component, got {params}"
        ))
    })?;
    let plan = LearnerPlan::for_family(&params.family()?, delta)?;
    let outcomes = run_trials(params, delta, trials, seed)?;
    let samples_used = plan.total_samples();
    if let Some(bad) = outcomes.iter().find(|o| o.samples != samples_used) {
        return Err(HspError::structural(format!(
            "trial drew {} samples, plan says {samples_used}",
            bad.samples
        )));
    }
    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    let theta = bounds::gsp_theta(p, n, k)?;
    Ok(SweepRow {
        p,
        n,
        k,
        delta,
        probe_size: plan.probe_size,
        batch_size: plan.batch_size,
        iterations: plan.iterations,
        samples_used,
        trials,
        successes,
        success_rate: if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        },
        theta,
        ratio: samples_used as f64 / theta,
        seed,
    })
}

/// Validates every grid point, then runs them in grid order.
pub fn sweep(grid: &[RahspParams], delta: f64, trials: u64, seed: u64) -> Result<Vec<SweepRow>> {
    learner::iteration_count(delta)?;
    for params in grid {
        if params.as_gsp().is_none() {
            return Err(HspError::domain(format!(
                "sweep points must be single-component, got {params}"
            )));
        }
    }
    grid.iter()
        .map(|params| sweep_point(params, delta, trials, seed))
        .collect()
}

pub fn write_csv(rows: &[SweepRow], out: &mut impl Write) -> std::io::Result<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.to_csv_line());
        text.push('\n');
    }
    out.write_all(text.as_bytes())
}

/// Runs the sweep and writes the CSV to `path`.
pub fn sweep_to_path(
    grid: &[RahspParams],
    delta: f64,
    trials: u64,
    seed: u64,
    path: &Path,
) -> Result<Vec<SweepRow>> {
    let rows = sweep(grid, delta, trials, seed)?;
    let mut file = std::fs::File::create(path)?;
    write_csv(&rows, &mut file)?;
    Ok(rows)
}

/// Formats a real with 6 significant digits, like C's `%g`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (5 - exp) as usize, x))
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Plain-text table of lower/upper/theta values for each parameter set.
pub fn bounds_table(params: &[RahspParams]) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:>14} {:>14} {:>12} {:>12} {:>12}",
        "params", "|G|", "|family|", "lower", "upper", "theta"
    );
    for p in params {
        let r = bounds::rahsp_bounds(p)?;
        let theta = match p.as_gsp() {
            Some((prime, n, k)) => format_g6(bounds::gsp_theta(prime, n, k)?),
            None => "-".into(),
        };
        let _ = writeln!(
            out,
            "{:<20} {:>14} {:>14} {:>12} {:>12} {:>12}",
            p.to_string(),
            short_big(&r.group_order),
            short_big(&r.family_size),
            format_g6(r.lower),
            format_g6(r.upper),
            theta
        );
    }
    Ok(out)
}

fn short_big(v: &num_bigint::BigUint) -> String {
    let s = v.to_string();
    if s.len() <= 14 {
        s
    } else {
        format!("2^{}", format_g6(bounds::log2_big(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        assert_eq!(format_g6(1.0 / 3.0), "0.333333");
        assert_eq!(format_g6(11.313708498984761), "11.3137");
        assert_eq!(format_g6(371.0), "371");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(0.0001234), "0.0001234");
        assert_eq!(format_g6(0.00001234), "1.234e-05");
        assert_eq!(format_g6(999999.5), "1e+06");
        assert_eq!(format_g6(-2.5), "-2.5");
        assert_eq!(format_g6(0.0), "0");
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 3.0).collect();
        assert!((fit_slope(&xs, &ys) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trial_is_deterministic() {
        let p = RahspParams::gsp(2, 5, 1).unwrap();
        let a = run_trial(&p, 1.0 / 3.0, 4, 99).unwrap();
        assert_eq!(a, run_trial(&p, 1.0 / 3.0, 4, 99).unwrap());
        let plan = LearnerPlan::for_family(&p.family().unwrap(), 1.0 / 3.0).unwrap();
        assert_eq!(a.samples, plan.total_samples());
        assert!(a.contained);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let rows = sweep(&[], 1.0 / 3.0, 10, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn sweep_rejects_bad_points() {
        let mixed: RahspParams = "2^2:1,3^2:1".parse().unwrap();
        assert!(sweep(&[mixed], 1.0 / 3.0, 1, 1).is_err());
        assert!(sweep(&[], 0.7, 1, 1).is_err());
    }

    #[test]
    fn row_invariants() {
        let p = RahspParams::gsp(2, 6, 1).unwrap();
        let row = sweep_point(&p, 1.0 / 3.0, 40, 7).unwrap();
        assert_eq!(
            row.samples_used,
            (row.probe_size + 9 * row.batch_size) * row.iterations
        );
        assert_eq!(row.success_rate, row.successes as f64 / 40.0);
        assert!(row.ratio > 0.0);
        assert_eq!(row.theta, 32f64.sqrt());
    }

    #[test]
    fn bounds_table_rows() {
        let table = bounds_table(&[
            RahspParams::gsp(2, 8, 1).unwrap(),
            "2^3:1,3^3:1".parse().unwrap(),
        ])
        .unwrap();
        assert!(table.lines().nth(1).unwrap().ends_with("11.3137"));
        assert!(table.lines().nth(2).unwrap().trim_end().ends_with('-'));
    }
}
