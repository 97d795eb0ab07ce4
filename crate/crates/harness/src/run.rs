//! Job execution, rate fits and the partition check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use erfnn::bounds::fractional::{lipschitz_certified, lipschitz_constants};
use erfnn::bounds::{fit_rate, verify, BoundReport, Statement, Subject, TheoremId, Verdict};
use erfnn::fractional::FractionalProfile;
use erfnn::modulus::uniform_grid;
use erfnn::partition::{
    boundary_deficiency, interval_denominator, ln_tail_bound, ln_tail_sum, partition_sum, End, TruncationPolicy,
};

use crate::config::{Job, PartitionConfig};

/// One CSV line: a [`BoundReport`] plus the rate fitted over its group.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    #[serde(flatten)]
    pub report: BoundReport,
    /// `function` column: config id, then `/variant` when the statement has parameters.
    pub label: String,
    pub slope: Option<f64>,
    pub r2: Option<f64>,
}

/// Runs every job in parallel and assembles the rows in job order.
pub fn run_jobs(jobs: &[Job]) -> Vec<ReportRow> {
    let results: Vec<Vec<BoundReport>> = jobs
        .par_iter()
        .map(|j| verify(&j.statement, &j.subject, &j.sweep, j.exponent, &j.settings).expect("jobs are type-checked at load"))
        .collect();
    let mut rows = Vec::new();
    for (job, reports) in jobs.iter().zip(results) {
        // one family per fit: verify emits rows family by family
        let mut groups: Vec<Vec<BoundReport>> = Vec::new();
        for r in reports {
            match groups.last_mut() {
                Some(g) if g[0].family == r.family => g.push(r),
                _ => groups.push(vec![r]),
            }
        }
        for g in groups {
            let pts: Vec<(u64, f64)> = g.iter().filter(|r| r.verdict != Verdict::Skipped).map(|r| (r.n, r.empirical_error)).collect();
            let fit = fit_rate(&pts).ok();
            for r in g {
                let label = if r.variant.is_empty() { job.label.clone() } else { format!("{}/{}", job.label, r.variant) };
                rows.push(ReportRow {
                    experiment: job.experiment.clone(),
                    report: r,
                    label,
                    slope: fit.as_ref().map(|f| f.slope),
                    r2: fit.as_ref().map(|f| f.r_squared),
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

pub fn summarize(rows: &[ReportRow]) -> Summary {
    let mut s = Summary { rows: rows.len(), ..Summary::default() };
    for r in rows {
        match r.report.verdict {
            Verdict::Holds => s.holds += 1,
            Verdict::Violated => s.violated += 1,
            Verdict::InconclusiveEstimated => s.inconclusive += 1,
            Verdict::Skipped => s.skipped += 1,
        }
    }
    s
}

/// A fitted rate per group, for the `rates` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct RateLine {
    pub theorem: TheoremId,
    pub function: String,
    pub family: String,
    pub exponent: f64,
    pub points: usize,
    pub slope: Option<f64>,
    pub r2: Option<f64>,
}

pub fn rate_lines(rows: &[ReportRow]) -> Vec<RateLine> {
    let mut out: Vec<RateLine> = Vec::new();
    for r in rows {
        let fam = r.report.family.to_string();
        let same = |l: &RateLine| l.theorem == r.report.theorem && l.function == r.label && l.family == fam && l.exponent == r.report.exponent;
        if !out.last().is_some_and(same) {
            out.push(RateLine {
                theorem: r.report.theorem,
                function: r.label.clone(),
                family: fam,
                exponent: r.report.exponent,
                points: 0,
                slope: r.slope,
                r2: r.r2,
            });
        }
        if r.report.verdict != Verdict::Skipped {
            out.last_mut().expect("pushed above").points += 1;
        }
    }
    out
}

/// Lipschitz premise of the half-order rate improvement, per fractional subject and exponent.
#[derive(Debug, Clone, Serialize)]
pub struct PremiseLine {
    pub function: String,
    pub exponent: f64,
    /// `n^beta max omega(D^{1/2} f, n^-beta)` along the sweep.
    pub constants: Vec<f64>,
    pub certified: bool,
    /// Fitted slope of the uniform error, when certified.
    pub slope: Option<f64>,
    pub rate_ok: Option<bool>,
}

/// Checks the premise for every real subject of a half-order job.
pub fn premise_lines(jobs: &[Job], rows: &[ReportRow]) -> Vec<PremiseLine> {
    let half: Vec<&Job> = jobs.iter().filter(|j| j.statement == Statement::C33).collect();
    half.par_iter()
        .filter_map(|j| {
            let Subject::Real(f) = &j.subject else { return None };
            let (a, b) = j.settings.interval.or_else(|| f.reference_interval())?;
            let s = &j.settings;
            let prof = FractionalProfile::build(f, 0.5, (a, b), &uniform_grid(a, b, s.anchors), s.table_samples, s.quad_nodes).ok()?;
            let sweep: Vec<u64> = j.sweep.iter().copied().filter(|&n| (n as f64).powf(1.0 - j.exponent) >= 3.0).collect();
            let constants = lipschitz_constants(&prof, &sweep, j.exponent);
            let certified = lipschitz_certified(&constants);
            let slope = rows
                .iter()
                .find(|r| r.report.theorem == TheoremId::C33 && r.label.starts_with(&format!("{}/", j.label)) && r.report.exponent == j.exponent)
                .and_then(|r| r.slope);
            let rate_ok = if certified { slope.map(|s| s <= -1.5 * j.exponent + 0.15) } else { None };
            Some(PremiseLine { function: j.label.clone(), exponent: j.exponent, constants, certified, slope, rate_ok })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub max_unity_deviation: f64,
    pub unity_ok: bool,
    pub tail_cases: usize,
    pub tail_failures: usize,
    /// Smallest `ln(bound) - ln(tail)` seen.
    pub min_log_margin: f64,
    pub denominator_min: f64,
    pub denominator_max: f64,
    pub denominator_ok: bool,
    pub deficiency_min: f64,
    pub deficiency_ok: bool,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.unity_ok && self.tail_failures == 0 && self.denominator_ok && self.deficiency_ok
    }
}

pub fn run_partition_check(cfg: &PartitionConfig, policy: &TruncationPolicy, seed: u64) -> erfnn::Result<PartitionReport> {
    let xs = uniform_grid(cfg.grid[0], cfg.grid[1], cfg.grid_points);
    let mut dev: f64 = 0.0;
    for &n in &cfg.ns {
        let worst = xs.par_iter().map(|&x| partition_sum(x, n, policy).map(|s| (s - 1.0).abs())).try_reduce(|| 0.0, |p, q| Ok(p.max(q)))?;
        dev = dev.max(worst);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cases, mut fails, mut margin) = (0, 0, f64::INFINITY);
    for &n in &cfg.tail_ns {
        for &alpha in &cfg.tail_alphas {
            if (n as f64).powf(1.0 - alpha) < 3.0 {
                continue;
            }
            let lb = ln_tail_bound(n, alpha)?;
            for _ in 0..cfg.tail_samples {
                let x = rng.gen_range(cfg.grid[0]..cfg.grid[1]);
                let ls = ln_tail_sum(x, n, alpha, policy)?;
                cases += 1;
                margin = margin.min(lb - ls);
                if !(ls < lb) {
                    fails += 1;
                }
            }
        }
    }

    let [a, b] = cfg.interval;
    let (mut lo, mut hi, mut defic) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for &n in &cfg.deficiency_ns {
        for x in uniform_grid(a, b, 1001) {
            let v = interval_denominator(x, n, a, b)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        for end in [End::A, End::B] {
            defic = defic.min(boundary_deficiency(n, a, b, end)?);
        }
    }
    Ok(PartitionReport {
        max_unity_deviation: dev,
        unity_ok: dev <= 1e-12,
        tail_cases: cases,
        tail_failures: fails,
        min_log_margin: margin,
        denominator_min: lo,
        denominator_max: hi,
        denominator_ok: lo > 0.2488 && hi <= 1.0 + 1e-15,
        deficiency_min: defic,
        deficiency_ok: defic >= 0.2488,
    })
}
