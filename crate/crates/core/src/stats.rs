//! Two-sided Mann-Whitney U test.
//!
//! Ranks are computed over the pooled sample with ties sharing their mean
//! rank. Internally ranks are kept doubled so that every midrank, rank sum
//! and U statistic is an integer; the exact null distribution is then a pure
//! counting problem over which pooled positions fall in group A.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use statrs::function::erf::erfc;
use thiserror::Error;

use crate::features::{Feature, FeatureVector};

/// Significance cut-off; a result is significant iff `p < SIGNIFICANCE_LEVEL`.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Default pooled-size limit for the exact test.
pub const DEFAULT_EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("group {0} is empty")]
    EmptyGroup(char),
    #[error("value {0} is not finite")]
    NonFinite(String),
    #[error("pooled size {size} exceeds the exact-test limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("cohort `{cohort}` has no non-anomalous files for task `{task}`")]
    EmptyCohort { cohort: String, task: String },
}

/// Midranks (1-based) of `values`; ties share the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    doubled_midranks(values).into_iter().map(|r| r as f64 / 2.0).collect()
}

fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share rank (start+1+end)/2
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

fn tie_groups(sorted: &[f64]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        if end - start > 1 {
            sizes.push(end - start);
        }
        start = end;
    }
    sizes
}

#[derive(Debug, Clone, PartialEq)]
pub struct UStat {
    pub u_a: f64,
    pub u_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Sizes of the tie groups (only groups of two or more).
    pub tie_profile: Vec<usize>,
}

impl UStat {
    pub fn mean(&self) -> f64 {
        (self.n_a * self.n_b) as f64 / 2.0
    }

    /// Tie-corrected variance of U under the null hypothesis.
    pub fn variance(&self) -> f64 {
        let n = (self.n_a + self.n_b) as f64;
        let ties: f64 = self.tie_profile.iter().map(|&t| (t * t * t - t) as f64).sum();
        (self.n_a * self.n_b) as f64 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)))
    }
}

fn check(a: &[f64], b: &[f64]) -> Result<(), StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup('A'));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup('B'));
    }
    if let Some(v) = a.iter().chain(b).find(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite(v.to_string()));
    }
    Ok(())
}

fn pooled(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

/// U statistics of both groups.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<UStat, StatsError> {
    check(a, b)?;
    let (n_a, n_b) = (a.len(), b.len());
    let mut pool = pooled(a, b);
    let ranks = doubled_midranks(&pool);
    let rank_sum_a: u64 = ranks[..n_a].iter().sum();
    let twice_u_a = rank_sum_a - (n_a * (n_a + 1)) as u64;
    let twice_u_b = (2 * n_a * n_b) as u64 - twice_u_a;
    pool.sort_by(f64::total_cmp);
    let stat = UStat {
        u_a: twice_u_a as f64 / 2.0,
        u_b: twice_u_b as f64 / 2.0,
        n_a,
        n_b,
        tie_profile: tie_groups(&pool),
    };
    debug_assert_eq!(stat.u_a + stat.u_b, (n_a * n_b) as f64);
    Ok(stat)
}

/// Exact two-sided p-value as a fraction of group assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactP {
    /// Assignments at least as far from the null mean as the observed one.
    pub extreme: u128,
    /// All `C(n_a + n_b, n_a)` assignments.
    pub total: u128,
}

impl ExactP {
    pub fn value(&self) -> f64 {
        self.extreme as f64 / self.total as f64
    }
}

impl PartialOrd for ExactP {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.extreme * other.total).cmp(&(other.extreme * self.total)))
    }
}

/// Exact two-sided p-value over every way of splitting the pooled values
/// into groups of sizes `n_a` and `n_b`.
///
/// The count is organised by doubled rank sum: a table indexed by
/// (members chosen, rank sum) is filled one pooled position at a time, which
/// counts the same `C(N, n_a)` assignments as explicit enumeration without
/// visiting them one by one. Ties are handled because each position carries
/// its own midrank.
pub fn exact_p(a: &[f64], b: &[f64], exact_limit: usize) -> Result<ExactP, StatsError> {
    check(a, b)?;
    let (n_a, n_b) = (a.len(), b.len());
    let size = n_a + n_b;
    if size > exact_limit {
        return Err(StatsError::TooLarge { size, limit: exact_limit });
    }
    let ranks = doubled_midranks(&pooled(a, b));
    let observed: u64 = ranks[..n_a].iter().sum();
    let offset = (n_a * (n_a + 1) + n_a * n_b) as i64;
    let observed_dev = (observed as i64 - offset).abs();

    let max_sum: usize = ranks.iter().map(|&r| r as usize).sum();
    // ways[k][s]: subsets of the positions seen so far with k members and rank sum s
    let mut ways = vec![vec![0u128; max_sum + 1]; n_a + 1];
    ways[0][0] = 1;
    for &r in &ranks {
        let r = r as usize;
        for k in (1..=n_a).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }

    let mut extreme = 0u128;
    let mut total = 0u128;
    for (s, &count) in ways[n_a].iter().enumerate() {
        total += count;
        if (s as i64 - offset).abs() >= observed_dev {
            extreme += count;
        }
    }
    Ok(ExactP { extreme, total })
}

/// Normal-approximation two-sided p-value with continuity correction and
/// tie-corrected variance. All-tied data has zero variance and gets p = 1.
pub fn approx_p(u: &UStat) -> f64 {
    let variance = u.variance();
    if variance <= 0.0 {
        return 1.0;
    }
    let z = ((u.u_a - u.mean()).abs() - 0.5).max(0.0) / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    Exact,
    NormalApprox,
}

impl PValueMethod {
    pub fn label(self) -> &'static str {
        match self {
            PValueMethod::Exact => "exact",
            PValueMethod::NormalApprox => "normal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub database: String,
    pub task: String,
    pub feature: Feature,
    pub u: UStat,
    pub p: f64,
    pub method: PValueMethod,
    pub significant: bool,
}

/// Test one feature between two cohorts, skipping anomalous files. Uses the
/// exact test while the pooled size stays within `exact_limit`.
pub fn compare_cohorts(
    features_a: &[FeatureVector],
    features_b: &[FeatureVector],
    task: &str,
    feature: Feature,
    exact_limit: usize,
) -> Result<TestResult, StatsError> {
    let extract = |vs: &[FeatureVector]| -> Vec<f64> {
        vs.iter().filter(|v| !v.anomalous).map(|v| v.get(feature)).collect()
    };
    let cohort_name = |vs: &[FeatureVector], fallback: &str| {
        vs.iter()
            .find_map(|v| v.source.as_ref().map(|r| r.cohort.clone()))
            .unwrap_or_else(|| fallback.to_string())
    };
    let a = extract(features_a);
    let b = extract(features_b);
    if a.is_empty() {
        return Err(StatsError::EmptyCohort { cohort: cohort_name(features_a, "A"), task: task.into() });
    }
    if b.is_empty() {
        return Err(StatsError::EmptyCohort { cohort: cohort_name(features_b, "B"), task: task.into() });
    }
    let u = mann_whitney_u(&a, &b)?;
    let (p, method) = if a.len() + b.len() <= exact_limit {
        (exact_p(&a, &b, exact_limit)?.value(), PValueMethod::Exact)
    } else {
        (approx_p(&u), PValueMethod::NormalApprox)
    };
    let database = features_a
        .iter()
        .chain(features_b)
        .find_map(|v| v.source.as_ref().map(|r| r.database.clone()))
        .unwrap_or_default();
    Ok(TestResult {
        database,
        task: task.to_string(),
        feature,
        u,
        p,
        method,
        significant: p < SIGNIFICANCE_LEVEL,
    })
}

/// Run all six feature tests for every (database, task) present in either
/// cohort, in sorted order.
pub fn compare_tasks(
    vectors: &[FeatureVector],
    cohort_a: &str,
    cohort_b: &str,
    exact_limit: usize,
) -> Result<Vec<TestResult>, StatsError> {
    type Split = (Vec<FeatureVector>, Vec<FeatureVector>);
    let mut by_task: BTreeMap<(String, String), Split> = BTreeMap::new();
    for v in vectors {
        let Some(r) = &v.source else { continue };
        let slot = by_task.entry((r.database.clone(), r.task.clone())).or_default();
        if r.cohort == cohort_a {
            slot.0.push(v.clone());
        } else if r.cohort == cohort_b {
            slot.1.push(v.clone());
        }
    }
    let mut results = Vec::new();
    for ((database, task), (a, b)) in by_task {
        if a.is_empty() && b.is_empty() {
            continue;
        }
        for feature in Feature::ALL {
            let mut result = match compare_cohorts(&a, &b, &task, feature, exact_limit) {
                Err(StatsError::EmptyCohort { task, .. }) => {
                    let cohort = if a.iter().all(|v| v.anomalous) { cohort_a } else { cohort_b };
                    return Err(StatsError::EmptyCohort { cohort: cohort.to_string(), task });
                }
                other => other?,
            };
            result.database = database.clone();
            results.push(result);
        }
    }
    Ok(results)
}
