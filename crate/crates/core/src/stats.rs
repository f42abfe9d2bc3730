//! System-level evaluation: descriptive statistics, cohesive/uncohesive
//! frequency counts, correlation and split suggestions.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{lcom_ck, size_metrics, MetricsRecord, PairEvidence};
use crate::model::{ClassModel, MethodPolicy};

/// Public-method count at which a non-cohesive class becomes a split candidate.
pub const SPLIT_MIN_PUBLIC_METHODS: u64 = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("no values to summarize")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least two paired values")]
    TooFewValues,
    #[error("zero variance in at least one series")]
    DegenerateVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    #[serde(serialize_with = "crate::round4")]
    pub min: f64,
    #[serde(serialize_with = "crate::round4")]
    pub max: f64,
    #[serde(serialize_with = "crate::round4")]
    pub mean: f64,
    #[serde(serialize_with = "crate::round4")]
    pub median: f64,
    #[serde(serialize_with = "crate::round4")]
    pub std_dev: f64,
}

/// Min, max, mean, median (interpolated on even counts) and sample standard
/// deviation (divisor n-1, 0 for a single value).
pub fn descriptive_stats(values: &[f64]) -> Result<DescriptiveStats, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    // Welford's running mean and sum of squared deviations.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = values.len();
    let std_dev = if n > 1 {
        (m2 / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(DescriptiveStats {
        n,
        min: sorted[0],
        max: sorted[n - 1],
        mean,
        median,
        std_dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cohesion {
    Cohesive,
    Uncohesive,
}

/// Cohesive iff LCOM does not exceed `threshold` (0 for the strict reading,
/// 1 for the lenient one).
pub fn classify_cohesion(record: &MetricsRecord, threshold: u64) -> Cohesion {
    if threshold > 1 {
        log::warn!("cohesion threshold {threshold} is outside the usual 0..=1 range");
    }
    if record.lcom <= threshold {
        Cohesion::Cohesive
    } else {
        Cohesion::Uncohesive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub system_name: String,
    pub class_count: usize,
    pub lcom_stats: DescriptiveStats,
    pub cohesive_count: usize,
    pub uncohesive_count: usize,
    #[serde(serialize_with = "crate::round1")]
    pub cohesive_pct: f64,
    #[serde(serialize_with = "crate::round1")]
    pub uncohesive_pct: f64,
    pub threshold_used: u64,
    /// Median LCOM strictly below 1.
    pub median_cohesive: bool,
    /// Median LCOM of at most 1.
    pub median_cohesive_lenient: bool,
}

pub fn system_summary(
    name: &str,
    records: &[MetricsRecord],
    threshold: u64,
) -> Result<SystemSummary, StatsError> {
    let lcoms: Vec<f64> = records.iter().map(|r| r.lcom as f64).collect();
    let lcom_stats = descriptive_stats(&lcoms)?;
    let cohesive_count = records
        .iter()
        .filter(|r| classify_cohesion(r, threshold) == Cohesion::Cohesive)
        .count();
    let class_count = records.len();
    let uncohesive_count = class_count - cohesive_count;
    let pct = |k: usize| crate::round_to(100.0 * k as f64 / class_count as f64, 1);
    Ok(SystemSummary {
        system_name: name.to_string(),
        class_count,
        cohesive_count,
        uncohesive_count,
        cohesive_pct: pct(cohesive_count),
        uncohesive_pct: pct(uncohesive_count),
        threshold_used: threshold,
        median_cohesive: lcom_stats.median < 1.0,
        median_cohesive_lenient: lcom_stats.median <= 1.0,
        lcom_stats,
    })
}

/// Pearson product-moment correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewValues);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSuggestion {
    pub class_name: String,
    /// Connected components of the sharing graph, as signature keys in
    /// declaration order. Groups are ordered by their first method.
    pub groups: Vec<Vec<String>>,
    pub recommended: bool,
}

/// Groups the counted methods of `class` by shared attributes.
pub fn suggest_split(class: &ClassModel, policy: &MethodPolicy) -> SplitSuggestion {
    let (lcom, evidence) = lcom_ck(class, policy);
    let (_, npm) = size_metrics(class);
    split_from_evidence(&class.name, &evidence, lcom, npm)
}

/// Same as [`suggest_split`] but from an already computed record.
pub fn suggest_split_for_record(record: &MetricsRecord) -> SplitSuggestion {
    split_from_evidence(&record.class_name, &record.evidence, record.lcom, record.npm)
}

fn split_from_evidence(class_name: &str, evidence: &PairEvidence, lcom: u64, npm: u64) -> SplitSuggestion {
    let groups = sharing_components(evidence);
    let recommended = groups.len() >= 2 && lcom > 0 && npm >= SPLIT_MIN_PUBLIC_METHODS;
    SplitSuggestion {
        class_name: class_name.to_string(),
        groups,
        recommended,
    }
}

fn sharing_components(evidence: &PairEvidence) -> Vec<Vec<String>> {
    let index = |key: &str| {
        evidence
            .methods
            .iter()
            .position(|m| m == key)
            .expect("pair members are counted methods")
    };
    let mut uf = UnionFind::<usize>::new(evidence.methods.len());
    for pair in &evidence.sharing_pairs {
        uf.union(index(&pair.0), index(&pair.1));
    }
    let mut groups: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, key) in evidence.methods.iter().enumerate() {
        let root = uf.find(i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(key.clone()),
            None => groups.push((root, vec![key.clone()])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}
