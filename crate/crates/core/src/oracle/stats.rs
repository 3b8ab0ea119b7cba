//! Aggregation of oracle reports over independently drawn codebooks.

use rayon::prelude::*;
use serde::Serialize;

use super::{draw_code_with_budget, exact_mi_with_budget, OracleReport};
use crate::ensemble::SystemSpec;
use crate::error::Result;

/// Count, mean and centred second moment of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn single(x: f64) -> Self {
        Moments {
            count: 1,
            mean: x,
            m2: 0.0,
        }
    }

    /// Pairwise combination of two disjoint samples.
    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Moments {
            count: self.count + other.count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    /// Sample variance; zero for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Merges `items` along a balanced binary tree fixed by their order, so
    /// the floating-point result does not depend on how work was scheduled.
    pub fn merge_tree(items: &[Moments]) -> Moments {
        match items.len() {
            0 => Moments::default(),
            1 => items[0],
            n => {
                let (a, b) = items.split_at(n / 2);
                Moments::merge_tree(a).merge(Moments::merge_tree(b))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_source: usize,
    pub num_seeds: usize,
    pub base_seed: u64,
    pub mi_mean: f64,
    pub mi_variance: f64,
    pub h_s_given_y_mean: f64,
    pub energy_split_source_mean: f64,
    pub energy_split_channel_mean: f64,
    pub energy_gap_source_mean: f64,
    pub energy_gap_channel_mean: f64,
    pub z_c_fraction_mean: f64,
    /// Set when fewer than two seeds were run and the variance is not
    /// informative.
    pub degenerate: bool,
    #[serde(skip)]
    pub reports: Vec<OracleReport>,
}

impl EnsembleStats {
    /// Seed average of `|mi - reference|`.
    pub fn mean_abs_gap(&self, reference: f64) -> f64 {
        let m: Vec<Moments> = self
            .reports
            .iter()
            .map(|r| Moments::single((r.mi_per_symbol - reference).abs()))
            .collect();
        Moments::merge_tree(&m).mean
    }

    pub fn from_reports(n_source: usize, base_seed: u64, reports: Vec<OracleReport>) -> Self {
        let field = |f: fn(&OracleReport) -> f64| {
            let m: Vec<Moments> = reports.iter().map(|r| Moments::single(f(r))).collect();
            Moments::merge_tree(&m)
        };
        let mi = field(|r| r.mi_per_symbol);
        EnsembleStats {
            n_source,
            num_seeds: reports.len(),
            base_seed,
            mi_mean: mi.mean,
            mi_variance: mi.variance(),
            h_s_given_y_mean: field(|r| r.h_s_given_y).mean,
            energy_split_source_mean: field(|r| r.energy_split_source).mean,
            energy_split_channel_mean: field(|r| r.energy_split_channel).mean,
            energy_gap_source_mean: field(|r| r.energy_gap_source).mean,
            energy_gap_channel_mean: field(|r| r.energy_gap_channel).mean,
            z_c_fraction_mean: field(|r| r.z_c_fraction).mean,
            degenerate: reports.len() < 2,
            reports,
        }
    }
}

/// Exact reports for seeds `base_seed, base_seed + 1, ...`, merged.
pub fn ensemble_stats(
    system: &SystemSpec,
    n_source: usize,
    num_seeds: usize,
    base_seed: u64,
) -> Result<EnsembleStats> {
    ensemble_stats_with_budget(
        system,
        n_source,
        num_seeds,
        base_seed,
        super::DEFAULT_BUDGET,
    )
}

pub fn ensemble_stats_with_budget(
    system: &SystemSpec,
    n_source: usize,
    num_seeds: usize,
    base_seed: u64,
    budget: u64,
) -> Result<EnsembleStats> {
    let reports: Vec<OracleReport> = (0..num_seeds as u64)
        .into_par_iter()
        .map(|k| {
            let code = draw_code_with_budget(system, n_source, base_seed.wrapping_add(k), budget)?;
            exact_mi_with_budget(&code, budget)
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleStats::from_reports(n_source, base_seed, reports))
}
