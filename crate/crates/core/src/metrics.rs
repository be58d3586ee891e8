//! Lifetime summaries, seed sweeps, paired protocol comparisons and CSV output.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::election::Strategy;
use crate::error::{ConfigError, DomainError, SimError};
use crate::sim::{run, RoundOutcome, SimConfig};

pub const TIMESERIES_HEADER: &str =
    "round,alive,ch_count,packets_to_ch,packets_to_bs,energy_consumed_j,total_residual_j";
pub const SUMMARY_HEADER: &str =
    "strategy,seed,first_death,half_death,last_death,packets_to_bs,packets_to_ch,rounds,truncated";
pub const AGGREGATE_HEADER: &str = "strategy,runs,\
first_death_median,first_death_iqr,half_death_median,half_death_iqr,\
last_death_median,last_death_iqr,packets_to_bs_median,packets_to_bs_iqr,\
packets_to_ch_median,packets_to_ch_iqr";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimSummary {
    /// End of the stability period.
    pub first_death_round: u64,
    pub half_death_round: u64,
    /// End of the network lifetime.
    pub last_death_round: u64,
    pub total_packets_to_bs: u64,
    pub total_packets_to_ch: u64,
    pub rounds_simulated: u64,
    pub truncated: bool,
}

/// Derives death milestones from a round series of a network with `n_nodes` nodes.
///
/// Milestones that never happen are reported as `rounds_simulated` and mark
/// the summary truncated.
pub fn summarize(n_nodes: u64, series: &[RoundOutcome]) -> Result<SimSummary, DomainError> {
    if series.is_empty() {
        return Err(DomainError::EmptySeries);
    }
    let rounds = series.len() as u64;
    let first_where = |pred: &dyn Fn(u64) -> bool| {
        series
            .iter()
            .position(|o| pred(o.alive_count))
            .map(|i| i as u64)
    };
    let first = first_where(&|alive| alive < n_nodes);
    let half = first_where(&|alive| alive <= n_nodes / 2);
    let last = first_where(&|alive| alive == 0);
    Ok(SimSummary {
        first_death_round: first.unwrap_or(rounds),
        half_death_round: half.unwrap_or(rounds),
        last_death_round: last.unwrap_or(rounds),
        total_packets_to_bs: series.iter().map(|o| o.packets_to_bs).sum(),
        total_packets_to_ch: series.iter().map(|o| o.packets_to_ch).sum(),
        rounds_simulated: rounds,
        truncated: last.is_none(),
    })
}

/// Median and quartiles of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Spread {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    /// Quartiles by linear interpolation between order statistics; the median
    /// is the middle value, or the mean of the two middle values.
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            median: quantile(&sorted, 0.5),
            q1: quantile(&sorted, 0.25),
            q3: quantile(&sorted, 0.75),
        }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = q * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            if lo == hi {
                sorted[lo]
            } else {
                sorted[lo] + (sorted[hi] - sorted[lo]) * frac
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FirstDeath,
    HalfDeath,
    LastDeath,
    PacketsToBs,
    PacketsToCh,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::FirstDeath,
        Metric::HalfDeath,
        Metric::LastDeath,
        Metric::PacketsToBs,
        Metric::PacketsToCh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FirstDeath => "first_death",
            Metric::HalfDeath => "half_death",
            Metric::LastDeath => "last_death",
            Metric::PacketsToBs => "packets_to_bs",
            Metric::PacketsToCh => "packets_to_ch",
        }
    }

    pub fn of(self, s: &SimSummary) -> u64 {
        match self {
            Metric::FirstDeath => s.first_death_round,
            Metric::HalfDeath => s.half_death_round,
            Metric::LastDeath => s.last_death_round,
            Metric::PacketsToBs => s.total_packets_to_bs,
            Metric::PacketsToCh => s.total_packets_to_ch,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub strategy: Strategy,
    /// Ascending.
    pub seeds: Vec<u64>,
    /// One per entry of `seeds`, same order.
    pub summaries: Vec<SimSummary>,
    pub first_death: Spread,
    pub half_death: Spread,
    pub last_death: Spread,
    pub packets_to_bs: Spread,
    pub packets_to_ch: Spread,
}

impl SweepResult {
    pub fn spread(&self, metric: Metric) -> &Spread {
        match metric {
            Metric::FirstDeath => &self.first_death,
            Metric::HalfDeath => &self.half_death,
            Metric::LastDeath => &self.last_death,
            Metric::PacketsToBs => &self.packets_to_bs,
            Metric::PacketsToCh => &self.packets_to_ch,
        }
    }

    fn from_runs(strategy: Strategy, runs: Vec<(u64, SimSummary)>) -> Self {
        let spread =
            |m: Metric| Spread::of(&runs.iter().map(|(_, s)| m.of(s) as f64).collect::<Vec<_>>());
        Self {
            strategy,
            first_death: spread(Metric::FirstDeath),
            half_death: spread(Metric::HalfDeath),
            last_death: spread(Metric::LastDeath),
            packets_to_bs: spread(Metric::PacketsToBs),
            packets_to_ch: spread(Metric::PacketsToCh),
            seeds: runs.iter().map(|(seed, _)| *seed).collect(),
            summaries: runs.into_iter().map(|(_, s)| s).collect(),
        }
    }
}

/// Runs `config` once per seed (in parallel) and aggregates the summaries.
/// The config's own seed is ignored.
pub fn sweep(config: &SimConfig, seeds: &[u64]) -> Result<SweepResult, SimError> {
    if seeds.is_empty() {
        return Err(ConfigError::Usage("seed list is empty".into()).into());
    }
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = SimConfig {
                seed,
                ..config.clone()
            };
            run(&cfg).map(|(_, summary)| (seed, summary))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult::from_runs(config.strategy, runs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<SweepResult>,
    /// Per metric, strategies ordered by ascending median (stable on ties).
    pub ranks: Vec<(Metric, Vec<Strategy>)>,
}

impl Comparison {
    pub fn row(&self, strategy: Strategy) -> Option<&SweepResult> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }
}

fn check_shared(base: &SimConfig, other: &SimConfig) -> Result<(), ConfigError> {
    let mismatch = |key| Err(ConfigError::Mismatch { key });
    if base.n_nodes != other.n_nodes {
        return mismatch("sim.n_nodes");
    }
    if base.field_side != other.field_side {
        return mismatch("sim.field_side");
    }
    if (base.bs_x, base.bs_y) != (other.bs_x, other.bs_y) {
        return mismatch("sim.bs_x/sim.bs_y");
    }
    if base.max_rounds != other.max_rounds {
        return mismatch("sim.max_rounds");
    }
    if base.radio != other.radio {
        return mismatch("radio.*");
    }
    if base.het != other.het {
        return mismatch("het.*");
    }
    Ok(())
}

/// Paired comparison: every strategy is run on the same seed set.
pub fn compare(configs: &[SimConfig], seeds: &[u64]) -> Result<Comparison, SimError> {
    let Some(base) = configs.first() else {
        return Err(ConfigError::Usage("nothing to compare".into()).into());
    };
    for cfg in configs {
        check_shared(base, cfg)?;
    }
    let rows = configs
        .iter()
        .map(|cfg| sweep(cfg, seeds))
        .collect::<Result<Vec<_>, _>>()?;
    let ranks = Metric::ALL
        .into_iter()
        .map(|m| {
            let mut order: Vec<&SweepResult> = rows.iter().collect();
            order.sort_by(|a, b| a.spread(m).median.total_cmp(&b.spread(m).median));
            (m, order.into_iter().map(|r| r.strategy).collect())
        })
        .collect();
    Ok(Comparison { rows, ranks })
}

/// Nine significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_timeseries<W: Write>(mut w: W, series: &[RoundOutcome]) -> io::Result<()> {
    writeln!(w, "{TIMESERIES_HEADER}")?;
    for o in series {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            o.round,
            o.alive_count,
            o.ch_count,
            o.packets_to_ch,
            o.packets_to_bs,
            fmt_f64(o.energy_consumed),
            fmt_f64(o.total_residual)
        )?;
    }
    Ok(())
}

pub fn write_summary_row<W: Write>(
    mut w: W,
    strategy: Strategy,
    seed: u64,
    s: &SimSummary,
) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        strategy,
        seed,
        s.first_death_round,
        s.half_death_round,
        s.last_death_round,
        s.total_packets_to_bs,
        s.total_packets_to_ch,
        s.rounds_simulated,
        s.truncated
    )
}

pub fn write_summaries<W: Write>(mut w: W, rows: &[SweepResult]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for row in rows {
        for (seed, s) in row.seeds.iter().zip(&row.summaries) {
            write_summary_row(&mut w, row.strategy, *seed, s)?;
        }
    }
    Ok(())
}

pub fn write_aggregate<W: Write>(mut w: W, rows: &[SweepResult]) -> io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for row in rows {
        write!(w, "{},{}", row.strategy, row.seeds.len())?;
        for m in Metric::ALL {
            let s = row.spread(m);
            write!(w, ",{},{}", fmt_f64(s.median), fmt_f64(s.iqr()))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Aggregate table followed by one `rank,<metric>,...` line per metric,
/// strategies listed from lowest to highest median.
pub fn write_comparison<W: Write>(mut w: W, cmp: &Comparison) -> io::Result<()> {
    write_aggregate(&mut w, &cmp.rows)?;
    writeln!(w)?;
    writeln!(w, "metric,ascending_by_median")?;
    for (m, order) in &cmp.ranks {
        let names: Vec<&str> = order.iter().map(|s| s.name()).collect();
        writeln!(w, "{},{}", m.name(), names.join(" < "))?;
    }
    Ok(())
}

pub fn write_metadata<W: Write>(mut w: W, entries: &[(String, String)]) -> io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}
