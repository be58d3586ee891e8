//! `beenish` command line.
//!
//! Exit codes: 0 on success, 1 for configuration or usage errors, 2 for
//! failures while simulating or writing output.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{config_echo, load_config};
use crate::election::{class_counts, total_energy, Strategy};
use crate::energy::{
    avg_dist_to_bs, avg_dist_to_ch, optimal_cluster_count, optimal_cluster_count_continuous,
    round_energy, threshold_distance,
};
use crate::error::{ConfigError, SimError};
use crate::metrics::{
    compare, sweep, write_aggregate, write_comparison, write_metadata, write_summaries,
    write_summary_row, write_timeseries, SUMMARY_HEADER,
};
use crate::sim::{expected_lifetime, run, SimConfig, RNG_ALGORITHM};

pub const DEFAULT_SWEEP_SEEDS: u64 = 30;

#[derive(Debug, Parser)]
#[command(
    name = "beenish",
    version,
    about = "Cluster-head election simulator for heterogeneous sensor networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one network and write its round-by-round time series.
    Run(CommonArgs),
    /// Simulate one configuration over many seeds.
    Sweep(CommonArgs),
    /// Paired multi-strategy comparison over a shared seed set.
    Compare(CommonArgs),
    /// Print derived quantities of a configuration without simulating.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file; `compare` accepts several, one per strategy.
    #[arg(long, value_name = "PATH")]
    pub config: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Explicit seed; repeat for a list.
    #[arg(long, value_name = "U64", conflicts_with = "seeds")]
    pub seed: Vec<u64>,
    /// Number of consecutive seeds starting at --seed-base.
    #[arg(long, value_name = "N")]
    pub seeds: Option<u64>,
    /// First seed of a --seeds range (defaults to sim.seed).
    #[arg(long, value_name = "U64", requires = "seeds")]
    pub seed_base: Option<u64>,
    /// Parameter override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Strategies to compare when a single config is given.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub strategies: Vec<Strategy>,
}

impl CommonArgs {
    fn single_config(&self) -> Result<SimConfig, ConfigError> {
        if self.config.len() > 1 {
            return Err(ConfigError::Usage(
                "only `compare` accepts more than one --config".into(),
            ));
        }
        load_config(self.config.first().map(PathBuf::as_path), &self.overrides)
    }

    fn seed_list(&self, config: &SimConfig) -> Vec<u64> {
        if !self.seed.is_empty() {
            return self.seed.clone();
        }
        let n = self.seeds.unwrap_or(DEFAULT_SWEEP_SEEDS);
        let base = self.seed_base.unwrap_or(config.seed);
        (0..n).map(|i| base.wrapping_add(i)).collect()
    }

    fn metadata(
        &self,
        subcommand: &str,
        configs: &[SimConfig],
        seeds: &[u64],
    ) -> Vec<(String, String)> {
        let mut meta = vec![
            ("artifact".to_string(), env!("CARGO_PKG_NAME").to_string()),
            (
                "artifact_version".to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ),
            ("subcommand".to_string(), subcommand.to_string()),
            ("rng_algorithm".to_string(), RNG_ALGORITHM.to_string()),
        ];
        for path in &self.config {
            meta.push(("config_file".to_string(), path.display().to_string()));
        }
        for o in &self.overrides {
            meta.push(("override".to_string(), o.clone()));
        }
        let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
        meta.push(("seeds".to_string(), seeds.join(",")));
        for (i, cfg) in configs.iter().enumerate() {
            let prefix = if configs.len() == 1 {
                "config".to_string()
            } else {
                format!("config{i}")
            };
            meta.extend(
                config_echo(cfg)
                    .into_iter()
                    .map(|(k, v)| (format!("{prefix}.{k}"), v)),
            );
        }
        meta
    }
}

fn create(dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn cmd_run(args: &CommonArgs, out: &mut dyn Write) -> Result<(), SimError> {
    let mut config = args.single_config()?;
    if args.seeds.is_some() || args.seed.len() > 1 {
        return Err(ConfigError::Usage("`run` takes at most one --seed".into()).into());
    }
    if let Some(&seed) = args.seed.first() {
        config.seed = seed;
    }
    let (series, summary) = run(&config)?;

    fs::create_dir_all(&args.out)?;
    let mut ts = create(&args.out, "timeseries.csv")?;
    write_timeseries(&mut ts, &series)?;
    ts.flush()?;
    let mut sm = create(&args.out, "summary.csv")?;
    writeln!(sm, "{SUMMARY_HEADER}")?;
    write_summary_row(&mut sm, config.strategy, config.seed, &summary)?;
    sm.flush()?;
    let mut md = create(&args.out, "metadata.txt")?;
    write_metadata(
        &mut md,
        &args.metadata("run", &[config.clone()], &[config.seed]),
    )?;
    md.flush()?;

    writeln!(out, "{SUMMARY_HEADER}")?;
    write_summary_row(&mut *out, config.strategy, config.seed, &summary)?;
    Ok(())
}

fn cmd_sweep(args: &CommonArgs, out: &mut dyn Write) -> Result<(), SimError> {
    let config = args.single_config()?;
    let seeds = args.seed_list(&config);
    let result = sweep(&config, &seeds)?;

    fs::create_dir_all(&args.out)?;
    let rows = [result];
    let mut sm = create(&args.out, "summaries.csv")?;
    write_summaries(&mut sm, &rows)?;
    sm.flush()?;
    let mut ag = create(&args.out, "aggregate.csv")?;
    write_aggregate(&mut ag, &rows)?;
    ag.flush()?;
    let mut md = create(&args.out, "metadata.txt")?;
    write_metadata(&mut md, &args.metadata("sweep", &[config], &rows[0].seeds))?;
    md.flush()?;

    write_aggregate(out, &rows)?;
    Ok(())
}

fn compare_configs(args: &CommonArgs) -> Result<Vec<SimConfig>, ConfigError> {
    if args.config.len() > 1 {
        if !args.strategies.is_empty() {
            return Err(ConfigError::Usage(
                "use either several --config files or --strategies, not both".into(),
            ));
        }
        return args
            .config
            .iter()
            .map(|p| load_config(Some(p), &args.overrides))
            .collect();
    }
    let base = load_config(args.config.first().map(PathBuf::as_path), &args.overrides)?;
    let strategies = if args.strategies.is_empty() {
        vec![Strategy::Deec, Strategy::Edeec, Strategy::Beenish]
    } else {
        args.strategies.clone()
    };
    Ok(strategies
        .into_iter()
        .map(|strategy| SimConfig {
            strategy,
            ..base.clone()
        })
        .collect())
}

fn cmd_compare(args: &CommonArgs, out: &mut dyn Write) -> Result<(), SimError> {
    let configs = compare_configs(args)?;
    let seeds = args.seed_list(&configs[0]);
    let table = compare(&configs, &seeds)?;

    fs::create_dir_all(&args.out)?;
    let mut sm = create(&args.out, "summaries.csv")?;
    write_summaries(&mut sm, &table.rows)?;
    sm.flush()?;
    let mut cp = create(&args.out, "comparison.csv")?;
    write_comparison(&mut cp, &table)?;
    cp.flush()?;
    let mut md = create(&args.out, "metadata.txt")?;
    write_metadata(
        &mut md,
        &args.metadata("compare", &configs, &table.rows[0].seeds),
    )?;
    md.flush()?;

    write_comparison(out, &table)?;
    Ok(())
}

fn cmd_validate(args: &CommonArgs, out: &mut dyn Write) -> Result<(), SimError> {
    let c = args.single_config()?;
    let counts = class_counts(c.n_nodes, &c.het)?;
    let d_to_bs = avg_dist_to_bs(c.field_side);
    let k_cont = optimal_cluster_count_continuous(&c.radio, c.n_nodes, c.field_side, d_to_bs)?;
    let k = optimal_cluster_count(&c.radio, c.n_nodes, c.field_side, d_to_bs)?;
    let (n, a, s, u) = counts.as_tuple();
    let lines = [
        ("strategy", c.strategy.to_string()),
        ("class_counts", format!("{n},{a},{s},{u}")),
        ("e_total_j", total_energy(c.n_nodes, &c.het).to_string()),
        ("d0_m", threshold_distance(&c.radio).to_string()),
        ("d_to_bs_m", d_to_bs.to_string()),
        ("k_opt_continuous", k_cont.to_string()),
        ("k_opt", k.to_string()),
        ("d_to_ch_m", avg_dist_to_ch(c.field_side, k)?.to_string()),
        (
            "e_round_j",
            round_energy(&c.radio, c.n_nodes, k, c.field_side)?.to_string(),
        ),
        (
            "lifetime_estimate_rounds",
            expected_lifetime(&c)?.to_string(),
        ),
    ];
    for (k, v) in lines {
        writeln!(out, "{k}={v}")?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                SimError::Config(_) => 1,
                _ => 2,
            }
        }
    }
}
