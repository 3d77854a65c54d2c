//! Command-line surface: `mine`, `gen`, `eval` and `bench`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::info;

use crate::error::{Error, Result};
use crate::io::{
    parse_dataset, parse_patterns, write_dataset, write_patterns, write_report, PatternFile,
    ReportRow, Table,
};
use crate::lsh::{PairThreshold, DEFAULT_SAMPLES, DEFAULT_SEGMENT_LEN};
use crate::miner::{mine, MinerConfig};
use crate::synth::{evaluate, generate_dataset, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(
    name = "mvpattern",
    version,
    about = "Mine compact multivariate sequential patterns"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine a pattern set from a dataset file.
    Mine(MineArgs),
    /// Generate a synthetic dataset with planted patterns.
    Gen(GenArgs),
    /// Score a mined pattern file against planted truth.
    Eval(EvalArgs),
    /// Run the four ablation configurations over a grid of synthetic specs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct MinerArgs {
    /// Disable miss codes.
    #[arg(long)]
    pub no_miss: bool,
    /// Disable co-occurrence filtering of candidate pairs.
    #[arg(long)]
    pub no_lsh: bool,
    /// Estimated weighted Jaccard similarity a pair must reach.
    #[arg(long, value_name = "F", conflicts_with = "lsh_min_cooccur")]
    pub lsh_threshold: Option<f64>,
    /// Co-occurrence count floor, converted per pair into a similarity.
    #[arg(long, value_name = "N")]
    pub lsh_min_cooccur: Option<f64>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_SEGMENT_LEN)]
    pub segment_len: usize,
    #[arg(long, value_name = "K", default_value_t = DEFAULT_SAMPLES)]
    pub lsh_samples: usize,
    #[arg(long, value_name = "N", default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for covering and sketching (0 = all cores).
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub threads: usize,
}

impl MinerArgs {
    pub fn config(&self) -> MinerConfig {
        let lsh_threshold = match (self.lsh_threshold, self.lsh_min_cooccur) {
            (_, Some(count)) => PairThreshold::MinCooccur(count),
            (Some(sim), None) => PairThreshold::Similarity(sim),
            (None, None) => MinerConfig::default().lsh_threshold,
        };
        MinerConfig {
            enable_miss_codes: !self.no_miss,
            enable_lsh: !self.no_lsh,
            lsh_threshold,
            lsh_samples: self.lsh_samples,
            segment_len: self.segment_len,
            max_iterations: self.max_iters,
            seed: self.seed,
            ..MinerConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Pattern file to write.
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
    /// Run report (TSV) to write.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub miner: MinerArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 50)]
    pub sequences: usize,
    #[arg(long, default_value_t = 20)]
    pub length: usize,
    #[arg(long, default_value_t = 5)]
    pub attrs: usize,
    #[arg(long, default_value_t = 100)]
    pub values: usize,
    /// Number of planted patterns.
    #[arg(long, default_value_t = 5)]
    pub plant: usize,
    #[arg(long, default_value_t = 5)]
    pub pattern_values: usize,
    /// Share of all events each planted pattern occupies.
    #[arg(long, default_value_t = 0.10)]
    pub coverage: f64,
    /// Planted misses per pattern.
    #[arg(long, default_value_t = 2)]
    pub misses: usize,
    /// Spread occurrences over random gaps.
    #[arg(long)]
    pub inject_gaps: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub truth_out: Option<PathBuf>,
}

impl GenArgs {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            num_sequences: self.sequences,
            sequence_length: self.length,
            num_attributes: self.attrs,
            values_per_attribute: self.values,
            num_patterns: self.plant,
            values_per_pattern: self.pattern_values,
            coverage_fraction: self.coverage,
            planted_misses_per_pattern: self.misses,
            inject_gaps: self.inject_gaps,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "PATH")]
    pub mined: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub truth: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset shape `S,s,A,V`; repeatable. Defaults to five levels
    /// varying one dimension each around 50,20,5,100.
    #[arg(long, value_name = "S,s,A,V")]
    pub grid: Vec<String>,
    /// Datasets generated per grid level.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Configurations to run, from full, no-miss, no-lsh, none.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "full,no-miss,no-lsh,none"
    )]
    pub configs: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub threads: usize,
}

pub const DEFAULT_GRID: [[usize; 4]; 5] = [
    [50, 20, 5, 100],
    [70, 20, 5, 100],
    [50, 30, 5, 100],
    [50, 20, 7, 100],
    [50, 20, 5, 200],
];

/// Ablation name to (miss codes, co-occurrence filter).
pub fn ablation(name: &str) -> Result<(bool, bool)> {
    match name {
        "full" => Ok((true, true)),
        "no-miss" => Ok((false, true)),
        "no-lsh" => Ok((true, false)),
        "none" => Ok((false, false)),
        _ => Err(Error::Config(format!(
            "unknown configuration `{name}` (expected full, no-miss, no-lsh or none)"
        ))),
    }
}

fn parse_grid(text: &str) -> Result<[usize; 4]> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("grid level `{text}` is not S,s,A,V")))?;
    parts
        .try_into()
        .map_err(|_| Error::Config(format!("grid level `{text}` needs four numbers")))
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(f)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Mine(args) => run_mine(&args, out),
        Command::Gen(args) => run_gen(&args, out),
        Command::Eval(args) => run_eval(&args, out),
        Command::Bench(args) => run_bench(&args, out),
    }
}

fn run_mine(args: &MineArgs, out: &mut dyn Write) -> Result<()> {
    let data = parse_dataset(&args.input)?;
    let cfg = args.miner.config();
    cfg.validate()?;
    info!(
        "mining {} sequences, {} events",
        data.num_sequences(),
        data.total_events()
    );
    let result = with_threads(args.miner.threads, || mine(&data, &cfg))?;
    write_patterns(
        &PatternFile::from_mining(data.schema(), &result),
        &args.output,
    )?;
    let row = ReportRow::from_report("mine", &result.report, cfg.enable_miss_codes);
    if let Some(path) = &args.report {
        write_report(std::slice::from_ref(&row), path)?;
    }
    let r = &result.report;
    writeln!(
        out,
        "|P| = {}, ΔL% = {:.2}, miss = {}, t = {:.2}s",
        r.pattern_count, r.delta_l_percent, r.miss_count, r.runtime_secs
    )
    .map_err(io_err)
}

fn run_gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let (data, truth) = generate_dataset(&args.spec())?;
    write_dataset(&data, &args.out)?;
    if let Some(path) = &args.truth_out {
        write_patterns(&PatternFile::from_truth(data.schema(), &truth), path)?;
    }
    writeln!(
        out,
        "{} sequences, {} events, {} planted patterns, {} planted misses",
        data.num_sequences(),
        data.total_events(),
        truth.patterns.len(),
        truth.misses.len()
    )
    .map_err(io_err)
}

fn run_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let mined = parse_patterns(&args.mined)?;
    let truth_file = parse_patterns(&args.truth)?;
    if mined.schema != truth_file.schema {
        return Err(Error::InvalidInput(
            "mined and truth files declare different schemas".into(),
        ));
    }
    let truth = truth_file.to_truth()?;
    let ev = evaluate(&mined.patterns(), &mined.miss_cells(), &truth);
    let delta = match (mined.baseline, mined.total) {
        (Some(b), Some(t)) if b > 0.0 => format!("{:.1}", 100.0 * (b - t) / b),
        _ => "-".into(),
    };
    let mut table = Table::new(&[
        "|P|",
        "ΔL%",
        "recovered",
        "planted",
        "misses found",
        "misses planted",
        "spurious",
    ]);
    table.push(vec![
        ev.mined_patterns.to_string(),
        delta,
        ev.recovered_patterns.to_string(),
        ev.planted_patterns.to_string(),
        ev.detected_misses.to_string(),
        ev.planted_misses.to_string(),
        ev.spurious_patterns.to_string(),
    ]);
    if let Some(path) = &args.report {
        table.write(path)?;
    }
    out.write_all(table.render().as_bytes()).map_err(io_err)
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let grid: Vec<[usize; 4]> = if args.grid.is_empty() {
        DEFAULT_GRID.to_vec()
    } else {
        args.grid
            .iter()
            .map(|g| parse_grid(g))
            .collect::<Result<_>>()?
    };
    if args.seeds == 0 {
        return Err(Error::Config("--seeds must be at least 1".into()));
    }
    let configs: Vec<(String, (bool, bool))> = args
        .configs
        .iter()
        .map(|c| ablation(c).map(|a| (c.clone(), a)))
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "|S|", "|s|", "|A|", "|V_k|", "run", "|P|", "ΔL%", "miss", "t(s)",
    ]);
    for level in &grid {
        let [n, len, attrs, values] = *level;
        let mut sums = vec![(0.0, 0.0, 0.0, 0.0); configs.len()];
        for s in 0..args.seeds {
            let spec = SyntheticSpec {
                num_sequences: n,
                sequence_length: len,
                num_attributes: attrs,
                values_per_attribute: values,
                seed: args.seed + s,
                ..SyntheticSpec::default()
            };
            let (data, _) = generate_dataset(&spec)?;
            for (sum, (name, (miss, lsh))) in sums.iter_mut().zip(&configs) {
                let cfg = MinerConfig {
                    enable_miss_codes: *miss,
                    enable_lsh: *lsh,
                    seed: args.seed + s,
                    ..MinerConfig::default()
                };
                let r = with_threads(args.threads, || mine(&data, &cfg))?.report;
                info!(
                    "{n},{len},{attrs},{values} seed {} {name}: |P| {} ΔL% {:.2} t {:.2}s",
                    args.seed + s,
                    r.pattern_count,
                    r.delta_l_percent,
                    r.runtime_secs
                );
                sum.0 += r.pattern_count as f64;
                sum.1 += r.delta_l_percent;
                sum.2 += r.miss_count as f64;
                sum.3 += r.runtime_secs;
            }
        }
        let k = args.seeds as f64;
        for ((name, (miss, _)), sum) in configs.iter().zip(&sums) {
            table.push(vec![
                n.to_string(),
                len.to_string(),
                attrs.to_string(),
                values.to_string(),
                name.clone(),
                format!("{:.1}", sum.0 / k),
                format!("{:.1}", sum.1 / k),
                if *miss {
                    format!("{:.1}", sum.2 / k)
                } else {
                    "-".into()
                },
                format!("{:.2}", sum.3 / k),
            ]);
        }
    }
    if let Some(path) = &args.report {
        table.write(path)?;
    }
    out.write_all(table.render().as_bytes()).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_map_onto_the_miner_config() {
        let cli = Cli::try_parse_from([
            "mvpattern",
            "mine",
            "--input",
            "d.txt",
            "--output",
            "p.txt",
            "--no-miss",
            "--lsh-min-cooccur",
            "2.5",
            "--segment-len",
            "10",
            "--seed",
            "7",
        ])
        .unwrap();
        let Command::Mine(args) = cli.command else {
            panic!("expected mine");
        };
        let cfg = args.miner.config();
        assert!(!cfg.enable_miss_codes && cfg.enable_lsh);
        assert_eq!(cfg.lsh_threshold, PairThreshold::MinCooccur(2.5));
        assert_eq!((cfg.segment_len, cfg.seed), (10, 7));
    }

    #[test]
    fn conflicting_thresholds_are_rejected() {
        let r = Cli::try_parse_from([
            "mvpattern",
            "mine",
            "--input",
            "d",
            "--output",
            "p",
            "--lsh-threshold",
            "0.2",
            "--lsh-min-cooccur",
            "3",
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn grid_and_ablation_names() {
        assert_eq!(parse_grid("50,20,5,100").unwrap(), [50, 20, 5, 100]);
        assert!(matches!(parse_grid("50,20"), Err(Error::Config(_))));
        assert_eq!(ablation("no-lsh").unwrap(), (true, false));
        assert!(matches!(ablation("fast"), Err(Error::Config(_))));
    }
}
