use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morphogen_lab::commands::execute;
use morphogen_lab::experiments::ExperimentId;
use morphogen_lab::selftest;
use morphogen_lab::settings::{Overrides, Settings};

/// Evolution of developmentally competent 1-D embryos.
#[derive(Debug, Parser)]
#[command(name = "morphogen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hardwired vs fixed competency 20/100/400.
    Exp1(Flags),
    /// Mixed populations: domination of competent minorities.
    Exp2(Flags),
    /// Evolvable competency without a cost.
    Exp3(Flags),
    /// Evolvable competency with a fitness cost.
    Exp4(Flags),
    /// Mutation probability x selection fraction scan of stable competency.
    Sweep(Flags),
    /// A single custom configuration.
    Run(Flags),
    /// Check core invariants against brute-force references.
    Selftest,
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML file with the same keys as the long flags, or a manifest.json to replay.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    repeats: Option<u32>,
    #[arg(long)]
    generations: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to available cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// csv, ndjson or both.
    #[arg(long)]
    format: Option<String>,
    /// End a run as soon as the best individual reaches fitness 1.
    #[arg(long)]
    stop_at_max: bool,
    /// uniform or permutation.
    #[arg(long)]
    init_mode: Option<String>,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    genome_len: Option<usize>,
    #[arg(long)]
    mutation_prob: Option<f64>,
    #[arg(long)]
    selection_frac: Option<f64>,
    /// none, fixed:N, evolvable or evolvable:A-B:C-D.
    #[arg(long)]
    competency: Option<String>,
    /// Initial share of competent embryos (rest hardwired).
    #[arg(long)]
    competent_fraction: Option<f64>,
    #[arg(long)]
    x_max: Option<u32>,
    #[arg(long)]
    penalty_weight: Option<f64>,
    /// Sweep grid as ROWSxCOLS.
    #[arg(long)]
    grid: Option<String>,
    /// Generations per correlation bin.
    #[arg(long)]
    bin_width: Option<usize>,
}

impl Flags {
    fn resolve(self, id: ExperimentId) -> morphogen_lab::Result<Settings> {
        let file = match &self.config {
            Some(path) => Overrides::from_file(path)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            repeats: self.repeats,
            generations: self.generations,
            seed: self.seed,
            jobs: self.jobs,
            out_dir: self.out_dir,
            format: self.format,
            stop_at_max: self.stop_at_max.then_some(true),
            init_mode: self.init_mode,
            pop_size: self.pop_size,
            genome_len: self.genome_len,
            mutation_prob: self.mutation_prob,
            selection_frac: self.selection_frac,
            competency: self.competency,
            competent_fraction: self.competent_fraction,
            x_max: self.x_max,
            penalty_weight: self.penalty_weight,
            grid: self.grid,
            bin_width: self.bin_width,
        };
        Settings::resolve(id, flags.over(file))
    }
}

fn run(cli: Cli) -> morphogen_lab::Result<bool> {
    let (id, flags) = match cli.command {
        Command::Exp1(f) => (ExperimentId::Exp1, f),
        Command::Exp2(f) => (ExperimentId::Exp2, f),
        Command::Exp3(f) => (ExperimentId::Exp3, f),
        Command::Exp4(f) => (ExperimentId::Exp4, f),
        Command::Sweep(f) => (ExperimentId::Sweep, f),
        Command::Run(f) => (ExperimentId::Run, f),
        Command::Selftest => {
            let results = selftest::run_all();
            for r in &results {
                println!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            return Ok(results.iter().all(|r| r.passed));
        }
    };
    let settings = flags.resolve(id)?;
    let outcome = execute(&settings)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!(
        "wrote {} files to {}",
        outcome.files.len(),
        settings.out_dir.display()
    );
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
