//! One function per subcommand: run, write outputs, return a short report.

use std::collections::BTreeMap;

use morphogen_core::rng::SEED_DERIVATION;
use serde::Serialize;

use crate::error::Result;
use crate::experiments::{
    run_evolvable, run_exp1, run_exp2, run_spec, run_sweep, ExperimentId, ExperimentSpec,
    SweepSpec, Variant,
};
use crate::io::{self, fmt_num, fmt_opt, OutDir};
use crate::settings::Settings;

pub const TOOL: &str = "morphogen";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
struct GridDefinition {
    mutation_probs: Vec<f64>,
    selection_fracs: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    experiment: ExperimentId,
    /// Flat config keys; `--config manifest.json` replays the run.
    config: crate::settings::Overrides,
    spec: serde_json::Value,
    base_seed: u64,
    repeats: u32,
    seeds: Vec<u64>,
    seed_derivation: &'static str,
    generated_at: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridDefinition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    undefined_correlations: Option<usize>,
    definitions: BTreeMap<&'static str, &'static str>,
    files: Vec<String>,
}

/// What a finished command wrote and a few lines worth printing.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<String>,
    pub summary: Vec<String>,
}

fn definitions(id: ExperimentId) -> BTreeMap<&'static str, &'static str> {
    let mut d = BTreeMap::new();
    d.insert(
        "fitness",
        "f = 9^(nic/C(n,2)) / 9 where nic counts pairs i < j with a[i] <= a[j]",
    );
    d.insert(
        "best",
        "top-ranked individual by (penalized) phenotypic fitness before selection; best_geno is that individual's genotypic fitness",
    );
    d.insert(
        "generation",
        "0-based; record g describes the population assessed in generation g",
    );
    match id {
        ExperimentId::Exp1 => {
            d.insert(
                "thresholds",
                "median over repeats of the first generation whose best_pheno >= threshold; repeats that never cross rank last; x if the median never crosses",
            );
            d.insert("bands", "mean +/- 1.96 * sd / sqrt(repeats)");
            d.insert(
                "ttests",
                "two-sided pooled Student t-test on best_pheno; Welch fallback when the variance ratio is 4 or more",
            );
        }
        ExperimentId::Exp2 => {
            d.insert(
                "domination",
                "first generation with competent prevalence above hardwired prevalence that never drops below it afterwards; table uses repeat-averaged prevalence; x for none",
            );
            d.insert(
                "repopulation",
                "offspring slots split by each kind's share of the selected pool, remainder to the larger share; parents from the same kind",
            );
        }
        ExperimentId::Exp3 | ExperimentId::Exp4 | ExperimentId::Sweep => {
            d.insert(
                "stable_competency",
                "median of the best individual's competency gene over the final 20% of generations",
            );
            if id != ExperimentId::Sweep {
                d.insert(
                    "correlation_bins",
                    "Pearson correlation of genotypic vs raw phenotypic fitness across the population, averaged over all repeats and generations in each bin; zero-variance generations excluded and counted",
                );
            } else {
                d.insert(
                    "sweep_grid",
                    "mutation probabilities x selection fractions, each evenly spaced over [0.2, 0.8]; repeat r of every point uses the same derived seed",
                );
                d.insert(
                    "sweep_correlations",
                    "Pearson correlations over grid points of the per-point mean stable competency",
                );
            }
        }
        ExperimentId::Run => {}
    }
    d
}

fn experiment_spec(s: &Settings) -> ExperimentSpec {
    let base = s.base.clone();
    match s.experiment {
        ExperimentId::Exp1 => ExperimentSpec::exp1(base, s.repeats, s.seed),
        ExperimentId::Exp2 => ExperimentSpec::exp2(base, s.repeats, s.seed),
        ExperimentId::Exp3 => ExperimentSpec::exp3(base, s.repeats, s.seed),
        ExperimentId::Exp4 => {
            let pw = base.penalty_weight;
            ExperimentSpec::exp4(base, pw, s.repeats, s.seed)
        }
        ExperimentId::Run | ExperimentId::Sweep => ExperimentSpec {
            id: s.experiment,
            base_config: base.clone(),
            repeats: s.repeats,
            base_seed: s.seed,
            variants: vec![Variant {
                label: "run".into(),
                config: base,
            }],
        },
    }
}

/// Runs the command described by `s` and writes its outputs under
/// `s.out_dir`.
pub fn execute(s: &Settings) -> Result<Outcome> {
    let mut out = OutDir::create(&s.out_dir)?;
    let id = s.experiment;
    let (csv, ndjson) = (s.format.csv(), s.format.ndjson());
    let mut summary = Vec::new();
    let mut undefined_correlations = None;
    let mut grid = None;

    let (spec_json, seeds) = if id == ExperimentId::Sweep {
        let spec = SweepSpec::grid(s.base.clone(), s.grid.rows, s.grid.cols, s.repeats, s.seed);
        let report = run_sweep(&spec, s.jobs)?;
        io::write_sweep(&mut out, &report)?;
        summary.push(format!(
            "{} points; corr(mutation_prob, stable) = {}; corr(selection_frac, stable) = {}",
            report.points.len(),
            fmt_opt(report.mutation_correlation()),
            fmt_opt(report.selection_correlation())
        ));
        grid = Some(GridDefinition {
            mutation_probs: spec.mutation_probs.clone(),
            selection_fracs: spec.selection_fracs.clone(),
        });
        (serde_json::to_value(&spec)?, spec.seeds())
    } else {
        let spec = experiment_spec(s);
        let name = id.to_string();
        match id {
            ExperimentId::Exp1 => {
                let report = run_exp1(&spec, s.jobs)?;
                io::write_curves(&mut out, &name, &report.variants, csv, ndjson)?;
                io::write_exp1(&mut out, &report)?;
                for row in &report.threshold_table {
                    let cells: Vec<String> = row
                        .medians
                        .iter()
                        .map(|m| m.map_or_else(|| io::NEVER.into(), fmt_num))
                        .collect();
                    summary.push(format!("{:<10} {}", row.label, cells.join(" ")));
                }
            }
            ExperimentId::Exp2 => {
                let report = run_exp2(&spec, s.jobs)?;
                io::write_curves(&mut out, &name, &report.variants, csv, ndjson)?;
                io::write_exp2(&mut out, &report)?;
                for c in &report.cells {
                    summary.push(format!(
                        "level {:>3} at {:>4}%: domination {} (share {})",
                        c.level,
                        io::pct(c.fraction),
                        c.mean_curve
                            .map_or_else(|| io::NEVER.into(), |g| g.to_string()),
                        fmt_num(c.dominated_share())
                    ));
                }
            }
            ExperimentId::Exp3 | ExperimentId::Exp4 => {
                let report = run_evolvable(&spec, s.jobs, s.bin_width)?;
                io::write_curves(&mut out, &name, &report.variants, csv, ndjson)?;
                io::write_evolvable(&mut out, &report)?;
                undefined_correlations =
                    Some(report.correlation_bins.iter().map(|b| b.undefined).sum());
                let stable: Vec<String> =
                    report.stable_values.iter().map(|v| fmt_opt(*v)).collect();
                summary.push(format!(
                    "stable competency per repeat: {}",
                    stable.join(" ")
                ));
            }
            ExperimentId::Run => {
                let variants = run_spec(&spec, s.jobs)?;
                io::write_curves(&mut out, &name, &variants, csv, ndjson)?;
                for (r, run) in variants[0].runs.iter().enumerate() {
                    if let Some(last) = run.records.last() {
                        summary.push(format!(
                            "repeat {r}: {} generations, best_pheno {}, best_geno {}",
                            run.records.len(),
                            fmt_num(last.best_pheno),
                            fmt_num(last.best_geno)
                        ));
                    }
                }
            }
            ExperimentId::Sweep => unreachable!(),
        }
        (serde_json::to_value(&spec)?, spec.seeds())
    };

    let mut files = out.written().to_vec();
    files.push("manifest.json".into());
    let manifest = Manifest {
        tool: TOOL,
        version: VERSION,
        experiment: id,
        config: s.to_overrides(),
        spec: spec_json,
        base_seed: s.seed,
        repeats: s.repeats,
        seeds,
        seed_derivation: SEED_DERIVATION,
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        grid,
        undefined_correlations,
        definitions: definitions(id),
        files: files.clone(),
    };
    out.json("manifest.json", &manifest)?;
    Ok(Outcome { files, summary })
}
