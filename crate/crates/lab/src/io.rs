//! Deterministic CSV, NDJSON and JSON writers.
//!
//! Numbers are printed in plain decimal with at most 12 significant digits.
//! Files are UTF-8 with `\n` line endings. Missing values are empty CSV
//! fields or JSON `null`; "never happened" entries in summary tables are `x`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use morphogen_core::GenerationRecord;
use serde::Serialize;

use crate::error::{io_err, Result};
use crate::experiments::{
    mean_series, EvolvableReport, Exp1Report, Exp2Report, SweepReport, VariantRuns,
};

pub const CURVES_HEADER: &str = "experiment,variant,repeat,generation,best_pheno,best_geno,mean_pheno,mean_geno,best_competency,comp_min,comp_max,competent_prevalence,hardwired_prevalence,corr_geno_pheno";

/// Marker for "never" in summary tables.
pub const NEVER: &str = "x";

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Decimal text with at most 12 significant digits and no exponent.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round12(x))
}

pub fn fmt_opt<T: Into<f64>>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| fmt_num(v.into()))
}

fn fmt_or_never<T: Into<f64>>(x: Option<T>) -> String {
    x.map_or_else(|| NEVER.to_string(), |v| fmt_num(v.into()))
}

/// Percent label for a fraction, e.g. `0.025` → `2.5`.
pub fn pct(frac: f64) -> String {
    fmt_num(frac * 100.0)
}

/// Collects files under one output directory and remembers what was written.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// File names written so far, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(io_err(&path))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Writes a CSV whose rows are already comma-joined.
    pub fn csv(
        &mut self,
        name: &str,
        header: &str,
        rows: impl IntoIterator<Item = String>,
    ) -> Result<()> {
        let mut s = String::with_capacity(4096);
        s.push_str(header);
        s.push('\n');
        for row in rows {
            s.push_str(&row);
            s.push('\n');
        }
        self.write(name, &s)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }
}

fn curve_row(experiment: &str, variant: &str, repeat: usize, g: &GenerationRecord) -> String {
    let mut s = String::with_capacity(160);
    let _ = write!(
        s,
        "{experiment},{variant},{repeat},{},{},{},{},{},{},{},{},{},{},{}",
        g.generation,
        fmt_num(g.best_pheno),
        fmt_num(g.best_geno),
        fmt_num(g.mean_pheno),
        fmt_num(g.mean_geno),
        fmt_opt(g.best_competency),
        fmt_opt(g.comp_min),
        fmt_opt(g.comp_max),
        fmt_num(g.competent_prevalence()),
        fmt_num(g.hardwired_prevalence()),
        fmt_opt(g.corr_geno_pheno),
    );
    s
}

/// One NDJSON line: the CSV columns plus raw phenotypic fitness and the
/// cumulative per-locus change counts (competency gene last).
#[derive(Serialize)]
struct CurveLine<'a> {
    experiment: &'a str,
    variant: &'a str,
    repeat: usize,
    generation: u32,
    best_pheno: f64,
    best_geno: f64,
    mean_pheno: f64,
    mean_geno: f64,
    best_competency: Option<u32>,
    comp_min: Option<u32>,
    comp_max: Option<u32>,
    competent_prevalence: f64,
    hardwired_prevalence: f64,
    corr_geno_pheno: Option<f64>,
    best_pheno_raw: f64,
    mean_pheno_raw: f64,
    locus_changes: &'a [u64],
}

impl<'a> CurveLine<'a> {
    fn new(experiment: &'a str, variant: &'a str, repeat: usize, g: &'a GenerationRecord) -> Self {
        Self {
            experiment,
            variant,
            repeat,
            generation: g.generation,
            best_pheno: round12(g.best_pheno),
            best_geno: round12(g.best_geno),
            mean_pheno: round12(g.mean_pheno),
            mean_geno: round12(g.mean_geno),
            best_competency: g.best_competency,
            comp_min: g.comp_min,
            comp_max: g.comp_max,
            competent_prevalence: round12(g.competent_prevalence()),
            hardwired_prevalence: round12(g.hardwired_prevalence()),
            corr_geno_pheno: g.corr_geno_pheno.map(round12),
            best_pheno_raw: round12(g.best_pheno_raw),
            mean_pheno_raw: round12(g.mean_pheno_raw),
            locus_changes: &g.locus_changes,
        }
    }
}

/// `curves.csv` and/or `curves.ndjson` for every variant and repeat.
pub fn write_curves(
    out: &mut OutDir,
    experiment: &str,
    variants: &[VariantRuns],
    csv: bool,
    ndjson: bool,
) -> Result<()> {
    let rows = || {
        variants.iter().flat_map(move |v| {
            v.runs
                .iter()
                .enumerate()
                .flat_map(move |(r, run)| run.records.iter().map(move |g| (v.label.as_str(), r, g)))
        })
    };
    if csv {
        out.csv(
            "curves.csv",
            CURVES_HEADER,
            rows().map(|(label, r, g)| curve_row(experiment, label, r, g)),
        )?;
    }
    if ndjson {
        let mut s = String::new();
        for (label, r, g) in rows() {
            s.push_str(&serde_json::to_string(&CurveLine::new(
                experiment, label, r, g,
            ))?);
            s.push('\n');
        }
        out.write("curves.ndjson", &s)?;
    }
    Ok(())
}

pub fn write_exp1(out: &mut OutDir, report: &Exp1Report) -> Result<()> {
    let header = std::iter::once("variant".to_string())
        .chain(
            report
                .thresholds
                .iter()
                .map(|t| format!("f_{}", fmt_num(*t))),
        )
        .collect::<Vec<_>>()
        .join(",");
    out.csv(
        "thresholds.csv",
        &header,
        report.threshold_table.iter().map(|row| {
            std::iter::once(row.label.clone())
                .chain(row.medians.iter().map(|m| fmt_or_never(*m)))
                .collect::<Vec<_>>()
                .join(",")
        }),
    )?;

    out.csv(
        "ttests.csv",
        "comparison,generation,t_statistic,p_value,df,variance_ratio,method,degenerate",
        report.ttests.iter().map(|t| {
            let r = &t.report;
            let method = match r.method {
                morphogen_core::stats::TTestMethod::Student => "student",
                morphogen_core::stats::TTestMethod::WelchFallback => "welch_fallback",
            };
            format!(
                "{},{},{},{},{},{},{method},{}",
                t.comparison,
                t.generation,
                fmt_num(r.t_statistic),
                fmt_num(r.p_value),
                fmt_num(r.df),
                fmt_num(r.variance_ratio),
                r.degenerate
            )
        }),
    )?;

    let mut rows = Vec::new();
    for (measure, bands) in [
        ("best_pheno", &report.pheno_bands),
        ("best_geno", &report.geno_bands),
    ] {
        for (v, series) in report.variants.iter().zip(bands.iter()) {
            for (g, b) in series.iter().enumerate() {
                rows.push(format!(
                    "{},{measure},{g},{},{},{}",
                    v.label,
                    fmt_num(b.mean),
                    fmt_num(b.lower),
                    fmt_num(b.upper)
                ));
            }
        }
    }
    out.csv(
        "bands.csv",
        "variant,measure,generation,mean,lower,upper",
        rows,
    )
}

pub fn write_exp2(out: &mut OutDir, report: &Exp2Report) -> Result<()> {
    let mut levels: Vec<u32> = Vec::new();
    let mut fractions: Vec<f64> = Vec::new();
    for c in &report.cells {
        if !levels.contains(&c.level) {
            levels.push(c.level);
        }
        if !fractions.iter().any(|f| (f - c.fraction).abs() < 1e-12) {
            fractions.push(c.fraction);
        }
    }
    let header = std::iter::once("level".to_string())
        .chain(fractions.iter().map(|f| format!("pct_{}", pct(*f))))
        .collect::<Vec<_>>()
        .join(",");
    out.csv(
        "domination.csv",
        &header,
        levels.iter().map(|&level| {
            std::iter::once(level.to_string())
                .chain(fractions.iter().map(|&f| {
                    report
                        .cell(level, f)
                        .and_then(|c| c.mean_curve)
                        .map_or_else(|| NEVER.to_string(), |g| g.to_string())
                }))
                .collect::<Vec<_>>()
                .join(",")
        }),
    )?;

    out.csv(
        "domination_summary.csv",
        "level,pct,mean_curve_generation,dominated_share,dominated_within_5,median_generation",
        report.cells.iter().map(|c| {
            let gens: Vec<f64> = c
                .per_repeat
                .iter()
                .map(|d| d.map_or(f64::INFINITY, |g| g as f64))
                .collect();
            let med = morphogen_core::stats::median(&gens).filter(|m| m.is_finite());
            format!(
                "{},{},{},{},{},{}",
                c.level,
                pct(c.fraction),
                c.mean_curve
                    .map_or_else(|| NEVER.to_string(), |g| g.to_string()),
                fmt_num(c.dominated_share()),
                fmt_num(c.dominated_by(5)),
                fmt_or_never(med)
            )
        }),
    )?;

    out.csv(
        "domination_repeats.csv",
        "level,pct,repeat,generation",
        report.cells.iter().flat_map(|c| {
            c.per_repeat.iter().enumerate().map(move |(r, d)| {
                format!(
                    "{},{},{r},{}",
                    c.level,
                    pct(c.fraction),
                    d.map_or_else(|| NEVER.to_string(), |g| g.to_string())
                )
            })
        }),
    )
}

fn opt_or_nan(x: Option<u32>) -> f64 {
    x.map_or(f64::NAN, f64::from)
}

pub fn write_evolvable(out: &mut OutDir, report: &EvolvableReport) -> Result<()> {
    let v = &report.variants[0];
    let runs = report.runs();
    let m = |f: fn(&GenerationRecord) -> f64| mean_series(&crate::experiments::matrix(runs, f));
    let best_c = m(|g| opt_or_nan(g.best_competency));
    let min_c = m(|g| opt_or_nan(g.comp_min));
    let max_c = m(|g| opt_or_nan(g.comp_max));
    let best_p = m(|g| g.best_pheno);
    let best_g = m(|g| g.best_geno);
    out.csv(
        "competency.csv",
        "variant,generation,best_competency_mean,comp_min_mean,comp_max_mean,best_pheno_mean,best_geno_mean",
        (0..best_c.len()).map(|g| {
            format!(
                "{},{g},{},{},{},{},{}",
                v.label,
                fmt_num(best_c[g]),
                fmt_num(min_c[g]),
                fmt_num(max_c[g]),
                fmt_num(best_p[g]),
                fmt_num(best_g[g])
            )
        }),
    )?;

    out.csv(
        "correlation_bins.csv",
        "start,end,mean,defined,undefined",
        report.correlation_bins.iter().map(|b| {
            format!(
                "{},{},{},{},{}",
                b.start,
                b.end,
                fmt_opt(b.mean),
                b.defined,
                b.undefined
            )
        }),
    )?;

    let comp = m(|g| g.competency_changes() as f64);
    let structural = m(GenerationRecord::mean_structural_changes);
    out.csv(
        "gene_changes.csv",
        "generation,competency_changes_mean,structural_changes_mean",
        (0..comp.len()).map(|g| format!("{g},{},{}", fmt_num(comp[g]), fmt_num(structural[g]))),
    )?;

    out.csv(
        "stable_competency.csv",
        "repeat,seed,stable_competency,final_competency_changes,final_structural_changes_mean",
        runs.iter()
            .zip(&report.stable_values)
            .enumerate()
            .map(|(r, (run, s))| {
                let last = run.records.last();
                format!(
                    "{r},{},{},{},{}",
                    run.seed,
                    fmt_opt(*s),
                    last.map_or_else(String::new, |g| g.competency_changes().to_string()),
                    last.map_or_else(String::new, |g| fmt_num(g.mean_structural_changes()))
                )
            }),
    )
}

pub fn write_sweep(out: &mut OutDir, report: &SweepReport) -> Result<()> {
    let seeds = report.spec.seeds();
    out.csv(
        "sweep_points.csv",
        "mutation_prob,selection_frac,repeat,seed,stable_competency",
        report.points.iter().flat_map(|p| {
            let seeds = &seeds;
            p.stable_values.iter().enumerate().map(move |(r, s)| {
                format!(
                    "{},{},{r},{},{}",
                    fmt_num(p.mutation_prob),
                    fmt_num(p.selection_frac),
                    seeds[r],
                    fmt_num(*s)
                )
            })
        }),
    )?;
    out.csv(
        "sweep_grid.csv",
        "mutation_prob,selection_frac,mean_stable_competency",
        report.points.iter().map(|p| {
            format!(
                "{},{},{}",
                fmt_num(p.mutation_prob),
                fmt_num(p.selection_frac),
                fmt_num(p.mean_stable())
            )
        }),
    )?;
    let names = ["mutation_prob", "selection_frac", "stable_competency"];
    out.csv(
        "sweep_correlations.csv",
        "variable,mutation_prob,selection_frac,stable_competency",
        names
            .iter()
            .zip(&report.correlation_matrix)
            .map(|(n, row)| {
                format!(
                    "{n},{},{},{}",
                    fmt_opt(row[0]),
                    fmt_opt(row[1]),
                    fmt_opt(row[2])
                )
            }),
    )
}
