//! Resolution of run settings from defaults, a TOML file and command-line
//! flags, in increasing order of precedence.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use morphogen_core::{CompetencyMode, EvolutionConfig, InitMode};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LabError, Result};
use crate::experiments::{ExperimentId, EXP4_PENALTY_WEIGHT};

/// Output files to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Ndjson,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn ndjson(self) -> bool {
        matches!(self, Format::Ndjson | Format::Both)
    }
}

impl FromStr for Format {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "ndjson" => Ok(Format::Ndjson),
            "both" => Ok(Format::Both),
            _ => Err(LabError::Config(format!(
                "format: expected csv, ndjson or both, got {s:?}"
            ))),
        }
    }
}

/// Sweep grid shape, written `RxC` (mutation probabilities × selection
/// fractions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Grid {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LabError::Config(format!("grid: expected RxC such as 12x11, got {s:?}"));
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows: usize = r.trim().parse().map_err(|_| bad())?;
        let cols: usize = c.trim().parse().map_err(|_| bad())?;
        if rows == 0 || cols == 0 {
            return Err(bad());
        }
        Ok(Grid { rows, cols })
    }
}

/// Parses `none`, `fixed:N`, `evolvable` or `evolvable:A-B:C-D` (init and
/// mutation ranges).
pub fn parse_competency(s: &str) -> Result<CompetencyMode> {
    let bad = |why: &str| LabError::Config(format!("competency: {why} in {s:?}"));
    let range = |part: &str| -> Result<(u32, u32)> {
        let (a, b) = part
            .split_once('-')
            .ok_or_else(|| bad("expected a range A-B"))?;
        let a = a.trim().parse().map_err(|_| bad("bad range start"))?;
        let b = b.trim().parse().map_err(|_| bad("bad range end"))?;
        Ok((a, b))
    };
    let mut parts = s.trim().split(':');
    let mode = match (parts.next(), parts.next(), parts.next()) {
        (Some("none"), None, None) => CompetencyMode::None,
        (Some("fixed"), Some(n), None) => {
            CompetencyMode::Fixed(n.trim().parse().map_err(|_| bad("bad level"))?)
        }
        (Some("evolvable"), None, None) => CompetencyMode::evolvable_default(),
        (Some("evolvable"), Some(init), Some(mutate)) => CompetencyMode::Evolvable {
            init_range: range(init)?,
            mutate_range: range(mutate)?,
        },
        _ => return Err(bad("expected none, fixed:N or evolvable[:A-B:C-D]")),
    };
    if parts.next().is_some() {
        return Err(bad("trailing fields"));
    }
    Ok(mode)
}

fn parse_init_mode(s: &str) -> Result<InitMode> {
    match s {
        "uniform" | "uniform_with_replacement" => Ok(InitMode::UniformWithReplacement),
        "permutation" | "random_permutation" => Ok(InitMode::RandomPermutation),
        _ => Err(LabError::Config(format!(
            "init-mode: expected uniform or permutation, got {s:?}"
        ))),
    }
}

/// Every setting a user can supply. Field names double as config-file keys
/// (kebab-case) and long flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[serde(default)]
pub struct Overrides {
    pub repeats: Option<u32>,
    pub generations: Option<u32>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<String>,
    pub stop_at_max: Option<bool>,
    pub init_mode: Option<String>,
    pub pop_size: Option<usize>,
    pub genome_len: Option<usize>,
    pub mutation_prob: Option<f64>,
    pub selection_frac: Option<f64>,
    pub competency: Option<String>,
    pub competent_fraction: Option<f64>,
    pub x_max: Option<u32>,
    pub penalty_weight: Option<f64>,
    pub grid: Option<String>,
    pub bin_width: Option<usize>,
}

impl Overrides {
    /// Reads a TOML config file, or the `config` table of a JSON run
    /// manifest.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let fail = |e: &dyn std::fmt::Display| LabError::Config(format!("{}: {e}", path.display()));
        if path.extension().is_some_and(|e| e == "json") {
            let mut doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| fail(&e))?;
            let config = match doc.get_mut("config") {
                Some(c) => c.take(),
                None => doc,
            };
            serde_json::from_value(config).map_err(|e| fail(&e))
        } else {
            toml::from_str(&text).map_err(|e| fail(&e))
        }
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: self.$f.or(lower.$f)),* } };
        }
        pick!(
            repeats,
            generations,
            seed,
            jobs,
            out_dir,
            format,
            stop_at_max,
            init_mode,
            pop_size,
            genome_len,
            mutation_prob,
            selection_frac,
            competency,
            competent_fraction,
            x_max,
            penalty_weight,
            grid,
            bin_width
        )
    }
}

/// Fully resolved settings for one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentId,
    pub base: EvolutionConfig,
    pub repeats: u32,
    pub seed: u64,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub format: Format,
    pub grid: Grid,
    pub bin_width: usize,
}

pub const DEFAULT_SEED: u64 = 1;

/// Repeat counts at which every experiment finishes in minutes on one core.
/// The published runs used 100.
pub fn default_repeats(id: ExperimentId) -> u32 {
    match id {
        ExperimentId::Exp1 | ExperimentId::Exp2 => 20,
        ExperimentId::Exp3 => 10,
        ExperimentId::Exp4 | ExperimentId::Sweep => 5,
        ExperimentId::Run => 1,
    }
}

/// Defaults for each subcommand before any user input.
pub fn default_config(id: ExperimentId) -> EvolutionConfig {
    let base = EvolutionConfig::default();
    match id {
        ExperimentId::Exp1 => EvolutionConfig {
            max_generations: 250,
            ..base
        },
        ExperimentId::Exp2 => EvolutionConfig {
            pop_size: 200,
            max_generations: 30,
            ..base
        },
        ExperimentId::Exp3 | ExperimentId::Sweep => EvolutionConfig {
            competency: CompetencyMode::evolvable_default(),
            ..base
        },
        ExperimentId::Exp4 => EvolutionConfig {
            competency: CompetencyMode::evolvable_default(),
            max_generations: 3000,
            penalty_weight: EXP4_PENALTY_WEIGHT,
            ..base
        },
        ExperimentId::Run => base,
    }
}

fn default_bin_width(id: ExperimentId) -> usize {
    if id == ExperimentId::Exp4 {
        50
    } else {
        10
    }
}

/// Keys the subcommand's variants already decide; setting them is an error
/// rather than being silently ignored.
fn fixed_keys(id: ExperimentId) -> &'static [&'static str] {
    match id {
        ExperimentId::Exp1 => &["competency", "competent-fraction", "penalty-weight", "grid"],
        ExperimentId::Exp2 => &["competency", "competent-fraction", "penalty-weight", "grid"],
        ExperimentId::Exp3 => &["competent-fraction", "penalty-weight", "grid"],
        ExperimentId::Exp4 => &["competent-fraction", "grid"],
        ExperimentId::Sweep => &["competent-fraction", "mutation-prob", "selection-frac"],
        ExperimentId::Run => &["grid"],
    }
}

impl Settings {
    pub fn resolve(id: ExperimentId, o: Overrides) -> Result<Settings> {
        let set = [
            ("competency", o.competency.is_some()),
            ("competent-fraction", o.competent_fraction.is_some()),
            ("penalty-weight", o.penalty_weight.is_some()),
            ("grid", o.grid.is_some()),
            ("mutation-prob", o.mutation_prob.is_some()),
            ("selection-frac", o.selection_frac.is_some()),
        ];
        for (key, present) in set {
            if present && fixed_keys(id).contains(&key) {
                return Err(LabError::Config(format!("{key}: not adjustable for {id}")));
            }
        }

        let mut base = default_config(id);
        if let Some(v) = o.generations {
            base.max_generations = v;
        }
        if let Some(v) = o.pop_size {
            base.pop_size = v;
        }
        if let Some(v) = o.genome_len {
            base.genome_len = v;
        }
        if let Some(v) = o.mutation_prob {
            base.mutation_prob = v;
        }
        if let Some(v) = o.selection_frac {
            base.selection_frac = v;
        }
        if let Some(v) = o.x_max {
            base.x_max = v;
        }
        if let Some(v) = o.penalty_weight {
            base.penalty_weight = v;
        }
        if let Some(v) = o.competent_fraction {
            base.competent_fraction = Some(v);
        }
        if let Some(s) = &o.competency {
            base.competency = parse_competency(s)?;
            if matches!(
                id,
                ExperimentId::Exp3 | ExperimentId::Exp4 | ExperimentId::Sweep
            ) && !base.competency.is_evolvable()
            {
                return Err(LabError::Config(format!(
                    "competency: {id} needs an evolvable gene"
                )));
            }
        }
        if let Some(s) = &o.init_mode {
            base.init_mode = parse_init_mode(s)?;
        }
        if let Some(v) = o.stop_at_max {
            base.stop_at_max_fitness = v;
        }
        base.validate()?;

        let repeats = o.repeats.unwrap_or_else(|| default_repeats(id));
        if repeats == 0 {
            return Err(LabError::Config("repeats: must be positive".into()));
        }
        let jobs = o.jobs.unwrap_or_else(crate::pool::default_jobs);
        if jobs == 0 {
            return Err(LabError::Config("jobs: must be positive".into()));
        }
        let bin_width = o.bin_width.unwrap_or_else(|| default_bin_width(id));
        if bin_width == 0 {
            return Err(LabError::Config("bin-width: must be positive".into()));
        }
        let grid = match &o.grid {
            Some(g) => g.parse()?,
            None => Grid { rows: 12, cols: 11 },
        };
        let format = match &o.format {
            Some(f) => f.parse()?,
            None => Format::default(),
        };

        Ok(Settings {
            experiment: id,
            base,
            repeats,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            jobs,
            out_dir: o.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            format,
            grid,
            bin_width,
        })
    }
}

impl Settings {
    /// The settings that determine output data, as config keys. Feeding
    /// these back through [`Settings::resolve`] reproduces the same run.
    pub fn to_overrides(&self) -> Overrides {
        let b = &self.base;
        let fixed = fixed_keys(self.experiment);
        let keep = |key: &str| !fixed.contains(&key);
        Overrides {
            repeats: Some(self.repeats),
            generations: Some(b.max_generations),
            seed: Some(self.seed),
            jobs: None,
            out_dir: None,
            format: Some(self.format.name().into()),
            stop_at_max: Some(b.stop_at_max_fitness),
            init_mode: Some(init_mode_name(b.init_mode).into()),
            pop_size: Some(b.pop_size),
            genome_len: Some(b.genome_len),
            mutation_prob: keep("mutation-prob").then_some(b.mutation_prob),
            selection_frac: keep("selection-frac").then_some(b.selection_frac),
            competency: keep("competency").then(|| competency_string(b.competency)),
            competent_fraction: b.competent_fraction.filter(|_| keep("competent-fraction")),
            x_max: Some(b.x_max),
            penalty_weight: keep("penalty-weight").then_some(b.penalty_weight),
            grid: keep("grid").then(|| format!("{}x{}", self.grid.rows, self.grid.cols)),
            bin_width: Some(self.bin_width),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Ndjson => "ndjson",
            Format::Both => "both",
        }
    }
}

pub fn init_mode_name(mode: InitMode) -> &'static str {
    match mode {
        InitMode::UniformWithReplacement => "uniform",
        InitMode::RandomPermutation => "permutation",
    }
}

/// Inverse of [`parse_competency`].
pub fn competency_string(mode: CompetencyMode) -> String {
    match mode {
        CompetencyMode::None => "none".into(),
        CompetencyMode::Fixed(x) => format!("fixed:{x}"),
        CompetencyMode::Evolvable {
            init_range: (a, b),
            mutate_range: (c, d),
        } => format!("evolvable:{a}-{b}:{c}-{d}"),
    }
}
