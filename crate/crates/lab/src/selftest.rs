//! Invariant checks run by `morphogen selftest`.
//!
//! Each check recomputes a quantity the slow, obvious way and compares it with
//! the library. Random inputs come from a counter-hashed stream so the suite
//! is the same on every machine.

use morphogen_core::rng::mix64;
use morphogen_core::stats::{ci95, pearson, t_test};
use morphogen_core::{
    develop, fitness, inversion_count, CompetencyMode, EmbryoKind, EvolutionConfig, Simulation,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

struct Stream(u64);

impl Stream {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(1);
        mix64(self.0 ^ 0xA076_1D64_78BD_642F)
    }

    /// Uniform on `[lo, hi]`; bias is irrelevant for test inputs.
    fn int(&mut self, lo: u32, hi: u32) -> u32 {
        lo + (self.next() % u64::from(hi - lo + 1)) as u32
    }

    fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, rest: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

fn brute_ordered_pairs(a: &[u32]) -> u32 {
    let mut c = 0;
    for j in 0..a.len() {
        for i in 0..j {
            c += u32::from(a[i] <= a[j]);
        }
    }
    c
}

fn check(name: &'static str, failures: Vec<String>, total: usize) -> CheckResult {
    CheckResult {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{total} checked"),
            Some(first) => format!("{} of {total} failed, first: {first}", failures.len()),
        },
    }
}

fn fitness_vs_pair_count() -> CheckResult {
    let mut cases: Vec<Vec<u32>> = (2..=6).flat_map(permutations).collect();
    let mut rng = Stream(1);
    for _ in 0..500 {
        let n = rng.int(2, 12);
        cases.push((0..n).map(|_| rng.int(1, n)).collect());
    }
    let mut failures = Vec::new();
    for a in &cases {
        let n = a.len() as f64;
        let pairs = n * (n - 1.0) / 2.0;
        let nic = brute_ordered_pairs(a);
        let expect = 9f64.powf(f64::from(nic) / pairs) / 9.0;
        let got = fitness(a).expect("length >= 2");
        if got.nic != nic
            || (got.f - expect).abs() > 1e-12 * expect
            || !(1.0 / 9.0 - 1e-15..=1.0).contains(&got.f)
        {
            failures.push(format!("{a:?}: nic {} vs {nic}", got.nic));
        }
    }
    check(
        "fitness matches brute-force pair count",
        failures,
        cases.len(),
    )
}

fn development_algebra() -> CheckResult {
    let mut failures = Vec::new();
    let mut total = 0;
    for a in (2..=6).flat_map(permutations) {
        let inv = inversion_count(&a);
        for budget in 0..=15u32 {
            total += 1;
            let out = develop(&a, budget);
            let mut sorted_in = a.clone();
            sorted_in.sort_unstable();
            let mut sorted_out = out.developed_genes.clone();
            sorted_out.sort_unstable();
            if inversion_count(&out.developed_genes) != inv.saturating_sub(budget)
                || out.swaps_used != budget.min(inv)
                || sorted_in != sorted_out
            {
                failures.push(format!("{a:?} budget {budget}"));
            }
        }
    }
    check(
        "development removes one inversion per swap",
        failures,
        total,
    )
}

fn pearson_vs_naive() -> CheckResult {
    let mut rng = Stream(2);
    let mut failures = Vec::new();
    for case in 0..300 {
        let n = rng.int(2, 60) as usize;
        let x: Vec<f64> = (0..n).map(|_| rng.unit() * 10.0 - 3.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + rng.unit() * 4.0).collect();
        let k = n as f64;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let naive = (k * sxy - sx * sy) / ((k * sxx - sx * sx).sqrt() * (k * syy - sy * sy).sqrt());
        match pearson(&x, &y) {
            Ok(Some(r)) if (r - naive).abs() <= 1e-9 * naive.abs().max(1e-3) => {}
            other => failures.push(format!("case {case}: {other:?} vs {naive}")),
        }
    }
    check("pearson matches raw-sum formula", failures, 300)
}

fn t_test_symmetry() -> CheckResult {
    let mut rng = Stream(3);
    let mut failures = Vec::new();
    for case in 0..300 {
        let na = rng.int(2, 40) as usize;
        let nb = rng.int(2, 40) as usize;
        let a: Vec<f64> = (0..na).map(|_| rng.unit()).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.unit() * 2.0 + 0.1).collect();
        let (ab, ba) = (t_test(&a, &b), t_test(&b, &a));
        match (ab, ba) {
            (Ok(x), Ok(y))
                if (x.t_statistic + y.t_statistic).abs()
                    <= 1e-12 * x.t_statistic.abs().max(1.0)
                    && (x.p_value - y.p_value).abs() <= 1e-12
                    && (0.0..=1.0).contains(&x.p_value) => {}
            other => failures.push(format!("case {case}: {other:?}")),
        }
    }
    check(
        "t-test is antisymmetric in t and symmetric in p",
        failures,
        300,
    )
}

fn bands_contain_mean() -> CheckResult {
    let mut rng = Stream(4);
    let rows: Vec<Vec<f64>> = (0..7)
        .map(|_| (0..25).map(|_| rng.unit()).collect())
        .collect();
    let failures = match ci95(&rows) {
        Ok(bands) => bands
            .iter()
            .enumerate()
            .filter(|(_, b)| !(b.lower <= b.mean && b.mean <= b.upper))
            .map(|(g, b)| format!("generation {g}: {b:?}"))
            .collect(),
        Err(e) => vec![e.to_string()],
    };
    check("confidence bands contain the mean", failures, 25)
}

fn population_invariants() -> CheckResult {
    let mut failures = Vec::new();
    let configs = [
        EvolutionConfig {
            max_generations: 15,
            competency: CompetencyMode::Fixed(40),
            competent_fraction: Some(0.3),
            pop_size: 60,
            genome_len: 20,
            seed: 11,
            ..Default::default()
        },
        EvolutionConfig {
            max_generations: 15,
            competency: CompetencyMode::evolvable_default(),
            pop_size: 50,
            genome_len: 20,
            seed: 12,
            ..Default::default()
        },
    ];
    let mut total = 0;
    for config in configs {
        let mut sim = match Simulation::new(config.clone()) {
            Ok(s) => s,
            Err(e) => {
                failures.push(e.to_string());
                continue;
            }
        };
        for _ in 0..config.max_generations {
            total += 1;
            let record = match sim.step() {
                Ok(r) => r,
                Err(e) => {
                    failures.push(e.to_string());
                    break;
                }
            };
            let pop = sim.population();
            if pop.len() != config.pop_size || record.population() as usize != config.pop_size {
                failures.push(format!(
                    "generation {}: size {}",
                    record.generation,
                    pop.len()
                ));
            }
            for e in pop {
                let in_range = e
                    .genes()
                    .iter()
                    .all(|&g| 1 <= g && g as usize <= config.genome_len);
                let comp_ok = match (config.competency, e.competency()) {
                    (CompetencyMode::Fixed(x), Some(c)) => c == x,
                    (CompetencyMode::Fixed(_), None) => e.kind() == EmbryoKind::Hardwired,
                    (
                        CompetencyMode::Evolvable {
                            mutate_range: (lo, hi),
                            ..
                        },
                        Some(c),
                    ) => lo <= c && c <= hi,
                    _ => false,
                };
                if !in_range || !comp_ok {
                    failures.push(format!(
                        "generation {}: bad embryo {e:?}",
                        record.generation
                    ));
                    break;
                }
            }
        }
    }
    check(
        "populations keep size, gene range and competency range",
        failures,
        total,
    )
}

fn seeded_runs_repeat() -> CheckResult {
    let config = EvolutionConfig {
        max_generations: 20,
        competency: CompetencyMode::evolvable_default(),
        genome_len: 20,
        seed: 99,
        ..Default::default()
    };
    let a = morphogen_core::run_evolution(&config);
    let b = morphogen_core::run_evolution(&config);
    let failures = match (a, b) {
        (Ok(a), Ok(b)) if a == b => Vec::new(),
        _ => vec!["two runs with seed 99 differ".to_string()],
    };
    check("same seed gives the same run", failures, 1)
}

pub fn run_all() -> Vec<CheckResult> {
    vec![
        fitness_vs_pair_count(),
        development_algebra(),
        pearson_vs_naive(),
        t_test_symmetry(),
        bands_contain_mean(),
        population_invariants(),
        seeded_runs_repeat(),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for r in super::run_all() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
