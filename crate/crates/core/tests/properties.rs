use approx::assert_relative_eq;
use morphogen_core::rng::rng_from_seed;
use morphogen_core::stats::{ci95, pearson, student_t_two_sided, t_test};
use morphogen_core::{
    develop, fitness, inversion_count, non_inversion_count, pair_count, run_evolution,
    CompetencyMode, Embryo, EmbryoKind, EvolutionConfig, InitMode,
};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn genes(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    (2..=max_len).prop_flat_map(|n| proptest::collection::vec(1..=n as u32, n))
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-50.0..50.0f64, 2..60)
}

proptest! {
    #[test]
    fn nic_plus_inversions_is_pair_count(a in genes(40)) {
        let nic = non_inversion_count(&a).unwrap();
        prop_assert_eq!(nic + inversion_count(&a), pair_count(a.len()));
    }

    #[test]
    fn fitness_ignores_constant_shift(a in genes(30), c in 1u32..100) {
        let shifted: Vec<u32> = a.iter().map(|g| g + c).collect();
        prop_assert_eq!(fitness(&a).unwrap(), fitness(&shifted).unwrap());
    }

    #[test]
    fn development_keeps_values_and_never_hurts(a in genes(30), budget in 0u32..600) {
        let out = develop(&a, budget);
        let mut before = a.clone();
        let mut after = out.developed_genes.clone();
        before.sort_unstable();
        after.sort_unstable();
        prop_assert_eq!(before, after);
        prop_assert!(out.swaps_used <= budget);
        prop_assert_eq!(inversion_count(&out.developed_genes), inversion_count(&a) - out.swaps_used);
        let (f0, f1) = (fitness(&a).unwrap().f, fitness(&out.developed_genes).unwrap().f);
        if out.swaps_used > 0 {
            prop_assert!(f1 > f0);
        } else {
            prop_assert_eq!(f1, f0);
        }
    }

    #[test]
    fn full_budget_sorts(a in genes(30)) {
        let out = develop(&a, pair_count(a.len()));
        prop_assert!(out.developed_genes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(fitness(&out.developed_genes).unwrap().f, 1.0);
    }

    #[test]
    fn pearson_affine_and_sign(x in samples(), scale in 0.1..10.0f64, offset in -20.0..20.0f64, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let y: Vec<f64> = x.iter().map(|v| v * 0.3 + rng.gen_range(-5.0..5.0)).collect();
        let r = pearson(&x, &y).unwrap().unwrap();
        let moved: Vec<f64> = x.iter().map(|v| scale * v + offset).collect();
        let negated: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson(&moved, &y).unwrap().unwrap(), r, epsilon = 1e-9);
        assert_relative_eq!(pearson(&x, &negated).unwrap().unwrap(), -r, epsilon = 1e-12);
    }

    #[test]
    fn t_test_swap_negates_t(a in samples(), b in samples()) {
        let ab = t_test(&a, &b).unwrap();
        let ba = t_test(&b, &a).unwrap();
        assert_relative_eq!(ab.t_statistic, -ba.t_statistic, max_relative = 1e-12);
        assert_relative_eq!(ab.p_value, ba.p_value, max_relative = 1e-12);
        prop_assert!(ab.variance_ratio >= 1.0);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn p_value_matches_reference_cdf(t in -40.0..40.0f64, df in 1.0..1000.0f64) {
        let reference = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
        let p = student_t_two_sided(t, df);
        prop_assert!((p - reference).abs() <= 1e-10, "t={t} df={df}: {p} vs {reference}");
    }
}

#[test]
fn bands_narrow_with_more_repeats() {
    let base: Vec<Vec<f64>> = (0..4).map(|r| vec![f64::from(r % 2)]).collect();
    let more: Vec<Vec<f64>> = (0..16).map(|r| vec![f64::from(r % 2)]).collect();
    let w = |rows: &[Vec<f64>]| {
        let b = ci95(rows).unwrap()[0];
        assert!(b.lower <= b.mean && b.mean <= b.upper);
        b.upper - b.lower
    };
    let (w4, w16) = (w(&base), w(&more));
    // same sample sd up to the n-1 correction
    let sd4 = (4.0f64 / 12.0).sqrt();
    let sd16 = (16.0f64 / 60.0).sqrt();
    assert_relative_eq!(w4 / w16, (sd4 / 2.0) / (sd16 / 4.0), max_relative = 1e-12);
}

#[test]
fn random_permutation_nic_mean_is_half_the_pairs() {
    let n = 50;
    let mut rng = rng_from_seed(2024);
    let samples = 10_000;
    let nics: Vec<f64> = (0..samples)
        .map(|_| {
            let e = Embryo::random(
                n,
                EmbryoKind::Hardwired,
                None,
                500,
                InitMode::RandomPermutation,
                &mut rng,
            )
            .unwrap();
            f64::from(non_inversion_count(e.genes()).unwrap())
        })
        .collect();
    let mean = nics.iter().sum::<f64>() / samples as f64;
    // variance of the inversion count of a uniform permutation
    let nf = n as f64;
    let sd = (nf * (nf - 1.0) * (2.0 * nf + 5.0) / 72.0).sqrt();
    let se = sd / (samples as f64).sqrt();
    let expect = f64::from(pair_count(n)) / 2.0;
    assert!(
        (mean - expect).abs() < 3.0 * se,
        "mean {mean}, expected {expect} +/- {}",
        3.0 * se
    );
}

#[test]
fn runs_are_reproducible_and_seed_sensitive() {
    let config = EvolutionConfig {
        max_generations: 40,
        competency: CompetencyMode::Fixed(25),
        competent_fraction: Some(0.2),
        pop_size: 80,
        seed: 5,
        ..Default::default()
    };
    let a = run_evolution(&config).unwrap();
    assert_eq!(a, run_evolution(&config).unwrap());
    let b = run_evolution(&EvolutionConfig { seed: 6, ..config }).unwrap();
    assert_ne!(a, b);
}

#[test]
fn stop_at_max_ends_on_first_perfect_generation() {
    let config = EvolutionConfig {
        max_generations: 200,
        competency: CompetencyMode::Fixed(400),
        stop_at_max_fitness: true,
        seed: 3,
        ..Default::default()
    };
    let run = run_evolution(&config).unwrap();
    let last = run.records.last().unwrap();
    assert_eq!(last.best_pheno_raw, 1.0);
    assert!(run.records[..run.records.len() - 1]
        .iter()
        .all(|g| g.best_pheno_raw < 1.0));
}

#[test]
fn huge_fixed_budget_is_perfect_at_generation_zero() {
    let config = EvolutionConfig {
        max_generations: 1,
        competency: CompetencyMode::Fixed(1225),
        x_max: 1225,
        seed: 8,
        ..Default::default()
    };
    let run = run_evolution(&config).unwrap();
    assert_eq!(run.records[0].best_pheno, 1.0);
    assert_eq!(run.records[0].mean_pheno, 1.0);
}
