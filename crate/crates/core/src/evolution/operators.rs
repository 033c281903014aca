//! The four per-generation operators: assessment, selection, crossover
//! repopulation and point mutation.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::{CompetencyMode, EvolutionConfig, PenaltyRule};
use crate::development::develop;
use crate::error::{invalid, Error, Result};
use crate::genome::{fitness_of, Embryo, EmbryoKind};

/// Fitness of one embryo before and after development.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub genotypic: f64,
    pub phenotypic: f64,
    /// Phenotypic fitness less the competency cost; the selection key.
    pub penalized: f64,
    pub developed_genes: Vec<u32>,
    pub swaps_used: u32,
}

pub fn assess_one(embryo: &Embryo, penalty: &PenaltyRule) -> Assessment {
    let genotypic = fitness_of(embryo.genes());
    let (developed_genes, swaps_used, phenotypic) = match embryo.competency() {
        Some(x) => {
            let out = develop(embryo.genes(), x);
            let f = if out.swaps_used == 0 {
                genotypic
            } else {
                fitness_of(&out.developed_genes)
            };
            (out.developed_genes, out.swaps_used, f)
        }
        None => (embryo.genes().to_vec(), 0, genotypic),
    };
    Assessment {
        genotypic,
        phenotypic,
        penalized: penalty.apply(phenotypic, embryo.competency()),
        developed_genes,
        swaps_used,
    }
}

/// Develops and scores every embryo. All embryos must share one length.
pub fn assess(population: &[Embryo], penalty: &PenaltyRule) -> Result<Vec<Assessment>> {
    if let Some(first) = population.first() {
        if let Some(bad) = population.iter().find(|e| e.len() != first.len()) {
            return Err(Error::LengthMismatch {
                left: first.len(),
                right: bad.len(),
            });
        }
    }
    Ok(population.iter().map(|e| assess_one(e, penalty)).collect())
}

/// Population indices sorted by penalized fitness, best first; ties keep the
/// lower index first.
pub fn rank(assessed: &[Assessment]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..assessed.len()).collect();
    order.sort_by(|&a, &b| {
        assessed[b]
            .penalized
            .partial_cmp(&assessed[a].penalized)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Number of survivors for a population of `pop_size` at stringency `frac`.
pub fn selection_size(pop_size: usize, frac: f64) -> usize {
    // the epsilon keeps 0.1 * 100 from rounding up to 11
    (libm::ceil(frac * pop_size as f64 - 1e-9) as usize)
        .max(1)
        .min(pop_size)
}

/// Keeps the top `ceil(frac * len)` embryos, in rank order.
pub fn select(population: &[Embryo], assessed: &[Assessment], frac: f64) -> Vec<Embryo> {
    let keep = selection_size(assessed.len(), frac);
    rank(assessed)
        .into_iter()
        .take(keep)
        .map(|i| population[i].clone())
        .collect()
}

/// Single-point crossover at `cut`: heads stay, tails swap. The competency
/// gene sits after the last structural gene and so travels with the tail.
pub fn crossover_at(p1: &Embryo, p2: &Embryo, cut: usize) -> Result<(Embryo, Embryo)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    if p1.kind() != p2.kind() {
        return Err(invalid("crossover between hardwired and competent embryos"));
    }
    if cut == 0 || cut >= p1.len() {
        return Err(invalid("crossover cut must lie in [1, n-1]"));
    }
    let (a, b) = (p1.genes(), p2.genes());
    let mut c1 = Vec::with_capacity(a.len());
    c1.extend_from_slice(&a[..cut]);
    c1.extend_from_slice(&b[cut..]);
    let mut c2 = Vec::with_capacity(a.len());
    c2.extend_from_slice(&b[..cut]);
    c2.extend_from_slice(&a[cut..]);
    Ok((
        Embryo::from_parts(c1, p2.competency()),
        Embryo::from_parts(c2, p1.competency()),
    ))
}

/// Crossover at a cut drawn uniformly from `[1, n-1]`.
pub fn crossover_pair<R: Rng + ?Sized>(
    p1: &Embryo,
    p2: &Embryo,
    rng: &mut R,
) -> Result<(Embryo, Embryo)> {
    if p1.len() < 2 {
        return Err(invalid("embryos too short to cross"));
    }
    let cut = rng.gen_range(1..p1.len());
    crossover_at(p1, p2, cut)
}

/// Offspring slots per kind, proportional to each kind's share of the
/// selected pool; the rounding remainder goes to the larger share
/// (competent on a tie).
pub fn allocate_slots(competent: usize, hardwired: usize, slots: usize) -> (usize, usize) {
    let total = competent + hardwired;
    if total == 0 {
        return (0, 0);
    }
    let c = slots * competent / total;
    let h = slots * hardwired / total;
    let rest = slots - c - h;
    if competent >= hardwired {
        (c + rest, h)
    } else {
        (c, h + rest)
    }
}

/// Refills the population to `target` with the survivors followed by
/// crossover offspring. Parents are distinct members of the same kind drawn
/// uniformly; a kind with a single survivor yields clones.
pub fn repopulate<R: Rng + ?Sized>(
    selected: &[Embryo],
    target: usize,
    rng: &mut R,
) -> Result<Vec<Embryo>> {
    if selected.is_empty() {
        return Err(invalid("cannot repopulate from an empty selection"));
    }
    let mut next: Vec<Embryo> = selected.iter().take(target).cloned().collect();
    let slots = target.saturating_sub(next.len());
    if slots == 0 {
        return Ok(next);
    }

    let competent: Vec<&Embryo> = selected
        .iter()
        .filter(|e| e.kind() == EmbryoKind::Competent)
        .collect();
    let hardwired: Vec<&Embryo> = selected
        .iter()
        .filter(|e| e.kind() == EmbryoKind::Hardwired)
        .collect();
    let (c_slots, h_slots) = allocate_slots(competent.len(), hardwired.len(), slots);

    let mut offspring = Vec::with_capacity(slots);
    breed(&competent, c_slots, rng, &mut offspring)?;
    breed(&hardwired, h_slots, rng, &mut offspring)?;
    if !competent.is_empty() && !hardwired.is_empty() {
        // keep index-based tie breaking from favouring either kind
        offspring.shuffle(rng);
    }
    next.extend(offspring);
    Ok(next)
}

fn breed<R: Rng + ?Sized>(
    pool: &[&Embryo],
    slots: usize,
    rng: &mut R,
    out: &mut Vec<Embryo>,
) -> Result<()> {
    if slots == 0 {
        return Ok(());
    }
    if pool.len() == 1 {
        out.extend(core::iter::repeat_n(pool[0], slots).cloned());
        return Ok(());
    }
    let mut made = 0;
    while made < slots {
        let i = rng.gen_range(0..pool.len());
        let mut j = rng.gen_range(0..pool.len() - 1);
        if j >= i {
            j += 1;
        }
        let (c1, c2) = crossover_pair(pool[i], pool[j], rng)?;
        out.push(c1);
        made += 1;
        if made < slots {
            out.push(c2);
            made += 1;
        }
    }
    Ok(())
}

/// Cumulative count of applied mutations that changed a gene, per locus.
/// Loci `0..n` are structural; locus `n` is the competency gene.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChangeCounters {
    counts: Vec<u64>,
}

impl ChangeCounters {
    pub fn new(genome_len: usize) -> Self {
        Self {
            counts: alloc::vec![0; genome_len + 1],
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn structural(&self) -> &[u64] {
        &self.counts[..self.counts.len() - 1]
    }

    pub fn competency(&self) -> u64 {
        self.counts[self.counts.len() - 1]
    }

    pub fn structural_mean(&self) -> f64 {
        let s = self.structural();
        s.iter().sum::<u64>() as f64 / s.len() as f64
    }

    fn bump(&mut self, locus: usize) {
        self.counts[locus] += 1;
    }
}

/// Point mutation, applied per individual.
///
/// With probability `mutation_prob` one uniformly chosen structural locus is
/// redrawn from `[1, n]`. When competency is evolvable the competency gene is
/// independently redrawn from the mutation range with the same probability.
pub fn mutate<R: Rng + ?Sized>(
    population: &mut [Embryo],
    config: &EvolutionConfig,
    rng: &mut R,
    counters: &mut ChangeCounters,
) {
    let p = config.mutation_prob;
    if p <= 0.0 {
        return;
    }
    for embryo in population.iter_mut() {
        let n = embryo.len();
        if rng.gen_bool(p) {
            let locus = rng.gen_range(0..n);
            let value = rng.gen_range(1..=n as u32);
            let genes = embryo.genes_mut();
            if genes[locus] != value {
                genes[locus] = value;
                counters.bump(locus);
            }
        }
        if let CompetencyMode::Evolvable {
            mutate_range: (lo, hi),
            ..
        } = config.competency
        {
            if let Some(old) = embryo.competency() {
                if rng.gen_bool(p) {
                    let value = rng.gen_range(lo..=hi);
                    if value != old {
                        embryo.set_competency(value);
                        counters.bump(n);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::InitMode;
    use crate::rng::rng_from_seed;
    use alloc::vec;

    fn hw(genes: Vec<u32>) -> Embryo {
        Embryo::from_genes(genes, None).unwrap()
    }

    fn comp(genes: Vec<u32>, x: u32) -> Embryo {
        Embryo::from_genes(genes, Some(x)).unwrap()
    }

    const NO_PENALTY: PenaltyRule = PenaltyRule {
        weight: 0.0,
        x_max: 500,
    };

    #[test]
    fn assessment_examples() {
        let a = assess_one(&hw(vec![3, 1, 2]), &NO_PENALTY);
        assert_eq!(a.genotypic, a.phenotypic);
        assert_eq!(a.penalized, a.phenotypic);

        let c = assess_one(&comp(vec![3, 2, 1], 3), &NO_PENALTY);
        assert_eq!(c.phenotypic, 1.0);
        assert!((c.genotypic - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(c.developed_genes, vec![1, 2, 3]);

        let pen = PenaltyRule {
            weight: 1e-4,
            x_max: 500,
        };
        let sorted: Vec<u32> = (1..=50).collect();
        let p = assess_one(&comp(sorted, 500), &pen);
        assert!((p.penalized - (p.phenotypic - 1e-4)).abs() < 1e-15);
    }

    #[test]
    fn assess_rejects_mixed_lengths() {
        let pop = vec![hw(vec![1, 2, 3]), hw(vec![1, 2])];
        assert!(assess(&pop, &NO_PENALTY).is_err());
    }

    #[test]
    fn select_singleton_and_fractions() {
        let mut rng = rng_from_seed(1);
        let pop: Vec<Embryo> = (0..10)
            .map(|_| {
                Embryo::random(
                    8,
                    EmbryoKind::Hardwired,
                    None,
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap()
            })
            .collect();
        let assessed = assess(&pop, &NO_PENALTY).unwrap();
        let top = select(&pop, &assessed, 0.1);
        assert_eq!(top.len(), 1);
        let best = assessed
            .iter()
            .map(|a| a.penalized)
            .fold(f64::MIN, f64::max);
        let chosen = assess_one(&top[0], &NO_PENALTY).penalized;
        assert_eq!(chosen, best);
        assert_eq!(select(&pop, &assessed, 0.8).len(), 8);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let pop: Vec<Embryo> = (0..100).map(|i| comp(vec![1, 2, 3, 4], 1 + i)).collect();
        let assessed = assess(&pop, &NO_PENALTY).unwrap();
        let top = select(&pop, &assessed, 0.1);
        let xs: Vec<u32> = top.iter().map(|e| e.competency().unwrap()).collect();
        assert_eq!(xs, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn crossover_examples() {
        let (a, b) = crossover_at(&hw(vec![1, 2, 3, 4]), &hw(vec![4, 3, 2, 1]), 2).unwrap();
        assert_eq!(a.genes(), &[1, 2, 2, 1]);
        assert_eq!(b.genes(), &[4, 3, 3, 4]);

        let p = hw(vec![2, 1, 4, 3]);
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let (a, b) = crossover_pair(&p, &p, &mut rng).unwrap();
            assert_eq!(a, p);
            assert_eq!(b, p);
        }

        let p1 = comp(vec![1, 2, 3, 4], 100);
        let p2 = comp(vec![4, 3, 2, 1], 400);
        for cut in 1..4 {
            let (a, b) = crossover_at(&p1, &p2, cut).unwrap();
            assert_eq!(a.competency(), Some(400));
            assert_eq!(b.competency(), Some(100));
        }
    }

    #[test]
    fn crossover_rejects_mismatch() {
        assert!(crossover_at(&hw(vec![1, 2, 3]), &comp(vec![1, 2, 3], 5), 1).is_err());
        assert!(crossover_at(&hw(vec![1, 2, 3]), &hw(vec![1, 2]), 1).is_err());
        assert!(crossover_at(&hw(vec![1, 2, 3]), &hw(vec![1, 2, 3]), 0).is_err());
        assert!(crossover_at(&hw(vec![1, 2, 3]), &hw(vec![1, 2, 3]), 3).is_err());
    }

    #[test]
    fn slot_allocation() {
        assert_eq!(allocate_slots(15, 5, 180), (135, 45));
        assert_eq!(allocate_slots(10, 0, 90), (90, 0));
        assert_eq!(allocate_slots(0, 10, 90), (0, 90));
        assert_eq!(allocate_slots(1, 2, 10), (3, 7));
        assert_eq!(allocate_slots(2, 1, 10), (7, 3));
    }

    #[test]
    fn repopulate_sizes() {
        let mut rng = rng_from_seed(9);
        let selected: Vec<Embryo> = (0..10)
            .map(|_| {
                Embryo::random(
                    6,
                    EmbryoKind::Hardwired,
                    None,
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap()
            })
            .collect();
        let next = repopulate(&selected, 100, &mut rng).unwrap();
        assert_eq!(next.len(), 100);
        assert_eq!(&next[..10], &selected[..]);

        let odd = repopulate(&selected, 15, &mut rng).unwrap();
        assert_eq!(odd.len(), 15);

        let lone = vec![selected[0].clone()];
        let clones = repopulate(&lone, 20, &mut rng).unwrap();
        assert!(clones.iter().all(|e| *e == selected[0]));

        assert!(repopulate(&[], 10, &mut rng).is_err());
    }

    #[test]
    fn repopulate_mixed_keeps_kinds_apart() {
        let mut rng = rng_from_seed(5);
        let mut selected = Vec::new();
        for _ in 0..15 {
            selected.push(
                Embryo::random(
                    10,
                    EmbryoKind::Competent,
                    Some(40),
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap(),
            );
        }
        for _ in 0..5 {
            selected.push(
                Embryo::random(
                    10,
                    EmbryoKind::Hardwired,
                    None,
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap(),
            );
        }
        let next = repopulate(&selected, 200, &mut rng).unwrap();
        let competent = next
            .iter()
            .filter(|e| e.kind() == EmbryoKind::Competent)
            .count();
        assert_eq!(competent, 150);
        assert_eq!(next.len() - competent, 50);
        assert!(next
            .iter()
            .all(|e| e.kind() == EmbryoKind::Hardwired || e.competency() == Some(40)));
    }

    #[test]
    fn zero_probability_leaves_population_alone() {
        let mut rng = rng_from_seed(11);
        let mut pop: Vec<Embryo> = (0..20)
            .map(|_| {
                Embryo::random(
                    10,
                    EmbryoKind::Competent,
                    Some(5),
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap()
            })
            .collect();
        let before = pop.clone();
        let cfg = EvolutionConfig {
            genome_len: 10,
            mutation_prob: 0.0,
            competency: CompetencyMode::evolvable_default(),
            ..Default::default()
        };
        let mut counters = ChangeCounters::new(10);
        mutate(&mut pop, &cfg, &mut rng, &mut counters);
        assert_eq!(pop, before);
        assert!(counters.as_slice().iter().all(|&c| c == 0));
    }

    #[test]
    fn certain_mutation_touches_one_locus() {
        let mut rng = rng_from_seed(12);
        let mut pop: Vec<Embryo> = (0..200)
            .map(|_| {
                Embryo::random(
                    50,
                    EmbryoKind::Hardwired,
                    None,
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap()
            })
            .collect();
        let before = pop.clone();
        let cfg = EvolutionConfig {
            mutation_prob: 1.0,
            ..Default::default()
        };
        let mut counters = ChangeCounters::new(50);
        mutate(&mut pop, &cfg, &mut rng, &mut counters);
        let mut changed_total = 0;
        for (a, b) in before.iter().zip(&pop) {
            let diff = a
                .genes()
                .iter()
                .zip(b.genes())
                .filter(|(x, y)| x != y)
                .count();
            assert!(diff <= 1);
            changed_total += diff;
        }
        assert_eq!(
            counters.structural().iter().sum::<u64>() as usize,
            changed_total
        );
        assert_eq!(counters.competency(), 0);
        // each attempt misses only when it redraws the current value (1/50)
        assert!(changed_total > 180);
    }

    #[test]
    fn evolvable_mutation_rates() {
        let mut rng = rng_from_seed(13);
        let cfg = EvolutionConfig {
            competency: CompetencyMode::evolvable_default(),
            ..Default::default()
        };
        let mut pop: Vec<Embryo> = (0..2000)
            .map(|_| {
                Embryo::random(
                    50,
                    EmbryoKind::Competent,
                    Some(7),
                    500,
                    InitMode::default(),
                    &mut rng,
                )
                .unwrap()
            })
            .collect();
        let mut counters = ChangeCounters::new(50);
        mutate(&mut pop, &cfg, &mut rng, &mut counters);
        let per_individual = counters.competency() as f64 / 2000.0;
        assert!(
            (per_individual - 0.6 * 499.0 / 500.0).abs() < 0.05,
            "{per_individual}"
        );
        let structural = counters.structural_mean() / 2000.0;
        assert!(
            (structural - 0.012 * 49.0 / 50.0).abs() < 0.004,
            "{structural}"
        );
        assert!(pop
            .iter()
            .all(|e| (1..=500).contains(&e.competency().unwrap())));
        assert!(pop
            .iter()
            .all(|e| e.genes().iter().all(|&g| (1..=50).contains(&g))));
    }
}
