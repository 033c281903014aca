//! Embryo representation and the order-based fitness function.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Result};

/// Whether an embryo develops before assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EmbryoKind {
    Hardwired,
    Competent,
}

/// How structural genes are drawn for a fresh embryo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum InitMode {
    /// Each gene independently uniform on `[1, n]`.
    #[default]
    UniformWithReplacement,
    /// A uniformly shuffled permutation of `1..=n`.
    RandomPermutation,
}

/// A fixed-length array of structural genes plus an optional competency gene.
///
/// The competency gene is the swap budget spent during development; its
/// presence is what makes an embryo [`EmbryoKind::Competent`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Embryo {
    genes: Vec<u32>,
    competency: Option<u32>,
}

impl Embryo {
    /// Draws a new embryo of length `n`.
    ///
    /// `competency` must be `Some` exactly when `kind` is competent, and lie in
    /// `[1, x_max]`.
    pub fn random<R: Rng + ?Sized>(
        n: usize,
        kind: EmbryoKind,
        competency: Option<u32>,
        x_max: u32,
        init: InitMode,
        rng: &mut R,
    ) -> Result<Self> {
        if n < 2 {
            return Err(invalid("embryo length must be at least 2"));
        }
        check_competency(kind, competency, x_max)?;
        let top = n as u32;
        let genes = match init {
            InitMode::UniformWithReplacement => (0..n).map(|_| rng.gen_range(1..=top)).collect(),
            InitMode::RandomPermutation => {
                let mut genes: Vec<u32> = (1..=top).collect();
                genes.shuffle(rng);
                genes
            }
        };
        Ok(Self { genes, competency })
    }

    /// Builds an embryo from explicit genes. Gene values must lie in `[1, n]`.
    pub fn from_genes(genes: Vec<u32>, competency: Option<u32>) -> Result<Self> {
        let n = genes.len();
        if n < 2 {
            return Err(invalid("embryo length must be at least 2"));
        }
        if genes.iter().any(|&g| g == 0 || g as usize > n) {
            return Err(invalid("gene values must lie in [1, n]"));
        }
        if competency == Some(0) {
            return Err(invalid("competency must be at least 1"));
        }
        Ok(Self { genes, competency })
    }

    pub fn genes(&self) -> &[u32] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn competency(&self) -> Option<u32> {
        self.competency
    }

    pub fn kind(&self) -> EmbryoKind {
        if self.competency.is_some() {
            EmbryoKind::Competent
        } else {
            EmbryoKind::Hardwired
        }
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [u32] {
        &mut self.genes
    }

    pub(crate) fn set_competency(&mut self, x: u32) {
        debug_assert!(self.competency.is_some());
        self.competency = Some(x);
    }

    /// Splits the embryo into owned parts; used by crossover.
    pub(crate) fn from_parts(genes: Vec<u32>, competency: Option<u32>) -> Self {
        Self { genes, competency }
    }
}

fn check_competency(kind: EmbryoKind, competency: Option<u32>, x_max: u32) -> Result<()> {
    match (kind, competency) {
        (EmbryoKind::Hardwired, None) => Ok(()),
        (EmbryoKind::Hardwired, Some(_)) => {
            Err(invalid("hardwired embryos carry no competency gene"))
        }
        (EmbryoKind::Competent, None) => Err(invalid("competent embryos need a competency gene")),
        (EmbryoKind::Competent, Some(x)) if x == 0 || x > x_max => Err(invalid(alloc::format!(
            "competency {x} outside [1, {x_max}]"
        ))),
        (EmbryoKind::Competent, Some(_)) => Ok(()),
    }
}

/// Non-inversion count, normalized count and exponentially scaled fitness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessValue {
    pub nic: u32,
    pub nic_norm: f64,
    pub f: f64,
}

/// Number of index pairs in an array of length `n`.
pub fn pair_count(n: usize) -> u32 {
    (n * n.saturating_sub(1) / 2) as u32
}

/// Counts pairs `i < j` that are already in order, `genes[i] <= genes[j]`.
///
/// Equal values never need a swap, so they count as ordered; this keeps
/// `non_inversion_count + inversion_count == C(n, 2)` and gives every
/// non-decreasing array the full count.
pub fn non_inversion_count(genes: &[u32]) -> Result<u32> {
    if genes.len() < 2 {
        return Err(invalid("non-inversion count needs at least 2 genes"));
    }
    Ok(pair_count(genes.len()) - inversion_count(genes))
}

/// Counts pairs `i < j` with `genes[i] > genes[j]`.
pub fn inversion_count(genes: &[u32]) -> u32 {
    let mut count = 0u32;
    for (i, &a) in genes.iter().enumerate() {
        for &b in &genes[i + 1..] {
            count += u32::from(a > b);
        }
    }
    count
}

/// `f = 9^(nic / C(n,2)) / 9`, so a sorted array scores 1 and a strictly
/// descending one 1/9.
pub fn fitness(genes: &[u32]) -> Result<FitnessValue> {
    let nic = non_inversion_count(genes)?;
    Ok(scale(nic, pair_count(genes.len())))
}

/// Fitness for arrays already known to have length at least 2.
pub(crate) fn fitness_of(genes: &[u32]) -> f64 {
    let pairs = pair_count(genes.len());
    scale(pairs - inversion_count(genes), pairs).f
}

pub(crate) fn scale(nic: u32, pairs: u32) -> FitnessValue {
    let nic_norm = f64::from(nic) / f64::from(pairs);
    // 9^x / 9 == 9^(x - 1); exact 1.0 at x == 1.
    let f = libm::exp((nic_norm - 1.0) * LN_9);
    FitnessValue { nic, nic_norm, f }
}

const LN_9: f64 = 2.197_224_577_336_219_6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn brute_nic(a: &[u32]) -> u32 {
        let mut c = 0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                if i < j && a[i] <= a[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn nic_examples() {
        assert_eq!(non_inversion_count(&[1, 2, 3, 4, 5]).unwrap(), 10);
        assert_eq!(non_inversion_count(&[5, 4, 3, 2, 1]).unwrap(), 0);
        assert_eq!(non_inversion_count(&[3, 1, 2]).unwrap(), 1);
        assert!(non_inversion_count(&[1]).is_err());
        assert!(non_inversion_count(&[]).is_err());
    }

    #[test]
    fn equal_pairs_count_as_ordered() {
        let a = [2, 2, 1, 3];
        assert_eq!(non_inversion_count(&a).unwrap(), 4);
        assert_eq!(non_inversion_count(&a).unwrap(), brute_nic(&a));
        assert_eq!(fitness(&[1, 2, 2, 3, 3]).unwrap().f, 1.0);
        assert_eq!(fitness(&[4, 4, 4]).unwrap().f, 1.0);
    }

    #[test]
    fn fitness_examples() {
        assert_eq!(fitness(&[1, 2, 3, 4, 5]).unwrap().f, 1.0);
        assert_relative_eq!(
            fitness(&[5, 4, 3, 2, 1]).unwrap().f,
            1.0 / 9.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fitness(&[3, 1, 2]).unwrap().f,
            0.231_120_424_783_544_9,
            max_relative = 1e-12
        );
    }

    #[test]
    fn construction_checks_kind() {
        let mut rng = rng_from_seed(7);
        let e = Embryo::random(
            50,
            EmbryoKind::Hardwired,
            None,
            500,
            InitMode::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(e.len(), 50);
        assert!(e.genes().iter().all(|&g| (1..=50).contains(&g)));
        assert_eq!(e.kind(), EmbryoKind::Hardwired);

        let c = Embryo::random(
            50,
            EmbryoKind::Competent,
            Some(400),
            500,
            InitMode::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(c.competency(), Some(400));
        assert_eq!(c.kind(), EmbryoKind::Competent);

        assert!(Embryo::random(
            50,
            EmbryoKind::Competent,
            None,
            500,
            InitMode::default(),
            &mut rng
        )
        .is_err());
        assert!(Embryo::random(
            50,
            EmbryoKind::Hardwired,
            Some(3),
            500,
            InitMode::default(),
            &mut rng
        )
        .is_err());
        assert!(Embryo::random(
            50,
            EmbryoKind::Competent,
            Some(501),
            500,
            InitMode::default(),
            &mut rng
        )
        .is_err());
        assert!(Embryo::random(
            50,
            EmbryoKind::Competent,
            Some(0),
            500,
            InitMode::default(),
            &mut rng
        )
        .is_err());
        assert!(Embryo::random(
            1,
            EmbryoKind::Hardwired,
            None,
            500,
            InitMode::default(),
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn permutation_init() {
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let e = Embryo::random(
                5,
                EmbryoKind::Hardwired,
                None,
                500,
                InitMode::RandomPermutation,
                &mut rng,
            )
            .unwrap();
            let mut g = e.genes().to_vec();
            g.sort_unstable();
            assert_eq!(g, vec![1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn from_genes_validates_range() {
        assert!(Embryo::from_genes(vec![1, 2, 3], None).is_ok());
        assert!(Embryo::from_genes(vec![0, 2, 3], None).is_err());
        assert!(Embryo::from_genes(vec![1, 2, 4], None).is_err());
        assert!(Embryo::from_genes(vec![1, 2, 3], Some(0)).is_err());
    }
}
