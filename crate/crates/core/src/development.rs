//! Development as a swap-budgeted bubble sort.
//!
//! Cells look at their right-hand neighbour and trade places when the
//! neighbour's positional value is smaller. Passes run left to right over the
//! whole array until a pass makes no swap, or until the budget is spent. The
//! budget counts swaps, not comparisons, and equal neighbours never swap.

use alloc::vec::Vec;

use crate::genome::Embryo;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DevelopmentOutcome {
    pub developed_genes: Vec<u32>,
    pub swaps_used: u32,
}

/// Runs restricted bubble sort over a copy of `genes`.
pub fn develop(genes: &[u32], budget: u32) -> DevelopmentOutcome {
    let mut cells = genes.to_vec();
    let swaps_used = develop_in_place(&mut cells, budget);
    DevelopmentOutcome {
        developed_genes: cells,
        swaps_used,
    }
}

/// In-place variant of [`develop`]; returns the number of swaps performed.
pub fn develop_in_place(cells: &mut [u32], budget: u32) -> u32 {
    if budget == 0 || cells.len() < 2 {
        return 0;
    }
    let mut used = 0u32;
    loop {
        let mut swapped = false;
        for j in 0..cells.len() - 1 {
            if cells[j] > cells[j + 1] {
                cells.swap(j, j + 1);
                used += 1;
                swapped = true;
                if used == budget {
                    return used;
                }
            }
        }
        if !swapped {
            return used;
        }
    }
}

/// Develops an embryo with its own competency gene. Hardwired embryos pass
/// through unchanged.
pub fn develop_embryo(embryo: &Embryo) -> DevelopmentOutcome {
    develop(embryo.genes(), embryo.competency().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{fitness, inversion_count, pair_count};
    use alloc::vec;

    #[test]
    fn trace_examples() {
        assert_eq!(
            develop(&[1, 2, 3], 5),
            DevelopmentOutcome {
                developed_genes: vec![1, 2, 3],
                swaps_used: 0
            }
        );
        assert_eq!(
            develop(&[3, 2, 1], 1),
            DevelopmentOutcome {
                developed_genes: vec![2, 3, 1],
                swaps_used: 1
            }
        );
        assert_eq!(
            develop(&[3, 2, 1], 3),
            DevelopmentOutcome {
                developed_genes: vec![1, 2, 3],
                swaps_used: 3
            }
        );
        // second pass starts again from the left
        assert_eq!(develop(&[3, 2, 1], 2).developed_genes, vec![2, 1, 3]);
    }

    #[test]
    fn zero_budget_is_identity() {
        let g = [4, 1, 3, 2];
        assert_eq!(develop(&g, 0).developed_genes, g.to_vec());
    }

    #[test]
    fn equal_neighbours_do_not_swap() {
        let out = develop(&[2, 2, 1], 10);
        assert_eq!(out.developed_genes, vec![1, 2, 2]);
        assert_eq!(out.swaps_used, 2);
    }

    #[test]
    fn hardwired_passes_through() {
        let e = Embryo::from_genes(vec![3, 1, 2], None).unwrap();
        let out = develop_embryo(&e);
        assert_eq!(out.developed_genes, e.genes().to_vec());
        assert_eq!(out.swaps_used, 0);
    }

    #[test]
    fn sufficient_budget_sorts() {
        let g = [5, 3, 5, 1, 2, 4];
        let out = develop(&g, pair_count(g.len()));
        assert_eq!(out.developed_genes, vec![1, 2, 3, 4, 5, 5]);
        assert_eq!(fitness(&out.developed_genes).unwrap().f, 1.0);
        assert_eq!(inversion_count(&out.developed_genes), 0);
    }
}
