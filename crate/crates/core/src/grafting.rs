//! Pre-Lie grafting and its symmetric-brace extension to forests.
//!
//! `h ↶ h̄` attaches each tree of `h̄` to some node of `h` and sums over all
//! such attachments, counting trees of `h̄` as distinguishable. This is the
//! forest extension through the symmetric-algebra coproduct.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::forest::{Forest, Label, Tree};
use crate::series::{ForestSeries, Q};

/// Sums over every map from `hbar`'s trees to `slots` target positions;
/// `build` turns a per-slot distribution into a forest.
fn sum_over_maps(
    hbar: &Forest,
    slots: usize,
    mut build: impl FnMut(&[Vec<Tree>]) -> Forest,
) -> ForestSeries {
    let trees = hbar.trees();
    let mut out = ForestSeries::zero();
    if slots == 0 {
        if trees.is_empty() {
            out.add_term(build(&[]), Q::one());
        }
        return out;
    }
    let mut choice = vec![0usize; trees.len()];
    loop {
        let mut buckets: Vec<Vec<Tree>> = vec![Vec::new(); slots];
        for (t, &slot) in trees.iter().zip(&choice) {
            buckets[slot].push(t.clone());
        }
        out.add_term(build(&buckets), Q::one());
        // odometer increment
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < slots {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `τ ↶ h̄`: every way of attaching the trees of `h̄` to nodes of `τ`.
pub fn graft_tree(tau: &Tree, hbar: &Forest) -> ForestSeries {
    let nodes = tau.flatten();
    sum_over_maps(hbar, nodes.len(), |buckets| {
        Forest::single(Tree::rebuild(&nodes, buckets))
    })
}

/// `h ↶ h̄` for a forest `h`; the trees of `h̄` go to nodes of any tree of
/// `h`. `1 ↶ h̄ = ε(h̄)·1`.
pub fn graft_forest(h: &Forest, hbar: &Forest) -> ForestSeries {
    let flats: Vec<_> = h.trees().iter().map(Tree::flatten).collect();
    let total: usize = flats.iter().map(Vec::len).sum();
    sum_over_maps(hbar, total, |buckets| {
        let mut trees = Vec::with_capacity(flats.len());
        let mut offset = 0;
        for nodes in &flats {
            let slice = if buckets.is_empty() {
                &[][..]
            } else {
                &buckets[offset..offset + nodes.len()]
            };
            trees.push(Tree::rebuild(nodes, slice));
            offset += nodes.len();
        }
        Forest::new(trees)
    })
}

/// The ζ-basis product `ζ_{h̄} ⋆ ζ_h`, returned as ζ-coefficients: each tree
/// of `h̄` is grafted onto a node of `h` or left standing beside it.
pub fn zeta_product(hbar: &Forest, h: &Forest) -> ForestSeries {
    let flats: Vec<_> = h.trees().iter().map(Tree::flatten).collect();
    let total: usize = flats.iter().map(Vec::len).sum();
    sum_over_maps(hbar, total + 1, |buckets| {
        let mut trees = Vec::with_capacity(flats.len() + buckets[total].len());
        let mut offset = 0;
        for nodes in &flats {
            trees.push(Tree::rebuild(nodes, &buckets[offset..offset + nodes.len()]));
            offset += nodes.len();
        }
        trees.extend(buckets[total].iter().cloned());
        Forest::new(trees)
    })
}

/// `x ↶ y`, bilinear.
pub fn grafting(x: &ForestSeries, y: &ForestSeries) -> ForestSeries {
    let mut out = ForestSeries::zero();
    for (h, c) in x {
        for (g, d) in y {
            out.add_scaled(&graft_forest(h, g), &(c * d));
        }
    }
    out
}

/// `[h]_a` extended linearly to series; the empty forest maps to the node.
pub fn graft_root_series(x: &ForestSeries, label: Label) -> ForestSeries {
    x.map_forests(|h| Forest::single(h.graft_root(label)))
}

/// Projection onto single trees.
pub fn tree_projection(x: &ForestSeries) -> ForestSeries {
    x.tree_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::{parse_forest, parse_series};

    fn f(s: &str) -> Forest {
        parse_forest(s).unwrap()
    }

    fn s(s: &str) -> ForestSeries {
        parse_series(s).unwrap()
    }

    #[test]
    fn grafting_examples() {
        assert_eq!(grafting(&s("[]"), &s("[[][]]")), s("[[[][]]]"));
        assert_eq!(grafting(&s("[[][]]"), &s("[]")), s("2*[[[]][]] + [[][][]]"));
        assert_eq!(grafting(&s("[][]"), &s("[]")), s("2*[][[]]"));
        assert_eq!(
            grafting(&s("[[]]"), &s("[][]")),
            s("[[[][]]] + 2*[[[]][]] + [[][][]]")
        );
    }

    #[test]
    fn grafting_onto_unit() {
        assert_eq!(graft_forest(&Forest::empty(), &Forest::empty()), ForestSeries::one());
        assert!(graft_forest(&Forest::empty(), &f("[]")).is_zero());
        assert_eq!(graft_forest(&f("[[]]"), &Forest::empty()), s("[[]]"));
    }

    #[test]
    fn zeta_products_from_the_grafting_formula() {
        assert_eq!(zeta_product(&f("[]"), &f("[]")), s("[][] + [[]]"));
        assert_eq!(zeta_product(&f("[][]"), &f("[]")), s("[][][] + 2*[][[]] + [[][]]"));
        assert_eq!(zeta_product(&f("[]"), &f("[][]")), s("[][][] + 2*[][[]]"));
    }
}
