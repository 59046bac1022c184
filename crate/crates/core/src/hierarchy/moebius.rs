//! Möbius inversion on the lattice of independent sets.
//!
//! When `t = α(G)` the level-`2t` basis lists every independent set, and a
//! feasible moment vector `y` is the zeta transform `y_Q = Σ_{R ⊇ Q} σ_R` of
//! a unique probability measure `σ` on the independent sets. Inversion
//! recovers it as `σ_R = Σ_{S ⊇ R} (−1)^{|S∖R|} y_S`.

use std::ops::{Add, Sub};

use num_traits::Zero;

use super::HierarchyError;
use crate::basis::IndepSetBasis;

/// Calls `f(subset, |set ∖ subset|)` for every subset of a sorted set.
fn for_each_subset(set: &[usize], mut f: impl FnMut(&[usize], usize)) {
    assert!(set.len() < usize::BITS as usize, "set too large to enumerate subsets");
    let mut buf = Vec::with_capacity(set.len());
    for mask in 0usize..1 << set.len() {
        buf.clear();
        buf.extend(set.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
        f(&buf, set.len() - buf.len());
    }
}

fn check_complete(basis: &IndepSetBasis) -> Result<(), HierarchyError> {
    let level = basis.level();
    let t = level / 2;
    if !level.is_multiple_of(2) || !basis.is_exhaustive() || basis.max_cardinality() != t {
        return Err(HierarchyError::InvalidInput(format!(
            "measure recovery needs a level-2t basis with t = α(G); got level {level} \
             with largest independent set of size {}{}",
            basis.max_cardinality(),
            if basis.is_exhaustive() { "" } else { " or more" }
        )));
    }
    Ok(())
}

fn index(basis: &IndepSetBasis, set: &[usize]) -> usize {
    basis.index_of(set).expect("subsets of independent sets are independent")
}

/// `σ_R = Σ_{S ⊇ R} (−1)^{|S∖R|} y_S` over all independent sets `R`.
pub fn moebius_recover_measure<T>(basis_2t: &IndepSetBasis, y: &[T]) -> Result<Vec<T>, HierarchyError>
where
    T: Clone + Zero + Add<Output = T> + Sub<Output = T>,
{
    check_complete(basis_2t)?;
    check_len(basis_2t, y.len())?;
    let mut sigma = vec![T::zero(); y.len()];
    for (s, set) in basis_2t.sets().iter().enumerate() {
        for_each_subset(set, |r, removed| {
            let i = index(basis_2t, r);
            sigma[i] = if removed % 2 == 0 {
                sigma[i].clone() + y[s].clone()
            } else {
                sigma[i].clone() - y[s].clone()
            };
        });
    }
    Ok(sigma)
}

/// `y_Q = Σ_{R ⊇ Q} σ_R`, the inverse of [`moebius_recover_measure`].
pub fn zeta_transform<T>(basis_2t: &IndepSetBasis, sigma: &[T]) -> Result<Vec<T>, HierarchyError>
where
    T: Clone + Zero + Add<Output = T>,
{
    check_complete(basis_2t)?;
    check_len(basis_2t, sigma.len())?;
    let mut y = vec![T::zero(); sigma.len()];
    for (r, set) in basis_2t.sets().iter().enumerate() {
        for_each_subset(set, |q, _| {
            let i = index(basis_2t, q);
            y[i] = y[i].clone() + sigma[r].clone();
        });
    }
    Ok(y)
}

fn check_len(basis: &IndepSetBasis, len: usize) -> Result<(), HierarchyError> {
    if len != basis.len() {
        return Err(HierarchyError::InvalidInput(format!(
            "vector has length {len}, basis has {} sets",
            basis.len()
        )));
    }
    Ok(())
}

/// `Σ_{R ⊆ S} (−1)^{|S∖R|} χ_R` as an integer vector over any basis
/// containing `S`, where `χ_R` marks the subsets of `R`. Inclusion–exclusion
/// says this is the unit vector at `S`.
pub fn inclusion_exclusion(basis: &IndepSetBasis, s: usize) -> Vec<i64> {
    let mut out = vec![0i64; basis.len()];
    for_each_subset(basis.set(s), |r, removed| {
        let sign = if removed % 2 == 0 { 1 } else { -1 };
        for_each_subset(r, |q, _| out[index(basis, q)] += sign);
    });
    out
}
