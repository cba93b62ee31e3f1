//! Expected occupancy counts E N_j(n) and signed counts E Delta_j(n),
//! E Delta_j^2(n) of the genealogical trees.
//!
//! The root of tree j exists iff the j-th step is fresh, so E N_j(j) =
//! E Delta_j(j) = 1 - p for j >= 2. Step 1 has no reinforcement draw and is
//! always fresh, hence E N_1(1) = 1 and the j = 1 closed forms drop the
//! (1 - p) prefactor.

use super::gamma::gamma_growth;
use crate::error::{Error, Result};

fn check_indices(j: u64, n: u64) -> Result<()> {
    if j < 1 || j > n {
        return Err(Error::InvalidConfig(format!(
            "occupancy indices require 1 <= j <= n, got j = {j}, n = {n}"
        )));
    }
    Ok(())
}

fn root_mean(j: u64, p: f64) -> f64 {
    if j == 1 {
        1.0
    } else {
        1.0 - p
    }
}

/// E N_j(n) = prod_{k=j}^{n-1} ((k+p)/k) * E N_j(j), evaluated in log-gamma
/// space: (1-p) Gamma(j) Gamma(n+p) / (Gamma(n) Gamma(j+p)) for j >= 2.
pub fn expected_occupancy(p: f64, j: u64, n: u64) -> Result<f64> {
    check_indices(j, n)?;
    Ok(root_mean(j, p) * gamma_growth(j, n, p)?)
}

/// E Delta_j(n) = prod_{k=j}^{n-1} ((k-p)/k) * E Delta_j(j).
pub fn expected_delta(p: f64, j: u64, n: u64) -> Result<f64> {
    check_indices(j, n)?;
    Ok(root_mean(j, p) * gamma_growth(j, n, -p)?)
}

/// E Delta_j^2(n) by the exact recursion
/// E Delta_j^2(n+1) = ((n-2p)/n) E Delta_j^2(n) + (p/n) E N_j(n),
/// started from E Delta_j^2(j) = E N_j(j).
pub fn expected_delta2(p: f64, j: u64, n: u64) -> Result<f64> {
    check_indices(j, n)?;
    let mut d2 = root_mean(j, p);
    // E N_j(k) advanced incrementally by its own recursion.
    let mut occ = root_mean(j, p);
    for k in j..n {
        let kf = k as f64;
        d2 = (kf - 2.0 * p) / kf * d2 + p / kf * occ;
        occ *= (kf + p) / kf;
    }
    Ok(d2)
}

/// Sum over j of E N_j(n); equals n since every step lives in exactly one tree.
pub fn occupancy_total(p: f64, n: u64) -> Result<f64> {
    let mut total = 0.0;
    for j in 1..=n {
        total += expected_occupancy(p, j, n)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_the_root() {
        for p in [0.1, 0.5, 0.9] {
            assert_eq!(expected_occupancy(p, 1, 1).unwrap(), 1.0);
            for j in [2u64, 5] {
                assert!((expected_occupancy(p, j, j).unwrap() - (1.0 - p)).abs() < 1e-15);
                assert!((expected_delta(p, j, j).unwrap() - (1.0 - p)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hand_enumerated_values_at_n3() {
        // All (eps_2, eps_3, U_3) outcomes at p = 1/2 give E N_2(3) = 5/8 and
        // E Delta_2(3) = 3/8.
        assert!((expected_occupancy(0.5, 2, 3).unwrap() - 0.625).abs() < 1e-14);
        assert!((expected_delta(0.5, 2, 3).unwrap() - 0.375).abs() < 1e-14);
    }

    #[test]
    fn occupancies_partition_n() {
        for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
            for n in [1u64, 2, 10, 100, 1000] {
                let total = occupancy_total(p, n).unwrap();
                assert!((total - n as f64).abs() < 1e-9, "p={p} n={n} total={total}");
            }
        }
    }

    #[test]
    fn delta_second_moment_third_of_occupancy() {
        // E Delta_j^2(n) = E N_j(n)/3 + O(n^{-2p})
        let (p, j, n) = (0.5, 2u64, 1_000_000u64);
        let ratio = expected_delta2(p, j, n).unwrap() / expected_occupancy(p, j, n).unwrap();
        assert!((ratio - 1.0 / 3.0).abs() < 1e-2, "ratio={ratio}");
    }

    #[test]
    fn index_errors() {
        assert!(expected_occupancy(0.5, 4, 3).is_err());
        assert!(expected_delta(0.5, 0, 3).is_err());
        assert!(expected_delta2(0.5, 9, 8).is_err());
    }
}
