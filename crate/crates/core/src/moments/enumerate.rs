//! Exhaustive enumeration oracle for small horizons.
//!
//! Walks every (eps_2..eps_n, U_2..U_n) outcome of the reinforcement
//! algorithm with exact rational probabilities (f64 parameters are dyadic
//! rationals, so `BigRational::from_float` loses nothing) and produces exact
//! laws of walk functionals. This is the independent route against which the
//! closed-form recursions are checked; it shares no code with them.

use crate::config::{Truncation, WalkSign};
use crate::dist::StepDistribution;
use crate::error::{Error, Result};
use crate::stats::KahanSum;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Largest horizon when the step values are enumerated too.
pub const MAX_N_WITH_VALUES: u64 = 9;
/// Largest horizon for pure tree functionals (values not enumerated).
pub const MAX_N_TREE_ONLY: u64 = 10;

/// Functional of the walk whose exact law is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleFunctional {
    /// Final walk value S*(n) (truncation applied at each birth index).
    WalkFinal,
    /// Occupancy count N_j(n).
    Occupancy(u64),
    /// Signed count Delta_j(n).
    SignedOccupancy(u64),
    /// Realized value of the n-th step (Z-hat_n or Z-check_n).
    StepValue,
}

/// Exact law of a functional: outcome values with exact probabilities.
#[derive(Debug, Clone)]
pub struct ExactLaw {
    outcomes: Vec<(f64, BigRational)>,
}

impl ExactLaw {
    fn from_map(map: BTreeMap<OrdF64, BigRational>) -> Self {
        let outcomes = map.into_iter().map(|(k, v)| (k.0, v)).collect();
        Self { outcomes }
    }

    /// (value, probability) pairs sorted by value, probabilities as f64.
    pub fn outcomes(&self) -> Vec<(f64, f64)> {
        self.outcomes
            .iter()
            .map(|(v, p)| (*v, p.to_f64().expect("probability fits in f64")))
            .collect()
    }

    /// Exact total mass; 1 for any complete enumeration.
    pub fn total_probability(&self) -> BigRational {
        self.outcomes
            .iter()
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }

    pub fn expectation_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = KahanSum::default();
        for (v, p) in &self.outcomes {
            acc.add(f(*v) * p.to_f64().expect("probability fits in f64"));
        }
        acc.value()
    }

    pub fn mean(&self) -> f64 {
        self.expectation_of(|v| v)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation_of(|v| (v - m) * (v - m))
    }

    /// E[V^order].
    pub fn moment(&self, order: u32) -> f64 {
        self.expectation_of(|v| v.powi(order as i32))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// f64 key with total order; values in oracle laws are always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn add_mass(map: &mut BTreeMap<OrdF64, BigRational>, value: f64, prob: BigRational) {
    // normalize -0.0 so it merges with 0.0
    let v = if value == 0.0 { 0.0 } else { value };
    map.entry(OrdF64(v))
        .and_modify(|p| *p += &prob)
        .or_insert(prob);
}

/// Genealogy state of one enumerated outcome: per step, the birth index of
/// its tree root (1-based) and the parity of its depth.
struct TreeState {
    root: Vec<u64>,
    parity: Vec<u8>,
}

/// Per-root value laws after truncation, reused across leaves.
struct SupportTable {
    /// support[j-1] = law of Z_j = X 1{|X| <= t_j}, merged duplicates.
    per_birth: Vec<Vec<(f64, BigRational)>>,
}

impl SupportTable {
    fn new(dist: &StepDistribution, truncation: Truncation, n: u64) -> Result<Self> {
        let raw = dist.finite_support().ok_or_else(|| {
            Error::Unsupported(
                "enumeration oracle requires a finite-support step distribution".into(),
            )
        })?;
        let per_birth = (1..=n)
            .map(|j| {
                let t = truncation.threshold(j);
                let mut m: BTreeMap<OrdF64, BigRational> = BTreeMap::new();
                for (v, p) in &raw {
                    let z = if v.abs() <= t { *v } else { 0.0 };
                    add_mass(&mut m, z, p.clone());
                }
                m.into_iter().map(|(k, v)| (k.0, v)).collect()
            })
            .collect();
        Ok(Self { per_birth })
    }
}

fn enumerate_outcomes(
    p: f64,
    n: u64,
    mut visit: impl FnMut(&TreeState, &BigRational),
) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "p must lie in [0,1], got {p}"
        )));
    }
    let p_rat = BigRational::from_float(p)
        .ok_or_else(|| Error::InvalidConfig("p must be a finite float".into()))?;
    let fresh = BigRational::one() - &p_rat;
    let mut state = TreeState {
        root: vec![0; n as usize],
        parity: vec![0; n as usize],
    };
    // step 1 is always fresh
    state.root[0] = 1;
    state.parity[0] = 0;

    fn dfs(
        k: u64,
        n: u64,
        p_rat: &BigRational,
        fresh: &BigRational,
        state: &mut TreeState,
        prob: BigRational,
        visit: &mut impl FnMut(&TreeState, &BigRational),
    ) {
        if k > n {
            visit(state, &prob);
            return;
        }
        let i = (k - 1) as usize;
        if !fresh.is_zero() {
            state.root[i] = k;
            state.parity[i] = 0;
            dfs(k + 1, n, p_rat, fresh, state, &prob * fresh, visit);
        }
        if !p_rat.is_zero() {
            let per_u = p_rat / BigRational::from_integer(BigInt::from(k - 1));
            for u in 1..k {
                let ui = (u - 1) as usize;
                state.root[i] = state.root[ui];
                state.parity[i] = 1 - state.parity[ui];
                dfs(k + 1, n, p_rat, fresh, state, &prob * &per_u, visit);
            }
        }
    }

    dfs(
        2,
        n,
        &p_rat,
        &fresh,
        &mut state,
        BigRational::one(),
        &mut visit,
    );
    Ok(())
}

/// Exhaustive law of the requested functional under the full reinforcement
/// dynamics at horizon n.
pub fn enumerate_exact(
    dist: &StepDistribution,
    p: f64,
    sign: WalkSign,
    truncation: Truncation,
    n: u64,
    functional: OracleFunctional,
) -> Result<ExactLaw> {
    if n == 0 {
        return Err(Error::InvalidConfig("horizon must be positive".into()));
    }
    let needs_values = matches!(
        functional,
        OracleFunctional::WalkFinal | OracleFunctional::StepValue
    );
    let bound = if needs_values {
        MAX_N_WITH_VALUES
    } else {
        MAX_N_TREE_ONLY
    };
    if n > bound {
        return Err(Error::Unsupported(format!(
            "enumeration horizon {n} exceeds the tractable bound {bound}"
        )));
    }
    if let OracleFunctional::Occupancy(j) | OracleFunctional::SignedOccupancy(j) = functional {
        if j < 1 || j > n {
            return Err(Error::InvalidConfig(format!(
                "functional index j = {j} outside 1..={n}"
            )));
        }
    }
    let support = if needs_values {
        Some(SupportTable::new(dist, truncation, n)?)
    } else {
        None
    };

    let mut law: BTreeMap<OrdF64, BigRational> = BTreeMap::new();
    enumerate_outcomes(p, n, |state, prob| match functional {
        OracleFunctional::Occupancy(j) => {
            let count = state.root.iter().filter(|&&r| r == j).count();
            add_mass(&mut law, count as f64, prob.clone());
        }
        OracleFunctional::SignedOccupancy(j) => {
            let mut delta = 0i64;
            for (r, par) in state.root.iter().zip(&state.parity) {
                if *r == j {
                    delta += if *par == 0 { 1 } else { -1 };
                }
            }
            add_mass(&mut law, delta as f64, prob.clone());
        }
        OracleFunctional::StepValue => {
            let support = support.as_ref().unwrap();
            let i = (n - 1) as usize;
            let r = state.root[i];
            let flip = sign == WalkSign::Negative && state.parity[i] == 1;
            for (v, q) in &support.per_birth[(r - 1) as usize] {
                let value = if flip { -*v } else { *v };
                add_mass(&mut law, value, prob * q);
            }
        }
        OracleFunctional::WalkFinal => {
            let support = support.as_ref().unwrap();
            // coefficient per root: N_j for the positive walk, Delta_j for
            // the negative one; the walk value is sum_j coeff_j Z_j
            let mut coeff: BTreeMap<u64, i64> = BTreeMap::new();
            for (r, par) in state.root.iter().zip(&state.parity) {
                let c = match sign {
                    WalkSign::Positive => 1,
                    WalkSign::Negative => {
                        if *par == 0 {
                            1
                        } else {
                            -1
                        }
                    }
                };
                *coeff.entry(*r).or_insert(0) += c;
            }
            // convolve the per-root laws of coeff_j * Z_j
            let mut conv: Vec<(f64, BigRational)> = vec![(0.0, BigRational::one())];
            for (j, c) in coeff {
                if c == 0 {
                    continue;
                }
                let mut next: BTreeMap<OrdF64, BigRational> = BTreeMap::new();
                for (acc_v, acc_p) in &conv {
                    for (v, q) in &support.per_birth[(j - 1) as usize] {
                        add_mass(&mut next, acc_v + c as f64 * v, acc_p * q);
                    }
                }
                conv = next.into_iter().map(|(k, v)| (k.0, v)).collect();
            }
            for (v, q) in conv {
                add_mass(&mut law, v, prob * &q);
            }
        }
    })?;
    let law = ExactLaw::from_map(law);
    debug_assert!(law.total_probability().is_one());
    Ok(law)
}

/// Exact E N_j(n), E Delta_j(n), E Delta_j^2(n) for every j <= n, gathered
/// in a single enumeration pass.
#[derive(Debug, Clone, Copy)]
pub struct TreeMoments {
    pub j: u64,
    pub occupancy_mean: f64,
    pub delta_mean: f64,
    pub delta_second_moment: f64,
}

pub fn enumerate_tree_moments(p: f64, n: u64) -> Result<Vec<TreeMoments>> {
    if n == 0 || n > MAX_N_TREE_ONLY {
        return Err(Error::Unsupported(format!(
            "tree-moment enumeration needs 1 <= n <= {MAX_N_TREE_ONLY}, got {n}"
        )));
    }
    let sz = n as usize;
    let zero = || vec![BigRational::zero(); sz];
    let (mut occ, mut delta, mut delta2) = (zero(), zero(), zero());
    let mut counts = vec![0i64; sz];
    let mut signed = vec![0i64; sz];
    enumerate_outcomes(p, n, |state, prob| {
        counts.iter_mut().for_each(|c| *c = 0);
        signed.iter_mut().for_each(|c| *c = 0);
        for (r, par) in state.root.iter().zip(&state.parity) {
            let i = (*r - 1) as usize;
            counts[i] += 1;
            signed[i] += if *par == 0 { 1 } else { -1 };
        }
        for i in 0..sz {
            if counts[i] != 0 {
                occ[i] += prob * BigRational::from_integer(BigInt::from(counts[i]));
                delta[i] += prob * BigRational::from_integer(BigInt::from(signed[i]));
                delta2[i] += prob * BigRational::from_integer(BigInt::from(signed[i] * signed[i]));
            }
        }
    })?;
    Ok((0..sz)
        .map(|i| TreeMoments {
            j: (i + 1) as u64,
            occupancy_mean: occ[i].to_f64().unwrap(),
            delta_mean: delta[i].to_f64().unwrap(),
            delta_second_moment: delta2[i].to_f64().unwrap(),
        })
        .collect())
}
