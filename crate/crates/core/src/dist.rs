//! Step distributions with analytically known moments.
//!
//! Each law carries its first two moments, the second possibly infinite.
//! Truncated moments E[X^m 1{|X| <= t}] are evaluated in closed form per
//! kind; the exact moment recursions depend on that (no quadrature).

use crate::error::{Error, Result};
use crate::rng::RngStream;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

const SQRT_2PI: f64 = 2.5066282746310005;

/// Extended-real second moment: finite value or an explicit infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Moment::Infinite)
    }
}

/// The supported step laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepKind {
    /// +1 or -1 with probability 1/2 each.
    Rademacher,
    Gaussian {
        mean: f64,
        sd: f64,
    },
    TwoPoint {
        a: f64,
        b: f64,
        prob_a: f64,
    },
    Constant {
        c: f64,
    },
    /// Survival function (scale/x)^alpha for x >= scale.
    Pareto {
        alpha: f64,
        scale: f64,
    },
}

/// A samplable step law with declared moments.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    kind: StepKind,
    m1: f64,
    m2: Moment,
}

impl StepDistribution {
    /// Validates the parameters and computes the analytic moments.
    pub fn new(kind: StepKind) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        match kind {
            StepKind::Rademacher => {}
            StepKind::Gaussian { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || sd <= 0.0 {
                    return bad(format!(
                        "gaussian requires finite mean and sd > 0, got ({mean}, {sd})"
                    ));
                }
            }
            StepKind::TwoPoint { a, b, prob_a } => {
                if !a.is_finite() || !b.is_finite() {
                    return bad(format!("two-point values must be finite, got ({a}, {b})"));
                }
                if !(0.0..=1.0).contains(&prob_a) {
                    return bad(format!("two-point prob_a must lie in [0,1], got {prob_a}"));
                }
            }
            StepKind::Constant { c } => {
                if !c.is_finite() {
                    return bad(format!("constant value must be finite, got {c}"));
                }
            }
            StepKind::Pareto { alpha, scale } => {
                if !(alpha > 1.0) || !alpha.is_finite() {
                    return bad(format!(
                        "pareto requires alpha > 1 so that E|X| is finite, got {alpha}"
                    ));
                }
                if !(scale > 0.0) || !scale.is_finite() {
                    return bad(format!("pareto requires scale > 0, got {scale}"));
                }
            }
        }
        let (m1, m2) = match kind {
            StepKind::Rademacher => (0.0, Moment::Finite(1.0)),
            StepKind::Gaussian { mean, sd } => (mean, Moment::Finite(mean * mean + sd * sd)),
            StepKind::TwoPoint { a, b, prob_a } => (
                a * prob_a + b * (1.0 - prob_a),
                Moment::Finite(a * a * prob_a + b * b * (1.0 - prob_a)),
            ),
            StepKind::Constant { c } => (c, Moment::Finite(c * c)),
            StepKind::Pareto { alpha, scale } => {
                let m1 = alpha * scale / (alpha - 1.0);
                let m2 = if alpha > 2.0 {
                    Moment::Finite(alpha * scale * scale / (alpha - 2.0))
                } else {
                    Moment::Infinite
                };
                (m1, m2)
            }
        };
        if let Moment::Finite(v2) = m2 {
            debug_assert!(v2 - m1 * m1 >= -1e-12);
        }
        Ok(Self { kind, m1, m2 })
    }

    pub fn rademacher() -> Self {
        Self::new(StepKind::Rademacher).expect("rademacher is always valid")
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        Self::new(StepKind::Gaussian { mean, sd })
    }

    pub fn two_point(a: f64, b: f64, prob_a: f64) -> Result<Self> {
        Self::new(StepKind::TwoPoint { a, b, prob_a })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(StepKind::Constant { c }).expect("finite constant is always valid")
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(StepKind::Pareto { alpha, scale })
    }

    pub fn kind(&self) -> StepKind {
        self.kind
    }

    /// E(X).
    pub fn m1(&self) -> f64 {
        self.m1
    }

    /// E(X^2), possibly infinite.
    pub fn m2(&self) -> Moment {
        self.m2
    }

    /// Var(X) when the second moment is finite.
    pub fn sigma2(&self) -> Option<f64> {
        self.m2.finite().map(|m2| (m2 - self.m1 * self.m1).max(0.0))
    }

    /// One draw from the law.
    #[inline]
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        match self.kind {
            StepKind::Rademacher => {
                if stream.bernoulli(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            StepKind::Gaussian { mean, sd } => mean + sd * stream.standard_normal(),
            StepKind::TwoPoint { a, b, prob_a } => {
                if stream.bernoulli(prob_a) {
                    a
                } else {
                    b
                }
            }
            StepKind::Constant { c } => c,
            StepKind::Pareto { alpha, scale } => scale * stream.uniform_open().powf(-1.0 / alpha),
        }
    }

    /// E[X^order 1{|X| <= threshold}] in closed form; `order` in 1..=4.
    /// `threshold = f64::INFINITY` yields the plain moment (possibly infinite).
    pub fn truncated_moment(&self, order: u32, threshold: f64) -> f64 {
        assert!((1..=4).contains(&order), "order must be in 1..=4");
        let t = threshold;
        match self.kind {
            StepKind::Rademacher => {
                if t >= 1.0 {
                    if order % 2 == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.0
                }
            }
            StepKind::Constant { c } => {
                if c.abs() <= t {
                    c.powi(order as i32)
                } else {
                    0.0
                }
            }
            StepKind::TwoPoint { a, b, prob_a } => {
                let mut v = 0.0;
                if a.abs() <= t {
                    v += a.powi(order as i32) * prob_a;
                }
                if b.abs() <= t {
                    v += b.powi(order as i32) * (1.0 - prob_a);
                }
                v
            }
            StepKind::Gaussian { mean, sd } => gaussian_truncated_moment(mean, sd, order, t),
            StepKind::Pareto { alpha, scale } => pareto_truncated_moment(alpha, scale, order, t),
        }
    }

    /// Finite support as (value, exact probability) pairs, when the law has one.
    pub fn finite_support(&self) -> Option<Vec<(f64, BigRational)>> {
        let one = BigRational::from_integer(BigInt::from(1));
        match self.kind {
            StepKind::Rademacher => {
                let half = BigRational::new(BigInt::from(1), BigInt::from(2));
                Some(vec![(-1.0, half.clone()), (1.0, half)])
            }
            StepKind::Constant { c } => Some(vec![(c, one)]),
            StepKind::TwoPoint { a, b, prob_a } => {
                // f64 probabilities are dyadic rationals, so this is exact.
                let pa = BigRational::from_float(prob_a)?;
                let pb = &one - &pa;
                Some(vec![(a, pa), (b, pb)])
            }
            StepKind::Gaussian { .. } | StepKind::Pareto { .. } => None,
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Partial moments M_k = E[xi^k 1{a <= xi <= b}] for standard normal xi,
/// k = 0..=order, via M_k = (k-1) M_{k-2} - (b^{k-1} phi(b) - a^{k-1} phi(a)).
fn standard_normal_partial_moments(a: f64, b: f64, order: u32) -> Vec<f64> {
    // x^k phi(x) -> 0 as |x| -> inf.
    let edge = |x: f64, k: i32| {
        if x.is_infinite() {
            0.0
        } else {
            x.powi(k) * normal_pdf(x)
        }
    };
    let mut m = vec![0.0; (order + 1) as usize];
    m[0] = normal_cdf(b) - normal_cdf(a);
    if order >= 1 {
        m[1] = edge(a, 0) - edge(b, 0);
    }
    for k in 2..=order as usize {
        m[k] = (k as f64 - 1.0) * m[k - 2] - (edge(b, k as i32 - 1) - edge(a, k as i32 - 1));
    }
    m
}

fn gaussian_truncated_moment(mean: f64, sd: f64, order: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t.is_infinite() {
        // Plain moments of N(mean, sd^2) up to order 4.
        let (mu, s2) = (mean, sd * sd);
        return match order {
            1 => mu,
            2 => mu * mu + s2,
            3 => mu * mu * mu + 3.0 * mu * s2,
            4 => mu.powi(4) + 6.0 * mu * mu * s2 + 3.0 * s2 * s2,
            _ => unreachable!(),
        };
    }
    let a = (-t - mean) / sd;
    let b = (t - mean) / sd;
    let m = standard_normal_partial_moments(a, b, order);
    // E[(mu + sd xi)^order 1{...}] by binomial expansion.
    let mut total = 0.0;
    for k in 0..=order {
        let binom = match (order, k) {
            (_, 0) => 1.0,
            (o, k) if k == o => 1.0,
            (2, 1) => 2.0,
            (3, 1) | (3, 2) => 3.0,
            (4, 1) | (4, 3) => 4.0,
            (4, 2) => 6.0,
            (1, _) | (_, _) => 1.0,
        };
        total += binom * mean.powi((order - k) as i32) * sd.powi(k as i32) * m[k as usize];
    }
    total
}

fn pareto_truncated_moment(alpha: f64, scale: f64, order: u32, t: f64) -> f64 {
    let m = order as f64;
    if t < scale {
        return 0.0;
    }
    if t.is_infinite() {
        return if m < alpha {
            alpha * scale.powf(m) / (alpha - m)
        } else {
            f64::INFINITY
        };
    }
    if (m - alpha).abs() < 1e-12 {
        alpha * scale.powf(alpha) * (t / scale).ln()
    } else {
        alpha * scale.powf(alpha) * (t.powf(m - alpha) - scale.powf(m - alpha)) / (m - alpha)
    }
}

/// Constants entering the counterbalanced limit theorems:
/// mu_check = (1-p) m1 / (1+p), sigma_check^2 = m2 - mu_check^2,
/// sigma^2 = m2 - m1^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub mu_check: f64,
    pub sigma_check2: f64,
    pub sigma2: f64,
}

impl DerivedConstants {
    pub fn new(dist: &StepDistribution, p: f64) -> Result<Self> {
        let m2 = dist.m2().finite().ok_or_else(|| {
            Error::SecondMomentRequired("derived constants need E(X^2) < infinity".into())
        })?;
        let m1 = dist.m1();
        let mu_check = (1.0 - p) * m1 / (1.0 + p);
        let out = Self {
            mu_check,
            sigma_check2: m2 - mu_check * mu_check,
            sigma2: m2 - m1 * m1,
        };
        debug_assert!(out.sigma_check2 >= -1e-12);
        debug_assert!(out.sigma2 >= -1e-12);
        Ok(out)
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::Rademacher => write!(f, "rademacher"),
            StepKind::Gaussian { mean, sd } => write!(f, "gaussian({mean},{sd})"),
            StepKind::TwoPoint { a, b, prob_a } => write!(f, "two-point({a},{b},{prob_a})"),
            StepKind::Constant { c } => write!(f, "constant({c})"),
            StepKind::Pareto { alpha, scale } => write!(f, "pareto({alpha},{scale})"),
        }
    }
}

impl FromStr for StepKind {
    type Err = Error;

    /// Parses the compact spec grammar used by the CLI, e.g. `rademacher`,
    /// `gaussian(0,1)`, `two-point(0.5,2,0.5)`, `constant(1)`, `pareto(1.5,1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::InvalidDistribution(format!("cannot parse distribution spec `{s}`"));
        if s.eq_ignore_ascii_case("rademacher") {
            return Ok(StepKind::Rademacher);
        }
        let (name, rest) = s.split_once('(').ok_or_else(err)?;
        let args = rest.strip_suffix(')').ok_or_else(err)?;
        let vals: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| err()))
            .collect::<Result<_>>()?;
        match (name.trim().to_ascii_lowercase().as_str(), vals.as_slice()) {
            ("gaussian", [mean, sd]) => Ok(StepKind::Gaussian {
                mean: *mean,
                sd: *sd,
            }),
            ("two-point" | "twopoint", [a, b, prob_a]) => Ok(StepKind::TwoPoint {
                a: *a,
                b: *b,
                prob_a: *prob_a,
            }),
            ("constant", [c]) => Ok(StepKind::Constant { c: *c }),
            ("pareto", [alpha, scale]) => Ok(StepKind::Pareto {
                alpha: *alpha,
                scale: *scale,
            }),
            _ => Err(err()),
        }
    }
}

impl Serialize for StepKind {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StepKind {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
