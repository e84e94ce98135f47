//! The discrete set of possible orders, the combinatorial order gap, orders
//! read off billiard certificates, and arc partitions of the circle.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiards::BilliardCertificate;

pub type Fraction = Ratio<i64>;

/// Reduced fraction in wire form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionJson {
    pub num: i64,
    pub den: i64,
}

impl From<Fraction> for FractionJson {
    fn from(f: Fraction) -> Self {
        Self {
            num: *f.numer(),
            den: *f.denom(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("derived order {order} is not admissible for |W| = {group_order}")]
    InadmissibleDerivedOrder { order: Fraction, group_order: u64 },
    #[error("certificate does not satisfy k | |W| and k lambda = 2 pi j")]
    UncertifiedInput,
}

/// Ascending divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumQuery {
    pub group_order: u64,
    pub max_order: f64,
    pub is_rank_one: bool,
}

/// All reduced `m/k` in `[1, max_order]` with `k | |W|`; for rank-one
/// targets, the half-integers `m/2` with `m >= 2` instead.
pub fn admissible_orders(query: &SpectrumQuery) -> Vec<Fraction> {
    let mut out = BTreeSet::new();
    let bound = |k: i64| (query.max_order * k as f64 + 1e-9).floor() as i64;
    if query.is_rank_one {
        for m in 2..=bound(2) {
            out.insert(Fraction::new(m, 2));
        }
    } else {
        for k in divisors(query.group_order) {
            let k = k as i64;
            for m in k..=bound(k) {
                out.insert(Fraction::new(m, k));
            }
        }
    }
    out.into_iter().collect()
}

/// Admissibility witness `(m, k)` with `alpha ~ m / k` and `k | |W|`, or
/// `None`. Divisors are scanned in increasing order.
pub fn is_admissible(alpha: f64, group_order: u64, tol: f64) -> Option<(u64, u64)> {
    if !alpha.is_finite() || alpha < 1.0 - tol {
        return None;
    }
    divisors(group_order).into_iter().find_map(|k| {
        let scaled = k as f64 * alpha;
        let m = scaled.round();
        ((scaled - m).abs() < tol && m >= k as f64).then_some((m as u64, k))
    })
}

/// Distance from 1 to the next admissible order, `1/|W|`. This is the
/// combinatorial gap only; it makes no claim about the analytic gap constant.
pub fn order_gap(group_order: u64) -> Fraction {
    Fraction::new(1, group_order as i64)
}

/// An order realized as `m` traversals of a certified billiard period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedOrder {
    pub multiplicity: u64,
    pub order: Fraction,
}

/// Orders `m j / k` for `1 <= m <= max_mult` with `m lambda >= 2 pi`, each
/// checked against [`is_admissible`].
pub fn orders_from_certificate(cert: &BilliardCertificate, max_mult: u64) -> Result<Vec<DerivedOrder>, SpectrumError> {
    if !cert.is_valid() {
        return Err(SpectrumError::UncertifiedInput);
    }
    let (j, k) = (cert.j as i64, cert.k as i64);
    let mut out = Vec::new();
    for m in 1..=max_mult as i64 {
        if m * j < k {
            continue;
        }
        let order = Fraction::new(m * j, k);
        let value = *order.numer() as f64 / *order.denom() as f64;
        if is_admissible(value, cert.group_order, 1e-9).is_none() {
            return Err(SpectrumError::InadmissibleDerivedOrder {
                order,
                group_order: cert.group_order,
            });
        }
        out.push(DerivedOrder {
            multiplicity: m as u64,
            order,
        });
    }
    Ok(out)
}

/// A splitting of the circle into arcs of lengths `n_i pi / alpha` on which
/// `sin(alpha t)` is a Dirichlet eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSolution {
    /// `2 alpha` as an integer; `alpha = twice_alpha / 2`.
    pub twice_alpha: u64,
    /// Non-increasing parts with `sum = 2 alpha`.
    pub parts: Vec<u64>,
    /// A single arc covering the circle minus one point.
    pub degenerate: bool,
}

impl PartitionSolution {
    pub fn alpha(&self) -> Fraction {
        Fraction::new(self.twice_alpha as i64, 2)
    }

    pub fn arc_lengths(&self) -> Vec<f64> {
        let alpha = self.twice_alpha as f64 / 2.0;
        self.parts
            .iter()
            .map(|&n| n as f64 * std::f64::consts::PI / alpha)
            .collect()
    }
}

/// All unordered arc partitions for `alpha`; empty unless `2 alpha` is an
/// integer `>= 2` within `tol`.
pub fn partition_solutions(alpha: f64, tol: f64) -> Vec<PartitionSolution> {
    let twice = 2.0 * alpha;
    let n = twice.round();
    if !alpha.is_finite() || (twice - n).abs() >= tol || n < 2.0 {
        return Vec::new();
    }
    let n = n as u64;
    integer_partitions(n)
        .into_iter()
        .map(|parts| PartitionSolution {
            twice_alpha: n,
            degenerate: parts.len() == 1,
            parts,
        })
        .collect()
}

/// Integer partitions of `n` in reverse lexicographic order, generated
/// iteratively from `[n]` down to `[1, ..., 1]`.
pub fn integer_partitions(n: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut current = vec![n];
    loop {
        out.push(current.clone());
        // Rightmost part larger than 1.
        let Some(pos) = current.iter().rposition(|&x| x > 1) else {
            break;
        };
        let ones = (current.len() - pos - 1) as u64;
        let value = current[pos] - 1;
        current.truncate(pos);
        let (q, r) = (ones + 1 + value).div_rem(&value);
        current.extend(std::iter::repeat_n(value, q as usize));
        if r > 0 {
            current.push(r);
        }
    }
    out
}
