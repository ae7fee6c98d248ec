//! Brute-force representation counter, deliberately algorithm-independent
//! from the table engine: top-down memoized subset counting with exact
//! big-integer results, no capping, no bit tricks. Slow and trustworthy;
//! used to validate the engine and certificates on small instances.

use crate::poly::Polynomial;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct OracleLimit {
    pub max_n: u64,
    pub max_items: usize,
    pub time_budget: Duration,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit {
            max_n: 1_000_000,
            max_items: 64,
            time_budget: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("sequence unsupported by the oracle: {0}")]
    InvalidSequence(String),
}

struct Counter<'a> {
    items: &'a [u64],
    memo: HashMap<(usize, u64), BigUint>,
    deadline: Instant,
    ticks: u32,
}

impl Counter<'_> {
    /// Number of subsets of items[..i] summing to r.
    fn count(&mut self, i: usize, r: u64) -> Result<BigUint, OracleError> {
        if r == 0 && i == 0 {
            return Ok(BigUint::one());
        }
        if i == 0 {
            return Ok(BigUint::zero());
        }
        if let Some(c) = self.memo.get(&(i, r)) {
            return Ok(c.clone());
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 1024 == 0 && Instant::now() > self.deadline {
            return Err(OracleError::LimitExceeded("time budget".into()));
        }
        let mut total = self.count(i - 1, r)?;
        let item = self.items[i - 1];
        if item <= r {
            total += self.count(i - 1, r - item)?;
        }
        self.memo.insert((i, r), total.clone());
        Ok(total)
    }
}

fn collect_items(p: &Polynomial, j0: i64, n: u64, lim: &OracleLimit) -> Result<Vec<u64>, OracleError> {
    if p.degree().map_or(true, |d| d == 0) {
        return Err(OracleError::InvalidSequence(
            "polynomial must have degree at least 1".into(),
        ));
    }
    let mut items = Vec::new();
    let mut j = j0;
    loop {
        let v = p
            .eval_int(&BigInt::from(j))
            .map_err(|e| OracleError::InvalidSequence(e.to_string()))?;
        if v.sign() == num_bigint::Sign::Minus {
            return Err(OracleError::InvalidSequence(format!(
                "negative value p({j}) = {v}"
            )));
        }
        let v: u64 = match (&v).try_into() {
            Ok(v) if v <= n => v,
            _ => break,
        };
        items.push(v);
        if items.len() > lim.max_items {
            return Err(OracleError::LimitExceeded(format!(
                "more than {} items at or below {n}",
                lim.max_items
            )));
        }
        j += 1;
    }
    Ok(items)
}

/// Exact number of ways to write n as a sum of distinct values p(j), j >= j0.
/// The empty sum represents 0.
pub fn rep_count_exact(
    p: &Polynomial,
    j0: i64,
    n: u64,
    lim: &OracleLimit,
) -> Result<BigUint, OracleError> {
    if n > lim.max_n {
        return Err(OracleError::LimitExceeded(format!(
            "n = {n} exceeds max_n = {}",
            lim.max_n
        )));
    }
    let items = collect_items(p, j0, n, lim)?;
    let mut counter = Counter {
        items: &items,
        memo: HashMap::new(),
        deadline: Instant::now() + lim.time_budget,
        ticks: 0,
    };
    counter.count(items.len(), n)
}

/// Largest n <= limit whose exact representation count is below c, or `None`
/// if every n in [0, limit] already has at least c representations.
pub fn lambda_bruteforce(
    p: &Polynomial,
    j0: i64,
    c: u64,
    limit: u64,
    lim: &OracleLimit,
) -> Result<Option<u64>, OracleError> {
    let c = BigUint::from(c);
    for n in (0..=limit).rev() {
        if rep_count_exact(p, j0, n, lim)? < c {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn count(src: &str, j0: i64, n: u64) -> u64 {
        let p = parse_poly(src).unwrap();
        let lim = OracleLimit {
            max_items: 512,
            ..OracleLimit::default()
        };
        rep_count_exact(&p, j0, n, &lim)
            .unwrap()
            .try_into()
            .unwrap()
    }

    #[test]
    fn counts_small_cases() {
        assert_eq!(count("j^2", 1, 25), 2); // {25}, {9,16}
        assert_eq!(count("j", 1, 5), 3); // {5}, {1,4}, {2,3}
        assert_eq!(count("j^2", 1, 0), 1); // empty sum
        assert_eq!(count("j^3", 1, 0), 1);
        assert_eq!(count("j^2", 1, 128), 0);
        assert_eq!(count("j^2", 1, 132), 1); // {1,9,16,25,81}
    }

    #[test]
    fn raising_j0_never_increases_counts() {
        let lim = OracleLimit {
            max_items: 512,
            ..OracleLimit::default()
        };
        for src in ["j", "j^2", "binomial(j+2,2)"] {
            let p = parse_poly(src).unwrap();
            for n in [10u64, 30, 60, 100] {
                let mut prev = rep_count_exact(&p, 0, n, &lim).unwrap();
                for j0 in 1..4 {
                    let cur = rep_count_exact(&p, j0, n, &lim).unwrap();
                    assert!(cur <= prev, "{src} n={n} j0={j0}");
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn lambda_bruteforce_examples() {
        let lim = OracleLimit {
            max_items: 512,
            ..OracleLimit::default()
        };
        let sq = parse_poly("j^2").unwrap();
        assert_eq!(lambda_bruteforce(&sq, 1, 1, 500, &lim).unwrap(), Some(128));

        let tri = parse_poly("binomial(j+2,2)").unwrap();
        assert_eq!(lambda_bruteforce(&tri, 0, 1, 200, &lim).unwrap(), Some(33));

        let id = parse_poly("j").unwrap();
        assert_eq!(lambda_bruteforce(&id, 1, 2, 100, &lim).unwrap(), Some(2));
        assert_eq!(lambda_bruteforce(&id, 1, 1, 60, &lim).unwrap(), None);
    }

    #[test]
    fn limits_are_enforced() {
        let id = parse_poly("j").unwrap();
        let lim = OracleLimit {
            max_items: 10,
            ..OracleLimit::default()
        };
        assert!(matches!(
            rep_count_exact(&id, 1, 100, &lim),
            Err(OracleError::LimitExceeded(_))
        ));
        let lim = OracleLimit {
            max_n: 50,
            ..OracleLimit::default()
        };
        assert!(matches!(
            rep_count_exact(&id, 1, 100, &lim),
            Err(OracleError::LimitExceeded(_))
        ));
        assert!(matches!(
            rep_count_exact(&Polynomial::constant_int(3), 1, 10, &OracleLimit::default()),
            Err(OracleError::InvalidSequence(_))
        ));
    }

    /// Distinct-part partition counts from the pentagonal number theorem:
    /// with P the partition generating function and E = prod (1 - q^k),
    /// prod (1 + q^k) = P(q) * E(q^2), and both P and E come from the
    /// pentagonal recurrence. Entirely independent of the subset recursion.
    #[test]
    fn matches_pentagonal_expansion_for_distinct_parts() {
        const N: usize = 100;
        let mut parts = vec![0i64; N + 1];
        parts[0] = 1;
        for n in 1..=N {
            let mut acc = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * parts[n - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= n {
                    acc += sign * parts[n - g2];
                }
                k += 1;
            }
            parts[n] = acc;
        }

        let mut euler = vec![0i64; N + 1];
        euler[0] = 1;
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > N {
                break;
            }
            let sign = if k % 2 == 1 { -1 } else { 1 };
            euler[g1] = sign;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= N {
                euler[g2] = sign;
            }
            k += 1;
        }

        let id = parse_poly("j").unwrap();
        let lim = OracleLimit {
            max_items: 512,
            ..OracleLimit::default()
        };
        for n in 0..=N {
            let mut expect = 0i64;
            for m in 0..=n / 2 {
                expect += euler[m] * parts[n - 2 * m];
            }
            let got: u64 = rep_count_exact(&id, 1, n as u64, &lim)
                .unwrap()
                .try_into()
                .unwrap();
            assert_eq!(got as i64, expect, "n = {n}");
        }
    }
}
