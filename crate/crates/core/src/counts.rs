//! Dense dynamic program for capped representation counts: the coefficients
//! of prod_{j >= j0} (1 + q^p(j)) up to q^K, saturated at the cap C.
//!
//! The table is the workhorse of the whole pipeline and routinely covers
//! 10^7..10^8 entries, so the representation is chosen by C: a plain bit
//! vector when C = 1 (each item sweep becomes a word-level shifted OR) and
//! the narrowest unsigned counter that holds C otherwise. Saturated
//! addition min(C, a+b) keeps the "< C or >= C" verdict exact: capping the
//! inputs never changes which side of C the capped sum lands on.
//!
//! Every item sweep walks n downward so each sequence value is used at most
//! once per representation, the standard 0/1 subset-sum discipline.

use crate::poly::{Polynomial, PolyError};
use num_bigint::BigInt;

/// Default cap on table memory: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET_BYTES: u64 = 2 * 1024 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountsError {
    /// The table would not fit; never silently degrades to a wrong answer.
    #[error("required table size {required_entries} entries ({required_bytes} bytes) exceeds memory budget of {budget_bytes} bytes")]
    BudgetExceeded {
        required_entries: u64,
        required_bytes: u64,
        budget_bytes: u64,
    },
    #[error("sequence value p({j}) = {value} is negative; counts are defined for nonnegative values only")]
    NegativeValue { j: i64, value: BigInt },
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Store {
    Bits(Vec<u64>),
    U8(Vec<u8>),
    U16(Vec<u16>),
    U32(Vec<u32>),
    U64(Vec<u64>),
}

/// Saturating representation counts for n in [0, k], capped at `cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    cap: u64,
    k: u64,
    j0: i64,
    j_max: i64,
    store: Store,
}

impl CountTable {
    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Largest n covered by the table.
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn j0(&self) -> i64 {
        self.j0
    }

    /// Largest j with p(j) <= k; the DP items are j0..=j_max.
    pub fn j_max(&self) -> i64 {
        self.j_max
    }

    /// min(cap, exact representation count of n). Panics if n > k.
    pub fn count(&self, n: u64) -> u64 {
        assert!(n <= self.k, "n = {n} beyond table size {}", self.k);
        let i = n as usize;
        match &self.store {
            Store::Bits(w) => (w[i / 64] >> (i % 64)) & 1,
            Store::U8(v) => v[i] as u64,
            Store::U16(v) => v[i] as u64,
            Store::U32(v) => v[i] as u64,
            Store::U64(v) => v[i],
        }
    }

    /// Largest n in [0, k] with count below the cap, `None` if every entry
    /// is saturated.
    pub fn largest_deficient(&self) -> Option<u64> {
        match &self.store {
            Store::Bits(w) => {
                let top = self.k as usize;
                for i in (0..w.len()).rev() {
                    let mut missing = !w[i];
                    if i == top / 64 {
                        let used = top % 64 + 1;
                        if used < 64 {
                            missing &= (1u64 << used) - 1;
                        }
                    }
                    if missing != 0 {
                        return Some(i as u64 * 64 + (63 - missing.leading_zeros() as u64));
                    }
                }
                None
            }
            Store::U8(v) => rev_find(v, self.cap as u8),
            Store::U16(v) => rev_find(v, self.cap as u16),
            Store::U32(v) => rev_find(v, self.cap as u32),
            Store::U64(v) => rev_find(v, self.cap),
        }
    }

    /// Entries 0..=k in order, each capped.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.k).map(move |n| self.count(n))
    }

    /// First n in [lo, hi] with count(n) < c, `None` if all are at least c.
    /// Requires c <= cap (below the cap the comparison is exact) and hi <= k.
    pub fn first_below(&self, c: u64, lo: u64, hi: u64) -> Option<u64> {
        assert!(c <= self.cap, "threshold {c} above table cap {}", self.cap);
        assert!(hi <= self.k, "range end {hi} beyond table size {}", self.k);
        if lo > hi {
            return None;
        }
        match &self.store {
            _ if c == 0 => None,
            Store::Bits(w) => {
                let mut n = lo as usize;
                let hi = hi as usize;
                while n <= hi {
                    if n % 64 == 0 && n + 63 <= hi && w[n / 64] == !0u64 {
                        n += 64;
                        continue;
                    }
                    if (w[n / 64] >> (n % 64)) & 1 == 0 {
                        return Some(n as u64);
                    }
                    n += 1;
                }
                None
            }
            Store::U8(v) => slice_first_below(v, c as u8, lo, hi),
            Store::U16(v) => slice_first_below(v, c as u16, lo, hi),
            Store::U32(v) => slice_first_below(v, c as u32, lo, hi),
            Store::U64(v) => slice_first_below(v, c, lo, hi),
        }
    }
}

fn slice_first_below<T: Copy + PartialOrd>(v: &[T], c: T, lo: u64, hi: u64) -> Option<u64> {
    v[lo as usize..=hi as usize]
        .iter()
        .position(|&x| x < c)
        .map(|i| lo + i as u64)
}

fn rev_find<T: Copy + PartialOrd>(v: &[T], cap: T) -> Option<u64> {
    v.iter().rposition(|&c| c < cap).map(|i| i as u64)
}

trait SatCounter: Copy + Ord {
    const ZERO: Self;
    const ONE: Self;
    fn from_u64(v: u64) -> Self;
    fn sat_add_cap(a: Self, b: Self, cap: Self) -> Self;
}

macro_rules! impl_sat_counter {
    ($($t:ty),*) => {$(
        impl SatCounter for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            fn from_u64(v: u64) -> Self {
                v as $t
            }
            #[inline(always)]
            fn sat_add_cap(a: Self, b: Self, cap: Self) -> Self {
                a.saturating_add(b).min(cap)
            }
        }
    )*};
}

impl_sat_counter!(u8, u16, u32, u64);

/// In-place downward sweep for one item of value v >= 1: counts[n] becomes
/// min(cap, counts[n] + counts[n - v]), reading pre-sweep values. Runs over
/// descending blocks of width v so source and destination never alias and
/// the inner loop vectorizes.
fn sweep<T: SatCounter>(counts: &mut [T], v: usize, cap: T) {
    debug_assert!(v >= 1);
    let mut hi = counts.len();
    while hi > v {
        let lo = std::cmp::max(v, hi - v);
        let width = hi - lo;
        let (left, right) = counts.split_at_mut(lo);
        let src = &left[lo - v..];
        for (d, s) in right[..width].iter_mut().zip(&src[..width]) {
            *d = T::sat_add_cap(*d, *s, cap);
        }
        hi = lo;
    }
}

/// The value-zero item contributes a factor (1 + q^0) = 2: every count
/// doubles, saturating.
fn double_all<T: SatCounter>(counts: &mut [T], cap: T) {
    for c in counts.iter_mut() {
        *c = T::sat_add_cap(*c, *c, cap);
    }
}

fn run_counters<T: SatCounter>(len: usize, items: &[u64], cap: T) -> Vec<T> {
    let mut counts = vec![T::ZERO; len];
    counts[0] = T::ONE;
    for &v in items {
        if v == 0 {
            double_all(&mut counts, cap);
        } else {
            sweep(&mut counts, v as usize, cap);
        }
    }
    counts
}

/// Word-level shifted OR: bits |= bits << v, high words first so the shifted
/// sources are pre-update values.
fn or_shift(words: &mut [u64], v: usize) {
    let q = v / 64;
    let r = v % 64;
    for i in (q..words.len()).rev() {
        let mut w = words[i - q] << r;
        if r > 0 && i > q {
            w |= words[i - q - 1] >> (64 - r);
        }
        words[i] |= w;
    }
}

fn run_bits(len: usize, items: &[u64]) -> Vec<u64> {
    let mut words = vec![0u64; len.div_ceil(64)];
    words[0] = 1;
    for &v in items {
        // the zero item doubles every count, which a 1-bit saturates away
        if v > 0 {
            or_shift(&mut words, v as usize);
        }
    }
    words
}

/// Sequence values p(j0), p(j0+1), ... up to the first one above k.
/// Requires the values to be nonnegative integers on the way.
fn collect_items(p: &Polynomial, j0: i64, k: u64) -> Result<(Vec<u64>, i64), CountsError> {
    if p.degree().map_or(true, |d| d == 0) {
        return Err(CountsError::InvalidArguments(
            "polynomial must have degree at least 1".into(),
        ));
    }
    let mut items = Vec::new();
    let mut j = j0;
    loop {
        let v = p.eval_int(&BigInt::from(j))?;
        if v.sign() == num_bigint::Sign::Minus {
            return Err(CountsError::NegativeValue { j, value: v });
        }
        match u64::try_from(&v) {
            Ok(v) if v <= k => items.push(v),
            _ => break,
        }
        j += 1;
    }
    Ok((items, j - 1))
}

fn bytes_needed(entries: u64, cap: u64, force_counters: bool) -> u64 {
    if cap == 1 && !force_counters {
        entries.div_ceil(64).saturating_mul(8)
    } else {
        entries.saturating_mul(counter_width(cap) as u64)
    }
}

fn counter_width(cap: u64) -> usize {
    if cap <= u8::MAX as u64 {
        1
    } else if cap <= u16::MAX as u64 {
        2
    } else if cap <= u32::MAX as u64 {
        4
    } else {
        8
    }
}

fn build(
    p: &Polynomial,
    j0: i64,
    cap: u64,
    k: u64,
    budget_bytes: u64,
    force_counters: bool,
) -> Result<CountTable, CountsError> {
    if cap == 0 {
        return Err(CountsError::InvalidArguments("cap must be at least 1".into()));
    }
    let entries = k
        .checked_add(1)
        .ok_or_else(|| CountsError::InvalidArguments("k too large".into()))?;
    let required_bytes = bytes_needed(entries, cap, force_counters);
    if required_bytes > budget_bytes || usize::try_from(entries).is_err() {
        return Err(CountsError::BudgetExceeded {
            required_entries: entries,
            required_bytes,
            budget_bytes,
        });
    }
    let (items, j_max) = collect_items(p, j0, k)?;
    let len = entries as usize;
    let store = if cap == 1 && !force_counters {
        Store::Bits(run_bits(len, &items))
    } else {
        match counter_width(cap) {
            1 => Store::U8(run_counters(len, &items, cap as u8)),
            2 => Store::U16(run_counters(len, &items, cap as u16)),
            4 => Store::U32(run_counters(len, &items, cap as u32)),
            _ => Store::U64(run_counters(len, &items, cap)),
        }
    };
    Ok(CountTable {
        cap,
        k,
        j0,
        j_max,
        store,
    })
}

/// Capped count table for n in [0, k]. Uses the bit-vector representation
/// when cap = 1.
pub fn count_table(
    p: &Polynomial,
    j0: i64,
    cap: u64,
    k: u64,
    budget_bytes: u64,
) -> Result<CountTable, CountsError> {
    build(p, j0, cap, k, budget_bytes, false)
}

/// Same table through the general counter path regardless of cap; the
/// independent route certificate verification runs even when cap = 1.
pub fn count_table_counters(
    p: &Polynomial,
    j0: i64,
    cap: u64,
    k: u64,
    budget_bytes: u64,
) -> Result<CountTable, CountsError> {
    build(p, j0, cap, k, budget_bytes, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{rep_count_exact, OracleLimit};
    use crate::parse::parse_poly;

    const BUDGET: u64 = DEFAULT_MEMORY_BUDGET_BYTES;

    #[test]
    fn table_examples() {
        let sq = parse_poly("j^2").unwrap();
        let t = count_table(&sq, 1, 1, 200, BUDGET).unwrap();
        assert_eq!(t.count(128), 0);
        for n in 129..=200 {
            assert_eq!(t.count(n), 1, "n = {n}");
        }

        let tri = parse_poly("binomial(j+2,2)").unwrap();
        let t = count_table(&tri, 0, 1, 100, BUDGET).unwrap();
        assert_eq!(t.count(33), 0);
        for n in 34..=100 {
            assert_eq!(t.count(n), 1, "n = {n}");
        }

        let id = parse_poly("j").unwrap();
        let t = count_table(&id, 1, 2, 10, BUDGET).unwrap();
        let got: Vec<u64> = t.iter().collect();
        assert_eq!(got, vec![1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert_eq!(t.j_max(), 10);

        let t = count_table(&sq, 1, 5, 0, BUDGET).unwrap();
        assert_eq!(t.count(0), 1);
    }

    #[test]
    fn largest_deficient_examples() {
        let sq = parse_poly("j^2").unwrap();
        let t = count_table(&sq, 1, 1, 500, BUDGET).unwrap();
        assert_eq!(t.largest_deficient(), Some(128));

        let id = parse_poly("j").unwrap();
        let t = count_table(&id, 1, 1, 100, BUDGET).unwrap();
        assert_eq!(t.largest_deficient(), None);

        let t = count_table(&id, 1, 2, 100, BUDGET).unwrap();
        assert_eq!(t.largest_deficient(), Some(2));
    }

    #[test]
    fn budget_is_enforced() {
        let sq = parse_poly("j^2").unwrap();
        let err = count_table(&sq, 1, 1, 10_000_000, 1000).unwrap_err();
        match err {
            CountsError::BudgetExceeded {
                required_entries,
                required_bytes,
                budget_bytes,
            } => {
                assert_eq!(required_entries, 10_000_001);
                assert_eq!(required_bytes, 10_000_001u64.div_ceil(64) * 8);
                assert_eq!(budget_bytes, 1000);
            }
            other => panic!("unexpected error {other:?}"),
        }
        // counter path is wider per entry
        let err = count_table_counters(&sq, 1, 1, 10_000_000, 1000).unwrap_err();
        match err {
            CountsError::BudgetExceeded { required_bytes, .. } => {
                assert_eq!(required_bytes, 10_000_001);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let sq = parse_poly("j^2").unwrap();
        assert!(matches!(
            count_table(&sq, 1, 0, 10, BUDGET),
            Err(CountsError::InvalidArguments(_))
        ));
        assert!(matches!(
            count_table(&Polynomial::constant_int(3), 1, 1, 10, BUDGET),
            Err(CountsError::InvalidArguments(_))
        ));
        assert!(matches!(
            count_table(&parse_poly("j^2 - 10*j").unwrap(), 1, 1, 10, BUDGET),
            Err(CountsError::NegativeValue { .. })
        ));
        assert!(matches!(
            count_table(&parse_poly("j/2").unwrap(), 1, 1, 10, BUDGET),
            Err(CountsError::Poly(_))
        ));
    }

    #[test]
    fn oracle_equivalence_small() {
        let lim = OracleLimit {
            max_items: 512,
            ..OracleLimit::default()
        };
        for src in ["j", "j^2", "binomial(j+2,2)", "binomial(j+3,3)"] {
            let p = parse_poly(src).unwrap();
            for j0 in [0i64, 1] {
                for cap in [1u64, 2, 3] {
                    let t = count_table(&p, j0, cap, 300, BUDGET).unwrap();
                    for n in 0..=300u64 {
                        let exact = rep_count_exact(&p, j0, n, &lim).unwrap();
                        let expect = exact.min(cap.into());
                        assert_eq!(
                            u64::try_from(expect).unwrap(),
                            t.count(n),
                            "{src} j0={j0} cap={cap} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn prefix_stability() {
        for src in ["j^2", "binomial(j+2,2)"] {
            let p = parse_poly(src).unwrap();
            for cap in [1u64, 3] {
                let small = count_table(&p, 1, cap, 400, BUDGET).unwrap();
                let large = count_table(&p, 1, cap, 800, BUDGET).unwrap();
                for n in 0..=400 {
                    assert_eq!(small.count(n), large.count(n), "{src} cap={cap} n={n}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_cap() {
        let p = parse_poly("binomial(j+2,2)").unwrap();
        let caps: Vec<u64> = vec![1, 2, 3, 5, 9];
        let tables: Vec<CountTable> = caps
            .iter()
            .map(|&c| count_table(&p, 0, c, 300, BUDGET).unwrap())
            .collect();
        for w in tables.windows(2) {
            for n in 0..=300 {
                assert!(w[0].count(n) <= w[1].count(n));
                assert_eq!(w[0].count(n), w[1].count(n).min(w[0].cap()));
            }
        }
    }

    #[test]
    fn item_order_is_irrelevant() {
        // permuted sweeps hit the same table because saturated addition of
        // nonnegative counts is commutative and associative under the cap
        let items: Vec<u64> = vec![1, 3, 6, 10, 15, 21, 28, 36, 45];
        let reference = run_counters::<u8>(101, &items, 3);
        let mut perm = items.clone();
        perm.reverse();
        assert_eq!(run_counters::<u8>(101, &perm, 3), reference);
        let shuffled: Vec<u64> = vec![21, 1, 45, 10, 3, 36, 6, 28, 15];
        assert_eq!(run_counters::<u8>(101, &shuffled, 3), reference);
    }

    #[test]
    fn bit_path_matches_counter_path() {
        for src in ["j^2", "binomial(j+2,2)", "j^3"] {
            let p = parse_poly(src).unwrap();
            let bits = count_table(&p, 1, 1, 100_000, BUDGET).unwrap();
            let counters = count_table_counters(&p, 1, 1, 100_000, BUDGET).unwrap();
            assert!(matches!(bits.store, Store::Bits(_)));
            assert!(matches!(counters.store, Store::U8(_)));
            for n in 0..=100_000 {
                assert_eq!(bits.count(n), counters.count(n), "{src} n={n}");
            }
        }
    }

    #[test]
    fn wide_caps_use_wider_counters() {
        let p = parse_poly("j").unwrap();
        let t = count_table(&p, 1, 70_000, 40, BUDGET).unwrap();
        assert!(matches!(t.store, Store::U32(_)));
        // partitions of 40 into distinct parts: q(40) = 1113, uncapped here
        assert_eq!(t.count(40), 1113);
        let t = count_table(&p, 1, u64::MAX, 40, BUDGET).unwrap();
        assert!(matches!(t.store, Store::U64(_)));
        assert_eq!(t.count(40), 1113);
    }

    #[test]
    fn zero_item_doubles_counts() {
        // j from j0 = 0 has p(0) = 0, so every count doubles (capped)
        let id = parse_poly("j").unwrap();
        let with_zero = count_table(&id, 0, 8, 30, BUDGET).unwrap();
        let without = count_table(&id, 1, 8, 30, BUDGET).unwrap();
        for n in 0..=30 {
            assert_eq!(with_zero.count(n), (without.count(n) * 2).min(8), "n = {n}");
        }
    }
}
