//! Exact univariate polynomial arithmetic over the rationals.
//!
//! Coefficients are arbitrary-precision rationals ([`BigRational`]) and every
//! operation is exact; nothing here ever touches floating point. The module
//! also provides the two number-theoretic predicates the rest of the pipeline
//! leans on: integer-valuedness (via the binomial/Newton basis) and certified
//! eventual positivity (Cauchy root bound plus an exhaustive integer scan).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Integers scanned above this many steps abort with
/// [`PolyError::ScanLimitExceeded`] instead of looping for hours on
/// adversarial inputs. Desk-scale runs stay well below it.
pub const POSITIVITY_SCAN_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    /// The polynomial does not take an integer value at the requested point.
    #[error("non-integer value {value} at n = {at}")]
    NonIntegerValue { at: BigInt, value: Rat },
    /// Leading coefficient is not positive, so p(n) > 0 eventually is false.
    #[error("polynomial is not eventually positive: {0}")]
    NotEventuallyPositive(String),
    /// The downward positivity scan would exceed [`POSITIVITY_SCAN_LIMIT`].
    #[error("positivity scan from root bound {bound} down to {floor} exceeds {POSITIVITY_SCAN_LIMIT} steps")]
    ScanLimitExceeded { bound: BigInt, floor: i64 },
}

/// A univariate polynomial with exact rational coefficients.
///
/// `coeffs[i]` is the coefficient of the i-th power; the vector is kept in
/// canonical form (no trailing zero, the zero polynomial is the empty
/// vector). Values are immutable once built and freely shareable.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self.render("j"))
    }
}

fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    /// The variable itself (the polynomial `j`).
    pub fn var() -> Self {
        Polynomial::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn constant(c: Rat) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    pub fn constant_int(c: i64) -> Self {
        Polynomial::constant(rat_i64(c))
    }

    /// Builds from low-to-high coefficients, dropping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| rat_i64(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of the i-th power (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Exact value p(n) by Horner evaluation.
    pub fn eval(&self, n: &BigInt) -> Rat {
        let x = Rat::from_integer(n.clone());
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> Rat {
        self.eval(&BigInt::from(n))
    }

    /// Exact integer value p(n); errors if p(n) is not an integer.
    pub fn eval_int(&self, n: &BigInt) -> Result<BigInt, PolyError> {
        let v = self.eval(n);
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(PolyError::NonIntegerValue {
                at: n.clone(),
                value: v,
            })
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Polynomial::from_coeffs(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Polynomial::from_coeffs(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    /// Coefficient-wise scaling by an exact rational.
    pub fn scale(&self, c: &Rat) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The polynomial q with q(j) = p(j + a), computed exactly.
    ///
    /// Horner-style composition: the substitution j -> j + a is applied one
    /// coefficient at a time, so the result is canonical by construction.
    pub fn shift(&self, a: i64) -> Polynomial {
        if a == 0 || self.is_zero() {
            return self.clone();
        }
        let a = rat_i64(a);
        // acc <- acc * (j + a) + c, from the leading coefficient down
        let mut acc: Vec<Rat> = Vec::with_capacity(self.coeffs.len());
        for c in self.coeffs.iter().rev() {
            let mut next = vec![Rat::zero(); acc.len() + 1];
            for (i, t) in acc.iter().enumerate() {
                next[i + 1] += t;
                next[i] += t * &a;
            }
            next[0] += c;
            acc = next;
        }
        Polynomial::from_coeffs(acc)
    }

    /// Coefficients in the binomial (Newton) basis: p(j) = sum a_i * C(j, i).
    ///
    /// These are the forward differences of p at 0; p is integer-valued on
    /// all of Z exactly when every a_i is an integer.
    pub fn to_newton(&self) -> Vec<Rat> {
        let d = match self.degree() {
            None => return Vec::new(),
            Some(d) => d,
        };
        let mut row: Vec<Rat> = (0..=d as i64).map(|n| self.eval_i64(n)).collect();
        let mut out = Vec::with_capacity(d + 1);
        out.push(row[0].clone());
        for i in 1..=d {
            for k in 0..=(d - i) {
                let diff = &row[k + 1] - &row[k];
                row[k] = diff;
            }
            out.push(row[0].clone());
        }
        out
    }

    /// Inverse of [`to_newton`]: rebuild from binomial-basis coefficients.
    pub fn from_newton(newton: &[Rat]) -> Polynomial {
        let mut acc = Polynomial::zero();
        let mut basis = Polynomial::one(); // C(j, 0)
        for (i, a) in newton.iter().enumerate() {
            if i > 0 {
                // C(j, i) = C(j, i-1) * (j - (i-1)) / i
                let factor = Polynomial::from_coeffs(vec![rat_i64(-(i as i64 - 1)), Rat::one()]);
                basis = basis.mul(&factor).scale(&Rat::new(BigInt::one(), BigInt::from(i)));
            }
            acc = acc.add(&basis.scale(a));
        }
        acc
    }

    /// True iff p(n) is an integer for every integer n.
    pub fn is_integer_valued(&self) -> bool {
        self.to_newton().iter().all(Rat::is_integer)
    }

    /// Integer Cauchy bound B >= 1 on the absolute value of all real roots:
    /// B = ceil(1 + max |c_i / c_d|). Every integer n > B has p(n) of the
    /// same sign as the leading coefficient.
    pub fn cauchy_root_bound(&self) -> Option<BigInt> {
        let lead = self.leading()?;
        if self.coeffs.len() == 1 {
            // constants have no roots; 1 is a harmless bound
            return Some(BigInt::one());
        }
        let lead = lead.abs();
        let mut max_ratio = Rat::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = c.abs() / &lead;
            if r > max_ratio {
                max_ratio = r;
            }
        }
        Some((max_ratio + Rat::one()).ceil().to_integer())
    }

    /// Least integer m >= floor with p(n) > 0 for every integer n >= m.
    ///
    /// Positivity beyond the Cauchy bound B is certified by the sign of the
    /// leading coefficient; the integers from B+1 down to floor are then
    /// checked one by one, so the result is rigorous, not numeric.
    pub fn positivity_cutoff(&self, floor: i64) -> Result<i64, PolyError> {
        self.positivity_cutoff_with_bound(floor).map(|(m, _)| m)
    }

    /// Same as [`positivity_cutoff`], also returning the root bound used.
    pub fn positivity_cutoff_with_bound(
        &self,
        floor: i64,
    ) -> Result<(i64, BigInt), PolyError> {
        let lead = self
            .leading()
            .ok_or_else(|| PolyError::NotEventuallyPositive("zero polynomial".into()))?;
        if !lead.is_positive() {
            return Err(PolyError::NotEventuallyPositive(format!(
                "leading coefficient {} <= 0",
                lead
            )));
        }
        let bound = self.cauchy_root_bound().expect("nonzero by the check above");
        if self.coeffs.len() == 1 {
            // positive constant: positive on all of Z
            return Ok((floor, bound));
        }
        let start = match (&bound + 1u32).to_i64() {
            Some(s) if s > floor => s,
            Some(_) => return Ok((floor, bound)),
            None => {
                return Err(PolyError::ScanLimitExceeded {
                    bound,
                    floor,
                })
            }
        };
        if (start as i128 - floor as i128) > POSITIVITY_SCAN_LIMIT as i128 {
            return Err(PolyError::ScanLimitExceeded { bound, floor });
        }

        // Clear denominators once; the sign of p is unchanged and the scan
        // can then run in integer arithmetic (i128 fast path, BigInt fallback).
        let scaled = self.scale(&Rat::from_integer(self.denominator_lcm()));
        let int_coeffs: Vec<BigInt> = scaled.coeffs.iter().map(Rat::to_integer).collect();
        let small: Option<Vec<i128>> = int_coeffs.iter().map(BigInt::to_i128).collect();

        debug_assert!(
            sign_at(&int_coeffs, small.as_deref(), start) > 0,
            "value at root bound + 1 must be positive"
        );
        let mut m = start;
        for n in (floor..start).rev() {
            if sign_at(&int_coeffs, small.as_deref(), n) > 0 {
                m = n;
            } else {
                break;
            }
        }
        Ok((m, bound))
    }

    /// LCM of all coefficient denominators (1 for the zero polynomial).
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Canonical text form: monomial basis, descending powers, exact
    /// rationals as `a/b`, explicit `*` and `^`, e.g. `1/2*j^2 + 3/2*j + 1`.
    ///
    /// A negative first term is written with an explicit coefficient
    /// (`-1*j^2`, not `-j^2`) so that the string re-parses to the same
    /// polynomial under the expression grammar, where `-j^2` would bind as
    /// `(-j)^2`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                    if i == 0 {
                        out.push_str(&mag.to_string());
                    } else {
                        out.push_str(&format!("{}*{}", mag, power(var, i)));
                    }
                    continue;
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if i == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&power(var, i));
            } else {
                out.push_str(&format!("{}*{}", mag, power(var, i)));
            }
        }
        out
    }
}

fn power(var: &str, i: usize) -> String {
    if i == 1 {
        var.to_string()
    } else {
        format!("{var}^{i}")
    }
}

/// Sign of the integer-coefficient polynomial at n, using i128 Horner when
/// the coefficients and intermediates fit, BigInt otherwise.
fn sign_at(coeffs: &[BigInt], small: Option<&[i128]>, n: i64) -> i32 {
    if let Some(cs) = small {
        if let Some(v) = horner_i128(cs, n as i128) {
            return v.signum() as i32;
        }
    }
    let big = BigInt::from(n);
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &big + c;
    }
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Minus => -1,
    }
}

fn horner_i128(coeffs: &[i128], x: i128) -> Option<i128> {
    let mut acc: i128 = 0;
    for c in coeffs.iter().rev() {
        acc = acc.checked_mul(x)?.checked_add(*c)?;
    }
    Some(acc)
}

/// C(n+k, k) as an exact polynomial in n of degree k:
/// (n+k)(n+k-1)...(n+1) / k!.
pub fn binomial_shifted(k: u32) -> Polynomial {
    let mut acc = Polynomial::one();
    for i in 1..=k as i64 {
        acc = acc.mul(&Polynomial::from_coeffs(vec![rat_i64(i), Rat::one()]));
    }
    let mut fact = BigInt::one();
    for i in 2..=k as u64 {
        fact *= i;
    }
    acc.scale(&Rat::new(BigInt::one(), fact))
}
