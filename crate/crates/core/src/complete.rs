//! Decides whether the value sequence p(j0), p(j0+1), ... is complete, i.e.
//! whether a largest non-representable integer exists at all.
//!
//! The predicate checks five conditions sufficient for the rest of the
//! pipeline: p integer-valued; degree >= 1 with positive leading
//! coefficient; p(j) >= 1 for every j >= j0; p strictly increasing on
//! [j0, oo); and gcd of the values equal to 1. The last is the classical
//! divisibility obstruction, the middle two make the induction step sound
//! (the appended part is a fresh, positive, unique sequence member). The
//! final lambda value never leans on this predicate alone: the certificate
//! re-proves completeness constructively for each instance.

use crate::poly::{Polynomial, PolyError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    pub verdict: bool,
    /// Degree of p; `None` for the zero polynomial.
    pub degree: Option<usize>,
    /// gcd of p(j0), ..., p(j0+degree); equals the gcd of all values from j0
    /// on, since later values are integer combinations of these via finite
    /// differences. `None` when p is not integer-valued.
    #[serde(serialize_with = "ser_opt_bigint")]
    pub value_gcd: Option<BigInt>,
    /// Least m >= j0 with p(n) >= 1 for all n >= m; completeness requires
    /// m == j0. `None` when the cutoff machinery does not apply.
    pub positivity_from: Option<i64>,
    /// Least m >= j0 with p(n+1) - p(n) >= 1 for all n >= m.
    pub strictly_increasing_from: Option<i64>,
    /// One entry per violated condition; empty iff verdict.
    pub failures: Vec<String>,
}

fn ser_opt_bigint<S: serde::Serializer>(
    v: &Option<BigInt>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(g) => s.serialize_some(&g.to_string()),
        None => s.serialize_none(),
    }
}

/// gcd(p(j0), ..., p(j0+d)) for integer-valued p of degree d.
pub fn value_gcd(p: &Polynomial, j0: i64) -> Result<BigInt, PolyError> {
    let d = p.degree().unwrap_or(0) as i64;
    let mut g = BigInt::zero();
    for j in j0..=j0 + d {
        g = g.gcd(&p.eval_int(&BigInt::from(j))?);
    }
    Ok(g)
}

/// Runs all five conditions and reports every violation found.
pub fn is_complete(p: &Polynomial, j0: i64) -> CompletenessReport {
    let mut failures = Vec::new();
    let degree = p.degree();

    let integer_valued = p.is_integer_valued();
    if !integer_valued {
        failures.push("p is not integer-valued (a binomial-basis coefficient is not an integer)".to_string());
    }

    let positive_lead = match degree {
        None => {
            failures.push("p is the zero polynomial; degree must be at least 1".to_string());
            false
        }
        Some(0) => {
            failures.push("p is constant; degree must be at least 1".to_string());
            false
        }
        Some(_) => {
            use num_traits::Signed;
            if p.leading().map_or(false, Signed::is_positive) {
                true
            } else {
                failures.push(format!(
                    "leading coefficient {} is not positive",
                    p.leading().expect("degree is Some")
                ));
                false
            }
        }
    };

    let mut positivity_from = None;
    let mut strictly_increasing_from = None;
    if positive_lead {
        match p.positivity_cutoff(j0) {
            Ok(m) => {
                positivity_from = Some(m);
                if m > j0 {
                    let witness = p.eval_i64(m - 1);
                    failures.push(format!(
                        "p({}) = {} < 1; values are positive only from j = {}",
                        m - 1,
                        witness,
                        m
                    ));
                }
            }
            Err(e) => failures.push(format!("positivity check failed: {e}")),
        }
        let delta = p.shift(1).sub(p);
        match delta.positivity_cutoff(j0) {
            Ok(m) => {
                strictly_increasing_from = Some(m);
                if m > j0 {
                    failures.push(format!(
                        "p({}) >= p({}); values are strictly increasing only from j = {}",
                        m - 1,
                        m,
                        m
                    ));
                }
            }
            Err(e) => failures.push(format!("monotonicity check failed: {e}")),
        }
    }

    let mut gcd = None;
    if integer_valued && degree.is_some() {
        match value_gcd(p, j0) {
            Ok(g) => {
                if g != BigInt::from(1) {
                    failures.push(format!(
                        "value gcd = {g}, so only multiples of {g} are sums of values"
                    ));
                }
                gcd = Some(g);
            }
            Err(e) => failures.push(format!("gcd computation failed: {e}")),
        }
    }

    CompletenessReport {
        verdict: failures.is_empty(),
        degree,
        value_gcd: gcd,
        positivity_from,
        strictly_increasing_from,
        failures,
    }
}
