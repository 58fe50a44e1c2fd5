//! Square classes of rationals and multiplicative independence of
//! discriminant sequences attached to z^2 + c and a base point x0.
//!
//! A nonzero rational is a square times a unique signed squarefree integer;
//! that integer's sign and prime support identify the class in Q*/(Q*)^2.
//! Classes form a GF(2) vector space indexed by -1 and the primes, so
//! independence questions reduce to linear algebra with certificates: any
//! dependency is a subset whose product is a rational square.

use crate::arith::{is_prime_biguint, is_square_biguint, SMALL_PRIMES};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The signed squarefree representative of a nonzero rational modulo
/// squares: a sign and a set of distinct primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareClass {
    negative: bool,
    primes: BTreeSet<BigUint>,
}

impl SquareClass {
    pub fn negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &BTreeSet<BigUint> {
        &self.primes
    }

    /// True for the class of 1, i.e. the rational was a square.
    pub fn is_trivial(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    /// The signed squarefree integer representing the class.
    pub fn representative(&self) -> BigInt {
        let mut m = BigUint::one();
        for p in &self.primes {
            m *= p;
        }
        let sign = if self.negative { Sign::Minus } else { Sign::Plus };
        BigInt::from_biguint(sign, m)
    }

    /// The product class, multiplying representatives and cancelling
    /// squares: signs add mod 2, prime supports take symmetric difference.
    pub fn product(&self, other: &SquareClass) -> SquareClass {
        SquareClass {
            negative: self.negative ^ other.negative,
            primes: self
                .primes
                .symmetric_difference(&other.primes)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.representative().to_string())
    }
}

/// Odd-exponent prime support of a positive integer: trial division over
/// the primes below 10^6, then the cofactor must be 1, a perfect square,
/// or a (probable) prime; anything else cannot be classified.
fn squarefree_support(mut m: BigUint) -> Result<BTreeSet<BigUint>> {
    let mut out = BTreeSet::new();
    let one = BigUint::one();
    for &p in SMALL_PRIMES.iter() {
        if m == one {
            return Ok(out);
        }
        let pb = BigUint::from(p);
        let mut odd = false;
        loop {
            let (q, rem) = num_integer::Integer::div_rem(&m, &pb);
            if !rem.is_zero() {
                break;
            }
            m = q;
            odd = !odd;
        }
        if odd {
            out.insert(pb);
        }
    }
    if m == one || is_square_biguint(&m) {
        return Ok(out);
    }
    if is_prime_biguint(&m) {
        out.insert(m);
        return Ok(out);
    }
    Err(Error::UnfactoredCofactor {
        cofactor: m.to_string(),
    })
}

/// The square class of a nonzero rational; a/b and ab are congruent modulo
/// squares, so the support comes from numerator times denominator.
pub fn square_class(x: &BigRational) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::ZeroSquareClass);
    }
    let negative = x.numer().sign() == Sign::Minus;
    let magnitude = x.numer().magnitude() * x.denom().magnitude();
    Ok(SquareClass {
        negative,
        primes: squarefree_support(magnitude)?,
    })
}

/// True when x is the square of a rational. Zero counts as a square.
pub fn is_rational_square(x: &BigRational) -> bool {
    if x.is_zero() {
        return true;
    }
    if x.is_negative() {
        return false;
    }
    is_square_biguint(x.numer().magnitude()) && is_square_biguint(x.denom().magnitude())
}

/// The discriminant-bearing differences D_1 = x0 - f(0) adjusted to
/// x0 - c, then D_i = f^i(0) - x0 for i >= 2. A zero entry means x0 meets
/// the critical orbit and the sequence is rejected.
pub fn disc_sequence(c: &BigRational, x0: &BigRational, count: u32) -> Result<Vec<BigRational>> {
    let mut out = Vec::with_capacity(count as usize);
    let mut forward = BigRational::zero();
    for i in 1..=count {
        forward = &forward * &forward + c;
        let d = if i == 1 { x0 - c } else { &forward - x0 };
        if d.is_zero() {
            return Err(Error::VanishingDiscriminant { index: i as usize });
        }
        out.push(d);
    }
    Ok(out)
}

/// Outcome of an independence check in Q*/(Q*)^2: the rank of the spanned
/// subspace, and for every kernel basis vector the index set of a subset
/// whose product is a rational square.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub condition: bool,
    pub rank: usize,
    pub dependencies: Vec<Vec<usize>>,
    pub labels: Vec<String>,
}

/// Column key of the GF(2) class space: None is the sign -1, Some(p) a prime.
type ColKey = Option<BigUint>;

fn class_vector(class: &SquareClass) -> BTreeSet<ColKey> {
    let mut v: BTreeSet<ColKey> = class.primes.iter().cloned().map(Some).collect();
    if class.negative {
        v.insert(None);
    }
    v
}

/// Gaussian elimination over GF(2) on sparse class vectors, tracking which
/// input rows combine into each reduced row so that vanishing combinations
/// come out as explicit dependency certificates.
pub fn independence_verdict(labeled: &[(String, SquareClass)]) -> ConditionVerdict {
    assert!(labeled.len() <= 64, "independence checks are capped at 64 classes");
    let mut pivots: BTreeMap<ColKey, (BTreeSet<ColKey>, u64)> = BTreeMap::new();
    let mut dependencies = Vec::new();
    for (i, (_, class)) in labeled.iter().enumerate() {
        let mut row = class_vector(class);
        let mut combo = 1u64 << i;
        loop {
            let Some(col) = row.iter().next_back().cloned() else {
                // vanished: the tracked combination multiplies to a square
                let subset: Vec<usize> =
                    (0..labeled.len()).filter(|j| combo >> j & 1 == 1).collect();
                dependencies.push(subset);
                break;
            };
            match pivots.get(&col) {
                Some((prow, pcombo)) => {
                    row = row.symmetric_difference(prow).cloned().collect();
                    combo ^= pcombo;
                }
                None => {
                    pivots.insert(col, (row, combo));
                    break;
                }
            }
        }
    }
    ConditionVerdict {
        condition: dependencies.is_empty(),
        rank: pivots.len(),
        dependencies,
        labels: labeled.iter().map(|(l, _)| l.clone()).collect(),
    }
}

/// The exact period of the critical orbit of z^2 + c over Q, when finite:
/// only c = 0 (period 1) and c = -1 (period 2) occur.
pub fn rational_pcf_period(c: &BigRational) -> Option<u32> {
    if c.is_zero() {
        Some(1)
    } else if *c == -BigRational::one() {
        Some(2)
    } else {
        None
    }
}

/// Independence of [-1, 2, D_1, ..., D_r] for a rational parameter whose
/// critical orbit has exact period r.
pub fn check_condition_one(
    c: &BigRational,
    x0: &BigRational,
    r: u32,
) -> Result<ConditionVerdict> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if r > 2 {
        return Err(Error::UnsupportedRationalPeriod { r });
    }
    if rational_pcf_period(c) != Some(r) {
        return Err(Error::RationalPeriodMismatch {
            c: c.to_string(),
            r,
        });
    }
    let mut labeled = vec![
        ("-1".to_string(), square_class(&-BigRational::one())?),
        ("2".to_string(), square_class(&BigRational::from_integer(2.into()))?),
    ];
    for (i, d) in disc_sequence(c, x0, r)?.iter().enumerate() {
        labeled.push((format!("D{}", i + 1), square_class(d)?));
    }
    Ok(independence_verdict(&labeled))
}

/// Independence of [D_1, ..., D_n] alone; meaningful for any rational c
/// with x0 off the critical orbit through level n.
pub fn check_aut_tn(c: &BigRational, x0: &BigRational, n: u32) -> Result<ConditionVerdict> {
    if n == 0 || n > 64 - 2 {
        return Err(Error::DepthOutOfRange { depth: n, max: 62 });
    }
    let mut labeled = Vec::with_capacity(n as usize);
    for (i, d) in disc_sequence(c, x0, n)?.iter().enumerate() {
        labeled.push((format!("D{}", i + 1), square_class(d)?));
    }
    Ok(independence_verdict(&labeled))
}
