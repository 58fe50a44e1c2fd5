//! Finite fields F_q, q = p^k, with p an odd prime below 2^40.
//!
//! Elements are polynomials modulo a random monic irreducible of degree k
//! found by a seeded search (degree-by-degree factor scan, no factoring).
//! Arithmetic is schoolbook with u128 accumulation; exponents larger than a
//! word use big integers. Square roots are Tonelli-Shanks with a canonical
//! choice between the two roots: the lexicographically smaller coefficient
//! vector, constant term first.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use once_cell::sync::OnceCell;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_P: u64 = 1 << 40;
pub const MAX_K: u32 = 1 << 10;

/// An element of F_q: `k` coefficients, constant term first, reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElement {
    coeffs: Vec<u64>,
}

impl FqElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Lexicographic order on coefficient vectors, constant term first.
    pub fn lex_cmp(&self, other: &FqElement) -> std::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl std::fmt::Display for FqElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Polynomial helpers over F_p; vectors are coefficient lists, constant
/// term first, not necessarily trimmed.
mod poly {
    use crate::arith::{mulmod, powmod};

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn degree(v: &[u64]) -> Option<usize> {
        v.iter().rposition(|&c| c != 0)
    }

    /// Schoolbook product reduced by the monic `modulus` (degree k).
    pub fn mulmod_poly(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len() - 1;
        debug_assert_eq!(modulus[k], 1);
        if k == 0 {
            return vec![];
        }
        let mut acc = vec![0u128; 2 * k - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc[i + j] += ai as u128 * bj as u128;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = (acc[d] % p as u128) as u64;
            acc[d] = 0;
            if c != 0 {
                for j in 0..k {
                    if modulus[j] != 0 {
                        acc[d - k + j] += c as u128 * (p - modulus[j]) as u128;
                    }
                }
            }
        }
        (0..k).map(|j| (acc[j] % p as u128) as u64).collect()
    }

    /// Repeated squaring in the quotient ring.
    pub fn powmod_poly(base: &[u64], mut exp: u64, modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len() - 1;
        let mut result = vec![0u64; k];
        if k > 0 {
            result[0] = 1;
        }
        let mut sq = base.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                result = mulmod_poly(&result, &sq, modulus, p);
            }
            sq = mulmod_poly(&sq, &sq, modulus, p);
            exp >>= 1;
        }
        result
    }

    /// Division with remainder by a nonzero divisor.
    pub fn divmod(num: &[u64], den: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let dd = degree(den).expect("division by zero polynomial");
        let lead_inv = powmod(den[dd], p - 2, p);
        let mut rem = num.to_vec();
        trim(&mut rem);
        let mut quot = vec![0u64; rem.len().saturating_sub(dd)];
        while let Some(dr) = degree(&rem) {
            if dr < dd {
                break;
            }
            let factor = mulmod(rem[dr], lead_inv, p);
            let shift = dr - dd;
            quot[shift] = factor;
            for j in 0..=dd {
                let sub = mulmod(factor, den[j], p);
                let idx = shift + j;
                rem[idx] = (rem[idx] + p - sub) % p;
            }
            trim(&mut rem);
        }
        (quot, rem)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r0 = a.to_vec();
        let mut r1 = b.to_vec();
        trim(&mut r0);
        trim(&mut r1);
        while !r1.is_empty() {
            let (_, rem) = divmod(&r0, &r1, p);
            r0 = r1;
            r1 = rem;
            trim(&mut r1);
        }
        r0
    }
}

/// A field context: the characteristic, degree, modulus, and cached
/// 2-power structure of the multiplicative group.
#[derive(Debug)]
pub struct FqContext {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
    seed: u64,
    attempts: u32,
    s: u32,
    q_minus_1: BigUint,
    t_odd: BigUint,
    half: BigUint,
    sylow_gen: OnceCell<FqElement>,
}

impl FqContext {
    /// Build F_(p^k) with a seeded random monic irreducible modulus.
    /// Irreducibility by the degree scan: for d = 1..k/2, a factor of
    /// degree d exists iff gcd(X^(p^d) - X, g) is nonconstant.
    pub fn new(p: u64, k: u32, seed: u64) -> Result<FqContext> {
        if p < 3 || p > MAX_P || p % 2 == 0 || !crate::arith::is_prime_u64(p) {
            return Err(Error::BadCharacteristic { p });
        }
        if k == 0 || k > MAX_K {
            return Err(Error::BadFieldDegree { k, max: MAX_K });
        }
        let mut attempts = 0u32;
        let modulus: Vec<u64> = if k == 1 {
            vec![0, 1]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            loop {
                attempts += 1;
                let mut candidate: Vec<u64> = (0..k).map(|_| rng.next_u64() % p).collect();
                candidate.push(1);
                if Self::is_irreducible(&candidate, p, k) {
                    break candidate;
                }
            }
        };
        let q_minus_1 = BigUint::from(p).pow(k) - BigUint::one();
        let s = if k % 2 == 1 {
            (p - 1).trailing_zeros()
        } else {
            (p - 1).trailing_zeros() + (p + 1).trailing_zeros() + k.trailing_zeros() - 1
        };
        debug_assert_eq!(q_minus_1.trailing_zeros(), Some(s as u64));
        let t_odd = &q_minus_1 >> s;
        let half = &q_minus_1 >> 1;
        Ok(FqContext {
            p,
            k,
            modulus,
            seed,
            attempts,
            s,
            q_minus_1,
            t_odd,
            half,
            sylow_gen: OnceCell::new(),
        })
    }

    fn is_irreducible(candidate: &[u64], p: u64, k: u32) -> bool {
        let x = {
            let mut v = vec![0u64; k as usize];
            v[1] = 1;
            v
        };
        let mut t = x.clone();
        for _ in 1..=(k / 2) {
            t = poly::powmod_poly(&t, p, candidate, p);
            // t - X
            let mut diff = t.clone();
            diff[1] = (diff[1] + p - 1) % p;
            let g = poly::gcd(&diff, candidate, p);
            if poly::degree(&g).map_or(true, |d| d > 0) {
                return false;
            }
        }
        true
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        self.modulus.as_slice()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of modulus candidates tried (1 for the base field).
    pub fn attempts(&self) -> u32 {
        self.attempts.max(1)
    }

    /// 2-adic valuation of q - 1.
    pub fn two_adic_valuation(&self) -> u32 {
        self.s
    }

    pub fn zero(&self) -> FqElement {
        FqElement {
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FqElement {
        self.from_base(1)
    }

    /// Embed a base-field residue (reduced mod p).
    pub fn from_base(&self, value: u64) -> FqElement {
        let mut coeffs = vec![0; self.k as usize];
        coeffs[0] = value % self.p;
        FqElement { coeffs }
    }

    pub fn from_coeffs(&self, coeffs: Vec<u64>) -> Result<FqElement> {
        if coeffs.len() != self.k as usize {
            return Err(Error::BadCoefficientCount {
                got: coeffs.len(),
                expected: self.k as usize,
            });
        }
        for &c in &coeffs {
            if c >= self.p {
                return Err(Error::BadResidue { value: c, p: self.p });
            }
        }
        Ok(FqElement { coeffs })
    }

    pub fn add(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FqElement) -> FqElement {
        FqElement {
            coeffs: a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn mul(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement {
            coeffs: poly::mulmod_poly(&a.coeffs, &b.coeffs, &self.modulus, self.p),
        }
    }

    pub fn inv(&self, a: &FqElement) -> Result<FqElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid on (modulus, a)
        let p = self.p;
        let mut r0 = self.modulus.clone();
        let mut r1 = a.coeffs.clone();
        poly::trim(&mut r1);
        let mut t0: Vec<u64> = vec![];
        let mut t1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, rem) = poly::divmod(&r0, &r1, p);
            // t0 - q * t1
            let qt = poly_mul_plain(&q, &t1, p);
            let next_t = poly_sub_plain(&t0, &qt, p);
            r0 = r1;
            r1 = rem;
            poly::trim(&mut r1);
            t0 = t1;
            t1 = next_t;
        }
        let d = poly::degree(&r0).expect("gcd of nonzero element vanished");
        debug_assert_eq!(d, 0, "modulus is irreducible, gcd must be constant");
        let scale = crate::arith::powmod(r0[0], p - 2, p);
        let mut coeffs: Vec<u64> = t0.iter().map(|&c| crate::arith::mulmod(c, scale, p)).collect();
        coeffs.resize(self.k as usize, 0);
        let out = FqElement { coeffs };
        debug_assert_eq!(self.mul(&out, a), self.one());
        Ok(out)
    }

    pub fn pow_u64(&self, a: &FqElement, exp: u64) -> FqElement {
        FqElement {
            coeffs: poly::powmod_poly(&a.coeffs, exp, &self.modulus, self.p),
        }
    }

    pub fn pow_big(&self, a: &FqElement, exp: &BigUint) -> FqElement {
        let mut result = self.one();
        let bits = exp.bits();
        for i in (0..bits).rev() {
            result = self.mul(&result, &result);
            if exp.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    /// a^(2^j) by repeated squaring.
    fn pow_2exp(&self, a: &FqElement, j: u32) -> FqElement {
        let mut out = a.clone();
        for _ in 0..j {
            out = self.mul(&out, &out);
        }
        out
    }

    /// Euler criterion: 1 for nonzero squares, -1 for nonsquares, 0 at zero.
    pub fn euler_symbol(&self, a: &FqElement) -> i32 {
        if a.is_zero() {
            return 0;
        }
        let e = self.pow_big(a, &self.half);
        if e == self.one() {
            1
        } else {
            -1
        }
    }

    /// Generator of the 2-Sylow subgroup (order exactly 2^s), derived
    /// deterministically from the context seed.
    fn two_sylow_generator(&self) -> &FqElement {
        self.sylow_gen.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x51e5_70f1_a7b3_9d2c);
            loop {
                let coeffs: Vec<u64> = (0..self.k).map(|_| rng.next_u64() % self.p).collect();
                let u = FqElement { coeffs };
                if u.is_zero() {
                    continue;
                }
                let w = self.pow_big(&u, &self.t_odd);
                // w has order dividing 2^s; exact order 2^s iff the
                // (s-1)-fold square is -1, i.e. u is a nonsquare.
                if self.s >= 1 && self.pow_2exp(&w, self.s - 1) == self.neg(&self.one()) {
                    return w;
                }
            }
        })
    }

    /// Canonical square root: the lexicographically smaller of the two
    /// roots, or None for nonsquares.
    pub fn sqrt(&self, a: &FqElement) -> Option<FqElement> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if self.euler_symbol(a) != 1 {
            return None;
        }
        // Tonelli-Shanks
        let one = self.one();
        let mut c = self.two_sylow_generator().clone();
        let mut t = self.pow_big(a, &self.t_odd);
        let exp_r = (&self.t_odd + BigUint::one()) >> 1;
        let mut r = self.pow_big(a, &exp_r);
        let mut m = self.s;
        while t != one {
            let mut i = 0u32;
            let mut probe = t.clone();
            while probe != one {
                probe = self.mul(&probe, &probe);
                i += 1;
                debug_assert!(i < m, "order of t must divide 2^(m-1)");
            }
            let b = self.pow_2exp(&c, m - i - 1);
            let b2 = self.mul(&b, &b);
            r = self.mul(&r, &b);
            t = self.mul(&t, &b2);
            c = b2;
            m = i;
        }
        debug_assert_eq!(self.mul(&r, &r), *a);
        let neg_r = self.neg(&r);
        Some(if r.lex_cmp(&neg_r) == std::cmp::Ordering::Greater {
            neg_r
        } else {
            r
        })
    }

    /// The chain zeta_2, zeta_4, ..., zeta_(2^height): a random element is
    /// raised to (q-1)/2^s (retrying until the result has exact order 2^s),
    /// trimmed to order 2^height, then squared downward. zeta_2 is always -1
    /// and each entry is the square of the next.
    pub fn roots_of_unity_tower(&self, height: u32) -> Result<Vec<FqElement>> {
        if height == 0 || height > self.s {
            return Err(Error::TowerUnavailable {
                requested: height,
                available: self.s,
            });
        }
        let top = self.pow_2exp(self.two_sylow_generator(), self.s - height);
        let mut chain = vec![top];
        while (chain.len() as u32) < height {
            let last = chain.last().unwrap();
            chain.push(self.mul(last, last));
        }
        chain.reverse();
        debug_assert_eq!(chain[0], self.neg(&self.one()));
        Ok(chain)
    }

    pub fn q_minus_1(&self) -> &BigUint {
        &self.q_minus_1
    }
}

fn poly_mul_plain(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            acc[i + j] += ai as u128 * bj as u128;
        }
    }
    acc.iter().map(|&v| (v % p as u128) as u64).collect()
}

fn poly_sub_plain(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_field_modulus_is_x() {
        let ctx = FqContext::new(7, 1, 0).unwrap();
        assert_eq!(ctx.modulus(), &[0, 1]);
        assert_eq!(ctx.attempts(), 1);
        let three = ctx.from_base(3);
        let five = ctx.from_base(5);
        assert_eq!(ctx.mul(&three, &five), ctx.from_base(15 % 7));
        assert_eq!(ctx.add(&three, &five), ctx.from_base(1));
        assert_eq!(format!("{}", three), "3");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FqContext::new(4, 1, 0), Err(Error::BadCharacteristic { .. })));
        assert!(matches!(FqContext::new(2, 1, 0), Err(Error::BadCharacteristic { .. })));
        assert!(matches!(FqContext::new(7, 0, 0), Err(Error::BadFieldDegree { .. })));
        assert!(matches!(
            FqContext::new(7, MAX_K + 1, 0),
            Err(Error::BadFieldDegree { .. })
        ));
    }

    #[test]
    fn quadratic_modulus_has_no_roots_in_the_base_field() {
        // Irreducibility oracle for degree 2: a quadratic over F_p is
        // irreducible iff it has no root in F_p.
        for seed in 0..25u64 {
            let ctx = FqContext::new(5, 2, seed).unwrap();
            let m = ctx.modulus();
            assert_eq!(m.len(), 3);
            assert_eq!(m[2], 1);
            for x in 0..5u64 {
                let value = (m[0] + m[1] * x + x * x) % 5;
                assert_ne!(value, 0, "modulus has root {x} (seed {seed})");
            }
        }
    }

    #[test]
    fn modulus_search_density_is_about_one_in_k() {
        let k = 8u32;
        let mut total = 0u64;
        for seed in 0..100u64 {
            let ctx = FqContext::new(5, k, seed).unwrap();
            total += ctx.attempts() as u64;
        }
        let mean = total as f64 / 100.0;
        assert!(
            mean > k as f64 / 3.0 && mean < k as f64 * 3.0,
            "mean attempts {mean} outside factor-3 band around {k}"
        );
    }

    #[test]
    fn field_axioms_sampled() {
        let ctx = FqContext::new(13, 3, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut rand_el = || {
            let coeffs: Vec<u64> = (0..3).map(|_| rng.next_u64() % 13).collect();
            ctx.from_coeffs(coeffs).unwrap()
        };
        for _ in 0..200 {
            let a = rand_el();
            let b = rand_el();
            let c = rand_el();
            let ab_c = ctx.mul(&ctx.mul(&a, &b), &c);
            let a_bc = ctx.mul(&a, &ctx.mul(&b, &c));
            assert_eq!(ab_c, a_bc);
            let dist = ctx.mul(&a, &ctx.add(&b, &c));
            let expand = ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c));
            assert_eq!(dist, expand);
            if !a.is_zero() {
                let ainv = ctx.inv(&a).unwrap();
                assert_eq!(ctx.mul(&a, &ainv), ctx.one());
            }
        }
        assert!(ctx.inv(&ctx.zero()).is_err());
    }

    #[test]
    fn frobenius_is_additive_and_fixes_the_base() {
        let ctx = FqContext::new(11, 4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = ctx
                .from_coeffs((0..4).map(|_| rng.next_u64() % 11).collect())
                .unwrap();
            let b = ctx
                .from_coeffs((0..4).map(|_| rng.next_u64() % 11).collect())
                .unwrap();
            let fr = |x: &FqElement| ctx.pow_u64(x, 11);
            assert_eq!(fr(&ctx.add(&a, &b)), ctx.add(&fr(&a), &fr(&b)));
            assert_eq!(fr(&ctx.mul(&a, &b)), ctx.mul(&fr(&a), &fr(&b)));
        }
        for v in 0..11 {
            let e = ctx.from_base(v);
            assert_eq!(ctx.pow_u64(&e, 11), e);
        }
    }

    #[test]
    fn sqrt_canonical_values_in_small_prime_fields() {
        let f7 = FqContext::new(7, 1, 0).unwrap();
        let root = f7.sqrt(&f7.from_base(2)).unwrap();
        // 3^2 = 2 = 4^2 mod 7; canonical root is the smaller, 3
        assert_eq!(root, f7.from_base(3));
        assert_eq!(f7.sqrt(&f7.from_base(0)).unwrap(), f7.zero());
        assert!(f7.sqrt(&f7.from_base(3)).is_none()); // 3 is not a QR mod 7

        let f13 = FqContext::new(13, 1, 0).unwrap();
        for a in 1..13u64 {
            let expect_square = crate::arith::powmod(a, 6, 13) == 1;
            match f13.sqrt(&f13.from_base(a)) {
                Some(y) => {
                    assert!(expect_square);
                    assert_eq!(f13.mul(&y, &y), f13.from_base(a));
                    let neg = f13.neg(&y);
                    assert!(y.lex_cmp(&neg) != std::cmp::Ordering::Greater);
                }
                None => assert!(!expect_square),
            }
        }
    }

    #[test]
    fn sqrt_round_trip_across_extension_contexts() {
        let contexts = [
            FqContext::new(5, 4, 1).unwrap(),
            FqContext::new(97, 2, 2).unwrap(),
            FqContext::new(13, 8, 3).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0u32;
        for ctx in &contexts {
            for _ in 0..400 {
                let x = ctx
                    .from_coeffs((0..ctx.k()).map(|_| rng.next_u64() % ctx.p()).collect())
                    .unwrap();
                let square = ctx.mul(&x, &x);
                let root = ctx.sqrt(&square).expect("squares must have roots");
                assert!(root == x || root == ctx.neg(&x));
                // canonical choice is stable: recomputing gives the same root
                assert_eq!(ctx.sqrt(&square).unwrap(), root);
                checked += 1;
            }
        }
        assert_eq!(checked, 1200);
    }

    #[test]
    fn euler_symbol_matches_sqrt_existence() {
        let ctx = FqContext::new(17, 2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let x = ctx
                .from_coeffs((0..2).map(|_| rng.next_u64() % 17).collect())
                .unwrap();
            if x.is_zero() {
                continue;
            }
            let symbol = ctx.euler_symbol(&x);
            assert_eq!(symbol == 1, ctx.sqrt(&x).is_some());
        }
    }

    #[test]
    fn tower_bottom_is_minus_one_and_squares_chain() {
        let f13 = FqContext::new(13, 1, 0).unwrap();
        assert_eq!(f13.two_adic_valuation(), 2);
        let tower = f13.roots_of_unity_tower(2).unwrap();
        assert_eq!(tower.len(), 2);
        assert_eq!(tower[0], f13.from_base(12)); // zeta_2 = -1
        let z4 = tower[1].coeffs()[0];
        assert!(z4 == 5 || z4 == 8, "zeta_4 in F_13 must be 5 or 8, got {z4}");
        assert_eq!(f13.mul(&tower[1], &tower[1]), tower[0]);

        let single = f13.roots_of_unity_tower(1).unwrap();
        assert_eq!(single, vec![f13.from_base(12)]);

        assert!(matches!(
            f13.roots_of_unity_tower(3),
            Err(Error::TowerUnavailable { requested: 3, available: 2 })
        ));
    }

    #[test]
    fn tower_orders_are_exact() {
        let ctx = FqContext::new(7, 4, 2).unwrap();
        // v2(7^4 - 1) = v2(6) + v2(8) + v2(4) - 1 = 1 + 3 + 2 - 1 = 5
        assert_eq!(ctx.two_adic_valuation(), 5);
        let tower = ctx.roots_of_unity_tower(5).unwrap();
        for (idx, zeta) in tower.iter().enumerate() {
            let j = idx as u32 + 1;
            // order exactly 2^j: the (j-1)-fold square is -1
            assert_eq!(ctx.pow_2exp(zeta, j - 1), ctx.neg(&ctx.one()));
            if j > 1 {
                assert_eq!(ctx.mul(zeta, zeta), tower[idx - 1]);
            }
        }
    }

    #[test]
    fn contexts_are_deterministic_per_seed() {
        let a = FqContext::new(29, 6, 77).unwrap();
        let b = FqContext::new(29, 6, 77).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(
            a.roots_of_unity_tower(a.two_adic_valuation()).unwrap(),
            b.roots_of_unity_tower(b.two_adic_valuation()).unwrap()
        );
        let c = FqContext::new(29, 6, 78).unwrap();
        // different seed virtually always lands on a different modulus
        assert_ne!(a.modulus(), c.modulus());
    }

    #[test]
    fn display_lists_coefficients_constant_first() {
        let ctx = FqContext::new(5, 3, 4).unwrap();
        let e = ctx.from_coeffs(vec![2, 0, 4]).unwrap();
        assert_eq!(format!("{e}"), "2,0,4");
        assert!(ctx.from_coeffs(vec![1, 2]).is_err());
        assert!(ctx.from_coeffs(vec![9, 0, 0]).is_err());
    }
}
