//! Truncated 2-adic parity functionals on tree automorphisms.
//!
//! For period r, the weighted parity sum Q_r collects parities over the
//! constrained word sets W(r, i) (words of length ri - 1 whose symbol is `a`
//! at every position divisible by r), and the unit P_r at a node combines the
//! node's own parity with the Q_r values of its two children. On a finite
//! tree only the layers that fit are summed, which pins the unit down modulo
//! 2^e with e = floor((n-1-m)/r) + 1 at level m.

use crate::error::{Error, Result};
use crate::tree::{NodeAddress, Symbol, TreeAutomorphism};
use serde::{Deserialize, Serialize};

/// An odd residue known modulo 2^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedResidue {
    pub value: u64,
    #[serde(rename = "exp")]
    pub exponent: u32,
}

impl TruncatedResidue {
    pub fn modulus(&self) -> u64 {
        1u64 << self.exponent
    }

    /// Product, carried at the coarser of the two moduli.
    pub fn mul(&self, other: &TruncatedResidue) -> TruncatedResidue {
        let exponent = self.exponent.min(other.exponent);
        let mask = (1u64 << exponent) - 1;
        TruncatedResidue {
            value: self.value.wrapping_mul(other.value) & mask,
            exponent,
        }
    }

    pub fn congruent(&self, raw: u64) -> bool {
        raw & (self.modulus() - 1) == self.value
    }
}

impl std::fmt::Display for TruncatedResidue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod 2^{}", self.value, self.exponent)
    }
}

/// Number of determined binary digits of the unit at level m of a depth-n
/// tree: floor((n-1-m)/r) + 1.
pub fn e_bound(m: u32, n: u32, r: u32) -> Result<u32> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if m >= n {
        return Err(Error::LevelOutOfRange { level: m, limit: n - 1 });
    }
    Ok((n - 1 - m) / r + 1)
}

/// Words of W(r, i) as packed paths (length ri - 1, symbol j in bit j-1).
/// Positions divisible by r are pinned to `a`; the rest range freely.
pub fn constrained_words(r: u32, i: u32) -> Vec<u64> {
    assert!(r >= 1 && i >= 1, "word set needs r, i >= 1");
    let len = r * i - 1;
    let free: Vec<u32> = (1..=len).filter(|j| j % r != 0).collect();
    let mut words = Vec::with_capacity(1usize << free.len());
    for assign in 0..(1u64 << free.len()) {
        let mut path = 0u64;
        for (idx, &j) in free.iter().enumerate() {
            path |= ((assign >> idx) & 1) << (j - 1);
        }
        words.push(path);
    }
    words
}

/// Truncated weighted parity sum at x: sum over i >= 1 of
/// 2^i * sum_{w in W(r,i)} parity(x w), keeping the layers whose nodes fit
/// inside the tree (level(x) + ri - 1 <= depth - 1). Always even.
pub fn weighted_parity_sum(sigma: &TreeAutomorphism, x: NodeAddress, r: u32) -> Result<u64> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if x.level() > sigma.depth() {
        return Err(Error::LevelOutOfRange {
            level: x.level(),
            limit: sigma.depth(),
        });
    }
    let mut total = 0u64;
    let mut i = 1u32;
    while x.level() + r * i <= sigma.depth() {
        let mut layer = 0u64;
        for w in constrained_words(r, i) {
            let node = x.extend(w, r * i - 1)?;
            layer += sigma.parity(node)? as u64;
        }
        total += layer << i;
        i += 1;
    }
    Ok(total)
}

/// Truncated unit at x: (-1)^parity(x) + Q_r(x b) - Q_r(x a), reduced to the
/// odd residue modulo 2^e_bound(level(x), depth, r).
pub fn truncated_unit(
    sigma: &TreeAutomorphism,
    x: NodeAddress,
    r: u32,
) -> Result<TruncatedResidue> {
    let exponent = e_bound(x.level(), sigma.depth(), r)?;
    let sign: i64 = if sigma.parity(x)? { -1 } else { 1 };
    let qa = weighted_parity_sum(sigma, x.child(Symbol::A)?, r)? as i64;
    let qb = weighted_parity_sum(sigma, x.child(Symbol::B)?, r)? as i64;
    let raw = sign + qb - qa;
    let modulus = 1i64 << exponent;
    let value = raw.rem_euclid(modulus) as u64;
    debug_assert!(value % 2 == 1, "truncated unit must be odd");
    Ok(TruncatedResidue { value, exponent })
}

fn for_each_internal_node(depth: u32, mut f: impl FnMut(NodeAddress) -> Result<bool>) -> Result<bool> {
    for level in 0..depth {
        for path in 0..(1u64 << level) {
            if !f(NodeAddress::new(level, path)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Membership in the truncated parity-trivial subgroup: the unit is 1 at
/// every node, each at its own modulus.
pub fn in_unit_kernel(sigma: &TreeAutomorphism, r: u32) -> Result<bool> {
    for_each_internal_node(sigma.depth(), |x| Ok(truncated_unit(sigma, x, r)?.value == 1))
}

/// Membership in the truncated residue-consistent group: all node units
/// agree modulo the coarser of each pair of moduli. Because the root carries
/// the finest modulus, this is equivalent to every node agreeing with the
/// root at the node's own modulus; the pairwise form is what the tests
/// check against.
pub fn is_residue_consistent(sigma: &TreeAutomorphism, r: u32) -> Result<bool> {
    let root_unit = truncated_unit(sigma, NodeAddress::root(), r)?;
    for_each_internal_node(sigma.depth(), |x| {
        let unit = truncated_unit(sigma, x, r)?;
        Ok(root_unit.value & (unit.modulus() - 1) == unit.value)
    })
}

/// The root unit of a residue-consistent automorphism, the finest residue
/// the finite tree determines.
pub fn root_unit(sigma: &TreeAutomorphism, r: u32) -> Result<TruncatedResidue> {
    if !is_residue_consistent(sigma, r)? {
        return Err(Error::NotResidueConsistent);
    }
    truncated_unit(sigma, NodeAddress::root(), r)
}
