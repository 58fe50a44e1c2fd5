//! Preimage trees of z^2 + c over finite fields, canonical labelings whose
//! nested product ratios hit 2-power roots of unity, and the Frobenius
//! automorphism with its cyclotomic residue.
//!
//! The tree of depth n under a base point x0 has the solutions of
//! f^m(z) = x0 at level m; children of a node y are the two square roots of
//! y - c, so sibling values are negatives of one another. The splitting
//! field is found by doubling the extension degree and rebuilding until
//! every required square root exists.

use crate::error::{Error, Result};
use crate::fq::{FqContext, FqElement};
use crate::parity::{self, constrained_words, e_bound, TruncatedResidue};
use crate::tree::{NodeAddress, Symbol, TreeAutomorphism};
use serde::Serialize;
use std::collections::HashMap;

/// A prime p and a residue c whose orbit 0 -> c -> c^2 + c -> ... returns
/// to 0 after exactly r steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcfParameter {
    p: u64,
    c: u64,
    r: u32,
}

pub const FIND_MAX_P: u64 = 1 << 24;
pub const FIND_MAX_R: u32 = 8;

impl PcfParameter {
    pub fn new(p: u64, c: u64, r: u32) -> Result<PcfParameter> {
        if p < 3 || p % 2 == 0 || !crate::arith::is_prime_u64(p) || p > crate::fq::MAX_P {
            return Err(Error::BadCharacteristic { p });
        }
        if r == 0 {
            return Err(Error::ZeroPeriod);
        }
        if c >= p {
            return Err(Error::BadResidue { value: c, p });
        }
        if exact_period(p, c, r) != Some(r) {
            return Err(Error::NotPostCriticallyPeriodic { p, c, r });
        }
        Ok(PcfParameter { p, c, r })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn step(&self, z: u64) -> u64 {
        (crate::arith::mulmod(z, z, self.p) + self.c) % self.p
    }

    /// The critical orbit [0, f(0), ..., f^(r-1)(0)]; exactly r distinct
    /// values by minimality of the period.
    pub fn orbit(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.r as usize);
        let mut z = 0u64;
        for _ in 0..self.r {
            out.push(z);
            z = self.step(z);
        }
        out
    }

    /// f^m(0) mod p.
    pub fn forward_value(&self, m: u32) -> u64 {
        let mut z = 0u64;
        for _ in 0..m {
            z = self.step(z);
        }
        z
    }
}

fn exact_period(p: u64, c: u64, r: u32) -> Option<u32> {
    let mut z = 0u64;
    for j in 1..=r {
        z = (crate::arith::mulmod(z, z, p) + c) % p;
        if z == 0 {
            return Some(j);
        }
    }
    None
}

/// All residues c mod p whose critical orbit has exact period r, by full
/// scan. Bounded search: p <= 2^24, r <= 8.
pub fn find_pcf_parameters(p: u64, r: u32) -> Result<Vec<u64>> {
    if p < 3 || p % 2 == 0 || !crate::arith::is_prime_u64(p) {
        return Err(Error::BadCharacteristic { p });
    }
    if p > FIND_MAX_P {
        return Err(Error::SearchModulusTooLarge { p, max: FIND_MAX_P });
    }
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if r > FIND_MAX_R {
        return Err(Error::PeriodTooLarge { r, max: FIND_MAX_R });
    }
    Ok((0..p).filter(|&c| exact_period(p, c, r) == Some(r)).collect())
}

/// Smallest residue outside the critical orbit, usable as a base point.
pub fn smallest_base_point(param: &PcfParameter) -> Option<u64> {
    let orbit = param.orbit();
    (0..param.p()).find(|x0| !orbit.contains(x0))
}

/// The preimage tree of x0 of given depth, with values in F_(p^k) for the
/// smallest power-of-two k that splits every level, and the root-of-unity
/// chain the canonical labeling targets.
#[derive(Debug)]
pub struct LabeledPreimageTree {
    param: PcfParameter,
    x0: u64,
    depth: u32,
    ctx: FqContext,
    values: Vec<FqElement>,
    tower: Vec<FqElement>,
    restarts: u32,
}

fn mix_seed(seed: u64, k: u32) -> u64 {
    // splitmix-style scramble so each extension degree draws its own stream
    let mut z = seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn build_preimage_tree(
    param: &PcfParameter,
    x0: u64,
    depth: u32,
    seed: u64,
) -> Result<LabeledPreimageTree> {
    if depth == 0 || depth > crate::tree::MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth,
            max: crate::tree::MAX_DEPTH,
        });
    }
    if x0 >= param.p() {
        return Err(Error::BadResidue {
            value: x0,
            p: param.p(),
        });
    }
    if param.orbit().contains(&x0) {
        return Err(Error::BasePointInCriticalOrbit { x0 });
    }

    let mut k = 1u32;
    let mut restarts = 0u32;
    'rebuild: loop {
        let ctx = FqContext::new(param.p(), k, mix_seed(seed, k))?;
        let c_embedded = ctx.from_base(param.c());
        let total = (1usize << (depth + 1)) - 1;
        let mut values: Vec<FqElement> = Vec::with_capacity(total);
        values.push(ctx.from_base(x0));
        for level in 1..=depth {
            let parent_base = (1usize << (level - 1)) - 1;
            for parent_path in 0..(1usize << (level - 1)) {
                let parent = values[parent_base + parent_path].clone();
                let d = ctx.sub(&parent, &c_embedded);
                if d.is_zero() {
                    return Err(Error::Integrity(format!(
                        "critical value f(0) appeared at level {} of the tree",
                        level - 1
                    )));
                }
                match ctx.sqrt(&d) {
                    Some(root) => {
                        values.push(root.clone());
                        values.push(ctx.neg(&root));
                    }
                    None => {
                        if k >= crate::fq::MAX_K {
                            return Err(Error::SplittingFieldTooLarge {
                                max: crate::fq::MAX_K,
                            });
                        }
                        k *= 2;
                        restarts += 1;
                        continue 'rebuild;
                    }
                }
            }
            // children interleave as (a, b) pairs in push order; reorder to
            // flat path order: child paths of parent q are q and q + 2^(level-1)
            let level_base = (1usize << level) - 1;
            let half = 1usize << (level - 1);
            let mut reordered = vec![ctx.zero(); 1 << level];
            for q in 0..half {
                reordered[q] = values[level_base + 2 * q].clone();
                reordered[q + half] = values[level_base + 2 * q + 1].clone();
            }
            values.truncate(level_base);
            values.extend(reordered);
        }

        // all values at one level must be pairwise distinct
        for level in 0..=depth {
            let base = (1usize << level) - 1;
            let mut seen: HashMap<&[u64], ()> = HashMap::new();
            for path in 0..(1usize << level) {
                if seen.insert(values[base + path].coeffs(), ()).is_some() {
                    return Err(Error::Integrity(format!(
                        "duplicate value at level {level}"
                    )));
                }
            }
        }

        let height = e_bound(0, depth, param.r())?;
        let tower = ctx.roots_of_unity_tower(height).map_err(|e| {
            Error::Integrity(format!(
                "root-of-unity chain of height {height} must exist in the splitting field: {e}"
            ))
        })?;

        return Ok(LabeledPreimageTree {
            param: *param,
            x0,
            depth,
            ctx,
            values,
            tower,
            restarts,
        });
    }
}

impl LabeledPreimageTree {
    pub fn param(&self) -> &PcfParameter {
        &self.param
    }

    pub fn x0(&self) -> u64 {
        self.x0
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn ctx(&self) -> &FqContext {
        &self.ctx
    }

    pub fn restarts(&self) -> u32 {
        self.restarts
    }

    /// zeta_2, zeta_4, ..., one entry per height up to e_bound(0, depth, r).
    pub fn tower(&self) -> &[FqElement] {
        &self.tower
    }

    pub fn value(&self, node: NodeAddress) -> Result<&FqElement> {
        if node.level() > self.depth {
            return Err(Error::LevelOutOfRange {
                level: node.level(),
                limit: self.depth,
            });
        }
        Ok(&self.values[node.flat() as usize])
    }

    /// Exchange the labels a and b below `parent`: the two child subtrees
    /// swap wholesale, so the tree stays a valid preimage tree while the
    /// labeling changes. Canonicalization uses this to fix wrong-sign
    /// ratios; it also serves as the mutation hook for negative controls.
    pub fn swap_subtrees(&mut self, parent: NodeAddress) -> Result<()> {
        let pl = parent.level();
        if pl + 1 > self.depth {
            return Err(Error::LevelOutOfRange {
                level: pl + 1,
                limit: self.depth,
            });
        }
        for level in (pl + 1)..=self.depth {
            let base = (1u64 << level) - 1;
            for tail in 0..(1u64 << (level - pl - 1)) {
                let path_a = parent.path() | (tail << (pl + 1));
                let path_b = path_a | (1u64 << pl);
                self.values
                    .swap((base + path_a) as usize, (base + path_b) as usize);
            }
        }
        Ok(())
    }

    fn product_over_words(&self, anchor: NodeAddress, i: u32) -> Result<FqElement> {
        let r = self.param.r();
        let mut acc = self.ctx.one();
        for w in constrained_words(r, i) {
            let node = anchor.extend(w, r * i - 1)?.child(Symbol::A)?;
            acc = self.ctx.mul(&acc, self.value(node)?);
        }
        Ok(acc)
    }

    /// The ratio prod_w [x a w a] / prod_w [x b w a] for w in W(r, i).
    fn layer_ratio(&self, x: NodeAddress, i: u32) -> Result<FqElement> {
        let num = self.product_over_words(x.child(Symbol::A)?, i)?;
        let den = self.product_over_words(x.child(Symbol::B)?, i)?;
        Ok(self.ctx.mul(&num, &self.ctx.inv(&den)?))
    }

    /// Relabel so every admissible layer ratio equals the target root of
    /// unity. Levels are processed upward; within a level the layer index i
    /// runs downward, and a wrong-sign ratio is fixed by swapping the
    /// sibling pair x b a^(ri-1) {a,b}, which later (smaller-i) passes
    /// never revisit.
    pub fn canonicalize_labels(&mut self) -> Result<()> {
        let r = self.param.r();
        for new_level in (r + 1)..=self.depth {
            let i_max = (new_level - 1) / r;
            for i in (1..=i_max).rev() {
                let xl = new_level - (r * i + 1);
                for xpath in 0..(1u64 << xl) {
                    let x = NodeAddress::new(xl, xpath)?;
                    let gamma = self.layer_ratio(x, i)?;
                    let target = &self.tower[i as usize];
                    if gamma == *target {
                        continue;
                    }
                    if gamma == self.ctx.neg(target) {
                        let pivot = x
                            .child(Symbol::B)?
                            .extend(0, r * i - 1)?; // b then a^(ri-1)
                        self.swap_subtrees(pivot)?;
                        continue;
                    }
                    return Err(Error::Integrity(format!(
                        "layer ratio at node '{}', layer {i} is not plus or minus the target root",
                        x.word()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Check every admissible layer ratio against its target root.
    pub fn verify_ratio_identity(&self) -> Result<RatioReport> {
        let r = self.param.r();
        let mut checked = 0u64;
        let mut failures = Vec::new();
        for xl in 0..self.depth {
            let mut i = 1u32;
            while xl + r * i + 1 <= self.depth {
                for xpath in 0..(1u64 << xl) {
                    let x = NodeAddress::new(xl, xpath)?;
                    let gamma = self.layer_ratio(x, i)?;
                    checked += 1;
                    if gamma != self.tower[i as usize] {
                        failures.push(RatioCheck {
                            node: x.word(),
                            layer: i,
                            ratio: gamma.to_string(),
                            target: self.tower[i as usize].to_string(),
                        });
                    }
                }
                i += 1;
            }
        }
        Ok(RatioReport {
            checked,
            failures,
        })
    }

    /// The nested half-product chain gamma_1, gamma_2, ...: gamma_1 is
    /// [a]/[b] = -1 and gamma_j for j >= 2 is the (x = root, i = j-1) layer
    /// ratio. Verifies gamma_j^2 = gamma_(j-1), exact order 2^j, and
    /// agreement with the stored tower.
    pub fn verify_unity_chain(&self) -> Result<UnityChainReport> {
        let r = self.param.r();
        let height = e_bound(0, self.depth, r)?;
        let mut gammas = Vec::with_capacity(height as usize);
        let a = self.value(NodeAddress::from_word("a")?)?;
        let b = self.value(NodeAddress::from_word("b")?)?;
        gammas.push(self.ctx.mul(a, &self.ctx.inv(b)?));
        for j in 2..=height {
            gammas.push(self.layer_ratio(NodeAddress::root(), j - 1)?);
        }
        let minus_one = self.ctx.neg(&self.ctx.one());
        let mut ok = gammas[0] == minus_one;
        for j in 2..=height as usize {
            let sq = self.ctx.mul(&gammas[j - 1], &gammas[j - 1]);
            ok &= sq == gammas[j - 2];
        }
        for (idx, gamma) in gammas.iter().enumerate() {
            // exact order 2^(idx+1): idx-fold squaring lands on -1
            let mut probe = gamma.clone();
            for _ in 0..idx {
                probe = self.ctx.mul(&probe, &probe);
            }
            ok &= probe == minus_one;
            ok &= *gamma == self.tower[idx];
        }
        Ok(UnityChainReport {
            height,
            gammas: gammas.iter().map(|g| g.to_string()).collect(),
            ok,
        })
    }

    /// Squared products of one preimage per sign pair: for every node y and
    /// every 1 <= m <= depth - level(y), the product of values y w a over
    /// free words w of length m-1, squared, must equal y - f(0) when m = 1
    /// and f^m(0) - y otherwise.
    pub fn verify_preimage_products(&self) -> Result<ProductReport> {
        let mut checked = 0u64;
        let mut failures = Vec::new();
        for yl in 0..self.depth {
            for ypath in 0..(1u64 << yl) {
                let y = NodeAddress::new(yl, ypath)?;
                let yval = self.value(y)?.clone();
                for m in 1..=(self.depth - yl) {
                    let mut acc = self.ctx.one();
                    for w in 0..(1u64 << (m - 1)) {
                        let node = y.extend(w, m - 1)?.child(Symbol::A)?;
                        acc = self.ctx.mul(&acc, self.value(node)?);
                    }
                    let squared = self.ctx.mul(&acc, &acc);
                    let target = if m == 1 {
                        self.ctx
                            .sub(&yval, &self.ctx.from_base(self.param.forward_value(1)))
                    } else {
                        self.ctx
                            .sub(&self.ctx.from_base(self.param.forward_value(m)), &yval)
                    };
                    checked += 1;
                    if squared != target {
                        failures.push(ProductCheck {
                            node: y.word(),
                            m,
                            squared: squared.to_string(),
                            target: target.to_string(),
                        });
                    }
                }
            }
        }
        Ok(ProductReport { checked, failures })
    }

    /// The automorphism induced by v -> v^p on values: parity at x is 0
    /// exactly when value(sigma(x) a) = value(x a)^p.
    pub fn frobenius_automorphism(&self) -> Result<TreeAutomorphism> {
        let p = self.param.p();
        let mut sigma = TreeAutomorphism::identity(self.depth)?;
        let mut images: Vec<u64> = vec![0];
        // x0 is a base-field residue, fixed by Frobenius
        let root_pow = self.ctx.pow_u64(self.value(NodeAddress::root())?, p);
        if root_pow != *self.value(NodeAddress::root())? {
            return Err(Error::Integrity("Frobenius moved the base point".into()));
        }
        for level in 1..=self.depth {
            let base = (1u64 << level) - 1;
            let mut lookup: HashMap<&[u64], u64> = HashMap::new();
            for path in 0..(1u64 << level) {
                lookup.insert(self.values[(base + path) as usize].coeffs(), path);
            }
            let mut next_images = vec![0u64; 1 << level];
            for path in 0..(1u64 << level) {
                let vp = self.ctx.pow_u64(&self.values[(base + path) as usize], p);
                let image_path = *lookup.get(vp.coeffs()).ok_or_else(|| {
                    Error::Integrity(format!(
                        "Frobenius image of a level-{level} value is not a level-{level} value"
                    ))
                })?;
                // tree structure: the image's parent must be the parent's image
                let parent_mask = (1u64 << (level - 1)) - 1;
                if image_path & parent_mask != images[(path & parent_mask) as usize] {
                    return Err(Error::Integrity(
                        "Frobenius does not respect tree edges".into(),
                    ));
                }
                next_images[path as usize] = image_path;
            }
            // parity bits of the previous level from child images
            for parent_path in 0..(1u64 << (level - 1)) {
                let child_a = parent_path; // a-child path at this level
                let bit = (next_images[child_a as usize] >> (level - 1)) & 1;
                sigma.set_parity(
                    NodeAddress::new(level - 1, parent_path)?,
                    bit == 1,
                )?;
            }
            images = next_images;
        }
        Ok(sigma)
    }

    /// Node-by-node check that an automorphism's truncated units all equal
    /// p at each node's own modulus, plus residue consistency. For the
    /// Frobenius automorphism this is the cyclotomic action on the tower.
    pub fn verify_cyclotomic_action(&self, sigma: &TreeAutomorphism) -> Result<CyclotomicReport> {
        if sigma.depth() != self.depth {
            return Err(Error::DepthMismatch {
                left: sigma.depth(),
                right: self.depth,
            });
        }
        let r = self.param.r();
        let p = self.param.p();
        let residue_consistent = parity::is_residue_consistent(sigma, r)?;
        let mut checked = 0u64;
        let mut mismatches = Vec::new();
        let mut root = TruncatedResidue { value: 1, exponent: 1 };
        for level in 0..self.depth {
            for path in 0..(1u64 << level) {
                let x = NodeAddress::new(level, path)?;
                let unit = parity::truncated_unit(sigma, x, r)?;
                if x == NodeAddress::root() {
                    root = unit;
                }
                checked += 1;
                if !unit.congruent(p) {
                    mismatches.push(CyclotomicMismatch {
                        node: x.word(),
                        unit,
                        expected: p & (unit.modulus() - 1),
                    });
                }
            }
        }
        Ok(CyclotomicReport {
            residue_consistent,
            checked,
            mismatches,
            root_unit: root,
            expected_root: p & (root.modulus() - 1),
        })
    }

    /// Serializable snapshot: nodes keyed by their {a,b}-word, values as
    /// coefficient lists, plus the modulus and tower.
    pub fn document(&self) -> TreeDocument {
        let mut nodes = std::collections::BTreeMap::new();
        for level in 0..=self.depth {
            for path in 0..(1u64 << level) {
                let node = NodeAddress::new(level, path).unwrap();
                nodes.insert(node.word(), self.values[node.flat() as usize].coeffs().to_vec());
            }
        }
        TreeDocument {
            p: self.param.p(),
            c: self.param.c(),
            r: self.param.r(),
            x0: self.x0,
            depth: self.depth,
            field_degree: self.ctx.k(),
            modulus: self.ctx.modulus().to_vec(),
            tower: self.tower.iter().map(|z| z.coeffs().to_vec()).collect(),
            nodes,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioCheck {
    pub node: String,
    pub layer: u32,
    pub ratio: String,
    pub target: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub checked: u64,
    pub failures: Vec<RatioCheck>,
}

impl RatioReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnityChainReport {
    pub height: u32,
    pub gammas: Vec<String>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductCheck {
    pub node: String,
    pub m: u32,
    pub squared: String,
    pub target: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub checked: u64,
    pub failures: Vec<ProductCheck>,
}

impl ProductReport {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclotomicMismatch {
    pub node: String,
    pub unit: TruncatedResidue,
    pub expected: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclotomicReport {
    pub residue_consistent: bool,
    pub checked: u64,
    pub mismatches: Vec<CyclotomicMismatch>,
    pub root_unit: TruncatedResidue,
    pub expected_root: u64,
}

impl CyclotomicReport {
    pub fn all_ok(&self) -> bool {
        self.residue_consistent && self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeDocument {
    pub p: u64,
    pub c: u64,
    pub r: u32,
    pub x0: u64,
    pub depth: u32,
    pub field_degree: u32,
    pub modulus: Vec<u64>,
    pub tower: Vec<Vec<u64>>,
    pub nodes: std::collections::BTreeMap<String, Vec<u64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcf_search_examples() {
        assert_eq!(find_pcf_parameters(7, 2).unwrap(), vec![6]);
        for p in [3u64, 5, 7, 11, 13] {
            assert_eq!(find_pcf_parameters(p, 1).unwrap(), vec![0]);
        }
        // period 3 mod 11: the only root of c^3 + 2c^2 + c + 1
        let found = find_pcf_parameters(11, 3).unwrap();
        assert_eq!(found, vec![8]);
        for &c in &found {
            let poly = (c * c % 11 * c + 2 * c * c + c + 1) % 11;
            assert_eq!(poly, 0, "found parameter must satisfy the period-3 polynomial");
        }
        // oracle the other way: every root of the cubic with period != 1 is found
        for c in 0..11u64 {
            let cubic = (c * c % 11 * c + 2 * c * c + c + 1) % 11;
            if cubic == 0 && c != 0 {
                assert!(found.contains(&c));
            }
        }
    }

    #[test]
    fn pcf_search_caps() {
        assert!(matches!(
            find_pcf_parameters((1 << 24) + 43, 2),
            Err(Error::SearchModulusTooLarge { .. })
        ));
        assert!(matches!(
            find_pcf_parameters(7, 9),
            Err(Error::PeriodTooLarge { .. })
        ));
        assert!(find_pcf_parameters(9, 2).is_err());
    }

    #[test]
    fn parameter_validation() {
        let basilica = PcfParameter::new(7, 6, 2).unwrap();
        assert_eq!(basilica.orbit(), vec![0, 6]);
        assert_eq!(basilica.forward_value(2), 0);
        assert!(PcfParameter::new(7, 6, 1).is_err()); // wrong period
        assert!(PcfParameter::new(7, 0, 2).is_err()); // period is 1
        assert!(PcfParameter::new(7, 7, 2).is_err()); // not a residue
        assert!(PcfParameter::new(8, 1, 2).is_err()); // not prime

        assert_eq!(smallest_base_point(&basilica), Some(1));
        let squaring = PcfParameter::new(5, 0, 1).unwrap();
        assert_eq!(smallest_base_point(&squaring), Some(1));
    }

    #[test]
    fn base_point_must_avoid_the_orbit() {
        let param = PcfParameter::new(7, 6, 2).unwrap();
        assert!(matches!(
            build_preimage_tree(&param, 0, 2, 1),
            Err(Error::BasePointInCriticalOrbit { x0: 0 })
        ));
        assert!(matches!(
            build_preimage_tree(&param, 6, 2, 1),
            Err(Error::BasePointInCriticalOrbit { x0: 6 })
        ));
        assert!(build_preimage_tree(&param, 9, 2, 1).is_err()); // not a residue
    }

    #[test]
    fn depth_one_tree_is_a_sign_pair() {
        let param = PcfParameter::new(7, 6, 2).unwrap();
        let tree = build_preimage_tree(&param, 1, 1, 5).unwrap();
        let a = tree.value(NodeAddress::from_word("a").unwrap()).unwrap().clone();
        let b = tree.value(NodeAddress::from_word("b").unwrap()).unwrap().clone();
        let ctx = tree.ctx();
        assert_eq!(b, ctx.neg(&a));
        // a^2 + c = x0
        let back = ctx.add(&ctx.mul(&a, &a), &ctx.from_base(6));
        assert_eq!(back, ctx.from_base(1));
        // canonical choice: a-child is the lex-smaller root
        assert!(a.lex_cmp(&b) != std::cmp::Ordering::Greater);
    }

    #[test]
    fn every_edge_satisfies_the_defining_equation() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let tree = build_preimage_tree(&param, 2, 4, 3).unwrap();
        let ctx = tree.ctx();
        let c = ctx.from_base(4);
        for level in 1..=4u32 {
            for path in 0..(1u64 << level) {
                let node = NodeAddress::new(level, path).unwrap();
                let v = tree.value(node).unwrap();
                let parent = tree.value(node.parent().unwrap()).unwrap();
                assert_eq!(ctx.add(&ctx.mul(v, v), &c), *parent);
            }
        }
    }

    #[test]
    fn canonical_labels_satisfy_every_ratio() {
        let configs = [
            (5u64, 4u64, 2u32, 2u64, 5u32),
            (7, 6, 2, 1, 4),
            (5, 0, 1, 2, 4),
            (11, 8, 3, 1, 5),
        ];
        for (p, c, r, x0, depth) in configs {
            let param = PcfParameter::new(p, c, r).unwrap();
            let mut tree = build_preimage_tree(&param, x0, depth, 9).unwrap();
            tree.canonicalize_labels().unwrap();
            let report = tree.verify_ratio_identity().unwrap();
            assert!(
                report.all_ok(),
                "ratio failures at p={p} c={c} r={r}: {:?}",
                report.failures
            );
            assert!(report.checked > 0);
            let chain = tree.verify_unity_chain().unwrap();
            assert!(chain.ok, "unity chain failed at p={p} c={c} r={r}");
        }
    }

    #[test]
    fn preimage_products_hit_the_orbit_differences() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let tree = build_preimage_tree(&param, 2, 5, 7).unwrap();
        let report = tree.verify_preimage_products().unwrap();
        assert!(report.all_ok(), "failures: {:?}", report.failures);
        // every (node, m) pair with level + m <= depth is covered
        let expected: u64 = (0..5u32).map(|l| (1u64 << l) * (5 - l) as u64).sum();
        assert_eq!(report.checked, expected);
    }

    #[test]
    fn subtree_swap_breaks_the_ratio_identity() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let mut tree = build_preimage_tree(&param, 2, 4, 9).unwrap();
        tree.canonicalize_labels().unwrap();
        assert!(tree.verify_ratio_identity().unwrap().all_ok());
        // relabel below the pivot of the (root, i=1) constraint
        let pivot = NodeAddress::from_word("ba").unwrap();
        tree.swap_subtrees(pivot).unwrap();
        let report = tree.verify_ratio_identity().unwrap();
        assert!(!report.all_ok(), "mutation must break at least one ratio");
        // the mutated tree is still a preimage tree: products still pass
        assert!(tree.verify_preimage_products().unwrap().all_ok());
    }

    #[test]
    fn frobenius_is_trivial_when_the_tree_splits_over_the_base_field() {
        // x0 = 1 under z^2 mod 257: level-m values are 2^(m+1)-th roots of
        // unity, all in F_257 for m <= 7
        let param = PcfParameter::new(257, 0, 1).unwrap();
        let mut tree = build_preimage_tree(&param, 1, 4, 1).unwrap();
        tree.canonicalize_labels().unwrap();
        assert_eq!(tree.ctx().k(), 1);
        let sigma = tree.frobenius_automorphism().unwrap();
        assert!(sigma.is_identity());
        let report = tree.verify_cyclotomic_action(&sigma).unwrap();
        // p = 257 = 1 mod 2^e for e <= 8, so the identity matches p
        assert!(report.all_ok());
    }

    #[test]
    fn frobenius_order_divides_the_field_degree() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let tree = build_preimage_tree(&param, 2, 5, 11).unwrap();
        let k = tree.ctx().k();
        assert!(k > 1, "this configuration needs a proper extension");
        let sigma = tree.frobenius_automorphism().unwrap();
        assert!(!sigma.is_identity());
        let mut power = sigma.clone();
        let mut order = 1u32;
        while !power.is_identity() {
            power = sigma.compose(&power).unwrap();
            order += 1;
            assert!(order <= k, "Frobenius order exceeded the field degree");
        }
        assert_eq!(k % order, 0);
    }

    #[test]
    fn frobenius_root_unit_is_p_mod_eight() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let mut tree = build_preimage_tree(&param, 2, 5, 13).unwrap();
        tree.canonicalize_labels().unwrap();
        let sigma = tree.frobenius_automorphism().unwrap();
        let report = tree.verify_cyclotomic_action(&sigma).unwrap();
        assert!(report.residue_consistent);
        assert!(report.all_ok(), "mismatches: {:?}", report.mismatches);
        assert_eq!(report.root_unit.exponent, 3);
        assert_eq!(report.root_unit.value, 5);
    }

    #[test]
    fn document_lists_every_node_by_word() {
        let param = PcfParameter::new(7, 6, 2).unwrap();
        let tree = build_preimage_tree(&param, 1, 3, 2).unwrap();
        let doc = tree.document();
        assert_eq!(doc.nodes.len(), (1 << 4) - 1);
        assert!(doc.nodes.contains_key(""));
        assert!(doc.nodes.contains_key("aba"));
        assert_eq!(doc.p, 7);
        assert_eq!(doc.modulus.len() as u32, doc.field_degree + 1);
    }

    #[test]
    fn builds_are_deterministic_in_the_seed() {
        let param = PcfParameter::new(5, 4, 2).unwrap();
        let t1 = build_preimage_tree(&param, 2, 4, 21).unwrap();
        let t2 = build_preimage_tree(&param, 2, 4, 21).unwrap();
        assert_eq!(t1.document().nodes, t2.document().nodes);
        assert_eq!(t1.ctx().modulus(), t2.ctx().modulus());
    }
}
