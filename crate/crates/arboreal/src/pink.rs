//! The self-similar generator family, breadth-first closures, and the closed
//! order formulas they are checked against.
//!
//! Generator i of period r has parity bit 1 exactly at the nodes
//! a^(i-1) (b a^(r-1))^m, one per admissible m >= 0. These are the standard
//! recursively defined generators for the arboreal image of a quadratic map
//! whose critical point has exact period r.

use crate::error::{Error, Result};
use crate::parity;
use crate::tree::{compose_packed, NodeAddress, TreeAutomorphism};
use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

/// The generators alpha_1 .. alpha_r at a fixed depth.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    r: u32,
    depth: u32,
    elements: Vec<TreeAutomorphism>,
}

impl GeneratorSet {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn elements(&self) -> &[TreeAutomorphism] {
        &self.elements
    }
}

/// Generator alpha_i at depth n: bits at a^(i-1) (b a^(r-1))^m for all m
/// with (i-1) + m r < n.
pub fn generator(i: u32, r: u32, n: u32) -> Result<TreeAutomorphism> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if i == 0 || i > r {
        return Err(Error::GeneratorIndexOutOfRange { i, r });
    }
    let mut alpha = TreeAutomorphism::identity(n)?;
    let mut m = 0u32;
    while (i - 1) + m * r < n {
        let level = (i - 1) + m * r;
        // path bits: b at positions i-1, i-1+r, ..., i-1+(m-1)r (0-based)
        let mut path = 0u64;
        for k in 0..m {
            path |= 1u64 << ((i - 1) + k * r);
        }
        alpha.set_parity(NodeAddress::new(level, path)?, true)?;
        m += 1;
    }
    Ok(alpha)
}

pub fn generator_set(r: u32, n: u32) -> Result<GeneratorSet> {
    let elements = (1..=r).map(|i| generator(i, r, n)).collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSet { r, depth: n, elements })
}

/// A finite set of automorphisms of one depth, stored as sorted packed
/// parity vectors (stride blocks per element). Deterministic ordering.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    depth: u32,
    stride: usize,
    keys: Vec<u64>,
}

impl FiniteGroup {
    fn from_keys(depth: u32, stride: usize, mut chunks: Vec<u64>) -> FiniteGroup {
        debug_assert_eq!(chunks.len() % stride, 0);
        sort_chunks(&mut chunks, stride);
        FiniteGroup { depth, stride, keys: chunks }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn order(&self) -> u64 {
        (self.keys.len() / self.stride) as u64
    }

    pub fn contains(&self, sigma: &TreeAutomorphism) -> bool {
        if sigma.depth() != self.depth {
            return false;
        }
        let needle = sigma.blocks();
        debug_assert_eq!(needle.len(), self.stride);
        self.keys
            .chunks_exact(self.stride)
            .collect::<Vec<_>>()
            .binary_search_by(|chunk| cmp_chunks(chunk, needle))
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = TreeAutomorphism> + '_ {
        self.keys
            .chunks_exact(self.stride)
            .map(move |chunk| TreeAutomorphism::from_blocks(self.depth, chunk).unwrap())
    }

    /// Sorted packed keys; only available at depth <= 6 where one block
    /// holds the whole parity vector.
    pub fn packed_keys(&self) -> Option<&[u64]> {
        if self.stride == 1 {
            Some(&self.keys)
        } else {
            None
        }
    }
}

fn cmp_chunks(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    // compare as little-endian numbers: most significant block last
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

fn sort_chunks(chunks: &mut Vec<u64>, stride: usize) {
    if stride == 1 {
        chunks.sort_unstable();
        return;
    }
    let mut view: Vec<Vec<u64>> = chunks.chunks_exact(stride).map(|c| c.to_vec()).collect();
    view.sort_unstable_by(|a, b| cmp_chunks(a, b));
    chunks.clear();
    for c in view {
        chunks.extend_from_slice(&c);
    }
}

/// Breadth-first closure of the generators under left multiplication,
/// starting from the identity. Errors out once more than `cap` distinct
/// elements have been found, reporting the partial count.
pub fn closure(gens: &GeneratorSet, cap: u64) -> Result<FiniteGroup> {
    let depth = gens.depth;
    if (1u64 << depth) - 1 <= 64 {
        closure_packed(gens, cap)
    } else {
        closure_general(gens, cap)
    }
}

fn closure_packed(gens: &GeneratorSet, cap: u64) -> Result<FiniteGroup> {
    let depth = gens.depth;
    let gen_keys: Vec<u64> = gens.elements.iter().map(|g| g.packed().unwrap()).collect();
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut queue: VecDeque<u64> = VecDeque::new();
    seen.insert(0, ());
    queue.push_back(0);
    while let Some(current) = queue.pop_front() {
        for &g in &gen_keys {
            let product = compose_packed(g, current, depth);
            if let Entry::Vacant(v) = seen.entry(product) {
                v.insert(());
                if seen.len() as u64 > cap {
                    return Err(Error::ClosureCapExceeded {
                        cap,
                        partial: seen.len() as u64,
                    });
                }
                queue.push_back(product);
            }
        }
    }
    let keys: Vec<u64> = seen.into_keys().collect();
    Ok(FiniteGroup::from_keys(depth, 1, keys))
}

fn closure_general(gens: &GeneratorSet, cap: u64) -> Result<FiniteGroup> {
    let depth = gens.depth;
    let stride = gens.elements[0].blocks().len();
    let identity = TreeAutomorphism::identity(depth)?;
    let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut queue: VecDeque<TreeAutomorphism> = VecDeque::new();
    seen.insert(identity.blocks().to_vec(), ());
    queue.push_back(identity);
    while let Some(current) = queue.pop_front() {
        for g in &gens.elements {
            let product = g.compose(&current)?;
            let key = product.blocks().to_vec();
            if let Entry::Vacant(v) = seen.entry(key) {
                v.insert(());
                if seen.len() as u64 > cap {
                    return Err(Error::ClosureCapExceeded {
                        cap,
                        partial: seen.len() as u64,
                    });
                }
                queue.push_back(product);
            }
        }
    }
    let mut chunks = Vec::with_capacity(seen.len() * stride);
    for key in seen.into_keys() {
        chunks.extend_from_slice(&key);
    }
    Ok(FiniteGroup::from_keys(depth, stride, chunks))
}

/// log2 of the order of the closed generator group at depth n:
/// 2^n - 1 - sum_{m=0}^{n-1} 2^(n-1-m) floor(m/r).
pub fn log2_order_closed(r: u32, n: u32) -> u64 {
    assert!(r >= 1 && n >= 1 && n <= 63, "log2_order_closed needs 1 <= n <= 63, r >= 1");
    let mut total = (1u64 << n) - 1;
    for m in 0..n {
        total -= (1u64 << (n - 1 - m)) * (m / r) as u64;
    }
    total
}

/// log2 of the order of the last-level kernel:
/// 2^(n-1) - sum_{i=1}^{floor((n-1)/r)} 2^(n-1-ir). Defined for n >= 2.
pub fn log2_order_kernel(r: u32, n: u32) -> Result<u64> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if n < 2 {
        return Err(Error::OrderFormulaDomain { n });
    }
    assert!(n <= 63);
    let mut total = 1u64 << (n - 1);
    let mut i = 1u32;
    while i * r <= n - 1 {
        total -= 1u64 << (n - 1 - i * r);
        i += 1;
    }
    Ok(total)
}

/// Maximum depth for exhaustive scans over all of Aut(T_n).
pub const ENUMERATION_MAX_DEPTH: u32 = 4;

/// All automorphisms of T_n in the truncated unit kernel, by full scan of
/// the 2^(2^n - 1) parity vectors. Hard-capped at depth 4.
pub fn enumerate_unit_kernel(r: u32, n: u32) -> Result<FiniteGroup> {
    if r == 0 {
        return Err(Error::ZeroPeriod);
    }
    if n == 0 || n > ENUMERATION_MAX_DEPTH {
        return Err(Error::EnumerationTooDeep {
            depth: n,
            max: ENUMERATION_MAX_DEPTH,
        });
    }
    let bits = (1u64 << n) - 1;
    let mut keys = Vec::new();
    for key in 0..(1u64 << bits) {
        let sigma = TreeAutomorphism::from_packed(n, key)?;
        if parity::in_unit_kernel(&sigma, r)? {
            keys.push(key);
        }
    }
    Ok(FiniteGroup::from_keys(n, 1, keys))
}

/// One row of the order table: the closed formula, optionally the BFS order
/// and the kernel-scan count, and whether everything available agreed.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OrderRow {
    pub r: u32,
    pub n: u32,
    pub log2_formula: u64,
    pub bfs_order: Option<u64>,
    pub kernel_count: Option<u64>,
    pub matched: bool,
}

/// Order table over a grid. BFS runs when the predicted order fits the cap;
/// the exhaustive kernel scan runs at depth <= 4.
pub fn order_table(rs: &[u32], ns: &[u32], bfs_cap: u64) -> Result<Vec<OrderRow>> {
    let mut rows = Vec::new();
    for &r in rs {
        for &n in ns {
            let log2_formula = log2_order_closed(r, n);
            let predicted = 1u64.checked_shl(log2_formula as u32).filter(|_| log2_formula < 64);
            let bfs_order = match predicted {
                Some(p) if p <= bfs_cap => Some(closure(&generator_set(r, n)?, bfs_cap)?.order()),
                _ => None,
            };
            let kernel_count = if n <= ENUMERATION_MAX_DEPTH {
                Some(enumerate_unit_kernel(r, n)?.order())
            } else {
                None
            };
            let matched = bfs_order.map_or(true, |o| Some(o) == predicted)
                && kernel_count.map_or(true, |c| Some(c) == predicted);
            rows.push(OrderRow {
                r,
                n,
                log2_formula,
                bfs_order,
                kernel_count,
                matched,
            });
        }
    }
    Ok(rows)
}

pub fn order_table_csv(rows: &[OrderRow]) -> String {
    let mut out = String::from("r,n,log2_formula,bfs_order,kernel_count,match\n");
    for row in rows {
        let fmt_opt = |v: Option<u64>| v.map_or(String::new(), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.r,
            row.n,
            row.log2_formula,
            fmt_opt(row.bfs_order),
            fmt_opt(row.kernel_count),
            row.matched
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_support_is_the_documented_word_family() {
        // period 3, generator 2: bits exactly at a, abaa, abaabaa, ...
        let alpha = generator(2, 3, 12).unwrap();
        let mut expected = Vec::new();
        let mut word = String::from("a");
        while word.len() < 12 {
            expected.push(word.clone());
            word.push_str("baa");
        }
        let mut support = Vec::new();
        for level in 0..12 {
            for path in 0..(1u64 << level) {
                let node = NodeAddress::new(level, path).unwrap();
                if alpha.parity(node).unwrap() {
                    support.push(node.word());
                }
            }
        }
        assert_eq!(support, expected);
    }

    #[test]
    fn first_generator_is_supported_on_the_spine() {
        // i = 1: the root, then (b a^(r-1))^m.
        let alpha = generator(1, 2, 6).unwrap();
        let words: Vec<String> = ["", "ba", "baba"].iter().map(|s| s.to_string()).collect();
        for w in &words {
            assert!(alpha.parity(NodeAddress::from_word(w).unwrap()).unwrap());
        }
        let total: u32 = (0..6)
            .flat_map(|level| (0..(1u64 << level)).map(move |p| (level, p)))
            .map(|(level, p)| {
                alpha.parity(NodeAddress::new(level, p).unwrap()).unwrap() as u32
            })
            .sum();
        assert_eq!(total as usize, words.len());
    }

    #[test]
    fn generator_bit_count_matches_depth_arithmetic() {
        for r in 1..=6u32 {
            for i in 1..=r {
                for n in 1..=12u32 {
                    let alpha = generator(i, r, n).unwrap();
                    let expected = (0..).take_while(|m| (i - 1) + m * r < n).count() as u32;
                    let ones: u32 = alpha.blocks().iter().map(|b| b.count_ones()).sum();
                    assert_eq!(ones, expected);
                }
            }
        }
        assert!(generator(0, 3, 5).is_err());
        assert!(generator(4, 3, 5).is_err());
    }

    #[test]
    fn closure_of_empty_and_identity_seeds() {
        let empty = GeneratorSet { r: 1, depth: 3, elements: vec![] };
        let group = closure(&empty, 10).unwrap();
        assert_eq!(group.order(), 1);
        assert!(group.contains(&TreeAutomorphism::identity(3).unwrap()));
    }

    #[test]
    fn closed_order_formula_examples() {
        assert_eq!(log2_order_closed(2, 5), 23);
        assert_eq!(log2_order_closed(3, 4), 14);
        assert_eq!(log2_order_closed(1, 4), 4);
        assert_eq!(log2_order_closed(2, 4), 12);
        for r in 2..=6u32 {
            for n in 1..=r {
                assert_eq!(log2_order_closed(r, n), (1u64 << n) - 1);
            }
        }
    }

    #[test]
    fn kernel_order_formula_examples() {
        assert_eq!(log2_order_kernel(2, 5).unwrap(), 11);
        assert!(log2_order_kernel(2, 1).is_err());
        // below the period the last level is free: 2^(n-1)
        for r in 3..=6u32 {
            for n in 2..=r {
                assert_eq!(log2_order_kernel(r, n).unwrap(), 1u64 << (n - 1));
            }
        }
    }

    #[test]
    fn order_formulas_telescope() {
        for r in 1..=6u32 {
            for n in 2..=12u32 {
                assert_eq!(
                    log2_order_closed(r, n - 1) + log2_order_kernel(r, n).unwrap(),
                    log2_order_closed(r, n),
                    "telescoping failed at r = {r}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn closure_orders_match_the_formula() {
        for (r, n) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
            let group = closure(&generator_set(r, n).unwrap(), 1 << 20).unwrap();
            assert_eq!(
                group.order(),
                1u64 << log2_order_closed(r, n),
                "closure order off at r = {r}, n = {n}"
            );
        }
    }

    #[test]
    fn closure_equals_kernel_enumeration() {
        for (r, n) in [(1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] {
            let bfs = closure(&generator_set(r, n).unwrap(), 1 << 20).unwrap();
            let scan = enumerate_unit_kernel(r, n).unwrap();
            assert_eq!(bfs.packed_keys().unwrap(), scan.packed_keys().unwrap());
        }
    }

    #[test]
    fn shallow_kernel_is_the_whole_group() {
        for r in 2..=4u32 {
            for n in 1..=r.min(4) {
                let scan = enumerate_unit_kernel(r, n).unwrap();
                assert_eq!(scan.order(), 1u64 << ((1u64 << n) - 1));
            }
        }
    }

    #[test]
    fn kernel_of_restriction_has_the_predicted_size() {
        for r in 1..=3u32 {
            for n in 2..=4u32 {
                let group = enumerate_unit_kernel(r, n).unwrap();
                let fixed = group
                    .iter()
                    .filter(|sigma| sigma.restrict(n - 1).unwrap().is_identity())
                    .count() as u64;
                assert_eq!(
                    fixed,
                    1u64 << log2_order_kernel(r, n).unwrap(),
                    "restriction kernel size off at r = {r}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn closure_cap_reports_partial_count() {
        let gens = generator_set(2, 4).unwrap();
        match closure(&gens, 100) {
            Err(Error::ClosureCapExceeded { cap: 100, partial }) => {
                assert!(partial > 100 && partial <= 4096);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_depth_cap() {
        assert!(matches!(
            enumerate_unit_kernel(2, 5),
            Err(Error::EnumerationTooDeep { depth: 5, max: 4 })
        ));
    }

    #[test]
    fn general_closure_path_agrees_with_the_formula() {
        // depth 7 exceeds one packed word, forcing the multi-block path;
        // period 1 keeps the group small (order 2^7).
        let gens7 = generator_set(1, 7).unwrap();
        let group7 = closure(&gens7, 1 << 10).unwrap();
        assert_eq!(group7.order(), 1u64 << log2_order_closed(1, 7));
        assert!(group7.contains(&generator(1, 1, 7).unwrap()));
    }

    #[test]
    fn order_table_grid() {
        let rows = order_table(&[1, 2], &[1, 2, 3, 4], 1 << 16).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|row| row.matched));
        let r2: Vec<u64> = rows.iter().filter(|r| r.r == 2).map(|r| r.log2_formula).collect();
        assert_eq!(r2, vec![1, 3, 6, 12]);
        let r1: Vec<u64> = rows.iter().filter(|r| r.r == 1).map(|r| r.log2_formula).collect();
        assert_eq!(r1, vec![1, 2, 3, 4]);
        let csv = order_table_csv(&rows);
        assert!(csv.starts_with("r,n,log2_formula,bfs_order,kernel_count,match\n"));
        assert!(csv.contains("2,4,12,4096,4096,true"));
    }
}
