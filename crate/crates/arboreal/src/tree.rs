//! Automorphisms of the rooted binary tree of finite depth.
//!
//! Nodes are words over {a, b}. An automorphism is stored as one parity bit
//! per internal node: bit 1 at node x means the two subtrees hanging off x
//! are swapped. Every assignment of bits is a valid automorphism and the
//! parametrization is a bijection onto Aut(T_n).

use crate::error::{Error, Result};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hard cap on tree depth. 2^24 - 1 parity bits is the largest state this
/// crate is designed to handle.
pub const MAX_DEPTH: u32 = 24;

/// A node of the tree: `level` symbols, the j-th symbol (1-based) stored in
/// bit j-1 of `path` with a = 0 and b = 1. The root is level 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeAddress {
    level: u32,
    path: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    A,
    B,
}

impl Symbol {
    #[inline]
    pub fn bit(self) -> u64 {
        match self {
            Symbol::A => 0,
            Symbol::B => 1,
        }
    }

    #[inline]
    pub fn from_bit(bit: u64) -> Symbol {
        if bit & 1 == 0 {
            Symbol::A
        } else {
            Symbol::B
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::A => 'a',
            Symbol::B => 'b',
        }
    }
}

impl NodeAddress {
    pub fn root() -> NodeAddress {
        NodeAddress { level: 0, path: 0 }
    }

    pub fn new(level: u32, path: u64) -> Result<NodeAddress> {
        if level > MAX_DEPTH {
            return Err(Error::LevelOutOfRange {
                level,
                limit: MAX_DEPTH,
            });
        }
        if level < 64 && path >= 1u64 << level {
            return Err(Error::PathOutOfRange { path, level });
        }
        Ok(NodeAddress { level, path })
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn path(&self) -> u64 {
        self.path
    }

    /// Flat index (1 << level) - 1 + path; root is 0, then levels in order.
    #[inline]
    pub fn flat(&self) -> u64 {
        (1u64 << self.level) - 1 + self.path
    }

    pub fn child(&self, s: Symbol) -> Result<NodeAddress> {
        if self.level >= MAX_DEPTH {
            return Err(Error::LevelOutOfRange {
                level: self.level + 1,
                limit: MAX_DEPTH,
            });
        }
        Ok(NodeAddress {
            level: self.level + 1,
            path: self.path | (s.bit() << self.level),
        })
    }

    pub fn parent(&self) -> Option<NodeAddress> {
        if self.level == 0 {
            return None;
        }
        Some(NodeAddress {
            level: self.level - 1,
            path: self.path & ((1u64 << (self.level - 1)) - 1),
        })
    }

    /// Symbol at 1-based position j.
    pub fn symbol(&self, j: u32) -> Result<Symbol> {
        if j == 0 || j > self.level {
            return Err(Error::LevelOutOfRange {
                level: j,
                limit: self.level,
            });
        }
        Ok(Symbol::from_bit(self.path >> (j - 1)))
    }

    /// Prefix of the first m symbols.
    pub fn prefix(&self, m: u32) -> Result<NodeAddress> {
        if m > self.level {
            return Err(Error::LevelOutOfRange {
                level: m,
                limit: self.level,
            });
        }
        Ok(NodeAddress {
            level: m,
            path: self.path & ((1u64 << m) - 1),
        })
    }

    /// Concatenation self followed by `tail` symbols of `suffix_path`.
    pub fn extend(&self, suffix_path: u64, tail: u32) -> Result<NodeAddress> {
        let level = self.level + tail;
        if level > MAX_DEPTH {
            return Err(Error::LevelOutOfRange {
                level,
                limit: MAX_DEPTH,
            });
        }
        Ok(NodeAddress {
            level,
            path: self.path | (suffix_path << self.level),
        })
    }

    pub fn from_word(word: &str) -> Result<NodeAddress> {
        let mut addr = NodeAddress::root();
        for ch in word.chars() {
            let s = match ch {
                'a' => Symbol::A,
                'b' => Symbol::B,
                other => return Err(Error::BadWordCharacter(other)),
            };
            addr = addr.child(s)?;
        }
        Ok(addr)
    }

    pub fn word(&self) -> String {
        (1..=self.level)
            .map(|j| Symbol::from_bit(self.path >> (j - 1)).to_char())
            .collect()
    }
}

/// Automorphism of the depth-n tree, one parity bit per node at levels
/// 0..n-1, packed little-endian by flat index into 64-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeAutomorphism {
    depth: u32,
    bits: Vec<u64>,
}

#[inline]
fn node_count(depth: u32) -> u64 {
    (1u64 << depth) - 1
}

#[inline]
fn block_count(depth: u32) -> usize {
    (node_count(depth) as usize + 63) / 64
}

fn check_depth(depth: u32) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange {
            depth,
            max: MAX_DEPTH,
        });
    }
    Ok(())
}

impl TreeAutomorphism {
    pub fn identity(depth: u32) -> Result<TreeAutomorphism> {
        check_depth(depth)?;
        Ok(TreeAutomorphism {
            depth,
            bits: vec![0; block_count(depth)],
        })
    }

    /// Uniformly random automorphism; every parity bit is an independent
    /// fair coin, so the distribution is uniform on Aut(T_n). Deterministic
    /// in the seed.
    pub fn random(depth: u32, seed: u64) -> Result<TreeAutomorphism> {
        check_depth(depth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bits = vec![0u64; block_count(depth)];
        for block in bits.iter_mut() {
            *block = rng.next_u64();
        }
        let mut out = TreeAutomorphism { depth, bits };
        out.mask_tail();
        Ok(out)
    }

    fn mask_tail(&mut self) {
        let n = node_count(self.depth);
        let rem = (n % 64) as u32;
        if rem != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn depth(&self) -> u32 {
        self.depth
    }

    #[inline]
    pub fn node_count(&self) -> u64 {
        node_count(self.depth)
    }

    #[inline]
    fn bit(&self, flat: u64) -> bool {
        (self.bits[(flat / 64) as usize] >> (flat % 64)) & 1 == 1
    }

    #[inline]
    fn set_bit(&mut self, flat: u64, value: bool) {
        let block = (flat / 64) as usize;
        let mask = 1u64 << (flat % 64);
        if value {
            self.bits[block] |= mask;
        } else {
            self.bits[block] &= !mask;
        }
    }

    /// Parity at a node; the node must be internal (level < depth).
    pub fn parity(&self, node: NodeAddress) -> Result<bool> {
        if node.level >= self.depth {
            return Err(Error::LevelOutOfRange {
                level: node.level,
                limit: self.depth - 1,
            });
        }
        Ok(self.bit(node.flat()))
    }

    pub fn set_parity(&mut self, node: NodeAddress, value: bool) -> Result<()> {
        if node.level >= self.depth {
            return Err(Error::LevelOutOfRange {
                level: node.level,
                limit: self.depth - 1,
            });
        }
        self.set_bit(node.flat(), value);
        Ok(())
    }

    /// Image of a word: symbol j of the image is symbol j of the input
    /// XORed with the parity at the length-(j-1) input prefix.
    pub fn apply(&self, w: NodeAddress) -> Result<NodeAddress> {
        if w.level > self.depth {
            return Err(Error::LevelOutOfRange {
                level: w.level,
                limit: self.depth,
            });
        }
        let mut image = 0u64;
        let mut prefix_flat = 0u64; // flat index of the input prefix
        for j in 0..w.level {
            let s = (w.path >> j) & 1;
            let par = self.bit(prefix_flat) as u64;
            image |= (s ^ par) << j;
            // flat index of the next input prefix
            prefix_flat = (1u64 << (j + 1)) - 1 + (w.path & ((1u64 << (j + 1)) - 1));
        }
        Ok(NodeAddress {
            level: w.level,
            path: image,
        })
    }

    /// Group operation: `self.compose(tau)` is "tau first, then self".
    /// Parity of the product at x is parity(self, tau(x)) XOR parity(tau, x).
    pub fn compose(&self, tau: &TreeAutomorphism) -> Result<TreeAutomorphism> {
        if self.depth != tau.depth {
            return Err(Error::DepthMismatch {
                left: self.depth,
                right: tau.depth,
            });
        }
        let mut out = TreeAutomorphism::identity(self.depth)?;
        // Images of tau on the current level, built incrementally so the
        // whole pass is linear in the node count.
        let mut images: Vec<u32> = vec![0];
        let mut next: Vec<u32> = Vec::new();
        for level in 0..self.depth {
            let base = (1u64 << level) - 1;
            next.clear();
            next.resize(1usize << (level + 1), 0);
            for path in 0..(1u64 << level) {
                let img = images[path as usize] as u64;
                let tau_bit = tau.bit(base + path);
                let sigma_bit = self.bit(base + img);
                out.set_bit(base + path, tau_bit ^ sigma_bit);
                let flip = tau_bit as u64;
                next[path as usize] = (img | (flip << level)) as u32;
                next[(path | (1u64 << level)) as usize] = (img | ((1 ^ flip) << level)) as u32;
            }
            std::mem::swap(&mut images, &mut next);
        }
        Ok(out)
    }

    /// Inverse: parity of the inverse at sigma(x) equals parity at x.
    pub fn invert(&self) -> TreeAutomorphism {
        let mut out = TreeAutomorphism {
            depth: self.depth,
            bits: vec![0; self.bits.len()],
        };
        let mut images: Vec<u32> = vec![0];
        let mut next: Vec<u32> = Vec::new();
        for level in 0..self.depth {
            let base = (1u64 << level) - 1;
            next.clear();
            next.resize(1usize << (level + 1), 0);
            for path in 0..(1u64 << level) {
                let img = images[path as usize] as u64;
                let bit = self.bit(base + path);
                out.set_bit(base + img, bit);
                let flip = bit as u64;
                next[path as usize] = (img | (flip << level)) as u32;
                next[(path | (1u64 << level)) as usize] = (img | ((1 ^ flip) << level)) as u32;
            }
            std::mem::swap(&mut images, &mut next);
        }
        out
    }

    /// Restriction to the depth-m subtree spanned by levels 0..m.
    pub fn restrict(&self, m: u32) -> Result<TreeAutomorphism> {
        if m == 0 || m > self.depth {
            return Err(Error::RestrictionOutOfRange { m, depth: self.depth });
        }
        let mut out = TreeAutomorphism::identity(m)?;
        let count = node_count(m);
        for (i, block) in out.bits.iter_mut().enumerate() {
            *block = self.bits[i];
        }
        let rem = (count % 64) as u32;
        if rem != 0 {
            if let Some(last) = out.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Packed parity bits when they fit a single machine word (depth <= 6).
    pub fn packed(&self) -> Option<u64> {
        if node_count(self.depth) <= 64 {
            Some(self.bits[0])
        } else {
            None
        }
    }

    pub fn from_packed(depth: u32, key: u64) -> Result<TreeAutomorphism> {
        check_depth(depth)?;
        let n = node_count(depth);
        if n > 64 {
            return Err(Error::DepthOutOfRange { depth, max: 6 });
        }
        if n < 64 && key >= (1u64 << n) {
            return Err(Error::BadSerialization(format!(
                "packed key {key:#x} exceeds {n} parity bits"
            )));
        }
        Ok(TreeAutomorphism {
            depth,
            bits: vec![key],
        })
    }

    pub fn blocks(&self) -> &[u64] {
        &self.bits
    }

    pub fn from_blocks(depth: u32, blocks: &[u64]) -> Result<TreeAutomorphism> {
        check_depth(depth)?;
        if blocks.len() != block_count(depth) {
            return Err(Error::BadSerialization(format!(
                "expected {} blocks, got {}",
                block_count(depth),
                blocks.len()
            )));
        }
        let mut out = TreeAutomorphism {
            depth,
            bits: blocks.to_vec(),
        };
        out.mask_tail();
        Ok(out)
    }

    /// Byte serialization: depth byte, then parity bits packed little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = node_count(self.depth);
        let nbytes = ((n + 7) / 8) as usize;
        let mut out = Vec::with_capacity(1 + nbytes);
        out.push(self.depth as u8);
        for i in 0..nbytes {
            let block = self.bits[i / 8];
            out.push(((block >> ((i % 8) * 8)) & 0xff) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TreeAutomorphism> {
        if bytes.is_empty() {
            return Err(Error::BadSerialization("empty input".into()));
        }
        let depth = bytes[0] as u32;
        check_depth(depth)?;
        let n = node_count(depth);
        let nbytes = ((n + 7) / 8) as usize;
        if bytes.len() != 1 + nbytes {
            return Err(Error::BadSerialization(format!(
                "depth {depth} needs {nbytes} payload bytes, got {}",
                bytes.len() - 1
            )));
        }
        let mut bits = vec![0u64; block_count(depth)];
        for (i, &byte) in bytes[1..].iter().enumerate() {
            bits[i / 8] |= (byte as u64) << ((i % 8) * 8);
        }
        let tail = (n % 8) as u32;
        if tail != 0 {
            let last = bytes[bytes.len() - 1];
            if last >> tail != 0 {
                return Err(Error::BadSerialization(
                    "nonzero padding bits in final byte".into(),
                ));
            }
        }
        Ok(TreeAutomorphism { depth, bits })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<TreeAutomorphism> {
        let bytes = hex::decode(s).map_err(|e| Error::BadSerialization(e.to_string()))?;
        TreeAutomorphism::from_bytes(&bytes)
    }
}

/// Composition on single-word packed parity vectors (depth <= 6). Same
/// computation as `compose`, with all state on the stack; used by the
/// breadth-first closure and by exhaustive pair scans.
#[inline]
pub fn compose_packed(sigma: u64, tau: u64, depth: u32) -> u64 {
    debug_assert!(depth >= 1 && depth <= 6);
    let mut out = 0u64;
    let mut images = [0u8; 64];
    let mut next = [0u8; 64];
    for level in 0..depth {
        let width = 1u64 << level;
        let base = width - 1;
        for path in 0..width {
            let img = images[path as usize] as u64;
            let tau_bit = (tau >> (base + path)) & 1;
            let sigma_bit = (sigma >> (base + img)) & 1;
            out |= (tau_bit ^ sigma_bit) << (base + path);
            next[path as usize] = (img | (tau_bit << level)) as u8;
            next[(path | width) as usize] = (img | ((1 ^ tau_bit) << level)) as u8;
        }
        let live = 1usize << (level + 1);
        images[..live].copy_from_slice(&next[..live]);
    }
    out
}
