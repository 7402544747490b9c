//! The randomize function `R: {0,1}^{2b} -> {0,1}^{3200}`.
//!
//! Output is produced in counter mode over a 256-bit digest:
//!
//! ```text
//! R(x) = first 400 bytes of  H(tag || 0u32 || x) || H(tag || 1u32 || x) || ... || H(tag || 12u32 || x)
//! ```
//!
//! with the counter encoded big-endian. The thirteen blocks are independent,
//! so any of them can be computed without the others.

use std::marker::PhantomData;

use sha2::digest::consts::U32;
use sha2::digest::Digest;
use sha2::Sha256;

use crate::accumulator::{Accumulator, ACC_BYTES};
use crate::document::SchemeParams;
use crate::error::{Error, Result};

pub const DEFAULT_DOMAIN_TAG: &[u8] = b"INCSIG-R-v1";

/// Number of 32-byte counter blocks needed to cover 3200 bits.
pub const EXPANSION_BLOCKS: u32 = 13;

/// The hashing and combining primitives the chain hash is built from.
///
/// The group operations are routed through the trait so that an
/// instrumenting wrapper can observe them; implementations other than
/// such wrappers should keep the defaults.
pub trait Randomize: Sync {
    /// Exact input length in bytes (`2b / 8`).
    fn input_len(&self) -> usize;

    fn randomize(&self, link: &[u8]) -> Result<Accumulator>;

    fn add(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        a + b
    }

    fn sub(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        a - b
    }
}

impl<R: Randomize + ?Sized> Randomize for &R {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn randomize(&self, link: &[u8]) -> Result<Accumulator> {
        (**self).randomize(link)
    }
    fn add(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        (**self).add(a, b)
    }
    fn sub(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        (**self).sub(a, b)
    }
}

/// Counter-mode expansion of a 256-bit digest `D` to 3200 bits.
pub struct RandomizeFn<D = Sha256> {
    domain_tag: Vec<u8>,
    input_len: usize,
    _digest: PhantomData<fn() -> D>,
}

impl<D> Clone for RandomizeFn<D> {
    fn clone(&self) -> Self {
        RandomizeFn {
            domain_tag: self.domain_tag.clone(),
            input_len: self.input_len,
            _digest: PhantomData,
        }
    }
}

impl<D> std::fmt::Debug for RandomizeFn<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomizeFn")
            .field("domain_tag", &String::from_utf8_lossy(&self.domain_tag))
            .field("input_len", &self.input_len)
            .finish()
    }
}

impl RandomizeFn<Sha256> {
    /// SHA-256 based randomizer with the default tag, sized for links of
    /// `params` (2b bits).
    pub fn for_params(params: &SchemeParams) -> Self {
        Self::new(params.link_bytes())
    }

    pub fn new(input_len: usize) -> Self {
        Self::with_digest(input_len, DEFAULT_DOMAIN_TAG)
    }
}

impl<D> RandomizeFn<D>
where
    D: Digest<OutputSize = U32>,
{
    pub fn with_digest(input_len: usize, domain_tag: &[u8]) -> Self {
        RandomizeFn {
            domain_tag: domain_tag.to_vec(),
            input_len,
            _digest: PhantomData,
        }
    }

    pub fn with_domain_tag(mut self, tag: &[u8]) -> Self {
        self.domain_tag = tag.to_vec();
        self
    }

    pub fn domain_tag(&self) -> &[u8] {
        &self.domain_tag
    }

    /// One 32-byte counter block of the expansion.
    pub fn expansion_block(&self, counter: u32, link: &[u8]) -> [u8; 32] {
        let mut h = D::new();
        h.update(&self.domain_tag);
        h.update(counter.to_be_bytes());
        h.update(link);
        h.finalize().into()
    }

    /// The full 400-byte output, without the input length check.
    pub fn expand(&self, link: &[u8]) -> [u8; ACC_BYTES] {
        let mut out = [0u8; ACC_BYTES];
        for (ctr, chunk) in out.chunks_mut(32).enumerate() {
            let block = self.expansion_block(ctr as u32, link);
            chunk.copy_from_slice(&block[..chunk.len()]);
        }
        out
    }
}

impl<D> Randomize for RandomizeFn<D>
where
    D: Digest<OutputSize = U32>,
{
    fn input_len(&self) -> usize {
        self.input_len
    }

    fn randomize(&self, link: &[u8]) -> Result<Accumulator> {
        if link.len() != self.input_len {
            return Err(Error::WrongInputLength {
                expected: self.input_len,
                actual: link.len(),
            });
        }
        Ok(Accumulator::from_be_bytes(&self.expand(link)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use sha2::Sha512_256;
    use std::collections::HashSet;

    // 2b = 512 bits for the default (256, 128, 2) geometry.
    const LEN: usize = 64;

    #[test]
    fn thirteen_blocks_cover_the_output() {
        assert_eq!(EXPANSION_BLOCKS as usize * 32, 416);
        assert!(EXPANSION_BLOCKS as usize * 32 >= ACC_BYTES);
        assert!((EXPANSION_BLOCKS as usize - 1) * 32 < ACC_BYTES);
    }

    #[test]
    fn deterministic_and_full_length() {
        let rf = RandomizeFn::new(LEN);
        let x = [7u8; LEN];
        let a = rf.randomize(&x).unwrap();
        let b = rf.randomize(&x).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_be_bytes().len(), ACC_BYTES);
    }

    #[test]
    fn output_is_prefix_of_counter_blocks() {
        let rf = RandomizeFn::new(LEN);
        let x = [0x5au8; LEN];
        let out = rf.expand(&x);
        let mut manual = Vec::new();
        for ctr in 0..EXPANSION_BLOCKS {
            let mut h = Sha256::new();
            h.update(b"INCSIG-R-v1");
            h.update(ctr.to_be_bytes());
            h.update(x);
            manual.extend_from_slice(&h.finalize());
        }
        assert_eq!(manual.len(), 416);
        assert_eq!(&out[..], &manual[..ACC_BYTES]);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let rf = RandomizeFn::new(LEN);
        assert_eq!(
            rf.randomize(&[0u8; LEN - 1]),
            Err(Error::WrongInputLength {
                expected: LEN,
                actual: LEN - 1
            })
        );
        assert!(rf.randomize(&[0u8; LEN + 1]).is_err());
    }

    #[test]
    fn domain_tag_separates() {
        let x = [1u8; LEN];
        let a = RandomizeFn::new(LEN).randomize(&x).unwrap();
        let b = RandomizeFn::new(LEN)
            .with_domain_tag(b"INCSIG-R-v2")
            .randomize(&x)
            .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn digest_is_injectable() {
        let x = [3u8; LEN];
        let a = RandomizeFn::new(LEN).randomize(&x).unwrap();
        let b = RandomizeFn::<Sha512_256>::with_digest(LEN, DEFAULT_DOMAIN_TAG)
            .randomize(&x)
            .unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn ten_thousand_inputs_give_distinct_outputs() {
        let rf = RandomizeFn::new(LEN);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut inputs = HashSet::new();
        let mut outputs = HashSet::new();
        while inputs.len() < 10_000 {
            let mut x = [0u8; LEN];
            rng.fill_bytes(&mut x);
            if inputs.insert(x) {
                outputs.insert(rf.randomize(&x).unwrap().to_be_bytes());
            }
        }
        assert_eq!(outputs.len(), 10_000);
    }
}
