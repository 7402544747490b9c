//! The original pair-chaining hash and its known collision patterns.
//!
//! `mu = sum_{i=1}^{n-1} R160(D_i || D_{i+1}) mod 2^160` links each block to
//! its successor only, so any two messages with the same multiset of
//! consecutive pairs collide. The corpus below collects the standard
//! patterns; [`chained_digest`] evaluates the same messages under the
//! randomized d-wise chain, where they separate.

use std::fmt;

use crate::accumulator::Accumulator;
use crate::chainhash::{hash_full, RandomChain};
use crate::document::{BlockDocument, SchemeParams};
use crate::error::{Error, Result};
use crate::randomizer::{Randomize, RandomizeFn};

pub const DIGEST_BYTES: usize = 20;

/// Block size used by the corpus messages (b = 128).
pub const CORPUS_BLOCK_BYTES: usize = 16;

pub const LEGACY_DOMAIN_TAG: &[u8] = b"PCIHF-R160-v1";

/// A 160-bit residue, big-endian.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PcihfDigest(pub [u8; DIGEST_BYTES]);

impl PcihfDigest {
    fn add(&self, rhs: &PcihfDigest) -> PcihfDigest {
        let mut out = [0u8; DIGEST_BYTES];
        let mut carry = 0u16;
        for i in (0..DIGEST_BYTES).rev() {
            let s = u16::from(self.0[i]) + u16::from(rhs.0[i]) + carry;
            out[i] = s as u8;
            carry = s >> 8;
        }
        PcihfDigest(out)
    }

    fn xor(&self, rhs: &PcihfDigest) -> PcihfDigest {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a ^= b);
        PcihfDigest(out)
    }
}

impl fmt::Debug for PcihfDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PcihfDigest({})", hex::encode(self.0))
    }
}

impl fmt::Display for PcihfDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// Randomizer for pairs of `block_bytes`-byte blocks, truncated to 160 bits
/// by the caller.
pub fn legacy_randomizer(block_bytes: usize) -> RandomizeFn {
    RandomizeFn::new(2 * block_bytes).with_domain_tag(LEGACY_DOMAIN_TAG)
}

fn r160<R: Randomize>(rf: &R, a: &[u8], b: &[u8]) -> Result<PcihfDigest> {
    let mut pair = Vec::with_capacity(a.len() + b.len());
    pair.extend_from_slice(a);
    pair.extend_from_slice(b);
    let full = rf.randomize(&pair)?.to_be_bytes();
    Ok(PcihfDigest(full[..DIGEST_BYTES].try_into().unwrap()))
}

fn pair_fold<B, R>(blocks: &[B], rf: &R, combine: fn(&PcihfDigest, &PcihfDigest) -> PcihfDigest) -> Result<PcihfDigest>
where
    B: AsRef<[u8]>,
    R: Randomize,
{
    if blocks.len() < 2 {
        return Err(Error::TooShort(blocks.len()));
    }
    let mut acc = PcihfDigest::default();
    for w in blocks.windows(2) {
        acc = combine(&acc, &r160(rf, w[0].as_ref(), w[1].as_ref())?);
    }
    Ok(acc)
}

/// Pair-chained sum modulo `2^160`.
pub fn pcihf_hash<B: AsRef<[u8]>, R: Randomize>(blocks: &[B], rf: &R) -> Result<PcihfDigest> {
    pair_fold(blocks, rf, PcihfDigest::add)
}

/// Pair-chained XOR.
pub fn pcihf_xor_hash<B: AsRef<[u8]>, R: Randomize>(blocks: &[B], rf: &R) -> Result<PcihfDigest> {
    pair_fold(blocks, rf, PcihfDigest::xor)
}

/// Combining operator under which a corpus pair collides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combiner {
    Modular,
    Xor,
}

impl Combiner {
    pub fn name(&self) -> &'static str {
        match self {
            Combiner::Modular => "modular",
            Combiner::Xor => "xor",
        }
    }

    pub fn hash<B: AsRef<[u8]>, R: Randomize>(&self, blocks: &[B], rf: &R) -> Result<PcihfDigest> {
        match self {
            Combiner::Modular => pcihf_hash(blocks, rf),
            Combiner::Xor => pcihf_xor_hash(blocks, rf),
        }
    }
}

/// Two distinct messages with equal pair-chained digests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionPair {
    pub label: String,
    pub combiner: Combiner,
    /// Letters naming the blocks, e.g. `"BAB"`.
    pub pattern: (String, String),
    pub first: Vec<Vec<u8>>,
    pub second: Vec<Vec<u8>>,
}

/// The block standing for letter `c`: `c` repeated over the block.
pub fn letter_block(c: char) -> Vec<u8> {
    vec![c as u8; CORPUS_BLOCK_BYTES]
}

fn pair(label: &str, combiner: Combiner, a: &str, b: &str) -> CollisionPair {
    CollisionPair {
        label: label.to_string(),
        combiner,
        pattern: (a.to_string(), b.to_string()),
        first: a.chars().map(letter_block).collect(),
        second: b.chars().map(letter_block).collect(),
    }
}

/// The five classic pair-chaining collision patterns.
pub fn collision_corpus() -> Vec<CollisionPair> {
    vec![
        pair("palindrome", Combiner::Modular, "BAB", "ABA"),
        pair("same-ends", Combiner::Modular, "ABCBA", "BCBAB"),
        pair("xor-only", Combiner::Xor, "ABBBC", "ABC"),
        pair("three-identical-blocks", Combiner::Modular, "BXCXDXE", "BXDXCXE"),
        pair("two-overlapping-pairs", Combiner::Modular, "BXCYDXEYF", "BXEYDXCYF"),
    ]
}

fn hex_message(blocks: &[Vec<u8>]) -> String {
    blocks.iter().map(hex::encode).collect::<Vec<_>>().join(":")
}

/// Text fixture: one line per pair, `label combiner blocks-a blocks-b`,
/// blocks as `:`-separated hex.
pub fn corpus_to_fixture(corpus: &[CollisionPair]) -> String {
    let mut out = String::from("# label combiner message-a message-b (':'-separated hex blocks)\n");
    for p in corpus {
        out.push_str(&format!(
            "{} {} {} {}\n",
            p.label,
            p.combiner.name(),
            hex_message(&p.first),
            hex_message(&p.second)
        ));
    }
    out
}

pub fn parse_corpus_fixture(text: &str) -> Result<Vec<CollisionPair>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| Error::MalformedScript {
            line: n + 1,
            reason: reason.into(),
        };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(err("expected 4 fields"));
        }
        let combiner = match f[1] {
            "modular" => Combiner::Modular,
            "xor" => Combiner::Xor,
            _ => return Err(err("unknown combiner")),
        };
        let blocks = |s: &str| -> Result<Vec<Vec<u8>>> {
            s.split(':')
                .map(|h| hex::decode(h).map_err(|_| err("bad hex block")))
                .collect()
        };
        let first = blocks(f[2])?;
        let second = blocks(f[3])?;
        let letters = |bs: &[Vec<u8>]| -> String {
            bs.iter()
                .map(|b| {
                    if b.iter().all(|&x| x == b[0]) && b[0].is_ascii_uppercase() {
                        b[0] as char
                    } else {
                        '?'
                    }
                })
                .collect()
        };
        out.push(CollisionPair {
            label: f[0].to_string(),
            combiner,
            pattern: (letters(&first), letters(&second)),
            first,
            second,
        });
    }
    Ok(out)
}

/// Geometry used to re-hash corpus messages under d-wise chaining.
pub fn corpus_params() -> SchemeParams {
    SchemeParams::pairwise(CORPUS_BLOCK_BYTES as u32 * 8).expect("valid geometry")
}

/// The chained hash of a pre-blocked message: the concatenated blocks are
/// padded and hashed with the first `m + d - 1` sub-blocks of `chain`.
pub fn chained_digest<R: Randomize>(
    blocks: &[Vec<u8>],
    params: &SchemeParams,
    chain: &RandomChain,
    rf: &R,
) -> Result<Accumulator> {
    let raw = blocks.concat();
    let doc = BlockDocument::pad(&raw, *params);
    let need = params.chain_len(doc.len());
    if chain.len() < need {
        return Err(Error::ChainLengthMismatch {
            expected: need,
            actual: chain.len(),
        });
    }
    hash_full(&chain.prefix(need), &doc, rf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rf() -> RandomizeFn {
        legacy_randomizer(CORPUS_BLOCK_BYTES)
    }

    fn msg(s: &str) -> Vec<Vec<u8>> {
        s.chars().map(letter_block).collect()
    }

    #[test]
    fn known_collisions() {
        let rf = rf();
        let eq = |a: &str, b: &str| pcihf_hash(&msg(a), &rf).unwrap() == pcihf_hash(&msg(b), &rf).unwrap();
        assert!(eq("BAB", "ABA"));
        assert!(eq("ABCBA", "BCBAB"));
        assert!(eq("BXCXDXE", "BXDXCXE"));
        assert!(eq("BXCYDXEYF", "BXEYDXCYF"));
        assert!(!eq("ABBBC", "ABC"));
        assert!(!eq("AB", "BA"));
    }

    #[test]
    fn xor_variant() {
        let rf = rf();
        let h = |a: &str| pcihf_xor_hash(&msg(a), &rf).unwrap();
        assert_eq!(h("ABBBC"), h("ABC"));
        assert_eq!(h("ABCD"), h("ABCD"));
        assert_eq!(h("BAB"), h("ABA"));
        assert_ne!(h("AB"), h("BA"));
    }

    #[test]
    fn too_short() {
        assert_eq!(pcihf_hash(&msg("A"), &rf()), Err(Error::TooShort(1)));
        assert_eq!(pcihf_xor_hash::<Vec<u8>, _>(&[], &rf()), Err(Error::TooShort(0)));
    }

    #[test]
    fn modular_sum_wraps_at_160_bits() {
        let a = PcihfDigest([0xff; DIGEST_BYTES]);
        let mut one = [0u8; DIGEST_BYTES];
        one[DIGEST_BYTES - 1] = 1;
        assert_eq!(a.add(&PcihfDigest(one)), PcihfDigest::default());
    }

    #[test]
    fn corpus_shape_and_fixture_round_trip() {
        let corpus = collision_corpus();
        assert_eq!(corpus.len(), 5);
        assert_eq!(corpus.iter().filter(|p| p.combiner == Combiner::Modular).count(), 4);
        let text = corpus_to_fixture(&corpus);
        assert_eq!(parse_corpus_fixture(&text).unwrap(), corpus);
        assert!(parse_corpus_fixture("x modular zz 00").is_err());
    }

    #[test]
    fn chained_hash_separates_corpus() {
        let p = corpus_params();
        let crf = RandomizeFn::for_params(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for pair in collision_corpus() {
            let need = p.chain_len(pair.first.len().max(pair.second.len()) + 1);
            let chain = RandomChain::sample(p.k(), need, &mut rng);
            let a = chained_digest(&pair.first, &p, &chain, &crf).unwrap();
            let b = chained_digest(&pair.second, &p, &chain, &crf).unwrap();
            assert_ne!(a, b, "{}", pair.label);
        }
    }
}
