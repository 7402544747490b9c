//! The d-wise chained set hash and its incremental update engine.
//!
//! For an `m`-block document `D_1..D_m` and a random chain `R_1..R_{m+d-1}`
//! of `k`-bit sub-blocks, link `i` is
//!
//! ```text
//! L_i = R_i || R_{i+1} || ... || R_{i+d-1} || D_i        (2b bits)
//! ```
//!
//! and the hash is `mu = sum_i R(L_i) mod 2^3200`. An edit only touches the
//! links whose chain window or document block changed, so an update
//! subtracts the digests of those links, splices the chain, and adds the
//! digests of the replacement links.
//!
//! Chain conventions:
//! - insert of `h` blocks after `D_i`: `h` fresh sub-blocks are placed right
//!   after `R_i`;
//! - replace: the chain is unchanged;
//! - delete of `D_s..D_e`: sub-blocks `R_{s+1}..R_{e+1}` are removed.

use bitvec::field::BitField;
use bitvec::prelude::*;
use rand::RngCore;
use rayon::prelude::*;

use crate::accumulator::Accumulator;
use crate::document::{BlockDocument, EditOp, SchemeParams};
use crate::error::{Error, Result};
use crate::randomizer::Randomize;

type Bits = BitVec<u8, Msb0>;

/// An ordered sequence of `k`-bit random sub-blocks, packed MSB first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RandomChain {
    k: u32,
    bits: Bits,
}

impl std::fmt::Debug for RandomChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomChain")
            .field("k", &self.k)
            .field("len", &self.len())
            .finish()
    }
}

impl RandomChain {
    /// Draws `count` uniform `k`-bit sub-blocks.
    pub fn sample<R: RngCore + ?Sized>(k: u32, count: usize, rng: &mut R) -> Self {
        let nbits = count * k as usize;
        let mut bytes = vec![0u8; nbits.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        let mut bits = Bits::from_vec(bytes);
        bits.truncate(nbits);
        RandomChain { k, bits }
    }

    /// Builds a chain from explicit sub-blocks, each given as the low `k`
    /// bits of a big-endian byte string of `ceil(k/8)` bytes.
    pub fn from_sub_blocks<B: AsRef<[u8]>>(k: u32, blocks: &[B]) -> Result<Self> {
        let kb = (k as usize).div_ceil(8);
        let skip = kb * 8 - k as usize;
        let mut bits = Bits::with_capacity(blocks.len() * k as usize);
        for blk in blocks {
            let blk = blk.as_ref();
            if blk.len() != kb {
                return Err(Error::InvalidParams(format!(
                    "sub-block of {} bytes, expected {kb}",
                    blk.len()
                )));
            }
            let src = blk.view_bits::<Msb0>();
            if src[..skip].any() {
                return Err(Error::InvalidParams(format!("sub-block exceeds {k} bits")));
            }
            bits.extend_from_bitslice(&src[skip..]);
        }
        Ok(RandomChain { k, bits })
    }

    /// Decodes `count` sub-blocks packed MSB first; trailing padding bits in
    /// the last byte must be zero.
    pub fn from_packed(k: u32, count: usize, packed: &[u8]) -> Result<Self> {
        let nbits = count
            .checked_mul(k as usize)
            .ok_or_else(|| Error::MalformedSignature("chain length overflows".into()))?;
        if packed.len() != nbits.div_ceil(8) {
            return Err(Error::MalformedSignature(format!(
                "chain field is {} bytes, expected {}",
                packed.len(),
                nbits.div_ceil(8)
            )));
        }
        let mut bits = Bits::from_slice(packed);
        if bits[nbits..].any() {
            return Err(Error::MalformedSignature("non-zero chain padding bits".into()));
        }
        bits.truncate(nbits);
        Ok(RandomChain { k, bits })
    }

    /// Packed MSB-first encoding, zero padded to a whole byte.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut bits = self.bits.clone();
        bits.set_uninitialized(false);
        bits.into_vec()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of sub-blocks.
    pub fn len(&self) -> usize {
        self.bits.len() / self.k as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    /// Sub-block `i` (1-based) as a bit slice.
    pub fn sub_block(&self, i: usize) -> Option<&BitSlice<u8, Msb0>> {
        let k = self.k as usize;
        if i == 0 || i > self.len() {
            return None;
        }
        Some(&self.bits[(i - 1) * k..i * k])
    }

    /// The first `count` sub-blocks.
    pub fn prefix(&self, count: usize) -> RandomChain {
        let k = self.k as usize;
        RandomChain {
            k: self.k,
            bits: self.bits[..count * k].to_bitvec(),
        }
    }

    /// True when no two sub-blocks are equal.
    pub fn all_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.len());
        (1..=self.len()).all(|i| seen.insert(self.sub_block(i).unwrap().to_bitvec()))
    }

    /// Writes `R_start .. R_{start+count-1}` into `out`, which must hold
    /// exactly `count * k / 8` bytes.
    fn write_window(&self, start: usize, count: usize, out: &mut [u8]) {
        let k = self.k as usize;
        let from = (start - 1) * k;
        let win = &self.bits[from..from + count * k];
        debug_assert_eq!(win.len(), out.len() * 8);
        if from.is_multiple_of(8) {
            out.copy_from_slice(&self.bits.as_raw_slice()[from / 8..from / 8 + out.len()]);
        } else {
            for (byte, chunk) in out.iter_mut().zip(win.chunks_exact(8)) {
                *byte = chunk.load_be::<u8>();
            }
        }
    }

    fn insert_at(&mut self, index0: usize, fresh: &RandomChain) {
        let k = self.k as usize;
        let tail = self.bits.split_off(index0 * k);
        self.bits.extend_from_bitslice(&fresh.bits);
        self.bits.extend_from_bitslice(&tail);
    }

    fn remove_range(&mut self, index0: usize, count: usize) {
        let k = self.k as usize;
        let tail = self.bits.split_off((index0 + count) * k);
        self.bits.truncate(index0 * k);
        self.bits.extend_from_bitslice(&tail);
    }
}

fn check_chain(chain: &RandomChain, doc: &BlockDocument) -> Result<()> {
    let params = doc.params();
    if chain.k() != params.k() {
        return Err(Error::InvalidParams(format!(
            "chain sub-blocks are {} bits, parameters say k = {}",
            chain.k(),
            params.k()
        )));
    }
    let expected = params.chain_len(doc.len());
    if chain.len() != expected {
        return Err(Error::ChainLengthMismatch {
            expected,
            actual: chain.len(),
        });
    }
    Ok(())
}

fn write_link(chain: &RandomChain, doc: &BlockDocument, i: usize, out: &mut [u8]) {
    let params = doc.params();
    let bb = params.block_bytes();
    chain.write_window(i, params.d() as usize, &mut out[..bb]);
    out[bb..].copy_from_slice(doc.block(i).expect("link index checked"));
}

/// Link `i` (1-based): `R_i || ... || R_{i+d-1} || D_i`.
pub fn link_bytes(chain: &RandomChain, doc: &BlockDocument, i: usize) -> Result<Vec<u8>> {
    check_chain(chain, doc)?;
    if i == 0 || i > doc.len() {
        return Err(Error::IndexOutOfRange(format!(
            "link {i} of a {}-block document",
            doc.len()
        )));
    }
    let mut out = vec![0u8; doc.params().link_bytes()];
    write_link(chain, doc, i, &mut out);
    Ok(out)
}

fn link_digest<R: Randomize>(
    chain: &RandomChain,
    doc: &BlockDocument,
    i: usize,
    rf: &R,
    buf: &mut [u8],
) -> Result<Accumulator> {
    write_link(chain, doc, i, buf);
    rf.randomize(buf)
}

/// `mu = sum_{i=1}^{m} R(L_i) mod 2^3200`, evaluated left to right: `m`
/// randomize calls and `m - 1` additions.
pub fn hash_full<R: Randomize>(chain: &RandomChain, doc: &BlockDocument, rf: &R) -> Result<Accumulator> {
    check_chain(chain, doc)?;
    let mut buf = vec![0u8; doc.params().link_bytes()];
    let mut mu = link_digest(chain, doc, 1, rf, &mut buf)?;
    for i in 2..=doc.len() {
        let r = link_digest(chain, doc, i, rf, &mut buf)?;
        mu = rf.add(mu, r);
    }
    Ok(mu)
}

/// Same value as [`hash_full`], with the link digests computed on the rayon
/// pool. The operation counts are identical.
pub fn hash_full_parallel<R: Randomize>(chain: &RandomChain, doc: &BlockDocument, rf: &R) -> Result<Accumulator> {
    check_chain(chain, doc)?;
    let link_len = doc.params().link_bytes();
    let digests = (1..=doc.len())
        .into_par_iter()
        .map_init(|| vec![0u8; link_len], |buf, i| link_digest(chain, doc, i, rf, buf))
        .collect::<Result<Vec<_>>>()?;
    let mut it = digests.into_iter();
    let first = it.next().expect("documents have at least one block");
    Ok(it.fold(first, |acc, r| rf.add(acc, r)))
}

/// Number of fresh sub-blocks an edit consumes.
pub fn fresh_needed(op: &EditOp, params: &SchemeParams) -> usize {
    match op {
        EditOp::Insert { .. } => op.block_count(params),
        EditOp::Replace { .. } | EditOp::Delete { .. } => 0,
    }
}

/// Links to drop (old indexing) and to add (new indexing), inclusive ranges
/// starting at the same index.
fn affected_links(op: &EditOp, params: &SchemeParams) -> (usize, usize, usize) {
    let d = params.d() as usize;
    let lo_after = |i: usize| (i + 2).saturating_sub(d).max(1);
    match op {
        EditOp::Insert { after, .. } => {
            let h = op.block_count(params);
            // after = 0 leaves the old range empty (hi < lo)
            (lo_after(*after), *after, after + h)
        }
        EditOp::Replace { start, .. } => {
            let h = op.block_count(params);
            (*start, start + h - 1, start + h - 1)
        }
        EditOp::Delete { start, end } => (lo_after(*start), end + 1, *start),
    }
}

/// Updates `mu`, `chain` and `doc` in place for `op`.
///
/// Requires `mu == hash_full(chain, doc)`; the result then satisfies the
/// same relation for the edited chain and document. Nothing is modified
/// when an error is returned.
pub fn delta_update_in_place<R: Randomize>(
    mu: &mut Accumulator,
    chain: &mut RandomChain,
    doc: &mut BlockDocument,
    op: &EditOp,
    fresh: &RandomChain,
    rf: &R,
) -> Result<()> {
    check_chain(chain, doc)?;
    op.check_against(doc)?;
    let params = *doc.params();
    let needed = fresh_needed(op, &params);
    if fresh.len() != needed || (needed > 0 && fresh.k() != params.k()) {
        return Err(Error::FreshBlockCountMismatch {
            expected: needed,
            actual: fresh.len(),
        });
    }

    let (lo, hi_old, hi_new) = affected_links(op, &params);
    let mut buf = vec![0u8; params.link_bytes()];
    let mut acc = *mu;
    for j in lo..=hi_old {
        let r = link_digest(chain, doc, j, rf, &mut buf)?;
        acc = rf.sub(acc, r);
    }

    doc.apply_edit_in_place(op)?;
    match op {
        EditOp::Insert { after, .. } => chain.insert_at(*after, fresh),
        EditOp::Replace { .. } => {}
        EditOp::Delete { start, end } => chain.remove_range(*start, end - start + 1),
    }
    debug_assert_eq!(chain.len(), params.chain_len(doc.len()));

    for j in lo..=hi_new {
        let r = link_digest(chain, doc, j, rf, &mut buf)?;
        acc = rf.add(acc, r);
    }
    *mu = acc;
    Ok(())
}

/// Functional form of [`delta_update_in_place`]: returns the new hash and
/// chain, leaving the inputs untouched.
pub fn delta_update<R: Randomize>(
    old_mu: &Accumulator,
    chain: &RandomChain,
    doc: &BlockDocument,
    op: &EditOp,
    fresh: &RandomChain,
    rf: &R,
) -> Result<(Accumulator, RandomChain)> {
    let mut mu = *old_mu;
    let mut chain = chain.clone();
    let mut doc = doc.clone();
    delta_update_in_place(&mut mu, &mut chain, &mut doc, op, fresh, rf)?;
    Ok((mu, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomizer::RandomizeFn;
    use num_bigint::BigUint;
    use num_traits::One;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(b: u32, d: u32) -> SchemeParams {
        SchemeParams::new(b, b / d, d).unwrap()
    }

    fn random_doc(p: SchemeParams, data_blocks: usize, rng: &mut impl Rng) -> BlockDocument {
        let mut raw = vec![0u8; data_blocks * p.block_bytes()];
        rng.fill(&mut raw[..]);
        BlockDocument::pad(&raw, p)
    }

    /// Independent oracle: each link is assembled from sub-blocks read bit
    /// by bit, and the sum is taken over arbitrary-precision integers.
    fn oracle_hash(chain: &RandomChain, doc: &BlockDocument, rf: &RandomizeFn) -> BigUint {
        let p = doc.params();
        let modulus = BigUint::one() << 3200;
        let mut sum = BigUint::default();
        for i in 1..=doc.len() {
            let mut bits: Vec<bool> = Vec::new();
            for j in i..i + p.d() as usize {
                bits.extend(chain.sub_block(j).unwrap().iter().map(|b| *b));
            }
            let mut link: Vec<u8> = bits
                .chunks(8)
                .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
                .collect();
            link.extend_from_slice(doc.block(i).unwrap());
            sum += BigUint::from_bytes_be(&rf.expand(&link));
        }
        sum % modulus
    }

    fn big(a: &Accumulator) -> BigUint {
        BigUint::from_bytes_be(&a.to_be_bytes())
    }

    #[test]
    fn link_bytes_d2() {
        let p = SchemeParams::new(16, 8, 2).unwrap();
        let doc = BlockDocument::pad(&[0xab], p);
        let chain = RandomChain::from_sub_blocks(8, &[[0x11], [0x22]]).unwrap();
        assert_eq!(link_bytes(&chain, &doc, 1).unwrap(), vec![0x11, 0x22, 0xab, 0x80]);
    }

    #[test]
    fn link_bytes_d3_unaligned() {
        // b = 24, k = 8, d = 3
        let p = SchemeParams::new(24, 8, 3).unwrap();
        let doc = BlockDocument::pad(&[1, 2, 3], p);
        let chain = RandomChain::from_sub_blocks(8, &[[0xa1], [0xa2], [0xa3], [0xa4]]).unwrap();
        assert_eq!(link_bytes(&chain, &doc, 2).unwrap(), vec![0xa2, 0xa3, 0xa4, 0x80, 0, 0]);
        assert!(matches!(link_bytes(&chain, &doc, 0), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(link_bytes(&chain, &doc, 3), Err(Error::IndexOutOfRange(_))));

        // k = 4: sub-blocks straddle byte boundaries at odd offsets
        let p = SchemeParams::new(8, 4, 2).unwrap();
        let doc = BlockDocument::pad(&[0x77], p);
        let chain = RandomChain::from_sub_blocks(4, &[[0x1], [0x2], [0x3]]).unwrap();
        assert_eq!(link_bytes(&chain, &doc, 1).unwrap(), vec![0x12, 0x77]);
        assert_eq!(link_bytes(&chain, &doc, 2).unwrap(), vec![0x23, 0x80]);
    }

    #[test]
    fn chain_length_is_checked() {
        let p = params(256, 2);
        let doc = BlockDocument::pad(b"x", p);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let short = RandomChain::sample(p.k(), 1, &mut rng);
        let rf = RandomizeFn::for_params(&p);
        assert_eq!(
            hash_full(&short, &doc, &rf),
            Err(Error::ChainLengthMismatch { expected: 2, actual: 1 })
        );
    }

    #[test]
    fn single_block_is_one_digest() {
        let p = params(256, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let doc = BlockDocument::pad(b"", p);
        let chain = RandomChain::sample(p.k(), 2, &mut rng);
        let rf = RandomizeFn::for_params(&p);
        let link = link_bytes(&chain, &doc, 1).unwrap();
        assert_eq!(hash_full(&chain, &doc, &rf).unwrap(), rf.randomize(&link).unwrap());
    }

    #[test]
    fn sum_order_does_not_matter() {
        let p = params(256, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let doc = random_doc(p, 3, &mut rng);
        assert_eq!(doc.len(), 4);
        let chain = RandomChain::sample(p.k(), p.chain_len(4), &mut rng);
        let rf = RandomizeFn::for_params(&p);
        let mut digests: Vec<Accumulator> = (1..=4)
            .map(|i| rf.randomize(&link_bytes(&chain, &doc, i).unwrap()).unwrap())
            .collect();
        let full = hash_full(&chain, &doc, &rf).unwrap();
        let rev = digests.iter().rev().fold(Accumulator::zero(), |a, &r| a + r);
        assert_eq!(full, rev);
        for _ in 0..10 {
            digests.shuffle(&mut rng);
            assert_eq!(full, digests.iter().fold(Accumulator::zero(), |a, &r| a + r));
        }
        assert_eq!(full, hash_full_parallel(&chain, &doc, &rf).unwrap());
    }

    #[test]
    fn matches_big_integer_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (b, d) in [(256, 2), (256, 4), (24, 3), (64, 8), (256, 256)] {
            let p = params(b, d);
            let doc = random_doc(p, 5, &mut rng);
            assert_eq!(doc.len(), 6);
            let chain = RandomChain::sample(p.k(), p.chain_len(6), &mut rng);
            let rf = RandomizeFn::for_params(&p);
            assert_eq!(
                big(&hash_full(&chain, &doc, &rf).unwrap()),
                oracle_hash(&chain, &doc, &rf)
            );
        }
    }

    #[test]
    fn swapping_blocks_changes_hash() {
        let p = params(256, 2);
        let rf = RandomizeFn::for_params(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let doc = random_doc(p, 2, &mut rng);
            let chain = loop {
                let c = RandomChain::sample(p.k(), p.chain_len(3), &mut rng);
                if c.all_distinct() {
                    break c;
                }
            };
            let mut swapped = doc.clone();
            swapped.swap_blocks(1, 2);
            assert_ne!(
                hash_full(&chain, &doc, &rf).unwrap(),
                hash_full(&chain, &swapped, &rf).unwrap()
            );
        }
    }

    #[test]
    fn packed_round_trip_and_padding_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let chain = RandomChain::sample(3, 5, &mut rng);
        let packed = chain.to_packed();
        assert_eq!(packed.len(), 2);
        assert_eq!(packed[1] & 0x01, 0);
        assert_eq!(RandomChain::from_packed(3, 5, &packed).unwrap(), chain);
        let mut bad = packed.clone();
        bad[1] |= 1;
        assert!(RandomChain::from_packed(3, 5, &bad).is_err());
        assert!(RandomChain::from_packed(3, 5, &packed[..1]).is_err());
    }

    fn random_op(doc: &BlockDocument, rng: &mut impl Rng) -> EditOp {
        let m = doc.len();
        let bb = doc.params().block_bytes();
        let payload = |rng: &mut dyn rand::RngCore, h: usize| {
            let mut v = vec![0u8; h * bb];
            rng.fill_bytes(&mut v);
            v
        };
        loop {
            match rng.gen_range(0..3) {
                0 => {
                    let h = rng.gen_range(1..=3);
                    return EditOp::Insert {
                        after: rng.gen_range(0..m),
                        payload: payload(rng, h),
                    };
                }
                1 if m >= 2 => {
                    let start = rng.gen_range(1..m);
                    let h = rng.gen_range(1..=(m - start).min(3));
                    return EditOp::Replace {
                        start,
                        payload: payload(rng, h),
                    };
                }
                2 if m >= 2 => {
                    let start = rng.gen_range(1..m);
                    let end = rng.gen_range(start..m).min(start + 3);
                    return EditOp::Delete { start, end };
                }
                _ => {}
            }
        }
    }

    #[test]
    fn every_edit_matches_from_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &d in &[2u32, 3, 4, 8] {
            let p = params(24 * d, d);
            let rf = RandomizeFn::for_params(&p);
            for _ in 0..40 {
                let doc = random_doc(p, 19, &mut rng);
                let chain = RandomChain::sample(p.k(), p.chain_len(doc.len()), &mut rng);
                let mu = hash_full(&chain, &doc, &rf).unwrap();
                let op = random_op(&doc, &mut rng);
                let fresh = RandomChain::sample(p.k(), fresh_needed(&op, &p), &mut rng);
                let (mu2, chain2) = delta_update(&mu, &chain, &doc, &op, &fresh, &rf).unwrap();
                let doc2 = doc.apply_edit(&op).unwrap();
                assert_eq!(mu2, hash_full(&chain2, &doc2, &rf).unwrap(), "{op} d={d}");
            }
        }
    }

    #[test]
    fn insert_places_fresh_after_r_i() {
        let p = SchemeParams::new(16, 8, 2).unwrap();
        let doc = BlockDocument::pad(b"AABB", p);
        let chain = RandomChain::from_sub_blocks(8, &[[1], [2], [3], [4]]).unwrap();
        let rf = RandomizeFn::for_params(&p);
        let mu = hash_full(&chain, &doc, &rf).unwrap();
        let fresh = RandomChain::from_sub_blocks(8, &[[9]]).unwrap();
        let op = EditOp::Insert {
            after: 1,
            payload: b"XX".to_vec(),
        };
        let (_, chain2) = delta_update(&mu, &chain, &doc, &op, &fresh, &rf).unwrap();
        assert_eq!(
            chain2,
            RandomChain::from_sub_blocks(8, &[[1], [9], [2], [3], [4]]).unwrap()
        );

        let op = EditOp::Delete { start: 1, end: 1 };
        let none = RandomChain::from_sub_blocks::<[u8; 1]>(8, &[]).unwrap();
        let (_, chain3) = delta_update(&mu, &chain, &doc, &op, &none, &rf).unwrap();
        assert_eq!(chain3, RandomChain::from_sub_blocks(8, &[[1], [3], [4]]).unwrap());
    }

    #[test]
    fn fresh_count_is_checked() {
        let p = params(256, 2);
        let rf = RandomizeFn::for_params(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let doc = random_doc(p, 3, &mut rng);
        let chain = RandomChain::sample(p.k(), p.chain_len(doc.len()), &mut rng);
        let mu = hash_full(&chain, &doc, &rf).unwrap();
        let two = RandomChain::sample(p.k(), 2, &mut rng);
        let op = EditOp::Insert {
            after: 1,
            payload: vec![0; 32],
        };
        assert_eq!(
            delta_update(&mu, &chain, &doc, &op, &two, &rf),
            Err(Error::FreshBlockCountMismatch { expected: 1, actual: 2 })
        );
        let op = EditOp::Replace {
            start: 1,
            payload: vec![0; 32],
        };
        assert!(matches!(
            delta_update(&mu, &chain, &doc, &op, &two, &rf),
            Err(Error::FreshBlockCountMismatch { expected: 0, .. })
        ));
        let op = EditOp::Delete { start: 2, end: 4 };
        let none = RandomChain::sample(p.k(), 0, &mut rng);
        assert!(matches!(
            delta_update(&mu, &chain, &doc, &op, &none, &rf),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn delta_equals_from_scratch(seed in any::<u64>(), d_idx in 0usize..4, data_blocks in 0usize..64) {
            let d = [2u32, 3, 4, 8][d_idx];
            let p = params(8 * d, d);
            let rf = RandomizeFn::for_params(&p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let doc = random_doc(p, data_blocks, &mut rng);
            let chain = RandomChain::sample(p.k(), p.chain_len(doc.len()), &mut rng);
            let mu = hash_full(&chain, &doc, &rf).unwrap();
            if doc.len() >= 2 || data_blocks == 0 {
                let op = random_op(&doc, &mut rng);
                let fresh = RandomChain::sample(p.k(), fresh_needed(&op, &p), &mut rng);
                let (mu2, chain2) = delta_update(&mu, &chain, &doc, &op, &fresh, &rf).unwrap();
                let doc2 = doc.apply_edit(&op).unwrap();
                prop_assert_eq!(mu2, hash_full(&chain2, &doc2, &rf).unwrap());
            }
        }
    }
}
