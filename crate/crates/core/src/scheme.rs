//! The incremental signature scheme: key generation, signing, verification
//! and incremental update, plus the binary signature format.
//!
//! The underlying signature backend only ever signs the 408-byte string
//! `mu || l` (400-byte accumulator, 8-byte big-endian block count).

use ed25519_dalek::{Signer, SigningKey, Verifier, VerifyingKey};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::accumulator::{Accumulator, ACC_BYTES};
use crate::chainhash::{self, RandomChain};
use crate::document::{BlockDocument, EditOp, SchemeParams};
use crate::error::{Error, Result};
use crate::randomizer::{Randomize, RandomizeFn};

/// Length of the message handed to the backend.
pub const SIGNED_MESSAGE_BYTES: usize = ACC_BYTES + 8;

pub const MAGIC: &[u8; 4] = b"ISIG";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_BYTES: usize = 4 + 1 + 2 + 2 + 2 + 8;

/// A conventional signature scheme used to authenticate `mu || l`.
pub trait SignatureBackend {
    type SecretKey;
    type PublicKey;

    fn keygen<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Result<(Self::SecretKey, Self::PublicKey)>;
    fn sign(&self, sk: &Self::SecretKey, msg: &[u8]) -> Result<Vec<u8>>;
    fn verify(&self, pk: &Self::PublicKey, msg: &[u8], sig: &[u8]) -> bool;
}

/// Ed25519 (RFC 8032) backend.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ed25519Backend;

impl SignatureBackend for Ed25519Backend {
    type SecretKey = SigningKey;
    type PublicKey = VerifyingKey;

    fn keygen<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Result<(SigningKey, VerifyingKey)> {
        let sk = SigningKey::generate(rng);
        let pk = sk.verifying_key();
        Ok((sk, pk))
    }

    fn sign(&self, sk: &SigningKey, msg: &[u8]) -> Result<Vec<u8>> {
        Ok(sk.sign(msg).to_bytes().to_vec())
    }

    fn verify(&self, pk: &VerifyingKey, msg: &[u8], sig: &[u8]) -> bool {
        match ed25519_dalek::Signature::from_slice(sig) {
            Ok(sig) => pk.verify(msg, &sig).is_ok(),
            Err(_) => false,
        }
    }
}

/// Deterministic keyed-hash backend for tests and fixtures.
///
/// The "public" key equals the secret key, so this is not a public-key
/// scheme and must not be used outside tests.
#[derive(Clone, Copy, Debug, Default)]
pub struct TestBackend;

impl TestBackend {
    fn tag(key: &[u8; 32], msg: &[u8]) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"incsig-test-backend");
        h.update(key);
        h.update(msg);
        h.finalize().into()
    }
}

impl SignatureBackend for TestBackend {
    type SecretKey = [u8; 32];
    type PublicKey = [u8; 32];

    fn keygen<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Result<([u8; 32], [u8; 32])> {
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        Ok((key, key))
    }

    fn sign(&self, sk: &[u8; 32], msg: &[u8]) -> Result<Vec<u8>> {
        Ok(Self::tag(sk, msg).to_vec())
    }

    fn verify(&self, pk: &[u8; 32], msg: &[u8], sig: &[u8]) -> bool {
        sig == Self::tag(pk, msg)
    }
}

/// `(R_1 .. R_{m+d-1}, mu, l, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementalSignature {
    pub params: SchemeParams,
    pub chain: RandomChain,
    pub mu: Accumulator,
    pub length_blocks: u64,
    pub inner_sig: Vec<u8>,
}

/// The string the backend signs: `mu || l`.
pub fn signed_message(mu: &Accumulator, length_blocks: u64) -> [u8; SIGNED_MESSAGE_BYTES] {
    let mut msg = [0u8; SIGNED_MESSAGE_BYTES];
    msg[..ACC_BYTES].copy_from_slice(&mu.to_be_bytes());
    msg[ACC_BYTES..].copy_from_slice(&length_blocks.to_be_bytes());
    msg
}

impl IncrementalSignature {
    /// Bits of random chain carried by the signature, `(m + d - 1) k`.
    pub fn chain_overhead_bits(&self) -> usize {
        self.chain.bit_len()
    }

    /// Serializes to the `ISIG` v1 format:
    ///
    /// ```text
    /// "ISIG" | version u8 | b u16 | k u16 | d u16 | l u64
    ///        | chain (ceil((l+d-1)k/8) bytes) | mu (400 bytes) | sig_len u32 | sig
    /// ```
    ///
    /// All integers big-endian.
    pub fn encode(&self) -> Vec<u8> {
        let chain = self.chain.to_packed();
        let mut out = Vec::with_capacity(HEADER_BYTES + chain.len() + ACC_BYTES + 4 + self.inner_sig.len());
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&(self.params.b() as u16).to_be_bytes());
        out.extend_from_slice(&(self.params.k() as u16).to_be_bytes());
        out.extend_from_slice(&(self.params.d() as u16).to_be_bytes());
        out.extend_from_slice(&self.length_blocks.to_be_bytes());
        out.extend_from_slice(&chain);
        out.extend_from_slice(&self.mu.to_be_bytes());
        out.extend_from_slice(&(self.inner_sig.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.inner_sig);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |why: &str| Error::MalformedSignature(why.to_string());
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4).map_err(|_| bad("missing magic"))? != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = r.take(1)?[0];
        if version != FORMAT_VERSION {
            return Err(Error::MalformedSignature(format!("unsupported version {version}")));
        }
        let b = r.u16()?;
        let k = r.u16()?;
        let d = r.u16()?;
        let params =
            SchemeParams::new(b.into(), k.into(), d.into()).map_err(|e| Error::MalformedSignature(e.to_string()))?;
        let length_blocks = r.u64()?;
        if length_blocks == 0 {
            return Err(bad("zero block count"));
        }
        let m = usize::try_from(length_blocks).map_err(|_| bad("block count too large"))?;
        let count = m
            .checked_add(d as usize - 1)
            .ok_or_else(|| bad("block count too large"))?;
        let chain_bytes = count
            .checked_mul(k as usize)
            .map(|bits| bits.div_ceil(8))
            .ok_or_else(|| bad("block count too large"))?;
        let chain = RandomChain::from_packed(k.into(), count, r.take(chain_bytes)?)?;
        let mu = Accumulator::from_be_slice(r.take(ACC_BYTES)?).expect("400 bytes");
        let sig_len = r.u32()? as usize;
        let inner_sig = r.take(sig_len)?.to_vec();
        if r.pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(IncrementalSignature {
            params,
            chain,
            mu,
            length_blocks,
            inner_sig,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::MalformedSignature(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// An incremental signature scheme over a fixed geometry, a backend and a
/// randomize function.
#[derive(Clone, Debug)]
pub struct Scheme<B, R = RandomizeFn> {
    params: SchemeParams,
    backend: B,
    rf: R,
    parallel: bool,
}

impl<B: SignatureBackend> Scheme<B, RandomizeFn> {
    /// Uses the default SHA-256 counter-mode randomizer.
    pub fn new(params: SchemeParams, backend: B) -> Self {
        let rf = RandomizeFn::for_params(&params);
        Self::with_randomizer(params, backend, rf)
    }
}

impl<B: SignatureBackend, R: Randomize> Scheme<B, R> {
    pub fn with_randomizer(params: SchemeParams, backend: B, rf: R) -> Self {
        assert_eq!(
            rf.input_len(),
            params.link_bytes(),
            "randomizer sized for another geometry"
        );
        Scheme {
            params,
            backend,
            rf,
            parallel: false,
        }
    }

    /// Hash full documents on the rayon pool.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn randomizer(&self) -> &R {
        &self.rf
    }

    pub fn keygen<G: RngCore + CryptoRng>(&self, rng: &mut G) -> Result<(B::SecretKey, B::PublicKey)> {
        self.backend.keygen(rng)
    }

    fn check_doc(&self, doc: &BlockDocument) -> Result<()> {
        if doc.params() != &self.params {
            return Err(Error::InvalidParams(format!(
                "document padded for {}, scheme uses {}",
                doc.params(),
                self.params
            )));
        }
        Ok(())
    }

    fn hash(&self, chain: &RandomChain, doc: &BlockDocument) -> Result<Accumulator> {
        if self.parallel {
            chainhash::hash_full_parallel(chain, doc, &self.rf)
        } else {
            chainhash::hash_full(chain, doc, &self.rf)
        }
    }

    /// Signs `doc` with a fresh uniformly random chain of `m + d - 1`
    /// sub-blocks.
    pub fn sign<G: RngCore + ?Sized>(
        &self,
        sk: &B::SecretKey,
        doc: &BlockDocument,
        rng: &mut G,
    ) -> Result<IncrementalSignature> {
        self.check_doc(doc)?;
        let chain = RandomChain::sample(self.params.k(), self.params.chain_len(doc.len()), rng);
        self.sign_with_chain(sk, doc, chain)
    }

    /// Signs `doc` using `chain` as the randomness.
    pub fn sign_with_chain(
        &self,
        sk: &B::SecretKey,
        doc: &BlockDocument,
        chain: RandomChain,
    ) -> Result<IncrementalSignature> {
        self.check_doc(doc)?;
        let mu = self.hash(&chain, doc)?;
        let length_blocks = doc.len() as u64;
        let inner_sig = self.backend.sign(sk, &signed_message(&mu, length_blocks))?;
        Ok(IncrementalSignature {
            params: self.params,
            chain,
            mu,
            length_blocks,
            inner_sig,
        })
    }

    /// Recomputes `mu` from the document and the signature's chain, or
    /// `None` when the shapes do not fit. The transmitted `sig.mu` is not
    /// consulted.
    pub fn recompute_mu(&self, doc: &BlockDocument, sig: &IncrementalSignature) -> Option<Accumulator> {
        if sig.params != self.params || doc.params() != &self.params {
            return None;
        }
        if sig.chain.k() != self.params.k() || sig.chain.len() != self.params.chain_len(doc.len()) {
            return None;
        }
        self.hash(&sig.chain, doc).ok()
    }

    pub fn verify(&self, pk: &B::PublicKey, doc: &BlockDocument, sig: &IncrementalSignature) -> bool {
        match self.recompute_mu(doc, sig) {
            Some(mu) => {
                let msg = signed_message(&mu, doc.len() as u64);
                self.backend.verify(pk, &msg, &sig.inner_sig)
            }
            None => false,
        }
    }

    /// Applies `op` to the pair, updating the signature in time
    /// independent of the document length.
    ///
    /// The pair must be valid and `sig.mu` must be the document's hash. On a
    /// backend failure the document and chain are left edited while
    /// `sig.mu`, `sig.length_blocks` and `sig.inner_sig` still describe the
    /// old document.
    pub fn update_in_place<G: RngCore + ?Sized>(
        &self,
        sk: &B::SecretKey,
        doc: &mut BlockDocument,
        sig: &mut IncrementalSignature,
        op: &EditOp,
        rng: &mut G,
    ) -> Result<()> {
        self.check_doc(doc)?;
        let needed = chainhash::fresh_needed(op, &self.params);
        op.check_against(doc)?;
        let fresh = RandomChain::sample(self.params.k(), needed, rng);
        let mut mu = sig.mu;
        chainhash::delta_update_in_place(&mut mu, &mut sig.chain, doc, op, &fresh, &self.rf)?;
        let length_blocks = doc.len() as u64;
        sig.inner_sig = self.backend.sign(sk, &signed_message(&mu, length_blocks))?;
        sig.mu = mu;
        sig.length_blocks = length_blocks;
        Ok(())
    }

    pub fn update<G: RngCore + ?Sized>(
        &self,
        sk: &B::SecretKey,
        doc: &BlockDocument,
        sig: &IncrementalSignature,
        op: &EditOp,
        rng: &mut G,
    ) -> Result<(BlockDocument, IncrementalSignature)> {
        let mut doc = doc.clone();
        let mut sig = sig.clone();
        self.update_in_place(sk, &mut doc, &mut sig, op, rng)?;
        Ok((doc, sig))
    }
}
