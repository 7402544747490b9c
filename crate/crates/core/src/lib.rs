//! Incremental asymmetric signatures over block-structured documents.
//!
//! A document is split into `b`-bit blocks and hashed with a randomized
//! d-wise chain: each block is bound to `d` random `k`-bit sub-blocks
//! (`b = k * d`), every link is expanded to 3200 bits, and the link digests
//! are summed modulo `2^3200`. The sum is signed with a conventional
//! signature scheme. Because the sum is a group element, an insert,
//! replace or delete only has to remove and re-add the digests of the
//! links it touches, so re-signing after an edit costs the same whatever
//! the document length.
//!
//! ```
//! use incsig::{BlockDocument, EditOp, Scheme, SchemeParams, TestBackend};
//! use rand::SeedableRng;
//!
//! let scheme = Scheme::new(SchemeParams::default(), TestBackend);
//! let mut rng = rand::rngs::StdRng::seed_from_u64(7);
//! let (sk, pk) = scheme.keygen(&mut rng).unwrap();
//!
//! let doc = BlockDocument::pad(&[0x41; 100], *scheme.params());
//! let sig = scheme.sign(&sk, &doc, &mut rng).unwrap();
//! assert!(scheme.verify(&pk, &doc, &sig));
//!
//! let op = EditOp::Replace { start: 2, payload: vec![0x42; 32] };
//! let (doc2, sig2) = scheme.update(&sk, &doc, &sig, &op, &mut rng).unwrap();
//! assert!(scheme.verify(&pk, &doc2, &sig2));
//! ```

pub mod accumulator;
pub mod analysis;
pub mod bench;
pub mod chainhash;
pub mod document;
pub mod error;
pub mod legacy;
pub mod randomizer;
pub mod scheme;

pub use accumulator::{Accumulator, ACC_BITS, ACC_BYTES};
pub use chainhash::{delta_update, hash_full, link_bytes, RandomChain};
pub use document::{parse_edit_script, BlockDocument, EditKind, EditOp, SchemeParams};
pub use error::{Error, Result};
pub use randomizer::{Randomize, RandomizeFn};
pub use scheme::{Ed25519Backend, IncrementalSignature, Scheme, SignatureBackend, TestBackend};
