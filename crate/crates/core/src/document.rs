//! Block documents, padding and the edit algebra.
//!
//! A raw byte string is padded to whole `b`-bit blocks with the `10*` rule:
//! a partial final block is completed by a `1` bit and zeros, and a string
//! whose length is already a multiple of `b` (including the empty string)
//! gets one extra block `1 0^{b-1}`. The final block therefore always
//! carries the marker and is never the target of an edit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const MARKER: u8 = 0x80;

/// Block geometry `(b, k, d)` with `b = k * d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    b: u32,
    k: u32,
    d: u32,
}

impl SchemeParams {
    pub fn new(b: u32, k: u32, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must be at least 2, got {d}")));
        }
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if u64::from(k) * u64::from(d) != u64::from(b) {
            return Err(Error::InvalidParams(format!("b = {b} is not k * d = {k} * {d}")));
        }
        if !b.is_multiple_of(8) {
            return Err(Error::InvalidParams(format!("b = {b} is not a multiple of 8")));
        }
        // encoded as u16 in the signature header
        if b > u32::from(u16::MAX) {
            return Err(Error::InvalidParams(format!("b = {b} exceeds 65535")));
        }
        Ok(SchemeParams { b, k, d })
    }

    /// The pair-chaining geometry `(b, b/2, 2)`.
    pub fn pairwise(b: u32) -> Result<Self> {
        Self::new(b, b / 2, 2)
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn block_bytes(&self) -> usize {
        self.b as usize / 8
    }

    /// Bytes fed to the randomize function per link (2b bits).
    pub fn link_bytes(&self) -> usize {
        2 * self.block_bytes()
    }

    /// Number of chain sub-blocks for an `m`-block document.
    pub fn chain_len(&self, m: usize) -> usize {
        m + self.d as usize - 1
    }
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams { b: 256, k: 128, d: 2 }
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(b={}, k={}, d={})", self.b, self.k, self.d)
    }
}

/// A padded document: `m >= 1` blocks of exactly `b` bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlockDocument {
    params: SchemeParams,
    data: Vec<u8>,
    original_bit_length: u64,
}

impl fmt::Debug for BlockDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockDocument")
            .field("params", &self.params)
            .field("blocks", &self.len())
            .field("original_bit_length", &self.original_bit_length)
            .finish()
    }
}

impl BlockDocument {
    /// Pads `raw` into blocks of `params.b` bits.
    pub fn pad(raw: &[u8], params: SchemeParams) -> Self {
        let bb = params.block_bytes();
        let m = raw.len() / bb + 1;
        let mut data = Vec::with_capacity(m * bb);
        data.extend_from_slice(raw);
        data.push(MARKER);
        data.resize(m * bb, 0);
        BlockDocument {
            params,
            data,
            original_bit_length: raw.len() as u64 * 8,
        }
    }

    /// Builds a document from already padded bytes, checking the marker.
    pub fn from_padded(padded: Vec<u8>, params: SchemeParams) -> Result<Self> {
        let bb = params.block_bytes();
        if padded.is_empty() || !padded.len().is_multiple_of(bb) {
            return Err(Error::MalformedPadding);
        }
        let raw_len = raw_len_of(&padded[padded.len() - bb..]).ok_or(Error::MalformedPadding)? + padded.len() - bb;
        Ok(BlockDocument {
            params,
            data: padded,
            original_bit_length: raw_len as u64 * 8,
        })
    }

    /// Recovers the raw bytes.
    pub fn unpad(&self) -> Result<Vec<u8>> {
        let bb = self.params.block_bytes();
        let last = &self.data[self.data.len() - bb..];
        let tail = raw_len_of(last).ok_or(Error::MalformedPadding)?;
        let mut raw = self.data[..self.data.len() - bb].to_vec();
        raw.extend_from_slice(&last[..tail]);
        Ok(raw)
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    /// Number of blocks `m`.
    pub fn len(&self) -> usize {
        self.data.len() / self.params.block_bytes()
    }

    /// Always false for a well-formed document; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn original_bit_length(&self) -> u64 {
        self.original_bit_length
    }

    /// Block `i`, 1-based.
    pub fn block(&self, i: usize) -> Option<&[u8]> {
        let bb = self.params.block_bytes();
        if i == 0 || i > self.len() {
            return None;
        }
        Some(&self.data[(i - 1) * bb..i * bb])
    }

    pub fn blocks(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.params.block_bytes())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    /// `D<M>`: the document after applying `op`.
    pub fn apply_edit(&self, op: &EditOp) -> Result<BlockDocument> {
        let mut out = self.clone();
        out.apply_edit_in_place(op)?;
        Ok(out)
    }

    pub fn apply_edit_in_place(&mut self, op: &EditOp) -> Result<()> {
        op.check_against(self)?;
        let bb = self.params.block_bytes();
        match op {
            EditOp::Insert { after, payload } => {
                let at = after * bb;
                self.data.splice(at..at, payload.iter().copied());
                self.original_bit_length += payload.len() as u64 * 8;
            }
            EditOp::Replace { start, payload } => {
                let at = (start - 1) * bb;
                self.data[at..at + payload.len()].copy_from_slice(payload);
            }
            EditOp::Delete { start, end } => {
                self.data.drain((start - 1) * bb..end * bb);
                self.original_bit_length -= ((end - start + 1) * bb) as u64 * 8;
            }
        }
        Ok(())
    }

    /// Swaps two blocks. Used to build reordering counterexamples.
    pub fn swap_blocks(&mut self, i: usize, j: usize) {
        let bb = self.params.block_bytes();
        assert!(i >= 1 && j >= 1 && i <= self.len() && j <= self.len());
        if i == j {
            return;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let (head, tail) = self.data.split_at_mut((hi - 1) * bb);
        head[(lo - 1) * bb..lo * bb].swap_with_slice(&mut tail[..bb]);
    }
}

// Length of the data prefix of a final block, or None without a marker.
fn raw_len_of(last: &[u8]) -> Option<usize> {
    let pos = last.iter().rposition(|&b| b != 0)?;
    (last[pos] == MARKER).then_some(pos)
}

/// One block-granular edit. Indices are 1-based block positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EditOp {
    /// Insert `payload` between block `after` and `after + 1`; `after = 0`
    /// prepends.
    Insert { after: usize, payload: Vec<u8> },
    /// Overwrite blocks `start ..= start + payload_blocks - 1`.
    Replace { start: usize, payload: Vec<u8> },
    /// Remove blocks `start ..= end`.
    Delete { start: usize, end: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EditKind {
    Insert,
    Replace,
    Delete,
}

impl fmt::Display for EditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            EditKind::Insert => "insert",
            EditKind::Replace => "replace",
            EditKind::Delete => "delete",
        })
    }
}

impl FromStr for EditKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "insert" => Ok(EditKind::Insert),
            "replace" => Ok(EditKind::Replace),
            "delete" => Ok(EditKind::Delete),
            other => Err(Error::InvalidParams(format!("unknown edit kind {other:?}"))),
        }
    }
}

impl EditOp {
    pub fn kind(&self) -> EditKind {
        match self {
            EditOp::Insert { .. } => EditKind::Insert,
            EditOp::Replace { .. } => EditKind::Replace,
            EditOp::Delete { .. } => EditKind::Delete,
        }
    }

    /// Number of payload blocks for insert/replace, removed blocks for delete.
    pub fn block_count(&self, params: &SchemeParams) -> usize {
        match self {
            EditOp::Insert { payload, .. } | EditOp::Replace { payload, .. } => payload.len() / params.block_bytes(),
            EditOp::Delete { start, end } => end.saturating_sub(*start) + 1,
        }
    }

    /// Validates the op against `doc`. The final (padding) block is never
    /// editable.
    pub fn check_against(&self, doc: &BlockDocument) -> Result<()> {
        let m = doc.len();
        let bb = doc.params().block_bytes();
        let check_payload = |payload: &[u8]| {
            if payload.is_empty() || !payload.len().is_multiple_of(bb) {
                Err(Error::IndexOutOfRange(format!(
                    "payload of {} bytes is not a positive multiple of the {bb}-byte block",
                    payload.len()
                )))
            } else {
                Ok(())
            }
        };
        match self {
            EditOp::Insert { after, payload } => {
                check_payload(payload)?;
                if *after >= m {
                    return Err(Error::IndexOutOfRange(format!(
                        "insert after block {after} of {m}: the padding block is protected"
                    )));
                }
            }
            EditOp::Replace { start, payload } => {
                check_payload(payload)?;
                let h = payload.len() / bb;
                if *start == 0 || start + h > m {
                    return Err(Error::IndexOutOfRange(format!(
                        "replace of blocks {start}..={} in a {m}-block document",
                        start + h - 1
                    )));
                }
            }
            EditOp::Delete { start, end } => {
                if *start == 0 || start > end || *end > m {
                    return Err(Error::IndexOutOfRange(format!(
                        "delete of blocks {start}..={end} in a {m}-block document"
                    )));
                }
                if *start == 1 && *end == m {
                    return Err(Error::EmptyResult);
                }
                if *end == m {
                    return Err(Error::IndexOutOfRange(format!(
                        "delete of blocks {start}..={end}: the padding block is protected"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditOp::Insert { after, payload } => write!(f, "insert {after} {}", hex::encode(payload)),
            EditOp::Replace { start, payload } => write!(f, "replace {start} {}", hex::encode(payload)),
            EditOp::Delete { start, end } => write!(f, "delete {start} {end}"),
        }
    }
}

/// Parses an edit script: one op per line, blank lines and `#` comments
/// ignored.
///
/// ```text
/// insert <i> <hex-payload>
/// replace <i> <hex-payload>
/// delete <i> <j>
/// ```
pub fn parse_edit_script(text: &str, params: &SchemeParams) -> Result<Vec<EditOp>> {
    let hex_per_block = params.block_bytes() * 2;
    let mut ops = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |reason: String| Error::MalformedScript { line: line_no, reason };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad index {s:?}")));
        let payload = |s: &str| {
            if s.is_empty() || !s.len().is_multiple_of(hex_per_block) {
                return Err(err(format!(
                    "payload has {} hex digits, not a positive multiple of {hex_per_block}",
                    s.len()
                )));
            }
            hex::decode(s).map_err(|e| err(format!("bad hex payload: {e}")))
        };
        let op = match fields[0] {
            "insert" => EditOp::Insert {
                after: index(fields[1])?,
                payload: payload(fields[2])?,
            },
            "replace" => EditOp::Replace {
                start: index(fields[1])?,
                payload: payload(fields[2])?,
            },
            "delete" => EditOp::Delete {
                start: index(fields[1])?,
                end: index(fields[2])?,
            },
            other => return Err(err(format!("unknown operation {other:?}"))),
        };
        ops.push(op);
    }
    Ok(ops)
}
