//! The combining group `Z / 2^3200 Z`.
//!
//! An [`Accumulator`] holds a 3200-bit residue as fifty little-endian `u64`
//! limbs. Addition and subtraction propagate carries and borrows across the
//! limbs and silently drop the final carry, which is exactly reduction modulo
//! `2^3200`. The canonical encoding is 400 bytes, big-endian.

use std::fmt;
use std::ops::{Add, AddAssign, Sub, SubAssign};

/// Width of the group in bits.
pub const ACC_BITS: usize = 3200;
/// Length of the canonical encoding.
pub const ACC_BYTES: usize = ACC_BITS / 8;
const LIMBS: usize = ACC_BITS / 64;

/// A reduced element of the additive group modulo `2^3200`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Accumulator {
    // limbs[0] is least significant
    limbs: [u64; LIMBS],
}

impl Accumulator {
    pub const ZERO: Accumulator = Accumulator { limbs: [0; LIMBS] };

    /// The additive identity.
    pub const fn zero() -> Self {
        Self::ZERO
    }

    /// `2^3200 - 1`, the largest representable residue.
    pub const fn max_value() -> Self {
        Accumulator {
            limbs: [u64::MAX; LIMBS],
        }
    }

    pub fn from_u64(v: u64) -> Self {
        let mut limbs = [0; LIMBS];
        limbs[0] = v;
        Accumulator { limbs }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Decodes the canonical 400-byte big-endian form. Every byte string of
    /// that length is a valid (reduced) element.
    pub fn from_be_bytes(bytes: &[u8; ACC_BYTES]) -> Self {
        let mut limbs = [0u64; LIMBS];
        for (i, chunk) in bytes.chunks_exact(8).enumerate() {
            limbs[LIMBS - 1 - i] = u64::from_be_bytes(chunk.try_into().unwrap());
        }
        Accumulator { limbs }
    }

    /// Like [`Accumulator::from_be_bytes`] for an unsized slice; `None` unless
    /// the slice is exactly 400 bytes.
    pub fn from_be_slice(bytes: &[u8]) -> Option<Self> {
        let arr: &[u8; ACC_BYTES] = bytes.try_into().ok()?;
        Some(Self::from_be_bytes(arr))
    }

    pub fn to_be_bytes(&self) -> [u8; ACC_BYTES] {
        let mut out = [0u8; ACC_BYTES];
        for (i, chunk) in out.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&self.limbs[LIMBS - 1 - i].to_be_bytes());
        }
        out
    }

    /// `(self + rhs) mod 2^3200`
    pub fn wrapping_add(&self, rhs: &Self) -> Self {
        let mut out = *self;
        out.add_in_place(rhs);
        out
    }

    /// `(self - rhs) mod 2^3200`
    pub fn wrapping_sub(&self, rhs: &Self) -> Self {
        let mut out = *self;
        out.sub_in_place(rhs);
        out
    }

    fn add_in_place(&mut self, rhs: &Self) {
        let mut carry = false;
        for (a, &b) in self.limbs.iter_mut().zip(rhs.limbs.iter()) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 | c2;
        }
    }

    fn sub_in_place(&mut self, rhs: &Self) {
        let mut borrow = false;
        for (a, &b) in self.limbs.iter_mut().zip(rhs.limbs.iter()) {
            let (d1, b1) = a.overflowing_sub(b);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            *a = d2;
            borrow = b1 | b2;
        }
    }
}

impl Default for Accumulator {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Add for Accumulator {
    type Output = Accumulator;
    fn add(mut self, rhs: Accumulator) -> Accumulator {
        self.add_in_place(&rhs);
        self
    }
}

impl AddAssign for Accumulator {
    fn add_assign(&mut self, rhs: Accumulator) {
        self.add_in_place(&rhs);
    }
}

impl Sub for Accumulator {
    type Output = Accumulator;
    fn sub(mut self, rhs: Accumulator) -> Accumulator {
        self.sub_in_place(&rhs);
        self
    }
}

impl SubAssign for Accumulator {
    fn sub_assign(&mut self, rhs: Accumulator) {
        self.sub_in_place(&rhs);
    }
}

impl fmt::Debug for Accumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hex = hex::encode(self.to_be_bytes());
        write!(f, "Accumulator({}..{})", &hex[..16], &hex[hex.len() - 16..])
    }
}

impl fmt::LowerHex for Accumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.to_be_bytes()))
    }
}
