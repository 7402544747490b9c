//! Closed-form security bounds and cost model.
//!
//! Bounds are exact rationals: the denominators reach `2^{(d-1)b/2+1}`,
//! far outside the range of a float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bench::OpCounters;
use crate::document::SchemeParams;
use crate::error::{Error, Result};

/// Resources granted to a forger.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackBudget {
    /// Signing queries.
    pub q_s: u64,
    /// Update queries.
    pub q_i: u64,
    /// Maximum document length in blocks.
    pub n_max: u64,
    /// Set-collision advantage against the chained hash.
    pub eps_hash: BigRational,
    /// Forgery advantage against the backend signature.
    pub eps_sig: BigRational,
}

impl AttackBudget {
    pub fn new(q_s: u64, q_i: u64, n_max: u64, eps_hash: BigRational, eps_sig: BigRational) -> Result<Self> {
        for (name, e) in [("eps_hash", &eps_hash), ("eps_sig", &eps_sig)] {
            if e.is_negative() || e > &BigRational::one() {
                return Err(Error::InvalidParams(format!("{name} = {e} is not in [0, 1]")));
            }
        }
        Ok(AttackBudget {
            q_s,
            q_i,
            n_max,
            eps_hash,
            eps_sig,
        })
    }

    /// Budget with both assumed advantages set to zero.
    pub fn queries(q_s: u64, q_i: u64, n_max: u64) -> Self {
        AttackBudget {
            q_s,
            q_i,
            n_max,
            eps_hash: BigRational::zero(),
            eps_sig: BigRational::zero(),
        }
    }

    /// Random sub-blocks drawn over all queries, `q_s (n_max + 1) + q_i`.
    pub fn random_blocks(&self) -> BigInt {
        BigInt::from(self.q_s) * (BigInt::from(self.n_max) + 1) + BigInt::from(self.q_i)
    }
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

fn clamp(r: BigRational) -> BigRational {
    r.min(BigRational::one())
}

/// Forgery bound for pair chaining (`k = b/2`, `d = 2`):
/// `(q^2 - q) / 2^{b/2+1} + eps_hash + eps_sig`, clamped to 1.
pub fn bound_incsig(budget: &AttackBudget, b: u32) -> BigRational {
    let q = budget.random_blocks();
    let birthday = BigRational::new(&q * &q - &q, pow2(u64::from(b) / 2 + 1));
    clamp(birthday + &budget.eps_hash + &budget.eps_sig)
}

/// Forgery bound for d-wise chaining:
/// `(q_s + q_i)(n_max + 1)^2 / 2^{(d-1)b/2+1} + eps_hash + eps_sig`,
/// clamped to 1.
pub fn bound_incsig_star(budget: &AttackBudget, b: u32, d: u32) -> BigRational {
    assert!(d >= 2, "d must be at least 2");
    let n1 = BigInt::from(budget.n_max) + 1;
    let num = (BigInt::from(budget.q_s) + BigInt::from(budget.q_i)) * &n1 * &n1;
    let exp = u64::from(d - 1) * u64::from(b) / 2 + 1;
    clamp(BigRational::new(num, pow2(exp)) + &budget.eps_hash + &budget.eps_sig)
}

/// Hash-oracle queries in the pair-chaining reduction: `q_s n_max + 3 q_i`.
pub fn hash_queries_incsig(budget: &AttackBudget) -> BigInt {
    BigInt::from(budget.q_s) * budget.n_max + BigInt::from(budget.q_i) * 3
}

/// Hash-oracle queries in the d-wise reduction: `q_s n_max + (2d - 1) q_i`.
pub fn hash_queries_incsig_star(budget: &AttackBudget, d: u32) -> BigInt {
    BigInt::from(budget.q_s) * budget.n_max + BigInt::from(budget.q_i) * (2 * u64::from(d) - 1)
}

/// Approximate `log2` of a positive rational, for reports. `-inf` for zero.
pub fn log2_approx(r: &BigRational) -> f64 {
    fn log2_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        let shift = bits.saturating_sub(53);
        let top = (v >> shift).to_f64().unwrap_or(f64::NAN);
        top.log2() + shift as f64
    }
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    log2_int(r.numer()) - log2_int(r.denom())
}

/// Predicted costs for one geometry and document length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostTable {
    pub params: SchemeParams,
    pub m: u64,
    /// Signing: `m` hash evaluations, `m - 1` additions.
    pub sign: OpCounters,
    /// Chain bits carried by the signature, `m k + (d - 1) k`.
    pub overhead_bits: u64,
    pub insert: OpCounters,
    pub replace: OpCounters,
    pub delete: OpCounters,
}

pub fn cost_model(params: &SchemeParams, m: u64) -> CostTable {
    assert!(m >= 1, "documents have at least one block");
    let k = u64::from(params.k());
    let d = u64::from(params.d());
    CostTable {
        params: *params,
        m,
        sign: OpCounters::new(m, m - 1, 0),
        overhead_bits: m * k + (d - 1) * k,
        insert: OpCounters::new(2 * d - 1, d, d - 1),
        replace: OpCounters::new(2, 1, 1),
        delete: OpCounters::new(2 * d - 1, d - 1, d),
    }
}

impl CostTable {
    pub fn update(&self, kind: crate::document::EditKind) -> OpCounters {
        use crate::document::EditKind::*;
        match kind {
            Insert => self.insert,
            Replace => self.replace,
            Delete => self.delete,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_queries_leave_the_assumed_advantages() {
        let b = AttackBudget::new(0, 0, 1000, r(1, 7), r(2, 9)).unwrap();
        assert_eq!(bound_incsig(&b, 256), r(1, 7) + r(2, 9));
        assert_eq!(bound_incsig_star(&b, 256, 8), r(1, 7) + r(2, 9));
    }

    #[test]
    fn spot_values() {
        // q = 1 * (1 + 1) + 0 = 2, (4 - 2) / 2^129 = 2^-128
        let b = AttackBudget::queries(1, 0, 1);
        assert_eq!(bound_incsig(&b, 256), BigRational::new(1.into(), pow2(128)));
        // (2 + 2) * 4^2 = 64 over 2^(3 * 128 + 1)
        let b = AttackBudget::queries(2, 2, 3);
        assert_eq!(bound_incsig_star(&b, 256, 4), BigRational::new(64.into(), pow2(385)));
        assert!((log2_approx(&bound_incsig_star(&b, 256, 4)) + 379.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_clamp_to_one() {
        let b = AttackBudget::new(u64::MAX, u64::MAX, u64::MAX, r(1, 2), r(1, 2)).unwrap();
        assert_eq!(bound_incsig(&b, 16), BigRational::one());
        assert_eq!(bound_incsig_star(&b, 16, 2), BigRational::one());
    }

    #[test]
    fn invalid_advantage_rejected() {
        assert!(AttackBudget::new(1, 1, 1, r(3, 2), r(0, 1)).is_err());
        assert!(AttackBudget::new(1, 1, 1, r(0, 1), r(-1, 2)).is_err());
    }

    #[test]
    fn hash_query_counts() {
        let b = AttackBudget::queries(3, 5, 10);
        assert_eq!(hash_queries_incsig(&b), BigInt::from(45));
        assert_eq!(hash_queries_incsig_star(&b, 2), BigInt::from(45));
        assert_eq!(hash_queries_incsig_star(&b, 4), BigInt::from(65));
    }

    #[test]
    fn cost_model_values() {
        let p = SchemeParams::new(256, 1, 256).unwrap();
        let c = cost_model(&p, 1000);
        assert_eq!(c.overhead_bits, 1000 + 255);
        assert_eq!(c.insert, OpCounters::new(511, 256, 255));
        let c = cost_model(&SchemeParams::default(), 10);
        assert_eq!(c.sign, OpCounters::new(10, 9, 0));
        assert_eq!(c.insert, OpCounters::new(3, 2, 1));
        assert_eq!(c.replace, OpCounters::new(2, 1, 1));
        assert_eq!(c.delete, OpCounters::new(3, 1, 2));
    }

    proptest! {
        #[test]
        fn bounds_are_monotone(qs in 0u64..1 << 40, qi in 0u64..1 << 40, n in 0u64..1 << 20,
                               dqs in 0u64..1000, dqi in 0u64..1000, dn in 0u64..1000,
                               d in 2u32..6) {
            let lo = AttackBudget::queries(qs, qi, n);
            let hi = AttackBudget::queries(qs + dqs, qi + dqi, n + dn);
            prop_assert!(bound_incsig(&lo, 64) <= bound_incsig(&hi, 64));
            prop_assert!(bound_incsig_star(&lo, 64, d) <= bound_incsig_star(&hi, 64, d));
            for v in [bound_incsig(&hi, 64), bound_incsig_star(&hi, 64, d)] {
                prop_assert!(!v.is_negative() && v <= BigRational::one());
            }
        }
    }
}
