//! Operation counting and timing.
//!
//! [`Counting`] wraps a randomizer and counts every randomize call and
//! every group addition and subtraction routed through it. The production
//! path never sees it.

use std::fmt::{self, Write as _};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use crate::accumulator::Accumulator;
use crate::document::{BlockDocument, EditKind, EditOp, SchemeParams};
use crate::error::{Error, Result};
use crate::randomizer::{Randomize, RandomizeFn};
use crate::scheme::{Ed25519Backend, Scheme};

/// `(hash evaluations, additions, subtractions)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounters {
    pub hash_evals: u64,
    pub adds: u64,
    pub subs: u64,
}

impl OpCounters {
    pub const fn new(hash_evals: u64, adds: u64, subs: u64) -> Self {
        OpCounters { hash_evals, adds, subs }
    }
}

impl fmt::Display for OpCounters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.hash_evals, self.adds, self.subs)
    }
}

/// Counting decorator around any [`Randomize`].
#[derive(Debug, Default)]
pub struct Counting<R> {
    inner: R,
    hash_evals: AtomicU64,
    adds: AtomicU64,
    subs: AtomicU64,
}

impl<R> Counting<R> {
    pub fn new(inner: R) -> Self {
        Counting {
            inner,
            hash_evals: AtomicU64::new(0),
            adds: AtomicU64::new(0),
            subs: AtomicU64::new(0),
        }
    }

    pub fn counters(&self) -> OpCounters {
        OpCounters {
            hash_evals: self.hash_evals.load(Ordering::Relaxed),
            adds: self.adds.load(Ordering::Relaxed),
            subs: self.subs.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.hash_evals.store(0, Ordering::Relaxed);
        self.adds.store(0, Ordering::Relaxed);
        self.subs.store(0, Ordering::Relaxed);
    }

    /// Counters accumulated since the last reset, then resets.
    pub fn take(&self) -> OpCounters {
        let c = self.counters();
        self.reset();
        c
    }

    pub fn inner(&self) -> &R {
        &self.inner
    }
}

impl<R: Randomize> Randomize for Counting<R> {
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }

    fn randomize(&self, link: &[u8]) -> Result<Accumulator> {
        self.hash_evals.fetch_add(1, Ordering::Relaxed);
        self.inner.randomize(link)
    }

    fn add(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        self.adds.fetch_add(1, Ordering::Relaxed);
        self.inner.add(a, b)
    }

    fn sub(&self, a: Accumulator, b: Accumulator) -> Accumulator {
        self.subs.fetch_add(1, Ordering::Relaxed);
        self.inner.sub(a, b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub counters: OpCounters,
    pub elapsed: Duration,
}

type BenchScheme = Scheme<Ed25519Backend, Counting<RandomizeFn>>;

const SEED: u64 = 0x001a_c516;

fn bench_scheme(params: &SchemeParams) -> BenchScheme {
    let rf = Counting::new(RandomizeFn::for_params(params));
    Scheme::with_randomizer(*params, Ed25519Backend, rf)
}

/// A random document of exactly `m` blocks (the last being padding).
pub fn random_document<G: Rng>(params: &SchemeParams, m: usize, rng: &mut G) -> BlockDocument {
    assert!(m >= 1);
    let mut raw = vec![0u8; (m - 1) * params.block_bytes()];
    rng.fill(&mut raw[..]);
    BlockDocument::pad(&raw, *params)
}

/// Counts and times one signature of a random `m`-block document.
pub fn measure_sign(params: &SchemeParams, m: usize) -> Result<Measurement> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    let scheme = bench_scheme(params);
    let mut rng = seeded_rng(SEED);
    let (sk, _) = scheme.keygen(&mut rng)?;
    let doc = random_document(params, m, &mut rng);
    scheme.randomizer().reset();
    let t0 = Instant::now();
    let sig = scheme.sign(&sk, &doc, &mut rng)?;
    let elapsed = t0.elapsed();
    drop(sig);
    Ok(Measurement {
        counters: scheme.randomizer().take(),
        elapsed,
    })
}

/// Position used for a single-block interior edit of an `m`-block document.
pub fn interior_index(params: &SchemeParams, m: usize) -> Option<usize> {
    let d = params.d() as usize;
    let i = m / 2;
    (i >= d.saturating_sub(1).max(1) && i + d <= m).then_some(i)
}

fn single_block_op(kind: EditKind, i: usize, params: &SchemeParams, rng: &mut impl Rng) -> EditOp {
    let mut payload = vec![0u8; params.block_bytes()];
    rng.fill(&mut payload[..]);
    match kind {
        EditKind::Insert => EditOp::Insert { after: i, payload },
        EditKind::Replace => EditOp::Replace { start: i, payload },
        EditKind::Delete => EditOp::Delete { start: i, end: i },
    }
}

/// Counts and times one interior single-block update at block `m/2`.
/// The reported time is the median over `reps` runs.
pub fn measure_update_with_reps(params: &SchemeParams, m: usize, kind: EditKind, reps: usize) -> Result<Measurement> {
    let i = interior_index(params, m)
        .ok_or_else(|| Error::InvalidParams(format!("m = {m} has no interior position for d = {}", params.d())))?;
    let scheme = bench_scheme(params);
    let mut rng = seeded_rng(SEED ^ 1);
    let (sk, _) = scheme.keygen(&mut rng)?;
    let base_doc = random_document(params, m, &mut rng);
    let base_sig = scheme.sign(&sk, &base_doc, &mut rng)?;

    let mut counters = None;
    let mut times = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let mut doc = base_doc.clone();
        let mut sig = base_sig.clone();
        let op = single_block_op(kind, i, params, &mut rng);
        scheme.randomizer().reset();
        let t0 = Instant::now();
        scheme.update_in_place(&sk, &mut doc, &mut sig, &op, &mut rng)?;
        times.push(t0.elapsed());
        let c = scheme.randomizer().take();
        debug_assert!(counters.is_none() || counters == Some(c));
        counters = Some(c);
    }
    times.sort();
    Ok(Measurement {
        counters: counters.unwrap(),
        elapsed: times[times.len() / 2],
    })
}

pub fn measure_update(params: &SchemeParams, m: usize, kind: EditKind) -> Result<Measurement> {
    measure_update_with_reps(params, m, kind, 1)
}

/// Full signing versus a single replace update, per document length.
#[derive(Clone, Debug)]
pub struct SpeedupRow {
    pub m: usize,
    pub sign: Measurement,
    pub replace: Measurement,
}

impl SpeedupRow {
    pub fn time_ratio(&self) -> f64 {
        self.sign.elapsed.as_secs_f64() / self.replace.elapsed.as_secs_f64().max(1e-12)
    }

    pub fn hash_ratio(&self) -> f64 {
        self.sign.counters.hash_evals as f64 / self.replace.counters.hash_evals as f64
    }
}

pub fn speedup_report(params: &SchemeParams, m_values: &[usize]) -> Result<Vec<SpeedupRow>> {
    m_values
        .iter()
        .map(|&m| {
            Ok(SpeedupRow {
                m,
                sign: measure_sign(params, m)?,
                replace: measure_update_with_reps(params, m, EditKind::Replace, 15)?,
            })
        })
        .collect()
}

pub fn render_speedup_table(params: &SchemeParams, rows: &[SpeedupRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "full sign vs single replace update, params {params}");
    let _ = writeln!(
        out,
        "{:>8}  {:>16}  {:>12}  {:>12}  {:>12}  {:>10}  {:>10}",
        "m", "sign (h,a,s)", "sign time", "replace", "update time", "hash x", "time x"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>8}  {:>16}  {:>12}  {:>12}  {:>12}  {:>10.1}  {:>10.1}",
            r.m,
            r.sign.counters.to_string(),
            format!("{:.3?}", r.sign.elapsed),
            r.replace.counters.to_string(),
            format!("{:.3?}", r.replace.elapsed),
            r.hash_ratio(),
            r.time_ratio()
        );
    }
    out
}

pub fn render_speedup_csv(params: &SchemeParams, rows: &[SpeedupRow]) -> String {
    let mut out = String::from(
        "b,k,d,m,sign_hash_evals,sign_adds,sign_subs,sign_ns,replace_hash_evals,replace_adds,replace_subs,replace_ns,time_ratio\n",
    );
    for r in rows {
        let (s, u) = (r.sign.counters, r.replace.counters);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            params.b(),
            params.k(),
            params.d(),
            r.m,
            s.hash_evals,
            s.adds,
            s.subs,
            r.sign.elapsed.as_nanos(),
            u.hash_evals,
            u.adds,
            u.subs,
            r.replace.elapsed.as_nanos(),
            r.time_ratio()
        );
    }
    out
}

fn seeded_rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}
