//! `incsig`: sign files so that later edits can be re-signed incrementally.
//!
//! Exit codes: 0 success/accept, 1 verification reject, 2 I/O error,
//! 64 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ed25519_dalek::{SigningKey, VerifyingKey};
use incsig::analysis::{
    bound_incsig, bound_incsig_star, cost_model, hash_queries_incsig, hash_queries_incsig_star, log2_approx,
    AttackBudget,
};
use incsig::bench::{interior_index, measure_update, render_speedup_csv, render_speedup_table, speedup_report};
use incsig::legacy::CORPUS_BLOCK_BYTES;
use incsig::legacy::{chained_digest, collision_corpus, corpus_params, legacy_randomizer, parse_corpus_fixture};
use incsig::{
    parse_edit_script, BlockDocument, Ed25519Backend, EditKind, Error, IncrementalSignature, RandomChain, RandomizeFn,
    Scheme, SchemeParams,
};
use num_rational::BigRational;
use rand::rngs::OsRng;

const EXIT_REJECT: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "incsig", version, about = "Incremental signatures over block documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct ParamArgs {
    /// Block size in bits
    #[arg(long, default_value_t = 256)]
    b: u32,
    /// Random sub-block size in bits
    #[arg(long, default_value_t = 128)]
    k: u32,
    /// Sub-blocks per link; b must equal k * d
    #[arg(long, default_value_t = 2)]
    d: u32,
}

impl ParamArgs {
    fn params(&self) -> Result<SchemeParams, CliError> {
        SchemeParams::new(self.b, self.k, self.d).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an Ed25519 key pair, written as <OUT>.sk and <OUT>.pk (hex)
    Keygen {
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a file
    Sign {
        #[arg(long = "in")]
        input: PathBuf,
        /// Secret key file
        #[arg(long)]
        key: PathBuf,
        /// Where to write the signature
        #[arg(long)]
        sig: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Apply an edit script to a signed file and update the signature
    Update {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Edited file
        #[arg(long)]
        out: PathBuf,
        /// Updated signature [default: <OUT>.isig]
        #[arg(long)]
        out_sig: Option<PathBuf>,
    },
    /// Verify a file against a signature; prints ACCEPT or REJECT
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// Public key file
        #[arg(long = "pub")]
        public: PathBuf,
    },
    /// Show the pair-chaining collisions and their separation under d-wise chaining
    DemoCollisions {
        /// Corpus fixture to use instead of the built-in one
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Print forgery bounds for an attack budget
    Advise {
        #[arg(long)]
        qs: u64,
        #[arg(long)]
        qi: u64,
        #[arg(long)]
        nmax: u64,
        #[arg(long, default_value_t = 256)]
        b: u32,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Assumed hash set-collision advantage, e.g. 0 or 1/1000000
        #[arg(long, default_value = "0")]
        eps_hash: BigRational,
        /// Assumed forgery advantage against Ed25519
        #[arg(long, default_value = "0")]
        eps_sig: BigRational,
    },
    /// Count operations and time signing versus updates
    Bench {
        #[command(flatten)]
        params: ParamArgs,
        /// Document sizes in blocks
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10000])]
        sizes: Vec<usize>,
        /// CSV output for the sign/replace comparison
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
    Reject(String),
}

impl CliError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
            CliError::Reject(m) => CliError::Reject(format!("{what}: {m}")),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Reject(_) => EXIT_REJECT,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::MalformedSignature(_) => CliError::Reject(e.to_string()),
            Error::Backend(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read_key_bytes(path: &Path) -> Result<[u8; 32], CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bytes = hex::decode(text.trim()).map_err(|e| CliError::io(path, format!("not a hex key: {e}")))?;
    bytes.try_into().map_err(|_| CliError::io(path, "key must be 32 bytes"))
}

fn read_secret_key(path: &Path) -> Result<SigningKey, CliError> {
    Ok(SigningKey::from_bytes(&read_key_bytes(path)?))
}

fn read_public_key(path: &Path) -> Result<VerifyingKey, CliError> {
    VerifyingKey::from_bytes(&read_key_bytes(path)?).map_err(|e| CliError::io(path, e))
}

fn read_signature(path: &Path) -> Result<IncrementalSignature, CliError> {
    Ok(IncrementalSignature::decode(&read(path)?)?)
}

fn scheme(params: SchemeParams) -> Scheme<Ed25519Backend> {
    Scheme::new(params, Ed25519Backend).parallel(true)
}

fn cmd_keygen(out: &Path) -> Result<(), CliError> {
    let sk = SigningKey::generate(&mut OsRng);
    let base = out.as_os_str().to_owned();
    let with_ext = |ext: &str| {
        let mut p = base.clone();
        p.push(ext);
        PathBuf::from(p)
    };
    let (sk_path, pk_path) = (with_ext(".sk"), with_ext(".pk"));
    write(&sk_path, hex::encode(sk.to_bytes()) + "\n")?;
    write(&pk_path, hex::encode(sk.verifying_key().to_bytes()) + "\n")?;
    println!("wrote {} and {}", sk_path.display(), pk_path.display());
    Ok(())
}

fn cmd_sign(input: &Path, key: &Path, sig_path: &Path, params: ParamArgs) -> Result<(), CliError> {
    let params = params.params()?;
    let sk = read_secret_key(key)?;
    let doc = BlockDocument::pad(&read(input)?, params);
    let sig = scheme(params).sign(&sk, &doc, &mut OsRng)?;
    write(sig_path, sig.encode())?;
    println!("signed {} blocks with {params}", doc.len());
    Ok(())
}

fn cmd_verify(input: &Path, sig_path: &Path, public: &Path) -> Result<(), CliError> {
    let pk = read_public_key(public)?;
    let raw = read(input)?;
    let verdict = read_signature(sig_path).and_then(|sig| {
        let doc = BlockDocument::pad(&raw, sig.params);
        if scheme(sig.params).verify(&pk, &doc, &sig) {
            Ok(())
        } else {
            Err(CliError::Reject("signature does not match the file".into()))
        }
    });
    match &verdict {
        Ok(()) => println!("ACCEPT"),
        Err(CliError::Reject(_)) => println!("REJECT"),
        Err(_) => {}
    }
    verdict
}

fn cmd_update(
    input: &Path,
    sig_path: &Path,
    script: &Path,
    key: &Path,
    out: &Path,
    out_sig: Option<PathBuf>,
) -> Result<(), CliError> {
    let sk = read_secret_key(key)?;
    let mut sig = read_signature(sig_path)?;
    let params = sig.params;
    let mut doc = BlockDocument::pad(&read(input)?, params);
    let text = fs::read_to_string(script).map_err(|e| CliError::io(script, e))?;
    let ops = parse_edit_script(&text, &params)?;

    let scheme = scheme(params);
    if !scheme.verify(&sk.verifying_key(), &doc, &sig) {
        return Err(CliError::Reject(
            "input signature does not verify; refusing to update".into(),
        ));
    }
    // incremental updates start from the transmitted accumulator
    if scheme.recompute_mu(&doc, &sig) != Some(sig.mu) {
        return Err(CliError::Reject("signature carries a stale accumulator".into()));
    }
    for (n, op) in ops.iter().enumerate() {
        scheme
            .update_in_place(&sk, &mut doc, &mut sig, op, &mut OsRng)
            .map_err(|e| CliError::from(e).context(&format!("edit {} ({op})", n + 1)))?;
    }

    let out_sig = out_sig.unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".isig");
        PathBuf::from(p)
    });
    write(out, doc.unpad()?)?;
    write(&out_sig, sig.encode())?;
    println!(
        "applied {} edits; {} blocks; wrote {} and {}",
        ops.len(),
        doc.len(),
        out.display(),
        out_sig.display()
    );
    Ok(())
}

fn short_hex(bytes: &[u8]) -> String {
    format!("{}...", hex::encode(&bytes[..16.min(bytes.len())]))
}

fn cmd_demo_collisions(corpus: Option<PathBuf>) -> Result<(), CliError> {
    let corpus = match corpus {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            parse_corpus_fixture(&text)?
        }
        None => collision_corpus(),
    };
    let legacy_rf = legacy_randomizer(CORPUS_BLOCK_BYTES);
    let params = corpus_params();
    let rf = RandomizeFn::for_params(&params);
    for pair in &corpus {
        let need = params.chain_len(pair.first.len().max(pair.second.len()) + 1);
        let chain = RandomChain::sample(params.k(), need, &mut OsRng);
        let legacy_a = pair.combiner.hash(&pair.first, &legacy_rf)?;
        let legacy_b = pair.combiner.hash(&pair.second, &legacy_rf)?;
        let chained_a = chained_digest(&pair.first, &params, &chain, &rf)?;
        let chained_b = chained_digest(&pair.second, &params, &chain, &rf)?;
        println!("== {} ({} vs {}) ==", pair.label, pair.pattern.0, pair.pattern.1);
        println!("  legacy ({:<7})  {}", pair.combiner.name(), legacy_a);
        println!("                    {}", legacy_b);
        println!("    {}", if legacy_a == legacy_b { "equal" } else { "distinct" });
        println!("  chained {params}");
        println!("                    {}", short_hex(&chained_a.to_be_bytes()));
        println!("                    {}", short_hex(&chained_b.to_be_bytes()));
        println!("    {}", if chained_a == chained_b { "equal" } else { "distinct" });
    }
    Ok(())
}

fn describe_bound(r: &BigRational) -> String {
    if r.numer() == r.denom() {
        "1".to_string()
    } else {
        format!("{r}  (~2^{:.2})", log2_approx(r))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_advise(
    qs: u64,
    qi: u64,
    nmax: u64,
    b: u32,
    d: u32,
    eps_hash: BigRational,
    eps_sig: BigRational,
) -> Result<(), CliError> {
    if d < 2 || b == 0 || !b.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "need d >= 2 and a positive even b, got b = {b}, d = {d}"
        )));
    }
    let budget = AttackBudget::new(qs, qi, nmax, eps_hash, eps_sig)?;
    println!(
        "budget: q_s = {qs}, q_i = {qi}, n_max = {nmax}, eps_hash = {}, eps_sig = {}",
        budget.eps_hash, budget.eps_sig
    );
    println!("pair chaining (k = b/2, d = 2), b = {b}:");
    println!("  forgery bound   {}", describe_bound(&bound_incsig(&budget, b)));
    println!("  hash queries    {}", hash_queries_incsig(&budget));
    println!("d-wise chaining, b = {b}, d = {d}:");
    println!(
        "  forgery bound   {}",
        describe_bound(&bound_incsig_star(&budget, b, d))
    );
    println!("  hash queries    {}", hash_queries_incsig_star(&budget, d));
    if b.is_multiple_of(d) {
        let k = b / d;
        println!("  chain overhead  (n + {}) * {k} bits for an n-block document", d - 1);
    }
    Ok(())
}

fn cmd_bench(params: ParamArgs, sizes: &[usize], csv: bool) -> Result<(), CliError> {
    let params = params.params()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("sizes must be positive".into()));
    }
    let rows = speedup_report(&params, sizes)?;
    if csv {
        print!("{}", render_speedup_csv(&params, &rows));
        return Ok(());
    }
    print!("{}", render_speedup_table(&params, &rows));
    println!();
    let mut out = String::new();
    let _ = writeln!(out, "single-block updates at an interior position, params {params}");
    let _ = writeln!(
        out,
        "{:>8}  {:>8}  {:>16}  {:>16}  {:>12}",
        "m", "op", "measured", "predicted", "time"
    );
    for &m in sizes {
        if interior_index(&params, m).is_none() {
            let _ = writeln!(out, "{m:>8}  (no interior position)");
            continue;
        }
        let model = cost_model(&params, m as u64);
        for kind in [EditKind::Insert, EditKind::Replace, EditKind::Delete] {
            let meas = measure_update(&params, m, kind)?;
            let _ = writeln!(
                out,
                "{m:>8}  {kind:>8}  {:>16}  {:>16}  {:>12.2?}",
                meas.counters.to_string(),
                model.update(kind).to_string(),
                meas.elapsed
            );
        }
    }
    print!("{out}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Keygen { out } => cmd_keygen(&out),
        Command::Sign {
            input,
            key,
            sig,
            params,
        } => cmd_sign(&input, &key, &sig, params),
        Command::Update {
            input,
            sig,
            script,
            key,
            out,
            out_sig,
        } => cmd_update(&input, &sig, &script, &key, &out, out_sig),
        Command::Verify { input, sig, public } => cmd_verify(&input, &sig, &public),
        Command::DemoCollisions { corpus } => cmd_demo_collisions(corpus),
        Command::Advise {
            qs,
            qi,
            nmax,
            b,
            d,
            eps_hash,
            eps_sig,
        } => cmd_advise(qs, qi, nmax, b, d, eps_hash, eps_sig),
        Command::Bench { params, sizes, csv } => cmd_bench(params, &sizes, csv),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.code();
            let (CliError::Usage(msg) | CliError::Io(msg) | CliError::Reject(msg)) = e;
            eprintln!("incsig: {msg}");
            ExitCode::from(code)
        }
    }
}
