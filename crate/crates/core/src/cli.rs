//! Command-line front end: exact one-shot queries (Hilbert symbols,
//! isotropy certification, quaternion and similitude checks, the outer
//! conditions decision, unitary descent) plus a checked-in corpus of claims
//! that the engine re-derives in one run.
//!
//! Exit codes: 0 = decided as asked, 2 = the engine answered `unknown`,
//! 1 = error (bad input, capacity, internal check failure).

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::descent::{descend, ExtElem, UnitaryDescentDatum};
use crate::fields::{parse_scalar, parse_tower, BaseKind, FieldTower, Scalar};
use crate::genericsum::{
    decide_out_generic, odd_family_a3, verify_unitary_example, OutReport, OutStatus,
    PatternOutcome, SimilitudeSummary,
};
use crate::hermitian::{
    build_diagonal_similitude, verify_similitude, BlockKind, BuildResult, SkewHermForm,
};
use crate::quadforms::{
    certify_anisotropic, hilbert_symbol, represents, AnisoResult, Certificate, PlaceQ,
    QuadForm, RepResult,
};
use crate::quaternion::{
    is_division, parse_quat, pure_with_square, DivisionResult, PureResult, QuatAlgebra,
};
use crate::Error;

#[derive(Parser, Debug)]
#[command(
    name = "outsim",
    version,
    about = "Exact computer algebra for quaternion algebras, hermitian forms, \
             similitudes, and outer-automorphism criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit machine-readable JSON instead of human-oriented text.
    #[arg(long, global = true)]
    pub json: bool,
}

fn default_tower() -> String {
    "Q".into()
}

fn default_rank() -> usize {
    3
}

#[derive(Subcommand, Debug, serde::Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Hilbert symbol (a,b)_v of two nonzero rationals at a place of Q.
    Symbol(SymbolArgs),
    /// Certify a diagonal quadratic form anisotropic, or exhibit a zero.
    Isotropy(IsotropyArgs),
    /// Quaternion algebra queries: division test, pure square search.
    Quat(QuatArgs),
    /// Build and verify a block-diagonal similitude with a sign pattern.
    Similitude(SimilitudeArgs),
    /// Decide the three outer conditions for a diagonal generic sum.
    Outness(OutnessArgs),
    /// Descend a diagonal unitary form along a quadratic extension.
    Descend(DescendArgs),
    /// Re-run the checked-in claims corpus and report every verdict.
    VerifyClaims(VerifyArgs),
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct SymbolArgs {
    /// First entry, a nonzero rational (e.g. -1 or 3/5).
    #[arg(short, long, allow_hyphen_values = true)]
    pub a: String,
    /// Second entry, a nonzero rational.
    #[arg(short, long, allow_hyphen_values = true)]
    pub b: String,
    /// Place of Q: a prime or `inf`.
    #[arg(long)]
    pub place: String,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct IsotropyArgs {
    /// Field tower, e.g. `Q`, `Q(i)`, `Q[a1,a2][t]`.
    #[arg(long, default_value = "Q")]
    #[serde(default = "default_tower")]
    pub tower: String,
    /// Comma-separated diagonal entries (scalar expressions).
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct QuatArgs {
    #[arg(long, default_value = "Q")]
    #[serde(default = "default_tower")]
    pub tower: String,
    /// Structure constant i^2.
    #[arg(short, long, allow_hyphen_values = true)]
    pub a: String,
    /// Structure constant j^2.
    #[arg(short, long, allow_hyphen_values = true)]
    pub b: String,
    /// Search for a pure quaternion with this square instead of the
    /// division test.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub pure_square: Option<String>,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct SimilitudeArgs {
    #[arg(long, default_value = "Q")]
    #[serde(default = "default_tower")]
    pub tower: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub b: String,
    /// Semicolon-separated pure quaternion entries, e.g. `i;j;i+k`.
    #[arg(long, allow_hyphen_values = true)]
    pub entries: String,
    /// The multiplier to realize.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    /// Comma-separated block pattern of `+` (proper) and `-` (improper).
    #[arg(long, allow_hyphen_values = true)]
    pub pattern: String,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct OutnessArgs {
    /// Field tower; generic families need their weight variables last.
    #[arg(long)]
    pub tower: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub b: String,
    /// Comma-separated entry squares (scalar expressions).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "family")]
    #[serde(default)]
    pub squares: Option<String>,
    /// Use a built-in family for the third entry square: `even` (binary
    /// norm shape in the last three tower variables) or `odd` (the explicit
    /// polynomial).
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    /// Rank when --family is used (the third square is repeated).
    #[arg(long, default_value_t = 3)]
    #[serde(default = "default_rank")]
    pub n: usize,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct DescendArgs {
    #[arg(long, default_value = "Q")]
    #[serde(default = "default_tower")]
    pub tower: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(short, long, allow_hyphen_values = true)]
    pub b: String,
    /// Square-free part d of the quadratic extension F(sqrt d).
    #[arg(short, long, allow_hyphen_values = true)]
    pub d: String,
    /// Semicolon-separated entries `x|y` meaning x + y*sqrt(d), with x and
    /// y quaternion expressions (e.g. `3|i+2*j-k;0|i`).
    #[arg(long, allow_hyphen_values = true)]
    pub entries: String,
}

#[derive(Args, Debug, serde::Deserialize)]
pub struct VerifyArgs {
    /// Path to the line-delimited JSON corpus; defaults to the checked-in
    /// file.
    #[arg(long)]
    #[serde(default)]
    pub corpus: Option<PathBuf>,
}

/// What a subcommand produced: the payload plus the three-valued outcome
/// that drives the exit code.
pub struct RunOutput {
    pub report: Value,
    pub human: String,
    /// 0 decided, 2 unknown.
    pub code: i32,
}

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    // tolerate closed pipes (e.g. `outsim ... | head`)
    let emit = |text: String| {
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), "{text}");
    };
    let json = cli.json;
    match run(cli.command) {
        Ok(out) => {
            if json {
                emit(serde_json::to_string_pretty(&out.report).unwrap());
            } else {
                emit(out.human);
            }
            out.code
        }
        Err(e) => {
            if json {
                emit(json!({ "error": e.to_string() }).to_string());
            } else {
                eprintln!("error: {e}");
            }
            1
        }
    }
}

pub fn run(cmd: Command) -> Result<RunOutput, Error> {
    match cmd {
        Command::Symbol(a) => run_symbol(a),
        Command::Isotropy(a) => run_isotropy(a),
        Command::Quat(a) => run_quat(a),
        Command::Similitude(a) => run_similitude(a),
        Command::Outness(a) => run_outness(a),
        Command::Descend(a) => run_descend(a),
        Command::VerifyClaims(a) => run_verify(a),
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

fn run_symbol(args: SymbolArgs) -> Result<RunOutput, Error> {
    let a = parse_rational(&args.a)?;
    let b = parse_rational(&args.b)?;
    if a == BigRational::default() || b == BigRational::default() {
        return Err(Error::ZeroInput("Hilbert symbol entry".into()));
    }
    let place: PlaceQ = args.place.parse()?;
    if let PlaceQ::Prime(p) = place {
        if !is_prime_u64(p) {
            return Err(Error::Parse(format!("{p} is not a prime")));
        }
    }
    let s = hilbert_symbol(&a, &b, &place);
    Ok(RunOutput {
        report: json!({ "a": args.a.trim(), "b": args.b.trim(), "place": place.to_string(), "symbol": s }),
        human: format!("({}, {})_{} = {}", args.a.trim(), args.b.trim(), place, s),
        code: 0,
    })
}

fn scalar_list(tower: &FieldTower, src: &str) -> Result<Vec<Scalar>, Error> {
    src.split(',')
        .map(|s| parse_scalar(tower, s.trim()))
        .collect()
}

fn cert_json(c: &Certificate) -> Value {
    serde_json::to_value(c).expect("certificate serialization")
}

fn run_isotropy(args: IsotropyArgs) -> Result<RunOutput, Error> {
    let tower = parse_tower(&args.tower)?;
    let entries = scalar_list(&tower, &args.form)?;
    let form = QuadForm::new(&tower, entries)?;
    let (report, human, code) = match certify_anisotropic(&form)? {
        AnisoResult::Anisotropic(cert) => {
            cert.verify()?;
            (
                json!({ "verdict": "anisotropic", "certificate": cert_json(&cert) }),
                "anisotropic (certificate verified)".to_string(),
                0,
            )
        }
        AnisoResult::Isotropic { vector, cert } => {
            cert.verify()?;
            let v: Vec<String> = vector.iter().map(|s| s.display().to_string()).collect();
            (
                json!({ "verdict": "isotropic", "vector": v, "certificate": cert_json(&cert) }),
                format!("isotropic: zero at ({})", v.join(", ")),
                0,
            )
        }
        AnisoResult::Unknown(note) => (
            json!({ "verdict": "unknown", "note": note }),
            format!("unknown: {note}"),
            2,
        ),
    };
    Ok(RunOutput { report, human, code })
}

fn algebra_from(tower: &FieldTower, a: &str, b: &str) -> Result<QuatAlgebra, Error> {
    QuatAlgebra::new(parse_scalar(tower, a)?, parse_scalar(tower, b)?)
}

fn run_quat(args: QuatArgs) -> Result<RunOutput, Error> {
    let tower = parse_tower(&args.tower)?;
    let q = algebra_from(&tower, &args.a, &args.b)?;
    let (report, human, code) = if let Some(sq) = &args.pure_square {
        let c = parse_scalar(&tower, sq)?;
        match pure_with_square(&q, &c)? {
            PureResult::Found { element, cert } => {
                cert.verify()?;
                (
                    json!({ "query": "pure-square", "verdict": "found", "element": element.to_string(), "certificate": cert_json(&cert) }),
                    format!("pure quaternion with the requested square: {element}"),
                    0,
                )
            }
            PureResult::None(cert) => {
                cert.verify()?;
                (
                    json!({ "query": "pure-square", "verdict": "none", "certificate": cert_json(&cert) }),
                    "no pure quaternion has that square (certificate verified)".to_string(),
                    0,
                )
            }
            PureResult::Unknown(note) => (
                json!({ "query": "pure-square", "verdict": "unknown", "note": note }),
                format!("unknown: {note}"),
                2,
            ),
        }
    } else {
        match is_division(&q)? {
            DivisionResult::Division(cert) => {
                cert.verify()?;
                (
                    json!({ "query": "division", "verdict": "division", "certificate": cert_json(&cert) }),
                    "division algebra (certificate verified)".to_string(),
                    0,
                )
            }
            DivisionResult::Split { zero_divisor, cert } => {
                cert.verify()?;
                (
                    json!({ "query": "division", "verdict": "split", "zeroDivisor": zero_divisor.to_string(), "certificate": cert_json(&cert) }),
                    format!("split: zero divisor {zero_divisor}"),
                    0,
                )
            }
            DivisionResult::Unknown(note) => (
                json!({ "query": "division", "verdict": "unknown", "note": note }),
                format!("unknown: {note}"),
                2,
            ),
        }
    };
    Ok(RunOutput { report, human, code })
}

fn run_similitude(args: SimilitudeArgs) -> Result<RunOutput, Error> {
    let tower = parse_tower(&args.tower)?;
    let q = algebra_from(&tower, &args.a, &args.b)?;
    let entries = args
        .entries
        .split(';')
        .map(|s| parse_quat(&q, s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let h = SkewHermForm::new(&q, entries)?;
    let mu = parse_scalar(&tower, &args.mu)?;
    let pattern = args
        .pattern
        .split(',')
        .map(|s| match s.trim() {
            "+" => Ok(BlockKind::Proper),
            "-" => Ok(BlockKind::Improper),
            other => Err(Error::Parse(format!("pattern block {other:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (report, human, code) = match build_diagonal_similitude(&h, &mu, &pattern)? {
        BuildResult::Built { sim, certs } => {
            let (ok, kind) = verify_similitude(&h, &sim.matrix, &sim.multiplier)?;
            if !ok || kind != sim.kind {
                return Err(Error::Internal("similitude replay failed".into()));
            }
            for c in &certs {
                c.verify()?;
            }
            let summary = SimilitudeSummary::of(&sim);
            (
                json!({
                    "verdict": "built",
                    "multiplier": summary.multiplier,
                    "kind": format!("{:?}", summary.kind),
                    "entries": summary.entries,
                    "certificates": certs.iter().map(cert_json).collect::<Vec<_>>(),
                }),
                format!(
                    "similitude built and verified: kind {:?}, multiplier {}",
                    summary.kind, summary.multiplier
                ),
                0,
            )
        }
        BuildResult::Blocked { index, cert } => {
            cert.verify()?;
            (
                json!({ "verdict": "blocked", "block": index, "certificate": cert_json(&cert) }),
                format!("no such similitude: block {index} is unsolvable (certificate verified)"),
                0,
            )
        }
        BuildResult::Unknown { index, note } => (
            json!({ "verdict": "unknown", "block": index, "note": note }),
            format!("unknown at block {index}: {note}"),
            2,
        ),
    };
    Ok(RunOutput { report, human, code })
}

fn outness_squares(
    tower: &FieldTower,
    q: &QuatAlgebra,
    args: &OutnessArgs,
) -> Result<Vec<Scalar>, Error> {
    if let Some(src) = &args.squares {
        return scalar_list(tower, src);
    }
    let family = args
        .family
        .as_deref()
        .ok_or_else(|| Error::Parse("need --squares or --family".into()))?;
    if args.n < 3 {
        return Err(Error::Dimension("--n must be at least 3".into()));
    }
    let a3 = match family {
        "odd" => odd_family_a3(&q.a, &q.b),
        "even" => {
            let nv = tower.nvars();
            if nv < 3 {
                return Err(Error::Dimension(
                    "the even family needs three trailing tower variables".into(),
                ));
            }
            let names: Vec<String> = tower.vars[nv - 3..].to_vec();
            let r = Scalar::var(tower, &names[0]);
            let s = Scalar::var(tower, &names[1]);
            let t = Scalar::var(tower, &names[2]);
            q.a.mul(&r.pow(2))
                .add(&q.b.mul(&s.pow(2)))
                .add(&q.a.mul(&q.b).mul(&t.pow(2)))
        }
        other => return Err(Error::Parse(format!("unknown family {other:?}"))),
    };
    let mut squares = vec![q.a.clone(), q.b.clone()];
    squares.extend(std::iter::repeat(a3).take(args.n - 2));
    Ok(squares)
}

fn out_status_human(report: &OutReport) -> String {
    let line = |name: &str, e: &crate::genericsum::OutcomeEntry| {
        format!(
            "{name}: {:?}{}",
            e.status,
            if e.machine_verified { "" } else { " (not machine-verified)" }
        )
    };
    [
        line("condition 1", &report.out1),
        line("condition 2", &report.out2),
        line("condition 3", &report.out3),
    ]
    .join("\n")
}

fn run_outness(args: OutnessArgs) -> Result<RunOutput, Error> {
    let tower = parse_tower(&args.tower)?;
    let q = algebra_from(&tower, &args.a, &args.b)?;
    let squares = outness_squares(&tower, &q, &args)?;
    let report = decide_out_generic(&squares, &q)?;
    let undecided = [&report.out1, &report.out2, &report.out3]
        .iter()
        .any(|e| e.status == OutStatus::Unknown);
    Ok(RunOutput {
        human: out_status_human(&report),
        report: serde_json::to_value(&report).expect("report serialization"),
        code: if undecided { 2 } else { 0 },
    })
}

fn run_descend(args: DescendArgs) -> Result<RunOutput, Error> {
    let tower = parse_tower(&args.tower)?;
    let q = algebra_from(&tower, &args.a, &args.b)?;
    let d = parse_scalar(&tower, &args.d)?;
    let datum = UnitaryDescentDatum::new(&q, &d)?;
    let entries = args
        .entries
        .split(';')
        .map(|pair| {
            let (x, y) = pair
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("entry {pair:?}: expected x|y")))?;
            Ok(ExtElem {
                x: parse_quat(&q, x.trim())?,
                y: parse_quat(&q, y.trim())?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let res = descend(&datum, &entries)?;
    Ok(RunOutput {
        human: format!(
            "descended: q = {}, twisted entries {}",
            res.q,
            res.h_prime
                .iter()
                .map(|e| format!("<{e}>"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        report: res.to_json(),
        code: 0,
    })
}

// ---------------------------------------------------------------------------
// claims corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub check: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    /// `verified` entries must pass; `asserted` entries are cited from the
    /// source and reported without blocking.
    pub status: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub status: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CorpusReport {
    pub results: Vec<ClaimResult>,
    pub verified_passed: usize,
    pub verified_failed: usize,
    pub asserted_count: usize,
}

pub fn default_corpus_path() -> PathBuf {
    let local = PathBuf::from("corpus/claims.jsonl");
    if local.exists() {
        return local;
    }
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/claims.jsonl"))
}

pub fn load_corpus(path: &PathBuf) -> Result<Vec<CorpusEntry>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("corpus {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            serde_json::from_str::<CorpusEntry>(l)
                .map_err(|e| Error::Parse(format!("corpus line: {e}")))
        })
        .collect()
}

fn p_str<'a>(params: &'a BTreeMap<String, Value>, key: &str) -> Result<&'a str, Error> {
    params
        .get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse(format!("missing string parameter {key:?}")))
}

fn p_usize(params: &BTreeMap<String, Value>, key: &str) -> Result<usize, Error> {
    params
        .get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("missing integer parameter {key:?}")))
}

fn p_base(params: &BTreeMap<String, Value>) -> Result<BaseKind, Error> {
    match p_str(params, "base")? {
        "Q" => Ok(BaseKind::Rationals),
        "Q(i)" => Ok(BaseKind::GaussianRationals),
        other => Err(Error::Parse(format!("unknown base {other:?}"))),
    }
}

fn expect_status(
    name: &str,
    entry: &crate::genericsum::OutcomeEntry,
    status: OutStatus,
    machine: Option<bool>,
) -> Result<(), Error> {
    if entry.status != status {
        return Err(Error::Internal(format!(
            "{name}: expected {status:?}, engine said {:?}",
            entry.status
        )));
    }
    if let Some(m) = machine {
        if entry.machine_verified != m {
            return Err(Error::Internal(format!(
                "{name}: machine_verified was {}",
                entry.machine_verified
            )));
        }
    }
    for c in &entry.certificates {
        c.verify()?;
    }
    Ok(())
}

fn check_scalar_identity(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let tower = parse_tower(p_str(params, "tower")?)?;
    let lhs = parse_scalar(&tower, p_str(params, "lhs")?)?;
    let rhs = parse_scalar(&tower, p_str(params, "rhs")?)?;
    if lhs != rhs {
        return Err(Error::Internal(format!(
            "identity fails: {} != {}",
            lhs.display(),
            rhs.display()
        )));
    }
    Ok("exact equality after canonical expansion".into())
}

fn check_binary_witness(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let tower = parse_tower(p_str(params, "tower")?)?;
    let c = parse_scalar(&tower, p_str(params, "c")?)?;
    let target = parse_scalar(&tower, p_str(params, "target")?)?;
    let vector = params
        .get("vector")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse("missing vector".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| Error::Parse("vector entry".into()))
                .and_then(|s| parse_scalar(&tower, s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let form = QuadForm::new(&tower, vec![Scalar::one(&tower), c.neg()])?;
    let cert = crate::quadforms::witness_certificate(&form, &target, &vector)?;
    cert.verify()?;
    Ok("norm equation witness replayed exactly".into())
}

fn check_norm_form_minus_one(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let tower = parse_tower(p_str(params, "tower")?)?;
    let q = QuatAlgebra::new(
        parse_scalar(&tower, p_str(params, "a")?)?,
        parse_scalar(&tower, p_str(params, "b")?)?,
    )?;
    let minus_one = Scalar::from_int(&tower, -1);
    match represents(&q.norm_form(), &minus_one)? {
        RepResult::NotRepresented(cert) => {
            cert.verify()?;
            Ok("-1 is certified not a reduced norm (residue chain verified)".into())
        }
        RepResult::Represented { .. } => {
            Err(Error::Internal("-1 unexpectedly is a reduced norm".into()))
        }
        RepResult::Unknown(note) => Err(Error::Internal(format!("undecided: {note}"))),
    }
}

fn odd_family_report(base: BaseKind) -> Result<OutReport, Error> {
    let tower = FieldTower::new(base, &["a1", "a2"]);
    let a = Scalar::var(&tower, "a1");
    let b = Scalar::var(&tower, "a2");
    let q = QuatAlgebra::new(a.clone(), b.clone())?;
    let squares = vec![a.clone(), b, odd_family_a3(&a, &q.b)];
    decide_out_generic(&squares, &q)
}

fn even_family_report(n: usize) -> Result<OutReport, Error> {
    let tower = FieldTower::new(BaseKind::GaussianRationals, &["a1", "a2", "r", "s", "u"]);
    let a = Scalar::var(&tower, "a1");
    let b = Scalar::var(&tower, "a2");
    let q = QuatAlgebra::new(a.clone(), b.clone())?;
    let r = Scalar::var(&tower, "r");
    let s = Scalar::var(&tower, "s");
    let u = Scalar::var(&tower, "u");
    let a3 = a
        .mul(&r.pow(2))
        .add(&b.mul(&s.pow(2)))
        .add(&a.mul(&b).mul(&u.pow(2)));
    let mut squares = vec![a, b];
    squares.extend(std::iter::repeat(a3).take(n - 2));
    decide_out_generic(&squares, &q)
}

fn check_even_outness(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let n = p_usize(params, "n")?;
    let report = even_family_report(n)?;
    expect_status("condition 1", &report.out1, OutStatus::Holds, Some(true))?;
    expect_status("condition 2", &report.out2, OutStatus::Fails, Some(true))?;
    expect_status("condition 3", &report.out3, OutStatus::Fails, Some(true))?;
    let mut generic_value = 0usize;
    for p in &report.patterns {
        let PatternOutcome::Empty { certificates, .. } = &p.outcome else {
            return Err(Error::Internal(format!(
                "pattern {:?} is not machine-refuted",
                p.signs
            )));
        };
        for c in certificates {
            c.verify()?;
            if matches!(c, Certificate::GenericValueObstruction { .. }) {
                generic_value += 1;
            }
        }
    }
    if report.patterns.len() != 4 {
        return Err(Error::Internal(format!(
            "expected 4 admissible sign patterns, found {}",
            report.patterns.len()
        )));
    }
    if generic_value == 0 {
        return Err(Error::Internal(
            "no pattern refutation used the generic-value obstruction".into(),
        ));
    }
    Ok(format!(
        "all 4 admissible patterns machine-refuted ({generic_value} generic-value obstructions)"
    ))
}

fn check_odd_outness(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let base = p_base(params)?;
    let report = odd_family_report(base)?;
    expect_status("condition 1", &report.out1, OutStatus::Holds, Some(true))?;
    match base {
        BaseKind::GaussianRationals => {
            expect_status("condition 2", &report.out2, OutStatus::Holds, Some(true))?;
            let w = report
                .out2
                .witness
                .as_ref()
                .ok_or_else(|| Error::Internal("missing witness".into()))?;
            if w.multiplier != "a1" {
                return Err(Error::Internal(format!(
                    "witness multiplier {} instead of a1",
                    w.multiplier
                )));
            }
            expect_status("condition 3", &report.out3, OutStatus::Fails, Some(false))?;
            Ok("improper witness with multiplier a1 verified; order-2 case \
                fails by the cited valuation claim"
                .into())
        }
        BaseKind::Rationals => {
            expect_status("condition 2", &report.out2, OutStatus::Fails, Some(false))?;
            expect_status("condition 3", &report.out3, OutStatus::Fails, Some(false))?;
            // the machine-checkable half: every mixed pattern refuted by a
            // verified certificate
            let mut refuted = 0;
            for p in &report.patterns {
                if let PatternOutcome::Empty { certificates, .. } = &p.outcome {
                    refuted += 1;
                    for c in certificates {
                        c.verify()?;
                    }
                }
            }
            Ok(format!(
                "{refuted} patterns machine-refuted; the all-minus pattern \
                 rests on the cited valuation claim"
            ))
        }
    }
}

fn check_unitary_example(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    let base = p_base(params)?;
    let m = p_usize(params, "m")?;
    let report = verify_unitary_example(m, base)?;
    expect_status("condition 1", &report.out1, OutStatus::Holds, Some(false))?;
    match base {
        BaseKind::Rationals => {
            expect_status("condition 2", &report.out2, OutStatus::Fails, Some(true))?
        }
        BaseKind::GaussianRationals => {
            expect_status("condition 2", &report.out2, OutStatus::Holds, Some(true))?
        }
    }
    expect_status("condition 3", &report.out3, OutStatus::Fails, Some(false))?;
    Ok("statuses and certificates replayed".into())
}

/// Consistency evidence for an asserted claim; never decides it.
fn asserted_evidence(params: &BTreeMap<String, Value>) -> Result<String, Error> {
    match params.get("evidence").and_then(|v| v.as_str()) {
        Some("symbol-specialization") => {
            // specialize a1 = 2, a2 = 3 and ask for mu with
            // (2,mu) = (3,mu) = (a3,mu) = Q over Q; the outcome is recorded
            // as evidence only
            let tower = FieldTower::rationals();
            let two = Scalar::from_int(&tower, 2);
            let three = Scalar::from_int(&tower, 3);
            let a3 = odd_family_a3(&two, &three);
            let cs: Vec<crate::quadforms::Constraint> = [&two, &three, &a3]
                .iter()
                .map(|s| crate::quadforms::Constraint {
                    a: s.constant_value().expect("constant").re.clone(),
                    target: crate::quadforms::SymbolTarget::EqualToQ,
                })
                .collect();
            let out = crate::quadforms::solve_prescribed_symbols(
                &cs,
                &two.constant_value().unwrap().re,
                &three.constant_value().unwrap().re,
            )?;
            Ok(format!(
                "specialization a1=2, a2=3: prescribed-symbol outcome {}",
                match out {
                    crate::quadforms::SymbolOutcome::Solution { .. } => "solution",
                    crate::quadforms::SymbolOutcome::Empty(_) => "empty",
                    crate::quadforms::SymbolOutcome::Unknown(_) => "unknown",
                }
            ))
        }
        Some("pure-square-refutation") => {
            let tower = FieldTower::new(BaseKind::Rationals, &["a1", "a2"]);
            let q = QuatAlgebra::new(
                Scalar::var(&tower, "a1"),
                Scalar::var(&tower, "a2"),
            )?;
            match pure_with_square(&q, &Scalar::one(&tower))? {
                PureResult::None(cert) => {
                    cert.verify()?;
                    Ok("blockwise sub-step certified: no pure quaternion \
                        squares to 1 in the generic division algebra"
                        .into())
                }
                _ => Err(Error::Internal("pure-square sub-step failed".into())),
            }
        }
        Some(other) => Err(Error::Parse(format!("unknown evidence kind {other:?}"))),
        None => Ok("cited without machine evidence".into()),
    }
}

fn run_entry(entry: &CorpusEntry) -> ClaimResult {
    let outcome = match entry.check.as_str() {
        "scalar-identity" => check_scalar_identity(&entry.params),
        "binary-witness" => check_binary_witness(&entry.params),
        "norm-form-minus-one" => check_norm_form_minus_one(&entry.params),
        "even-outness" => check_even_outness(&entry.params),
        "odd-outness" => check_odd_outness(&entry.params),
        "unitary-example" => check_unitary_example(&entry.params),
        "asserted" => asserted_evidence(&entry.params),
        other => Err(Error::Parse(format!("unknown check kind {other:?}"))),
    };
    match outcome {
        Ok(detail) => ClaimResult {
            id: entry.id.clone(),
            status: entry.status.clone(),
            passed: true,
            detail,
        },
        Err(e) => ClaimResult {
            id: entry.id.clone(),
            status: entry.status.clone(),
            // asserted entries never block, but a broken evidence run is
            // still surfaced in the detail text
            passed: entry.status == "asserted",
            detail: format!("FAILED: {e}"),
        },
    }
}

pub fn run_corpus(entries: &[CorpusEntry]) -> CorpusReport {
    let mut results: Vec<ClaimResult> = entries.iter().map(run_entry).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let verified_passed = results
        .iter()
        .filter(|r| r.status == "verified" && r.passed)
        .count();
    let verified_failed = results
        .iter()
        .filter(|r| r.status == "verified" && !r.passed)
        .count();
    let asserted_count = results.iter().filter(|r| r.status == "asserted").count();
    CorpusReport {
        results,
        verified_passed,
        verified_failed,
        asserted_count,
    }
}

/// Evaluate a JSON request of the form `{"command": "symbol", "a": "-1",
/// ...}` (same payloads as the CLI subcommands) and return the response
/// object plus the process-style exit code. This is the embedding entry
/// point used by the C bindings.
pub fn eval_json(request: &str) -> (Value, i32) {
    let cmd: Command = match serde_json::from_str(request) {
        Ok(c) => c,
        Err(e) => return (json!({ "error": format!("bad request: {e}") }), 1),
    };
    match run(cmd) {
        Ok(out) => (json!({ "code": out.code, "report": out.report }), out.code),
        Err(e) => (json!({ "code": 1, "error": e.to_string() }), 1),
    }
}

fn run_verify(args: VerifyArgs) -> Result<RunOutput, Error> {
    let path = args.corpus.unwrap_or_else(default_corpus_path);
    let entries = load_corpus(&path)?;
    let report = run_corpus(&entries);
    let mut human = String::new();
    for r in &report.results {
        human.push_str(&format!(
            "[{}] {} — {}\n",
            if r.passed { "ok" } else { "FAIL" },
            r.id,
            r.detail
        ));
    }
    human.push_str(&format!(
        "{} verified passed, {} failed, {} cited claims reported",
        report.verified_passed, report.verified_failed, report.asserted_count
    ));
    let code = if report.verified_failed > 0 { 1 } else { 0 };
    Ok(RunOutput {
        report: serde_json::to_value(&report).expect("report serialization"),
        human,
        code,
    })
}
