use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Pow;
use serde_json::{json, Value};

use rulinglab::augcount::{self, Dimension};
use rulinglab::dga;
use rulinglab::mcs::{sweep_enumerate, SweepOptions};
use rulinglab::polynomial::{self, compose_check, ruling_matrix};
use rulinglab::ruling::enumerate_rulings;
use rulinglab::{BoundaryRuling, Error, FilteredComplex, Modulus, PrimeField, TangleFront, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "rulinglab",
    version,
    about = "Rulings, LCH DGAs and augmentation counts for Legendrian tangle fronts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check strand counts, cusp potentials and base points.
    Validate(FileArgs),
    /// Potentials, crossing degrees and, for closed fronts, tb and rot.
    Invariants(FileArgs),
    /// List normal rulings between two boundary rulings.
    Rulings(PairArgs),
    /// Ruling polynomial of one boundary pair, or the whole matrix.
    Poly(PairArgs),
    /// Check matrix(T1 T2) = matrix(T1) matrix(T2).
    ComposeCheck(ComposeArgs),
    /// Print the LCH DGA and check d^2 = 0.
    Dga(FileArgs),
    /// Count augmentations with fixed boundary conditions.
    Count(CountArgs),
    /// Verify the counting theorem on every acyclic boundary pair.
    Verify(VerifyArgs),
    /// Verify the generalized counting identity for a homology type.
    VerifyGen(VerifyGenArgs),
    /// Barannikov normal form of a filtered complex given as JSON.
    Barannikov(BarannikovArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sweep,
    Dga,
}

#[derive(Args)]
struct Common {
    /// Grading modulus; defaults to 2r from the file.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, env = "RULINGLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct FileArgs {
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PairArgs {
    file: PathBuf,
    /// Left boundary ruling, e.g. "(1,2)(3,4)" or "(1,2)[3][4]".
    #[arg(long)]
    left: Option<String>,
    #[arg(long)]
    right: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ComposeArgs {
    file: PathBuf,
    second: Option<PathBuf>,
    /// Split the single input after this many slices.
    #[arg(long)]
    cut: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CountArgs {
    file: PathBuf,
    #[arg(long)]
    left: String,
    #[arg(long)]
    right: String,
    #[arg(long)]
    q: u64,
    #[arg(long, value_enum, default_value_t = Method::Sweep)]
    method: Method,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5])]
    primes: Vec<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyGenArgs {
    file: PathBuf,
    /// Homology type, e.g. "H=[2,0]".
    #[arg(long)]
    homology: String,
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3])]
    primes: Vec<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BarannikovArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

enum Failure {
    Input(String),
    Identity,
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(_) => Failure::Budget(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<TangleFront, Failure> {
    let t = TangleFront::parse(&read(path)?)?;
    let rep = t.validate();
    if !rep.consistent() {
        return Err(Failure::Input(format!("{}:\n{rep}", path.display())));
    }
    Ok(t)
}

fn modulus(t: &TangleFront, c: &Common) -> Result<Modulus, Failure> {
    let m = Modulus(c.m.unwrap_or(2 * t.r));
    rulinglab::ruling::check_modulus(t, m)?;
    Ok(m)
}

fn boundary(text: &str, n: usize) -> Result<BoundaryRuling, Failure> {
    Ok(BoundaryRuling::parse(text, n)?)
}

fn homology(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("homology type `{text}`: expected H=[k0,k1,...]"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let body = s.strip_prefix("H=").unwrap_or(&s);
    let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(bad)?;
    body.split(',').filter(|x| !x.is_empty()).map(|x| x.parse().map_err(|_| bad())).collect()
}

fn emit(format: Format, text: &str, value: Value) {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Identity)
    }
}

fn validate(a: FileArgs) -> Outcome {
    let t = TangleFront::parse(&read(&a.file)?)?;
    let rep = t.validate();
    emit(a.common.format, &rep.to_string(), serde_json::to_value(&rep).unwrap());
    if rep.consistent() {
        Ok(())
    } else {
        Err(Failure::Input("front is inconsistent".into()))
    }
}

fn invariants(a: FileArgs) -> Outcome {
    let t = load(&a.file)?;
    let tab = t.propagate_potential()?;
    let classical = t.is_closed().then(|| t.classical_invariants()).transpose()?;
    let mut text = format!("r = {}\nleft potentials {:?}\nright potentials {:?}\n", t.r, tab.left(), tab.right());
    text += &format!("crossing degrees {:?}\n", tab.crossing_degrees());
    text += &format!(
        "crossings {}, right cusps {}, base points {}",
        t.num_crossings(),
        t.num_right_cusps(),
        t.num_base_points()
    );
    if let Some(c) = &classical {
        text += &format!("\ntb = {}, rot = {}", c.tb, c.rot);
    }
    let value = json!({
        "r": t.r,
        "left": tab.left(),
        "right": tab.right(),
        "boundaries": tab.boundaries,
        "crossing_degrees": tab.crossing_degrees(),
        "crossings": t.num_crossings(),
        "right_cusps": t.num_right_cusps(),
        "base_points": t.num_base_points(),
        "classical": classical,
    });
    emit(a.common.format, &text, value);
    Ok(())
}

fn boundary_pair(t: &TangleFront, a: &PairArgs) -> Result<Option<(BoundaryRuling, BoundaryRuling)>, Failure> {
    let tab = t.propagate_potential()?;
    match (&a.left, &a.right) {
        (Some(l), Some(r)) => Ok(Some((boundary(l, tab.left().len())?, boundary(r, tab.right().len())?))),
        (None, None) => Ok(None),
        _ => Err(Failure::Input("give both --left and --right, or neither".into())),
    }
}

fn rulings(a: PairArgs) -> Outcome {
    let t = load(&a.file)?;
    let m = modulus(&t, &a.common)?;
    let (l, r) = boundary_pair(&t, &a)?.ok_or_else(|| Failure::Input("rulings needs --left and --right".into()))?;
    let generalized = !l.is_acyclic() || !r.is_acyclic();
    let paths = enumerate_rulings(&t, m, &l, &r, generalized)?;
    let mut text = format!("{} normal rulings {l} -> {r}", paths.len());
    for p in &paths {
        text += &format!("\nswitches {:?}  chi {}  r {}  h {}", p.switch_set(), p.chi(), p.r(), p.h);
    }
    emit(a.common.format, &text, json!({ "left": l, "right": r, "rulings": paths }));
    Ok(())
}

fn poly(a: PairArgs) -> Outcome {
    let t = load(&a.file)?;
    let m = modulus(&t, &a.common)?;
    match boundary_pair(&t, &a)? {
        Some((l, r)) if l.is_acyclic() && r.is_acyclic() => {
            let p = polynomial::ruling_polynomial(&t, m, &l, &r)?;
            emit(a.common.format, &p.to_string(), json!({ "left": l, "right": r, "polynomial": p.to_json() }));
        }
        Some((l, r)) => {
            let p = polynomial::generalized_ruling_polynomial(&t, m, &l, &r)?;
            let text = format!("{p}\nwith z = s - 1/s, q = s^2: {}", p.substitute());
            emit(a.common.format, &text, json!({ "left": l, "right": r, "polynomial": p.to_json() }));
        }
        None => {
            let mat = ruling_matrix(&t, m)?;
            emit(a.common.format, mat.to_string().trim_end(), serde_json::to_value(&mat).unwrap());
        }
    }
    Ok(())
}

fn compose(a: ComposeArgs) -> Outcome {
    let first = load(&a.file)?;
    let m = modulus(&first, &a.common)?;
    let (t1, t2) = match (&a.second, a.cut) {
        (Some(p), None) => (first, load(p)?),
        (None, Some(at)) => first.split(at)?,
        _ => return Err(Failure::Input("give a second file or --cut N".into())),
    };
    let rep = compose_check(&t1, &t2, m)?;
    let mut text = format!("{} entries checked, {} discrepancies", rep.entries_checked, rep.discrepancies.len());
    for d in &rep.discrepancies {
        text += &format!("\nFAIL <{}|R|{}>: composed {}, product {}", d.left, d.right, d.composed, d.product);
    }
    emit(a.common.format, &text, serde_json::to_value(&rep).unwrap());
    verdict(rep.passed())
}

fn dga_cmd(a: FileArgs) -> Outcome {
    let t = load(&a.file)?;
    let p = dga::dga(&t)?;
    let sq = dga::check_d_squared(&p)?;
    let mut text = p.to_string();
    if sq.passed() {
        text += "\nd^2 = 0";
    }
    for (g, res) in &sq.residues {
        text += &format!("\nFAIL d^2 {g} = {res}");
    }
    emit(a.common.format, text.trim_end(), json!({ "dga": p.to_json(), "d_squared": sq }));
    verdict(sq.passed())
}

fn count(a: CountArgs) -> Outcome {
    let t = load(&a.file)?;
    let m = modulus(&t, &a.common)?;
    let tab = t.propagate_potential()?;
    let l = boundary(&a.left, tab.left().len())?;
    let r = boundary(&a.right, tab.right().len())?;
    l.check_potentials(tab.left(), m)?;
    r.check_potentials(tab.right(), m)?;
    let f = PrimeField::new(a.q)?;
    let eps = FilteredComplex::canonical(f, m, tab.left().to_vec(), &l);
    let n = match a.method {
        Method::Sweep => {
            sweep_enumerate(&t, m, &eps, &r, SweepOptions { budget: a.common.budget, witnesses: false })?.count
        }
        Method::Dga => dga::dga_count(&t, m, &eps, &r, a.common.budget)?.count,
    };
    let mut text = format!("{n} augmentations over F_{} with {l} -> {r}", a.q);
    let mut value = json!({ "q": a.q, "left": l, "right": r, "count": n });
    if t.validate().base_point_hypothesis() {
        let dim = augcount::variety_dimension(&t, m, &l, &r)?;
        text += &format!("\ndimension {dim}");
        value["dimension"] = serde_json::to_value(dim).unwrap();
        if let Dimension::Finite(d) = dim {
            let q = BigRational::from_integer(a.q.into());
            let aug = BigRational::from_integer(n.into()) * Pow::pow(q, -(d as i32));
            text += &format!("\naugmentation number {aug}");
            value["augmentation_number"] = json!(aug.to_string());
        }
    }
    emit(a.common.format, &text, value);
    Ok(())
}

fn verify(a: VerifyArgs) -> Outcome {
    let t = load(&a.file)?;
    let m = modulus(&t, &a.common)?;
    let rep = augcount::verify_main_theorem(&t, m, &a.primes, a.common.budget)?;
    emit(a.common.format, &rep.to_string(), serde_json::to_value(&rep).unwrap());
    verdict(rep.passed())
}

fn verify_gen(a: VerifyGenArgs) -> Outcome {
    let t = load(&a.file)?;
    let m = modulus(&t, &a.common)?;
    let h = homology(&a.homology)?;
    let rep = augcount::verify_generalized(&t, m, &h, &a.primes, a.common.budget)?;
    emit(a.common.format, &rep.to_string(), serde_json::to_value(&rep).unwrap());
    verdict(rep.passed())
}

fn barannikov(a: BarannikovArgs) -> Outcome {
    let c = FilteredComplex::from_json(&read(&a.file)?)?;
    let t = c.barannikov();
    let s = c.standardize();
    let text = format!("{t}\nupper {:?}\nlower {:?}\nhomological {:?}", t.upper(), t.lower(), t.homological);
    let value = json!({
        "pairing": t.to_string(),
        "pairs": t.pairs,
        "homological": t.homological,
        "standard": s.standard.to_json(),
    });
    emit(a.format, &text, value);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Validate(a) => validate(a),
        Cmd::Invariants(a) => invariants(a),
        Cmd::Rulings(a) => rulings(a),
        Cmd::Poly(a) => poly(a),
        Cmd::ComposeCheck(a) => compose(a),
        Cmd::Dga(a) => dga_cmd(a),
        Cmd::Count(a) => count(a),
        Cmd::Verify(a) => verify(a),
        Cmd::VerifyGen(a) => verify_gen(a),
        Cmd::Barannikov(a) => barannikov(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
