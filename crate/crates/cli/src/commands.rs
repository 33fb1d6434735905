use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pointpush::bounds::{eff_bounds, eff_table, format_sig, table_to_csv, table_to_json, DEFAULT_TABLE_MAX, TABLE_HEADER};
use pointpush::freegroup::growth_estimate;
use pointpush::gsr::{gsr_two_obstacles, incidence_set, rho_k_bruteforce};
use pointpush::laurent::{phi, unity_scan, Cover, LaurentMatrix};
use pointpush::matrix_rep::{gen_a, gen_a_bar, gen_e, gen_t, h_matrix, h_partial, hhat_matrix, psi};
use pointpush::protocol::{efficiency_estimate, protocol_automorphism};
use pointpush::spectral::{rho, spectral_radius};
use pointpush::verify::run_suite;
use pointpush::{Config, ExactMatrix, ProtocolWord};

use crate::Failure;

/// Rendered result of one command.
pub struct Document {
    pub command: &'static str,
    pub params: Value,
    pub result: Value,
    /// Preformatted CSV, when the result is naturally tabular.
    pub csv: Option<String>,
    /// Preformatted text, when a flat key listing would read poorly.
    pub text: Option<String>,
    pub passed: bool,
    pub elapsed_seconds: f64,
}

impl Document {
    fn new(command: &'static str, params: impl Serialize, result: impl Serialize) -> Result<Self, Failure> {
        Ok(Self {
            command,
            params: to_value(params)?,
            result: to_value(result)?,
            csv: None,
            text: None,
            passed: true,
            elapsed_seconds: 0.0,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Other(e.into()))
}

fn timed(start: Instant, mut doc: Document) -> Document {
    doc.elapsed_seconds = start.elapsed().as_secs_f64();
    doc
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    /// Number of obstacles.
    #[arg(long)]
    pub n: usize,
}

pub fn bounds(a: &BoundsArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    let b = eff_bounds(a.n, cfg)?;
    let mut doc = Document::new("bounds", a, &b)?;
    doc.csv = Some(table_to_csv(std::slice::from_ref(&b))?);
    Ok(timed(t, doc))
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    /// Largest N accepted.
    #[arg(long, default_value_t = DEFAULT_TABLE_MAX)]
    pub max_n: usize,
}

pub fn table(a: &TableArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    let rows = eff_table(a.from, a.to, a.max_n, cfg)?;
    let json = table_to_json(&rows)?;
    let mut doc = Document::new("table", a, &json)?;
    doc.csv = Some(table_to_csv(&rows)?);
    doc.text = Some(render_table(&json));
    Ok(timed(t, doc))
}

fn render_table(rows: &Value) -> String {
    let cells: Vec<Vec<String>> = rows
        .as_array()
        .into_iter()
        .flatten()
        .map(|r| {
            TABLE_HEADER
                .iter()
                .map(|h| match &r[*h] {
                    Value::Number(n) if n.is_f64() => format_sig(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                })
                .collect()
        })
        .collect();
    let header: Vec<String> = TABLE_HEADER.iter().map(|s| s.to_string()).collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| cells.iter().chain([&header]).map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    std::iter::once(&header)
        .chain(&cells)
        .map(|r| {
            r.iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    /// Psi of the hypotrochoid protocol, or of its first k letters with --k.
    #[value(name = "H")]
    H,
    /// Product A(1)..A(N) of the reduced incidence matrices.
    #[value(name = "Hhat")]
    Hhat,
    /// Generator image E(k) = I + T(k).
    #[value(name = "E")]
    E,
    /// Nilpotent part T(k).
    #[value(name = "T")]
    T,
    /// Reduced incidence matrix A(k) = |E(k)|.
    #[value(name = "A")]
    A,
    /// Full incidence matrix of a_k, dimension N+1.
    #[value(name = "Abar")]
    Abar,
    /// Psi of a protocol.
    #[value(name = "psi")]
    Psi,
    /// Laurent matrix on the full cover.
    #[value(name = "phi")]
    Phi,
    /// Laurent matrix on the prime cover.
    #[value(name = "phiprime")]
    PhiPrime,
}

#[derive(Args, Debug, Serialize)]
pub struct MatrixArgs {
    #[arg(long, value_enum)]
    pub kind: MatrixKind,
    #[arg(long)]
    pub n: usize,
    /// Generator index for E, T, A, Abar; single-generator protocol for psi/phi.
    #[arg(long)]
    pub k: Option<usize>,
    /// Protocol word such as "a1 a2^-1" for psi, phi and phiprime.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Evaluate a Laurent matrix at t = 1 or t = -1.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<i64>,
}

enum AnyMatrix {
    Exact(ExactMatrix),
    Laurent(LaurentMatrix),
}

fn need_k(a: &MatrixArgs) -> Result<usize, Failure> {
    a.k.ok_or_else(|| Failure::Usage(format!("--k is required for --kind {:?}", a.kind)))
}

fn protocol_of(a: &MatrixArgs) -> Result<ProtocolWord, Failure> {
    match (&a.protocol, a.k) {
        (Some(text), None) => Ok(ProtocolWord::parse(text, a.n)?),
        (None, Some(k)) => Ok(ProtocolWord::new(a.n, [(k, 1)])?),
        _ => Err(Failure::Usage("give exactly one of --protocol and --k".into())),
    }
}

pub fn matrix(a: &MatrixArgs, _cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    if a.eval.is_some() && !matches!(a.kind, MatrixKind::Phi | MatrixKind::PhiPrime) {
        return Err(Failure::Usage("--eval applies to phi and phiprime only".into()));
    }
    let m = match a.kind {
        MatrixKind::H => AnyMatrix::Exact(match a.k {
            Some(k) if k <= a.n => h_partial(k, a.n)?,
            Some(k) => return Err(Failure::Usage(format!("--k {k} exceeds N = {}", a.n))),
            None => h_matrix(a.n)?,
        }),
        MatrixKind::Hhat => AnyMatrix::Exact(hhat_matrix(a.n)?),
        MatrixKind::E => AnyMatrix::Exact(gen_e(need_k(a)?, a.n)?),
        MatrixKind::T => AnyMatrix::Exact(gen_t(need_k(a)?, a.n)?),
        MatrixKind::A => AnyMatrix::Exact(gen_a(need_k(a)?, a.n)?),
        MatrixKind::Abar => AnyMatrix::Exact(gen_a_bar(need_k(a)?, a.n)?),
        MatrixKind::Psi => AnyMatrix::Exact(psi(&protocol_of(a)?)),
        MatrixKind::Phi | MatrixKind::PhiPrime => {
            let cover = if a.kind == MatrixKind::Phi { Cover::Full } else { Cover::Prime };
            let lm = phi(&protocol_of(a)?, cover);
            match a.eval {
                Some(s) if s == 1 || s == -1 => AnyMatrix::Exact(lm.eval_sign(s)?),
                Some(s) => return Err(Failure::Usage(format!("--eval must be 1 or -1, got {s}"))),
                None => AnyMatrix::Laurent(lm),
            }
        }
    };
    let (dim, body, csv, text) = match &m {
        AnyMatrix::Exact(e) => {
            let text = e
                .to_string_rows()
                .iter()
                .map(|r| r.join(" "))
                .collect::<Vec<_>>()
                .join("\n");
            (e.dim(), to_value(e)?, e.to_csv()?, text)
        }
        AnyMatrix::Laurent(l) => {
            let rows: Vec<Vec<String>> = (0..l.dim())
                .map(|i| l.row(i).iter().map(ToString::to_string).collect())
                .collect();
            (l.dim(), to_value(l)?, csv_rows(&rows)?, l.to_string())
        }
    };
    let result = json!({
        "kind": a.kind,
        "n": a.n,
        "dim": dim,
        "laurent": matches!(m, AnyMatrix::Laurent(_)),
        "matrix": body,
    });
    let header = (1..=dim).map(|c| format!("c{c}")).collect::<Vec<_>>().join(",");
    let mut doc = Document::new("matrix", a, result)?;
    doc.csv = Some(format!("{header}\n{csv}"));
    doc.text = Some(text);
    Ok(timed(t, doc))
}

fn csv_rows(rows: &[Vec<String>]) -> Result<String, Failure> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in rows {
        w.write_record(r).map_err(|e| Failure::Other(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Other(anyhow::anyhow!(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Failure::Other(e.into()))
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    /// Protocol word such as "a1 a2^-1"; may be empty.
    #[arg(long, allow_hyphen_values = true)]
    pub protocol: String,
    #[arg(long)]
    pub n: usize,
    /// Number of automorphism iterations.
    #[arg(long, default_value_t = 10)]
    pub iters: usize,
    /// Generator whose images are iterated.
    #[arg(long, default_value_t = 1)]
    pub seed_index: usize,
    /// Largest root-of-unity order sampled for the Laurent lower bound.
    #[arg(long, default_value_t = 6)]
    pub q_max: usize,
}

pub fn entropy(a: &EntropyArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    let p = ProtocolWord::parse(&a.protocol, a.n)?;
    let aut = protocol_automorphism(&p);
    let growth = growth_estimate(&aut, a.seed_index, a.iters, cfg.length_cap)?;
    let entropy = growth.entropy_estimate().unwrap_or(0.0).max(0.0);
    let efficiency = if p.is_empty() { None } else { Some(efficiency_estimate(&p, entropy)?) };
    let psi_lower = rho(&psi(&p))?.max(1.0).ln();
    let scan = unity_scan(&p, Cover::Full, a.q_max, cfg)?;
    let laurent_lower = scan.best.radius.max(1.0).ln();
    let incidence_upper = rho(&aut.incidence_matrix())?.max(1.0).ln();
    let result = json!({
        "protocol": p.to_string(),
        "length": p.len(),
        "growth": growth,
        "entropy_estimate": entropy,
        "efficiency_estimate": efficiency,
        "cross_check": {
            "psi_lower": psi_lower,
            "laurent_lower": laurent_lower,
            "laurent_best_root": { "p": scan.best.p, "q": scan.best.q },
            "incidence_upper": incidence_upper,
        },
    });
    Ok(timed(t, Document::new("entropy", a, result)?))
}

#[derive(Args, Debug, Serialize)]
pub struct GsrArgs {
    #[arg(long)]
    pub n: usize,
    /// Product length; defaults to N.
    #[arg(long)]
    pub k: Option<usize>,
}

pub const GSR_TOL: f64 = 1e-8;

pub fn gsr(a: &GsrArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    let k = a.k.unwrap_or(a.n);
    if k == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let set = incidence_set(a.n)?;
    let bf = rho_k_bruteforce(&set, k, cfg.product_budget)?;
    let hhat_root = rho(&hhat_matrix(a.n)?)?.powf(1.0 / a.n as f64);
    let mut passed = bf.value <= 3.0 * (1.0 + 1e-12);
    let mut result = json!({
        "brute_force": bf,
        "hhat_root": hhat_root,
        "ceiling": 3.0,
    });
    if k == a.n {
        let difference = (bf.value - hhat_root).abs();
        let cyclic = (0..a.n).all(|s| {
            let mut c: Vec<usize> = (1..=a.n).collect();
            c.rotate_left(s);
            bf.achieving.contains(&c)
        });
        passed &= difference <= GSR_TOL && cyclic;
        result["difference"] = json!(difference);
        result["cyclic_shifts_attain"] = json!(cyclic);
    }
    if a.n == 2 {
        result["two_obstacle_gsr"] = to_value(gsr_two_obstacles()?)?;
    }
    let mut doc = Document::new("gsr", a, result)?;
    doc.passed = passed;
    Ok(timed(t, doc))
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassifyKind {
    #[value(name = "H")]
    H,
    #[value(name = "Hhat")]
    Hhat,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub kind: ClassifyKind,
}

pub fn classify(a: &ClassifyArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    let m = match a.kind {
        ClassifyKind::H => h_matrix(a.n)?,
        ClassifyKind::Hhat => hhat_matrix(a.n)?,
    };
    let rep = spectral_radius(&m, cfg)?;
    let mut doc = Document::new("classify", a, &rep)?;
    let marginal = rep.classification.marginal_roots.len();
    doc.text = Some(format!(
        "radius = {} (+/- {})\nclassification = {} ({})\nmarginal_roots = {marginal}\nchar_poly = {}",
        format_sig(rep.radius),
        format_sig(rep.tolerance),
        rep.classification.classification,
        rep.classification.label,
        rep.char_poly,
    ));
    Ok(timed(t, doc))
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Largest N checked.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flip the sign of one intermediate-product cell before checking.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

pub fn verify(a: &VerifyArgs, cfg: &Config) -> Result<Document, Failure> {
    let t = Instant::now();
    if a.n_max < 2 {
        return Err(Failure::Usage(format!("--n-max must be at least 2, got {}", a.n_max)));
    }
    let report = run_suite(a.n_max, a.seed, a.inject_fault, cfg)?;
    let text = report
        .checks
        .iter()
        .map(|c| {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) => format!("[{mark}] {} ({} cases): {d}", c.name, c.cases),
                None => format!("[{mark}] {} ({} cases)", c.name, c.cases),
            }
        })
        .chain([format!("seed = {}", report.seed)])
        .collect::<Vec<_>>()
        .join("\n");
    let mut doc = Document::new("verify", a, &report)?;
    doc.passed = report.passed();
    doc.text = Some(text);
    Ok(timed(t, doc))
}
