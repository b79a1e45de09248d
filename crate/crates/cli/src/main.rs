use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mapcone::algebra::{ArtinAlgebra, DglaMorphism};
use mapcone::cone::{bernoulli, bernoulli_recurrence, Cone, ConeBrackets};
use mapcone::deformation::{
    cone_element, gauge_equiv_check, gauge_from_homotopy, homotopy_from_gauge, mc_pair_check, mc_pair_residues,
    mc_residue, MCPair, TensorElement,
};
use mapcone::format;
use mapcone::linfty::{check_linfty, Brackets, LInftyStructure};
use mapcone::scalar::{factorial, fmt_scalar};
use mapcone::transfer::{compare_brackets, RecursiveTransfer, TreeSum};
use mapcone::{fixtures, Error, GradedSpace, Scalar, Vector};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mapcone", version, about = "L∞ structures on mapping cones of DGLA morphisms")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    format: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Args)]
struct MorphismArg {
    /// Morphism document (TOML with [source], [target], [[map]]).
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    morphism: Option<PathBuf>,
    /// Built-in fixture name (see `mapcone fixtures`).
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct ArtinArg {
    /// Artinian algebra document.
    #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
    artin: Option<PathBuf>,
    /// Use K[e]/(e^k) with monomials `e`, `e^2`, ….
    #[arg(long)]
    eps: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the DGLA axioms of a DGLA document.
    CheckDgla { file: PathBuf },
    /// Tabulate the closed-form cone brackets.
    Cone {
        #[command(flatten)]
        chi: MorphismArg,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Compare closed form, recursive transfer and tree sums.
    CompareTransfer {
        #[command(flatten)]
        chi: MorphismArg,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
    /// Check the L∞ relations of a tabulated structure.
    CheckLinfty {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        up_to: usize,
    },
    /// Print B_n and B_n/n! up to n.
    Bernoulli {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Check a Maurer–Cartan pair both through the pair equations and the cone.
    McCheck {
        #[command(flatten)]
        chi: MorphismArg,
        #[command(flatten)]
        artin: ArtinArg,
        #[arg(long)]
        candidates: PathBuf,
    },
    /// Check that a witness carries [pair] to [target].
    GaugeCheck {
        #[command(flatten)]
        chi: MorphismArg,
        #[command(flatten)]
        artin: ArtinArg,
        #[arg(long)]
        candidates: PathBuf,
    },
    /// Build the homotopy attached to [pair] and [witness] and verify it.
    HomotopyBuild {
        #[command(flatten)]
        chi: MorphismArg,
        #[command(flatten)]
        artin: ArtinArg,
        #[arg(long)]
        candidates: PathBuf,
    },
    /// List fixtures, or print one as a morphism document.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
    },
}

/// Outcome of a command: verdict plus both renderings.
struct Report {
    ok: bool,
    text: String,
    json: Value,
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Report, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_morphism(arg: &MorphismArg) -> Result<DglaMorphism, Failure> {
    match (&arg.morphism, &arg.fixture) {
        (Some(p), _) => Ok(format::parse_morphism(&read(p)?)?),
        (None, Some(name)) => fixtures::named(name)
            .ok_or_else(|| Failure::Input(format!("unknown fixture `{name}`; known: {}", fixtures::NAMES.join(", ")))),
        (None, None) => Err(Failure::Input("a morphism or fixture is required".into())),
    }
}

fn load_artin(arg: &ArtinArg) -> Result<ArtinAlgebra, Failure> {
    match (&arg.artin, arg.eps) {
        (Some(p), _) => Ok(format::parse_artin(&read(p)?)?),
        (None, Some(k)) if k >= 2 => Ok(ArtinAlgebra::truncated("e", k)?),
        _ => Err(Failure::Input("--eps needs k ≥ 2".into())),
    }
}

fn combo_json(space: &GradedSpace, v: &Vector) -> Value {
    Value::Array(v.iter().map(|(i, c)| json!([space.name(i), fmt_scalar(c)])).collect())
}

fn tensor_json(space: &GradedSpace, art: &ArtinAlgebra, t: &TensorElement) -> Value {
    Value::Array(
        t.terms()
            .into_iter()
            .map(|((b, m), c)| json!([space.name(b), art.space().name(m), fmt_scalar(&c)]))
            .collect(),
    )
}

fn tensor_text(space: &GradedSpace, art: &ArtinAlgebra, t: &TensorElement) -> String {
    if t.is_zero() {
        return "0".into();
    }
    t.terms()
        .into_iter()
        .map(|((b, m), c)| format!("{}·{}⊗{}", fmt_scalar(&c), space.name(b), art.space().name(m)))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn check_dgla(file: &Path) -> Outcome {
    let g = format::parse_dgla(&read(file)?)?;
    let violations = g.check();
    let mut text = String::new();
    if violations.is_empty() {
        writeln!(text, "DGLA of dimension {}: all axioms hold", g.dim()).unwrap();
    }
    for v in &violations {
        writeln!(
            text,
            "{} fails on ({}): residual {}",
            v.axiom,
            v.witnesses.join(", "),
            v.residual.display(g.space())
        )
        .unwrap();
    }
    let json = json!({
        "command": "check-dgla",
        "dimension": g.dim(),
        "ok": violations.is_empty(),
        "violations": violations.iter().map(|v| json!({
            "axiom": v.axiom.to_string(),
            "witnesses": v.witnesses,
            "residual": combo_json(g.space(), &v.residual),
        })).collect::<Vec<_>>(),
    });
    Ok(Report {
        ok: violations.is_empty(),
        text,
        json,
    })
}

fn linfty_json(s: &LInftyStructure) -> Value {
    let space = s.space();
    json!({
        "basis": space.basis().iter().map(|b| json!({"name": b.name, "degree": b.degree})).collect::<Vec<_>>(),
        "max_arity": s.max_arity(),
        "brackets": s.table().iter().map(|(w, v)| json!({
            "inputs": w.iter().map(|&i| space.name(i)).collect::<Vec<_>>(),
            "value": combo_json(space, v),
        })).collect::<Vec<_>>(),
    })
}

fn cone(chi: &MorphismArg, max_arity: usize) -> Outcome {
    let cone = Arc::new(Cone::new(load_morphism(chi)?)?);
    let q = ConeBrackets::new(cone, max_arity)?;
    let table = LInftyStructure::tabulate(&q, max_arity, false)?;
    Ok(Report {
        ok: true,
        text: format::emit_linfty(&table),
        json: json!({"command": "cone", "structure": linfty_json(&table)}),
    })
}

fn compare_transfer(chi: &MorphismArg, max_arity: usize) -> Outcome {
    let cone = Arc::new(Cone::new(load_morphism(chi)?)?);
    let closed = ConeBrackets::new(cone.clone(), max_arity)?;
    let rec = RecursiveTransfer::new(cone.clone(), max_arity)?;
    let trees = TreeSum::new(cone.clone(), max_arity)?;
    let space = cone.space();
    let pairs: [(&str, &dyn Brackets, &dyn Brackets); 2] =
        [("closed form vs recursion", &closed, &rec), ("recursion vs tree sum", &rec, &trees)];
    let mut text = String::new();
    let mut diffs = Vec::new();
    for (label, a, b) in pairs {
        for (w, x, y) in compare_brackets(a, b, 2..=max_arity) {
            let names: Vec<&str> = w.iter().map(|&i| space.name(i)).collect();
            writeln!(text, "{label}: ⟨{}⟩ = {} vs {}", names.join(", "), x.display(space), y.display(space)).unwrap();
            diffs.push(json!({
                "comparison": label,
                "inputs": names,
                "left": combo_json(space, &x),
                "right": combo_json(space, &y),
            }));
        }
    }
    if diffs.is_empty() {
        writeln!(text, "all brackets agree (cone dimension {}, arities 2..={max_arity})", space.dim()).unwrap();
    }
    Ok(Report {
        ok: diffs.is_empty(),
        text,
        json: json!({"command": "compare-transfer", "max_arity": max_arity, "agree": diffs.is_empty(), "differences": diffs}),
    })
}

fn check_linfty_cmd(file: &Path, up_to: usize) -> Outcome {
    let s = format::parse_linfty(&read(file)?)?;
    let violations = check_linfty(&s, up_to)?;
    let space = s.space();
    let mut text = String::new();
    if violations.is_empty() {
        writeln!(text, "L∞ relations hold up to arity {up_to}").unwrap();
    }
    for v in &violations {
        let names: Vec<&str> = v.word.iter().map(|&i| space.name(i)).collect();
        writeln!(text, "arity {} on ({}): residual {}", v.arity, names.join(", "), v.residual.display(space)).unwrap();
    }
    Ok(Report {
        ok: violations.is_empty(),
        text,
        json: json!({
            "command": "check-linfty",
            "up_to": up_to,
            "ok": violations.is_empty(),
            "violations": violations.iter().map(|v| json!({
                "arity": v.arity,
                "inputs": v.word.iter().map(|&i| space.name(i)).collect::<Vec<_>>(),
                "residual": combo_json(space, &v.residual),
            })).collect::<Vec<_>>(),
        }),
    })
}

fn bernoulli_cmd(n: usize) -> Outcome {
    let table = bernoulli(n);
    let classical = bernoulli_recurrence(n);
    let agree = table.verify().is_ok() && table.b == classical;
    let mut text = format!("{:>3}  {:>16}  {:>16}\n", "n", "B_n", "B_n/n!");
    let mut rows = Vec::new();
    for (i, b) in table.b.iter().enumerate() {
        let scaled: Scalar = b / factorial(i);
        writeln!(text, "{i:>3}  {:>16}  {:>16}", fmt_scalar(b), fmt_scalar(&scaled)).unwrap();
        rows.push(json!({"n": i, "b": fmt_scalar(b), "b_over_factorial": fmt_scalar(&scaled)}));
    }
    if !agree {
        writeln!(text, "recursion disagrees with the classical recurrence").unwrap();
    }
    Ok(Report {
        ok: agree,
        text,
        json: json!({"command": "bernoulli", "agrees_with_recurrence": agree, "table": rows}),
    })
}

fn candidates(chi: &DglaMorphism, art: &ArtinAlgebra, path: &Path) -> Result<format::Candidates, Failure> {
    Ok(format::parse_candidates(&read(path)?, chi, art)?)
}

fn need<T: Clone>(v: &Option<T>, table: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| Failure::Lib(Error::format(1, format!("missing [{table}] table"))))
}

fn pair_json(chi: &DglaMorphism, art: &ArtinAlgebra, p: &MCPair) -> Value {
    json!({"x": tensor_json(chi.source.space(), art, &p.x), "a": tensor_json(chi.target.space(), art, &p.a)})
}

fn mc_check(chi: &MorphismArg, artin: &ArtinArg, path: &Path) -> Outcome {
    let chi = load_morphism(chi)?;
    let art = load_artin(artin)?;
    let p = need(&candidates(&chi, &art, path)?.pair, "pair")?;
    let (r1, r2) = mc_pair_residues(&chi, &art, &p);
    let pair_ok = r1.is_zero() && r2.is_zero();
    let cone = Arc::new(Cone::new(chi.clone())?);
    let q = ConeBrackets::new(cone.clone(), art.nil_index().max(2) - 1)?;
    let residue = mc_residue(&q, &art, &cone_element(&cone, &p))?;
    let cone_ok = residue.is_zero();
    let (l, m) = (chi.source.space(), chi.target.space());
    let mut text = String::new();
    writeln!(text, "dx + ½[x,x] = {}", tensor_text(l, &art, &r1)).unwrap();
    writeln!(text, "e^a ∗ χ(x) = {}", tensor_text(m, &art, &r2)).unwrap();
    writeln!(text, "cone residue = {}", tensor_text(cone.space(), &art, &residue)).unwrap();
    writeln!(text, "{}", if pair_ok && cone_ok { "Maurer–Cartan pair" } else { "not a Maurer–Cartan pair" }).unwrap();
    if pair_ok != cone_ok {
        writeln!(text, "pair equations and cone residue disagree").unwrap();
    }
    Ok(Report {
        ok: pair_ok && cone_ok,
        text,
        json: json!({
            "command": "mc-check",
            "pair_equations": pair_ok,
            "cone_residue_zero": cone_ok,
            "first_residual": tensor_json(l, &art, &r1),
            "second_residual": tensor_json(m, &art, &r2),
            "cone_residue": tensor_json(cone.space(), &art, &residue),
        }),
    })
}

fn gauge_check(chi: &MorphismArg, artin: &ArtinArg, path: &Path) -> Outcome {
    let chi = load_morphism(chi)?;
    let art = load_artin(artin)?;
    let c = candidates(&chi, &art, path)?;
    let (p0, p1, w) = (need(&c.pair, "pair")?, need(&c.target, "target")?, need(&c.witness, "witness")?);
    let ok = gauge_equiv_check(&chi, &art, &p0, &p1, &w);
    let acted = mapcone::deformation::gauge_pair_act(&chi, &art, &w, &p0);
    let mut text = String::new();
    if ok {
        writeln!(text, "the witness carries [pair] to [target]").unwrap();
    } else {
        writeln!(text, "the witness carries [pair] to").unwrap();
        writeln!(text, "  x = {}", tensor_text(chi.source.space(), &art, &acted.x)).unwrap();
        writeln!(text, "  a = {}", tensor_text(chi.target.space(), &art, &acted.a)).unwrap();
        writeln!(text, "which differs from [target]").unwrap();
    }
    Ok(Report {
        ok,
        text,
        json: json!({"command": "gauge-check", "equivalent": ok, "image": pair_json(&chi, &art, &acted)}),
    })
}

fn homotopy_build(chi: &MorphismArg, artin: &ArtinArg, path: &Path) -> Outcome {
    let chi = load_morphism(chi)?;
    let art = load_artin(artin)?;
    let c = candidates(&chi, &art, path)?;
    let (p0, w) = (need(&c.pair, "pair")?, need(&c.witness, "witness")?);
    if !mc_pair_check(&chi, &art, &p0) {
        return Ok(Report {
            ok: false,
            text: "[pair] is not a Maurer–Cartan pair\n".into(),
            json: json!({"command": "homotopy-build", "ok": false, "reason": "pair is not Maurer–Cartan"}),
        });
    }
    let h = homotopy_from_gauge(&chi, &art, &p0, &w)?;
    let residue = h.residue(&art)?;
    let start = h.endpoint(&Scalar::from_integer(0.into()));
    let end = h.endpoint(&Scalar::from_integer(1.into()));
    let expected_end = mapcone::deformation::gauge_pair_act(&chi, &art, &w, &p0);
    let (q0, q1, w1) = gauge_from_homotopy(&art, &h)?;
    let extracted = gauge_equiv_check(&chi, &art, &q0, &q1, &w1);
    let ok = residue.is_zero() && start == p0 && end == expected_end && extracted;
    let (ls, ms) = (h.chi.source.space(), h.chi.target.space());
    let mut text = String::new();
    writeln!(text, "l(s) = {}", tensor_text(ls, &art, &h.path.x)).unwrap();
    writeln!(text, "m(s) = {}", tensor_text(ms, &art, &h.path.a)).unwrap();
    writeln!(text, "MC residue over K[s,ds]: {}", if residue.is_zero() { "0" } else { "nonzero" }).unwrap();
    writeln!(text, "endpoints: s=0 {}, s=1 {}", verdict(start == p0), verdict(end == expected_end)).unwrap();
    writeln!(text, "extracted witness: {}", verdict(extracted)).unwrap();
    Ok(Report {
        ok,
        text,
        json: json!({
            "command": "homotopy-build",
            "ok": ok,
            "path": {"x": tensor_json(ls, &art, &h.path.x), "a": tensor_json(ms, &art, &h.path.a)},
            "residue_zero": residue.is_zero(),
            "start_matches": start == p0,
            "end_matches": end == expected_end,
            "extracted_witness": {
                "a": tensor_json(chi.source.space(), &art, &w1.a),
                "b": tensor_json(chi.target.space(), &art, &w1.b),
                "accepted": extracted,
            },
        }),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "mismatch"
    }
}

fn fixtures_cmd(name: &Option<String>) -> Outcome {
    match name {
        None => {
            let mut text = String::new();
            let mut list = Vec::new();
            for n in fixtures::NAMES {
                let chi = fixtures::named(n).expect("listed fixture");
                writeln!(text, "{n:12} dim L = {}, dim M = {}", chi.source.dim(), chi.target.dim()).unwrap();
                list.push(json!({"name": n, "dim_l": chi.source.dim(), "dim_m": chi.target.dim()}));
            }
            Ok(Report {
                ok: true,
                text,
                json: json!({"command": "fixtures", "fixtures": list}),
            })
        }
        Some(n) => {
            let chi = fixtures::named(n).ok_or_else(|| Failure::Input(format!("unknown fixture `{n}`")))?;
            let doc = format::emit_morphism(&chi);
            Ok(Report {
                ok: true,
                json: json!({"command": "fixtures", "name": n, "document": doc}),
                text: doc,
            })
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::CheckDgla { file } => check_dgla(file),
        Command::Cone { chi, max_arity } => cone(chi, *max_arity),
        Command::CompareTransfer { chi, max_arity } => compare_transfer(chi, *max_arity),
        Command::CheckLinfty { file, up_to } => check_linfty_cmd(file, *up_to),
        Command::Bernoulli { n } => bernoulli_cmd(*n),
        Command::McCheck { chi, artin, candidates } => mc_check(chi, artin, candidates),
        Command::GaugeCheck { chi, artin, candidates } => gauge_check(chi, artin, candidates),
        Command::HomotopyBuild { chi, artin, candidates } => homotopy_build(chi, artin, candidates),
        Command::Fixtures { name } => fixtures_cmd(name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Output::Text => print!("{}", report.text),
                Output::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("json")),
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(failure) => {
            let (code, msg, extra) = match failure {
                Failure::Lib(Error::Capacity { what, needed, limit }) => {
                    (3, format!("capacity error: {what} needs {needed}, limit is {limit}"), json!({"needed": needed}))
                }
                Failure::Lib(Error::Format { line, msg }) => (2, format!("line {line}: {msg}"), json!({"line": line})),
                Failure::Lib(e) => (2, e.to_string(), Value::Null),
                Failure::Input(msg) => (2, msg, Value::Null),
            };
            match cli.format {
                Output::Text => eprintln!("error: {msg}"),
                Output::Json => println!("{}", json!({"error": msg, "detail": extra})),
            }
            ExitCode::from(code)
        }
    }
}
