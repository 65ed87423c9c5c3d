use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use jetfol::atlas::{AtlasReport, SplittingData};
use jetfol::cech::{self, CechCochain, CochainKind};
use jetfol::document::{from_json, AtlasDocument, DocumentError, FieldDocument, SplittingDocument};
use jetfol::jet::{self, InvolutivityResult, JetClass, VectorFieldJet};
use jetfol::oracle::{contour_residue_numeric, ContourSpec};
use jetfol::residue::{self, MeromorphicForm1D, SurfaceFieldInput};

#[derive(Parser)]
#[command(name = "jetfol", version, about = "Jets, atlases, obstructions and residues of foliations near a submanifold")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// JSON document; `-` reads standard input.
    #[arg(long, short)]
    input: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Atiyah,
    Normal,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket of the first two fields.
    Bracket(Input),
    /// A field applied to `function`.
    Apply(Input),
    /// Status of every field: general or logarithmic.
    Classify(Input),
    /// Primitive of the closed 1-form `form`.
    Primitive(Input),
    /// Degree-bounded involutivity of the listed fields.
    Involutive {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
    },
    /// Adaptedness, extension and splitting checks on an atlas.
    CheckAtlas {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        adapted: bool,
        #[arg(long, value_name = "K")]
        extend: Option<u32>,
        #[arg(long, value_name = "K")]
        k_split: Option<u32>,
    },
    /// Obstruction cochain of an atlas, with its cocycle check.
    Obstruction {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Whether `sigma` splits the given (or computed) degree-1 cochain.
    VerifySplitting(Input),
    /// Extension generators built from `sigma`.
    ExtensionGenerators(Input),
    ConnectionMatrix(Input),
    BottForm(Input),
    Residue(Input),
    TransversalResidue(Input),
    /// Trapezoidal contour integral of the residue integrand.
    OracleResidue {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Curvature of the universal connection for the first two fields.
    Flatness(Input),
}

struct Failure {
    code: &'static str,
    message: String,
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure { code: e.code(), message: e.to_string() }
            }
        }
    )*};
}

failure_from!(
    DocumentError,
    jetfol::jet::JetError,
    jetfol::atlas::AtlasError,
    jetfol::cech::CechError,
    jetfol::residue::ResidueError,
    jetfol::oracle::OracleError
);

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: "Usage", message: message.into() }
}

struct Outcome {
    text: String,
    json: Value,
    passed: bool,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, passed: true }
    }
}

fn read(input: &Input) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if input.input == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(&input.input).map(|t| text = t)
    };
    res.map_err(|e| Failure { code: "Io", message: format!("{}: {}", input.input, e) })?;
    Ok(text)
}

fn load<T: for<'de> serde::Deserialize<'de>>(input: &Input) -> Result<T, Failure> {
    Ok(from_json(&read(input)?)?)
}

/// Rounds to 15 significant digits.
fn sig15(x: f64) -> f64 {
    format!("{:.14e}", x).parse().unwrap_or(x)
}

fn float_text(x: f64) -> String {
    let r = sig15(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{:e}", r)
    } else {
        format!("{}", r)
    }
}

fn complex_text(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{} - {}*i", float_text(z.re), float_text(-z.im))
    } else {
        format!("{} + {}*i", float_text(z.re), float_text(z.im))
    }
}

fn field_json(v: &VectorFieldJet) -> Value {
    let comps: BTreeMap<String, String> =
        v.ideal().vars().iter().zip(v.components()).map(|(n, c)| (n.clone(), c.to_string())).collect();
    json!({ "components": comps, "status": v.status().as_str() })
}

fn two_fields(doc: &FieldDocument) -> Result<(VectorFieldJet, VectorFieldJet), Failure> {
    let fs = doc.vector_fields()?;
    match <[VectorFieldJet; 2]>::try_from(fs) {
        Ok([u, v]) => Ok((u, v)),
        Err(fs) => Err(usage(format!("expected exactly two fields, found {}", fs.len()))),
    }
}

fn form_outcome(label: &str, f: &MeromorphicForm1D) -> Outcome {
    Outcome::ok(
        format!("{} = {}", label, f),
        json!({ label: { "num": f.num().to_string(), "den": f.den().to_string() } }),
    )
}

fn report_json(r: &AtlasReport) -> Value {
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|p| {
            let v: Vec<Value> = p
                .violations
                .iter()
                .map(|v| json!({ "component": v.component, "derivative": v.derivative, "detail": v.detail }))
                .collect();
            json!({ "from": p.from, "to": p.to, "passed": p.passed(), "violations": v })
        })
        .collect();
    json!({ "check": r.check, "passed": r.passed(), "pairs": pairs })
}

fn cochain_outcome(c: &CechCochain, extra: &str, extra_json: Value) -> Value {
    let mut j = serde_json::to_value(jetfol::document::CochainDocument::from_cochain(c)).expect("serializable");
    if let Value::Object(m) = &mut j {
        m.insert("zero".into(), json!(c.is_zero()));
        m.insert(extra.into(), extra_json);
    }
    j
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Bracket(input) => {
            let (u, v) = two_fields(&load(input)?)?;
            let b = jet::jet_bracket(&u, &v)?;
            Ok(Outcome::ok(format!("bracket = {}", b), json!({ "bracket": field_json(&b) })))
        }
        Command::Apply(input) => {
            let doc: FieldDocument = load(input)?;
            let v = doc.vector_fields()?.into_iter().next().ok_or_else(|| usage("no field given"))?;
            let text = doc.function.as_deref().ok_or_else(|| usage("`function` is required"))?;
            let ideal = doc.ideal()?;
            let f = jetfol::parse::parse_polynomial(text, ideal.vars())
                .map_err(|source| DocumentError::Parse { context: "function".into(), source })?;
            let value = jet::jet_apply(&v, &jet::truncate(&f, &ideal)?)?;
            Ok(Outcome::ok(format!("value = {}", value), json!({ "value": value.to_string() })))
        }
        Command::Classify(input) => {
            let fs = load::<FieldDocument>(input)?.vector_fields()?;
            let lines: Vec<String> = fs.iter().map(|v| format!("{}: {}", v, v.status().as_str())).collect();
            let statuses: Vec<&str> = fs.iter().map(|v| v.status().as_str()).collect();
            Ok(Outcome::ok(lines.join("\n"), json!({ "status": statuses })))
        }
        Command::Primitive(input) => {
            let doc: FieldDocument = load(input)?;
            let ideal = doc.ideal()?;
            let mut coeffs = BTreeMap::new();
            for (name, text) in &doc.form {
                let p = jetfol::parse::parse_polynomial(text, ideal.vars())
                    .map_err(|source| DocumentError::Parse { context: name.clone(), source })?;
                coeffs.insert(name.clone(), jet::truncate(&p, &ideal)?);
            }
            let h = jet::primitive_of_closed_1form(&ideal, &coeffs)?;
            Ok(Outcome::ok(format!("primitive = {}", h), json!({ "primitive": h.to_string() })))
        }
        Command::Involutive { input, degree_bound } => {
            let fs = load::<FieldDocument>(input)?.vector_fields()?;
            Ok(match jet::involutivity_check(&fs, *degree_bound)? {
                InvolutivityResult::Involutive(w) => {
                    let witnesses: Vec<Value> = w
                        .iter()
                        .map(|m| {
                            let c: Vec<String> = m.coefficients.iter().map(JetClass::to_string).collect();
                            json!({ "pair": [m.pair.0, m.pair.1], "coefficients": c })
                        })
                        .collect();
                    Outcome::ok("involutive".into(), json!({ "result": "involutive", "witnesses": witnesses }))
                }
                InvolutivityResult::NotInvolutive { pair, bracket } => Outcome {
                    text: format!("not involutive: [g{}, g{}] = {} is outside the span", pair.0, pair.1, bracket),
                    json: json!({ "result": "not-involutive", "pair": [pair.0, pair.1], "bracket": field_json(&bracket) }),
                    passed: false,
                },
                InvolutivityResult::Inconclusive { pairs } => Outcome {
                    text: format!("inconclusive at degree bound {} for pairs {:?}", degree_bound, pairs),
                    json: json!({ "result": "inconclusive", "pairs": pairs }),
                    passed: false,
                },
            })
        }
        Command::CheckAtlas { input, adapted, extend, k_split } => {
            let atlas = load::<AtlasDocument>(input)?.build()?;
            let mut reports = Vec::new();
            if *adapted || (extend.is_none() && k_split.is_none()) {
                reports.push(atlas.check_adapted()?);
            }
            if let Some(k) = extend {
                reports.push(atlas.check_extension_condition(*k)?);
            }
            if let Some(k) = k_split {
                reports.push(atlas.check_k_splitting(*k)?);
            }
            let text: String = reports.iter().map(|r| r.to_string()).collect();
            Ok(Outcome {
                text: text.trim_end().to_string(),
                json: json!({ "reports": reports.iter().map(report_json).collect::<Vec<_>>() }),
                passed: reports.iter().all(AtlasReport::passed),
            })
        }
        Command::Obstruction { input, kind } => {
            let atlas = load::<AtlasDocument>(input)?.build()?;
            let c = match kind {
                Kind::Atiyah => cech::atiyah_obstruction(&atlas)?,
                Kind::Normal => cech::normal_extension_obstruction(&atlas)?,
            };
            let cocycle = cech::verify_cocycle(&c, &atlas)?;
            let triples: Vec<Value> = cocycle.triples.iter().map(|(t, ok)| json!({ "triple": t, "holds": ok })).collect();
            let mut text = c.to_string();
            for (t, ok) in &cocycle.triples {
                text.push_str(&format!("cocycle {}: {}\n", t.join(","), if *ok { "pass" } else { "FAIL" }));
            }
            text.push_str(&format!("zero = {}", c.is_zero()));
            Ok(Outcome { text, json: cochain_outcome(&c, "cocycle", json!(triples)), passed: cocycle.holds() })
        }
        Command::VerifySplitting(input) => {
            let doc: SplittingDocument = load(input)?;
            let atlas = doc.atlas.build()?;
            let sigma = doc.sigma.build(&atlas)?;
            let c = match &doc.cochain {
                Some(c) => c.build(&atlas)?,
                None => match sigma.kind() {
                    CochainKind::Atiyah => cech::atiyah_obstruction(&atlas)?,
                    CochainKind::NormalExtension => cech::normal_extension_obstruction(&atlas)?,
                },
            };
            let ok = cech::verify_splitting(&c, &sigma, &atlas)?;
            Ok(Outcome { text: format!("splitting = {}", ok), json: json!({ "splitting": ok }), passed: ok })
        }
        Command::ExtensionGenerators(input) => {
            let doc: SplittingDocument = load(input)?;
            let atlas = doc.atlas.build()?;
            let sigma = doc.sigma.build(&atlas)?;
            let gens = cech::extension_generators(&sigma, &atlas)?;
            let mut text = Vec::new();
            let mut out = serde_json::Map::new();
            for (chart, fs) in &gens {
                for v in fs {
                    text.push(format!("{}: {}", chart, v));
                }
                out.insert(chart.clone(), Value::Array(fs.iter().map(field_json).collect()));
            }
            Ok(Outcome::ok(text.join("\n"), json!({ "generators": out })))
        }
        Command::ConnectionMatrix(input) => {
            let s = load::<FieldDocument>(input)?.surface_input()?;
            Ok(form_outcome("connection", &residue::connection_matrix_2d(&s)?))
        }
        Command::BottForm(input) => {
            let s = load::<FieldDocument>(input)?.surface_input()?;
            Ok(form_outcome("bott", &residue::bott_difference_form_2d(&s)?))
        }
        Command::Residue(input) => {
            let s = load::<FieldDocument>(input)?.surface_input()?;
            let r = residue::kls_residue(&s)?;
            Ok(Outcome::ok(format!("residue = {}", r), json!({ "residue": r.to_string() })))
        }
        Command::TransversalResidue(input) => {
            let s = load::<FieldDocument>(input)?.surface_input()?;
            let data = SplittingData::local(&SurfaceFieldInput::ideal());
            let r = residue::transversal_residue(&s, &data, "local")?;
            Ok(Outcome::ok(format!("residue = {}", r), json!({ "residue": r.to_string() })))
        }
        Command::OracleResidue { input, radius, samples } => {
            let s = load::<FieldDocument>(input)?.surface_input()?;
            let z = contour_residue_numeric(&s, ContourSpec::new(*radius, *samples)?)?;
            Ok(Outcome::ok(
                format!("oracle residue = {}", complex_text(z)),
                json!({ "residue": { "re": sig15(z.re), "im": sig15(z.im) }, "radius": radius, "samples": samples }),
            ))
        }
        Command::Flatness(input) => {
            let doc: FieldDocument = load(input)?;
            let (u, v) = two_fields(&doc)?;
            let m = residue::flatness_check(&u, &v, &doc.variables.foliation)?;
            let flat = m.iter().flatten().all(JetClass::is_zero);
            let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(JetClass::to_string).collect()).collect();
            let text = rows.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n");
            Ok(Outcome { text: format!("{}\nflat = {}", text, flat), json: json!({ "curvature": rows, "flat": flat }), passed: flat })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                println!("{}", out.text);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            if cli.json {
                println!("{}", json!({ "error": { "code": f.code, "message": f.message } }));
            } else {
                eprintln!("error[{}]: {}", f.code, f.message);
            }
            ExitCode::from(2)
        }
    }
}
