//! Command-line front end for the adelic-core engine: expression parsing,
//! command dispatch, text or structured-record output, and reproducible
//! randomized verification suites.
//!
//! Exit status: 0 when every checked identity passes, 1 when any check
//! fails, 2 on usage, parse, or computation errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use adelic_core::adele::Adele;
use adelic_core::error::CoreError;
use adelic_core::expectation::Correlator;
use adelic_core::fock::{charged_act, heisenberg_act, rx_act};
use adelic_core::model::{p1_model, CurveModel, TabulatedModel};
use adelic_core::parse::{
    parse_multiplicative, parse_point, parse_rational, parse_state, StateExpr,
};
use adelic_core::point::Point;
use adelic_core::rational::{
    partial_fractions, residue_at, residue_theorem_check, RationalFunction,
};
use adelic_core::scalar::{rat_to_string, ratio, Rat};
use adelic_core::symbols::{
    exchange_law_check, factorize, tame_at, weil_global, MultiplicativeFunction,
};

type Result<T> = std::result::Result<T, CoreError>;

#[derive(Parser)]
#[command(
    name = "adelic",
    version,
    about = "Exact residue calculus, reciprocity laws, and boson expectation \
             values on the rational curve"
)]
struct Cli {
    /// Window width for local series expansions
    #[arg(long, global = true, default_value_t = 24)]
    precision: i64,

    /// Tabulated curve-model file; the built-in rational model when absent
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Largest correlator degree the expectation engine will attempt
    #[arg(long = "degree-cap", global = true, default_value_t = 12)]
    degree_cap: usize,

    /// Seed for the randomized verification suites
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    /// Human-readable lines
    Text,
    /// One JSON record per line
    Records,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CorrMode {
    /// Additive for plain states, multiplicative for charged states
    Auto,
    /// Matching-sum expectation of a plain state
    Additive,
    /// Charged expectation without the charge constant
    Charged,
    /// Charged expectation with the charge constant
    Multiplicative,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum WardMode {
    /// Invariance under the differentiated action: <x.w> = 0
    Additive,
    /// Invariance under the multiplicative action: <R(m)w> = <w>
    Multiplicative,
}

#[derive(Subcommand)]
enum Verb {
    /// Residue of f dz at one point
    Residue {
        /// Rational function in factored form, e.g. "3*(z-1)^2*(z+3)^-1"
        #[arg(long)]
        f: String,
        /// Point: a rational number or "inf"
        #[arg(long)]
        point: String,
    },
    /// Local residues of f dz and their vanishing sum; without --f, a
    /// seeded random suite
    ResidueTheorem {
        /// Rational function in factored form; omit to run the suite
        #[arg(long)]
        f: Option<String>,
        /// Number of random cases in suite mode
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Laurent window of f at a point, to the global --precision
    Expand {
        /// Rational function in factored form
        #[arg(long)]
        f: String,
        /// Point: a rational number or "inf"
        #[arg(long)]
        point: String,
    },
    /// Zero/pole divisor of f
    Divisor {
        /// Rational function in factored form
        #[arg(long)]
        f: String,
    },
    /// Coefficients of f against the second-kind basis plus its constant
    PartialFractions {
        /// Rational function in factored form
        #[arg(long)]
        f: String,
    },
    /// Local tame symbol of the pair (f, g) at one point
    Tame {
        /// First rational function of the pair
        #[arg(long)]
        f: String,
        /// Second rational function of the pair
        #[arg(long)]
        g: String,
        /// Point: a rational number or "inf"
        #[arg(long)]
        point: String,
    },
    /// All local tame symbols of (f, g) and their product, checked against
    /// 1; without --f/--g, a seeded random suite
    Weil {
        /// First rational function; omit both to run the suite
        #[arg(long)]
        f: Option<String>,
        /// Second rational function; omit both to run the suite
        #[arg(long)]
        g: Option<String>,
        /// Number of random cases in suite mode
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Exchange of integration variable and parameter for third-kind
    /// exponentials on four distinct points "P,Q,R,S"
    Exchange {
        /// Four distinct points, comma-separated, e.g. "0,1,2,3"
        #[arg(long)]
        points: String,
    },
    /// Constant and elementary-factor decomposition of f
    Factorize {
        /// Rational function in factored form
        #[arg(long)]
        f: String,
    },
    /// Leading coefficient and log-expansion coefficients of a factored
    /// multiplicative function at a point
    PrimeTaylor {
        /// Multiplicative function, e.g. "f[0,1]" or "3*f[0,1]*f[2,inf]^-1"
        #[arg(long)]
        f: String,
        /// Point: a rational number or "inf"
        #[arg(long)]
        point: String,
        /// Number of log-expansion coefficients to print
        #[arg(long, default_value_t = 6)]
        order: i64,
    },
    /// Apply an operator to a state: --x for the additive action of a
    /// rational function, --symmetry for the multiplicative action
    Act {
        /// Rational function acted additively, e.g. "1/z"
        #[arg(long, conflicts_with = "symmetry")]
        x: Option<String>,
        /// Factored function acted multiplicatively, e.g. "f[0,1]"
        #[arg(long)]
        symmetry: Option<String>,
        /// State, e.g. "v[0,1]*v[1,1]" or "e[(1)-(0)]*v[2,1]"
        #[arg(long)]
        state: String,
    },
    /// Expectation value of a state
    Correlate {
        /// State, e.g. "v[0,1]*v[1,1]" or "e[(1)-(0)]*v[2,1]"
        #[arg(long)]
        state: String,
        /// Expectation flavor; auto picks by the state's charge
        #[arg(long, value_enum, default_value_t = CorrMode::Auto)]
        mode: CorrMode,
    },
    /// Ward identity for a symmetry acting on a state
    Ward {
        /// Which invariance law to check
        #[arg(long, value_enum)]
        mode: WardMode,
        /// Rational function (additive) or factored multiplicative
        /// function (multiplicative)
        #[arg(long)]
        symmetry: String,
        /// State, e.g. "v[0,1]*v[1,1]" or "e[(1)-(0)]*v[2,1]"
        #[arg(long)]
        state: String,
    },
    /// Check a tabulated model file against the model consistency laws
    ValidateModel,
}

/// Accumulates one command's report and renders it in either format.
struct Report {
    verb: &'static str,
    format: Format,
    text: String,
    inputs: serde_json::Map<String, Value>,
    outputs: serde_json::Map<String, Value>,
    pass: Option<bool>,
}

impl Report {
    fn new(verb: &'static str, format: Format) -> Self {
        Report {
            verb,
            format,
            text: String::new(),
            inputs: serde_json::Map::new(),
            outputs: serde_json::Map::new(),
            pass: None,
        }
    }

    fn input(&mut self, key: &str, value: impl ToString) {
        self.inputs.insert(key.into(), Value::String(value.to_string()));
    }

    fn output(&mut self, key: &str, value: Value) {
        self.outputs.insert(key.into(), value);
    }

    fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    /// Record a checked identity; the final PASS/FAIL line is emitted once.
    fn check(&mut self, ok: bool) {
        self.pass = Some(self.pass.unwrap_or(true) && ok);
    }

    /// Print the report and return whether every check passed.
    fn emit(mut self) -> bool {
        let pass = self.pass.unwrap_or(true);
        match self.format {
            Format::Text => {
                print!("{}", self.text);
                if let Some(p) = self.pass {
                    println!("{}", if p { "PASS" } else { "FAIL" });
                }
            }
            Format::Records => {
                let mut record = serde_json::Map::new();
                record.insert("verb".into(), Value::String(self.verb.into()));
                record.insert("inputs".into(), Value::Object(std::mem::take(&mut self.inputs)));
                record.insert("outputs".into(), Value::Object(std::mem::take(&mut self.outputs)));
                if let Some(p) = self.pass {
                    record.insert("pass".into(), Value::Bool(p));
                }
                println!("{}", Value::Object(record));
            }
        }
        pass
    }
}

fn rat_value(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn load_model(path: &Option<PathBuf>) -> Result<Box<dyn CurveModel>> {
    match path {
        None => Ok(Box::new(p1_model())),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CoreError::Invalid(format!("cannot read model file {}: {e}", p.display()))
            })?;
            let model = TabulatedModel::from_text(&text)?;
            model.validate()?;
            Ok(Box::new(model))
        }
    }
}

/// Seeded draw of a factored rational function for the suite modes.
fn draw_rational(rng: &mut ChaCha8Rng, max_factors: usize, max_mult: i64) -> RationalFunction {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-5i64..=5);
    }
    let scale = ratio(num, rng.gen_range(1..=3));
    let k = rng.gen_range(0..=max_factors);
    let mut factors = Vec::new();
    for _ in 0..k {
        let root = ratio(rng.gen_range(-6i64..=6), rng.gen_range(1..=3));
        let mut mult = 0;
        while mult == 0 {
            mult = rng.gen_range(-max_mult..=max_mult);
        }
        factors.push((root, mult));
    }
    RationalFunction::from_factors(scale, factors)
}

fn run(cli: &Cli) -> Result<bool> {
    let pass = match &cli.verb {
        Verb::Residue { f, point } => {
            let func = parse_rational(f)?;
            let p = parse_point(point)?;
            let v = residue_at(&func, &p)?;
            let mut rep = Report::new("residue", cli.format);
            rep.input("f", &func);
            rep.input("point", &p);
            rep.output("value", rat_value(&v));
            rep.line(format!("res at {p} = {}", rat_to_string(&v)));
            rep.emit()
        }
        Verb::ResidueTheorem { f: Some(f), .. } => {
            let func = parse_rational(f)?;
            let (locals, sum) = residue_theorem_check(&func)?;
            let mut rep = Report::new("residue-theorem", cli.format);
            rep.input("f", &func);
            let mut table = Vec::new();
            for (p, v) in &locals {
                rep.line(format!("res at {p} = {}", rat_to_string(v)));
                table.push(json!([p.to_string(), rat_to_string(v)]));
            }
            rep.line(format!("sum = {}", rat_to_string(&sum)));
            rep.output("locals", Value::Array(table));
            rep.output("sum", rat_value(&sum));
            rep.check(sum.is_zero());
            rep.emit()
        }
        Verb::ResidueTheorem { f: None, cases } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut failures = 0usize;
            for _ in 0..*cases {
                let func = draw_rational(&mut rng, 8, 3);
                let (_, sum) = residue_theorem_check(&func)?;
                if !sum.is_zero() {
                    failures += 1;
                }
            }
            let mut rep = Report::new("residue-theorem", cli.format);
            rep.input("cases", cases);
            rep.input("seed", cli.seed);
            rep.output("failures", json!(failures.to_string()));
            rep.line(format!("cases = {cases}"));
            rep.line(format!("failures = {failures}"));
            rep.check(failures == 0);
            rep.emit()
        }
        Verb::Expand { f, point } => {
            let func = parse_rational(f)?;
            let p = parse_point(point)?;
            let s = func.expand_at(&p, cli.precision)?;
            let mut rep = Report::new("expand", cli.format);
            rep.input("f", &func);
            rep.input("point", &p);
            rep.input("precision", cli.precision);
            rep.output("window", json!(s.to_string()));
            rep.output("precision", json!(s.precision().to_string()));
            rep.line(format!("window = {s}"));
            rep.line(format!("precision = {}", s.precision()));
            rep.emit()
        }
        Verb::Divisor { f } => {
            let func = parse_rational(f)?;
            let d = func.divisor()?;
            let mut rep = Report::new("divisor", cli.format);
            rep.input("f", &func);
            rep.output("divisor", json!(d.to_string()));
            rep.output("degree", json!(d.degree().to_string()));
            rep.line(format!("div(f) = {d}"));
            rep.line(format!("degree = {}", d.degree()));
            rep.emit()
        }
        Verb::PartialFractions { f } => {
            let func = parse_rational(f)?;
            let (coeffs, constant) = partial_fractions(&func)?;
            let mut rep = Report::new("partial-fractions", cli.format);
            rep.input("f", &func);
            rep.line(format!("constant = {}", rat_to_string(&constant)));
            let mut table = Vec::new();
            for ((p, n), a) in &coeffs {
                rep.line(format!("coeff at ({p}, {n}) = {}", rat_to_string(a)));
                table.push(json!([p.to_string(), n.to_string(), rat_to_string(a)]));
            }
            rep.output("constant", rat_value(&constant));
            rep.output("coefficients", Value::Array(table));
            rep.emit()
        }
        Verb::Tame { f, g, point } => {
            let fr = parse_rational(f)?;
            let gr = parse_rational(g)?;
            let p = parse_point(point)?;
            let v = tame_at(&fr, &gr, &p)?;
            let mut rep = Report::new("tame", cli.format);
            rep.input("f", &fr);
            rep.input("g", &gr);
            rep.input("point", &p);
            rep.output("value", rat_value(&v));
            rep.line(format!("tame(f, g) at {p} = {}", rat_to_string(&v)));
            rep.emit()
        }
        Verb::Weil { f: Some(f), g: Some(g), .. } => {
            let fr = parse_rational(f)?;
            let gr = parse_rational(g)?;
            let (locals, product) = weil_global(&fr, &gr)?;
            let mut rep = Report::new("weil", cli.format);
            rep.input("f", &fr);
            rep.input("g", &gr);
            let mut table = Vec::new();
            for (p, v) in &locals {
                rep.line(format!("tame(f, g) at {p} = {}", rat_to_string(v)));
                table.push(json!([p.to_string(), rat_to_string(v)]));
            }
            rep.line(format!("product = {}", rat_to_string(&product)));
            rep.output("locals", Value::Array(table));
            rep.output("product", rat_value(&product));
            rep.check(product.is_one());
            rep.emit()
        }
        Verb::Weil { f: None, g: None, cases } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut failures = 0usize;
            for _ in 0..*cases {
                let fr = draw_rational(&mut rng, 4, 2);
                let gr = draw_rational(&mut rng, 4, 2);
                let (_, product) = weil_global(&fr, &gr)?;
                if !product.is_one() {
                    failures += 1;
                }
            }
            let mut rep = Report::new("weil", cli.format);
            rep.input("cases", cases);
            rep.input("seed", cli.seed);
            rep.output("failures", json!(failures.to_string()));
            rep.line(format!("cases = {cases}"));
            rep.line(format!("failures = {failures}"));
            rep.check(failures == 0);
            rep.emit()
        }
        Verb::Weil { .. } => {
            return Err(CoreError::Invalid(
                "weil needs both --f and --g, or neither for the random suite".into(),
            ))
        }
        Verb::Exchange { points } => {
            let parts: Vec<&str> = points.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(CoreError::Invalid(format!(
                    "--points needs exactly four comma-separated points, got {}",
                    parts.len()
                )));
            }
            let pts: Vec<Point> =
                parts.iter().map(|t| parse_point(t)).collect::<Result<_>>()?;
            let (lhs, rhs) = exchange_law_check(&pts[0], &pts[1], &pts[2], &pts[3])?;
            let mut rep = Report::new("exchange", cli.format);
            rep.input("points", points);
            rep.line(format!(
                "exp-int from {} to {} of omega[{},{}] = {}",
                pts[2], pts[3], pts[0], pts[1], rat_to_string(&lhs)
            ));
            rep.line(format!(
                "exp-int from {} to {} of omega[{},{}] = {}",
                pts[0], pts[1], pts[2], pts[3], rat_to_string(&rhs)
            ));
            rep.output("lhs", rat_value(&lhs));
            rep.output("rhs", rat_value(&rhs));
            rep.check(lhs == rhs);
            rep.emit()
        }
        Verb::Factorize { f } => {
            let func = parse_rational(f)?;
            let (constant, pairs) = factorize(&func)?;
            let echo = MultiplicativeFunction::new(constant.clone(), pairs.clone())?;
            let mut rep = Report::new("factorize", cli.format);
            rep.input("f", &func);
            rep.line(format!("constant = {}", rat_to_string(&constant)));
            let mut table = Vec::new();
            for (p, q) in &pairs {
                rep.line(format!("factor f[{p},{q}]"));
                table.push(json!([p.to_string(), q.to_string()]));
            }
            rep.line(format!("canonical = {echo}"));
            rep.output("constant", rat_value(&constant));
            rep.output("factors", Value::Array(table));
            rep.output("canonical", json!(echo.to_string()));
            rep.emit()
        }
        Verb::PrimeTaylor { f, point, order } => {
            let mf = parse_multiplicative(f)?;
            let p = parse_point(point)?;
            let model = load_model(&cli.model)?;
            let (alpha, val, phi) = mf.local_data(model.as_ref(), &p, *order)?;
            let mut rep = Report::new("prime-taylor", cli.format);
            rep.input("f", &mf);
            rep.input("point", &p);
            rep.input("order", order);
            rep.line(format!("alpha = {}", rat_to_string(&alpha)));
            rep.line(format!("valuation = {val}"));
            let mut table = Vec::new();
            for n in 1..=*order {
                let a = -phi.coeff(n);
                rep.line(format!("a[{n}] = {}", rat_to_string(&a)));
                table.push(Value::String(rat_to_string(&a)));
            }
            rep.output("alpha", rat_value(&alpha));
            rep.output("valuation", json!(val.to_string()));
            rep.output("coefficients", Value::Array(table));
            rep.emit()
        }
        Verb::Act { x, symmetry, state } => {
            let model = load_model(&cli.model)?;
            let parsed = parse_state(state)?;
            let mut rep = Report::new("act", cli.format);
            rep.input("state", state);
            let result = match (x, symmetry) {
                (Some(xs), None) => {
                    let func = parse_rational(xs)?;
                    rep.input("x", &func);
                    let adele = Adele::diagonal(func);
                    match parsed {
                        StateExpr::Fock(v) => {
                            heisenberg_act(model.as_ref(), &adele, &v)?.to_string()
                        }
                        StateExpr::Charged(w) => {
                            charged_act(model.as_ref(), &adele, &w)?.to_string()
                        }
                    }
                }
                (None, Some(ms)) => {
                    let mf = parse_multiplicative(ms)?;
                    rep.input("symmetry", &mf);
                    let w = parsed.into_charged();
                    rx_act(model.as_ref(), &mf, &w)?.to_string()
                }
                _ => {
                    return Err(CoreError::Invalid(
                        "act needs exactly one of --x or --symmetry".into(),
                    ))
                }
            };
            rep.line(format!("result = {result}"));
            rep.output("result", json!(result));
            rep.emit()
        }
        Verb::Correlate { state, mode } => {
            let model = load_model(&cli.model)?;
            let corr = Correlator::new(model.as_ref()).with_degree_cap(cli.degree_cap);
            let parsed = parse_state(state)?;
            let mut rep = Report::new("correlate", cli.format);
            rep.input("state", state);
            let (shown, value) = match (mode, parsed) {
                (CorrMode::Auto | CorrMode::Additive, StateExpr::Fock(v)) => {
                    (v.to_string(), corr.corr_additive(&v)?)
                }
                (CorrMode::Additive, StateExpr::Charged(_)) => {
                    return Err(CoreError::Invalid(
                        "additive expectations take uncharged states".into(),
                    ))
                }
                (CorrMode::Charged, s) => {
                    let w = s.into_charged();
                    (w.to_string(), corr.corr_charged(&w)?)
                }
                (CorrMode::Auto | CorrMode::Multiplicative, s) => {
                    let w = s.into_charged();
                    (w.to_string(), corr.corr_multiplicative(&w)?)
                }
            };
            rep.output("value", rat_value(&value));
            rep.line(format!("<{shown}> = {}", rat_to_string(&value)));
            rep.emit()
        }
        Verb::Ward { mode, symmetry, state } => {
            let model = load_model(&cli.model)?;
            let corr = Correlator::new(model.as_ref()).with_degree_cap(cli.degree_cap);
            let parsed = parse_state(state)?;
            let mut rep = Report::new("ward", cli.format);
            rep.input("state", state);
            let (lhs, rhs) = match mode {
                WardMode::Additive => {
                    let func = parse_rational(symmetry)?;
                    rep.input("symmetry", &func);
                    rep.input("mode", "additive");
                    let adele = Adele::diagonal(func);
                    let lhs = match parsed {
                        StateExpr::Fock(v) => corr.ward_additive(&adele, &v)?,
                        StateExpr::Charged(w) => corr.ward_charged(&adele, &w)?,
                    };
                    (lhs, Rat::zero())
                }
                WardMode::Multiplicative => {
                    let mf = parse_multiplicative(symmetry)?;
                    rep.input("symmetry", &mf);
                    rep.input("mode", "multiplicative");
                    let w = parsed.into_charged();
                    corr.ward_multiplicative(&mf, &w)?
                }
            };
            rep.line(format!("lhs = {}", rat_to_string(&lhs)));
            rep.line(format!("rhs = {}", rat_to_string(&rhs)));
            rep.output("lhs", rat_value(&lhs));
            rep.output("rhs", rat_value(&rhs));
            rep.check(lhs == rhs);
            rep.emit()
        }
        Verb::ValidateModel => {
            let path = cli.model.as_ref().ok_or_else(|| {
                CoreError::Invalid("validate-model needs --model FILE".into())
            })?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                CoreError::Invalid(format!("cannot read model file {}: {e}", path.display()))
            })?;
            let mut rep = Report::new("validate-model", cli.format);
            rep.input("model", path.display());
            // a malformed file is an error; a well-formed table that breaks
            // a consistency law is a failed check
            match TabulatedModel::from_text(&text) {
                Ok(model) => {
                    rep.line(format!(
                        "points = {}, max order = {}, precision = {}",
                        model.points().len(),
                        model.max_order(),
                        model.precision()
                    ));
                    rep.output("points", json!(model.points().len().to_string()));
                    rep.output("max_order", json!(model.max_order().to_string()));
                    rep.output("precision", json!(model.precision().to_string()));
                    rep.check(true);
                }
                Err(CoreError::ModelInvariant(detail)) => {
                    rep.line(format!("violation: {detail}"));
                    rep.output("violation", json!(detail));
                    rep.check(false);
                }
                Err(e) => return Err(e),
            }
            rep.emit()
        }
    };
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
