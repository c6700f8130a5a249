//! The `hopfc` command-line front end.
//!
//! Every failure prints a single line `error: <category>: <detail>` to the
//! error stream and exits with the category's code.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    self, basis_label, compile_gate_circuit, evaluate, is_unitary, measure, oracle_deviation, parse_basis_label,
    simulate_gates, Circuit, CircuitError, Gate, OutcomeDistribution, UnitaryGate,
};
use crate::dsl::{self, CircuitDocument, DslError, Preset, UnitarySpec};
use crate::hopf::{AlgebraError, AxiomCheck, HopfAlgebra};
use crate::tensor::{LinearMapJson, CIRCUIT_TOL, STRUCTURE_TOL};

const AFTER_HELP: &str = "\
Basis states are written with wire 0 first: in the label \"10\" wire 0 is 1 and
wire 1 is 0. Wire 0 is the leftmost tensor factor and the most significant
digit of a matrix row or column index. For d > 10 the digits are separated by
dots (\"3.11\").

Layers in a .hopf file are listed in application order (first line acts on the
inputs), so (id⊗m)(Δ⊗id) is written `layer DELTA, ID` followed by `layer ID, M`.

Exit codes: 0 success, 1 usage, 2 parse/validate, 3 numeric failure,
4 annihilated state.";

#[derive(Parser, Debug)]
#[command(name = "hopfc", version, about = "Evaluate quantum circuits built from Hopf-algebra structure maps")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Hopf axioms of an algebra (built-in name or group-table JSON)
    CheckAxioms {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = STRUCTURE_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a circuit on a basis input
    Eval {
        file: PathBuf,
        /// Basis label of the input, wire 0 first
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[arg(long)]
        json: bool,
        /// Show the outcome distribution even for unitary circuits
        #[arg(long)]
        measure: bool,
    },
    /// Print the full matrix of a circuit
    Matrix {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compile a JSON gate list to a Hopf circuit
    Compile {
        #[arg(long)]
        wires: usize,
        #[arg(long)]
        gates: PathBuf,
        #[arg(long, default_value = "Z2")]
        algebra: String,
        #[arg(long)]
        json: bool,
    },
    /// Draw outcomes from the exact output distribution (ChaCha8, seeded)
    Sample {
        file: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compare the dense evaluator with the brute-force path sum on every input
    OracleCheck {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Usage,
    Io,
    Parse,
    Validate,
    Numeric,
    Annihilated,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Usage | Category::Io => 1,
            Category::Parse | Category::Validate => 2,
            Category::Numeric => 3,
            Category::Annihilated => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Io => "io",
            Category::Parse => "parse",
            Category::Validate => "validate",
            Category::Numeric => "numeric",
            Category::Annihilated => "annihilated",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub detail: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let detail = self.detail.replace('\n', " ");
        write!(f, "error: {}: {}", self.category.name(), detail)
    }
}

fn fail(category: Category, detail: impl fmt::Display) -> CliError {
    CliError {
        category,
        detail: detail.to_string(),
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::Annihilated => fail(Category::Annihilated, "annihilated state"),
            other => fail(Category::Validate, other),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        fail(Category::Validate, e)
    }
}

impl From<DslError> for CliError {
    fn from(e: DslError) -> Self {
        match e {
            DslError::Parse(p) => fail(Category::Parse, p),
            DslError::Circuit(c) => c.into(),
            other => fail(Category::Validate, other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Run with the given arguments (including the program name). Returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let _ = writeln!(err, "{}", fail(Category::Usage, first));
            return Category::Usage.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.category.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::CheckAxioms { algebra, tol, json } => check_axioms(&algebra, tol, json, out),
        Command::Eval {
            file,
            input,
            json,
            measure,
        } => eval(&file, &input, json, measure, out),
        Command::Matrix { file, json } => matrix(&file, json, out),
        Command::Compile {
            wires,
            gates,
            algebra,
            json,
        } => compile(wires, &gates, &algebra, json, out),
        Command::Sample {
            file,
            input,
            shots,
            seed,
            json,
        } => sample(&file, &input, shots, seed, json, out),
        Command::OracleCheck { file, json } => oracle_check(&file, json, out),
    }
}

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    fail(Category::Io, format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| fail(Category::Io, e))
}

fn emit_json<S: Serialize>(out: &mut dyn Write, value: &S) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| fail(Category::Io, e))?;
    emit(out, &text)?;
    emit(out, "\n")
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc = dsl::parse_circuit(&text).map_err(|e| fail(Category::Parse, format!("{}: {e}", path.display())))?;
    Ok(doc.to_circuit(path.parent())?)
}

#[derive(Serialize)]
struct AxiomReportJson<'a> {
    algebra: &'a str,
    dim: usize,
    labels: &'a [String],
    tolerance: f64,
    checks: &'a [AxiomCheck],
    commutative: bool,
    cocommutative: bool,
    passed: bool,
}

fn check_axioms(name: &str, tol: f64, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    if tol.is_nan() || tol < 0.0 {
        return Err(fail(Category::Usage, format!("tolerance must be nonnegative, got {tol}")));
    }
    let algebra = HopfAlgebra::resolve(name)?;
    let report = algebra.check_axioms(tol);
    if json {
        emit_json(
            out,
            &AxiomReportJson {
                algebra: name,
                dim: algebra.dim(),
                labels: algebra.labels(),
                tolerance: tol,
                checks: &report.checks,
                commutative: report.commutative,
                cocommutative: report.cocommutative,
                passed: report.passed,
            },
        )?;
    } else {
        emit(out, &format!("algebra {name} (d = {})\n{report}\n", algebra.dim()))?;
    }
    Ok(if report.passed { 0 } else { Category::Numeric.exit_code() })
}

fn format_amp(z: C64) -> String {
    dsl::format_complex(z)
}

#[derive(Serialize)]
struct EvalJson<'a> {
    input: &'a str,
    base_dim: usize,
    wires_in: usize,
    wires_out: usize,
    unitary: bool,
    re: Vec<f64>,
    im: Vec<f64>,
    distribution: OutcomeDistribution,
}

fn basis_state(circ: &Circuit, label: &str) -> CliResult<Vec<C64>> {
    let d = circ.base_dim();
    let index = parse_basis_label(label, d, circ.wires_in())?;
    let mut state = vec![C64::new(0.0, 0.0); d.pow(circ.wires_in() as u32)];
    state[index] = C64::new(1.0, 0.0);
    Ok(state)
}

fn eval(file: &Path, input: &str, json: bool, want_measure: bool, out: &mut dyn Write) -> CliResult<i32> {
    let circ = load_circuit(file)?;
    let state = basis_state(&circ, input)?;
    let map = evaluate(&circ);
    let output = circuit::apply(&map, &state)?;
    let unitary = is_unitary(&map, CIRCUIT_TOL);
    let d = circ.base_dim();
    let wires_out = circ.wires_out();

    if json {
        let distribution = measure(&output, d)?;
        return emit_json(
            out,
            &EvalJson {
                input,
                base_dim: d,
                wires_in: circ.wires_in(),
                wires_out,
                unitary,
                re: output.iter().map(|z| z.re).collect(),
                im: output.iter().map(|z| z.im).collect(),
                distribution,
            },
        )
        .map(|_| 0);
    }

    let mut text = format!("output ({wires_out} wires, {}):\n", if unitary { "unitary" } else { "non-unitary" });
    for (i, z) in output.iter().enumerate() {
        if *z != C64::new(0.0, 0.0) {
            text += &format!("  |{}>  {}\n", basis_label(i, d, wires_out), format_amp(*z));
        }
    }
    if want_measure || !unitary {
        let dist = measure(&output, d)?;
        text += &format!("distribution (norm before normalisation {}):\n", dist.norm_in);
        for o in &dist.entries {
            text += &format!("  {}  {}\n", o.label, o.probability);
        }
    }
    emit(out, &text)?;
    Ok(0)
}

fn matrix(file: &Path, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let circ = load_circuit(file)?;
    let map = evaluate(&circ);
    if json {
        let j: LinearMapJson = map.to_json();
        emit_json(out, &j)?;
        return Ok(0);
    }
    let d = map.base_dim();
    let mut text = format!(
        "map: {} -> {} wires, d = {} ({}x{})\n",
        map.wires_in(),
        map.wires_out(),
        d,
        map.rows(),
        map.cols()
    );
    let header: Vec<String> = (0..map.cols()).map(|c| basis_label(c, d, map.wires_in())).collect();
    let cells: Vec<Vec<String>> = (0..map.rows())
        .map(|r| (0..map.cols()).map(|c| format_amp(map.entry(r, c))).collect())
        .collect();
    let width = cells.iter().flatten().chain(&header).map(|s| s.len()).max().unwrap_or(1);
    let label_width = basis_label(0, d, map.wires_out()).len().max(1);
    let join = |row: &[String]| row.iter().map(|s| format!("{s:>width$}")).collect::<Vec<_>>().join("  ");
    text += &format!("{:>label_width$}  {}\n", "", join(&header));
    for (r, row) in cells.iter().enumerate() {
        text += &format!("{:>label_width$}  {}\n", basis_label(r, d, map.wires_out()), join(row));
    }
    emit(out, &text)?;
    Ok(0)
}

/// One entry of a compile gate list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateJson {
    Cnot([usize; 2]),
    U1(U1Json),
}

/// `matrix` rows hold `[re, im]` pairs; without a matrix, `name` must be a
/// preset such as `H` or `RX(0.5)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct U1Json {
    pub wire: usize,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn preset_identifier(p: &Preset) -> String {
    let raw: String = p
        .to_string()
        .to_ascii_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    raw.trim_end_matches('_').to_string()
}

/// Turn a JSON gate list into gates plus the DSL definition of each named
/// unitary.
pub fn gates_from_json(entries: &[GateJson]) -> CliResult<(Vec<Gate>, HashMap<String, UnitarySpec>)> {
    let mut specs: HashMap<String, UnitarySpec> = HashMap::new();
    let mut gates = Vec::new();
    for (k, entry) in entries.iter().enumerate() {
        let bad = |detail: String| fail(Category::Validate, format!("gate {k}: {detail}"));
        match entry {
            GateJson::Cnot([control, target]) => gates.push(Gate::Cnot {
                control: *control,
                target: *target,
            }),
            GateJson::U1(u) => {
                let (name, spec) = match &u.matrix {
                    Some(rows) => {
                        if !u.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                            || !u.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        {
                            return Err(bad(format!("unitary name {:?} is not an identifier", u.name)));
                        }
                        let rows: Vec<Vec<C64>> = rows
                            .iter()
                            .map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                            .collect();
                        (u.name.clone(), UnitarySpec::Matrix(rows))
                    }
                    None => {
                        let p = Preset::parse(&u.name)
                            .ok_or_else(|| bad(format!("{:?} is not a preset and no matrix was given", u.name)))?;
                        (preset_identifier(&p), UnitarySpec::Preset(p))
                    }
                };
                if let Some(prev) = specs.get(&name) {
                    if *prev != spec {
                        return Err(bad(format!("conflicting definitions for unitary {name}")));
                    }
                }
                let rows = match &spec {
                    UnitarySpec::Preset(p) => p.rows(),
                    UnitarySpec::Matrix(rows) => rows.clone(),
                };
                let gate = UnitaryGate::from_rows(name.clone(), &rows).map_err(|e| bad(e.to_string()))?;
                specs.insert(name, spec);
                gates.push(Gate::U1 { wire: u.wire, gate });
            }
        }
    }
    Ok((gates, specs))
}

#[derive(Serialize)]
struct CompileJson {
    circuit: String,
    max_deviation: f64,
    unitary: bool,
}

fn compile(wires: usize, gates_path: &Path, algebra_name: &str, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let text = std::fs::read_to_string(gates_path).map_err(|e| io_err(gates_path, e))?;
    let entries: Vec<GateJson> =
        serde_json::from_str(&text).map_err(|e| fail(Category::Parse, format!("{}: {e}", gates_path.display())))?;
    let (gates, specs) = gates_from_json(&entries)?;
    let algebra = Arc::new(HopfAlgebra::resolve(algebra_name)?);
    if algebra.dim() != 2 && specs.values().any(|s| matches!(s, UnitarySpec::Preset(_))) {
        return Err(fail(Category::Validate, "presets need a 2-dimensional algebra"));
    }
    let circ = compile_gate_circuit(algebra.clone(), wires, &gates)?;
    let compiled = evaluate(&circ);
    let direct = simulate_gates(&algebra, wires, &gates)?;
    let deviation = compiled
        .matrix()
        .max_abs_diff(direct.matrix())
        .expect("same shape");
    let unitary = is_unitary(&compiled, CIRCUIT_TOL);
    let doc = CircuitDocument::from_circuit(&circ, algebra_name, &specs);
    let source = dsl::print_circuit(&doc);
    if json {
        emit_json(
            out,
            &CompileJson {
                circuit: source,
                max_deviation: deviation,
                unitary,
            },
        )?;
    } else {
        emit(out, &source)?;
        emit(out, &format!("# max deviation vs direct simulation: {deviation:e}\n"))?;
    }
    if deviation > CIRCUIT_TOL || !unitary {
        return Err(fail(
            Category::Numeric,
            format!("compiled circuit deviates by {deviation:e} (unitary: {unitary})"),
        ));
    }
    Ok(0)
}

/// Draw `shots` outcomes by inverse-CDF lookup of `ChaCha8Rng` uniforms in
/// `[0, 1)`, the generator seeded with `seed_from_u64(seed)`. Returns counts
/// aligned with `dist.entries`.
pub fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cdf = Vec::with_capacity(dist.entries.len());
    let mut acc = 0.0;
    for o in &dist.entries {
        acc += o.probability;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; dist.entries.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.partition_point(|&c| c <= u).min(counts.len() - 1);
        counts[k] += 1;
    }
    counts
}

#[derive(Serialize)]
struct CountJson {
    label: String,
    count: u64,
    probability: f64,
}

#[derive(Serialize)]
struct SampleJson<'a> {
    input: &'a str,
    shots: u64,
    seed: u64,
    norm_in: f64,
    counts: Vec<CountJson>,
}

fn sample(file: &Path, input: &str, shots: u64, seed: u64, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let circ = load_circuit(file)?;
    let state = basis_state(&circ, input)?;
    let output = circuit::apply(&evaluate(&circ), &state)?;
    let dist = measure(&output, circ.base_dim())?;
    let counts = sample_counts(&dist, shots, seed);
    if json {
        emit_json(
            out,
            &SampleJson {
                input,
                shots,
                seed,
                norm_in: dist.norm_in,
                counts: dist
                    .entries
                    .iter()
                    .zip(&counts)
                    .map(|(o, &count)| CountJson {
                        label: o.label.clone(),
                        count,
                        probability: o.probability,
                    })
                    .collect(),
            },
        )?;
    } else {
        let mut text = format!("{shots} shots, seed {seed}\n");
        for (o, count) in dist.entries.iter().zip(&counts) {
            text += &format!("  {}  {count}  (p = {})\n", o.label, o.probability);
        }
        emit(out, &text)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct OracleJson {
    inputs: usize,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
}

fn oracle_check(file: &Path, json: bool, out: &mut dyn Write) -> CliResult<i32> {
    let circ = load_circuit(file)?;
    let deviation = oracle_deviation(&circ)?;
    let inputs = circ.base_dim().pow(circ.wires_in() as u32);
    let passed = deviation <= STRUCTURE_TOL;
    if json {
        emit_json(
            out,
            &OracleJson {
                inputs,
                max_deviation: deviation,
                tolerance: STRUCTURE_TOL,
                passed,
            },
        )?;
    } else {
        emit(
            out,
            &format!(
                "max deviation {deviation:e} over {inputs} inputs: {}\n",
                if passed { "pass" } else { "FAIL" }
            ),
        )?;
    }
    if !passed {
        return Err(fail(Category::Numeric, format!("oracle deviation {deviation:e} exceeds {STRUCTURE_TOL:e}")));
    }
    Ok(0)
}
