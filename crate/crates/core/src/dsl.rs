//! Line-oriented text format for Hopf circuits (`.hopf` files).
//!
//! ```text
//! # CNOT as (id⊗m)(Δ⊗id)
//! algebra Z2
//! in 2
//! layer DELTA, ID
//! layer ID, M
//! ```
//!
//! Grammar (keywords and primitive names are case-insensitive, `#` starts a
//! comment):
//!
//! ```text
//! circuit   ::= header { layerline }
//! header    ::= "algebra" NAME NEWLINE "in" INT NEWLINE { unitdef }
//! unitdef   ::= "unitary" NAME ( PRESET | matrix )
//! matrix    ::= "[" entry { "," entry } { ";" entry { "," entry } } "]"
//! layerline ::= "layer" prim { "," prim }
//! prim      ::= "ID" | "M" | "DELTA" | "UNIT" | "COUNIT" | "S" | "SWAP" | "U(" NAME ")"
//! ```
//!
//! Layers are listed in application order: the first `layer` line acts on
//! the inputs. Operator notation reads the other way, so `(id⊗m)(Δ⊗id)` is
//! written `layer DELTA, ID` then `layer ID, M`.
//!
//! Matrix entries are complex literals `re+imi` (`0.5`, `-2i`, `1e-3+0.5i`),
//! rows separated by `;`. Presets (qubits only) are `I X Y Z H S_PHASE T`
//! and `RX(θ) RY(θ) RZ(θ)` with θ in radians.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Primitive, UnitaryGate};
use crate::hopf::{AlgebraError, HopfAlgebra};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("lexical error: {0}")]
    Lexical(String),
    #[error("unknown primitive {0:?}")]
    UnknownPrimitive(String),
    #[error("unknown unitary {0:?}")]
    UnknownUnitary(String),
    #[error("duplicate unitary definition {0:?}")]
    DuplicateUnitary(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("{0}")]
    Syntax(String),
}

#[derive(Debug, Error)]
pub enum DslError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("unitary {name}: preset {preset} needs a 2-dimensional algebra, got d={dim}")]
    PresetDim { name: String, preset: String, dim: usize },
}

/// Built-in single-qubit unitaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    I,
    X,
    Y,
    Z,
    H,
    SPhase,
    T,
    Rx(f64),
    Ry(f64),
    Rz(f64),
}

impl Preset {
    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        let re = |x: f64| C64::new(x, 0.0);
        let zero = re(0.0);
        let one = re(1.0);
        match self {
            Preset::I => [[one, zero], [zero, one]],
            Preset::X => [[zero, one], [one, zero]],
            Preset::Y => [[zero, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), zero]],
            Preset::Z => [[one, zero], [zero, re(-1.0)]],
            Preset::H => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                [[re(h), re(h)], [re(h), re(-h)]]
            }
            Preset::SPhase => [[one, zero], [zero, C64::new(0.0, 1.0)]],
            Preset::T => [[one, zero], [zero, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            Preset::Rx(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                [[re(c), C64::new(0.0, -s)], [C64::new(0.0, -s), re(c)]]
            }
            Preset::Ry(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                [[re(c), re(-s)], [re(s), re(c)]]
            }
            Preset::Rz(t) => [
                [C64::from_polar(1.0, -t / 2.0), zero],
                [zero, C64::from_polar(1.0, t / 2.0)],
            ],
        }
    }

    pub fn rows(self) -> Vec<Vec<C64>> {
        self.matrix().iter().map(|r| r.to_vec()).collect()
    }

    /// Parse `H`, `s_phase`, `RX(0.25)` and so on.
    pub fn parse(text: &str) -> Option<Preset> {
        let t = text.trim();
        let upper = t.to_ascii_uppercase();
        let simple = match upper.as_str() {
            "I" => Some(Preset::I),
            "X" => Some(Preset::X),
            "Y" => Some(Preset::Y),
            "Z" => Some(Preset::Z),
            "H" => Some(Preset::H),
            "S_PHASE" => Some(Preset::SPhase),
            "T" => Some(Preset::T),
            _ => None,
        };
        if simple.is_some() {
            return simple;
        }
        let ctor: fn(f64) -> Preset = match upper.get(..3)? {
            "RX(" => Preset::Rx,
            "RY(" => Preset::Ry,
            "RZ(" => Preset::Rz,
            _ => return None,
        };
        let angle = t[3..].strip_suffix(')')?.trim();
        parse_real(angle).map(ctor)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::I => f.write_str("I"),
            Preset::X => f.write_str("X"),
            Preset::Y => f.write_str("Y"),
            Preset::Z => f.write_str("Z"),
            Preset::H => f.write_str("H"),
            Preset::SPhase => f.write_str("S_PHASE"),
            Preset::T => f.write_str("T"),
            Preset::Rx(t) => write!(f, "RX({t})"),
            Preset::Ry(t) => write!(f, "RY({t})"),
            Preset::Rz(t) => write!(f, "RZ({t})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySpec {
    Preset(Preset),
    Matrix(Vec<Vec<C64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryDef {
    pub name: String,
    pub spec: UnitarySpec,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrimRef {
    Id,
    M,
    Delta,
    Unit,
    Counit,
    S,
    Swap,
    U(String),
}

impl fmt::Display for PrimRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimRef::Id => f.write_str("ID"),
            PrimRef::M => f.write_str("M"),
            PrimRef::Delta => f.write_str("DELTA"),
            PrimRef::Unit => f.write_str("UNIT"),
            PrimRef::Counit => f.write_str("COUNIT"),
            PrimRef::S => f.write_str("S"),
            PrimRef::Swap => f.write_str("SWAP"),
            PrimRef::U(name) => write!(f, "U({name})"),
        }
    }
}

/// Parsed, unresolved circuit source.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDocument {
    pub algebra_name: String,
    pub wires_in: usize,
    /// In definition order; names are unique.
    pub unitaries: Vec<UnitaryDef>,
    pub layers: Vec<Vec<PrimRef>>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_real(s: &str) -> Option<f64> {
    // f64::from_str also takes "inf" and "nan"
    if !s.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Parse a complex literal such as `0.5`, `-i`, `1e-3-2.5i`.
pub fn parse_complex(text: &str) -> Option<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(&s).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Some(C64::new(re, im))
}

/// Canonical complex literal; parses back to the identical value.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

struct LineCursor<'a> {
    line: usize,
    text: &'a str,
}

impl LineCursor<'_> {
    fn err(&self, byte_offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.text[..byte_offset].chars().count() + 1,
            kind,
        }
    }
}

/// Byte offset of `sub` within `base`; `sub` must be a subslice of `base`.
fn offset_in(base: &str, sub: &str) -> usize {
    sub.as_ptr() as usize - base.as_ptr() as usize
}

/// Split on `sep`, yielding trimmed pieces with their byte offsets.
fn split_trimmed<'a>(base: &'a str, s: &'a str, sep: char) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    s.split(sep).map(move |piece| {
        let t = piece.trim();
        let off = if t.is_empty() { offset_in(base, piece) } else { offset_in(base, t) };
        (off, t)
    })
}

#[derive(PartialEq, PartialOrd)]
enum Section {
    Start,
    Algebra,
    Wires,
    Layers,
}

pub fn parse_circuit(text: &str) -> Result<CircuitDocument, ParseError> {
    let mut algebra_name = None;
    let mut wires_in = None;
    let mut unitaries: Vec<UnitaryDef> = Vec::new();
    let mut layers = Vec::new();
    let mut section = Section::Start;
    let mut last_line = 1;

    for (k, raw) in text.lines().enumerate() {
        let cur = LineCursor { line: k + 1, text: raw };
        last_line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let kw_end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let keyword = &trimmed[..kw_end];
        let rest = trimmed[kw_end..].trim();
        let rest_off = if rest.is_empty() { offset_in(raw, trimmed) + kw_end } else { offset_in(raw, rest) };
        let kw_off = offset_in(raw, trimmed);
        let syntax = |off: usize, msg: String| cur.err(off, ParseErrorKind::Syntax(msg));

        match keyword.to_ascii_lowercase().as_str() {
            "algebra" => {
                if section != Section::Start {
                    return Err(syntax(kw_off, "'algebra' must be the first line".into()));
                }
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax(rest_off, "expected a single algebra name or path".into()));
                }
                algebra_name = Some(rest.to_string());
                section = Section::Algebra;
            }
            "in" => {
                if section != Section::Algebra {
                    return Err(syntax(kw_off, "'in' must directly follow 'algebra'".into()));
                }
                let n = rest.parse::<usize>().map_err(|_| {
                    cur.err(rest_off, ParseErrorKind::Lexical(format!("expected a wire count, found {rest:?}")))
                })?;
                wires_in = Some(n);
                section = Section::Wires;
            }
            "unitary" => {
                if section != Section::Wires {
                    let msg = if section == Section::Layers {
                        "unitary definitions must precede the first layer"
                    } else {
                        "unitary definition before the 'algebra'/'in' header"
                    };
                    return Err(syntax(kw_off, msg.into()));
                }
                unitaries.push(parse_unitary_def(&cur, rest, rest_off, &unitaries)?);
            }
            "layer" => {
                if section < Section::Wires {
                    return Err(syntax(kw_off, "layer before the 'algebra'/'in' header".into()));
                }
                section = Section::Layers;
                layers.push(parse_layer(&cur, rest, rest_off, &unitaries)?);
            }
            _ => {
                return Err(cur.err(kw_off, ParseErrorKind::Syntax(format!("unknown keyword {keyword:?}"))));
            }
        }
    }

    let missing = |what: &str| ParseError {
        line: last_line,
        column: 1,
        kind: ParseErrorKind::Syntax(format!("missing '{what}' header")),
    };
    Ok(CircuitDocument {
        algebra_name: algebra_name.ok_or_else(|| missing("algebra"))?,
        wires_in: wires_in.ok_or_else(|| missing("in"))?,
        unitaries,
        layers,
    })
}

fn parse_unitary_def(cur: &LineCursor, rest: &str, rest_off: usize, known: &[UnitaryDef]) -> Result<UnitaryDef, ParseError> {
    let name_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let name = &rest[..name_end];
    if !is_identifier(name) {
        return Err(cur.err(rest_off, ParseErrorKind::Lexical(format!("invalid unitary name {name:?}"))));
    }
    if known.iter().any(|u| u.name == name) {
        return Err(cur.err(rest_off, ParseErrorKind::DuplicateUnitary(name.to_string())));
    }
    let spec_text = rest[name_end..].trim();
    if spec_text.is_empty() {
        return Err(cur.err(
            rest_off + name_end,
            ParseErrorKind::Syntax(format!("unitary {name} needs a preset or a matrix")),
        ));
    }
    let spec_off = offset_in(cur.text, spec_text);
    let spec = if let Some(inner) = spec_text.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| {
            cur.err(spec_off, ParseErrorKind::Lexical("unterminated matrix literal".into()))
        })?;
        let mut rows = Vec::new();
        for (_, row) in split_trimmed(cur.text, inner, ';') {
            let mut entries = Vec::new();
            for (off, entry) in split_trimmed(cur.text, row, ',') {
                let z = parse_complex(entry).ok_or_else(|| {
                    cur.err(off, ParseErrorKind::Lexical(format!("bad complex literal {entry:?}")))
                })?;
                entries.push(z);
            }
            rows.push(entries);
        }
        UnitarySpec::Matrix(rows)
    } else {
        UnitarySpec::Preset(
            Preset::parse(spec_text)
                .ok_or_else(|| cur.err(spec_off, ParseErrorKind::UnknownPreset(spec_text.to_string())))?,
        )
    };
    Ok(UnitaryDef {
        name: name.to_string(),
        spec,
    })
}

fn parse_layer(cur: &LineCursor, rest: &str, rest_off: usize, known: &[UnitaryDef]) -> Result<Vec<PrimRef>, ParseError> {
    if rest.is_empty() {
        return Err(cur.err(rest_off, ParseErrorKind::Syntax("empty layer".into())));
    }
    let mut prims = Vec::new();
    for (off, tok) in split_trimmed(cur.text, rest, ',') {
        if tok.is_empty() {
            return Err(cur.err(off, ParseErrorKind::Lexical("missing primitive between commas".into())));
        }
        if let Some(bad) = tok.chars().find(|c| !(c.is_ascii_alphanumeric() || "_() ".contains(*c))) {
            return Err(cur.err(off, ParseErrorKind::Lexical(format!("unexpected character {bad:?} in {tok:?}"))));
        }
        let upper = tok.to_ascii_uppercase();
        let prim = match upper.as_str() {
            "ID" => PrimRef::Id,
            "M" => PrimRef::M,
            "DELTA" => PrimRef::Delta,
            "UNIT" => PrimRef::Unit,
            "COUNIT" => PrimRef::Counit,
            "S" => PrimRef::S,
            "SWAP" => PrimRef::Swap,
            _ => {
                let inner = upper
                    .strip_prefix('U')
                    .map(str::trim_start)
                    .and_then(|s| s.strip_prefix('('))
                    .and_then(|s| s.strip_suffix(')'));
                match inner {
                    Some(_) => {
                        let open = tok.find('(').expect("checked");
                        let name = tok[open + 1..tok.len() - 1].trim();
                        if !known.iter().any(|u| u.name == name) {
                            return Err(cur.err(off, ParseErrorKind::UnknownUnitary(name.to_string())));
                        }
                        PrimRef::U(name.to_string())
                    }
                    None => return Err(cur.err(off, ParseErrorKind::UnknownPrimitive(tok.to_string()))),
                }
            }
        };
        prims.push(prim);
    }
    Ok(prims)
}

/// Canonical text form. `parse_circuit(&print_circuit(d)) == Ok(d)`.
pub fn print_circuit(doc: &CircuitDocument) -> String {
    let mut out = String::new();
    writeln!(out, "algebra {}", doc.algebra_name).unwrap();
    writeln!(out, "in {}", doc.wires_in).unwrap();
    for u in &doc.unitaries {
        match &u.spec {
            UnitarySpec::Preset(p) => writeln!(out, "unitary {} {p}", u.name).unwrap(),
            UnitarySpec::Matrix(rows) => {
                let body: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", "))
                    .collect();
                writeln!(out, "unitary {} [{}]", u.name, body.join("; ")).unwrap();
            }
        }
    }
    for layer in &doc.layers {
        let prims: Vec<String> = layer.iter().map(PrimRef::to_string).collect();
        writeln!(out, "layer {}", prims.join(", ")).unwrap();
    }
    out
}

impl fmt::Display for CircuitDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_circuit(self))
    }
}

impl CircuitDocument {
    /// Resolve the algebra name: a built-in, a path relative to the working
    /// directory, or a path relative to `base_dir`.
    pub fn resolve_algebra(&self, base_dir: Option<&Path>) -> Result<HopfAlgebra, DslError> {
        match HopfAlgebra::resolve(&self.algebra_name) {
            Err(AlgebraError::UnknownAlgebra(_)) if base_dir.is_some() => {
                let path = base_dir.expect("checked").join(&self.algebra_name);
                Ok(HopfAlgebra::resolve(&path.to_string_lossy())?)
            }
            other => Ok(other?),
        }
    }

    pub fn to_circuit(&self, base_dir: Option<&Path>) -> Result<Circuit, DslError> {
        let algebra = Arc::new(self.resolve_algebra(base_dir)?);
        self.to_circuit_with(algebra)
    }

    /// Build against an already-resolved algebra.
    pub fn to_circuit_with(&self, algebra: Arc<HopfAlgebra>) -> Result<Circuit, DslError> {
        let d = algebra.dim();
        let mut gates: HashMap<&str, UnitaryGate> = HashMap::new();
        for u in &self.unitaries {
            let rows = match &u.spec {
                UnitarySpec::Preset(p) => {
                    if d != 2 {
                        return Err(DslError::PresetDim {
                            name: u.name.clone(),
                            preset: p.to_string(),
                            dim: d,
                        });
                    }
                    p.rows()
                }
                UnitarySpec::Matrix(rows) => rows.clone(),
            };
            gates.insert(&u.name, UnitaryGate::from_rows(u.name.clone(), &rows)?);
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|p| match p {
                        PrimRef::Id => Primitive::Id,
                        PrimRef::M => Primitive::Mul,
                        PrimRef::Delta => Primitive::Comul,
                        PrimRef::Unit => Primitive::Unit,
                        PrimRef::Counit => Primitive::Counit,
                        PrimRef::S => Primitive::Antipode,
                        PrimRef::Swap => Primitive::Swap,
                        PrimRef::U(name) => Primitive::Unitary(gates[name.as_str()].clone()),
                    })
                    .collect()
            })
            .collect();
        Ok(Circuit::new(algebra, self.wires_in, layers)?)
    }

    /// Document for an existing circuit. Unitaries named in `specs` keep
    /// that definition; the rest are written out as matrices.
    pub fn from_circuit(circuit: &Circuit, algebra_name: &str, specs: &HashMap<String, UnitarySpec>) -> Self {
        let mut unitaries: Vec<UnitaryDef> = Vec::new();
        let layers = circuit
            .layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|p| match p {
                        Primitive::Id => PrimRef::Id,
                        Primitive::Mul => PrimRef::M,
                        Primitive::Comul => PrimRef::Delta,
                        Primitive::Unit => PrimRef::Unit,
                        Primitive::Counit => PrimRef::Counit,
                        Primitive::Antipode => PrimRef::S,
                        Primitive::Swap => PrimRef::Swap,
                        Primitive::Unitary(g) => {
                            if !unitaries.iter().any(|u| u.name == g.name()) {
                                let spec = specs
                                    .get(g.name())
                                    .cloned()
                                    .unwrap_or_else(|| UnitarySpec::Matrix(g.rows()));
                                unitaries.push(UnitaryDef {
                                    name: g.name().to_string(),
                                    spec,
                                });
                            }
                            PrimRef::U(g.name().to_string())
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            algebra_name: algebra_name.to_string(),
            wires_in: circuit.wires_in(),
            unitaries,
            layers,
        }
    }
}
