//! Finite-dimensional Hopf algebras given by structure tensors.
//!
//! Axis conventions (lower index = input axis, upper index = output axis):
//!
//! | tensor     | dims      | axes             |
//! |------------|-----------|------------------|
//! | `mul`      | `[d,d,d]` | `(in, in, out)`  |
//! | `comul`    | `[d,d,d]` | `(in, out, out)` |
//! | `unit`     | `[d]`     | `(out)`          |
//! | `counit`   | `[d]`     | `(in)`           |
//! | `antipode` | `[d,d]`   | `(in, out)`      |
//!
//! Every finite group gives a cocommutative Hopf algebra with
//! `m(g, h) = gh`, `Δ(g) = g ⊗ g`, `u = e`, `ε(g) = 1` and `S(g) = g⁻¹`.
//! The qubit case is the group Z₂, whose multiplication is XOR.

use std::fmt;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{self, as_linear_map, compose, kron, permute_axes, LinearMap, Tensor, STRUCTURE_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("inconsistent structure tensors: {0}")]
    Dimension(String),
    #[error("structure tensors fail the Hopf axioms: {0}")]
    AxiomsFailed(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),
    #[error("cannot read group table {path}: {detail}")]
    GroupFile { path: String, detail: String },
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// Raw structure tensors. Nothing here is guaranteed to satisfy the axioms;
/// [`HopfAlgebra`] is the validated wrapper.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensors {
    pub labels: Vec<String>,
    pub mul: Tensor,
    pub comul: Tensor,
    pub unit: Tensor,
    pub counit: Tensor,
    pub antipode: Tensor,
}

/// The linear maps `m`, `Δ`, `u`, `ε`, `S` and the transposition `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureMaps {
    pub mul: LinearMap,
    pub comul: LinearMap,
    pub unit: LinearMap,
    pub counit: LinearMap,
    pub antipode: LinearMap,
    pub swap: LinearMap,
    pub id: LinearMap,
}

fn dims_err(e: tensor::TensorError) -> AlgebraError {
    AlgebraError::Dimension(e.to_string())
}

/// Swap of two `d`-dimensional wires.
pub fn swap_map(d: usize) -> LinearMap {
    let mut data = vec![C64::new(0.0, 0.0); d.pow(4)];
    for a in 0..d {
        for b in 0..d {
            let row = b * d + a;
            let col = a * d + b;
            data[row * d * d + col] = C64::new(1.0, 0.0);
        }
    }
    LinearMap::from_matrix(d, 2, 2, data).expect("swap dims")
}

impl StructureTensors {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn check_dims(&self) -> Result<usize> {
        let d = self.dim();
        if d == 0 {
            return Err(AlgebraError::Dimension("empty basis".into()));
        }
        let want = |name: &str, t: &Tensor, dims: &[usize]| {
            if t.dims() == dims {
                Ok(())
            } else {
                Err(AlgebraError::Dimension(format!(
                    "{name} has dims {:?}, expected {dims:?}",
                    t.dims()
                )))
            }
        };
        want("mul", &self.mul, &[d, d, d])?;
        want("comul", &self.comul, &[d, d, d])?;
        want("unit", &self.unit, &[d])?;
        want("counit", &self.counit, &[d])?;
        want("antipode", &self.antipode, &[d, d])?;
        Ok(d)
    }

    /// Reshape the tensors into maps (outputs first).
    pub fn maps(&self) -> Result<StructureMaps> {
        let d = self.check_dims()?;
        let mul = as_linear_map(&permute_axes(&self.mul, &[2, 0, 1]).map_err(dims_err)?, d, 1, 2)
            .map_err(dims_err)?;
        let comul = as_linear_map(&permute_axes(&self.comul, &[1, 2, 0]).map_err(dims_err)?, d, 2, 1)
            .map_err(dims_err)?;
        let unit = as_linear_map(&self.unit, d, 1, 0).map_err(dims_err)?;
        let counit = as_linear_map(&self.counit, d, 0, 1).map_err(dims_err)?;
        let antipode = as_linear_map(&permute_axes(&self.antipode, &[1, 0]).map_err(dims_err)?, d, 1, 1)
            .map_err(dims_err)?;
        Ok(StructureMaps {
            mul,
            comul,
            unit,
            counit,
            antipode,
            swap: swap_map(d),
            id: LinearMap::identity(d, 1),
        })
    }
}

/// The six axiom families checked by [`check_axioms`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Associativity,
    Unit,
    Coassociativity,
    Counit,
    Bialgebra,
    Antipode,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Associativity,
        Axiom::Unit,
        Axiom::Coassociativity,
        Axiom::Counit,
        Axiom::Bialgebra,
        Axiom::Antipode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Associativity => "associativity",
            Axiom::Unit => "unit",
            Axiom::Coassociativity => "coassociativity",
            Axiom::Counit => "counit",
            Axiom::Bialgebra => "bialgebra",
            Axiom::Antipode => "antipode",
        }
    }

    pub fn identity(self) -> &'static str {
        match self {
            Axiom::Associativity => "m(m⊗id) = m(id⊗m)",
            Axiom::Unit => "m(u⊗id) = id = m(id⊗u)",
            Axiom::Coassociativity => "(Δ⊗id)Δ = (id⊗Δ)Δ",
            Axiom::Counit => "(ε⊗id)Δ = id = (id⊗ε)Δ",
            Axiom::Bialgebra => "Δm = (m⊗m)(id⊗τ⊗id)(Δ⊗Δ), Δu = u⊗u, εm = ε⊗ε, εu = 1",
            Axiom::Antipode => "m(S⊗id)Δ = uε = m(id⊗S)Δ",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
    /// Informational only; not part of the pass criterion.
    pub commutative: bool,
    /// Informational only; not part of the pass criterion.
    pub cocommutative: bool,
    pub passed: bool,
}

impl AxiomReport {
    pub fn check(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }

    pub fn failed(&self) -> Vec<Axiom> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.axiom).collect()
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>12}  result", "axiom", "deviation")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<16} {:>12.3e}  {}",
                c.axiom.name(),
                c.max_deviation,
                if c.passed { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(f, "commutative: {}, cocommutative: {}", self.commutative, self.cocommutative)?;
        write!(f, "overall: {}", if self.passed { "pass" } else { "FAIL" })
    }
}

fn dev(a: &LinearMap, b: &LinearMap) -> f64 {
    a.matrix().max_abs_diff(b.matrix()).expect("axiom sides have equal shape")
}

/// Evaluate every axiom family as an identity between composed maps.
pub fn check_axioms(t: &StructureTensors, tol: f64) -> Result<AxiomReport> {
    let s = t.maps()?;
    let c = |f: &LinearMap, g: &LinearMap| compose(f, g).expect("conformable");
    let k = |f: &LinearMap, g: &LinearMap| kron(f, g).expect("same base dim");
    let id = &s.id;
    let d = t.dim();

    let assoc = dev(&c(&s.mul, &k(&s.mul, id)), &c(&s.mul, &k(id, &s.mul)));

    let unit = dev(&c(&s.mul, &k(&s.unit, id)), id).max(dev(&c(&s.mul, &k(id, &s.unit)), id));

    let coassoc = dev(&c(&k(&s.comul, id), &s.comul), &c(&k(id, &s.comul), &s.comul));

    let counit = dev(&c(&k(&s.counit, id), &s.comul), id).max(dev(&c(&k(id, &s.counit), &s.comul), id));

    let middle_swap = k(&k(id, &s.swap), id);
    let bialg_lhs = c(&s.comul, &s.mul);
    let bialg_rhs = c(&k(&s.mul, &s.mul), &c(&middle_swap, &k(&s.comul, &s.comul)));
    let one = LinearMap::identity(d, 0);
    let bialgebra = dev(&bialg_lhs, &bialg_rhs)
        .max(dev(&c(&s.comul, &s.unit), &k(&s.unit, &s.unit)))
        .max(dev(&c(&s.counit, &s.mul), &k(&s.counit, &s.counit)))
        .max(dev(&c(&s.counit, &s.unit), &one));

    let ue = c(&s.unit, &s.counit);
    let antipode = dev(&c(&c(&s.mul, &k(&s.antipode, id)), &s.comul), &ue)
        .max(dev(&c(&c(&s.mul, &k(id, &s.antipode)), &s.comul), &ue));

    let checks: Vec<AxiomCheck> = Axiom::ALL
        .iter()
        .zip([assoc, unit, coassoc, counit, bialgebra, antipode])
        .map(|(&axiom, max_deviation)| AxiomCheck {
            axiom,
            max_deviation,
            passed: max_deviation <= tol,
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(AxiomReport {
        tolerance: tol,
        commutative: dev(&c(&s.mul, &s.swap), &s.mul) <= tol,
        cocommutative: dev(&c(&s.swap, &s.comul), &s.comul) <= tol,
        checks,
        passed,
    })
}

/// A Hopf algebra whose structure tensors pass [`check_axioms`] at 1e-12.
#[derive(Clone, Debug, PartialEq)]
pub struct HopfAlgebra {
    tensors: StructureTensors,
    maps: StructureMaps,
}

/// Group multiplication table in the JSON form accepted by `--algebra`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTable {
    pub labels: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Names accepted by [`HopfAlgebra::builtin`].
pub const BUILTIN_ALGEBRAS: [&str; 5] = ["Z2", "Z3", "Z4", "Z5", "S3"];

impl HopfAlgebra {
    pub fn from_tensors(tensors: StructureTensors) -> Result<Self> {
        let labels = &tensors.labels;
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(AlgebraError::Dimension(format!("duplicate basis label {l:?}")));
            }
        }
        let report = check_axioms(&tensors, STRUCTURE_TOL)?;
        if !report.passed {
            let failed: Vec<&str> = report.failed().iter().map(|a| a.name()).collect();
            return Err(AlgebraError::AxiomsFailed(failed.join(", ")));
        }
        let maps = tensors.maps()?;
        Ok(Self { tensors, maps })
    }

    /// The two-element algebra whose product is XOR: `f0` is the unit and
    /// `f1·f1 = f0`.
    pub fn z2() -> Self {
        let mut mul = Tensor::zeros(vec![2, 2, 2]);
        mul.set(&[0, 0, 0], one());
        mul.set(&[0, 1, 1], one());
        mul.set(&[1, 0, 1], one());
        mul.set(&[1, 1, 0], one());
        let mut comul = Tensor::zeros(vec![2, 2, 2]);
        comul.set(&[0, 0, 0], one());
        comul.set(&[1, 1, 1], one());
        Self::from_tensors(StructureTensors {
            labels: vec!["f0".into(), "f1".into()],
            mul,
            comul,
            unit: Tensor::basis_vector(2, 0),
            counit: Tensor::from_real(vec![2], &[1.0, 1.0]).expect("dims"),
            antipode: Tensor::identity_matrix(2),
        })
        .expect("Z2 satisfies the axioms")
    }

    /// The group algebra of a finite group given by its multiplication
    /// table: `table[a][b]` is the index of `a·b`.
    pub fn group_algebra(labels: Vec<String>, table: &[Vec<usize>]) -> Result<Self> {
        let d = labels.len();
        let inverse = validate_group(d, table)?;
        let mut mul = Tensor::zeros(vec![d, d, d]);
        let mut comul = Tensor::zeros(vec![d, d, d]);
        let mut antipode = Tensor::zeros(vec![d, d]);
        for a in 0..d {
            for (b, &ab) in table[a].iter().enumerate() {
                mul.set(&[a, b, ab], one());
            }
            comul.set(&[a, a, a], one());
            antipode.set(&[a, inverse[a]], one());
        }
        let identity = identity_element(table).expect("validated");
        Self::from_tensors(StructureTensors {
            labels,
            mul,
            comul,
            unit: Tensor::basis_vector(d, identity),
            counit: Tensor::new(vec![d], vec![one(); d]).expect("dims"),
            antipode,
        })
    }

    /// Cyclic group Z_n with labels `g0..g{n-1}`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let labels = (0..n).map(|k| format!("g{k}")).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::group_algebra(labels, &table)
    }

    /// Symmetric group on three letters, elements labelled by one-line
    /// notation (`123` is the identity); `(στ)(i) = σ(τ(i))`.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let labels = perms
            .iter()
            .map(|p| p.iter().map(|i| char::from(b'1' + *i as u8)).collect())
            .collect();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| {
                        let st = [s[t[0]], s[t[1]], s[t[2]]];
                        perms.iter().position(|p| *p == st).expect("closed")
                    })
                    .collect()
            })
            .collect();
        Self::group_algebra(labels, &table).expect("S3 is a group")
    }

    /// Resolve one of [`BUILTIN_ALGEBRAS`] (case-insensitive).
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "Z2" => Some(Self::z2()),
            "Z3" => Self::cyclic(3).ok(),
            "Z4" => Self::cyclic(4).ok(),
            "Z5" => Self::cyclic(5).ok(),
            "S3" => Some(Self::symmetric3()),
            _ => None,
        }
    }

    pub fn from_group_table(table: &GroupTable) -> Result<Self> {
        Self::group_algebra(table.labels.clone(), &table.table)
    }

    /// A built-in name, or else a path to a JSON group table.
    pub fn resolve(name: &str) -> Result<Self> {
        if let Some(h) = Self::builtin(name) {
            return Ok(h);
        }
        let path = Path::new(name);
        if !path.exists() {
            return Err(AlgebraError::UnknownAlgebra(name.to_string()));
        }
        let file_err = |detail: String| AlgebraError::GroupFile {
            path: name.to_string(),
            detail,
        };
        let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
        let table: GroupTable = serde_json::from_str(&text).map_err(|e| file_err(e.to_string()))?;
        Self::from_group_table(&table)
    }

    pub fn dim(&self) -> usize {
        self.tensors.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.tensors.labels
    }

    pub fn structure(&self) -> &StructureTensors {
        &self.tensors
    }

    pub fn mul(&self) -> &Tensor {
        &self.tensors.mul
    }

    pub fn comul(&self) -> &Tensor {
        &self.tensors.comul
    }

    pub fn unit(&self) -> &Tensor {
        &self.tensors.unit
    }

    pub fn counit(&self) -> &Tensor {
        &self.tensors.counit
    }

    pub fn antipode(&self) -> &Tensor {
        &self.tensors.antipode
    }

    pub fn maps(&self) -> &StructureMaps {
        &self.maps
    }

    pub fn check_axioms(&self, tol: f64) -> AxiomReport {
        check_axioms(&self.tensors, tol).expect("validated dims")
    }

    pub fn basis(&self, index: usize) -> AlgebraElement<'_> {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.dim()];
        coeffs[index] = one();
        AlgebraElement { algebra: self, coeffs }
    }

    pub fn zero(&self) -> AlgebraElement<'_> {
        AlgebraElement {
            algebra: self,
            coeffs: vec![C64::new(0.0, 0.0); self.dim()],
        }
    }

    pub fn element(&self, coeffs: Vec<C64>) -> Result<AlgebraElement<'_>> {
        if coeffs.len() != self.dim() {
            return Err(AlgebraError::CoefficientCount {
                expected: self.dim(),
                got: coeffs.len(),
            });
        }
        Ok(AlgebraElement { algebra: self, coeffs })
    }
}

fn identity_element(table: &[Vec<usize>]) -> Option<usize> {
    let d = table.len();
    (0..d).find(|&e| (0..d).all(|g| table[e][g] == g && table[g][e] == g))
}

/// Exhaustive group check; returns the inverse of each element.
fn validate_group(d: usize, table: &[Vec<usize>]) -> Result<Vec<usize>> {
    let fail = |msg: String| Err(AlgebraError::NotAGroup(msg));
    if d == 0 {
        return fail("empty group".into());
    }
    if table.len() != d || table.iter().any(|row| row.len() != d) {
        return fail(format!("table is not {d}x{d}"));
    }
    if let Some((a, b)) = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).find(|&(a, b)| table[a][b] >= d) {
        return fail(format!("closure: entry ({a},{b}) = {} is not an element index", table[a][b]));
    }
    let is_perm = |values: Vec<usize>| {
        let mut seen = vec![false; d];
        values.into_iter().all(|x| !std::mem::replace(&mut seen[x], true))
    };
    if !(0..d).all(|a| is_perm(table[a].clone())) {
        return fail("rows not permutations".into());
    }
    if !(0..d).all(|b| is_perm((0..d).map(|a| table[a][b]).collect())) {
        return fail("columns not permutations".into());
    }
    let Some(e) = identity_element(table) else {
        return fail("no identity element".into());
    };
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return fail(format!("associativity fails at ({a},{b},{c})"));
                }
            }
        }
    }
    (0..d)
        .map(|a| {
            (0..d)
                .find(|&b| table[a][b] == e && table[b][a] == e)
                .ok_or_else(|| AlgebraError::NotAGroup(format!("inverses: element {a} has none")))
        })
        .collect()
}

/// A superposition `Σ c_a f_a` of basis elements.
#[derive(Clone, Debug)]
pub struct AlgebraElement<'a> {
    algebra: &'a HopfAlgebra,
    coeffs: Vec<C64>,
}

impl PartialEq for AlgebraElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.coeffs == other.coeffs
    }
}

impl<'a> AlgebraElement<'a> {
    pub fn algebra(&self) -> &'a HopfAlgebra {
        self.algebra
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if std::ptr::eq(self.algebra, other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            algebra: self.algebra,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `(x·y)_c = Σ_{a,b} x_a y_b C_ab^c`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let d = self.algebra.dim();
        let mul = self.algebra.mul();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (a, xa) in self.coeffs.iter().enumerate() {
            for (b, yb) in other.coeffs.iter().enumerate() {
                for (c, o) in out.iter_mut().enumerate() {
                    *o += xa * yb * mul.get(&[a, b, c]);
                }
            }
        }
        Ok(Self {
            algebra: self.algebra,
            coeffs: out,
        })
    }

    /// Coefficients of `Δ(x)` in the `f_b ⊗ f_c` basis, dims `[d, d]`.
    pub fn comultiply(&self) -> Tensor {
        let x = Tensor::new(vec![self.coeffs.len()], self.coeffs.clone()).expect("finite coeffs");
        tensor::contract(&x, &[0], self.algebra.comul(), &[0]).expect("dims")
    }

    pub fn counit_value(&self) -> C64 {
        let eps = self.algebra.counit().data();
        self.coeffs.iter().zip(eps).map(|(x, e)| x * e).sum()
    }

    pub fn antipode_apply(&self) -> Self {
        let x = Tensor::new(vec![self.coeffs.len()], self.coeffs.clone()).expect("finite coeffs");
        let out = tensor::contract(&x, &[0], self.algebra.antipode(), &[0]).expect("dims");
        Self {
            algebra: self.algebra,
            coeffs: out.into_data(),
        }
    }
}
