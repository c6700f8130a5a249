//! Circuits as layered diagrams of Hopf-algebra structure maps.
//!
//! A circuit is a list of layers applied in order, the first layer touching
//! the inputs. Each layer is a left-to-right list of primitives whose input
//! arities add up to the number of wires entering the layer; the layer acts
//! as the tensor product of its primitives. Wire 0 is the leftmost tensor
//! factor and the most significant digit of a basis index.
//!
//! Besides the dense evaluator, [`evaluate_bruteforce`] sums over explicit
//! basis labellings of every internal wire, reading structure tensors entry
//! by entry. The two share no code beyond the algebra's tensors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hopf::HopfAlgebra;
use crate::tensor::{compose, kron, LinearMap, Tensor, TensorError, CIRCUIT_TOL};

/// Largest state vector (in entries) any layer boundary may require.
pub const MAX_STATE_ENTRIES: usize = 1 << 20;

/// Amplitudes at or below this magnitude count as zero when measuring.
pub const ANNIHILATION_EPS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("layer {layer} consumes {consumed} wires, {available} available")]
    Arity {
        layer: usize,
        consumed: usize,
        available: usize,
    },
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("layer {layer}: unitary {name} is {got}x{got}, algebra dimension is {expected}")]
    UnitaryDim {
        layer: usize,
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("matrix {name} is not unitary (max |U†U - I| = {deviation:.3e})")]
    NotUnitary { name: String, deviation: f64 },
    #[error("matrix {0} is not square")]
    NotSquare(String),
    #[error("{wires} wires at d={base_dim} exceed the limit of {} state entries", MAX_STATE_ENTRIES)]
    WidthLimit { wires: usize, base_dim: usize },
    #[error("basis index {index} out of range for {wires} wires at d={base_dim}")]
    InputIndex {
        index: usize,
        wires: usize,
        base_dim: usize,
    },
    #[error("invalid basis label {label:?} for {wires} wires at d={base_dim}")]
    BasisLabel {
        label: String,
        wires: usize,
        base_dim: usize,
    },
    #[error("annihilated state: the circuit maps this input to zero")]
    Annihilated,
    #[error("bad gate {index}: {detail}")]
    BadGate { index: usize, detail: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T> = std::result::Result<T, CircuitError>;

/// A named single-wire unitary. The matrix is indexed `[out, in]`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryGate {
    name: String,
    matrix: Tensor,
}

impl UnitaryGate {
    pub fn new(name: impl Into<String>, matrix: Tensor) -> Result<Self> {
        let name = name.into();
        let dims = matrix.dims();
        if dims.len() != 2 || dims[0] != dims[1] {
            return Err(CircuitError::NotSquare(name));
        }
        let n = dims[0];
        let mut deviation: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: C64 = (0..n).map(|k| matrix.get(&[k, i]).conj() * matrix.get(&[k, j])).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((dot - want).norm());
            }
        }
        if deviation > CIRCUIT_TOL {
            return Err(CircuitError::NotUnitary { name, deviation });
        }
        Ok(Self { name, matrix })
    }

    pub fn from_rows(name: impl Into<String>, rows: &[Vec<C64>]) -> Result<Self> {
        let name = name.into();
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(CircuitError::NotSquare(name));
        }
        let matrix = Tensor::new(vec![n, n], rows.concat())?;
        Self::new(name, matrix)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Tensor {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dims()[0]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.matrix.data().chunks(self.dim()).map(<[C64]>::to_vec).collect()
    }

    pub fn to_map(&self) -> LinearMap {
        LinearMap::from_matrix(self.dim(), 1, 1, self.matrix.data().to_vec()).expect("square matrix")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Id,
    Mul,
    Comul,
    Unit,
    Counit,
    Antipode,
    Swap,
    Unitary(UnitaryGate),
}

impl Primitive {
    /// `(inputs, outputs)`.
    pub fn arity(&self) -> (usize, usize) {
        match self {
            Primitive::Id | Primitive::Antipode | Primitive::Unitary(_) => (1, 1),
            Primitive::Mul => (2, 1),
            Primitive::Comul => (1, 2),
            Primitive::Unit => (0, 1),
            Primitive::Counit => (1, 0),
            Primitive::Swap => (2, 2),
        }
    }

    /// The primitive's matrix over `algebra`.
    pub fn map(&self, algebra: &HopfAlgebra) -> LinearMap {
        let maps = algebra.maps();
        match self {
            Primitive::Id => maps.id.clone(),
            Primitive::Mul => maps.mul.clone(),
            Primitive::Comul => maps.comul.clone(),
            Primitive::Unit => maps.unit.clone(),
            Primitive::Counit => maps.counit.clone(),
            Primitive::Antipode => maps.antipode.clone(),
            Primitive::Swap => maps.swap.clone(),
            Primitive::Unitary(u) => u.to_map(),
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Id => f.write_str("ID"),
            Primitive::Mul => f.write_str("M"),
            Primitive::Comul => f.write_str("DELTA"),
            Primitive::Unit => f.write_str("UNIT"),
            Primitive::Counit => f.write_str("COUNIT"),
            Primitive::Antipode => f.write_str("S"),
            Primitive::Swap => f.write_str("SWAP"),
            Primitive::Unitary(u) => write!(f, "U({})", u.name),
        }
    }
}

pub type Layer = Vec<Primitive>;

fn state_len(base_dim: usize, wires: usize) -> Option<usize> {
    u32::try_from(wires).ok().and_then(|w| base_dim.checked_pow(w))
}

fn check_width(base_dim: usize, wires: usize) -> Result<usize> {
    match state_len(base_dim, wires) {
        Some(n) if n <= MAX_STATE_ENTRIES => Ok(n),
        _ => Err(CircuitError::WidthLimit { wires, base_dim }),
    }
}

/// Thread wire counts through the layers. Returns the count at every layer
/// boundary, starting with `wires_in`.
pub fn validate(base_dim: usize, wires_in: usize, layers: &[Layer]) -> Result<Vec<usize>> {
    let mut profile = vec![wires_in];
    check_width(base_dim, wires_in)?;
    let mut wires = wires_in;
    for (k, layer) in layers.iter().enumerate() {
        if layer.is_empty() {
            return Err(CircuitError::EmptyLayer(k));
        }
        let consumed: usize = layer.iter().map(|p| p.arity().0).sum();
        if consumed != wires {
            return Err(CircuitError::Arity {
                layer: k,
                consumed,
                available: wires,
            });
        }
        for p in layer {
            if let Primitive::Unitary(u) = p {
                if u.dim() != base_dim {
                    return Err(CircuitError::UnitaryDim {
                        layer: k,
                        name: u.name.clone(),
                        got: u.dim(),
                        expected: base_dim,
                    });
                }
            }
        }
        wires = layer.iter().map(|p| p.arity().1).sum();
        check_width(base_dim, wires)?;
        profile.push(wires);
    }
    Ok(profile)
}

/// A validated circuit over a Hopf algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    algebra: Arc<HopfAlgebra>,
    wires_in: usize,
    layers: Vec<Layer>,
    profile: Vec<usize>,
}

impl Circuit {
    pub fn new(algebra: Arc<HopfAlgebra>, wires_in: usize, layers: Vec<Layer>) -> Result<Self> {
        let profile = validate(algebra.dim(), wires_in, &layers)?;
        Ok(Self {
            algebra,
            wires_in,
            layers,
            profile,
        })
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    pub fn base_dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn wires_in(&self) -> usize {
        self.wires_in
    }

    pub fn wires_out(&self) -> usize {
        *self.profile.last().expect("profile starts with wires_in")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Wire counts at each layer boundary.
    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    /// The circuit's linear map.
    pub fn evaluate(&self) -> LinearMap {
        evaluate(self)
    }
}

/// Kronecker product of the layer's primitive maps, leftmost factor first.
pub fn layer_map(algebra: &HopfAlgebra, layer: &[Primitive]) -> Result<LinearMap> {
    let mut acc = LinearMap::identity(algebra.dim(), 0);
    for p in layer {
        acc = kron(&acc, &p.map(algebra))?;
    }
    Ok(acc)
}

/// Apply `factors[0] ⊗ factors[1] ⊗ ...` to the rows of a row-major
/// `d^w x cols` matrix without materialising the Kronecker product.
fn apply_factors(factors: &[LinearMap], data: Vec<C64>, cols: usize) -> Vec<C64> {
    let mut data = data;
    // left: extent of the already-mapped output wires; the remaining input
    // wires and the column index form the trailing block.
    let mut left = 1usize;
    let mut right: usize = factors.iter().map(|f| f.cols()).product::<usize>() * cols;
    for f in factors {
        let (fin, fout) = (f.cols(), f.rows());
        right /= fin;
        let mut next = vec![C64::new(0.0, 0.0); left * fout * right];
        for l in 0..left {
            for o in 0..fout {
                let dst = &mut next[(l * fout + o) * right..(l * fout + o + 1) * right];
                for i in 0..fin {
                    let w = f.entry(o, i);
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = &data[(l * fin + i) * right..(l * fin + i + 1) * right];
                    for (x, y) in dst.iter_mut().zip(src) {
                        *x += w * y;
                    }
                }
            }
        }
        data = next;
        left *= fout;
    }
    data
}

/// Compose the layer maps in application order.
///
/// Each step equals `compose(layer_map(layer), acc)`; the Kronecker
/// factors are applied one at a time rather than multiplied out.
pub fn evaluate(c: &Circuit) -> LinearMap {
    let d = c.base_dim();
    let cols = state_len(d, c.wires_in).expect("validated width");
    let mut data = LinearMap::identity(d, c.wires_in).matrix().data().to_vec();
    for layer in &c.layers {
        let factors: Vec<LinearMap> = layer.iter().map(|p| p.map(&c.algebra)).collect();
        data = apply_factors(&factors, data, cols);
    }
    LinearMap::from_matrix(d, c.wires_out(), c.wires_in, data).expect("validated shapes")
}

/// Literal fold of `compose(layer_map(layer), acc)` over the layers.
pub fn evaluate_by_composition(c: &Circuit) -> Result<LinearMap> {
    let mut acc = LinearMap::identity(c.base_dim(), c.wires_in);
    for layer in &c.layers {
        acc = compose(&layer_map(&c.algebra, layer)?, &acc)?;
    }
    Ok(acc)
}

/// Output amplitudes of one primitive on the given input labels.
fn primitive_terms(algebra: &HopfAlgebra, p: &Primitive, input: &[usize]) -> Vec<(Vec<usize>, C64)> {
    let d = algebra.dim();
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let keep = |terms: Vec<(Vec<usize>, C64)>| terms.into_iter().filter(|(_, w)| *w != zero).collect();
    match p {
        Primitive::Id => vec![(vec![input[0]], one)],
        Primitive::Swap => vec![(vec![input[1], input[0]], one)],
        Primitive::Mul => keep(
            (0..d)
                .map(|c| (vec![c], algebra.mul().get(&[input[0], input[1], c])))
                .collect(),
        ),
        Primitive::Comul => keep(
            (0..d)
                .flat_map(|b| (0..d).map(move |c| (b, c)))
                .map(|(b, c)| (vec![b, c], algebra.comul().get(&[input[0], b, c])))
                .collect(),
        ),
        Primitive::Unit => keep((0..d).map(|c| (vec![c], algebra.unit().get(&[c]))).collect()),
        Primitive::Counit => keep(vec![(vec![], algebra.counit().get(&[input[0]]))]),
        Primitive::Antipode => keep(
            (0..d)
                .map(|b| (vec![b], algebra.antipode().get(&[input[0], b])))
                .collect(),
        ),
        Primitive::Unitary(u) => keep((0..d).map(|o| (vec![o], u.matrix().get(&[o, input[0]]))).collect()),
    }
}

/// Digits of `index` in base `d`, most significant (wire 0) first.
pub fn basis_digits(mut index: usize, base_dim: usize, wires: usize) -> Vec<usize> {
    let mut digits = vec![0; wires];
    for k in (0..wires).rev() {
        digits[k] = index % base_dim;
        index /= base_dim;
    }
    digits
}

pub fn basis_index(digits: &[usize], base_dim: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * base_dim + x)
}

/// Propagate one basis input through the circuit by summing over every
/// labelling of the internal wires.
pub fn evaluate_bruteforce(c: &Circuit, input_index: usize) -> Result<Vec<C64>> {
    let d = c.base_dim();
    let n_in = state_len(d, c.wires_in).expect("validated width");
    if input_index >= n_in {
        return Err(CircuitError::InputIndex {
            index: input_index,
            wires: c.wires_in,
            base_dim: d,
        });
    }
    let mut state: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    state.insert(basis_digits(input_index, d, c.wires_in), C64::new(1.0, 0.0));

    for layer in &c.layers {
        let mut next: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (labels, amp) in &state {
            let mut partial: Vec<(Vec<usize>, C64)> = vec![(Vec::new(), *amp)];
            let mut pos = 0;
            for p in layer {
                let (ins, _) = p.arity();
                let terms = primitive_terms(&c.algebra, p, &labels[pos..pos + ins]);
                pos += ins;
                partial = partial
                    .iter()
                    .flat_map(|(prefix, w)| {
                        terms.iter().map(move |(out, t)| {
                            let mut labels = prefix.clone();
                            labels.extend_from_slice(out);
                            (labels, w * t)
                        })
                    })
                    .collect();
            }
            for (labels, w) in partial {
                *next.entry(labels).or_insert(C64::new(0.0, 0.0)) += w;
            }
        }
        state = next;
    }

    let n_out = state_len(d, c.wires_out()).expect("validated width");
    let mut out = vec![C64::new(0.0, 0.0); n_out];
    for (labels, amp) in state {
        out[basis_index(&labels, d)] += amp;
    }
    Ok(out)
}

/// Largest entry-wise gap between `evaluate` and the brute-force oracle over
/// all basis inputs.
pub fn oracle_deviation(c: &Circuit) -> Result<f64> {
    let map = evaluate(c);
    let mut worst: f64 = 0.0;
    for col in 0..map.cols() {
        let oracle = evaluate_bruteforce(c, col)?;
        for (row, amp) in oracle.iter().enumerate() {
            worst = worst.max((map.entry(row, col) - amp).norm());
        }
    }
    Ok(worst)
}

/// `|g⟩⊗|h⟩ ↦ |g⟩⊗|g·h⟩` as `(id⊗m)(Δ⊗id)`: copy the control, then multiply
/// the copy into the target.
pub fn build_cnot(algebra: Arc<HopfAlgebra>) -> Circuit {
    Circuit::new(
        algebra,
        2,
        vec![
            vec![Primitive::Comul, Primitive::Id],
            vec![Primitive::Id, Primitive::Mul],
        ],
    )
    .expect("CNOT block is well formed")
}

/// Gates of an already-decomposed circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    U1 { wire: usize, gate: UnitaryGate },
}

fn padded(wires: usize, pos: usize, prims: Vec<Primitive>) -> Layer {
    let used: usize = prims.iter().map(|p| p.arity().0).sum();
    let mut layer = vec![Primitive::Id; pos];
    layer.extend(prims);
    layer.extend(std::iter::repeat_n(Primitive::Id, wires - pos - used));
    layer
}

fn check_gates(base_dim: usize, wires: usize, gates: &[Gate]) -> Result<()> {
    let bad = |index: usize, detail: String| Err(CircuitError::BadGate { index, detail });
    for (k, g) in gates.iter().enumerate() {
        match g {
            Gate::Cnot { control, target } => {
                if *control >= wires || *target >= wires {
                    return bad(k, format!("cnot({control},{target}) on {wires} wires"));
                }
                if control == target {
                    return bad(k, format!("cnot control and target are both {control}"));
                }
            }
            Gate::U1 { wire, gate } => {
                if *wire >= wires {
                    return bad(k, format!("u1 on wire {wire} of {wires}"));
                }
                if gate.dim() != base_dim {
                    return bad(k, format!("{} is {}x{}, algebra dimension {base_dim}", gate.name, gate.dim(), gate.dim()));
                }
            }
        }
    }
    Ok(())
}

/// Translate CNOT and single-wire gates into Hopf primitives.
///
/// A CNOT whose control sits immediately left of its target becomes the
/// two-layer `[Δ, id]`, `[id, m]` block. Other placements first walk the
/// control next to the target with a ladder of swaps and walk it back after.
pub fn compile_gate_circuit(algebra: Arc<HopfAlgebra>, wires: usize, gates: &[Gate]) -> Result<Circuit> {
    check_gates(algebra.dim(), wires, gates)?;
    let mut layers = Vec::new();
    for g in gates {
        match g {
            Gate::U1 { wire, gate } => {
                layers.push(padded(wires, *wire, vec![Primitive::Unitary(gate.clone())]));
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (*control, *target);
                // swap positions (k, k+1), and where the block lands
                let (ladder, at): (Vec<usize>, usize) = if c < t {
                    ((c..t - 1).collect(), t - 1)
                } else {
                    ((t..c).rev().collect(), t)
                };
                for &k in &ladder {
                    layers.push(padded(wires, k, vec![Primitive::Swap]));
                }
                layers.push(padded(wires, at, vec![Primitive::Comul, Primitive::Id]));
                layers.push(padded(wires + 1, at, vec![Primitive::Id, Primitive::Mul]));
                for &k in ladder.iter().rev() {
                    layers.push(padded(wires, k, vec![Primitive::Swap]));
                }
            }
        }
    }
    Circuit::new(algebra, wires, layers)
}

/// Direct simulation of a gate list by index arithmetic on basis digits.
/// CNOT acts as `|x_c, x_t⟩ ↦ Σ_z C_{x_c x_t}^z |x_c, z⟩`.
pub fn simulate_gates(algebra: &HopfAlgebra, wires: usize, gates: &[Gate]) -> Result<LinearMap> {
    let d = algebra.dim();
    check_gates(d, wires, gates)?;
    let n = check_width(d, wires)?;
    let stride = |w: usize| d.pow((wires - 1 - w) as u32);
    let mut m = LinearMap::identity(d, wires).matrix().data().to_vec();
    for g in gates {
        let mut next = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            let row = &m[r * n..(r + 1) * n];
            let digits = basis_digits(r, d, wires);
            let mut push = |r2: usize, w: C64| {
                if w != C64::new(0.0, 0.0) {
                    for (x, y) in next[r2 * n..(r2 + 1) * n].iter_mut().zip(row) {
                        *x += w * y;
                    }
                }
            };
            match g {
                Gate::U1 { wire, gate } => {
                    let a = digits[*wire];
                    for o in 0..d {
                        let r2 = r - a * stride(*wire) + o * stride(*wire);
                        push(r2, gate.matrix().get(&[o, a]));
                    }
                }
                Gate::Cnot { control, target } => {
                    let (xc, xt) = (digits[*control], digits[*target]);
                    for z in 0..d {
                        let r2 = r - xt * stride(*target) + z * stride(*target);
                        push(r2, algebra.mul().get(&[xc, xt, z]));
                    }
                }
            }
        }
        m = next;
    }
    Ok(LinearMap::from_matrix(d, wires, wires, m)?)
}

pub fn apply(map: &LinearMap, state: &[C64]) -> Result<Vec<C64>> {
    Ok(map.apply(state)?)
}

/// Square and `M†M = I` within `tol`.
pub fn is_unitary(map: &LinearMap, tol: f64) -> bool {
    if map.wires_in() != map.wires_out() || map.rows() != map.cols() {
        return false;
    }
    let n = map.cols();
    for i in 0..n {
        for j in 0..n {
            let dot: C64 = (0..n).map(|k| map.entry(k, i).conj() * map.entry(k, j)).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (dot - want).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Text label of a basis state: one digit per wire when `d <= 10`,
/// otherwise dot-separated decimal digits.
pub fn basis_label(index: usize, base_dim: usize, wires: usize) -> String {
    let digits = basis_digits(index, base_dim, wires);
    if base_dim <= 10 {
        digits.iter().map(|x| char::from(b'0' + *x as u8)).collect()
    } else {
        digits.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Inverse of [`basis_label`].
pub fn parse_basis_label(label: &str, base_dim: usize, wires: usize) -> Result<usize> {
    let err = || CircuitError::BasisLabel {
        label: label.to_string(),
        wires,
        base_dim,
    };
    let digits: Vec<usize> = if base_dim <= 10 {
        label
            .chars()
            .map(|ch| ch.to_digit(10).map(|x| x as usize).ok_or_else(err))
            .collect::<Result<_>>()?
    } else if label.is_empty() {
        Vec::new()
    } else {
        label
            .split('.')
            .map(|s| s.parse::<usize>().map_err(|_| err()))
            .collect::<Result<_>>()?
    };
    if digits.len() != wires || digits.iter().any(|&x| x >= base_dim) {
        return Err(err());
    }
    Ok(basis_index(&digits, base_dim))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
}

/// Born-rule distribution over the computational basis of the output wires.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub entries: Vec<Outcome>,
    /// Squared norm of the output vector before normalisation.
    pub norm_in: f64,
}

impl OutcomeDistribution {
    pub fn probability(&self, label: &str) -> f64 {
        self.entries
            .iter()
            .find(|o| o.label == label)
            .map_or(0.0, |o| o.probability)
    }
}

/// Probabilities `|ψ_i|² / Σ_j |ψ_j|²`. Amplitudes of magnitude at most
/// [`ANNIHILATION_EPS`] are dropped; if nothing is left the input was
/// annihilated.
pub fn measure(state: &[C64], base_dim: usize) -> Result<OutcomeDistribution> {
    let mut wires = 0;
    while state_len(base_dim, wires).is_some_and(|n| n < state.len()) {
        wires += 1;
    }
    if base_dim < 2 && state.len() != 1 || state_len(base_dim, wires) != Some(state.len()) {
        return Err(TensorError::VectorLength {
            got: state.len(),
            expected: state_len(base_dim, wires).unwrap_or(0),
        }
        .into());
    }
    let norm_in: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    let kept: Vec<(usize, f64)> = state
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > ANNIHILATION_EPS)
        .map(|(i, z)| (i, z.norm_sqr()))
        .collect();
    if kept.is_empty() {
        return Err(CircuitError::Annihilated);
    }
    let total: f64 = kept.iter().map(|(_, p)| p).sum();
    Ok(OutcomeDistribution {
        entries: kept
            .into_iter()
            .map(|(i, p)| Outcome {
                label: basis_label(i, base_dim, wires),
                probability: p / total,
            })
            .collect(),
        norm_in,
    })
}
