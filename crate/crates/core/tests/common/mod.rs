//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use hopf_circuits::circuit::{Circuit, Gate, Layer, Primitive, UnitaryGate};
use hopf_circuits::dsl::{CircuitDocument, Preset, UnitarySpec};
use hopf_circuits::hopf::HopfAlgebra;
use num_complex::Complex64 as C64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::StandardNormal;

pub const MAX_WIRES: usize = 4;
pub const MAX_LAYERS: usize = 5;

pub fn shipped(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("circuits").join(name)
}

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gram-Schmidt on the columns of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    (0..d).map(|r| (0..d).map(|c| cols[c][r]).collect()).collect()
}

/// A valid circuit over `algebra` with at most `MAX_WIRES` at every boundary
/// and at most `MAX_LAYERS` layers.
pub fn random_circuit<R: Rng>(rng: &mut R, algebra: Arc<HopfAlgebra>) -> Circuit {
    let d = algebra.dim();
    let wires_in = rng.random_range(1..=MAX_WIRES);
    let n_layers = rng.random_range(1..=MAX_LAYERS);
    let mut wires = wires_in;
    let mut layers: Vec<Layer> = Vec::new();
    let mut next_name = 0;
    for _ in 0..n_layers {
        let mut layer = Vec::new();
        let mut left = wires;
        let mut out = 0;
        while left > 0 || layer.is_empty() {
            let room = MAX_WIRES - out;
            let mut choices: Vec<Primitive> = Vec::new();
            if left >= 1 {
                choices.extend([Primitive::Id, Primitive::Antipode, Primitive::Counit]);
                let name = format!("u{next_name}");
                choices.push(Primitive::Unitary(
                    UnitaryGate::from_rows(name, &random_unitary(rng, d)).expect("unitary"),
                ));
                if room > left {
                    choices.push(Primitive::Comul);
                }
            }
            if left >= 2 {
                choices.extend([Primitive::Mul, Primitive::Swap]);
            }
            if room > left && rng.random_bool(0.15) {
                choices.push(Primitive::Unit);
            }
            let Some(p) = choices.choose(rng).cloned() else {
                break;
            };
            if matches!(p, Primitive::Unitary(_)) {
                next_name += 1;
            }
            let (i, o) = p.arity();
            left -= i;
            out += o;
            layer.push(p);
        }
        if layer.is_empty() {
            break;
        }
        layers.push(layer);
        wires = out;
        if wires == 0 {
            break;
        }
    }
    Circuit::new(algebra, wires_in, layers).expect("generator builds valid circuits")
}

/// A random document: a random circuit written out, with some of its
/// unitaries replaced by presets when the algebra is Z2.
pub fn random_document<R: Rng>(rng: &mut R) -> CircuitDocument {
    let (name, algebra) = if rng.random_bool(0.5) {
        ("Z2", HopfAlgebra::z2())
    } else {
        ("Z3", HopfAlgebra::cyclic(3).unwrap())
    };
    let circ = random_circuit(rng, Arc::new(algebra));
    let mut specs = HashMap::new();
    if name == "Z2" {
        for layer in circ.layers() {
            for p in layer {
                if let Primitive::Unitary(u) = p {
                    if rng.random_bool(0.5) {
                        let preset = match rng.random_range(0..10) {
                            0 => Preset::I,
                            1 => Preset::X,
                            2 => Preset::Y,
                            3 => Preset::Z,
                            4 => Preset::H,
                            5 => Preset::SPhase,
                            6 => Preset::T,
                            7 => Preset::Rx(rng.random_range(-10.0..10.0)),
                            8 => Preset::Ry(rng.random_range(-10.0..10.0)),
                            _ => Preset::Rz(rng.random_range(-10.0..10.0)),
                        };
                        specs.insert(u.name().to_string(), UnitarySpec::Preset(preset));
                    }
                }
            }
        }
    }
    CircuitDocument::from_circuit(&circ, name, &specs)
}

pub fn random_gate_list<R: Rng>(rng: &mut R, max_wires: usize, max_gates: usize) -> (usize, Vec<Gate>) {
    let wires = rng.random_range(2..=max_wires);
    let n = rng.random_range(1..=max_gates);
    let mut gates = Vec::with_capacity(n);
    for k in 0..n {
        if rng.random_bool(0.5) {
            let control = rng.random_range(0..wires);
            let mut target = rng.random_range(0..wires - 1);
            if target >= control {
                target += 1;
            }
            gates.push(Gate::Cnot { control, target });
        } else {
            let gate = UnitaryGate::from_rows(format!("g{k}"), &random_unitary(rng, 2)).expect("unitary");
            gates.push(Gate::U1 {
                wire: rng.random_range(0..wires),
                gate,
            });
        }
    }
    (wires, gates)
}

pub type Dense = Vec<Vec<C64>>;

pub fn dense_identity(n: usize) -> Dense {
    (0..n)
        .map(|r| (0..n).map(|c| C64::new(if r == c { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn dense_kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![C64::new(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let n = b[0].len();
    a.iter()
        .map(|row| {
            (0..n)
                .map(|c| row.iter().zip(b).map(|(x, brow)| x * brow[c]).sum())
                .collect()
        })
        .collect()
}

/// The qubit gate list as an explicit product of full-width matrices.
/// Single-qubit gates are Kronecker-padded; CNOT is the permutation that
/// XORs the control bit into the target bit, wire 0 most significant.
pub fn kron_oracle(wires: usize, gates: &[Gate]) -> Dense {
    let n = 1 << wires;
    let mut total = dense_identity(n);
    for g in gates {
        let full = match g {
            Gate::Cnot { control, target } => {
                let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
                for col in 0..n {
                    let cbit = (col >> (wires - 1 - control)) & 1;
                    m[col ^ (cbit << (wires - 1 - target))][col] = C64::new(1.0, 0.0);
                }
                m
            }
            Gate::U1 { wire, gate } => {
                let left = dense_identity(1 << wire);
                let right = dense_identity(1 << (wires - 1 - wire));
                dense_kron(&dense_kron(&left, &gate.rows()), &right)
            }
        };
        total = dense_mul(&full, &total);
    }
    total
}

pub fn max_gap(map: &hopf_circuits::tensor::LinearMap, dense: &Dense) -> f64 {
    let mut worst: f64 = 0.0;
    for (r, row) in dense.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            worst = worst.max((map.entry(r, c) - z).norm());
        }
    }
    worst
}
