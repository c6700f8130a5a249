//! Dense complex multi-index tensors and the linear maps built from them.
//!
//! Entries are stored row-major: the leftmost axis varies slowest. When a
//! tensor is read as a map on wires, wire 0 is the leftmost tensor factor and
//! therefore the slowest-varying digit of a basis index.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for identities between structure tensors.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for comparing compiled circuits against direct simulation.
pub const CIRCUIT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("{len} entries given for dims {dims:?} ({expected} expected)")]
    EntryCount {
        dims: Vec<usize>,
        len: usize,
        expected: usize,
    },
    #[error("zero extent in dims {0:?}")]
    ZeroExtent(Vec<usize>),
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("axis {axis} out of range for tensor of order {order}")]
    AxisOutOfRange { axis: usize, order: usize },
    #[error("duplicate axis {0}")]
    DuplicateAxis(usize),
    #[error("contracted axis lists differ in length ({0} vs {1})")]
    AxisListLength(usize, usize),
    #[error("extent mismatch: {0} vs {1}")]
    ExtentMismatch(usize, usize),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("tensor with dims {dims:?} is not a map of {wires_out} <- {wires_in} wires at d={base_dim}")]
    NotAMap {
        dims: Vec<usize>,
        base_dim: usize,
        wires_out: usize,
        wires_in: usize,
    },
    #[error("cannot compose: {0}")]
    Compose(String),
    #[error("vector length {got} does not match map input dimension {expected}")]
    VectorLength { got: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// A dense complex tensor with an explicit list of extents.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<C64>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(TensorError::ZeroExtent(dims));
        }
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(TensorError::EntryCount {
                len: data.len(),
                dims,
                expected,
            });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TensorError::NonFinite(k));
        }
        Ok(Self { dims, data })
    }

    pub fn from_real(dims: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(dims, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        assert!(!dims.contains(&0), "zero extent");
        Self {
            dims,
            data: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// An order-0 tensor.
    pub fn scalar(z: C64) -> Self {
        Self {
            dims: Vec::new(),
            data: vec![z],
        }
    }

    /// The standard basis vector `e_index` of length `dim`.
    pub fn basis_vector(dim: usize, index: usize) -> Self {
        let mut t = Self::zeros(vec![dim]);
        t.data[index] = C64::new(1.0, 0.0);
        t
    }

    pub fn identity_matrix(n: usize) -> Self {
        let mut t = Self::zeros(vec![n, n]);
        for i in 0..n {
            t.data[i * n + i] = C64::new(1.0, 0.0);
        }
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.dims.len(), "index order mismatch");
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| {
            assert!(i < n, "index {i} out of range for extent {n}");
            acc * n + i
        })
    }

    /// Entry at a multi-index. Panics if the index is malformed.
    pub fn get(&self, index: &[usize]) -> C64 {
        self.data[self.flat_index(index)]
    }

    pub fn set(&mut self, index: &[usize], value: C64) {
        let k = self.flat_index(index);
        self.data[k] = value;
    }

    /// Same entries under new extents with an equal total size.
    pub fn reshape(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.data.clone())
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> Option<f64> {
        if self.dims != other.dims {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn to_json(&self) -> TensorJson {
        TensorJson {
            dims: self.dims.clone(),
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_json(json: &TensorJson) -> Result<Self> {
        if json.re.len() != json.im.len() {
            return Err(TensorError::EntryCount {
                dims: json.dims.clone(),
                len: json.im.len(),
                expected: json.re.len(),
            });
        }
        let data = json.re.iter().zip(&json.im).map(|(&r, &i)| C64::new(r, i)).collect();
        Self::new(json.dims.clone(), data)
    }
}

/// Debug export of a tensor: dims plus row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Outer product; the axes of `a` come first.
pub fn tensor_product(a: &Tensor, b: &Tensor) -> Tensor {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut data = Vec::with_capacity(a.len() * b.len());
    for x in &a.data {
        data.extend(b.data.iter().map(|y| x * y));
    }
    Tensor { dims, data }
}

fn check_axes(axes: &[usize], order: usize) -> Result<()> {
    let mut seen = vec![false; order];
    for &ax in axes {
        if ax >= order {
            return Err(TensorError::AxisOutOfRange { axis: ax, order });
        }
        if seen[ax] {
            return Err(TensorError::DuplicateAxis(ax));
        }
        seen[ax] = true;
    }
    Ok(())
}

/// Sum over paired axes of `a` and `b`. The result carries the free axes of
/// `a` followed by the free axes of `b`, each in their original order.
pub fn contract(a: &Tensor, axes_a: &[usize], b: &Tensor, axes_b: &[usize]) -> Result<Tensor> {
    if axes_a.len() != axes_b.len() {
        return Err(TensorError::AxisListLength(axes_a.len(), axes_b.len()));
    }
    check_axes(axes_a, a.order())?;
    check_axes(axes_b, b.order())?;
    for (&i, &j) in axes_a.iter().zip(axes_b) {
        if a.dims[i] != b.dims[j] {
            return Err(TensorError::ExtentMismatch(a.dims[i], b.dims[j]));
        }
    }

    let free_a: Vec<usize> = (0..a.order()).filter(|k| !axes_a.contains(k)).collect();
    let free_b: Vec<usize> = (0..b.order()).filter(|k| !axes_b.contains(k)).collect();

    // Bring a to [free.., summed..] and b to [summed.., free..], then multiply
    // the two as matrices.
    let perm_a: Vec<usize> = free_a.iter().chain(axes_a).copied().collect();
    let perm_b: Vec<usize> = axes_b.iter().chain(&free_b).copied().collect();
    let pa = permute_axes(a, &perm_a)?;
    let pb = permute_axes(b, &perm_b)?;

    let rows: usize = free_a.iter().map(|&k| a.dims[k]).product();
    let inner: usize = axes_a.iter().map(|&k| a.dims[k]).product();
    let cols: usize = free_b.iter().map(|&k| b.dims[k]).product();

    let data = matmul(&pa.data, &pb.data, rows, inner, cols);
    let dims = free_a
        .iter()
        .map(|&k| a.dims[k])
        .chain(free_b.iter().map(|&k| b.dims[k]))
        .collect();
    Ok(Tensor { dims, data })
}

fn matmul(a: &[C64], b: &[C64], rows: usize, inner: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); rows * cols];
    for i in 0..rows {
        let row = &mut out[i * cols..(i + 1) * cols];
        for k in 0..inner {
            let x = a[i * inner + k];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, y) in row.iter_mut().zip(&b[k * cols..(k + 1) * cols]) {
                *o += x * y;
            }
        }
    }
    out
}

/// Reorder axes: axis `k` of the result is axis `perm[k]` of `t`.
pub fn permute_axes(t: &Tensor, perm: &[usize]) -> Result<Tensor> {
    let order = t.order();
    if perm.len() != order || check_axes(perm, order).is_err() {
        return Err(TensorError::InvalidPermutation(perm.to_vec()));
    }
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return Ok(t.clone());
    }
    let dims: Vec<usize> = perm.iter().map(|&p| t.dims[p]).collect();
    let src_strides = strides(&t.dims);
    let step: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();

    let mut data = Vec::with_capacity(t.len());
    let mut idx = vec![0usize; order];
    let mut src = 0usize;
    for _ in 0..t.len() {
        data.push(t.data[src]);
        // odometer increment over the destination index
        for k in (0..order).rev() {
            idx[k] += 1;
            src += step[k];
            if idx[k] < dims[k] {
                break;
            }
            src -= step[k] * dims[k];
            idx[k] = 0;
        }
    }
    Ok(Tensor { dims, data })
}

/// Inverse of a permutation given in `permute_axes` form.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Entry-wise comparison. Mismatched dims compare unequal.
pub fn allclose(a: &Tensor, b: &Tensor, tol: f64) -> bool {
    a.max_abs_diff(b).is_some_and(|d| d <= tol)
}

/// A linear map between tensor powers of a `base_dim`-dimensional space,
/// stored as a `d^wires_out x d^wires_in` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    base_dim: usize,
    wires_in: usize,
    wires_out: usize,
    matrix: Tensor,
}

/// JSON form of a linear map, with one nested array per matrix row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMapJson {
    pub d: usize,
    pub wires_in: usize,
    pub wires_out: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

fn checked_pow(d: usize, n: usize) -> usize {
    u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .expect("dimension overflow")
}

/// Reshape a tensor whose first `wires_out` axes are outputs and remaining
/// `wires_in` axes are inputs, all of extent `base_dim`, into a matrix.
pub fn as_linear_map(t: &Tensor, base_dim: usize, wires_out: usize, wires_in: usize) -> Result<LinearMap> {
    if base_dim == 0 || t.order() != wires_out + wires_in || t.dims.iter().any(|&n| n != base_dim) {
        return Err(TensorError::NotAMap {
            dims: t.dims.clone(),
            base_dim,
            wires_out,
            wires_in,
        });
    }
    let rows = checked_pow(base_dim, wires_out);
    let cols = checked_pow(base_dim, wires_in);
    Ok(LinearMap {
        base_dim,
        wires_in,
        wires_out,
        matrix: Tensor {
            dims: vec![rows, cols],
            data: t.data.clone(),
        },
    })
}

/// Matrix product `f . g` (apply `g` first).
pub fn compose(f: &LinearMap, g: &LinearMap) -> Result<LinearMap> {
    if f.base_dim != g.base_dim {
        return Err(TensorError::Compose(format!(
            "base dimension {} vs {}",
            f.base_dim, g.base_dim
        )));
    }
    if f.wires_in != g.wires_out {
        return Err(TensorError::Compose(format!(
            "outer map takes {} wires, inner map yields {}",
            f.wires_in, g.wires_out
        )));
    }
    let (rows, inner, cols) = (f.rows(), f.cols(), g.cols());
    Ok(LinearMap {
        base_dim: f.base_dim,
        wires_in: g.wires_in,
        wires_out: f.wires_out,
        matrix: Tensor {
            dims: vec![rows, cols],
            data: matmul(&f.matrix.data, &g.matrix.data, rows, inner, cols),
        },
    })
}

/// Kronecker product of maps; `f` acts on the leftmost wires.
pub fn kron(f: &LinearMap, g: &LinearMap) -> Result<LinearMap> {
    if f.base_dim != g.base_dim {
        return Err(TensorError::Compose(format!(
            "base dimension {} vs {}",
            f.base_dim, g.base_dim
        )));
    }
    let (r1, c1, r2, c2) = (f.rows(), f.cols(), g.rows(), g.cols());
    let rows = r1 * r2;
    let cols = c1 * c2;
    let mut data = vec![C64::new(0.0, 0.0); rows * cols];
    for i1 in 0..r1 {
        for j1 in 0..c1 {
            let x = f.matrix.data[i1 * c1 + j1];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for i2 in 0..r2 {
                let row = (i1 * r2 + i2) * cols + j1 * c2;
                for j2 in 0..c2 {
                    data[row + j2] = x * g.matrix.data[i2 * c2 + j2];
                }
            }
        }
    }
    Ok(LinearMap {
        base_dim: f.base_dim,
        wires_in: f.wires_in + g.wires_in,
        wires_out: f.wires_out + g.wires_out,
        matrix: Tensor {
            dims: vec![rows, cols],
            data,
        },
    })
}

impl LinearMap {
    pub fn identity(base_dim: usize, wires: usize) -> Self {
        let n = checked_pow(base_dim, wires);
        Self {
            base_dim,
            wires_in: wires,
            wires_out: wires,
            matrix: Tensor::identity_matrix(n),
        }
    }

    /// Build from a row-major `d^wires_out x d^wires_in` entry list.
    pub fn from_matrix(base_dim: usize, wires_out: usize, wires_in: usize, data: Vec<C64>) -> Result<Self> {
        let rows = checked_pow(base_dim, wires_out);
        let cols = checked_pow(base_dim, wires_in);
        let matrix = Tensor::new(vec![rows, cols], data)?;
        Ok(Self {
            base_dim,
            wires_in,
            wires_out,
            matrix,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn wires_in(&self) -> usize {
        self.wires_in
    }

    pub fn wires_out(&self) -> usize {
        self.wires_out
    }

    pub fn matrix(&self) -> &Tensor {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.dims[0]
    }

    pub fn cols(&self) -> usize {
        self.matrix.dims[1]
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix.data[row * self.cols() + col]
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.rows()).map(|r| self.entry(r, col)).collect()
    }

    /// Back to a tensor with one axis per wire, outputs first.
    pub fn to_tensor(&self) -> Tensor {
        Tensor {
            dims: vec![self.base_dim; self.wires_out + self.wires_in],
            data: self.matrix.data.clone(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        if state.len() != self.cols() {
            return Err(TensorError::VectorLength {
                got: state.len(),
                expected: self.cols(),
            });
        }
        Ok(matmul(&self.matrix.data, state, self.rows(), self.cols(), 1))
    }

    pub fn to_json(&self) -> LinearMapJson {
        let cols = self.cols();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            self.matrix.data.chunks(cols).map(|r| r.iter().map(f).collect()).collect()
        };
        LinearMapJson {
            d: self.base_dim,
            wires_in: self.wires_in,
            wires_out: self.wires_out,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn z2_mul() -> Tensor {
        let mut t = Tensor::zeros(vec![2, 2, 2]);
        for a in 0..2 {
            for b in 0..2 {
                t.set(&[a, b, a ^ b], c(1.0));
            }
        }
        t
    }

    fn z2_comul() -> Tensor {
        let mut t = Tensor::zeros(vec![2, 2, 2]);
        t.set(&[0, 0, 0], c(1.0));
        t.set(&[1, 1, 1], c(1.0));
        t
    }

    fn naive_contract(a: &Tensor, axes_a: &[usize], b: &Tensor, axes_b: &[usize]) -> Tensor {
        let free_a: Vec<usize> = (0..a.order()).filter(|k| !axes_a.contains(k)).collect();
        let free_b: Vec<usize> = (0..b.order()).filter(|k| !axes_b.contains(k)).collect();
        let dims: Vec<usize> = free_a
            .iter()
            .map(|&k| a.dims()[k])
            .chain(free_b.iter().map(|&k| b.dims()[k]))
            .collect();
        let summed: Vec<usize> = axes_a.iter().map(|&k| a.dims()[k]).collect();
        let mut out = Tensor::zeros(dims.clone());
        let total: usize = dims.iter().product();
        let inner: usize = summed.iter().product();
        for flat in 0..total {
            let idx = unflatten(flat, &dims);
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..inner {
                let sidx = unflatten(s, &summed);
                let mut ia = vec![0; a.order()];
                let mut ib = vec![0; b.order()];
                for (n, &k) in free_a.iter().enumerate() {
                    ia[k] = idx[n];
                }
                for (n, &k) in free_b.iter().enumerate() {
                    ib[k] = idx[free_a.len() + n];
                }
                for (n, (&ka, &kb)) in axes_a.iter().zip(axes_b).enumerate() {
                    ia[ka] = sidx[n];
                    ib[kb] = sidx[n];
                }
                acc += a.get(&ia) * b.get(&ib);
            }
            out.set(&idx, acc);
        }
        out
    }

    fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
        let mut idx = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            idx[k] = flat % dims[k];
            flat /= dims[k];
        }
        idx
    }

    fn arb_tensor(max_order: usize, max_extent: usize) -> impl Strategy<Value = Tensor> {
        prop::collection::vec(1..=max_extent, 0..=max_order).prop_flat_map(|dims| {
            let n: usize = dims.iter().product();
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
                Tensor::new(dims.clone(), v.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap()
            })
        })
    }

    #[test]
    fn scalar_unit_is_neutral_for_tensor_product() {
        let t = Tensor::from_real(vec![2, 3], &[1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(tensor_product(&Tensor::scalar(c(1.0)), &t), t);
    }

    #[test]
    fn basis_vectors_tensor_to_ket() {
        let t = tensor_product(&Tensor::basis_vector(2, 0), &Tensor::basis_vector(2, 1));
        assert_eq!(t.dims(), &[2, 2]);
        assert_eq!(t.data(), &[c(0.), c(1.), c(0.), c(0.)]);
        let ff = tensor_product(&Tensor::basis_vector(2, 0), &Tensor::basis_vector(2, 0));
        assert_eq!(ff.get(&[0, 0]), c(1.0));
    }

    #[test]
    fn cnot_from_comul_and_mul_contraction() {
        // comul axes (in, out_c, out_a), mul axes (a, in_t, out_t)
        let h = contract(&z2_comul(), &[2], &z2_mul(), &[0]).unwrap();
        // result axes (i_c, o_c, i_t, o_t)
        assert_eq!(h.dims(), &[2, 2, 2, 2]);
        let mut ones = Vec::new();
        for ic in 0..2 {
            for oc in 0..2 {
                for it in 0..2 {
                    for ot in 0..2 {
                        let v = h.get(&[ic, oc, it, ot]);
                        assert!(v == c(0.0) || v == c(1.0));
                        if v == c(1.0) {
                            ones.push(((ic, it), (oc, ot)));
                        }
                    }
                }
            }
        }
        ones.sort();
        assert_eq!(
            ones,
            vec![((0, 0), (0, 0)), ((0, 1), (0, 1)), ((1, 0), (1, 1)), ((1, 1), (1, 0))]
        );

        let reordered = permute_axes(&h, &[1, 3, 0, 2]).unwrap();
        let map = as_linear_map(&reordered, 2, 2, 2).unwrap();
        let mut expected = vec![c(0.0); 16];
        for (col, row) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            expected[row * 4 + col] = c(1.0);
        }
        assert_eq!(map.matrix().data(), &expected[..]);
    }

    #[test]
    fn contract_with_identity() {
        let v = Tensor::new(vec![3], vec![c(1.0), C64::new(0.5, -2.0), c(3.0)]).unwrap();
        let out = contract(&Tensor::identity_matrix(3), &[1], &v, &[0]).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn contract_errors() {
        let a = Tensor::zeros(vec![2, 3]);
        let b = Tensor::zeros(vec![2, 2]);
        assert_eq!(contract(&a, &[1], &b, &[0]), Err(TensorError::ExtentMismatch(3, 2)));
        assert_eq!(
            contract(&a, &[2], &b, &[0]),
            Err(TensorError::AxisOutOfRange { axis: 2, order: 2 })
        );
        assert_eq!(contract(&a, &[0, 0], &b, &[0, 1]), Err(TensorError::DuplicateAxis(0)));
        assert_eq!(contract(&a, &[0], &b, &[0, 1]), Err(TensorError::AxisListLength(1, 2)));
    }

    #[test]
    fn contract_random_222_matches_loops() {
        let a = Tensor::new(
            vec![2, 2, 2],
            (0..8).map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos())).collect(),
        )
        .unwrap();
        let b = Tensor::new(
            vec![2, 2, 2],
            (0..8).map(|k| C64::new((k as f64 * 0.91).cos(), (k as f64 * 0.21).sin())).collect(),
        )
        .unwrap();
        let fast = contract(&a, &[1], &b, &[2]).unwrap();
        let slow = naive_contract(&a, &[1], &b, &[2]);
        assert!(allclose(&fast, &slow, 1e-14));
    }

    #[test]
    fn swap_via_permutation() {
        let ket01 = tensor_product(&Tensor::basis_vector(2, 0), &Tensor::basis_vector(2, 1));
        let ket10 = tensor_product(&Tensor::basis_vector(2, 1), &Tensor::basis_vector(2, 0));
        assert_eq!(permute_axes(&ket01, &[1, 0]).unwrap(), ket10);
        assert_eq!(permute_axes(&ket01, &[0, 1]).unwrap(), ket01);
    }

    #[test]
    fn permutation_composition() {
        let t = Tensor::new(
            vec![2, 2, 2],
            (0..8).map(|k| C64::new(k as f64, -(k as f64) / 3.0)).collect(),
        )
        .unwrap();
        let twice = permute_axes(&permute_axes(&t, &[1, 2, 0]).unwrap(), &[1, 2, 0]).unwrap();
        let once = permute_axes(&t, &[2, 0, 1]).unwrap();
        assert_eq!(twice, once);
        // loop oracle: out[i,j,k] = t[idx] with out axis n = source axis perm[n]
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_eq!(once.get(&[i, j, k]), t.get(&[j, k, i]));
                }
            }
        }
    }

    #[test]
    fn invalid_permutations() {
        let t = Tensor::zeros(vec![2, 2]);
        assert!(permute_axes(&t, &[0, 0]).is_err());
        assert!(permute_axes(&t, &[0]).is_err());
        assert!(permute_axes(&t, &[0, 2]).is_err());
    }

    #[test]
    fn linear_map_shapes() {
        let id = as_linear_map(&Tensor::identity_matrix(2), 2, 1, 1).unwrap();
        assert_eq!(id, LinearMap::identity(2, 1));
        assert!(as_linear_map(&Tensor::zeros(vec![2, 3]), 2, 1, 1).is_err());
        assert!(as_linear_map(&Tensor::zeros(vec![2, 2]), 2, 1, 2).is_err());
        // column and row vectors
        let col = as_linear_map(&Tensor::basis_vector(2, 0), 2, 1, 0).unwrap();
        assert_eq!((col.rows(), col.cols()), (2, 1));
        let row = as_linear_map(&Tensor::basis_vector(2, 0), 2, 0, 1).unwrap();
        assert_eq!((row.rows(), row.cols()), (1, 2));
        let s = as_linear_map(&Tensor::scalar(c(2.0)), 2, 0, 0).unwrap();
        assert_eq!(compose(&row, &col).unwrap().entry(0, 0), c(1.0));
        assert_eq!(compose(&s, &row).unwrap().entry(0, 0), c(2.0));
    }

    #[test]
    fn compose_errors() {
        let a = LinearMap::identity(2, 1);
        let b = LinearMap::identity(2, 2);
        let c3 = LinearMap::identity(3, 1);
        assert!(compose(&a, &b).is_err());
        assert!(compose(&a, &c3).is_err());
        assert!(kron(&a, &c3).is_err());
    }

    #[test]
    fn allclose_cases() {
        let t = Tensor::from_real(vec![2], &[1.0, 2.0]).unwrap();
        assert!(allclose(&t, &t, 0.0));
        let u = Tensor::from_real(vec![2], &[1.0, 2.0 + 1e-9]).unwrap();
        assert!(!allclose(&t, &u, 1e-12));
        assert!(allclose(&t, &u, 1e-8));
        assert!(!allclose(&t, &Tensor::from_real(vec![2, 1], &[1.0, 2.0]).unwrap(), 1.0));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            Tensor::new(vec![2, 2], vec![c(0.0); 3]),
            Err(TensorError::EntryCount { .. })
        ));
        assert!(matches!(
            Tensor::new(vec![1], vec![C64::new(f64::NAN, 0.0)]),
            Err(TensorError::NonFinite(0))
        ));
        assert!(matches!(Tensor::new(vec![0], vec![]), Err(TensorError::ZeroExtent(_))));
        assert_eq!(Tensor::new(vec![], vec![c(3.0)]).unwrap().len(), 1);
    }

    #[test]
    fn json_roundtrip() {
        let t = Tensor::new(vec![2], vec![C64::new(1.0, -1.0), C64::new(0.25, 0.0)]).unwrap();
        let s = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(s, r#"{"dims":[2],"re":[1.0,0.25],"im":[-1.0,0.0]}"#);
        let back: TensorJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Tensor::from_json(&back).unwrap(), t);
    }

    fn arb_map(d: usize, wout: usize, win: usize) -> impl Strategy<Value = LinearMap> {
        let n = d.pow(wout as u32) * d.pow(win as u32);
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
            LinearMap::from_matrix(d, wout, win, v.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn tensor_product_associates(a in arb_tensor(2, 3), b in arb_tensor(2, 3), c in arb_tensor(2, 3)) {
            let left = tensor_product(&tensor_product(&a, &b), &c);
            let right = tensor_product(&a, &tensor_product(&b, &c));
            prop_assert_eq!(left.dims(), right.dims());
            // entries are products of the same three factors, but rounding
            // may differ with grouping
            prop_assert!(allclose(&left, &right, 1e-15));
        }

        #[test]
        fn contract_matches_loop_oracle(
            a in arb_tensor(4, 3),
            b in arb_tensor(4, 3),
            pairs in 0usize..3,
            seed in any::<u64>(),
        ) {
            // pick up to `pairs` compatible axis pairs deterministically from seed
            let mut axes_a = Vec::new();
            let mut axes_b = Vec::new();
            let mut s = seed;
            for _ in 0..pairs {
                let cand: Vec<(usize, usize)> = (0..a.order())
                    .filter(|i| !axes_a.contains(i))
                    .flat_map(|i| (0..b.order()).map(move |j| (i, j)))
                    .filter(|&(i, j)| !axes_b.contains(&j) && a.dims()[i] == b.dims()[j])
                    .collect();
                if cand.is_empty() { break; }
                let (i, j) = cand[(s % cand.len() as u64) as usize];
                s /= 7;
                axes_a.push(i);
                axes_b.push(j);
            }
            let fast = contract(&a, &axes_a, &b, &axes_b).unwrap();
            let slow = naive_contract(&a, &axes_a, &b, &axes_b);
            prop_assert!(allclose(&fast, &slow, 1e-13));
        }

        #[test]
        fn permutation_inverse_restores(t in arb_tensor(4, 3), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..t.order()).collect();
            let mut s = seed;
            for k in (1..perm.len()).rev() {
                perm.swap(k, (s % (k as u64 + 1)) as usize);
                s /= k as u64 + 1;
            }
            let p = permute_axes(&t, &perm).unwrap();
            prop_assert_eq!(permute_axes(&p, &inverse_permutation(&perm)).unwrap(), t);
        }

        #[test]
        fn reshape_roundtrip(t in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
            let t = Tensor::new(vec![2, 2, 2], t.into_iter().map(|(r, i)| C64::new(r, i)).collect()).unwrap();
            let m = as_linear_map(&t, 2, 1, 2).unwrap();
            prop_assert_eq!(m.to_tensor(), t);
        }

        #[test]
        fn identity_composition_is_exact(m in arb_map(2, 1, 2)) {
            prop_assert_eq!(compose(&LinearMap::identity(2, 1), &m).unwrap(), m.clone());
            prop_assert_eq!(compose(&m, &LinearMap::identity(2, 2)).unwrap(), m);
        }

        #[test]
        fn compose_associates(f in arb_map(2, 1, 2), g in arb_map(2, 2, 2), h in arb_map(2, 2, 1)) {
            let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
            let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
            prop_assert!(allclose(left.matrix(), right.matrix(), 1e-12));
        }
    }
}
