//! Complex feedforward networks and their exact closure algebra.
//!
//! A network with `L` hidden layers is a list of affine maps
//! `(A_0, b_0), …, (A_L, b_L)`; hidden layers apply the activation
//! componentwise and the last map is the linear readout.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::complexcore::ActivationSpec;
use crate::{Error, Result, Scalar, C64};

/// Row-compressed complex matrix. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), vals: Vec::new() }
    }

    /// Builds from row-major dense data.
    pub fn from_dense(rows: usize, cols: usize, data: &[Complex<T>]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self::from_rows(rows, cols, (0..rows).map(|i| {
            data[i * cols..(i + 1) * cols].iter().copied().enumerate().collect::<Vec<_>>()
        })))
    }

    /// Builds from per-row `(column, value)` lists with increasing columns.
    pub fn from_rows<I, R>(rows: usize, cols: usize, it: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = (usize, Complex<T>)>,
    {
        let mut m = Self::zeros(0, cols);
        m.row_ptr = vec![0];
        for row in it {
            for (j, v) in row {
                debug_assert!(j < cols);
                if !v.is_zero() {
                    m.col_idx.push(j);
                    m.vals.push(v);
                }
            }
            m.row_ptr.push(m.vals.len());
            m.rows += 1;
        }
        debug_assert_eq!(m.rows, rows);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.row(i).find(|&(c, _)| c == j).map_or_else(Complex::zero, |(_, v)| v)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.rows * self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                out[i * self.cols + j] = v;
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.row(i).fold(Complex::zero(), |acc, (j, v)| acc + v * x[j])).collect()
    }

    /// `self · other`.
    pub fn matmul(&self, other: &CMatrix<T>) -> Result<CMatrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut dense_row = vec![Complex::<T>::zero(); other.cols];
        let mut touched = vec![false; other.cols];
        let rows = (0..self.rows).map(|i| {
            let mut cols_hit = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols_hit.push(j);
                    }
                    dense_row[j] = dense_row[j] + a * b;
                }
            }
            cols_hit.sort_unstable();
            let out: Vec<_> = cols_hit
                .iter()
                .map(|&j| {
                    let v = dense_row[j];
                    dense_row[j] = Complex::zero();
                    touched[j] = false;
                    (j, v)
                })
                .collect();
            out
        });
        let rows: Vec<_> = rows.collect();
        Ok(CMatrix::from_rows(self.rows, other.cols, rows))
    }

    pub fn scaled(&self, alpha: Complex<T>) -> Self {
        let rows = (0..self.rows).map(|i| self.row(i).map(|(j, v)| (j, v * alpha)).collect::<Vec<_>>());
        CMatrix::from_rows(self.rows, self.cols, rows.collect::<Vec<_>>())
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let rows: Vec<Vec<_>> = (0..self.rows)
            .map(|i| self.row(i).collect())
            .chain((0..other.rows).map(|i| other.row(i).collect()))
            .collect();
        Ok(CMatrix::from_rows(self.rows + other.rows, self.cols, rows))
    }

    /// `(self | other)`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let rows: Vec<Vec<_>> = (0..self.rows)
            .map(|i| self.row(i).chain(other.row(i).map(|(j, v)| (j + self.cols, v))).collect())
            .collect();
        Ok(CMatrix::from_rows(self.rows, self.cols + other.cols, rows))
    }

    /// `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let rows: Vec<Vec<_>> = (0..self.rows)
            .map(|i| self.row(i).collect())
            .chain((0..other.rows).map(|i| other.row(i).map(|(j, v)| (j + self.cols, v)).collect()))
            .collect();
        CMatrix::from_rows(self.rows + other.rows, self.cols + other.cols, rows)
    }

    fn map_scalar<U: Scalar>(&self, f: impl Fn(T) -> U) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            vals: self.vals.iter().map(|v| Complex::new(f(v.re), f(v.im))).collect(),
        }
    }
}

/// One affine map `z ↦ A z + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T> {
    pub a: CMatrix<T>,
    pub b: Vec<Complex<T>>,
}

impl<T: Scalar> Layer<T> {
    pub fn new(a: CMatrix<T>, b: Vec<Complex<T>>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        Ok(Self { a, b })
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = self.a.mul_vec(x);
        for (yi, bi) in y.iter_mut().zip(&self.b) {
            *yi = *yi + *bi;
        }
        y
    }
}

/// Weights `((A_0, b_0), …, (A_L, b_L))` of a network with `L ≥ 1` hidden
/// layers, input dimension `d` and scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights<T> {
    input_dim: usize,
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> NetworkWeights<T> {
    /// Validates shapes: `N_0 = d`, `N_{L+1} = 1`, consecutive layers chain.
    pub fn new(input_dim: usize, layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidArgument("a network needs at least one hidden layer".into()));
        }
        let mut width = input_dim;
        for layer in &layers {
            if layer.a.cols() != width {
                return Err(Error::DimensionMismatch { expected: width, found: layer.a.cols() });
            }
            width = layer.a.rows();
        }
        if width != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: width });
        }
        Ok(Self { input_dim, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Number of hidden layers `L`.
    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    /// Widths `N_1, …, N_L` of the hidden layers.
    pub fn widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.b.len()).collect()
    }

    pub fn total_neurons(&self) -> usize {
        self.widths().iter().sum()
    }

    /// Evaluates the network function at `z`.
    pub fn eval(&self, sigma: &ActivationSpec, z: &[Complex<T>]) -> Result<Complex<T>> {
        if z.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: z.len() });
        }
        let (last, hidden) = self.layers.split_last().expect("validated non-empty");
        let mut x = z.to_vec();
        for layer in hidden {
            x = layer.apply(&x);
            for v in x.iter_mut() {
                *v = sigma.eval_t(*v)?;
            }
        }
        Ok(last.apply(&x)[0])
    }

    /// Converts every weight to another precision.
    pub fn cast<U: Scalar>(&self) -> NetworkWeights<U> {
        let f = |x: T| U::from(x).expect("representable");
        NetworkWeights {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .map(|l| Layer { a: l.a.map_scalar(f), b: l.b.iter().map(|v| Complex::new(f(v.re), f(v.im))).collect() })
                .collect(),
        }
    }
}

/// Free-function form of [`NetworkWeights::eval`].
pub fn eval_network<T: Scalar>(theta: &NetworkWeights<T>, sigma: &ActivationSpec, z: &[Complex<T>]) -> Result<Complex<T>> {
    theta.eval(sigma, z)
}

/// `α Φ + β Ψ` for networks of equal input dimension and depth.
pub fn linear_combine<T: Scalar>(
    t1: &NetworkWeights<T>,
    t2: &NetworkWeights<T>,
    alpha: Complex<T>,
    beta: Complex<T>,
) -> Result<NetworkWeights<T>> {
    if t1.input_dim != t2.input_dim {
        return Err(Error::DimensionMismatch { expected: t1.input_dim, found: t2.input_dim });
    }
    if t1.hidden_layers() != t2.hidden_layers() {
        return Err(Error::DepthMismatch { left: t1.hidden_layers(), right: t2.hidden_layers() });
    }
    let depth = t1.hidden_layers();
    let mut layers = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let (p, q) = (&t1.layers[j], &t2.layers[j]);
        let layer = if j == depth {
            let a = p.a.scaled(alpha).hstack(&q.a.scaled(beta))?;
            Layer::new(a, vec![alpha * p.b[0] + beta * q.b[0]])?
        } else {
            let a = if j == 0 { p.a.vstack(&q.a)? } else { p.a.block_diag(&q.a) };
            Layer::new(a, p.b.iter().chain(&q.b).copied().collect())?
        };
        layers.push(layer);
    }
    NetworkWeights::new(t1.input_dim, layers)
}

/// `c + Σ_k α_k T_k` for networks of equal input dimension and depth, in
/// one pass.
pub fn linear_combination<T: Scalar>(
    nets: &[&NetworkWeights<T>],
    alphas: &[Complex<T>],
    constant: Complex<T>,
) -> Result<NetworkWeights<T>> {
    let first = nets.first().ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
    if nets.len() != alphas.len() {
        return Err(Error::DimensionMismatch { expected: nets.len(), found: alphas.len() });
    }
    for t in nets {
        if t.input_dim != first.input_dim {
            return Err(Error::DimensionMismatch { expected: first.input_dim, found: t.input_dim });
        }
        if t.hidden_layers() != first.hidden_layers() {
            return Err(Error::DepthMismatch { left: first.hidden_layers(), right: t.hidden_layers() });
        }
    }
    let depth = first.hidden_layers();
    let mut layers = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let mut rows: Vec<Vec<(usize, Complex<T>)>> = Vec::new();
        let mut b = Vec::new();
        let mut offset = 0;
        if j == depth {
            let mut row = Vec::new();
            let mut bias = constant;
            for (t, &a) in nets.iter().zip(alphas) {
                let l = &t.layers[j];
                row.extend(l.a.row(0).map(|(c, v)| (c + offset, v * a)));
                bias = bias + l.b[0] * a;
                offset += l.a.cols();
            }
            rows.push(row);
            b.push(bias);
        } else {
            for t in nets {
                let l = &t.layers[j];
                let shift = if j == 0 { 0 } else { offset };
                rows.extend((0..l.a.rows()).map(|i| l.a.row(i).map(|(c, v)| (c + shift, v)).collect::<Vec<_>>()));
                b.extend_from_slice(&l.b);
                offset += l.a.cols();
            }
        }
        let cols = if j == 0 { first.input_dim } else { offset };
        layers.push(Layer::new(CMatrix::from_rows(rows.len(), cols, rows), b)?);
    }
    NetworkWeights::new(first.input_dim, layers)
}

/// `outer ∘ inner`, with `outer` of input dimension 1. The last affine map
/// of `inner` and the first of `outer` merge into one, so the depth adds.
pub fn compose<T: Scalar>(outer: &NetworkWeights<T>, inner: &NetworkWeights<T>) -> Result<NetworkWeights<T>> {
    if outer.input_dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: outer.input_dim });
    }
    let (inner_last, inner_hidden) = inner.layers.split_last().expect("non-empty");
    let (outer_first, outer_rest) = outer.layers.split_first().expect("non-empty");
    let merged_a = outer_first.a.matmul(&inner_last.a)?;
    let merged_b: Vec<Complex<T>> = outer_first
        .b
        .iter()
        .zip(outer_first.a.mul_vec(&inner_last.b))
        .map(|(&c0, ab)| c0 + ab)
        .collect();
    let mut layers: Vec<Layer<T>> = inner_hidden.to_vec();
    layers.push(Layer::new(merged_a, merged_b)?);
    layers.extend(outer_rest.iter().cloned());
    NetworkWeights::new(inner.input_dim, layers)
}

/// `z ↦ Φ(b + aᵀz)` on `ℂ^d` for a network `Φ` of input dimension 1.
pub fn lift_affine<T: Scalar>(t: &NetworkWeights<T>, a: &[Complex<T>], b: Complex<T>) -> Result<NetworkWeights<T>> {
    if t.input_dim != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: t.input_dim });
    }
    let first = &t.layers[0];
    let col: Vec<Complex<T>> = (0..first.a.rows()).map(|i| first.a.get(i, 0)).collect();
    let rows: Vec<Vec<_>> = col.iter().map(|&c| a.iter().copied().map(|aj| c * aj).enumerate().collect()).collect();
    let new_a = CMatrix::from_rows(col.len(), a.len(), rows);
    let new_b = first.b.iter().zip(&col).map(|(&b0, &c)| b0 + c * b).collect();
    let mut layers = vec![Layer::new(new_a, new_b)?];
    layers.extend(t.layers[1..].iter().cloned());
    NetworkWeights::new(a.len(), layers)
}

/// `z ↦ Φ(b + z·a)` on `ℂ` for a network `Φ` on `ℂ^d`.
pub fn restrict_line<T: Scalar>(t: &NetworkWeights<T>, a: &[Complex<T>], b: &[Complex<T>]) -> Result<NetworkWeights<T>> {
    if a.len() != t.input_dim {
        return Err(Error::DimensionMismatch { expected: t.input_dim, found: a.len() });
    }
    if b.len() != t.input_dim {
        return Err(Error::DimensionMismatch { expected: t.input_dim, found: b.len() });
    }
    let first = &t.layers[0];
    let aa = first.a.mul_vec(a);
    let ab = first.a.mul_vec(b);
    let new_a = CMatrix::from_rows(aa.len(), 1, aa.iter().map(|&v| vec![(0, v)]).collect::<Vec<_>>());
    let new_b = first.b.iter().zip(ab).map(|(&b0, v)| b0 + v).collect();
    let mut layers = vec![Layer::new(new_a, new_b)?];
    layers.extend(t.layers[1..].iter().cloned());
    NetworkWeights::new(1, layers)
}

/// One neuron `a σ(b + wᵀz)` of a shallow network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowTerm<T> {
    pub coefficient: Complex<T>,
    pub weights: Vec<Complex<T>>,
    pub bias: Complex<T>,
}

/// `z ↦ c + Σ_j a_j σ(b_j + w_jᵀz)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowNetwork<T> {
    pub input_dim: usize,
    pub constant: Complex<T>,
    pub terms: Vec<ShallowTerm<T>>,
}

impl<T: Scalar> ShallowNetwork<T> {
    pub fn constant(input_dim: usize, c: Complex<T>) -> Self {
        Self { input_dim, constant: c, terms: Vec::new() }
    }

    pub fn push(&mut self, coefficient: Complex<T>, weights: Vec<Complex<T>>, bias: Complex<T>) {
        debug_assert_eq!(weights.len(), self.input_dim);
        self.terms.push(ShallowTerm { coefficient, weights, bias });
    }

    pub fn eval(&self, sigma: &ActivationSpec, z: &[Complex<T>]) -> Result<Complex<T>> {
        if z.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: z.len() });
        }
        let mut acc = self.constant;
        for t in &self.terms {
            let pre = t.weights.iter().zip(z).fold(t.bias, |s, (&w, &x)| s + w * x);
            acc = acc + t.coefficient * sigma.eval_t(pre)?;
        }
        Ok(acc)
    }

    /// `α·self + β·other` as a concatenation of terms.
    pub fn combined(&self, other: &Self, alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        if self.input_dim != other.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: other.input_dim });
        }
        let mut out = Self::constant(self.input_dim, alpha * self.constant + beta * other.constant);
        for (s, t) in [(alpha, self), (beta, other)] {
            for term in &t.terms {
                out.push(s * term.coefficient, term.weights.clone(), term.bias);
            }
        }
        Ok(out)
    }

    /// Substitutes `z ↦ (z − center)/scale` coordinatewise.
    pub fn rescaled_input(&self, center: &[Complex<T>], scale: T) -> Self {
        let mut out = Self::constant(self.input_dim, self.constant);
        for t in &self.terms {
            let w: Vec<Complex<T>> = t.weights.iter().map(|&w| w / scale).collect();
            let shift = w.iter().zip(center).fold(Complex::zero(), |s: Complex<T>, (&wi, &ci)| s + wi * ci);
            out.push(t.coefficient, w, t.bias - shift);
        }
        out
    }

    /// Merges terms with bit-identical weights and bias, keeping first
    /// appearance order, and drops zero coefficients.
    pub fn merged(&self) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut out = Self::constant(self.input_dim, self.constant);
        for t in &self.terms {
            let key: Vec<u64> = t
                .weights
                .iter()
                .chain(std::iter::once(&t.bias))
                .flat_map(|v| [bits(v.re), bits(v.im)])
                .collect();
            match index.get(&key) {
                Some(&k) => {
                    let term: &mut ShallowTerm<T> = &mut out.terms[k];
                    term.coefficient = term.coefficient + t.coefficient;
                }
                None => {
                    index.insert(key, out.terms.len());
                    out.terms.push(t.clone());
                }
            }
        }
        out.terms.retain(|t| !t.coefficient.is_zero());
        out
    }

    /// Equivalent network with `L = 1`; the constant goes into the output
    /// bias. An empty network gets one neuron with zero readout.
    pub fn to_network(&self) -> NetworkWeights<T> {
        let d = self.input_dim;
        let terms: Vec<ShallowTerm<T>> = if self.terms.is_empty() {
            vec![ShallowTerm { coefficient: Complex::zero(), weights: vec![Complex::zero(); d], bias: Complex::zero() }]
        } else {
            self.terms.clone()
        };
        let a0 = CMatrix::from_rows(
            terms.len(),
            d,
            terms.iter().map(|t| t.weights.iter().copied().enumerate().collect::<Vec<_>>()).collect::<Vec<_>>(),
        );
        let b0 = terms.iter().map(|t| t.bias).collect();
        let a1 = CMatrix::from_rows(1, terms.len(), vec![terms.iter().map(|t| t.coefficient).enumerate().collect::<Vec<_>>()]);
        NetworkWeights::new(d, vec![Layer { a: a0, b: b0 }, Layer { a: a1, b: vec![self.constant] }])
            .expect("shallow shapes are consistent")
    }
}

fn bits<T: Scalar>(x: T) -> u64 {
    x.to_f64().unwrap_or(f64::NAN).to_bits()
}

/// Free-function form of [`ShallowNetwork::eval`].
pub fn eval_shallow<T: Scalar>(s: &ShallowNetwork<T>, sigma: &ActivationSpec, z: &[Complex<T>]) -> Result<Complex<T>> {
    s.eval(sigma, z)
}

/// Single-neuron network `z ↦ σ(z)` on `ℂ`.
pub fn pass_through<T: Scalar>() -> NetworkWeights<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut s = ShallowNetwork::constant(1, Complex::zero());
    s.push(one, vec![one], Complex::zero());
    s.to_network()
}

/// Current version of the JSON network document.
pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    b: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    format: String,
    version: u32,
    d: usize,
    #[serde(rename = "L")]
    l: usize,
    layers: Vec<LayerDoc>,
}

fn pair(v: C64) -> [f64; 2] {
    [v.re, v.im]
}

impl NetworkWeights<f64> {
    /// Versioned JSON document with dense matrices; doubles round-trip
    /// bit-exactly.
    pub fn to_json(&self) -> String {
        let doc = NetworkDoc {
            format: "cvnn-network".into(),
            version: NETWORK_FORMAT_VERSION,
            d: self.input_dim,
            l: self.hidden_layers(),
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    let dense = layer.a.to_dense();
                    LayerDoc {
                        a: dense.chunks(layer.a.cols().max(1)).take(layer.a.rows()).map(|r| r.iter().copied().map(pair).collect()).collect(),
                        b: layer.b.iter().copied().map(pair).collect(),
                    }
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("network documents serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if doc.version != NETWORK_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported network format version {}", doc.version)));
        }
        let mut width = doc.d;
        let mut layers = Vec::with_capacity(doc.layers.len());
        for layer in doc.layers {
            let rows = layer.a.len();
            let mut data = Vec::with_capacity(rows * width);
            for row in &layer.a {
                if row.len() != width {
                    return Err(Error::Format(format!("matrix row of length {} where {width} expected", row.len())));
                }
                data.extend(row.iter().map(|p| C64::new(p[0], p[1])));
            }
            let a = CMatrix::from_dense(rows, width, &data)?;
            let b = layer.b.iter().map(|p| C64::new(p[0], p[1])).collect();
            layers.push(Layer::new(a, b)?);
            width = rows;
        }
        let net = NetworkWeights::new(doc.d, layers)?;
        if net.hidden_layers() != doc.l {
            return Err(Error::Format(format!("declared L = {} but found {}", doc.l, net.hidden_layers())));
        }
        Ok(net)
    }
}
