//! Numerical Wirtinger calculus.
//!
//! Mixed derivatives `∂^m ∂̄^ℓ` are obtained by expanding
//! `2^{-(m+ℓ)} (∂ₓ − i∂ᵧ)^m (∂ₓ + i∂ᵧ)^ℓ` into real partials `∂ₓ^a ∂ᵧ^b`,
//! each realised as a tensor product of one-dimensional central stencils.
//! All stencils of one jet share a single lattice of samples around the
//! base point.
//!
//! [`RingStencil`] is a second, better conditioned scheme for high orders:
//! it reads the `(m, ℓ)` Taylor coefficient off Fourier modes on concentric
//! circles and extrapolates over the squared radius.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::complexcore::{is_finite, ActivationSpec};
use crate::{lit, Error, Result, Scalar, C64};

/// Finite-difference weights for the `order`-th derivative at `x0` using
/// the given nodes (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Central stencil for the `order`-th derivative with formal accuracy
/// `accuracy` (even). Returns the half-width `P` and weights for offsets
/// `-P..=P` at unit step.
pub fn central_weights(order: usize, accuracy: usize) -> (usize, Vec<f64>) {
    if order == 0 {
        return (0, vec![1.0]);
    }
    let half = order.div_ceil(2) - 1 + accuracy / 2;
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64).collect();
    let w = fornberg_weights(0.0, &nodes, order);
    (half, w)
}

/// Coefficients of `X^a Y^b` (`a + b = m + ℓ`, indexed by `a`) in
/// `2^{-(m+ℓ)} (X − iY)^m (X + iY)^ℓ`.
pub fn wirtinger_expansion(m: usize, ell: usize) -> Vec<C64> {
    let mut poly = vec![C64::new(1.0, 0.0)];
    let mul = |poly: &mut Vec<C64>, y: C64| {
        let mut next = vec![C64::zero(); poly.len() + 1];
        for (a, &c) in poly.iter().enumerate() {
            // Index by the power of Y: (X + yY) raises the X power of the
            // existing term by one or the Y power by one.
            next[a] += c * 0.5;
            next[a + 1] += c * y * 0.5;
        }
        *poly = next;
    };
    for _ in 0..m {
        mul(&mut poly, C64::new(0.0, -1.0));
    }
    for _ in 0..ell {
        mul(&mut poly, C64::new(0.0, 1.0));
    }
    // poly is indexed by the power of Y; re-index by the power of X.
    poly.reverse();
    poly
}

/// Step-free lattice stencil for `∂^m ∂̄^ℓ`: offsets `(i, j)` meaning
/// `z0 + h·(i + i·j)` with complex weights, to be divided by `h^{m+ℓ}`.
pub fn wirtinger_stencil(m: usize, ell: usize, accuracy: usize) -> Vec<((i32, i32), C64)> {
    let k = m + ell;
    let expansion = wirtinger_expansion(m, ell);
    let mut acc: BTreeMap<(i32, i32), C64> = BTreeMap::new();
    for (a, &coef) in expansion.iter().enumerate() {
        if coef.norm() == 0.0 {
            continue;
        }
        let b = k - a;
        let (px, wx) = central_weights(a, accuracy);
        let (py, wy) = central_weights(b, accuracy);
        for (ix, &u) in wx.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            for (iy, &v) in wy.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let key = (ix as i32 - px as i32, iy as i32 - py as i32);
                *acc.entry(key).or_insert_with(C64::zero) += coef * (u * v);
            }
        }
    }
    acc.into_iter().filter(|(_, w)| w.norm() > 0.0).collect()
}

/// Step and accuracy of the lattice scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StencilConfig {
    /// Lattice step; `None` means `10⁻²·(1 + |z0|)`.
    pub step: Option<f64>,
    /// Formal order of accuracy of each one-dimensional stencil (even).
    pub accuracy: usize,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self { step: None, accuracy: 2 }
    }
}

impl StencilConfig {
    pub fn with_step(step: f64) -> Self {
        Self { step: Some(step), accuracy: 2 }
    }

    /// Step and accuracy balancing truncation against round-off for a
    /// derivative of total order `order` in double precision.
    pub fn for_order(order: usize) -> Self {
        let (step, accuracy) = match order {
            0..=2 => (5e-3, 4),
            3 => (0.03, 4),
            4 => (0.05, 4),
            5 => (0.08, 4),
            6 => (0.1, 4),
            7 => (0.12, 2),
            8 => (0.15, 2),
            _ => (0.3, 2),
        };
        Self { step: Some(step), accuracy }
    }

    /// Step actually used at `z0`.
    pub fn step_at(&self, z0: C64) -> f64 {
        self.step.unwrap_or(1e-2 * (1.0 + z0.norm()))
    }

    fn validate(&self, step: f64) -> Result<()> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("stencil step must be positive, got {step}")));
        }
        if self.accuracy < 2 || !self.accuracy.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "stencil accuracy must be even and at least 2, got {}",
                self.accuracy
            )));
        }
        Ok(())
    }
}

/// Lazily sampled lattice `z0 + h·(i + i·j)` around a base point.
pub struct Lattice<'f, T: Scalar, F: ?Sized> {
    f: &'f F,
    z0: Complex<T>,
    h: T,
    samples: HashMap<(i32, i32), Complex<T>>,
    max_abs: T,
}

impl<'f, T, F> Lattice<'f, T, F>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Result<Complex<T>> + ?Sized,
{
    pub fn new(f: &'f F, z0: Complex<T>, h: T) -> Self {
        Self { f, z0, h, samples: HashMap::new(), max_abs: T::zero() }
    }

    pub fn step(&self) -> T {
        self.h
    }

    /// Largest modulus among the samples taken so far.
    pub fn max_abs(&self) -> T {
        self.max_abs
    }

    pub fn sample(&mut self, i: i32, j: i32) -> Result<Complex<T>> {
        if let Some(&v) = self.samples.get(&(i, j)) {
            return Ok(v);
        }
        let z = self.z0 + Complex::new(self.h * lit(i as f64), self.h * lit(j as f64));
        let singular = || {
            let re = z.re.to_f64().unwrap_or(f64::NAN);
            let im = z.im.to_f64().unwrap_or(f64::NAN);
            Error::StencilSingularity { re, im }
        };
        let v = (self.f)(z).map_err(|_| singular())?;
        if !is_finite(v) {
            return Err(singular());
        }
        self.max_abs = self.max_abs.max(v.norm());
        self.samples.insert((i, j), v);
        Ok(v)
    }

    /// `(∂^m ∂̄^ℓ f)(z0)` with the given per-axis accuracy.
    pub fn derivative(&mut self, m: usize, ell: usize, accuracy: usize) -> Result<Complex<T>> {
        let stencil = wirtinger_stencil(m, ell, accuracy);
        let mut acc = Complex::<T>::zero();
        for ((i, j), w) in stencil {
            let s = self.sample(i, j)?;
            acc = acc + s * Complex::new(lit::<T>(w.re), lit::<T>(w.im));
        }
        Ok(acc / self.h.powi((m + ell) as i32))
    }
}

/// Table of mixed Wirtinger derivatives at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WirtingerJet<T: Scalar> {
    pub base_point: Complex<T>,
    pub max_dz: usize,
    pub max_dzbar: usize,
    pub step: T,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> WirtingerJet<T> {
    /// Entry `(∂^m ∂̄^ℓ f)(z0)`; `None` outside the computed orders.
    pub fn get(&self, m: usize, ell: usize) -> Option<Complex<T>> {
        (m <= self.max_dz && ell <= self.max_dzbar).then(|| self.values[m * (self.max_dzbar + 1) + ell])
    }

    /// Iterates over `((m, ℓ), value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Complex<T>)> + '_ {
        let w = self.max_dzbar + 1;
        self.values.iter().enumerate().map(move |(k, &v)| ((k / w, k % w), v))
    }
}

fn resolve_step<T: Scalar>(cfg: &StencilConfig, z0: Complex<T>) -> Result<T> {
    let z = C64::new(z0.re.to_f64().unwrap_or(f64::NAN), z0.im.to_f64().unwrap_or(f64::NAN));
    let h = cfg.step_at(z);
    cfg.validate(h)?;
    Ok(lit(h))
}

/// All entries `(∂^m ∂̄^ℓ f)(z0)` for `m ≤ max_dz`, `ℓ ≤ max_dzbar`.
pub fn wirtinger_jet<T, F>(
    f: &F,
    z0: Complex<T>,
    max_dz: usize,
    max_dzbar: usize,
    cfg: &StencilConfig,
) -> Result<WirtingerJet<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Result<Complex<T>> + ?Sized,
{
    let h = resolve_step(cfg, z0)?;
    let mut lattice = Lattice::new(f, z0, h);
    let mut values = Vec::with_capacity((max_dz + 1) * (max_dzbar + 1));
    for m in 0..=max_dz {
        for ell in 0..=max_dzbar {
            values.push(lattice.derivative(m, ell, cfg.accuracy)?);
        }
    }
    Ok(WirtingerJet { base_point: z0, max_dz, max_dzbar, step: h, values })
}

/// Single entry `(∂^m ∂̄^ℓ f)(z0)`.
pub fn wirtinger_derivative<T, F>(f: &F, z0: Complex<T>, m: usize, ell: usize, cfg: &StencilConfig) -> Result<Complex<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Result<Complex<T>> + ?Sized,
{
    let h = resolve_step(cfg, z0)?;
    Lattice::new(f, z0, h).derivative(m, ell, cfg.accuracy)
}

/// `(Δ^m f)(z0) = 4^m (∂^m ∂̄^m f)(z0)`.
pub fn laplacian_power<T, F>(f: &F, m: usize, z0: Complex<T>, cfg: &StencilConfig) -> Result<Complex<T>>
where
    T: Scalar,
    F: Fn(Complex<T>) -> Result<Complex<T>> + ?Sized,
{
    if m == 0 {
        return Err(Error::InvalidArgument("laplacian power must be at least 1".into()));
    }
    let d = wirtinger_derivative(f, z0, m, m, cfg)?;
    Ok(d * lit::<T>(4f64.powi(m as i32)))
}

/// Evaluation points and weights reading off `(∂^m ∂̄^ℓ g)(0)` from samples
/// of `g` on concentric circles.
///
/// For `g` real-analytic near 0 the average of `g(ρe^{iφ})e^{-inφ}` over a
/// circle, `n = m − ℓ`, equals `ρ^{|n|}` times a power series in `ρ²` whose
/// coefficient of order `min(m, ℓ)` is `c_{m,ℓ}`. Sampling `rings` circles at
/// Chebyshev-distributed `ρ²` and interpolating isolates that coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingStencil {
    pub m: usize,
    pub ell: usize,
    pub outer_radius: f64,
    pub rings: usize,
    pub nodes_per_ring: usize,
    terms: Vec<(C64, C64)>,
}

impl RingStencil {
    pub fn new(m: usize, ell: usize, outer_radius: f64, rings: usize, nodes_per_ring: usize) -> Result<Self> {
        let q = m.min(ell);
        if !(outer_radius > 0.0 && outer_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("ring radius must be positive, got {outer_radius}")));
        }
        if rings < q + 1 {
            return Err(Error::InvalidArgument(format!("({m}, {ell}) needs at least {} rings", q + 1)));
        }
        if nodes_per_ring <= m + ell {
            return Err(Error::InvalidArgument(format!(
                "({m}, {ell}) needs more than {} nodes per ring",
                m + ell
            )));
        }
        let n = m as i64 - ell as i64;
        let s_max = outer_radius * outer_radius;
        let s: Vec<f64> = (0..rings)
            .map(|j| s_max * (1.0 + (std::f64::consts::PI * (j as f64 + 0.5) / rings as f64).cos()) / 2.0)
            .collect();
        let lam = lagrange_coefficient(&s, q);
        let scale = factorial(m) * factorial(ell) / nodes_per_ring as f64;
        let mut terms = Vec::with_capacity(rings * nodes_per_ring);
        for (j, &sj) in s.iter().enumerate() {
            let rho = sj.sqrt();
            for k in 0..nodes_per_ring {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / nodes_per_ring as f64;
                let w = C64::from_polar(rho, phi);
                let coef = C64::from_polar(lam[j] * scale / rho.powi(n.unsigned_abs() as i32), -(n as f64) * phi);
                terms.push((w, coef));
            }
        }
        Ok(Self { m, ell, outer_radius, rings, nodes_per_ring, terms })
    }

    /// `min(m, ℓ) + 1 + extra_rings` rings of `2(m + ℓ) + 24` nodes.
    pub fn with_defaults(m: usize, ell: usize, outer_radius: f64, extra_rings: usize) -> Result<Self> {
        Self::new(m, ell, outer_radius, m.min(ell) + 1 + extra_rings, 2 * (m + ell) + 24)
    }

    /// `(w_k, c_k)` with `Σ c_k g(w_k) ≈ (∂^m ∂̄^ℓ g)(0)`.
    pub fn terms(&self) -> &[(C64, C64)] {
        &self.terms
    }

    /// Applies the stencil to `g` centred at `center`.
    pub fn apply<F>(&self, g: &F, center: C64) -> Result<C64>
    where
        F: Fn(C64) -> Result<C64> + ?Sized,
    {
        let mut acc = C64::zero();
        for &(w, c) in &self.terms {
            let z = center + w;
            let v = g(z).map_err(|_| Error::StencilSingularity { re: z.re, im: z.im })?;
            if !is_finite(v) {
                return Err(Error::StencilSingularity { re: z.re, im: z.im });
            }
            acc += c * v;
        }
        Ok(acc)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Weights `λ_j` with `Σ λ_j G(s_j)` equal to the `s^q` coefficient of the
/// polynomial interpolating `G` at the nodes.
fn lagrange_coefficient(s: &[f64], q: usize) -> Vec<f64> {
    s.iter()
        .enumerate()
        .map(|(j, &sj)| {
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for (i, &si) in s.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (k, &c) in poly.iter().enumerate() {
                    next[k] -= c * si;
                    next[k + 1] += c;
                }
                poly = next;
                denom *= sj - si;
            }
            poly.get(q).copied().unwrap_or(0.0) / denom
        })
        .collect()
}

/// Smooth bump `η_ε(z) = C ε⁻² exp(1/(|z/ε|² − 1))` with `C` fixed by the
/// midpoint quadrature so that the kernel has unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifierSpec {
    pub epsilon: f64,
    pub quadrature_points_per_axis: usize,
    pub normalization: f64,
}

fn unit_bump(u: C64) -> f64 {
    let r2 = u.norm_sqr();
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 / (r2 - 1.0)).exp()
    }
}

fn midpoint_offsets(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -1.0 + (2.0 * k as f64 + 1.0) / n as f64)
}

impl MollifierSpec {
    pub fn new(epsilon: f64, quadrature_points_per_axis: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("mollifier epsilon must be positive, got {epsilon}")));
        }
        if quadrature_points_per_axis < 2 {
            return Err(Error::InvalidArgument("mollifier quadrature needs at least 2 points per axis".into()));
        }
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), f64>>> = OnceLock::new();
        let key = (epsilon.to_bits(), quadrature_points_per_axis);
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        let normalization = *guard.entry(key).or_insert_with(|| {
            let n = quadrature_points_per_axis;
            let cell = (2.0 * epsilon / n as f64).powi(2);
            let mut mass = 0.0;
            for x in midpoint_offsets(n) {
                for y in midpoint_offsets(n) {
                    mass += unit_bump(C64::new(x, y)) * cell / (epsilon * epsilon);
                }
            }
            1.0 / mass
        });
        Ok(Self { epsilon, quadrature_points_per_axis, normalization })
    }

    /// Kernel value `η_ε(w)`.
    pub fn kernel(&self, w: C64) -> f64 {
        self.normalization / (self.epsilon * self.epsilon) * unit_bump(w / self.epsilon)
    }

    /// Quadrature nodes with non-zero weight: `(offset, weight)`.
    pub fn nodes(&self) -> Vec<(C64, f64)> {
        let n = self.quadrature_points_per_axis;
        let cell = (2.0 * self.epsilon / n as f64).powi(2);
        let mut out = Vec::new();
        for x in midpoint_offsets(n) {
            for y in midpoint_offsets(n) {
                let w = C64::new(x, y) * self.epsilon;
                let k = self.kernel(w);
                if k > 0.0 {
                    out.push((w, k * cell));
                }
            }
        }
        out
    }
}

/// Quadrature realisation of `η_ε ∗ σ`.
#[derive(Debug, Clone)]
pub struct Mollified {
    sigma: ActivationSpec,
    spec: MollifierSpec,
    nodes: Vec<(C64, f64)>,
}

impl Mollified {
    pub fn spec(&self) -> &MollifierSpec {
        &self.spec
    }

    /// `Σ_k ω_k σ(z − w_k)`; nodes where σ is singular are dropped and the
    /// remaining weights renormalised.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut acc = C64::zero();
        let mut mass = 0.0;
        for &(w, weight) in &self.nodes {
            if let Ok(v) = self.sigma.eval(z - w) {
                acc += v * weight;
                mass += weight;
            }
        }
        if mass <= 0.0 {
            return Err(Error::singular_at(z));
        }
        Ok(acc / mass)
    }
}

/// Mollifies `sigma` with the given kernel.
pub fn mollify(sigma: &ActivationSpec, spec: MollifierSpec) -> Mollified {
    Mollified { sigma: sigma.clone(), nodes: spec.nodes(), spec }
}
