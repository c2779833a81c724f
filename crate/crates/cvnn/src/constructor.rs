//! Constructive universal approximation.
//!
//! The shallow pipeline fits a polynomial in `(z, z̄)` to the target and
//! realises each monomial `z^m z̄^ℓ` as a divided difference of
//! `w ↦ σ(wz + θ)` in the dilation parameter `w`. The deep pipeline builds an
//! approximant of `ρ_ℂ(z) = max{0, Re z}` of depth two, pads it with
//! near-identity layers and assembles the target from ridge functions of
//! `ρ_ℂ`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::classifier::{classify, ClassifierConfig, Verdict};
use crate::complexcore::{is_finite, make_grid, monomial, seeded_rng, ActivationSpec, Annotation, ExceptionalSet, Grid};
use crate::linalg::{least_squares, Regularization};
use crate::network::{compose, lift_affine, linear_combination, pass_through, CMatrix, Layer, NetworkWeights, ShallowNetwork};
use crate::targets::Target;
use crate::wirtinger::{wirtinger_stencil, MollifierSpec, RingStencil};
use crate::{Error, Result, C64, VERSION};

/// Largest total order `m + ℓ` accepted by the extraction schemes.
pub const JET_LIMIT: usize = 32;

/// How non-smooth activations are smoothed before differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingConfig {
    pub epsilon: f64,
    /// Cells per axis of the translate-sum realisation.
    pub m_cells: usize,
    /// Always smooth, even where σ is smooth on the stencil support.
    pub force: bool,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self { epsilon: 0.05, m_cells: 8, force: false }
    }
}

/// Riemann-sum realisation `Σ θ_{k,ℓ} σ(z − y_{k,ℓ})` of `η_ε ∗ σ`.
///
/// The square `[−A, A)²` is split into `m_cells²` cells; `θ_{k,ℓ}` is the
/// kernel mass of a cell and `y_{k,ℓ}` its midpoint. Cells without mass are
/// dropped.
pub fn translate_sum(_sigma: &ActivationSpec, epsilon: f64, a: f64, m_cells: usize) -> Result<ShallowNetwork<f64>> {
    let mut net = ShallowNetwork::constant(1, C64::zero());
    for (shift, weight) in translate_weights(epsilon, a, m_cells)? {
        net.push(C64::new(weight, 0.0), vec![C64::new(1.0, 0.0)], shift);
    }
    Ok(net)
}

/// `(−y_{k,ℓ}, θ_{k,ℓ})` pairs of [`translate_sum`].
fn translate_weights(epsilon: f64, a: f64, m_cells: usize) -> Result<Vec<(C64, f64)>> {
    if !(a > 0.0) || m_cells == 0 {
        return Err(Error::InvalidArgument("translate sum needs A > 0 and at least one cell".into()));
    }
    let kernel = MollifierSpec::new(epsilon, 64)?;
    let cell = 2.0 * a / m_cells as f64;
    let sub = 128_usize.div_ceil(m_cells);
    let sub = sub.max(2);
    let sub_cell = cell / sub as f64;
    let mut out = Vec::new();
    for k in 0..m_cells {
        for l in 0..m_cells {
            let x0 = -a + k as f64 * cell;
            let y0 = -a + l as f64 * cell;
            let mut mass = 0.0;
            for p in 0..sub {
                for q in 0..sub {
                    let w = C64::new(x0 + (p as f64 + 0.5) * sub_cell, y0 + (q as f64 + 0.5) * sub_cell);
                    mass += kernel.kernel(w) * sub_cell * sub_cell;
                }
            }
            if mass > 0.0 {
                let mid = C64::new(x0 + cell / 2.0, y0 + cell / 2.0);
                out.push((-mid, mass));
            }
        }
    }
    Ok(out)
}

/// σ as read by the extraction stencils: raw, or as a translate sum.
#[derive(Debug, Clone)]
struct Source<'a> {
    sigma: &'a ActivationSpec,
    shifts: Option<Vec<(C64, f64)>>,
}

impl<'a> Source<'a> {
    fn new(sigma: &'a ActivationSpec, theta: C64, support: f64, smoothing: &SmoothingConfig) -> Result<Self> {
        let near = sigma.nonsmooth_set.distance(theta) <= support + 2.0 * smoothing.epsilon;
        let shifts = if smoothing.force || (!sigma.is_smooth() && near) {
            Some(translate_weights(smoothing.epsilon, smoothing.epsilon, smoothing.m_cells)?)
        } else {
            None
        };
        Ok(Self { sigma, shifts })
    }

    fn eval(&self, u: C64) -> Result<C64> {
        match &self.shifts {
            None => self.sigma.eval(u),
            Some(shifts) => {
                let mut acc = C64::zero();
                for &(s, w) in shifts {
                    acc += self.sigma.eval(u + s)? * w;
                }
                Ok(acc)
            }
        }
    }

    /// Appends `coef · σ̃(w z + bias)` to a one-dimensional network.
    fn push(&self, net: &mut ShallowNetwork<f64>, coef: C64, w: C64, bias: C64) {
        match &self.shifts {
            None => net.push(coef, vec![w], bias),
            Some(shifts) => {
                for &(s, weight) in shifts {
                    net.push(coef * weight, vec![w], bias + s);
                }
            }
        }
    }
}

/// Divided-difference scheme in the dilation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Central differences on the square lattice `h·(i + i·j)`.
    Lattice,
    /// Fourier modes on concentric circles, extrapolated in the radius.
    Rings,
}

/// Request for a shallow approximant of `z ↦ z^m z̄^ℓ` on the unit disc.
///
/// For [`SchemeKind::Lattice`], `fd_step` is the lattice step and the
/// per-axis accuracy is `2·stencil_radius`. For [`SchemeKind::Rings`],
/// `fd_step` is the outer ring radius and `stencil_radius` the number of
/// rings beyond the minimum `min(m, ℓ) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonomialRequest {
    pub m: usize,
    pub ell: usize,
    pub theta: C64,
    pub fd_step: f64,
    pub stencil_radius: usize,
    pub kind: SchemeKind,
    /// Nodes per ring; `None` means `2(m + ℓ) + 24`.
    pub nodes_per_ring: Option<usize>,
    pub smoothing: SmoothingConfig,
}

impl MonomialRequest {
    pub fn rings(m: usize, ell: usize, theta: C64) -> Self {
        Self {
            m,
            ell,
            theta,
            fd_step: 0.8,
            stencil_radius: 3,
            kind: SchemeKind::Rings,
            nodes_per_ring: None,
            smoothing: SmoothingConfig::default(),
        }
    }

    pub fn lattice(m: usize, ell: usize, theta: C64) -> Self {
        Self { fd_step: 1e-2, stencil_radius: 1, kind: SchemeKind::Lattice, ..Self::rings(m, ell, theta) }
    }

    fn validate(&self) -> Result<()> {
        if self.m + self.ell > JET_LIMIT {
            return Err(Error::InvalidArgument(format!("m + ℓ = {} exceeds the jet limit {JET_LIMIT}", self.m + self.ell)));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidArgument(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        if self.kind == SchemeKind::Lattice && self.stencil_radius == 0 {
            return Err(Error::InvalidArgument("lattice stencil_radius must be at least 1".into()));
        }
        Ok(())
    }

    /// `(w_k, c_k)` with `Σ c_k g(w_k) ≈ (∂^m ∂̄^ℓ g)(0)`.
    fn stencil(&self) -> Result<Vec<(C64, C64)>> {
        self.validate()?;
        if self.m == 0 && self.ell == 0 {
            return Ok(vec![(C64::zero(), C64::new(1.0, 0.0))]);
        }
        match self.kind {
            SchemeKind::Lattice => {
                let h = self.fd_step;
                let scale = h.powi((self.m + self.ell) as i32);
                Ok(wirtinger_stencil(self.m, self.ell, 2 * self.stencil_radius)
                    .into_iter()
                    .map(|((i, j), w)| (C64::new(i as f64, j as f64) * h, w / scale))
                    .collect())
            }
            SchemeKind::Rings => {
                let q = self.m.min(self.ell);
                let k = self.nodes_per_ring.unwrap_or(2 * (self.m + self.ell) + 24);
                let st = RingStencil::new(self.m, self.ell, self.fd_step, q + 1 + self.stencil_radius, k)?;
                Ok(st.terms().to_vec())
            }
        }
    }
}

fn support_radius(stencil: &[(C64, C64)]) -> f64 {
    stencil.iter().map(|(w, _)| w.norm()).fold(0.0, f64::max)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Stencil estimate of `(∂^m ∂̄^ℓ σ̃)(θ)` and its scale-free magnitude.
fn stencil_derivative(source: &Source, stencil: &[(C64, C64)], theta: C64, m: usize, ell: usize) -> Result<(C64, f64)> {
    let mut acc = C64::zero();
    let mut peak: f64 = 1.0;
    for &(w, c) in stencil {
        let z = theta + w;
        let v = source.eval(z).map_err(|_| Error::StencilSingularity { re: z.re, im: z.im })?;
        if !is_finite(v) {
            return Err(Error::StencilSingularity { re: z.re, im: z.im });
        }
        peak = peak.max(v.norm());
        acc += c * v;
    }
    let r = support_radius(stencil).max(1e-300);
    let normalized = acc.norm() * r.powi((m + ell) as i32) / (factorial(m) * factorial(ell) * peak);
    Ok((acc, normalized))
}

/// Below this scale-free magnitude a derivative counts as zero.
const ACTIVITY_THRESHOLD: f64 = 1e-9;

/// Shallow network `Φ(z) = Σ_k (c_k / D) σ̃(w_k z + θ)` approximating
/// `z^m z̄^ℓ` on the unit disc, where `D` is the same stencil applied at
/// `z = 1`.
pub fn extract_monomial(sigma: &ActivationSpec, req: &MonomialRequest) -> Result<ShallowNetwork<f64>> {
    let stencil = req.stencil()?;
    let source = Source::new(sigma, req.theta, support_radius(&stencil), &req.smoothing)?;
    extract_with(&source, req, &stencil)
}

fn extract_with(source: &Source, req: &MonomialRequest, stencil: &[(C64, C64)]) -> Result<ShallowNetwork<f64>> {
    let (d, magnitude) = stencil_derivative(source, stencil, req.theta, req.m, req.ell)?;
    if !(magnitude > ACTIVITY_THRESHOLD) {
        return Err(Error::InactiveExpansionPoint { m: req.m, ell: req.ell, magnitude: d.norm() });
    }
    let mut net = ShallowNetwork::constant(1, C64::zero());
    for &(w, c) in stencil {
        source.push(&mut net, c / d, w, req.theta);
    }
    Ok(net)
}

/// Candidate expansion points ranked by decreasing `|(∂^m ∂̄^ℓ σ̃)(θ)|`.
///
/// A point is kept only when the estimate from a stencil shrunk to 80%
/// agrees to within 5%, which rejects points whose stencil straddles a kink.
pub fn rank_active_points(sigma: &ActivationSpec, template: &MonomialRequest, search_grid: &Grid) -> Result<Vec<(C64, f64)>> {
    let mut out = Vec::new();
    let mut half = *template;
    half.fd_step *= 0.8;
    let stencil = template.stencil()?;
    let stencil_half = half.stencil()?;
    let support = support_radius(&stencil);
    for &theta in search_grid.scalars()? {
        let source = Source::new(sigma, theta, support, &template.smoothing)?;
        let Ok((d1, n1)) = stencil_derivative(&source, &stencil, theta, template.m, template.ell) else { continue };
        let Ok((d2, _)) = stencil_derivative(&source, &stencil_half, theta, template.m, template.ell) else { continue };
        if n1 > ACTIVITY_THRESHOLD && (d1 - d2).norm() <= 5e-2 * d1.norm().max(d2.norm()) {
            out.push((theta, d1.norm()));
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(out)
}

/// Point of the search grid maximising `|(∂^m ∂̄^ℓ σ̃)(θ)|`.
pub fn find_active_point(sigma: &ActivationSpec, m: usize, ell: usize, search_grid: &Grid) -> Result<(C64, f64)> {
    let template = MonomialRequest::rings(m, ell, C64::zero());
    rank_active_points(sigma, &template, search_grid)?
        .into_iter()
        .next()
        .ok_or(Error::NoActivePoint { m, ell })
}

/// Least-squares coefficients of `Σ c_{m,ℓ} z^m z̄^ℓ`, `0 ≤ m, ℓ ≤ degree`.
///
/// Monomials are taken in `(z − center)`; columns are evaluated on
/// `(z − center)/radius` and the coefficients rescaled afterwards.
pub fn fit_poly_coeffs(target: &dyn Fn(C64) -> C64, fit_grid: &Grid, degree: usize) -> Result<BTreeMap<(usize, usize), C64>> {
    let points = fit_grid.scalars()?;
    let basis = square_basis(degree);
    if points.len() < basis.len() {
        return Err(Error::InvalidArgument(format!(
            "fit grid has {} points but degree {degree} needs {}",
            points.len(),
            basis.len()
        )));
    }
    let center = fit_grid.center()[0];
    let r = fit_grid.radius();
    let matrix: Vec<C64> = points
        .iter()
        .flat_map(|&z| basis.iter().map(move |&(m, l)| monomial((z - center) / r, m, l)))
        .collect();
    let rhs: Vec<C64> = points.iter().map(|&z| target(z)).collect();
    let sol = least_squares(points.len(), basis.len(), &matrix, &rhs, Regularization::Strict { rcond: 1e-12 })?;
    Ok(basis
        .iter()
        .zip(sol.coeffs)
        .map(|(&(m, l), c)| ((m, l), c / r.powi((m + l) as i32)))
        .collect())
}

fn square_basis(degree: usize) -> Vec<(usize, usize)> {
    (0..=degree).flat_map(|m| (0..=degree).map(move |l| (m, l))).collect()
}

/// Approximation domain: a ball of `ℂ^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    pub center: Vec<C64>,
    pub radius: f64,
}

impl Domain {
    pub fn disc(center: C64, radius: f64) -> Self {
        Self { center: vec![center], radius }
    }

    pub fn ball(d: usize, radius: f64) -> Self {
        Self { center: vec![C64::zero(); d], radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn validate(&self) -> Result<()> {
        if self.center.is_empty() || !(self.radius > 0.0) {
            return Err(Error::InvalidArgument("domain needs d ≥ 1 and a positive radius".into()));
        }
        Ok(())
    }

    /// Lebesgue measure of the ball in `ℝ^{2d}`.
    fn volume(&self) -> f64 {
        let d = self.dim() as i32;
        std::f64::consts::PI.powi(d) * self.radius.powi(2 * d) / factorial(d as usize)
    }
}

/// Depth and neuron count of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NetworkSize {
    pub depth: usize,
    pub total_neurons: usize,
}

/// Measured quality of a synthesised network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationCertificate {
    pub target_name: String,
    pub activation_name: String,
    pub domain: Domain,
    pub test_grid_size: usize,
    pub sup_error: f64,
    /// `∫ |f − Φ|` over the domain, by the test-grid mean times the volume.
    pub l1_error: f64,
    pub network_size: NetworkSize,
    /// Seconds spent; recorded only when timing is enabled.
    pub wall_time: Option<f64>,
    pub seed: u64,
    /// Named error contributions of the pipeline stages.
    pub stages: BTreeMap<String, f64>,
    /// Monomials or stages that could not be realised.
    pub failures: Vec<String>,
    pub library_version: String,
    pub config_echo: serde_json::Value,
}

impl ApproximationCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialise")
    }
}

/// Test grid disjoint from `fit`.
fn held_out_grid(domain: &Domain, points_per_axis: usize, fit: &Grid) -> Result<Grid> {
    let test = make_grid(&domain.center, domain.radius, points_per_axis, &ExceptionalSet::empty())?;
    let mut taken: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
    for p in fit.iter() {
        taken.insert(p.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect());
    }
    test.filtered(|p| !taken.contains(&p.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>()))
}

struct Errors {
    sup: f64,
    l1: f64,
    count: usize,
}

fn measure(domain: &Domain, grid: &Grid, target: &Target, model: impl Fn(&[C64]) -> Result<C64>) -> Result<Errors> {
    let mut sup: f64 = 0.0;
    let mut total = 0.0;
    let mut count = 0;
    for p in grid.iter() {
        let e = (target.eval(p) - model(p)?).norm();
        sup = sup.max(e);
        total += e;
        count += 1;
    }
    Ok(Errors { sup, l1: total / count as f64 * domain.volume(), count })
}

fn echo<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).expect("configs serialise")
}

fn require_verdict(sigma: &ActivationSpec, deep: bool) -> Result<()> {
    let report = classify(sigma, &ClassifierConfig::default())?;
    let verdict = if deep { report.deep_universal } else { report.shallow_universal };
    if verdict != Verdict::Yes {
        let kind = if deep { "deep" } else { "shallow" };
        return Err(Error::Precondition(format!(
            "{kind} synthesis refused: `{}` is classified {kind}_universal = {:?}",
            sigma.name, verdict
        )));
    }
    Ok(())
}

/// Configuration of [`synthesize_shallow`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShallowConfig {
    pub fit_points_per_axis: usize,
    pub test_points_per_axis: usize,
    /// Monomials with smaller fitted coefficients are skipped.
    pub coefficient_threshold: f64,
    pub search_radius: f64,
    pub search_points_per_axis: usize,
    /// Expansion points tried per monomial.
    pub candidates: usize,
    pub ring_radii: Vec<f64>,
    pub extra_rings: Vec<usize>,
    /// Refit the readout over the realised monomial networks.
    pub recalibrate: bool,
    /// Run the classifier first and refuse non-universal activations.
    pub check_universality: bool,
    pub smoothing: SmoothingConfig,
    pub record_timing: bool,
    pub seed: u64,
}

impl Default for ShallowConfig {
    fn default() -> Self {
        Self {
            fit_points_per_axis: 32,
            test_points_per_axis: 65,
            coefficient_threshold: 1e-8,
            search_radius: 3.0,
            search_points_per_axis: 7,
            candidates: 4,
            ring_radii: vec![0.5, 0.8, 1.2, 1.6],
            extra_rings: vec![2, 4],
            recalibrate: true,
            check_universality: true,
            smoothing: SmoothingConfig::default(),
            record_timing: false,
            seed: 0,
        }
    }
}

/// Check points of the unit disc used to choose between candidates.
fn validation_points() -> Vec<C64> {
    let mut pts = vec![C64::zero()];
    pts.extend((0..16).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / 16.0)));
    pts.extend((0..8).map(|k| C64::from_polar(0.5, 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 8.0)));
    pts
}

/// A realised monomial.
#[derive(Debug, Clone)]
struct Realized {
    net: ShallowNetwork<f64>,
    error: f64,
}

/// Tries every candidate expansion point and ring geometry and keeps the
/// network with the smallest error on the validation points.
fn realize_monomial(sigma: &ActivationSpec, m: usize, ell: usize, cfg: &ShallowConfig, search: &Grid) -> Result<Realized> {
    let mut template = MonomialRequest::rings(m, ell, C64::zero());
    template.smoothing = cfg.smoothing;
    let ranked = rank_active_points(sigma, &template, search)?;
    if ranked.is_empty() {
        return Err(Error::NoActivePoint { m, ell });
    }
    let check = validation_points();
    let mut best: Option<Realized> = None;
    let geometries: Vec<(f64, usize)> = if m == 0 && ell == 0 {
        vec![(template.fd_step, 0)]
    } else {
        cfg.ring_radii.iter().flat_map(|&r| cfg.extra_rings.iter().map(move |&e| (r, e))).collect()
    };
    for &(theta, _) in ranked.iter().take(cfg.candidates.max(1)) {
        for &(radius, extra) in &geometries {
            let req = MonomialRequest { theta, fd_step: radius, stencil_radius: extra, ..template };
            let Ok(net) = extract_monomial(sigma, &req) else { continue };
            let mut error: f64 = 0.0;
            for &z in &check {
                match net.eval(sigma, &[z]) {
                    Ok(v) => error = error.max((v - monomial(z, m, ell)).norm()),
                    Err(_) => error = f64::INFINITY,
                }
            }
            if best.as_ref().is_none_or(|b| error < b.error) {
                best = Some(Realized { net, error });
            }
        }
    }
    best.ok_or(Error::NoActivePoint { m, ell })
}

/// Least-squares readout over feature columns evaluated on `points`.
fn refit(features: &[Vec<C64>], rhs: &[C64]) -> Result<Vec<C64>> {
    let rows = rhs.len();
    let cols = features.len();
    let mut matrix = vec![C64::zero(); rows * cols];
    for (j, col) in features.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            matrix[i * cols + j] = v;
        }
    }
    Ok(least_squares(rows, cols, &matrix, rhs, Regularization::Truncate { rcond: 1e-12 })?.coeffs)
}

/// Shallow approximant of a target on a disc: polynomial fit, monomial
/// extraction and summation.
pub fn synthesize_shallow(
    sigma: &ActivationSpec,
    target: &Target,
    domain: &Domain,
    degree: usize,
    cfg: &ShallowConfig,
) -> Result<(ShallowNetwork<f64>, ApproximationCertificate)> {
    let start = Instant::now();
    domain.validate()?;
    if domain.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: domain.dim() });
    }
    if cfg.check_universality {
        require_verdict(sigma, false)?;
    }
    let center = domain.center[0];
    let r = domain.radius;
    let fit_grid = make_grid(&domain.center, r, cfg.fit_points_per_axis, &ExceptionalSet::empty())?;
    let target_fn = |z: C64| target.eval1(z);
    let coeffs = fit_poly_coeffs(&target_fn, &fit_grid, degree)?;
    // Coefficients in the unit-disc coordinate u = (z − center)/r.
    let unit_coeffs: BTreeMap<(usize, usize), C64> =
        coeffs.iter().map(|(&(m, l), &c)| ((m, l), c * r.powi((m + l) as i32))).collect();
    let fit_points = fit_grid.scalars()?;
    let poly_at = |z: C64| -> C64 {
        let u = (z - center) / r;
        unit_coeffs.iter().map(|(&(m, l), &c)| c * monomial(u, m, l)).sum()
    };
    let fit_residual = fit_points.iter().map(|&z| (target_fn(z) - poly_at(z)).norm()).fold(0.0, f64::max);

    let search = make_grid(&[C64::zero()], cfg.search_radius, cfg.search_points_per_axis, &sigma.discontinuity_set)?;
    let constant = unit_coeffs.get(&(0, 0)).copied().unwrap_or_default();
    let mut realized: Vec<((usize, usize), C64, Realized)> = Vec::new();
    let mut failures = Vec::new();
    for (&(m, l), &c) in &unit_coeffs {
        if (m, l) == (0, 0) || c.norm() <= cfg.coefficient_threshold {
            continue;
        }
        match realize_monomial(sigma, m, l, cfg, &search) {
            Ok(rm) => realized.push(((m, l), c, rm)),
            Err(e) => failures.push(format!("({m}, {l}): {e}")),
        }
    }

    let mut stages = BTreeMap::new();
    stages.insert("polynomial_fit_residual".to_string(), fit_residual);
    stages.insert(
        "worst_monomial_validation_error".to_string(),
        realized.iter().map(|r| r.2.error).fold(0.0, f64::max),
    );

    let assemble = |constant: C64, weights: &[C64]| -> ShallowNetwork<f64> {
        let mut net = ShallowNetwork::constant(1, constant);
        for ((_, _, rm), &a) in realized.iter().zip(weights) {
            for t in &rm.net.terms {
                net.push(a * t.coefficient, t.weights.clone(), t.bias);
            }
        }
        net
    };
    let ideal_weights: Vec<C64> = realized.iter().map(|r| r.1).collect();
    let ideal = assemble(constant, &ideal_weights);
    let unit_test = |net: &ShallowNetwork<f64>| {
        let scaled = net.rescaled_input(&domain.center, r);
        move |p: &[C64]| scaled.eval(sigma, p)
    };
    let mut network = ideal.clone();
    if cfg.recalibrate && !realized.is_empty() {
        let units: Vec<C64> = fit_points.iter().map(|&z| (z - center) / r).collect();
        let mut features = vec![vec![C64::new(1.0, 0.0); units.len()]];
        for (_, _, rm) in &realized {
            features.push(units.iter().map(|&u| rm.net.eval(sigma, &[u])).collect::<Result<Vec<_>>>()?);
        }
        let rhs: Vec<C64> = fit_points.iter().map(|&z| target_fn(z)).collect();
        let w = refit(&features, &rhs)?;
        network = assemble(w[0], &w[1..]);
    }

    let test_grid = held_out_grid(domain, cfg.test_points_per_axis, &fit_grid)?;
    let ideal_errors = measure(domain, &test_grid, target, unit_test(&ideal))?;
    stages.insert("ideal_readout_sup_error".to_string(), ideal_errors.sup);
    let network = network.rescaled_input(&domain.center, r).merged();
    let errors = measure(domain, &test_grid, target, |p| network.eval(sigma, p))?;

    let cert = ApproximationCertificate {
        target_name: target.name().to_string(),
        activation_name: sigma.name.to_string(),
        domain: domain.clone(),
        test_grid_size: errors.count,
        sup_error: errors.sup,
        l1_error: errors.l1,
        network_size: NetworkSize { depth: 1, total_neurons: network.terms.len() },
        wall_time: cfg.record_timing.then(|| start.elapsed().as_secs_f64()),
        seed: cfg.seed,
        stages,
        failures,
        library_version: VERSION.to_string(),
        config_echo: serde_json::json!({ "degree": degree, "shallow": echo(cfg) }),
    };
    Ok((network, cert))
}

/// Monomial networks sharing one expansion point and ring geometry, so that
/// every network uses the same neurons `σ(w_k z + θ)`.
struct Family {
    theta: C64,
    nodes: Vec<C64>,
    /// Per monomial, readout weights over `nodes`.
    weights: Vec<Vec<C64>>,
}

impl Family {
    fn build(sigma: &ActivationSpec, monomials: &[(usize, usize)], theta: C64, radius: f64, extra: usize) -> Result<Self> {
        let q = monomials.iter().map(|&(m, l)| m.min(l)).max().unwrap_or(0);
        let k = 2 * monomials.iter().map(|&(m, l)| m + l).max().unwrap_or(0) + 24;
        let rings = q + 1 + extra;
        let mut nodes: Vec<C64> = Vec::new();
        let mut index: BTreeMap<(u64, u64), usize> = BTreeMap::new();
        let mut weights = Vec::with_capacity(monomials.len());
        for &(m, l) in monomials {
            let stencil: Vec<(C64, C64)> = if (m, l) == (0, 0) {
                vec![(C64::zero(), C64::new(1.0, 0.0))]
            } else {
                RingStencil::new(m, l, radius, rings, k)?.terms().to_vec()
            };
            let mut d = C64::zero();
            let mut peak: f64 = 1.0;
            for &(w, c) in &stencil {
                let v = sigma.eval(theta + w)?;
                peak = peak.max(v.norm());
                d += c * v;
            }
            let normalized = d.norm() * radius.powi((m + l) as i32) / (factorial(m) * factorial(l) * peak);
            if !(normalized > ACTIVITY_THRESHOLD) {
                return Err(Error::InactiveExpansionPoint { m, ell: l, magnitude: d.norm() });
            }
            let mut row = vec![C64::zero(); nodes.len()];
            for &(w, c) in &stencil {
                let key = (w.re.to_bits(), w.im.to_bits());
                let j = *index.entry(key).or_insert_with(|| {
                    nodes.push(w);
                    nodes.len() - 1
                });
                if j >= row.len() {
                    row.resize(j + 1, C64::zero());
                }
                row[j] += c / d;
            }
            weights.push(row);
        }
        for row in weights.iter_mut() {
            row.resize(nodes.len(), C64::zero());
        }
        Ok(Self { theta, nodes, weights })
    }

    /// Neuron outputs `σ(w_k u + θ)` at every point.
    fn activations(&self, sigma: &ActivationSpec, points: &[C64]) -> Result<Vec<Vec<C64>>> {
        points
            .iter()
            .map(|&u| self.nodes.iter().map(|&w| sigma.eval(w * u + self.theta)).collect())
            .collect()
    }

    /// Readout over the neurons for the combination `Σ a_i Φ_i`.
    fn combine(&self, a: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.nodes.len()];
        for (row, &ai) in self.weights.iter().zip(a) {
            for (o, &w) in out.iter_mut().zip(row) {
                *o += ai * w;
            }
        }
        out
    }

    /// `c + Σ_k v_k σ(w_k z/scale + θ)` as a shallow network in `z`.
    fn network(&self, constant: C64, readout: &[C64], scale: f64) -> ShallowNetwork<f64> {
        let mut net = ShallowNetwork::constant(1, constant);
        for (&w, &v) in self.nodes.iter().zip(readout) {
            if !v.is_zero() {
                net.push(v, vec![w / scale], self.theta);
            }
        }
        net
    }
}

/// Result of fitting a one-dimensional function with a shared family.
struct FamilyFit {
    family: Family,
    constant: C64,
    coefficients: Vec<C64>,
    residual: f64,
}

/// Chooses expansion point and geometry of a family for the monomials
/// `monomials`, fitting `values` at the unit-disc points `units` by least
/// squares over the realised monomials. The candidate with the smallest
/// residual on `check` wins.
fn fit_family(
    sigma: &ActivationSpec,
    monomials: &[(usize, usize)],
    units: &[C64],
    values: &[C64],
    check: (&[C64], &[C64]),
    cfg: &FamilyConfig,
) -> Result<FamilyFit> {
    let &(hm, hl) = monomials.iter().max_by_key(|&&(m, l)| (m + l, m.min(l))).ok_or_else(|| {
        Error::InvalidArgument("empty monomial family".into())
    })?;
    let search = make_grid(&[C64::zero()], cfg.search_radius, cfg.search_points_per_axis, &sigma.discontinuity_set)?;
    // Stencil estimates of very high orders drown in roundoff; rank the
    // candidates by a monomial of the same shape and moderate order.
    let (rm, rl) = if hm + hl <= RANKING_ORDER {
        (hm, hl)
    } else {
        let m = (RANKING_ORDER * hm + (hm + hl) / 2) / (hm + hl);
        (m, RANKING_ORDER - m)
    };
    let template = MonomialRequest::rings(rm, rl, C64::zero());
    let ranked: Vec<(C64, f64)> = rank_active_points(sigma, &template, &search)?
        .into_iter()
        .filter(|&(theta, _)| {
            sigma.is_smooth()
                || sigma.nonsmooth_set.distance(theta) > cfg.ring_radii.iter().cloned().fold(0.0, f64::max) * 1.05
        })
        .collect();
    let mut best: Option<FamilyFit> = None;
    for &(theta, _) in ranked.iter().take(cfg.candidates.max(1)) {
        for &radius in &cfg.ring_radii {
            if !sigma.is_smooth() && sigma.nonsmooth_set.distance(theta) <= radius * 1.05 {
                continue;
            }
            for &extra in &cfg.extra_rings {
                let Ok(family) = Family::build(sigma, monomials, theta, radius, extra) else { continue };
                let Ok(acts) = family.activations(sigma, units) else { continue };
                let features: Vec<Vec<C64>> = std::iter::once(vec![C64::new(1.0, 0.0); units.len()])
                    .chain(family.weights.iter().map(|row| {
                        acts.iter().map(|a| a.iter().zip(row).map(|(x, w)| x * w).sum()).collect()
                    }))
                    .collect();
                let Ok(sol) = refit(&features, values) else { continue };
                let readout = family.combine(&sol[1..]);
                let Ok(check_acts) = family.activations(sigma, check.0) else { continue };
                let residual = check_acts
                    .iter()
                    .zip(check.1)
                    .map(|(a, &y)| (sol[0] + a.iter().zip(&readout).map(|(x, v)| x * v).sum::<C64>() - y).norm())
                    .fold(0.0, f64::max);
                if residual.is_finite() && best.as_ref().is_none_or(|b| residual < b.residual) {
                    best = Some(FamilyFit { constant: sol[0], coefficients: sol[1..].to_vec(), residual, family });
                }
            }
        }
    }
    best.ok_or(Error::NoActivePoint { m: hm, ell: hl })
}

const RANKING_ORDER: usize = 6;

/// Search settings for shared-geometry families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyConfig {
    pub search_radius: f64,
    pub search_points_per_axis: usize,
    pub candidates: usize,
    pub ring_radii: Vec<f64>,
    pub extra_rings: Vec<usize>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            search_radius: 3.0,
            search_points_per_axis: 7,
            candidates: 4,
            ring_radii: vec![0.5, 0.8, 1.0],
            extra_rings: vec![2, 3, 4],
        }
    }
}

/// Configuration of [`build_relu_c`] and the deep pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReluConfig {
    /// Largest polynomial degree tried for `p ≈ ρ` on `[−r, r]`.
    pub max_poly_degree: usize,
    /// Samples of the segment used for fitting and checking.
    pub segment_points: usize,
    pub family: FamilyConfig,
}

impl Default for ReluConfig {
    fn default() -> Self {
        Self { max_poly_degree: 40, segment_points: 801, family: FamilyConfig::default() }
    }
}

/// Budget split of a [`build_relu_c`] run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReluReport {
    pub poly_degree: usize,
    /// `sup |ρ − p|` on `[−r, r]`.
    pub poly_error: f64,
    /// `sup |Φ − p|` on `[−r, r]`.
    pub outer_error: f64,
    /// `sup |Ψ(z) − Re z|` on the check points of `B_r`.
    pub inner_error: f64,
    pub exact: bool,
}

fn segment(r: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| -r + 2.0 * r * k as f64 / (n - 1) as f64).collect()
}

/// Least-squares polynomial `p` of the given degree for `ρ` on `[−r, r]`,
/// in Chebyshev form.
fn relu_polynomial(r: f64, degree: usize) -> Result<Vec<f64>> {
    let n = 4 * (degree + 1);
    let nodes: Vec<f64> = (0..n).map(|k| r * (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos()).collect();
    let matrix: Vec<C64> = nodes.iter().flat_map(|&x| chebyshev_row(x / r, degree)).map(|v| C64::new(v, 0.0)).collect();
    let rhs: Vec<C64> = nodes.iter().map(|&x| C64::new(x.max(0.0), 0.0)).collect();
    let sol = least_squares(n, degree + 1, &matrix, &rhs, Regularization::Strict { rcond: 1e-12 })?;
    Ok(sol.coeffs.iter().map(|c| c.re).collect())
}

fn chebyshev_row(t: f64, degree: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        row.push(match k {
            0 => 1.0,
            1 => t,
            _ => 2.0 * t * row[k - 1] - row[k - 2],
        });
    }
    row
}

fn chebyshev_eval(coeffs: &[f64], t: f64) -> f64 {
    chebyshev_row(t, coeffs.len() - 1).iter().zip(coeffs).map(|(a, b)| a * b).sum()
}

fn relu_c_exact(sigma: &ActivationSpec) -> bool {
    sigma.has(Annotation::DeepUniversalByComposition)
}

/// Depth-two network `Γ = Φ ∘ Ψ` with `sup |ρ_ℂ − Γ| ≤ eps` on `B_r(0)`:
/// `Ψ ≈ Re z` from the first-order monomials, `Φ ≈ p ≈ ρ` on `[−r, r]`.
pub fn build_relu_c(sigma: &ActivationSpec, r: f64, eps: f64) -> Result<NetworkWeights<f64>> {
    build_relu_c_with(sigma, r, eps, &ReluConfig::default()).map(|(net, _)| net)
}

/// [`build_relu_c`] with explicit configuration and a budget report.
pub fn build_relu_c_with(sigma: &ActivationSpec, r: f64, eps: f64, cfg: &ReluConfig) -> Result<(NetworkWeights<f64>, ReluReport)> {
    if !(r > 0.0 && eps > 0.0) {
        return Err(Error::InvalidArgument("build_relu_c needs r > 0 and eps > 0".into()));
    }
    if relu_c_exact(sigma) {
        let net = compose(&pass_through(), &pass_through())?;
        let report = ReluReport { poly_degree: 1, poly_error: 0.0, outer_error: 0.0, inner_error: 0.0, exact: true };
        return Ok((net, report));
    }
    let xs = segment(r, cfg.segment_points);
    let budget = eps / 3.0;

    // p ≈ ρ within ε/3.
    let mut chosen = None;
    for degree in 2..=cfg.max_poly_degree {
        let Ok(coeffs) = relu_polynomial(r, degree) else { break };
        let err = xs.iter().map(|&x| (chebyshev_eval(&coeffs, x / r) - x.max(0.0)).abs()).fold(0.0, f64::max);
        if err <= budget {
            chosen = Some((degree, coeffs, err));
            break;
        }
    }
    let (degree, cheb, poly_error) = chosen.ok_or_else(|| {
        Error::Precondition(format!("no polynomial of degree ≤ {} meets ε/3 on [−{r}, {r}]", cfg.max_poly_degree))
    })?;

    // Φ ≈ p: realised monomials u^n, u = x/r, refitted on the segment.
    let monomials: Vec<(usize, usize)> = (0..=degree).map(|n| (n, 0)).collect();
    let units: Vec<C64> = xs.iter().step_by(2).map(|&x| C64::new(x / r, 0.0)).collect();
    let values: Vec<C64> = units.iter().map(|u| C64::new(chebyshev_eval(&cheb, u.re), 0.0)).collect();
    let check_u: Vec<C64> = xs.iter().map(|&x| C64::new(x / r, 0.0)).collect();
    let check_v: Vec<C64> = check_u.iter().map(|u| C64::new(chebyshev_eval(&cheb, u.re), 0.0)).collect();
    let outer = fit_family(sigma, &monomials, &units, &values, (&check_u, &check_v), &cfg.family)?;
    let outer_error = outer.residual;
    let readout = outer.family.combine(&outer.coefficients);
    let phi = outer.family.network(outer.constant, &readout, r).to_network();

    // Ψ ≈ Re z = (z + z̄)/2 on B_r from the (1,0) and (0,1) monomials.
    let disc: Vec<C64> = make_grid(&[C64::zero()], 1.0, 17, &ExceptionalSet::empty())?.scalars()?.to_vec();
    let disc_re: Vec<C64> = disc.iter().map(|u| C64::new(u.re, 0.0)).collect();
    let inner = fit_family(sigma, &[(1, 0), (0, 1)], &disc, &disc_re, (&disc, &disc_re), &cfg.family)?;
    let inner_readout = inner.family.combine(&inner.coefficients);
    let psi_unit = inner.family.network(inner.constant, &inner_readout, r);
    let mut psi = ShallowNetwork::constant(1, psi_unit.constant * r);
    for t in &psi_unit.terms {
        psi.push(t.coefficient * r, t.weights.clone(), t.bias);
    }
    let inner_error = inner.residual * r;
    let gamma = compose(&phi, &psi.to_network())?;
    Ok((gamma, ReluReport { poly_degree: degree, poly_error, outer_error, inner_error, exact: false }))
}

/// `sup |ρ_ℂ − Γ|` over a regular grid of `B_r(0)`.
pub fn relu_c_error(net: &NetworkWeights<f64>, sigma: &ActivationSpec, r: f64, points_per_axis: usize) -> Result<f64> {
    let grid = make_grid(&[C64::zero()], r, points_per_axis, &ExceptionalSet::empty())?;
    let mut worst: f64 = 0.0;
    for &z in grid.scalars()? {
        let v = net.eval(sigma, &[z])?;
        worst = worst.max((v - C64::new(z.re.max(0.0), 0.0)).norm());
    }
    Ok(worst)
}

/// Shallow approximant of the identity on `B_r(0)`.
fn identity_network(sigma: &ActivationSpec, r: f64, cfg: &FamilyConfig) -> Result<NetworkWeights<f64>> {
    let mut last = None;
    for mono in [(1, 0), (0, 1)] {
        // The padding layers only see real inputs, where z and z̄ coincide.
        let seg: Vec<C64> = segment(1.0, 65).into_iter().map(|x| C64::new(x, 0.0)).collect();
        match fit_family(sigma, &[mono], &seg, &seg, (&seg, &seg), cfg) {
            Ok(fit) => {
                let readout = fit.family.combine(&fit.coefficients);
                let unit = fit.family.network(fit.constant, &readout, r);
                let mut net = ShallowNetwork::constant(1, unit.constant * r);
                for t in &unit.terms {
                    net.push(t.coefficient * r, t.weights.clone(), t.bias);
                }
                return Ok(net.to_network());
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::NoActivePoint { m: 1, ell: 0 }))
}

/// `ρ_ℂ` approximant with exactly `depth ≥ 2` hidden layers on `B_r(0)`.
pub fn relu_c_of_depth(sigma: &ActivationSpec, depth: usize, r: f64, eps: f64, cfg: &ReluConfig) -> Result<(NetworkWeights<f64>, ReluReport)> {
    if depth < 2 {
        return Err(Error::InvalidArgument(format!("deep networks need L ≥ 2, got {depth}")));
    }
    let (mut net, report) = build_relu_c_with(sigma, r, eps, cfg)?;
    if depth > 2 {
        let id = if relu_c_exact(sigma) {
            // σ = Re z off the real axis: Re(z + i) = z on real inputs.
            let one = C64::new(1.0, 0.0);
            let mut s = ShallowNetwork::constant(1, C64::zero());
            s.push(one, vec![one], C64::new(0.0, 1.0));
            s.to_network()
        } else {
            identity_network(sigma, r + eps, &cfg.family)?
        };
        for _ in 2..depth {
            net = compose(&id, &net)?;
        }
    }
    Ok((net, report))
}

/// Real ridge features `ρ(γ + βᵀv)` on the unit ball of `ℝ^{2d}`.
#[derive(Debug, Clone)]
struct Ridges {
    directions: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl Ridges {
    /// Half of the random ridges are planar in one complex coordinate, half
    /// isotropic; the signed coordinate axes through the origin are added.
    fn draw(d: usize, width: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let dim = 2 * d;
        let mut directions = Vec::new();
        let mut offsets = Vec::new();
        for j in 0..width {
            let mut beta = vec![0.0; dim];
            if j % 2 == 0 {
                let k = rng.gen_range(0..d);
                let angle = rng.gen_range(0.0..std::f64::consts::TAU);
                beta[2 * k] = angle.cos();
                beta[2 * k + 1] = angle.sin();
            } else {
                loop {
                    for b in beta.iter_mut() {
                        *b = rng.gen_range(-1.0..1.0);
                    }
                    let n = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
                    if n > 1e-3 && n <= 1.0 {
                        beta.iter_mut().for_each(|b| *b /= n);
                        break;
                    }
                }
            }
            directions.push(beta);
            offsets.push(rng.gen_range(-1.0..1.0));
        }
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut beta = vec![0.0; dim];
                beta[k] = s;
                directions.push(beta);
                offsets.push(0.0);
            }
        }
        Self { directions, offsets }
    }

    fn len(&self) -> usize {
        self.offsets.len()
    }

    /// Complex weights `w_j = β^{(1)} − iβ^{(2)}` per coordinate.
    fn complex_weights(&self, j: usize) -> Vec<C64> {
        self.directions[j].chunks(2).map(|p| C64::new(p[0], -p[1])).collect()
    }

    fn argument(&self, j: usize, v: &[C64]) -> f64 {
        self.offsets[j] + self.directions[j].chunks(2).zip(v).map(|(b, z)| b[0] * z.re + b[1] * z.im).sum::<f64>()
    }

    /// Largest `|γ_j| + ‖β_j‖` over the ridges.
    fn bound(&self) -> f64 {
        (0..self.len())
            .map(|j| self.offsets[j].abs() + self.directions[j].iter().map(|b| b * b).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Unit-ball coordinates of a grid point.
fn to_unit(p: &[C64], domain: &Domain) -> Vec<C64> {
    p.iter().zip(&domain.center).map(|(&z, &c)| (z - c) / domain.radius).collect()
}

/// Stage one of the lifting: real ridge least squares on the fit grid.
fn fit_ridges(ridges: &Ridges, domain: &Domain, fit: &Grid, target: &Target, lambda: f64) -> Result<(C64, Vec<C64>)> {
    let units: Vec<Vec<C64>> = fit.iter().map(|p| to_unit(p, domain)).collect();
    let features: Vec<Vec<C64>> = std::iter::once(vec![C64::new(1.0, 0.0); units.len()])
        .chain((0..ridges.len()).map(|j| units.iter().map(|v| C64::new(ridges.argument(j, v).max(0.0), 0.0)).collect()))
        .collect();
    let rhs: Vec<C64> = fit.iter().map(|p| target.eval(p)).collect();
    let rows = rhs.len();
    let cols = features.len();
    let mut matrix = vec![C64::zero(); rows * cols];
    for (j, col) in features.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            matrix[i * cols + j] = v;
        }
    }
    let reg = if lambda > 0.0 { Regularization::Ridge { lambda } } else { Regularization::Truncate { rcond: 1e-10 } };
    let sol = least_squares(rows, cols, &matrix, &rhs, reg)?.coeffs;
    Ok((sol[0], sol[1..].to_vec()))
}

/// Configuration of [`lift_dimension`] and [`synthesize_deep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftConfig {
    /// Random ridges of the real stage (axis ridges come on top).
    pub width: usize,
    /// Tikhonov parameter of the real stage; 0 selects truncated SVD.
    pub ridge_lambda: f64,
    /// Fit and test grid resolutions; `None` picks them from the dimension.
    pub fit_points_per_axis: Option<usize>,
    pub test_points_per_axis: Option<usize>,
    /// Total error budget; the real stage may use half of it.
    pub eps: f64,
    /// Degree of the shallow `ρ_ℂ` approximant.
    pub relu_degree: usize,
    /// Smallest `ρ_ℂ` budget the deep pipeline requests; the share
    /// `ε / (2 Σ|α_j|)` is usually far below what a polynomial reaches.
    pub relu_eps_floor: f64,
    /// Refit the ridge readout over the realised complex ridges.
    pub recalibrate: bool,
    pub check_universality: bool,
    pub family: FamilyConfig,
    pub relu: ReluConfig,
    pub record_timing: bool,
    pub seed: u64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            width: 128,
            ridge_lambda: 1e-6,
            fit_points_per_axis: None,
            test_points_per_axis: None,
            eps: 0.15,
            relu_degree: 6,
            relu_eps_floor: 0.05,
            recalibrate: true,
            check_universality: true,
            family: FamilyConfig::default(),
            relu: ReluConfig::default(),
            record_timing: false,
            seed: 0,
        }
    }
}

impl LiftConfig {
    fn grids(&self, domain: &Domain) -> Result<(Grid, Grid)> {
        let (fit, test) = match domain.dim() {
            1 => (32, 65),
            2 => (13, 12),
            _ => (7, 6),
        };
        let fit = make_grid(&domain.center, domain.radius, self.fit_points_per_axis.unwrap_or(fit), &ExceptionalSet::empty())?;
        let test = held_out_grid(domain, self.test_points_per_axis.unwrap_or(test), &fit)?;
        Ok((fit, test))
    }
}

impl LiftConfig {
    /// Defaults for [`synthesize_deep`]: every ridge carries a full copy of
    /// the deep `ρ_ℂ` approximant, so fewer ridges are drawn.
    pub fn deep() -> Self {
        Self { width: 32, ..Self::default() }
    }
}

/// Ridges with relative weight below this are dropped.
const RIDGE_PRUNE: f64 = 1e-9;

/// Shallow approximant on `ℂ^d`: real ridge network on `ℝ^{2d}`, complex
/// ridge weights, and a shallow `ρ_ℂ` approximant built from σ.
pub fn lift_dimension(
    sigma: &ActivationSpec,
    target: &Target,
    domain: &Domain,
    cfg: &LiftConfig,
) -> Result<(ShallowNetwork<f64>, ApproximationCertificate)> {
    let start = Instant::now();
    domain.validate()?;
    if cfg.check_universality {
        require_verdict(sigma, false)?;
    }
    let d = domain.dim();
    let (fit, test) = cfg.grids(domain)?;
    let ridges = Ridges::draw(d, cfg.width, cfg.seed);
    let (c0, alpha) = fit_ridges(&ridges, domain, &fit, target, cfg.ridge_lambda)?;
    let stage1 = |p: &[C64]| -> Result<C64> {
        let v = to_unit(p, domain);
        Ok(c0 + (0..ridges.len()).map(|j| alpha[j] * ridges.argument(j, &v).max(0.0)).sum::<C64>())
    };
    let stage1_errors = measure(domain, &test, target, stage1)?;
    let mut stages = BTreeMap::new();
    let mut failures = Vec::new();
    stages.insert("real_stage_sup_error".to_string(), stage1_errors.sup);
    if stage1_errors.sup > cfg.eps / 2.0 {
        failures.push(format!(
            "real stage: sup error {:.3e} exceeds budget {:.3e}",
            stage1_errors.sup,
            cfg.eps / 2.0
        ));
    }
    let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..ridges.len()).filter(|&j| alpha[j].norm() > RIDGE_PRUNE * amax).collect();

    // Shallow φ ≈ ρ_ℂ on the disc of radius C containing all ridge arguments.
    let c = ridges.bound();
    let mut phi = ShallowNetwork::constant(1, C64::zero());
    if !keep.is_empty() {
        let monomials = square_basis(cfg.relu_degree);
        let disc = make_grid(&[C64::zero()], 1.0, 25, &ExceptionalSet::empty())?;
        let units: Vec<C64> = disc.scalars()?.to_vec();
        let values: Vec<C64> = units.iter().map(|u| C64::new((u.re * c).max(0.0), 0.0)).collect();
        let chk = make_grid(&[C64::zero()], 1.0, 24, &ExceptionalSet::empty())?;
        let chk_u: Vec<C64> = chk.scalars()?.to_vec();
        let chk_v: Vec<C64> = chk_u.iter().map(|u| C64::new((u.re * c).max(0.0), 0.0)).collect();
        let fitf = fit_family(sigma, &monomials, &units, &values, (&chk_u, &chk_v), &cfg.family)?;
        stages.insert("relu_approximant_sup_error".to_string(), fitf.residual);
        let readout = fitf.family.combine(&fitf.coefficients);
        phi = fitf.family.network(fitf.constant, &readout, c);
    }

    // Complex ridges g_j(u) = φ(γ_j + w_jᵀu), u the unit-ball coordinate.
    let ridge_net = |j: usize| -> ShallowNetwork<f64> {
        let w = ridges.complex_weights(j);
        let b = C64::new(ridges.offsets[j], 0.0);
        let mut out = ShallowNetwork::constant(d, phi.constant);
        for t in &phi.terms {
            let v = t.weights[0];
            out.push(t.coefficient, w.iter().map(|&wk| v * wk).collect(), t.bias + v * b);
        }
        out
    };
    let mut constant = c0;
    let mut coeffs: Vec<C64> = keep.iter().map(|&j| alpha[j]).collect();
    if cfg.recalibrate && !keep.is_empty() {
        let units: Vec<Vec<C64>> = fit.iter().map(|p| to_unit(p, domain)).collect();
        let mut features = vec![vec![C64::new(1.0, 0.0); units.len()]];
        for &j in &keep {
            let g = ridge_net(j);
            features.push(units.iter().map(|u| g.eval(sigma, u)).collect::<Result<Vec<_>>>()?);
        }
        let rhs: Vec<C64> = fit.iter().map(|p| target.eval(p)).collect();
        let sol = refit(&features, &rhs)?;
        constant = sol[0];
        coeffs = sol[1..].to_vec();
    }
    let mut net = ShallowNetwork::constant(d, constant);
    for i in prune(&coeffs) {
        let a = coeffs[i];
        let g = ridge_net(keep[i]);
        net.constant += a * g.constant;
        for t in &g.terms {
            net.push(a * t.coefficient, t.weights.clone(), t.bias);
        }
    }
    let net = net.rescaled_input(&domain.center, domain.radius).merged();
    let errors = measure(domain, &test, target, |p| net.eval(sigma, p))?;
    let cert = ApproximationCertificate {
        target_name: target.name().to_string(),
        activation_name: sigma.name.to_string(),
        domain: domain.clone(),
        test_grid_size: errors.count,
        sup_error: errors.sup,
        l1_error: errors.l1,
        network_size: NetworkSize { depth: 1, total_neurons: net.terms.len() },
        wall_time: cfg.record_timing.then(|| start.elapsed().as_secs_f64()),
        seed: cfg.seed,
        stages,
        failures,
        library_version: VERSION.to_string(),
        config_echo: serde_json::json!({ "lift": echo(cfg) }),
    };
    Ok((net, cert))
}

/// Indices of the coefficients that survive relative pruning.
fn prune(coeffs: &[C64]) -> Vec<usize> {
    let amax = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    (0..coeffs.len()).filter(|&i| coeffs[i].norm() > RIDGE_PRUNE * amax).collect()
}

/// Network of the given depth with constant output `c`.
fn constant_network(d: usize, depth: usize, c: C64) -> Result<NetworkWeights<f64>> {
    let mut layers = vec![Layer::new(CMatrix::zeros(1, d), vec![C64::zero()])?];
    for _ in 1..depth {
        layers.push(Layer::new(CMatrix::zeros(1, 1), vec![C64::zero()])?);
    }
    layers.push(Layer::new(CMatrix::zeros(1, 1), vec![c])?);
    NetworkWeights::new(d, layers)
}

/// Deep approximant with exactly `depth` hidden layers: ridge functions of
/// a depth-`L` `ρ_ℂ` approximant, assembled with the network algebra.
pub fn synthesize_deep(
    sigma: &ActivationSpec,
    target: &Target,
    depth: usize,
    domain: &Domain,
    cfg: &LiftConfig,
) -> Result<(NetworkWeights<f64>, ApproximationCertificate)> {
    let start = Instant::now();
    domain.validate()?;
    if depth < 2 {
        return Err(Error::InvalidArgument(format!("deep synthesis needs L ≥ 2, got {depth}")));
    }
    if cfg.check_universality {
        require_verdict(sigma, true)?;
    }
    let d = domain.dim();
    let (fit, test) = cfg.grids(domain)?;
    let ridges = Ridges::draw(d, cfg.width, cfg.seed);
    let (c0, alpha) = fit_ridges(&ridges, domain, &fit, target, cfg.ridge_lambda)?;
    let stage1 = |p: &[C64]| -> Result<C64> {
        let v = to_unit(p, domain);
        Ok(c0 + (0..ridges.len()).map(|j| alpha[j] * ridges.argument(j, &v).max(0.0)).sum::<C64>())
    };
    let stage1_errors = measure(domain, &test, target, stage1)?;
    let mut stages = BTreeMap::new();
    let mut failures = Vec::new();
    stages.insert("real_stage_sup_error".to_string(), stage1_errors.sup);
    if stage1_errors.sup > cfg.eps / 2.0 {
        failures.push(format!("real stage: sup error {:.3e} exceeds budget {:.3e}", stage1_errors.sup, cfg.eps / 2.0));
    }
    let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..ridges.len()).filter(|&j| alpha[j].norm() > RIDGE_PRUNE * amax).collect();

    let c = ridges.bound();
    let a_sum: f64 = keep.iter().map(|&j| alpha[j].norm()).sum::<f64>().max(1.0);
    let requested = cfg.eps / (2.0 * a_sum);
    let relu_eps = requested.max(cfg.relu_eps_floor);
    stages.insert("relu_c_budget_requested".to_string(), requested);
    stages.insert("relu_c_budget_used".to_string(), relu_eps);
    let (gamma, report) = relu_c_of_depth(sigma, depth, c, relu_eps, &cfg.relu)?;
    stages.insert("relu_c_poly_error".to_string(), report.poly_error);
    stages.insert("relu_c_outer_error".to_string(), report.outer_error);
    stages.insert("relu_c_inner_error".to_string(), report.inner_error);

    // Ridge j in the original coordinates: Γ(γ_j + w_jᵀ(z − center)/R).
    let ridge_net = |j: usize| -> Result<NetworkWeights<f64>> {
        let w: Vec<C64> = ridges.complex_weights(j).iter().map(|&wk| wk / domain.radius).collect();
        let shift: C64 = w.iter().zip(&domain.center).map(|(&wk, &ck)| wk * ck).sum();
        lift_affine(&gamma, &w, C64::new(ridges.offsets[j], 0.0) - shift)
    };
    let mut constant = c0;
    let mut coeffs: Vec<C64> = keep.iter().map(|&j| alpha[j]).collect();
    let nets: Vec<NetworkWeights<f64>> = keep.iter().map(|&j| ridge_net(j)).collect::<Result<_>>()?;
    if cfg.recalibrate && !keep.is_empty() {
        let mut features = vec![vec![C64::new(1.0, 0.0); fit.len()]];
        for g in &nets {
            features.push(fit.iter().map(|p| g.eval(sigma, p)).collect::<Result<Vec<_>>>()?);
        }
        let rhs: Vec<C64> = fit.iter().map(|p| target.eval(p)).collect();
        let sol = refit(&features, &rhs)?;
        constant = sol[0];
        coeffs = sol[1..].to_vec();
    }
    let kept = prune(&coeffs);
    let network = if kept.is_empty() {
        constant_network(d, depth, constant)?
    } else {
        let parts: Vec<&NetworkWeights<f64>> = kept.iter().map(|&i| &nets[i]).collect();
        let alphas: Vec<C64> = kept.iter().map(|&i| coeffs[i]).collect();
        linear_combination(&parts, &alphas, constant)?
    };
    let errors = measure(domain, &test, target, |p| network.eval(sigma, p))?;
    let cert = ApproximationCertificate {
        target_name: target.name().to_string(),
        activation_name: sigma.name.to_string(),
        domain: domain.clone(),
        test_grid_size: errors.count,
        sup_error: errors.sup,
        l1_error: errors.l1,
        network_size: NetworkSize { depth: network.hidden_layers(), total_neurons: network.total_neurons() },
        wall_time: cfg.record_timing.then(|| start.elapsed().as_secs_f64()),
        seed: cfg.seed,
        stages,
        failures,
        library_version: VERSION.to_string(),
        config_echo: serde_json::json!({ "depth": depth, "deep": echo(cfg) }),
    };
    Ok((network, cert))
}
