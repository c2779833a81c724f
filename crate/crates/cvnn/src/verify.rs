//! Empirical checks of the negative results: differential identities of
//! random networks, and error floors of fixed-feature least squares.

use std::fmt;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::classifier::{classifier_grid, detect_holomorphy, ClassifierConfig, Holomorphy};
use crate::complexcore::{is_finite, make_grid, seeded_rng, ActivationSpec, ExceptionalSet, Grid};
use crate::constructor::Domain;
use crate::linalg::{least_squares, Regularization};
use crate::network::{CMatrix, Layer, NetworkWeights, ShallowNetwork};
use crate::targets::Target;
use crate::wirtinger::{Lattice, StencilConfig};
use crate::{Error, Result, C64, VERSION};

/// Differential identity checked on random networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    /// `∂̄Φ ≡ 0`.
    DbarVanishes,
    /// `∂Φ ≡ 0`.
    DVanishes,
    /// `Δ^m Φ ≡ 0`.
    LaplacianPowerVanishes(usize),
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DbarVanishes => write!(f, "dbar_vanishes"),
            Self::DVanishes => write!(f, "d_vanishes"),
            Self::LaplacianPowerVanishes(m) => write!(f, "laplacian_power_vanishes({m})"),
        }
    }
}

impl Serialize for InvariantKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for InvariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dbar_vanishes" => Ok(Self::DbarVanishes),
            "d_vanishes" => Ok(Self::DVanishes),
            _ => {
                let m = s
                    .strip_prefix("laplacian_power_vanishes(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|m| m.parse::<usize>().ok())
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown invariant `{s}`")))?;
                Ok(Self::LaplacianPowerVanishes(m))
            }
        }
    }
}

/// Settings of [`check_network_invariant_with`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantConfig {
    /// Neurons per hidden layer of the random networks.
    pub width: usize,
    /// Entries of every weight matrix and bias are uniform in this disc.
    pub weight_radius: f64,
    /// Points whose stencil brings a pre-activation this close to a pole
    /// are skipped.
    pub pole_clearance: f64,
    /// Points whose stencil produces a larger pre-activation are skipped:
    /// beyond it σ of an entire function has lost its digits to round-off
    /// in the argument.
    pub max_preactivation: f64,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        Self { width: 3, weight_radius: 2.0, pole_clearance: 0.25, max_preactivation: 50.0 }
    }
}

/// Largest residual of an identity over random networks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub activation_name: String,
    pub invariant_kind: InvariantKind,
    pub depth: usize,
    /// `|residual| / max(1, max |Φ|)` over the stencil, maximised over all
    /// points and networks.
    pub max_residual: f64,
    pub grid: Grid,
    pub networks_tested: usize,
    /// Grid points skipped because a stencil sample hit a singularity.
    pub skipped_points: usize,
    pub seed: u64,
    pub library_version: String,
    pub config_echo: InvariantConfig,
}

impl InvariantReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

fn uniform_disc<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z * radius;
        }
    }
}

/// Network with `depth` hidden layers of the given width and every entry
/// uniform in the disc of radius `radius`.
pub fn random_network<R: Rng>(rng: &mut R, input_dim: usize, depth: usize, width: usize, radius: f64) -> Result<NetworkWeights<f64>> {
    if depth == 0 || width == 0 || input_dim == 0 {
        return Err(Error::InvalidArgument("random networks need positive depth, width and input dimension".into()));
    }
    let mut layers = Vec::with_capacity(depth + 1);
    let mut cols = input_dim;
    for k in 0..=depth {
        let rows = if k == depth { 1 } else { width };
        let dense: Vec<C64> = (0..rows * cols).map(|_| uniform_disc(rng, radius)).collect();
        let b = (0..rows).map(|_| uniform_disc(rng, radius)).collect();
        layers.push(Layer::new(CMatrix::from_dense(rows, cols, &dense)?, b)?);
        cols = rows;
    }
    NetworkWeights::new(input_dim, layers)
}

/// Forward pass that refuses pre-activations near a pole of σ or beyond
/// the magnitude cap.
fn guarded_eval(net: &NetworkWeights<f64>, sigma: &ActivationSpec, z: &[C64], cfg: &InvariantConfig) -> Result<C64> {
    let layers = net.layers();
    let mut x = z.to_vec();
    for (k, layer) in layers.iter().enumerate() {
        let mut pre = layer.a.mul_vec(&x);
        for (p, b) in pre.iter_mut().zip(&layer.b) {
            *p += b;
        }
        if k + 1 == layers.len() {
            return Ok(pre[0]);
        }
        x = pre
            .into_iter()
            .map(|p| {
                if sigma.pole_distance(p) < cfg.pole_clearance || p.norm() > cfg.max_preactivation {
                    Err(Error::singular_at(p))
                } else {
                    sigma.eval(p)
                }
            })
            .collect::<Result<_>>()?;
    }
    unreachable!("networks end with an output layer")
}

/// Stencil settings for a residual of total order `order`. First-order
/// operators get a wide high-accuracy stencil; for holomorphic inputs the
/// leading truncation terms of `∂̄` cancel.
fn residual_stencil(kind: InvariantKind) -> (usize, usize, StencilConfig) {
    match kind {
        InvariantKind::DbarVanishes => (0, 1, StencilConfig { step: Some(1e-4), accuracy: 8 }),
        InvariantKind::DVanishes => (1, 0, StencilConfig { step: Some(1e-4), accuracy: 8 }),
        InvariantKind::LaplacianPowerVanishes(m) => (m, m, StencilConfig::for_order(2 * m)),
    }
}

/// Scale-free residual `|L Φ(z0)| / max(1, max |Φ|)` of the identity.
fn residual_at<F>(f: &F, z0: C64, kind: InvariantKind) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    let (m, l, cfg) = residual_stencil(kind);
    residual_with(f, z0, kind, m, l, cfg)
}

fn residual_with<F>(f: &F, z0: C64, kind: InvariantKind, m: usize, l: usize, cfg: StencilConfig) -> Result<f64>
where
    F: Fn(C64) -> Result<C64>,
{
    let mut lattice = Lattice::new(f, z0, cfg.step_at(z0));
    let mut value = lattice.derivative(m, l, cfg.accuracy)?;
    if let InvariantKind::LaplacianPowerVanishes(p) = kind {
        value *= 4f64.powi(p as i32);
    }
    Ok(value.norm() / lattice.max_abs().max(1.0))
}

/// [`check_network_invariant_with`] at the default configuration.
pub fn check_network_invariant(
    sigma: &ActivationSpec,
    depth: usize,
    kind: InvariantKind,
    grid: &Grid,
    trials: usize,
    seed: u64,
) -> Result<InvariantReport> {
    check_network_invariant_with(sigma, depth, kind, grid, trials, seed, &InvariantConfig::default())
}

/// Evaluates a differential identity on `trials` seeded random networks of
/// the given depth at every grid point and reports the largest residual.
pub fn check_network_invariant_with(
    sigma: &ActivationSpec,
    depth: usize,
    kind: InvariantKind,
    grid: &Grid,
    trials: usize,
    seed: u64,
    cfg: &InvariantConfig,
) -> Result<InvariantReport> {
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: grid.dim() });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut max_residual: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..trials {
        let net = random_network(&mut rng, 1, depth, cfg.width, cfg.weight_radius)?;
        let f = |z: C64| guarded_eval(&net, sigma, &[z], cfg);
        for &z0 in grid.scalars()? {
            match residual_at(&f, z0, kind) {
                Ok(r) => max_residual = max_residual.max(r),
                Err(_) => skipped += 1,
            }
        }
    }
    Ok(InvariantReport {
        activation_name: sigma.name.to_string(),
        invariant_kind: kind,
        depth,
        max_residual,
        grid: grid.clone(),
        networks_tested: trials,
        skipped_points: skipped,
        seed,
        library_version: VERSION.to_string(),
        config_echo: cfg.clone(),
    })
}

/// One row of a [`FloorTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorRow {
    pub width: usize,
    pub sup_error: f64,
    pub l1_error: f64,
}

/// Errors of the best fixed-feature network per width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorTable {
    pub rows: Vec<FloorRow>,
    pub activation_name: String,
    pub target_name: String,
    pub fit_method: String,
    pub domain: Domain,
    pub seed: u64,
    pub library_version: String,
    pub config_echo: FloorConfig,
}

impl FloorTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialise")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("width,sup_error,l1_error\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e}\n", r.width, r.sup_error, r.l1_error));
        }
        out
    }

    /// Smallest `l1_error` over the table.
    pub fn min_l1(&self) -> f64 {
        self.rows.iter().map(|r| r.l1_error).fold(f64::INFINITY, f64::min)
    }
}

/// Settings of the error-floor experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorConfig {
    pub fit_points_per_axis: usize,
    pub test_points_per_axis: usize,
    /// Inner weights and biases are uniform in this disc.
    pub weight_radius: f64,
    /// Pre-activations closer than this to a pole reject the neuron.
    pub pole_clearance: f64,
    /// Redraws allowed per neuron before giving up.
    pub max_retries: usize,
    /// Relative singular-value cut-off of the readout least squares.
    pub rcond: f64,
    /// Largest lattice step of the `∂̄` stencil applied to the best fit; it
    /// shrinks near poles of the fitted neurons.
    pub dbar_step: f64,
}

impl Default for FloorConfig {
    fn default() -> Self {
        Self {
            fit_points_per_axis: 32,
            test_points_per_axis: 65,
            weight_radius: 2.0,
            pole_clearance: 1e-3,
            max_retries: 100,
            rcond: 1e-10,
            dbar_step: 1e-2,
        }
    }
}

/// The `∂̄` lattice spans `±4h`; keeping it well inside the disc of
/// analyticity bounds the truncation error.
const DBAR_CLEARANCE_RATIO: f64 = 32.0;

const FIT_METHOD: &str = "fixed random inner weights, outer weights by truncated-SVD least squares";

struct Grids {
    fit: Grid,
    test: Grid,
}

fn floor_grids(domain: &Domain, cfg: &FloorConfig) -> Result<Grids> {
    let none = ExceptionalSet::empty();
    let fit = make_grid(&domain.center, domain.radius, cfg.fit_points_per_axis, &none)?;
    let test = make_grid(&domain.center, domain.radius, cfg.test_points_per_axis, &none)?;
    Ok(Grids { fit, test })
}

/// Draws one admissible neuron `σ(wᵀz + b)`: every pre-activation on the
/// grids must stay clear of the singularities of σ.
fn draw_neuron<R: Rng>(rng: &mut R, sigma: &ActivationSpec, grids: &Grids, cfg: &FloorConfig) -> Result<(Vec<C64>, C64)> {
    let d = grids.fit.dim();
    for _ in 0..=cfg.max_retries {
        let w: Vec<C64> = (0..d).map(|_| uniform_disc(rng, cfg.weight_radius)).collect();
        let b = uniform_disc(rng, cfg.weight_radius);
        let admissible = grids.fit.iter().chain(grids.test.iter()).all(|p| {
            let pre = b + w.iter().zip(p).map(|(wk, zk)| wk * zk).sum::<C64>();
            sigma.pole_distance(pre) >= cfg.pole_clearance && sigma.eval(pre).is_ok_and(is_finite)
        });
        if admissible {
            return Ok((w, b));
        }
    }
    Err(Error::Precondition(format!(
        "no admissible neuron for `{}` after {} draws",
        sigma.name, cfg.max_retries
    )))
}

/// Least-squares network of the given width over seeded random features.
fn best_fit<R: Rng>(
    rng: &mut R,
    sigma: &ActivationSpec,
    target: &Target,
    width: usize,
    grids: &Grids,
    cfg: &FloorConfig,
) -> Result<ShallowNetwork<f64>> {
    let neurons: Vec<(Vec<C64>, C64)> = (0..width).map(|_| draw_neuron(rng, sigma, grids, cfg)).collect::<Result<_>>()?;
    let cols = width + 1;
    let rows = grids.fit.len();
    let mut matrix = Vec::with_capacity(rows * cols);
    let mut rhs = Vec::with_capacity(rows);
    for p in grids.fit.iter() {
        matrix.push(C64::new(1.0, 0.0));
        for (w, b) in &neurons {
            let pre = b + w.iter().zip(p).map(|(wk, zk)| wk * zk).sum::<C64>();
            matrix.push(sigma.eval(pre)?);
        }
        rhs.push(target.eval(p));
    }
    let sol = least_squares(rows, cols, &matrix, &rhs, Regularization::Truncate { rcond: cfg.rcond })?.coeffs;
    let mut net = ShallowNetwork::constant(grids.fit.dim(), sol[0]);
    for ((w, b), &a) in neurons.into_iter().zip(&sol[1..]) {
        net.push(a, w, b);
    }
    Ok(net)
}

fn test_errors(net: &ShallowNetwork<f64>, sigma: &ActivationSpec, target: &Target, test: &Grid, domain: &Domain) -> Result<(f64, f64)> {
    let mut sup: f64 = 0.0;
    let mut total = 0.0;
    for p in test.iter() {
        let e = (target.eval(p) - net.eval(sigma, p)?).norm();
        sup = sup.max(e);
        total += e;
    }
    let d = domain.dim() as i32;
    let volume = std::f64::consts::PI.powi(d) * domain.radius.powi(2 * d) / (1..=d).product::<i32>() as f64;
    Ok((sup, total / test.len() as f64 * volume))
}

/// [`error_floor_experiment_with`] at the default configuration.
pub fn error_floor_experiment(sigma: &ActivationSpec, target: &Target, widths: &[usize], domain: &Domain, seed: u64) -> Result<FloorTable> {
    error_floor_experiment_with(sigma, target, widths, domain, seed, &FloorConfig::default())
}

/// Sup and `L¹` errors of fixed-random-feature least-squares networks, one
/// row per width. Each width draws fresh features from one seeded stream.
pub fn error_floor_experiment_with(
    sigma: &ActivationSpec,
    target: &Target,
    widths: &[usize],
    domain: &Domain,
    seed: u64,
    cfg: &FloorConfig,
) -> Result<FloorTable> {
    if widths.is_empty() {
        return Err(Error::InvalidArgument("the floor experiment needs at least one width".into()));
    }
    if widths.windows(2).any(|w| w[0] >= w[1]) || widths[0] == 0 {
        return Err(Error::InvalidArgument("widths must be positive and strictly increasing".into()));
    }
    let grids = floor_grids(domain, cfg)?;
    let mut rng = seeded_rng(seed);
    let mut rows = Vec::with_capacity(widths.len());
    for &width in widths {
        let net = best_fit(&mut rng, sigma, target, width, &grids, cfg)?;
        let (sup_error, l1_error) = test_errors(&net, sigma, target, &grids.test, domain)?;
        rows.push(FloorRow { width, sup_error, l1_error });
    }
    Ok(FloorTable {
        rows,
        activation_name: sigma.name.to_string(),
        target_name: target.name().to_string(),
        fit_method: FIT_METHOD.to_string(),
        domain: domain.clone(),
        seed,
        library_version: VERSION.to_string(),
        config_echo: cfg.clone(),
    })
}

/// Largest `|∂̄Φ|` of the least-squares network of the given width over
/// the test grid, relative to `max(1, max |Φ|)` on the stencils.
///
/// Requires a holomorphic σ; the network is then holomorphic and the result
/// measures only discretisation error.
pub fn holomorphy_of_best_fit(sigma: &ActivationSpec, target: &Target, width: usize, domain: &Domain, seed: u64) -> Result<f64> {
    holomorphy_of_best_fit_with(sigma, target, width, domain, seed, &FloorConfig::default())
}

pub fn holomorphy_of_best_fit_with(
    sigma: &ActivationSpec,
    target: &Target,
    width: usize,
    domain: &Domain,
    seed: u64,
    cfg: &FloorConfig,
) -> Result<f64> {
    let ccfg = ClassifierConfig::default();
    let (grid, _) = classifier_grid(sigma, &ccfg)?;
    if !matches!(detect_holomorphy(sigma, &grid, ccfg.tol)?, Holomorphy::Holomorphic | Holomorphy::Both) {
        return Err(Error::Precondition(format!("`{}` is not holomorphic", sigma.name)));
    }
    if domain.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: domain.dim() });
    }
    let grids = floor_grids(domain, cfg)?;
    let mut rng = seeded_rng(seed);
    let net = best_fit(&mut rng, sigma, target, width, &grids, cfg)?;
    let f = |z: C64| net.eval(sigma, &[z]);
    let mut worst: f64 = 0.0;
    for &z0 in grids.test.scalars()? {
        let clearance = net
            .terms
            .iter()
            .map(|t| sigma.pole_distance(t.bias + t.weights[0] * z0) / t.weights[0].norm())
            .fold(f64::INFINITY, f64::min);
        let step = cfg.dbar_step.min(clearance / DBAR_CLEARANCE_RATIO);
        let stencil = StencilConfig { step: Some(step), accuracy: 8 };
        worst = worst.max(residual_with(&f, z0, InvariantKind::DbarVanishes, 0, 1, stencil)?);
    }
    Ok(worst)
}
