//! Numerical universality verdicts.
//!
//! Shallow networks are universal exactly when the activation is not almost
//! polyharmonic; deep networks are universal exactly when it is neither a
//! polynomial in `(z, z̄)`, nor holomorphic, nor antiholomorphic. Each
//! property is tested with Wirtinger stencils on a sampling grid. Stencils
//! whose support comes close to the activation's non-smooth set read the
//! mollified activation instead of the raw one.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complexcore::{make_grid, Annotation, ActivationSpec, Grid};
use crate::linalg::{least_squares, Regularization};
use crate::wirtinger::{mollify, Lattice, Mollified, MollifierSpec, StencilConfig};
use crate::{Error, Result, C64, VERSION};

/// Three-valued verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Indeterminate,
}

/// Outcome of the holomorphy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Holomorphy {
    Holomorphic,
    Antiholomorphic,
    /// Both derivatives vanish: the function is constant.
    Both,
    Neither,
}

/// Tolerances and grids of the classifier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierConfig {
    /// Relative tolerance for every vanishing test.
    pub tol: f64,
    pub grid_radius: f64,
    pub points_per_axis: usize,
    pub mollifier_epsilon: f64,
    pub mollifier_points: usize,
    /// Largest Laplacian power tested.
    pub max_order: usize,
    /// Largest polynomial degree tested.
    pub max_degree: usize,
    /// Minimum distance from isolated poles.
    pub pole_clearance: f64,
    /// Probe points per non-smooth piece and side.
    pub probes_per_piece: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            grid_radius: 2.0,
            points_per_axis: 33,
            mollifier_epsilon: 0.05,
            mollifier_points: 64,
            max_order: 4,
            max_degree: 4,
            pole_clearance: 0.5,
            probes_per_piece: 16,
            seed: 0,
        }
    }
}

/// Result of [`detect_polyharmonic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyharmonicFinding {
    pub found: bool,
    pub order: Option<usize>,
    /// Normalised `max |Δ^m σ̃|` for `m = 1, …, max_order`.
    pub residuals: Vec<f64>,
}

/// Result of [`detect_polynomial`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialFinding {
    pub found: bool,
    pub degree: Option<usize>,
    /// Least degree passing the derivative-vanishing test alone.
    pub derivative_degree: Option<usize>,
    /// Least degree passing the global fit test alone.
    pub fit_degree: Option<usize>,
    pub derivative_residuals: Vec<f64>,
    pub fit_residuals: Vec<f64>,
}

/// Echo of everything that determined a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub library_version: String,
    pub classifier: ClassifierConfig,
    pub grid_points: usize,
    pub probe_points: usize,
    pub grid_guard: f64,
    pub mollifier_normalization: f64,
}

/// Universality verdicts with the numerical evidence behind them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub activation_name: String,
    pub polyharmonic_order: Option<usize>,
    pub holomorphic: bool,
    pub antiholomorphic: bool,
    pub polynomial_degree: Option<usize>,
    pub ae_equal_but_discontinuous: bool,
    pub shallow_universal: Verdict,
    pub deep_universal: Verdict,
    pub evidence: BTreeMap<String, f64>,
    pub config_echo: ConfigEcho,
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise")
    }
}

/// Activation as seen by the stencils: raw where smooth, mollified near the
/// declared non-smooth set.
struct Smoothing<'a> {
    sigma: &'a ActivationSpec,
    mollified: Option<Mollified>,
    epsilon: f64,
}

impl<'a> Smoothing<'a> {
    fn new(sigma: &'a ActivationSpec, cfg: &ClassifierConfig) -> Result<Self> {
        let spec = MollifierSpec::new(cfg.mollifier_epsilon, cfg.mollifier_points)?;
        let mollified = (!sigma.is_smooth()).then(|| mollify(sigma, spec));
        Ok(Self { sigma, mollified, epsilon: cfg.mollifier_epsilon })
    }

    /// Whether a stencil of radius `extent` about `center` must use the
    /// mollified activation.
    fn needs_mollifier(&self, center: C64, extent: f64) -> bool {
        self.mollified.is_some() && self.sigma.nonsmooth_set.distance(center) <= extent + self.epsilon
    }

    fn eval(&self, z: C64, mollified: bool) -> Result<C64> {
        match (&self.mollified, mollified) {
            (Some(m), true) => m.eval(z),
            _ => self.sigma.eval(z),
        }
    }
}

/// Which quantities an analysis pass computes.
#[derive(Debug, Clone, Copy)]
struct Needs {
    max_order: usize,
    max_degree: Option<usize>,
    holomorphy: bool,
}

/// Per-grid aggregates of one analysis pass.
#[derive(Debug, Clone, Default)]
struct Analysis {
    laplacian: Vec<f64>,
    degree_jets: Vec<f64>,
    d_max: f64,
    dbar_max: f64,
    scale: f64,
    failures: usize,
    points: usize,
}

fn stencil_groups(needs: &Needs) -> BTreeMap<usize, Vec<(usize, usize)>> {
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut add = |m: usize, l: usize| {
        let k = (m + l).max(2);
        let entry = groups.entry(k).or_default();
        if !entry.contains(&(m, l)) {
            entry.push((m, l));
        }
    };
    if needs.holomorphy {
        add(1, 0);
        add(0, 1);
    }
    for m in 1..=needs.max_order {
        add(m, m);
    }
    if let Some(dmax) = needs.max_degree {
        for k in 1..=dmax + 1 {
            for a in 0..=k {
                add(a, k - a);
            }
        }
    }
    // Orders 1 and 2 share one lattice.
    if let Some(first) = groups.remove(&1) {
        groups.entry(2).or_default().extend(first);
    }
    groups
}

fn analyze(sigma: &ActivationSpec, grid: &Grid, cfg: &ClassifierConfig, needs: Needs) -> Result<Analysis> {
    let points = grid.scalars()?;
    let smoothing = Smoothing::new(sigma, cfg)?;
    let groups = stencil_groups(&needs);
    let mut out = Analysis {
        laplacian: vec![0.0; needs.max_order],
        degree_jets: vec![0.0; needs.max_degree.map_or(0, |d| d + 1)],
        scale: 1.0,
        points: points.len(),
        ..Default::default()
    };
    for &z0 in points {
        let mut point_ok = true;
        let mut local = out.clone();
        for (&k, entries) in &groups {
            let sc = StencilConfig::for_order(k);
            let h = sc.step.expect("explicit step");
            let half = entries
                .iter()
                .map(|&(m, l)| crate::wirtinger::wirtinger_stencil(m, l, sc.accuracy))
                .flat_map(|s| s.into_iter().map(|((i, j), _)| i.unsigned_abs().max(j.unsigned_abs())))
                .max()
                .unwrap_or(0) as f64;
            let extent = half * h * std::f64::consts::SQRT_2;
            let use_moll = smoothing.needs_mollifier(z0, extent);
            let f = |z: C64| smoothing.eval(z, use_moll);
            let mut lattice = Lattice::new(&f, z0, h);
            for &(m, l) in entries {
                let v = match lattice.derivative(m, l, sc.accuracy) {
                    Ok(v) => v.norm(),
                    Err(_) => {
                        point_ok = false;
                        break;
                    }
                };
                if m == l && m >= 1 && m <= needs.max_order {
                    let lap = v * 4f64.powi(m as i32);
                    local.laplacian[m - 1] = local.laplacian[m - 1].max(lap);
                }
                if (m, l) == (1, 0) {
                    local.d_max = local.d_max.max(v);
                }
                if (m, l) == (0, 1) {
                    local.dbar_max = local.dbar_max.max(v);
                }
                if let Some(dmax) = needs.max_degree {
                    let order = m + l;
                    if order >= 1 && order <= dmax + 1 {
                        local.degree_jets[order - 1] = local.degree_jets[order - 1].max(v);
                    }
                }
            }
            if !point_ok {
                break;
            }
            local.scale = local.scale.max(lattice.max_abs());
        }
        if point_ok {
            out = local;
        } else {
            out.failures += 1;
        }
    }
    Ok(out)
}

/// Sampling grid of the classifier: regular grid avoiding the discontinuity
/// set and poles, plus probes hugging the non-smooth set.
pub fn classifier_grid(sigma: &ActivationSpec, cfg: &ClassifierConfig) -> Result<(Grid, usize)> {
    let base = make_grid(&[C64::new(0.0, 0.0)], cfg.grid_radius, cfg.points_per_axis, &sigma.discontinuity_set)?;
    let clear = |z: C64| sigma.pole_distance(z) >= cfg.pole_clearance;
    let base = base.filtered(|p| clear(p[0]))?;
    if sigma.is_smooth() {
        return Ok((base, 0));
    }
    let probes: Vec<C64> = sigma
        .nonsmooth_set
        .probe_points(cfg.grid_radius, cfg.mollifier_epsilon / 2.0, cfg.probes_per_piece)
        .into_iter()
        .filter(|&z| clear(z))
        .collect();
    let grid = base.with_extra_points(&probes)?;
    let added = grid.len() - base.len();
    Ok((grid, added))
}

fn least_below(residuals: &[f64], tol: f64) -> Option<usize> {
    residuals.iter().position(|&r| r < tol)
}

/// Least `m ≤ max_order` with `Δ^m σ̃ ≈ 0` on the grid.
pub fn detect_polyharmonic(sigma: &ActivationSpec, max_order: usize, grid: &Grid, tol: f64) -> Result<PolyharmonicFinding> {
    if max_order == 0 {
        return Err(Error::InvalidArgument("max_order must be at least 1".into()));
    }
    let cfg = ClassifierConfig { tol, max_order, ..Default::default() };
    let a = analyze(sigma, grid, &cfg, Needs { max_order, max_degree: None, holomorphy: false })?;
    Ok(polyharmonic_from(&a, tol))
}

fn polyharmonic_from(a: &Analysis, tol: f64) -> PolyharmonicFinding {
    let residuals: Vec<f64> = a.laplacian.iter().map(|v| v / a.scale).collect();
    let order = least_below(&residuals, tol).map(|i| i + 1);
    PolyharmonicFinding { found: order.is_some(), order, residuals }
}

/// Compares `max |∂̄σ̃|` and `max |∂σ̃|` against `tol·max(|∂σ̃|, |∂̄σ̃|, 1)`.
pub fn detect_holomorphy(sigma: &ActivationSpec, grid: &Grid, tol: f64) -> Result<Holomorphy> {
    let cfg = ClassifierConfig { tol, ..Default::default() };
    let a = analyze(sigma, grid, &cfg, Needs { max_order: 0, max_degree: None, holomorphy: true })?;
    Ok(holomorphy_from(&a, tol))
}

fn holomorphy_reference(a: &Analysis) -> f64 {
    a.d_max.max(a.dbar_max).max(1.0)
}

fn holomorphy_from(a: &Analysis, tol: f64) -> Holomorphy {
    let reference = holomorphy_reference(a);
    let holo = a.dbar_max <= tol * reference;
    let anti = a.d_max <= tol * reference;
    match (holo, anti) {
        (true, true) => Holomorphy::Both,
        (true, false) => Holomorphy::Holomorphic,
        (false, true) => Holomorphy::Antiholomorphic,
        (false, false) => Holomorphy::Neither,
    }
}

/// Least degree `D ≤ max_degree` such that every Wirtinger derivative of
/// total order `D + 1` vanishes and a total-degree-`D` least-squares fit
/// reproduces σ on the grid.
pub fn detect_polynomial(sigma: &ActivationSpec, max_degree: usize, grid: &Grid, tol: f64) -> Result<PolynomialFinding> {
    let cfg = ClassifierConfig { tol, max_degree, ..Default::default() };
    let a = analyze(sigma, grid, &cfg, Needs { max_order: 0, max_degree: Some(max_degree), holomorphy: false })?;
    polynomial_from(sigma, grid, &a, max_degree, tol)
}

fn polynomial_from(sigma: &ActivationSpec, grid: &Grid, a: &Analysis, max_degree: usize, tol: f64) -> Result<PolynomialFinding> {
    let derivative_residuals: Vec<f64> = a.degree_jets.iter().map(|v| v / a.scale).collect();
    let fit_residuals = (0..=max_degree)
        .map(|d| polynomial_fit_residual(sigma, grid, d, a.scale))
        .collect::<Result<Vec<f64>>>()?;
    let derivative_degree = least_below(&derivative_residuals, tol);
    let fit_degree = least_below(&fit_residuals, tol);
    let degree = (0..=max_degree).find(|&d| derivative_residuals[d] < tol && fit_residuals[d] < tol);
    Ok(PolynomialFinding {
        found: degree.is_some(),
        degree,
        derivative_degree,
        fit_degree,
        derivative_residuals,
        fit_residuals,
    })
}

/// `max |σ − p| / scale` for the least-squares `p` of total degree `degree`.
fn polynomial_fit_residual(sigma: &ActivationSpec, grid: &Grid, degree: usize, scale: f64) -> Result<f64> {
    let radius = grid.radius();
    let mut samples = Vec::new();
    for &z in grid.scalars()? {
        if let Ok(v) = sigma.eval(z) {
            samples.push((z, v));
        }
    }
    let basis: Vec<(usize, usize)> = (0..=degree).flat_map(|k| (0..=k).map(move |a| (a, k - a))).collect();
    let row = |z: C64| basis.iter().map(move |&(a, b)| crate::complexcore::monomial(z / radius, a, b));
    let matrix: Vec<C64> = samples.iter().flat_map(|&(z, _)| row(z)).collect();
    let rhs: Vec<C64> = samples.iter().map(|s| s.1).collect();
    let sol = least_squares(samples.len(), basis.len(), &matrix, &rhs, Regularization::Truncate { rcond: 1e-13 })?;
    let worst = samples
        .iter()
        .map(|&(z, v)| {
            let p: C64 = row(z).zip(&sol.coeffs).map(|(m, c)| m * c).sum();
            (v - p).norm()
        })
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Full classification of an activation.
pub fn classify(sigma: &ActivationSpec, cfg: &ClassifierConfig) -> Result<ClassificationReport> {
    let (grid, probes) = classifier_grid(sigma, cfg)?;
    let normalization = MollifierSpec::new(cfg.mollifier_epsilon, cfg.mollifier_points)?.normalization;
    let config_echo = ConfigEcho {
        library_version: VERSION.to_string(),
        classifier: cfg.clone(),
        grid_points: grid.len(),
        probe_points: probes,
        grid_guard: grid.guard(),
        mollifier_normalization: normalization,
    };
    let unbounded = sigma.has(Annotation::NotLocallyBounded)
        || (!sigma.locally_bounded && !sigma.has(Annotation::IsolatedPoles));
    if unbounded {
        return Ok(ClassificationReport {
            activation_name: sigma.name.to_string(),
            polyharmonic_order: None,
            holomorphic: false,
            antiholomorphic: false,
            polynomial_degree: None,
            ae_equal_but_discontinuous: false,
            shallow_universal: Verdict::Indeterminate,
            deep_universal: Verdict::Indeterminate,
            evidence: BTreeMap::new(),
            config_echo,
        });
    }

    let needs = Needs { max_order: cfg.max_order, max_degree: Some(cfg.max_degree), holomorphy: true };
    let analysis = analyze(sigma, &grid, cfg, needs)?;
    let poly_h = polyharmonic_from(&analysis, cfg.tol);
    let holo = holomorphy_from(&analysis, cfg.tol);
    let poly = polynomial_from(sigma, &grid, &analysis, cfg.max_degree, cfg.tol)?;

    let mut evidence = BTreeMap::new();
    for (m, r) in poly_h.residuals.iter().enumerate() {
        evidence.insert(format!("laplacian_power_{}", m + 1), *r);
    }
    evidence.insert("dbar_max".into(), analysis.dbar_max);
    evidence.insert("d_max".into(), analysis.d_max);
    evidence.insert("holomorphy_reference".into(), holomorphy_reference(&analysis));
    for (d, r) in poly.derivative_residuals.iter().enumerate() {
        evidence.insert(format!("polynomial_derivative_degree_{d}"), *r);
    }
    for (d, r) in poly.fit_residuals.iter().enumerate() {
        evidence.insert(format!("polynomial_fit_degree_{d}"), *r);
    }
    evidence.insert("scale".into(), analysis.scale);
    evidence.insert("stencil_failures".into(), analysis.failures as f64);

    let degraded = analysis.failures * 10 > analysis.points;
    let holomorphic = matches!(holo, Holomorphy::Holomorphic | Holomorphy::Both);
    let antiholomorphic = matches!(holo, Holomorphy::Antiholomorphic | Holomorphy::Both);
    let forbidden = poly.found || holomorphic || antiholomorphic;
    let continuous = sigma.continuous || sigma.has(Annotation::IsolatedPoles);
    let ae_equal_but_discontinuous = !continuous && (forbidden || poly_h.found);

    let shallow_universal = if poly_h.found {
        Verdict::No
    } else if degraded {
        Verdict::Indeterminate
    } else {
        Verdict::Yes
    };
    let deep_universal = if degraded {
        Verdict::Indeterminate
    } else if !forbidden {
        Verdict::Yes
    } else if continuous {
        Verdict::No
    } else if sigma.has(Annotation::DeepUniversalByComposition) {
        Verdict::Yes
    } else {
        Verdict::Indeterminate
    };

    Ok(ClassificationReport {
        activation_name: sigma.name.to_string(),
        polyharmonic_order: poly_h.order,
        holomorphic,
        antiholomorphic,
        polynomial_degree: poly.degree,
        ae_equal_but_discontinuous,
        shallow_universal,
        deep_universal,
        evidence,
        config_echo,
    })
}
