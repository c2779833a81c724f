//! Core semantic types: exceptional sets, sampling grids and the activation
//! catalog.

use num_complex::Complex;
use num_traits::{Float, FloatConst, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar, C64};

/// One component of an exceptional set in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    /// The full line `point + t·direction`, `t ∈ ℝ`.
    Line { point: C64, direction: C64 },
    /// The closed half-line `origin + t·direction`, `t ≥ 0`.
    Ray { origin: C64, direction: C64 },
    /// A single point.
    Point { at: C64 },
}

impl Piece {
    pub fn real_axis() -> Self {
        Piece::Line { point: C64::zero(), direction: C64::new(1.0, 0.0) }
    }

    pub fn imag_axis() -> Self {
        Piece::Line { point: C64::zero(), direction: C64::new(0.0, 1.0) }
    }

    pub fn ray(origin: C64, direction: C64) -> Self {
        Piece::Ray { origin, direction: direction / direction.norm() }
    }

    pub fn point(at: C64) -> Self {
        Piece::Point { at }
    }

    /// Euclidean distance from `z` to this piece.
    pub fn distance(&self, z: C64) -> f64 {
        match *self {
            Piece::Line { point, direction } => {
                let u = direction / direction.norm();
                ((z - point) * u.conj()).im.abs()
            }
            Piece::Ray { origin, direction } => {
                let u = direction / direction.norm();
                let local = (z - origin) * u.conj();
                if local.re >= 0.0 {
                    local.im.abs()
                } else {
                    local.norm()
                }
            }
            Piece::Point { at } => (z - at).norm(),
        }
    }

    /// Points at distance `offset` on both sides of the piece, spread along
    /// the part of it that meets the disc of radius `radius` about 0.
    fn probes(&self, radius: f64, offset: f64, per_piece: usize) -> Vec<C64> {
        let (start, dir, t0, t1) = match *self {
            Piece::Line { point, direction } => {
                let u = direction / direction.norm();
                let foot = point - u * (point * u.conj()).re;
                (foot, u, -radius, radius)
            }
            Piece::Ray { origin, direction } => {
                let u = direction / direction.norm();
                (origin, u, 0.0, radius + origin.norm())
            }
            Piece::Point { .. } => return Vec::new(),
        };
        let normal = dir * C64::i();
        let n = per_piece.max(2);
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..n {
            let t = t0 + (t1 - t0) * (k as f64 + 0.5) / n as f64;
            let base = start + dir * t;
            for side in [-1.0, 1.0] {
                let p = base + normal * (side * offset);
                if p.norm() <= radius {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Finite union of [`Piece`]s describing where an activation misbehaves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub pieces: Vec<Piece>,
}

impl ExceptionalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pieces(pieces: Vec<Piece>) -> Self {
        Self { pieces }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Distance from `z` to the set; `+∞` for the empty set.
    pub fn distance(&self, z: C64) -> f64 {
        self.pieces.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min)
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        if self.pieces.is_empty() {
            return "empty".into();
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| match *p {
                Piece::Line { point, direction } if point.is_zero() && direction.im == 0.0 => {
                    "real-axis".to_string()
                }
                Piece::Line { point, direction } if point.is_zero() && direction.re == 0.0 => {
                    "imaginary-axis".to_string()
                }
                Piece::Line { point, direction } => format!("line({point} + t·{direction})"),
                Piece::Ray { origin, direction } => format!("half-line({origin} + t·{direction}, t≥0)"),
                Piece::Point { at } => format!("point({at})"),
            })
            .collect();
        parts.join(" ∪ ")
    }

    /// Probe points hugging the non-point pieces at distance `offset`.
    pub fn probe_points(&self, radius: f64, offset: f64, per_piece: usize) -> Vec<C64> {
        self.pieces.iter().flat_map(|p| p.probes(radius, offset, per_piece)).collect()
    }

    /// Isolated points of the set.
    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.pieces.iter().filter_map(|p| match *p {
            Piece::Point { at } => Some(at),
            _ => None,
        })
    }
}

/// Known-theory tags attached to catalog entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    /// C^∞ on its domain of definition; no mollification needed.
    Smooth,
    Holomorphic,
    Antiholomorphic,
    /// Polynomial in `z` and `z̄`.
    Polynomial,
    /// Holomorphic away from a discrete set of poles.
    IsolatedPoles,
    /// Unbounded near its exceptional set.
    NotLocallyBounded,
    /// Two-fold composition reproduces `max{0, Re z}`, so deep networks are
    /// universal even though the function agrees a.e. with a polynomial.
    DeepUniversalByComposition,
}

/// Closed set of functions available in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Ratio,
    SigmoidSplit,
    ZLog,
    RhoC,
    Example48,
    Tanh,
    Sin,
    Sinh,
    ConjSin,
    PolyZzbar,
    Abs2,
    ArcsinPrincipal,
    ArctanPrincipal,
    RealPart,
    Identity,
}

impl ActivationKind {
    /// Raw formula, without any singularity bookkeeping.
    pub fn apply<T: Scalar>(self, z: Complex<T>) -> Complex<T> {
        let zero = T::zero();
        let one = T::one();
        match self {
            ActivationKind::Ratio => z / (one + z.norm()),
            ActivationKind::SigmoidSplit => {
                Complex::new(one / (one + (-z.re).exp()), one / (one + (-z.im).exp()))
            }
            ActivationKind::ZLog => {
                if z.im == zero && z.re <= zero {
                    Complex::zero()
                } else {
                    z * z.ln()
                }
            }
            ActivationKind::RhoC => Complex::new(z.re.max(zero), zero),
            ActivationKind::Example48 => {
                if z.im == zero {
                    Complex::new(z.re.max(zero), zero)
                } else {
                    Complex::new(z.re, zero)
                }
            }
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::Sin => z.sin(),
            ActivationKind::Sinh => z.sinh(),
            ActivationKind::ConjSin => z.sin().conj(),
            ActivationKind::PolyZzbar => z + z.conj(),
            ActivationKind::Abs2 => Complex::new(z.norm_sqr(), zero),
            ActivationKind::ArcsinPrincipal => z.asin(),
            ActivationKind::ArctanPrincipal => z.atan(),
            ActivationKind::RealPart => Complex::new(z.re, zero),
            ActivationKind::Identity => z,
        }
    }

    /// Whether `z` lies on a declared pole, within `tol`.
    fn is_pole(self, z: C64, tol: f64) -> bool {
        match self {
            ActivationKind::Tanh => {
                if z.re.abs() > tol {
                    return false;
                }
                let shifted = z.im / std::f64::consts::PI - 0.5;
                (shifted - shifted.round()).abs() * std::f64::consts::PI <= tol
            }
            ActivationKind::ArctanPrincipal => {
                z.re.abs() <= tol && (z.im.abs() - 1.0).abs() <= tol
            }
            _ => false,
        }
    }
}

/// A named activation together with its metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivationSpec {
    pub name: &'static str,
    pub kind: ActivationKind,
    /// Where the activation fails to be continuous (poles included).
    pub discontinuity_set: ExceptionalSet,
    /// Where the activation fails to be C^∞; contains `discontinuity_set`.
    pub nonsmooth_set: ExceptionalSet,
    pub continuous: bool,
    pub locally_bounded: bool,
    pub annotations: Vec<Annotation>,
}

impl ActivationSpec {
    pub fn has(&self, a: Annotation) -> bool {
        self.annotations.contains(&a)
    }

    pub fn is_smooth(&self) -> bool {
        self.has(Annotation::Smooth)
    }

    /// Evaluates the activation in any supported precision.
    ///
    /// Evaluating on a declared pole, or producing a non-finite value, is an
    /// error.
    pub fn eval_t<T: Scalar>(&self, z: Complex<T>) -> Result<Complex<T>> {
        let zf = C64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN));
        let tol = 4.0 * T::epsilon().to_f64().unwrap_or(f64::EPSILON) * (1.0 + zf.norm());
        if self.kind.is_pole(zf, tol) {
            return Err(Error::singular_at(zf));
        }
        let v = self.kind.apply(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::singular_at(zf))
        }
    }

    /// Double-precision evaluation.
    #[inline]
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.eval_t(z)
    }

    /// Distance from `z` to the nearest declared pole.
    pub fn pole_distance(&self, z: C64) -> f64 {
        self.discontinuity_set.points().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
    }
}

fn spec(
    name: &'static str,
    kind: ActivationKind,
    discontinuities: Vec<Piece>,
    extra_nonsmooth: Vec<Piece>,
    locally_bounded: bool,
    annotations: Vec<Annotation>,
) -> ActivationSpec {
    let mut nonsmooth = discontinuities.clone();
    nonsmooth.extend(extra_nonsmooth);
    ActivationSpec {
        name,
        kind,
        continuous: discontinuities.is_empty(),
        discontinuity_set: ExceptionalSet::from_pieces(discontinuities),
        nonsmooth_set: ExceptionalSet::from_pieces(nonsmooth),
        locally_bounded,
        annotations,
    }
}

fn imaginary_poles(offset: f64, period: f64, count: i32) -> Vec<Piece> {
    (-count..count).map(|k| Piece::point(C64::new(0.0, offset + period * k as f64))).collect()
}

/// The built-in activation catalog.
pub fn activation_catalog() -> Vec<ActivationSpec> {
    use ActivationKind as K;
    use Annotation as A;
    let neg_real = Piece::ray(C64::zero(), C64::new(-1.0, 0.0));
    vec![
        spec("ratio", K::Ratio, vec![], vec![Piece::point(C64::zero())], true, vec![]),
        spec("sigmoid_split", K::SigmoidSplit, vec![], vec![], true, vec![A::Smooth]),
        spec("zlog", K::ZLog, vec![neg_real], vec![], true, vec![]),
        spec("rho_c", K::RhoC, vec![], vec![Piece::imag_axis()], true, vec![]),
        spec(
            "example_4_8",
            K::Example48,
            vec![Piece::real_axis()],
            vec![],
            true,
            vec![A::DeepUniversalByComposition],
        ),
        spec(
            "tanh",
            K::Tanh,
            imaginary_poles(std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 32),
            vec![],
            false,
            vec![A::Smooth, A::Holomorphic, A::IsolatedPoles],
        ),
        spec("sin", K::Sin, vec![], vec![], true, vec![A::Smooth, A::Holomorphic]),
        spec("sinh", K::Sinh, vec![], vec![], true, vec![A::Smooth, A::Holomorphic]),
        spec("conj_sin", K::ConjSin, vec![], vec![], true, vec![A::Smooth, A::Antiholomorphic]),
        spec("poly_zzbar", K::PolyZzbar, vec![], vec![], true, vec![A::Smooth, A::Polynomial]),
        spec("abs2", K::Abs2, vec![], vec![], true, vec![A::Smooth, A::Polynomial]),
        spec(
            "arcsin_principal",
            K::ArcsinPrincipal,
            vec![
                Piece::ray(C64::new(-1.0, 0.0), C64::new(-1.0, 0.0)),
                Piece::ray(C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
            ],
            vec![],
            true,
            vec![],
        ),
        spec(
            "arctan_principal",
            K::ArctanPrincipal,
            vec![
                Piece::ray(C64::new(0.0, 1.0), C64::new(0.0, 1.0)),
                Piece::ray(C64::new(0.0, -1.0), C64::new(0.0, -1.0)),
                Piece::point(C64::new(0.0, 1.0)),
                Piece::point(C64::new(0.0, -1.0)),
            ],
            vec![],
            false,
            vec![A::NotLocallyBounded],
        ),
        spec(
            "real_part",
            K::RealPart,
            vec![],
            vec![],
            true,
            vec![A::Smooth, A::Polynomial],
        ),
        spec(
            "identity",
            K::Identity,
            vec![],
            vec![],
            true,
            vec![A::Smooth, A::Holomorphic, A::Polynomial],
        ),
    ]
}

/// Looks up a catalog entry by name.
pub fn find_activation(name: &str) -> Result<ActivationSpec> {
    activation_catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownActivation(name.to_string()))
}

/// Names of every catalog entry, in catalog order.
pub fn catalog_names() -> Vec<&'static str> {
    activation_catalog().iter().map(|s| s.name).collect()
}

/// Sample points in a closed ball of `ℂ^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    center: Vec<C64>,
    radius: f64,
    points_per_axis: usize,
    seed: u64,
    guard: f64,
    #[serde(skip)]
    points: Vec<C64>,
}

impl Grid {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Minimum distance kept from the avoided set.
    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Spacing of the underlying regular lattice.
    pub fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.points_per_axis - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[C64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, C64> {
        self.points.chunks_exact(self.dim())
    }

    /// Scalar points of a one-dimensional grid.
    pub fn scalars(&self) -> Result<&[C64]> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim() });
        }
        Ok(&self.points)
    }

    /// Returns a copy with extra points appended (one-dimensional grids only).
    pub fn with_extra_points(&self, extra: &[C64]) -> Result<Grid> {
        self.scalars()?;
        let mut out = self.clone();
        for &p in extra {
            if (p - self.center[0]).norm() <= self.radius * (1.0 + 1e-12) {
                out.points.push(p);
            }
        }
        Ok(out)
    }

    /// Keeps only the points accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&[C64]) -> bool) -> Result<Grid> {
        let d = self.dim();
        let mut out = self.clone();
        out.points = self.iter().filter(|p| keep(p)).flatten().copied().collect();
        if out.points.is_empty() {
            return Err(Error::GridExhausted);
        }
        debug_assert_eq!(out.points.len() % d, 0);
        Ok(out)
    }
}

/// Regular tensor grid on the bounding box of the ball, filtered to the ball
/// and kept at distance `radius/(10·points_per_axis)` from `avoid`.
pub fn make_grid(center: &[C64], radius: f64, points_per_axis: usize, avoid: &ExceptionalSet) -> Result<Grid> {
    let guard = radius / (10.0 * points_per_axis as f64);
    make_grid_with_guard(center, radius, points_per_axis, avoid, guard)
}

/// [`make_grid`] with an explicit guard distance.
pub fn make_grid_with_guard(
    center: &[C64],
    radius: f64,
    points_per_axis: usize,
    avoid: &ExceptionalSet,
    guard: f64,
) -> Result<Grid> {
    if center.is_empty() {
        return Err(Error::InvalidArgument("grid dimension must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid radius must be positive, got {radius}")));
    }
    if points_per_axis < 2 {
        return Err(Error::InvalidArgument(format!(
            "points_per_axis must be at least 2, got {points_per_axis}"
        )));
    }
    let d = center.len();
    let axes = 2 * d;
    let n = points_per_axis;
    let coord = |k: usize| -radius + 2.0 * radius * k as f64 / (n - 1) as f64;
    let total = n.checked_pow(axes as u32).ok_or_else(|| Error::InvalidArgument("grid too large".into()))?;
    let mut points = Vec::new();
    let mut idx = vec![0usize; axes];
    let mut offsets = vec![0.0; axes];
    for _ in 0..total {
        for (o, &k) in offsets.iter_mut().zip(&idx) {
            *o = coord(k);
        }
        let norm = offsets.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= radius * (1.0 + 1e-12) {
            let pt: Vec<C64> =
                (0..d).map(|j| center[j] + C64::new(offsets[2 * j], offsets[2 * j + 1])).collect();
            if pt.iter().all(|&z| avoid.distance(z) >= guard) {
                points.extend(pt);
            }
        }
        for k in (0..axes).rev() {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
    if points.is_empty() {
        return Err(Error::GridExhausted);
    }
    Ok(Grid { center: center.to_vec(), radius, points_per_axis, seed: 0, guard, points })
}

/// `count` points drawn uniformly from the closed disc of `radius` about
/// `center`.
pub fn random_disc_points(center: C64, radius: f64, count: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = 2.0 * f64::PI() * rng.gen::<f64>();
            center + C64::from_polar(r, t)
        })
        .collect()
}

/// Deterministic generator used for every random draw in the library.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Complex value finite in both parts.
pub fn is_finite<T: Float>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `z^m · z̄^ℓ` in any supported precision.
pub fn monomial<T: Scalar>(z: Complex<T>, m: usize, ell: usize) -> Complex<T> {
    z.powu(m as u32) * z.conj().powu(ell as u32)
}

