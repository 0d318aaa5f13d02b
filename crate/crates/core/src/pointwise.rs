//! Pointwise value function
//! `g(λ, μ) = sup_A { A:μ + λ:T(A) − ℓ|A|^α }`.
//!
//! Three evaluators: a multistart Newton ascent that works for any α ≥ 2,
//! an exact closed form for α = 2, and explicit witness matrices whose
//! objective value is a certified lower bound.

use crate::report::RunReport;
use crate::tensor::{coupling_matrix, flatten, t_of, unflatten, Mat3, Mat9, Vec9};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Which set of case thresholds and constants the witnesses use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// α = 2: witness `μ/7`, bound `|μ|²/14` on `|λ| ≤ 3/2`.
    Quadratic,
    /// α > 2 with the general thresholds.
    General,
    /// α = 4 with the sharper quartic thresholds.
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GParams {
    pub alpha: f64,
    pub ell: f64,
    pub alpha_prime: f64,
    /// `α/(α−2)`; infinite for α = 2.
    #[serde(serialize_with = "ser_extended")]
    pub beta: f64,
    pub c_cert: f64,
    pub regime: Regime,
}

fn ser_extended<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    }
}

/// `ℓ` for which the general lower bound is proved.
pub fn general_ell(alpha: f64) -> f64 {
    let ap = alpha / (alpha - 1.0);
    let beta = alpha / (alpha - 2.0);
    (4.0 * ap).powf(-alpha / (2.0 - ap)) / (alpha * 2f64.powf(alpha / 2.0) * 16.0 * 3f64.powf(beta))
}

/// `ℓ = (3/8)⁶ / 72` of the quartic bound.
pub fn quartic_ell() -> f64 {
    (3.0f64 / 8.0).powi(6) / 72.0
}

fn general_constants(alpha: f64) -> [f64; 3] {
    let ap = alpha / (alpha - 1.0);
    let beta = alpha / (alpha - 2.0);
    [
        1.0 / (4.0 * ap),
        (4.0 * ap).powf(-ap / (2.0 - ap)) / (32.0 * 16.0 * 3f64.powf(beta)),
        1.0 / (4.0 * 3f64.powf(beta / 2.0)),
    ]
}

fn quartic_constants() -> [f64; 3] {
    [1.0 / 16.0, (3.0f64 / 8.0).powi(2) / (32.0 * 144.0), 1.0 / 12.0]
}

impl GParams {
    /// `H = ℓ|A|^α` with general-case thresholds (quadratic regime for α = 2).
    pub fn new(alpha: f64, ell: f64) -> Result<Self> {
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be ≥ 2, got {alpha}")));
        }
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidParameter(format!("ell must be positive, got {ell}")));
        }
        if alpha == 2.0 {
            return Ok(Self::quadratic(ell));
        }
        let c = general_constants(alpha);
        Ok(Self {
            alpha,
            ell,
            alpha_prime: alpha / (alpha - 1.0),
            beta: alpha / (alpha - 2.0),
            c_cert: c[0].min(c[1]).min(c[2]),
            regime: Regime::General,
        })
    }

    pub fn quadratic(ell: f64) -> Self {
        Self {
            alpha: 2.0,
            ell,
            alpha_prime: 2.0,
            beta: f64::INFINITY,
            c_cert: 1.0 / 14.0,
            regime: Regime::Quadratic,
        }
    }

    /// α = 4 with the quartic-specific `ℓ` and constants.
    pub fn quartic_sharp() -> Self {
        let c = quartic_constants();
        Self {
            alpha: 4.0,
            ell: quartic_ell(),
            alpha_prime: 4.0 / 3.0,
            beta: 2.0,
            c_cert: c[0].min(c[1]).min(c[2]),
            regime: Regime::Quartic,
        }
    }

    /// The parameter set for which the lower bound is proved at this α.
    pub fn certified(alpha: f64) -> Result<Self> {
        if alpha == 2.0 {
            Ok(Self::quadratic(0.5))
        } else {
            Self::new(alpha, general_ell(alpha))
        }
    }

    pub fn case_constants(&self) -> [f64; 3] {
        match self.regime {
            Regime::Quadratic => [1.0 / 14.0; 3],
            Regime::General => general_constants(self.alpha),
            Regime::Quartic => quartic_constants(),
        }
    }

    /// True when `ℓ` is the value the lower bound is proved for.
    pub fn has_certified_ell(&self) -> bool {
        let want = match self.regime {
            Regime::Quadratic => 0.5,
            Regime::General => general_ell(self.alpha),
            Regime::Quartic => quartic_ell(),
        };
        (self.ell - want).abs() <= 1e-12 * want
    }

    /// Same α and regime with a different `ℓ`.
    pub fn with_ell(&self, ell: f64) -> Self {
        Self { ell, ..*self }
    }

    /// Certified lower bound `c (|μ|^{α'} + |λ|^β)` (α > 2) or `|μ|²/14` (α = 2).
    pub fn bound(&self, lam: &Mat3, mu: &Mat3) -> f64 {
        match self.regime {
            Regime::Quadratic => mu.norm_squared() / 14.0,
            _ => self.c_cert * (mu.norm().powf(self.alpha_prime) + lam.norm().powf(self.beta)),
        }
    }
}

/// Result of a pointwise evaluation. `value` is `+∞` when the supremum is
/// unbounded; `argmax` is then the last iterate and carries no meaning.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GValue {
    #[serde(serialize_with = "ser_extended")]
    pub value: f64,
    pub infinite: bool,
    #[serde(serialize_with = "crate::tensor::ser_mat3")]
    pub argmax: Mat3,
    /// Relative first-order residual at `argmax`.
    pub stationarity: f64,
    pub converged: bool,
    pub certified: bool,
}

impl GValue {
    fn infinite(argmax: Mat3) -> Self {
        Self {
            value: f64::INFINITY,
            infinite: true,
            argmax,
            stationarity: 0.0,
            converged: true,
            certified: true,
        }
    }
}

/// `A:μ + λ:T(A) − ℓ|A|^α`.
pub fn g_objective(a: &Mat3, lam: &Mat3, mu: &Mat3, params: &GParams) -> f64 {
    a.dot(mu) + lam.dot(&t_of(a)) - params.ell * a.norm().powf(params.alpha)
}

/// Objective on the flattened variable, with analytic derivatives.
#[derive(Debug, Clone)]
pub struct Objective {
    pub m: Mat9,
    pub mu: Vec9,
    pub ell: f64,
    pub alpha: f64,
}

impl Objective {
    pub fn new(lam: &Mat3, mu: &Mat3, params: &GParams) -> Self {
        Self {
            m: coupling_matrix(lam),
            mu: flatten(mu),
            ell: params.ell,
            alpha: params.alpha,
        }
    }

    fn penalty_power(&self, r: f64, p: f64) -> f64 {
        if r == 0.0 {
            if p == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            r.powf(p)
        }
    }

    pub fn value(&self, x: &Vec9) -> f64 {
        self.mu.dot(x) + x.dot(&(self.m * x)) - self.ell * self.penalty_power(x.norm(), self.alpha)
    }

    pub fn grad(&self, x: &Vec9) -> Vec9 {
        let r = x.norm();
        self.mu + self.m * x * 2.0 - x * (self.alpha * self.ell * self.penalty_power(r, self.alpha - 2.0))
    }

    pub fn hess(&self, x: &Vec9) -> Mat9 {
        let r = x.norm();
        let al = self.alpha * self.ell;
        let mut h = self.m * 2.0 - Mat9::identity() * (al * self.penalty_power(r, self.alpha - 2.0));
        if self.alpha > 2.0 && r > 0.0 {
            h -= (x * x.transpose()) * (al * (self.alpha - 2.0) * r.powf(self.alpha - 4.0));
        }
        h
    }

    /// Scale for the relative stationarity test.
    pub fn scale(&self, x: &Vec9) -> f64 {
        let r = x.norm();
        1.0 + self.mu.norm() + 2.0 * (self.m * x).norm() + self.alpha * self.ell * self.penalty_power(r, self.alpha - 1.0)
    }

    pub fn stationarity(&self, x: &Vec9) -> f64 {
        self.grad(x).norm() / self.scale(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Total number of starts, including the deterministic ones.
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
    /// Divergence radius (armed for α = 2 only).
    pub radius: f64,
    /// Minimal per-step growth that counts as "still increasing".
    pub growth: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0x9e37_79b9,
            max_iters: 500,
            tol: 1e-8,
            radius: 1e6,
            growth: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
struct Ascent {
    x: Vec9,
    value: f64,
    stationarity: f64,
    converged: bool,
    diverged: bool,
}

fn ascend(obj: &Objective, x0: Vec9, opts: &OracleOptions) -> Ascent {
    let armed = obj.alpha == 2.0;
    let mut x = x0;
    let mut f = obj.value(&x);
    for _ in 0..opts.max_iters {
        let g = obj.grad(&x);
        let s = obj.scale(&x);
        let h = obj.hess(&x);
        let eig = h.symmetric_eigen();
        let (imax, lmax) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let hscale = h.amax().max(1e-300);
        let stationary = g.norm() <= opts.tol * s;
        let d = if stationary {
            if lmax <= 1e-10 * hscale.max(1.0) {
                return Ascent {
                    x,
                    value: f,
                    stationarity: g.norm() / s,
                    converged: true,
                    diverged: false,
                };
            }
            // saddle or minimum: leave along the most positive curvature
            let q: Vec9 = eig.eigenvectors.column(imax).into();
            let step = (1.0 + x.norm()) * 1e-3;
            if obj.value(&(x + q * step)) >= obj.value(&(x - q * step)) {
                q * step
            } else {
                -q * step
            }
        } else {
            let floor = 1e-12 * (hscale + s);
            let mut d = Vec9::zeros();
            for (i, &l) in eig.eigenvalues.iter().enumerate() {
                let q: Vec9 = eig.eigenvectors.column(i).into();
                d += q * (q.dot(&g) / l.abs().max(floor));
            }
            d
        };
        let slope = g.dot(&d).max(0.0);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let xt = x + d * t;
            let ft = obj.value(&xt);
            if ft > f + 1e-4 * t * slope || (stationary && ft > f) {
                accepted = Some((xt, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((mut xn, mut fnew)) = accepted else {
            let st = obj.stationarity(&x);
            return Ascent {
                x,
                value: f,
                stationarity: st,
                converged: st <= opts.tol * 10.0,
                diverged: false,
            };
        };
        if t == 1.0 {
            // extended step for unbounded directions
            for _ in 0..60 {
                t *= 2.0;
                let xt = x + d * t;
                let ft = obj.value(&xt);
                if ft > fnew {
                    xn = xt;
                    fnew = ft;
                } else {
                    break;
                }
            }
        }
        let gain = fnew - f;
        x = xn;
        f = fnew;
        if armed && x.norm() > opts.radius && gain > opts.growth {
            return Ascent {
                x,
                value: f64::INFINITY,
                stationarity: 0.0,
                converged: true,
                diverged: true,
            };
        }
    }
    let st = obj.stationarity(&x);
    Ascent {
        x,
        value: f,
        stationarity: st,
        converged: st <= opts.tol,
        diverged: false,
    }
}

/// Characteristic magnitude of a maximizer, used to scale random starts.
fn start_scale(lam: &Mat3, mu: &Mat3, params: &GParams) -> f64 {
    let al = params.alpha * params.ell;
    let from_mu = (mu.norm() / al).powf(1.0 / (params.alpha - 1.0));
    let from_lam = if params.alpha > 2.0 {
        (4.0 * lam.norm() / al).powf(1.0 / (params.alpha - 2.0))
    } else {
        0.0
    };
    from_mu.max(from_lam).max(1e-3)
}

/// Deterministic starting points: origin, the stationary point along `μ`
/// and the three witness matrices.
pub fn deterministic_starts(lam: &Mat3, mu: &Mat3, params: &GParams) -> Vec<Mat3> {
    let mut v = vec![Mat3::zeros()];
    let mn = mu.norm();
    if mn > 0.0 {
        let t = (mn / (params.alpha * params.ell)).powf(1.0 / (params.alpha - 1.0));
        v.push(mu * (t / mn));
    }
    for case in 1..=3 {
        if let Some(a) = witness_for_case(lam, mu, params, case) {
            v.push(a);
        }
    }
    v
}

/// Multistart Newton ascent with optional extra (warm) starts.
pub fn g_sup_oracle_with(
    lam: &Mat3,
    mu: &Mat3,
    params: &GParams,
    opts: &OracleOptions,
    warm: &[Mat3],
) -> GValue {
    let obj = Objective::new(lam, mu, params);
    let mut starts: Vec<Mat3> = warm.to_vec();
    starts.extend(deterministic_starts(lam, mu, params));
    let scale = start_scale(lam, mu, params);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts {
        let r = scale * rng.random_range(0.1..2.0);
        let dir = Mat3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        starts.push(dir * (r / dir.norm().max(1e-300)));
    }
    let mut best: Option<Ascent> = None;
    for s in &starts {
        let run = ascend(&obj, flatten(s), opts);
        if run.diverged {
            return GValue::infinite(unflatten(&run.x));
        }
        let better = match &best {
            None => true,
            Some(b) => {
                run.value > b.value
                    || (run.value == b.value && run.converged && !b.converged)
            }
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let witness = witness_lower_bound(lam, mu, params);
    GValue {
        value: best.value,
        infinite: false,
        argmax: unflatten(&best.x),
        stationarity: best.stationarity,
        converged: best.converged,
        certified: best.converged && best.value >= witness,
    }
}

pub fn g_sup_oracle(lam: &Mat3, mu: &Mat3, params: &GParams, opts: &OracleOptions) -> GValue {
    g_sup_oracle_with(lam, mu, params, opts, &[])
}

/// Positive-definiteness margin below which `ℓI − B_λ` counts as singular.
pub const PD_EPS: f64 = 1e-10;

/// Smallest eigenvalue of `ℓI − B_λ`.
pub fn quadratic_margin(lam: &Mat3, ell: f64) -> f64 {
    let q = Mat9::identity() * ell - coupling_matrix(lam);
    q.symmetric_eigenvalues().min()
}

/// Exact supremum for α = 2:
/// `¼ μ·(ℓI − B_λ)⁻¹ μ` with argmax `½(ℓI − B_λ)⁻¹ μ`, or `+∞`.
pub fn g_quadratic_closed(lam: &Mat3, mu: &Mat3, ell: f64) -> GValue {
    let q = Mat9::identity() * ell - coupling_matrix(lam);
    let eig = q.symmetric_eigen();
    let m = flatten(mu);
    let mut x = Vec9::zeros();
    let scale = eig.eigenvalues.amax().max(ell);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let v: Vec9 = eig.eigenvectors.column(i).into();
        let c = v.dot(&m);
        if l < -PD_EPS * scale {
            return GValue::infinite(Mat3::zeros());
        }
        if l <= PD_EPS * scale {
            if c.abs() > 1e-10 * (1.0 + m.norm()) {
                return GValue::infinite(Mat3::zeros());
            }
            continue;
        }
        x += v * (0.5 * c / l);
    }
    let value = 0.5 * m.dot(&x);
    let params = GParams::quadratic(ell);
    let obj = Objective::new(lam, mu, &params);
    let a = unflatten(&x);
    GValue {
        value,
        infinite: false,
        argmax: a,
        stationarity: obj.stationarity(&x),
        converged: true,
        certified: value >= witness_lower_bound(lam, mu, &params),
    }
}

/// Row of `λ` with the largest norm (lowest index on ties).
pub fn dominant_row(lam: &Mat3) -> usize {
    let mut best = 0;
    for v in 1..3 {
        if lam.row(v).norm_squared() > lam.row(best).norm_squared() {
            best = v;
        }
    }
    best
}

/// Right-handed orthonormal frame with row `v` equal to `Λ_v/|Λ_v|` and
/// `e_{v+1} × e_{v+2} = e_v` (indices mod 3). Rows are the frame vectors.
pub fn case3_frame(lam: &Mat3, v: usize) -> Option<Mat3> {
    let row = lam.row(v).transpose();
    let m = row.norm();
    if m == 0.0 {
        return None;
    }
    let ev = row / m;
    // any unit vector orthogonal to ev
    let axis = (0..3)
        .min_by(|&a, &b| ev[a].abs().partial_cmp(&ev[b].abs()).unwrap())
        .unwrap();
    let mut helper = nalgebra::Vector3::zeros();
    helper[axis] = 1.0;
    let e1 = (helper - ev * ev.dot(&helper)).normalize();
    let e2 = ev.cross(&e1);
    let mut f = Mat3::zeros();
    f.set_row(v, &ev.transpose());
    f.set_row((v + 1) % 3, &e1.transpose());
    f.set_row((v + 2) % 3, &e2.transpose());
    Some(f)
}

/// Dominant-row witness: rows `Y ≠ V` equal `m^{(β−1)/2} E_Y`, row `V` zero.
pub fn case3_witness(lam: &Mat3, beta: f64) -> Option<(Mat3, usize)> {
    let v = dominant_row(lam);
    let frame = case3_frame(lam, v)?;
    let m = lam.row(v).norm();
    let s = m.powf((beta - 1.0) / 2.0);
    let mut a = frame * s;
    a.set_row(v, &nalgebra::RowVector3::zeros());
    Some((a, v))
}

/// Proof case of `(λ, μ)`: 1, 2 or 3 (ties go to the lower number).
pub fn classify(lam: &Mat3, mu: &Mat3, params: &GParams) -> u8 {
    let (l, m) = (lam.norm(), mu.norm());
    match params.regime {
        Regime::Quadratic => 1,
        Regime::General => {
            let ap = params.alpha_prime;
            let e = 1.0 / (2.0 - ap);
            if l <= m.powf(2.0 - ap) / (4.0 * ap) {
                1
            } else if m >= l.powf(e) / (4.0 * 3f64.powf(params.beta / 2.0)) {
                2
            } else {
                3
            }
        }
        Regime::Quartic => {
            if l <= 0.375 * m.powf(2.0 / 3.0) {
                1
            } else if m >= l.powf(1.5) / 12.0 {
                2
            } else {
                3
            }
        }
    }
}

/// Witness matrix of a given case (None when it is undefined, e.g. case 3
/// with `λ = 0`).
pub fn witness_for_case(lam: &Mat3, mu: &Mat3, params: &GParams, case: u8) -> Option<Mat3> {
    if params.regime == Regime::Quadratic {
        return if case == 1 { Some(mu / 7.0) } else { None };
    }
    let (l, m) = (lam.norm(), mu.norm());
    match case {
        1 => Some(if m == 0.0 {
            Mat3::zeros()
        } else {
            mu * m.powf(params.alpha_prime - 2.0)
        }),
        2 => (l > 0.0).then(|| mu / (4.0 * l)),
        _ => case3_witness(lam, params.beta).map(|(a, _)| a),
    }
}

/// Objective value at the proof witness of the case `(λ, μ)` falls in.
pub fn witness_lower_bound(lam: &Mat3, mu: &Mat3, params: &GParams) -> f64 {
    let case = classify(lam, mu, params);
    match witness_for_case(lam, mu, params, case) {
        Some(a) => g_objective(&a, lam, mu, params),
        None => 0.0,
    }
}

/// Checks `T(A) = 2 λ_V |Λ_V|^{β−2} δ_{ZV}` for the case-3 witness; returns
/// the relative deviation.
pub fn case3_identity_defect(lam: &Mat3, beta: f64) -> Option<f64> {
    let (a, v) = case3_witness(lam, beta)?;
    let t = t_of(&a);
    let m = lam.row(v).norm();
    let mut want = Mat3::zeros();
    want.set_row(v, &(lam.row(v) * (2.0 * m.powf(beta - 2.0))));
    Some((t - want).amax() / (1.0 + want.amax()))
}

fn random_direction(rng: &mut impl Rng) -> Mat3 {
    loop {
        let m = Mat3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = m.norm();
        if n > 1e-8 {
            return m / n;
        }
    }
}

/// `(λ, μ)` with uniform directions and log-uniform magnitudes in
/// `[10^lo, 10^hi]`, drawn from stream `index` of `seed`.
pub fn sample_pair(seed: u64, index: u64, lo: f64, hi: f64) -> (Mat3, Mat3) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let ml = 10f64.powf(rng.random_range(lo..hi));
    let mm = 10f64.powf(rng.random_range(lo..hi));
    (random_direction(&mut rng) * ml, random_direction(&mut rng) * mm)
}

#[derive(Debug, Clone, Serialize)]
struct SampleOutcome {
    index: u64,
    lambda_norm: f64,
    mu_norm: f64,
    case: u8,
    g: f64,
    bound: f64,
    slack: f64,
    passed: bool,
    infinite_expected: bool,
    case3_defect: Option<f64>,
}

/// Samples `(λ, μ)` and checks `max(g_oracle, witness) ≥ c_cert(|μ|^{α'} + |λ|^β)`
/// (α > 2) or the quadratic dichotomy (α = 2).
pub fn certify_bounds(params: &GParams, n_samples: usize, seed: u64) -> Result<RunReport> {
    if !params.has_certified_ell() {
        return Err(Error::InvalidParameter(format!(
            "certification needs the proved ell for this regime, got {}",
            params.ell
        )));
    }
    let opts = OracleOptions {
        seed,
        ..OracleOptions::default()
    };
    let outcomes: Vec<SampleOutcome> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let (lam, mu) = sample_pair(seed, i, -2.0, 2.0);
            let case = classify(&lam, &mu, params);
            let bound = params.bound(&lam, &mu);
            let case3_defect = if params.regime == Regime::Quadratic {
                case3_identity_defect(&lam, 2.0)
            } else {
                case3_identity_defect(&lam, params.beta)
            };
            if params.regime == Regime::Quadratic {
                let closed = g_quadratic_closed(&lam, &mu, params.ell);
                let over = lam.norm() > 1.5;
                let (g, passed) = if over {
                    (closed.value, closed.infinite)
                } else {
                    let w = witness_lower_bound(&lam, &mu, params);
                    let g = if closed.infinite { f64::INFINITY } else { closed.value.max(w) };
                    (g, g >= bound)
                };
                return SampleOutcome {
                    index: i,
                    lambda_norm: lam.norm(),
                    mu_norm: mu.norm(),
                    case,
                    g,
                    bound,
                    slack: g - bound,
                    passed,
                    infinite_expected: over,
                    case3_defect,
                };
            }
            let oracle = g_sup_oracle(&lam, &mu, params, &opts);
            let w = witness_lower_bound(&lam, &mu, params);
            let g = oracle.value.max(w);
            SampleOutcome {
                index: i,
                lambda_norm: lam.norm(),
                mu_norm: mu.norm(),
                case,
                g,
                bound,
                slack: g - bound,
                passed: g >= bound,
                infinite_expected: false,
                case3_defect,
            }
        })
        .collect();

    let mut rep = RunReport::new("g-certify");
    let passes = outcomes.iter().filter(|o| o.passed).count();
    rep.push(
        "lower_bound_samples",
        passes as f64,
        n_samples as f64,
        passes == n_samples,
        Some(format!("{passes}/{n_samples} samples satisfy the certified bound")),
    );
    let finite: Vec<&SampleOutcome> = outcomes.iter().filter(|o| !o.infinite_expected).collect();
    let min_slack = finite.iter().map(|o| o.slack).fold(f64::INFINITY, f64::min);
    let min_rel = finite
        .iter()
        .filter(|o| o.bound > 0.0)
        .map(|o| o.slack / o.bound)
        .fold(f64::INFINITY, f64::min);
    let c3 = outcomes
        .iter()
        .filter_map(|o| o.case3_defect)
        .fold(0.0, f64::max);
    rep.check_le("case3_witness_identity", c3, 1e-12);
    rep.set("alpha", params.alpha);
    rep.set("ell", params.ell);
    rep.set("c_cert", params.c_cert);
    rep.set("case_constants", params.case_constants().to_vec());
    rep.set("samples", n_samples as u64);
    rep.set("passes", passes as u64);
    rep.set("min_slack", if min_slack.is_finite() { min_slack.into() } else { serde_json::Value::Null });
    rep.set("min_relative_slack", if min_rel.is_finite() { min_rel.into() } else { serde_json::Value::Null });
    let mut per_case = [0u64; 3];
    for o in &outcomes {
        per_case[(o.case - 1) as usize] += 1;
    }
    rep.set("case_counts", per_case.to_vec());
    rep.set(
        "infinite_samples",
        outcomes.iter().filter(|o| o.infinite_expected).count() as u64,
    );
    let failures: Vec<serde_json::Value> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .take(20)
        .map(|o| serde_json::to_value(o).expect("serializable"))
        .collect();
    rep.set("failures", failures);
    Ok(rep)
}

/// Per-sample rows `(|λ|, |μ|, g, bound, slack)` for CSV output.
pub fn scan_rows(params: &GParams, n_samples: usize, seed: u64) -> Vec<[f64; 5]> {
    let opts = OracleOptions {
        seed,
        ..OracleOptions::default()
    };
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let (lam, mu) = sample_pair(seed, i, -2.0, 2.0);
            let g = if params.alpha == 2.0 {
                g_quadratic_closed(&lam, &mu, params.ell).value
            } else {
                g_sup_oracle(&lam, &mu, params, &opts).value
            };
            let g = g.max(witness_lower_bound(&lam, &mu, params));
            let b = params.bound(&lam, &mu);
            [lam.norm(), mu.norm(), g, b, g - b]
        })
        .collect()
}
