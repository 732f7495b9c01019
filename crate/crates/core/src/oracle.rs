//! Floating-point evaluation of decorated γ-factors and the numeric check
//! that an exact move changes `R(s)γ(s)` by a single constant `c` while
//! updating ω by `c̄/c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::GaussianRat;
use crate::gamma::DecoratedGamma;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("Γ evaluated too close to the pole at {0}")]
    GammaPole(Complex64),
    #[error("sample point {0} is too close to a root or pole of R")]
    RationalSingularity(Complex64),
    #[error("only {found} admissible sample points, need at least {needed}")]
    NotEnoughPoints { found: usize, needed: usize },
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which an argument counts as sitting on a Γ pole.
const POLE_EPS: f64 = 1e-12;
/// Minimum distance between a sample point and any singularity.
pub const ADMISSIBILITY_GUARD: f64 = 1e-6;
/// At least this many admissible points are needed for a verdict.
pub const MIN_POINTS: usize = 3;

fn near_nonpositive_integer(z: Complex64, eps: f64) -> bool {
    z.re < 0.5 && (z.re - z.re.round()).hypot(z.im) < eps
}

/// `ln sin(πz)`, stable for large `|Im z|`. Branch is irrelevant to callers.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 10.0 {
        // sin πz = e^{−iπz}(e^{2iπz} − 1)/(2i)
        -i * PI * z + (((2.0 * i * PI * z).exp() - 1.0) / (2.0 * i)).ln()
    } else if z.im < -10.0 {
        // sin πz = e^{iπz}(1 − e^{−2iπz})/(2i)
        i * PI * z + ((1.0 - (-2.0 * i * PI * z).exp()) / (2.0 * i)).ln()
    } else {
        (PI * z).sin().ln()
    }
}

/// A logarithm of `Γ(z)` (not necessarily the principal branch), by the
/// Lanczos approximation with reflection for `Re z < 1/2`.
pub fn ln_gamma_complex(z: Complex64) -> Result<Complex64, OracleError> {
    if near_nonpositive_integer(z, POLE_EPS) {
        return Err(OracleError::GammaPole(z));
    }
    if z.re < 0.5 {
        let reflected = ln_gamma_complex(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

pub fn gamma_complex(z: Complex64) -> Result<Complex64, OracleError> {
    ln_gamma_complex(z).map(|l| l.exp())
}

fn to_complex(z: &GaussianRat) -> Complex64 {
    let (re, im) = z.to_f64_pair();
    Complex64::new(re, im)
}

/// A logarithm of `R(s)γ(s)`. ω does not enter the function value.
pub fn ln_eval_decorated(g: &DecoratedGamma, s: Complex64) -> Result<Complex64, OracleError> {
    let r = &g.rational;
    let mut acc = Complex64::new(r.kappa().ln(), if r.is_negative() { PI } else { 0.0 });
    for (set, sign) in [(r.roots(), 1.0), (r.poles(), -1.0)] {
        for (z, count) in set.distinct() {
            let d = s - to_complex(z);
            if d.norm() < POLE_EPS {
                return Err(OracleError::RationalSingularity(s));
            }
            acc += sign * count as f64 * d.ln();
        }
    }
    acc += s * g.gamma.q().ln();
    for f in g.gamma.factors() {
        let lambda = crate::exact::rat_to_f64(&f.lambda);
        acc += ln_gamma_complex(lambda * s + to_complex(&f.mu))?;
    }
    Ok(acc)
}

pub fn eval_decorated(g: &DecoratedGamma, s: Complex64) -> Result<Complex64, OracleError> {
    ln_eval_decorated(g, s).map(|l| l.exp())
}

/// Sample points plus the relative tolerance used for verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub points: Vec<Complex64>,
    pub tolerance: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            points: vec![
                Complex64::new(2.3, 0.7),
                Complex64::new(3.1, -0.4),
                Complex64::new(1.7, 1.9),
                Complex64::new(4.2, 0.1),
                Complex64::new(2.9, -1.3),
            ],
            tolerance: 1e-8,
        }
    }
}

impl SamplePlan {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SamplePlan {
            tolerance,
            ..SamplePlan::default()
        }
    }

    /// Points at which every `λ_j s + μ_j` and every root/pole of `R` of
    /// each object is at least [`ADMISSIBILITY_GUARD`] away.
    pub fn admissible_points(&self, objects: &[&DecoratedGamma]) -> Vec<Complex64> {
        self.points
            .iter()
            .copied()
            .filter(|&s| objects.iter().all(|g| is_admissible(g, s)))
            .collect()
    }
}

fn is_admissible(g: &DecoratedGamma, s: Complex64) -> bool {
    let gamma_ok = g.gamma.factors().iter().all(|f| {
        let z = crate::exact::rat_to_f64(&f.lambda) * s + to_complex(&f.mu);
        !near_nonpositive_integer(z, ADMISSIBILITY_GUARD)
    });
    let r = &g.rational;
    gamma_ok
        && r.roots()
            .iter()
            .chain(r.poles().iter())
            .all(|z| (s - to_complex(z)).norm() >= ADMISSIBILITY_GUARD)
}

/// Outcome of [`verify_move`].
#[derive(Debug, Clone, PartialEq)]
pub struct MoveReport {
    /// `before(s)/after(s)` at the first admissible point.
    pub c: Complex64,
    /// `max_k |ratio(s_k)/c − 1|`.
    pub max_rel_dev: f64,
    /// Whether `ω_after = ω_before · c̄/c` in floating point.
    pub omega_consistent: bool,
    pub points_used: usize,
}

impl MoveReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_dev < tolerance && self.omega_consistent
    }
}

/// Check that `before = c · after` as functions of `s` for one constant
/// `c`, and that the ω data are related by `c̄/c`.
pub fn verify_move(
    before: &DecoratedGamma,
    after: &DecoratedGamma,
    plan: &SamplePlan,
) -> Result<MoveReport, OracleError> {
    let points = plan.admissible_points(&[before, after]);
    if points.len() < MIN_POINTS {
        return Err(OracleError::NotEnoughPoints {
            found: points.len(),
            needed: MIN_POINTS,
        });
    }
    let log_ratios = points
        .iter()
        .map(|&s| Ok(ln_eval_decorated(before, s)? - ln_eval_decorated(after, s)?))
        .collect::<Result<Vec<_>, OracleError>>()?;
    let d0 = log_ratios[0];
    let max_rel_dev = log_ratios
        .iter()
        .map(|d| ((d - d0).exp() - 1.0).norm())
        .fold(0.0, f64::max);

    let w_before = before.gamma.omega();
    let w_after = after.gamma.omega();
    let omega_consistent = w_before.tag == w_after.tag && {
        let observed = Complex64::from_polar(1.0, w_after.twist.angle() - w_before.twist.angle());
        // c̄/c = e^{−2i arg c}; arg c = Im d0 mod 2π
        let expected = Complex64::from_polar(1.0, -2.0 * d0.im);
        (observed - expected).norm() < plan.tolerance
    };
    Ok(MoveReport {
        c: d0.exp(),
        max_rel_dev,
        omega_consistent,
        points_used: points.len(),
    })
}
