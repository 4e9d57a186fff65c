use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

fn check_params(d: usize, k: usize) -> Result<()> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter(alloc::format!("need d ≥ 1 and k ≥ 1, got d = {d}, k = {k}")));
    }
    Ok(())
}

/// `√(k + (d−1−c)z) · √(k + (d−1+c)z)` with `c = 2√((k−1)d)`; each factor has
/// positive real part inside the disc of convergence, so the principal roots
/// give the branch that is continuous through `z = 0`.
fn discriminant_root(z: Complex64, d: usize, k: usize) -> Complex64 {
    let a = d as f64 - 1.0;
    let c = 2.0 * libm::sqrt(((k - 1) * d) as f64);
    let kk = k as f64;
    (kk + (a - c) * z).sqrt() * (kk + (a + c) * z).sqrt()
}

/// `L_−(z) = 2z / ((d−1)z + k + √(((d−1)z+k)² − 4(k−1)dz²))`, the generating
/// function of first visits from a neighbor at laziness 0.
pub fn closed_form_u(z: Complex64, d: usize, k: usize) -> Complex64 {
    let a = d as f64 - 1.0;
    2.0 * z / (a * z + k as f64 + discriminant_root(z, d, k))
}

/// `𝒢(z) = 1/(1 − d z L_−(z))`, the return generating function at laziness 0.
pub fn closed_form_g(z: Complex64, d: usize, k: usize) -> Complex64 {
    1.0 / (1.0 - d as f64 * z * closed_form_u(z, d, k))
}

/// Singular points of `𝒢`: `z_± = k/(1−d∓2√((k−1)d))` and, when `k ≤ d+1`, `z = 1`.
pub fn singularities(d: usize, k: usize) -> Vec<f64> {
    let c = 2.0 * libm::sqrt(((k - 1) * d) as f64);
    let mut out = Vec::new();
    if k == 1 {
        out.push(-1.0 / d as f64);
    } else {
        for s in [-1.0, 1.0] {
            let den = 1.0 - d as f64 + s * c;
            if den != 0.0 {
                out.push(k as f64 / den);
            }
        }
    }
    if k <= d + 1 {
        out.push(1.0);
    }
    out
}

/// Radius of convergence of `𝒢` at laziness 0.
pub fn radius_of_convergence(d: usize, k: usize) -> f64 {
    if k == 1 {
        return (1.0 / d as f64).min(1.0);
    }
    let r = k as f64 / (d as f64 - 1.0 + 2.0 * libm::sqrt(((k - 1) * d) as f64));
    if k <= d + 1 {
        r.min(1.0)
    } else {
        r
    }
}

/// Support `[(1−d−2√((k−1)d))/k, (1−d+2√((k−1)d))/k]` of the continuous part; `None` for `k = 1`.
pub fn support_interval(d: usize, k: usize) -> Option<(f64, f64)> {
    if k < 2 {
        return None;
    }
    let c = 2.0 * libm::sqrt(((k - 1) * d) as f64);
    let base = 1.0 - d as f64;
    Some(((base - c) / k as f64, (base + c) / k as f64))
}

/// Mass of the atom at 1: `(d+1−k)/(d+1)` when `k < d+1`, else 0.
pub fn atom_mass(d: usize, k: usize) -> f64 {
    if k < d + 1 {
        (d + 1 - k) as f64 / (d + 1) as f64
    } else {
        0.0
    }
}

/// `ρ_{d,k}(x) = √(4(k−1)d − (kx+d−1)²) / (2π(d+x)(1−x))` on the support, 0 elsewhere.
pub fn density(x: f64, d: usize, k: usize) -> f64 {
    match support_interval(d, k) {
        Some((a, b)) if x > a && x < b => {
            let kk = k as f64;
            kk * libm::sqrt((x - a) * (b - x)) / (2.0 * PI * (d as f64 + x) * (1.0 - x))
        }
        _ => 0.0,
    }
}

/// Stieltjes transform `𝒮(z) = ∫ dμ(x)/(x − z)` of `μ_{d,k}`, for non-real `z`.
pub fn stieltjes(z: Complex64, d: usize, k: usize) -> Result<Complex64> {
    check_params(d, k)?;
    if z.im == 0.0 {
        return Err(Error::RealArgument);
    }
    if k == 1 {
        return Ok(ArborealMeasure::new(d, k)?.atoms.iter().map(|&(x, m)| m / (x - z)).sum());
    }
    let w = d as f64 - 1.0 + k as f64 * z;
    let c = 2.0 * libm::sqrt(((k - 1) * d) as f64);
    let s = (w - c).sqrt() * (w + c).sqrt();
    Ok(-2.0 * (k as f64 - 1.0) / ((k as f64 - 2.0) * z - (d as f64 - 1.0) + s))
}

/// The spectral measure `μ_{d,k}` of `𝒜_0` at `𝟙_{σ_0}` on the arboreal complex.
///
/// For `k = 1` the complex is a single `d`-simplex and the measure is
/// `d/(d+1)·δ_1 + 1/(d+1)·δ_{−d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArborealMeasure {
    pub d: usize,
    pub k: usize,
    pub support: Option<(f64, f64)>,
    /// `(location, mass)` pairs.
    pub atoms: Vec<(f64, f64)>,
}

/// Default absolute tolerance of measure quadratures.
pub const QUAD_TOL: f64 = 1e-11;

impl ArborealMeasure {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        check_params(d, k)?;
        let atoms = if k == 1 {
            vec![(1.0, atom_mass(d, k)), (-(d as f64), 1.0 / (d + 1) as f64)]
        } else if k < d + 1 {
            vec![(1.0, atom_mass(d, k))]
        } else {
            Vec::new()
        };
        Ok(ArborealMeasure { d, k, support: support_interval(d, k), atoms })
    }

    pub fn density(&self, x: f64) -> f64 {
        density(x, self.d, self.k)
    }

    pub fn atom_at_one(&self) -> f64 {
        self.atoms.iter().filter(|a| a.0 == 1.0).map(|a| a.1).sum()
    }

    /// `∫ f(x, 1−x) ρ(x) dx` over `x ≤ 1 − eps`, using `x = a + t²` and `x = b − t²`
    /// on the two halves of the support. The second argument of `f` is `1 − x`,
    /// computed without cancellation near `x = 1`.
    pub fn integrate_density_cut(&self, f: impl Fn(f64, f64) -> f64, eps: f64, tol: f64) -> Result<f64> {
        let Some((a, b)) = self.support else { return Ok(0.0) };
        let (d, k) = (self.d as f64, self.k as f64);
        let left_cancels = self.d == 1 && self.k == 2;
        let right_cancels = self.k == self.d + 1;
        let m = 0.5 * (a + b);
        let upper = b.min(1.0 - eps);
        if upper <= m {
            return Err(Error::InvalidParameter("cut reaches the middle of the support".into()));
        }
        let left = |t: f64| {
            let t2 = t * t;
            let x = a + t2;
            let ratio = if left_cancels { 1.0 } else { t2 / (d + x) };
            let omx = 1.0 - x;
            f(x, omx) * k * libm::sqrt(b - x) * ratio / (PI * omx)
        };
        let right = |t: f64| {
            let t2 = t * t;
            let x = b - t2;
            let omx = if right_cancels { t2 } else { 1.0 - x };
            let ratio = if right_cancels { 1.0 } else { t2 / omx };
            f(x, omx) * k * libm::sqrt((b - a) - t2) * ratio / (PI * (d + x))
        };
        let l = integrate(left, 0.0, libm::sqrt(m - a), tol)?;
        let r = integrate(right, libm::sqrt(b - upper), libm::sqrt(b - m), tol)?;
        Ok(l + r)
    }

    pub fn integrate_density(&self, f: impl Fn(f64, f64) -> f64, tol: f64) -> Result<f64> {
        self.integrate_density_cut(f, 0.0, tol)
    }

    /// `∫ xⁿ dμ`, continuous part plus atoms.
    pub fn moment(&self, n: usize) -> Result<f64> {
        let cont = self.integrate_density(|x, _| libm::pow(x, n as f64), QUAD_TOL)?;
        Ok(cont + self.atoms.iter().map(|&(x, m)| m * libm::pow(x, n as f64)).sum::<f64>())
    }

    pub fn continuous_mass(&self) -> Result<f64> {
        self.integrate_density(|_, _| 1.0, QUAD_TOL)
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.continuous_mass()? + self.atoms.iter().map(|a| a.1).sum::<f64>())
    }
}

/// Taylor coefficients `c_0..=c_N` of an analytic function by the discrete
/// Cauchy formula on the circle of the given radius.
pub fn taylor_coefficients(f: impl Fn(Complex64) -> Complex64, radius: f64, order: usize) -> Vec<f64> {
    let samples = 1024usize.max(4 * (order + 1));
    let values: Vec<Complex64> = (0..samples)
        .map(|j| f(Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64)))
        .collect();
    (0..=order)
        .map(|n| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (n * j) as f64 / samples as f64))
                .sum();
            s.re / (samples as f64 * libm::pow(radius, n as f64))
        })
        .collect()
}

/// Moments `∫ xⁿ dμ` recovered from `𝒮(z) = −Σ m_n z^{−n−1}` on a large circle.
pub fn moments_from_stieltjes(d: usize, k: usize, order: usize) -> Result<Vec<f64>> {
    let radius = 2.0 * (d as f64 + 1.0) + 1.0;
    let samples = 512usize;
    let mut values = Vec::with_capacity(samples);
    for j in 0..samples {
        let z = Complex64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / samples as f64);
        values.push((z, stieltjes(z, d, k)?));
    }
    Ok((0..=order)
        .map(|n| {
            let s: Complex64 = values.iter().map(|(z, v)| v * z.powu(n as u32 + 1)).sum();
            -s.re / samples as f64
        })
        .collect())
}
