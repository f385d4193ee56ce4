//! Spherical analysis at archimedean places.
//!
//! A base function `f` is fixed through its Harish-Chandra profile
//! `H(e^u, f) = g(u)` with `g` a smooth bump on `[-1/4, 1/4]`. Its transform
//! `f_hat(s) = int e^{rho s u} g(u) du` is entire, and the test functions `F`
//! are defined by closed forms in `f_hat`. Everything else (the transform
//! `H(y, F)`, pointwise values of `F`, orbital integrals) is obtained by
//! quadrature from `F_hat` on the imaginary axis, which is cached once per
//! test function.

use crate::quad::{tanh_sinh, GaussLegendre};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArchError {
    #[error("conjugacy class is not regular: {0}")]
    NonRegular(String),
    #[error("elliptic classes only exist at real places")]
    EllipticAtComplexPlace,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchPlace {
    Real,
    Complex,
}

impl ArchPlace {
    /// `[K : R]`.
    pub fn rho(self) -> u32 {
        match self {
            Self::Real => 1,
            Self::Complex => 2,
        }
    }

    fn rho_f(self) -> f64 {
        self.rho() as f64
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Some(Self::Real),
            "complex" | "c" => Some(Self::Complex),
            _ => None,
        }
    }
}

/// Half-width of the bump's support.
pub const BUMP_RADIUS: f64 = 0.25;

/// The bump `g(t) = exp(-1/(1 - (4t)^2))` on `|t| < 1/4`.
pub fn bump(t: f64) -> f64 {
    let u = 4.0 * t;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    (-1.0 / ((1.0 - u) * (1.0 + u))).exp()
}

/// Nodes `u_k` on `[0, 1/4]` with weights `2 w_k g(u_k)`.
fn bump_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let (xs, ws) = GaussLegendre::new(16).composite_nodes(0.0, BUMP_RADIUS, 64);
        let weights = xs.iter().zip(&ws).map(|(&u, &w)| 2.0 * w * bump(u)).collect();
        (xs, weights)
    })
}

/// `f_hat(s) = 2 int_0^{1/4} cosh(rho s u) g(u) du`.
pub fn base_transform(place: ArchPlace, s: Complex64) -> Complex64 {
    let rho = place.rho_f();
    let (us, ws) = bump_rule();
    us.iter().zip(ws).map(|(&u, &w)| (s * rho * u).cosh() * w).sum()
}

/// `f_hat(i tau)`, real because `g` is even.
fn base_transform_imag(rho: f64, tau: f64) -> f64 {
    let (us, ws) = bump_rule();
    us.iter().zip(ws).map(|(&u, &w)| (rho * tau * u).cos() * w).sum()
}

/// Gauss–Legendre nodes on `[0, 1]` split into `panels` panels.
fn unit_rule(panels: usize) -> (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(16)).composite_nodes(0.0, 1.0, panels)
}

/// Integrate `k(u) / sqrt(2 cosh t - 2 cosh u)` over `[0, t]`, removing the
/// endpoint singularity with `u = t (1 - v^2)`.
fn mehler_dirichlet<K: FnMut(f64) -> f64>(mut k: K, t: f64, panels: usize) -> f64 {
    let (vs, ws) = unit_rule(panels);
    vs.iter()
        .zip(&ws)
        .map(|(&v, &w)| {
            let gap = t * v * v;
            let u = t - gap;
            let den = (4.0 * (0.5 * (t + u)).sinh() * (0.5 * gap).sinh()).sqrt();
            w * k(u) * 2.0 * t * v / den
        })
        .sum()
}

/// Elementary spherical function `phi_s` at height `t >= 0`.
///
/// Real places use `P_{-1/2+s}(cosh t) = (2/pi) int_0^t cosh(s u) / sqrt(2 cosh t - 2 cosh u) du`;
/// complex places use `sinh(2 s t) / (2 s sinh t)`.
pub fn spherical_phi(place: ArchPlace, s: Complex64, t: f64) -> Complex64 {
    assert!(t >= 0.0, "height must be nonnegative");
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    match place {
        ArchPlace::Complex => {
            let z = s * 2.0 * t;
            // sinh(z)/z -> 1 + z^2/6 near zero.
            let sinhc = if z.norm() < 1e-4 { Complex64::new(1.0, 0.0) + z * z / 6.0 } else { z.sinh() / z };
            sinhc * (t / t.sinh())
        }
        ArchPlace::Real => {
            let panels = 4 + (s.norm() * t / 3.0).ceil() as usize + (2.0 * t).ceil() as usize;
            let re = mehler_dirichlet(|u| (s * u).cosh().re, t, panels);
            let im = if s.im == 0.0 || s.re == 0.0 { 0.0 } else { mehler_dirichlet(|u| (s * u).cosh().im, t, panels) };
            Complex64::new(re, im) * (2.0 / PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum Variant {
    /// `F_hat(s) = cosh(rho R s)^2 f_hat(s)^4`.
    Nontempered { r: f64 },
    /// `F_hat(s) = (f_hat(s - it)^2 + f_hat(s + it)^2)^2`.
    Tempered { t: f64 },
}

/// Tabulated kernel `K(u) = int_0^inf cos(tau u) F_hat(i tau) tau tanh(pi tau) dtau`.
#[derive(Debug)]
struct KernelTable {
    step: f64,
    values: Vec<f64>,
}

impl KernelTable {
    const STEP: f64 = 0.002;

    fn build(nodes: &[f64], amps: &[f64], u_max: f64) -> Self {
        let n = (u_max / Self::STEP).ceil() as usize + 8;
        let mut values = vec![0.0; n + 1];
        for (&tau, &a) in nodes.iter().zip(amps) {
            let rot = Complex64::from_polar(1.0, tau * Self::STEP);
            let mut z = Complex64::new(1.0, 0.0);
            for (j, v) in values.iter_mut().enumerate() {
                if j % 128 == 0 {
                    z = Complex64::from_polar(1.0, tau * Self::STEP * j as f64);
                }
                *v += a * z.re;
                z *= rot;
            }
        }
        Self { step: Self::STEP, values }
    }

    /// Eight-point Lagrange interpolation, using that `K` is even.
    fn eval(&self, u: f64) -> Option<f64> {
        let x = u.abs() / self.step;
        let base = x.floor() as i64 - 3;
        if base + 7 >= self.values.len() as i64 {
            return None;
        }
        let mut sum = 0.0;
        for i in 0..8i64 {
            let xi = (base + i) as f64;
            let mut l = 1.0;
            for m in 0..8i64 {
                if m != i {
                    let xm = (base + m) as f64;
                    l *= (x - xm) / (xi - xm);
                }
            }
            sum += l * self.values[(base + i).unsigned_abs() as usize];
        }
        Some(sum)
    }
}

/// A test function at one archimedean place with its cached spectral data.
#[derive(Debug)]
pub struct TestFn {
    pub place: ArchPlace,
    pub variant: Variant,
    tau: Vec<f64>,
    weights: Vec<f64>,
    hat: Vec<f64>,
    kernel: OnceLock<KernelTable>,
}

/// Spectral cutoff: beyond `rho tau = 200` the fourth power of the base
/// transform is about `1e-15` of its peak.
const TAU_CUTOFF: f64 = 200.0;

pub fn build_testfn(place: ArchPlace, variant: Variant) -> Result<TestFn, ArchError> {
    let rho = place.rho_f();
    let (tau_max, freq) = match variant {
        Variant::Nontempered { r } => {
            if !(r.is_finite() && r >= 0.0) {
                return Err(ArchError::InvalidParameter(format!("R must be finite and nonnegative, got {r}")));
            }
            let support = 2.0 * r + 2.0;
            (TAU_CUTOFF / rho, rho * (2.0 * support + 2.0) + 2.0 * rho * r + rho + support + 2.0)
        }
        Variant::Tempered { t } => {
            if !t.is_finite() {
                return Err(ArchError::InvalidParameter(format!("t must be finite, got {t}")));
            }
            (t.abs() + TAU_CUTOFF / rho, rho * 6.0 + rho + 4.0)
        }
    };
    let h = (8.0 / freq).min(0.5);
    let panels = (tau_max / h).ceil() as usize;
    let (tau, weights) = GaussLegendre::new(16).composite_nodes(0.0, tau_max, panels);
    let mut f = TestFn { place, variant, tau, weights, hat: Vec::new(), kernel: OnceLock::new() };
    f.hat = f.tau.iter().map(|&x| f.hat_imag(x)).collect();
    Ok(f)
}

impl TestFn {
    pub fn rho(&self) -> f64 {
        self.place.rho_f()
    }

    /// Radius of the ball in `G` containing the support of `F`.
    pub fn support_radius(&self) -> f64 {
        match self.variant {
            Variant::Nontempered { r } => 2.0 * r + 2.0,
            Variant::Tempered { .. } => 2.0,
        }
    }

    /// `F_hat(s)` from its closed form.
    pub fn transform(&self, s: Complex64) -> Complex64 {
        let rho = self.rho();
        match self.variant {
            Variant::Nontempered { r } => {
                let c = (s * rho * r).cosh();
                c * c * base_transform(self.place, s).powu(4)
            }
            Variant::Tempered { t } => {
                let it = Complex64::new(0.0, t);
                let u = base_transform(self.place, s - it).powu(2) + base_transform(self.place, s + it).powu(2);
                u * u
            }
        }
    }

    /// `F_hat(i tau)`, real and nonnegative.
    pub fn hat_imag(&self, tau: f64) -> f64 {
        let rho = self.rho();
        match self.variant {
            Variant::Nontempered { r } => {
                let c = (rho * r * tau).cos();
                c * c * base_transform_imag(rho, tau).powi(4)
            }
            Variant::Tempered { t } => {
                let u = base_transform_imag(rho, tau - t).powi(2) + base_transform_imag(rho, tau + t).powi(2);
                u * u
            }
        }
    }

    /// `H(y, F) = (rho / 2 pi) int y^{-i tau rho} F_hat(i tau) dtau`.
    pub fn hc(&self, y: f64) -> f64 {
        assert!(y > 0.0, "H(y, F) needs y > 0");
        let x = self.rho() * y.ln();
        let s: f64 = self.tau.iter().zip(&self.weights).zip(&self.hat).map(|((&t, &w), &h)| w * h * (t * x).cos()).sum();
        self.rho() / PI * s
    }

    /// `int_R |F_hat(i tau)| dtau`.
    pub fn hat_l1(&self) -> f64 {
        2.0 * self.weights.iter().zip(&self.hat).map(|(w, h)| w * h.abs()).sum::<f64>()
    }

    /// Largest `|H(y, F)|` over a fine grid of `log y` covering the support.
    pub fn hc_sup(&self) -> f64 {
        let s = self.support_radius() + 0.5;
        let n = (s * 200.0).ceil() as usize;
        (0..=n).map(|k| self.hc((s * k as f64 / n as f64).exp()).abs()).fold(0.0, f64::max)
    }

    fn kernel(&self) -> &KernelTable {
        self.kernel.get_or_init(|| {
            let amps: Vec<f64> = self
                .tau
                .iter()
                .zip(&self.weights)
                .zip(&self.hat)
                .map(|((&t, &w), &h)| w * h * t * (PI * t).tanh())
                .collect();
            KernelTable::build(&self.tau, &amps, self.support_radius() + 3.0)
        })
    }

    fn kernel_direct(&self, u: f64) -> f64 {
        self.tau
            .iter()
            .zip(&self.weights)
            .zip(&self.hat)
            .map(|((&t, &w), &h)| w * h * t * (PI * t).tanh() * (t * u).cos())
            .sum()
    }

    /// `F` at height `t` by spherical inversion:
    /// `(1/4 pi) int_R phi_{i tau}(t) F_hat(i tau) tau tanh(pi tau) dtau` at real places and
    /// `(2/pi^2) int_R phi_{i tau}(t) F_hat(i tau) tau^2 dtau` at complex places.
    pub fn pointwise(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "height must be nonnegative");
        match self.place {
            ArchPlace::Real => {
                if t == 0.0 {
                    return self.kernel_direct(0.0) / (2.0 * PI);
                }
                let table = self.kernel();
                let panels = 2 + (8.0 * t).ceil() as usize;
                let integral = mehler_dirichlet(|u| table.eval(u).unwrap_or_else(|| self.kernel_direct(u)), t, panels);
                integral / (PI * PI)
            }
            ArchPlace::Complex => {
                let weight = |tau: f64| -> f64 {
                    if t < 1e-12 {
                        2.0 * tau
                    } else {
                        (2.0 * tau * t).sin() / t.sinh()
                    }
                };
                let s: f64 = self.tau.iter().zip(&self.weights).zip(&self.hat).map(|((&x, &w), &h)| w * h * x * weight(x)).sum();
                2.0 / (PI * PI) * s
            }
        }
    }
}

/// Spherical transform `int_G F phi_{i tau}` of a radial function given by
/// its values at heights, over `[0, t_max]`: `2 pi int F phi sinh t dt` at
/// real places and `4 pi int F phi sinh^2 t dt` at complex places.
pub fn spherical_transform<F: Fn(f64) -> f64>(place: ArchPlace, f: F, tau: f64, t_max: f64) -> f64 {
    let panels = (t_max * 8.0).ceil().max(4.0) as usize;
    let (ts, ws) = GaussLegendre::new(16).composite_nodes(0.0, t_max, panels);
    let s = Complex64::new(0.0, tau);
    ts.iter()
        .zip(&ws)
        .map(|(&t, &w)| {
            let phi = spherical_phi(place, s, t).re;
            match place {
                ArchPlace::Real => 2.0 * PI * w * f(t) * phi * t.sinh(),
                ArchPlace::Complex => 4.0 * PI * w * f(t) * phi * t.sinh().powi(2),
            }
        })
        .sum()
}

/// A regular semisimple conjugacy class at one archimedean place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchGammaClass {
    /// Eigenvalues `w, 1/w`.
    Split { w: Complex64 },
    /// Rotation by `theta` in `(0, pi)`.
    EllipticReal { theta: f64 },
}

impl ArchGammaClass {
    /// The class with trace `x` at a real place.
    pub fn from_real_trace(x: f64) -> Result<Self, ArchError> {
        if x.abs() < 2.0 {
            Ok(Self::EllipticReal { theta: (x / 2.0).acos() })
        } else if x.abs() > 2.0 {
            let w = (x + x.signum() * (x * x - 4.0).sqrt()) / 2.0;
            Ok(Self::Split { w: Complex64::new(w, 0.0) })
        } else {
            Err(ArchError::NonRegular(format!("trace {x}")))
        }
    }

    /// The class with trace `x` at a complex place.
    pub fn from_complex_trace(x: Complex64) -> Result<Self, ArchError> {
        let root = (x * x - 4.0).sqrt();
        let mut w = (x + root) / 2.0;
        if w.norm() < 1.0 {
            w = (x - root) / 2.0;
        }
        let class = Self::Split { w };
        if class.disc_abs(ArchPlace::Complex) == 0.0 {
            return Err(ArchError::NonRegular(format!("trace {x}")));
        }
        Ok(class)
    }

    /// `|Delta(gamma)|_K`: `|w - 1/w|^rho` when split, `(2 sin theta)^2` when elliptic.
    pub fn disc_abs(&self, place: ArchPlace) -> f64 {
        match *self {
            Self::Split { w } => (w - w.inv()).norm().powi(place.rho() as i32),
            Self::EllipticReal { theta } => (2.0 * theta.sin()).powi(2),
        }
    }
}

/// `|Delta(gamma)|^{1/2} O(gamma, F)`: `H(|w|^2, F)` for split classes and
/// `int_R H(e^{2 asinh(v sin theta)}, F) / (1 + v^2) dv` for elliptic ones.
pub fn orbital_archimedean(f: &TestFn, gamma: &ArchGammaClass) -> Result<f64, ArchError> {
    match *gamma {
        ArchGammaClass::Split { w } => {
            if gamma.disc_abs(f.place) == 0.0 || w.norm() == 0.0 {
                return Err(ArchError::NonRegular(format!("eigenvalue {w}")));
            }
            Ok(f.hc(w.norm_sqr()))
        }
        ArchGammaClass::EllipticReal { theta } => {
            if f.place == ArchPlace::Complex {
                return Err(ArchError::EllipticAtComplexPlace);
            }
            if !(theta > 0.0 && theta < PI) {
                return Err(ArchError::NonRegular(format!("rotation angle {theta}")));
            }
            // v = sinh(s) / sin(theta) turns the weight into
            // sin(theta) cosh(s) / (sin^2 theta + sinh^2 s) and r(v) into 2s.
            let st = theta.sin();
            let half = 0.5 * f.support_radius() + 0.5;
            let panels = (2.0 * half / 0.05).ceil() as usize;
            let (ss, ws) = GaussLegendre::new(16).composite_nodes(-half, half, panels);
            Ok(ss
                .iter()
                .zip(&ws)
                .map(|(&s, &w)| w * f.hc((2.0 * s).exp()) * st * s.cosh() / (st * st + s.sinh().powi(2)))
                .sum())
        }
    }
}

/// The same elliptic orbital integral computed in Cartan coordinates from
/// pointwise values: `4 pi sin(theta) int_0^inf F(2 asinh(sinh t sin theta)) sinh t dt`.
pub fn orbital_elliptic_cartan(f: &TestFn, theta: f64) -> Result<f64, ArchError> {
    if f.place == ArchPlace::Complex {
        return Err(ArchError::EllipticAtComplexPlace);
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(ArchError::NonRegular(format!("rotation angle {theta}")));
    }
    let st = theta.sin();
    let t_max = ((0.5 * (f.support_radius() + 0.5)).sinh() / st).asinh();
    let panels = (t_max / 0.05).ceil() as usize;
    let (ts, ws) = GaussLegendre::new(16).composite_nodes(0.0, t_max, panels);
    let s: f64 = ts
        .iter()
        .zip(&ws)
        .map(|(&t, &w)| w * f.pointwise(2.0 * (t.sinh() * st).asinh()) * t.sinh())
        .sum();
    Ok(4.0 * PI * st * s)
}

/// `cosh H(g) = (|a|^2 + |b|^2 + |c|^2 + |d|^2) / 2` for `g` in `SL2`.
pub fn cosh_height(g: [[Complex64; 2]; 2]) -> f64 {
    0.5 * g.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Quadrature check of the base transform, independent of the cached rule.
pub fn base_transform_reference(place: ArchPlace, tau: f64) -> f64 {
    let rho = place.rho_f();
    2.0 * tanh_sinh(|u, _| (rho * tau * u).cos() * bump(u), 0.0, BUMP_RADIUS, 1e-14).value
}
