//! Radially symmetric, non-increasing kernels `h(x) = φ(|x|)` and the level-set
//! calculus built on their distribution function `r(s) = L¹{φ > s}`.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// How the kernel was specified. Step, indicator and table kernels share the
/// piecewise-constant representation; the kind only records the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Power,
    Step,
    Indicator,
    Table,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Power => "power",
            KernelKind::Step => "step",
            KernelKind::Indicator => "indicator",
            KernelKind::Table => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// φ(t) = t^{-α}.
    Power { alpha: f64 },
    /// φ = `levels[i]` on `[radii[i-1], radii[i])` (with `radii[-1] = 0`), zero
    /// beyond the last radius. Levels strictly decrease and are positive.
    Piecewise { levels: Vec<f64>, radii: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialKernel {
    kind: KernelKind,
    profile: Profile,
    dim: usize,
}

/// Result of the improved-integrability test on `∫₁^∞ r(s)^{d-1} ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrability {
    pub converges: bool,
    /// The tail value, `+∞` when divergent.
    pub tail: f64,
}

/// Partial tail beyond this multiple of the first panel counts as divergence.
pub const DEFAULT_DIVERGENCE_CAP: f64 = 1e6;

const LOCAL_PANELS: usize = 10_000;

impl RadialKernel {
    pub fn power(alpha: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidKernel(format!("power exponent must be positive, got {alpha}")));
        }
        // ∫₀¹ t^{d-1-α} dt is finite iff α < d.
        if alpha >= dim as f64 {
            return Err(Error::InvalidKernel(format!(
                "t^-{alpha} is not locally integrable in dimension {dim} (need alpha < d)"
            )));
        }
        Ok(Self { kind: KernelKind::Power, profile: Profile::Power { alpha }, dim })
    }

    pub fn step(levels: &[f64], radii: &[f64], dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if levels.is_empty() || levels.len() != radii.len() {
            return Err(Error::InvalidKernel(format!(
                "step kernel needs as many levels as radii (got {} and {})",
                levels.len(),
                radii.len()
            )));
        }
        for (i, &a) in levels.iter().enumerate() {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidKernel(format!("level {i} must be positive and finite, got {a}")));
            }
            if i > 0 && a >= levels[i - 1] {
                return Err(Error::InvalidKernel("step levels must be strictly decreasing".into()));
            }
        }
        for (i, &r) in radii.iter().enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidKernel(format!("radius {i} must be positive and finite, got {r}")));
            }
            if i > 0 && r <= radii[i - 1] {
                return Err(Error::InvalidKernel("step radii must be strictly increasing".into()));
            }
        }
        Self::piecewise(KernelKind::Step, levels.to_vec(), radii.to_vec(), dim)
    }

    pub fn indicator(r: f64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidKernel(format!("indicator radius must be positive, got {r}")));
        }
        Self::piecewise(KernelKind::Indicator, vec![1.0], vec![r], dim)
    }

    /// Tabulated piecewise-constant profile: each `(t, phi)` pair sets φ = phi on
    /// `[t_prev, t)`, starting from `t_prev = 0`; φ vanishes beyond the last `t`.
    /// Repeated levels are merged and trailing zero levels dropped.
    pub fn table(pairs: &[(f64, f64)], dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if pairs.is_empty() {
            return Err(Error::InvalidKernel("empty table".into()));
        }
        let mut prev_t = 0.0;
        let mut prev_phi = f64::INFINITY;
        let mut levels: Vec<f64> = Vec::new();
        let mut radii: Vec<f64> = Vec::new();
        for (i, &(t, phi)) in pairs.iter().enumerate() {
            if !(t.is_finite() && t > prev_t) {
                return Err(Error::InvalidKernel(format!("table entry {i}: radii must be positive and strictly increasing")));
            }
            if !(phi.is_finite() && phi >= 0.0) {
                return Err(Error::InvalidKernel(format!("table entry {i}: phi must be finite and non-negative")));
            }
            if phi > prev_phi {
                return Err(Error::InvalidKernel(format!("table entry {i}: profile increases ({prev_phi} -> {phi})")));
            }
            if phi > 0.0 {
                if levels.last() == Some(&phi) {
                    *radii.last_mut().unwrap() = t;
                } else {
                    levels.push(phi);
                    radii.push(t);
                }
            }
            prev_t = t;
            prev_phi = phi;
        }
        if levels.is_empty() {
            return Err(Error::InvalidKernel("table profile is identically zero".into()));
        }
        Self::piecewise(KernelKind::Table, levels, radii, dim)
    }

    fn piecewise(kind: KernelKind, levels: Vec<f64>, radii: Vec<f64>, dim: usize) -> Result<Self> {
        let k = Self { kind, profile: Profile::Piecewise { levels, radii }, dim };
        let local = k.local_integral_check();
        if !local.is_finite() {
            return Err(Error::InvalidKernel("profile is not locally integrable".into()));
        }
        Ok(k)
    }

    /// Midpoint quadrature of `∫₀¹ φ(t) t^{d-1} dt`.
    fn local_integral_check(&self) -> f64 {
        let dt = 1.0 / LOCAL_PANELS as f64;
        (0..LOCAL_PANELS)
            .map(|i| {
                let t = (i as f64 + 0.5) * dt;
                self.phi(t) * t.powi(self.dim as i32 - 1) * dt
            })
            .sum()
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Levels and radii of a piecewise-constant kernel.
    pub fn steps(&self) -> Option<(&[f64], &[f64])> {
        match &self.profile {
            Profile::Piecewise { levels, radii } => Some((levels, radii)),
            Profile::Power { .. } => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.profile, Profile::Piecewise { .. })
    }

    pub fn ess_sup(&self) -> f64 {
        match &self.profile {
            Profile::Power { .. } => f64::INFINITY,
            Profile::Piecewise { levels, .. } => levels[0],
        }
    }

    /// `r(0)`, the length of the support of φ.
    pub fn support_radius(&self) -> f64 {
        match &self.profile {
            Profile::Power { .. } => f64::INFINITY,
            Profile::Piecewise { radii, .. } => *radii.last().unwrap(),
        }
    }

    /// φ(t) without the domain check; `t` must be non-negative.
    #[inline]
    pub(crate) fn phi(&self, t: f64) -> f64 {
        match &self.profile {
            Profile::Power { alpha } => t.powf(-alpha),
            Profile::Piecewise { levels, radii } => match radii.iter().position(|&r| t < r) {
                Some(i) => levels[i],
                None => 0.0,
            },
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_nonneg(t, "radius")?;
        Ok(self.phi(t))
    }

    /// `r(s) = L¹{t ≥ 0 : φ(t) > s}`.
    pub fn distribution(&self, s: f64) -> Result<f64> {
        check_nonneg(s, "level")?;
        Ok(match &self.profile {
            Profile::Power { alpha } => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    s.powf(-1.0 / alpha)
                }
            }
            Profile::Piecewise { levels, radii } => {
                let k = levels.iter().take_while(|&&a| a > s).count();
                if k == 0 {
                    0.0
                } else {
                    radii[k - 1]
                }
            }
        })
    }

    /// Left limit `r(s⁻) = L¹{φ ≥ s}` for `s > 0`.
    pub fn distribution_left(&self, s: f64) -> Result<f64> {
        check_nonneg(s, "level")?;
        if s == 0.0 {
            return self.distribution(0.0);
        }
        Ok(match &self.profile {
            Profile::Power { alpha } => s.powf(-1.0 / alpha),
            Profile::Piecewise { levels, radii } => {
                let k = levels.iter().take_while(|&&a| a >= s).count();
                if k == 0 {
                    0.0
                } else {
                    radii[k - 1]
                }
            }
        })
    }

    pub fn distribution_function(&self) -> DistributionFunction<'_> {
        DistributionFunction { kernel: self }
    }

    /// η = L¹{φ = ess sup φ}; zero for unbounded profiles.
    pub fn eta(&self) -> f64 {
        match &self.profile {
            Profile::Power { .. } => 0.0,
            Profile::Piecewise { radii, .. } => radii[0],
        }
    }

    /// σ = 0 when `diam ≥ r(0)`, otherwise φ(diam).
    pub fn sigma_level(&self, diam: f64) -> Result<f64> {
        if !(diam > 0.0) {
            return Err(Error::Domain(format!("diameter must be positive, got {diam}")));
        }
        if diam >= self.support_radius() {
            Ok(0.0)
        } else {
            Ok(self.phi(diam))
        }
    }

    /// `s(λ) = sup{s ≥ 0 : r(s) > λ}`, zero when no level qualifies.
    pub fn s_of_lambda(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        Ok(match &self.profile {
            // r(s) = s^{-1/α} > λ  ⟺  s < λ^{-α}
            Profile::Power { alpha } => lambda.powf(-alpha),
            // r = radii[i] on [levels[i+1], levels[i]), so the supremum is the
            // top of the first plateau whose radius exceeds λ.
            Profile::Piecewise { levels, radii } => match radii.iter().position(|&r| r > lambda) {
                Some(i) => levels[i],
                None => 0.0,
            },
        })
    }

    pub fn check_improved_integrability(&self) -> Integrability {
        self.check_improved_integrability_with(DEFAULT_DIVERGENCE_CAP)
    }

    /// Decides convergence of `∫₁^∞ r(s)^{d-1} ds`. In d = 1 the integrand is
    /// read as the indicator of `r(s) > 0`.
    pub fn check_improved_integrability_with(&self, cap: f64) -> Integrability {
        let d = self.dim;
        match (&self.profile, self.kind) {
            (Profile::Power { alpha }, _) => {
                // r(s)^{d-1} = s^{-(d-1)/α}
                let p = (d as f64 - 1.0) / alpha;
                if p > 1.0 {
                    Integrability { converges: true, tail: 1.0 / (p - 1.0) }
                } else {
                    Integrability { converges: false, tail: f64::INFINITY }
                }
            }
            (Profile::Piecewise { levels, radii }, KernelKind::Table) => {
                let _ = (levels, radii);
                self.tail_by_quadrature(cap)
            }
            (Profile::Piecewise { levels, radii }, _) => {
                let mut tail = 0.0;
                for i in 0..levels.len() {
                    let lower = levels.get(i + 1).copied().unwrap_or(0.0).max(1.0);
                    let width = levels[i] - lower;
                    if width > 0.0 {
                        tail += width * pow_dm1(radii[i], d);
                    }
                }
                Integrability { converges: true, tail }
            }
        }
    }

    fn tail_by_quadrature(&self, cap: f64) -> Integrability {
        let d = self.dim;
        let f = |s: f64| pow_dm1(self.distribution(s).unwrap_or(0.0), d);
        let mut a = 1.0;
        let mut first = None;
        let mut total = 0.0;
        for _ in 0..1100 {
            let b = 2.0 * a;
            let panel = adaptive_simpson(&f, a, b, 1e-13 * (b - a), 60);
            total += panel;
            let first_panel = *first.get_or_insert(panel);
            if first_panel > 0.0 && total > cap * first_panel {
                return Integrability { converges: false, tail: f64::INFINITY };
            }
            if f(b) == 0.0 {
                return Integrability { converges: true, tail: total };
            }
            a = b;
        }
        Integrability { converges: false, tail: f64::INFINITY }
    }

    /// `∫_{B_ρ(0)} h`, exact for every family.
    pub fn shell_mass(&self, rho: f64) -> f64 {
        let d = self.dim as f64;
        let omega = unit_ball_volume(self.dim);
        match &self.profile {
            Profile::Power { alpha } => d * omega * rho.powf(d - alpha) / (d - alpha),
            Profile::Piecewise { levels, radii } => {
                let mut inner = 0.0f64;
                let mut mass = 0.0;
                for (a, &r) in levels.iter().zip(radii) {
                    let outer = r.min(rho);
                    if outer > inner {
                        mass += a * omega * (outer.powi(self.dim as i32) - inner.powi(self.dim as i32));
                    }
                    inner = r;
                    if inner >= rho {
                        break;
                    }
                }
                mass
            }
        }
    }

    /// `‖h‖_{L¹(ℝ^d)}`, `None` when infinite.
    pub fn l1_norm(&self) -> Option<f64> {
        match &self.profile {
            Profile::Power { .. } => None,
            Profile::Piecewise { .. } => Some(self.shell_mass(self.support_radius())),
        }
    }

    /// Density scale at grid spacing `h`: ess sup φ, or the mean of h over the
    /// ball of radius h/2 when φ is unbounded.
    pub fn density_scale(&self, h: f64) -> f64 {
        if self.is_bounded() {
            self.ess_sup()
        } else {
            self.shell_mass(0.5 * h) / (unit_ball_volume(self.dim) * (0.5 * h).powi(self.dim as i32))
        }
    }
}

/// View of `s ↦ r(s)` with the derived quantities.
#[derive(Debug, Clone, Copy)]
pub struct DistributionFunction<'a> {
    kernel: &'a RadialKernel,
}

impl DistributionFunction<'_> {
    pub fn at(&self, s: f64) -> Result<f64> {
        self.kernel.distribution(s)
    }

    pub fn left_limit(&self, s: f64) -> Result<f64> {
        self.kernel.distribution_left(s)
    }

    /// Jump `r(s⁻) − r(s) = L¹{φ = s}`.
    pub fn jump(&self, s: f64) -> Result<f64> {
        Ok(self.left_limit(s)? - self.at(s)?)
    }

    pub fn support_radius(&self) -> f64 {
        self.kernel.support_radius()
    }

    pub fn eta(&self) -> f64 {
        self.kernel.eta()
    }

    /// Levels where `r` jumps, in decreasing order (empty for power kernels).
    pub fn jump_levels(&self) -> Vec<f64> {
        self.kernel.steps().map(|(l, _)| l.to_vec()).unwrap_or_default()
    }
}

/// Volume of the unit ball in ℝ^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    // ω_d = π^{d/2} / Γ(d/2 + 1), with ω_0 = 1 and ω_1 = 2.
    let mut w = [1.0, 2.0];
    for k in 2..=d {
        w[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    w[d % 2]
}

#[inline]
fn pow_dm1(r: f64, d: usize) -> f64 {
    if d == 1 {
        if r > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        r.powi(d as i32 - 1)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidKernel("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_nonneg(v: f64, what: &str) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be non-negative, got {v}")))
    }
}
