//! Phase-space variables and the Itô drift and noise of the six-mode system.
//!
//! Pump `k` drives the signal pair `PUMP_PAIRS[k]`. For a pair `(i, j)` the
//! equations read
//!
//! ```text
//! d beta_k  = -chi alpha_i alpha_j dt
//! d alpha_i += chi beta_k alpha_j+ dt + sqrt(chi beta_k) dW_k
//! d alpha_j += chi beta_k alpha_i+ dt + sqrt(chi beta_k) conj(dW_k)
//! ```
//!
//! and the same with every variable replaced by its `+` partner and `dW_k`
//! by `dW_{k+3}`. The `dW` are independent complex Wiener increments with
//! `E[dW conj(dW)] = dt` and `E[dW dW] = 0`.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Signal modes coupled by each of the three pumps.
pub const PUMP_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// One positive-P trajectory: twelve independent complex amplitudes.
///
/// `alpha_plus` is not the conjugate of `alpha` on a trajectory; the two
/// agree only in the ensemble mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PPState {
    pub alpha: [C64; 3],
    pub alpha_plus: [C64; 3],
    pub beta: [C64; 3],
    pub beta_plus: [C64; 3],
}

impl PPState {
    /// Real coherent pumps `beta0` and real coherent signals `alpha0`.
    pub fn coherent(beta0: f64, alpha0: f64) -> Self {
        let a = [C64::new(alpha0, 0.0); 3];
        let b = [C64::new(beta0, 0.0); 3];
        Self { alpha: a, alpha_plus: a, beta: b, beta_plus: b }
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.alpha.iter().chain(&self.alpha_plus).chain(&self.beta).chain(&self.beta_plus)
    }

    fn iter_mut(&mut self) -> impl Iterator<Item = &mut C64> {
        self.alpha
            .iter_mut()
            .chain(self.alpha_plus.iter_mut())
            .chain(self.beta.iter_mut())
            .chain(self.beta_plus.iter_mut())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &PPState, scale: f64) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b * scale;
        }
    }

    /// Largest modulus over all twelve variables; NaN if any is not finite.
    pub fn max_abs(&self) -> f64 {
        let m = self.max_norm_sqr();
        if m.is_nan() {
            m
        } else {
            m.sqrt()
        }
    }

    /// Largest squared modulus; NaN if any variable is not finite.
    pub fn max_norm_sqr(&self) -> f64 {
        let mut m = 0.0_f64;
        for z in self.iter() {
            let n = z.norm_sqr();
            if !n.is_finite() {
                return f64::NAN;
            }
            m = m.max(n);
        }
        m
    }

    /// Every variable exchanged with its `+` partner and conjugated.
    pub fn conjugate_swap(&self) -> Self {
        Self {
            alpha: self.alpha_plus.map(|z| z.conj()),
            alpha_plus: self.alpha.map(|z| z.conj()),
            beta: self.beta_plus.map(|z| z.conj()),
            beta_plus: self.beta.map(|z| z.conj()),
        }
    }

    /// `X_j = alpha_j + alpha_j+` and `Y_j = -i (alpha_j - alpha_j+)`.
    pub fn quadratures(&self) -> ([C64; 3], [C64; 3]) {
        let minus_i = C64::new(0.0, -1.0);
        let x = std::array::from_fn(|j| self.alpha[j] + self.alpha_plus[j]);
        let y = std::array::from_fn(|j| minus_i * (self.alpha[j] - self.alpha_plus[j]));
        (x, y)
    }

    /// `sum |beta|^2 + sum |alpha|^2 / 2`, conserved by the noiseless flow.
    pub fn energy(&self) -> f64 {
        self.beta.iter().map(|b| b.norm_sqr()).sum::<f64>()
            + 0.5 * self.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }
}

/// Deterministic part of the equations of motion (per unit time).
pub fn drift(s: &PPState, chi: f64) -> PPState {
    let mut d = PPState::default();
    for (k, &(i, j)) in PUMP_PAIRS.iter().enumerate() {
        d.beta[k] = -chi * s.alpha[i] * s.alpha[j];
        d.beta_plus[k] = -chi * s.alpha_plus[i] * s.alpha_plus[j];
        d.alpha[i] += chi * s.beta[k] * s.alpha_plus[j];
        d.alpha[j] += chi * s.beta[k] * s.alpha_plus[i];
        d.alpha_plus[i] += chi * s.beta_plus[k] * s.alpha[j];
        d.alpha_plus[j] += chi * s.beta_plus[k] * s.alpha[i];
    }
    d
}

/// Six independent complex Wiener increments over `dt`.
pub fn draw_wiener<R: Rng + ?Sized>(rng: &mut R, dt: f64) -> [C64; 6] {
    let scale = (0.5 * dt).sqrt();
    std::array::from_fn(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * scale
    })
}

/// Noise increment for given Wiener increments `dw[0..3]` (unplussed pumps)
/// and `dw[3..6]` (plussed pumps). Square roots use the principal branch.
pub fn apply_noise(s: &PPState, chi: f64, dw: &[C64; 6]) -> PPState {
    let mut d = PPState::default();
    for (k, &(i, j)) in PUMP_PAIRS.iter().enumerate() {
        let amp = (s.beta[k] * chi).sqrt();
        d.alpha[i] += amp * dw[k];
        d.alpha[j] += amp * dw[k].conj();
        let amp_plus = (s.beta_plus[k] * chi).sqrt();
        d.alpha_plus[i] += amp_plus * dw[k + 3];
        d.alpha_plus[j] += amp_plus * dw[k + 3].conj();
    }
    d
}

/// Principal square root via the half-angle formulas, avoiding the polar
/// round trip.
pub fn principal_sqrt(z: C64) -> C64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        return if x >= 0.0 { C64::new(x.sqrt(), y) } else { C64::new(0.0, (-x).sqrt().copysign(y)) };
    }
    let m = z.norm();
    if x >= 0.0 {
        let t = (0.5 * (m + x)).sqrt();
        C64::new(t, y / (2.0 * t))
    } else {
        let t = (0.5 * (m - x)).sqrt();
        C64::new(y.abs() / (2.0 * t), t.copysign(y))
    }
}

/// One Euler–Maruyama step over `h` with Wiener increments `dw`, in place.
pub fn euler_step(s: &mut PPState, chi: f64, h: f64, dw: &[C64; 6]) {
    let mut d = drift(s, chi);
    for z in d.alpha.iter_mut().chain(d.alpha_plus.iter_mut()).chain(d.beta.iter_mut()).chain(d.beta_plus.iter_mut()) {
        *z *= h;
    }
    for (k, &(i, j)) in PUMP_PAIRS.iter().enumerate() {
        let amp = principal_sqrt(s.beta[k] * chi);
        d.alpha[i] += amp * dw[k];
        d.alpha[j] += amp * dw[k].conj();
        let amp_plus = principal_sqrt(s.beta_plus[k] * chi);
        d.alpha_plus[i] += amp_plus * dw[k + 3];
        d.alpha_plus[j] += amp_plus * dw[k + 3].conj();
    }
    for m in 0..3 {
        s.alpha[m] += d.alpha[m];
        s.alpha_plus[m] += d.alpha_plus[m];
        s.beta[m] += d.beta[m];
        s.beta_plus[m] += d.beta_plus[m];
    }
}

pub fn noise_increment<R: Rng + ?Sized>(s: &PPState, chi: f64, dt: f64, rng: &mut R) -> PPState {
    apply_noise(s, chi, &draw_wiener(rng, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn generic_state(seed: u64) -> PPState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = || C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        PPState {
            alpha: [z(), z(), z()],
            alpha_plus: [z(), z(), z()],
            beta: [z(), z(), z()],
            beta_plus: [z(), z(), z()],
        }
    }

    #[test]
    fn vacuum_signal_is_fixed_point() {
        let s = PPState::coherent(1e3, 0.0);
        let d = drift(&s, 1e-2);
        assert!(d.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn symmetric_real_state() {
        let (a, b, chi) = (0.7, 3.0, 0.2);
        let d = drift(&PPState::coherent(b, a), chi);
        for j in 0..3 {
            assert!((d.alpha[j] - C64::new(2.0 * chi * b * a, 0.0)).norm() < 1e-15);
            assert!((d.alpha_plus[j] - C64::new(2.0 * chi * b * a, 0.0)).norm() < 1e-15);
            assert!((d.beta[j] - C64::new(-chi * a * a, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn printed_partner_terms() {
        let s = generic_state(3);
        let chi = 0.3;
        let d = drift(&s, chi);
        let expect_a1 = chi * (s.beta[0] * s.alpha_plus[1] + s.beta[2] * s.alpha_plus[2]);
        let expect_a2p = chi * (s.beta_plus[0] * s.alpha[0] + s.beta_plus[1] * s.alpha[2]);
        let expect_a3 = chi * (s.beta[1] * s.alpha_plus[1] + s.beta[2] * s.alpha_plus[0]);
        let expect_b3 = -chi * s.alpha[0] * s.alpha[2];
        assert!((d.alpha[0] - expect_a1).norm() < 1e-14);
        assert!((d.alpha_plus[1] - expect_a2p).norm() < 1e-14);
        assert!((d.alpha[2] - expect_a3).norm() < 1e-14);
        assert!((d.beta[2] - expect_b3).norm() < 1e-14);
    }

    #[test]
    fn conjugation_symmetry() {
        for seed in 0..5 {
            let s = generic_state(seed);
            let lhs = drift(&s.conjugate_swap(), 0.4);
            let rhs = drift(&s, 0.4).conjugate_swap();
            for (a, b) in lhs.iter().zip(rhs.iter()) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn noise_placement() {
        let s = PPState::coherent(4.0, 0.0);
        let mut dw = [C64::new(0.0, 0.0); 6];
        dw[0] = C64::new(0.3, 0.1);
        let d = apply_noise(&s, 0.25, &dw);
        // sqrt(chi beta) = 1
        assert_eq!(d.alpha[0], dw[0]);
        assert_eq!(d.alpha[1], dw[0].conj());
        assert_eq!(d.alpha[2], C64::new(0.0, 0.0));
        assert!(d.alpha_plus.iter().chain(&d.beta).all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn zero_coupling_zero_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = noise_increment(&PPState::coherent(1e3, 0.5), 0.0, 1e-3, &mut rng);
        assert!(d.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn fast_sqrt_is_principal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let z = C64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            assert!((principal_sqrt(z) - z.sqrt()).norm() < 1e-14 * (1.0 + z.norm()));
        }
        for z in [C64::new(4.0, 0.0), C64::new(-4.0, 0.0), C64::new(-4.0, -0.0), C64::new(0.0, 0.0)] {
            assert!((principal_sqrt(z) - z.sqrt()).norm() < 1e-15, "{z}");
        }
    }

    #[test]
    fn fused_step_matches_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = generic_state(8);
        let dw = draw_wiener(&mut rng, 0.01);
        let mut fused = s;
        euler_step(&mut fused, 0.3, 0.01, &dw);
        let mut parts = s;
        parts.add_scaled(&drift(&s, 0.3), 0.01);
        parts.add_scaled(&apply_noise(&s, 0.3, &dw), 1.0);
        for (a, b) in fused.iter().zip(parts.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn energy_of_coherent_state() {
        let s = PPState::coherent(2.0, 1.0);
        assert_eq!(s.energy(), 12.0 + 1.5);
    }
}
