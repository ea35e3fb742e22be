//! Tilt angles for stacks of `⌈m⌉` unit squares spanning a strip of width `m`.
//!
//! A stack rotated by `θ` has extent `n·cosθ + sinθ` across the strip, so a
//! packing stack fits exactly when that equals `m`. A covering stack's
//! fully-covered band has width `n·cosθ − sinθ`.

use crate::geometry::{gceil, gfloor, gfrac};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use thiserror::Error;

/// Residual budget for returned angles.
pub const RESIDUAL_TOL: f64 = 1e-12;

const INTEGER_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltKind {
    Pack,
    Cover,
}

#[derive(Debug, Error, PartialEq)]
pub enum TiltError {
    #[error("strip width {0} is outside the solver domain (need a finite width >= 2)")]
    InvalidWidth(f64),
    #[error("no root reached for width {m}: residual {residual:e}")]
    NoRoot { m: f64, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripTilt {
    pub m: f64,
    pub n: u64,
    pub r: f64,
    pub theta: f64,
    pub kind: TiltKind,
}

impl StripTilt {
    pub fn residual(&self) -> f64 {
        tilt_residual(self.kind, self.m, self.n as f64, self.theta)
    }
}

/// `n·cosθ ± sinθ − m`, rearranged so that it stays accurate when `n` is
/// large and `θ` small.
pub fn tilt_residual(kind: TiltKind, m: f64, n: f64, theta: f64) -> f64 {
    let half = (0.5 * theta).sin();
    let drop = -2.0 * n * half * half - (m - n);
    match kind {
        TiltKind::Pack => drop + theta.sin(),
        TiltKind::Cover => drop - theta.sin(),
    }
}

fn residual_slope(kind: TiltKind, n: f64, theta: f64) -> f64 {
    match kind {
        TiltKind::Pack => theta.cos() - n * theta.sin(),
        TiltKind::Cover => -theta.cos() - n * theta.sin(),
    }
}

fn solve(kind: TiltKind, m: f64) -> Result<StripTilt, TiltError> {
    if !m.is_finite() || m < 2.0 {
        return Err(TiltError::InvalidWidth(m));
    }
    let n = gceil(m);
    let r = gfrac(m);
    if r <= INTEGER_EPS || (n - m).abs() <= INTEGER_EPS * m {
        return Ok(StripTilt {
            m,
            n: n as u64,
            r: 0.0,
            theta: 0.0,
            kind,
        });
    }
    let phase = (1.0 / n).atan();
    let spread = (m / (n * n + 1.0).sqrt()).acos();
    let mut theta = match kind {
        TiltKind::Pack => phase + spread,
        TiltKind::Cover => spread - phase,
    };
    for _ in 0..2 {
        let f = tilt_residual(kind, m, n, theta);
        if f.abs() <= RESIDUAL_TOL * 1e-2 {
            break;
        }
        theta -= f / residual_slope(kind, n, theta);
    }
    let residual = tilt_residual(kind, m, n, theta);
    if !(theta >= 0.0) || residual.abs() > RESIDUAL_TOL {
        return Err(TiltError::NoRoot { m, residual });
    }
    Ok(StripTilt {
        m,
        n: n as u64,
        r,
        theta,
        kind,
    })
}

/// Smallest non-negative root of `⌈m⌉·cosθ + sinθ = m`.
pub fn solve_pack_tilt(m: f64) -> Result<StripTilt, TiltError> {
    solve(TiltKind::Pack, m)
}

/// Smallest non-negative root of `⌈m⌉·cosθ − sinθ = m`.
pub fn solve_cover_tilt(m: f64) -> Result<StripTilt, TiltError> {
    solve(TiltKind::Cover, m)
}

/// Tilt of a band stack of length `⌈d⌉` in a band of width `d`; the same
/// equation as [`solve_pack_tilt`].
pub fn solve_stack_tilt(d: f64) -> Result<StripTilt, TiltError> {
    solve_pack_tilt(d)
}

/// Numeric view of a band angle against its small-angle expansion in
/// `x^{-1/6}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltSeriesDiagnostics {
    pub x: f64,
    pub k: u32,
    pub alpha_k: f64,
    pub leading: f64,
    pub l_k3_hat: f64,
    pub beta_k: f64,
    pub gamma_k: f64,
    pub r_k: f64,
    pub r_prime: f64,
    pub degenerate: bool,
}

pub fn alpha_diagnostics(x: f64, k: u32, theta: f64, d_k: f64) -> Result<TiltSeriesDiagnostics, TiltError> {
    let tilt = solve_stack_tilt(d_k)?;
    let x6 = x.powf(1.0 / 6.0);
    let x3 = x.powf(1.0 / 3.0);
    let leading = SQRT_2 / x6;
    let ratio = 1.0 / (x6 * theta.tan());
    let r_prime = ratio - gfloor(ratio);
    let kf = f64::from(k);
    Ok(TiltSeriesDiagnostics {
        x,
        k,
        alpha_k: tilt.theta,
        leading,
        l_k3_hat: (tilt.theta - leading) * x.sqrt(),
        beta_k: kf / x6,
        gamma_k: x3 * kf * r_prime * theta.tan(),
        r_k: gfrac(x3 + (SQRT_2 - kf) * x6),
        r_prime,
        degenerate: tilt.theta == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on the residual over `(0, π/4)`; the residual is positive at
    /// 0 for packing (n > m) and the root sits past the maximum, so bracket
    /// from the turning point.
    fn bisect(kind: TiltKind, m: f64) -> f64 {
        let n = m.ceil();
        let (mut lo, mut hi) = match kind {
            TiltKind::Pack => ((1.0 / n).atan(), std::f64::consts::FRAC_PI_2),
            TiltKind::Cover => (0.0, std::f64::consts::FRAC_PI_2),
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tilt_residual(kind, m, n, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn frozen_bisection_values() {
        assert!((bisect(TiltKind::Pack, 10.5) - 0.406_211_506_743_381_7).abs() < 1e-12);
        assert!((bisect(TiltKind::Cover, 10.5) - 0.224_891_732_341_891_4).abs() < 1e-12);
        assert!((bisect(TiltKind::Pack, 100.5) - 0.109_935_006_895_611_2).abs() < 1e-12);
        assert!((bisect(TiltKind::Cover, 100.5) - 0.090_133_673_719_634_1).abs() < 1e-12);
        assert!((bisect(TiltKind::Pack, 104.099) - 0.140_964_316_638_279_1).abs() < 1e-11);
    }

    #[test]
    fn solver_examples() {
        assert_eq!(solve_pack_tilt(7.0).unwrap().theta, 0.0);
        assert_eq!(solve_cover_tilt(7.0).unwrap().theta, 0.0);
        assert!((solve_pack_tilt(10.5).unwrap().theta - 0.40622).abs() < 1e-5);
        assert!((solve_pack_tilt(100.5).unwrap().theta - 0.10993).abs() < 1e-5);
        assert!((solve_cover_tilt(10.5).unwrap().theta - 0.22490).abs() < 1e-5);
        assert!((solve_cover_tilt(100.5).unwrap().theta - 0.09013).abs() < 1e-5);
        assert!((solve_stack_tilt(104.099).unwrap().theta - 0.14096).abs() < 1e-5);
        assert_eq!(solve_stack_tilt(104.0).unwrap().theta, 0.0);
        assert_eq!(solve_stack_tilt(9.5).unwrap(), solve_pack_tilt(9.5).unwrap());
    }

    #[test]
    fn rejects_out_of_domain_widths() {
        assert_eq!(solve_pack_tilt(1.5), Err(TiltError::InvalidWidth(1.5)));
        assert!(solve_cover_tilt(f64::NAN).is_err());
    }

    #[test]
    fn agrees_with_bisection_on_random_widths() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let m = 10f64.powf(rng.gen_range(0.31..8.0));
            for kind in [TiltKind::Pack, TiltKind::Cover] {
                let t = solve(kind, m).unwrap();
                if t.theta == 0.0 {
                    continue;
                }
                assert!((t.theta - bisect(kind, m)).abs() <= 1e-11, "m={m} {kind:?}");
                assert!(t.residual().abs() <= RESIDUAL_TOL);
            }
        }
    }

    #[test]
    fn below_sqrt2_bound_once_asymptotic() {
        // the pack angle stays under √2·m^{-1/2} only from m ≈ 185 on for r = 0.1
        for e in 0..=200 {
            let base = (200f64 * 10f64.powf(6.0 * e as f64 / 200.0)).floor();
            for r in [0.1, 0.5, 0.9] {
                let m = base + r;
                let bound = SQRT_2 / m.sqrt();
                let p = solve_pack_tilt(m).unwrap().theta;
                let c = solve_cover_tilt(m).unwrap().theta;
                assert!(p > 0.0 && p < bound, "pack m={m}");
                assert!(c > 0.0 && c < bound, "cover m={m}");
            }
        }
    }

    #[test]
    fn leading_order_coefficient() {
        for e in 0..=100 {
            let base = (100f64 * 10f64.powf(6.0 * e as f64 / 100.0)).floor();
            for r in [0.1, 0.5, 0.9] {
                let m = base + r;
                let theta = solve_pack_tilt(m).unwrap().theta;
                let want = (2.0 * (1.0 - r)).sqrt();
                assert!((theta * m.sqrt() - want).abs() <= 3.0 / m.sqrt(), "m={m}");
            }
        }
    }

    #[test]
    fn diagnostics_example() {
        let d = alpha_diagnostics(1e6, 1, 1e-3, 104.099).unwrap();
        assert!((d.alpha_k - 0.14096).abs() < 1e-5);
        assert!((d.leading - 0.141421).abs() < 1e-6);
        assert!((d.l_k3_hat + 0.46).abs() < 0.01);
        assert!(d.beta_k >= 0.0 && d.beta_k < SQRT_2 / 2.0 + 0.01);
        assert!(d.gamma_k >= 0.0 && d.gamma_k < 1.01);
        assert!(!d.degenerate);
        let flat = alpha_diagnostics(1e6, 1, 1e-3, 104.0).unwrap();
        assert!(flat.degenerate && flat.alpha_k == 0.0);
    }

    #[test]
    fn diagnostics_converge_at_larger_scale() {
        let x: f64 = 1e8;
        let theta = 10f64.powf(-4.5);
        let x6 = x.powf(1.0 / 6.0);
        let h1 = (1.0 / (x6 * theta.tan())).floor();
        let d1 = (x.powf(1.0 / 3.0) + (SQRT_2 - 1.0) * x6).floor() + h1 * theta.tan();
        let d = alpha_diagnostics(x, 1, theta, d1).unwrap();
        assert!((d.alpha_k - SQRT_2 / x6).abs() <= 10.0 / x.sqrt());
    }
}
