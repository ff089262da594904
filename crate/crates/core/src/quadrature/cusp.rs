//! Closed-form hyperbolic area near a cusp.
//!
//! At a cusp `ζ` on the real axis, the domain is locally bounded by two
//! side circles through `ζ` with radii `r_a` (left) and `r_b` (right). In
//! polar coordinates `z = ζ + ρ e^{iθ}` the region outside both circles is
//! `arccos(ρ/2r_b) < θ < arccos(-ρ/2r_a)`, and the area density
//! `1/(4 Im(z)²)` becomes `1/(4 ρ sin²θ)`.

use super::gk::integrate;
use crate::error::{Error, Result};

fn cot_arccos(x: f64) -> f64 {
    x / (1.0 - x * x).sqrt()
}

fn check_radius(r: f64, r_a: f64, r_b: f64) -> Result<()> {
    if !(r_a > 0.0 && r_b > 0.0) {
        return Err(Error::InvalidArgument("side radii must be positive".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(
            "cusp radius must be positive".into(),
        ));
    }
    if r > 2.0 * r_a.min(r_b) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} exceeds the tangency radius {} of the sector",
            2.0 * r_a.min(r_b)
        )));
    }
    Ok(())
}

/// Angular integral `∫ dθ / (4ρ sin²θ)` across the sector at distance `r`
/// from the cusp. Infinite radii are allowed and contribute nothing.
pub fn inner_integral(r: f64, r_a: f64, r_b: f64) -> Result<f64> {
    check_radius(r, r_a, r_b)?;
    let xa = r / (2.0 * r_a);
    let xb = r / (2.0 * r_b);
    Ok((cot_arccos(xa) + cot_arccos(xb)) / (4.0 * r))
}

/// Small-radius limit of [`inner_integral`].
pub fn inner_integral_limit(r_a: f64, r_b: f64) -> f64 {
    (1.0 / r_a + 1.0 / r_b) / 8.0
}

/// Hyperbolic area of the cusp sector within distance `big_r` of the cusp.
pub fn cusp_sector_integral(r_a: f64, r_b: f64, big_r: f64) -> Result<f64> {
    check_radius(big_r, r_a, r_b)?;
    let f = |r: f64| {
        if r <= 0.0 {
            inner_integral_limit(r_a, r_b)
        } else {
            inner_integral(r, r_a, r_b).unwrap_or(0.0)
        }
    };
    let scale = inner_integral_limit(r_a, r_b) * big_r;
    let res = integrate(f, 0.0, big_r, 1e-13 * scale.max(1e-300), 2000);
    Ok(res.value)
}

/// Upper bound `R · inner_integral(R)` for the sector area, valid because
/// the inner integral increases with the radius.
pub fn cusp_area_bound_at(r_a: f64, r_b: f64, big_r: f64) -> Result<f64> {
    if big_r >= 2.0 * r_a.min(r_b) {
        return Err(Error::InvalidArgument(
            "bound radius must stay below the tangency radius".into(),
        ));
    }
    let bound = big_r * inner_integral(big_r, r_a, r_b)?;
    debug_assert!(cusp_sector_integral(r_a, r_b, big_r)? <= bound * (1.0 + 1e-12));
    Ok(bound)
}

/// [`cusp_area_bound_at`] for the unit ball around the cusp.
pub fn cusp_area_bound(r_a: f64, r_b: f64) -> Result<f64> {
    cusp_area_bound_at(r_a, r_b, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_radii_closed_form() {
        let v = inner_integral(1.0, 1.0, 1.0).unwrap();
        assert!((v - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((cusp_area_bound(1.0, 1.0).unwrap() - 0.288_675_134_594_812_9).abs() < 1e-12);
    }

    #[test]
    fn limit_and_errors() {
        let v = inner_integral(1e-6, 1.0, 3.0).unwrap();
        let lim = inner_integral_limit(1.0, 3.0);
        assert!((v / lim - 1.0).abs() < 1e-6);
        assert!(inner_integral(2.5, 1.0, 3.0).is_err());
        assert!(inner_integral(1.0, f64::INFINITY, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn bound_scales_inversely() {
        // r · bound(r, r) stays between the small-radius limit 1/4 and 1/(2√3).
        for r in [1.0, 2.0, 4.0] {
            let scaled = r * cusp_area_bound(r, r).unwrap();
            assert!(
                (0.25..=1.0 / (2.0 * 3f64.sqrt()) + 1e-15).contains(&scaled),
                "{scaled}"
            );
        }
    }
}
