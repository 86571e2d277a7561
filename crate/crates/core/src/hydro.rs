//! Buoy hydrostatics and hydrodynamics for a box-shaped hull.

use crate::error::{invalid, ModelError, Result};
use crate::linalg::Mat2;
use crate::scalar::Real;

/// Cuboid buoy geometry and mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuoyGeometry<T> {
    pub length: T,
    pub height: T,
    pub width: T,
    pub mass: T,
}

impl<T: Real> BuoyGeometry<T> {
    pub fn new(length: T, height: T, width: T, mass: T) -> Self {
        Self {
            length,
            height,
            width,
            mass,
        }
    }

    /// Picks the hull width so that a buoy of `mass` floats with
    /// `fraction` of its volume immersed in water of `water_density`.
    pub fn with_immersed_fraction(length: T, height: T, mass: T, water_density: T, fraction: T) -> Self {
        let volume = mass / (water_density * fraction);
        Self::new(length, height, volume / (length * height), mass)
    }

    pub fn volume(&self) -> T {
        self.length * self.width * self.height
    }

    /// Waterplane area `l_b · w_b`.
    pub fn waterplane_area(&self) -> T {
        self.length * self.width
    }

    /// Checks dimensions and that the hull floats: `0 < m_b < ρ_w V_b`.
    pub fn validate(&self, water_density: T) -> Result<()> {
        for (name, v) in [("buoy length", self.length), ("buoy height", self.height), ("buoy width", self.width)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.mass > T::zero() && self.mass < water_density * self.volume()) {
            return Err(invalid(
                "buoy mass",
                format!(
                    "must lie in (0, rho_w * V_b) = (0, {}), got {}",
                    water_density * self.volume(),
                    self.mass
                ),
            ));
        }
        Ok(())
    }

    /// Vertical immersion depth of the hull at the buoy centre, clamped to
    /// `[0, h_b]`. The hull tilt is ignored.
    pub fn draft(&self, z_b: T, surface: T) -> T {
        (surface - (z_b - self.height * T::half())).max(T::zero()).min(self.height)
    }

    /// Immersed volume in `[0, V_b]`.
    pub fn immersed_volume(&self, z_b: T, surface: T) -> T {
        self.draft(z_b, surface) * self.waterplane_area()
    }

    /// Wetted area for a given draft, `4 · l_b · draft`, which reaches the
    /// `4 l_b h_b` bound at full immersion.
    pub fn wetted_area(&self, draft: T) -> Result<T> {
        if !(draft >= T::zero() && draft <= self.height) {
            return Err(ModelError::DraftOutOfRange {
                draft: draft.as_f64(),
                height: self.height.as_f64(),
            });
        }
        Ok(T::lit(4.0) * self.length * draft)
    }

    /// Centre height at which buoyancy balances `supported_mass` on a
    /// surface at elevation `surface`.
    pub fn equilibrium_height(&self, supported_mass: T, water_density: T, surface: T) -> T {
        let draft = supported_mass / (water_density * self.waterplane_area());
        surface + self.height * T::half() - draft
    }
}

/// Added mass, potential damping and skin-friction coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroCoefficients<T> {
    pub added_mass_surge: T,
    pub added_mass_heave: T,
    pub damping_surge: T,
    pub damping_heave: T,
    pub skin_surge: T,
    pub skin_heave: T,
    pub water_density: T,
}

impl<T: Real> HydroCoefficients<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a11", self.added_mass_surge),
            ("a33", self.added_mass_heave),
            ("b11", self.damping_surge),
            ("b33", self.damping_heave),
            ("C_S1", self.skin_surge),
            ("C_S2", self.skin_heave),
        ];
        for (name, v) in fields {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.water_density > T::zero()) {
            return Err(invalid("water density", format!("must be > 0, got {}", self.water_density)));
        }
        Ok(())
    }

    /// Linearized skin-friction coefficients `(D_S1, D_S2)` for relative
    /// surge speed `v_r` and relative heave rate `heave_rate`.
    pub fn skin_friction(&self, wetted_area: T, v_r: T, heave_rate: T) -> (T, T) {
        let q = wetted_area * T::half() * self.water_density;
        (self.skin_surge * q * v_r.abs(), self.skin_heave * q * heave_rate.abs())
    }

    /// Body-frame surge/heave inertia `diag(m_b + a11, m_b + a33)`.
    pub fn body_inertia(&self, buoy_mass: T) -> Mat2<T> {
        Mat2::diag(buoy_mass + self.added_mass_surge, buoy_mass + self.added_mass_heave)
    }

    /// Body-frame surge/heave damping `diag(b11 + D_S1, b33 + D_S2)`.
    pub fn body_damping(&self, skin: (T, T)) -> Mat2<T> {
        Mat2::diag(self.damping_surge + skin.0, self.damping_heave + skin.1)
    }

    /// World-frame inertia and damping for a hull pitched by `pitch`.
    pub fn world_frame_matrices(&self, buoy_mass: T, pitch: T, skin: (T, T)) -> (Mat2<T>, Mat2<T>) {
        let r = Mat2::clockwise_rotation(pitch);
        (
            self.body_inertia(buoy_mass).similarity(&r),
            self.body_damping(skin).similarity(&r),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> BuoyGeometry<f64> {
        BuoyGeometry::with_immersed_fraction(0.8, 0.25, 12.5, 1000.0, 0.25)
    }

    fn coeffs() -> HydroCoefficients<f64> {
        HydroCoefficients {
            added_mass_surge: 0.625,
            added_mass_heave: 12.5,
            damping_surge: 0.0,
            damping_heave: 27.5,
            skin_surge: 5e-3,
            skin_heave: 9e-3,
            water_density: 1000.0,
        }
    }

    #[test]
    fn derived_width_and_volume() {
        let g = geometry();
        assert!((g.width - 0.25).abs() < 1e-15);
        assert!((g.volume() - 0.05).abs() < 1e-15);
        g.validate(1000.0).unwrap();
        assert!(BuoyGeometry::new(0.8, 0.25, 0.25, 50.0).validate(1000.0).is_err());
        assert!(BuoyGeometry::new(0.8, 0.25, 0.25, 0.0).validate(1000.0).is_err());
    }

    #[test]
    fn immersed_volume_examples() {
        let g = geometry();
        assert_eq!(g.immersed_volume(1.0, 0.0), 0.0);
        assert!((g.immersed_volume(-1.0, 0.0) - 0.05).abs() < 1e-15);
        assert!((g.immersed_volume(0.0625, 0.0) - 0.0125).abs() < 1e-15);
    }

    #[test]
    fn static_float_is_quarter_immersion() {
        let g = geometry();
        let z = g.equilibrium_height(g.mass, 1000.0, 0.0);
        assert!((g.immersed_volume(z, 0.0) / g.volume() - 0.25).abs() < 1e-9);
        assert!((z - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn wetted_area_examples() {
        let g = geometry();
        assert_eq!(g.wetted_area(0.0).unwrap(), 0.0);
        assert!((g.wetted_area(0.25).unwrap() - 0.8).abs() < 1e-15);
        assert!((g.wetted_area(0.0625).unwrap() - 0.2).abs() < 1e-15);
        assert!(g.wetted_area(0.3).is_err());
        assert!(g.wetted_area(-1e-9).is_err());
    }

    #[test]
    fn skin_friction_examples() {
        let c = coeffs();
        assert_eq!(c.skin_friction(0.2, 0.0, 0.0), (0.0, 0.0));
        let (d1, _) = c.skin_friction(0.2, 3.0, 0.0);
        assert!((d1 - 1.5).abs() < 1e-12);
        let (d1x2, _) = c.skin_friction(0.2, -6.0, 0.0);
        assert!((d1x2 - 2.0 * d1).abs() < 1e-12);
    }

    #[test]
    fn world_frame_examples() {
        let c = coeffs();
        let (m, d) = c.world_frame_matrices(12.5, 0.0, (0.0, 0.0));
        assert_eq!(m, Mat2::diag(13.125, 25.0));
        assert_eq!(d, Mat2::diag(0.0, 27.5));
        for pitch in [-0.3, -0.05, 0.1, 0.7] {
            let (m, _) = c.world_frame_matrices(12.5, pitch, (0.4, 0.1));
            assert!((m.det() - 13.125 * 25.0).abs() < 1e-9);
            assert!((m.get(0, 1) - m.get(1, 0)).abs() < 1e-12);
        }
    }
}
