//! Linear deep-water wave field: surface elevation, orbital velocities,
//! surface current with Stokes drift, and the wave-slope pitch of a body
//! riding the surface.
//!
//! All evaluations are pure; a [`WaveField`] can be shared between threads.

use crate::error::{invalid, ModelError, Result};
use crate::scalar::Real;

/// Propagation direction of a component along the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Travelling towards +x (`d = +1`).
    Following,
    /// Travelling towards -x (`d = -1`).
    Opposing,
}

impl Direction {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Direction::Following => T::one(),
            Direction::Opposing => -T::one(),
        }
    }

    /// Maps `+1` / `-1` to a direction; anything else is rejected.
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Direction::Following),
            -1 => Ok(Direction::Opposing),
            other => Err(invalid("direction", format!("expected +1 or -1, got {other}"))),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Following => Direction::Opposing,
            Direction::Opposing => Direction::Following,
        }
    }
}

/// One regular wave component. The wave number is derived from the
/// deep-water dispersion relation and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveComponent<T> {
    amplitude: T,
    omega: T,
    wave_number: T,
    direction: Direction,
    phase: T,
}

impl<T: Real> WaveComponent<T> {
    pub fn new(amplitude: T, omega: T, direction: Direction, phase: T, gravity: T) -> Result<Self> {
        if !(amplitude >= T::zero()) || !amplitude.is_finite() {
            return Err(invalid("amplitude", format!("must be finite and >= 0, got {amplitude}")));
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(invalid("omega", format!("must be finite and > 0, got {omega}")));
        }
        if !(gravity > T::zero()) {
            return Err(invalid("gravity", format!("must be > 0, got {gravity}")));
        }
        if !(phase > -T::PI() && phase <= T::PI()) {
            return Err(invalid("phase", format!("must lie in (-pi, pi], got {phase}")));
        }
        Ok(Self {
            amplitude,
            omega,
            wave_number: omega * omega / gravity,
            direction,
            phase,
        })
    }

    /// Builds a component from its period instead of its circular frequency.
    pub fn from_period(amplitude: T, period: T, direction: Direction, phase: T, gravity: T) -> Result<Self> {
        if !(period > T::zero()) {
            return Err(invalid("period", format!("must be > 0, got {period}")));
        }
        Self::new(amplitude, T::two() * T::PI() / period, direction, phase, gravity)
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn wave_number(&self) -> T {
        self.wave_number
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    /// `d ω t − k x + σ`
    #[inline]
    fn argument(&self, x: T, t: T) -> T {
        self.direction.sign::<T>() * self.omega * t - self.wave_number * x + self.phase
    }

    /// Mirror image under `x → −x`: travels the other way with phase `π − σ`.
    pub fn reversed(&self) -> Self {
        Self {
            direction: self.direction.reversed(),
            phase: T::PI() - self.phase,
            ..*self
        }
    }
}

/// Spectral description of the sea surface plus a lumped current.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField<T> {
    components: Vec<WaveComponent<T>>,
    lumped_current: T,
    gravity: T,
}

impl<T: Real> WaveField<T> {
    pub fn new(components: Vec<WaveComponent<T>>, lumped_current: T, gravity: T) -> Self {
        Self {
            components,
            lumped_current,
            gravity,
        }
    }

    /// A flat sea with an optional uniform current.
    pub fn calm(lumped_current: T, gravity: T) -> Self {
        Self::new(Vec::new(), lumped_current, gravity)
    }

    pub fn components(&self) -> &[WaveComponent<T>] {
        &self.components
    }

    pub fn lumped_current(&self) -> T {
        self.lumped_current
    }

    pub fn gravity(&self) -> T {
        self.gravity
    }

    /// Surface elevation `ζ(x, t)` above mean sea level.
    pub fn surface_elevation(&self, x: T, t: T) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.amplitude * c.argument(x, t).sin())
    }

    /// Wave-induced fluid particle velocity `(v_x, v_z)` at depth `z <= 0`.
    pub fn particle_velocity(&self, x: T, z: T, t: T) -> Result<(T, T)> {
        if z > T::zero() {
            return Err(ModelError::AboveSurface { z: z.as_f64() });
        }
        let mut vx = T::zero();
        let mut vz = T::zero();
        for c in &self.components {
            let scale = c.direction.sign::<T>() * c.omega * c.amplitude * (c.wave_number * z).exp();
            let (s, co) = c.argument(x, t).sin_cos();
            vx += scale * s;
            vz += scale * co;
        }
        Ok((vx, vz))
    }

    /// Deep-water surface Stokes drift `Σ d ω k A²`.
    pub fn stokes_drift(&self) -> T {
        self.components.iter().fold(T::zero(), |acc, c| {
            acc + c.direction.sign::<T>() * c.omega * c.wave_number * c.amplitude * c.amplitude
        })
    }

    /// Horizontal surface current: lumped current plus Stokes drift.
    pub fn surface_current(&self) -> T {
        self.lumped_current + self.stokes_drift()
    }

    /// Pitch of a body aligned with the local surface slope,
    /// `atan(Σ A k cos(d ω t − k x + σ))`; always inside (−π/2, π/2).
    pub fn slope_pitch(&self, x: T, t: T) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.amplitude * c.wave_number * c.argument(x, t).cos())
            .atan()
    }

    /// `Σ A k`, the largest slope magnitude the spectrum can produce.
    pub fn slope_bound(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.amplitude * c.wave_number)
    }

    /// Mirror image of the field under `x → −x`.
    pub fn reflected(&self) -> Self {
        Self {
            components: self.components.iter().map(WaveComponent::reversed).collect(),
            lumped_current: -self.lumped_current,
            gravity: self.gravity,
        }
    }
}
