//! Physical constants and the map to dimensionless variables.
//!
//! Lengths are measured in units of the reduced Compton wavelength `hbar/(m c)`
//! and energies in units of the rest energy `m c^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub mass: f64,
    pub light_speed: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self::natural()
    }
}

impl Units {
    pub fn new(mass: f64, light_speed: f64, hbar: f64) -> Result<Self> {
        let units = Self {
            mass,
            light_speed,
            hbar,
        };
        units.validate()?;
        Ok(units)
    }

    /// `m = c = hbar = 1`.
    pub fn natural() -> Self {
        Self {
            mass: 1.0,
            light_speed: 1.0,
            hbar: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("light_speed", self.light_speed),
            ("hbar", self.hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidUnits(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let (l, e) = (self.length_scale(), self.energy_scale());
        if !(l.is_finite() && l > 0.0 && e.is_finite() && e > 0.0) {
            return Err(Error::InvalidUnits(format!(
                "degenerate scales: length {l}, energy {e}"
            )));
        }
        Ok(())
    }

    /// `hbar / (m c)`.
    pub fn length_scale(&self) -> f64 {
        self.hbar / (self.mass * self.light_speed)
    }

    /// `m c^2`.
    pub fn energy_scale(&self) -> f64 {
        self.mass * self.light_speed * self.light_speed
    }

    pub fn to_xi(&self, x: f64) -> f64 {
        x * self.mass * self.light_speed / self.hbar
    }

    pub fn from_xi(&self, xi: f64) -> f64 {
        xi * self.length_scale()
    }

    pub fn to_epsilon(&self, energy: f64) -> f64 {
        energy / self.energy_scale()
    }

    pub fn from_epsilon(&self, epsilon: f64) -> f64 {
        epsilon * self.energy_scale()
    }

    /// Maps `(x, E, V)` to `(xi, epsilon, theta)`.
    pub fn to_dimensionless(&self, x: f64, energy: f64, potential: f64) -> (f64, f64, f64) {
        (
            self.to_xi(x),
            self.to_epsilon(energy),
            self.to_epsilon(potential),
        )
    }

    pub fn to_physical(&self, xi: f64, epsilon: f64, theta: f64) -> (f64, f64, f64) {
        (
            self.from_xi(xi),
            self.from_epsilon(epsilon),
            self.from_epsilon(theta),
        )
    }
}

/// Validating form of [`Units::to_dimensionless`].
pub fn to_dimensionless(
    units: &Units,
    x: f64,
    energy: f64,
    potential: f64,
) -> Result<(f64, f64, f64)> {
    units.validate()?;
    Ok(units.to_dimensionless(x, energy, potential))
}
