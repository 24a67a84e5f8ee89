//! SI ↔ reduced units. Internally Ω_R = 1, M = 1 and ħ = 1, so temperatures
//! are k_BT/(ħΩ_R) and frequencies ω/Ω_R.

use std::f64::consts::PI;

/// Boltzmann constant, J/K (exact SI value).
pub const K_B: f64 = 1.380649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Cyclic frequency in Hz to angular frequency in rad/s.
pub fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// k_BT/ħ in rad/s.
pub fn kelvin_to_rad(kelvin: f64) -> f64 {
    kelvin * K_B / HBAR
}

/// k_BT/(ħΩ_R) for Ω_R given in rad/s.
pub fn reduced_temperature(kelvin: f64, omega_r_rad: f64) -> f64 {
    kelvin_to_rad(kelvin) / omega_r_rad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn room_temperature_at_the_resonance() {
        let wr = hz_to_rad(0.914e6);
        assert!((wr / (2.0 * PI * 0.914e6) - 1.0).abs() < 1e-15);
        let t = reduced_temperature(300.0, wr);
        assert!((t / 6.84e6 - 1.0).abs() < 1e-3, "{t}");
        assert_eq!(reduced_temperature(0.0, wr), 0.0);
    }
}
