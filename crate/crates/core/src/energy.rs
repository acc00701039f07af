//! Per-UAV energy budget over a horizon of time slots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Propulsion power, constant within a slot (W).
    pub p_prop: f64,
    /// Slot duration (s).
    pub slot_duration: f64,
    /// Number of slots.
    pub horizon: usize,
    /// Energy budget (J).
    pub e_max: f64,
}

impl Default for EnergyModel {
    // Non-binding by construction: 100 slots of 1 s at 100 W propulsion
    // plus any admissible radio power stay far below 1e5 J.
    fn default() -> Self {
        Self {
            p_prop: 100.0,
            slot_duration: 1.0,
            horizon: 100,
            e_max: 1e5,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_prop", self.p_prop),
            ("slot_duration", self.slot_duration),
            ("e_max", self.e_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("energy.{name} must be > 0, got {v}")));
            }
        }
        if self.horizon == 0 {
            return Err(Error::Config("energy.horizon must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub feasible: bool,
    /// `e_max − total`; negative when the budget is exceeded.
    pub slack: f64,
    pub total: f64,
}

pub fn total_energy(model: &EnergyModel, p_comm_per_slot: &[f64]) -> Result<f64> {
    if p_comm_per_slot.len() != model.horizon {
        return Err(Error::Length {
            expected: model.horizon,
            got: p_comm_per_slot.len(),
        });
    }
    let power_sum: f64 = p_comm_per_slot.iter().map(|p| model.p_prop + p).sum();
    Ok(model.slot_duration * power_sum)
}

pub fn check_energy_feasible(model: &EnergyModel, p_comm_per_slot: &[f64]) -> Result<EnergyCheck> {
    let total = total_energy(model, p_comm_per_slot)?;
    let slack = model.e_max - total;
    Ok(EnergyCheck {
        feasible: slack >= 0.0,
        slack,
        total,
    })
}

/// Feasibility for a UAV holding one radio power over the whole horizon.
pub fn check_constant_power(model: &EnergyModel, p_comm: f64) -> Result<EnergyCheck> {
    check_energy_feasible(model, &vec![p_comm; model.horizon])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(horizon: usize) -> EnergyModel {
        EnergyModel {
            p_prop: 100.0,
            slot_duration: 1.0,
            horizon,
            e_max: 1e4,
        }
    }

    #[test]
    fn propulsion_only() {
        assert_eq!(total_energy(&model(10), &[0.0; 10]).unwrap(), 1000.0);
    }

    #[test]
    fn linear_in_slot_duration() {
        let mut m = model(4);
        let p = [0.1, 0.2, 0.0, 0.05];
        let e1 = total_energy(&m, &p).unwrap();
        m.slot_duration = 2.0;
        assert!((total_energy(&m, &p).unwrap() - 2.0 * e1).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            total_energy(&model(3), &[0.0; 2]),
            Err(Error::Length {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn budget_edges() {
        let mut m = model(10);
        m.e_max = 1000.0;
        let c = check_energy_feasible(&m, &[0.0; 10]).unwrap();
        assert!(c.feasible);
        assert_eq!(c.slack, 0.0);
        m.e_max = 999.0;
        assert!(!check_energy_feasible(&m, &[0.0; 10]).unwrap().feasible);
    }

    #[test]
    fn default_is_non_binding_at_any_admissible_power() {
        let m = EnergyModel::default();
        assert!(check_constant_power(&m, 1.0).unwrap().feasible);
    }
}
