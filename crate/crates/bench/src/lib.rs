//! Shared inputs for the benchmarks.

use qcharge_core::convert::build_qubo;
use qcharge_core::ising::qubo_to_ising;
use qcharge_core::sim::QaoaEnergy;
use qcharge_core::{fixtures, ChargingUnit, EncodingScheme, IsingHamiltonian, Qubo};

/// A prepared instance: QUBO, Hamiltonian and energy evaluator.
pub struct Prepared {
    pub qubo: Qubo,
    pub hamiltonian: IsingHamiltonian,
    pub energy: QaoaEnergy,
}

pub fn prepare(unit: &ChargingUnit, rho: f64) -> Prepared {
    let qcio = unit.build_qcio();
    let (qubo, _) = build_qubo(&qcio, rho, EncodingScheme::BoundedCoefficient).expect("valid penalty");
    let (hamiltonian, offset) = qubo_to_ising(&qubo);
    let energy = QaoaEnergy::new(&hamiltonian, offset).expect("simulable register");
    Prepared {
        qubo,
        hamiltonian,
        energy,
    }
}

/// The 8-qubit single-car instance.
pub fn single_car() -> Prepared {
    prepare(&fixtures::single_car(), fixtures::SINGLE_CAR_RHO)
}

/// A single car over `slots` slots with 4 levels, giving `2 * slots` qubits.
pub fn wide_car(slots: usize) -> Prepared {
    let mut unit = ChargingUnit::new("bench", 4, slots).expect("valid unit");
    let car = qcharge_core::Car::new("car", (0..slots).collect(), slots as u32).expect("valid car");
    unit.register_car(car).expect("slots in range");
    prepare(&unit, 4.0)
}
