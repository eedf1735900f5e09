//! The two reference instances used throughout the tests and examples.

use crate::model::{Car, ChargingUnit};

/// Two cars on a unit with 6 levels and 7 slots; minimum peak-load cost 58.
pub fn two_cars() -> ChargingUnit {
    let mut unit = ChargingUnit::new("charging_unit", 6, 7).expect("valid unit");
    unit.register_car(Car::new("car_green", vec![0, 1, 2, 3], 8).expect("valid car"))
        .expect("slots in range");
    unit.register_car(Car::new("car_orange", vec![1, 2, 3, 4, 5, 6], 12).expect("valid car"))
        .expect("slots in range");
    unit
}

/// One car on a unit with 4 levels and 4 slots; encodes to 8 qubits.
pub fn single_car() -> ChargingUnit {
    let mut unit = ChargingUnit::new("charging_unit", 4, 4).expect("valid unit");
    unit.register_car(Car::new("car_green", vec![0, 1, 2], 4).expect("valid car"))
        .expect("slots in range");
    unit
}

/// Penalty used for [`single_car`] in the reference runs.
pub const SINGLE_CAR_RHO: f64 = 3.6;

/// Smallest penalty on the 0.1 grid that makes [`two_cars`] feasible.
pub const TWO_CARS_RHO: f64 = 5.1;
