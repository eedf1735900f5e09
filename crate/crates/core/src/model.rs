//! Charging-unit domain model and the quadratic constrained integer program
//! built from it.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for integrality and constraint checks.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Car {
    id: String,
    slots: Vec<usize>,
    required_energy: u32,
}

impl Car {
    /// Slots are kept in the given order; they must be nonempty and distinct.
    pub fn new(id: impl Into<String>, slots: Vec<usize>, required_energy: u32) -> Result<Self> {
        let id = id.into();
        if slots.is_empty() {
            return Err(Error::InvalidCar {
                car: id,
                reason: "no time slots at the charging unit".into(),
            });
        }
        let distinct: BTreeSet<_> = slots.iter().collect();
        if distinct.len() != slots.len() {
            return Err(Error::InvalidCar {
                car: id,
                reason: "time slots are not distinct".into(),
            });
        }
        if required_energy == 0 {
            return Err(Error::InvalidCar {
                car: id,
                reason: "required energy must be at least 1".into(),
            });
        }
        Ok(Self {
            id,
            slots,
            required_energy,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn required_energy(&self) -> u32 {
        self.required_energy
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargingUnit {
    id: String,
    levels: u32,
    time_slots: usize,
    cars: Vec<Car>,
}

impl ChargingUnit {
    pub fn new(id: impl Into<String>, levels: u32, time_slots: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidUnit(format!(
                "number of charging levels must be at least 2, got {levels}"
            )));
        }
        if time_slots == 0 {
            return Err(Error::InvalidUnit("number of time slots must be at least 1".into()));
        }
        Ok(Self {
            id: id.into(),
            levels,
            time_slots,
            cars: Vec::new(),
        })
    }

    /// Rejects cars that are present at a slot the unit does not have.
    pub fn register_car(&mut self, car: Car) -> Result<()> {
        if let Some(&slot) = car.slots.iter().find(|&&s| s >= self.time_slots) {
            return Err(Error::SlotOutOfRange {
                car: car.id,
                slot,
                time_slots: self.time_slots,
            });
        }
        self.cars.push(car);
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Number of charging levels `L`; a car charges at level `0..L`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn time_slots(&self) -> usize {
        self.time_slots
    }

    pub fn cars(&self) -> &[Car] {
        &self.cars
    }

    /// Cost matrix, constraint matrix and energy vector of the unit.
    pub fn generate_matrices(&self) -> ChargingMatrices {
        let k = self.cars.len();
        let t = self.time_slots;
        let n = k * t;
        // ones(K, K) kron I_T
        let cost = DMatrix::from_fn(n, n, |r, c| if r % t == c % t { 1.0 } else { 0.0 });
        let mut constraint = DMatrix::zeros(k, n);
        for (row, car) in self.cars.iter().enumerate() {
            for &slot in &car.slots {
                constraint[(row, row * t + slot)] = 1.0;
            }
        }
        let energy = DVector::from_iterator(k, self.cars.iter().map(|c| f64::from(c.required_energy)));
        ChargingMatrices {
            cost,
            constraint,
            energy,
        }
    }

    /// Builds the quadratic constrained integer program minimizing the peak load.
    pub fn build_qcio(&self) -> QuadraticProgram {
        let mut qp = QuadraticProgram::new("QCIO");
        let upper = i64::from(self.levels) - 1;
        for car in &self.cars {
            for t in 0..self.time_slots {
                qp.add_integer_var(format!("{}_t{}", car.id, t), 0, upper)
                    .expect("bounds are ordered");
            }
        }
        if self.cars.is_empty() {
            return qp;
        }
        let m = self.generate_matrices();
        qp.set_quadratic(&m.cost).expect("dimensions match");
        for (row, car) in self.cars.iter().enumerate() {
            let coefficients = m.constraint.row(row).iter().copied().collect();
            qp.add_equality(
                format!("charge_correct_energy_for_{}", car.id),
                coefficients,
                m.energy[row],
            )
            .expect("dimensions match");
        }
        qp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargingMatrices {
    /// `A`, of size KT x KT.
    pub cost: DMatrix<f64>,
    /// `C`, of size K x KT.
    pub constraint: DMatrix<f64>,
    /// `e`, the required energy per car.
    pub energy: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Integer,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

impl Variable {
    pub fn range(&self) -> i64 {
        self.upper - self.lower
    }
}

/// Linear equality `coefficients . x == rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// `x^T Q x + L x + c` over bounded integer or binary variables, subject to
/// linear equalities. `Q` is stored upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProgram {
    pub name: String,
    variables: Vec<Variable>,
    quadratic: DMatrix<f64>,
    linear: Vec<f64>,
    constant: f64,
    constraints: Vec<LinearConstraint>,
}

impl QuadraticProgram {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            quadratic: DMatrix::zeros(0, 0),
            linear: Vec::new(),
            constant: 0.0,
            constraints: Vec::new(),
        }
    }

    pub fn add_integer_var(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> Result<usize> {
        let name = name.into();
        if lower > upper {
            return Err(Error::InvalidProgram(format!(
                "variable '{name}' has lower bound {lower} above upper bound {upper}"
            )));
        }
        Ok(self.push_var(Variable {
            name,
            kind: VarKind::Integer,
            lower,
            upper,
        }))
    }

    pub fn add_binary_var(&mut self, name: impl Into<String>) -> usize {
        self.push_var(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0,
            upper: 1,
        })
    }

    fn push_var(&mut self, var: Variable) -> usize {
        let n = self.variables.len();
        self.variables.push(var);
        self.quadratic = self.quadratic.clone().resize(n + 1, n + 1, 0.0);
        self.linear.push(0.0);
        for c in &mut self.constraints {
            c.coefficients.push(0.0);
        }
        n
    }

    /// Sets the quadratic part from any square matrix, folding it upper triangular.
    pub fn set_quadratic(&mut self, dense: &DMatrix<f64>) -> Result<()> {
        self.check_square(dense)?;
        self.quadratic = fold_upper(dense);
        Ok(())
    }

    pub fn set_linear(&mut self, linear: Vec<f64>) -> Result<()> {
        self.check_len(linear.len())?;
        self.linear = linear;
        Ok(())
    }

    pub fn set_constant(&mut self, constant: f64) {
        self.constant = constant;
    }

    pub fn add_equality(&mut self, name: impl Into<String>, coefficients: Vec<f64>, rhs: f64) -> Result<()> {
        self.check_len(coefficients.len())?;
        self.constraints.push(LinearConstraint {
            name: name.into(),
            coefficients,
            rhs,
        });
        Ok(())
    }

    pub fn clear_constraints(&mut self) {
        self.constraints.clear();
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn quadratic(&self) -> &DMatrix<f64> {
        &self.quadratic
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// `x^T Q x + L x + c` with the stored triangle taken literally.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        let n = x.len();
        let mut value = self.constant;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for (j, xj) in x.iter().enumerate().skip(i) {
                row += self.quadratic[(i, j)] * xj;
            }
            value += x[i] * (row + self.linear[i]);
        }
        Ok(value)
    }

    /// True iff every entry is integral within `tol` and inside its bounds,
    /// and every equality holds within `tol`.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_len(x.len())?;
        let in_box = self.variables.iter().zip(x).all(|(v, &xi)| {
            let r = xi.round();
            (xi - r).abs() <= tol && r >= v.lower as f64 && r <= v.upper as f64
        });
        Ok(in_box
            && self
                .constraints
                .iter()
                .all(|c| (c.activity(x) - c.rhs).abs() <= tol))
    }

    /// Human-readable listing in the style of common modeling tools.
    pub fn prettyprint(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let n = self.num_vars();
        let _ = writeln!(out, "Problem name: {}\n\nMinimize", self.name);
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                let q = self.quadratic[(i, j)];
                if q != 0.0 {
                    let name_i = &self.variables[i].name;
                    if i == j {
                        terms.push(format!("{}*{}^2", fmt_coef(q), name_i));
                    } else {
                        terms.push(format!("{}*{}*{}", fmt_coef(q), name_i, self.variables[j].name));
                    }
                }
            }
        }
        for i in 0..n {
            if self.linear[i] != 0.0 {
                terms.push(format!("{}*{}", fmt_coef(self.linear[i]), self.variables[i].name));
            }
        }
        if self.constant != 0.0 || terms.is_empty() {
            terms.push(fmt_coef(self.constant));
        }
        let _ = writeln!(out, "  {}\n", terms.join(" + "));
        let _ = writeln!(out, "Subject to");
        if self.constraints.is_empty() {
            let _ = writeln!(out, "  No constraints");
        } else {
            let _ = writeln!(out, "  Linear constraints ({})", self.constraints.len());
            for c in &self.constraints {
                let lhs: Vec<String> = c
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a != 0.0)
                    .map(|(i, &a)| {
                        if a == 1.0 {
                            self.variables[i].name.clone()
                        } else {
                            format!("{}*{}", fmt_coef(a), self.variables[i].name)
                        }
                    })
                    .collect();
                let _ = writeln!(out, "    {} == {}  '{}'", lhs.join(" + "), fmt_coef(c.rhs), c.name);
            }
        }
        let integers: Vec<&Variable> = self.variables.iter().filter(|v| v.kind == VarKind::Integer).collect();
        if !integers.is_empty() {
            let _ = writeln!(out, "\n  Integer variables ({})", integers.len());
            for v in integers {
                let _ = writeln!(out, "    {} <= {} <= {}", v.lower, v.name, v.upper);
            }
        }
        let binaries: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            let _ = writeln!(out, "\n  Binary variables ({})", binaries.len());
            for chunk in binaries.chunks(3) {
                let _ = writeln!(out, "    {}", chunk.join(" "));
            }
        }
        out
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.num_vars() {
            return Err(Error::LengthMismatch {
                expected: self.num_vars(),
                got,
            });
        }
        Ok(())
    }

    fn check_square(&self, m: &DMatrix<f64>) -> Result<()> {
        if m.nrows() != self.num_vars() || m.ncols() != self.num_vars() {
            return Err(Error::LengthMismatch {
                expected: self.num_vars(),
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }
}

/// Folds `a_ij + a_ji` onto the upper triangle; the diagonal is kept.
pub fn fold_upper(dense: &DMatrix<f64>) -> DMatrix<f64> {
    let n = dense.nrows();
    DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => dense[(i, j)] + dense[(j, i)],
        std::cmp::Ordering::Equal => dense[(i, i)],
        std::cmp::Ordering::Greater => 0.0,
    })
}

/// Renders a float the way Python's `repr` does for the values we print:
/// integral values keep a trailing `.0`.
pub fn fmt_coef(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Problem-instance file: the charging unit and the cars registered at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub charging_unit: UnitSpec,
    pub cars: Vec<CarSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSpec {
    pub id: String,
    pub number_charging_levels: i64,
    pub number_time_slots: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarSpec {
    pub car_id: String,
    pub time_slots_at_charging_unit: Vec<i64>,
    pub required_energy: i64,
}

impl InstanceFile {
    pub fn from_unit(unit: &ChargingUnit) -> Self {
        Self {
            charging_unit: UnitSpec {
                id: unit.id.clone(),
                number_charging_levels: i64::from(unit.levels),
                number_time_slots: unit.time_slots as i64,
            },
            cars: unit
                .cars
                .iter()
                .map(|c| CarSpec {
                    car_id: c.id.clone(),
                    time_slots_at_charging_unit: c.slots.iter().map(|&s| s as i64).collect(),
                    required_energy: i64::from(c.required_energy),
                })
                .collect(),
        }
    }

    /// Validates the instance and registers every car.
    pub fn to_unit(&self) -> Result<ChargingUnit> {
        let spec = &self.charging_unit;
        let levels = u32::try_from(spec.number_charging_levels).map_err(|_| Error::InvalidInstance {
            location: "charging_unit.number_charging_levels".into(),
            reason: format!("must be an integer >= 2, got {}", spec.number_charging_levels),
        })?;
        let slots = usize::try_from(spec.number_time_slots).map_err(|_| Error::InvalidInstance {
            location: "charging_unit.number_time_slots".into(),
            reason: format!("must be an integer >= 1, got {}", spec.number_time_slots),
        })?;
        let mut unit = ChargingUnit::new(&spec.id, levels, slots).map_err(|e| Error::InvalidInstance {
            location: "charging_unit".into(),
            reason: e.to_string(),
        })?;
        for (k, car) in self.cars.iter().enumerate() {
            let location = format!("cars[{k}] ('{}')", car.car_id);
            if car.required_energy <= 0 || car.required_energy > i64::from(u32::MAX) {
                return Err(Error::InvalidInstance {
                    location: format!("{location}.required_energy"),
                    reason: format!("must be a positive integer, got {}", car.required_energy),
                });
            }
            let mut car_slots = Vec::with_capacity(car.time_slots_at_charging_unit.len());
            for &s in &car.time_slots_at_charging_unit {
                let s = usize::try_from(s).map_err(|_| Error::InvalidInstance {
                    location: format!("{location}.time_slots_at_charging_unit"),
                    reason: format!("negative time slot {s}"),
                })?;
                car_slots.push(s);
            }
            let parsed = Car::new(&car.car_id, car_slots, car.required_energy as u32).map_err(|e| {
                Error::InvalidInstance {
                    location: location.clone(),
                    reason: e.to_string(),
                }
            })?;
            unit.register_car(parsed).map_err(|e| Error::InvalidInstance {
                location: format!("{location}.time_slots_at_charging_unit"),
                reason: e.to_string(),
            })?;
        }
        Ok(unit)
    }
}

pub fn parse_instance_str(json: &str) -> Result<ChargingUnit> {
    let file: InstanceFile = serde_json::from_str(json).map_err(|e| Error::InvalidInstance {
        location: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    file.to_unit()
}
