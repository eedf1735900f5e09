//! Penalty conversion of equality constraints and integer-to-binary encoding.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bits::check_binary;
use crate::error::{Error, Result};
use crate::model::{fmt_coef, fold_upper, QuadraticProgram, VarKind};

/// Moves every equality constraint into the objective as `rho * ||Cx - e||^2`.
pub fn to_penalty_form(qp: &QuadraticProgram, rho: f64) -> Result<QuadraticProgram> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::NegativePenalty(rho));
    }
    let n = qp.num_vars();
    let mut out = qp.clone();
    out.clear_constraints();
    let mut gram = DMatrix::zeros(n, n);
    let mut linear = qp.linear().to_vec();
    let mut constant = qp.constant();
    for c in qp.constraints() {
        for i in 0..n {
            let ci = c.coefficients[i];
            if ci == 0.0 {
                continue;
            }
            linear[i] -= 2.0 * rho * c.rhs * ci;
            for j in 0..n {
                gram[(i, j)] += rho * ci * c.coefficients[j];
            }
        }
        constant += rho * c.rhs * c.rhs;
    }
    let quadratic = qp.quadratic() + fold_upper(&gram);
    out.set_quadratic(&quadratic)?;
    out.set_linear(linear)?;
    out.set_constant(constant);
    out.name = format!("{}_penalized", qp.name);
    Ok(out)
}

/// How each bounded integer variable is spread over qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme", content = "width")]
pub enum EncodingScheme {
    /// Plain binary with `w` bits per variable.
    FixedWidth(u32),
    /// Powers of two plus one remainder coefficient, so no value above the
    /// range is representable.
    BoundedCoefficient,
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingScheme::FixedWidth(w) => write!(f, "fixed:{w}"),
            EncodingScheme::BoundedCoefficient => f.write_str("bounded"),
        }
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "bounded" {
            return Ok(EncodingScheme::BoundedCoefficient);
        }
        if let Some(w) = s.strip_prefix("fixed:") {
            if let Ok(w) = w.parse::<u32>() {
                return Ok(EncodingScheme::FixedWidth(w));
            }
        }
        Err(Error::InvalidParameters(format!(
            "unknown encoding '{s}', expected 'bounded' or 'fixed:<width>'"
        )))
    }
}

/// Coefficients covering exactly `0..=range`.
pub fn bounded_coefficients(range: i64) -> Vec<i64> {
    if range <= 0 {
        return Vec::new();
    }
    let mu = 63 - range.leading_zeros() as i64;
    let mut coefficients: Vec<i64> = (0..mu).map(|k| 1i64 << k).collect();
    coefficients.push(range - (1i64 << mu) + 1);
    coefficients
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVariable {
    pub name: String,
    pub qubits: Vec<usize>,
    pub coefficients: Vec<i64>,
    pub offset: i64,
}

/// Affine map from qubits back to the integer variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    pub variables: Vec<EncodedVariable>,
    pub total_qubits: usize,
}

impl Encoding {
    pub fn interpret(&self, b: &[u8]) -> Result<Vec<i64>> {
        if b.len() != self.total_qubits {
            return Err(Error::LengthMismatch {
                expected: self.total_qubits,
                got: b.len(),
            });
        }
        check_binary(b)?;
        Ok(self
            .variables
            .iter()
            .map(|v| {
                v.offset
                    + v.qubits
                        .iter()
                        .zip(&v.coefficients)
                        .map(|(&q, &c)| c * i64::from(b[q]))
                        .sum::<i64>()
            })
            .collect())
    }

    pub fn interpret_f64(&self, b: &[u8]) -> Result<Vec<f64>> {
        Ok(self.interpret(b)?.into_iter().map(|x| x as f64).collect())
    }
}

/// `b^T A b + L b + c` over binary `b`, with `A` upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    names: Vec<String>,
    quadratic: DMatrix<f64>,
    linear: Vec<f64>,
    constant: f64,
}

impl Qubo {
    /// Builds a QUBO from any square matrix; the matrix is folded upper triangular.
    pub fn new(quadratic: DMatrix<f64>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        let n = linear.len();
        if quadratic.nrows() != n || quadratic.ncols() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: quadratic.nrows(),
            });
        }
        Ok(Self {
            names: (0..n).map(|i| format!("b{i}")).collect(),
            quadratic: fold_upper(&quadratic),
            linear,
            constant,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.linear.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
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

    pub fn objective(&self, b: &[u8]) -> Result<f64> {
        if b.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: b.len(),
            });
        }
        check_binary(b)?;
        Ok(self.objective_unchecked(b))
    }

    pub(crate) fn objective_unchecked(&self, b: &[u8]) -> f64 {
        let n = self.n();
        let mut value = self.constant;
        for i in (0..n).filter(|&i| b[i] != 0) {
            value += self.linear[i];
            for j in (i..n).filter(|&j| b[j] != 0) {
                value += self.quadratic[(i, j)];
            }
        }
        value
    }

    /// Nonzero quadratic entries in row-major order, `i <= j`.
    pub fn terms(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = self.quadratic[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn export(&self) -> QuboExport {
        QuboExport {
            n: self.n(),
            quadratic: self.terms(),
            linear: self.linear.clone(),
            constant: self.constant,
        }
    }

    pub fn prettyprint(&self) -> String {
        let mut terms: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(i, j, v)| {
                if i == j {
                    format!("{}*{}^2", fmt_coef(v), self.names[i])
                } else {
                    format!("{}*{}*{}", fmt_coef(v), self.names[i], self.names[j])
                }
            })
            .collect();
        for (i, &l) in self.linear.iter().enumerate() {
            if l != 0.0 {
                terms.push(format!("{}*{}", fmt_coef(l), self.names[i]));
            }
        }
        if self.constant != 0.0 || terms.is_empty() {
            terms.push(fmt_coef(self.constant));
        }
        let joined = terms.join(" + ").replace("+ -", "- ");
        format!(
            "Minimize\n  {joined}\n\nSubject to\n  No constraints\n\n  Binary variables ({})\n",
            self.n()
        )
    }
}

/// Sparse JSON form of a [`Qubo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboExport {
    pub n: usize,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl QuboExport {
    pub fn to_qubo(&self) -> Result<Qubo> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.quadratic {
            if i > j || j >= self.n {
                return Err(Error::InvalidProgram(format!("bad quadratic entry ({i}, {j})")));
            }
            m[(i, j)] += v;
        }
        Qubo::new(m, self.linear.clone(), self.constant)
    }
}

/// Substitutes `x_i = lower_i + sum_a c_ia b_a` into an unconstrained program.
pub fn integer_to_binary(qp: &QuadraticProgram, scheme: EncodingScheme) -> Result<(Qubo, Encoding)> {
    if !qp.constraints().is_empty() {
        return Err(Error::InvalidProgram(
            "program still has constraints; convert them to penalties first".into(),
        ));
    }
    let mut variables = Vec::with_capacity(qp.num_vars());
    let mut names = Vec::new();
    for v in qp.variables() {
        let range = v.range();
        let coefficients = match (v.kind, scheme) {
            (VarKind::Binary, _) => vec![1],
            (_, EncodingScheme::BoundedCoefficient) => bounded_coefficients(range),
            (_, EncodingScheme::FixedWidth(w)) => {
                if w >= 63 || (1i64 << w) - 1 < range {
                    return Err(Error::WidthTooSmall {
                        name: v.name.clone(),
                        width: w,
                        range,
                    });
                }
                (0..w).map(|k| 1i64 << k).collect()
            }
        };
        let start = names.len();
        for k in 0..coefficients.len() {
            names.push(format!("{}@{}", v.name, k));
        }
        variables.push(EncodedVariable {
            name: v.name.clone(),
            qubits: (start..names.len()).collect(),
            coefficients,
            offset: v.lower,
        });
    }
    let nq = names.len();
    let mut quad = DMatrix::zeros(nq, nq);
    let mut lin = vec![0.0; nq];
    let mut constant = qp.constant();
    let q = qp.quadratic();
    let n = qp.num_vars();

    for i in 0..n {
        let vi = &variables[i];
        let li = vi.offset as f64;
        // linear part L_i (l_i + S_i)
        let l = qp.linear()[i];
        constant += l * li;
        for (&a, &ca) in vi.qubits.iter().zip(&vi.coefficients) {
            lin[a] += l * ca as f64;
        }
        for j in i..n {
            let qij = q[(i, j)];
            if qij == 0.0 {
                continue;
            }
            let vj = &variables[j];
            let lj = vj.offset as f64;
            constant += qij * li * lj;
            for (&a, &ca) in vi.qubits.iter().zip(&vi.coefficients) {
                lin[a] += qij * lj * ca as f64;
            }
            for (&b, &cb) in vj.qubits.iter().zip(&vj.coefficients) {
                lin[b] += qij * li * cb as f64;
            }
            if i == j {
                for (x, (&a, &ca)) in vi.qubits.iter().zip(&vi.coefficients).enumerate() {
                    quad[(a, a)] += qij * (ca * ca) as f64;
                    for (&b, &cb) in vi.qubits.iter().zip(&vi.coefficients).skip(x + 1) {
                        quad[(a, b)] += 2.0 * qij * (ca * cb) as f64;
                    }
                }
            } else {
                for (&a, &ca) in vi.qubits.iter().zip(&vi.coefficients) {
                    for (&b, &cb) in vj.qubits.iter().zip(&vj.coefficients) {
                        quad[(a, b)] += qij * (ca * cb) as f64;
                    }
                }
            }
        }
    }
    let qubo = Qubo::new(quad, lin, constant)?.with_names(names)?;
    Ok((
        qubo,
        Encoding {
            variables,
            total_qubits: nq,
        },
    ))
}

/// Penalty conversion followed by binary encoding.
pub fn build_qubo(qcio: &QuadraticProgram, rho: f64, scheme: EncodingScheme) -> Result<(Qubo, Encoding)> {
    integer_to_binary(&to_penalty_form(qcio, rho)?, scheme)
}
