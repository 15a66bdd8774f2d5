//! Polynomial response surface models fitted to sampled design/response data.
//!
//! A surrogate is a multivariate polynomial of order 2 or 4 stored as a map
//! from canonical monomial multi-indices to coefficients. Order 2 captures
//! the primary curvature of the design space; order 4 adds third- and
//! fourth-order interaction sums for strongly nonlinear responses. Fits go
//! through a column-pivoted QR factorization on inputs rescaled to [-1, 1]
//! and the coefficients are mapped back to the original variable scale.

use crate::error::{Error, Result};
use crate::linalg;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

/// Optimization direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl std::str::FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minimize" | "min" => Ok(Sense::Minimize),
            "maximize" | "max" => Ok(Sense::Maximize),
            other => Err(Error::InvalidParameter(format!(
                "unknown sense '{other}' (expected minimize|maximize)"
            ))),
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Minimize => write!(f, "minimize"),
            Sense::Maximize => write!(f, "maximize"),
        }
    }
}

/// One continuous design variable with bounds and encoding width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    /// Number of binary variables used by the fixed-point encoding.
    pub bits: u32,
}

/// Ordered set of design variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpace {
    variables: Vec<DesignVariable>,
}

impl DesignSpace {
    pub fn new(variables: Vec<DesignVariable>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidDesignSpace("no variables".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &variables {
            if !v.lower.is_finite() || !v.upper.is_finite() || v.lower >= v.upper {
                return Err(Error::InvalidDesignSpace(format!(
                    "variable '{}' requires lower < upper, got [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.bits < 1 || v.bits > 32 {
                return Err(Error::InvalidDesignSpace(format!(
                    "variable '{}' requires 1 <= bits <= 32, got {}",
                    v.name, v.bits
                )));
            }
            if !seen.insert(v.name.clone()) {
                return Err(Error::InvalidDesignSpace(format!(
                    "duplicate variable name '{}'",
                    v.name
                )));
            }
        }
        Ok(Self { variables })
    }

    pub fn variables(&self) -> &[DesignVariable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Fixed-point step size (U - L) / (2^K - 1) for one variable.
    pub fn step(&self, var_index: usize) -> f64 {
        let v = &self.variables[var_index];
        (v.upper - v.lower) / ((1u64 << v.bits) - 1) as f64
    }

    /// Spin index of the least-significant bit of a variable.
    pub fn bit_offset(&self, var_index: usize) -> usize {
        self.variables[..var_index]
            .iter()
            .map(|v| v.bits as usize)
            .sum()
    }

    pub fn total_bits(&self) -> usize {
        self.variables.iter().map(|v| v.bits as usize).sum()
    }
}

/// One sampled design point with its responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Design/response training data for surrogate fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub variable_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub rows: Vec<SampleRow>,
}

impl SampleSet {
    pub fn new(
        variable_names: Vec<String>,
        objective_names: Vec<String>,
        rows: Vec<SampleRow>,
    ) -> Result<Self> {
        let n = variable_names.len();
        let m = objective_names.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidSampleSet(
                "need at least one variable and one objective".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.x.len() != n || row.y.len() != m {
                return Err(Error::InvalidSampleSet(format!(
                    "row {i} has {}x{} values, expected {n}x{m}",
                    row.x.len(),
                    row.y.len()
                )));
            }
        }
        Ok(Self {
            variable_names,
            objective_names,
            rows,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.variable_names.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.objective_names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn objective_index(&self, name: &str) -> Option<usize> {
        self.objective_names.iter().position(|n| n == name)
    }

    /// Out-of-bounds rows are tolerated; callers decide what to do with the
    /// warnings.
    pub fn bounds_warnings(&self, space: &DesignSpace) -> Vec<String> {
        let mut warnings = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in space.variables().iter().enumerate() {
                let x = row.x[j];
                if x < v.lower || x > v.upper {
                    warnings.push(format!(
                        "row {i}: {} = {x} outside [{}, {}]",
                        v.name, v.lower, v.upper
                    ));
                }
            }
        }
        warnings
    }

    /// Parse the `x:<name>,...,y:<objective>,...` CSV format.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::CsvParse {
            line: 1,
            message: "empty file".into(),
        })?;
        let header = header?;
        let mut variable_names = Vec::new();
        let mut objective_names = Vec::new();
        for field in header.split(',') {
            let field = field.trim();
            if let Some(name) = field.strip_prefix("x:") {
                if !objective_names.is_empty() {
                    return Err(Error::CsvParse {
                        line: 1,
                        message: "x: columns must precede y: columns".into(),
                    });
                }
                variable_names.push(name.to_string());
            } else if let Some(name) = field.strip_prefix("y:") {
                objective_names.push(name.to_string());
            } else {
                return Err(Error::CsvParse {
                    line: 1,
                    message: format!("column '{field}' lacks x:/y: prefix"),
                });
            }
        }
        let n = variable_names.len();
        let m = objective_names.len();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let values: Vec<f64> = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|e| Error::CsvParse {
                        line: idx + 1,
                        message: format!("bad number '{}': {e}", f.trim()),
                    })
                })
                .collect::<Result<_>>()?;
            if values.len() != n + m {
                return Err(Error::CsvParse {
                    line: idx + 1,
                    message: format!("expected {} fields, got {}", n + m, values.len()),
                });
            }
            rows.push(SampleRow {
                x: values[..n].to_vec(),
                y: values[n..].to_vec(),
            });
        }
        Self::new(variable_names, objective_names, rows)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self
            .variable_names
            .iter()
            .map(|n| format!("x:{n}"))
            .chain(self.objective_names.iter().map(|n| format!("y:{n}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .x
                .iter()
                .chain(row.y.iter())
                .map(|v| format!("{v}"))
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Polynomial order of a response surface model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RsmOrder {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "4")]
    Four,
}

impl RsmOrder {
    pub fn degree(self) -> usize {
        match self {
            RsmOrder::Two => 2,
            RsmOrder::Four => 4,
        }
    }

    pub fn from_degree(d: usize) -> Result<Self> {
        match d {
            2 => Ok(RsmOrder::Two),
            4 => Ok(RsmOrder::Four),
            other => Err(Error::InvalidParameter(format!(
                "rsm order must be 2 or 4, got {other}"
            ))),
        }
    }
}

/// Canonical monomial key: variable indices sorted ascending, repeats allowed
/// up to the model order. The empty index is the constant term.
pub type MultiIndex = Vec<usize>;

/// All canonical multi-indices of length 0..=order over n variables.
pub fn monomial_basis(n: usize, order: usize) -> Vec<MultiIndex> {
    let mut basis = vec![Vec::new()];
    let mut frontier: Vec<MultiIndex> = vec![Vec::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for idx in &frontier {
            let start = idx.last().copied().unwrap_or(0);
            for v in start..n {
                let mut grown = idx.clone();
                grown.push(v);
                next.push(grown);
            }
        }
        basis.extend(next.iter().cloned());
        frontier = next;
    }
    basis
}

fn monomial_label(idx: &[usize], names: &[String]) -> String {
    if idx.is_empty() {
        return "1".to_string();
    }
    idx.iter()
        .map(|&v| names.get(v).cloned().unwrap_or_else(|| format!("x{v}")))
        .collect::<Vec<_>>()
        .join("*")
}

/// Multivariate polynomial surrogate with fit diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSurrogate {
    pub order: RsmOrder,
    pub n: usize,
    #[serde(with = "crate::ser")]
    pub coefficients: BTreeMap<MultiIndex, f64>,
    /// None for models assembled by aggregation rather than fitted to data.
    pub r_squared: Option<f64>,
    pub residual_norm: Option<f64>,
}

impl PolynomialSurrogate {
    /// Least-squares fit of the full monomial basis to one objective column.
    pub fn fit(samples: &SampleSet, objective_index: usize, order: RsmOrder) -> Result<Self> {
        let n = samples.num_variables();
        if objective_index >= samples.num_objectives() {
            return Err(Error::InvalidParameter(format!(
                "objective index {objective_index} out of range ({} objectives)",
                samples.num_objectives()
            )));
        }
        let basis = monomial_basis(n, order.degree());
        let terms = basis.len();
        let rows = samples.len();
        if rows < terms {
            return Err(Error::Underdetermined {
                rows,
                terms,
                order: order.degree() as u32,
            });
        }

        // Affine rescale of each variable onto [-1, 1] for conditioning.
        let mut center = vec![0.0; n];
        let mut half = vec![1.0; n];
        for j in 0..n {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for row in &samples.rows {
                lo = lo.min(row.x[j]);
                hi = hi.max(row.x[j]);
            }
            center[j] = 0.5 * (hi + lo);
            half[j] = 0.5 * (hi - lo);
            if half[j] == 0.0 {
                half[j] = 1.0;
            }
        }

        let mut design = vec![0.0f64; rows * terms];
        for (i, row) in samples.rows.iter().enumerate() {
            let t: Vec<f64> = (0..n).map(|j| (row.x[j] - center[j]) / half[j]).collect();
            for (k, idx) in basis.iter().enumerate() {
                design[i * terms + k] = idx.iter().map(|&v| t[v]).product();
            }
        }
        let y: Vec<f64> = samples
            .rows
            .iter()
            .map(|r| r.y[objective_index])
            .collect();

        let out = linalg::least_squares(&design, rows, terms, &y, 1e-10);
        if out.rank < terms {
            let labels = out
                .deficient
                .iter()
                .map(|&k| monomial_label(&basis[k], &samples.variable_names))
                .collect();
            return Err(Error::RankDeficient { terms: labels });
        }

        // Map coefficients from t-space back to x-space by expanding each
        // scaled monomial prod((x_v - c_v)/h_v).
        let mut coefficients: BTreeMap<MultiIndex, f64> =
            basis.iter().map(|idx| (idx.clone(), 0.0)).collect();
        for (k, idx) in basis.iter().enumerate() {
            let gamma = out.solution[k];
            if gamma == 0.0 {
                continue;
            }
            let mut acc: Vec<(MultiIndex, f64)> = vec![(Vec::new(), gamma)];
            for &v in idx {
                let scale = 1.0 / half[v];
                let shift = -center[v] / half[v];
                let mut next = Vec::with_capacity(acc.len() * 2);
                for (sub, c) in &acc {
                    let mut with_x = sub.clone();
                    with_x.push(v);
                    with_x.sort_unstable();
                    next.push((with_x, c * scale));
                    next.push((sub.clone(), c * shift));
                }
                acc = next;
            }
            for (sub, c) in acc {
                *coefficients.entry(sub).or_insert(0.0) += c;
            }
        }

        let mut model = Self {
            order,
            n,
            coefficients,
            r_squared: None,
            residual_norm: None,
        };

        let mean = y.iter().sum::<f64>() / rows as f64;
        let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        let ss_res: f64 = samples
            .rows
            .iter()
            .zip(&y)
            .map(|(row, &target)| {
                let r = target - model.eval(&row.x).expect("fit dims");
                r * r
            })
            .sum();
        let r_squared = if ss_tot == 0.0 {
            // Zero-variance target: perfect if residuals vanish too.
            if ss_res < 1e-12 {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 - ss_res / ss_tot
        };
        model.r_squared = Some(r_squared);
        model.residual_norm = Some(ss_res.sqrt());
        Ok(model)
    }

    /// Sum of coefficient * product of the indexed variables.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .map(|(idx, c)| c * idx.iter().map(|&v| x[v]).product::<f64>())
            .sum())
    }

    /// Analytic gradient of the stored polynomial.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut grad = vec![0.0; self.n];
        for (idx, c) in &self.coefficients {
            if idx.is_empty() {
                continue;
            }
            // d/dx_j of prod x_idx: exponent rule on the multiset.
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for &v in idx {
                *counts.entry(v).or_insert(0) += 1;
            }
            for (&j, &e) in &counts {
                let mut term = c * e as f64;
                for (&v, &ev) in &counts {
                    let exp = if v == j { ev - 1 } else { ev };
                    term *= x[v].powi(exp as i32);
                }
                grad[j] += term;
            }
        }
        Ok(grad)
    }

    /// Model with every coefficient negated (turns a maximization objective
    /// into the minimization form the binary solvers expect).
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for c in out.coefficients.values_mut() {
            *c = -*c;
        }
        out
    }
}
