//! Pearson correlation, two-tailed significance and correlation matrices.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Sample Pearson correlation (two-pass: means first, then centred moments).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 pairs, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 || x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
        return Err(Error::Undefined("correlation with a constant vector".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of `r` under the null of zero correlation, via the t
/// distribution with `n - 2` degrees of freedom.
pub fn p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("p-value needs n >= 3, got {n}")));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidInput(format!("correlation {r} outside [-1, 1]")));
    }
    if r.abs() == 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let t2 = r * r * df / (1.0 - r * r);
    // P(|T| > t) = I_{df / (df + t²)}(df / 2, 1 / 2)
    Ok(beta_reg(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0))
}

/// Symmetric matrix of pairwise-complete correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
    pub p: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        self.r[self.index_of(a)?][self.index_of(b)?]
    }

    pub fn p_of(&self, a: &str, b: &str) -> Option<f64> {
        self.p[self.index_of(a)?][self.index_of(b)?]
    }

    /// Lower-triangular table of r values, one row per variable.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(",{}\n", self.variables.join(",")));
        for (i, name) in self.variables.iter().enumerate() {
            out.push_str(name);
            for j in 0..self.variables.len() {
                out.push(',');
                if j <= i {
                    if let Some(r) = self.r[i][j] {
                        out.push_str(&format!("{r:.6}"));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the matrix over named columns; `None` entries are dropped pairwise.
/// Cells with fewer than 3 complete pairs or a constant side are missing.
pub fn correlation_matrix(columns: &[(String, Vec<Option<f64>>)]) -> Result<CorrelationMatrix> {
    let k = columns.len();
    if let Some(len) = columns.first().map(|c| c.1.len()) {
        if columns.iter().any(|c| c.1.len() != len) {
            return Err(Error::InvalidInput("columns differ in length".into()));
        }
    }
    let mut r = vec![vec![None; k]; k];
    let mut p = vec![vec![None; k]; k];
    let mut n = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in i..k {
            let (x, y): (Vec<f64>, Vec<f64>) = columns[i]
                .1
                .iter()
                .zip(&columns[j].1)
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            n[i][j] = x.len();
            n[j][i] = x.len();
            let cell = if i == j {
                pearson(&x, &y).ok().map(|_| 1.0)
            } else {
                pearson(&x, &y).ok()
            };
            let pv = cell.and_then(|c| p_value(c, x.len()).ok());
            r[i][j] = cell;
            r[j][i] = cell;
            p[i][j] = pv;
            p[j][i] = pv;
        }
    }
    Ok(CorrelationMatrix {
        variables: columns.iter().map(|c| c.0.clone()).collect(),
        r,
        p,
        n,
    })
}
