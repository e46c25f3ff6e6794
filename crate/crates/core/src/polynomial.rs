use serde::{Deserialize, Serialize};

/// Real polynomial in the monomial basis, `coeffs[k]` multiplying `x^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: vec![c] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect(),
        }
    }

    /// True when every coefficient above the constant term is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| *c == 0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }
}
