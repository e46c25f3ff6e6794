use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tensor grid request: `nu x nv` points kept `margin` away from each domain edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nu: 50, nv: 50, margin: 0.02 }
    }
}

/// Resolved parameter grid, row-major in `u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleGrid {
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
}

fn axis(lo: f64, hi: f64, n: usize, margin: f64, name: &str) -> Result<Vec<f64>> {
    let (a, b) = (lo + margin, hi - margin);
    if n == 0 || !(a <= b) {
        return Err(Error::Domain(format!("{name} grid: {n} points in [{lo}, {hi}] with margin {margin} is empty")));
    }
    if n == 1 {
        return Ok(vec![0.5 * (a + b)]);
    }
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect())
}

impl SampleGrid {
    pub fn resolve(spec: &GridSpec, u_domain: (f64, f64), v_domain: (f64, f64)) -> Result<Self> {
        Ok(SampleGrid {
            us: axis(u_domain.0, u_domain.1, spec.nu, spec.margin, "u")?,
            vs: axis(v_domain.0, v_domain.1, spec.nv, spec.margin, "v")?,
        })
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.us.iter().flat_map(|&u| self.vs.iter().map(move |&v| (u, v))).collect()
    }

    pub fn len(&self) -> usize {
        self.us.len() * self.vs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_respects_margin() {
        let g = SampleGrid::resolve(&GridSpec { nu: 3, nv: 2, margin: 0.1 }, (0.0, 1.0), (1.0, 2.0)).unwrap();
        assert_eq!(g.us, vec![0.1, 0.5, 0.9]);
        assert_eq!(g.vs, vec![1.1, 1.9]);
        assert_eq!(g.points().len(), 6);
        assert!(SampleGrid::resolve(&GridSpec { nu: 3, nv: 2, margin: 0.6 }, (0.0, 1.0), (1.0, 2.0)).is_err());
    }
}
