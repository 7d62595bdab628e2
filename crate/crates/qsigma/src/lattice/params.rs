use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::geometry::{Boundary, Lattice};

/// Couplings and geometry of the lattice model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// On-site triplet energy.
    #[serde(default = "one")]
    pub j: f64,
    /// Triplet splitting, on-site energy is `J + μ m`.
    #[serde(default)]
    pub mu: f64,
    /// Nearest-neighbour coupling.
    pub jr: f64,
    pub d: usize,
    pub l: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

fn one() -> f64 {
    1.0
}

impl ModelParams {
    pub fn new(d: usize, l: usize, jr: f64) -> Self {
        Self {
            j: 1.0,
            mu: 0.0,
            jr,
            d,
            l,
            boundary: Boundary::Periodic,
        }
    }

    pub fn with_jr(mut self, jr: f64) -> Self {
        self.jr = jr;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_boundary(mut self, b: Boundary) -> Self {
        self.boundary = b;
        self
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.d, self.l, self.boundary)
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice()?;
        for (name, v) in [("j", self.j), ("mu", self.mu), ("jr", self.jr)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    /// Number of links for the configured boundary.
    pub fn n_links(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.d * self.n_sites(),
            Boundary::Open => self.d * self.l.pow(self.d as u32 - 1) * (self.l - 1),
        }
    }

    /// Hilbert-space dimension `4^(L^d)`, saturating.
    pub fn dim(&self) -> u128 {
        let s = self.n_sites() as u32;
        if s >= 63 {
            u128::MAX
        } else {
            1u128 << (2 * s)
        }
    }

    /// Fails when the even/odd split is requested on a lattice where link
    /// classes would overlap.
    pub fn require_split(&self) -> Result<()> {
        if self.boundary == Boundary::Periodic && self.l % 2 == 1 {
            return Err(Error::Config(format!(
                "even/odd link split requires even L with periodic boundaries (L = {})",
                self.l
            )));
        }
        Ok(())
    }
}
