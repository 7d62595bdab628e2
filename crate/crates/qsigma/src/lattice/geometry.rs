use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Hypercubic lattice of side `l` in `d` dimensions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub d: usize,
    pub l: usize,
    pub boundary: Boundary,
}

/// Directed nearest-neighbour bond `a → a + e_dir`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub dir: usize,
}

/// Commuting class of links used by the Trotter split.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkClass {
    pub dir: usize,
    pub odd: bool,
}

impl Lattice {
    pub fn new(d: usize, l: usize, boundary: Boundary) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if l < 2 {
            return Err(Error::Config("L must be at least 2".into()));
        }
        Ok(Self { d, l, boundary })
    }

    pub fn periodic(d: usize, l: usize) -> Result<Self> {
        Self::new(d, l, Boundary::Periodic)
    }

    pub fn n_sites(&self) -> usize {
        self.l.pow(self.d as u32)
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    pub fn coords(&self, mut x: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            c.push(x % self.l);
            x /= self.l;
        }
        c
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.l + (c % self.l))
    }

    /// All links; periodic lattices have `d · L^d` of them, including the
    /// doubled bond pair when `L = 2`.
    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::new();
        for x in 0..self.n_sites() {
            let c = self.coords(x);
            for dir in 0..self.d {
                if self.boundary == Boundary::Open && c[dir] + 1 == self.l {
                    continue;
                }
                let mut n = c.clone();
                n[dir] = (c[dir] + 1) % self.l;
                out.push(Link {
                    a: x,
                    b: self.site(&n),
                    dir,
                });
            }
        }
        out
    }

    pub fn n_links(&self) -> usize {
        self.links().len()
    }

    pub fn link_class(&self, link: &Link) -> LinkClass {
        LinkClass {
            dir: link.dir,
            odd: self.coords(link.a)[link.dir] % 2 == 1,
        }
    }

    /// Whether links of one class are pairwise disjoint.
    pub fn split_is_valid(&self) -> bool {
        self.boundary == Boundary::Open || self.l % 2 == 0
    }

    pub fn are_adjacent(&self, x: usize, y: usize) -> bool {
        self.links().iter().any(|k| (k.a == x && k.b == y) || (k.a == y && k.b == x))
    }

    /// Site map of the translation by `shift`.
    pub fn translation(&self, shift: &[usize]) -> Vec<usize> {
        (0..self.n_sites())
            .map(|x| {
                let c: Vec<usize> = self
                    .coords(x)
                    .iter()
                    .zip(shift)
                    .map(|(&a, &s)| (a + s) % self.l)
                    .collect();
                self.site(&c)
            })
            .collect()
    }

    /// Site map of the inversion `x_i → L − 1 − x_i`; on two sites this is
    /// the exchange.
    pub fn inversion(&self) -> Vec<usize> {
        (0..self.n_sites())
            .map(|x| {
                let c: Vec<usize> = self.coords(x).iter().map(|&a| self.l - 1 - a).collect();
                self.site(&c)
            })
            .collect()
    }

    /// All displacement vectors, in site order.
    pub fn displacements(&self) -> Vec<Vec<usize>> {
        (0..self.n_sites()).map(|x| self.coords(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_counts() {
        assert_eq!(Lattice::periodic(1, 2).unwrap().n_links(), 2);
        assert_eq!(Lattice::periodic(1, 6).unwrap().n_links(), 6);
        assert_eq!(Lattice::periodic(2, 3).unwrap().n_links(), 18);
        assert_eq!(Lattice::new(1, 4, Boundary::Open).unwrap().n_links(), 3);
    }

    #[test]
    fn classes_are_disjoint_for_even_l() {
        let lat = Lattice::periodic(2, 4).unwrap();
        let links = lat.links();
        for a in &links {
            for b in &links {
                if a != b && lat.link_class(a) == lat.link_class(b) {
                    let sa = [a.a, a.b];
                    assert!(!sa.contains(&b.a) && !sa.contains(&b.b));
                }
            }
        }
    }

    #[test]
    fn coords_roundtrip() {
        let lat = Lattice::periodic(3, 3).unwrap();
        for x in 0..lat.n_sites() {
            assert_eq!(lat.site(&lat.coords(x)), x);
        }
        assert_eq!(Lattice::periodic(1, 2).unwrap().inversion(), vec![1, 0]);
    }
}
