use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::C;
use crate::shadows::Pauli;

/// Stream tag separating shadow draws from other uses of a root seed.
const SHADOW_STREAM: u64 = 0x5AD0;

/// One random-basis measurement of every qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowRecord {
    pub bases: Vec<Pauli>,
    pub outcomes: Vec<u8>,
    /// Snapshot index; the draw used stream `(seed, [tag, index])`.
    pub stream: u64,
}

/// Applies the basis change that maps the `+1` eigenvector of `p` to `|0⟩`
/// on qubit `q`: `H` for X, `H S†` for Y.
fn rotate(psi: &mut [C<f64>], q: usize, p: Pauli) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bit = 1usize << q;
    for i in 0..psi.len() {
        if i & bit != 0 {
            continue;
        }
        let (a0, a1) = (psi[i], psi[i | bit]);
        let a1 = match p {
            Pauli::Z => continue,
            Pauli::X => a1,
            Pauli::Y => a1 * C::new(0.0, -1.0),
        };
        psi[i] = (a0 + a1) * h;
        psi[i | bit] = (a0 - a1) * h;
    }
}

fn n_qubits(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidInput(format!("state length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Draws `n` snapshots of `amps` with Born-rule outcomes.
///
/// Snapshot `i` takes its bases and outcome from its own stream, so the
/// result is independent of thread count. Snapshots sharing a basis pattern
/// share one rotated probability table.
pub fn sample_shadows(amps: &[C<f64>], n: usize, seed: u64) -> Result<Vec<ShadowRecord>> {
    let nq = n_qubits(amps.len())?;
    let draws: Vec<(Vec<Pauli>, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, &[SHADOW_STREAM, i]);
            let bases = (0..nq).map(|_| Pauli::ALL[r.random_range(0..3)]).collect();
            (bases, r.random::<f64>())
        })
        .collect();
    let mut groups: BTreeMap<&[Pauli], Vec<usize>> = BTreeMap::new();
    for (i, (b, _)) in draws.iter().enumerate() {
        groups.entry(b.as_slice()).or_default().push(i);
    }
    let groups: Vec<(&[Pauli], Vec<usize>)> = groups.into_iter().collect();
    let outcomes: Vec<Vec<(usize, usize)>> = groups
        .par_iter()
        .map(|(bases, members)| {
            let mut psi = amps.to_vec();
            for (q, &p) in bases.iter().enumerate() {
                rotate(&mut psi, q, p);
            }
            let mut cdf = Vec::with_capacity(psi.len());
            let mut acc = 0.0;
            for a in &psi {
                acc += a.norm_sqr();
                cdf.push(acc);
            }
            members
                .iter()
                .map(|&i| {
                    let u = draws[i].1 * acc;
                    let j = cdf.partition_point(|&c| c <= u).min(psi.len() - 1);
                    (i, j)
                })
                .collect()
        })
        .collect();
    let mut index = vec![0usize; n];
    for (i, j) in outcomes.into_iter().flatten() {
        index[i] = j;
    }
    Ok(draws
        .into_iter()
        .zip(index)
        .enumerate()
        .map(|(i, ((bases, _), j))| ShadowRecord {
            bases,
            outcomes: (0..nq).map(|q| ((j >> q) & 1) as u8).collect(),
            stream: i as u64,
        })
        .collect())
}
