use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::LatticeState;
use crate::lattice::hamiltonian::onsite_energy;
use crate::lattice::two_site::{link_operator, two_site_blocks};
use crate::lattice::{Link, ModelParams};
use crate::linalg::CMat;
use crate::scalar::{Real, C};

/// Order in which the factors of one first-order step act on the state.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorOrder {
    /// `U = e^{−iΔt H_1} e^{−iΔt J_r H_even} e^{−iΔt J_r H_odd}`: odd links act
    /// first and the on-site phase last.
    #[default]
    OddEvenOnsite,
    /// On-site phase first, then even links, then odd links.
    OnsiteEvenOdd,
}

/// How links are grouped into exactly exponentiated factors.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Even and odd link sets; requires disjoint link classes.
    #[default]
    EvenOdd,
    /// One link at a time in lattice order, valid for any `L`.
    Sequential,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterOptions {
    #[serde(default)]
    pub order: FactorOrder,
    #[serde(default)]
    pub split: SplitMode,
}

/// Factors of one Trotter step at fixed `(J_r, dt)`.
#[derive(Clone, Debug)]
pub struct TrotterStepPlan<T> {
    pub onsite: Vec<C<T>>,
    /// `e^{−i dt J_r (H_p + H_h)}` on two sites, index `d_a + 4 d_b`.
    pub link_unitary: CMat<T>,
    pub even: Vec<Link>,
    pub odd: Vec<Link>,
    pub options: TrotterOptions,
}

impl<T: Real> TrotterStepPlan<T> {
    pub fn new(params: &ModelParams, jr: f64, dt: f64, options: TrotterOptions) -> Result<Self> {
        params.validate()?;
        let lat = params.lattice()?;
        if options.split == SplitMode::EvenOdd {
            params.require_split()?;
        }
        let n = lat.n_sites();
        let dim = params.dim();
        if dim > (1u128 << 26) {
            return Err(Error::Resource {
                what: "state dimension",
                requested: dim,
                cap: 1 << 26,
            });
        }
        let onsite = (0..dim as usize)
            .map(|s| {
                let (sn, cs) = (T::lit(onsite_energy(s, n, params.j, params.mu) * dt)).sin_cos();
                C::new(cs, -sn)
            })
            .collect();
        let blocks = two_site_blocks(&link_operator::<T>())?;
        let link_unitary = blocks.exp_minus_i(T::lit(jr * dt))?;
        let (mut even, mut odd) = (Vec::new(), Vec::new());
        for k in lat.links() {
            match options.split {
                SplitMode::EvenOdd if lat.link_class(&k).odd => odd.push(k),
                _ => even.push(k),
            }
        }
        Ok(Self {
            onsite,
            link_unitary,
            even,
            odd,
            options,
        })
    }

    fn apply_onsite(&self, psi: &mut [C<T>]) {
        for (a, &p) in psi.iter_mut().zip(&self.onsite) {
            *a = *a * p;
        }
    }

    fn apply_links(&self, links: &[Link], psi: &mut [C<T>]) {
        for k in links {
            apply_two_site(&self.link_unitary, k.a, k.b, psi);
        }
    }

    pub fn apply(&self, psi: &mut [C<T>]) {
        match self.options.order {
            FactorOrder::OddEvenOnsite => {
                self.apply_links(&self.odd, psi);
                self.apply_links(&self.even, psi);
                self.apply_onsite(psi);
            }
            FactorOrder::OnsiteEvenOdd => {
                self.apply_onsite(psi);
                self.apply_links(&self.even, psi);
                self.apply_links(&self.odd, psi);
            }
        }
    }
}

/// Applies a 16×16 operator (index `d_a + 4 d_b`) to sites `a`, `b`.
pub fn apply_two_site<T: Real>(u: &CMat<T>, a: usize, b: usize, psi: &mut [C<T>]) {
    assert!(a != b);
    let (sa, sb) = (2 * a, 2 * b);
    let mask = (3usize << sa) | (3usize << sb);
    let offsets: [usize; 16] = std::array::from_fn(|p| ((p & 3) << sa) | ((p >> 2) << sb));
    let mut buf = [C::new(T::zero(), T::zero()); 16];
    for base in 0..psi.len() {
        if base & mask != 0 {
            continue;
        }
        for (p, o) in offsets.iter().enumerate() {
            buf[p] = psi[base | o];
        }
        for (q, o) in offsets.iter().enumerate() {
            let row = u.row(q);
            let mut acc = C::new(T::zero(), T::zero());
            for p in 0..16 {
                acc += row[p] * buf[p];
            }
            psi[base | o] = acc;
        }
    }
}

/// One first-order Trotter step.
pub fn trotter_step<T: Real>(
    state: &LatticeState<T>,
    jr: f64,
    dt: f64,
    params: &ModelParams,
    options: TrotterOptions,
) -> Result<LatticeState<T>> {
    if state.params.lattice()? != params.lattice()? {
        return Err(Error::InvalidInput("state and parameters describe different lattices".into()));
    }
    let plan = TrotterStepPlan::<T>::new(params, jr, dt, options)?;
    let mut psi = state.amplitudes().to_vec();
    plan.apply(&mut psi);
    LatticeState::new(state.params, psi)
}
