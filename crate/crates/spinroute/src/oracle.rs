//! Brute-force verification on the full 2^N Hilbert space.
//!
//! Everything here is built directly from explicit 2×2 Pauli operators placed
//! by Kronecker products, with no reference to the single-excitation
//! reduction it is meant to validate. Site `k` owns bit `k` of the basis
//! index, so the one-hot state `|k⟩` is the computational basis vector at
//! index `2^k` and `|0…0⟩` sits at index 0.
//!
//! Dense matrices keep this simple; the hard size cap of 14 sites (16384
//! dimensions) is enforced on every entry point.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::network::{SiteId, SpinNetwork};
use crate::sector::{Schedule, SectorHamiltonian, SectorState};

/// Hard cap on network size for full-space work.
pub const MAX_FULL_SITES: usize = 14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("network of {got} sites exceeds the full-space cap of {MAX_FULL_SITES}")]
    SizeCapExceeded { got: usize },
    #[error("site {site} out of range for network of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("network failed validation: {0}")]
    InvalidNetwork(String),
    #[error("sector computation failed: {0}")]
    Sector(#[from] crate::sector::SectorError),
    #[error("state norm {0} is not 1")]
    NotNormalized(f64),
}

/// Normalized state vector over the 2^N computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    amps: DVector<Complex64>,
}

impl FullState {
    pub fn new(amps: DVector<Complex64>) -> Result<Self, OracleError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(OracleError::NotNormalized(norm));
        }
        Ok(FullState { amps })
    }

    /// Computational basis state at `index` for an `n_sites` network.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self, OracleError> {
        check_cap(n_sites)?;
        let dim = 1usize << n_sites;
        let mut amps = DVector::<Complex64>::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(FullState { amps })
    }

    /// The one-excitation state `|k⟩` of Eq-style one-hot labeling.
    pub fn one_hot(n_sites: usize, site: SiteId) -> Result<Self, OracleError> {
        if site.0 >= n_sites {
            return Err(OracleError::SiteOutOfRange {
                site: site.0,
                n_sites,
            });
        }
        Self::basis(n_sites, 1usize << site.0)
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }
}

fn check_cap(n_sites: usize) -> Result<(), OracleError> {
    if n_sites > MAX_FULL_SITES {
        return Err(OracleError::SizeCapExceeded { got: n_sites });
    }
    Ok(())
}

fn check_network(net: &SpinNetwork) -> Result<(), OracleError> {
    check_cap(net.n_sites())?;
    let violations = net.validate();
    if !violations.is_empty() {
        return Err(OracleError::InvalidNetwork(
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    Ok(())
}

const PAULI_X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
// Y = i·Ỹ with Ỹ real, so Y⊗Y = −Ỹ⊗Ỹ stays real.
const PAULI_Y_OVER_I: [[f64; 2]; 2] = [[0.0, -1.0], [1.0, 0.0]];
const PAULI_Z: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];
const IDENT: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// Places one 2×2 operator per site and takes the Kronecker product, ordered
/// so that site `i` owns bit `i` of the basis index.
fn place(n_sites: usize, ops: &[(usize, [[f64; 2]; 2])]) -> DMatrix<f64> {
    let mut acc = DMatrix::<f64>::identity(1, 1);
    for site in (0..n_sites).rev() {
        let op = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, m)| *m)
            .unwrap_or(IDENT);
        let op = DMatrix::<f64>::from_row_slice(2, 2, &[op[0][0], op[0][1], op[1][0], op[1][1]]);
        acc = acc.kronecker(&op);
    }
    acc
}

/// Full 2^N Hamiltonian:
/// `H = Σ_(a,b) J_ab · ½ (X_a X_b + Y_a Y_b + Δ Z_a Z_b) + Σ_i B_i Z_i`.
pub fn full_hamiltonian(net: &SpinNetwork) -> Result<DMatrix<f64>, OracleError> {
    check_network(net)?;
    let n = net.n_sites();
    let dim = 1usize << n;
    let delta = net.anisotropy();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for c in net.couplings() {
        let (a, b, j) = (c.a.0, c.b.0, c.strength);
        let xx = place(n, &[(a, PAULI_X), (b, PAULI_X)]);
        let yy = -place(n, &[(a, PAULI_Y_OVER_I), (b, PAULI_Y_OVER_I)]);
        h += (xx + yy) * (0.5 * j);
        if delta != 0.0 {
            let zz = place(n, &[(a, PAULI_Z), (b, PAULI_Z)]);
            h += zz * (0.5 * j * delta);
        }
    }
    for site in 0..n {
        let b = net.field(site);
        if b != 0.0 {
            h += place(n, &[(site, PAULI_Z)]) * b;
        }
    }
    Ok(h)
}

/// Eigendecomposition of a full-space Hamiltonian, reused across times.
pub struct FullEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    vacuum_energy: f64,
}

impl FullEvolution {
    pub fn new(h: &DMatrix<f64>) -> Self {
        // |0…0⟩ is an eigenstate, so its diagonal entry is the vacuum energy.
        let vacuum_energy = h[(0, 0)];
        let eig = h.clone().symmetric_eigen();
        FullEvolution {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            vacuum_energy,
        }
    }

    /// Energy of `|0…0⟩`; the sector picture measures energies relative to it.
    pub fn vacuum_energy(&self) -> f64 {
        self.vacuum_energy
    }

    pub fn evolve(&self, state: &FullState, t: f64) -> FullState {
        let dim = self.eigenvalues.len();
        let mut y = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                acc += self.eigenvectors[(i, k)] * state.amps[i];
            }
            y[k] = acc * Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        let mut out = DVector::<Complex64>::zeros(dim);
        for i in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += self.eigenvectors[(i, k)] * y[k];
            }
            out[i] = acc;
        }
        FullState { amps: out }
    }
}

/// Max elementwise magnitude of `[H, Z_tot]`. `Z_tot` is diagonal with entry
/// `n − 2·popcount(s)` on basis state `s`, so the commutator entry at
/// `(s, s')` is `H[s,s'] · (z(s') − z(s))`.
pub fn check_symmetry(net: &SpinNetwork) -> Result<f64, OracleError> {
    let h = full_hamiltonian(net)?;
    let n = net.n_sites();
    let dim = 1usize << n;
    let z: Vec<f64> = (0..dim)
        .map(|s| n as f64 - 2.0 * (s as u64).count_ones() as f64)
        .collect();
    let mut worst = 0.0f64;
    for s in 0..dim {
        for sp in 0..dim {
            worst = worst.max((h[(s, sp)] * (z[sp] - z[s])).abs());
        }
    }
    Ok(worst)
}

/// `|⟨b| e^{−i(H_full − E_vac)t} |a⟩ − ⟨b|U_sector(t)|a⟩|` with one-hot kets.
///
/// The vacuum-energy phase is removed on the full side because the sector
/// Hamiltonian drops that constant; `E_vac` is read off `H_full[0,0]`, so the
/// gauge never touches sector code.
pub fn sector_equivalence(
    net: &SpinNetwork,
    a: SiteId,
    b: SiteId,
    t: f64,
) -> Result<f64, OracleError> {
    let h_full = full_hamiltonian(net)?;
    let evo = FullEvolution::new(&h_full);
    let from = FullState::one_hot(net.n_sites(), a)?;
    let evolved = evo.evolve(&from, t);
    let gauge = Complex64::from_polar(1.0, evo.vacuum_energy() * t);
    let amp_full = evolved.amplitude(1usize << b.0) * gauge;

    let h_sector = SectorHamiltonian::new(net)?;
    let amp_sector = h_sector.transfer_amplitude(a, b, t)?;
    Ok((amp_full - amp_sector).norm())
}

/// Full-space global Z pulse on a site subset: a diagonal sign by the parity
/// of occupied subset bits.
fn full_pulse(state: &FullState, sites: &[usize]) -> FullState {
    let mut mask = 0usize;
    for &s in sites {
        mask |= 1usize << s;
    }
    let mut amps = state.amps.clone();
    for idx in 0..amps.len() {
        if ((idx & mask).count_ones() & 1) == 1 {
            amps[idx] = -amps[idx];
        }
    }
    FullState { amps }
}

/// Runs a pulse schedule on both representations from `|a⟩` and compares the
/// final amplitude on `|b⟩`, vacuum-gauged like [`sector_equivalence`].
pub fn schedule_equivalence(
    net: &SpinNetwork,
    a: SiteId,
    b: SiteId,
    schedule: &Schedule,
) -> Result<f64, OracleError> {
    let h_full = full_hamiltonian(net)?;
    let evo = FullEvolution::new(&h_full);
    let mut full = FullState::one_hot(net.n_sites(), a)?;
    for event in &schedule.events {
        full = evo.evolve(&full, event.wait);
        let sites = net
            .resolve(&event.sites)
            .map_err(crate::sector::SectorError::from)?;
        full = full_pulse(&full, &sites);
    }
    full = evo.evolve(&full, schedule.trailing_wait);
    let gauge = Complex64::from_polar(1.0, evo.vacuum_energy() * schedule.total_duration());
    let amp_full = full.amplitude(1usize << b.0) * gauge;

    let psi0 = SectorState::basis(net.n_sites(), a)?;
    let out = crate::sector::run_schedule(net, &psi0, schedule)?;
    Ok((amp_full - out.amplitude(b.0)).norm())
}

/// Deviation of `e^{−iH t}|0…0⟩` from a pure phase times `|0…0⟩`.
pub fn vacuum_stationarity(net: &SpinNetwork, t: f64) -> Result<f64, OracleError> {
    let h_full = full_hamiltonian(net)?;
    let evo = FullEvolution::new(&h_full);
    let vac = FullState::basis(net.n_sites(), 0)?;
    let evolved = evo.evolve(&vac, t);
    let overlap = evolved.amplitude(0);
    let residual: f64 = evolved
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let keep = if i == 0 { overlap } else { Complex64::default() };
            (a - keep).norm_sqr()
        })
        .sum();
    Ok(residual.sqrt())
}
