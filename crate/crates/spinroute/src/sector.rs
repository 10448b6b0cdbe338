//! Exact single-excitation dynamics.
//!
//! The single-excitation sector of an `n`-site network is spanned by the
//! one-hot states `|k⟩` (spin `k` flipped, all others up). On this sector the
//! network Hamiltonian reduces to an `n×n` real symmetric hopping matrix:
//! off-diagonal entries equal the coupling strengths, and the diagonal
//! collects anisotropy and field terms with the excitation-independent
//! constant (the vacuum energy `½Δ·ΣJ + ΣB`) dropped as a global phase.
//!
//! Propagation goes through a cached eigendecomposition, so `U(t)` is exact
//! to roundoff for any `t` and cheap to evaluate across sweeps.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::network::{NetworkError, SiteId, SiteSelector, SpinNetwork};

#[derive(Debug, Error)]
pub enum SectorError {
    #[error("network failed validation: {0}")]
    InvalidNetwork(String),
    #[error("matrix is not symmetric: max |M - M^T| = {0:.3e}")]
    NotSymmetric(f64),
    #[error("eigenvector matrix failed the orthonormality check: {0:.3e}")]
    BadEigenbasis(f64),
    #[error("dimension mismatch: state has {state} amplitudes, Hamiltonian acts on {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },
    #[error("site {site} out of range for sector of dimension {n}")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("state norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("amplitude magnitude {0} exceeds 1")]
    AmplitudeTooLarge(f64),
    #[error("receiver state is degenerate (θ = π with zero transfer amplitude)")]
    DegenerateState,
    #[error("empty search window: ({0}, {1})")]
    EmptyWindow(f64, f64),
    #[error("grid must have at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("wait times must be finite and non-negative, got {0}")]
    BadWait(f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Hermitian Hamiltonian on the single-excitation basis, stored with its
/// eigendecomposition (`matrix = V diag(λ) Vᵀ`, `V` orthonormal).
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    matrix: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SectorHamiltonian {
    /// Projects a validated network onto its single-excitation sector.
    ///
    /// Off-diagonal `M[a][b] = strength(a,b)`; diagonal
    /// `D[n] = −Δ·Σ_{j∼n} strength(n,j) − 2·B_n`.
    pub fn new(net: &SpinNetwork) -> Result<Self, SectorError> {
        let violations = net.validate();
        if !violations.is_empty() {
            let text = violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(SectorError::InvalidNetwork(text));
        }
        let n = net.n_sites();
        let delta = net.anisotropy();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for c in net.couplings() {
            m[(c.a.0, c.b.0)] = c.strength;
            m[(c.b.0, c.a.0)] = c.strength;
        }
        for site in 0..n {
            m[(site, site)] = -delta * net.incident_strength(site) - 2.0 * net.field(site);
        }
        Self::from_matrix(m)
    }

    /// Wraps an explicit real symmetric matrix (used for block analyses).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self, SectorError> {
        let n = matrix.nrows();
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if asym >= 1e-12 {
            return Err(SectorError::NotSymmetric(asym));
        }
        let eig = matrix.clone().symmetric_eigen();
        let v = &eig.eigenvectors;
        let gram = v.transpose() * v;
        let mut ortho = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((gram[(i, j)] - expect).abs());
            }
        }
        if ortho >= 1e-10 {
            return Err(SectorError::BadEigenbasis(ortho));
        }
        Ok(SectorHamiltonian {
            matrix,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Raw eigenvalues and the orthonormal eigenvector columns.
    pub fn eigen_pairs(&self) -> (&DVector<f64>, &DMatrix<f64>) {
        (&self.eigenvalues, &self.eigenvectors)
    }

    /// Dense propagator `U(t) = V diag(e^{−iλt}) Vᵀ`.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.n();
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * t))
            .collect();
        let mut u = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)] * phases[k];
                }
                u[(i, j)] = acc;
            }
        }
        u
    }

    /// Applies `U(t)` to a state without forming the full propagator.
    pub fn evolve(&self, state: &SectorState, t: f64) -> Result<SectorState, SectorError> {
        let n = self.n();
        if state.amps.len() != n {
            return Err(SectorError::DimensionMismatch {
                state: state.amps.len(),
                hamiltonian: n,
            });
        }
        // y = Vᵀψ, scale by e^{−iλt}, back out through V.
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += self.eigenvectors[(i, k)] * state.amps[i];
            }
            y[k] = acc * Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        let mut out = DVector::<Complex64>::zeros(n);
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += self.eigenvectors[(i, k)] * y[k];
            }
            out[i] = acc;
        }
        Ok(SectorState { amps: out })
    }

    /// Transfer amplitude `⟨b|U(t)|a⟩`.
    pub fn transfer_amplitude(
        &self,
        a: SiteId,
        b: SiteId,
        t: f64,
    ) -> Result<Complex64, SectorError> {
        let n = self.n();
        for site in [a.0, b.0] {
            if site >= n {
                return Err(SectorError::SiteOutOfRange { site, n });
            }
        }
        Ok(self.transfer_amplitude_unchecked(a.0, b.0, t))
    }

    #[inline]
    pub(crate) fn transfer_amplitude_unchecked(&self, a: usize, b: usize, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.n() {
            let w = self.eigenvectors[(b, k)] * self.eigenvectors[(a, k)];
            acc += w * Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        acc
    }
}

/// Complex amplitude vector on the one-hot basis. The sector norm may fall
/// below 1; the missing weight `1 − ‖ψ‖²` is the stationary vacuum branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    amps: DVector<Complex64>,
}

impl SectorState {
    pub fn new(amps: DVector<Complex64>) -> Result<Self, SectorError> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(SectorError::NormTooLarge(norm));
        }
        Ok(SectorState { amps })
    }

    /// The basis state `|site⟩`.
    pub fn basis(n: usize, site: SiteId) -> Result<Self, SectorError> {
        if site.0 >= n {
            return Err(SectorError::SiteOutOfRange { site: site.0, n });
        }
        let mut amps = DVector::<Complex64>::zeros(n);
        amps[site.0] = Complex64::new(1.0, 0.0);
        Ok(SectorState { amps })
    }

    pub fn n(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, site: usize) -> Complex64 {
        self.amps[site]
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Weight on the stationary vacuum branch, `1 − ‖ψ‖²` clamped at 0.
    pub fn vacuum_weight(&self) -> f64 {
        (1.0 - self.norm().powi(2)).max(0.0)
    }

    /// Global Z pulse on a site subset: negates the listed amplitudes and
    /// leaves all others alone. Involutive.
    pub fn apply_pulse(&self, sites: &[usize]) -> SectorState {
        let mut amps = self.amps.clone();
        for &s in sites {
            amps[s] = -amps[s];
        }
        SectorState { amps }
    }
}

/// One step of a schedule: evolve for `wait`, then fire a Z pulse on `sites`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PulseEvent {
    pub wait: f64,
    pub sites: SiteSelector,
}

/// Timed pulse sequence: events in order, then a final free evolution.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub events: Vec<PulseEvent>,
    pub trailing_wait: f64,
}

impl Schedule {
    pub fn total_duration(&self) -> f64 {
        self.events.iter().map(|e| e.wait).sum::<f64>() + self.trailing_wait
    }

    /// Absolute firing time of each pulse.
    pub fn pulse_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.events
            .iter()
            .map(|e| {
                t += e.wait;
                t
            })
            .collect()
    }

    /// Document form: events with absolute times plus the totals.
    pub fn to_document(&self) -> serde_json::Value {
        let times = self.pulse_times();
        serde_json::json!({
            "events": self.events.iter().zip(times).map(|(e, t)| serde_json::json!({
                "wait": e.wait,
                "time": t,
                "sites": e.sites,
            })).collect::<Vec<_>>(),
            "trailing_wait": self.trailing_wait,
            "total_duration": self.total_duration(),
        })
    }
}

/// Runs a schedule against a network, alternating free evolution and pulses,
/// with a final trailing evolution.
pub fn run_schedule(
    net: &SpinNetwork,
    psi0: &SectorState,
    schedule: &Schedule,
) -> Result<SectorState, SectorError> {
    let h = SectorHamiltonian::new(net)?;
    run_schedule_with(&h, net, psi0, schedule)
}

/// Like [`run_schedule`] but reuses an existing eigendecomposition.
pub fn run_schedule_with(
    h: &SectorHamiltonian,
    net: &SpinNetwork,
    psi0: &SectorState,
    schedule: &Schedule,
) -> Result<SectorState, SectorError> {
    let mut psi = psi0.clone();
    for event in &schedule.events {
        if !event.wait.is_finite() || event.wait < 0.0 {
            return Err(SectorError::BadWait(event.wait));
        }
        psi = h.evolve(&psi, event.wait)?;
        let sites = net.resolve(&event.sites)?;
        psi = psi.apply_pulse(&sites);
    }
    if !schedule.trailing_wait.is_finite() || schedule.trailing_wait < 0.0 {
        return Err(SectorError::BadWait(schedule.trailing_wait));
    }
    h.evolve(&psi, schedule.trailing_wait)
}

/// Receiver-side statistics of the Bose protocol for a transfer amplitude
/// `g` and input qubit `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverStats {
    /// `P = cos²(θ/2) + sin²(θ/2)·|g|²`.
    pub probability: f64,
    /// Conditional received qubit `(a₀, a₁)`, normalized.
    pub conditional: (Complex64, Complex64),
}

pub fn receiver_statistics(
    g: Complex64,
    theta: f64,
    phi: f64,
) -> Result<ReceiverStats, SectorError> {
    if g.norm() > 1.0 + 1e-12 {
        return Err(SectorError::AmplitudeTooLarge(g.norm()));
    }
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let p = c * c + s * s * g.norm_sqr();
    if p < 1e-30 {
        return Err(SectorError::DegenerateState);
    }
    let root = p.sqrt();
    let a0 = Complex64::new(c / root, 0.0);
    let a1 = Complex64::from_polar(s / root, phi) * g;
    Ok(ReceiverStats {
        probability: p,
        conditional: (a0, a1),
    })
}

/// Bloch-sphere-averaged transfer fidelity for a transfer amplitude `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageFidelity {
    /// `F̄ = Re(g)/3 + |g|²/6 + 1/2`: fidelity with the arrival phase kept.
    pub as_received: f64,
    /// `F̄* = |g|/3 + |g|²/6 + 1/2`: fidelity after correcting the known phase.
    pub phase_corrected: f64,
}

/// Both fidelity readings. `Re(g)` is `|g|·cos(arg g)`, so the first form is
/// the cosine reading of the literature formula; the second assumes the
/// receiver applies the phase-correcting gate first.
pub fn average_fidelity(g: Complex64) -> AverageFidelity {
    let m = g.norm();
    let m2 = g.norm_sqr();
    AverageFidelity {
        as_received: g.re / 3.0 + m2 / 6.0 + 0.5,
        phase_corrected: m / 3.0 + m2 / 6.0 + 0.5,
    }
}

/// Result of a transfer-amplitude peak search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub time: f64,
    pub amplitude: Complex64,
}

/// Scans `|⟨b|U(t)|a⟩|` on a coarse grid over `(t_lo, t_hi]`, then refines the
/// best grid point by golden-section search to `1e−10` in `t`. Ties on the
/// grid break toward smaller `t`.
pub fn peak_search(
    h: &SectorHamiltonian,
    a: SiteId,
    b: SiteId,
    window: (f64, f64),
    grid: usize,
) -> Result<Peak, SectorError> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(SectorError::EmptyWindow(lo, hi));
    }
    if grid < 2 {
        return Err(SectorError::GridTooSmall(grid));
    }
    let n = h.n();
    for site in [a.0, b.0] {
        if site >= n {
            return Err(SectorError::SiteOutOfRange { site, n });
        }
    }
    let step = (hi - lo) / grid as f64;
    let mag = |t: f64| h.transfer_amplitude_unchecked(a.0, b.0, t).norm();

    let values: Vec<f64> = (1..=grid).map(|i| mag(lo + step * i as f64)).collect();
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // Refine every near-best local maximum: revivals of equal height refine
    // to the same value, and the earliest then wins the tie.
    let mut candidates: Vec<usize> = (0..grid)
        .filter(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { values[i - 1] };
            let right = if i + 1 == grid {
                f64::NEG_INFINITY
            } else {
                values[i + 1]
            };
            values[i] >= left && values[i] >= right && values[i] >= best - 1e-6
        })
        .collect();
    candidates.sort_by(|&x, &y| values[y].partial_cmp(&values[x]).unwrap());
    candidates.truncate(32);
    candidates.sort_unstable();

    let refine = |index: usize| -> f64 {
        let mut lo_t = (lo + step * index as f64).max(lo + step * 0.5 * f64::EPSILON);
        let mut hi_t = (lo + step * (index as f64 + 2.0)).min(hi);
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut c = hi_t - INV_PHI * (hi_t - lo_t);
        let mut d = lo_t + INV_PHI * (hi_t - lo_t);
        let mut fc = mag(c);
        let mut fd = mag(d);
        while hi_t - lo_t > 1e-10 {
            if fc > fd {
                hi_t = d;
                d = c;
                fd = fc;
                c = hi_t - INV_PHI * (hi_t - lo_t);
                fc = mag(c);
            } else {
                lo_t = c;
                c = d;
                fc = fd;
                d = lo_t + INV_PHI * (hi_t - lo_t);
                fd = mag(d);
            }
        }
        0.5 * (lo_t + hi_t)
    };

    let mut t_star = lo + step;
    let mut m_star = f64::NEG_INFINITY;
    for index in candidates {
        let t = refine(index);
        let m = mag(t);
        if m > m_star + 1e-12 {
            m_star = m;
            t_star = t;
        }
    }
    Ok(Peak {
        time: t_star,
        amplitude: h.transfer_amplitude_unchecked(a.0, b.0, t_star),
    })
}

/// One row of a transfer time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSample {
    pub t: f64,
    pub amplitude: Complex64,
    pub fidelity: AverageFidelity,
}

/// Samples `⟨b|U(t)|a⟩` on `grid` points over `(0, t_max]`.
pub fn transfer_series(
    h: &SectorHamiltonian,
    a: SiteId,
    b: SiteId,
    t_max: f64,
    grid: usize,
) -> Result<Vec<TransferSample>, SectorError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(SectorError::EmptyWindow(0.0, t_max));
    }
    if grid < 2 {
        return Err(SectorError::GridTooSmall(grid));
    }
    let n = h.n();
    for site in [a.0, b.0] {
        if site >= n {
            return Err(SectorError::SiteOutOfRange { site, n });
        }
    }
    let step = t_max / grid as f64;
    Ok((1..=grid)
        .map(|i| {
            let t = step * i as f64;
            let g = h.transfer_amplitude_unchecked(a.0, b.0, t);
            TransferSample {
                t,
                amplitude: g,
                fidelity: average_fidelity(g),
            }
        })
        .collect())
}

/// Renders a time series as comma-separated text with a header line, using
/// 17 significant digits so downstream plotting re-reads the exact values.
pub fn transfer_series_csv(samples: &[TransferSample]) -> String {
    let mut out = String::with_capacity(samples.len() * 96 + 64);
    out.push_str("t,re_g,im_g,abs_g,fbar,fbar_star\n");
    for s in samples {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.t,
            s.amplitude.re,
            s.amplitude.im,
            s.amplitude.norm(),
            s.fidelity.as_received,
            s.fidelity.phase_corrected,
        ));
    }
    out
}
