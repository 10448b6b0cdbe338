//! Conclusive state transfer over two parallel, possibly disordered chains.
//!
//! A logical qubit `α|0⟩ + β|1⟩` is encoded across two chains as
//! `α|0,1⟩ + β|1,0⟩`: the α branch rides chain 2 and the β branch chain 1,
//! and the two never mix because the chains do not interact. The receiver
//! waits for a time where the two endpoint amplitudes match in magnitude
//! (`g_N = e^{iφ} f_N`), then measures whether the excitation sits on the
//! endpoint pair. Success heralds a perfect transfer up to the known phase
//! `φ`; failure projects the endpoint amplitudes out, and the search repeats
//! on the conditioned state. The cumulative success probability climbs
//! toward one as attempts accumulate.
//!
//! Coupling disorder follows `J_i = J(1 + δ_i)` with `δ_i` drawn uniformly
//! from `[−ε, ε]` by a seeded ChaCha8 stream, so runs reproduce bit for bit.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::network::{NetworkError, SpinNetwork};
use crate::sector::{SectorError, SectorHamiltonian};

/// Default decode-time search window length, in units of `1/J` per site.
pub const WINDOW_PER_SITE: f64 = 10.0;
/// Default grid resolution of one search window.
pub const DEFAULT_GRID: usize = 2000;

#[derive(Debug, Error)]
pub enum DualRailError {
    #[error("disorder strength {0} outside [0, 0.2]")]
    EpsilonOutOfRange(f64),
    #[error("chains need at least 2 sites, got {0}")]
    TooShort(usize),
    #[error("chains must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("target cumulative success must lie strictly inside (0, 1), got {0}")]
    BadTarget(f64),
    #[error("at least one attempt is required")]
    NoAttempts,
    #[error("attempt time {t} precedes the previous attempt at {previous}")]
    TimeOrder { t: f64, previous: f64 },
    #[error("input amplitudes are not normalized: |α|² + |β|² = {0}")]
    BadInput(f64),
    #[error(transparent)]
    Sector(#[from] SectorError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Which chain profile the two rails are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RailKind {
    /// Uniform XY chains, `J_i = 1 + δ_i`.
    Uniform,
    /// Engineered perfect-transfer chains with disorder on each bond.
    Pst,
}

impl RailKind {
    pub fn name(&self) -> &'static str {
        match self {
            RailKind::Uniform => "uniform",
            RailKind::Pst => "pst",
        }
    }
}

/// Two equal-length chains with independent disorder draws.
#[derive(Debug)]
pub struct DualRailSystem {
    n: usize,
    kind: RailKind,
    epsilon: f64,
    seed: u64,
    chain1: SpinNetwork,
    chain2: SpinNetwork,
    h1: SectorHamiltonian,
    h2: SectorHamiltonian,
    delta1: Vec<f64>,
    delta2: Vec<f64>,
}

fn disordered_chain(
    base: &SpinNetwork,
    deltas: &[f64],
) -> Result<SpinNetwork, DualRailError> {
    let n = base.n_sites();
    let mut net = SpinNetwork::new(n);
    for (k, c) in base.couplings().iter().enumerate() {
        net.add_coupling(c.a.0, c.b.0, c.strength * (1.0 + deltas[k]))?;
    }
    Ok(net)
}

fn build_kind(
    kind: RailKind,
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<DualRailSystem, DualRailError> {
    if n < 2 {
        return Err(DualRailError::TooShort(n));
    }
    if !(0.0..=0.2).contains(&epsilon) {
        return Err(DualRailError::EpsilonOutOfRange(epsilon));
    }
    let base = match kind {
        RailKind::Uniform => crate::network::build_uniform_chain(n, 0.0, 0.0)?,
        RailKind::Pst => crate::network::build_pst_chain(n)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|_| {
                if epsilon == 0.0 {
                    0.0
                } else {
                    rng.random_range(-epsilon..=epsilon)
                }
            })
            .collect()
    };
    let delta1 = draw(n - 1);
    let delta2 = draw(n - 1);
    let chain1 = disordered_chain(&base, &delta1)?;
    let chain2 = disordered_chain(&base, &delta2)?;
    let h1 = SectorHamiltonian::new(&chain1)?;
    let h2 = SectorHamiltonian::new(&chain2)?;
    Ok(DualRailSystem {
        n,
        kind,
        epsilon,
        seed,
        chain1,
        chain2,
        h1,
        h2,
        delta1,
        delta2,
    })
}

/// Two uniform XY chains with couplings `1 + δ_i`, `δ` uniform on `[−ε, ε]`.
pub fn build_dual_rail(n: usize, epsilon: f64, seed: u64) -> Result<DualRailSystem, DualRailError> {
    build_kind(RailKind::Uniform, n, epsilon, seed)
}

/// Two engineered perfect-transfer chains, optionally disordered.
pub fn build_pst_dual_rail(
    n: usize,
    epsilon: f64,
    seed: u64,
) -> Result<DualRailSystem, DualRailError> {
    build_kind(RailKind::Pst, n, epsilon, seed)
}

impl DualRailSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RailKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chain1(&self) -> &SpinNetwork {
        &self.chain1
    }

    pub fn chain2(&self) -> &SpinNetwork {
        &self.chain2
    }

    pub fn deltas(&self) -> (&[f64], &[f64]) {
        (&self.delta1, &self.delta2)
    }
}

/// Endpoint transfer amplitudes of the two rails from their first sites:
/// `f_N = ⟨N|e^{−iH₁t}|1⟩`, `g_N = ⟨N|e^{−iH₂t}|1⟩`.
pub fn endpoint_amplitudes(sys: &DualRailSystem, t: f64) -> (Complex64, Complex64) {
    let last = sys.n - 1;
    (
        sys.h1.transfer_amplitude_unchecked(0, last, t),
        sys.h2.transfer_amplitude_unchecked(0, last, t),
    )
}

/// A time where the two endpoint magnitudes agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeTime {
    pub t: f64,
    pub f_magnitude: f64,
    pub g_magnitude: f64,
    /// `arg(g_N / f_N)`: the phase the receiver corrects after success.
    pub phase: f64,
}

impl DecodeTime {
    fn rank(&self) -> f64 {
        self.f_magnitude.min(self.g_magnitude)
    }
}

/// Endpoint amplitude of one branch as a function of the time offset,
/// evaluated through the eigenbasis row of the endpoint site.
struct BranchAmplitude {
    weights: Vec<Complex64>,
    eigenvalues: Vec<f64>,
}

impl BranchAmplitude {
    fn new(h: &SectorHamiltonian, start: &DVector<Complex64>) -> Self {
        // Weights w_k = V[N−1,k] · (Vᵀ start)_k, so amp(τ) = Σ w_k e^{−iλ_k τ}.
        let n = h.n();
        let (values, vectors) = h.eigen_pairs();
        let mut weights = Vec::with_capacity(n);
        let mut eigenvalues = Vec::with_capacity(n);
        for k in 0..n {
            let mut proj = Complex64::new(0.0, 0.0);
            for i in 0..n {
                proj += vectors[(i, k)] * start[i];
            }
            weights.push(vectors[(n - 1, k)] * proj);
            eigenvalues.push(values[k]);
        }
        BranchAmplitude {
            weights,
            eigenvalues,
        }
    }

    fn at(&self, tau: f64) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.eigenvalues)
            .map(|(w, &l)| w * Complex64::from_polar(1.0, -l * tau))
            .sum()
    }
}

/// Finds offsets `τ ∈ (0, window_len]` where the two branch endpoint
/// magnitudes cross, by grid scan plus bisection on `|f| − |g|`.
///
/// Grid points where the magnitudes already agree to 1e−12 (identical rails)
/// are free decode times; those are sharpened by a golden-section climb of
/// `min(|f|, |g|)` inside their grid cell so the protocol can hit amplitude
/// peaks to full precision.
fn crossing_offsets(
    f_amp: &BranchAmplitude,
    g_amp: &BranchAmplitude,
    window_len: f64,
    grid: usize,
) -> Vec<(f64, Complex64, Complex64)> {
    let step = window_len / grid as f64;
    let diff = |tau: f64| f_amp.at(tau).norm() - g_amp.at(tau).norm();
    let rank = |tau: f64| f_amp.at(tau).norm().min(g_amp.at(tau).norm());
    let mut out = Vec::new();
    let mut push = |tau: f64| {
        let f = f_amp.at(tau);
        let g = g_amp.at(tau);
        out.push((tau, f, g));
    };
    let refine_degenerate = |tau: f64| -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut lo = (tau - step).max(0.5 * step);
        let mut hi = (tau + step).min(window_len);
        let mut c = hi - INV_PHI * (hi - lo);
        let mut d = lo + INV_PHI * (hi - lo);
        let mut fc = rank(c);
        let mut fd = rank(d);
        while hi - lo > 1e-10 {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - INV_PHI * (hi - lo);
                fc = rank(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + INV_PHI * (hi - lo);
                fd = rank(d);
            }
        }
        let best = 0.5 * (lo + hi);
        // Keep the refined point only if it is still a magnitude crossing.
        if diff(best).abs() < 1e-9 {
            best
        } else {
            tau
        }
    };
    let mut prev_tau = step;
    let mut prev = diff(prev_tau);
    if prev.abs() < 1e-12 {
        push(refine_degenerate(prev_tau));
    }
    for i in 2..=grid {
        let tau = step * i as f64;
        let cur = diff(tau);
        if cur.abs() < 1e-12 {
            push(refine_degenerate(tau));
        } else if prev.abs() >= 1e-12 && (prev < 0.0) != (cur < 0.0) {
            // Bisect the bracketed sign change down to 1e−12 in τ.
            let (mut lo, mut hi) = (prev_tau, tau);
            let mut flo = prev;
            for _ in 0..60 {
                if hi - lo < 1e-12 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let fmid = diff(mid);
                if fmid.abs() < 1e-15 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (flo < 0.0) == (fmid < 0.0) {
                    lo = mid;
                    flo = fmid;
                } else {
                    hi = mid;
                }
            }
            push(0.5 * (lo + hi));
        }
        prev = cur;
        prev_tau = tau;
    }
    out
}

fn rank_decode_times(mut times: Vec<DecodeTime>) -> Vec<DecodeTime> {
    times.sort_by(|a, b| {
        b.rank()
            .partial_cmp(&a.rank())
            .unwrap()
            .then(a.t.partial_cmp(&b.t).unwrap())
    });
    times
}

/// Decode times of the pristine system (both branches starting from site 1
/// at `t = 0`) inside `window`, ranked by `min(|f_N|, |g_N|)` descending.
pub fn find_decode_times(
    sys: &DualRailSystem,
    window: (f64, f64),
    grid: usize,
) -> Vec<DecodeTime> {
    let (lo, hi) = window;
    if !(lo < hi) || grid < 2 {
        return Vec::new();
    }
    // Shift the start vectors to `lo` so the scan covers (lo, hi] as offsets.
    let e1 = basis_vector(sys.n, 0);
    let f_amp = BranchAmplitude::new(&sys.h1, &evolve_vector(&sys.h1, &e1, lo));
    let g_amp = BranchAmplitude::new(&sys.h2, &evolve_vector(&sys.h2, &e1, lo));
    let times = crossing_offsets(&f_amp, &g_amp, hi - lo, grid)
        .into_iter()
        .map(|(tau, f, g)| DecodeTime {
            t: lo + tau,
            f_magnitude: f.norm(),
            g_magnitude: g.norm(),
            phase: (g / f).arg(),
        })
        .collect();
    rank_decode_times(times)
}

fn basis_vector(n: usize, k: usize) -> DVector<Complex64> {
    let mut v = DVector::<Complex64>::zeros(n);
    v[k] = Complex64::new(1.0, 0.0);
    v
}

fn evolve_vector(
    h: &SectorHamiltonian,
    v: &DVector<Complex64>,
    t: f64,
) -> DVector<Complex64> {
    let state = crate::sector::SectorState::new(v.clone()).expect("branch norm ≤ 1");
    h.evolve(&state, t).expect("dimensions match").amplitudes().clone()
}

/// The joint dual-rail state: input amplitudes plus the two branch vectors,
/// kept unnormalized so their norms carry the failure history.
#[derive(Debug, Clone)]
pub struct DualRailState {
    pub alpha: Complex64,
    pub beta: Complex64,
    fvec: DVector<Complex64>,
    gvec: DVector<Complex64>,
    time: f64,
}

impl DualRailState {
    /// Encodes `α|0⟩ + β|1⟩` across the two rails at `t = 0`.
    pub fn encode(n: usize, alpha: Complex64, beta: Complex64) -> Result<Self, DualRailError> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(DualRailError::BadInput(norm));
        }
        Ok(DualRailState {
            alpha,
            beta,
            fvec: basis_vector(n, 0),
            gvec: basis_vector(n, 0),
            time: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn f_branch(&self) -> &DVector<Complex64> {
        &self.fvec
    }

    pub fn g_branch(&self) -> &DVector<Complex64> {
        &self.gvec
    }

    /// Sector weight still in play for this input:
    /// `|α|²‖g‖² + |β|²‖f‖²`.
    pub fn survival(&self) -> f64 {
        self.alpha.norm_sqr() * norm_sqr(&self.gvec) + self.beta.norm_sqr() * norm_sqr(&self.fvec)
    }
}

fn norm_sqr(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Everything a single measurement attempt produces.
#[derive(Debug, Clone)]
pub struct MeasureOutcome {
    /// Success probability for the state's own `(α, β)`.
    pub p_fixed: f64,
    /// Worst case over input qubits: `min(|f_N|², |g_N|²)`.
    pub p_worst: f64,
    /// Uniform Bloch-sphere average: `(|f_N|² + |g_N|²)/2`.
    pub p_average: f64,
    /// `arg(g_N / f_N)`, the known phase Bob corrects on success.
    pub phase: f64,
    /// Decoded qubit conditioned on success, before phase correction.
    pub decoded: (Complex64, Complex64),
    /// State conditioned on failure: endpoint amplitudes projected out.
    pub posterior: DualRailState,
}

/// Evolves the state to `t`, measures the endpoint pair, and reports both
/// outcomes. Failure zeroes the endpoint amplitude of each branch; the lost
/// norm is exactly the success probability.
pub fn measure_attempt(
    state: &DualRailState,
    sys: &DualRailSystem,
    t: f64,
) -> Result<MeasureOutcome, DualRailError> {
    if t < state.time {
        return Err(DualRailError::TimeOrder {
            t,
            previous: state.time,
        });
    }
    let dt = t - state.time;
    let fvec = evolve_vector(&sys.h1, &state.fvec, dt);
    let gvec = evolve_vector(&sys.h2, &state.gvec, dt);
    let last = sys.n - 1;
    let f_n = fvec[last];
    let g_n = gvec[last];

    let p_fixed = state.alpha.norm_sqr() * g_n.norm_sqr() + state.beta.norm_sqr() * f_n.norm_sqr();
    let p_worst = f_n.norm_sqr().min(g_n.norm_sqr());
    let p_average = 0.5 * (f_n.norm_sqr() + g_n.norm_sqr());
    let phase = if f_n.norm() > 0.0 && g_n.norm() > 0.0 {
        (g_n / f_n).arg()
    } else {
        0.0
    };
    let root = p_fixed.sqrt();
    let decoded = if root > 0.0 {
        (state.alpha * g_n / root, state.beta * f_n / root)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    };

    let mut f_post = fvec;
    let mut g_post = gvec;
    f_post[last] = Complex64::new(0.0, 0.0);
    g_post[last] = Complex64::new(0.0, 0.0);

    Ok(MeasureOutcome {
        p_fixed,
        p_worst,
        p_average,
        phase,
        decoded,
        posterior: DualRailState {
            alpha: state.alpha,
            beta: state.beta,
            fvec: f_post,
            gvec: g_post,
            time: t,
        },
    })
}

/// One row of the attempt log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttemptRecord {
    pub time: f64,
    /// Worst-case success probability of this attempt (unconditional).
    pub p_success: f64,
    /// Worst-case cumulative success after this attempt.
    pub cumulative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolOutcome {
    /// The cumulative target was reached at `time` after `attempts` attempts.
    Success { time: f64, attempts: usize },
    /// The attempt budget ran out first.
    Exhausted,
}

/// Full record of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct AttemptLog {
    pub attempts: Vec<AttemptRecord>,
    pub outcome: ProtocolOutcome,
    /// Largest norm-bookkeeping violation seen across attempts.
    pub max_bookkeeping_error: f64,
}

impl AttemptLog {
    pub fn to_document(&self, sys: &DualRailSystem, target: f64, max_attempts: usize) -> serde_json::Value {
        serde_json::json!({
            "n": sys.n(),
            "builder": sys.kind().name(),
            "epsilon": sys.epsilon(),
            "seed": sys.seed(),
            "target": target,
            "max_attempts": max_attempts,
            "attempts": self.attempts.iter().map(|a| serde_json::json!({
                "t": a.time,
                "p": a.p_success,
                "cumulative": a.cumulative,
            })).collect::<Vec<_>>(),
            "outcome": match self.outcome {
                ProtocolOutcome::Success { time, attempts } => serde_json::json!({
                    "success": { "time": time, "attempts": attempts }
                }),
                ProtocolOutcome::Exhausted => serde_json::json!("exhausted"),
            },
            "max_bookkeeping_error": self.max_bookkeeping_error,
        })
    }
}

/// Search parameters for the decode-time hunt between attempts.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    pub window_len: f64,
    pub grid: usize,
}

impl SearchParams {
    pub fn for_system(sys: &DualRailSystem) -> Self {
        SearchParams {
            window_len: WINDOW_PER_SITE * sys.n() as f64,
            grid: DEFAULT_GRID,
        }
    }
}

/// Runs the repeated-measurement protocol until the worst-case cumulative
/// success reaches `target` or the attempt budget is spent.
///
/// Each round searches `(t_prev, t_prev + window]` for magnitude crossings of
/// the *current* (failure-conditioned) endpoint amplitudes, measures at the
/// best-ranked crossing, and projects on failure. The window doubles when no
/// crossing is found.
pub fn run_protocol(
    sys: &DualRailSystem,
    max_attempts: usize,
    target: f64,
) -> Result<AttemptLog, DualRailError> {
    run_protocol_with(sys, max_attempts, target, SearchParams::for_system(sys))
}

pub fn run_protocol_with(
    sys: &DualRailSystem,
    max_attempts: usize,
    target: f64,
    search: SearchParams,
) -> Result<AttemptLog, DualRailError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(DualRailError::BadTarget(target));
    }
    if max_attempts < 1 {
        return Err(DualRailError::NoAttempts);
    }
    let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut state = DualRailState::encode(sys.n(), inv, inv)?;
    let mut log = AttemptLog {
        attempts: Vec::new(),
        outcome: ProtocolOutcome::Exhausted,
        max_bookkeeping_error: 0.0,
    };
    'attempts: for _ in 0..max_attempts {
        // Crossings of the conditioned amplitudes, not the pristine ones.
        let mut window = search.window_len;
        let best = loop {
            let f_amp = BranchAmplitude::new(&sys.h1, &state.fvec);
            let g_amp = BranchAmplitude::new(&sys.h2, &state.gvec);
            let offsets = crossing_offsets(&f_amp, &g_amp, window, search.grid);
            let ranked = rank_decode_times(
                offsets
                    .into_iter()
                    .map(|(tau, f, g)| DecodeTime {
                        t: state.time + tau,
                        f_magnitude: f.norm(),
                        g_magnitude: g.norm(),
                        phase: (g / f).arg(),
                    })
                    .collect(),
            );
            if let Some(&first) = ranked.first() {
                break first;
            }
            window *= 2.0;
            if window > 16.0 * search.window_len {
                break 'attempts;
            }
        };
        let pre_f = norm_sqr(&state.fvec);
        let pre_g = norm_sqr(&state.gvec);
        let out = measure_attempt(&state, sys, best.t)?;
        let post_f = norm_sqr(&out.posterior.fvec);
        let post_g = norm_sqr(&out.posterior.gvec);
        let err_f = (pre_f - post_f - best.f_magnitude.powi(2)).abs();
        let err_g = (pre_g - post_g - best.g_magnitude.powi(2)).abs();
        log.max_bookkeeping_error = log.max_bookkeeping_error.max(err_f).max(err_g);

        let cumulative = 1.0 - post_f.max(post_g);
        log.attempts.push(AttemptRecord {
            time: best.t,
            p_success: out.p_worst,
            cumulative,
        });
        state = out.posterior;
        if cumulative >= target {
            log.outcome = ProtocolOutcome::Success {
                time: best.t,
                attempts: log.attempts.len(),
            };
            break;
        }
    }
    Ok(log)
}

/// Outcome of one seed inside an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleRun {
    pub seed: u64,
    pub attempts: usize,
    pub reached: bool,
    pub final_cumulative: f64,
}

/// Attempt-count statistics across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub n: usize,
    pub kind: RailKind,
    pub epsilon: f64,
    pub target: f64,
    pub max_attempts: usize,
    pub runs: Vec<EnsembleRun>,
}

impl EnsembleSummary {
    pub fn attempt_counts(&self) -> Vec<usize> {
        self.runs.iter().map(|r| r.attempts).collect()
    }

    pub fn all_reached(&self) -> bool {
        self.runs.iter().all(|r| r.reached)
    }

    /// Attempt-count quantile by nearest-rank on the sorted counts.
    pub fn quantile(&self, q: f64) -> usize {
        let mut counts = self.attempt_counts();
        counts.sort_unstable();
        if counts.is_empty() {
            return 0;
        }
        let idx = ((counts.len() - 1) as f64 * q).round() as usize;
        counts[idx]
    }

    pub fn to_document(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "builder": self.kind.name(),
            "epsilon": self.epsilon,
            "target": self.target,
            "max_attempts": self.max_attempts,
            "runs": self.runs.iter().map(|r| serde_json::json!({
                "seed": r.seed,
                "attempts": r.attempts,
                "reached": r.reached,
                "cumulative": r.final_cumulative,
            })).collect::<Vec<_>>(),
            "quantiles": {
                "p05": self.quantile(0.05),
                "p25": self.quantile(0.25),
                "median": self.quantile(0.50),
                "p75": self.quantile(0.75),
                "p95": self.quantile(0.95),
            },
            "all_reached": self.all_reached(),
        })
    }
}

/// Runs the protocol over many seeds in parallel; results keep seed order.
pub fn run_ensemble(
    kind: RailKind,
    n: usize,
    epsilon: f64,
    seeds: &[u64],
    target: f64,
    max_attempts: usize,
) -> Result<EnsembleSummary, DualRailError> {
    let runs: Result<Vec<EnsembleRun>, DualRailError> = seeds
        .par_iter()
        .map(|&seed| {
            let sys = build_kind(kind, n, epsilon, seed)?;
            let log = run_protocol(&sys, max_attempts, target)?;
            let final_cumulative = log.attempts.last().map(|a| a.cumulative).unwrap_or(0.0);
            Ok(EnsembleRun {
                seed,
                attempts: log.attempts.len(),
                reached: matches!(log.outcome, ProtocolOutcome::Success { .. }),
                final_cumulative,
            })
        })
        .collect();
    Ok(EnsembleSummary {
        n,
        kind,
        epsilon,
        target,
        max_attempts,
        runs: runs?,
    })
}
