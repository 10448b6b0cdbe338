//! Named battery of cross-checks: oracle equivalence, symmetry, block
//! structure, the pulse table, and transfer identities, wired together so a
//! single call (or the `verify` CLI command) can vouch for a build.
//!
//! Checks are deterministic (fixed seeds) and sized to finish in seconds.

use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hexchip::{control_pulse, HexChip, VertexId, HADAMARD_SIGNS, T0, T1};
use crate::network::{build_diamond_chain, build_pst_chain, build_uniform_chain, SiteId, SpinNetwork};
use crate::oracle;
use crate::pst;
use crate::sector::SectorHamiltonian;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("oracle cap is {max}; requested {got} sites", max = oracle::MAX_FULL_SITES)]
    CapExceeded { got: usize },
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            passed: true,
            detail,
        }
    }

    fn gate(name: &'static str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name,
            passed,
            detail,
        }
    }
}

/// Verifies that every plane-pair pulse maps ξ states exactly per the control
/// table, for an arbitrary sign matrix. Exposed with the matrix as an
/// argument so tests can inject a corrupted matrix and watch this fail.
pub fn pulse_table_check(signs: &[[f64; 4]; 4]) -> CheckOutcome {
    let xi = |beta: usize| -> [f64; 4] { std::array::from_fn(|alpha| 0.5 * signs[alpha][beta]) };
    for from in 0..4u8 {
        for to in 0..4u8 {
            if from == to {
                continue;
            }
            let (i, j) = match control_pulse(from, to) {
                Ok(pair) => pair,
                Err(e) => {
                    return CheckOutcome::gate("pulse-table", false, e.to_string());
                }
            };
            let mut state = xi(from as usize);
            for plane in [i as usize, j as usize] {
                state[plane] = -state[plane];
            }
            if state != xi(to as usize) {
                return CheckOutcome::gate(
                    "pulse-table",
                    false,
                    format!("Z{i}Z{j} does not map ξ{from} onto ξ{to} with coefficient +1"),
                );
            }
        }
    }
    CheckOutcome::pass(
        "pulse-table",
        "all 6 plane pairs swap their ξ states exactly".into(),
    )
}

fn random_network(rng: &mut ChaCha8Rng, max_sites: usize) -> SpinNetwork {
    let n = rng.random_range(4..=max_sites);
    let mut net = SpinNetwork::new(n);
    // Random spanning tree plus a few extra bonds keeps it connected.
    for k in 1..n {
        let parent = rng.random_range(0..k);
        let strength = rng.random_range(-1.5..1.5f64);
        net.add_coupling(parent, k, if strength == 0.0 { 1.0 } else { strength })
            .unwrap();
    }
    for _ in 0..rng.random_range(0..n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && net.strength(a, b).is_none() {
            net.add_coupling(a, b, rng.random_range(-1.0..1.0f64)).unwrap();
        }
    }
    if rng.random_range(0..2) == 1 {
        net.set_anisotropy(rng.random_range(-1.0..1.0f64));
    }
    if rng.random_range(0..2) == 1 {
        for site in 0..n {
            net.set_field(site, rng.random_range(-0.5..0.5f64)).unwrap();
        }
    }
    net
}

/// A single isolated switch cell: 4 controls and all 4 ports as bare sites.
pub fn single_switch_cell() -> SpinNetwork {
    let mut net = SpinNetwork::new(8);
    for alpha in 0..4 {
        for beta in 0..4 {
            net.add_coupling(alpha, 4 + beta, 0.5 * HADAMARD_SIGNS[alpha][beta])
                .unwrap();
        }
    }
    net
}

/// Runs the full battery. `max_sites` bounds the oracle networks (≤ 14).
pub fn run_battery(max_sites: usize) -> Result<Vec<CheckOutcome>, VerifyError> {
    if max_sites > oracle::MAX_FULL_SITES {
        return Err(VerifyError::CapExceeded { got: max_sites });
    }
    let max_sites = max_sites.max(4);
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // Sector propagation is unitary and matches the 3-chain closed form.
    {
        let net = build_uniform_chain(3, 0.0, 0.0).unwrap();
        let h = SectorHamiltonian::new(&net).unwrap();
        let mut worst = 0.0f64;
        for _ in 0..25 {
            let t = rng.random_range(0.0..50.0f64);
            let u = h.propagator(t);
            let m = h.matrix();
            for i in 0..3 {
                for j in 0..3 {
                    let mut closed = Complex64::new(0.0, 0.0);
                    if i == j {
                        closed += 1.0;
                    }
                    let s2 = 2.0f64.sqrt();
                    closed += Complex64::new(0.0, -(s2 * t).sin() / s2) * m[(i, j)];
                    let h2 = (m * m)[(i, j)];
                    closed += Complex64::new(((s2 * t).cos() - 1.0) / 2.0, 0.0) * h2;
                    worst = worst.max((u[(i, j)] - closed).norm());
                }
            }
            let udag_u = u.adjoint() * &u;
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((udag_u[(i, j)] - Complex64::new(expect, 0.0)).norm());
                }
            }
        }
        out.push(CheckOutcome::gate(
            "three-chain-closed-form",
            worst < 1e-10,
            format!("max deviation {worst:.3e}"),
        ));
    }

    // Full-space symmetry and sector equivalence on random networks.
    {
        let mut worst_comm = 0.0f64;
        let mut worst_equiv = 0.0f64;
        for _ in 0..6 {
            let net = random_network(&mut rng, max_sites);
            let n = net.n_sites();
            worst_comm = worst_comm.max(oracle::check_symmetry(&net).unwrap());
            let a = SiteId(rng.random_range(0..n));
            let b = SiteId(rng.random_range(0..n));
            let t = rng.random_range(0.0..10.0f64);
            worst_equiv = worst_equiv.max(oracle::sector_equivalence(&net, a, b, t).unwrap());
        }
        out.push(CheckOutcome::gate(
            "oracle-symmetry",
            worst_comm < 1e-12,
            format!("max ‖[H, Z_tot]‖ = {worst_comm:.3e}"),
        ));
        out.push(CheckOutcome::gate(
            "oracle-equivalence",
            worst_equiv < 1e-9,
            format!("max sector discrepancy {worst_equiv:.3e}"),
        ));
    }

    // Engineered chains: transfer, mirror, eigenphase at t = π.
    {
        let mut ok = true;
        let mut worst = 0.0f64;
        for n in 2..=12 {
            let report = pst::verify_pst(&build_pst_chain(n).unwrap(), std::f64::consts::PI).unwrap();
            ok &= report.mirror_ok && report.eigenphase_ok;
            worst = worst.max(1.0 - report.magnitude);
        }
        out.push(CheckOutcome::gate(
            "pst-eigenphase",
            ok,
            "mirror and eigenphase conditions for n = 2..=12".into(),
        ));
        out.push(CheckOutcome::gate(
            "pst-transfer",
            worst < 1e-9,
            format!("max transfer deficit {worst:.3e}"),
        ));
    }

    {
        let mut worst = 0.0f64;
        for n in [2, 3, 7] {
            worst = worst.max(pst::jx_correspondence_check(n).unwrap());
        }
        out.push(CheckOutcome::gate(
            "jx-correspondence",
            worst < 1e-12,
            format!("max residual {worst:.3e}"),
        ));
    }

    // Diamond chain: block residual and the pulse protocol.
    {
        let mut worst_res = 0.0f64;
        let mut worst_dev = 0.0f64;
        let mut worst_amp = 0.0f64;
        for cells in 1..=5 {
            let dec = pst::diamond_decompose(&build_diamond_chain(cells).unwrap()).unwrap();
            worst_res = worst_res.max(dec.off_block_residual);
            worst_dev = worst_dev.max(pst::block_coupling_deviation(&dec));
            let amp = pst::run_diamond_protocol(cells).unwrap();
            worst_amp = worst_amp.max(1.0 - amp.norm());
        }
        out.push(CheckOutcome::gate(
            "diamond-blocks",
            worst_res < 1e-10 && worst_dev < 1e-10,
            format!("off-block {worst_res:.3e}, coupling deviation {worst_dev:.3e}"),
        ));
        out.push(CheckOutcome::gate(
            "diamond-transfer",
            worst_amp < 1e-9,
            format!("max end-site deficit {worst_amp:.3e}"),
        ));
    }

    // Hadamard switch identities.
    {
        let chip = HexChip::build(1, 2, 2, &[], &[]).unwrap();
        let xi = chip.xi_basis(VertexId::new(0, 0, 0)).unwrap();
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((xi[a].dot(&xi[b]) - expect).abs());
            }
        }
        out.push(CheckOutcome::gate(
            "xi-gram",
            worst < 1e-12,
            format!("max Gram deviation {worst:.3e}"),
        ));
        out.push(pulse_table_check(&HADAMARD_SIGNS));
    }

    {
        let chip = HexChip::build(2, 3, 3, &[VertexId::new(0, 1, 1)], &[]).unwrap();
        let check = chip.block_structure_check();
        out.push(CheckOutcome::gate(
            "hex-blocks",
            check.off_block_residual < 1e-10 && check.coupling_deviation < 1e-10,
            format!(
                "off-block {:.3e}, coupling deviation {:.3e}",
                check.off_block_residual, check.coupling_deviation
            ),
        ));
        let route = chip
            .plan_route(VertexId::new(0, 0, 0), VertexId::new(1, 2, 2))
            .unwrap();
        let outcome = chip.simulate_route(&route).unwrap();
        let hops = route.hops.len() as f64;
        let duration_ok = (outcome.duration - (2.0 * T0 + hops * T1)).abs() < 1e-12;
        out.push(CheckOutcome::gate(
            "hex-routing",
            outcome.magnitude >= 1.0 - 1e-8 && duration_ok,
            format!(
                "cross-layer magnitude {:.12}, duration {:.12}",
                outcome.magnitude, outcome.duration
            ),
        ));
    }

    // Dual-rail bookkeeping on a disordered pair.
    {
        let sys = crate::dualrail::build_dual_rail(6, 0.05, 5).unwrap();
        let log = crate::dualrail::run_protocol(&sys, 100, 0.95).unwrap();
        let reached = matches!(log.outcome, crate::dualrail::ProtocolOutcome::Success { .. });
        out.push(CheckOutcome::gate(
            "dualrail-bookkeeping",
            reached && log.max_bookkeeping_error < 1e-9,
            format!(
                "max bookkeeping error {:.3e} over {} attempts",
                log.max_bookkeeping_error,
                log.attempts.len()
            ),
        ));
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_on_fresh_build() {
        let outcomes = run_battery(8).unwrap();
        for o in &outcomes {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
        assert!(outcomes.len() >= 10);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            run_battery(16),
            Err(VerifyError::CapExceeded { got: 16 })
        ));
    }

    #[test]
    fn injected_sign_error_is_caught_by_name() {
        let mut bad = HADAMARD_SIGNS;
        bad[2][3] = -bad[2][3];
        let outcome = pulse_table_check(&bad);
        assert_eq!(outcome.name, "pulse-table");
        assert!(!outcome.passed);
    }

    #[test]
    fn switch_cell_has_eight_sites_and_symmetry() {
        let cell = single_switch_cell();
        assert_eq!(cell.n_sites(), 8);
        assert_eq!(cell.couplings().len(), 16);
        assert!(oracle::check_symmetry(&cell).unwrap() < 1e-12);
    }
}
