//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinroute::dualrail::{
    build_dual_rail, build_pst_dual_rail, run_ensemble, run_protocol, ProtocolOutcome, RailKind,
};
use spinroute::hexchip::{HexChip, VertexId, HADAMARD_SIGNS, T0, T1};
use spinroute::network::{
    build_diamond_chain, build_pst_chain, build_uniform_chain, SpinNetwork,
};
use spinroute::oracle;
use spinroute::pst;
use spinroute::sector::{
    average_fidelity, peak_search, transfer_series, transfer_series_csv, SectorHamiltonian,
    SectorState,
};
use spinroute::verify;
use spinroute::SiteId;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

fn report(criterion: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} - {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_two_chain_exactness() {
    // Warm the allocator and the eigen path outside the timed region.
    let _ = SectorHamiltonian::new(&build_uniform_chain(2, 0.0, 0.0).unwrap()).unwrap();

    let start = Instant::now();
    let net = build_uniform_chain(2, 0.0, 0.0).unwrap();
    let h = SectorHamiltonian::new(&net).unwrap();
    let psi = h
        .evolve(&SectorState::basis(2, SiteId(0)).unwrap(), FRAC_PI_2)
        .unwrap();
    let elapsed = start.elapsed();

    let err = (psi.amplitude(0)).norm().max(
        (psi.amplitude(1) - Complex64::new(0.0, -1.0)).norm(),
    );
    let ok = err < 1e-12 && elapsed.as_secs_f64() < 1e-3;
    report(
        "01 (2-chain exactness)",
        ok,
        &format!("elementwise error {err:.2e}, runtime {elapsed:?}"),
    );
}

#[test]
fn criterion_02_three_chain_exactness() {
    let net = build_uniform_chain(3, 0.0, 0.0).unwrap();
    let h = SectorHamiltonian::new(&net).unwrap();

    let u = h.propagator(PI / SQRT_2);
    let expect = [
        [0.0f64, 0.0, -1.0],
        [0.0, -1.0, 0.0],
        [-1.0, 0.0, 0.0],
    ];
    let mut mirror_err = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            mirror_err = mirror_err.max((u[(i, j)] - Complex64::new(expect[i][j], 0.0)).norm());
        }
    }

    // Independent closed form from H³ = 2H:
    // U(T) = I − (i/√2)·sin(√2 T)·H + ((cos(√2 T) − 1)/2)·H².
    let m = h.matrix();
    let m2 = m * m;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut closed_err = 0.0f64;
    for _ in 0..100 {
        let t = rng.random_range(0.0..50.0f64);
        let u = h.propagator(t);
        for i in 0..3 {
            for j in 0..3 {
                let mut c = Complex64::new(0.0, 0.0);
                if i == j {
                    c += 1.0;
                }
                c += Complex64::new(0.0, -(SQRT_2 * t).sin() / SQRT_2) * m[(i, j)];
                c += Complex64::new(((SQRT_2 * t).cos() - 1.0) / 2.0, 0.0) * m2[(i, j)];
                closed_err = closed_err.max((u[(i, j)] - c).norm());
            }
        }
    }
    let ok = mirror_err < 1e-12 && closed_err < 1e-10;
    report(
        "02 (3-chain exactness)",
        ok,
        &format!("mirror-time error {mirror_err:.2e}, closed-form error {closed_err:.2e} over 100 times"),
    );
}

#[test]
fn criterion_03_engineered_chain_pst() {
    let start = Instant::now();
    let mut worst_deficit = 0.0f64;
    let mut all_ok = true;
    for n in 2..=30 {
        let chain = build_pst_chain(n).unwrap();
        let rep = pst::verify_pst(&chain, PI).unwrap();
        worst_deficit = worst_deficit.max(1.0 - rep.magnitude);
        all_ok &= rep.magnitude >= 1.0 - 1e-9 && rep.mirror_ok && rep.eigenphase_ok;
    }
    let elapsed = start.elapsed();
    let ok = all_ok && elapsed.as_secs_f64() < 1.0;
    report(
        "03 (engineered-chain PST)",
        ok,
        &format!(
            "n = 2..=30 at t = π: max transfer deficit {worst_deficit:.2e}, mirror and eigenphase hold, runtime {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_04_bose_uniform_chain_bound() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut all_ok = true;
    for n in [10usize, 20, 40, 80] {
        let net = build_uniform_chain(n, 1.0, 1.0).unwrap();
        let h = SectorHamiltonian::new(&net).unwrap();
        let peak = peak_search(&h, SiteId(0), SiteId(n - 1), (0.0, 4000.0), 400_000).unwrap();
        let f = average_fidelity(peak.amplitude);
        all_ok &= f.phase_corrected > 2.0 / 3.0;
        details.push(format!(
            "N={n}: F̄*={:.6} at t={:.2}",
            f.phase_corrected, peak.time
        ));
    }
    let elapsed = start.elapsed();
    let ok = all_ok && elapsed.as_secs_f64() < 60.0;
    report(
        "04 (Bose uniform-chain bound)",
        ok,
        &format!("{}; runtime {elapsed:?}", details.join("; ")),
    );
}

#[test]
fn criterion_05_diamond_chain_protocol() {
    let mut worst_amp = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut worst_coupling = 0.0f64;
    for cells in 1..=10 {
        let amp = pst::run_diamond_protocol(cells).unwrap();
        worst_amp = worst_amp.max(1.0 - amp.norm());
        let dec = pst::diamond_decompose(&build_diamond_chain(cells).unwrap()).unwrap();
        worst_res = worst_res.max(dec.off_block_residual);
        worst_coupling = worst_coupling.max(pst::block_coupling_deviation(&dec));
    }
    let ok = worst_amp < 1e-9 && worst_res < 1e-10 && worst_coupling < 1e-10;
    report(
        "05 (diamond-chain protocol)",
        ok,
        &format!(
            "cells 1..=10: end-site deficit {worst_amp:.2e}, off-block residual {worst_res:.2e}, √2-coupling deviation {worst_coupling:.2e}"
        ),
    );
}

#[test]
fn criterion_06_hadamard_switch_identities() {
    // Pulse table with exact +1 coefficients, on the abstract signs and on a
    // built chip.
    let table = verify::pulse_table_check(&HADAMARD_SIGNS);

    let chip = HexChip::build(2, 4, 4, &[VertexId::new(0, 1, 1)], &[]).unwrap();
    let mut gram_err = 0.0f64;
    for v in chip.vertices() {
        let xi = chip.xi_basis(v).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 1.0 } else { 0.0 };
                gram_err = gram_err.max((xi[a].dot(&xi[b]) - expect).abs());
            }
        }
    }
    let check = chip.block_structure_check();
    let ok = table.passed
        && gram_err < 1e-12
        && check.off_block_residual < 1e-10
        && check.coupling_deviation < 1e-10;
    report(
        "06 (Hadamard-switch identities)",
        ok,
        &format!(
            "pulse table exact; ξ-Gram deviation {gram_err:.2e}; 2-layer 4×4 block residual {:.2e} with coupling deviation {:.2e} over {} 2-blocks and {} 3-blocks",
            check.off_block_residual, check.coupling_deviation, check.two_blocks, check.three_blocks
        ),
    );
}

#[test]
fn criterion_07_routing_law() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut simulated = 0usize;
    let mut worst_mag_deficit = 0.0f64;
    let mut worst_duration_err = 0.0f64;
    let mut with_defects = 0usize;

    while simulated < 50 {
        let layers = rng.random_range(1..=2u32);
        let rows = rng.random_range(2..=4u32);
        let cols = rng.random_range(2..=4u32);
        let mut junctions = Vec::new();
        if layers == 2 {
            let q = rng.random_range(0..cols as i32);
            let r = rng.random_range(0..rows as i32);
            junctions.push(VertexId::new(0, q, r));
        }
        let mut defects = Vec::new();
        for _ in 0..rng.random_range(0..3usize) {
            defects.push(VertexId::new(
                rng.random_range(0..layers),
                rng.random_range(0..cols as i32),
                rng.random_range(0..rows as i32),
            ));
        }
        let chip = match HexChip::build(layers, rows, cols, &junctions, &defects) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let heads: Vec<VertexId> = chip
            .vertices()
            .filter(|&v| chip.head_site(v).is_some() && !chip.defects().contains(&v))
            .collect();
        if heads.len() < 2 {
            continue;
        }
        let a = heads[rng.random_range(0..heads.len())];
        let b = heads[rng.random_range(0..heads.len())];
        if a == b {
            continue;
        }
        let route = match chip.plan_route(a, b) {
            Ok(r) => r,
            Err(_) => continue, // defects disconnected this pair
        };
        assert!(route
            .hops
            .iter()
            .all(|h| !chip.defects().contains(&h.to) && !chip.defects().contains(&h.from)));
        let schedule = chip.compile(&route).unwrap();
        let outcome = chip.simulate_route(&route).unwrap();
        let n = route.hops.len() as f64;
        let formula = 2.0 * T0 + n * T1;
        assert_eq!(outcome.duration, formula);
        worst_duration_err = worst_duration_err.max((schedule.total_duration() - formula).abs());
        worst_mag_deficit = worst_mag_deficit.max(1.0 - outcome.magnitude);
        if !defects.is_empty() {
            with_defects += 1;
        }
        simulated += 1;
    }

    // A defect on the unique shortest path must produce a valid detour.
    let clean = HexChip::build(1, 5, 5, &[], &[]).unwrap();
    let (from, to) = (VertexId::new(0, 0, 2), VertexId::new(0, 4, 2));
    let direct = clean.plan_route(from, to).unwrap();
    let blocker = direct.hops[direct.hops.len() / 2].to;
    let detoured = HexChip::build(1, 5, 5, &[], &[blocker]).unwrap();
    let detour = detoured.plan_route(from, to).unwrap();
    let detour_ok = detour.hops.len() > direct.hops.len()
        && detoured.simulate_route(&detour).unwrap().magnitude >= 1.0 - 1e-8;

    // A full cut must report unroutable.
    let center = VertexId::new(0, 1, 1);
    let cut = HexChip::build(1, 3, 3, &[], &[center]).unwrap();
    let unroutable = matches!(
        cut.plan_route(VertexId::new(0, 0, 0), VertexId::new(0, 2, 2)),
        Err(spinroute::hexchip::HexError::Unroutable { .. })
    );

    let elapsed = start.elapsed();
    let ok = worst_mag_deficit < 1e-8
        && worst_duration_err < 1e-12
        && detour_ok
        && unroutable
        && elapsed.as_secs_f64() < 30.0;
    report(
        "07 (routing law)",
        ok,
        &format!(
            "50 random routes ({with_defects} on defective chips): magnitude deficit {worst_mag_deficit:.2e}, schedule-vs-2t₀+Nt₁ deviation {worst_duration_err:.2e}; detour and unroutable cases behave; runtime {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_08_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let mut networks: Vec<SpinNetwork> = Vec::new();
    networks.push(build_diamond_chain(3).unwrap()); // 10 sites
    networks.push(verify::single_switch_cell()); // 8 sites
    networks.push(build_uniform_chain(7, 1.0, 0.4).unwrap());
    networks.push(build_pst_chain(9).unwrap());
    while networks.len() < 20 {
        let n = rng.random_range(4..=10usize);
        let mut net = SpinNetwork::new(n);
        for k in 1..n {
            let parent = rng.random_range(0..k);
            let mut w = rng.random_range(-1.5..1.5f64);
            if w == 0.0 {
                w = 1.0;
            }
            net.add_coupling(parent, k, w).unwrap();
        }
        for _ in 0..rng.random_range(0..n) {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b && net.strength(a, b).is_none() {
                net.add_coupling(a, b, rng.random_range(-1.0..1.0f64))
                    .unwrap();
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
        networks.push(net);
    }

    let mut worst_equiv = 0.0f64;
    let mut worst_comm = 0.0f64;
    for net in &networks {
        let n = net.n_sites();
        worst_comm = worst_comm.max(oracle::check_symmetry(net).unwrap());
        let a = SiteId(rng.random_range(0..n));
        let b = SiteId(rng.random_range(0..n));
        let t = rng.random_range(0.0..10.0f64);
        worst_equiv = worst_equiv.max(oracle::sector_equivalence(net, a, b, t).unwrap());
    }
    let elapsed = start.elapsed();
    let ok = worst_equiv < 1e-9 && worst_comm < 1e-12 && elapsed.as_secs_f64() < 120.0;
    report(
        "08 (oracle equivalence)",
        ok,
        &format!(
            "20 networks (diamond + switch cell + 18 random, N ≤ 10): sector discrepancy {worst_equiv:.2e}, ‖[H,Z_tot]‖ {worst_comm:.2e}, runtime {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_09_dual_rail_protocol() {
    // Clean PST pair: certainty on the first attempt.
    let sys = build_pst_dual_rail(10, 0.0, 0).unwrap();
    let log = run_protocol(&sys, 5, 0.99).unwrap();
    let first = log.attempts[0];
    let pst_ok = log.attempts.len() == 1
        && (first.p_success - 1.0).abs() < 1e-10
        && matches!(log.outcome, ProtocolOutcome::Success { attempts: 1, .. });

    // Disordered ensemble: 200 seeds at n = 10, ε = 0.05.
    let seeds: Vec<u64> = (0..200).collect();
    let summary = run_ensemble(RailKind::Uniform, 10, 0.05, &seeds, 0.99, 500).unwrap();
    let all_reached = summary.all_reached();
    let median = summary.quantile(0.5);
    let p05 = summary.quantile(0.05);
    let p95 = summary.quantile(0.95);
    let median_ok = (5..=500).contains(&median);

    // Norm bookkeeping per run.
    let mut worst_bookkeeping = 0.0f64;
    for &seed in &[0u64, 17, 99, 180] {
        let sys = build_dual_rail(10, 0.05, seed).unwrap();
        let log = run_protocol(&sys, 500, 0.99).unwrap();
        worst_bookkeeping = worst_bookkeeping.max(log.max_bookkeeping_error);
    }

    let ok = pst_ok && all_reached && median_ok && worst_bookkeeping < 1e-9;
    report(
        "09 (dual-rail protocol)",
        ok,
        &format!(
            "PST pair: 1 attempt with p − 1 = {:.2e}; ensemble attempts p05/median/p95 = {p05}/{median}/{p95}, all 200 seeds reached 0.99 within 500; bookkeeping error {worst_bookkeeping:.2e}",
            first.p_success - 1.0
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    // Criterion 4 artifact: transfer series and peak document.
    let doc4 = || {
        let net = build_uniform_chain(20, 1.0, 1.0).unwrap();
        let h = SectorHamiltonian::new(&net).unwrap();
        let series = transfer_series(&h, SiteId(0), SiteId(19), 400.0, 4000).unwrap();
        let csv = transfer_series_csv(&series);
        let peak = peak_search(&h, SiteId(0), SiteId(19), (0.0, 4000.0), 40_000).unwrap();
        format!("{csv}|{},{},{}", peak.time, peak.amplitude.re, peak.amplitude.im)
    };
    let four_stable = doc4() == doc4();

    // Criterion 7 artifact: route, schedule, and outcome documents.
    let doc7 = || {
        let chip = HexChip::build(2, 4, 4, &[VertexId::new(0, 2, 1)], &[VertexId::new(0, 1, 1)])
            .unwrap();
        let route = chip
            .plan_route(VertexId::new(0, 0, 0), VertexId::new(1, 3, 3))
            .unwrap();
        let schedule = chip.compile(&route).unwrap();
        let outcome = chip.simulate_route(&route).unwrap();
        serde_json::to_string(&serde_json::json!({
            "route": route.to_document(),
            "schedule": schedule.to_document(),
            "outcome": outcome.to_document(),
        }))
        .unwrap()
    };
    let seven_stable = doc7() == doc7();

    // Criterion 9 artifact: run document and a 40-seed ensemble summary.
    let doc9 = || {
        let sys = build_dual_rail(10, 0.05, 42).unwrap();
        let log = run_protocol(&sys, 500, 0.99).unwrap();
        let run = serde_json::to_string(&log.to_document(&sys, 0.99, 500)).unwrap();
        let seeds: Vec<u64> = (0..40).collect();
        let ens = run_ensemble(RailKind::Uniform, 10, 0.05, &seeds, 0.99, 500).unwrap();
        format!("{run}|{}", serde_json::to_string(&ens.to_document()).unwrap())
    };
    let nine_stable = doc9() == doc9();

    let ok = four_stable && seven_stable && nine_stable;
    report(
        "10 (determinism)",
        ok,
        &format!(
            "byte-identical documents across repeated runs: transfer {four_stable}, routing {seven_stable}, dual-rail {nine_stable}"
        ),
    );
}

/// The coupling-sign matrix is a genuine Hadamard matrix: J·Jᵀ = 4·I.
#[test]
fn hadamard_sign_matrix_is_orthogonal() {
    let j = DMatrix::<f64>::from_fn(4, 4, |i, k| HADAMARD_SIGNS[i][k]);
    let jjt = &j * j.transpose();
    for i in 0..4 {
        for k in 0..4 {
            let expect = if i == k { 4.0 } else { 0.0 };
            assert_eq!(jjt[(i, k)], expect);
        }
    }
}
