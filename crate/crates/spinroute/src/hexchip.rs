//! Hexagonal Hadamard-switch lattices in two and three dimensions.
//!
//! Every lattice vertex hosts a switch: four control qubits `v₀..v₃` coupled
//! to up to four port qubits (the read-write head or an interlayer link as
//! port `e₀`, and the three lattice directions `e₁..e₃`) with signs from the
//! 4×4 Hadamard matrix and magnitude ½. In the ξ basis (the four Hadamard
//! combinations of the control qubits) the whole lattice Hamiltonian falls
//! apart into XY chains of length 2 (head ↔ ξ⁰) and 3 (ξ ↔ link ↔ ξ) with
//! unit coupling, so transfers take `t₀ = π/2` and `t₁ = π/√2`.
//!
//! Routing plays the blocks like rails: upload from a head into ξ⁰, turn the
//! ξ state toward the desired direction with a global two-plane Z pulse, ride
//! a 3-chain per hop, and download at the far head. A route of `N` hops costs
//! exactly `2t₀ + N·t₁`.
//!
//! The planar layout uses the brick-wall form of the honeycomb: a vertex at
//! `(q, r)` is on sublattice A when `q + r` is even and B otherwise, and
//! every link carries the same direction label on both of its endpoints.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{NetworkError, SiteId, SiteSelector, SpinNetwork};
use crate::sector::{
    run_schedule_with, PulseEvent, Schedule, SectorError, SectorHamiltonian, SectorState,
};

/// Upload/download time: half period of a unit-coupling 2-chain.
pub const T0: f64 = FRAC_PI_2;
/// Per-hop time: mirror time of a unit-coupling 3-chain.
pub const T1: f64 = PI / SQRT_2;

/// Sign pattern of the 4×4 Hadamard matrix (the ½ lives in [`SWITCH_COUPLING`]).
pub const HADAMARD_SIGNS: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// Magnitude of every control-port coupling. Calibrated so the ξ-basis
/// 2-/3-chain blocks come out with coupling exactly 1.
pub const SWITCH_COUPLING: f64 = 0.5;

/// Chip document format version.
pub const CHIP_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HexError {
    #[error("chip dimensions must all be at least 1 (layers={layers}, rows={rows}, cols={cols})")]
    InvalidDimensions { layers: u32, rows: u32, cols: u32 },
    #[error("interlayer junction at {0} is out of range (needs the vertex and the one above it)")]
    JunctionOutOfRange(VertexId),
    #[error("interlayer junctions overlap at vertex {0}")]
    JunctionOverlap(VertexId),
    #[error("defect at {0} is out of range")]
    DefectOutOfRange(VertexId),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),
    #[error("vertex {0} has no read-write head")]
    NoHead(VertexId),
    #[error("endpoint {0} is a defective switch")]
    DefectiveEndpoint(VertexId),
    #[error("no defect-free path from {from} to {to}; blocking defects: {blocking:?}")]
    Unroutable {
        from: VertexId,
        to: VertexId,
        blocking: Vec<VertexId>,
    },
    #[error("malformed route: {0}")]
    MalformedRoute(String),
    #[error("no pulse turns ξ{from} into ξ{to}")]
    BadPulse { from: u8, to: u8 },
    #[error("unsupported chip document version {got} (this build reads version {expected})")]
    UnsupportedVersion { got: u32, expected: u32 },
    #[error(transparent)]
    Sector(#[from] SectorError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Lattice vertex: layer plus brick-wall axial coordinates.
///
/// The derived ordering is lexicographic `(layer, q, r)`, which route
/// planning uses for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[i64; 3]", try_from = "[i64; 3]")]
pub struct VertexId {
    pub layer: u32,
    pub q: i32,
    pub r: i32,
}

impl VertexId {
    pub fn new(layer: u32, q: i32, r: i32) -> Self {
        VertexId { layer, q, r }
    }

    pub fn sublattice(&self) -> Sublattice {
        if (self.q + self.r).rem_euclid(2) == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    /// The vertex reached by leaving through direction `d ∈ {1,2,3}`.
    pub fn neighbor(&self, d: u8) -> VertexId {
        let (dq, dr) = match (self.sublattice(), d) {
            (Sublattice::A, 1) => (1, 0),
            (Sublattice::A, 2) => (-1, 0),
            (Sublattice::A, 3) => (0, 1),
            (Sublattice::B, 1) => (-1, 0),
            (Sublattice::B, 2) => (1, 0),
            (Sublattice::B, 3) => (0, -1),
            _ => panic!("direction must be 1, 2, or 3"),
        };
        VertexId::new(self.layer, self.q + dq, self.r + dr)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.layer, self.q, self.r)
    }
}

impl From<VertexId> for [i64; 3] {
    fn from(v: VertexId) -> Self {
        [v.layer as i64, v.q as i64, v.r as i64]
    }
}

impl TryFrom<[i64; 3]> for VertexId {
    type Error = String;

    fn try_from(a: [i64; 3]) -> Result<Self, Self::Error> {
        let layer = u32::try_from(a[0]).map_err(|_| format!("bad layer {}", a[0]))?;
        let q = i32::try_from(a[1]).map_err(|_| format!("bad q {}", a[1]))?;
        let r = i32::try_from(a[2]).map_err(|_| format!("bad r {}", a[2]))?;
        Ok(VertexId::new(layer, q, r))
    }
}

/// Honeycomb sublattice; A-vertices connect only to B-vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

/// One hop of a route: leave through a lattice direction or cross layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hop {
    Direction(u8),
    Interlayer,
}

impl Hop {
    /// ξ index the excitation departs in (interlayer hops ride ξ⁰).
    fn depart_label(&self) -> u8 {
        match self {
            Hop::Direction(d) => *d,
            Hop::Interlayer => 0,
        }
    }

    /// ξ index the excitation arrives in at the destination vertex. Link
    /// labels agree on both endpoints, so this matches the departure label.
    fn arrive_label(&self) -> u8 {
        self.depart_label()
    }
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hop::Direction(d) => write!(f, "{d}"),
            Hop::Interlayer => write!(f, "interlayer"),
        }
    }
}

/// One switch of the chip with its attached sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchCell {
    pub vertex: VertexId,
    pub control_sites: [usize; 4],
    /// Read-write head on port `e₀`, absent on interlayer junction members.
    pub head_site: Option<usize>,
    /// Interlayer connector on port `e₀`, when this vertex joins two layers.
    pub interlayer_site: Option<usize>,
    /// Lattice link sites by local direction label.
    pub link_sites: Vec<(u8, usize)>,
    pub defective: bool,
}

/// A planned route between two read-write heads.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub entry: VertexId,
    pub hops: Vec<RouteHop>,
    pub exit: VertexId,
    /// `2t₀ + N·t₁` for `N` hops.
    pub expected_duration: f64,
    /// `(−i)² · (−1)^N`: one `−i` per head chain, one `−1` per hop.
    pub expected_phase: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteHop {
    pub from: VertexId,
    pub hop: Hop,
    pub to: VertexId,
}

impl Route {
    pub fn to_document(&self) -> serde_json::Value {
        serde_json::json!({
            "entry": <[i64; 3]>::from(self.entry),
            "exit": <[i64; 3]>::from(self.exit),
            "hops": self.hops.iter().map(|h| serde_json::json!({
                "from": <[i64; 3]>::from(h.from),
                "direction": h.hop.to_string(),
                "to": <[i64; 3]>::from(h.to),
            })).collect::<Vec<_>>(),
            "expected_duration": self.expected_duration,
            "expected_phase": [self.expected_phase.re, self.expected_phase.im],
        })
    }
}

/// Diagonal single-qubit gate `diag(1, e^{iθ})` that cancels a known arrival
/// phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCorrection {
    /// Phase applied to `|1⟩`; the arrival amplitude carried `e^{−iθ}`.
    pub angle: f64,
}

impl PhaseCorrection {
    pub fn for_arrival_phase(phase: Complex64) -> Self {
        PhaseCorrection {
            angle: -phase.arg(),
        }
    }

    pub fn name(&self) -> String {
        let a = self.angle;
        let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
        if close(a, 0.0) {
            "I".to_string()
        } else if close(a.abs(), PI) {
            "Z".to_string()
        } else if close(a, FRAC_PI_2) {
            "S".to_string()
        } else if close(a, -FRAC_PI_2) {
            "Sdg".to_string()
        } else {
            format!("P({a:.12})")
        }
    }
}

impl fmt::Display for PhaseCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Result of simulating a compiled route end to end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteOutcome {
    /// `|amplitude|` on the exit head at the end of the schedule.
    pub magnitude: f64,
    pub arrival_phase: Complex64,
    pub correction: PhaseCorrection,
    pub duration: f64,
}

impl RouteOutcome {
    pub fn to_document(&self) -> serde_json::Value {
        serde_json::json!({
            "magnitude": self.magnitude,
            "arrival_phase": [self.arrival_phase.re, self.arrival_phase.im],
            "correction": self.correction.name(),
            "duration": self.duration,
        })
    }
}

/// Result of the ξ-basis block-structure verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCheck {
    /// Max |entry| of the transformed Hamiltonian outside the expected blocks.
    pub off_block_residual: f64,
    /// Max deviation of the in-block couplings from 1.
    pub coupling_deviation: f64,
    /// Head 2-chains.
    pub two_blocks: usize,
    /// Link and interlayer 3-chains.
    pub three_blocks: usize,
    /// ξ states with no port on their direction (boundary); these are parked.
    pub parked_states: usize,
}

/// The plane pair `{i, j} ⊂ {1,2,3}` whose product pulse `Z^i Z^j` swaps
/// `ξ^from ↔ ξ^to` with coefficient exactly +1.
pub fn control_pulse(from: u8, to: u8) -> Result<(u8, u8), HexError> {
    if from == to || from > 3 || to > 3 {
        return Err(HexError::BadPulse { from, to });
    }
    if from == 0 || to == 0 {
        let d = from.max(to);
        let pair: Vec<u8> = (1..=3).filter(|&i| i != d).collect();
        Ok((pair[0], pair[1]))
    } else {
        Ok((from.min(to), from.max(to)))
    }
}

fn plane_pair_selector(from: u8, to: u8) -> Result<SiteSelector, HexError> {
    let (i, j) = control_pulse(from, to)?;
    Ok(SiteSelector::Planes(vec![
        format!("plane{i}"),
        format!("plane{j}"),
    ]))
}

/// Multi-layer hexagonal Hadamard-switch lattice over a sequentially indexed
/// [`SpinNetwork`]. Immutable after construction.
#[derive(Debug)]
pub struct HexChip {
    layers: u32,
    rows: u32,
    cols: u32,
    junctions: Vec<VertexId>,
    defects: BTreeSet<VertexId>,
    control_sites: BTreeMap<VertexId, [usize; 4]>,
    head_sites: BTreeMap<VertexId, usize>,
    link_sites: BTreeMap<(VertexId, u8), usize>,
    junction_sites: BTreeMap<VertexId, usize>,
    junction_partner: BTreeMap<VertexId, VertexId>,
    network: SpinNetwork,
    hamiltonian: OnceLock<SectorHamiltonian>,
}

impl HexChip {
    pub fn build(
        layers: u32,
        rows: u32,
        cols: u32,
        interlayer: &[VertexId],
        defects: &[VertexId],
    ) -> Result<Self, HexError> {
        if layers < 1 || rows < 1 || cols < 1 {
            return Err(HexError::InvalidDimensions { layers, rows, cols });
        }
        let in_bounds = |v: &VertexId| {
            v.layer < layers && v.q >= 0 && v.q < cols as i32 && v.r >= 0 && v.r < rows as i32
        };
        let vertices: Vec<VertexId> = (0..layers)
            .flat_map(|l| {
                (0..cols as i32)
                    .flat_map(move |q| (0..rows as i32).map(move |r| VertexId::new(l, q, r)))
            })
            .collect();

        let mut junction_partner = BTreeMap::new();
        let mut junctions: Vec<VertexId> = interlayer.to_vec();
        junctions.sort_unstable();
        for &j in &junctions {
            let above = VertexId::new(j.layer + 1, j.q, j.r);
            if !in_bounds(&j) || !in_bounds(&above) {
                return Err(HexError::JunctionOutOfRange(j));
            }
            for member in [j, above] {
                if junction_partner.contains_key(&member) {
                    return Err(HexError::JunctionOverlap(member));
                }
            }
            junction_partner.insert(j, above);
            junction_partner.insert(above, j);
        }

        let mut defect_set = BTreeSet::new();
        for &d in defects {
            if !in_bounds(&d) {
                return Err(HexError::DefectOutOfRange(d));
            }
            defect_set.insert(d);
        }

        let mut next = 0usize;
        let mut alloc = || {
            let id = next;
            next += 1;
            id
        };

        let mut control_sites = BTreeMap::new();
        for &v in &vertices {
            control_sites.insert(v, [alloc(), alloc(), alloc(), alloc()]);
        }
        let mut head_sites = BTreeMap::new();
        for &v in &vertices {
            if !junction_partner.contains_key(&v) {
                head_sites.insert(v, alloc());
            }
        }
        let mut link_sites = BTreeMap::new();
        for &v in &vertices {
            for d in 1..=3u8 {
                let w = v.neighbor(d);
                if in_bounds(&w) && !link_sites.contains_key(&(v, d)) {
                    let site = alloc();
                    link_sites.insert((v, d), site);
                    // The partner sees the same link under the same label.
                    link_sites.insert((w, d), site);
                }
            }
        }
        let mut junction_sites = BTreeMap::new();
        for &j in &junctions {
            junction_sites.insert(j, alloc());
        }

        let mut network = SpinNetwork::new(next);
        for &v in &vertices {
            let controls = control_sites[&v];
            let mut ports: Vec<(u8, usize)> = Vec::with_capacity(4);
            if let Some(&h) = head_sites.get(&v) {
                ports.push((0, h));
            } else {
                let j = if junction_sites.contains_key(&v) {
                    v
                } else {
                    junction_partner[&v]
                };
                ports.push((0, junction_sites[&j]));
            }
            for d in 1..=3u8 {
                if let Some(&s) = link_sites.get(&(v, d)) {
                    ports.push((d, s));
                }
            }
            for alpha in 0..4usize {
                for &(beta, port) in &ports {
                    let sign = HADAMARD_SIGNS[alpha][beta as usize];
                    network.add_coupling(controls[alpha], port, sign * SWITCH_COUPLING)?;
                }
            }
        }
        for alpha in 1..=3usize {
            let sites: Vec<usize> = vertices.iter().map(|v| control_sites[v][alpha]).collect();
            network.define_plane(format!("plane{alpha}"), sites)?;
        }
        for &v in &vertices {
            for (alpha, &site) in control_sites[&v].iter().enumerate() {
                network.set_label(site, format!("control{alpha}{v}"))?;
            }
        }
        for (&v, &site) in &head_sites {
            network.set_label(site, format!("head{v}"))?;
        }
        for ((v, d), &site) in &link_sites {
            if network.label(site).is_none() {
                network.set_label(site, format!("link{v}-d{d}"))?;
            }
        }
        for (&j, &site) in &junction_sites {
            network.set_label(site, format!("junction{j}"))?;
        }

        Ok(HexChip {
            layers,
            rows,
            cols,
            junctions,
            defects: defect_set,
            control_sites,
            head_sites,
            link_sites,
            junction_sites,
            junction_partner,
            network,
            hamiltonian: OnceLock::new(),
        })
    }

    pub fn layers(&self) -> u32 {
        self.layers
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn network(&self) -> &SpinNetwork {
        &self.network
    }

    pub fn defects(&self) -> &BTreeSet<VertexId> {
        &self.defects
    }

    fn in_bounds(&self, v: &VertexId) -> bool {
        v.layer < self.layers
            && v.q >= 0
            && v.q < self.cols as i32
            && v.r >= 0
            && v.r < self.rows as i32
    }

    /// Vertices in lexicographic `(layer, q, r)` order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.control_sites.keys().copied()
    }

    pub fn head_site(&self, v: VertexId) -> Option<usize> {
        self.head_sites.get(&v).copied()
    }

    pub fn cell(&self, v: VertexId) -> Option<SwitchCell> {
        let control_sites = *self.control_sites.get(&v)?;
        let link_sites: Vec<(u8, usize)> = (1..=3u8)
            .filter_map(|d| self.link_sites.get(&(v, d)).map(|&s| (d, s)))
            .collect();
        let interlayer_site = if self.junction_partner.contains_key(&v) {
            let key = if self.junction_sites.contains_key(&v) {
                v
            } else {
                self.junction_partner[&v]
            };
            Some(self.junction_sites[&key])
        } else {
            None
        };
        Some(SwitchCell {
            vertex: v,
            control_sites,
            head_site: self.head_sites.get(&v).copied(),
            interlayer_site,
            link_sites,
            defective: self.defects.contains(&v),
        })
    }

    /// Cached single-excitation Hamiltonian of the whole chip.
    pub fn sector(&self) -> &SectorHamiltonian {
        self.hamiltonian.get_or_init(|| {
            SectorHamiltonian::new(&self.network).expect("chip network is valid by construction")
        })
    }

    /// The four ξ vectors of a switch as sector states (±½ on the controls).
    pub fn xi_basis(&self, v: VertexId) -> Option<[DVector<f64>; 4]> {
        let controls = *self.control_sites.get(&v)?;
        let n = self.network.n_sites();
        Some(std::array::from_fn(|beta| {
            let mut vec = DVector::<f64>::zeros(n);
            for (alpha, &site) in controls.iter().enumerate() {
                vec[site] = 0.5 * HADAMARD_SIGNS[alpha][beta];
            }
            vec
        }))
    }

    /// Transforms the chip Hamiltonian to the ξ basis and verifies that it is
    /// a direct sum of unit-coupling 2-chains (head ↔ ξ⁰) and 3-chains
    /// (ξ ↔ link ↔ ξ, and ξ⁰ ↔ connector ↔ ξ⁰ across layers).
    pub fn block_structure_check(&self) -> BlockCheck {
        let n = self.network.n_sites();
        let h = self.sector().matrix();

        // Basis columns: per vertex the four ξ vectors, then every port site.
        let mut basis = DMatrix::<f64>::zeros(n, n);
        let mut xi_col = BTreeMap::new();
        let mut site_col = BTreeMap::new();
        let mut col = 0usize;
        for (&v, controls) in &self.control_sites {
            for beta in 0..4usize {
                for (alpha, &site) in controls.iter().enumerate() {
                    basis[(site, col)] = 0.5 * HADAMARD_SIGNS[alpha][beta];
                }
                xi_col.insert((v, beta as u8), col);
                col += 1;
            }
        }
        let control_set: BTreeSet<usize> = self
            .control_sites
            .values()
            .flat_map(|c| c.iter().copied())
            .collect();
        for site in 0..n {
            if !control_set.contains(&site) {
                basis[(site, col)] = 1.0;
                site_col.insert(site, col);
                col += 1;
            }
        }
        debug_assert_eq!(col, n);

        let transformed = basis.transpose() * h * &basis;

        let mut expected: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut two_blocks = 0usize;
        let mut three_blocks = 0usize;
        let mut link_pairs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&v, &head) in &self.head_sites {
            expected.insert((xi_col[&(v, 0)], site_col[&head]));
            two_blocks += 1;
        }
        for (&(v, d), &site) in &self.link_sites {
            link_pairs.entry(site).or_default().push(xi_col[&(v, d)]);
        }
        for (&j, &site) in &self.junction_sites {
            let above = self.junction_partner[&j];
            link_pairs
                .entry(site)
                .or_default()
                .extend([xi_col[&(j, 0)], xi_col[&(above, 0)]]);
        }
        for (site, xis) in link_pairs {
            debug_assert_eq!(xis.len(), 2);
            for xi in xis {
                expected.insert((xi, site_col[&site]));
            }
            three_blocks += 1;
        }
        let expected_sym: BTreeSet<(usize, usize)> = expected
            .iter()
            .flat_map(|&(i, j)| [(i, j), (j, i)])
            .collect();

        let mut coupling_deviation = 0.0f64;
        for &(i, j) in &expected_sym {
            coupling_deviation = coupling_deviation.max((transformed[(i, j)] - 1.0).abs());
        }
        let mut off_block_residual = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if !expected_sym.contains(&(i, j)) {
                    off_block_residual = off_block_residual.max(transformed[(i, j)].abs());
                }
            }
        }

        let ported: BTreeSet<usize> = expected.iter().map(|&(xi, _)| xi).collect();
        let parked_states = xi_col.values().filter(|c| !ported.contains(c)).count();

        BlockCheck {
            off_block_residual,
            coupling_deviation,
            two_blocks,
            three_blocks,
            parked_states,
        }
    }

    /// Routing neighbors of a vertex, sorted by destination id.
    fn neighbors(&self, v: VertexId) -> Vec<(VertexId, Hop)> {
        let mut out = Vec::with_capacity(4);
        for d in 1..=3u8 {
            if self.link_sites.contains_key(&(v, d)) {
                out.push((v.neighbor(d), Hop::Direction(d)));
            }
        }
        if let Some(&partner) = self.junction_partner.get(&v) {
            out.push((partner, Hop::Interlayer));
        }
        out.sort_by_key(|(w, _)| *w);
        out
    }

    /// Breadth-first shortest route over non-defective switches. Ties break
    /// lexicographically by `(layer, q, r)` through the sorted neighbor order.
    pub fn plan_route(&self, entry: VertexId, exit: VertexId) -> Result<Route, HexError> {
        for v in [entry, exit] {
            if !self.in_bounds(&v) {
                return Err(HexError::VertexOutOfRange(v));
            }
            if !self.head_sites.contains_key(&v) {
                return Err(HexError::NoHead(v));
            }
            if self.defects.contains(&v) {
                return Err(HexError::DefectiveEndpoint(v));
            }
        }
        let mut prev: BTreeMap<VertexId, (VertexId, Hop)> = BTreeMap::new();
        let mut visited: BTreeSet<VertexId> = BTreeSet::new();
        visited.insert(entry);
        let mut queue = VecDeque::from([entry]);
        while let Some(v) = queue.pop_front() {
            if v == exit {
                break;
            }
            for (w, hop) in self.neighbors(v) {
                if self.defects.contains(&w) || !visited.insert(w) {
                    continue;
                }
                prev.insert(w, (v, hop));
                queue.push_back(w);
            }
        }
        if entry != exit && !prev.contains_key(&exit) {
            // Name the cut: defective switches adjacent to the reached region.
            let mut blocking = BTreeSet::new();
            for &v in &visited {
                for (w, _) in self.neighbors(v) {
                    if self.defects.contains(&w) {
                        blocking.insert(w);
                    }
                }
            }
            return Err(HexError::Unroutable {
                from: entry,
                to: exit,
                blocking: blocking.into_iter().collect(),
            });
        }
        let mut hops = Vec::new();
        let mut v = exit;
        while v != entry {
            let (p, hop) = prev[&v];
            hops.push(RouteHop {
                from: p,
                hop,
                to: v,
            });
            v = p;
        }
        hops.reverse();
        Ok(self.route_from_hops(entry, exit, hops))
    }

    fn route_from_hops(&self, entry: VertexId, exit: VertexId, hops: Vec<RouteHop>) -> Route {
        let n = hops.len();
        let phase = if n % 2 == 0 { -1.0 } else { 1.0 };
        Route {
            entry,
            hops,
            exit,
            expected_duration: 2.0 * T0 + n as f64 * T1,
            expected_phase: Complex64::new(phase, 0.0),
        }
    }

    fn check_route(&self, route: &Route) -> Result<(), HexError> {
        for v in [route.entry, route.exit] {
            if !self.head_sites.contains_key(&v) {
                return Err(HexError::NoHead(v));
            }
        }
        let mut at = route.entry;
        for (k, hop) in route.hops.iter().enumerate() {
            if hop.from != at {
                return Err(HexError::MalformedRoute(format!(
                    "hop {k} starts at {} but the route is at {at}",
                    hop.from
                )));
            }
            let to = match hop.hop {
                Hop::Direction(d) => {
                    if !self.link_sites.contains_key(&(at, d)) {
                        return Err(HexError::MalformedRoute(format!(
                            "hop {k}: no link in direction {d} from {at}"
                        )));
                    }
                    at.neighbor(d)
                }
                Hop::Interlayer => *self.junction_partner.get(&at).ok_or_else(|| {
                    HexError::MalformedRoute(format!("hop {k}: no interlayer junction at {at}"))
                })?,
            };
            if to != hop.to {
                return Err(HexError::MalformedRoute(format!(
                    "hop {k} claims to reach {} but lands at {to}",
                    hop.to
                )));
            }
            if self.defects.contains(&to) {
                return Err(HexError::MalformedRoute(format!(
                    "hop {k} enters defective switch {to}"
                )));
            }
            at = to;
        }
        if at != route.exit {
            return Err(HexError::MalformedRoute(format!(
                "route ends at {at}, not at the declared exit {}",
                route.exit
            )));
        }
        Ok(())
    }

    /// Compiles a route into a global-pulse schedule: upload (`t₀`), a turn
    /// pulse before each hop, `t₁` per hop, and a final turn plus download
    /// (`t₀`). All pulses act on full control planes.
    pub fn compile(&self, route: &Route) -> Result<Schedule, HexError> {
        self.check_route(route)?;
        if route.hops.is_empty() {
            return Ok(Schedule {
                events: Vec::new(),
                trailing_wait: 2.0 * T0,
            });
        }
        let mut events = Vec::new();
        let mut carry = 0.0f64;
        let mut label = 0u8; // ξ index occupied at the current vertex
        for (k, hop) in route.hops.iter().enumerate() {
            let wait = carry + if k == 0 { T0 } else { T1 };
            carry = 0.0;
            let depart = hop.hop.depart_label();
            if label == depart {
                carry = wait;
            } else {
                events.push(PulseEvent {
                    wait,
                    sites: plane_pair_selector(label, depart)?,
                });
            }
            label = hop.hop.arrive_label();
        }
        let wait = carry + T1;
        if label == 0 {
            carry = wait;
        } else {
            events.push(PulseEvent {
                wait,
                sites: plane_pair_selector(label, 0)?,
            });
            carry = 0.0;
        }
        Ok(Schedule {
            events,
            trailing_wait: carry + T0,
        })
    }

    /// Runs a compiled route from the entry head and reads the exit head.
    pub fn simulate_route(&self, route: &Route) -> Result<RouteOutcome, HexError> {
        let schedule = self.compile(route)?;
        let entry_site = self
            .head_sites
            .get(&route.entry)
            .copied()
            .ok_or(HexError::NoHead(route.entry))?;
        let exit_site = self
            .head_sites
            .get(&route.exit)
            .copied()
            .ok_or(HexError::NoHead(route.exit))?;
        let psi0 = SectorState::basis(self.network.n_sites(), SiteId(entry_site))?;
        let out = run_schedule_with(self.sector(), &self.network, &psi0, &schedule)?;
        let amp = out.amplitude(exit_site);
        let magnitude = amp.norm();
        let arrival_phase = if magnitude > 0.0 {
            amp / magnitude
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(RouteOutcome {
            magnitude,
            arrival_phase,
            correction: PhaseCorrection::for_arrival_phase(arrival_phase),
            duration: route.expected_duration,
        })
    }

    pub fn to_document(&self) -> ChipDocument {
        ChipDocument {
            version: CHIP_FORMAT_VERSION,
            layers: self.layers,
            rows: self.rows,
            cols: self.cols,
            interlayer: self.junctions.iter().map(|&v| v.into()).collect(),
            defects: self.defects.iter().map(|&v| v.into()).collect(),
        }
    }

    pub fn from_document(doc: &ChipDocument) -> Result<Self, HexError> {
        if doc.version != CHIP_FORMAT_VERSION {
            return Err(HexError::UnsupportedVersion {
                got: doc.version,
                expected: CHIP_FORMAT_VERSION,
            });
        }
        let parse = |list: &[[i64; 3]]| -> Result<Vec<VertexId>, HexError> {
            list.iter()
                .map(|&a| {
                    VertexId::try_from(a)
                        .map_err(|_| HexError::VertexOutOfRange(VertexId::new(u32::MAX, 0, 0)))
                })
                .collect()
        };
        HexChip::build(
            doc.layers,
            doc.rows,
            doc.cols,
            &parse(&doc.interlayer)?,
            &parse(&doc.defects)?,
        )
    }

    pub fn from_json(text: &str) -> Result<Self, HexError> {
        let doc: ChipDocument = serde_json::from_str(text)
            .map_err(|e| HexError::Network(NetworkError::Parse(e.to_string())))?;
        Self::from_document(&doc)
    }
}

/// On-disk chip description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChipDocument {
    pub version: u32,
    pub layers: u32,
    pub rows: u32,
    pub cols: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interlayer: Vec<[i64; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<[i64; 3]>,
}

impl ChipDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chip document serializes")
    }
}
