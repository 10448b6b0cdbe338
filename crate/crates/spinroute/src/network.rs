//! Spin-network construction, validation, and document serialization.
//!
//! A [`SpinNetwork`] is a weighted signed graph of qubit sites together with
//! optional per-site fields, a global anisotropy, and named site subsets
//! ("planes") that pulse schedules can address. All couplings are expressed
//! in units of a reference coupling `J = 1` and all times elsewhere in the
//! crate are in units of `1/J` (ħ = 1).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version tag written into every network document.
pub const NETWORK_FORMAT_VERSION: u32 = 1;

/// Index of a qubit site. Sites of a network are dense in `0..n_sites`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteId(pub usize);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for SiteId {
    fn from(index: usize) -> Self {
        SiteId(index)
    }
}

/// A single exchange coupling between two distinct sites.
///
/// Stored with `a < b`; the strength is dimensionless and may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub a: SiteId,
    pub b: SiteId,
    pub strength: f64,
}

/// Errors produced while building or parsing networks.
#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid size: {name} must be at least {min}, got {got}")]
    InvalidSize {
        name: &'static str,
        min: usize,
        got: usize,
    },
    #[error("site {site} out of range for network of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("self-coupling at site {0}")]
    SelfLoop(usize),
    #[error("coupling ({a},{b}) repeats an existing pair")]
    DuplicateCoupling { a: usize, b: usize },
    #[error("coupling ({a},{b}) has non-finite strength")]
    NonFiniteStrength { a: usize, b: usize },
    #[error("unknown plane `{0}`")]
    UnknownPlane(String),
    #[error("unsupported document version {got} (this build reads version {expected})")]
    UnsupportedVersion { got: u32, expected: u32 },
    #[error("malformed network document: {0}")]
    Parse(String),
    #[error("network document failed validation: {0}")]
    InvalidDocument(String),
}

/// A single violation reported by [`SpinNetwork::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { site: usize },
    DuplicateCoupling { a: usize, b: usize },
    CouplingOutOfRange { a: usize, b: usize },
    NonFiniteStrength { a: usize, b: usize },
    NonFiniteField { site: usize },
    FieldCountMismatch { expected: usize, actual: usize },
    PlaneSiteOutOfRange { plane: String, site: usize },
    LabelSiteOutOfRange { site: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { site } => write!(f, "self-loop at {site}"),
            Violation::DuplicateCoupling { a, b } => write!(f, "duplicate coupling ({a},{b})"),
            Violation::CouplingOutOfRange { a, b } => {
                write!(f, "coupling ({a},{b}) references a site out of range")
            }
            Violation::NonFiniteStrength { a, b } => {
                write!(f, "coupling ({a},{b}) has non-finite strength")
            }
            Violation::NonFiniteField { site } => write!(f, "non-finite field at site {site}"),
            Violation::FieldCountMismatch { expected, actual } => {
                write!(f, "field vector has {actual} entries, expected {expected}")
            }
            Violation::PlaneSiteOutOfRange { plane, site } => {
                write!(f, "plane `{plane}` lists out-of-range site {site}")
            }
            Violation::LabelSiteOutOfRange { site } => {
                write!(f, "label attached to out-of-range site {site}")
            }
        }
    }
}

/// Selects a site subset for a pulse, either by plane name or explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteSelector {
    /// All sites of one named plane.
    Plane(String),
    /// The union of several named planes.
    Planes(Vec<String>),
    /// An explicit list of site indices.
    Sites(Vec<usize>),
}

impl SiteSelector {
    pub fn plane(name: impl Into<String>) -> Self {
        SiteSelector::Plane(name.into())
    }
}

/// A weighted signed graph of qubit sites with optional field and anisotropy
/// terms; the physical model every other module consumes.
///
/// The full-space Hamiltonian this models is
/// `H = Σ J_ab · ½ (X_a X_b + Y_a Y_b + Δ Z_a Z_b) + Σ B_i Z_i`,
/// with `Δ = 0` a pure XY network and `Δ = 1` the isotropic Heisenberg form.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinNetwork {
    n_sites: usize,
    couplings: Vec<Coupling>,
    fields: Vec<f64>,
    anisotropy: f64,
    planes: BTreeMap<String, Vec<usize>>,
    labels: BTreeMap<usize, String>,
}

impl SpinNetwork {
    /// An empty network of `n_sites` sites with no couplings, zero fields,
    /// and zero anisotropy.
    pub fn new(n_sites: usize) -> Self {
        SpinNetwork {
            n_sites,
            couplings: Vec::new(),
            fields: vec![0.0; n_sites],
            anisotropy: 0.0,
            planes: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    pub fn set_anisotropy(&mut self, delta: f64) {
        self.anisotropy = delta;
    }

    pub fn field(&self, site: usize) -> f64 {
        self.fields[site]
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn set_field(&mut self, site: usize, value: f64) -> Result<(), NetworkError> {
        self.check_site(site)?;
        self.fields[site] = value;
        Ok(())
    }

    pub fn set_uniform_field(&mut self, value: f64) {
        self.fields.fill(value);
    }

    fn check_site(&self, site: usize) -> Result<(), NetworkError> {
        if site >= self.n_sites {
            return Err(NetworkError::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }

    /// Adds a coupling, keeping the coupling list in canonical `(a,b)` order.
    pub fn add_coupling(
        &mut self,
        a: usize,
        b: usize,
        strength: f64,
    ) -> Result<(), NetworkError> {
        self.check_site(a)?;
        self.check_site(b)?;
        if a == b {
            return Err(NetworkError::SelfLoop(a));
        }
        if !strength.is_finite() {
            return Err(NetworkError::NonFiniteStrength { a, b });
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let key = (lo, hi);
        match self
            .couplings
            .binary_search_by_key(&key, |c| (c.a.0, c.b.0))
        {
            Ok(_) => Err(NetworkError::DuplicateCoupling { a: lo, b: hi }),
            Err(pos) => {
                self.couplings.insert(
                    pos,
                    Coupling {
                        a: SiteId(lo),
                        b: SiteId(hi),
                        strength,
                    },
                );
                Ok(())
            }
        }
    }

    /// Coupling strength between two sites, if the pair is coupled.
    pub fn strength(&self, a: usize, b: usize) -> Option<f64> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.couplings
            .binary_search_by_key(&key, |c| (c.a.0, c.b.0))
            .ok()
            .map(|i| self.couplings[i].strength)
    }

    /// Sum of coupling strengths incident on `site`.
    pub fn incident_strength(&self, site: usize) -> f64 {
        self.couplings
            .iter()
            .filter(|c| c.a.0 == site || c.b.0 == site)
            .map(|c| c.strength)
            .sum()
    }

    /// Registers (or replaces) a named plane. Sites are sorted and deduplicated.
    pub fn define_plane(
        &mut self,
        name: impl Into<String>,
        sites: impl IntoIterator<Item = usize>,
    ) -> Result<(), NetworkError> {
        let mut list: Vec<usize> = sites.into_iter().collect();
        for &s in &list {
            self.check_site(s)?;
        }
        list.sort_unstable();
        list.dedup();
        self.planes.insert(name.into(), list);
        Ok(())
    }

    pub fn plane(&self, name: &str) -> Option<&[usize]> {
        self.planes.get(name).map(|v| v.as_slice())
    }

    pub fn planes(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.planes
    }

    pub fn set_label(&mut self, site: usize, label: impl Into<String>) -> Result<(), NetworkError> {
        self.check_site(site)?;
        self.labels.insert(site, label.into());
        Ok(())
    }

    pub fn label(&self, site: usize) -> Option<&str> {
        self.labels.get(&site).map(|s| s.as_str())
    }

    /// Resolves a selector to a sorted, deduplicated site list.
    pub fn resolve(&self, selector: &SiteSelector) -> Result<Vec<usize>, NetworkError> {
        let mut sites = match selector {
            SiteSelector::Plane(name) => self
                .plane(name)
                .ok_or_else(|| NetworkError::UnknownPlane(name.clone()))?
                .to_vec(),
            SiteSelector::Planes(names) => {
                let mut all = Vec::new();
                for name in names {
                    all.extend_from_slice(
                        self.plane(name)
                            .ok_or_else(|| NetworkError::UnknownPlane(name.clone()))?,
                    );
                }
                all
            }
            SiteSelector::Sites(list) => {
                for &s in list {
                    self.check_site(s)?;
                }
                list.clone()
            }
        };
        sites.sort_unstable();
        sites.dedup();
        Ok(sites)
    }

    /// Reports every invariant violation. Empty iff the network is well formed.
    ///
    /// Constructors already reject most of these; the checks still run in full
    /// so documents assembled by hand get concrete diagnostics.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.fields.len() != self.n_sites {
            out.push(Violation::FieldCountMismatch {
                expected: self.n_sites,
                actual: self.fields.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for c in &self.couplings {
            let (a, b) = (c.a.0, c.b.0);
            if a == b {
                out.push(Violation::SelfLoop { site: a });
                continue;
            }
            if a >= self.n_sites || b >= self.n_sites {
                out.push(Violation::CouplingOutOfRange { a, b });
                continue;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                out.push(Violation::DuplicateCoupling { a: key.0, b: key.1 });
            }
            if !c.strength.is_finite() {
                out.push(Violation::NonFiniteStrength { a, b });
            }
        }
        for (site, value) in self.fields.iter().enumerate() {
            if !value.is_finite() {
                out.push(Violation::NonFiniteField { site });
            }
        }
        for (name, sites) in &self.planes {
            for &site in sites {
                if site >= self.n_sites {
                    out.push(Violation::PlaneSiteOutOfRange {
                        plane: name.clone(),
                        site,
                    });
                }
            }
        }
        for &site in self.labels.keys() {
            if site >= self.n_sites {
                out.push(Violation::LabelSiteOutOfRange { site });
            }
        }
        out
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            version: NETWORK_FORMAT_VERSION,
            n_sites: self.n_sites,
            anisotropy: self.anisotropy,
            fields: self.fields.clone(),
            couplings: self
                .couplings
                .iter()
                .map(|c| (c.a.0, c.b.0, c.strength))
                .collect(),
            planes: self.planes.clone(),
            labels: self
                .labels
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<Self, NetworkError> {
        if doc.version != NETWORK_FORMAT_VERSION {
            return Err(NetworkError::UnsupportedVersion {
                got: doc.version,
                expected: NETWORK_FORMAT_VERSION,
            });
        }
        if doc.fields.len() != doc.n_sites {
            return Err(NetworkError::InvalidDocument(format!(
                "field vector has {} entries, expected {}",
                doc.fields.len(),
                doc.n_sites
            )));
        }
        let mut net = SpinNetwork::new(doc.n_sites);
        net.anisotropy = doc.anisotropy;
        net.fields = doc.fields.clone();
        for &(a, b, strength) in &doc.couplings {
            net.add_coupling(a, b, strength)
                .map_err(|e| NetworkError::InvalidDocument(e.to_string()))?;
        }
        for (name, sites) in &doc.planes {
            net.define_plane(name.clone(), sites.iter().copied())
                .map_err(|e| NetworkError::InvalidDocument(e.to_string()))?;
        }
        for (key, value) in &doc.labels {
            let site: usize = key.parse().map_err(|_| {
                NetworkError::InvalidDocument(format!("label key `{key}` is not a site index"))
            })?;
            net.set_label(site, value.clone())
                .map_err(|e| NetworkError::InvalidDocument(e.to_string()))?;
        }
        let violations = net.validate();
        if !violations.is_empty() {
            return Err(NetworkError::InvalidDocument(
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            ));
        }
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        // BTreeMap keys and canonical coupling order make this byte-stable.
        serde_json::to_string_pretty(&self.to_document()).expect("network document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let doc: NetworkDocument =
            serde_json::from_str(text).map_err(|e| NetworkError::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// On-disk form of a network: structured text, versioned, exact real literals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub version: u32,
    pub n_sites: usize,
    pub anisotropy: f64,
    pub fields: Vec<f64>,
    pub couplings: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub planes: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

/// Uniform chain of `n` sites: path graph with all strengths 1, uniform
/// field, anisotropy `delta`, and a plane `"all"` covering every site.
pub fn build_uniform_chain(n: usize, delta: f64, field: f64) -> Result<SpinNetwork, NetworkError> {
    if n < 2 {
        return Err(NetworkError::InvalidSize {
            name: "chain length",
            min: 2,
            got: n,
        });
    }
    let mut net = SpinNetwork::new(n);
    net.set_anisotropy(delta);
    net.set_uniform_field(field);
    for k in 0..n - 1 {
        net.add_coupling(k, k + 1, 1.0)?;
    }
    net.define_plane("all", 0..n)?;
    Ok(net)
}

/// Engineered perfect-transfer chain: `J_k = ½√(k(n−k))` on bond `k`
/// (1-based), pure XY, zero field.
///
/// This normalization puts the single-excitation Hamiltonian equal to the
/// spin-`(n−1)/2` angular-momentum matrix `Jx`, so an excitation crosses the
/// chain in time `π` regardless of length.
pub fn build_pst_chain(n: usize) -> Result<SpinNetwork, NetworkError> {
    if n < 2 {
        return Err(NetworkError::InvalidSize {
            name: "chain length",
            min: 2,
            got: n,
        });
    }
    let mut net = SpinNetwork::new(n);
    for k in 1..n {
        let strength = 0.5 * ((k * (n - k)) as f64).sqrt();
        net.add_coupling(k - 1, k, strength)?;
    }
    net.define_plane("all", 0..n)?;
    Ok(net)
}

/// Diamond quasi-1D chain of `cells` diamonds, `3·cells + 1` sites.
///
/// Sites are numbered along the chain: vertex sites `0, 3, 6, …, 3·cells`
/// and leg pairs `(3k+1, 3k+2)`. Each diamond carries exactly one negative
/// coupling, on the lower leg entering the next vertex. Planes `"upper-leg"`
/// and `"lower-leg"` hold the two leg-site subsets.
pub fn build_diamond_chain(cells: usize) -> Result<SpinNetwork, NetworkError> {
    if cells < 1 {
        return Err(NetworkError::InvalidSize {
            name: "cell count",
            min: 1,
            got: cells,
        });
    }
    let n = 3 * cells + 1;
    let mut net = SpinNetwork::new(n);
    let mut upper = Vec::with_capacity(cells);
    let mut lower = Vec::with_capacity(cells);
    for k in 0..cells {
        let (v, up, lo, w) = (3 * k, 3 * k + 1, 3 * k + 2, 3 * k + 3);
        net.add_coupling(v, up, 1.0)?;
        net.add_coupling(v, lo, 1.0)?;
        net.add_coupling(up, w, 1.0)?;
        net.add_coupling(lo, w, -1.0)?;
        upper.push(up);
        lower.push(lo);
    }
    net.define_plane("upper-leg", upper)?;
    net.define_plane("lower-leg", lower)?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_chain_smallest() {
        let net = build_uniform_chain(2, 0.0, 0.0).unwrap();
        assert_eq!(net.couplings().len(), 1);
        assert_eq!(net.strength(0, 1), Some(1.0));
        assert!(net.validate().is_empty());
    }

    #[test]
    fn uniform_chain_three_sites() {
        let net = build_uniform_chain(3, 0.0, 0.0).unwrap();
        assert_eq!(net.strength(0, 1), Some(1.0));
        assert_eq!(net.strength(1, 2), Some(1.0));
        assert_eq!(net.strength(0, 2), None);
    }

    #[test]
    fn uniform_chain_bose_80() {
        let net = build_uniform_chain(80, 1.0, 1.0).unwrap();
        assert_eq!(net.couplings().len(), 79);
        assert_eq!(net.anisotropy(), 1.0);
        assert!(net.fields().iter().all(|&b| b == 1.0));
        assert_eq!(net.plane("all").unwrap().len(), 80);
    }

    #[test]
    fn uniform_chain_too_short() {
        assert!(matches!(
            build_uniform_chain(1, 0.0, 0.0),
            Err(NetworkError::InvalidSize { .. })
        ));
    }

    #[test]
    fn pst_chain_small() {
        let net = build_pst_chain(2).unwrap();
        assert_eq!(net.strength(0, 1), Some(0.5));

        let net = build_pst_chain(4).unwrap();
        let expect = [0.5 * 3f64.sqrt(), 1.0, 0.5 * 3f64.sqrt()];
        for (k, &e) in expect.iter().enumerate() {
            assert!((net.strength(k, k + 1).unwrap() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn pst_chain_mirror_symmetry_exact() {
        // J_k = J_{n-k} down to the last bit: both sides compute the same product.
        for n in 2..=30 {
            let net = build_pst_chain(n).unwrap();
            for k in 1..n {
                let jk = net.strength(k - 1, k).unwrap();
                let jm = net.strength(n - k - 1, n - k).unwrap();
                assert_eq!(jk.to_bits(), jm.to_bits(), "n={n} k={k}");
            }
            assert!(net.validate().is_empty());
        }
    }

    #[test]
    fn pst_chain_20_profile() {
        let net = build_pst_chain(20).unwrap();
        assert_eq!(net.couplings().len(), 19);
        let j1 = net.strength(0, 1).unwrap();
        assert!((j1 - 0.5 * 19f64.sqrt()).abs() < 1e-15);
        let center = net.strength(9, 10).unwrap();
        for k in 1..20 {
            assert!(net.strength(k - 1, k).unwrap() <= center + 1e-15);
        }
    }

    #[test]
    fn diamond_chain_one_cell() {
        let net = build_diamond_chain(1).unwrap();
        assert_eq!(net.n_sites(), 4);
        assert_eq!(net.strength(0, 1), Some(1.0));
        assert_eq!(net.strength(0, 2), Some(1.0));
        assert_eq!(net.strength(1, 3), Some(1.0));
        assert_eq!(net.strength(2, 3), Some(-1.0));
        assert_eq!(net.plane("upper-leg").unwrap(), &[1]);
        assert_eq!(net.plane("lower-leg").unwrap(), &[2]);
    }

    #[test]
    fn diamond_chain_two_cells_negatives() {
        let net = build_diamond_chain(2).unwrap();
        assert_eq!(net.couplings().len(), 8);
        assert_eq!(net.strength(2, 3), Some(-1.0));
        assert_eq!(net.strength(5, 6), Some(-1.0));
    }

    #[test]
    fn diamond_chain_negative_count_and_backbone() {
        for cells in 1..=6 {
            let net = build_diamond_chain(cells).unwrap();
            let negatives = net.couplings().iter().filter(|c| c.strength < 0.0).count();
            assert_eq!(negatives, cells);
            assert!(net.validate().is_empty());

            // Collapse each leg pair to one node: the quotient must stay connected.
            let group = |s: usize| -> usize {
                if s % 3 == 0 {
                    s
                } else {
                    3 * (s / 3) + 1
                }
            };
            let nodes: BTreeSet<usize> = (0..net.n_sites()).map(group).collect();
            let mut reached = BTreeSet::new();
            let mut stack = vec![0usize];
            while let Some(g) = stack.pop() {
                if !reached.insert(g) {
                    continue;
                }
                for c in net.couplings() {
                    let (ga, gb) = (group(c.a.0), group(c.b.0));
                    if ga == g && !reached.contains(&gb) {
                        stack.push(gb);
                    }
                    if gb == g && !reached.contains(&ga) {
                        stack.push(ga);
                    }
                }
            }
            assert_eq!(reached, nodes, "backbone disconnected for cells={cells}");
        }
    }

    #[test]
    fn validate_reports_self_loop_and_duplicate() {
        let mut net = SpinNetwork::new(3);
        net.couplings.push(Coupling {
            a: SiteId(0),
            b: SiteId(0),
            strength: 1.0,
        });
        assert_eq!(net.validate(), vec![Violation::SelfLoop { site: 0 }]);

        let mut net = SpinNetwork::new(3);
        net.couplings.push(Coupling {
            a: SiteId(0),
            b: SiteId(1),
            strength: 1.0,
        });
        net.couplings.push(Coupling {
            a: SiteId(0),
            b: SiteId(1),
            strength: 2.0,
        });
        assert_eq!(
            net.validate(),
            vec![Violation::DuplicateCoupling { a: 0, b: 1 }]
        );
    }

    #[test]
    fn add_coupling_rejects_bad_input() {
        let mut net = SpinNetwork::new(3);
        assert!(matches!(
            net.add_coupling(0, 0, 1.0),
            Err(NetworkError::SelfLoop(0))
        ));
        assert!(matches!(
            net.add_coupling(0, 5, 1.0),
            Err(NetworkError::SiteOutOfRange { site: 5, .. })
        ));
        net.add_coupling(1, 0, 1.0).unwrap();
        assert!(matches!(
            net.add_coupling(0, 1, 2.0),
            Err(NetworkError::DuplicateCoupling { a: 0, b: 1 })
        ));
        assert!(matches!(
            net.add_coupling(1, 2, f64::NAN),
            Err(NetworkError::NonFiniteStrength { .. })
        ));
    }

    #[test]
    fn round_trip_uniform_and_diamond() {
        let net = build_uniform_chain(5, 0.3, -0.25).unwrap();
        let back = SpinNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(net, back);

        let net = build_diamond_chain(3).unwrap();
        let back = SpinNetwork::from_json(&net.to_json()).unwrap();
        assert_eq!(net, back);
        assert_eq!(back.strength(2, 3), Some(-1.0));
    }

    #[test]
    fn document_out_of_range_site_rejected() {
        let net = build_uniform_chain(3, 0.0, 0.0).unwrap();
        let mut doc = net.to_document();
        doc.couplings.push((0, 9, 1.0));
        assert!(matches!(
            SpinNetwork::from_document(&doc),
            Err(NetworkError::InvalidDocument(_))
        ));
    }

    #[test]
    fn document_malformed_text_rejected() {
        let err = SpinNetwork::from_json("{ not json").unwrap_err();
        assert!(matches!(err, NetworkError::Parse(_)));
    }

    #[test]
    fn document_version_gate() {
        let net = build_uniform_chain(3, 0.0, 0.0).unwrap();
        let mut doc = net.to_document();
        doc.version = 99;
        assert!(matches!(
            SpinNetwork::from_document(&doc),
            Err(NetworkError::UnsupportedVersion { got: 99, .. })
        ));
    }

    #[test]
    fn resolve_selectors() {
        let net = build_diamond_chain(2).unwrap();
        assert_eq!(
            net.resolve(&SiteSelector::plane("lower-leg")).unwrap(),
            vec![2, 5]
        );
        assert_eq!(
            net.resolve(&SiteSelector::Planes(vec![
                "upper-leg".into(),
                "lower-leg".into()
            ]))
            .unwrap(),
            vec![1, 2, 4, 5]
        );
        assert!(matches!(
            net.resolve(&SiteSelector::plane("nope")),
            Err(NetworkError::UnknownPlane(_))
        ));
        assert!(net.resolve(&SiteSelector::Sites(vec![9])).is_err());
    }
}
