//! Valence-bond and cluster states on chains, grids, and the plus-site, with
//! the site-wise projection between them.
//!
//! A cluster state is one qudit per site, all `|+⟩`, with `C_Z` across every
//! edge. The corresponding valence-bond state carries one `|H⟩ = C_Z|+⟩|+⟩`
//! bond per edge plus optional single-qudit input legs; projecting each
//! site's qudits through `Σ_j |j⟩⟨j|^{⊗k}` recovers the cluster state.

use num_complex::Complex64;

use crate::algebra::Modulus;
use crate::circuit::GateAtom;
use crate::error::{Error, Result};
use crate::sim::{bond_state, digits_of, CMat, StateVector};

/// Largest allowed dense register: `d^total <= 3^12`.
const MAX_AMPS: u64 = 531_441;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Chain(usize),
    Grid(usize, usize),
    Plus,
}

/// A lattice of sites with a neighbor relation. Sites are 0-indexed in code
/// and 1-indexed in lattice files.
#[derive(Debug, Clone)]
pub struct Lattice {
    kind: LatticeKind,
    sites: usize,
    edges: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn chain(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Precondition("chain length must be positive".into()));
        }
        Ok(Lattice {
            kind: LatticeKind::Chain(len),
            sites: len,
            edges: (0..len.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        })
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Precondition("grid dimensions must be positive".into()));
        }
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((at(r, c), at(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((at(r, c), at(r + 1, c)));
                }
            }
        }
        Ok(Lattice {
            kind: LatticeKind::Grid(rows, cols),
            sites: rows * cols,
            edges,
        })
    }

    /// One center site (index 0) with four neighbors.
    pub fn plus() -> Self {
        Lattice {
            kind: LatticeKind::Plus,
            sites: 5,
            edges: vec![(0, 1), (0, 2), (0, 3), (0, 4)],
        }
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parses a lattice description: a `kind` line plus optional
    /// `input <site> <spec>` lines (1-indexed sites, opaque specs).
    pub fn parse_text(text: &str) -> Result<(Lattice, Vec<(usize, String)>)> {
        let mut lattice: Option<Lattice> = None;
        let mut inputs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "kind" => {
                    let lat = match toks.get(1) {
                        Some(&"chain") => {
                            let len = toks
                                .get(2)
                                .ok_or_else(|| Error::Parse("chain needs a length".into()))?
                                .parse()
                                .map_err(|_| Error::Parse("bad chain length".into()))?;
                            Lattice::chain(len)?
                        }
                        Some(&"grid") => {
                            let rows = toks
                                .get(2)
                                .ok_or_else(|| Error::Parse("grid needs rows".into()))?
                                .parse()
                                .map_err(|_| Error::Parse("bad grid rows".into()))?;
                            let cols = toks
                                .get(3)
                                .ok_or_else(|| Error::Parse("grid needs cols".into()))?
                                .parse()
                                .map_err(|_| Error::Parse("bad grid cols".into()))?;
                            Lattice::grid(rows, cols)?
                        }
                        Some(&"plus") => Lattice::plus(),
                        other => {
                            return Err(Error::Parse(format!("unknown lattice kind {other:?}")))
                        }
                    };
                    lattice = Some(lat);
                }
                "input" => {
                    let site: usize = toks
                        .get(1)
                        .ok_or_else(|| Error::Parse("input needs a site".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad input site".into()))?;
                    let spec = toks
                        .get(2)
                        .ok_or_else(|| Error::Parse("input needs a state spec".into()))?;
                    if site == 0 {
                        return Err(Error::Parse("input sites are 1-indexed".into()));
                    }
                    inputs.push((site - 1, spec.to_string()));
                }
                other => return Err(Error::Parse(format!("unknown lattice line `{other}`"))),
            }
        }
        let lattice = lattice.ok_or_else(|| Error::Parse("missing `kind` line".into()))?;
        for (site, _) in &inputs {
            if *site >= lattice.sites {
                return Err(Error::Parse(format!(
                    "input site {} out of range 1..={}",
                    site + 1,
                    lattice.sites
                )));
            }
        }
        Ok((lattice, inputs))
    }
}

fn check_size(d: Modulus, total: usize) -> Result<()> {
    let mut amps: u64 = 1;
    for _ in 0..total {
        amps = amps.saturating_mul(d.get());
        if amps > MAX_AMPS {
            return Err(Error::SizeOverflow(format!(
                "{total} qudits at d={d} exceeds the dense cap"
            )));
        }
    }
    Ok(())
}

fn normalize_inputs(
    lat: &Lattice,
    d: Modulus,
    inputs: &[(usize, StateVector)],
) -> Result<Vec<Option<StateVector>>> {
    let mut slots: Vec<Option<StateVector>> = vec![None; lat.sites];
    for (site, st) in inputs {
        if *site >= lat.sites {
            return Err(Error::WireOutOfRange { wire: *site, n: lat.sites });
        }
        if st.wires() != 1 || st.modulus() != d {
            return Err(Error::DimensionMismatch(
                "lattice inputs must be one-qudit states".into(),
            ));
        }
        slots[*site] = Some(st.clone());
    }
    Ok(slots)
}

/// Cluster state: per-site inputs (default `|+⟩`), then `C_Z` across every
/// edge. Edge order is immaterial since the `C_Z` gates commute.
pub fn build_cluster(
    lat: &Lattice,
    d: Modulus,
    inputs: &[(usize, StateVector)],
) -> Result<StateVector> {
    check_size(d, lat.sites)?;
    let slots = normalize_inputs(lat, d, inputs)?;
    let mut state: Option<StateVector> = None;
    for slot in &slots {
        let site_state = slot.clone().unwrap_or_else(|| StateVector::plus_state(d));
        state = Some(match state {
            None => site_state,
            Some(acc) => acc.tensor(&site_state)?,
        });
    }
    let mut state = state.expect("at least one site");
    for &(a, b) in &lat.edges {
        state = state.apply(&GateAtom::Cz { a, b })?;
    }
    Ok(state)
}

/// Physical layout of a valence-bond register: which qudits belong to which
/// site, in the order (input leg first, then bond halves in edge order).
#[derive(Debug, Clone)]
pub struct VbsLayout {
    pub site_qudits: Vec<Vec<usize>>,
    pub total: usize,
}

/// Tensor product of one `|H⟩` bond per edge plus any input legs.
pub fn build_vbs(
    lat: &Lattice,
    d: Modulus,
    inputs: &[(usize, StateVector)],
) -> Result<(StateVector, VbsLayout)> {
    let slots = normalize_inputs(lat, d, inputs)?;
    let mut site_qudits: Vec<Vec<usize>> = vec![Vec::new(); lat.sites];
    let mut next = 0usize;
    let mut legs: Vec<StateVector> = Vec::new();
    for (site, slot) in slots.iter().enumerate() {
        if let Some(st) = slot {
            site_qudits[site].push(next);
            next += 1;
            legs.push(st.clone());
        }
    }
    for &(a, b) in &lat.edges {
        site_qudits[a].push(next);
        site_qudits[b].push(next + 1);
        next += 2;
    }
    check_size(d, next)?;
    if lat.edges.is_empty() && legs.is_empty() {
        // A single isolated site still needs a qudit: treat it as |+⟩.
        let state = StateVector::plus_state(d);
        site_qudits[0].push(0);
        return Ok((
            state,
            VbsLayout {
                site_qudits,
                total: 1,
            },
        ));
    }
    let mut state: Option<StateVector> = None;
    for leg in &legs {
        state = Some(match state {
            None => leg.clone(),
            Some(acc) => acc.tensor(leg)?,
        });
    }
    let bond = bond_state(d);
    for _ in &lat.edges {
        state = Some(match state {
            None => bond.clone(),
            Some(acc) => acc.tensor(&bond)?,
        });
    }
    Ok((
        state.expect("at least one bond or leg"),
        VbsLayout {
            site_qudits,
            total: next,
        },
    ))
}

/// The site map `Σ_j |j⟩ ⟨j|^{⊗k}` as a `d × d^k` matrix; `k = 1` gives the
/// identity.
pub fn site_projector(d: Modulus, k: usize) -> Result<CMat> {
    if k == 0 {
        return Err(Error::Precondition("site must hold at least one qudit".into()));
    }
    let dd = d.get() as usize;
    let cols = dd.pow(k as u32);
    let mut m = CMat::zeros(dd, cols);
    for j in 0..dd {
        // Column index of |j...j⟩.
        let mut col = 0usize;
        for _ in 0..k {
            col = col * dd + j;
        }
        m[(j, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

/// Applies a `d × d^k` site map to `site_wires`, replacing them with a single
/// logical wire at the position of the smallest one. Renormalizes; a zero
/// projection is an error.
pub fn contract_site(
    state: &StateVector,
    site_wires: &[usize],
    map: &CMat,
) -> Result<StateVector> {
    let d = state.modulus();
    let dd = d.get() as usize;
    let k = site_wires.len();
    if map.rows != dd || map.cols != dd.pow(k as u32) {
        return Err(Error::DimensionMismatch(format!(
            "site map is {}x{}, expected {}x{}",
            map.rows,
            map.cols,
            dd,
            dd.pow(k as u32)
        )));
    }
    let n = state.wires();
    for &w in site_wires {
        if w >= n {
            return Err(Error::WireOutOfRange { wire: w, n });
        }
    }
    let keep: Vec<usize> = (0..n).filter(|w| !site_wires.contains(w)).collect();
    let anchor = *site_wires.iter().min().expect("nonempty");
    let insert_pos = keep.iter().filter(|&&w| w < anchor).count();
    let new_n = keep.len() + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); dd.pow(new_n as u32)];
    for (idx, amp) in state.amps().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let digits = digits_of(d, n, idx);
        let mut col = 0usize;
        for &w in site_wires {
            col = col * dd + digits[w] as usize;
        }
        for j in 0..dd {
            let coeff = map[(j, col)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let mut new_idx = 0usize;
            let mut kpos = 0usize;
            for slot in 0..new_n {
                let digit = if slot == insert_pos {
                    j
                } else {
                    let v = digits[keep[kpos]] as usize;
                    kpos += 1;
                    v
                };
                new_idx = new_idx * dd + digit;
            }
            out[new_idx] += coeff * amp;
        }
    }
    StateVector::from_amps(d, new_n, out)
}

/// Outcome of projecting a valence-bond state site-wise.
#[derive(Debug, Clone)]
pub struct Projection {
    pub state: StateVector,
    pub fidelity: f64,
}

/// Projects the valence-bond state of `lat` down to one logical qudit per
/// site and reports the fidelity against the directly built cluster state.
pub fn project_vbs_to_cluster(
    lat: &Lattice,
    d: Modulus,
    inputs: &[(usize, StateVector)],
) -> Result<Projection> {
    let (mut state, layout) = build_vbs(lat, d, inputs)?;

    // Track ownership of physical slots while sites are contracted one by one.
    #[derive(Clone, Copy, PartialEq)]
    enum Slot {
        Raw(usize),
        Logical(usize),
    }
    let mut slots: Vec<Slot> = (0..layout.total).map(Slot::Raw).collect();
    for site in 0..lat.sites() {
        let wanted = &layout.site_qudits[site];
        let positions: Vec<usize> = wanted
            .iter()
            .map(|orig| {
                slots
                    .iter()
                    .position(|s| *s == Slot::Raw(*orig))
                    .expect("raw slot present until its site is projected")
            })
            .collect();
        let map = site_projector(d, positions.len())?;
        state = contract_site(&state, &positions, &map)?;
        let anchor = *positions.iter().min().expect("nonempty");
        let keep: Vec<Slot> = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(_, s)| *s)
            .collect();
        let insert_pos = slots[..anchor]
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .count();
        slots = keep;
        slots.insert(insert_pos, Slot::Logical(site));
    }
    // Reorder logical wires into site order.
    let perm: Vec<usize> = (0..lat.sites())
        .map(|site| {
            slots
                .iter()
                .position(|s| *s == Slot::Logical(site))
                .expect("every site projected")
        })
        .collect();
    let state = state.permute_wires(&perm)?;
    let cluster = build_cluster(lat, d, inputs)?;
    let fidelity = state.fidelity_up_to_phase(&cluster)?;
    Ok(Projection { state, fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::MeasureMode;
    use crate::TOL;

    fn d3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    #[test]
    fn chain_one_is_plus() {
        let d = d3();
        let lat = Lattice::chain(1).unwrap();
        let st = build_cluster(&lat, d, &[]).unwrap();
        let f = st.fidelity_up_to_phase(&StateVector::plus_state(d)).unwrap();
        assert!((f - 1.0).abs() < TOL);
    }

    #[test]
    fn chain_two_is_bond() {
        let d = d3();
        let lat = Lattice::chain(2).unwrap();
        let st = build_cluster(&lat, d, &[]).unwrap();
        let f = st.fidelity_up_to_phase(&bond_state(d)).unwrap();
        assert!((f - 1.0).abs() < TOL);
    }

    #[test]
    fn cluster_edge_order_is_immaterial() {
        let d = d3();
        let lat = Lattice::chain(3).unwrap();
        let mut reversed = lat.clone();
        reversed.edges.reverse();
        let a = build_cluster(&lat, d, &[]).unwrap();
        let b = build_cluster(&reversed, d, &[]).unwrap();
        let max_diff = a
            .amps()
            .iter()
            .zip(b.amps())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0f64, f64::max);
        assert!(max_diff < TOL);
    }

    #[test]
    fn vbs_single_bond_and_norms() {
        let d = d3();
        let lat = Lattice::chain(2).unwrap();
        let (st, layout) = build_vbs(&lat, d, &[]).unwrap();
        assert_eq!(layout.total, 2);
        assert!((st.norm() - 1.0).abs() < TOL);
        assert!((st.fidelity_up_to_phase(&bond_state(d)).unwrap() - 1.0).abs() < TOL);
        let lat3 = Lattice::chain(3).unwrap();
        let (st3, layout3) = build_vbs(&lat3, d, &[]).unwrap();
        assert_eq!(layout3.total, 4);
        assert!((st3.norm() - 1.0).abs() < TOL);
        let two_bonds = bond_state(d).tensor(&bond_state(d)).unwrap();
        assert!((st3.fidelity_up_to_phase(&two_bonds).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn site_projector_examples() {
        let d = d3();
        // k = 1 is the identity.
        let p1 = site_projector(d, 1).unwrap();
        assert!(p1.max_abs_diff(&CMat::identity(3)) < TOL);
        // Off-diagonal inputs are killed.
        let st = StateVector::basis_state(d, &[0, 1]).unwrap();
        let p2 = site_projector(d, 2).unwrap();
        assert!(matches!(
            contract_site(&st, &[0, 1], &p2),
            Err(Error::ZeroNormProjection)
        ));
        // |H⟩ projects to Σ_j ω^{j²}|j⟩ up to norm.
        let h = bond_state(d);
        let out = contract_site(&h, &[0, 1], &p2).unwrap();
        let expect: Vec<Complex64> = (0..3u64)
            .map(|j| crate::sim::omega_pow(d, (j * j) % 3))
            .collect();
        let expect = StateVector::from_amps(d, 1, expect).unwrap();
        assert!((out.fidelity_up_to_phase(&expect).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn projector_co_embedding_is_idempotent() {
        // V†V is a projector on the site register: (V†V)² = V†V.
        let d = d3();
        for k in 1..=3usize {
            let v = site_projector(d, k).unwrap();
            let vdag_v = v.dagger().mul(&v);
            assert!(vdag_v.mul(&vdag_v).max_abs_diff(&vdag_v) < TOL);
        }
    }

    #[test]
    fn single_bond_with_inputs_projects_to_cz() {
        let d = d3();
        let lat = Lattice::chain(2).unwrap();
        let psi = StateVector::from_amps(
            d,
            1,
            vec![
                Complex64::new(0.6, 0.1),
                Complex64::new(0.2, -0.4),
                Complex64::new(0.5, 0.3),
            ],
        )
        .unwrap();
        let phi = StateVector::from_amps(
            d,
            1,
            vec![
                Complex64::new(0.1, 0.0),
                Complex64::new(0.7, 0.2),
                Complex64::new(-0.3, 0.4),
            ],
        )
        .unwrap();
        let inputs = vec![(0usize, psi.clone()), (1usize, phi.clone())];
        let proj = project_vbs_to_cluster(&lat, d, &inputs).unwrap();
        assert!((proj.fidelity - 1.0).abs() < TOL);
        let direct = psi
            .tensor(&phi)
            .unwrap()
            .apply(&GateAtom::Cz { a: 0, b: 1 })
            .unwrap();
        assert!((proj.state.fidelity_up_to_phase(&direct).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn chains_project_to_clusters() {
        let d = d3();
        for len in 2..=4usize {
            let lat = Lattice::chain(len).unwrap();
            let proj = project_vbs_to_cluster(&lat, d, &[]).unwrap();
            assert!((proj.fidelity - 1.0).abs() < TOL, "chain({len})");
        }
    }

    #[test]
    fn grid_projects_to_cluster() {
        let d = d3();
        let lat = Lattice::grid(2, 2).unwrap();
        let proj = project_vbs_to_cluster(&lat, d, &[]).unwrap();
        assert!((proj.fidelity - 1.0).abs() < TOL);
    }

    #[test]
    fn plus_site_projects_and_decomposes_sequentially() {
        let d = d3();
        let lat = Lattice::plus();
        let proj = project_vbs_to_cluster(&lat, d, &[]).unwrap();
        assert!((proj.fidelity - 1.0).abs() < TOL);

        // One-shot Π on four qudits equals the sequential pairwise merges.
        let p2 = site_projector(d, 2).unwrap();
        let p4 = site_projector(d, 4).unwrap();
        let id = CMat::identity(3);
        let step1 = p2.kron(&id).kron(&id); // merge (1,2) -> a
        let step2 = p2.kron(&id); // merge (a,3) -> b
        let step3 = p2.clone(); // merge (b,4) -> c
        let sequential = step3.mul(&step2).mul(&step1);
        assert!(sequential.max_abs_diff(&p4) < TOL);
    }

    #[test]
    fn size_cap_enforced() {
        let d = Modulus::new(7).unwrap();
        let lat = Lattice::grid(3, 3).unwrap();
        // 9 sites, 12 edges -> 24 bond qudits at d=7 blows the dense cap.
        assert!(matches!(
            build_vbs(&lat, d, &[]),
            Err(Error::SizeOverflow(_))
        ));
    }

    #[test]
    fn lattice_parsing() {
        let (lat, inputs) = Lattice::parse_text("kind chain 4\ninput 1 psi.state\n").unwrap();
        assert_eq!(lat.kind(), LatticeKind::Chain(4));
        assert_eq!(inputs, vec![(0usize, "psi.state".to_string())]);
        let (grid, _) = Lattice::parse_text("# comment\nkind grid 2 2\n").unwrap();
        assert_eq!(grid.sites(), 4);
        assert_eq!(grid.edges().len(), 4);
        let (plus, _) = Lattice::parse_text("kind plus").unwrap();
        assert_eq!(plus.sites(), 5);
        assert!(Lattice::parse_text("kind triangle 3").is_err());
        assert!(Lattice::parse_text("input 1 x").is_err());
    }

    #[test]
    fn projected_cluster_measures_like_direct_cluster() {
        // Sanity cross-check through the measurement path.
        let d = d3();
        let lat = Lattice::chain(3).unwrap();
        let proj = project_vbs_to_cluster(&lat, d, &[]).unwrap();
        let direct = build_cluster(&lat, d, &[]).unwrap();
        let basis = crate::sim::computational_basis(d, 1);
        let a = proj.state.measure(&[0], &basis, MeasureMode::Enumerate).unwrap();
        let b = direct.measure(&[0], &basis, MeasureMode::Enumerate).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.probability - y.probability).abs() < TOL);
        }
    }
}
