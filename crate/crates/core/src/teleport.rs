//! Teleportation-based gate gadgets on valence-bond states: the twisted
//! Bell basis implementing `U(c)`, the three-qudit GHZ-type basis
//! implementing `C_Z`, and the byproduct propagation rules used to track
//! Pauli errors through both.

use crate::algebra::{Modulus, PauliWord};
use crate::circuit::{GateAtom, PhaseVec};
use crate::error::{Error, Result};
use crate::sim::{bond_state, gate_matrix, MeasureMode, StateVector};

/// A tracked Pauli byproduct `Z^z X^x`, recorded as applied after the
/// intended gate; exponents reduced mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ByproductRecord {
    pub z: u64,
    pub x: u64,
}

impl ByproductRecord {
    pub fn new(d: Modulus, z: i64, x: i64) -> Self {
        ByproductRecord {
            z: d.reduce(z),
            x: d.reduce(x),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.z == 0 && self.x == 0
    }

    /// The record as a one-wire Pauli word embedded on `wire` of `n`.
    pub fn word(&self, d: Modulus, n: usize, wire: usize) -> Result<PauliWord> {
        PauliWord::single(d, n, wire, self.z as i64, self.x as i64)
    }

    /// Composition dropping global phase: `self` applied after `earlier`.
    pub fn compose(&self, d: Modulus, earlier: &ByproductRecord) -> ByproductRecord {
        ByproductRecord {
            z: d.add(self.z, earlier.z),
            x: d.add(self.x, earlier.x),
        }
    }
}

/// The twisted generalized Bell basis
/// `B = { (U(c)† X^s Z^t ⊗ I) |H⟩ : s, t ∈ Z_d }`, indexed by `s·d + t`.
pub fn basis_b(d: Modulus, c: &PhaseVec) -> Result<Vec<StateVector>> {
    if c.len() != d.get() as usize {
        return Err(Error::InvalidPhaseVector(format!(
            "phase vector has {} entries, expected d={}",
            c.len(),
            d
        )));
    }
    let h = bond_state(d);
    let uc_dag = gate_matrix(&GateAtom::Uc { wire: 0, phases: c.clone() }, d)?.dagger();
    let mut out = Vec::with_capacity((d.get() * d.get()) as usize);
    for s in 0..d.get() {
        for t in 0..d.get() {
            // Z^t first, then X^s, then U(c)†, all on wire 0.
            let word = PauliWord::single(d, 2, 0, 0, s as i64)?
                .mul(&PauliWord::single(d, 2, 0, t as i64, 0)?)?;
            let v = h.apply_pauli(&word)?.apply_matrix_on_wires(&uc_dag, &[0])?;
            out.push(v);
        }
    }
    Ok(out)
}

/// How teleportation outcomes are selected.
#[derive(Debug, Clone)]
pub enum TeleportMode {
    Enumerate,
    Force(Vec<u64>),
    Sample { seed: u64 },
}

/// One branch of the `U(c)` teleportation gadget.
#[derive(Debug, Clone)]
pub struct UcBranch {
    pub s: u64,
    pub t: u64,
    pub probability: f64,
    pub state: StateVector,
    pub byproduct: ByproductRecord,
}

/// Teleports `input` through one `|H⟩` bond with a joint measurement of the
/// input and the near bond half in the twisted Bell basis. Outcome `(s, t)`
/// leaves the far half in `Z^{-t} X^{-s} U(c) |input⟩` exactly, each with
/// probability `1/d²`.
pub fn teleport_uc(
    input: &StateVector,
    c: &PhaseVec,
    mode: TeleportMode,
) -> Result<Vec<UcBranch>> {
    let d = input.modulus();
    if input.wires() != 1 {
        return Err(Error::DimensionMismatch("input must be one qudit".into()));
    }
    let basis = basis_b(d, c)?;
    let register = input.tensor(&bond_state(d))?;
    let sim_mode = match &mode {
        TeleportMode::Enumerate => MeasureMode::Enumerate,
        TeleportMode::Sample { seed } => MeasureMode::Sample { seed: *seed },
        TeleportMode::Force(o) => {
            if o.len() != 2 || o[0] >= d.get() || o[1] >= d.get() {
                return Err(Error::Precondition(
                    "forced Uc outcome must be (s, t) in Z_d²".into(),
                ));
            }
            MeasureMode::Force {
                outcome: (o[0] * d.get() + o[1]) as usize,
            }
        }
    };
    let branches = register.measure(&[0, 1], &basis, sim_mode)?;
    let mut out = Vec::with_capacity(branches.len());
    for b in branches {
        let s = b.outcome as u64 / d.get();
        let t = b.outcome as u64 % d.get();
        let state = b.post.ok_or(Error::ZeroNormProjection)?;
        out.push(UcBranch {
            s,
            t,
            probability: b.probability,
            state,
            byproduct: ByproductRecord::new(d, -(t as i64), -(s as i64)),
        });
    }
    Ok(out)
}

/// The post-measurement reference `Z^{-t} X^{-s} U(c) |input⟩`.
pub fn uc_reference_state(
    input: &StateVector,
    c: &PhaseVec,
    s: u64,
    t: u64,
) -> Result<StateVector> {
    let d = input.modulus();
    let word = PauliWord::single(d, 1, 0, -(t as i64), -(s as i64))?;
    input
        .apply(&GateAtom::Uc { wire: 0, phases: c.clone() })?
        .apply_pauli(&word)
}

/// The GHZ-type basis
/// `B₂ = { (X^r ⊗ Z^s ⊗ X^t) Σ_m |m⟩|m⟩|m⟩ : r, s, t ∈ Z_d }`,
/// indexed by `r·d² + s·d + t`.
pub fn basis_b2(d: Modulus) -> Vec<StateVector> {
    let dd = d.get() as usize;
    let mut ghz = vec![num_complex::Complex64::new(0.0, 0.0); dd * dd * dd];
    for m in 0..dd {
        ghz[m * dd * dd + m * dd + m] = num_complex::Complex64::new(1.0, 0.0);
    }
    let ghz = StateVector::from_amps(d, 3, ghz).expect("GHZ state is nonzero");
    let mut out = Vec::with_capacity(dd * dd * dd);
    for r in 0..d.get() {
        for s in 0..d.get() {
            for t in 0..d.get() {
                let word = PauliWord::from_exps(
                    d,
                    0,
                    &[0, r as i64, s as i64, 0, 0, t as i64],
                )
                .expect("exponent layout");
                out.push(ghz.apply_pauli(&word).expect("pauli fits register"));
            }
        }
    }
    out
}

/// One branch of the `C_Z` teleportation gadget; `state` lives on the two
/// output qudits.
#[derive(Debug, Clone)]
pub struct CzBranch {
    /// `(r, s, t, u, v, w)`.
    pub outcomes: [u64; 6],
    pub probability: f64,
    pub state: StateVector,
    pub byproducts: (ByproductRecord, ByproductRecord),
}

/// Runs the eight-qudit `C_Z` gadget: inputs on qudits 1 and 5, bonds
/// `(2,6)`, `(3,4)`, `(7,8)` (1-indexed as in the lemma), with qudits
/// `(1,2,3)` and `(5,6,7)` each measured in the GHZ-type basis.
///
/// For outcomes `(r,s,t)` and `(u,v,w)` the output qudits `(4,8)` carry
/// `Z₄^{t-r} Z₈^{w-u} X₄^{s+u} X₈^{v+r} F₄ F₈ C_Z |ψ¹⟩|ψ²⟩` up to a global
/// phase.
pub fn teleport_cz(
    in1: &StateVector,
    in2: &StateVector,
    mode: TeleportMode,
) -> Result<Vec<CzBranch>> {
    let d = in1.modulus();
    if in1.wires() != 1 || in2.wires() != 1 || in2.modulus() != d {
        return Err(Error::DimensionMismatch("inputs must be one-qudit states".into()));
    }
    // Build ψ¹ ⊗ H ⊗ H ⊗ ψ² ⊗ H, then permute into the lemma's layout
    // 1:ψ¹ 2:A.l 3:B.l 4:B.r 5:ψ² 6:A.r 7:C.l 8:C.r.
    let h = bond_state(d);
    let raw = in1
        .tensor(&h)? // 0:ψ¹ 1:A.l 2:A.r
        .tensor(&h)? // 3:B.l 4:B.r
        .tensor(in2)? // 5:ψ²
        .tensor(&h)?; // 6:C.l 7:C.r
    let register = raw.permute_wires(&[0, 1, 3, 4, 5, 2, 6, 7])?;
    let basis = basis_b2(d);

    let (first_mode, second_forced) = match &mode {
        TeleportMode::Enumerate => (MeasureMode::Enumerate, None),
        TeleportMode::Sample { seed } => (MeasureMode::Sample { seed: *seed }, None),
        TeleportMode::Force(o) => {
            if o.len() != 6 || o.iter().any(|&v| v >= d.get()) {
                return Err(Error::Precondition(
                    "forced Cz outcome must be (r,s,t,u,v,w) in Z_d⁶".into(),
                ));
            }
            let first = (o[0] * d.get() + o[1]) * d.get() + o[2];
            let second = (o[3] * d.get() + o[4]) * d.get() + o[5];
            (
                MeasureMode::Force { outcome: first as usize },
                Some(second as usize),
            )
        }
    };

    let dd = d.get();
    let mut out = Vec::new();
    for b1 in register.measure(&[0, 1, 2], &basis, first_mode)? {
        let o1 = b1.outcome as u64;
        let (r, s, t) = (o1 / (dd * dd), o1 / dd % dd, o1 % dd);
        let mid = b1.post.ok_or(Error::ZeroNormProjection)?;
        // Remaining wires are (4,5,6,7,8); measure (5,6,7) = positions 1,2,3.
        let inner_mode = match (&mode, second_forced) {
            (TeleportMode::Enumerate, _) => MeasureMode::Enumerate,
            (TeleportMode::Sample { seed }, _) => MeasureMode::Sample { seed: seed ^ o1 },
            (_, Some(second)) => MeasureMode::Force { outcome: second },
            _ => unreachable!(),
        };
        for b2 in mid.measure(&[1, 2, 3], &basis, inner_mode)? {
            let o2 = b2.outcome as u64;
            let (u, v, w) = (o2 / (dd * dd), o2 / dd % dd, o2 % dd);
            let state = b2.post.ok_or(Error::ZeroNormProjection)?;
            let b4 = ByproductRecord::new(d, t as i64 - r as i64, s as i64 + u as i64);
            let b8 = ByproductRecord::new(d, w as i64 - u as i64, v as i64 + r as i64);
            out.push(CzBranch {
                outcomes: [r, s, t, u, v, w],
                probability: b1.probability * b2.probability,
                state,
                byproducts: (b4, b8),
            });
        }
    }
    Ok(out)
}

/// The lemma's reference output
/// `Z₁^{t-r} Z₂^{w-u} X₁^{s+u} X₂^{v+r} F₁ F₂ C_Z |ψ¹⟩|ψ²⟩` on two qudits.
pub fn cz_reference_state(
    in1: &StateVector,
    in2: &StateVector,
    outcomes: [u64; 6],
) -> Result<StateVector> {
    let d = in1.modulus();
    let [r, s, t, u, v, w] = outcomes.map(|v| v as i64);
    let word1 = PauliWord::single(d, 2, 0, t - r, s + u)?;
    let word2 = PauliWord::single(d, 2, 1, w - u, v + r)?;
    in1.tensor(in2)?
        .apply(&GateAtom::Cz { a: 0, b: 1 })?
        .apply(&GateAtom::F { wire: 0 })?
        .apply(&GateAtom::F { wire: 1 })?
        .apply_pauli(&word1)?
        .apply_pauli(&word2)
}

/// Pushes `Z^z X^x` leftward through `U(c)`:
/// `U(c) Z^z X^x = (Z^x X^{-z}) U(c')` up to phase, with `c'` the entries of
/// `c` cyclically shifted forward `x` times.
pub fn propagate_through_uc(
    d: Modulus,
    err: &ByproductRecord,
    c: &PhaseVec,
) -> (ByproductRecord, PhaseVec) {
    (
        ByproductRecord {
            z: err.x % d.get(),
            x: d.neg(err.z),
        },
        c.shift_forward(err.x),
    )
}

/// Pushes a byproduct pair leftward through `C_Z`: the X parts are
/// unchanged, each Z part gains the partner's X exponent.
pub fn propagate_through_cz(
    d: Modulus,
    err1: &ByproductRecord,
    err2: &ByproductRecord,
) -> (ByproductRecord, ByproductRecord) {
    (
        ByproductRecord {
            z: d.add(err1.z, err2.x),
            x: err1.x,
        },
        ByproductRecord {
            z: d.add(err2.z, err1.x),
            x: err2.x,
        },
    )
}
