//! Constructive Clifford synthesis: any symplectic tableau over `Z_d` is
//! realized as a gate circuit over `{C_X, F, S}` (plus derived macros), up to
//! a global phase.
//!
//! The pipeline mirrors the recursive structure of the underlying group
//! characterization: normalize one wire of a `(Z-image, X-image)` pair to a
//! unit 2×2 determinant, move that wire to the front, realize the first
//! wire's images with controlled-Pauli chains, then recurse on the remaining
//! wires.
//!
//! Sign convention used throughout: the pair handed to the reduction lemmas
//! is `(Z-image, X-image)`, whose symplectic form is `+1`; the first word of
//! the pair lands on `Z ⊗ Q'` and the second on `X ⊗ P'`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Modulus, PauliWord};
use crate::circuit::{GateAtom, GateCircuit};
use crate::error::{Error, Result};
use crate::tableau::{circuit_to_tableau, SymplecticTableau};

/// A 2×2 matrix over `Z_d`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mat2 {
    pub m: [[u64; 2]; 2],
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 { m: [[1, 0], [0, 1]] }
    }

    pub fn from_tableau(t: &SymplecticTableau) -> Result<Self> {
        if t.wires() != 1 {
            return Err(Error::DimensionMismatch("expected a one-wire tableau".into()));
        }
        Ok(Mat2 {
            m: [[t.get(0, 0), t.get(0, 1)], [t.get(1, 0), t.get(1, 1)]],
        })
    }

    pub fn det(&self, d: Modulus) -> u64 {
        d.sub(d.mul(self.m[0][0], self.m[1][1]), d.mul(self.m[0][1], self.m[1][0]))
    }

    pub fn mul(&self, d: Modulus, o: &Mat2) -> Mat2 {
        let mut out = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = d.add(
                    d.mul(self.m[i][0], o.m[0][j]),
                    d.mul(self.m[i][1], o.m[1][j]),
                );
            }
        }
        Mat2 { m: out }
    }

    /// `M(F) = [[0,1],[-1,0]]`.
    pub fn mf(d: Modulus) -> Mat2 {
        Mat2 { m: [[0, 1], [d.get() - 1, 0]] }
    }

    /// `M(S)^k = [[1,k],[0,1]]`.
    pub fn ms_pow(d: Modulus, k: u64) -> Mat2 {
        Mat2 { m: [[1, k % d.get()], [0, 1]] }
    }
}

/// Decomposes a determinant-1 matrix over `Z_d` into a one-wire `{F, S}`
/// circuit whose composed tableau reproduces it exactly.
///
/// Short inputs matching `M(F)^e M(S)^k` are emitted directly; otherwise the
/// matrix is factored as `M(S)^a · L(β) · M(S)^c` with the lower shear
/// `L(β) = M(F) M(S)^{-β} M(F)^{-1}`, prefixed by one `M(F)` rotation when
/// the lower-left entry is zero. Atom count is at most `3(d-1) + 7`.
pub fn sl2_decompose(d: Modulus, m: &Mat2) -> Result<GateCircuit> {
    if m.det(d) != 1 {
        return Err(Error::NotSymplectic(format!(
            "matrix {:?} has determinant {} != 1 mod {}",
            m.m,
            m.det(d),
            d
        )));
    }
    // Peephole: M(F)^e M(S)^k covers the identity, F powers and S powers.
    let mut probe = Mat2::identity();
    for _e in 0..4u32 {
        for k in 0..d.get() {
            if probe.mul(d, &Mat2::ms_pow(d, k)) == *m {
                let mut circ = GateCircuit::new(d, 1);
                for _ in 0..k {
                    circ.push(GateAtom::S { wire: 0 })?;
                }
                for _ in 0.._e {
                    circ.push(GateAtom::F { wire: 0 })?;
                }
                return Ok(circ);
            }
        }
        probe = Mat2::mf(d).mul(d, &probe);
    }

    let mut atoms: Vec<GateAtom> = Vec::new();
    let mut work = *m;
    let mut trailing_f = 0u32;
    if work.m[1][0] == 0 {
        // Rotate so the lower-left entry becomes -m00, which is invertible.
        work = Mat2::mf(d).mul(d, &work);
        trailing_f = 3;
    }
    let beta = work.m[1][0];
    let beta_inv = d.inv(beta).expect("beta nonzero");
    let a = d.mul(d.sub(work.m[0][0], 1), beta_inv);
    let c = d.mul(d.sub(work.m[1][1], 1), beta_inv);
    // work = M(S)^a · M(F) · M(S)^{d-β} · M(F)^3 · M(S)^c; a circuit lists
    // the factors in reverse (leftmost factor acts last).
    for _ in 0..c {
        atoms.push(GateAtom::S { wire: 0 });
    }
    for _ in 0..3 {
        atoms.push(GateAtom::F { wire: 0 });
    }
    for _ in 0..d.sub(0, beta) {
        atoms.push(GateAtom::S { wire: 0 });
    }
    atoms.push(GateAtom::F { wire: 0 });
    for _ in 0..a {
        atoms.push(GateAtom::S { wire: 0 });
    }
    for _ in 0..trailing_f {
        atoms.push(GateAtom::F { wire: 0 });
    }
    GateCircuit::from_atoms(d, 1, atoms)
}

/// Derived gates over the `{F, S, C_X}` alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedKind {
    Z,
    X,
    Cz,
    CPauli { s: u64, t: u64 },
    Swap,
}

/// Expansion of a derived gate into `{F, S, C_X}` atoms, on one canonical
/// wire (`Z`, `X`) or the canonical pair `(0, 1)` (two-qudit kinds).
///
/// Recipes: `Z = F²S^{-1}F²S`, `X = FZ^{-1}F^{-1}`, `C_Z = F₂ C_X F₂^{-1}`,
/// `C_{X^s Z^t} = C_X^s C_Z^t (SZ^{-1})₁^{st}`, and
/// `SWAP = C_X(1,2) C_X(2,1)^{-1} C_X(1,2) F₂²`. Inverses are written as
/// positive powers, so the emitted alphabet is literally `{F, S, C_X}`.
pub fn derived_gate(d: Modulus, kind: DerivedKind) -> GateCircuit {
    let dd = d.get();
    let mut atoms: Vec<GateAtom> = Vec::new();
    let push_z = |atoms: &mut Vec<GateAtom>, wire: usize| {
        // Z = F² S^{-1} F² S, S applied first.
        atoms.push(GateAtom::S { wire });
        atoms.push(GateAtom::F { wire });
        atoms.push(GateAtom::F { wire });
        for _ in 0..dd - 1 {
            atoms.push(GateAtom::S { wire });
        }
        atoms.push(GateAtom::F { wire });
        atoms.push(GateAtom::F { wire });
    };
    let push_cz = |atoms: &mut Vec<GateAtom>| {
        // C_Z = F₂ C_X F₂^{-1}
        for _ in 0..3 {
            atoms.push(GateAtom::F { wire: 1 });
        }
        atoms.push(GateAtom::Cx { control: 0, target: 1 });
        atoms.push(GateAtom::F { wire: 1 });
    };
    let n = match kind {
        DerivedKind::Z => {
            push_z(&mut atoms, 0);
            1
        }
        DerivedKind::X => {
            // X = F Z^{-1} F^{-1}, F^{-1} applied first.
            for _ in 0..3 {
                atoms.push(GateAtom::F { wire: 0 });
            }
            for _ in 0..dd - 1 {
                push_z(&mut atoms, 0);
            }
            atoms.push(GateAtom::F { wire: 0 });
            1
        }
        DerivedKind::Cz => {
            push_cz(&mut atoms);
            2
        }
        DerivedKind::CPauli { s, t } => {
            // (S Z^{-1})₁^{st} first (diagonal), then C_Z^t, then C_X^s.
            let st = d.mul(s, t);
            for _ in 0..st {
                atoms.push(GateAtom::S { wire: 0 });
            }
            let z_power = d.mul(st, dd - 1);
            for _ in 0..z_power {
                push_z(&mut atoms, 0);
            }
            for _ in 0..t % dd {
                push_cz(&mut atoms);
            }
            for _ in 0..s % dd {
                atoms.push(GateAtom::Cx { control: 0, target: 1 });
            }
            2
        }
        DerivedKind::Swap => {
            // SWAP = C_X(1,2) C_X(2,1)^{-1} C_X(1,2) F₂², F₂² applied first.
            atoms.push(GateAtom::F { wire: 1 });
            atoms.push(GateAtom::F { wire: 1 });
            atoms.push(GateAtom::Cx { control: 0, target: 1 });
            for _ in 0..dd - 1 {
                atoms.push(GateAtom::Cx { control: 1, target: 0 });
            }
            atoms.push(GateAtom::Cx { control: 0, target: 1 });
            2
        }
    };
    GateCircuit::from_atoms(d, n, atoms).expect("expansion atoms are in range")
}

impl GateCircuit {
    /// Flattens macro atoms so only `{F, S, C_X}` (and any `Uc`/`Dc`) remain.
    pub fn expand_macros(&self) -> Result<GateCircuit> {
        let d = self.modulus();
        let mut out = GateCircuit::new(d, self.wires());
        for atom in self.atoms() {
            match atom {
                GateAtom::F { .. }
                | GateAtom::S { .. }
                | GateAtom::Cx { .. }
                | GateAtom::Uc { .. }
                | GateAtom::Dc { .. } => out.push(atom.clone())?,
                GateAtom::Z { wire } => {
                    let w = *wire;
                    out.extend_mapped(&derived_gate(d, DerivedKind::Z), &move |_| w)?;
                }
                GateAtom::X { wire } => {
                    let w = *wire;
                    out.extend_mapped(&derived_gate(d, DerivedKind::X), &move |_| w)?;
                }
                GateAtom::Cz { a, b } => {
                    let (a, b) = (*a, *b);
                    out.extend_mapped(&derived_gate(d, DerivedKind::Cz), &move |w| {
                        if w == 0 {
                            a
                        } else {
                            b
                        }
                    })?;
                }
                GateAtom::CPauli { s, t, control, target } => {
                    let (c, tg) = (*control, *target);
                    out.extend_mapped(
                        &derived_gate(d, DerivedKind::CPauli { s: *s, t: *t }),
                        &move |w| if w == 0 { c } else { tg },
                    )?;
                }
                GateAtom::Swap { a, b } => {
                    let (a, b) = (*a, *b);
                    out.extend_mapped(&derived_gate(d, DerivedKind::Swap), &move |w| {
                        if w == 0 {
                            a
                        } else {
                            b
                        }
                    })?;
                }
            }
        }
        Ok(out)
    }
}

/// Result of [`normalize_det_one_row`].
#[derive(Debug, Clone)]
pub struct DetOneRow {
    pub circuit: GateCircuit,
    pub p_out: PauliWord,
    pub q_out: PauliWord,
    pub wire: usize,
}

fn wire_det(d: Modulus, p: &PauliWord, q: &PauliWord, w: usize) -> u64 {
    d.sub(
        d.mul(p.z_exp(w), q.x_exp(w)),
        d.mul(p.x_exp(w), q.z_exp(w)),
    )
}

/// Conjugates a `(p, q)` pair with symplectic form 1 so that some wire `j`
/// carries a 2×2 block of determinant exactly 1.
///
/// Construction: `F S^g` preconditioning on wire `j` when its X exponent is
/// nonzero, then one controlled Pauli from `j` to a second nonzero-det wire
/// `k`. Tie-breaking is fixed for determinism: smallest `j`, then smallest
/// `k`, then lexicographically smallest `(s, t)`.
pub fn normalize_det_one_row(p: &PauliWord, q: &PauliWord) -> Result<DetOneRow> {
    let d = p.modulus();
    let n = p.wires();
    let form = p.symplectic_form(q)?;
    if form != 1 {
        return Err(Error::Precondition(format!(
            "symplectic form is {form}, expected 1"
        )));
    }
    let j = (0..n)
        .find(|&w| wire_det(d, p, q, w) != 0)
        .expect("form 1 forces a nonzero wire determinant");
    let mut circ = GateCircuit::new(d, n);
    if wire_det(d, p, q, j) == 1 {
        return Ok(DetOneRow {
            circuit: circ,
            p_out: p.with_phase(0),
            q_out: q.with_phase(0),
            wire: j,
        });
    }
    let k = (0..n)
        .find(|&w| w != j && wire_det(d, p, q, w) != 0)
        .expect("determinants sum to 1, so a second nonzero wire exists");

    let mut cp = p.with_phase(0);
    let mut cq = q.with_phase(0);
    if cp.x_exp(j) != 0 {
        // F S^g on wire j with g such that a_j + g b_j = 0 clears p's X
        // exponent there; the wire determinant is unchanged.
        let g = d.mul(d.neg(cp.z_exp(j)), d.inv(cp.x_exp(j)).expect("nonzero"));
        for _ in 0..g {
            circ.push(GateAtom::S { wire: j })?;
        }
        circ.push(GateAtom::F { wire: j })?;
        let t = circuit_to_tableau(&circ)?;
        cp = t.conjugate_word(p)?;
        cq = t.conjugate_word(q)?;
    }
    debug_assert_eq!(cp.x_exp(j), 0);
    let (aj, dj) = (cp.z_exp(j), cq.x_exp(j));
    let (ak, bk) = (cp.z_exp(k), cp.x_exp(k));
    debug_assert!(dj != 0 && aj != 0);
    let tau = d.inv(dj).expect("nonzero");
    let mut chosen = None;
    'search: for s in 0..d.get() {
        for t in 0..d.get() {
            if d.add(d.sub(aj, d.mul(s, ak)), d.mul(t, bk)) == tau {
                chosen = Some((s, t));
                break 'search;
            }
        }
    }
    let (s, t) = chosen.expect("(a_k, b_k) != (0,0) makes the equation solvable");
    circ.push(GateAtom::CPauli { s, t, control: j, target: k })?;
    let tab = circuit_to_tableau(&circ)?;
    let p_out = tab.conjugate_word(p)?;
    let q_out = tab.conjugate_word(q)?;
    debug_assert_eq!(wire_det(d, &p_out, &q_out, j), 1);
    let _ = cq;
    Ok(DetOneRow {
        circuit: circ,
        p_out,
        q_out,
        wire: j,
    })
}

/// Result of [`move_to_first_qudit`].
#[derive(Debug, Clone)]
pub struct MoveToFirst {
    pub circuit: GateCircuit,
    /// Image of the first argument: acts as `Z` on wire 1.
    pub z_word: PauliWord,
    /// Image of the second argument: acts as `X` on wire 1.
    pub x_word: PauliWord,
}

/// Conjugates a form-1 pair `(zlike, xlike)` so the first word acts as `Z`
/// and the second as `X` on wire 1: the det-1 normalization, a SWAP to the
/// front, then the one-wire map `M(L) = [[d_j, -c_j], [-b_j, a_j]]`
/// synthesized from `{F, S}`.
pub fn move_to_first_qudit(zlike: &PauliWord, xlike: &PauliWord) -> Result<MoveToFirst> {
    let d = zlike.modulus();
    let norm = normalize_det_one_row(zlike, xlike)?;
    let mut circ = norm.circuit;
    let j = norm.wire;
    if j != 0 {
        circ.push(GateAtom::Swap { a: 0, b: j })?;
    }
    let t_partial = circuit_to_tableau(&circ)?;
    let p = t_partial.conjugate_word(zlike)?;
    let q = t_partial.conjugate_word(xlike)?;
    let (a, b) = (p.z_exp(0) as i64, p.x_exp(0) as i64);
    let (c, dj) = (q.z_exp(0) as i64, q.x_exp(0) as i64);
    let l = Mat2 {
        m: [
            [d.reduce(dj), d.reduce(-c)],
            [d.reduce(-b), d.reduce(a)],
        ],
    };
    let lcirc = sl2_decompose(d, &l)?;
    circ.extend_mapped(&lcirc, &|_| 0)?;
    let tab = circuit_to_tableau(&circ)?;
    let z_word = tab.conjugate_word(zlike)?;
    let x_word = tab.conjugate_word(xlike)?;
    debug_assert_eq!((z_word.z_exp(0), z_word.x_exp(0)), (1, 0));
    debug_assert_eq!((x_word.z_exp(0), x_word.x_exp(0)), (0, 1));
    Ok(MoveToFirst {
        circuit: circ,
        z_word,
        x_word,
    })
}

/// Builds the circuit `U = F₁ Q'_impl F₁^{-1} P'_impl` mapping
/// `X₁ -> bar_x1 = X ⊗ P'` and `Z₁ -> bar_z1 = Z ⊗ Q'` up to phase.
///
/// `P'_impl` chains `C_{X^{b_i} Z^{a_i}}(1 -> i)` over `bar_x1`'s letters,
/// `Q'_impl` the same over `bar_z1`'s. Requires wire-1 blocks exactly `X`
/// and `Z` and symplectic form `(bar_z1, bar_x1) = 1`.
pub fn build_u(bar_x1: &PauliWord, bar_z1: &PauliWord) -> Result<GateCircuit> {
    let d = bar_x1.modulus();
    let n = bar_x1.wires();
    if (bar_x1.z_exp(0), bar_x1.x_exp(0)) != (0, 1)
        || (bar_z1.z_exp(0), bar_z1.x_exp(0)) != (1, 0)
    {
        return Err(Error::Precondition(
            "wire-1 blocks must be exactly X and Z".into(),
        ));
    }
    let form = bar_z1.symplectic_form(bar_x1)?;
    if form != 1 {
        return Err(Error::Precondition(format!(
            "(Z-image, X-image) symplectic form is {form}, expected 1"
        )));
    }
    let mut circ = GateCircuit::new(d, n);
    for i in 1..n {
        let (s, t) = (bar_x1.x_exp(i), bar_x1.z_exp(i));
        if (s, t) != (0, 0) {
            circ.push(GateAtom::CPauli { s, t, control: 0, target: i })?;
        }
    }
    for _ in 0..3 {
        circ.push(GateAtom::F { wire: 0 })?;
    }
    for i in 1..n {
        let (s, t) = (bar_z1.x_exp(i), bar_z1.z_exp(i));
        if (s, t) != (0, 0) {
            circ.push(GateAtom::CPauli { s, t, control: 0, target: i })?;
        }
    }
    circ.push(GateAtom::F { wire: 0 })?;
    Ok(circ)
}

/// Synthesizes a `{F, S, C_X}`-plus-macros circuit whose composed tableau
/// equals the target exactly over `Z_d`.
pub fn synthesize_clifford(target: &SymplecticTableau) -> Result<GateCircuit> {
    if !target.is_symplectic() {
        return Err(Error::NotSymplectic("synthesis target".into()));
    }
    let d = target.modulus();
    let n = target.wires();
    if n == 1 {
        return sl2_decompose(d, &Mat2::from_tableau(target)?);
    }
    let z1_img = target.column_word(0);
    let x1_img = target.column_word(1);
    let moved = move_to_first_qudit(&z1_img, &x1_img)?;
    let t_w = circuit_to_tableau(&moved.circuit)?;
    let t_prime = t_w.matmul(target)?;
    let bar_z1 = t_prime.column_word(0);
    let bar_x1 = t_prime.column_word(1);
    let u_circ = build_u(&bar_x1, &bar_z1)?;
    let t_u = circuit_to_tableau(&u_circ)?;
    let resid = t_u.inverse()?.matmul(&t_prime)?;
    let inner = resid.strip_first_wire()?;
    let inner_circ = synthesize_clifford(&inner)?;

    let mut out = GateCircuit::new(d, n);
    out.extend_mapped(&inner_circ, &|w| w + 1)?;
    out.extend(&u_circ)?;
    out.extend(&moved.circuit.inverse()?)?;
    Ok(out)
}

/// Seeded random circuit over the Clifford library, for round-trip tests and
/// the CLI's random synthesis targets.
pub fn random_library_circuit(d: Modulus, n: usize, len: usize, seed: u64) -> GateCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circ = GateCircuit::new(d, n);
    for _ in 0..len {
        let atom = if n == 1 {
            match rng.gen_range(0..2) {
                0 => GateAtom::F { wire: 0 },
                _ => GateAtom::S { wire: 0 },
            }
        } else {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            match rng.gen_range(0..6) {
                0 => GateAtom::F { wire: a },
                1 => GateAtom::S { wire: a },
                2 => GateAtom::Cx { control: a, target: b },
                3 => GateAtom::Cz { a, b },
                4 => GateAtom::Swap { a, b },
                _ => GateAtom::CPauli {
                    s: rng.gen_range(0..d.get()),
                    t: rng.gen_range(0..d.get()),
                    control: a,
                    target: b,
                },
            }
        };
        circ.push(atom).expect("atoms are in range");
    }
    circ
}

/// Seeded random symplectic tableau, generated by composing library gates.
pub fn random_symplectic(d: Modulus, n: usize, seed: u64) -> SymplecticTableau {
    let circ = random_library_circuit(d, n, 8 + 4 * n, seed);
    circuit_to_tableau(&circ).expect("library circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::PhaseVec;
    use crate::sim::{circuit_matrix, gate_matrix, omega_pow, pauli_matrix, CMat};
    use crate::tableau::tableau_of_gate;
    use crate::TOL;

    fn d3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    fn all_sl2(d: Modulus) -> Vec<Mat2> {
        let mut out = Vec::new();
        for a in 0..d.get() {
            for b in 0..d.get() {
                for c in 0..d.get() {
                    for e in 0..d.get() {
                        let m = Mat2 { m: [[a, b], [c, e]] };
                        if m.det(d) == 1 {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn sl2_identity_gives_empty_circuit() {
        let d = d3();
        let circ = sl2_decompose(d, &Mat2::identity()).unwrap();
        assert!(circ.is_empty());
    }

    #[test]
    fn sl2_fourier_gives_single_f() {
        let d = d3();
        let circ = sl2_decompose(d, &Mat2::mf(d)).unwrap();
        assert_eq!(circ.len(), 1);
        assert!(matches!(circ.atoms()[0], GateAtom::F { wire: 0 }));
    }

    #[test]
    fn sl2_rejects_det_not_one() {
        let d = d3();
        let bad = Mat2 { m: [[1, 0], [0, 2]] };
        assert!(sl2_decompose(d, &bad).is_err());
    }

    #[test]
    fn sl2_complete_enumeration() {
        // Every element of SL(2,Z_3) (24) and SL(2,Z_5) (120) round-trips and
        // obeys the documented length bound 3(d-1)+7.
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            let all = all_sl2(d);
            assert_eq!(all.len() as u64, dd * (dd * dd - 1));
            for m in all {
                let circ = sl2_decompose(d, &m).unwrap();
                assert!(circ.len() as u64 <= 3 * (dd - 1) + 7);
                let t = circuit_to_tableau(&circ).unwrap();
                assert_eq!(Mat2::from_tableau(&t).unwrap(), m, "round trip at d={dd}");
            }
        }
    }

    #[test]
    fn derived_z_matches_dense_z() {
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            let circ = derived_gate(d, DerivedKind::Z);
            let m = circuit_matrix(&circ).unwrap();
            let z = gate_matrix(&GateAtom::Z { wire: 0 }, d).unwrap();
            assert!(m.phase_between(&z, TOL).is_some(), "Z expansion at d={dd}");
        }
    }

    #[test]
    fn derived_x_matches_dense_x() {
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            let circ = derived_gate(d, DerivedKind::X);
            let m = circuit_matrix(&circ).unwrap();
            let x = gate_matrix(&GateAtom::X { wire: 0 }, d).unwrap();
            assert!(m.phase_between(&x, TOL).is_some(), "X expansion at d={dd}");
        }
    }

    #[test]
    fn derived_swap_permutes_basis() {
        let d = d3();
        let circ = derived_gate(d, DerivedKind::Swap);
        let m = circuit_matrix(&circ).unwrap();
        let swap = gate_matrix(&GateAtom::Swap { a: 0, b: 1 }, d).unwrap();
        assert!(m.phase_between(&swap, TOL).is_some());
        // |1⟩|2⟩ -> |2⟩|1⟩ explicitly.
        let st = crate::sim::StateVector::basis_state(d, &[1, 2]).unwrap();
        let out = st.apply_circuit(&circ).unwrap();
        let expect = crate::sim::StateVector::basis_state(d, &[2, 1]).unwrap();
        assert!((out.fidelity_up_to_phase(&expect).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn derived_cpauli_all_parameters() {
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            for s in 0..dd {
                for t in 0..dd {
                    let circ = derived_gate(d, DerivedKind::CPauli { s, t });
                    let m = circuit_matrix(&circ).unwrap();
                    let cp = gate_matrix(
                        &GateAtom::CPauli { s, t, control: 0, target: 1 },
                        d,
                    )
                    .unwrap();
                    assert!(
                        m.phase_between(&cp, TOL).is_some(),
                        "CPauli({s},{t}) at d={dd}"
                    );
                }
            }
        }
    }

    #[test]
    fn cpauli_one_zero_is_cx() {
        let d = d3();
        let cp = gate_matrix(&GateAtom::CPauli { s: 1, t: 0, control: 0, target: 1 }, d).unwrap();
        let cx = gate_matrix(&GateAtom::Cx { control: 0, target: 1 }, d).unwrap();
        assert!(cp.max_abs_diff(&cx) < TOL);
    }

    #[test]
    fn derived_cz_matches_dense() {
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            let circ = derived_gate(d, DerivedKind::Cz);
            let m = circuit_matrix(&circ).unwrap();
            let cz = gate_matrix(&GateAtom::Cz { a: 0, b: 1 }, d).unwrap();
            assert!(m.phase_between(&cz, TOL).is_some(), "CZ expansion at d={dd}");
        }
    }

    #[test]
    fn expansion_contains_only_fscx() {
        let d = d3();
        let mut circ = GateCircuit::new(d, 3);
        circ.push(GateAtom::Swap { a: 0, b: 2 }).unwrap();
        circ.push(GateAtom::CPauli { s: 2, t: 1, control: 1, target: 0 }).unwrap();
        circ.push(GateAtom::Z { wire: 2 }).unwrap();
        circ.push(GateAtom::Cz { a: 2, b: 1 }).unwrap();
        circ.push(GateAtom::X { wire: 0 }).unwrap();
        let flat = circ.expand_macros().unwrap();
        assert!(flat.atoms().iter().all(|a| matches!(
            a,
            GateAtom::F { .. } | GateAtom::S { .. } | GateAtom::Cx { .. }
        )));
        // Re-expansion is a fixed point.
        let again = flat.expand_macros().unwrap();
        assert_eq!(again.len(), flat.len());
        // And the tableau is unchanged by expansion.
        assert_eq!(
            circuit_to_tableau(&circ).unwrap(),
            circuit_to_tableau(&flat).unwrap()
        );
    }

    #[test]
    fn det_one_row_trivial_case() {
        let d = d3();
        let z = PauliWord::z(d, 1, 0).unwrap();
        let x = PauliWord::x(d, 1, 0).unwrap();
        let r = normalize_det_one_row(&z, &x).unwrap();
        assert!(r.circuit.is_empty());
        assert_eq!(r.wire, 0);
    }

    #[test]
    fn det_one_row_two_wire_example() {
        let d = d3();
        // p = Z1² Z2², q = X1 X2: wire dets are 2 and 2, summing to 1 mod 3,
        // so real work is needed.
        let p = PauliWord::from_exps(d, 0, &[2, 0, 2, 0]).unwrap();
        let q = PauliWord::from_exps(d, 0, &[0, 1, 0, 1]).unwrap();
        assert_eq!(p.symplectic_form(&q).unwrap(), 1);
        let r = normalize_det_one_row(&p, &q).unwrap();
        assert!(!r.circuit.is_empty());
        assert_eq!(wire_det(d, &r.p_out, &r.q_out, r.wire), 1);
        // The emitted circuit only uses F, S and CPauli.
        assert!(r.circuit.atoms().iter().all(|a| matches!(
            a,
            GateAtom::F { .. } | GateAtom::S { .. } | GateAtom::CPauli { .. }
        )));
    }

    #[test]
    fn det_one_row_random_pairs() {
        // 200 seeded pairs with form 1 at d=5, n=3, checked by tableau
        // conjugation.
        let d = Modulus::new(5).unwrap();
        let n = 3;
        let mut produced = 0;
        let mut seed = 0u64;
        while produced < 200 {
            seed += 1;
            let t = random_symplectic(d, n, seed);
            let p = t.column_word(0);
            let q = t.column_word(1);
            if p.symplectic_form(&q).unwrap() != 1 {
                continue;
            }
            produced += 1;
            let r = normalize_det_one_row(&p, &q).unwrap();
            assert_eq!(wire_det(d, &r.p_out, &r.q_out, r.wire), 1, "seed {seed}");
            let tab = circuit_to_tableau(&r.circuit).unwrap();
            assert_eq!(tab.conjugate_word(&p).unwrap(), r.p_out);
            assert_eq!(tab.conjugate_word(&q).unwrap(), r.q_out);
        }
    }

    #[test]
    fn move_to_first_identity_pair() {
        let d = d3();
        let z = PauliWord::z(d, 1, 0).unwrap();
        let x = PauliWord::x(d, 1, 0).unwrap();
        let mv = move_to_first_qudit(&z, &x).unwrap();
        assert!(mv.circuit.is_empty());
        assert_eq!(mv.z_word, z);
        assert_eq!(mv.x_word, x);
    }

    #[test]
    fn move_to_first_uses_swap_for_second_wire() {
        let d = d3();
        let p = PauliWord::z(d, 2, 1).unwrap();
        let q = PauliWord::x(d, 2, 1).unwrap();
        let mv = move_to_first_qudit(&p, &q).unwrap();
        assert!(mv
            .circuit
            .atoms()
            .iter()
            .any(|a| matches!(a, GateAtom::Swap { .. })));
        assert_eq!((mv.z_word.z_exp(0), mv.z_word.x_exp(0)), (1, 0));
        assert_eq!((mv.x_word.z_exp(0), mv.x_word.x_exp(0)), (0, 1));
        assert!(mv.z_word.exps()[2..].iter().all(|&e| e == 0));
        assert!(mv.x_word.exps()[2..].iter().all(|&e| e == 0));
    }

    #[test]
    fn move_to_first_structural_blocks() {
        // Wire-1 blocks of the outputs are exactly Z = (1,0) and X = (0,1).
        let d = Modulus::new(5).unwrap();
        for seed in 0..50 {
            let t = random_symplectic(d, 2, seed);
            let p = t.column_word(0);
            let q = t.column_word(1);
            let mv = move_to_first_qudit(&p, &q).unwrap();
            assert_eq!((mv.z_word.z_exp(0), mv.z_word.x_exp(0)), (1, 0));
            assert_eq!((mv.x_word.z_exp(0), mv.x_word.x_exp(0)), (0, 1));
        }
    }

    #[test]
    fn build_u_trivial() {
        let d = d3();
        let x1 = PauliWord::x(d, 2, 0).unwrap();
        let z1 = PauliWord::z(d, 2, 0).unwrap();
        let circ = build_u(&x1, &z1).unwrap();
        assert_eq!(
            circuit_to_tableau(&circ).unwrap(),
            SymplecticTableau::identity(d, 2)
        );
    }

    #[test]
    fn build_u_two_wire_example() {
        let d = d3();
        // bar_x1 = X1 X2, bar_z1 = Z1 X2; (P', Q') = (X, X) has form 0.
        let bar_x1 = PauliWord::from_exps(d, 0, &[0, 1, 0, 1]).unwrap();
        let bar_z1 = PauliWord::from_exps(d, 0, &[1, 0, 0, 1]).unwrap();
        let circ = build_u(&bar_x1, &bar_z1).unwrap();
        let t = circuit_to_tableau(&circ).unwrap();
        assert_eq!(t.column_word(1), bar_x1);
        assert_eq!(t.column_word(0), bar_z1);
    }

    #[test]
    fn build_u_random_valid_inputs() {
        // 100 random valid (bar_x1, bar_z1) pairs at d=5, n=3.
        let d = Modulus::new(5).unwrap();
        let mut seed = 1000u64;
        for _ in 0..100 {
            seed += 1;
            let t = random_symplectic(d, 3, seed);
            let z1 = t.column_word(0);
            let x1 = t.column_word(1);
            let mv = move_to_first_qudit(&z1, &x1).unwrap();
            let circ = build_u(&mv.x_word, &mv.z_word).unwrap();
            let tab = circuit_to_tableau(&circ).unwrap();
            assert_eq!(tab.column_word(1), mv.x_word, "seed {seed}");
            assert_eq!(tab.column_word(0), mv.z_word, "seed {seed}");
        }
    }

    #[test]
    fn synthesize_identity_and_s() {
        let d = d3();
        let id = SymplecticTableau::identity(d, 1);
        assert!(synthesize_clifford(&id).unwrap().is_empty());
        let s_target = tableau_of_gate(&GateAtom::S { wire: 0 }, d, 1).unwrap();
        let circ = synthesize_clifford(&s_target).unwrap();
        assert_eq!(circuit_to_tableau(&circ).unwrap(), s_target);
        assert_eq!(circ.len(), 1);
    }

    #[test]
    fn synthesize_rejects_non_symplectic() {
        let d = d3();
        let bad = SymplecticTableau::from_rows(d, 1, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(synthesize_clifford(&bad).is_err());
    }

    #[test]
    fn synthesis_round_trip_random_circuits() {
        // tableau -> circuit -> identical tableau, for d in {3,5}, n <= 3.
        for dd in [3u64, 5] {
            let d = Modulus::new(dd).unwrap();
            for n in 1..=3usize {
                for seed in 0..12u64 {
                    let circ = random_library_circuit(d, n, 12, seed);
                    let target = circuit_to_tableau(&circ).unwrap();
                    let synth = synthesize_clifford(&target).unwrap();
                    assert_eq!(
                        circuit_to_tableau(&synth).unwrap(),
                        target,
                        "d={dd} n={n} seed={seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn synthesized_circuits_conjugate_densely_up_to_omega_power() {
        let d = d3();
        for seed in 100..106u64 {
            let target = random_symplectic(d, 2, seed);
            let circ = synthesize_clifford(&target).unwrap();
            let u = circuit_matrix(&circ).unwrap();
            let udag = u.dagger();
            for col in 0..4 {
                let gen = if col % 2 == 0 {
                    PauliWord::z(d, 2, col / 2).unwrap()
                } else {
                    PauliWord::x(d, 2, col / 2).unwrap()
                };
                let img = target.conjugate_word(&gen).unwrap();
                let lhs = u.mul(&pauli_matrix(&gen)).mul(&udag);
                let z = lhs
                    .phase_between(&pauli_matrix(&img), TOL)
                    .expect("tableau image matches dense conjugation");
                let clean = (0..3).any(|k| (z - omega_pow(d, k)).norm() < TOL);
                assert!(clean, "seed {seed} col {col}: phase {z}");
            }
        }
    }

    #[test]
    fn uc_atoms_are_rejected_by_tableau_paths() {
        let d = d3();
        let mut circ = GateCircuit::new(d, 1);
        circ.push(GateAtom::Uc { wire: 0, phases: PhaseVec::all_ones(d) })
            .unwrap();
        assert!(circuit_to_tableau(&circ).is_err());
    }

    #[test]
    fn sl2_length_bound_holds_at_d7() {
        let d = Modulus::new(7).unwrap();
        for seed in 0..40u64 {
            let t = random_symplectic(d, 1, seed);
            let m = Mat2::from_tableau(&t).unwrap();
            let circ = sl2_decompose(d, &m).unwrap();
            assert!(circ.len() as u64 <= 3 * (7 - 1) + 7);
            assert_eq!(
                Mat2::from_tableau(&circuit_to_tableau(&circ).unwrap()).unwrap(),
                m
            );
        }
    }

    #[test]
    fn circuit_matrix_of_sl2_word_is_unitary() {
        let d = d3();
        let m = Mat2 { m: [[2, 1], [1, 1]] };
        let circ = sl2_decompose(d, &m).unwrap();
        let u = circuit_matrix(&circ).unwrap();
        assert!(u.is_unitary(TOL));
        assert!(u.max_abs_diff(&CMat::identity(3)) > 0.1);
    }
}
