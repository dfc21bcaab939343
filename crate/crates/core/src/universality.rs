//! One-qudit universality toolkit: mutually unbiased eigenbases of `d + 1`
//! Pauli operators, the rank-`d²` Hermitian projector set built from them,
//! diagonal gates from `U(c)`, and Clifford-conjugated rotations
//! `exp(iθ|λ⟩⟨λ|)` about Pauli eigenvectors.

use num_complex::Complex64;

use crate::algebra::{Modulus, PauliWord};
use crate::circuit::{GateAtom, GateCircuit, PhaseVec};
use crate::error::{Error, Result};
use crate::sim::{circuit_matrix, omega_pow, pauli_matrix, CMat, StateVector};
use crate::synthesis::{sl2_decompose, Mat2};
use crate::TOL;

/// `d + 1` orthonormal bases of one-qudit vectors, pairwise unbiased.
#[derive(Debug, Clone)]
pub struct MubFamily {
    d: Modulus,
    /// Basis 0 is the `Z` eigenbasis (computational); basis `k + 1` is the
    /// eigenbasis of `X Z^k`. Vectors are indexed by eigenvalue exponent.
    bases: Vec<Vec<StateVector>>,
}

impl MubFamily {
    pub fn modulus(&self) -> Modulus {
        self.d
    }

    pub fn bases(&self) -> &[Vec<StateVector>] {
        &self.bases
    }
}

/// Eigenvector of a non-identity one-qudit Pauli word with eigenvalue `ω^j`,
/// computed from the spectral projector `(1/d) Σ_m ω^{-jm} M^m`.
///
/// The phase convention makes the first nonzero component real positive.
pub fn pauli_eigenvector(word: &PauliWord, j: u64) -> Result<StateVector> {
    let d = word.modulus();
    if word.wires() != 1 {
        return Err(Error::DimensionMismatch("expected a one-qudit word".into()));
    }
    if word.is_phase_only() {
        return Err(Error::Precondition(
            "identity word has no distinguished eigenbasis".into(),
        ));
    }
    let dd = d.get() as usize;
    let m = pauli_matrix(word);
    // Accumulate Σ_m ω^{-jm} M^m.
    let mut proj = CMat::zeros(dd, dd);
    let mut power = CMat::identity(dd);
    for k in 0..d.get() {
        let w = omega_pow(d, d.mul(d.neg(j), k));
        for (slot, v) in proj.data.iter_mut().zip(&power.data) {
            *slot += w * v;
        }
        if k + 1 < d.get() {
            power = m.mul(&power);
        }
    }
    // Apply to the first probe column with a nonzero image.
    for probe in 0..dd {
        let col: Vec<Complex64> = (0..dd).map(|r| proj[(r, probe)]).collect();
        let norm: f64 = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let lead = col
                .iter()
                .find(|a| a.norm() > 1e-9)
                .expect("nonzero column");
            let fix = lead.conj() / lead.norm();
            let amps: Vec<Complex64> = col.iter().map(|a| a * fix / norm).collect();
            return StateVector::from_amps(d, 1, amps);
        }
    }
    Err(Error::Precondition(format!(
        "ω^{j} is not in the spectrum of {word}"
    )))
}

/// Eigenbases of `Z, X, XZ, XZ², ..., XZ^{d-1}`, checked unbiased by the
/// tests at `d ∈ {3, 5, 7}`.
pub fn mub_bases(d: Modulus) -> Result<MubFamily> {
    let mut ops: Vec<PauliWord> = vec![PauliWord::z(d, 1, 0)?];
    let x = PauliWord::x(d, 1, 0)?;
    for k in 0..d.get() {
        let zk = PauliWord::single(d, 1, 0, k as i64, 0)?;
        ops.push(x.mul(&zk)?);
    }
    let mut bases = Vec::with_capacity(ops.len());
    for op in &ops {
        let mut basis = Vec::with_capacity(d.get() as usize);
        for j in 0..d.get() {
            basis.push(pauli_eigenvector(op, j)?);
        }
        bases.push(basis);
    }
    Ok(MubFamily { d, bases })
}

/// The `d²` rank-1 projectors: all of basis 0, and vectors `1..d` of every
/// other basis.
pub fn hermitian_basis(mubs: &MubFamily) -> Vec<CMat> {
    let dd = mubs.d.get() as usize;
    let mut out = Vec::with_capacity(dd * dd);
    for (b, basis) in mubs.bases.iter().enumerate() {
        let start = if b == 0 { 0 } else { 1 };
        for v in &basis[start..] {
            let mut p = CMat::zeros(dd, dd);
            for r in 0..dd {
                for c in 0..dd {
                    p[(r, c)] = v.amps()[r] * v.amps()[c].conj();
                }
            }
            out.push(p);
        }
    }
    out
}

/// Numerical rank of a set of matrices viewed as flattened vectors: the
/// count of singular values above `sv_tol`, computed from the Gram matrix.
pub fn matrix_set_rank(set: &[CMat], sv_tol: f64) -> usize {
    let n = set.len();
    let mut gram = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let ip: Complex64 = set[i]
                .data
                .iter()
                .zip(&set[j].data)
                .map(|(a, b)| a.conj() * b)
                .sum();
            // Hermitian inputs give a real symmetric Gram matrix.
            gram[i][j] = ip.re;
        }
    }
    let eigs = jacobi_eigenvalues(gram);
    eigs.into_iter().filter(|&l| l > sv_tol * sv_tol).count()
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let (api, aqi) = (a[p][i], a[q][i]);
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Circuit of `U(c)` atoms whose product is `diag(c)` up to a global phase:
/// `D(c) = F³ U(c)` with `F = U(1,...,1)`, so `U(c)` runs first and three
/// all-ones gates follow.
pub fn diag_from_uc(d: Modulus, c: &PhaseVec) -> Result<GateCircuit> {
    if c.len() != d.get() as usize {
        return Err(Error::InvalidPhaseVector(format!(
            "phase vector has {} entries, expected d={}",
            c.len(),
            d
        )));
    }
    let mut circ = GateCircuit::new(d, 1);
    circ.push(GateAtom::Uc { wire: 0, phases: c.clone() })?;
    for _ in 0..3 {
        circ.push(GateAtom::Uc { wire: 0, phases: PhaseVec::all_ones(d) })?;
    }
    Ok(circ)
}

/// Rewrites a one-wire `{F, S}` word as `U(c)` atoms: `F = U(1,...,1)` and
/// `S = D(ω^{j(j+1)/2})` via [`diag_from_uc`].
fn fs_word_as_uc(circ: &GateCircuit) -> Result<GateCircuit> {
    let d = circ.modulus();
    let mut out = GateCircuit::new(d, circ.wires());
    for atom in circ.atoms() {
        match atom {
            GateAtom::F { wire } => out.push(GateAtom::Uc {
                wire: *wire,
                phases: PhaseVec::all_ones(d),
            })?,
            GateAtom::S { wire } => {
                let w = *wire;
                out.extend_mapped(&diag_from_uc(d, &PhaseVec::s_diagonal(d))?, &move |_| w)?;
            }
            other => {
                return Err(Error::UnsupportedGate(format!(
                    "{} cannot be rewritten over U(c)",
                    other.kind_name()
                )))
            }
        }
    }
    Ok(out)
}

/// Builds `exp(iθ |λ⟩⟨λ|)` as a `U(c)` circuit, where `|λ⟩` is the
/// eigenvector of `pauli` with eigenvalue `ω^{eigen_index}`.
///
/// A Clifford `C` with `C Z C† = ω^φ P` is synthesized over `{F, S}` and
/// rewritten over `U(c)`; the rotation is `C · diag(..., e^{iθ}, ...) · C†`
/// with the `e^{iθ}` entry at slot `eigen_index + φ`, compensating the
/// synthesis phase so the eigenvalue labeling is canonical.
pub fn rotation_gate(pauli: &PauliWord, eigen_index: u64, theta: f64) -> Result<GateCircuit> {
    let d = pauli.modulus();
    if pauli.wires() != 1 {
        return Err(Error::DimensionMismatch("expected a one-qudit word".into()));
    }
    if pauli.is_phase_only() {
        return Err(Error::Precondition(
            "rotation target must be a non-identity Pauli".into(),
        ));
    }
    let (a, b) = (pauli.z_exp(0), pauli.x_exp(0));
    let completion = if a != 0 {
        (0, d.inv(a).expect("nonzero"))
    } else {
        (d.neg(d.inv(b).expect("nonzero")), 0)
    };
    let target = Mat2 {
        m: [[a, completion.0], [b, completion.1]],
    };
    let c_word = sl2_decompose(d, &target)?;

    // Read the conjugation phase off the dense oracle: C Z C† = ω^φ P.
    let c_mat = circuit_matrix(&c_word)?;
    let z_mat = pauli_matrix(&PauliWord::z(d, 1, 0)?);
    let conj = c_mat.mul(&z_mat).mul(&c_mat.dagger());
    let z = conj
        .phase_between(&pauli_matrix(&pauli.with_phase(0)), TOL)
        .ok_or_else(|| Error::Precondition("conjugation did not produce the target".into()))?;
    let phi = (0..d.get())
        .find(|&k| (z - omega_pow(d, k)).norm() < TOL)
        .ok_or_else(|| Error::Precondition("conjugation phase is not a d-th root".into()))?;
    let slot = d.add(eigen_index, phi);

    let mut diag_values = vec![Complex64::new(1.0, 0.0); d.get() as usize];
    diag_values[slot as usize] = Complex64::from_polar(1.0, theta);
    let diag = diag_from_uc(d, &PhaseVec::from_values(diag_values)?)?;

    let mut out = fs_word_as_uc(&c_word.inverse()?)?;
    out.extend(&diag)?;
    out.extend(&fs_word_as_uc(&c_word)?)?;
    Ok(out)
}

/// Dense `exp(iθ |λ⟩⟨λ|) = I + (e^{iθ} - 1)|λ⟩⟨λ|` for a unit vector.
pub fn rank_one_rotation_matrix(lambda: &StateVector, theta: f64) -> CMat {
    let dd = lambda.amps().len();
    let mut m = CMat::identity(dd);
    let scale = Complex64::from_polar(1.0, theta) - Complex64::new(1.0, 0.0);
    for r in 0..dd {
        for c in 0..dd {
            m[(r, c)] += scale * lambda.amps()[r] * lambda.amps()[c].conj();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Modulus {
        Modulus::new(3).unwrap()
    }

    #[test]
    fn z_eigenbasis_is_computational() {
        let d = d3();
        let mubs = mub_bases(d).unwrap();
        for j in 0..3u64 {
            let expect = StateVector::basis_state(d, &[j]).unwrap();
            let f = mubs.bases()[0][j as usize]
                .fidelity_up_to_phase(&expect)
                .unwrap();
            assert!((f - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn mub_family_counts_and_unbiasedness() {
        for dd in [3u64, 5, 7] {
            let d = Modulus::new(dd).unwrap();
            let mubs = mub_bases(d).unwrap();
            assert_eq!(mubs.bases().len() as u64, dd + 1);
            for basis in mubs.bases() {
                assert_eq!(basis.len() as u64, dd);
                for v in basis {
                    assert!((v.norm() - 1.0).abs() < TOL);
                }
            }
            for (bi, basis_a) in mubs.bases().iter().enumerate() {
                for (bj, basis_b) in mubs.bases().iter().enumerate() {
                    for (i, va) in basis_a.iter().enumerate() {
                        for (j, vb) in basis_b.iter().enumerate() {
                            let overlap_sq = va.fidelity_up_to_phase(vb).unwrap().powi(2);
                            let expect = if bi == bj {
                                if i == j {
                                    1.0
                                } else {
                                    0.0
                                }
                            } else {
                                1.0 / dd as f64
                            };
                            assert!(
                                (overlap_sq - expect).abs() < TOL,
                                "d={dd} bases ({bi},{bj}) vectors ({i},{j}): {overlap_sq}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvectors_really_are_eigenvectors() {
        let d = Modulus::new(5).unwrap();
        let word = PauliWord::from_exps(d, 0, &[2, 3]).unwrap();
        let m = pauli_matrix(&word);
        for j in 0..5u64 {
            let v = pauli_eigenvector(&word, j).unwrap();
            let applied = StateVector::from_amps(
                d,
                1,
                (0..5)
                    .map(|r| (0..5).map(|c| m[(r, c)] * v.amps()[c]).sum())
                    .collect(),
            )
            .unwrap();
            let expect = v.scale_phase(omega_pow(d, j));
            let diff: f64 = applied
                .amps()
                .iter()
                .zip(expect.amps())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < TOL, "eigenvalue ω^{j}");
        }
    }

    #[test]
    fn hermitian_set_properties_and_rank() {
        for dd in [3u64, 5, 7] {
            let d = Modulus::new(dd).unwrap();
            let mubs = mub_bases(d).unwrap();
            let set = hermitian_basis(&mubs);
            assert_eq!(set.len() as u64, dd * dd);
            for p in &set {
                // Hermitian, idempotent, trace 1.
                assert!(p.max_abs_diff(&p.dagger()) < TOL);
                assert!(p.mul(p).max_abs_diff(p) < TOL);
                let tr: Complex64 = (0..p.rows).map(|i| p[(i, i)]).sum();
                assert!((tr - Complex64::new(1.0, 0.0)).norm() < TOL);
            }
            assert_eq!(matrix_set_rank(&set, 1e-8), (dd * dd) as usize, "d={dd}");
        }
    }

    #[test]
    fn rank_detects_dependence() {
        let d = d3();
        let mubs = mub_bases(d).unwrap();
        let mut set = hermitian_basis(&mubs);
        // Duplicate one projector; the rank must drop below d².
        set[8] = set[0].clone();
        assert!(matrix_set_rank(&set, 1e-8) < 9);
    }

    #[test]
    fn diag_from_uc_examples() {
        let d = d3();
        // All-ones gives the identity up to phase.
        let circ = diag_from_uc(d, &PhaseVec::all_ones(d)).unwrap();
        let m = circuit_matrix(&circ).unwrap();
        assert!(m.phase_between(&CMat::identity(3), TOL).is_some());
        // The S diagonal reproduces the S gate.
        let circ = diag_from_uc(d, &PhaseVec::s_diagonal(d)).unwrap();
        let m = circuit_matrix(&circ).unwrap();
        let s = crate::sim::gate_matrix(&GateAtom::S { wire: 0 }, d).unwrap();
        assert!(m.phase_between(&s, TOL).is_some());
    }

    #[test]
    fn diag_from_uc_random_at_d5() {
        use rand::{Rng, SeedableRng};
        let d = Modulus::new(5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let values: Vec<Complex64> = (0..5)
            .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU))
            .collect();
        let c = PhaseVec::from_values(values.clone()).unwrap();
        let m = circuit_matrix(&diag_from_uc(d, &c).unwrap()).unwrap();
        let mut expect = CMat::zeros(5, 5);
        for (j, v) in values.iter().enumerate() {
            expect[(j, j)] = *v;
        }
        assert!(m.phase_between(&expect, TOL).is_some());
    }

    #[test]
    fn rotation_about_z_is_diagonal() {
        let d = d3();
        let z = PauliWord::z(d, 1, 0).unwrap();
        let circ = rotation_gate(&z, 0, 0.83).unwrap();
        assert!(circ
            .atoms()
            .iter()
            .all(|a| matches!(a, GateAtom::Uc { .. })));
        let m = circuit_matrix(&circ).unwrap();
        let lambda = StateVector::basis_state(d, &[0]).unwrap();
        let expect = rank_one_rotation_matrix(&lambda, 0.83);
        assert!(m.phase_between(&expect, TOL).is_some());
    }

    #[test]
    fn rotation_zero_angle_is_identity() {
        let d = d3();
        let x = PauliWord::x(d, 1, 0).unwrap();
        let circ = rotation_gate(&x, 1, 0.0).unwrap();
        let m = circuit_matrix(&circ).unwrap();
        assert!(m.phase_between(&CMat::identity(3), TOL).is_some());
    }

    #[test]
    fn rotation_about_x_eigenvector() {
        let d = d3();
        let x = PauliWord::x(d, 1, 0).unwrap();
        let circ = rotation_gate(&x, 1, 0.3).unwrap();
        let m = circuit_matrix(&circ).unwrap();
        let lambda = pauli_eigenvector(&x, 1).unwrap();
        let expect = rank_one_rotation_matrix(&lambda, 0.3);
        assert!(m.phase_between(&expect, TOL).is_some());
    }

    #[test]
    fn rotation_rejects_identity_target() {
        let d = d3();
        let id = PauliWord::identity(d, 1);
        assert!(rotation_gate(&id, 0, 0.5).is_err());
    }

    #[test]
    fn rotations_form_one_parameter_group() {
        let d = Modulus::new(5).unwrap();
        let word = PauliWord::from_exps(d, 0, &[1, 2]).unwrap();
        let (t1, t2) = (0.4, 0.9);
        let r1 = circuit_matrix(&rotation_gate(&word, 2, t1).unwrap()).unwrap();
        let r2 = circuit_matrix(&rotation_gate(&word, 2, t2).unwrap()).unwrap();
        let r12 = circuit_matrix(&rotation_gate(&word, 2, t1 + t2).unwrap()).unwrap();
        assert!(r1.mul(&r2).phase_between(&r12, TOL).is_some());
    }
}
