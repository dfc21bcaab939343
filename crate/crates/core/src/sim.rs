//! Dense complex state-vector simulator over `n` qudits of dimension `d`.
//!
//! This is the ground-truth oracle for every other module: gate matrices are
//! built exactly from their definitions, and every higher-level claim is
//! checked against it at desk scale (`d^n` up to ~10^6 amplitudes).
//!
//! Wire 0 is the most significant base-`d` digit of an amplitude index.
//! States are renormalized after every public operation; measurements can
//! remove the measured wires from the register.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Modulus, PauliWord};
use crate::circuit::{GateAtom, GateCircuit};
use crate::error::{Error, Result};
use crate::TOL;

/// `ω = exp(2πi/d)` raised to `k`.
pub fn omega_pow(d: Modulus, k: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k % d.get()) as f64 / d.get() as f64)
}

/// A dense complex matrix in row-major order. Sized for desk-scale oracles,
/// not performance.
#[derive(Debug, Clone)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * z).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        self.dagger()
            .mul(self)
            .max_abs_diff(&CMat::identity(self.rows))
            < tol
    }

    /// If `self ≈ z·other` for a single scalar `z`, returns `z`. The scalar is
    /// read off at `other`'s largest entry, then verified everywhere.
    pub fn phase_between(&self, other: &CMat, tol: f64) -> Option<Complex64> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let (mut best, mut best_norm) = (0usize, 0.0f64);
        for (i, v) in other.data.iter().enumerate() {
            if v.norm() > best_norm {
                best_norm = v.norm();
                best = i;
            }
        }
        if best_norm < tol {
            return None;
        }
        let z = self.data[best] / other.data[best];
        if self.max_abs_diff(&other.scale(z)) < tol {
            Some(z)
        } else {
            None
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact matrix for a gate atom: `d × d` for one-wire atoms, `d² × d²` for
/// two-wire atoms (first listed wire is the high digit).
pub fn gate_matrix(atom: &GateAtom, d: Modulus) -> Result<CMat> {
    let dd = d.get() as usize;
    let w = omega_pow;
    let m = match atom {
        GateAtom::X { .. } => {
            let mut m = CMat::zeros(dd, dd);
            for j in 0..dd {
                m[((j + 1) % dd, j)] = Complex64::new(1.0, 0.0);
            }
            m
        }
        GateAtom::Z { .. } => {
            let mut m = CMat::zeros(dd, dd);
            for j in 0..dd {
                m[(j, j)] = w(d, j as u64);
            }
            m
        }
        GateAtom::F { .. } => {
            let mut m = CMat::zeros(dd, dd);
            let s = 1.0 / (dd as f64).sqrt();
            for j in 0..dd {
                for k in 0..dd {
                    m[(k, j)] = w(d, (j * k) as u64) * s;
                }
            }
            m
        }
        GateAtom::S { .. } => {
            let mut m = CMat::zeros(dd, dd);
            for j in 0..dd {
                m[(j, j)] = w(d, (j * (j + 1) / 2) as u64);
            }
            m
        }
        GateAtom::Cx { .. } => {
            let mut m = CMat::zeros(dd * dd, dd * dd);
            for j in 0..dd {
                for k in 0..dd {
                    m[(j * dd + (j + k) % dd, j * dd + k)] = Complex64::new(1.0, 0.0);
                }
            }
            m
        }
        GateAtom::Cz { .. } => {
            let mut m = CMat::zeros(dd * dd, dd * dd);
            for j in 0..dd {
                for k in 0..dd {
                    m[(j * dd + k, j * dd + k)] = w(d, (j * k) as u64);
                }
            }
            m
        }
        GateAtom::CPauli { s, t, .. } => {
            // |j⟩|k⟩ -> ω^{st·j(j-1)/2 + t·j·k} |j⟩|k + s·j⟩
            let mut m = CMat::zeros(dd * dd, dd * dd);
            for j in 0..dd as u64 {
                for k in 0..dd as u64 {
                    let tri = if j == 0 { 0 } else { j * (j - 1) / 2 };
                    let phase = d.add(d.mul(d.mul(*s, *t), tri % d.get()), d.mul(d.mul(*t, j), k));
                    let kt = (k + s * j) % d.get();
                    m[((j * d.get() + kt) as usize, (j * d.get() + k) as usize)] =
                        w(d, phase);
                }
            }
            m
        }
        GateAtom::Swap { .. } => {
            let mut m = CMat::zeros(dd * dd, dd * dd);
            for j in 0..dd {
                for k in 0..dd {
                    m[(k * dd + j, j * dd + k)] = Complex64::new(1.0, 0.0);
                }
            }
            m
        }
        GateAtom::Uc { phases, .. } => {
            if phases.len() != dd {
                return Err(Error::InvalidPhaseVector(format!(
                    "phase vector has {} entries, expected {}",
                    phases.len(),
                    dd
                )));
            }
            // U(c) = F · diag(c)
            let mut m = CMat::zeros(dd, dd);
            let s = 1.0 / (dd as f64).sqrt();
            for j in 0..dd {
                for k in 0..dd {
                    m[(k, j)] = phases.values()[j] * w(d, (j * k) as u64) * s;
                }
            }
            m
        }
        GateAtom::Dc { phases, .. } => {
            if phases.len() != dd {
                return Err(Error::InvalidPhaseVector(format!(
                    "phase vector has {} entries, expected {}",
                    phases.len(),
                    dd
                )));
            }
            let mut m = CMat::zeros(dd, dd);
            for j in 0..dd {
                m[(j, j)] = phases.values()[j];
            }
            m
        }
    };
    debug_assert!(m.is_unitary(TOL));
    Ok(m)
}

/// Outcome branch of a projective measurement. `post` is `None` for branches
/// whose probability falls below the zero threshold.
#[derive(Debug, Clone)]
pub struct MeasureBranch {
    pub outcome: usize,
    pub probability: f64,
    pub post: Option<StateVector>,
}

/// How measurement outcomes are selected.
#[derive(Debug, Clone)]
pub enum MeasureMode {
    /// Draw one branch from the outcome distribution.
    Sample { seed: u64 },
    /// Project onto a specific outcome.
    Force { outcome: usize },
    /// Return every branch, including zero-probability ones (flagged).
    Enumerate,
}

const ZERO_PROB: f64 = 1e-12;

/// Normalized dense state on `n` qudits of dimension `d`.
#[derive(Debug, Clone)]
pub struct StateVector {
    d: Modulus,
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `n` wires.
    pub fn zero_state(d: Modulus, n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); (d.get() as usize).pow(n as u32)];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { d, n, amps }
    }

    /// Computational basis state |digits⟩; `digits[0]` is wire 0.
    pub fn basis_state(d: Modulus, digits: &[u64]) -> Result<Self> {
        let n = digits.len();
        let mut st = StateVector::zero_state(d, n);
        st.amps[0] = Complex64::new(0.0, 0.0);
        let idx = index_of(d, digits)?;
        st.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(st)
    }

    /// The uniform superposition |+⟩ on one wire.
    pub fn plus_state(d: Modulus) -> Self {
        let dd = d.get() as usize;
        let a = Complex64::new(1.0 / (dd as f64).sqrt(), 0.0);
        StateVector {
            d,
            n: 1,
            amps: vec![a; dd],
        }
    }

    pub fn from_amps(d: Modulus, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != (d.get() as usize).pow(n as u32) {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector length {} does not match d^n = {}",
                amps.len(),
                (d.get() as usize).pow(n as u32)
            )));
        }
        let mut st = StateVector { d, n, amps };
        st.renormalize()?;
        Ok(st)
    }

    pub fn modulus(&self) -> Modulus {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn renormalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < ZERO_PROB {
            return Err(Error::ZeroNormProjection);
        }
        if (n - 1.0).abs() > 1e-15 {
            let s = 1.0 / n;
            for a in &mut self.amps {
                *a *= s;
            }
        }
        Ok(())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("tensor with different d".into()));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector {
            d: self.d,
            n: self.n + other.n,
            amps,
        })
    }

    /// Appends one fresh wire in the given one-qudit state.
    pub fn append_wire(&self, fresh: &StateVector) -> Result<StateVector> {
        if fresh.n != 1 {
            return Err(Error::DimensionMismatch("fresh wire must be one qudit".into()));
        }
        self.tensor(fresh)
    }

    /// Applies a gate atom on its stored wires.
    pub fn apply(&self, atom: &GateAtom) -> Result<StateVector> {
        let wires = atom.wires();
        for &w in &wires {
            if w >= self.n {
                return Err(Error::WireOutOfRange { wire: w, n: self.n });
            }
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::DuplicateWire(wires[0]));
        }
        let m = gate_matrix(atom, self.d)?;
        let mut out = self.apply_matrix_on_wires(&m, &wires)?;
        out.renormalize()?;
        Ok(out)
    }

    pub fn apply_circuit(&self, circ: &GateCircuit) -> Result<StateVector> {
        if circ.modulus() != self.d || circ.wires() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "circuit (d={}, n={}) vs state (d={}, n={})",
                circ.modulus(),
                circ.wires(),
                self.d,
                self.n
            )));
        }
        let mut st = self.clone();
        for atom in circ.atoms() {
            st = st.apply(atom)?;
        }
        Ok(st)
    }

    /// Applies a square `d^k × d^k` matrix on `k` listed wires (first wire is
    /// the high digit of the matrix index).
    pub fn apply_matrix_on_wires(&self, m: &CMat, wires: &[usize]) -> Result<StateVector> {
        let dd = self.d.get() as usize;
        let k = wires.len();
        let dim = dd.pow(k as u32);
        if m.rows != dim || m.cols != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                m.rows, m.cols
            )));
        }
        let strides: Vec<usize> = wires.iter().map(|&w| dd.pow((self.n - 1 - w) as u32)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        // Iterate over base indices with zeros at the acted-on wires.
        let mut base_indices = Vec::new();
        collect_base_indices(dd, self.n, wires, &mut base_indices);
        let mut gathered = vec![Complex64::new(0.0, 0.0); dim];
        for &base in &base_indices {
            for (g, slot) in gathered.iter_mut().enumerate() {
                let mut idx = base;
                let mut rem = g;
                for s in (0..k).rev() {
                    idx += (rem % dd) * strides[s];
                    rem /= dd;
                }
                *slot = self.amps[idx];
            }
            for row in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, g) in gathered.iter().enumerate() {
                    acc += m[(row, col)] * g;
                }
                let mut idx = base;
                let mut rem = row;
                for s in (0..k).rev() {
                    idx += (rem % dd) * strides[s];
                    rem /= dd;
                }
                out[idx] = acc;
            }
        }
        Ok(StateVector {
            d: self.d,
            n: self.n,
            amps: out,
        })
    }

    /// Multiplies by a global scalar phase (no-op for measurement statistics;
    /// used when rendering exact operator identities).
    pub fn scale_phase(&self, z: Complex64) -> StateVector {
        StateVector {
            d: self.d,
            n: self.n,
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    /// Applies a Pauli word, including its `ω^k` phase.
    pub fn apply_pauli(&self, word: &PauliWord) -> Result<StateVector> {
        if word.modulus() != self.d || word.wires() != self.n {
            return Err(Error::DimensionMismatch("pauli word/state mismatch".into()));
        }
        let mut st = self.clone();
        for w in 0..self.n {
            let (a, b) = (word.z_exp(w), word.x_exp(w));
            if a == 0 && b == 0 {
                continue;
            }
            let m = pauli_letter_matrix(self.d, a, b);
            st = st.apply_matrix_on_wires(&m, &[w])?;
        }
        Ok(st.scale_phase(omega_pow(self.d, word.phase())))
    }

    /// Reorders wires so that new wire `i` is old wire `perm[i]`.
    pub fn permute_wires(&self, perm: &[usize]) -> Result<StateVector> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch("permutation length mismatch".into()));
        }
        let dd = self.d.get() as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut digits = vec![0u64; self.n];
        for (idx, amp) in self.amps.iter().enumerate() {
            digits_of_into(dd, self.n, idx, &mut digits);
            let mut new_idx = 0usize;
            for i in 0..self.n {
                new_idx = new_idx * dd + digits[perm[i]] as usize;
            }
            out[new_idx] = *amp;
        }
        Ok(StateVector {
            d: self.d,
            n: self.n,
            amps: out,
        })
    }

    /// |⟨a|b⟩| — equality of states up to a global phase gives 1.
    pub fn fidelity_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::DimensionMismatch("fidelity on mismatched states".into()));
        }
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm())
    }

    /// Projective measurement of `wires` in an orthonormal `basis` of
    /// `d^{|wires|}` vectors. Post-states are renormalized and the measured
    /// wires are removed from the register.
    pub fn measure(
        &self,
        wires: &[usize],
        basis: &[StateVector],
        mode: MeasureMode,
    ) -> Result<Vec<MeasureBranch>> {
        let dd = self.d.get() as usize;
        let k = wires.len();
        if k == 0 || k >= self.n {
            return Err(Error::Precondition(
                "measurement must leave at least one wire".into(),
            ));
        }
        for &w in wires {
            if w >= self.n {
                return Err(Error::WireOutOfRange { wire: w, n: self.n });
            }
        }
        let dim = dd.pow(k as u32);
        if basis.len() != dim {
            return Err(Error::NonOrthonormalBasis(format!(
                "basis has {} vectors, expected {}",
                basis.len(),
                dim
            )));
        }
        for v in basis {
            if v.n != k || v.d != self.d {
                return Err(Error::NonOrthonormalBasis(
                    "basis vector has wrong shape".into(),
                ));
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let ip: Complex64 = basis[i]
                    .amps
                    .iter()
                    .zip(&basis[j].amps)
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip.norm() - expect).abs() > TOL {
                    return Err(Error::NonOrthonormalBasis(format!(
                        "⟨{i}|{j}⟩ = {ip}"
                    )));
                }
            }
        }

        let outcomes: Vec<usize> = match &mode {
            MeasureMode::Force { outcome } => {
                if *outcome >= dim {
                    return Err(Error::Precondition(format!(
                        "forced outcome {outcome} out of range {dim}"
                    )));
                }
                vec![*outcome]
            }
            _ => (0..dim).collect(),
        };

        let mut branches = Vec::with_capacity(outcomes.len());
        for &o in &outcomes {
            let (p, post) = self.project_branch(wires, &basis[o])?;
            branches.push(MeasureBranch {
                outcome: o,
                probability: p,
                post,
            });
        }

        match mode {
            MeasureMode::Sample { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let r: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = branches.len() - 1;
                for (i, b) in branches.iter().enumerate() {
                    acc += b.probability;
                    if r < acc {
                        chosen = i;
                        break;
                    }
                }
                Ok(vec![branches.swap_remove(chosen)])
            }
            _ => Ok(branches),
        }
    }

    /// Contracts ⟨v| against the listed wires; returns (probability, post).
    fn project_branch(
        &self,
        wires: &[usize],
        v: &StateVector,
    ) -> Result<(f64, Option<StateVector>)> {
        let dd = self.d.get() as usize;
        let rem_wires: Vec<usize> = (0..self.n).filter(|w| !wires.contains(w)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); dd.pow(rem_wires.len() as u32)];
        let mut digits = vec![0u64; self.n];
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            digits_of_into(dd, self.n, idx, &mut digits);
            let mut m_idx = 0usize;
            for &w in wires {
                m_idx = m_idx * dd + digits[w] as usize;
            }
            let mut r_idx = 0usize;
            for &w in &rem_wires {
                r_idx = r_idx * dd + digits[w] as usize;
            }
            out[r_idx] += v.amps[m_idx].conj() * amp;
        }
        let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if p < ZERO_PROB {
            return Ok((p, None));
        }
        let s = 1.0 / p.sqrt();
        for a in &mut out {
            *a *= s;
        }
        Ok((
            p,
            Some(StateVector {
                d: self.d,
                n: rem_wires.len(),
                amps: out,
            }),
        ))
    }

    /// One line per nonzero amplitude: `index_digits re im`, sorted by index.
    pub fn dump(&self) -> String {
        let dd = self.d.get() as usize;
        let mut out = String::new();
        let mut digits = vec![0u64; self.n];
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm() <= ZERO_PROB {
                continue;
            }
            digits_of_into(dd, self.n, idx, &mut digits);
            for &g in digits.iter() {
                let _ = write!(out, "{g}");
            }
            let _ = writeln!(out, " {:.12} {:.12}", amp.re, amp.im);
        }
        out
    }

    /// Parses the `dump` format; the state is renormalized.
    pub fn parse_dump(d: Modulus, n: usize, text: &str) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); (d.get() as usize).pow(n as u32)];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let digits_txt = it
                .next()
                .ok_or_else(|| Error::Parse("empty amplitude line".into()))?;
            if digits_txt.len() != n {
                return Err(Error::Parse(format!(
                    "index `{digits_txt}` has {} digits, expected {n}",
                    digits_txt.len()
                )));
            }
            let mut digits = Vec::with_capacity(n);
            for ch in digits_txt.chars() {
                let v = ch
                    .to_digit(10)
                    .ok_or_else(|| Error::Parse(format!("bad digit `{ch}`")))?
                    as u64;
                if v >= d.get() {
                    return Err(Error::Parse(format!("digit {v} out of range for d={d}")));
                }
                digits.push(v);
            }
            let re: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing real part".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad real part".into()))?;
            let im: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing imaginary part".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad imaginary part".into()))?;
            let idx = index_of(d, &digits)?;
            amps[idx] = Complex64::new(re, im);
        }
        StateVector::from_amps(d, n, amps)
    }
}

fn collect_base_indices(dd: usize, n: usize, wires: &[usize], out: &mut Vec<usize>) {
    let free: Vec<usize> = (0..n).filter(|w| !wires.contains(w)).collect();
    let total = dd.pow(free.len() as u32);
    out.reserve(total);
    for mut rem in 0..total {
        let mut idx = 0usize;
        let mut digits = vec![0usize; n];
        for &w in free.iter().rev() {
            digits[w] = rem % dd;
            rem /= dd;
        }
        for d_ in digits {
            idx = idx * dd + d_;
        }
        out.push(idx);
    }
}

/// Base-`d` digits of an index, wire 0 first.
pub fn digits_of(d: Modulus, n: usize, index: usize) -> Vec<u64> {
    let mut digits = vec![0u64; n];
    digits_of_into(d.get() as usize, n, index, &mut digits);
    digits
}

fn digits_of_into(dd: usize, n: usize, index: usize, out: &mut [u64]) {
    let mut rem = index;
    for w in (0..n).rev() {
        out[w] = (rem % dd) as u64;
        rem /= dd;
    }
}

/// Index of a digit string, wire 0 most significant.
pub fn index_of(d: Modulus, digits: &[u64]) -> Result<usize> {
    let dd = d.get() as usize;
    let mut idx = 0usize;
    for &g in digits {
        if g >= d.get() {
            return Err(Error::Parse(format!("digit {g} out of range for d={d}")));
        }
        idx = idx * dd + g as usize;
    }
    Ok(idx)
}

/// The two-qudit bond `|H⟩ = C_Z |+⟩|+⟩ = (1/d) Σ ω^{jk} |j⟩|k⟩`.
pub fn bond_state(d: Modulus) -> StateVector {
    let plus2 = StateVector::plus_state(d)
        .tensor(&StateVector::plus_state(d))
        .expect("same d");
    plus2.apply(&GateAtom::Cz { a: 0, b: 1 }).expect("in range")
}

/// Dense `Z^a X^b` on one qudit.
pub fn pauli_letter_matrix(d: Modulus, a: u64, b: u64) -> CMat {
    let dd = d.get() as usize;
    let mut m = CMat::zeros(dd, dd);
    for k in 0..dd as u64 {
        let row = (k + b) % d.get();
        m[(row as usize, k as usize)] = omega_pow(d, d.mul(a, row));
    }
    m
}

/// Dense rendering `ω^phase ⊗_w Z^{a_w} X^{b_w}` of a Pauli word.
pub fn pauli_matrix(word: &PauliWord) -> CMat {
    let d = word.modulus();
    let mut m = CMat::identity(1);
    for w in 0..word.wires() {
        m = m.kron(&pauli_letter_matrix(d, word.z_exp(w), word.x_exp(w)));
    }
    m.scale(omega_pow(d, word.phase()))
}

/// Tries to recognize `m ≈ ω^k Z^a X^b` on one qudit; returns `(k, a, b)`.
pub fn match_scaled_pauli(m: &CMat, d: Modulus, tol: f64) -> Option<(u64, u64, u64)> {
    let dd = d.get() as usize;
    if m.rows != dd || m.cols != dd {
        return None;
    }
    // Shift exponent b from the support of column 0.
    let mut b = None;
    for row in 0..dd {
        if m[(row, 0)].norm() > 0.5 {
            if b.is_some() {
                return None;
            }
            b = Some(row as u64);
        }
    }
    let b = b?;
    for a in 0..d.get() {
        for k in 0..d.get() {
            let candidate =
                pauli_letter_matrix(d, a, b).scale(omega_pow(d, k));
            if m.max_abs_diff(&candidate) < tol {
                return Some((k, a, b));
            }
        }
    }
    None
}

/// Dense unitary of a whole circuit, built by applying it to basis columns.
pub fn circuit_matrix(circ: &GateCircuit) -> Result<CMat> {
    let d = circ.modulus();
    let dim = (d.get() as usize).pow(circ.wires() as u32);
    let mut m = CMat::zeros(dim, dim);
    for col in 0..dim {
        let digits = digits_of(d, circ.wires(), col);
        let basis = StateVector::basis_state(d, &digits)?;
        let out = basis.apply_circuit(circ)?;
        for row in 0..dim {
            m[(row, col)] = out.amps()[row];
        }
    }
    Ok(m)
}

/// The computational basis on `k` wires, outcome index = base-d digit string.
pub fn computational_basis(d: Modulus, k: usize) -> Vec<StateVector> {
    let dim = (d.get() as usize).pow(k as u32);
    (0..dim)
        .map(|i| StateVector::basis_state(d, &digits_of(d, k, i)).expect("valid digits"))
        .collect()
}
