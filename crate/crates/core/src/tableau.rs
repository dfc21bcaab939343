//! Phase-free Clifford actions as `2n × 2n` symplectic matrices over `Z_d`.
//!
//! Column `2w` holds the image exponent vector of `Z_{w+1}` and column
//! `2w + 1` the image of `X_{w+1}`, in the `(a_1, b_1, ..., a_n, b_n)`
//! layout of [`PauliWord`]. Phases are deliberately not tracked; every
//! phase-sensitive claim routes through the dense simulator.

use std::fmt::Write as _;

use crate::algebra::{Modulus, PauliWord};
use crate::circuit::{GateAtom, GateCircuit};
use crate::error::{Error, Result};

/// A `2n × 2n` matrix over `Z_d` acting on Pauli exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticTableau {
    d: Modulus,
    n: usize,
    /// Row-major, entries reduced mod d.
    m: Vec<u64>,
}

impl SymplecticTableau {
    pub fn identity(d: Modulus, n: usize) -> Self {
        let size = 2 * n;
        let mut m = vec![0u64; size * size];
        for i in 0..size {
            m[i * size + i] = 1;
        }
        SymplecticTableau { d, n, m }
    }

    pub fn from_rows(d: Modulus, n: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let size = 2 * n;
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch(format!(
                "tableau must be {size}x{size}"
            )));
        }
        let mut m = vec![0u64; size * size];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[i * size + j] = d.reduce(v);
            }
        }
        Ok(SymplecticTableau { d, n, m })
    }

    pub fn modulus(&self) -> Modulus {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.m[row * 2 * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: i64) {
        let size = 2 * self.n;
        self.m[row * size + col] = self.d.reduce(v);
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "tableau (d={}, n={}) vs (d={}, n={})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// Plain matrix product `self · other` over `Z_d`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let size = 2 * self.n;
        let d = self.d;
        let mut m = vec![0u64; size * size];
        for i in 0..size {
            for k in 0..size {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..size {
                    let idx = i * size + j;
                    m[idx] = d.add(m[idx], d.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(SymplecticTableau { d, n: self.n, m })
    }

    /// Composition in circuit order: `self` acts first, `later` second.
    pub fn compose(&self, later: &Self) -> Result<Self> {
        later.matmul(self)
    }

    /// `M^T J M = J` with `J` block-diagonal per wire `[[0,1],[-1,0]]`.
    pub fn is_symplectic(&self) -> bool {
        let j = Self::symplectic_form_matrix(self.d, self.n);
        let mt = self.transpose();
        match mt.matmul(&j).and_then(|t| t.matmul(self)) {
            Ok(prod) => prod == j,
            Err(_) => false,
        }
    }

    pub fn transpose(&self) -> Self {
        let size = 2 * self.n;
        let mut m = vec![0u64; size * size];
        for i in 0..size {
            for j in 0..size {
                m[j * size + i] = self.get(i, j);
            }
        }
        SymplecticTableau {
            d: self.d,
            n: self.n,
            m,
        }
    }

    pub fn symplectic_form_matrix(d: Modulus, n: usize) -> Self {
        let mut j = SymplecticTableau {
            d,
            n,
            m: vec![0u64; 4 * n * n],
        };
        for w in 0..n {
            j.set(2 * w, 2 * w + 1, 1);
            j.set(2 * w + 1, 2 * w, -1);
        }
        j
    }

    /// Inverse via the symplectic identity `M^{-1} = -J M^T J`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_symplectic() {
            return Err(Error::NotSymplectic(
                "cannot invert a non-symplectic tableau".into(),
            ));
        }
        let j = Self::symplectic_form_matrix(self.d, self.n);
        let mut out = j.matmul(&self.transpose())?.matmul(&j)?;
        for v in &mut out.m {
            *v = self.d.neg(*v);
        }
        Ok(out)
    }

    /// Image of a word's exponent vector; the result's phase is set to 0.
    pub fn conjugate_word(&self, p: &PauliWord) -> Result<PauliWord> {
        if p.modulus() != self.d || p.wires() != self.n {
            return Err(Error::DimensionMismatch(
                "word does not match tableau shape".into(),
            ));
        }
        let size = 2 * self.n;
        let d = self.d;
        let mut out = vec![0u64; size];
        for (col, &e) in p.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            for (row, slot) in out.iter_mut().enumerate() {
                *slot = d.add(*slot, d.mul(self.get(row, col), e));
            }
        }
        let signed: Vec<i64> = out.iter().map(|&v| v as i64).collect();
        PauliWord::from_exps(d, 0, &signed)
    }

    /// Column `col` as a phase-free word.
    pub fn column_word(&self, col: usize) -> PauliWord {
        let size = 2 * self.n;
        let exps: Vec<i64> = (0..size).map(|row| self.get(row, col) as i64).collect();
        PauliWord::from_exps(self.d, 0, &exps).expect("column has even length")
    }

    /// Extracts the lower-right `2(n-1)` block, checking that wire 1 is fixed
    /// and decoupled from the rest.
    pub fn strip_first_wire(&self) -> Result<SymplecticTableau> {
        let size = 2 * self.n;
        if self.n < 2 {
            return Err(Error::DimensionMismatch("need at least two wires".into()));
        }
        let id_ok = self.get(0, 0) == 1
            && self.get(1, 1) == 1
            && self.get(1, 0) == 0
            && self.get(0, 1) == 0;
        let cross_ok = (2..size).all(|i| {
            self.get(i, 0) == 0 && self.get(i, 1) == 0 && self.get(0, i) == 0 && self.get(1, i) == 0
        });
        if !id_ok || !cross_ok {
            return Err(Error::NotSymplectic(
                "tableau is not block-diagonal on the first wire".into(),
            ));
        }
        let mut out = SymplecticTableau {
            d: self.d,
            n: self.n - 1,
            m: vec![0u64; (size - 2) * (size - 2)],
        };
        for i in 2..size {
            for j in 2..size {
                out.m[(i - 2) * (size - 2) + (j - 2)] = self.get(i, j);
            }
        }
        Ok(out)
    }

    /// Text dump: `d`/`n` header then `2n` rows of `2n` integers.
    pub fn to_text(&self) -> String {
        let size = 2 * self.n;
        let mut out = String::new();
        let _ = writeln!(out, "d {}", self.d);
        let _ = writeln!(out, "n {}", self.n);
        for i in 0..size {
            let row: Vec<String> = (0..size).map(|j| self.get(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut d: Option<Modulus> = None;
        let mut n: Option<usize> = None;
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            match it.next() {
                Some("d") => {
                    let v: u64 = it
                        .next()
                        .ok_or_else(|| Error::Parse("missing d value".into()))?
                        .parse()
                        .map_err(|_| Error::Parse("bad d value".into()))?;
                    d = Some(Modulus::new(v)?);
                }
                Some("n") => {
                    n = Some(
                        it.next()
                            .ok_or_else(|| Error::Parse("missing n value".into()))?
                            .parse()
                            .map_err(|_| Error::Parse("bad n value".into()))?,
                    );
                }
                Some(first) => {
                    let mut row: Vec<i64> = vec![first
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad entry `{first}`")))?];
                    for tok in it {
                        row.push(
                            tok.parse()
                                .map_err(|_| Error::Parse(format!("bad entry `{tok}`")))?,
                        );
                    }
                    rows.push(row);
                }
                None => {}
            }
        }
        let d = d.ok_or_else(|| Error::Parse("missing `d` header".into()))?;
        let n = n.ok_or_else(|| Error::Parse("missing `n` header".into()))?;
        SymplecticTableau::from_rows(d, n, &rows)
    }
}

/// Tableau of one library atom embedded on `n` wires.
///
/// `Uc`/`Dc` atoms are rejected: they are not tableau-representable in
/// general.
pub fn tableau_of_gate(atom: &GateAtom, d: Modulus, n: usize) -> Result<SymplecticTableau> {
    let mut t = SymplecticTableau::identity(d, n);
    let zi = |w: usize| 2 * w;
    let xi = |w: usize| 2 * w + 1;
    match atom {
        // Pauli conjugation only changes phases.
        GateAtom::X { .. } | GateAtom::Z { .. } => {}
        GateAtom::F { wire } => {
            // Z -> X^{-1}, X -> Z
            t.set(zi(*wire), zi(*wire), 0);
            t.set(xi(*wire), zi(*wire), -1);
            t.set(zi(*wire), xi(*wire), 1);
            t.set(xi(*wire), xi(*wire), 0);
        }
        GateAtom::S { wire } => {
            // Z -> Z, X -> ZX
            t.set(zi(*wire), xi(*wire), 1);
        }
        GateAtom::Cx { control, target } => {
            // Z1 -> Z1, X1 -> X1X2, Z2 -> Z1^{-1}Z2, X2 -> X2
            t.set(xi(*target), xi(*control), 1);
            t.set(zi(*control), zi(*target), -1);
        }
        GateAtom::Cz { a, b } => {
            // X1 -> X1Z2, X2 -> Z1X2
            t.set(zi(*b), xi(*a), 1);
            t.set(zi(*a), xi(*b), 1);
        }
        GateAtom::CPauli { s, t: tp, control, target } => {
            // Z1 -> Z1, X1 -> X1 X2^s Z2^t, Z2 -> Z1^{-s} Z2, X2 -> Z1^t X2
            t.set(xi(*target), xi(*control), *s as i64);
            t.set(zi(*target), xi(*control), *tp as i64);
            t.set(zi(*control), zi(*target), -(*s as i64));
            t.set(zi(*control), xi(*target), *tp as i64);
        }
        GateAtom::Swap { a, b } => {
            t.set(zi(*a), zi(*a), 0);
            t.set(xi(*a), xi(*a), 0);
            t.set(zi(*b), zi(*b), 0);
            t.set(xi(*b), xi(*b), 0);
            t.set(zi(*b), zi(*a), 1);
            t.set(xi(*b), xi(*a), 1);
            t.set(zi(*a), zi(*b), 1);
            t.set(xi(*a), xi(*b), 1);
        }
        GateAtom::Uc { .. } | GateAtom::Dc { .. } => {
            return Err(Error::UnsupportedGate(format!(
                "{} is not tableau-representable",
                atom.kind_name()
            )))
        }
    }
    Ok(t)
}

/// Composed tableau of a circuit of library atoms, in circuit order.
pub fn circuit_to_tableau(circ: &GateCircuit) -> Result<SymplecticTableau> {
    let mut acc = SymplecticTableau::identity(circ.modulus(), circ.wires());
    for atom in circ.atoms() {
        let t = tableau_of_gate(atom, circ.modulus(), circ.wires())?;
        acc = t.matmul(&acc)?;
    }
    Ok(acc)
}
