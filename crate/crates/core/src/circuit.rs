//! Gate atoms and ordered gate circuits.
//!
//! A circuit is an ordered list of atoms applied first-to-last. The Clifford
//! library is `{X, Z, F, S, C_X, C_Z, C_{X^s Z^t}, SWAP}`; `U(c)` and `D(c)`
//! are the parameterized (generally non-Clifford) one-qudit gates.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::Modulus;
use crate::error::{Error, Result};
use crate::TOL;

/// An exact phase `exp(2πi num/den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Turn {
    pub num: i64,
    pub den: u64,
}

impl Turn {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("turn denominator must be nonzero".into()));
        }
        Ok(Turn { num, den })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.num as f64 / self.den as f64)
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A vector of `d` unit-modulus phases parameterizing `U(c)` and `D(c)`.
///
/// When built from rational turns the exact form is kept alongside the
/// complex values, so shifting and serialization stay exact.
#[derive(Debug, Clone)]
pub struct PhaseVec {
    values: Vec<Complex64>,
    turns: Option<Vec<Turn>>,
}

impl PhaseVec {
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPhaseVector("empty phase vector".into()));
        }
        for (j, v) in values.iter().enumerate() {
            if (v.norm() - 1.0).abs() > TOL {
                return Err(Error::InvalidPhaseVector(format!(
                    "|c_{j}| = {} is not 1",
                    v.norm()
                )));
            }
        }
        Ok(PhaseVec {
            values,
            turns: None,
        })
    }

    pub fn from_turns(turns: Vec<Turn>) -> Result<Self> {
        if turns.is_empty() {
            return Err(Error::InvalidPhaseVector("empty phase vector".into()));
        }
        let values = turns.iter().map(Turn::value).collect();
        Ok(PhaseVec {
            values,
            turns: Some(turns),
        })
    }

    /// The all-ones vector; `U(1,...,1)` is the Fourier transform.
    pub fn all_ones(d: Modulus) -> Self {
        let n = d.get() as usize;
        PhaseVec {
            values: vec![Complex64::new(1.0, 0.0); n],
            turns: Some(vec![Turn { num: 0, den: 1 }; n]),
        }
    }

    /// The diagonal of `S`: `c_j = ω^{j(j+1)/2}`.
    pub fn s_diagonal(d: Modulus) -> Self {
        let turns: Vec<Turn> = (0..d.get())
            .map(|j| Turn {
                num: (j * (j + 1) / 2 % d.get()) as i64,
                den: d.get(),
            })
            .collect();
        PhaseVec::from_turns(turns).expect("d >= 3")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn turns(&self) -> Option<&[Turn]> {
        self.turns.as_deref()
    }

    /// Cyclic forward shift applied `k` times: entry `j` becomes old entry
    /// `j + k mod d`.
    pub fn shift_forward(&self, k: u64) -> Self {
        let d = self.values.len();
        let k = (k as usize) % d;
        let rot = |v: &Vec<Complex64>| -> Vec<Complex64> {
            (0..d).map(|j| v[(j + k) % d]).collect()
        };
        PhaseVec {
            values: rot(&self.values),
            turns: self
                .turns
                .as_ref()
                .map(|t| (0..d).map(|j| t[(j + k) % d]).collect()),
        }
    }

    /// Cyclic backward shift applied `k` times.
    pub fn shift_backward(&self, k: u64) -> Self {
        let d = self.values.len() as u64;
        self.shift_forward(d - k % d)
    }

    pub fn conj(&self) -> Self {
        PhaseVec {
            values: self.values.iter().map(|v| v.conj()).collect(),
            turns: self
                .turns
                .as_ref()
                .map(|t| t.iter().map(|t| Turn { num: -t.num, den: t.den }).collect()),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Serialized entries: exact `p/q` when available, decimal turns otherwise.
    pub fn turn_strings(&self) -> Vec<String> {
        match &self.turns {
            Some(turns) => turns.iter().map(|t| t.to_string()).collect(),
            None => self
                .values
                .iter()
                .map(|v| {
                    let turn = v.arg().rem_euclid(TAU) / TAU;
                    format!("{turn:.15}")
                })
                .collect(),
        }
    }

    /// Parses one serialized entry (`p/q` or a decimal fraction of a turn).
    pub fn parse_turn_entry(text: &str) -> Result<(Complex64, Option<Turn>)> {
        if let Some((p, q)) = text.split_once('/') {
            let num: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad turn `{text}`")))?;
            let den: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad turn `{text}`")))?;
            let t = Turn::new(num, den)?;
            Ok((t.value(), Some(t)))
        } else {
            let turn: f64 = text
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad turn `{text}`")))?;
            Ok((Complex64::from_polar(1.0, TAU * turn), None))
        }
    }

    pub fn parse_entries(entries: &[&str]) -> Result<Self> {
        let mut values = Vec::with_capacity(entries.len());
        let mut turns = Some(Vec::with_capacity(entries.len()));
        for e in entries {
            let (v, t) = Self::parse_turn_entry(e)?;
            values.push(v);
            match (&mut turns, t) {
                (Some(ts), Some(t)) => ts.push(t),
                _ => turns = None,
            }
        }
        if values.is_empty() {
            return Err(Error::InvalidPhaseVector("empty phase vector".into()));
        }
        Ok(PhaseVec { values, turns })
    }
}

/// One gate application. Wires are 0-indexed.
#[derive(Debug, Clone)]
pub enum GateAtom {
    X { wire: usize },
    Z { wire: usize },
    F { wire: usize },
    S { wire: usize },
    Cx { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// Controlled `X^s Z^t` with the first wire as control.
    CPauli { s: u64, t: u64, control: usize, target: usize },
    Swap { a: usize, b: usize },
    Uc { wire: usize, phases: PhaseVec },
    Dc { wire: usize, phases: PhaseVec },
}

impl GateAtom {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            GateAtom::X { wire }
            | GateAtom::Z { wire }
            | GateAtom::F { wire }
            | GateAtom::S { wire }
            | GateAtom::Uc { wire, .. }
            | GateAtom::Dc { wire, .. } => vec![*wire],
            GateAtom::Cx { control, target } => vec![*control, *target],
            GateAtom::CPauli { control, target, .. } => vec![*control, *target],
            GateAtom::Cz { a, b } | GateAtom::Swap { a, b } => vec![*a, *b],
        }
    }

    /// True for members of the Clifford gate library (excludes `Uc`/`Dc`).
    pub fn is_clifford_library(&self) -> bool {
        !matches!(self, GateAtom::Uc { .. } | GateAtom::Dc { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GateAtom::X { .. } => "X",
            GateAtom::Z { .. } => "Z",
            GateAtom::F { .. } => "F",
            GateAtom::S { .. } => "S",
            GateAtom::Cx { .. } => "CX",
            GateAtom::Cz { .. } => "CZ",
            GateAtom::CPauli { .. } => "CP",
            GateAtom::Swap { .. } => "SWAP",
            GateAtom::Uc { .. } => "U",
            GateAtom::Dc { .. } => "D",
        }
    }

    fn validate(&self, d: Modulus, n: usize) -> Result<()> {
        let ws = self.wires();
        for &w in &ws {
            if w >= n {
                return Err(Error::WireOutOfRange { wire: w, n });
            }
        }
        if ws.len() == 2 && ws[0] == ws[1] {
            return Err(Error::DuplicateWire(ws[0]));
        }
        match self {
            GateAtom::Uc { phases, .. } | GateAtom::Dc { phases, .. } => {
                if phases.len() != d.get() as usize {
                    return Err(Error::InvalidPhaseVector(format!(
                        "phase vector has {} entries, expected d={}",
                        phases.len(),
                        d
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// An ordered list of gate atoms over a fixed `(d, n)`.
#[derive(Debug, Clone)]
pub struct GateCircuit {
    d: Modulus,
    n: usize,
    atoms: Vec<GateAtom>,
}

impl GateCircuit {
    pub fn new(d: Modulus, n: usize) -> Self {
        GateCircuit {
            d,
            n,
            atoms: Vec::new(),
        }
    }

    pub fn from_atoms(d: Modulus, n: usize, atoms: Vec<GateAtom>) -> Result<Self> {
        let mut c = GateCircuit::new(d, n);
        for a in atoms {
            c.push(a)?;
        }
        Ok(c)
    }

    pub fn modulus(&self) -> Modulus {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[GateAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn push(&mut self, atom: GateAtom) -> Result<()> {
        atom.validate(self.d, self.n)?;
        self.atoms.push(atom);
        Ok(())
    }

    pub fn extend(&mut self, other: &GateCircuit) -> Result<()> {
        if other.d != self.d || other.n != self.n {
            return Err(Error::DimensionMismatch(format!(
                "circuit (d={}, n={}) vs (d={}, n={})",
                other.d, other.n, self.d, self.n
            )));
        }
        self.atoms.extend(other.atoms.iter().cloned());
        Ok(())
    }

    /// Copies `other`'s atoms with each wire sent through `map`.
    pub fn extend_mapped(&mut self, other: &GateCircuit, map: &dyn Fn(usize) -> usize) -> Result<()> {
        for atom in &other.atoms {
            let mapped = match atom {
                GateAtom::X { wire } => GateAtom::X { wire: map(*wire) },
                GateAtom::Z { wire } => GateAtom::Z { wire: map(*wire) },
                GateAtom::F { wire } => GateAtom::F { wire: map(*wire) },
                GateAtom::S { wire } => GateAtom::S { wire: map(*wire) },
                GateAtom::Cx { control, target } => GateAtom::Cx {
                    control: map(*control),
                    target: map(*target),
                },
                GateAtom::Cz { a, b } => GateAtom::Cz { a: map(*a), b: map(*b) },
                GateAtom::CPauli { s, t, control, target } => GateAtom::CPauli {
                    s: *s,
                    t: *t,
                    control: map(*control),
                    target: map(*target),
                },
                GateAtom::Swap { a, b } => GateAtom::Swap { a: map(*a), b: map(*b) },
                GateAtom::Uc { wire, phases } => GateAtom::Uc {
                    wire: map(*wire),
                    phases: phases.clone(),
                },
                GateAtom::Dc { wire, phases } => GateAtom::Dc {
                    wire: map(*wire),
                    phases: phases.clone(),
                },
            };
            self.push(mapped)?;
        }
        Ok(())
    }

    pub fn is_clifford_library(&self) -> bool {
        self.atoms.iter().all(GateAtom::is_clifford_library)
    }

    /// Formal inverse: atoms reversed, each replaced by positive powers of
    /// itself (`F^{-1} = F^3`, `S^{-1} = S^{d-1}`, ...). `CPauli` inverts via
    /// its `{CX, CZ, S, Z}` expansion; `Uc`/`Dc` are rejected.
    pub fn inverse(&self) -> Result<GateCircuit> {
        let d = self.d.get();
        let mut inv = GateCircuit::new(self.d, self.n);
        for atom in self.atoms.iter().rev() {
            match atom {
                GateAtom::F { wire } => {
                    for _ in 0..3 {
                        inv.push(GateAtom::F { wire: *wire })?;
                    }
                }
                GateAtom::S { wire } => {
                    for _ in 0..d - 1 {
                        inv.push(GateAtom::S { wire: *wire })?;
                    }
                }
                GateAtom::X { wire } => {
                    for _ in 0..d - 1 {
                        inv.push(GateAtom::X { wire: *wire })?;
                    }
                }
                GateAtom::Z { wire } => {
                    for _ in 0..d - 1 {
                        inv.push(GateAtom::Z { wire: *wire })?;
                    }
                }
                GateAtom::Cx { control, target } => {
                    for _ in 0..d - 1 {
                        inv.push(GateAtom::Cx {
                            control: *control,
                            target: *target,
                        })?;
                    }
                }
                GateAtom::Cz { a, b } => {
                    for _ in 0..d - 1 {
                        inv.push(GateAtom::Cz { a: *a, b: *b })?;
                    }
                }
                GateAtom::Swap { a, b } => {
                    inv.push(GateAtom::Swap { a: *a, b: *b })?;
                }
                GateAtom::CPauli { s, t, control, target } => {
                    // Invert the expansion (C_X)^s (C_Z)^t (S Z^{-1})_c^{st}.
                    let st = self.d.mul(*s, *t);
                    for _ in 0..self.d.mul(*s, d - 1) % d {
                        inv.push(GateAtom::Cx {
                            control: *control,
                            target: *target,
                        })?;
                    }
                    for _ in 0..self.d.mul(*t, d - 1) % d {
                        inv.push(GateAtom::Cz {
                            a: *control,
                            b: *target,
                        })?;
                    }
                    for _ in 0..self.d.mul(st, d - 1) % d {
                        inv.push(GateAtom::S { wire: *control })?;
                        inv.push(GateAtom::Z { wire: *control })?;
                    }
                }
                GateAtom::Uc { .. } | GateAtom::Dc { .. } => {
                    return Err(Error::UnsupportedGate(
                        "cannot invert a non-Clifford atom".into(),
                    ))
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Display for GateCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let ws: Vec<String> = a.wires().iter().map(|w| (w + 1).to_string()).collect();
            write!(f, "{}({})", a.kind_name(), ws.join(","))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_vec_rejects_non_unit_entries() {
        assert!(PhaseVec::from_values(vec![Complex64::new(0.5, 0.0)]).is_err());
    }

    #[test]
    fn shift_round_trip() {
        let d = Modulus::new(5).unwrap();
        let c = PhaseVec::s_diagonal(d);
        let shifted = c.shift_forward(3).shift_backward(3);
        assert!(c.approx_eq(&shifted, 1e-15));
        assert_eq!(c.turns().unwrap(), shifted.turns().unwrap());
    }

    #[test]
    fn shift_forward_moves_entries() {
        let d = Modulus::new(3).unwrap();
        let c = PhaseVec::from_turns(vec![
            Turn::new(0, 3).unwrap(),
            Turn::new(1, 3).unwrap(),
            Turn::new(2, 3).unwrap(),
        ])
        .unwrap();
        let s = c.shift_forward(1);
        assert_eq!(s.turns().unwrap()[0], Turn::new(1, 3).unwrap());
        assert_eq!(s.turns().unwrap()[2], Turn::new(0, 3).unwrap());
    }

    #[test]
    fn atom_validation() {
        let d = Modulus::new(3).unwrap();
        let mut c = GateCircuit::new(d, 2);
        assert!(c.push(GateAtom::F { wire: 2 }).is_err());
        assert!(c.push(GateAtom::Cx { control: 1, target: 1 }).is_err());
        assert!(c
            .push(GateAtom::Uc {
                wire: 0,
                phases: PhaseVec::all_ones(Modulus::new(5).unwrap()),
            })
            .is_err());
        assert!(c.push(GateAtom::Cx { control: 0, target: 1 }).is_ok());
    }

    #[test]
    fn turn_parsing() {
        let (v, t) = PhaseVec::parse_turn_entry("1/3").unwrap();
        assert!(t.is_some());
        assert!((v - Complex64::from_polar(1.0, TAU / 3.0)).norm() < 1e-12);
        let (v2, t2) = PhaseVec::parse_turn_entry("0.25").unwrap();
        assert!(t2.is_none());
        assert!((v2 - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }
}
