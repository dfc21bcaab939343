//! Exact arithmetic over `Z_d` and the symbolic generalized Pauli group.
//!
//! A Pauli word is stored as a phase exponent `k` of `ω = exp(2πi/d)` plus an
//! exponent vector `(a_1, b_1, ..., a_n, b_n)` representing the normal-ordered
//! operator `ω^k Z_1^{a_1} X_1^{b_1} ... Z_n^{a_n} X_n^{b_n}`. All phase
//! bookkeeping derives from the per-wire reordering rule
//! `X^b Z^a = ω^{-ba} Z^a X^b`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The qudit dimension, restricted to odd primes.
///
/// Values of `Z_d` are kept reduced into `[0, d)` as `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    d: u64,
}

impl Modulus {
    /// Checks primality by trial division and oddness; rejects everything else.
    pub fn new(d: u64) -> Result<Self> {
        if d < 3 || d % 2 == 0 {
            return Err(Error::NotOddPrime(d));
        }
        let mut k = 3;
        while k * k <= d {
            if d % k == 0 {
                return Err(Error::NotOddPrime(d));
            }
            k += 2;
        }
        Ok(Modulus { d })
    }

    pub fn get(&self) -> u64 {
        self.d
    }

    /// Reduces a signed integer into `[0, d)`.
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.d as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.d
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.d - b % self.d) % self.d
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a % self.d) * (b % self.d) % self.d
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.d - a % self.d) % self.d
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        base %= self.d;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.d == 0 {
            None
        } else {
            Some(self.pow(a, self.d - 2))
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// A generalized Pauli word `ω^phase Z_1^{a_1} X_1^{b_1} ... Z_n^{a_n} X_n^{b_n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliWord {
    d: Modulus,
    n: usize,
    phase: u64,
    /// Layout `[a_1, b_1, a_2, b_2, ...]`, all entries reduced mod d.
    exps: Vec<u64>,
}

impl PauliWord {
    pub fn identity(d: Modulus, n: usize) -> Self {
        PauliWord {
            d,
            n,
            phase: 0,
            exps: vec![0; 2 * n],
        }
    }

    /// Builds a word from a raw exponent vector of length `2n`.
    pub fn from_exps(d: Modulus, phase: i64, exps: &[i64]) -> Result<Self> {
        if exps.len() % 2 != 0 || exps.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "exponent vector length {} is not a positive even number",
                exps.len()
            )));
        }
        Ok(PauliWord {
            d,
            n: exps.len() / 2,
            phase: d.reduce(phase),
            exps: exps.iter().map(|&v| d.reduce(v)).collect(),
        })
    }

    /// `Z_wire^zexp X_wire^xexp` on an `n`-wire register.
    pub fn single(d: Modulus, n: usize, wire: usize, zexp: i64, xexp: i64) -> Result<Self> {
        if wire >= n {
            return Err(Error::WireOutOfRange { wire, n });
        }
        let mut w = PauliWord::identity(d, n);
        w.exps[2 * wire] = d.reduce(zexp);
        w.exps[2 * wire + 1] = d.reduce(xexp);
        Ok(w)
    }

    pub fn z(d: Modulus, n: usize, wire: usize) -> Result<Self> {
        Self::single(d, n, wire, 1, 0)
    }

    pub fn x(d: Modulus, n: usize, wire: usize) -> Result<Self> {
        Self::single(d, n, wire, 0, 1)
    }

    pub fn modulus(&self) -> Modulus {
        self.d
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u64 {
        self.phase
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn z_exp(&self, wire: usize) -> u64 {
        self.exps[2 * wire]
    }

    pub fn x_exp(&self, wire: usize) -> u64 {
        self.exps[2 * wire + 1]
    }

    pub fn with_phase(&self, phase: i64) -> Self {
        let mut w = self.clone();
        w.phase = self.d.reduce(phase);
        w
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// True when every exponent is zero (the word is a pure phase).
    pub fn is_phase_only(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "(d={}, n={}) vs (d={}, n={})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// Normal-ordered product. Exponents add mod d; each per-wire reordering
    /// `X^b Z^c -> ω^{-bc} Z^c X^b` contributes to the phase.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let d = self.d;
        let mut phase = d.add(self.phase, other.phase);
        let mut exps = vec![0u64; 2 * self.n];
        for w in 0..self.n {
            let (a1, b1) = (self.exps[2 * w], self.exps[2 * w + 1]);
            let (a2, b2) = (other.exps[2 * w], other.exps[2 * w + 1]);
            phase = d.sub(phase, d.mul(b1, a2));
            exps[2 * w] = d.add(a1, a2);
            exps[2 * w + 1] = d.add(b1, b2);
        }
        Ok(PauliWord {
            d,
            n: self.n,
            phase,
            exps,
        })
    }

    pub fn inverse(&self) -> Self {
        let d = self.d;
        // (ω^k Π Z^a X^b)^{-1} = ω^{-k} Π X^{-b} Z^{-a}; renormalizing each
        // wire picks up ω^{-ab}.
        let mut phase = d.neg(self.phase);
        let mut exps = vec![0u64; 2 * self.n];
        for w in 0..self.n {
            let (a, b) = (self.exps[2 * w], self.exps[2 * w + 1]);
            phase = d.sub(phase, d.mul(a, b));
            exps[2 * w] = d.neg(a);
            exps[2 * w + 1] = d.neg(b);
        }
        PauliWord {
            d,
            n: self.n,
            phase,
            exps,
        }
    }

    /// The symplectic form `(P,Q) = Σ a_i d_i - b_i c_i mod d`, the phase
    /// exponent in `PQ = ω^{(P,Q)} QP`.
    pub fn symplectic_form(&self, other: &Self) -> Result<u64> {
        self.check_compatible(other)?;
        let d = self.d;
        let mut acc = 0u64;
        for w in 0..self.n {
            let t = d.sub(
                d.mul(self.exps[2 * w], other.exps[2 * w + 1]),
                d.mul(self.exps[2 * w + 1], other.exps[2 * w]),
            );
            acc = d.add(acc, t);
        }
        Ok(acc)
    }
}

/// True iff the association `source_i -> image_i` preserves all pairwise
/// symplectic forms.
pub fn is_crp(pairs: &[(PauliWord, PauliWord)]) -> Result<bool> {
    for (s, i) in pairs {
        s.check_compatible(i)?;
    }
    for i in 0..pairs.len() {
        for j in 0..pairs.len() {
            let src = pairs[i].0.symplectic_form(&pairs[j].0)?;
            let img = pairs[i].1.symplectic_form(&pairs[j].1)?;
            if src != img {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl fmt::Display for PauliWord {
    /// Renders e.g. `w^2 Z1 X1^2 Z3` with 1-indexed wires; identity is `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.phase != 0 {
            if self.phase == 1 {
                parts.push("w".into());
            } else {
                parts.push(format!("w^{}", self.phase));
            }
        }
        for w in 0..self.n {
            for (sym, e) in [("Z", self.z_exp(w)), ("X", self.x_exp(w))] {
                if e == 1 {
                    parts.push(format!("{}{}", sym, w + 1));
                } else if e > 1 {
                    parts.push(format!("{}{}^{}", sym, w + 1, e));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Parses the `Display` grammar. Letters are multiplied left to right, so a
/// string like `X1 Z1` denotes the operator product and picks up the
/// reordering phase.
pub fn parse_pauli_word(d: Modulus, n: usize, text: &str) -> Result<PauliWord> {
    let mut word = PauliWord::identity(d, n);
    for tok in text.split_whitespace() {
        if tok == "I" {
            continue;
        }
        let (head, exp) = match tok.split_once('^') {
            Some((h, e)) => {
                let exp: i64 = e
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
                (h, exp)
            }
            None => (tok, 1),
        };
        if head == "w" {
            word = word.with_phase(d.reduce(word.phase as i64 + exp) as i64);
            continue;
        }
        let (sym, wire_txt) = head.split_at(1);
        let wire: usize = wire_txt
            .parse()
            .map_err(|_| Error::Parse(format!("bad wire in `{tok}`")))?;
        if wire == 0 || wire > n {
            return Err(Error::Parse(format!("wire {wire} out of range 1..={n}")));
        }
        let letter = match sym {
            "Z" => PauliWord::single(d, n, wire - 1, exp, 0)?,
            "X" => PauliWord::single(d, n, wire - 1, 0, exp)?,
            _ => return Err(Error::Parse(format!("unknown token `{tok}`"))),
        };
        word = word.mul(&letter)?;
    }
    Ok(word)
}

impl FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d: u64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus `{s}`")))?;
        Modulus::new(d)
    }
}
