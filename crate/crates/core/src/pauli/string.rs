//! Pauli strings in symplectic form.
//!
//! A string is stored as an X-mask and a Z-mask; a qubit with both bits set
//! carries Y. Products return a phase alongside the string so that strings
//! themselves stay Hermitian.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Mask = SmallVec<[u64; 2]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn parse(s: &str) -> Result<Axis> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(Error::Parse(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

/// Power of `i` produced by a product of strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(pub u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    /// Phase as `(re, im)`.
    pub fn value(self) -> (i8, i8) {
        match self.0 & 3 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        }
    }

    pub fn is_real(self) -> bool {
        self.0 & 1 == 0
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 & 3 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) & 3)
    }
}

/// Hermitian tensor product of single-qubit Paulis.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: Mask,
    z: Mask,
}

fn trim(m: &mut Mask) {
    while m.last() == Some(&0) {
        m.pop();
    }
}

fn word(m: &Mask, i: usize) -> u64 {
    m.get(i).copied().unwrap_or(0)
}

fn set_bit(m: &mut Mask, q: usize, on: bool) {
    let (w, b) = (q / 64, q % 64);
    if m.len() <= w {
        m.resize(w + 1, 0);
    }
    if on {
        m[w] |= 1 << b;
    } else {
        m[w] &= !(1 << b);
    }
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Build from `(qubit, axis)` pairs. Repeated qubits are rejected.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Axis)>>(pairs: I) -> Result<Self> {
        let mut s = Self::default();
        for (q, a) in pairs {
            if s.axis(q).is_some() {
                return Err(Error::Parse(format!("qubit {q} repeated in Pauli string")));
            }
            s.set(q, Some(a));
        }
        Ok(s)
    }

    pub fn single(q: usize, a: Axis) -> Self {
        let mut s = Self::default();
        s.set(q, Some(a));
        s
    }

    pub fn set(&mut self, q: usize, a: Option<Axis>) {
        let (xb, zb) = a.map_or((false, false), Axis::bits);
        set_bit(&mut self.x, q, xb);
        set_bit(&mut self.z, q, zb);
        trim(&mut self.x);
        trim(&mut self.z);
    }

    pub fn axis(&self, q: usize) -> Option<Axis> {
        let (w, b) = (q / 64, q % 64);
        let xb = word(&self.x, w) >> b & 1 == 1;
        let zb = word(&self.z, w) >> b & 1 == 1;
        match (xb, zb) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    fn words(&self) -> usize {
        self.x.len().max(self.z.len())
    }

    /// Sorted `(qubit, axis)` pairs of the non-identity factors.
    pub fn pairs(&self) -> Vec<(usize, Axis)> {
        let mut out = Vec::new();
        for w in 0..self.words() {
            let mut m = word(&self.x, w) | word(&self.z, w);
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                let q = w * 64 + b;
                out.push((q, self.axis(q).unwrap()));
            }
        }
        out
    }

    pub fn support(&self) -> Vec<usize> {
        self.pairs().into_iter().map(|(q, _)| q).collect()
    }

    pub fn weight(&self) -> usize {
        (0..self.words())
            .map(|w| (word(&self.x, w) | word(&self.z, w)).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_empty() && self.z.is_empty()
    }

    /// Largest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.pairs().last().map(|p| p.0)
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> usize {
        (0..self.words())
            .map(|w| (word(&self.x, w) & word(&self.z, w)).count_ones() as usize)
            .sum()
    }

    /// True if every factor is Z (the string is diagonal).
    pub fn is_diagonal(&self) -> bool {
        self.x.is_empty()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.words().max(other.words()) {
            parity += (word(&self.x, w) & word(&other.z, w)).count_ones();
            parity += (word(&self.z, w) & word(&other.x, w)).count_ones();
        }
        parity % 2 == 0
    }

    /// `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> (Phase, PauliString) {
        // With P = i^{|x&z|} X^x Z^z the product picks up (-1)^{|z1&x2|}.
        let n = self.words().max(other.words());
        let mut x = Mask::with_capacity(n);
        let mut z = Mask::with_capacity(n);
        let mut k: i64 = 0;
        for w in 0..n {
            let (x1, z1) = (word(&self.x, w), word(&self.z, w));
            let (x2, z2) = (word(&other.x, w), word(&other.z, w));
            let (xr, zr) = (x1 ^ x2, z1 ^ z2);
            k += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64;
            k += 2 * (z1 & x2).count_ones() as i64;
            k -= (xr & zr).count_ones() as i64;
            x.push(xr);
            z.push(zr);
        }
        trim(&mut x);
        trim(&mut z);
        (Phase(k.rem_euclid(4) as u8), PauliString { x, z })
    }

    /// Restriction to the given qubits (others replaced by identity).
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut s = PauliString::identity();
        for &q in qubits {
            s.set(q, self.axis(q));
        }
        s
    }

    /// Action on a computational basis index (only the first 64 qubits).
    ///
    /// Returns `(target, phase)` with `P|j> = phase |target>`.
    pub fn act(&self, j: u64) -> (u64, Phase) {
        let x = word(&self.x, 0);
        let z = word(&self.z, 0);
        let k = (x & z).count_ones() + 2 * (j & z).count_ones();
        (j ^ x, Phase((k & 3) as u8))
    }

    pub(crate) fn low_masks(&self) -> (u64, u64) {
        (word(&self.x, 0), word(&self.z, 0))
    }
}

/// Serialized as a list of `[qubit, "X"|"Y"|"Z"]` pairs.
impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(usize, String)> = self
            .pairs()
            .into_iter()
            .map(|(q, a)| (q, a.as_char().to_string()))
            .collect();
        pairs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = Vec::<(usize, String)>::deserialize(de)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (q, a) in &raw {
            pairs.push((*q, Axis::parse(a).map_err(D::Error::custom)?));
        }
        PauliString::from_pairs(pairs).map_err(D::Error::custom)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pairs().cmp(&other.pairs())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for (i, (q, a)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", a.as_char(), q)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &[(usize, Axis)]) -> PauliString {
        PauliString::from_pairs(s.iter().copied()).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let x = p(&[(0, Axis::X)]);
        let y = p(&[(0, Axis::Y)]);
        let z = p(&[(0, Axis::Z)]);
        // XY = iZ, YZ = iX, ZX = iY
        assert_eq!(x.multiply(&y), (Phase(1), z.clone()));
        assert_eq!(y.multiply(&z), (Phase(1), x.clone()));
        assert_eq!(z.multiply(&x), (Phase(1), y.clone()));
        assert_eq!(y.multiply(&x), (Phase(3), z.clone()));
        assert_eq!(x.multiply(&x), (Phase(0), PauliString::identity()));
        assert_eq!(y.multiply(&y), (Phase(0), PauliString::identity()));
    }

    #[test]
    fn products_across_words() {
        let a = p(&[(3, Axis::X), (70, Axis::Z)]);
        let b = p(&[(3, Axis::Z), (70, Axis::X)]);
        // XZ = -iY and ZX = iY, phases cancel
        let (ph, s) = a.multiply(&b);
        assert_eq!(ph, Phase(0));
        assert_eq!(s, p(&[(3, Axis::Y), (70, Axis::Y)]));
        assert!(a.commutes_with(&b));
    }

    #[test]
    fn ordering_is_lexicographic_on_pairs() {
        let mut v = vec![
            p(&[(1, Axis::X)]),
            p(&[(0, Axis::Z)]),
            PauliString::identity(),
            p(&[(0, Axis::X), (1, Axis::Z)]),
            p(&[(0, Axis::X)]),
        ];
        v.sort();
        let names: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["I", "X0", "X0 Z1", "Z0", "X1"]);
    }

    #[test]
    fn act_matches_definition() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = p(&[(0, Axis::Y)]);
        assert_eq!(y.act(0), (1, Phase(1)));
        assert_eq!(y.act(1), (0, Phase(3)));
        let zz = p(&[(0, Axis::Z), (1, Axis::Z)]);
        assert_eq!(zz.act(0b01), (0b01, Phase(2)));
        assert_eq!(zz.act(0b11), (0b11, Phase(0)));
    }

    #[test]
    fn repeated_qubit_rejected() {
        assert!(PauliString::from_pairs([(0, Axis::X), (0, Axis::Z)]).is_err());
    }
}

/// Parses the display form, e.g. `"X0 Z3"`, `"Z0Z1"` or `"I"`.
impl std::str::FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "I" {
            return Ok(PauliString::identity());
        }
        let bad = || Error::Parse(format!("bad Pauli string {s:?}"));
        let mut pairs = Vec::new();
        let mut rest = compact.as_str();
        while let Some(c) = rest.chars().next() {
            let axis = Axis::parse(&c.to_string())?;
            let digits = rest[1..].find(|d: char| !d.is_ascii_digit()).unwrap_or(rest.len() - 1);
            let q = rest[1..1 + digits].parse().map_err(|_| bad())?;
            pairs.push((q, axis));
            rest = &rest[1 + digits..];
        }
        PauliString::from_pairs(pairs)
    }
}
