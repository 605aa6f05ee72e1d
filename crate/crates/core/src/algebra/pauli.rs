use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::scalar::Coeff;
use crate::error::{Error, Result};

/// Longest accessor chain a packed [`PauliString`] can hold.
pub const MAX_QUBITS: usize = 32;

/// Single-qubit Pauli label. The discriminants are the 2-bit packed codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_code(code: u64) -> Pauli {
        match code & 0b11 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' | '0' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// `self · other = phase · product`.
    pub fn multiply(self, other: Pauli) -> (Phase, Pauli) {
        let (a, b) = (self as u8, other as u8);
        let product = Pauli::from_code((a ^ b) as u64);
        let phase = if a == 0 || b == 0 || a == b {
            Phase::ONE
        } else if (b + 3 - a) % 3 == 1 {
            // X·Y, Y·Z, Z·X
            Phase::I
        } else {
            Phase::MINUS_I
        };
        (phase, product)
    }
}

/// A power of `i`: one of {1, i, −1, −i}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_coeff<C: Coeff>(self) -> C {
        match self.0 {
            0 => C::one(),
            1 => C::imag_unit(),
            2 => -C::one(),
            _ => -C::imag_unit(),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis on an M-qubit chain, packed two bits
/// per qubit (qubit 1 in the lowest bits).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    len: u8,
    code: u64,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        assert!(len <= MAX_QUBITS, "accessor longer than {MAX_QUBITS} qubits");
        PauliString {
            len: len as u8,
            code: 0,
        }
    }

    pub fn new(labels: &[Pauli]) -> Self {
        let mut s = Self::identity(labels.len());
        for (q, &p) in labels.iter().enumerate() {
            s.code |= (p as u64) << (2 * q);
        }
        s
    }

    /// `σ_p` on `site` (1-based), identity elsewhere.
    pub fn single(len: usize, site: usize, p: Pauli) -> Self {
        assert!(site >= 1 && site <= len, "site {site} outside 1..={len}");
        let mut s = Self::identity(len);
        s.code |= (p as u64) << (2 * (site - 1));
        s
    }

    /// `σ_p^site σ_q^(site+1)`.
    pub fn pair(len: usize, site: usize, p: Pauli, q: Pauli) -> Self {
        let mut s = Self::single(len, site, p);
        s.set(site + 1, q);
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Label at a 1-based site.
    pub fn get(&self, site: usize) -> Pauli {
        debug_assert!(site >= 1 && site <= self.len());
        Pauli::from_code(self.code >> (2 * (site - 1)))
    }

    pub fn set(&mut self, site: usize, p: Pauli) {
        assert!(site >= 1 && site <= self.len(), "site {site} outside 1..={}", self.len);
        let shift = 2 * (site - 1);
        self.code = (self.code & !(0b11 << shift)) | ((p as u64) << shift);
    }

    pub fn labels(&self) -> Vec<Pauli> {
        (1..=self.len()).map(|s| self.get(s)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.code == 0
    }

    /// Packed 2-bit code, qubit 1 in the lowest bits.
    pub fn code(&self) -> u64 {
        self.code
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.labels().iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn only_xy(&self) -> bool {
        self.labels().iter().all(|&p| matches!(p, Pauli::X | Pauli::Y))
    }

    /// Swaps X and Y on every site; I and Z are left alone.
    pub fn complement(&self) -> Self {
        let mut out = *self;
        for site in 1..=self.len() {
            match self.get(site) {
                Pauli::X => out.set(site, Pauli::Y),
                Pauli::Y => out.set(site, Pauli::X),
                _ => {}
            }
        }
        out
    }

    /// Number of Y factors.
    pub fn count_y(&self) -> usize {
        self.labels().iter().filter(|&&p| p == Pauli::Y).count()
    }

    /// `self · other = phase · product`, factor by factor.
    pub fn multiply(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "Pauli strings of length {} and {}",
                self.len, other.len
            )));
        }
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        let mut phase = Phase::ONE;
        // Quick path: the product label is the XOR of codes; only sites where
        // both factors are non-identity and differ contribute a phase.
        let product = PauliString {
            len: self.len,
            code: self.code ^ other.code,
        };
        let mut a = self.code;
        let mut b = other.code;
        while a != 0 && b != 0 {
            let (pa, pb) = (a & 0b11, b & 0b11);
            if pa != 0 && pb != 0 && pa != pb {
                let (p, _) = Pauli::from_code(pa).multiply(Pauli::from_code(pb));
                phase = phase * p;
            }
            a >>= 2;
            b >>= 2;
        }
        (phase, product)
    }

    /// True when the two strings commute (an even number of anticommuting sites).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0;
        for site in 1..=self.len().min(other.len()) {
            let (a, b) = (self.get(site), other.get(site));
            if a != Pauli::I && b != Pauli::I && a != b {
                anti += 1;
            }
        }
        anti % 2 == 0
    }

    /// All strings over {X, Y} of the given length in lexicographic order (X < Y).
    pub fn all_xy(len: usize) -> Vec<PauliString> {
        (0..1usize << len)
            .map(|bits| {
                let labels: Vec<Pauli> = (0..len)
                    .map(|q| {
                        if bits >> (len - 1 - q) & 1 == 1 {
                            Pauli::Y
                        } else {
                            Pauli::X
                        }
                    })
                    .collect();
                PauliString::new(&labels)
            })
            .collect()
    }

    /// All 4^len strings in lexicographic order over I < X < Y < Z.
    pub fn all(len: usize) -> Vec<PauliString> {
        (0..1u64 << (2 * len))
            .map(|idx| {
                let labels: Vec<Pauli> = (0..len)
                    .map(|q| Pauli::from_code(idx >> (2 * (len - 1 - q))))
                    .collect();
                PauliString::new(&labels)
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.labels() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::Input(format!("invalid Pauli label `{c}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if labels.len() > MAX_QUBITS {
            return Err(Error::Input(format!(
                "Pauli string longer than {MAX_QUBITS} qubits"
            )));
        }
        Ok(PauliString::new(&labels))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), (Phase::I, ps("Z")));
        assert_eq!(ps("X").multiply(&ps("X")).unwrap(), (Phase::ONE, ps("I")));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), (Phase::MINUS_I, ps("Z")));
        assert_eq!(ps("Z").multiply(&ps("X")).unwrap(), (Phase::I, ps("Y")));
        assert_eq!(ps("Z").multiply(&ps("Y")).unwrap(), (Phase::MINUS_I, ps("X")));
    }

    #[test]
    fn factorwise_product() {
        assert_eq!(ps("XY").multiply(&ps("YY")).unwrap(), (Phase::I, ps("ZI")));
        // Two anticommuting sites: phases multiply.
        assert_eq!(ps("XX").multiply(&ps("YY")).unwrap(), (Phase::MINUS_ONE, ps("ZZ")));
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        assert!(matches!(
            ps("X").multiply(&ps("XX")),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn complement_and_y_count() {
        assert_eq!(ps("XYX").complement(), ps("YXY"));
        assert_eq!(ps("XYY").count_y(), 2);
        assert!(ps("XYX").only_xy());
        assert!(!ps("XZ").only_xy());
    }

    #[test]
    fn enumerations_are_lexicographic() {
        let xy: Vec<String> = PauliString::all_xy(2).iter().map(|p| p.to_string()).collect();
        assert_eq!(xy, ["XX", "XY", "YX", "YY"]);
        let all = PauliString::all(2);
        assert_eq!(all.len(), 16);
        assert_eq!(all[1].to_string(), "IX");
        assert_eq!(all[4].to_string(), "XI");
    }

    #[test]
    fn set_and_get_round_trip() {
        let mut s = PauliString::identity(3);
        s.set(2, Pauli::Z);
        assert_eq!(s.to_string(), "IZI");
        assert_eq!(s.get(2), Pauli::Z);
        assert_eq!(PauliString::pair(3, 2, Pauli::X, Pauli::X).to_string(), "IXX");
    }
}
