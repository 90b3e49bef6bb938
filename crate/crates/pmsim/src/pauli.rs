//! Symbolic n-qubit Pauli strings with exact phase tracking.
//!
//! A string is stored in symplectic form: per-qubit X and Z bits plus a
//! global power of i, representing `i^k * prod_j X^x_j Z^z_j`. A site with
//! both bits set realizes the Hermitian Y through the convention Y = i X Z,
//! applied when converting to or from the displayed form, so that
//! `parse("Y")` is the standard Pauli-Y with displayed phase +1.
//!
//! Multiplication in this form is exact: bits xor, and the phase picks up
//! a factor (-1) for every site where a Z of the left operand crosses an X
//! of the right operand. Phases never leave the fourth roots of unity.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// A fourth root of unity: the displayed global phase of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// True for +1 and -1, the phases of Hermitian strings.
    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PlusOne => Ok(()),
            Phase::PlusI => write!(f, "i"),
            Phase::MinusOne => write!(f, "-"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}

/// An n-qubit Pauli operator with tracked global phase.
///
/// Qubit 0 is the leftmost character of the text form and the most
/// significant bit of the dense realization's basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
    /// Power of i in the internal X-Z form (not the displayed phase).
    phase_exp: u8,
}

const MAX_QUBITS: usize = 64;

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0 && n <= MAX_QUBITS);
        Self {
            n,
            x_bits: 0,
            z_bits: 0,
            phase_exp: 0,
        }
    }

    /// Single-site Pauli (one of '1', 'X', 'Y', 'Z') embedded at `site`.
    pub fn single(n: usize, site: usize, which: char) -> Result<Self> {
        if site >= n {
            return Err(Error::InvalidArgument(format!(
                "site {site} out of range for {n} qubits"
            )));
        }
        let mut text = String::new();
        for i in 0..n {
            text.push(if i == site { which } else { '1' });
        }
        Self::parse(&text)
    }

    /// Parses the canonical text form: an optional phase prefix
    /// (`+`, `-`, `i`, `-i`, `+i`) followed by characters from {1, X, Y, Z}.
    /// Also accepts the typographic minus sign.
    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let mut display_exp: u8 = 0;
        if pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-' || chars[pos] == '\u{2212}')
        {
            if chars[pos] != '+' {
                display_exp = 2;
            }
            pos += 1;
        }
        if pos < chars.len() && chars[pos] == 'i' {
            display_exp = (display_exp + 1) % 4;
            pos += 1;
        }
        let body = &chars[pos..];
        if body.is_empty() {
            return Err(Error::PauliParse {
                position: pos + 1,
                message: "expected at least one Pauli character".into(),
            });
        }
        if body.len() > MAX_QUBITS {
            return Err(Error::PauliParse {
                position: pos + 1,
                message: format!("string longer than {MAX_QUBITS} qubits"),
            });
        }
        let mut x_bits = 0u64;
        let mut z_bits = 0u64;
        let mut y_count = 0u8;
        for (i, &ch) in body.iter().enumerate() {
            let bit = 1u64 << i;
            match ch {
                '1' | 'I' => {}
                'X' => x_bits |= bit,
                'Z' => z_bits |= bit,
                'Y' => {
                    x_bits |= bit;
                    z_bits |= bit;
                    y_count = (y_count + 1) % 4;
                }
                other => {
                    return Err(Error::PauliParse {
                        // 1-based position in the original text
                        position: pos + i + 1,
                        message: format!("unknown Pauli character '{other}'"),
                    });
                }
            }
        }
        Ok(Self {
            n: body.len(),
            x_bits,
            z_bits,
            // displayed_phase * i^(y_count) converts Y sites into X-Z form
            phase_exp: (display_exp + y_count) % 4,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when all sites are the identity (the phase may still be any
    /// fourth root of unity).
    pub fn is_identity_body(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    pub fn x_bit(&self, site: usize) -> bool {
        (self.x_bits >> site) & 1 == 1
    }

    pub fn z_bit(&self, site: usize) -> bool {
        (self.z_bits >> site) & 1 == 1
    }

    /// The displayed global phase, relative to the Hermitian site letters.
    pub fn phase(&self) -> Phase {
        let y_count = (self.x_bits & self.z_bits).count_ones() as u8;
        Phase::from_exponent((self.phase_exp + 4 - y_count % 4) % 4)
    }

    /// Replaces the displayed phase, keeping the site letters.
    pub fn with_phase(&self, phase: Phase) -> Self {
        let y_count = ((self.x_bits & self.z_bits).count_ones() % 4) as u8;
        Self {
            phase_exp: (phase.exponent() + y_count) % 4,
            ..*self
        }
    }

    /// The site letter at `site` as one of '1', 'X', 'Y', 'Z'.
    pub fn site_char(&self, site: usize) -> char {
        match (self.x_bit(site), self.z_bit(site)) {
            (false, false) => '1',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    /// Exact group product `self * other` with accumulated phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "pauli multiply: {} vs {} qubits",
                self.n, other.n
            )));
        }
        // Z factors of the left operand commute past X factors of the right
        // at the cost of one sign per overlapping site.
        let crossings = (self.z_bits & other.x_bits).count_ones() as u8;
        Ok(Self {
            n: self.n,
            x_bits: self.x_bits ^ other.x_bits,
            z_bits: self.z_bits ^ other.z_bits,
            phase_exp: (self.phase_exp + other.phase_exp + 2 * (crossings % 2)) % 4,
        })
    }

    /// True iff the symplectic product is even, i.e. the dense realizations
    /// commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "pauli commutes: {} vs {} qubits",
                self.n, other.n
            )));
        }
        let anti =
            (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok(anti.is_multiple_of(2))
    }

    /// Dense 2^n realization including the global phase.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.n;
        let phase = self.phase().value();
        let mut out = ComplexMatrix::zeros(dim, dim);
        // Each site letter is a (generalized) permutation, so every row has
        // exactly one nonzero entry: column = row xor flip mask, value from
        // accumulated Z signs and Y phases.
        for row in 0..dim {
            let mut col = row;
            let mut amp = phase;
            for site in 0..self.n {
                // qubit 0 is the most significant bit of the basis index
                let bit_pos = self.n - 1 - site;
                let bit = (row >> bit_pos) & 1;
                match (self.x_bit(site), self.z_bit(site)) {
                    (false, false) => {}
                    (true, false) => col ^= 1 << bit_pos,
                    (false, true) => {
                        if bit == 1 {
                            amp = -amp;
                        }
                    }
                    (true, true) => {
                        // Y = [[0, -i], [i, 0]]: row 0 takes -i from col 1,
                        // row 1 takes +i from col 0.
                        col ^= 1 << bit_pos;
                        amp *= if bit == 0 {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                }
            }
            out.set(row, col, amp);
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase())?;
        for site in 0..self.n {
            write!(f, "{}", self.site_char(site))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TOL_ALGEBRAIC;

    #[test]
    fn parse_table_entry_z1() {
        let p = PauliString::parse("Z1").unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.z_bit(0) && !p.z_bit(1));
        assert!(!p.x_bit(0) && !p.x_bit(1));
        assert_eq!(p.phase(), Phase::PlusOne);
        assert_eq!(p.to_string(), "Z1");
    }

    #[test]
    fn parse_minus_i_y() {
        let p = PauliString::parse("-iY").unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.x_bit(0) && p.z_bit(0));
        assert_eq!(p.phase(), Phase::MinusI);
        // -iY = -i * iXZ = XZ, so the internal X-Z form carries no phase.
        assert_eq!(p.phase_exp, 0);
        assert_eq!(p.to_string(), "-iY");
    }

    #[test]
    fn parse_rejects_unknown_character() {
        let err = PauliString::parse("ZQ").unwrap_err();
        match err {
            Error::PauliParse { position, .. } => assert_eq!(position, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = PauliString::parse("-iXW").unwrap_err();
        match err {
            Error::PauliParse { position, .. } => assert_eq!(position, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_format_round_trip() {
        for text in ["1", "X", "Y", "Z", "iZX", "-YY", "-iX1Z", "ZZ", "11"] {
            let p = PauliString::parse(text).unwrap();
            let canonical = p.to_string();
            let q = PauliString::parse(&canonical).unwrap();
            assert_eq!(p, q, "round trip failed for {text}");
        }
        // "+" normalizes away
        assert_eq!(PauliString::parse("+XX").unwrap().to_string(), "XX");
    }

    #[test]
    fn multiply_zx_xz_gives_yy() {
        let zx = PauliString::parse("ZX").unwrap();
        let xz = PauliString::parse("XZ").unwrap();
        let prod = zx.multiply(&xz).unwrap();
        assert_eq!(prod.to_string(), "YY");
        // dense oracle
        let dense = zx.to_matrix().matmul(&xz.to_matrix()).unwrap();
        assert!(dense.approx_eq(&prod.to_matrix(), TOL_ALGEBRAIC));
    }

    #[test]
    fn multiply_column_three_product_is_minus_identity() {
        let zz = PauliString::parse("ZZ").unwrap();
        let xx = PauliString::parse("XX").unwrap();
        let yy = PauliString::parse("YY").unwrap();
        let prod = zz.multiply(&xx.multiply(&yy).unwrap()).unwrap();
        assert_eq!(prod.to_string(), "-11");
    }

    #[test]
    fn multiply_involution() {
        for text in ["X", "Y", "Z", "ZX", "YY", "X1Z", "-ZZ"] {
            let p = PauliString::parse(text).unwrap();
            let sq = p.multiply(&p).unwrap();
            assert!(sq.is_identity_body());
            assert_eq!(sq.phase(), Phase::PlusOne, "square of {text}");
        }
    }

    #[test]
    fn commutes_examples() {
        let z1 = PauliString::parse("Z1").unwrap();
        let oz = PauliString::parse("1Z").unwrap();
        let x1 = PauliString::parse("X1").unwrap();
        let zz = PauliString::parse("ZZ").unwrap();
        let xx = PauliString::parse("XX").unwrap();
        assert!(z1.commutes(&oz).unwrap());
        assert!(!z1.commutes(&x1).unwrap());
        assert!(zz.commutes(&xx).unwrap());
    }

    #[test]
    fn to_matrix_standard_y() {
        let y = PauliString::parse("Y").unwrap().to_matrix();
        assert_eq!(y.get(0, 1), Complex64::new(0.0, -1.0));
        assert_eq!(y.get(1, 0), Complex64::new(0.0, 1.0));
        assert_eq!(y.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn to_matrix_identity() {
        let one = PauliString::parse("1").unwrap().to_matrix();
        assert!(one.approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn hermitian_and_unitary_for_real_phase() {
        for text in ["X1Y", "ZZZ", "YXZ", "-XY"] {
            let m = PauliString::parse(text).unwrap().to_matrix();
            assert!(m.is_hermitian(0.0), "{text} not Hermitian");
            assert!(m.is_unitary(0.0), "{text} not unitary");
        }
    }

    // Deterministic pseudo-random Pauli generator for property checks.
    fn random_pauli(seed: &mut u64, n: usize) -> PauliString {
        let mut next = || {
            *seed ^= *seed << 13;
            *seed ^= *seed >> 7;
            *seed ^= *seed << 17;
            *seed
        };
        let letters = ['1', 'X', 'Y', 'Z'];
        let prefixes = ["", "i", "-", "-i"];
        let mut text = String::from(prefixes[(next() % 4) as usize]);
        for _ in 0..n {
            text.push(letters[(next() % 4) as usize]);
        }
        PauliString::parse(&text).unwrap()
    }

    #[test]
    fn multiply_matches_dense_product_for_random_pairs() {
        let mut seed = 0xD1B54A32D192ED03u64;
        for _ in 0..50 {
            let a = random_pauli(&mut seed, 2);
            let b = random_pauli(&mut seed, 2);
            let sym = a.multiply(&b).unwrap().to_matrix();
            let dense = a.to_matrix().matmul(&b.to_matrix()).unwrap();
            assert!(sym.approx_eq(&dense, 1e-15));
        }
    }

    #[test]
    fn commutes_matches_dense_commutator_for_random_pairs() {
        let mut seed = 0xA0761D6478BD642Fu64;
        for _ in 0..50 {
            let a = random_pauli(&mut seed, 3);
            let b = random_pauli(&mut seed, 3);
            let ab = a.to_matrix().matmul(&b.to_matrix()).unwrap();
            let ba = b.to_matrix().matmul(&a.to_matrix()).unwrap();
            let commutator_norm = ab.sub(&ba).unwrap().frobenius_norm();
            assert_eq!(
                a.commutes(&b).unwrap(),
                commutator_norm < 1e-12,
                "commutation mismatch for {a} and {b}"
            );
        }
    }

    #[test]
    fn multiply_is_associative() {
        let mut seed = 0xE7037ED1A0B428DBu64;
        for _ in 0..30 {
            let a = random_pauli(&mut seed, 2);
            let b = random_pauli(&mut seed, 2);
            let c = random_pauli(&mut seed, 2);
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn identity_is_neutral() {
        let id = PauliString::identity(2);
        let p = PauliString::parse("iZX").unwrap();
        assert_eq!(id.multiply(&p).unwrap(), p);
        assert_eq!(p.multiply(&id).unwrap(), p);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = PauliString::parse("X").unwrap();
        let b = PauliString::parse("XX").unwrap();
        assert!(a.multiply(&b).is_err());
        assert!(a.commutes(&b).is_err());
    }
}
