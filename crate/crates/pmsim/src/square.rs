//! The Peres-Mermin square and its contextuality inequality.
//!
//! Nine two-qubit observables arranged in a 3x3 grid such that every row
//! and every column is a set of mutually commuting operators whose product
//! is plus or minus the identity:
//!
//! ```text
//!         c1   c2   c3     prod
//!   r1    Z1   1Z   ZZ      +1
//!   r2    1X   X1   XX      +1
//!   r3    ZX   XZ   YY      +1
//!  prod   +1   +1   -1
//! ```
//!
//! The signed sum of the six line correlations,
//! beta = <r1> + <r2> + <r3> + <c1> + <c2> - <c3>, is at most 4 for any
//! noncontextual assignment of pre-existing outcomes but equals 6 quantum
//! mechanically for every two-qubit state, because each line product is
//! exactly (sign) * identity.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{expectation, DensityMatrix};
use crate::pauli::{PauliString, Phase};

/// A line sign: the expected product of a row or column, and equally the
/// weight of that line's correlation in beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn phase(self) -> Phase {
        match self {
            Sign::Plus => Phase::PlusOne,
            Sign::Minus => Phase::MinusOne,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// One of the six lines of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    R1,
    R2,
    R3,
    C1,
    C2,
    C3,
}

/// Fixed evaluation order for the six experiments.
pub const ALL_LINES: [Line; 6] = [Line::R1, Line::R2, Line::R3, Line::C1, Line::C2, Line::C3];

impl Line {
    /// Grid positions (row, col) of the three observables on this line.
    pub fn positions(self) -> [(usize, usize); 3] {
        match self {
            Line::R1 => [(0, 0), (0, 1), (0, 2)],
            Line::R2 => [(1, 0), (1, 1), (1, 2)],
            Line::R3 => [(2, 0), (2, 1), (2, 2)],
            Line::C1 => [(0, 0), (1, 0), (2, 0)],
            Line::C2 => [(0, 1), (1, 1), (2, 1)],
            Line::C3 => [(0, 2), (1, 2), (2, 2)],
        }
    }

    pub fn index(self) -> usize {
        match self {
            Line::R1 => 0,
            Line::R2 => 1,
            Line::R3 => 2,
            Line::C1 => 3,
            Line::C2 => 4,
            Line::C3 => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Line::R1 => "r1",
            Line::R2 => "r2",
            Line::R3 => "r3",
            Line::C1 => "c1",
            Line::C2 => "c2",
            Line::C3 => "c3",
        }
    }
}

/// A 3x3 grid of two-qubit Pauli observables with per-line signs.
#[derive(Debug, Clone)]
pub struct PmSquare {
    grid: [[PauliString; 3]; 3],
    line_signs: [Sign; 6],
}

impl PmSquare {
    /// Builds a square from nine phase-free Hermitian observables.
    pub fn new(grid: [[PauliString; 3]; 3], line_signs: [Sign; 6]) -> Result<Self> {
        let n = grid[0][0].len();
        for row in &grid {
            for p in row {
                if p.len() != n {
                    return Err(Error::DimensionMismatch(
                        "square entries must act on the same number of qubits".into(),
                    ));
                }
                if !p.phase().is_real() {
                    return Err(Error::InvalidArgument(format!(
                        "square entry {p} has a non-Hermitian phase"
                    )));
                }
            }
        }
        Ok(Self { grid, line_signs })
    }

    pub fn grid(&self) -> &[[PauliString; 3]; 3] {
        &self.grid
    }

    pub fn entry(&self, row: usize, col: usize) -> &PauliString {
        &self.grid[row][col]
    }

    pub fn line_signs(&self) -> [Sign; 6] {
        self.line_signs
    }

    pub fn line_sign(&self, line: Line) -> Sign {
        self.line_signs[line.index()]
    }

    /// The three observables of a line, in grid order.
    pub fn line_observables(&self, line: Line) -> [&PauliString; 3] {
        let [a, b, c] = line.positions();
        [
            &self.grid[a.0][a.1],
            &self.grid[b.0][b.1],
            &self.grid[c.0][c.1],
        ]
    }

    /// Serializes as three rows of tokens plus a trailing sign line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.grid {
            let tokens: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        let signs: Vec<String> = self.line_signs.iter().map(|s| s.to_string()).collect();
        out.push_str(&signs.join(" "));
        out.push('\n');
        out
    }

    /// Parses the `to_text` format: three lines of three Pauli tokens each,
    /// then one line with six signs.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 4 {
            return Err(Error::TextParse {
                line: lines.len().min(4),
                message: format!(
                    "expected 3 observable rows plus a sign row, got {} lines",
                    lines.len()
                ),
            });
        }
        let mut grid_rows: Vec<[PauliString; 3]> = Vec::with_capacity(3);
        for (i, row_text) in lines[..3].iter().enumerate() {
            let tokens: Vec<&str> = row_text.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::TextParse {
                    line: i + 1,
                    message: format!("expected 3 Pauli tokens, got {}", tokens.len()),
                });
            }
            let parsed: Result<Vec<PauliString>> =
                tokens.iter().map(|t| PauliString::parse(t)).collect();
            let parsed = parsed.map_err(|e| Error::TextParse {
                line: i + 1,
                message: e.to_string(),
            })?;
            grid_rows.push([parsed[0].clone(), parsed[1].clone(), parsed[2].clone()]);
        }
        let sign_tokens: Vec<&str> = lines[3].split_whitespace().collect();
        if sign_tokens.len() != 6 {
            return Err(Error::TextParse {
                line: 4,
                message: format!("expected 6 signs, got {}", sign_tokens.len()),
            });
        }
        let mut signs = [Sign::Plus; 6];
        for (i, tok) in sign_tokens.iter().enumerate() {
            signs[i] = match *tok {
                "+" | "+1" => Sign::Plus,
                "-" | "-1" | "\u{2212}" | "\u{2212}1" => Sign::Minus,
                other => {
                    return Err(Error::TextParse {
                        line: 4,
                        message: format!("unknown sign token '{other}'"),
                    })
                }
            };
        }
        let grid: [[PauliString; 3]; 3] =
            grid_rows.try_into().expect("exactly three rows collected");
        Self::new(grid, signs)
    }
}

/// The canonical square with signs (+, +, +, +, +, -).
pub fn pm_square() -> PmSquare {
    let parse = |t: &str| PauliString::parse(t).expect("canonical square token");
    PmSquare::new(
        [
            [parse("Z1"), parse("1Z"), parse("ZZ")],
            [parse("1X"), parse("X1"), parse("XX")],
            [parse("ZX"), parse("XZ"), parse("YY")],
        ],
        [
            Sign::Plus,
            Sign::Plus,
            Sign::Plus,
            Sign::Plus,
            Sign::Plus,
            Sign::Minus,
        ],
    )
    .expect("canonical square is valid")
}

/// Product of the three observables of a line, in grid order. For a valid
/// square the result is the same for all six orderings.
pub fn line_product(sq: &PmSquare, line: Line) -> PauliString {
    let [a, b, c] = sq.line_observables(line);
    a.multiply(b)
        .and_then(|ab| ab.multiply(c))
        .expect("line observables share qubit count by construction")
}

/// Per-line verification outcome.
#[derive(Debug, Clone)]
pub struct LineCheck {
    pub line: Line,
    /// Commutation of the pairs (0,1), (0,2), (1,2).
    pub pairwise_commute: [bool; 3],
    pub product: PauliString,
    /// True when the product is exactly line_sign * identity.
    pub product_ok: bool,
}

impl LineCheck {
    pub fn passed(&self) -> bool {
        self.pairwise_commute.iter().all(|&c| c) && self.product_ok
    }
}

/// Structural verification report for a square.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub lines: Vec<LineCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(LineCheck::passed)
    }
}

/// Checks, per line, pairwise commutation and that the line product equals
/// line_sign * identity (phase-exact). Failures are report entries, not
/// errors.
pub fn verify_square(sq: &PmSquare) -> VerificationReport {
    let lines = ALL_LINES
        .iter()
        .map(|&line| {
            let [a, b, c] = sq.line_observables(line);
            let pairwise_commute = [
                a.commutes(b).unwrap_or(false),
                a.commutes(c).unwrap_or(false),
                b.commutes(c).unwrap_or(false),
            ];
            let product = line_product(sq, line);
            let product_ok =
                product.is_identity_body() && product.phase() == sq.line_sign(line).phase();
            LineCheck {
                line,
                pairwise_commute,
                product,
                product_ok,
            }
        })
        .collect();
    VerificationReport { lines }
}

/// The quantum value of beta for a two-qubit state: the signed sum of
/// tr(rho * line_product) over the six lines. Equals 6 for every valid
/// state when the square's line products are (sign) * identity.
pub fn beta_quantum(rho: &DensityMatrix) -> Result<f64> {
    beta_quantum_for(&pm_square(), rho)
}

/// Same as [`beta_quantum`] but for an arbitrary square.
pub fn beta_quantum_for(sq: &PmSquare, rho: &DensityMatrix) -> Result<f64> {
    let dim = 1usize << sq.entry(0, 0).len();
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "beta_quantum: state dimension {} but square acts on dimension {}",
            rho.dim(),
            dim
        )));
    }
    let mut beta = 0.0;
    for &line in &ALL_LINES {
        let product = line_product(sq, line).to_matrix();
        beta += sq.line_sign(line).value() * expectation(rho, &product)?;
    }
    Ok(beta)
}

/// A noncontextual assignment of a definite outcome to each grid position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueAssignment {
    /// Row-major outcomes, each +1 or -1.
    values: [i8; 9],
}

impl ValueAssignment {
    /// Builds from nine row-major values, each +1 or -1.
    pub fn from_values(values: &[i8]) -> Result<Self> {
        if values.len() != 9 {
            return Err(Error::InvalidArgument(format!(
                "assignment needs 9 values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(
                "assignment values must be +1 or -1".into(),
            ));
        }
        let mut fixed = [0i8; 9];
        fixed.copy_from_slice(values);
        Ok(Self { values: fixed })
    }

    /// Assignment number `index` in the enumeration order: bit p of the
    /// 9-bit index (grid scanned row-major) set means the outcome at
    /// position p is -1.
    pub fn from_index(index: u16) -> Self {
        let mut values = [1i8; 9];
        for (p, v) in values.iter_mut().enumerate() {
            if (index >> p) & 1 == 1 {
                *v = -1;
            }
        }
        Self { values }
    }

    pub fn value_at(&self, row: usize, col: usize) -> i8 {
        self.values[row * 3 + col]
    }

    pub fn values(&self) -> &[i8; 9] {
        &self.values
    }
}

impl fmt::Display for ValueAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..3 {
            for col in 0..3 {
                if col > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:+}", self.value_at(row, col))?;
            }
            if row < 2 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Deterministic beta for one noncontextual assignment: the signed sum of
/// per-line outcome products. Each line correlation is exactly +1 or -1.
pub fn classical_beta(assignment: &ValueAssignment, sq: &PmSquare) -> f64 {
    ALL_LINES
        .iter()
        .map(|&line| {
            let product: i8 = line
                .positions()
                .iter()
                .map(|&(r, c)| assignment.value_at(r, c))
                .product();
            sq.line_sign(line).value() * f64::from(product)
        })
        .sum()
}

/// Exhaustive maximum of beta over all 512 assignments, together with the
/// first maximizing assignment in enumeration order.
pub fn nchv_max(sq: &PmSquare) -> (f64, ValueAssignment) {
    let lines: Vec<(Line, Sign)> = ALL_LINES
        .iter()
        .map(|&line| (line, sq.line_sign(line)))
        .collect();
    nchv_max_for_lines(&lines)
}

/// Brute-force maximum over all 512 assignments for an arbitrary subset of
/// signed lines (ties break toward the lowest enumeration index).
pub fn nchv_max_for_lines(lines: &[(Line, Sign)]) -> (f64, ValueAssignment) {
    let mut best_value = f64::NEG_INFINITY;
    let mut best_index = 0u16;
    for index in 0..512u16 {
        let assignment = ValueAssignment::from_index(index);
        let value: f64 = lines
            .iter()
            .map(|&(line, sign)| {
                let product: i8 = line
                    .positions()
                    .iter()
                    .map(|&(r, c)| assignment.value_at(r, c))
                    .product();
                sign.value() * f64::from(product)
            })
            .sum();
        if value > best_value {
            best_value = value;
            best_index = index;
        }
    }
    (best_value, ValueAssignment::from_index(best_index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, DensityMatrix};
    use num_complex::Complex64;

    #[test]
    fn canonical_grid_entries() {
        let sq = pm_square();
        assert_eq!(sq.entry(0, 2).to_string(), "ZZ");
        assert_eq!(sq.entry(2, 2).to_string(), "YY");
        assert_eq!(sq.entry(0, 0).to_string(), "Z1");
        assert_eq!(sq.entry(1, 1).to_string(), "X1");
    }

    #[test]
    fn canonical_square_verifies() {
        let report = verify_square(&pm_square());
        assert!(report.passed());
        let phases: Vec<String> = report.lines.iter().map(|l| l.product.to_string()).collect();
        assert_eq!(phases, vec!["11", "11", "11", "11", "11", "-11"]);
    }

    #[test]
    fn corrupted_square_fails_expected_checks() {
        // Replace grid[0][0] (Z1) by X1: X1 anticommutes with ZZ, so row
        // r1 fails both the (0,2) commutation pair and the product check;
        // column c1 fails commutation against ZX. The dense commutator
        // oracle below confirms the symbolic verdicts.
        let sq = pm_square();
        let mut grid = sq.grid().clone();
        grid[0][0] = PauliString::parse("X1").unwrap();
        let modified = PmSquare::new(grid, sq.line_signs()).unwrap();
        let report = verify_square(&modified);
        assert!(!report.passed());
        let r1 = &report.lines[0];
        assert_eq!(r1.pairwise_commute, [true, false, true]);
        assert!(!r1.product_ok);
        let c1 = &report.lines[3];
        assert!(c1.pairwise_commute.iter().any(|&c| !c));

        for (a, b, expect) in [("X1", "1Z", true), ("X1", "ZZ", false), ("X1", "ZX", false)] {
            let pa = PauliString::parse(a).unwrap();
            let pb = PauliString::parse(b).unwrap();
            let ab = pa.to_matrix().matmul(&pb.to_matrix()).unwrap();
            let ba = pb.to_matrix().matmul(&pa.to_matrix()).unwrap();
            let commutes_dense = ab.sub(&ba).unwrap().frobenius_norm() < 1e-12;
            assert_eq!(commutes_dense, expect, "{a} vs {b}");
        }
    }

    #[test]
    fn all_identity_square_fails_only_c3_product() {
        let id = PauliString::identity(2);
        let grid = [
            [id.clone(), id.clone(), id.clone()],
            [id.clone(), id.clone(), id.clone()],
            [id.clone(), id.clone(), id.clone()],
        ];
        let sq = PmSquare::new(grid, pm_square().line_signs()).unwrap();
        let report = verify_square(&sq);
        for check in &report.lines {
            assert!(check.pairwise_commute.iter().all(|&c| c));
            let expect_ok = check.line != Line::C3;
            assert_eq!(check.product_ok, expect_ok, "line {:?}", check.line);
        }
    }

    #[test]
    fn line_products_match_table() {
        let sq = pm_square();
        assert_eq!(line_product(&sq, Line::R3).to_string(), "11");
        assert_eq!(line_product(&sq, Line::C3).to_string(), "-11");
    }

    #[test]
    fn line_product_invariant_under_all_orderings() {
        let sq = pm_square();
        for &line in &ALL_LINES {
            let obs = sq.line_observables(line);
            let reference = line_product(&sq, line);
            let orderings = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            for ord in orderings {
                let p = obs[ord[0]]
                    .multiply(obs[ord[1]])
                    .unwrap()
                    .multiply(obs[ord[2]])
                    .unwrap();
                assert_eq!(p, reference, "ordering {ord:?} of {line:?}");
            }
        }
    }

    #[test]
    fn beta_quantum_is_six_for_mixed_and_pure() {
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((beta_quantum(&mixed).unwrap() - 6.0).abs() < 1e-10);
        let zero = DensityMatrix::basis_state(4, 0);
        assert!((beta_quantum(&zero).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn beta_quantum_state_independent_for_random_states() {
        let mut seed = 0x853C49E6748FEA9Bu64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..100 {
            let mut g = ComplexMatrix::zeros(4, 4);
            for r in 0..4 {
                for c in 0..4 {
                    g.set(r, c, Complex64::new(next(), next()));
                }
            }
            let gram = g.matmul(&g.dagger()).unwrap();
            let rho =
                DensityMatrix::new(gram.scale(Complex64::new(1.0, 0.0) / gram.trace())).unwrap();
            assert!((beta_quantum(&rho).unwrap() - 6.0).abs() < 1e-10);
        }
    }

    #[test]
    fn column_three_expectation_is_minus_one_for_random_states() {
        // ZZ * XX * YY = -1, so its expectation is -1 on every state.
        let product = PauliString::parse("ZZ")
            .unwrap()
            .multiply(&PauliString::parse("XX").unwrap())
            .unwrap()
            .multiply(&PauliString::parse("YY").unwrap())
            .unwrap()
            .to_matrix();
        let mut seed = 0x94D049BB133111EBu64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let mut g = ComplexMatrix::zeros(4, 4);
            for r in 0..4 {
                for c in 0..4 {
                    g.set(r, c, Complex64::new(next(), next()));
                }
            }
            let gram = g.matmul(&g.dagger()).unwrap();
            let rho =
                DensityMatrix::new(gram.scale(Complex64::new(1.0, 0.0) / gram.trace())).unwrap();
            let value = expectation(&rho, &product).unwrap();
            assert!((value + 1.0).abs() < 1e-10, "{value}");
        }
    }

    #[test]
    fn nchv_max_is_four_with_deterministic_argmax() {
        let (max, assignment) = nchv_max(&pm_square());
        assert_eq!(max, 4.0);
        // Lowest-index maximizer is the all-plus assignment.
        assert_eq!(assignment, ValueAssignment::from_index(0));
        assert_eq!(classical_beta(&assignment, &pm_square()), 4.0);
    }

    #[test]
    fn all_plus_signs_admit_perfect_assignment() {
        let sq = PmSquare::new(pm_square().grid().clone(), [Sign::Plus; 6]).unwrap();
        let (max, assignment) = nchv_max(&sq);
        assert_eq!(max, 6.0);
        assert_eq!(assignment, ValueAssignment::from_index(0));
    }

    #[test]
    fn single_row_maximum_is_one() {
        let (max, _) = nchv_max_for_lines(&[(Line::R1, Sign::Plus)]);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn classical_beta_examples() {
        let sq = pm_square();
        let all_plus = ValueAssignment::from_values(&[1; 9]).unwrap();
        assert_eq!(classical_beta(&all_plus, &sq), 4.0);
        let all_minus = ValueAssignment::from_values(&[-1; 9]).unwrap();
        assert_eq!(classical_beta(&all_minus, &sq), -4.0);
        // Flipping only the YY cell keeps beta = 4: rows lose 2, c3 gains 2.
        let mut values = [1i8; 9];
        values[8] = -1;
        let flipped = ValueAssignment::from_values(&values).unwrap();
        assert_eq!(classical_beta(&flipped, &sq), 4.0);
    }

    #[test]
    fn every_assignment_within_classical_bound() {
        let sq = pm_square();
        for index in 0..512u16 {
            let beta = classical_beta(&ValueAssignment::from_index(index), &sq);
            assert!((-4.0..=4.0).contains(&beta), "index {index}: beta {beta}");
        }
    }

    #[test]
    fn assignment_validation() {
        assert!(ValueAssignment::from_values(&[1; 8]).is_err());
        assert!(ValueAssignment::from_values(&[1, 1, 1, 1, 0, 1, 1, 1, 1]).is_err());
    }

    #[test]
    fn square_text_round_trip() {
        let sq = pm_square();
        let text = sq.to_text();
        let parsed = PmSquare::parse(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert!(verify_square(&parsed).passed());
    }

    #[test]
    fn square_parse_rejects_malformed_input() {
        assert!(PmSquare::parse("Z1 1Z ZZ\n1X X1 XX\n").is_err());
        assert!(PmSquare::parse("Z1 1Z ZZ\n1X X1 XX\nZX XZ YY\n+ + + +\n").is_err());
        assert!(PmSquare::parse("Z1 1Q ZZ\n1X X1 XX\nZX XZ YY\n+ + + + + -\n").is_err());
    }
}
