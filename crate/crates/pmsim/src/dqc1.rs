//! Probe-qubit readout of correlations on ensembles.
//!
//! A single probe qubit prepared along +X controls one unitary per
//! observable: `U_S = |0><0| (x) 1 + |1><1| (x) S`. After the controlled
//! gates, the probe's X coherence carries the correlation,
//! `<X (x) 1> = tr(rho * prod_k S_k)`, so a single ensemble-averaged
//! measurement reads out the product correlation of the whole commuting
//! set. With a partially mixed probe (purity epsilon) the signal scales to
//! `epsilon * tr(rho * prod S_k)` and can be corrected by dividing out
//! epsilon under fair sampling.
//!
//! The probe is always tensor factor 0 (leftmost, most significant index
//! bits).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_unitary, expectation, tensor, ComplexMatrix, DensityMatrix, UnitaryMatrix, TOL_ALGEBRAIC,
};
use crate::noise::NoiseModel;
use crate::pauli::PauliString;
use crate::square::{pm_square, Line, Sign, ALL_LINES};

/// Probe purity / measurement efficiency, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSpec {
    epsilon: f64,
}

impl ProbeSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    /// A perfectly pure probe (epsilon = 1).
    pub fn ideal() -> Self {
        Self { epsilon: 1.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// (1 - epsilon) 1/2 + epsilon |+><+|, the partially mixed probe state.
pub fn probe_state(probe: ProbeSpec) -> DensityMatrix {
    let eps = probe.epsilon();
    let m = ComplexMatrix::from_real_rows(&[vec![0.5, eps / 2.0], vec![eps / 2.0, 0.5]])
        .expect("2x2 probe state");
    DensityMatrix::new(m).expect("probe state is a valid density matrix for epsilon in [0,1]")
}

/// The controlled-observable gate `U_S = |0><0| (x) 1_d + |1><1| (x) S`
/// as a dense block-diagonal unitary on probe (x) system.
///
/// `S` must carry a real phase (+1 or -1) so that it is Hermitian and
/// unitary; `U_S` then squares to the identity.
pub fn controlled_observable(s: &PauliString) -> Result<UnitaryMatrix> {
    if !s.phase().is_real() {
        return Err(Error::InvalidArgument(format!(
            "controlled observable requires a Hermitian (phase +1/-1) Pauli, got {s}"
        )));
    }
    let dense = s.to_matrix();
    let d = dense.rows();
    let mut u = ComplexMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        u.set(i, i, Complex64::new(1.0, 0.0));
        for j in 0..d {
            u.set(d + i, d + j, dense.get(i, j));
        }
    }
    UnitaryMatrix::new(u)
}

/// A prepared correlation measurement: a system state, an ordered list of
/// mutually commuting Hermitian Pauli observables, and a probe.
#[derive(Debug, Clone)]
pub struct CorrelationExperiment {
    system_state: DensityMatrix,
    observables: Vec<PauliString>,
    probe: ProbeSpec,
}

impl CorrelationExperiment {
    pub fn new(
        system_state: DensityMatrix,
        observables: Vec<PauliString>,
        probe: ProbeSpec,
    ) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::InvalidArgument(
                "correlation experiment needs at least one observable".into(),
            ));
        }
        let n = observables[0].len();
        if system_state.dim() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "system dimension {} does not match {}-qubit observables",
                system_state.dim(),
                n
            )));
        }
        for obs in &observables {
            if obs.len() != n {
                return Err(Error::DimensionMismatch(
                    "observables act on differing qubit counts".into(),
                ));
            }
            if !obs.phase().is_real() {
                return Err(Error::InvalidArgument(format!(
                    "observable {obs} is not Hermitian (phase must be +1 or -1)"
                )));
            }
        }
        for i in 0..observables.len() {
            for j in (i + 1)..observables.len() {
                if !observables[i].commutes(&observables[j])? {
                    return Err(Error::InvalidArgument(format!(
                        "observables {} and {} do not commute",
                        observables[i], observables[j]
                    )));
                }
            }
        }
        Ok(Self {
            system_state,
            observables,
            probe,
        })
    }

    pub fn system_state(&self) -> &DensityMatrix {
        &self.system_state
    }

    pub fn observables(&self) -> &[PauliString] {
        &self.observables
    }

    pub fn probe(&self) -> ProbeSpec {
        self.probe
    }
}

/// Dephasing noise interleaved with the controlled gates: the same Kraus
/// set (on probe plus system) applied a fixed number of times after each
/// gate.
struct NoisePlan {
    kraus: Vec<ComplexMatrix>,
    applications_after_gate: Vec<usize>,
}

impl NoisePlan {
    /// Distributes `total` channel applications over the gate slots, front
    /// loaded: slot i receives total/gates rounded up for the first
    /// (total mod gates) slots.
    fn for_line(model: &NoiseModel, gate_count: usize) -> Self {
        let total = model.gates_per_experiment();
        let base = total / gate_count;
        let rem = total % gate_count;
        let applications_after_gate = (0..gate_count)
            .map(|i| base + usize::from(i < rem))
            .collect();
        Self {
            kraus: crate::noise::three_fold_channel(model.eta())
                .expect("eta of a valid noise model lies in [0,1]"),
            applications_after_gate,
        }
    }
}

/// Runs the circuit: probe (x) system, one controlled gate per observable
/// (optionally followed by noise), returning the final state.
fn final_state(exp: &CorrelationExperiment, noise: Option<&NoisePlan>) -> Result<DensityMatrix> {
    let joint = tensor(probe_state(exp.probe).matrix(), exp.system_state.matrix());
    let mut state = DensityMatrix::new(joint)?;
    for (k, obs) in exp.observables.iter().enumerate() {
        let gate = controlled_observable(obs)?;
        state = apply_unitary(&state, &gate)?;
        if let Some(plan) = noise {
            for _ in 0..plan.applications_after_gate[k] {
                state = crate::linalg::apply_kraus(&state, &plan.kraus)?;
            }
        }
    }
    Ok(state)
}

/// X on the probe, identity on the system.
fn probe_x_observable(system_dim: usize) -> ComplexMatrix {
    let x = PauliString::parse("X").expect("X").to_matrix();
    tensor(&x, &ComplexMatrix::identity(system_dim))
}

/// The ensemble-averaged probe readout `<X (x) 1_d>` after the controlled
/// gates. Satisfies `result = epsilon * tr(rho * prod_k S_k)` and lies in
/// [-1, 1].
pub fn measure_correlation(exp: &CorrelationExperiment) -> Result<f64> {
    measure_correlation_noisy(exp, None)
}

/// As [`measure_correlation`], with every gate followed by the noise
/// model's dephasing channel applications.
pub fn measure_correlation_noisy(
    exp: &CorrelationExperiment,
    noise: Option<&NoiseModel>,
) -> Result<f64> {
    let plan = noise.map(|model| NoisePlan::for_line(model, exp.observables.len()));
    let state = final_state(exp, plan.as_ref())?;
    expectation(&state, &probe_x_observable(exp.system_state.dim()))
}

/// X-basis probe outcome probabilities for a single-observable experiment:
/// `p(+-1) = (1 - eps)/2 + eps * tr(P_+- rho)`. Always sums to 1, and the
/// difference equals [`measure_correlation`].
pub fn outcome_probabilities(exp: &CorrelationExperiment) -> Result<(f64, f64)> {
    if exp.observables.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "outcome probabilities are defined for a single observable, got {}",
            exp.observables.len()
        )));
    }
    let state = final_state(exp, None)?;
    let d = exp.system_state.dim();
    // |+-><+-| (x) 1_d
    let half = Complex64::new(0.5, 0.0);
    let mut plus = ComplexMatrix::zeros(2, 2);
    for r in 0..2 {
        for c in 0..2 {
            plus.set(r, c, half);
        }
    }
    let minus = ComplexMatrix::identity(2).sub(&plus)?;
    let p_plus = expectation(&state, &tensor(&plus, &ComplexMatrix::identity(d)))?;
    let p_minus = expectation(&state, &tensor(&minus, &ComplexMatrix::identity(d)))?;
    Ok((p_plus, p_minus))
}

/// One line of the six-experiment suite.
#[derive(Debug, Clone)]
pub struct LineResult {
    pub line: Line,
    pub raw_correlation: f64,
    pub epsilon: f64,
    /// Fair-sampling value: raw / epsilon when correction is enabled,
    /// otherwise the raw value.
    pub corrected_correlation: f64,
    pub sign: Sign,
    /// sign * corrected_correlation; beta is the sum of these.
    pub contribution: f64,
}

/// Results of the six experiments and the assembled beta.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub lines: Vec<LineResult>,
    pub beta: f64,
    pub epsilon_corrected: bool,
}

impl SuiteResult {
    /// CSV with one row per line and a final beta row. Floats carry 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("line,raw_correlation,epsilon,corrected_correlation,sign,contribution\n");
        for line in &self.lines {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
                line.line.label(),
                line.raw_correlation,
                line.epsilon,
                line.corrected_correlation,
                if line.sign == Sign::Plus { "+1" } else { "-1" },
                line.contribution,
            ));
        }
        out.push_str(&format!("beta,,,,,{:.16e}\n", self.beta));
        out
    }
}

/// Runs the six line experiments of the canonical square on the maximally
/// mixed two-qubit system, reporting raw and fair-sampling-corrected
/// correlations and beta.
pub fn run_experiment_suite(probe: ProbeSpec, noise: Option<&NoiseModel>) -> Result<SuiteResult> {
    run_experiment_suite_with(probe, noise, true)
}

/// As [`run_experiment_suite`], with the epsilon correction optional.
pub fn run_experiment_suite_with(
    probe: ProbeSpec,
    noise: Option<&NoiseModel>,
    epsilon_corrected: bool,
) -> Result<SuiteResult> {
    let eps = probe.epsilon();
    if epsilon_corrected && eps == 0.0 {
        return Err(Error::InvalidArgument(
            "epsilon correction requires epsilon > 0 (cannot divide by zero)".into(),
        ));
    }
    let sq = pm_square();
    let system = DensityMatrix::maximally_mixed(4);
    let mut lines = Vec::with_capacity(6);
    let mut beta = 0.0;
    for &line in &ALL_LINES {
        let observables: Vec<PauliString> = sq
            .line_observables(line)
            .iter()
            .map(|&p| p.clone())
            .collect();
        let exp = CorrelationExperiment::new(system.clone(), observables, probe)?;
        let raw = measure_correlation_noisy(&exp, noise)?;
        let corrected = if epsilon_corrected { raw / eps } else { raw };
        let sign = sq.line_sign(line);
        let contribution = sign.value() * corrected;
        beta += contribution;
        lines.push(LineResult {
            line,
            raw_correlation: raw,
            epsilon: eps,
            corrected_correlation: corrected,
            sign,
            contribution,
        });
    }
    Ok(SuiteResult {
        lines,
        beta,
        epsilon_corrected,
    })
}

/// One probe preparation compared under the two measurement models.
#[derive(Debug, Clone)]
pub struct TrialComparison {
    /// p(+1), p(-1) for an epsilon-efficient readout of the mapped pure
    /// preparation.
    pub efficient: (f64, f64),
    /// p(+1), p(-1) for a faithful readout of the mapped mixed preparation.
    pub faithful: (f64, f64),
    pub discrepancy: f64,
}

/// Report of the efficiency/mixedness equivalence check for one channel.
#[derive(Debug, Clone)]
pub struct UnitalEquivalenceReport {
    /// Whether the channel fixes the maximally mixed state.
    pub unital: bool,
    pub trials: Vec<TrialComparison>,
    pub max_discrepancy: f64,
}

impl UnitalEquivalenceReport {
    pub fn statistics_equal(&self, tol: f64) -> bool {
        self.max_discrepancy <= tol
    }
}

fn map_matrix(kraus: &[ComplexMatrix], m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for op in kraus {
        out = out.add(&op.matmul(m)?.matmul(&op.dagger())?)?;
    }
    Ok(out)
}

fn x_basis_probs(m: &ComplexMatrix) -> (f64, f64) {
    // tr(|+-><+-| m) = (m00 + m11)/2 +- Re(m01)
    let diag = 0.5 * (m.get(0, 0).re + m.get(1, 1).re);
    let cross = m.get(0, 1).re;
    (diag + cross, diag - cross)
}

/// Compares, for a fixed probe channel, the statistics of an
/// epsilon-efficient measurement after the channel acts on a pure
/// preparation against a faithful measurement after the channel acts on
/// the epsilon-mixed preparation. The two agree exactly when the channel
/// is unital; trial 0 uses the |+> preparation and later trials use seeded
/// random pure preparations.
pub fn unital_equivalence_check(
    kraus: &[ComplexMatrix],
    probe: ProbeSpec,
    trials: usize,
    seed: u64,
) -> Result<UnitalEquivalenceReport> {
    if kraus.is_empty() {
        return Err(Error::InvalidArgument("empty Kraus set".into()));
    }
    let mut completeness = ComplexMatrix::zeros(2, 2);
    for op in kraus {
        if op.rows() != 2 || op.cols() != 2 {
            return Err(Error::DimensionMismatch(
                "probe channel Kraus operators must be 2x2".into(),
            ));
        }
        completeness = completeness.add(&op.dagger().matmul(op)?)?;
    }
    if !completeness.approx_eq(&ComplexMatrix::identity(2), TOL_ALGEBRAIC) {
        return Err(Error::InvalidMatrix(
            "probe channel is not trace preserving (sum A^dag A != 1)".into(),
        ));
    }

    let eps = probe.epsilon();
    let half_mixed = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
    let unital = map_matrix(kraus, &half_mixed)?.approx_eq(&half_mixed, TOL_ALGEBRAIC);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = |rng: &mut ChaCha8Rng| {
        // Box-Muller from two open-interval uniforms.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };

    let mut report_trials = Vec::with_capacity(trials);
    let mut max_discrepancy: f64 = 0.0;
    for trial in 0..trials {
        let pure = if trial == 0 {
            DensityMatrix::from_state_vector(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])?
        } else {
            let amps = [
                Complex64::new(gaussian(&mut rng), gaussian(&mut rng)),
                Complex64::new(gaussian(&mut rng), gaussian(&mut rng)),
            ];
            DensityMatrix::from_state_vector(&amps)?
        };

        let mapped_pure = map_matrix(kraus, pure.matrix())?;
        let (fp, fm) = x_basis_probs(&mapped_pure);
        let efficient = ((1.0 - eps) / 2.0 + eps * fp, (1.0 - eps) / 2.0 + eps * fm);

        let mixed = half_mixed
            .scale(Complex64::new(1.0 - eps, 0.0))
            .add(&pure.matrix().scale(Complex64::new(eps, 0.0)))?;
        let faithful = x_basis_probs(&map_matrix(kraus, &mixed)?);

        let discrepancy = (efficient.0 - faithful.0)
            .abs()
            .max((efficient.1 - faithful.1).abs());
        max_discrepancy = max_discrepancy.max(discrepancy);
        report_trials.push(TrialComparison {
            efficient,
            faithful,
            discrepancy,
        });
    }

    Ok(UnitalEquivalenceReport {
        unital,
        trials: report_trials,
        max_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TOL_ALGEBRAIC;

    #[test]
    fn probe_state_limits() {
        let pure = probe_state(ProbeSpec::new(1.0).unwrap());
        let plus =
            DensityMatrix::from_state_vector(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
                .unwrap();
        assert!(pure.matrix().approx_eq(plus.matrix(), TOL_ALGEBRAIC));

        let mixed = probe_state(ProbeSpec::new(0.0).unwrap());
        assert!(mixed
            .matrix()
            .approx_eq(DensityMatrix::maximally_mixed(2).matrix(), TOL_ALGEBRAIC));

        let half = probe_state(ProbeSpec::new(0.5).unwrap());
        let expected = ComplexMatrix::from_real_rows(&[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(half.matrix().approx_eq(&expected, TOL_ALGEBRAIC));
    }

    #[test]
    fn probe_spec_rejects_out_of_range() {
        assert!(ProbeSpec::new(-0.1).is_err());
        assert!(ProbeSpec::new(1.1).is_err());
        assert!(ProbeSpec::new(f64::NAN).is_err());
    }

    #[test]
    fn controlled_identity_is_identity() {
        let u = controlled_observable(&PauliString::identity(2)).unwrap();
        assert!(u
            .matrix()
            .approx_eq(&ComplexMatrix::identity(8), TOL_ALGEBRAIC));
    }

    #[test]
    fn controlled_z_is_cz() {
        let u = controlled_observable(&PauliString::parse("Z").unwrap()).unwrap();
        let cz = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, -1.0],
        ])
        .unwrap();
        assert!(u.matrix().approx_eq(&cz, 0.0));
    }

    #[test]
    fn controlled_zz_diagonal() {
        let u = controlled_observable(&PauliString::parse("ZZ").unwrap()).unwrap();
        let expected: Vec<f64> = vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
        for (i, &d) in expected.iter().enumerate() {
            assert_eq!(u.matrix().get(i, i).re, d);
        }
    }

    #[test]
    fn controlled_observable_matches_projector_form() {
        // U_S = 1 (x) P_+ + Z (x) P_- with P_\pm = (1 \pm S)/2.
        for text in ["ZZ", "XX", "YY", "ZX", "-XZ"] {
            let s = PauliString::parse(text).unwrap();
            let dense = s.to_matrix();
            let d = dense.rows();
            let id = ComplexMatrix::identity(d);
            let p_plus = id.add(&dense).unwrap().scale(Complex64::new(0.5, 0.0));
            let p_minus = id.sub(&dense).unwrap().scale(Complex64::new(0.5, 0.0));
            let z = PauliString::parse("Z").unwrap().to_matrix();
            let expected = tensor(&ComplexMatrix::identity(2), &p_plus)
                .add(&tensor(&z, &p_minus))
                .unwrap();
            let u = controlled_observable(&s).unwrap();
            assert!(u.matrix().approx_eq(&expected, TOL_ALGEBRAIC), "{text}");
        }
    }

    #[test]
    fn controlled_observable_squares_to_identity() {
        let u = controlled_observable(&PauliString::parse("YY").unwrap()).unwrap();
        let sq = u.matrix().matmul(u.matrix()).unwrap();
        assert!(sq.approx_eq(&ComplexMatrix::identity(8), TOL_ALGEBRAIC));
        assert!(u.matrix().is_hermitian(TOL_ALGEBRAIC));
    }

    #[test]
    fn controlled_observable_rejects_imaginary_phase() {
        let p = PauliString::parse("iX").unwrap();
        assert!(controlled_observable(&p).is_err());
    }

    #[test]
    fn row_one_correlation_is_plus_one() {
        let obs = vec![
            PauliString::parse("Z1").unwrap(),
            PauliString::parse("1Z").unwrap(),
            PauliString::parse("ZZ").unwrap(),
        ];
        let exp =
            CorrelationExperiment::new(DensityMatrix::maximally_mixed(4), obs, ProbeSpec::ideal())
                .unwrap();
        assert!((measure_correlation(&exp).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn column_three_correlation_is_minus_one() {
        let obs = vec![
            PauliString::parse("ZZ").unwrap(),
            PauliString::parse("XX").unwrap(),
            PauliString::parse("YY").unwrap(),
        ];
        let exp =
            CorrelationExperiment::new(DensityMatrix::maximally_mixed(4), obs, ProbeSpec::ideal())
                .unwrap();
        assert!((measure_correlation(&exp).unwrap() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn epsilon_scales_the_signal() {
        let obs = vec![
            PauliString::parse("ZZ").unwrap(),
            PauliString::parse("XX").unwrap(),
            PauliString::parse("YY").unwrap(),
        ];
        let exp = CorrelationExperiment::new(
            DensityMatrix::maximally_mixed(4),
            obs.clone(),
            ProbeSpec::new(0.3).unwrap(),
        )
        .unwrap();
        assert!((measure_correlation(&exp).unwrap() + 0.3).abs() < 1e-10);

        let dead = CorrelationExperiment::new(
            DensityMatrix::maximally_mixed(4),
            obs,
            ProbeSpec::new(0.0).unwrap(),
        )
        .unwrap();
        assert!(measure_correlation(&dead).unwrap().abs() < 1e-10);
    }

    #[test]
    fn non_commuting_observables_rejected() {
        let obs = vec![
            PauliString::parse("Z1").unwrap(),
            PauliString::parse("X1").unwrap(),
        ];
        assert!(CorrelationExperiment::new(
            DensityMatrix::maximally_mixed(4),
            obs,
            ProbeSpec::ideal(),
        )
        .is_err());
    }

    #[test]
    fn outcome_probabilities_eigenstate() {
        // rho = |00><00| is a +1 eigenstate of ZZ.
        let exp = CorrelationExperiment::new(
            DensityMatrix::basis_state(4, 0),
            vec![PauliString::parse("ZZ").unwrap()],
            ProbeSpec::ideal(),
        )
        .unwrap();
        let (p, m) = outcome_probabilities(&exp).unwrap();
        assert!((p - 1.0).abs() < 1e-10 && m.abs() < 1e-10);

        let partial = CorrelationExperiment::new(
            DensityMatrix::basis_state(4, 0),
            vec![PauliString::parse("ZZ").unwrap()],
            ProbeSpec::new(0.4).unwrap(),
        )
        .unwrap();
        let (p, m) = outcome_probabilities(&partial).unwrap();
        assert!((p - 0.7).abs() < 1e-10 && (m - 0.3).abs() < 1e-10);
    }

    #[test]
    fn outcome_probabilities_mixed_traceless() {
        let exp = CorrelationExperiment::new(
            DensityMatrix::maximally_mixed(4),
            vec![PauliString::parse("ZX").unwrap()],
            ProbeSpec::ideal(),
        )
        .unwrap();
        let (p, m) = outcome_probabilities(&exp).unwrap();
        assert!((p - 0.5).abs() < 1e-10 && (m - 0.5).abs() < 1e-10);
        let corr = measure_correlation(&exp).unwrap();
        assert!((p - m - corr).abs() < 1e-10);
        assert!((p + m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ideal_suite_gives_beta_six() {
        let result = run_experiment_suite(ProbeSpec::ideal(), None).unwrap();
        let expected = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0];
        for (line, want) in result.lines.iter().zip(expected) {
            assert!((line.raw_correlation - want).abs() < 1e-10);
        }
        assert!((result.beta - 6.0).abs() < 1e-10);
    }

    #[test]
    fn corrected_suite_is_epsilon_independent() {
        for eps in [0.25, 0.5, 0.9] {
            let result = run_experiment_suite(ProbeSpec::new(eps).unwrap(), None).unwrap();
            assert!(
                (result.beta - 6.0).abs() < 1e-10,
                "epsilon {eps}: beta {}",
                result.beta
            );
        }
    }

    #[test]
    fn uncorrected_suite_scales_with_epsilon() {
        let result = run_experiment_suite_with(ProbeSpec::new(0.25).unwrap(), None, false).unwrap();
        assert!((result.beta - 1.5).abs() < 1e-10);
    }

    #[test]
    fn zero_epsilon_correction_is_an_error() {
        assert!(run_experiment_suite(ProbeSpec::new(0.0).unwrap(), None).is_err());
    }

    #[test]
    fn suite_csv_shape() {
        let result = run_experiment_suite(ProbeSpec::ideal(), None).unwrap();
        let csv = result.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 8);
        assert!(rows[0].starts_with("line,raw_correlation,epsilon"));
        assert!(rows[7].starts_with("beta,,,,,"));
    }

    #[test]
    fn unital_identity_channel_matches() {
        let report = unital_equivalence_check(
            &[ComplexMatrix::identity(2)],
            ProbeSpec::new(0.7).unwrap(),
            5,
            7,
        )
        .unwrap();
        assert!(report.unital);
        assert!(report.statistics_equal(1e-12));
    }

    #[test]
    fn nonunital_channel_differs() {
        // Amplitude damping toward |+>: Hadamard-conjugated damping, which
        // moves the maximally mixed state and breaks the equivalence.
        let gamma: f64 = 0.5;
        let h = ComplexMatrix::from_real_rows(&[
            vec![1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()],
            vec![1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()],
        ])
        .unwrap();
        let a0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, (1.0 - gamma).sqrt()]])
            .unwrap();
        let a1 = ComplexMatrix::from_real_rows(&[vec![0.0, gamma.sqrt()], vec![0.0, 0.0]]).unwrap();
        let kraus = vec![
            h.matmul(&a0).unwrap().matmul(&h).unwrap(),
            h.matmul(&a1).unwrap().matmul(&h).unwrap(),
        ];
        let report = unital_equivalence_check(&kraus, ProbeSpec::new(0.5).unwrap(), 1, 1).unwrap();
        assert!(!report.unital);
        assert!(report.max_discrepancy > 1e-3);
        // (1 - eps) * gamma / 2 = 0.125 for the |+> trial
        assert!((report.trials[0].discrepancy - 0.125).abs() < 1e-10);
    }

    #[test]
    fn incomplete_probe_channel_rejected() {
        let half = ComplexMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        assert!(unital_equivalence_check(&[half], ProbeSpec::ideal(), 1, 0).is_err());
    }
}
