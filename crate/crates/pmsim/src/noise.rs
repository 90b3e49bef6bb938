//! Per-gate dephasing noise and the beta degradation curve.
//!
//! The decoherence model: every controlled gate of a line experiment is
//! followed by a symmetric three-fold tensor product of the single-qubit
//! dephasing channel
//!
//! ```text
//!   A_0 = diag(1, sqrt(1 - eta)),   A_1 = diag(0, sqrt(eta)),
//! ```
//!
//! which fixes populations and scales single-qubit coherences by
//! sqrt(1 - eta). The strength eta = 1 - exp(-t / T2) follows from the
//! ratio of the pulse length t to the effective dephasing time T2. The
//! dephasing basis is the computational (Zeeman) basis on all three
//! qubits.

use crate::dqc1::{run_experiment_suite_with, ProbeSpec};
use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix};

/// Dephasing noise parameters; eta is always derived from t and T2, never
/// stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pulse_length_t: f64,
    dephasing_time_t2: f64,
    gates_per_experiment: usize,
}

impl NoiseModel {
    /// `t` and `t2` in milliseconds; `gates_per_experiment` counts the
    /// noise-channel applications per line (default one per controlled
    /// gate, i.e. 3).
    pub fn new(
        pulse_length_t: f64,
        dephasing_time_t2: f64,
        gates_per_experiment: usize,
    ) -> Result<Self> {
        dephasing_eta(pulse_length_t, dephasing_time_t2)?;
        if gates_per_experiment == 0 {
            return Err(Error::InvalidArgument(
                "gates_per_experiment must be positive".into(),
            ));
        }
        Ok(Self {
            pulse_length_t,
            dephasing_time_t2,
            gates_per_experiment,
        })
    }

    pub fn pulse_length_t(&self) -> f64 {
        self.pulse_length_t
    }

    pub fn dephasing_time_t2(&self) -> f64 {
        self.dephasing_time_t2
    }

    pub fn gates_per_experiment(&self) -> usize {
        self.gates_per_experiment
    }

    /// eta = 1 - exp(-t/T2), recomputed from the stored times.
    pub fn eta(&self) -> f64 {
        1.0 - (-self.pulse_length_t / self.dephasing_time_t2).exp()
    }
}

/// eta = 1 - exp(-t/T2). Requires t >= 0 and T2 > 0; the result lies in
/// [0, 1).
pub fn dephasing_eta(t: f64, t2: f64) -> Result<f64> {
    if t2.is_nan() || t2 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "dephasing time T2 must be positive, got {t2}"
        )));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "pulse length t must be nonnegative, got {t}"
        )));
    }
    Ok(1.0 - (-t / t2).exp())
}

/// The two single-qubit dephasing Kraus operators
/// `A_0 = diag(1, sqrt(1-eta))` and `A_1 = diag(0, sqrt(eta))`; complete
/// for every eta in [0, 1].
pub fn dephasing_kraus(eta: f64) -> Result<Vec<ComplexMatrix>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!(
            "eta must lie in [0, 1], got {eta}"
        )));
    }
    let a0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, (1.0 - eta).sqrt()]])
        .expect("2x2");
    let a1 = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, eta.sqrt()]]).expect("2x2");
    Ok(vec![a0, a1])
}

/// The eight Kraus operators of the symmetric three-qubit product channel
/// Lambda (x) Lambda (x) Lambda.
pub fn three_fold_channel(eta: f64) -> Result<Vec<ComplexMatrix>> {
    let single = dephasing_kraus(eta)?;
    let mut out = Vec::with_capacity(8);
    for a in &single {
        for b in &single {
            for c in &single {
                out.push(tensor(&tensor(a, b), c));
            }
        }
    }
    Ok(out)
}

/// Fair-sampling-corrected beta of the six-experiment suite with the noise
/// model's dephasing channel following each gate.
pub fn noisy_suite_beta(model: &NoiseModel, probe: ProbeSpec) -> Result<f64> {
    Ok(run_experiment_suite_with(probe, Some(model), true)?.beta)
}

/// One sweep point: the ratio t/T2, the derived eta, the six corrected
/// line terms, and beta.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub ratio: f64,
    pub eta: f64,
    pub terms: [f64; 6],
    pub beta: f64,
}

/// Beta as a function of the ratio t/T2, evaluated on a sorted grid.
#[derive(Debug, Clone)]
pub struct SweepSeries {
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    /// CSV with per-term columns. Floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "ratio_t_over_T2,eta,beta_r1,beta_r2,beta_r3,beta_c1,beta_c2,beta_c3,beta_total\n",
        );
        for p in &self.points {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.ratio,
                p.eta,
                p.terms[0],
                p.terms[1],
                p.terms[2],
                p.terms[3],
                p.terms[4],
                p.terms[5],
                p.beta,
            ));
        }
        out
    }
}

/// Evaluates beta over a strictly increasing grid of t/T2 ratios with
/// `gates` noise applications per line. Beta is non-increasing in the
/// ratio and tends to 6 as the ratio tends to 0.
pub fn beta_sweep(t: f64, ratios: &[f64], probe: ProbeSpec, gates: usize) -> Result<SweepSeries> {
    if ratios.is_empty() {
        return Err(Error::InvalidArgument("empty ratio grid".into()));
    }
    if ratios.iter().any(|&r| r.is_nan() || r <= 0.0) {
        return Err(Error::InvalidArgument(
            "ratios must be positive (a zero ratio would require infinite T2)".into(),
        ));
    }
    if ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "ratios must be strictly increasing".into(),
        ));
    }
    let mut points = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let model = NoiseModel::new(t, t / ratio, gates)?;
        let suite = run_experiment_suite_with(probe, Some(&model), true)?;
        let mut terms = [0.0; 6];
        for (slot, line) in terms.iter_mut().zip(&suite.lines) {
            *slot = line.corrected_correlation;
        }
        points.push(SweepPoint {
            ratio,
            eta: model.eta(),
            terms,
            beta: suite.beta,
        });
    }
    Ok(SweepSeries { points })
}
