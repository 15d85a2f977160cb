//! Quantum SAT search on the statevector.
//!
//! A [`SatRegister`] holds the n variable qubits (qubit j is x_{j+1}) plus one
//! flag qubit at position n. The reversible evaluation of f only needs its
//! truth table: the work qubits of a gate-level U_f start and end in |0⟩, so
//! they never show up in any measured marginal and are not simulated.
//!
//! Amplitude amplification uses Q = −U e^{iπP_s} U† e^{iπP_t} with U = H^⊗n
//! and |s⟩ = |0…0⟩, i.e. the Grover iterate.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::cnf::{Assignment, CnfFormula};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::statevector::{StateVector, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq)]
pub struct SatRegister<T> {
    formula: CnfFormula,
    truth: Vec<bool>,
    state: StateVector<T>,
}

impl<T: Real> SatRegister<T> {
    /// Ohya–Masuda start state: uniform over the variable qubits, flag |0⟩.
    pub fn prepare(formula: &CnfFormula) -> Result<Self> {
        let n = formula.num_vars();
        if n + 1 > MAX_QUBITS {
            return Err(Error::QubitCount(n + 1));
        }
        let vars = StateVector::uniform(n)?;
        let flag = StateVector::zero(1)?;
        let state = vars.tensor(&flag)?;
        let truth = formula.truth_table(MAX_QUBITS)?;
        Ok(SatRegister {
            formula: formula.clone(),
            truth,
            state,
        })
    }

    /// Register in an arbitrary (n+1)-qubit state.
    pub fn with_state(formula: &CnfFormula, state: StateVector<T>) -> Result<Self> {
        let n = formula.num_vars();
        if state.num_qubits() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                got: state.num_qubits(),
            });
        }
        let truth = formula.truth_table(MAX_QUBITS)?;
        Ok(SatRegister {
            formula: formula.clone(),
            truth,
            state,
        })
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    pub fn into_state(self) -> StateVector<T> {
        self.state
    }

    pub fn num_vars(&self) -> usize {
        self.formula.num_vars()
    }

    fn flag_mask(&self) -> usize {
        1 << self.num_vars()
    }

    /// U_f: |x⟩|y⟩ → |x⟩|y ⊕ f(x)⟩ on every basis vector at once.
    pub fn apply_uf(&mut self) {
        let flag = self.flag_mask();
        let amps = self.state.amplitudes_mut();
        let (off, on) = amps.split_at_mut(flag);
        for ((a0, a1), &sat) in off.iter_mut().zip(on.iter_mut()).zip(&self.truth) {
            if sat {
                std::mem::swap(a0, a1);
            }
        }
    }

    /// Probability that the flag qubit reads 1, i.e. |P|t⟩|².
    pub fn flag_probability(&self) -> T {
        let flag = self.flag_mask();
        self.state.probability_of(|i| i & flag != 0)
    }

    /// Measures the flag; on 1, measures the variable qubits of the collapsed
    /// state and returns that assignment.
    pub fn sample_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Option<Assignment>> {
        let n = self.num_vars();
        let (flag, collapsed) = self.state.measure_qubit(n, rng)?;
        if !flag {
            return Ok(None);
        }
        let index = collapsed.sample_index(rng);
        let bits = (index & (self.flag_mask() - 1)) as u64;
        let assignment = Assignment::from_bits(bits, n);
        debug_assert!(self.formula.evaluate(&assignment).unwrap_or(false));
        Ok(Some(assignment))
    }
}

/// Multiplies every marked basis amplitude by −1.
pub fn phase_oracle<T: Real>(state: &mut StateVector<T>, marked: impl Fn(usize) -> bool) {
    for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if marked(i) {
            *a = -*a;
        }
    }
}

/// e^{iπP_t}: flips the phase of basis state `target` only.
pub fn phase_flip_state<T: Real>(state: &mut StateVector<T>, target: usize) -> Result<()> {
    let n = state.num_qubits();
    match state.amplitudes_mut().get_mut(target) {
        Some(a) => {
            *a = -*a;
            Ok(())
        }
        None => Err(Error::BasisIndex {
            index: target,
            num_qubits: n,
        }),
    }
}

fn grover_iterate<T: Real>(
    state: &mut StateVector<T>,
    marked: &impl Fn(usize) -> bool,
    sign: bool,
) {
    phase_oracle(state, marked);
    // U† = U for the Walsh–Hadamard transform
    state.walsh_hadamard_all();
    phase_flip_state(state, 0).expect("index 0 exists");
    state.walsh_hadamard_all();
    if sign {
        let minus = Complex::new(-T::one(), T::zero());
        state
            .amplitudes_mut()
            .iter_mut()
            .for_each(|a| *a = *a * minus);
    }
}

/// One application of Q = −U e^{iπP_s} U† e^{iπP_t}.
pub fn q_operator<T: Real>(state: &mut StateVector<T>, marked: impl Fn(usize) -> bool) {
    grover_iterate(state, &marked, true);
}

/// Q without the leading −1; differs from [`q_operator`] by a global phase only.
pub fn q_operator_unsigned<T: Real>(state: &mut StateVector<T>, marked: impl Fn(usize) -> bool) {
    grover_iterate(state, &marked, false);
}

/// Iteration schedule for `marked` solutions among `2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationPlan {
    pub marked: u64,
    pub search_space: u64,
    pub theta: f64,
    pub iterations: u64,
    pub predicted_success: f64,
}

impl AmplificationPlan {
    /// sin²((2k+1)θ) for an arbitrary iteration count.
    pub fn success_after(&self, k: u64) -> f64 {
        ((2 * k + 1) as f64 * self.theta).sin().powi(2)
    }
}

/// θ = asin√(r/N), k = max(0, round(π/(4θ) − ½)) with ties rounded up.
pub fn plan_iterations(num_qubits: usize, marked: u64) -> Result<AmplificationPlan> {
    if num_qubits >= 64 {
        return Err(Error::QubitCount(num_qubits));
    }
    let space = 1u64 << num_qubits;
    if marked == 0 || marked > space {
        return Err(Error::MarkedCount { marked, space });
    }
    let theta = (marked as f64 / space as f64).sqrt().asin();
    let x = std::f64::consts::PI / (4.0 * theta) - 0.5;
    // an exact half (e.g. r = N/2) may land a hair below .5 after asin
    let frac = x - x.floor();
    let k = if (frac - 0.5).abs() < 1e-9 {
        x.floor() + 1.0
    } else {
        x.round()
    };
    let iterations = k.max(0.0) as u64;
    let predicted_success = ((2 * iterations + 1) as f64 * theta).sin().powi(2);
    Ok(AmplificationPlan {
        marked,
        search_space: space,
        theta,
        iterations,
        predicted_success,
    })
}

/// Outcome of a Grover run over a CNF formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum GroverOutcome {
    Unsat { formula: String, n: usize, r: u64 },
    Searched(GroverStats),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverStats {
    pub formula: String,
    pub n: usize,
    pub r: u64,
    pub k: u64,
    pub theta: f64,
    pub predicted_success: f64,
    /// Marked-state probability of the simulated state before sampling.
    pub simulated_success: f64,
    pub shots: u64,
    pub success_count: u64,
    /// Keyed by assignment `x₁…xₙ`.
    pub outcome_histogram: BTreeMap<String, u64>,
}

impl GroverStats {
    pub fn empirical_success(&self) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.success_count as f64 / self.shots as f64
        }
    }
}

/// Plans from the exact solution count, applies Q^k to U|0…0⟩ and measures
/// `shots` independent preparations. Every prepared state is identical, so the
/// amplified state is built once and each shot measures a fresh copy of it.
pub fn grover_search<T: Real, R: Rng + ?Sized>(
    formula: &CnfFormula,
    rng: &mut R,
    shots: u64,
) -> Result<GroverOutcome> {
    let n = formula.num_vars();
    if n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    let truth = formula.truth_table(MAX_QUBITS)?;
    let r = truth.iter().filter(|&&t| t).count() as u64;
    let text = formula.to_dimacs();
    if r == 0 {
        return Ok(GroverOutcome::Unsat {
            formula: text,
            n,
            r,
        });
    }
    let plan = plan_iterations(n, r)?;
    let mut state = StateVector::<T>::zero(n)?;
    state.walsh_hadamard_all();
    let marked = |i: usize| truth[i];
    for _ in 0..plan.iterations {
        q_operator(&mut state, marked);
    }
    let simulated_success = state.probability_of(marked).to_f64_lossy();

    let sampler = state.sampler();
    let mut histogram = BTreeMap::new();
    let mut success_count = 0;
    for _ in 0..shots {
        let index = sampler.sample(rng);
        if truth[index] {
            success_count += 1;
        }
        let key = Assignment::from_bits(index as u64, n).to_string();
        *histogram.entry(key).or_insert(0) += 1;
    }
    Ok(GroverOutcome::Searched(GroverStats {
        formula: text,
        n,
        r,
        k: plan.iterations,
        theta: plan.theta,
        predicted_success: plan.predicted_success,
        simulated_success,
        shots,
        success_count,
        outcome_histogram: histogram,
    }))
}
