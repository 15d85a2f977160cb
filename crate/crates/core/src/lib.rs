//! Desk-scale laboratory for two ways of searching NP problem spaces.
//!
//! * [`statevector`] and [`quantum_sat`]: a dense qubit simulator, the flag-qubit
//!   SAT oracle, measurement sampling and Grover-style amplitude amplification.
//! * [`es_sat`]: a (μ,λ) evolution strategy over a real-valued relaxation of CNF.
//! * [`cerny_tsp`]: the slit-array interference machine for TSP, simulated by
//!   enumerating its trajectory superposition.
//!
//! Every search result is checked against exhaustive oracles in [`cnf`] and
//! [`cerny_tsp::brute_force_tsp`].
//!
//! Numerical code is generic over [`Real`]; the aliases below fix the common
//! `f64` and `f32` instantiations.

pub mod cerny_tsp;
pub mod cnf;
pub mod error;
pub mod es_sat;
pub mod quantum_sat;
pub mod rng;
pub mod scalar;
pub mod statevector;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;

pub type StateVector64 = statevector::StateVector<f64>;
pub type StateVector32 = statevector::StateVector<f32>;
pub type SingleQubitGate64 = statevector::SingleQubitGate<f64>;
pub type SingleQubitGate32 = statevector::SingleQubitGate<f32>;

pub type SatRegister64 = quantum_sat::SatRegister<f64>;
pub type SatRegister32 = quantum_sat::SatRegister<f32>;

pub type EsIndividual64 = es_sat::EsIndividual<f64>;
pub type EsIndividual32 = es_sat::EsIndividual<f32>;
pub type EsRun64 = es_sat::EsRun<f64>;

pub type TrajectoryKet64 = cerny_tsp::TrajectoryKet<f64>;
pub type TrajectoryKet32 = cerny_tsp::TrajectoryKet<f32>;
