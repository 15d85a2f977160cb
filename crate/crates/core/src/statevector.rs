//! Dense n-qubit statevector.
//!
//! Basis index `i` is little-endian: bit `b` of `i` is the value of qubit `b`,
//! so `i = 2⁰a₀ + 2¹a₁ + …`. A state is value-semantic; gates mutate through
//! `&mut self` and measurement returns a fresh collapsed state.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_QUBITS: usize = 24;

/// Norm drift tolerated on a runtime state.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Per-entry tolerance on U†U = I at gate construction.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::QubitCount(n))
    } else {
        Ok(())
    }
}

/// 2×2 unitary acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate<T> {
    m: [[Complex<T>; 2]; 2],
}

impl<T: Real> SingleQubitGate<T> {
    /// Checks U†U = I entrywise.
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let tol = T::tolerance(UNITARY_TOLERANCE, 64.0);
        let mut worst = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let dot = m[0][r].conj() * m[0][c] + m[1][r].conj() * m[1][c];
                let expect = if r == c { T::one() } else { T::zero() };
                worst = worst.max((dot - Complex::new(expect, T::zero())).norm());
            }
        }
        if !(worst <= tol) {
            return Err(Error::NonUnitary(worst.to_f64_lossy()));
        }
        Ok(SingleQubitGate { m })
    }

    fn real(a: T, b: T, c: T, d: T) -> Self {
        let z = T::zero();
        SingleQubitGate {
            m: [
                [Complex::new(a, z), Complex::new(b, z)],
                [Complex::new(c, z), Complex::new(d, z)],
            ],
        }
    }

    pub fn identity() -> Self {
        Self::real(T::one(), T::zero(), T::zero(), T::one())
    }

    /// |0⟩ ↔ |1⟩.
    pub fn pauli_x() -> Self {
        Self::real(T::zero(), T::one(), T::one(), T::zero())
    }

    /// |1⟩ → −|1⟩.
    pub fn pauli_z() -> Self {
        Self::real(T::one(), T::zero(), T::zero(), -T::one())
    }

    /// Walsh–Hadamard: |0⟩ → (|0⟩+|1⟩)/√2, |1⟩ → (|0⟩−|1⟩)/√2.
    pub fn hadamard() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self::real(h, h, h, -h)
    }

    /// General single-qubit unitary from Euler angles (up to global phase).
    pub fn u3(theta: T, phi: T, lambda: T) -> Self {
        let half = theta / T::lit(2.0);
        let (s, c) = half.sin_cos();
        let z = T::zero();
        SingleQubitGate {
            m: [
                [Complex::new(c, z), -Complex::from_polar(s, lambda)],
                [
                    Complex::from_polar(s, phi),
                    Complex::from_polar(c, phi + lambda),
                ],
            ],
        }
    }

    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = self.m;
        SingleQubitGate {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T> {
    pub basis_index: usize,
    pub collapsed: StateVector<T>,
}

impl<T: Real> StateVector<T> {
    /// |i⟩ over `n` qubits.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let len = 1usize << n;
        if index >= len {
            return Err(Error::BasisIndex {
                index,
                num_qubits: n,
            });
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); len];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    /// |0…0⟩.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis_state(n, 0)
    }

    /// Uniform superposition H^⊗n|0…0⟩, written directly.
    pub fn uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let len = 1usize << n;
        let a = T::one() / T::lit(len as f64).sqrt();
        Ok(StateVector {
            num_qubits: n,
            amps: vec![Complex::new(a, T::zero()); len],
        })
    }

    /// Wraps amplitudes that must already satisfy Σ|cᵢ|² = 1.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let s = Self::from_amplitudes_unnormalized(amps)?;
        let norm = s.norm_sqr();
        if !((norm - T::one()).abs() <= T::tolerance(NORM_TOLERANCE, 1024.0)) {
            return Err(Error::NotNormalized(norm.to_f64_lossy()));
        }
        Ok(s)
    }

    /// Wraps amplitudes without the normalization check; gates stay linear on
    /// such vectors but measurement expects a normalized state.
    pub fn from_amplitudes_unnormalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NotNormalized(f64::NAN));
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Option<Complex<T>> {
        self.amps.get(index).copied()
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > T::zero() {
            let inv = T::one() / n;
            self.amps.iter_mut().for_each(|c| *c = c.scale(inv));
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// Applies `gate` to qubit `qubit` (identity on all others).
    pub fn apply_gate(&mut self, gate: &SingleQubitGate<T>, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        let [[m00, m01], [m10, m11]] = gate.m;
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m00 * x + m01 * y;
                *a1 = m10 * x + m11 * y;
            }
        }
        Ok(())
    }

    /// H on every qubit.
    pub fn walsh_hadamard_all(&mut self) {
        let h = SingleQubitGate::hadamard();
        for q in 0..self.num_qubits {
            self.apply_gate(&h, q).expect("qubit in range");
        }
    }

    /// `self ⊗ other` with `self` on the low qubits: the amplitude at
    /// `j·2^{n_self} + i` is `self[i]·other[j]`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        check_qubits(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            amps.extend(self.amps.iter().map(|a| a * b));
        }
        Ok(StateVector {
            num_qubits: n,
            amps,
        })
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Σ|cᵢ|² over the indices accepted by `pred`.
    pub fn probability_of(&self, pred: impl Fn(usize) -> bool) -> T {
        self.amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| pred(i))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// Cumulative distribution for repeated full measurements of this state.
    pub fn sampler(&self) -> MeasurementSampler {
        let mut acc = 0.0;
        let cumulative = self
            .amps
            .iter()
            .map(|c| {
                acc += c.norm_sqr().to_f64_lossy();
                acc
            })
            .collect();
        MeasurementSampler { cumulative }
    }

    /// Draws a basis index with probability |cᵢ|² without collapsing.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self
            .amps
            .iter()
            .map(|c| c.norm_sqr().to_f64_lossy())
            .sum::<f64>();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, c) in self.amps.iter().enumerate() {
            let p = c.norm_sqr().to_f64_lossy();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if target < acc {
                return i;
            }
        }
        last_nonzero
    }

    /// Full projective measurement.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> MeasurementOutcome<T> {
        let basis_index = self.sample_index(rng);
        let collapsed = Self::basis_state(self.num_qubits, basis_index).expect("index in range");
        MeasurementOutcome {
            basis_index,
            collapsed,
        }
    }

    /// Measures one qubit; the returned state is the renormalized projection.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<(bool, Self)> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        let mask = 1usize << qubit;
        let (mut p0, mut p1) = (0.0f64, 0.0f64);
        for (i, c) in self.amps.iter().enumerate() {
            let p = c.norm_sqr().to_f64_lossy();
            if i & mask == 0 {
                p0 += p;
            } else {
                p1 += p;
            }
        }
        let bit = rng.random::<f64>() * (p0 + p1) >= p0;
        let keep = if bit { p1 } else { p0 };
        let scale = T::one() / T::lit(keep).sqrt();
        let zero = Complex::new(T::zero(), T::zero());
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (i & mask != 0) == bit {
                    c.scale(scale)
                } else {
                    zero
                }
            })
            .collect();
        Ok((
            bit,
            StateVector {
                num_qubits: self.num_qubits,
                amps,
            },
        ))
    }

    /// Two-qubit entanglement by the determinant criterion:
    /// entangled iff |c₀₀c₁₁ − c₀₁c₁₀| > tol.
    pub fn is_entangled_2q(&self, tol: T) -> Result<bool> {
        if self.num_qubits != 2 {
            return Err(Error::QubitCount(self.num_qubits));
        }
        let c = &self.amps;
        let det = c[0] * c[3] - c[1] * c[2];
        Ok(det.norm() > tol)
    }

    /// `index<TAB>re<TAB>im` per nonzero amplitude, ascending.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.amps.iter().enumerate() {
            if !c.re.is_zero() || !c.im.is_zero() {
                let _ = writeln!(out, "{i}\t{}\t{}", c.re, c.im);
            }
        }
        out
    }
}

/// Precomputed cumulative probabilities; each draw is one uniform variate
/// and a binary search, giving the same index as [`StateVector::sample_index`]
/// for the same variate.
#[derive(Debug, Clone)]
pub struct MeasurementSampler {
    cumulative: Vec<f64>,
}

impl MeasurementSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty state");
        let target = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= target);
        if i < self.cumulative.len() {
            return i;
        }
        // target hit the top edge through rounding: last index carrying mass
        let mut j = self.cumulative.len() - 1;
        while j > 0 && self.cumulative[j] == self.cumulative[j - 1] {
            j -= 1;
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn sv(amps: &[f64]) -> StateVector<f64> {
        StateVector::from_amplitudes(amps.iter().map(|&a| c(a, 0.0)).collect()).unwrap()
    }

    fn assert_close(s: &StateVector<f64>, expect: &[C], tol: f64) {
        assert_eq!(s.len(), expect.len());
        for (i, (a, b)) in s.amplitudes().iter().zip(expect).enumerate() {
            assert!((a - b).norm() <= tol, "amp {i}: {a} vs {b}");
        }
    }

    fn bell() -> StateVector<f64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        sv(&[h, 0.0, 0.0, h])
    }

    #[test]
    fn basis_states() {
        let s = StateVector::<f64>::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::<f64>::basis_state(2, 3).unwrap();
        assert_eq!(s.amplitude(3), Some(c(1.0, 0.0)));
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(
            StateVector::<f64>::basis_state(1, 2),
            Err(Error::BasisIndex {
                index: 2,
                num_qubits: 1
            })
        );
        assert_eq!(
            StateVector::<f64>::basis_state(0, 0),
            Err(Error::QubitCount(0))
        );
        assert_eq!(
            StateVector::<f64>::basis_state(25, 0),
            Err(Error::QubitCount(25))
        );
    }

    #[test]
    fn named_gates() {
        let mut s = StateVector::<f64>::basis_state(1, 0).unwrap();
        s.apply_gate(&SingleQubitGate::pauli_x(), 0).unwrap();
        assert_close(&s, &[c(0.0, 0.0), c(1.0, 0.0)], 0.0);

        let mut s = StateVector::<f64>::basis_state(1, 1).unwrap();
        s.apply_gate(&SingleQubitGate::pauli_z(), 0).unwrap();
        assert_close(&s, &[c(0.0, 0.0), c(-1.0, 0.0)], 0.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = StateVector::<f64>::basis_state(1, 0).unwrap();
        s.apply_gate(&SingleQubitGate::hadamard(), 0).unwrap();
        assert_close(&s, &[c(h, 0.0), c(h, 0.0)], 1e-15);

        let mut s = StateVector::<f64>::basis_state(1, 1).unwrap();
        s.walsh_hadamard_all();
        assert_close(&s, &[c(h, 0.0), c(-h, 0.0)], 1e-15);

        assert!(s.apply_gate(&SingleQubitGate::pauli_x(), 1).is_err());
    }

    #[test]
    fn gate_acts_on_named_qubit_only() {
        // X on qubit 1 of |01⟩ (index 1) gives |11⟩ (index 3)
        let mut s = StateVector::<f64>::basis_state(2, 1).unwrap();
        s.apply_gate(&SingleQubitGate::pauli_x(), 1).unwrap();
        assert_eq!(s, StateVector::basis_state(2, 3).unwrap());
    }

    #[test]
    fn non_unitary_gate_rejected() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!(SingleQubitGate::new([[one, one], [zero, one]]).is_err());
        assert!(SingleQubitGate::new([[one, zero], [zero, c(0.0, 1.0)]]).is_ok());
        let g = SingleQubitGate::<f64>::u3(0.3, 1.1, -0.4);
        assert!(SingleQubitGate::new(g.matrix()).is_ok());
    }

    #[test]
    fn walsh_hadamard_uniform_and_involution() {
        let mut s = StateVector::<f64>::zero(3).unwrap();
        s.walsh_hadamard_all();
        let a = 1.0 / 8f64.sqrt();
        assert_close(&s, &[c(a, 0.0); 8], 1e-15);
        s.walsh_hadamard_all();
        assert_close(&s, StateVector::<f64>::zero(3).unwrap().amplitudes(), 1e-15);
    }

    #[test]
    fn tensor_index_convention() {
        let zero = StateVector::<f64>::basis_state(1, 0).unwrap();
        assert_eq!(
            zero.tensor(&zero).unwrap(),
            StateVector::basis_state(2, 0).unwrap()
        );

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = sv(&[h, h]);
        let one = StateVector::<f64>::basis_state(1, 1).unwrap();
        // (|0⟩+|1⟩)/√2 on qubit 0, |1⟩ on qubit 1: indices 2 (|10⟩) and 3 (|11⟩)
        let t = plus.tensor(&one).unwrap();
        assert_close(&t, &[c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0), c(h, 0.0)], 0.0);
        assert!((t.norm_sqr() - 1.0).abs() < 1e-12);

        let big = StateVector::<f64>::zero(13).unwrap();
        assert_eq!(big.tensor(&big), Err(Error::QubitCount(26)));
    }

    #[test]
    fn measure_deterministic_state() {
        let s = StateVector::<f64>::basis_state(2, 3).unwrap();
        let mut rng = seeded(1);
        for _ in 0..100 {
            let out = s.measure_all(&mut rng);
            assert_eq!(out.basis_index, 3);
            assert_eq!(out.collapsed.measure_all(&mut rng).basis_index, 3);
        }
    }

    fn within_3_sigma(count: u64, shots: u64, p: f64) -> bool {
        let freq = count as f64 / shots as f64;
        (freq - p).abs() <= 3.0 * (p * (1.0 - p) / shots as f64).sqrt()
    }

    #[test]
    fn bell_measurement_statistics() {
        let s = bell();
        let mut rng = seeded(0);
        let mut counts = [0u64; 4];
        for _ in 0..10_000 {
            counts[s.measure_all(&mut rng).basis_index] += 1;
        }
        assert_eq!(counts[1] + counts[2], 0);
        assert!(within_3_sigma(counts[0], 10_000, 0.5), "{counts:?}");
        assert!(within_3_sigma(counts[3], 10_000, 0.5), "{counts:?}");
    }

    #[test]
    fn uniform_measurement_statistics() {
        let s = StateVector::<f64>::uniform(3).unwrap();
        let sampler = s.sampler();
        let mut rng = seeded(2);
        let mut counts = [0u64; 8];
        for _ in 0..10_000 {
            counts[sampler.sample(&mut rng)] += 1;
        }
        assert!(
            counts.iter().all(|&k| within_3_sigma(k, 10_000, 0.125)),
            "{counts:?}"
        );
    }

    #[test]
    fn sampler_matches_linear_scan() {
        let mut s = StateVector::<f64>::zero(4).unwrap();
        s.apply_gate(&SingleQubitGate::u3(0.7, 0.1, 0.2), 0)
            .unwrap();
        s.apply_gate(&SingleQubitGate::u3(2.1, 0.5, 1.2), 2)
            .unwrap();
        let sampler = s.sampler();
        let (mut a, mut b) = (seeded(9), seeded(9));
        for _ in 0..1000 {
            assert_eq!(sampler.sample(&mut a), s.sample_index(&mut b));
        }
    }

    #[test]
    fn measurement_is_seed_deterministic() {
        let s = StateVector::<f64>::uniform(5).unwrap();
        let run = |seed| {
            let mut rng = seeded(seed);
            (0..50)
                .map(|_| s.measure_all(&mut rng).basis_index)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn bell_partial_measurement_fixes_partner() {
        let s = bell();
        let mut saw = [false; 2];
        let mut rng = seeded(3);
        for _ in 0..64 {
            let (bit, post) = s.measure_qubit(0, &mut rng).unwrap();
            let expect = StateVector::basis_state(2, if bit { 3 } else { 0 }).unwrap();
            assert_close(&post, expect.amplitudes(), 1e-12);
            saw[bit as usize] = true;
        }
        assert_eq!(saw, [true, true]);
    }

    #[test]
    fn partial_measurement_of_basis_and_uniform_states() {
        let s = StateVector::<f64>::basis_state(2, 2).unwrap();
        let mut rng = seeded(5);
        for _ in 0..20 {
            assert!(s.measure_qubit(1, &mut rng).unwrap().0);
        }
        let u = StateVector::<f64>::uniform(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut zeros = 0;
        for _ in 0..10_000 {
            let (bit, post) = u.measure_qubit(0, &mut rng).unwrap();
            if !bit {
                zeros += 1;
                assert_close(
                    &post,
                    &[c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)],
                    1e-12,
                );
            }
        }
        assert!(within_3_sigma(zeros, 10_000, 0.5));
        assert!(u.measure_qubit(2, &mut rng).is_err());
    }

    #[test]
    fn probability_of_predicates() {
        let u = StateVector::<f64>::uniform(3).unwrap();
        assert!((u.probability_of(|i| i < 4) - 0.5).abs() < 1e-15);
        let b = StateVector::<f64>::basis_state(2, 1).unwrap();
        assert_eq!(b.probability_of(|i| i % 2 == 1), 1.0);
    }

    #[test]
    fn entanglement_examples() {
        assert!(bell().is_entangled_2q(1e-9).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |0⟩ on qubit 1, |+⟩ on qubit 0
        assert!(!sv(&[h, h, 0.0, 0.0]).is_entangled_2q(1e-9).unwrap());
        assert!(!sv(&[0.5, 0.5, 0.5, 0.5]).is_entangled_2q(1e-9).unwrap());
        assert_eq!(
            StateVector::<f64>::zero(3).unwrap().is_entangled_2q(1e-9),
            Err(Error::QubitCount(3))
        );
    }

    #[test]
    fn debug_dump_format() {
        let mut s = StateVector::<f64>::zero(2).unwrap();
        s.apply_gate(&SingleQubitGate::pauli_x(), 1).unwrap();
        s.apply_gate(&SingleQubitGate::pauli_z(), 1).unwrap();
        assert_eq!(s.debug_dump(), "2\t-1\t0\n");
        assert_eq!(bell().debug_dump().lines().count(), 2);
    }

    #[test]
    fn from_amplitudes_validation() {
        assert_eq!(
            StateVector::<f64>::from_amplitudes(vec![c(1.0, 0.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        );
        assert!(matches!(
            StateVector::<f64>::from_amplitudes(vec![c(1.0, 0.0); 4]),
            Err(Error::NotNormalized(_))
        ));
        assert!(StateVector::<f64>::from_amplitudes_unnormalized(vec![c(1.0, 0.0); 4]).is_ok());
    }

    #[test]
    fn single_precision_walsh_hadamard() {
        let mut s = StateVector::<f32>::zero(10).unwrap();
        s.walsh_hadamard_all();
        let a = 1.0f32 / 32.0;
        assert!(s
            .amplitudes()
            .iter()
            .all(|c| (c.re - a).abs() < 1e-6 && c.im == 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-5);
    }

    fn arb_gate() -> impl Strategy<Value = SingleQubitGate<f64>> {
        prop_oneof![
            Just(SingleQubitGate::identity()),
            Just(SingleQubitGate::pauli_x()),
            Just(SingleQubitGate::pauli_z()),
            Just(SingleQubitGate::hadamard()),
            (0.0..6.3f64, 0.0..6.3f64, 0.0..6.3f64)
                .prop_map(|(t, p, l)| SingleQubitGate::u3(t, p, l)),
        ]
    }

    fn arb_amps(n: usize) -> impl Strategy<Value = Vec<C>> {
        prop::collection::vec(
            (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| c(r, i)),
            1 << n,
        )
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(
            amps in arb_amps(4),
            ops in prop::collection::vec((arb_gate(), 0..4usize), 1..60),
        ) {
            prop_assume!(amps.iter().any(|a| a.norm() > 1e-3));
            let mut s = StateVector::from_amplitudes_unnormalized(amps).unwrap();
            s.normalize();
            for (g, q) in &ops {
                s.apply_gate(g, *q).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn named_gates_are_involutions(amps in arb_amps(3), q in 0..3usize) {
            let s0 = StateVector::from_amplitudes_unnormalized(amps).unwrap();
            for g in [SingleQubitGate::pauli_x(), SingleQubitGate::pauli_z(), SingleQubitGate::hadamard()] {
                let mut s = s0.clone();
                s.apply_gate(&g, q).unwrap();
                s.apply_gate(&g, q).unwrap();
                assert_close(&s, s0.amplitudes(), 1e-12);
            }
        }

        #[test]
        fn gates_are_linear(
            x in arb_amps(3), y in arb_amps(3),
            alpha in (-2.0..2.0f64, -2.0..2.0f64), beta in (-2.0..2.0f64, -2.0..2.0f64),
            g in arb_gate(), q in 0..3usize,
        ) {
            let (alpha, beta) = (c(alpha.0, alpha.1), c(beta.0, beta.1));
            let combo: Vec<C> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
            let mut lhs = StateVector::from_amplitudes_unnormalized(combo).unwrap();
            lhs.apply_gate(&g, q).unwrap();
            let mut sx = StateVector::from_amplitudes_unnormalized(x).unwrap();
            let mut sy = StateVector::from_amplitudes_unnormalized(y).unwrap();
            sx.apply_gate(&g, q).unwrap();
            sy.apply_gate(&g, q).unwrap();
            let rhs: Vec<C> = sx.amplitudes().iter().zip(sy.amplitudes()).map(|(a, b)| alpha * a + beta * b).collect();
            assert_close(&lhs, &rhs, 1e-12);
        }

        #[test]
        fn tensor_is_norm_multiplicative(a in arb_amps(2), b in arb_amps(3)) {
            let sa = StateVector::from_amplitudes_unnormalized(a).unwrap();
            let sb = StateVector::from_amplitudes_unnormalized(b).unwrap();
            let t = sa.tensor(&sb).unwrap();
            prop_assert_eq!(t.num_qubits(), 5);
            prop_assert!((t.norm_sqr() - sa.norm_sqr() * sb.norm_sqr()).abs() < 1e-12);
        }
    }
}
