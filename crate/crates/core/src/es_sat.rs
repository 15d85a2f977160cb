//! (μ,λ) evolution strategy for SAT over a real-valued relaxation.
//!
//! Each positive literal xᵢ becomes (yᵢ − 1)², each negative literal becomes
//! (yᵢ + 1)²; a clause is the product of its literal terms and the formula is
//! the sum over clauses. The relaxation is zero at a ±1 corner exactly when the
//! decoded assignment (+1 ↔ true) satisfies the formula. Success is always
//! decided by decoding and evaluating the Boolean formula, never by the
//! fitness value.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, CnfFormula};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recombination {
    /// Mutation only.
    None,
    /// Discrete recombination of object parameters, intermediate of σ.
    DiscreteObjectIntermediateSigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    pub mu: usize,
    pub lambda: usize,
    pub sigma_cap: f64,
    pub sigma_floor: f64,
    pub initial_sigma: f64,
    pub init_range: (f64, f64),
    /// Self-adaptation rate; `None` means 1/√n.
    pub tau: Option<f64>,
    pub max_generations: u64,
    pub recombination: Recombination,
}

impl Default for EsConfig {
    fn default() -> Self {
        EsConfig {
            mu: 15,
            lambda: 100,
            sigma_cap: 3.0,
            sigma_floor: 1e-8,
            initial_sigma: 1.0,
            init_range: (-1.0, 1.0),
            tau: None,
            max_generations: 1000,
            recombination: Recombination::DiscreteObjectIntermediateSigma,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidFormula(format!("ES config: {msg}")));
        if self.mu == 0 || self.mu >= self.lambda {
            return bad("need 0 < mu < lambda");
        }
        if self.recombination != Recombination::None && self.mu < 2 {
            return bad("recombination needs at least two parents");
        }
        if !(self.sigma_cap > 0.0) || !(self.sigma_floor > 0.0) || self.sigma_floor > self.sigma_cap
        {
            return bad("need 0 < sigma_floor <= sigma_cap");
        }
        if !(self.initial_sigma >= self.sigma_floor && self.initial_sigma <= self.sigma_cap) {
            return bad("initial sigma outside [sigma_floor, sigma_cap]");
        }
        if !(self.init_range.0 < self.init_range.1) {
            return bad("empty initialization range");
        }
        if matches!(self.tau, Some(t) if !(t >= 0.0)) {
            return bad("tau must be non-negative");
        }
        Ok(())
    }

    pub fn tau_for(&self, n: usize) -> f64 {
        self.tau.unwrap_or_else(|| 1.0 / (n as f64).sqrt())
    }
}

/// Object parameters with one shared step size. `id` is unique within a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EsIndividual<T> {
    pub id: u64,
    pub y: Vec<T>,
    pub sigma: T,
}

/// Relaxed fitness; 0 is optimal.
pub fn transform_fitness<T: Real>(formula: &CnfFormula, y: &[T]) -> Result<T> {
    if y.len() != formula.num_vars() {
        return Err(Error::LengthMismatch {
            expected: formula.num_vars(),
            got: y.len(),
        });
    }
    Ok(fitness_unchecked(formula, y))
}

fn fitness_unchecked<T: Real>(formula: &CnfFormula, y: &[T]) -> T {
    let one = T::one();
    formula
        .clauses()
        .iter()
        .map(|clause| {
            clause.iter().fold(one, |acc, lit| {
                let v = y[lit.index()];
                let d = if lit.is_negated() { v + one } else { v - one };
                acc * d * d
            })
        })
        .sum()
}

/// yᵢ ≥ 0 decodes to true.
pub fn decode<T: Real>(y: &[T]) -> Assignment {
    Assignment::new(y.iter().map(|&v| v >= T::zero()).collect())
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Lognormal self-adaptation of σ (clamped to the floor and cap), then an
/// isotropic Gaussian step on every object parameter.
pub fn mutate<T: Real, R: Rng + ?Sized>(
    ind: &EsIndividual<T>,
    cfg: &EsConfig,
    rng: &mut R,
) -> EsIndividual<T> {
    let tau = T::lit(cfg.tau_for(ind.y.len()));
    let g: T = normal(rng);
    let sigma = (ind.sigma * (tau * g).exp())
        .min(T::lit(cfg.sigma_cap))
        .max(T::lit(cfg.sigma_floor));
    let y = ind
        .y
        .iter()
        .map(|&v| v + sigma * normal::<T, R>(rng))
        .collect();
    EsIndividual {
        id: ind.id,
        y,
        sigma,
    }
}

/// Discrete recombination of y, arithmetic mean of σ.
pub fn recombine<T: Real, R: Rng + ?Sized>(
    a: &EsIndividual<T>,
    b: &EsIndividual<T>,
    rng: &mut R,
) -> EsIndividual<T> {
    let y =
        a.y.iter()
            .zip(&b.y)
            .map(|(&ya, &yb)| if rng.random_bool(0.5) { ya } else { yb })
            .collect();
    let sigma = (a.sigma + b.sigma) / T::lit(2.0);
    EsIndividual { id: a.id, y, sigma }
}

/// Read-only view handed to observers once per generation, after selection.
/// Generation 0 is the initial population and has no offspring.
#[derive(Debug)]
pub struct GenerationView<'a, T> {
    pub generation: u64,
    pub parents: &'a [EsIndividual<T>],
    pub offspring: &'a [EsIndividual<T>],
    pub best_fitness: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsRun<T> {
    pub solved: bool,
    /// Decoded assignment of the best individual, verified against the formula.
    pub assignment: Option<Assignment>,
    /// Generation at which the run stopped (0 = initial population).
    pub generations: u64,
    pub evaluations: u64,
    pub best_fitness_per_generation: Vec<T>,
}

/// Serializable result record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsRecord<T> {
    pub solved: bool,
    pub assignment: Option<String>,
    pub generations: u64,
    pub evaluations: u64,
    pub best_fitness_per_generation: Vec<T>,
    pub config_echo: EsConfig,
    pub seed: u64,
}

impl<T: Real> EsRun<T> {
    pub fn to_record(&self, cfg: &EsConfig, seed: u64) -> EsRecord<T> {
        EsRecord {
            solved: self.solved,
            assignment: self.assignment.as_ref().map(|a| a.to_string()),
            generations: self.generations,
            evaluations: self.evaluations,
            best_fitness_per_generation: self.best_fitness_per_generation.clone(),
            config_echo: cfg.clone(),
            seed,
        }
    }
}

pub fn run_es<T: Real, R: Rng + ?Sized>(
    formula: &CnfFormula,
    cfg: &EsConfig,
    rng: &mut R,
) -> Result<EsRun<T>> {
    run_es_observed(formula, cfg, rng, |_| {})
}

/// [`run_es`] with a callback after each generation's selection.
///
/// All random draws happen sequentially in a fixed order; only fitness
/// evaluation is parallel, so a seed fixes the whole trajectory.
pub fn run_es_observed<T: Real, R: Rng + ?Sized>(
    formula: &CnfFormula,
    cfg: &EsConfig,
    rng: &mut R,
    mut observer: impl FnMut(&GenerationView<'_, T>),
) -> Result<EsRun<T>> {
    cfg.validate()?;
    let n = formula.num_vars();
    let (lo, hi) = cfg.init_range;
    let mut next_id = 0u64;

    let mut parents: Vec<EsIndividual<T>> = (0..cfg.mu)
        .map(|_| {
            let y = (0..n).map(|_| T::lit(rng.random_range(lo..hi))).collect();
            next_id += 1;
            EsIndividual {
                id: next_id - 1,
                y,
                sigma: T::lit(cfg.initial_sigma),
            }
        })
        .collect();

    let fitness: Vec<T> = parents
        .par_iter()
        .map(|p| fitness_unchecked(formula, &p.y))
        .collect();
    let mut evaluations = cfg.mu as u64;
    let mut order: Vec<usize> = (0..cfg.mu).collect();
    order.sort_by(|&a, &b| cmp_fitness(fitness[a], fitness[b]));
    parents = order.iter().map(|&i| parents[i].clone()).collect();
    let mut trace = vec![fitness[order[0]]];
    observer(&GenerationView {
        generation: 0,
        parents: &parents,
        offspring: &[],
        best_fitness: trace[0],
    });

    let check = |best: &EsIndividual<T>| -> Result<Option<Assignment>> {
        let a = decode(&best.y);
        Ok(formula.evaluate(&a)?.then_some(a))
    };

    if let Some(a) = check(&parents[0])? {
        return Ok(EsRun {
            solved: true,
            assignment: Some(a),
            generations: 0,
            evaluations,
            best_fitness_per_generation: trace,
        });
    }

    for generation in 1..=cfg.max_generations {
        let offspring: Vec<EsIndividual<T>> = (0..cfg.lambda)
            .map(|_| {
                let first = rng.random_range(0..cfg.mu);
                let base = match cfg.recombination {
                    Recombination::None => parents[first].clone(),
                    Recombination::DiscreteObjectIntermediateSigma => {
                        let mut second = rng.random_range(0..cfg.mu - 1);
                        if second >= first {
                            second += 1;
                        }
                        recombine(&parents[first], &parents[second], rng)
                    }
                };
                let mut child = mutate(&base, cfg, rng);
                child.id = next_id;
                next_id += 1;
                child
            })
            .collect();

        let fitness: Vec<T> = offspring
            .par_iter()
            .map(|c| fitness_unchecked(formula, &c.y))
            .collect();
        evaluations += cfg.lambda as u64;

        let mut order: Vec<usize> = (0..cfg.lambda).collect();
        order.sort_by(|&a, &b| cmp_fitness(fitness[a], fitness[b]));
        parents = order[..cfg.mu]
            .iter()
            .map(|&i| offspring[i].clone())
            .collect();
        let best_fitness = fitness[order[0]];
        trace.push(best_fitness);
        observer(&GenerationView {
            generation,
            parents: &parents,
            offspring: &offspring,
            best_fitness,
        });

        if let Some(a) = check(&parents[0])? {
            return Ok(EsRun {
                solved: true,
                assignment: Some(a),
                generations: generation,
                evaluations,
                best_fitness_per_generation: trace,
            });
        }
    }

    Ok(EsRun {
        solved: false,
        assignment: None,
        generations: cfg.max_generations,
        evaluations,
        best_fitness_per_generation: trace,
    })
}

// NaN sorts last
fn cmp_fitness<T: Real>(a: T, b: T) -> std::cmp::Ordering {
    a.partial_cmp(&b)
        .unwrap_or_else(|| b.is_nan().cmp(&a.is_nan()).reverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{parse_dimacs, random_k_sat};
    use crate::rng::seeded;
    use std::collections::HashSet;

    fn sigma() -> CnfFormula {
        parse_dimacs("p cnf 3 3\n1 2 -3 0\n-1 -2 0\n-2 3 0\n").unwrap()
    }

    #[test]
    fn fitness_hand_values() {
        let f = sigma();
        assert_eq!(transform_fitness(&f, &[1.0, -1.0, 1.0]).unwrap(), 0.0);
        // clause (x̄ + ȳ) contributes (1+1)²·(1+1)² = 16; the others vanish
        assert_eq!(transform_fitness(&f, &[1.0, 1.0, 1.0]).unwrap(), 16.0);
        assert_eq!(transform_fitness(&f, &[-1.0, -1.0, -1.0]).unwrap(), 0.0);
        // interior point: (0-1)²(0.5-1)²(0+1)² + (0+1)²(0.5+1)² + (0.5+1)²(0-1)²
        let v: f64 = transform_fitness(&f, &[0.0, 0.5, 0.0]).unwrap();
        assert!((v - (0.25 + 2.25 + 2.25)).abs() < 1e-15);
        assert_eq!(
            transform_fitness(&f, &[1.0, 1.0]),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&[0.3, -0.7, 1.2]).to_string(), "101");
        assert_eq!(decode(&[0.0, 0.0, 0.0]).to_string(), "111");
        assert_eq!(decode(&[-1.0, -1.0, -1.0]).to_string(), "000");
    }

    #[test]
    fn corners_vanish_exactly_on_solutions() {
        let mut rng = seeded(3);
        for n in 1..=10 {
            let f = random_k_sat(n, 3 * n, n.min(3), &mut rng).unwrap();
            for bits in 0..1u64 << n {
                let y: Vec<f64> = (0..n)
                    .map(|i| if bits >> i & 1 == 1 { 1.0 } else { -1.0 })
                    .collect();
                let zero = transform_fitness(&f, &y).unwrap() == 0.0;
                assert_eq!(zero, f.evaluate(&decode(&y)).unwrap());
            }
        }
    }

    #[test]
    fn mutate_clamps_sigma_at_cap() {
        let cfg = EsConfig {
            tau: Some(50.0),
            ..EsConfig::default()
        };
        let ind = EsIndividual {
            id: 0,
            y: vec![0.0; 4],
            sigma: 3.0,
        };
        let mut rng = seeded(0);
        let mut saw_cap = false;
        for _ in 0..200 {
            let m = mutate(&ind, &cfg, &mut rng);
            assert!(m.sigma <= 3.0 && m.sigma >= cfg.sigma_floor);
            saw_cap |= m.sigma == 3.0;
        }
        assert!(saw_cap);
    }

    #[test]
    fn mutate_with_zero_tau_keeps_sigma() {
        let cfg = EsConfig {
            tau: Some(0.0),
            ..EsConfig::default()
        };
        let ind = EsIndividual {
            id: 0,
            y: vec![0.5; 5],
            sigma: 0.7,
        };
        let mut rng = seeded(1);
        for _ in 0..20 {
            assert_eq!(mutate(&ind, &cfg, &mut rng).sigma, 0.7);
        }
    }

    #[test]
    fn mutate_is_reproducible() {
        let cfg = EsConfig::default();
        let ind = EsIndividual {
            id: 0,
            y: vec![0.1, 0.2, 0.3],
            sigma: 1.0,
        };
        assert_eq!(
            mutate(&ind, &cfg, &mut seeded(9)),
            mutate(&ind, &cfg, &mut seeded(9))
        );
    }

    #[test]
    fn recombine_examples() {
        let mut rng = seeded(2);
        let a = EsIndividual {
            id: 0,
            y: vec![0.25f64, -0.5],
            sigma: 1.0,
        };
        assert_eq!(recombine(&a, &a, &mut rng).y, a.y);
        let b = EsIndividual {
            id: 1,
            y: vec![1.0, 2.0],
            sigma: 2.0,
        };
        let mut seen = HashSet::new();
        for _ in 0..64 {
            let c = recombine(&a, &b, &mut rng);
            assert_eq!(c.sigma, 1.5);
            for (i, &v) in c.y.iter().enumerate() {
                assert!(v == a.y[i] || v == b.y[i]);
            }
            seen.insert(c.y.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
        // all four gene combinations show up
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn config_validation() {
        assert!(EsConfig::default().validate().is_ok());
        assert!(EsConfig {
            mu: 100,
            ..EsConfig::default()
        }
        .validate()
        .is_err());
        assert!(EsConfig {
            sigma_cap: 0.0,
            ..EsConfig::default()
        }
        .validate()
        .is_err());
        assert!(EsConfig {
            init_range: (1.0, -1.0),
            ..EsConfig::default()
        }
        .validate()
        .is_err());
        assert!(EsConfig {
            mu: 1,
            lambda: 5,
            ..EsConfig::default()
        }
        .validate()
        .is_err());
        assert!(EsConfig {
            mu: 1,
            lambda: 5,
            recombination: Recombination::None,
            ..EsConfig::default()
        }
        .validate()
        .is_ok());
        assert_eq!(EsConfig::default().tau_for(16), 0.25);
    }

    #[test]
    fn solves_example_formula() {
        let f = sigma();
        let run = run_es::<f64, _>(&f, &EsConfig::default(), &mut seeded(0)).unwrap();
        assert!(run.solved);
        assert!(f.evaluate(run.assignment.as_ref().unwrap()).unwrap());
        assert_eq!(
            run.best_fitness_per_generation.len() as u64,
            run.generations + 1
        );
    }

    #[test]
    fn contradiction_exhausts_budget() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let cfg = EsConfig {
            max_generations: 50,
            ..EsConfig::default()
        };
        let run = run_es::<f64, _>(&f, &cfg, &mut seeded(0)).unwrap();
        assert!(!run.solved);
        assert!(run.assignment.is_none());
        assert_eq!(run.generations, 50);
        assert_eq!(run.evaluations, 15 + 50 * 100);
        assert_eq!(run.best_fitness_per_generation.len(), 51);
    }

    #[test]
    fn zero_generation_budget_checks_initial_population() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let cfg = EsConfig {
            max_generations: 0,
            ..EsConfig::default()
        };
        let run = run_es::<f64, _>(&f, &cfg, &mut seeded(0)).unwrap();
        assert!(!run.solved);
        assert_eq!((run.generations, run.evaluations), (0, 15));

        let taut = CnfFormula::from_dimacs_clauses(2, &[&[1, -1]]).unwrap();
        let run = run_es::<f64, _>(&taut, &cfg, &mut seeded(0)).unwrap();
        assert!(run.solved && run.generations == 0);
    }

    #[test]
    fn population_invariants_hold_every_generation() {
        let mut rng = seeded(5);
        let f = random_k_sat(20, 91, 3, &mut rng).unwrap();
        for recombination in [
            Recombination::None,
            Recombination::DiscreteObjectIntermediateSigma,
        ] {
            let cfg = EsConfig {
                max_generations: 60,
                recombination,
                ..EsConfig::default()
            };
            let mut prev_offspring: Option<HashSet<u64>> = None;
            let mut generations_seen = 0;
            run_es_observed::<f64, _>(&f, &cfg, &mut seeded(7), |view| {
                generations_seen += 1;
                assert_eq!(view.parents.len(), 15);
                if view.generation > 0 {
                    assert_eq!(view.offspring.len(), 100);
                    let ids: HashSet<u64> = view.offspring.iter().map(|o| o.id).collect();
                    assert!(view.parents.iter().all(|p| ids.contains(&p.id)));
                    assert!(view
                        .parents
                        .iter()
                        .all(|p| !prev_offspring.as_ref().is_some_and(|s| s.contains(&p.id))));
                    prev_offspring = Some(ids);
                }
                for ind in view.parents.iter().chain(view.offspring) {
                    assert!(ind.sigma <= 3.0 && ind.sigma > 0.0);
                }
            })
            .unwrap();
            assert!(generations_seen >= 1);
        }
    }

    #[test]
    fn fixed_seed_gives_identical_trace() {
        let f = random_k_sat(12, 50, 3, &mut seeded(8)).unwrap();
        let cfg = EsConfig {
            max_generations: 40,
            ..EsConfig::default()
        };
        let a = run_es::<f64, _>(&f, &cfg, &mut seeded(3)).unwrap();
        let b = run_es::<f64, _>(&f, &cfg, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
        let bits = |r: &EsRun<f64>| {
            r.best_fitness_per_generation
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn record_serializes_expected_fields() {
        let f = sigma();
        let cfg = EsConfig::default();
        let run = run_es::<f64, _>(&f, &cfg, &mut seeded(0)).unwrap();
        let json = serde_json::to_value(run.to_record(&cfg, 0)).unwrap();
        for key in [
            "solved",
            "assignment",
            "generations",
            "evaluations",
            "best_fitness_per_generation",
            "config_echo",
            "seed",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn single_precision_run() {
        let f = sigma();
        let run = run_es::<f32, _>(&f, &EsConfig::default(), &mut seeded(4)).unwrap();
        assert!(run.solved);
    }
}
