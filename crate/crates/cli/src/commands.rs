use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use npduel::cerny_tsp::{self, TspInstance};
use npduel::cnf::{self, Assignment, CnfFormula};
use npduel::es_sat::{self, EsConfig, Recombination};
use npduel::quantum_sat::{self, GroverOutcome, SatRegister};
use npduel::rng::seeded;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Options, RecombinationArg};

/// Most solutions listed by `sat brute`.
pub const SOLUTION_LISTING_CAP: usize = 1024;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Cap(String),
    CrossCheck(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
            Failure::CrossCheck(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Cap(m) | Failure::CrossCheck(m) => m,
        }
    }
}

impl From<npduel::Error> for Failure {
    fn from(e: npduel::Error) -> Self {
        if e.is_resource_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

/// Result payload plus its `key,count` projection for CSV output.
pub struct Payload {
    pub value: Value,
    pub rows: Vec<(String, String)>,
    pub csv_header: (&'static str, &'static str),
    pub summary: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<CnfFormula, Failure> {
    Ok(cnf::parse_dimacs(&read(path)?)?)
}

fn load_tsp(path: &Path) -> Result<TspInstance, Failure> {
    Ok(TspInstance::from_json(&read(path)?)?)
}

fn sat_bound(opts: &Options) -> usize {
    opts.cap.map_or(cnf::DEFAULT_EXHAUSTIVE_BOUND, |c| {
        c.min(usize::MAX as u128) as usize
    })
}

fn verify(formula: &CnfFormula, a: &Assignment) -> Result<(), Failure> {
    match formula.evaluate(a) {
        Ok(true) => Ok(()),
        _ => Err(Failure::CrossCheck(format!(
            "emitted assignment {a} does not satisfy the formula"
        ))),
    }
}

pub fn sat_brute(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let f = load_formula(path)?;
    let bound = sat_bound(opts);
    let r = f.count_solutions(bound)?;
    let solutions = f.solutions(bound)?;
    if solutions.len() as u64 != r {
        return Err(Failure::CrossCheck(format!(
            "count {r} but {} listed",
            solutions.len()
        )));
    }
    let listed: Vec<&Assignment> = solutions.iter().take(SOLUTION_LISTING_CAP).collect();
    for a in &listed {
        verify(&f, a)?;
    }
    let listed: Vec<String> = listed.iter().map(|a| a.to_string()).collect();
    Ok(Payload {
        value: json!({
            "n": f.num_vars(),
            "clauses": f.num_clauses(),
            "r": r,
            "solutions": listed,
            "solutions_truncated": solutions.len() > SOLUTION_LISTING_CAP,
        }),
        rows: listed
            .iter()
            .map(|s| (s.clone(), "1".to_string()))
            .collect(),
        csv_header: ("assignment", "count"),
        summary: vec![
            format!("variables: {}  clauses: {}", f.num_vars(), f.num_clauses()),
            format!("satisfying assignments r = {r}"),
        ],
    })
}

pub fn sat_sample(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let f = load_formula(path)?;
    let n = f.num_vars();
    let r = f.count_solutions(sat_bound(opts))?;
    let mut reg = SatRegister::<f64>::prepare(&f)?;
    reg.apply_uf();
    let flag_probability = reg.flag_probability();
    let mut rng = seeded(opts.seed);
    let mut histogram: BTreeMap<String, u64> = BTreeMap::new();
    let mut flag_one = 0u64;
    for _ in 0..opts.shots {
        if let Some(a) = reg.sample_solution(&mut rng)? {
            verify(&f, &a)?;
            flag_one += 1;
            *histogram.entry(a.to_string()).or_default() += 1;
        }
    }
    let theoretical = r as f64 / (1u64 << n) as f64;
    if (flag_probability - theoretical).abs() > 1e-9 {
        return Err(Failure::CrossCheck(format!(
            "flag probability {flag_probability} differs from r/2^n = {theoretical}"
        )));
    }
    let rate = flag_one as f64 / opts.shots as f64;
    Ok(Payload {
        value: json!({
            "n": n,
            "r": r,
            "r_source": "exhaustive enumeration",
            "shots": opts.shots,
            "flag_one_count": flag_one,
            "flag_zero_count": opts.shots - flag_one,
            "flag_one_rate": rate,
            "flag_probability": flag_probability,
            "theoretical_rate": theoretical,
            "solution_histogram": histogram,
        }),
        rows: histogram
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect(),
        csv_header: ("assignment", "count"),
        summary: vec![
            format!("r = {r} of 2^{n}; theoretical flag rate {theoretical:.6}"),
            format!("flag = 1 in {flag_one}/{} shots ({rate:.6})", opts.shots),
        ],
    })
}

pub fn sat_grover(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let f = load_formula(path)?;
    if f.num_vars() > sat_bound(opts) {
        return Err(npduel::Error::ExhaustiveBound {
            n: f.num_vars(),
            bound: sat_bound(opts),
        }
        .into());
    }
    let mut rng = seeded(opts.seed);
    let outcome = quantum_sat::grover_search::<f64, _>(&f, &mut rng, opts.shots)?;
    let mut value = to_value(&outcome);
    value["r_source"] = json!("exhaustive enumeration");
    match &outcome {
        GroverOutcome::Unsat { n, .. } => Ok(Payload {
            value,
            rows: vec![],
            csv_header: ("assignment", "count"),
            summary: vec![format!(
                "unsat: no assignment of {n} variables satisfies the formula"
            )],
        }),
        GroverOutcome::Searched(stats) => {
            let mut hits = 0;
            for (key, &count) in &stats.outcome_histogram {
                let a = Assignment::new(key.chars().map(|c| c == '1').collect());
                if f.evaluate(&a)? {
                    hits += count;
                }
            }
            if hits != stats.success_count {
                return Err(Failure::CrossCheck(format!(
                    "histogram holds {hits} solutions but {} were counted",
                    stats.success_count
                )));
            }
            Ok(Payload {
                value,
                rows: stats
                    .outcome_histogram
                    .iter()
                    .map(|(k, v)| (k.clone(), v.to_string()))
                    .collect(),
                csv_header: ("assignment", "count"),
                summary: vec![
                    format!(
                        "n = {}  r = {}  theta = {:.6}  k = {}",
                        stats.n, stats.r, stats.theta, stats.k
                    ),
                    format!("predicted success {:.6}", stats.predicted_success),
                    format!(
                        "empirical success {}/{} ({:.6})",
                        stats.success_count,
                        stats.shots,
                        stats.empirical_success()
                    ),
                ],
            })
        }
    }
}

pub fn sat_es(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let f = load_formula(path)?;
    let cfg = EsConfig {
        max_generations: opts.max_generations,
        recombination: match opts.recombination {
            RecombinationArg::None => Recombination::None,
            RecombinationArg::Default => Recombination::DiscreteObjectIntermediateSigma,
        },
        ..EsConfig::default()
    };
    let mut rng = seeded(opts.seed);
    let run = es_sat::run_es::<f64, _>(&f, &cfg, &mut rng).map_err(Failure::from)?;
    if let Some(a) = &run.assignment {
        verify(&f, a)?;
    }
    let record = run.to_record(&cfg, opts.seed);
    Ok(Payload {
        value: to_value(&record),
        rows: run
            .best_fitness_per_generation
            .iter()
            .enumerate()
            .map(|(g, v)| (g.to_string(), v.to_string()))
            .collect(),
        csv_header: ("generation", "best_fitness"),
        summary: vec![
            format!("solved: {}", run.solved),
            format!(
                "assignment: {}",
                run.assignment
                    .as_ref()
                    .map_or("-".to_string(), |a| a.to_string())
            ),
            format!(
                "generations: {}  evaluations: {}",
                run.generations, run.evaluations
            ),
        ],
    })
}

pub fn tsp_cerny(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let t = load_tsp(path)?;
    let cap = opts.cap.unwrap_or(cerny_tsp::DEFAULT_ENUMERATION_CAP);
    let report = cerny_tsp::run_cerny_machine::<f64>(&t, cap)?;
    let mut value = to_value(&report);
    let oracle = match cerny_tsp::brute_force_tsp(&t, cerny_tsp::DEFAULT_ORACLE_CAP) {
        Ok(b) => Some(b),
        Err(e) if e.is_resource_cap() => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(b) = &oracle {
        if report.min_fired != Some(b.min_length) {
            return Err(Failure::CrossCheck(format!(
                "machine min_fired {:?} disagrees with oracle minimum {}",
                report.min_fired, b.min_length
            )));
        }
        value["oracle_min"] = json!(b.min_length);
        value["oracle_agrees"] = json!(true);
    } else {
        value["oracle_min"] = Value::Null;
        value["oracle_agrees"] = Value::Null;
    }
    Ok(Payload {
        value,
        rows: report
            .streams
            .iter()
            .map(|s| (s.k.to_string(), s.count.to_string()))
            .collect(),
        csv_header: ("k", "count"),
        summary: vec![
            format!(
                "trajectories: {}  legal: {}",
                report.trajectories, report.legal
            ),
            format!(
                "fired lengths: {}",
                report
                    .streams
                    .iter()
                    .map(|s| s.k.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            format!(
                "min_fired: {}",
                report.min_fired.map_or("-".into(), |m| m.to_string())
            ),
            report.grover_cost_note.clone(),
        ],
    })
}

pub fn tsp_brute(path: &Path, opts: &Options) -> Result<Payload, Failure> {
    let t = load_tsp(path)?;
    let cap = opts.cap.unwrap_or(cerny_tsp::DEFAULT_ORACLE_CAP);
    let b = cerny_tsp::brute_force_tsp(&t, cap)?;
    if t.tour_length(&b.tour[1..]) != b.min_length {
        return Err(Failure::CrossCheck(
            "reported tour length does not match its cities".into(),
        ));
    }
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for &l in &b.lengths {
        *histogram.entry(l).or_default() += 1;
    }
    let tour_text = b
        .tour
        .iter()
        .chain(std::iter::once(&1))
        .map(|c| c.to_string())
        .collect::<Vec<_>>();
    Ok(Payload {
        value: json!({
            "m": t.num_cities(),
            "min_length": b.min_length,
            "tour": b.tour,
            "tours": b.lengths.len(),
            "length_histogram": histogram.iter().map(|(k, v)| json!({"length": k, "count": v})).collect::<Vec<_>>(),
        }),
        rows: histogram
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        csv_header: ("length", "count"),
        summary: vec![
            format!("tours: {}", b.lengths.len()),
            format!(
                "minimum length {} via {}",
                b.min_length,
                tour_text.join("-")
            ),
        ],
    })
}
