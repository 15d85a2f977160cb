//! Slit-array TSP machine, simulated by explicit enumeration.
//!
//! City 1 is both source and detector; walls `1..=m-1` each offer a slit per
//! city `2..=m`. A particle crossing wall `i` through the slit of city `n`
//! after city `m'` adds d(m', n) to its length number `k` and sets the visited
//! flag of `n`. The final leg back to city 1 adds d(s_{m-1}, 1). Legal kets
//! (every flag set) are exactly the tours; splitting them by `k` tells which
//! tour lengths exist.
//!
//! The physical machine does this in one O(m) pass; the simulation pays
//! (m-1)^(m-1).

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest trajectory count the simulator will enumerate (admits m ≤ 8).
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Largest permutation count the brute-force oracle will visit (admits m ≤ 10).
pub const DEFAULT_ORACLE_CAP: u128 = 362_880;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TspInstanceJson", into = "TspInstanceJson")]
pub struct TspInstance {
    m: usize,
    d: Vec<Vec<u64>>,
    asymmetric: bool,
}

#[derive(Serialize, Deserialize)]
struct TspInstanceJson {
    m: usize,
    d: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    asymmetric: bool,
}

impl TryFrom<TspInstanceJson> for TspInstance {
    type Error = Error;

    fn try_from(j: TspInstanceJson) -> Result<Self> {
        if j.d.len() != j.m {
            return Err(Error::InvalidTsp(format!(
                "m = {} but matrix has {} rows",
                j.m,
                j.d.len()
            )));
        }
        TspInstance::new(j.d, j.asymmetric)
    }
}

impl From<TspInstance> for TspInstanceJson {
    fn from(t: TspInstance) -> Self {
        TspInstanceJson {
            m: t.m,
            d: t.d,
            asymmetric: t.asymmetric,
        }
    }
}

impl TspInstance {
    /// Distance matrix over cities 1..=m (row/column 0 is city 1). Off-diagonal
    /// entries must be ≥ 1, the diagonal 0, and the matrix symmetric unless
    /// `asymmetric` is set.
    pub fn new(d: Vec<Vec<u64>>, asymmetric: bool) -> Result<Self> {
        let m = d.len();
        if m < 3 {
            return Err(Error::InvalidTsp(format!(
                "need at least 3 cities, got {m}"
            )));
        }
        for (i, row) in d.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidTsp(format!(
                    "row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if i == j && v != 0 {
                    return Err(Error::InvalidTsp(format!(
                        "d({0},{0}) = {v}, expected 0",
                        i + 1
                    )));
                }
                if i != j && v == 0 {
                    return Err(Error::InvalidTsp(format!(
                        "d({},{}) must be positive",
                        i + 1,
                        j + 1
                    )));
                }
                if !asymmetric && v != d[j][i] {
                    return Err(Error::InvalidTsp(format!(
                        "d({a},{b}) = {v} but d({b},{a}) = {w}; set asymmetric to allow this",
                        a = i + 1,
                        b = j + 1,
                        w = d[j][i]
                    )));
                }
            }
        }
        Ok(TspInstance { m, d, asymmetric })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidTsp(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn num_cities(&self) -> usize {
        self.m
    }

    pub fn is_asymmetric(&self) -> bool {
        self.asymmetric
    }

    /// d(a, b) for 1-based cities.
    pub fn distance(&self, a: usize, b: usize) -> u64 {
        self.d[a - 1][b - 1]
    }

    fn off_diagonal(&self) -> impl Iterator<Item = u64> + '_ {
        self.d.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(move |&(j, _)| i != j)
                .map(|(_, &v)| v)
        })
    }

    pub fn min_distance(&self) -> u64 {
        self.off_diagonal().min().expect("m >= 3")
    }

    pub fn max_distance(&self) -> u64 {
        self.off_diagonal().max().expect("m >= 3")
    }

    /// Upper bound of the length number: m · max off-diagonal distance.
    pub fn length_bound(&self) -> u64 {
        self.m as u64 * self.max_distance()
    }

    /// Closed tour length of 1 → cities… → 1.
    pub fn tour_length(&self, cities: &[usize]) -> u64 {
        let mut prev = 1;
        let mut total = 0;
        for &c in cities {
            total += self.distance(prev, c);
            prev = c;
        }
        total + self.distance(prev, 1)
    }
}

/// Symmetric instance with off-diagonal distances uniform in `1..=max_d`.
pub fn random_symmetric<R: Rng + ?Sized>(m: usize, max_d: u64, rng: &mut R) -> Result<TspInstance> {
    let mut d = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = rng.random_range(1..=max_d.max(1));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    TspInstance::new(d, false)
}

/// One basis ket |k; c₂…c_m; p⟩ of the machine together with its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryKet<T> {
    /// City chosen at each wall, `m-1` entries from `2..=m`.
    pub slits: Vec<usize>,
    pub k: u64,
    /// `visited[j]` is the flag of city `j + 2`.
    pub visited: Vec<bool>,
    /// Carried structurally; always 0.
    pub p: u8,
    pub amplitude: Complex<T>,
}

impl<T> TrajectoryKet<T> {
    pub fn is_legal(&self) -> bool {
        self.visited.iter().all(|&v| v)
    }
}

fn check_cap(what: &'static str, count: Option<u128>, cap: u128) -> Result<u128> {
    match count {
        Some(c) if c <= cap => Ok(c),
        Some(c) => Err(Error::CapExceeded {
            what,
            count: c,
            cap,
        }),
        None => Err(Error::CapExceeded {
            what,
            count: u128::MAX,
            cap,
        }),
    }
}

pub fn trajectory_count(m: usize) -> Option<u128> {
    let base = (m as u128).checked_sub(1)?;
    base.checked_pow(u32::try_from(m - 1).ok()?)
}

pub fn tour_count(m: usize) -> Option<u128> {
    (1..m as u128).try_fold(1u128, |acc, v| acc.checked_mul(v))
}

/// Pass of one particle through the walls; slit sequence fixed.
fn propagate<T: Real>(
    t: &TspInstance,
    slits: Vec<usize>,
    amplitude: Complex<T>,
) -> TrajectoryKet<T> {
    let mut k = 0;
    let mut visited = vec![false; t.m - 1];
    let mut at = 1;
    for &city in &slits {
        k += t.distance(at, city);
        visited[city - 2] = true;
        at = city;
    }
    k += t.distance(at, 1);
    TrajectoryKet {
        slits,
        k,
        visited,
        p: 0,
        amplitude,
    }
}

/// The full trajectory superposition, uniform amplitudes, in lexicographic
/// slit order.
pub fn enumerate_trajectories<T: Real>(
    t: &TspInstance,
    cap: u128,
) -> Result<Vec<TrajectoryKet<T>>> {
    let count = check_cap("trajectory count", trajectory_count(t.m), cap)?;
    let amp = Complex::new(T::one() / T::lit(count as f64).sqrt(), T::zero());
    let walls = t.m - 1;
    let per_first = count / walls as u128;
    let chunks: Vec<Vec<TrajectoryKet<T>>> = (2..=t.m)
        .into_par_iter()
        .map(|first| {
            (0..per_first)
                .map(|mut code| {
                    let mut slits = vec![0; walls];
                    slits[0] = first;
                    for slot in slits[1..].iter_mut().rev() {
                        *slot = 2 + (code % walls as u128) as usize;
                        code /= walls as u128;
                    }
                    propagate(t, slits, amp)
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Keeps kets with every visited flag set and renormalizes uniformly.
pub fn filter_legal<T: Real>(kets: Vec<TrajectoryKet<T>>) -> Vec<TrajectoryKet<T>> {
    let mut legal: Vec<_> = kets.into_iter().filter(TrajectoryKet::is_legal).collect();
    if !legal.is_empty() {
        let amp = Complex::new(T::one() / T::lit(legal.len() as f64).sqrt(), T::zero());
        legal.iter_mut().for_each(|k| k.amplitude = amp);
    }
    legal
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamStat<T> {
    pub count: u64,
    pub probability: T,
}

/// Detector per length value after splitting the legal superposition by `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorBank<T> {
    pub streams: BTreeMap<u64, StreamStat<T>>,
    pub min_fired: Option<u64>,
}

impl<T> DetectorBank<T> {
    pub fn fired(&self, length: u64) -> bool {
        self.streams.contains_key(&length)
    }

    pub fn fired_lengths(&self) -> Vec<u64> {
        self.streams.keys().copied().collect()
    }
}

pub fn split_streams<T: Real>(legal: &[TrajectoryKet<T>]) -> DetectorBank<T> {
    let mut streams: BTreeMap<u64, StreamStat<T>> = BTreeMap::new();
    for ket in legal {
        let s = streams.entry(ket.k).or_insert(StreamStat {
            count: 0,
            probability: T::zero(),
        });
        s.count += 1;
        s.probability = s.probability + ket.amplitude.norm_sqr();
    }
    let min_fired = streams.keys().next().copied();
    DetectorBank { streams, min_fired }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceTsp {
    pub min_length: u64,
    /// Optimal tour starting at city 1 (return leg implied); first in
    /// lexicographic order among optima.
    pub tour: Vec<usize>,
    /// Length of every tour, ascending.
    pub lengths: Vec<u64>,
}

/// Exhaustive search over permutations of cities 2..=m.
pub fn brute_force_tsp(t: &TspInstance, cap: u128) -> Result<BruteForceTsp> {
    check_cap("permutation count", tour_count(t.m), cap)?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut lengths = Vec::new();
    for perm in (2..=t.m).permutations(t.m - 1) {
        let len = t.tour_length(&perm);
        lengths.push(len);
        if best.as_ref().is_none_or(|(b, _)| len < *b) {
            best = Some((len, perm));
        }
    }
    lengths.sort_unstable();
    let (min_length, rest) = best.expect("m >= 3 has tours");
    let mut tour = vec![1];
    tour.extend(rest);
    Ok(BruteForceTsp {
        min_length,
        tour,
        lengths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamRecord {
    pub k: u64,
    pub count: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MachineReport {
    pub trajectories: u64,
    pub legal: u64,
    pub length_bound: u64,
    pub streams: Vec<StreamRecord>,
    pub min_fired: Option<u64>,
    /// ⌈(π/4)·√((m-1)!)⌉.
    pub grover_iterations: u64,
    pub grover_cost_note: String,
}

/// ⌈(π/4)·√((m-1)!)⌉ iterations to pull the shortest tour out of the legal
/// superposition with amplitude amplification.
pub fn grover_cost(m: usize) -> u64 {
    let tours = tour_count(m).map_or(f64::INFINITY, |c| c as f64);
    (std::f64::consts::FRAC_PI_4 * tours.sqrt()).ceil() as u64
}

/// enumerate → filter → split.
pub fn run_cerny_machine<T: Real>(t: &TspInstance, cap: u128) -> Result<MachineReport> {
    let kets = enumerate_trajectories::<T>(t, cap)?;
    let trajectories = kets.len() as u64;
    let legal = filter_legal(kets);
    let bank = split_streams(&legal);
    let m = t.num_cities();
    let grover_iterations = grover_cost(m);
    let grover_cost_note = format!(
        "detectors only report which lengths exist; locating the shortest of the {} legal tours \
         in the superposition still takes O(sqrt((m-1)!)) amplitude-amplification steps, about {} \
         here. The machine's single pass is O(m) physically; this simulation enumerated {} \
         trajectories.",
        legal.len(),
        grover_iterations,
        trajectories
    );
    Ok(MachineReport {
        trajectories,
        legal: legal.len() as u64,
        length_bound: t.length_bound(),
        streams: bank
            .streams
            .iter()
            .map(|(&k, s)| StreamRecord {
                k,
                count: s.count,
                probability: s.probability.to_f64_lossy(),
            })
            .collect(),
        min_fired: bank.min_fired,
        grover_iterations,
        grover_cost_note,
    })
}
