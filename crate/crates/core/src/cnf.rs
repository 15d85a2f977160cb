//! CNF formulas, DIMACS I/O and the exhaustive satisfiability oracle.
//!
//! Variables are 1-based in DIMACS text and 0-based in memory: [`Assignment`]
//! index `i` holds variable `i + 1`. When an assignment is packed into an
//! integer (`bits`), bit `i` holds variable `i + 1`, the same little-endian
//! convention the statevector uses for qubits.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest variable count the exhaustive oracle accepts unless overridden.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    index: usize,
    negated: bool,
}

impl Literal {
    /// Literal over 1-based variable `variable`.
    pub fn new(variable: usize, negated: bool) -> Result<Self> {
        if variable == 0 {
            return Err(Error::InvalidFormula("variable index 0".into()));
        }
        Ok(Literal {
            index: variable - 1,
            negated,
        })
    }

    pub fn positive(variable: usize) -> Result<Self> {
        Self::new(variable, false)
    }

    pub fn negative(variable: usize) -> Result<Self> {
        Self::new(variable, true)
    }

    /// From a signed DIMACS integer (`-3` is ¬x₃).
    pub fn from_dimacs(value: i64) -> Result<Self> {
        Self::new(value.unsigned_abs() as usize, value < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.variable() as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// 1-based variable number.
    pub fn variable(self) -> usize {
        self.index + 1
    }

    /// 0-based position in an [`Assignment`].
    pub fn index(self) -> usize {
        self.index
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn is_true_under(self, value: bool) -> bool {
        value != self.negated
    }
}

pub type Clause = Vec<Literal>;

/// Conjunction of non-empty disjunctive clauses over `num_vars` variables.
///
/// Immutable once built. Duplicate literals inside a clause are kept as given.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    three_sat: bool,
    // (positive mask, negative mask) per clause, present when num_vars <= 64
    masks: Vec<(u64, u64)>,
}

impl PartialEq for CnfFormula {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars
            && self.clauses == other.clauses
            && self.three_sat == other.three_sat
    }
}

impl Eq for CnfFormula {}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidFormula(
                "formula needs at least one variable".into(),
            ));
        }
        if clauses.is_empty() {
            return Err(Error::InvalidFormula("formula has no clauses".into()));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidFormula(format!("clause {} is empty", i + 1)));
            }
            if let Some(lit) = clause.iter().find(|l| l.variable() > num_vars) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} uses variable {} but only {} are declared",
                    i + 1,
                    lit.variable(),
                    num_vars
                )));
            }
        }
        let masks = if num_vars <= 64 {
            clauses
                .iter()
                .map(|c| {
                    c.iter().fold((0u64, 0u64), |(pos, neg), l| {
                        if l.negated {
                            (pos, neg | 1 << l.index)
                        } else {
                            (pos | 1 << l.index, neg)
                        }
                    })
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(CnfFormula {
            num_vars,
            clauses,
            three_sat: false,
            masks,
        })
    }

    /// Builds from signed DIMACS integers per clause.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&v| Literal::from_dimacs(v))
                    .collect::<Result<Clause>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_vars, clauses)
    }

    /// Flags the formula as 3SAT, rejecting any clause whose length is not 3.
    pub fn into_three_sat(mut self) -> Result<Self> {
        if let Some((i, c)) = self.clauses.iter().enumerate().find(|(_, c)| c.len() != 3) {
            return Err(Error::InvalidFormula(format!(
                "3SAT clause {} has {} literals",
                i + 1,
                c.len()
            )));
        }
        self.three_sat = true;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_three_sat(&self) -> bool {
        self.three_sat
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<bool> {
        if assignment.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                got: assignment.len(),
            });
        }
        let values = assignment.values();
        Ok(self
            .clauses
            .iter()
            .all(|c| c.iter().any(|l| l.is_true_under(values[l.index]))))
    }

    /// Evaluates the assignment packed little-endian into `bits`.
    ///
    /// Panics if the formula has more than 64 variables.
    #[inline]
    pub fn satisfied_by_bits(&self, bits: u64) -> bool {
        assert!(
            self.num_vars <= 64,
            "bit evaluation needs at most 64 variables"
        );
        self.masks
            .iter()
            .all(|&(pos, neg)| bits & pos != 0 || !bits & neg != 0)
    }

    fn check_bound(&self, bound: usize) -> Result<()> {
        if self.num_vars > bound || self.num_vars > 63 {
            return Err(Error::ExhaustiveBound {
                n: self.num_vars,
                bound,
            });
        }
        Ok(())
    }

    /// Number of satisfying assignments among all 2ⁿ, by enumeration.
    pub fn count_solutions(&self, bound: usize) -> Result<u64> {
        self.check_bound(bound)?;
        let space = 1u64 << self.num_vars;
        Ok((0..space)
            .into_par_iter()
            .filter(|&x| self.satisfied_by_bits(x))
            .count() as u64)
    }

    /// All satisfying assignments, ascending when each is read as the binary
    /// number x₁x₂…xₙ (x₁ most significant).
    pub fn solutions(&self, bound: usize) -> Result<Vec<Assignment>> {
        self.check_bound(bound)?;
        let n = self.num_vars;
        let shift = 64 - n as u32;
        Ok((0..1u64 << n)
            .map(|v| v.reverse_bits() >> shift)
            .filter(|&bits| self.satisfied_by_bits(bits))
            .map(|bits| Assignment::from_bits(bits, n))
            .collect())
    }

    /// Truth table indexed by little-endian packed assignment.
    pub fn truth_table(&self, bound: usize) -> Result<Vec<bool>> {
        self.check_bound(bound)?;
        Ok((0..1u64 << self.num_vars)
            .into_par_iter()
            .map(|x| self.satisfied_by_bits(x))
            .collect())
    }

    /// Canonical DIMACS text.
    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(f, "{} ", lit.to_dimacs())?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses DIMACS CNF.
///
/// Accepts `c` comment lines anywhere, clauses spanning or sharing lines, and
/// stops at a `%` line (the SATLIB trailer).
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, msg: String| Error::Dimacs { line, msg };

    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Clause = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(err(line_no, format!("malformed header `{line}`")));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad variable count `{}`", fields[2])))?;
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad clause count `{}`", fields[3])))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, m)) = header else {
            return Err(err(line_no, "clause data before `p cnf` header".into()));
        };
        for tok in line.split_whitespace() {
            let value: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if value == 0 {
                if tok.starts_with('-') {
                    return Err(err(line_no, "variable index 0".into()));
                }
                if current.is_empty() {
                    return Err(err(line_no, "empty clause".into()));
                }
                if clauses.len() == m {
                    return Err(err(line_no, format!("more than the declared {m} clauses")));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                let var = value.unsigned_abs() as usize;
                if var > n {
                    return Err(err(
                        line_no,
                        format!("variable {var} exceeds declared count {n}"),
                    ));
                }
                current.push(Literal::from_dimacs(value)?);
            }
        }
    }

    let Some((n, m)) = header else {
        return Err(err(last_line.max(1), "missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        return Err(err(last_line, "final clause is not terminated by 0".into()));
    }
    if clauses.len() != m {
        return Err(err(
            last_line,
            format!(
                "header declares {m} clauses but {} were found",
                clauses.len()
            ),
        ));
    }
    CnfFormula::new(n, clauses).map_err(|e| err(last_line, e.to_string()))
}

/// Truth values for variables x₁..xₙ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    /// Unpacks bit `i` of `bits` into variable `i + 1`.
    pub fn from_bits(bits: u64, num_vars: usize) -> Self {
        Assignment((0..num_vars).map(|i| bits >> i & 1 == 1).collect())
    }

    /// Packs little-endian; panics above 64 variables.
    pub fn to_bits(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &v)| acc | (v as u64) << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, variable: usize) -> Option<bool> {
        variable.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

/// `x₁x₂…xₙ` as 0/1 characters.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.0 {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Uniform random k-SAT: each clause draws `k` distinct variables and
/// independent fair signs.
pub fn random_k_sat<R: Rng + ?Sized>(
    num_vars: usize,
    num_clauses: usize,
    k: usize,
    rng: &mut R,
) -> Result<CnfFormula> {
    if k == 0 || k > num_vars {
        return Err(Error::InvalidFormula(format!(
            "cannot draw {k} distinct variables from {num_vars}"
        )));
    }
    let clauses = (0..num_clauses)
        .map(|_| {
            rand::seq::index::sample(rng, num_vars, k)
                .into_iter()
                .map(|v| Literal::new(v + 1, rng.random_bool(0.5)))
                .collect::<Result<Clause>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let f = CnfFormula::new(num_vars, clauses)?;
    if k == 3 {
        f.into_three_sat()
    } else {
        Ok(f)
    }
}
