//! Problem and solution data types plus the canonical text file formats.
//!
//! An [`IlpInstance`] is a maximization 0/1 integer linear program with
//! `<=` constraints only:
//!
//! ```text
//! max  sum_j c_j x_j
//! s.t. sum_j a_ij x_j <= b_i   (i = 1..m)
//!      x_j in {0, 1}
//! ```
//!
//! Variable indices are 1-based in files and 0-based everywhere else in the
//! library. All arithmetic is 64-bit integer; construction rejects instances
//! whose worst-case intermediate sums could overflow.

use std::fmt::Write as _;
use std::time::Duration;

use thiserror::Error;

/// Cap on `sum |c_j|` and on per-row `sum |a_ij| + |b_i|` so that every
/// intermediate sum (objective accumulation, reduced right-hand sides)
/// stays well inside `i64`.
pub const COEFF_SUM_LIMIT: i64 = i64::MAX / 4;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable index {var} out of range 1..={n}")]
    IndexOutOfRange { line: usize, var: usize, n: usize },
    #[error("line {line}: duplicate variable index {var} in constraint")]
    DuplicateIndex { line: usize, var: usize },
    #[error("overflow risk: {0}")]
    OverflowRisk(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("assignment leaves variable x{0} undefined")]
    PartialAssignment(usize),
}

/// A single `<=` constraint with sparse support.
///
/// `support` holds `(variable index, coefficient)` pairs sorted by strictly
/// increasing variable index (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub support: Vec<(usize, i64)>,
    pub rhs: i64,
}

impl Constraint {
    pub fn new(mut support: Vec<(usize, i64)>, rhs: i64) -> Self {
        support.sort_by_key(|&(j, _)| j);
        Constraint { support, rhs }
    }

    /// Variable indices of the support, in ascending order.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().map(|&(j, _)| j)
    }
}

/// Staircase layout metadata: `k` consecutive equal-size variable blocks,
/// each sharing its last `b` variables (the separator) with the constraints
/// of the following block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseMeta {
    k: usize,
    b: usize,
    /// End of block i as an exclusive 0-based bound (equals the 1-based
    /// index of its last variable). `ends[k-1] == n`.
    ends: Vec<usize>,
}

impl StaircaseMeta {
    /// Equal consecutive blocks over `n` variables. Requires `k >= 1`,
    /// `k | n` and `n/k > b`.
    pub fn new(n: usize, k: usize, b: usize) -> Result<Self, ModelError> {
        if k == 0 {
            return Err(ModelError::Invalid("meta: k must be >= 1".into()));
        }
        if n == 0 || !n.is_multiple_of(k) {
            return Err(ModelError::Invalid(format!(
                "meta: k={k} does not divide n={n}"
            )));
        }
        let size = n / k;
        if b >= size {
            return Err(ModelError::Invalid(format!(
                "meta: separator b={b} must be smaller than block size {size}"
            )));
        }
        let ends = (1..=k).map(|i| i * size).collect();
        Ok(StaircaseMeta { k, b, ends })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn block_size(&self) -> usize {
        self.ends[0]
    }

    /// Half-open 0-based variable range of block `i` (0-based block index).
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        start..self.ends[i]
    }

    /// The last `b` variables of block `i`, shared with block `i + 1`.
    pub fn separator_range(&self, i: usize) -> std::ops::Range<usize> {
        self.ends[i] - self.b..self.ends[i]
    }

    pub fn ends(&self) -> &[usize] {
        &self.ends
    }
}

/// A sparse maximization 0/1 ILP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    n: usize,
    objective: Vec<i64>,
    constraints: Vec<Constraint>,
    meta: Option<StaircaseMeta>,
}

impl IlpInstance {
    pub fn new(
        n: usize,
        objective: Vec<i64>,
        constraints: Vec<Constraint>,
        meta: Option<StaircaseMeta>,
    ) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Invalid("n must be >= 1".into()));
        }
        if objective.len() != n {
            return Err(ModelError::Invalid(format!(
                "objective has {} coefficients, expected n={n}",
                objective.len()
            )));
        }
        let obj_mass: u128 = objective.iter().map(|c| c.unsigned_abs() as u128).sum();
        if obj_mass > COEFF_SUM_LIMIT as u128 {
            return Err(ModelError::OverflowRisk(
                "sum of |c_j| exceeds the 64-bit safety bound".into(),
            ));
        }
        for (i, con) in constraints.iter().enumerate() {
            if con.support.is_empty() {
                return Err(ModelError::Invalid(format!(
                    "constraint {} has empty support",
                    i + 1
                )));
            }
            let mut prev: Option<usize> = None;
            let mut row_mass = con.rhs.unsigned_abs() as u128;
            for &(j, a) in &con.support {
                if j >= n {
                    return Err(ModelError::Invalid(format!(
                        "constraint {}: variable index {} out of range 1..={n}",
                        i + 1,
                        j + 1
                    )));
                }
                if prev == Some(j) {
                    return Err(ModelError::Invalid(format!(
                        "constraint {}: duplicate variable index {}",
                        i + 1,
                        j + 1
                    )));
                }
                debug_assert!(prev.is_none_or(|p| p < j), "support must be sorted");
                prev = Some(j);
                row_mass += a.unsigned_abs() as u128;
            }
            if row_mass > COEFF_SUM_LIMIT as u128 {
                return Err(ModelError::OverflowRisk(format!(
                    "constraint {}: sum of |a_ij| + |b_i| exceeds the 64-bit safety bound",
                    i + 1
                )));
            }
        }
        if let Some(meta) = &meta {
            if *meta.ends.last().unwrap() != n {
                return Err(ModelError::Invalid(
                    "meta block boundaries do not cover 1..n".into(),
                ));
            }
        }
        Ok(IlpInstance {
            n,
            objective,
            constraints,
            meta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective(&self) -> &[i64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn meta(&self) -> Option<&StaircaseMeta> {
        self.meta.as_ref()
    }

    /// Feasibility and exact objective of a fully defined assignment.
    ///
    /// The objective is returned even when the assignment is infeasible.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<(bool, i64), ModelError> {
        if assignment.len() != self.n {
            return Err(ModelError::Invalid(format!(
                "assignment has length {}, expected {}",
                assignment.len(),
                self.n
            )));
        }
        if let Some(j) = assignment.first_undefined() {
            return Err(ModelError::PartialAssignment(j + 1));
        }
        let mut objective = 0i64;
        for (j, &c) in self.objective.iter().enumerate() {
            if assignment.get(j) == Some(true) {
                objective += c;
            }
        }
        let mut feasible = true;
        for con in &self.constraints {
            let lhs: i64 = con
                .support
                .iter()
                .filter(|&&(j, _)| assignment.get(j) == Some(true))
                .map(|&(_, a)| a)
                .sum();
            if lhs > con.rhs {
                feasible = false;
                break;
            }
        }
        Ok((feasible, objective))
    }

    /// Index of the first constraint violated by `assignment`, 0-based.
    pub fn first_violated(&self, assignment: &Assignment) -> Option<usize> {
        self.constraints.iter().position(|con| {
            let lhs: i64 = con
                .support
                .iter()
                .filter(|&&(j, _)| assignment.get(j) == Some(true))
                .map(|&(_, a)| a)
                .sum();
            lhs > con.rhs
        })
    }
}

/// Dense 0/1 assignment over `n` variables with a defined/undefined mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
    defined: Vec<bool>,
}

impl Assignment {
    pub fn undefined(n: usize) -> Self {
        Assignment {
            values: vec![false; n],
            defined: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        let n = bits.len();
        Assignment {
            values: bits,
            defined: vec![true; n],
        }
    }

    /// Parses a bit string like `1001111` into a full assignment.
    pub fn from_bitstring(s: &str) -> Result<Self, ModelError> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(ModelError::Invalid(format!(
                        "invalid character {ch:?} in bit string"
                    )))
                }
            }
        }
        Ok(Assignment::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.values[j] = value;
        self.defined[j] = true;
    }

    /// `None` when variable `j` is undefined.
    pub fn get(&self, j: usize) -> Option<bool> {
        self.defined[j].then(|| self.values[j])
    }

    pub fn is_complete(&self) -> bool {
        self.defined.iter().all(|&d| d)
    }

    pub fn first_undefined(&self) -> Option<usize> {
        self.defined.iter().position(|&d| !d)
    }

    /// Bit string rendering, `x_1` first. Requires a full assignment.
    pub fn bitstring(&self) -> String {
        debug_assert!(self.is_complete());
        self.values
            .iter()
            .map(|&v| if v { '1' } else { '0' })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
}

/// Counters accumulated during a solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Complete candidate assignments evaluated across all subproblems.
    pub nodes: u64,
    /// Table entries written during elimination (0 for monolithic solves).
    pub table_entries: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    pub assignment: Option<Assignment>,
    pub objective: Option<i64>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn optimal(assignment: Assignment, objective: i64, stats: SolveStats) -> Self {
        Solution {
            status: Status::Optimal,
            assignment: Some(assignment),
            objective: Some(objective),
            stats,
        }
    }

    pub fn infeasible(stats: SolveStats) -> Self {
        Solution {
            status: Status::Infeasible,
            assignment: None,
            objective: None,
            stats,
        }
    }
}

/// Parses the line-oriented instance format:
///
/// ```text
/// ilp <n> <m> [meta k=<k> b=<b> blocks=<p1,p2,...,pk>]
/// obj <c1> <c2> ... <cn>
/// con <b_i> <nnz> <j1>:<a1> <j2>:<a2> ...
/// ```
///
/// `#` starts a comment that runs to the end of the line; blank lines are
/// ignored. Variable indices are 1-based.
pub fn parse_instance(text: &str) -> Result<IlpInstance, ModelError> {
    let mut lines = text.lines().enumerate().filter_map(|(idx, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((idx + 1, line))
    });

    let (header_lineno, header) = lines.next().ok_or_else(|| ModelError::Syntax {
        line: 1,
        msg: "empty instance file".into(),
    })?;
    let mut tokens = header.split_whitespace();
    expect_token(&mut tokens, "ilp", header_lineno)?;
    let n: usize = parse_token(&mut tokens, "variable count", header_lineno)?;
    let m: usize = parse_token(&mut tokens, "constraint count", header_lineno)?;
    if n == 0 {
        return Err(ModelError::Syntax {
            line: header_lineno,
            msg: "variable count must be >= 1".into(),
        });
    }

    let meta = match tokens.next() {
        None => None,
        Some("meta") => Some(parse_meta(&mut tokens, n, header_lineno)?),
        Some(tok) => {
            return Err(ModelError::Syntax {
                line: header_lineno,
                msg: format!("unexpected token {tok:?} in header"),
            })
        }
    };

    let (obj_lineno, obj_line) = lines.next().ok_or_else(|| ModelError::Syntax {
        line: header_lineno,
        msg: "missing obj line".into(),
    })?;
    let mut tokens = obj_line.split_whitespace();
    expect_token(&mut tokens, "obj", obj_lineno)?;
    let mut objective = Vec::with_capacity(n);
    for tok in tokens {
        let c: i64 = tok.parse().map_err(|_| ModelError::Syntax {
            line: obj_lineno,
            msg: format!("invalid objective coefficient {tok:?}"),
        })?;
        objective.push(c);
    }
    if objective.len() != n {
        return Err(ModelError::Syntax {
            line: obj_lineno,
            msg: format!(
                "expected {n} objective coefficients, found {}",
                objective.len()
            ),
        });
    }

    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let (lineno, line) = lines.next().ok_or_else(|| ModelError::Syntax {
            line: obj_lineno,
            msg: format!("expected {m} constraint lines, found {}", constraints.len()),
        })?;
        constraints.push(parse_constraint(line, lineno, n)?);
    }
    if let Some((lineno, line)) = lines.next() {
        return Err(ModelError::Syntax {
            line: lineno,
            msg: format!("unexpected trailing content {line:?}"),
        });
    }

    IlpInstance::new(n, objective, constraints, meta)
}

fn parse_meta<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    n: usize,
    lineno: usize,
) -> Result<StaircaseMeta, ModelError> {
    let mut k: Option<usize> = None;
    let mut b: Option<usize> = None;
    let mut blocks: Option<Vec<usize>> = None;
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| ModelError::Syntax {
            line: lineno,
            msg: format!("malformed meta token {tok:?}"),
        })?;
        let bad = |what: &str| ModelError::Syntax {
            line: lineno,
            msg: format!("invalid meta {what} {value:?}"),
        };
        match key {
            "k" => k = Some(value.parse().map_err(|_| bad("k"))?),
            "b" => b = Some(value.parse().map_err(|_| bad("b"))?),
            "blocks" => {
                let ends = value
                    .split(',')
                    .map(|p| p.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad("blocks"))?;
                blocks = Some(ends);
            }
            _ => {
                return Err(ModelError::Syntax {
                    line: lineno,
                    msg: format!("unknown meta key {key:?}"),
                })
            }
        }
    }
    let (k, b) = match (k, b) {
        (Some(k), Some(b)) => (k, b),
        _ => {
            return Err(ModelError::Syntax {
                line: lineno,
                msg: "meta requires both k= and b=".into(),
            })
        }
    };
    let meta = StaircaseMeta::new(n, k, b).map_err(|e| ModelError::Syntax {
        line: lineno,
        msg: e.to_string(),
    })?;
    if let Some(ends) = blocks {
        if ends != meta.ends {
            return Err(ModelError::Syntax {
                line: lineno,
                msg: "meta blocks= must list k equal-size consecutive block ends".into(),
            });
        }
    }
    Ok(meta)
}

fn parse_constraint(line: &str, lineno: usize, n: usize) -> Result<Constraint, ModelError> {
    let mut tokens = line.split_whitespace();
    expect_token(&mut tokens, "con", lineno)?;
    let rhs: i64 = parse_token(&mut tokens, "right-hand side", lineno)?;
    let nnz: usize = parse_token(&mut tokens, "nonzero count", lineno)?;
    if nnz == 0 {
        return Err(ModelError::Syntax {
            line: lineno,
            msg: "constraint support must be nonempty".into(),
        });
    }
    let mut support = Vec::with_capacity(nnz);
    let mut seen = vec![false; n];
    for tok in tokens.by_ref() {
        let (j_str, a_str) = tok.split_once(':').ok_or_else(|| ModelError::Syntax {
            line: lineno,
            msg: format!("malformed term {tok:?}, expected <j>:<a>"),
        })?;
        let j: usize = j_str.parse().map_err(|_| ModelError::Syntax {
            line: lineno,
            msg: format!("invalid variable index {j_str:?}"),
        })?;
        let a: i64 = a_str.parse().map_err(|_| ModelError::Syntax {
            line: lineno,
            msg: format!("invalid coefficient {a_str:?}"),
        })?;
        if j == 0 || j > n {
            return Err(ModelError::IndexOutOfRange {
                line: lineno,
                var: j,
                n,
            });
        }
        if seen[j - 1] {
            return Err(ModelError::DuplicateIndex {
                line: lineno,
                var: j,
            });
        }
        seen[j - 1] = true;
        support.push((j - 1, a));
    }
    if support.len() != nnz {
        return Err(ModelError::Syntax {
            line: lineno,
            msg: format!("expected {nnz} terms, found {}", support.len()),
        });
    }
    Ok(Constraint::new(support, rhs))
}

fn expect_token<'a>(
    tokens: &mut impl Iterator<Item = &'a str>,
    expected: &str,
    lineno: usize,
) -> Result<(), ModelError> {
    match tokens.next() {
        Some(tok) if tok == expected => Ok(()),
        other => Err(ModelError::Syntax {
            line: lineno,
            msg: format!("expected {expected:?}, found {other:?}"),
        }),
    }
}

fn parse_token<'a, T: std::str::FromStr>(
    tokens: &mut impl Iterator<Item = &'a str>,
    what: &str,
    lineno: usize,
) -> Result<T, ModelError> {
    let tok = tokens.next().ok_or_else(|| ModelError::Syntax {
        line: lineno,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| ModelError::Syntax {
        line: lineno,
        msg: format!("invalid {what} {tok:?}"),
    })
}

/// Canonical byte-stable rendering; `parse_instance(serialize_instance(i))`
/// is structurally equal to `i`.
pub fn serialize_instance(instance: &IlpInstance) -> String {
    let mut out = String::new();
    write!(out, "ilp {} {}", instance.n, instance.constraints.len()).unwrap();
    if let Some(meta) = &instance.meta {
        write!(out, " meta k={} b={} blocks=", meta.k, meta.b).unwrap();
        for (i, end) in meta.ends.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{end}").unwrap();
        }
    }
    out.push('\n');
    out.push_str("obj");
    for c in &instance.objective {
        write!(out, " {c}").unwrap();
    }
    out.push('\n');
    for con in &instance.constraints {
        write!(out, "con {} {}", con.rhs, con.support.len()).unwrap();
        for &(j, a) in &con.support {
            write!(out, " {}:{}", j + 1, a).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Renders a solution file: `status`, then `obj` and `x` lines when optimal.
pub fn serialize_solution(solution: &Solution) -> String {
    match solution.status {
        Status::Optimal => format!(
            "status optimal\nobj {}\nx {}\n",
            solution.objective.unwrap(),
            solution.assignment.as_ref().unwrap().bitstring()
        ),
        Status::Infeasible => "status infeasible\n".to_string(),
    }
}

/// Parses a solution file back into (status, objective, assignment).
pub fn parse_solution(text: &str) -> Result<(Status, Option<i64>, Option<Assignment>), ModelError> {
    let mut status = None;
    let mut objective = None;
    let mut assignment = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("status") => match tokens.next() {
                Some("optimal") => status = Some(Status::Optimal),
                Some("infeasible") => status = Some(Status::Infeasible),
                other => {
                    return Err(ModelError::Syntax {
                        line: lineno,
                        msg: format!("invalid status {other:?}"),
                    })
                }
            },
            Some("obj") => objective = Some(parse_token(&mut tokens, "objective", lineno)?),
            Some("x") => {
                let bits = tokens.next().ok_or_else(|| ModelError::Syntax {
                    line: lineno,
                    msg: "missing bit string".into(),
                })?;
                assignment = Some(Assignment::from_bitstring(bits)?);
            }
            other => {
                return Err(ModelError::Syntax {
                    line: lineno,
                    msg: format!("unexpected token {other:?}"),
                })
            }
        }
    }
    let status = status.ok_or_else(|| ModelError::Syntax {
        line: 1,
        msg: "missing status line".into(),
    })?;
    Ok((status, objective, assignment))
}
