//! Generalized arc costs.
//!
//! Every arc carries a vector of `k` 32-bit components. Each component has a
//! combination rule ([`CombineOp`]) that folds the values of consecutive arcs
//! into the value of a path: sums for additive costs, minima for thresholds
//! such as tunnel heights, bitwise-and for road-category flags.
//!
//! A query supplies an [`Objective`] which maps a (combined) cost vector to a
//! non-negative scalar or to infinity. The objective is a homomorphism with
//! respect to the combination rule, so evaluating a shortcut equals summing
//! the evaluations of the arcs it replaces.

use std::fmt;
use std::ops::{Add, Deref};

use thiserror::Error;

/// Threshold value meaning "no restriction".
pub const INF_THRESHOLD: u32 = u32::MAX;

/// Additive components must stay below this bound on input arcs.
pub const MAX_ADD_COMPONENT: u32 = (1 << 31) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("a combine spec needs at least one component")]
    EmptySpec,
    #[error("cost vector has {got} components, spec expects {expected}")]
    Length { expected: usize, got: usize },
    #[error("objective provides {got} {role} values, spec has {expected} such components")]
    ObjectiveShape {
        role: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("unknown combine operator `{0}`")]
    UnknownOp(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Add,
    Min,
    BitAnd,
}

impl CombineOp {
    pub fn name(self) -> &'static str {
        match self {
            CombineOp::Add => "add",
            CombineOp::Min => "min",
            CombineOp::BitAnd => "and",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, CostError> {
        match name {
            "add" => Ok(CombineOp::Add),
            "min" => Ok(CombineOp::Min),
            "and" | "bitand" => Ok(CombineOp::BitAnd),
            other => Err(CostError::UnknownOp(other.to_string())),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            CombineOp::Add => 0,
            CombineOp::Min => 1,
            CombineOp::BitAnd => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(CombineOp::Add),
            1 => Some(CombineOp::Min),
            2 => Some(CombineOp::BitAnd),
            _ => None,
        }
    }

    /// Neutral element of the operator.
    pub fn identity(self) -> u32 {
        match self {
            CombineOp::Add => 0,
            CombineOp::Min | CombineOp::BitAnd => u32::MAX,
        }
    }

    /// Returns the combined value and whether an addition saturated.
    #[inline]
    pub fn apply(self, a: u32, b: u32) -> (u32, bool) {
        match self {
            CombineOp::Add => match a.checked_add(b) {
                Some(sum) => (sum, false),
                None => (u32::MAX, true),
            },
            CombineOp::Min => (a.min(b), false),
            CombineOp::BitAnd => (a & b, false),
        }
    }
}

/// Per-component combination rules. Fixed for the lifetime of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombineSpec {
    ops: Vec<CombineOp>,
}

impl CombineSpec {
    pub fn new(ops: Vec<CombineOp>) -> Result<Self, CostError> {
        if ops.is_empty() {
            return Err(CostError::EmptySpec);
        }
        Ok(CombineSpec { ops })
    }

    pub fn additive(k: usize) -> Self {
        assert!(k >= 1, "combine spec needs at least one component");
        CombineSpec {
            ops: vec![CombineOp::Add; k],
        }
    }

    /// Eight additive components.
    pub fn basic() -> Self {
        Self::additive(8)
    }

    /// Four additive components followed by four thresholds.
    pub fn generalized() -> Self {
        let mut ops = vec![CombineOp::Add; 4];
        ops.extend([CombineOp::Min; 4]);
        CombineSpec { ops }
    }

    pub fn k(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[CombineOp] {
        &self.ops
    }

    pub fn count(&self, op: CombineOp) -> usize {
        self.ops.iter().filter(|&&o| o == op).count()
    }

    /// Comma separated operator names, e.g. `add,add,min`.
    pub fn role_list(&self) -> String {
        self.ops
            .iter()
            .map(|op| op.name())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_role_list(list: &str) -> Result<Self, CostError> {
        let ops = list
            .split(',')
            .filter(|s| !s.is_empty())
            .map(CombineOp::from_name)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ops)
    }

    pub fn identity(&self) -> CostVector {
        CostVector(self.ops.iter().map(|op| op.identity()).collect())
    }

    pub fn check(&self, c: &[u32]) -> Result<(), CostError> {
        if c.len() != self.k() {
            return Err(CostError::Length {
                expected: self.k(),
                got: c.len(),
            });
        }
        Ok(())
    }

    /// Combines `a` and `b` into `out`. Returns true if an additive
    /// component saturated at `u32::MAX`.
    #[inline]
    pub fn combine_into(&self, a: &[u32], b: &[u32], out: &mut [u32]) -> bool {
        debug_assert!(a.len() == self.k() && b.len() == self.k() && out.len() == self.k());
        let mut saturated = false;
        for (i, op) in self.ops.iter().enumerate() {
            let (v, s) = op.apply(a[i], b[i]);
            out[i] = v;
            saturated |= s;
        }
        saturated
    }

    pub fn combine(&self, a: &[u32], b: &[u32]) -> Result<CostVector, CostError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = vec![0; self.k()];
        self.combine_into(a, b, &mut out);
        Ok(CostVector(out))
    }

    /// True if `a` is at least as good as `b` under every objective: no larger
    /// additive components, no smaller thresholds, a superset of bits.
    pub fn dominates(&self, a: &[u32], b: &[u32]) -> bool {
        self.ops.iter().enumerate().all(|(i, op)| match op {
            CombineOp::Add => a[i] <= b[i],
            CombineOp::Min => a[i] >= b[i],
            CombineOp::BitAnd => a[i] & b[i] == b[i],
        })
    }

    /// Folds any number of cost vectors, starting from the identity.
    pub fn fold<'a, I>(&self, items: I) -> Result<CostVector, CostError>
    where
        I: IntoIterator<Item = &'a [u32]>,
    {
        let mut acc = self.identity();
        let mut tmp = vec![0; self.k()];
        for c in items {
            self.check(c)?;
            self.combine_into(&acc.0, c, &mut tmp);
            acc.0.copy_from_slice(&tmp);
        }
        Ok(acc)
    }
}

/// One arc's (or path's) cost components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostVector(pub Vec<u32>);

impl CostVector {
    pub fn new(components: Vec<u32>) -> Self {
        CostVector(components)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl Deref for CostVector {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for CostVector {
    fn from(v: Vec<u32>) -> Self {
        CostVector(v)
    }
}

/// A non-negative 64-bit value or infinity. Infinity absorbs addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }

    pub(crate) fn from_raw(v: u64) -> Self {
        if v == u64::MAX {
            Distance::Infinite
        } else {
            Distance::Finite(v)
        }
    }
}

impl Add for Distance {
    type Output = Distance;

    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Per-query objective.
///
/// `add_weights` has one entry per additive component, `vehicle` one entry
/// per threshold component and `required_bits` one mask per bitfield
/// component, each in component order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Objective {
    pub add_weights: Vec<u32>,
    pub vehicle: Vec<u32>,
    pub required_bits: Vec<u32>,
}

impl Objective {
    pub fn new(add_weights: Vec<u32>, vehicle: Vec<u32>, required_bits: Vec<u32>) -> Self {
        Objective {
            add_weights,
            vehicle,
            required_bits,
        }
    }

    /// Weights for additive components, no restrictions at all.
    pub fn linear(spec: &CombineSpec, add_weights: Vec<u32>) -> Self {
        Objective {
            add_weights,
            vehicle: vec![0; spec.count(CombineOp::Min)],
            required_bits: vec![0; spec.count(CombineOp::BitAnd)],
        }
    }

    /// Resolves the objective against a spec into a fast evaluator.
    pub fn evaluator(&self, spec: &CombineSpec) -> Result<Evaluator, CostError> {
        let shapes = [
            ("additive", CombineOp::Add, self.add_weights.len()),
            ("threshold", CombineOp::Min, self.vehicle.len()),
            ("bitfield", CombineOp::BitAnd, self.required_bits.len()),
        ];
        for (role, op, got) in shapes {
            let expected = spec.count(op);
            if expected != got {
                return Err(CostError::ObjectiveShape {
                    role,
                    expected,
                    got,
                });
            }
        }
        let mut ev = Evaluator {
            k: spec.k(),
            weighted: Vec::new(),
            thresholds: Vec::new(),
            bits: Vec::new(),
        };
        let (mut a, mut m, mut b) = (0, 0, 0);
        for (i, op) in spec.ops().iter().enumerate() {
            match op {
                CombineOp::Add => {
                    if self.add_weights[a] != 0 {
                        ev.weighted.push((i, self.add_weights[a] as u64));
                    }
                    a += 1;
                }
                CombineOp::Min => {
                    ev.thresholds.push((i, self.vehicle[m]));
                    m += 1;
                }
                CombineOp::BitAnd => {
                    if self.required_bits[b] != 0 {
                        ev.bits.push((i, self.required_bits[b]));
                    }
                    b += 1;
                }
            }
        }
        Ok(ev)
    }
}

/// An objective bound to a spec.
#[derive(Debug, Clone)]
pub struct Evaluator {
    k: usize,
    weighted: Vec<(usize, u64)>,
    thresholds: Vec<(usize, u32)>,
    bits: Vec<(usize, u32)>,
}

impl Evaluator {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `None` stands for infinity.
    #[inline]
    pub fn eval(&self, c: &[u32]) -> Option<u64> {
        for &(i, vehicle) in &self.thresholds {
            if c[i] < vehicle {
                return None;
            }
        }
        for &(i, mask) in &self.bits {
            if c[i] & mask != mask {
                return None;
            }
        }
        let mut sum = 0u64;
        for &(i, w) in &self.weighted {
            sum = sum.saturating_add(w.saturating_mul(c[i] as u64));
        }
        Some(sum)
    }

    pub fn evaluate(&self, c: &[u32]) -> Distance {
        match self.eval(c) {
            Some(v) => Distance::Finite(v),
            None => Distance::Infinite,
        }
    }
}

pub fn combine(c1: &[u32], c2: &[u32], spec: &CombineSpec) -> Result<CostVector, CostError> {
    spec.combine(c1, c2)
}

pub fn evaluate(c: &[u32], obj: &Objective, spec: &CombineSpec) -> Result<Distance, CostError> {
    spec.check(c)?;
    Ok(obj.evaluator(spec)?.evaluate(c))
}

/// Checks `f(c1 ∘ c2) == f(c1) + f(c2)` under infinity-absorbing addition.
pub fn homomorphism_check(
    c1: &[u32],
    c2: &[u32],
    obj: &Objective,
    spec: &CombineSpec,
) -> Result<bool, CostError> {
    let ev = obj.evaluator(spec)?;
    let combined = spec.combine(c1, c2)?;
    Ok(ev.evaluate(&combined) == ev.evaluate(c1) + ev.evaluate(c2))
}
