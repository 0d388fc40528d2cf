//! Admissible ±2 walks on the integer grid and their weights, enumerated by
//! brute force. This is the reference the dynamic-programming sums in
//! [`crate::series`] are checked against, so it shares no code with them.
//!
//! Three classes of walks appear, all with steps of ±2 and vertices
//! `j_k = start + x_1 + ... + x_k` for `1 <= k < len`:
//!
//! | kind | from | to  | odd `k` avoids | even `k` avoids | numerator   |
//! |------|------|-----|----------------|-----------------|-------------|
//! | `X`  | -n   | n   | n              | -n              | q, p, q, …  |
//! | `Y`  | n    | -n  | -n             | n               | p, q, p, …  |
//! | `W`  | n    | n   | -n             | n               | p, q, …, q  |
//!
//! The denominator is the product over interior vertices of `n - j + z` when
//! the vertex index makes `j = n` forbidden and `n + j + z` when it makes
//! `j = -n` forbidden.

use std::fmt;

use crate::error::{Error, Result};
use crate::potential::{Field, TrigPotential};
use crate::scalar::Scalar;

/// Enumeration beyond this many steps is refused.
pub const MAX_BRUTE_FORCE_STEPS: usize = 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    /// -n to n; terms of beta^+.
    X,
    /// n to -n; terms of beta^-.
    Y,
    /// n to n loops; terms of alpha.
    W,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::X => "X",
            WalkKind::Y => "Y",
            WalkKind::W => "W",
        })
    }
}

impl std::str::FromStr for WalkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(WalkKind::X),
            "Y" | "y" => Ok(WalkKind::Y),
            "W" | "w" => Ok(WalkKind::W),
            _ => Err(Error::InvalidArgument(format!("unknown walk kind {s:?}"))),
        }
    }
}

impl WalkKind {
    fn endpoints(self, n: i64) -> (i64, i64) {
        match self {
            WalkKind::X => (-n, n),
            WalkKind::Y => (n, -n),
            WalkKind::W => (n, n),
        }
    }

    /// The vertex an interior vertex with 1-based index `k` must avoid.
    fn forbidden(self, n: i64, k: usize) -> i64 {
        let odd = k % 2 == 1;
        match (self, odd) {
            (WalkKind::X, true) => n,
            (WalkKind::X, false) => -n,
            (_, true) => -n,
            (_, false) => n,
        }
    }

    /// Fourier field supplying the coefficient of step `t` (1-based).
    fn field(self, t: usize) -> Field {
        match (self, t % 2 == 1) {
            (WalkKind::X, true) => Field::Q,
            (WalkKind::X, false) => Field::P,
            (_, true) => Field::P,
            (_, false) => Field::Q,
        }
    }
}

/// An admissible walk. Only the steps are stored; vertices are derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    kind: WalkKind,
    n: i64,
    steps: Vec<i8>,
}

impl Walk {
    /// Validates endpoints, parity of the length (for `W`) and
    /// admissibility of every interior vertex.
    pub fn new(kind: WalkKind, n: i64, steps: Vec<i8>) -> Result<Self> {
        if steps.iter().any(|&s| s != 2 && s != -2) {
            return Err(Error::InvalidArgument("walk steps must be +2 or -2".into()));
        }
        let walk = Self { kind, n, steps };
        let (from, to) = kind.endpoints(n);
        let total: i64 = walk.steps.iter().map(|&s| i64::from(s)).sum();
        if from + total != to {
            return Err(Error::InvalidArgument(format!(
                "steps of a {kind} walk for n = {n} must sum to {}",
                to - from
            )));
        }
        if kind == WalkKind::W && (walk.steps.is_empty() || walk.steps.len() % 2 != 0) {
            return Err(Error::InvalidArgument("loop walks need a positive even length".into()));
        }
        if !walk.is_admissible() {
            return Err(Error::InvalidArgument(format!(
                "walk {:?} visits a forbidden vertex",
                walk.steps
            )));
        }
        Ok(walk)
    }

    pub fn kind(&self) -> WalkKind {
        self.kind
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Interior vertices `j_1, ..., j_{len-1}`.
    pub fn vertices(&self) -> Vec<i64> {
        let (from, _) = self.kind.endpoints(self.n);
        self.steps[..self.steps.len().saturating_sub(1)]
            .iter()
            .scan(from, |j, &s| {
                *j += i64::from(s);
                Some(*j)
            })
            .collect()
    }

    pub fn is_admissible(&self) -> bool {
        self.vertices()
            .iter()
            .enumerate()
            .all(|(i, &j)| j != self.kind.forbidden(self.n, i + 1))
    }

    /// Number of steps against the net direction of travel (`r`), or half
    /// the length for loops (`nu`).
    pub fn index(&self) -> usize {
        match self.kind {
            WalkKind::W => self.steps.len() / 2,
            _ => {
                let (from, to) = self.kind.endpoints(self.n);
                let direction = (to - from).signum() as i8 * 2;
                self.steps.iter().filter(|&&s| s != direction).count()
            }
        }
    }

    /// The walk weight h^+(x, z), h^-(y, z) or h(w, z) according to kind.
    pub fn weight(&self, z: &Scalar, v: &TrigPotential) -> Result<Scalar> {
        check_disc(z)?;
        let prec = z.prec().max(v.prec());
        let mut numerator = Scalar::one(prec);
        for (t, &s) in self.steps.iter().enumerate() {
            let c = v
                .fourier_coefficient(self.kind.field(t + 1), i64::from(s))
                .expect("steps are even");
            numerator = &numerator * &c;
        }
        let n = Scalar::from_int(prec, self.n);
        let mut denominator = Scalar::one(prec);
        for (i, j) in self.vertices().into_iter().enumerate() {
            let k = i + 1;
            let jv = Scalar::from_int(prec, j);
            // The factor vanishing at the forbidden vertex: n - j or n + j.
            let base = if self.kind.forbidden(self.n, k) == self.n {
                &n - &jv
            } else {
                &n + &jv
            };
            let factor = &base + z;
            if factor.is_zero() {
                return Err(Error::SingularDenominator { vertex: j, step: k });
            }
            denominator = &denominator * &factor;
        }
        Ok(&numerator / &denominator)
    }
}

pub(crate) fn check_disc(z: &Scalar) -> Result<()> {
    let abs_z = z.abs_f64();
    if abs_z > 0.5 {
        return Err(Error::OutsideDisc { abs_z });
    }
    Ok(())
}

/// All admissible walks of a class, in lexicographic order of the step
/// sequence with `+2` sorting before `-2`.
///
/// `index` is `r` (steps against the direction of travel) for `X`/`Y` and
/// `nu` (half the length) for `W`. Even `n` has no `X`/`Y` walks.
pub fn enumerate(kind: WalkKind, n: i64, index: usize) -> Result<Vec<Walk>> {
    if n.abs() < 2 {
        return Err(Error::InvalidArgument(format!("|n| must exceed 1, got n = {n}")));
    }
    let (ups, downs) = match kind {
        WalkKind::W => {
            if index == 0 {
                return Err(Error::InvalidArgument("loop walks start at nu = 1".into()));
            }
            (index, index)
        }
        WalkKind::X | WalkKind::Y => {
            if n % 2 == 0 {
                return Ok(Vec::new());
            }
            let forward = n.unsigned_abs() as usize + index;
            // X travels in the direction of sign(n), Y against it.
            let positive_travel = (kind == WalkKind::X) == (n > 0);
            if positive_travel {
                (forward, index)
            } else {
                (index, forward)
            }
        }
    };
    let len = ups + downs;
    if len > MAX_BRUTE_FORCE_STEPS {
        return Err(Error::TooLarge {
            steps: len,
            cap: MAX_BRUTE_FORCE_STEPS,
        });
    }
    let (from, _) = kind.endpoints(n);
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(len);
    descend(kind, n, from, ups, downs, &mut steps, &mut out);
    Ok(out)
}

fn descend(
    kind: WalkKind,
    n: i64,
    at: i64,
    ups: usize,
    downs: usize,
    steps: &mut Vec<i8>,
    out: &mut Vec<Walk>,
) {
    if ups == 0 && downs == 0 {
        out.push(Walk {
            kind,
            n,
            steps: steps.clone(),
        });
        return;
    }
    for (step, ups_left, downs_left) in [(2i8, ups.wrapping_sub(1), downs), (-2, ups, downs.wrapping_sub(1))] {
        if (step > 0 && ups == 0) || (step < 0 && downs == 0) {
            continue;
        }
        let next = at + i64::from(step);
        let k = steps.len() + 1;
        // The final arrival is the endpoint, not an interior vertex.
        let interior = ups_left + downs_left > 0;
        if interior && next == kind.forbidden(n, k) {
            continue;
        }
        steps.push(step);
        descend(kind, n, next, ups_left, downs_left, steps, out);
        steps.pop();
    }
}
