//! Vertex-level navigation of `(u,v)`-Calkin–Wilf trees.
//!
//! A vertex `a/b` has left child `a/(ua+b)` and right child `(a+vb)/b`. Left
//! children lie below `1/u` and right children above `v`, so every rational
//! outside `[1/u, v]` has exactly one parent and the orphans in `[1/u, v]`
//! are the roots of trees partitioning the positive rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreeParams {
    u: u64,
    v: u64,
}

impl TreeParams {
    pub fn new(u: u64, v: u64) -> Result<Self> {
        if u == 0 || v == 0 {
            return Err(Error::InvalidParams { u, v });
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> u64 {
        self.u
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    /// `1/u`, the smallest orphan.
    pub fn low_root(&self) -> Rational {
        Rational::from_coprime(BigUint::one(), BigUint::from(self.u))
    }

    /// `v`, the largest orphan.
    pub fn high_root(&self) -> Rational {
        Rational::integer(self.v)
    }
}

impl fmt::Display for TreeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

/// Left/right steps from a root down to a vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TreePath(Vec<Direction>);

impl TreePath {
    pub fn new(steps: Vec<Direction>) -> Self {
        Self(steps)
    }

    pub fn steps(&self) -> &[Direction] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            f.write_str(match d {
                Direction::Left => "L",
                Direction::Right => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for TreePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Direction::Left),
                'R' | 'r' => Ok(Direction::Right),
                _ => Err(Error::ParsePath(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(TreePath)
    }
}

impl Serialize for TreePath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn require_positive(x: &Rational) -> Result<()> {
    if x.is_zero() {
        Err(Error::ZeroValue("position in a Calkin-Wilf tree"))
    } else {
        Ok(())
    }
}

pub(crate) fn left_child_parts(a: &BigUint, b: &BigUint, u: u64) -> (BigUint, BigUint) {
    (a.clone(), a * u + b)
}

pub(crate) fn right_child_parts(a: &BigUint, b: &BigUint, v: u64) -> (BigUint, BigUint) {
    (a + b * v, b.clone())
}

/// Left and right children of a positive vertex.
pub fn children(x: &Rational, p: TreeParams) -> Result<(Rational, Rational)> {
    require_positive(x)?;
    let (a, b) = (x.numer(), x.denom());
    // gcd(a, ua+b) = gcd(a+vb, b) = gcd(a, b) = 1
    let (ln, ld) = left_child_parts(a, b, p.u);
    let (rn, rd) = right_child_parts(a, b, p.v);
    Ok((Rational::from_coprime(ln, ld), Rational::from_coprime(rn, rd)))
}

/// Children computed on continued fractions: prepending `[0, u]` (or
/// bumping `q1` by `u` when `q0 = 0`) on the left, adding `v` to `q0` on
/// the right.
pub fn children_cf(
    cf: &ContinuedFraction,
    p: TreeParams,
) -> Result<(ContinuedFraction, ContinuedFraction)> {
    if !cf.is_canonical() {
        return Err(Error::MalformedCf(format!("{cf} is not canonical")));
    }
    if cf.is_zero() {
        return Err(Error::ZeroValue("position in a Calkin-Wilf tree"));
    }
    let q = cf.coeffs();
    let u = BigUint::from(p.u);
    let left = if q[0].is_zero() {
        let mut c = q.to_vec();
        c[1] += &u;
        c
    } else {
        let mut c = Vec::with_capacity(q.len() + 2);
        c.push(BigUint::zero());
        c.push(u);
        c.extend_from_slice(q);
        c
    };
    let mut right = q.to_vec();
    right[0] += p.v;
    let left = ContinuedFraction::from_vec_unchecked(left).canonical();
    Ok((left, ContinuedFraction::from_vec_unchecked(right)))
}

pub fn is_orphan(x: &Rational, p: TreeParams) -> bool {
    // 1/u <= a/b <= v  <=>  b <= u a  and  a <= v b
    let (a, b) = (x.numer(), x.denom());
    !x.is_zero() && *b <= a * p.u && *a <= b * p.v
}

fn parent_step(a: &BigUint, b: &BigUint, p: TreeParams) -> Option<(BigUint, BigUint, Direction)> {
    let vb = b * p.v;
    if *a > vb {
        return Some((a - vb, b.clone(), Direction::Right));
    }
    let ua = a * p.u;
    if ua < *b {
        // x = a/b = 1/(u + 1/y)  =>  y = a/(b - ua)
        return Some((a.clone(), b - ua, Direction::Left));
    }
    None
}

/// Inverse of [`children`]; `None` exactly on the orphans `[1/u, v]`.
pub fn parent(x: &Rational, p: TreeParams) -> Result<Option<Rational>> {
    require_positive(x)?;
    Ok(parent_step(x.numer(), x.denom(), p).map(|(a, b, _)| Rational::from_coprime(a, b)))
}

/// Root, depth and path of a positive rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub root: Rational,
    pub depth: u64,
    pub path: TreePath,
}

pub fn locate(q: &Rational, p: TreeParams) -> Result<Location> {
    require_positive(q)?;
    let mut a = q.numer().clone();
    let mut b = q.denom().clone();
    let mut steps = Vec::new();
    while let Some((na, nb, dir)) = parent_step(&a, &b, p) {
        assert!(
            &na + &nb < &a + &b,
            "parent step must shrink numerator plus denominator"
        );
        steps.push(dir);
        a = na;
        b = nb;
    }
    steps.reverse();
    Ok(Location {
        root: Rational::from_coprime(a, b),
        depth: steps.len() as u64,
        path: TreePath(steps),
    })
}

pub fn vertex_at_path(root: &Rational, path: &TreePath, p: TreeParams) -> Result<Rational> {
    require_positive(root)?;
    let mut x = root.clone();
    for d in path.steps() {
        let (l, r) = children(&x, p)?;
        x = match d {
            Direction::Left => l,
            Direction::Right => r,
        };
    }
    Ok(x)
}

/// Checks the four continued-fraction conditions for `zp = [p0..ps]` to be a
/// descendant of `z = [q0..qr]` on one fixed pair of representations.
pub fn descent_condition_holds(z: &ContinuedFraction, zp: &ContinuedFraction, p: TreeParams) -> bool {
    let q = z.coeffs();
    let pp = zp.coeffs();
    let (r, s) = (z.last_index(), zp.last_index());
    if s < r || (s - r) % 2 != 0 {
        return false;
    }
    let off = s - r;
    let (u, v) = (p.u, p.v);
    let divides = |d: u64, x: &BigUint| (x % d).is_zero();
    let prefix_ok = pp[..off]
        .iter()
        .enumerate()
        .all(|(j, c)| divides(if j % 2 == 0 { v } else { u }, c));
    if !prefix_ok {
        return false;
    }
    if (2..=r).any(|i| pp[off + i] != q[i]) {
        return false;
    }
    if !q[0].is_zero() {
        // q1 absent when r = 0: condition is vacuous
        pp[off] >= q[0]
            && divides(v, &(&pp[off] - &q[0]))
            && (r == 0 || pp[off + 1] == q[1])
    } else {
        if !divides(v, &pp[off]) {
            return false;
        }
        if r == 0 {
            // z = 0 is never a tree vertex
            return false;
        }
        pp[off + 1] >= q[1] && divides(u, &(&pp[off + 1] - &q[1]))
    }
}

/// Evaluates the depth formula on a representation pair satisfying
/// [`descent_condition_holds`]: `v`-weighted even-index excess plus `u`-weighted
/// odd-index excess.
pub fn depth_formula(z: &ContinuedFraction, zp: &ContinuedFraction, p: TreeParams) -> Rational {
    let q = z.coeffs();
    let pp = zp.coeffs();
    let (r, s) = (z.last_index(), zp.last_index());
    let off = s - r;
    let mut even = BigUint::zero();
    let mut odd = BigUint::zero();
    for (j, c) in pp[..off].iter().enumerate() {
        if j % 2 == 0 {
            even += c;
        } else {
            odd += c;
        }
    }
    for i in 0..=r {
        let d = &pp[off + i] - &q[i];
        if i % 2 == 0 {
            even += d;
        } else {
            odd += d;
        }
    }
    &Rational::from_biguints(even, BigUint::from(p.v)) + &Rational::from_biguints(odd, BigUint::from(p.u))
}

/// The first (short-or-long × short-or-long) representation pair on which
/// the descendant conditions hold.
pub fn descendant_witness(
    z: &Rational,
    zp: &Rational,
    p: TreeParams,
) -> Option<(ContinuedFraction, ContinuedFraction)> {
    if z.is_zero() || zp.is_zero() {
        return None;
    }
    let zs = ContinuedFraction::representations(z);
    let zps = ContinuedFraction::representations(zp);
    for a in &zs {
        for b in &zps {
            if descent_condition_holds(a, b, p) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// Whether `zp` lies in the tree rooted at `z` (depth 0 included), decided
/// from continued fractions alone.
pub fn is_descendant(z: &Rational, zp: &Rational, p: TreeParams) -> bool {
    descendant_witness(z, zp, p).is_some()
}

/// Depth of `zp` below `z`, from the continued-fraction depth formula.
/// Every satisfying representation pair must agree; a disagreement is a bug
/// and panics.
pub fn depth_from_cf(z: &Rational, zp: &Rational, p: TreeParams) -> Result<u64> {
    let not_desc = || Error::NotDescendant {
        ancestor: z.to_string(),
        query: zp.to_string(),
    };
    if z.is_zero() || zp.is_zero() {
        return Err(not_desc());
    }
    let mut depth: Option<Rational> = None;
    for a in ContinuedFraction::representations(z) {
        for b in ContinuedFraction::representations(zp) {
            if !descent_condition_holds(&a, &b, p) {
                continue;
            }
            let n = depth_formula(&a, &b, p);
            match &depth {
                None => depth = Some(n),
                Some(prev) => assert_eq!(prev, &n, "representation pairs disagree on depth"),
            }
        }
    }
    let n = depth.ok_or_else(not_desc)?;
    assert!(n.is_integer(), "depth formula produced non-integer {n}");
    Ok(n.numer().to_u64().expect("depth fits in u64"))
}

/// Walks the parent map from `zp` up to `z`, returning the number of steps.
pub fn ancestor_distance(z: &Rational, zp: &Rational, p: TreeParams) -> Option<u64> {
    if z.is_zero() || zp.is_zero() {
        return None;
    }
    let (mut a, mut b) = (zp.numer().clone(), zp.denom().clone());
    let mut steps = 0u64;
    loop {
        if &a == z.numer() && &b == z.denom() {
            return Some(steps);
        }
        match parent_step(&a, &b, p) {
            Some((na, nb, _)) => {
                a = na;
                b = nb;
                steps += 1;
            }
            None => return None,
        }
    }
}
