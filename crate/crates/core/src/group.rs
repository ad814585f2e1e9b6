//! Finite groups as index-based multiplication tables.
//!
//! Elements are indices `0..order`, the identity is always index 0, and
//! everything downstream (algebra coordinates, ideal bases, search
//! witnesses) relies on that convention. Tables are immutable after
//! construction and safe to share across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::linalg::is_prime;
use crate::mat2;

/// Orders above this are fully associativity-checked; larger tables get
/// a 10^5-sample randomized check. The cubic check is the cost driver.
const FULL_ASSOC_ORDER: usize = 512;
const ASSOC_SAMPLES: usize = 100_000;
const ASSOC_SEED: u64 = 0xA550C1A7;

/// Default cap on group order for table construction. A table takes
/// `order^2` u32 entries, so the cap bounds memory at a few GiB.
pub const DEFAULT_MAX_ORDER: usize = 1 << 15;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("unknown group family: {0}")]
    UnknownFamily(String),
    #[error("parameter out of supported range: {0}")]
    BadParameter(String),
    #[error("group axiom violated: {0}")]
    AxiomViolation(String),
    #[error("order {order} exceeds the configured cap {cap} (tables take order^2 entries)")]
    OrderCap { order: usize, cap: usize },
    #[error("homomorphism property fails: {0}")]
    BadHom(String),
    #[error("invalid group file: {0}")]
    BadFile(String),
}

#[derive(Debug, Clone)]
pub struct Group {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
}

impl Group {
    pub const IDENTITY: usize = 0;

    /// Build from a multiplication table, deriving the inverse table and
    /// checking the axioms. The diagnostic names the first violated one.
    pub fn from_mul_table(
        name: impl Into<String>,
        order: usize,
        table: &[Vec<u64>],
        labels: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        if order == 0 || table.len() != order {
            return Err(GroupError::BadFile(format!(
                "expected {order} rows, found {}",
                table.len()
            )));
        }
        let mut mul = Vec::with_capacity(order * order);
        for (i, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::BadFile(format!(
                    "row {i} has length {}, expected {order}",
                    row.len()
                )));
            }
            for &e in row {
                if e as usize >= order {
                    return Err(GroupError::AxiomViolation(format!(
                        "closure: entry {e} in row {i} is not an element index below {order}"
                    )));
                }
                mul.push(e as u32);
            }
        }
        let labels = labels.unwrap_or_else(|| (0..order).map(|i| format!("g{i}")).collect());
        let g = Group::assemble(name.into(), order, mul, labels)?;
        Ok(g)
    }

    fn assemble(
        name: String,
        order: usize,
        mul: Vec<u32>,
        labels: Vec<String>,
    ) -> Result<Self, GroupError> {
        let inv = derive_inverses(order, &mul)?;
        let g = Group { name, order, mul, inv, labels };
        g.validate()?;
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x] as usize
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    /// a x a^{-1}
    pub fn conjugate(&self, x: usize, a: usize) -> usize {
        self.mul(self.mul(a, x), self.inv(a))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&x| (0..self.order).all(|y| self.mul(x, y) == self.mul(y, x)))
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.center().len() == self.order
    }

    /// Greedy generating set: repeatedly adjoin the smallest element
    /// outside the generated subgroup. At most log2(order) generators.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut in_sub = vec![false; self.order];
        in_sub[Self::IDENTITY] = true;
        let mut members = vec![Self::IDENTITY];
        for x in 1..self.order {
            if in_sub[x] {
                continue;
            }
            gens.push(x);
            // close the subgroup under the enlarged generator set
            let mut stack = members.clone();
            while let Some(m) = stack.pop() {
                for &g in &gens {
                    let n = self.mul(m, g);
                    if !in_sub[n] {
                        in_sub[n] = true;
                        members.push(n);
                        stack.push(n);
                    }
                }
            }
            if members.len() == self.order {
                break;
            }
        }
        gens
    }

    /// Componentwise direct power of order `order^n`. Element index is the
    /// little-endian base-`order` digit string of the components.
    pub fn direct_power(&self, n: u32) -> Result<Group, GroupError> {
        self.direct_power_with_cap(n, DEFAULT_MAX_ORDER)
    }

    pub fn direct_power_with_cap(&self, n: u32, cap: usize) -> Result<Group, GroupError> {
        if n == 0 {
            return Err(GroupError::BadParameter("direct power requires n >= 1".into()));
        }
        let mut order: usize = 1;
        for _ in 0..n {
            order = order
                .checked_mul(self.order)
                .filter(|&o| o <= cap)
                .ok_or(GroupError::OrderCap { order: usize::MAX, cap })?;
        }
        if order > cap {
            return Err(GroupError::OrderCap { order, cap });
        }
        let base = self.order;
        let n = n as usize;
        let digits = |mut x: usize| -> Vec<usize> {
            (0..n)
                .map(|_| {
                    let d = x % base;
                    x /= base;
                    d
                })
                .collect()
        };
        let mut mul = vec![0u32; order * order];
        for x in 0..order {
            let dx = digits(x);
            for y in 0..order {
                let dy = digits(y);
                let mut z = 0usize;
                let mut scale = 1usize;
                for i in 0..n {
                    z += self.mul(dx[i], dy[i]) * scale;
                    scale *= base;
                }
                mul[x * order + y] = z as u32;
            }
        }
        let labels = (0..order)
            .map(|x| {
                let parts: Vec<&str> = digits(x).iter().map(|&d| self.label(d)).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        Group::assemble(format!("{}^{}", self.name, n), order, mul, labels)
    }

    /// Identity and inverse axioms are checked in full; associativity in
    /// full up to order 512 and by randomized sampling above that.
    pub fn validate(&self) -> Result<(), GroupError> {
        let n = self.order;
        for x in 0..n {
            if self.mul(Self::IDENTITY, x) != x || self.mul(x, Self::IDENTITY) != x {
                return Err(GroupError::AxiomViolation(format!(
                    "identity: index 0 does not act as identity on {x}"
                )));
            }
        }
        for x in 0..n {
            let i = self.inv(x);
            if self.mul(x, i) != Self::IDENTITY || self.mul(i, x) != Self::IDENTITY {
                return Err(GroupError::AxiomViolation(format!(
                    "inverse: {i} is not a two-sided inverse of {x}"
                )));
            }
        }
        let check = |x: usize, y: usize, z: usize| -> Result<(), GroupError> {
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                return Err(GroupError::AxiomViolation(format!(
                    "associativity: ({x} {y}) {z} != {x} ({y} {z})"
                )));
            }
            Ok(())
        };
        if n <= FULL_ASSOC_ORDER {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        check(x, y, z)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SEED);
            for _ in 0..ASSOC_SAMPLES {
                check(
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                )?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

fn derive_inverses(order: usize, mul: &[u32]) -> Result<Vec<u32>, GroupError> {
    let mut inv = vec![u32::MAX; order];
    for x in 0..order {
        let found = (0..order).find(|&y| {
            mul[x * order + y] == Group::IDENTITY as u32
                && mul[y * order + x] == Group::IDENTITY as u32
        });
        match found {
            Some(y) => inv[x] = y as u32,
            None => {
                return Err(GroupError::AxiomViolation(format!(
                    "inverse: element {x} has no two-sided inverse"
                )))
            }
        }
    }
    Ok(inv)
}

/// A group homomorphism given as an element-index map, validated in full.
#[derive(Debug, Clone)]
pub struct GroupHom {
    map: Vec<u32>,
}

impl GroupHom {
    pub fn new(source: &Group, target: &Group, map: Vec<u32>) -> Result<Self, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::BadHom(format!(
                "map has length {}, source order is {}",
                map.len(),
                source.order()
            )));
        }
        if map[Group::IDENTITY] != Group::IDENTITY as u32 {
            return Err(GroupError::BadHom("identity is not sent to identity".into()));
        }
        for &t in &map {
            if t as usize >= target.order() {
                return Err(GroupError::BadHom(format!("image index {t} out of range")));
            }
        }
        for x in 0..source.order() {
            for y in 0..source.order() {
                let lhs = map[source.mul(x, y)] as usize;
                let rhs = target.mul(map[x] as usize, map[y] as usize);
                if lhs != rhs {
                    return Err(GroupError::BadHom(format!(
                        "map({x} {y}) != map({x}) map({y})"
                    )));
                }
            }
        }
        Ok(GroupHom { map })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn is_surjective(&self, target: &Group) -> bool {
        let mut hit = vec![false; target.order()];
        for &t in &self.map {
            hit[t as usize] = true;
        }
        hit.iter().all(|&h| h)
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter(|&(_, &t)| t == Group::IDENTITY as u32)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builtin families. Matrix groups use the identity-first row-major
/// element order (identity first, then row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion,
    Gl2(u64),
    Sl2(u64),
    Psl2(u64),
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, GroupError> {
        let (family, param) = match s.split_once(':') {
            Some((f, p)) => (f, Some(p)),
            None => (s, None),
        };
        let num = |field: &str| -> Result<usize, GroupError> {
            param
                .ok_or_else(|| GroupError::BadParameter(format!("{family} needs {field}")))?
                .parse()
                .map_err(|_| GroupError::BadParameter(format!("bad {field} in {s:?}")))
        };
        match family {
            "cyclic" | "z" => Ok(GroupSpec::Cyclic(num("n")?)),
            "dihedral" | "d" => Ok(GroupSpec::Dihedral(num("n")?)),
            "symmetric" | "s" => Ok(GroupSpec::Symmetric(num("n")?)),
            "quaternion" | "q8" => Ok(GroupSpec::Quaternion),
            "gl2" => Ok(GroupSpec::Gl2(num("p")? as u64)),
            "sl2" => Ok(GroupSpec::Sl2(num("p")? as u64)),
            "psl2" => Ok(GroupSpec::Psl2(num("p")? as u64)),
            other => Err(GroupError::UnknownFamily(other.to_string())),
        }
    }
}

impl GroupSpec {
    pub fn build(&self) -> Result<Group, GroupError> {
        match *self {
            GroupSpec::Cyclic(n) => cyclic(n),
            GroupSpec::Dihedral(n) => dihedral(n),
            GroupSpec::Symmetric(n) => symmetric(n),
            GroupSpec::Quaternion => quaternion(),
            GroupSpec::Gl2(p) => matrix_group(p, false, MatrixFamily::Gl2),
            GroupSpec::Sl2(p) => matrix_group(p, false, MatrixFamily::Sl2),
            GroupSpec::Psl2(p) => matrix_group(p, true, MatrixFamily::Psl2),
        }
    }
}

pub fn build_builtin(spec: &str) -> Result<Group, GroupError> {
    GroupSpec::from_str(spec)?.build()
}

fn cyclic(n: usize) -> Result<Group, GroupError> {
    if n == 0 || n > DEFAULT_MAX_ORDER {
        return Err(GroupError::BadParameter(format!("cyclic order {n}")));
    }
    let mut mul = vec![0u32; n * n];
    for x in 0..n {
        for y in 0..n {
            mul[x * n + y] = ((x + y) % n) as u32;
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    Group::assemble(format!("Z{n}"), n, mul, labels)
}

fn dihedral(n: usize) -> Result<Group, GroupError> {
    if n == 0 || 2 * n > DEFAULT_MAX_ORDER {
        return Err(GroupError::BadParameter(format!("dihedral parameter {n}")));
    }
    let order = 2 * n;
    // index = e*n + i encodes r^i s^e with s r s = r^{-1}
    let mut mul = vec![0u32; order * order];
    for e1 in 0..2 {
        for i1 in 0..n {
            for e2 in 0..2 {
                for i2 in 0..n {
                    let i = if e1 == 0 { (i1 + i2) % n } else { (i1 + n - i2) % n };
                    let e = e1 ^ e2;
                    mul[(e1 * n + i1) * order + (e2 * n + i2)] = (e * n + i) as u32;
                }
            }
        }
    }
    let labels = (0..order)
        .map(|x| {
            let (e, i) = (x / n, x % n);
            match (e, i) {
                (0, 0) => "e".to_string(),
                (0, i) => format!("r{i}"),
                (_, 0) => "s".to_string(),
                (_, i) => format!("r{i}s"),
            }
        })
        .collect();
    Group::assemble(format!("D{n}"), order, mul, labels)
}

fn symmetric(n: usize) -> Result<Group, GroupError> {
    if n == 0 || n > 6 {
        return Err(GroupError::BadParameter(format!(
            "symmetric group supported for 1 <= n <= 6, got {n}"
        )));
    }
    // lexicographic one-line order puts the identity first
    let mut perms: Vec<Vec<u8>> = vec![(0..n as u8).collect()];
    while let Some(next) = next_permutation(perms.last().unwrap()) {
        perms.push(next);
    }
    let order = perms.len();
    let rank = |perm: &[u8]| -> usize { perms.binary_search_by(|q| q.as_slice().cmp(perm)).unwrap() };
    let mut mul = vec![0u32; order * order];
    for (x, px) in perms.iter().enumerate() {
        for (y, py) in perms.iter().enumerate() {
            // apply y first, then x
            let comp: Vec<u8> = (0..n).map(|i| px[py[i] as usize]).collect();
            mul[x * order + y] = rank(&comp) as u32;
        }
    }
    let labels = perms
        .iter()
        .map(|p| p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(""))
        .collect();
    Group::assemble(format!("S{n}"), order, mul, labels)
}

fn next_permutation(p: &[u8]) -> Option<Vec<u8>> {
    let mut q = p.to_vec();
    let n = q.len();
    if n < 2 {
        return None;
    }
    let i = (0..n - 1).rev().find(|&i| q[i] < q[i + 1])?;
    let j = (i + 1..n).rev().find(|&j| q[j] > q[i]).unwrap();
    q.swap(i, j);
    q[i + 1..].reverse();
    Some(q)
}

fn quaternion() -> Result<Group, GroupError> {
    // order: 1, -1, i, -i, j, -j, k, -k
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
    // represent x as (sign, axis) with axis in {1, i, j, k}
    let split = |x: usize| (x % 2, x / 2);
    let fuse = |s: usize, a: usize| 2 * a + s;
    // axis multiplication table with result sign: i*j = k, j*i = -k, ...
    let axis_mul = |a: usize, b: usize| -> (usize, usize) {
        match (a, b) {
            (0, b) => (0, b),
            (a, 0) => (0, a),
            (a, b) if a == b => (1, 0),
            (1, 2) => (0, 3),
            (2, 3) => (0, 1),
            (3, 1) => (0, 2),
            (2, 1) => (1, 3),
            (3, 2) => (1, 1),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    let mut mul = vec![0u32; 64];
    for x in 0..8 {
        for y in 0..8 {
            let (sx, ax) = split(x);
            let (sy, ay) = split(y);
            let (sp, az) = axis_mul(ax, ay);
            mul[x * 8 + y] = fuse((sx + sy + sp) % 2, az) as u32;
        }
    }
    Group::assemble(
        "Q8".to_string(),
        8,
        mul,
        labels.iter().map(|s| s.to_string()).collect(),
    )
}

enum MatrixFamily {
    Gl2,
    Sl2,
    Psl2,
}

fn matrix_group(p: u64, require_odd: bool, family: MatrixFamily) -> Result<Group, GroupError> {
    if !is_prime(p) || p > 13 {
        return Err(GroupError::BadParameter(format!(
            "matrix groups are supported for primes p <= 13, got {p}"
        )));
    }
    if require_odd && p == 2 {
        return Err(GroupError::BadParameter(
            "the projective family needs an odd prime".into(),
        ));
    }
    let (name, elements, project) = match family {
        MatrixFamily::Gl2 => (format!("GL2({p})"), mat2::enumerate_gl2(p), false),
        MatrixFamily::Sl2 => (format!("SL2({p})"), mat2::enumerate_sl2(p), false),
        MatrixFamily::Psl2 => (format!("PSL2({p})"), mat2::enumerate_psl2(p), true),
    };
    let order = elements.len();
    if order > DEFAULT_MAX_ORDER {
        return Err(GroupError::OrderCap { order, cap: DEFAULT_MAX_ORDER });
    }
    let index = mat2::Mat2Index::new(p, &elements);
    let mut mul = vec![0u32; order * order];
    for (x, &mx) in elements.iter().enumerate() {
        for (y, &my) in elements.iter().enumerate() {
            let mut prod = mat2::mul(p, mx, my);
            if project {
                prod = mat2::psl2_canonical(p, prod);
            }
            mul[x * order + y] = index.index_of(prod).expect("closed under product") as u32;
        }
    }
    let labels = elements
        .iter()
        .map(|m| format!("[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3]))
        .collect();
    Group::assemble(name, order, mul, labels)
}

/// The quotient SL2 -> PSL2 sending a matrix to its sign representative,
/// and the inclusion SL2 -> GL2. Both validated as homomorphisms.
pub fn sl2_to_psl2(p: u64) -> Result<(Group, Group, GroupHom), GroupError> {
    let sl2 = GroupSpec::Sl2(p).build()?;
    let psl2 = GroupSpec::Psl2(p).build()?;
    let elements = mat2::enumerate_sl2(p);
    let proj = mat2::enumerate_psl2(p);
    let index = mat2::Mat2Index::new(p, &proj);
    let map = elements
        .iter()
        .map(|&m| index.index_of(mat2::psl2_canonical(p, m)).unwrap() as u32)
        .collect();
    let hom = GroupHom::new(&sl2, &psl2, map)?;
    Ok((sl2, psl2, hom))
}

pub fn sl2_into_gl2(p: u64) -> Result<(Group, Group, GroupHom), GroupError> {
    let sl2 = GroupSpec::Sl2(p).build()?;
    let gl2 = GroupSpec::Gl2(p).build()?;
    let elements = mat2::enumerate_sl2(p);
    let all = mat2::enumerate_gl2(p);
    let index = mat2::Mat2Index::new(p, &all);
    let map = elements.iter().map(|&m| index.index_of(m).unwrap() as u32).collect();
    let hom = GroupHom::new(&sl2, &gl2, map)?;
    Ok((sl2, gl2, hom))
}

#[derive(Deserialize)]
struct GroupFile {
    name: String,
    order: usize,
    mul: Vec<Vec<u64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Parse the group ingestion format `{"name", "order", "mul"}`. The
/// inverse table is derived and all axioms are validated on load.
pub fn group_from_json(json: &str) -> Result<Group, GroupError> {
    let file: GroupFile =
        serde_json::from_str(json).map_err(|e| GroupError::BadFile(e.to_string()))?;
    Group::from_mul_table(file.name, file.order, &file.mul, file.labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_arithmetic() {
        let g = build_builtin("cyclic:4").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.mul(1, 3), 0);
        assert_eq!(g.inv(1), 3);
    }

    #[test]
    fn builtin_orders() {
        assert_eq!(build_builtin("psl2:5").unwrap().order(), 60);
        assert_eq!(build_builtin("gl2:5").unwrap().order(), 480);
        assert_eq!(build_builtin("sl2:5").unwrap().order(), 120);
        assert_eq!(build_builtin("symmetric:4").unwrap().order(), 24);
        assert_eq!(build_builtin("dihedral:4").unwrap().order(), 8);
        assert_eq!(build_builtin("quaternion").unwrap().order(), 8);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(build_builtin("psl2:4").is_err());
        assert!(build_builtin("psl2:2").is_err());
        assert!(build_builtin("symmetric:7").is_err());
        assert!(build_builtin("nosuch:3").is_err());
        assert!(build_builtin("cyclic:0").is_err());
    }

    #[test]
    fn direct_power_basics() {
        let z2 = build_builtin("cyclic:2").unwrap();
        let cube = z2.direct_power(3).unwrap();
        assert_eq!(cube.order(), 8);
        for x in 1..8 {
            assert_eq!(cube.inv(x), x);
        }
        let z3 = build_builtin("cyclic:3").unwrap();
        let sq = z3.direct_power(2).unwrap();
        assert_eq!(sq.order(), 9);
        // element (1,2) has index 1 + 2*3 = 7, inverse (2,1) has index 2 + 1*3 = 5
        assert_eq!(sq.inv(7), 5);
        let same = z3.direct_power(1).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(same.mul(x, y), z3.mul(x, y));
            }
        }
    }

    #[test]
    fn direct_power_cap() {
        let z2 = build_builtin("cyclic:2").unwrap();
        assert!(matches!(
            z2.direct_power_with_cap(20, 1 << 10),
            Err(GroupError::OrderCap { .. })
        ));
    }

    #[test]
    fn conjugation() {
        let s3 = build_builtin("symmetric:3").unwrap();
        for x in 0..6 {
            assert_eq!(s3.conjugate(x, Group::IDENTITY), x);
        }
        let z6 = build_builtin("cyclic:6").unwrap();
        for x in 0..6 {
            for a in 0..6 {
                assert_eq!(z6.conjugate(x, a), x);
            }
        }
        // conjugating a transposition by a 3-cycle gives a transposition
        let transposition = (0..6).find(|&x| x != 0 && s3.mul(x, x) == 0).unwrap();
        let three_cycle = (0..6)
            .find(|&x| s3.mul(x, x) != 0 && s3.mul(s3.mul(x, x), x) == 0)
            .unwrap();
        let c = s3.conjugate(transposition, three_cycle);
        assert_ne!(c, 0);
        assert_eq!(s3.mul(c, c), 0);
        assert_ne!(c, transposition);
    }

    #[test]
    fn centers() {
        let psl2 = build_builtin("psl2:5").unwrap();
        assert_eq!(psl2.center(), vec![0]);
        let z5 = build_builtin("cyclic:5").unwrap();
        assert_eq!(z5.center().len(), 5);
        let q8 = build_builtin("quaternion").unwrap();
        assert_eq!(q8.center(), vec![0, 1]);
    }

    #[test]
    fn center_of_power_is_power_of_center() {
        let s3 = build_builtin("symmetric:3").unwrap();
        let sq = s3.direct_power(2).unwrap();
        assert_eq!(sq.center(), vec![0]);
        let z3 = build_builtin("cyclic:3").unwrap();
        assert_eq!(z3.direct_power(2).unwrap().center().len(), 9);
    }

    #[test]
    fn quotient_hom_is_two_to_one() {
        let (sl2, psl2, hom) = sl2_to_psl2(5).unwrap();
        assert_eq!(sl2.order(), 120);
        assert!(hom.is_surjective(&psl2));
        let kernel = hom.kernel();
        assert_eq!(kernel.len(), 2);
        // kernel is {1, -1}: the nonidentity kernel element squares to 1
        let minus_one = kernel.iter().copied().find(|&k| k != 0).unwrap();
        assert_eq!(sl2.mul(minus_one, minus_one), 0);
        let mut counts = vec![0usize; psl2.order()];
        for x in 0..sl2.order() {
            counts[hom.apply(x)] += 1;
        }
        assert!(counts.iter().all(|&c| c == 2));
    }

    #[test]
    fn inclusion_hom_validates() {
        let (_, _, hom) = sl2_into_gl2(5).unwrap();
        assert_eq!(hom.kernel(), vec![0]);
    }

    #[test]
    fn generating_sets_generate() {
        for spec in ["cyclic:12", "symmetric:4", "quaternion", "psl2:5"] {
            let g = build_builtin(spec).unwrap();
            let gens = g.generating_set();
            let mut seen = vec![false; g.order()];
            seen[0] = true;
            let mut stack = vec![0usize];
            let mut count = 1;
            while let Some(m) = stack.pop() {
                for &x in &gens {
                    let n = g.mul(m, x);
                    if !seen[n] {
                        seen[n] = true;
                        count += 1;
                        stack.push(n);
                    }
                }
            }
            assert_eq!(count, g.order(), "{spec}");
        }
    }

    #[test]
    fn json_ingestion_accepts_valid_table() {
        let json = r#"{"name":"K4","order":4,"mul":[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]}"#;
        let g = group_from_json(json).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_abelian());
    }

    #[test]
    fn json_ingestion_names_the_violated_axiom() {
        // identity row broken
        let json = r#"{"name":"bad","order":2,"mul":[[1,0],[0,1]]}"#;
        let err = group_from_json(json).unwrap_err().to_string();
        assert!(err.contains("identity") || err.contains("inverse"), "{err}");
        // non-associative magma with identity and inverses
        let json = r#"{"name":"bad","order":5,"mul":[
            [0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}"#;
        let err = group_from_json(json).unwrap_err().to_string();
        assert!(err.contains("associativity"), "{err}");
    }

    #[test]
    fn closure_violation_detected() {
        let json = r#"{"name":"bad","order":2,"mul":[[0,1],[1,7]]}"#;
        let err = group_from_json(json).unwrap_err().to_string();
        assert!(err.contains("closure"), "{err}");
    }
}
