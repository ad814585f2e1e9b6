//! 2x2 matrix arithmetic mod p and canonical enumerations of the matrix
//! group element sets.
//!
//! Every matrix group in this crate uses the same element order: the
//! identity first, then the remaining elements sorted row-major by their
//! entries `(a, b, c, d)`. For the projective group an element is stored
//! as the sign representative whose first nonzero entry, read row-major,
//! lies in `1..=(p-1)/2`.

/// Row-major `[a, b, c, d]` with entries reduced mod p.
pub(crate) type Mat2 = [u64; 4];

pub(crate) const IDENTITY: Mat2 = [1, 0, 0, 1];

pub(crate) fn mul(p: u64, x: Mat2, y: Mat2) -> Mat2 {
    [
        (x[0] * y[0] + x[1] * y[2]) % p,
        (x[0] * y[1] + x[1] * y[3]) % p,
        (x[2] * y[0] + x[3] * y[2]) % p,
        (x[2] * y[1] + x[3] * y[3]) % p,
    ]
}

pub(crate) fn det(p: u64, m: Mat2) -> u64 {
    (m[0] * m[3] + p * p - m[1] * m[2]) % p
}

pub(crate) fn neg(p: u64, m: Mat2) -> Mat2 {
    [(p - m[0]) % p, (p - m[1]) % p, (p - m[2]) % p, (p - m[3]) % p]
}

/// Inverse via the adjugate. The caller must pass an invertible matrix.
pub(crate) fn inv(p: u64, m: Mat2) -> Mat2 {
    let d = det(p, m);
    debug_assert_ne!(d, 0, "singular matrix has no inverse");
    let di = crate::linalg::mod_inv(d, p);
    [
        m[3] * di % p,
        (p - m[1]) % p * di % p,
        (p - m[2]) % p * di % p,
        m[0] * di % p,
    ]
}

pub(crate) fn encode(p: u64, m: Mat2) -> usize {
    (((m[0] * p + m[1]) * p + m[2]) * p + m[3]) as usize
}

/// The sign representative of `{m, -m}` whose first nonzero entry lies in
/// `1..=(p-1)/2`. Requires odd p and a nonzero matrix.
pub(crate) fn psl2_canonical(p: u64, m: Mat2) -> Mat2 {
    let half = (p - 1) / 2;
    for &e in &m {
        if e != 0 {
            return if e <= half { m } else { neg(p, m) };
        }
    }
    unreachable!("zero matrix has no projective representative")
}

fn enumerate(p: u64, keep: impl Fn(Mat2) -> bool) -> Vec<Mat2> {
    let mut out = vec![IDENTITY];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = [a, b, c, d];
                    if m != IDENTITY && keep(m) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn enumerate_gl2(p: u64) -> Vec<Mat2> {
    enumerate(p, |m| det(p, m) != 0)
}

pub(crate) fn enumerate_sl2(p: u64) -> Vec<Mat2> {
    enumerate(p, |m| det(p, m) == 1)
}

/// Canonical sign representatives of the determinant-one matrices.
pub(crate) fn enumerate_psl2(p: u64) -> Vec<Mat2> {
    enumerate(p, |m| det(p, m) == 1 && psl2_canonical(p, m) == m)
}

/// Dense lookup from an encoded matrix to its index in an enumeration.
pub(crate) struct Mat2Index {
    p: u64,
    table: Vec<u32>,
}

impl Mat2Index {
    pub(crate) fn new(p: u64, elements: &[Mat2]) -> Self {
        let mut table = vec![u32::MAX; (p * p * p * p) as usize];
        for (i, &m) in elements.iter().enumerate() {
            table[encode(p, m)] = i as u32;
        }
        Mat2Index { p, table }
    }

    pub(crate) fn index_of(&self, m: Mat2) -> Option<usize> {
        let i = self.table[encode(self.p, m)];
        (i != u32::MAX).then_some(i as usize)
    }
}

/// A verified generating set of GL2(F_p): an upper transvection, a
/// diagonal with a primitive root, and an antidiagonal swap. Verified by
/// closing under multiplication and comparing against the group order.
pub(crate) fn gl2_generators(p: u64) -> Vec<Mat2> {
    let z = primitive_root(p);
    let gens = if p == 2 {
        vec![[1, 1, 0, 1], [0, 1, 1, 0]]
    } else {
        vec![[1, 1, 0, 1], [z, 0, 0, 1], [0, p - 1, 1, 0]]
    };
    let order = (p * p - 1) * (p * p - p);
    let mut seen = vec![false; (p * p * p * p) as usize];
    let mut stack = vec![IDENTITY];
    seen[encode(p, IDENTITY)] = true;
    let mut count = 1u64;
    while let Some(m) = stack.pop() {
        for &g in &gens {
            let n = mul(p, m, g);
            let code = encode(p, n);
            if !seen[code] {
                seen[code] = true;
                count += 1;
                stack.push(n);
            }
        }
    }
    assert_eq!(count, order, "generator set does not generate GL2(F_{p})");
    gens
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut m = p - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    'outer: for z in 2..p {
        for &q in &factors {
            if crate::linalg::mod_pow(z, (p - 1) / q, p) == 1 {
                continue 'outer;
            }
        }
        return z;
    }
    unreachable!("every prime has a primitive root")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        for p in [3u64, 5, 7] {
            assert_eq!(enumerate_gl2(p).len() as u64, (p * p - 1) * (p * p - p));
            assert_eq!(enumerate_sl2(p).len() as u64, p * (p + 1) * (p - 1));
            assert_eq!(enumerate_psl2(p).len() as u64, p * (p + 1) * (p - 1) / 2);
        }
    }

    #[test]
    fn identity_comes_first() {
        assert_eq!(enumerate_gl2(5)[0], IDENTITY);
        assert_eq!(enumerate_psl2(5)[0], IDENTITY);
    }

    #[test]
    fn inverse_round_trip() {
        let p = 7;
        for m in enumerate_gl2(p) {
            assert_eq!(mul(p, m, inv(p, m)), IDENTITY);
        }
    }

    #[test]
    fn canonical_rep_is_involution_stable() {
        let p = 5;
        for m in enumerate_sl2(p) {
            let c = psl2_canonical(p, m);
            assert_eq!(psl2_canonical(p, neg(p, m)), c);
            let lead = c.iter().copied().find(|&e| e != 0).unwrap();
            assert!(lead <= (p - 1) / 2);
        }
    }

    #[test]
    fn generators_verified() {
        for p in [2u64, 3, 5, 7, 11] {
            assert!(!gl2_generators(p).is_empty());
        }
    }
}
