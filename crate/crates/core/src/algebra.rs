//! The group algebra F_p\[G\]: convolution, two-sided ideals, ideal
//! products, perpendicular ideals, nilpotency and invariance checks.
//!
//! All operations are pure functions over immutable inputs. Ideal products
//! generate candidate vectors in parallel but merge them in a fixed order,
//! so every result is deterministic.

use rayon::prelude::*;
use thiserror::Error;

use crate::group::Group;
use crate::linalg::{check_prime, FpMatrix, FpSubspace, LinalgError, SubspaceBuilder};

/// Pairwise basis convolution is used below this many multiply-adds;
/// larger ideal products go through generators and orbit closure.
const PAIRWISE_WORK_LIMIT: u64 = 200_000_000;

/// Convolution batches move to the rayon pool above this work estimate.
const PAR_CONVOLVE_WORK: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("element does not live in F_{p}[{group}]: {detail}")]
    Mismatch { p: u64, group: String, detail: String },
    #[error("{p} does not divide the group order {order}, the sum element is not nilpotent")]
    SumElementNotNilpotent { p: u64, order: usize },
    #[error("actor {0} is not an automorphism: {1}")]
    BadActor(usize, String),
    #[error("operation requires a verified two-sided ideal")]
    NotTwoSided,
}

/// An element of F_p\[G\] as its coefficient vector in the element basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    p: u64,
    coeffs: Vec<u64>,
}

impl AlgebraElement {
    pub fn from_coeffs(p: u64, coeffs: Vec<u64>) -> Result<Self, AlgebraError> {
        check_prime(p)?;
        Ok(AlgebraElement { p, coeffs: coeffs.into_iter().map(|c| c % p).collect() })
    }

    /// The basis element delta_g.
    pub fn delta(p: u64, order: usize, g: usize) -> Result<Self, AlgebraError> {
        check_prime(p)?;
        let mut coeffs = vec![0; order];
        coeffs[g] = 1;
        Ok(AlgebraElement { p, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// A subspace of F_p\[G\] together with what has been verified about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    pub space: FpSubspace,
    pub two_sided_verified: bool,
    pub aut_invariant_verified: bool,
}

impl Ideal {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Context object tying a group to a coefficient field.
pub struct GroupAlgebra<'g> {
    group: &'g Group,
    p: u64,
    gens: Vec<usize>,
    delayed: bool,
}

impl<'g> GroupAlgebra<'g> {
    pub fn new(group: &'g Group, p: u64) -> Result<Self, AlgebraError> {
        check_prime(p)?;
        let delayed = (p - 1)
            .checked_mul(p - 1)
            .and_then(|sq| sq.checked_mul(group.order() as u64))
            .is_some();
        Ok(GroupAlgebra { group, p, gens: group.generating_set(), delayed })
    }

    pub fn group(&self) -> &Group {
        self.group
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.group.order()
    }

    pub fn zero_space(&self) -> FpSubspace {
        FpSubspace::zero(self.p, self.dim()).expect("validated prime")
    }

    pub fn full_space(&self) -> FpSubspace {
        FpSubspace::full(self.p, self.dim()).expect("validated prime")
    }

    pub fn full_ideal(&self) -> Ideal {
        Ideal { space: self.full_space(), two_sided_verified: true, aut_invariant_verified: true }
    }

    fn check_element(&self, x: &AlgebraElement) -> Result<(), AlgebraError> {
        if x.p != self.p || x.coeffs.len() != self.dim() {
            return Err(AlgebraError::Mismatch {
                p: self.p,
                group: self.group.name().to_string(),
                detail: format!("element has p={}, length {}", x.p, x.coeffs.len()),
            });
        }
        Ok(())
    }

    fn check_space(&self, a: &FpSubspace) -> Result<(), AlgebraError> {
        if a.p() != self.p || a.ambient_dim() != self.dim() {
            return Err(AlgebraError::Mismatch {
                p: self.p,
                group: self.group.name().to_string(),
                detail: format!("subspace has p={}, ambient {}", a.p(), a.ambient_dim()),
            });
        }
        Ok(())
    }

    /// Convolution `(x*y)[g] = sum_h x[h] y[h^{-1} g]`.
    pub fn convolve(
        &self,
        x: &AlgebraElement,
        y: &AlgebraElement,
    ) -> Result<AlgebraElement, AlgebraError> {
        self.check_element(x)?;
        self.check_element(y)?;
        Ok(AlgebraElement { p: self.p, coeffs: self.convolve_raw(&x.coeffs, &y.coeffs) })
    }

    fn convolve_raw(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.dim();
        let p = self.p;
        let mut out = vec![0u64; n];
        if self.delayed {
            for (h, &xh) in x.iter().enumerate() {
                if xh == 0 {
                    continue;
                }
                for (k, &yk) in y.iter().enumerate() {
                    if yk != 0 {
                        out[self.group.mul(h, k)] += xh * yk;
                    }
                }
            }
            for e in out.iter_mut() {
                *e %= p;
            }
        } else {
            for (h, &xh) in x.iter().enumerate() {
                if xh == 0 {
                    continue;
                }
                for (k, &yk) in y.iter().enumerate() {
                    if yk != 0 {
                        let t = &mut out[self.group.mul(h, k)];
                        *t = (*t + xh * yk % p) % p;
                    }
                }
            }
        }
        out
    }

    /// Coefficient vector of `g . x` (left translation).
    fn left_translate(&self, g: usize, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; x.len()];
        for (h, &c) in x.iter().enumerate() {
            if c != 0 {
                out[self.group.mul(g, h)] = c;
            }
        }
        out
    }

    fn right_translate(&self, x: &[u64], g: usize) -> Vec<u64> {
        let mut out = vec![0u64; x.len()];
        for (h, &c) in x.iter().enumerate() {
            if c != 0 {
                out[self.group.mul(h, g)] = c;
            }
        }
        out
    }

    /// Span of all pairwise convolutions of basis vectors, inserted
    /// incrementally with an early exit at full ambient dimension.
    ///
    /// When one factor is the whole algebra the span equals the one-sided
    /// orbit closure of the other factor under translation, which is the
    /// same subspace computed without the quadratic convolution pass.
    pub fn subspace_product(
        &self,
        a: &FpSubspace,
        b: &FpSubspace,
    ) -> Result<FpSubspace, AlgebraError> {
        self.check_space(a)?;
        self.check_space(b)?;
        if a.is_zero() || b.is_zero() {
            return Ok(self.zero_space());
        }
        if a.is_full() {
            let mut builder = SubspaceBuilder::new(self.p, self.dim())?;
            self.orbit_close(&mut builder, b.basis().to_vec(), true, false);
            return Ok(builder.finish());
        }
        if b.is_full() {
            let mut builder = SubspaceBuilder::new(self.p, self.dim())?;
            self.orbit_close(&mut builder, a.basis().to_vec(), false, true);
            return Ok(builder.finish());
        }
        let mut builder = SubspaceBuilder::new(self.p, self.dim())?;
        'outer: for row_a in a.basis() {
            let products = self.convolve_batch(row_a, b.basis());
            for v in products {
                builder.insert(&v);
                if builder.is_full() {
                    break 'outer;
                }
            }
        }
        Ok(builder.finish())
    }

    fn convolve_batch(&self, row_a: &[u64], rows_b: &[Vec<u64>]) -> Vec<Vec<u64>> {
        if rows_b.len() * self.dim() * self.dim() >= PAR_CONVOLVE_WORK {
            rows_b.par_iter().map(|row_b| self.convolve_raw(row_a, row_b)).collect()
        } else {
            rows_b.iter().map(|row_b| self.convolve_raw(row_a, row_b)).collect()
        }
    }

    /// Close a growing subspace under translation by group generators on
    /// the requested sides. Linearity means closing a spanning set under
    /// the generators closes the whole subspace under the whole group.
    fn orbit_close(
        &self,
        builder: &mut SubspaceBuilder,
        seed: Vec<Vec<u64>>,
        left: bool,
        right: bool,
    ) {
        let mut work: Vec<Vec<u64>> = Vec::new();
        for v in seed {
            if let Some(row) = builder.insert(&v) {
                work.push(row);
            }
        }
        while let Some(v) = work.pop() {
            if builder.is_full() {
                return;
            }
            for &g in &self.gens {
                if left {
                    if let Some(row) = builder.insert(&self.left_translate(g, &v)) {
                        work.push(row);
                    }
                }
                if right {
                    if let Some(row) = builder.insert(&self.right_translate(&v, g)) {
                        work.push(row);
                    }
                }
            }
        }
    }

    /// Smallest two-sided ideal containing the subspace.
    pub fn two_sided_ideal_generated(&self, a: &FpSubspace) -> Result<Ideal, AlgebraError> {
        self.check_space(a)?;
        let mut builder = SubspaceBuilder::new(self.p, self.dim())?;
        self.orbit_close(&mut builder, a.basis().to_vec(), true, true);
        Ok(Ideal {
            space: builder.finish(),
            two_sided_verified: true,
            aut_invariant_verified: false,
        })
    }

    /// Closure under generator translations on both sides is equivalent to
    /// the two-sided ideal property.
    pub fn is_two_sided(&self, a: &FpSubspace) -> Result<bool, AlgebraError> {
        self.check_space(a)?;
        let closed = |v: &Vec<u64>| {
            self.gens.iter().all(|&g| {
                a.contains_vector(&self.left_translate(g, v))
                    && a.contains_vector(&self.right_translate(v, g))
            })
        };
        if a.dim() * a.dim() * self.dim() >= 1 << 20 {
            Ok(a.basis().par_iter().all(closed))
        } else {
            Ok(a.basis().iter().all(closed))
        }
    }

    pub fn verify_ideal(&self, space: FpSubspace) -> Result<Ideal, AlgebraError> {
        if !self.is_two_sided(&space)? {
            return Err(AlgebraError::NotTwoSided);
        }
        Ok(Ideal { space, two_sided_verified: true, aut_invariant_verified: false })
    }

    /// Product of verified two-sided ideals. Small instances run the plain
    /// pairwise definition; large ones use one-sided generating sets and
    /// orbit closure, which spans the same ideal:
    /// `A.B = span{a_i * b} = closure of {a_i * b_l} under right translation`
    /// whenever the `b_l` generate B as a right ideal.
    pub fn ideal_product(&self, a: &Ideal, b: &Ideal) -> Result<Ideal, AlgebraError> {
        if !a.two_sided_verified || !b.two_sided_verified {
            return Err(AlgebraError::NotTwoSided);
        }
        let n = self.dim() as u64;
        let pairwise_work = (a.dim() as u64) * (b.dim() as u64) * n * n;
        let space = if pairwise_work <= PAIRWISE_WORK_LIMIT
            || a.space.is_full()
            || b.space.is_full()
        {
            self.subspace_product(&a.space, &b.space)?
        } else {
            let gens_b = self.one_sided_generators(&b.space, false)?;
            let mut builder = SubspaceBuilder::new(self.p, self.dim())?;
            let mut seed = Vec::new();
            for g in &gens_b {
                seed.extend(self.convolve_batch_par(a.space.basis(), g));
            }
            self.orbit_close(&mut builder, seed, false, true);
            builder.finish()
        };
        Ok(Ideal { space, two_sided_verified: true, aut_invariant_verified: false })
    }

    fn convolve_batch_par(&self, rows: &[Vec<u64>], fixed: &[u64]) -> Vec<Vec<u64>> {
        rows.par_iter().map(|r| self.convolve_raw(r, fixed)).collect()
    }

    /// A small set generating the ideal one-sidedly (as a right ideal when
    /// `left` is false). Greedy: skip basis vectors already inside the
    /// orbit closure of the picks so far.
    fn one_sided_generators(
        &self,
        space: &FpSubspace,
        left: bool,
    ) -> Result<Vec<Vec<u64>>, AlgebraError> {
        let mut gens: Vec<Vec<u64>> = Vec::new();
        let mut closure = SubspaceBuilder::new(self.p, self.dim())?;
        for v in space.basis() {
            if closure.dim() == space.dim() {
                break;
            }
            if closure.contains_vector(v) {
                continue;
            }
            gens.push(v.clone());
            self.orbit_close(&mut closure, vec![v.clone()], left, !left);
        }
        debug_assert_eq!(closure.dim(), space.dim());
        Ok(gens)
    }

    /// The one-dimensional ideal spanned by the sum of all group elements.
    /// Only constructed when p divides |G|, which is exactly when the
    /// element squares to zero; the square is checked by convolution.
    pub fn sum_element_ideal(&self) -> Result<Ideal, AlgebraError> {
        let n = self.dim();
        if !(n as u64).is_multiple_of(self.p) {
            return Err(AlgebraError::SumElementNotNilpotent { p: self.p, order: n });
        }
        let ones = vec![1u64; n];
        let square = self.convolve_raw(&ones, &ones);
        assert!(
            square.iter().all(|&c| c == 0),
            "sum element must square to zero when p divides |G|"
        );
        let space = FpSubspace::from_rows(self.p, n, vec![ones])?;
        assert!(self.is_two_sided(&space)?, "sum element spans a two-sided ideal");
        // the basis vector is constant, so every relabeling of coordinates
        // fixes it; invariance holds for arbitrary automorphisms
        Ok(Ideal { space, two_sided_verified: true, aut_invariant_verified: true })
    }

    /// The two-sided ideal `{x : xI = Ix = 0}`, computed two ways: as the
    /// annihilator system and as the orthogonal complement under the
    /// coefficient-of-1 pairing `<x,y> = sum_g x[g] y[g^{-1}]`. The two
    /// must coincide with dim |G| - dim I; a mismatch is an internal bug.
    pub fn perp(&self, ideal: &Ideal) -> Result<Ideal, AlgebraError> {
        if !ideal.two_sided_verified {
            return Err(AlgebraError::NotTwoSided);
        }
        self.check_space(&ideal.space)?;
        let n = self.dim();
        let p = self.p;
        let basis = ideal.space.basis();

        // annihilator route: rows of (x*b)[g] and (b*x)[g] as linear forms in x
        let mut rows = Vec::with_capacity(2 * basis.len() * n);
        for b in basis {
            for g in 0..n {
                // (x*b)[g] = sum_h x[h] b[h^{-1} g]
                rows.push((0..n).map(|h| b[self.group.mul(self.group.inv(h), g)]).collect());
            }
            for g in 0..n {
                // (b*x)[g] = sum_h b[g h^{-1}] x[h]
                rows.push((0..n).map(|h| b[self.group.mul(g, self.group.inv(h))]).collect());
            }
        }
        let annihilator = crate::linalg::nullspace(&FpMatrix::from_rows(p, n, rows)?);

        // pairing route
        let pairing_rows: Vec<Vec<u64>> = basis
            .iter()
            .map(|b| (0..n).map(|g| b[self.group.inv(g)]).collect())
            .collect();
        let pairing = crate::linalg::nullspace(&FpMatrix::from_rows(p, n, pairing_rows)?);

        assert_eq!(
            annihilator, pairing,
            "annihilator and pairing complements disagree; internal error"
        );
        assert_eq!(
            annihilator.dim(),
            n - ideal.dim(),
            "perpendicular ideal has wrong dimension; internal error"
        );
        assert!(self.is_two_sided(&annihilator)?, "perpendicular of a two-sided ideal");
        Ok(Ideal {
            space: annihilator,
            two_sided_verified: true,
            // the pairing commutes with every multiplication-preserving
            // relabeling, so invariance carries over from the input
            aut_invariant_verified: ideal.aut_invariant_verified,
        })
    }

    pub fn is_nilpotent_square(&self, a: &FpSubspace) -> Result<bool, AlgebraError> {
        Ok(self.subspace_product(a, a)?.is_zero())
    }

    pub fn is_nilpotent_cube(&self, a: &FpSubspace) -> Result<bool, AlgebraError> {
        let square = self.subspace_product(a, a)?;
        Ok(self.subspace_product(&square, a)?.is_zero())
    }

    /// True iff every actor's induced coordinate permutation maps the
    /// subspace into itself. Each actor must be an automorphism, given as
    /// an element permutation; this is validated first.
    pub fn conjugation_invariant(
        &self,
        a: &FpSubspace,
        actors: &[Vec<u32>],
    ) -> Result<bool, AlgebraError> {
        self.check_space(a)?;
        let n = self.dim();
        for (idx, actor) in actors.iter().enumerate() {
            validate_automorphism(self.group, actor)
                .map_err(|e| AlgebraError::BadActor(idx, e))?;
            for v in a.basis() {
                let mut moved = vec![0u64; n];
                for (g, &c) in v.iter().enumerate() {
                    if c != 0 {
                        moved[actor[g] as usize] = c;
                    }
                }
                if !a.contains_vector(&moved) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The element permutations induced by conjugation with each group
    /// generator. Two-sided ideals are always invariant under these.
    pub fn inner_actors(&self) -> Vec<Vec<u32>> {
        self.gens
            .iter()
            .map(|&a| {
                (0..self.dim()).map(|x| self.group.conjugate(x, a) as u32).collect()
            })
            .collect()
    }
}

fn validate_automorphism(group: &Group, actor: &[u32]) -> Result<(), String> {
    let n = group.order();
    if actor.len() != n {
        return Err(format!("permutation length {} vs order {n}", actor.len()));
    }
    let mut seen = vec![false; n];
    for &t in actor {
        let t = t as usize;
        if t >= n || seen[t] {
            return Err("not a bijection".into());
        }
        seen[t] = true;
    }
    if actor[Group::IDENTITY] != Group::IDENTITY as u32 {
        return Err("does not fix the identity".into());
    }
    for x in 0..n {
        for y in 0..n {
            if actor[group.mul(x, y)] != group.mul(actor[x] as usize, actor[y] as usize) as u32 {
                return Err(format!("does not preserve multiplication at ({x}, {y})"));
            }
        }
    }
    Ok(())
}
