//! Totally isotropic subspaces and the point sets built from them.
//!
//! A span of `d/2` mutually orthogonal isotropic vectors has every
//! difference vector isotropic, so it determines no spread at all. Adding the
//! last basis vector in odd dimension gives a set of size `q^((d+1)/2)`
//! with a single spread value.

use crate::error::{Budget, Error, Result};
use crate::ff::{FieldDesc, Felt};
use crate::geom::{self, FVector};
use crate::linalg;
use crate::pointset::PointSet;

/// Mutually orthogonal, linearly independent isotropic vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicFamily {
    vectors: Vec<FVector>,
}

impl IsotropicFamily {
    /// Checks all three invariants before accepting the vectors.
    pub fn new(fd: &FieldDesc, vectors: Vec<FVector>) -> Result<Self> {
        let fam = IsotropicFamily { vectors };
        fam.verify(fd)?;
        Ok(fam)
    }

    pub fn vectors(&self) -> &[FVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn verify(&self, fd: &FieldDesc) -> Result<()> {
        for (i, u) in self.vectors.iter().enumerate() {
            if !geom::norm(fd, u).is_zero() {
                return Err(Error::Internal(format!("vector {u} is not isotropic")));
            }
            for w in &self.vectors[i + 1..] {
                if !geom::dot(fd, u, w)?.is_zero() {
                    return Err(Error::Internal(format!("{u} and {w} are not orthogonal")));
                }
            }
        }
        if linalg::rank(fd, &self.vectors)? != self.vectors.len() {
            return Err(Error::DependentInput);
        }
        Ok(())
    }
}

/// `d/2` vectors `(1, i)` in consecutive coordinate pairs, `i = sqrt(-1)`.
pub fn iso_family_1mod4(fd: &FieldDesc, d: usize) -> Result<IsotropicFamily> {
    if fd.q_mod4() != 1 {
        return Err(Error::BadResidue { q: fd.q() });
    }
    if d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    if d == 0 {
        return Err(Error::BadDimension {
            d,
            reason: "need d >= 2".into(),
        });
    }
    let i = fd.sqrt(fd.minus_one())?;
    let vectors = (0..d / 2)
        .map(|j| {
            let mut c = vec![Felt::ZERO; d];
            c[2 * j] = Felt::ONE;
            c[2 * j + 1] = i;
            FVector::new(c)
        })
        .collect();
    IsotropicFamily::new(fd, vectors)
}

/// Lexicographically least `(a, b, c)` with `a != 0` and `a^2 + b^2 + c^2 = 0`.
pub fn least_isotropic_triple(fd: &FieldDesc) -> Result<[Felt; 3]> {
    for a in fd.elements().skip(1) {
        for b in fd.elements() {
            for c in fd.elements() {
                let n = fd.add(fd.add(fd.square(a), fd.square(b)), fd.square(c));
                if n.is_zero() {
                    return Ok([a, b, c]);
                }
            }
        }
    }
    Err(Error::Internal("no isotropic triple found".into()))
}

/// Blocks `(a, b, c, 0)` and `(0, -c, b, a)` repeated over `d/4` groups of
/// four coordinates.
pub fn iso_family_3mod4(fd: &FieldDesc, d: usize) -> Result<IsotropicFamily> {
    if fd.q_mod4() != 3 {
        return Err(Error::BadResidue { q: fd.q() });
    }
    if !d.is_multiple_of(4) || d == 0 {
        return Err(Error::BadDimension {
            d,
            reason: "q = 3 mod 4 needs d = 0 mod 4".into(),
        });
    }
    let [a, b, c] = least_isotropic_triple(fd)?;
    let mut vectors = Vec::with_capacity(d / 2);
    for blk in 0..d / 4 {
        let o = 4 * blk;
        let mut v1 = vec![Felt::ZERO; d];
        v1[o..o + 3].copy_from_slice(&[a, b, c]);
        let mut v2 = vec![Felt::ZERO; d];
        v2[o + 1..o + 4].copy_from_slice(&[fd.neg(c), b, a]);
        vectors.push(FVector::new(v1));
        vectors.push(FVector::new(v2));
    }
    IsotropicFamily::new(fd, vectors)
}

/// The family of `d/2` vectors matching the residue of `q`.
pub fn iso_family(fd: &FieldDesc, d: usize) -> Result<IsotropicFamily> {
    if fd.q_mod4() == 1 {
        iso_family_1mod4(fd, d)
    } else {
        iso_family_3mod4(fd, d)
    }
}

/// All `q^m` linear combinations, coefficients in lexicographic order.
pub fn span(fd: &FieldDesc, d: usize, vectors: &[FVector], budget: Budget) -> Result<PointSet> {
    for v in vectors {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.dim(),
            });
        }
    }
    if linalg::rank(fd, vectors)? != vectors.len() {
        return Err(Error::DependentInput);
    }
    let m = vectors.len();
    let total = (fd.q() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    budget.check("span enumeration", total)?;
    let points = (0..total as u64)
        .map(|idx| {
            let coeffs = geom::point_from_index(fd, m, idx);
            coeffs
                .coords()
                .iter()
                .zip(vectors)
                .fold(FVector::zero(d), |acc, (&c, v)| acc.add(fd, &v.scale(fd, c)))
        })
        .collect();
    Ok(PointSet::from_distinct(fd.clone(), d, points))
}

/// Span of a `d/2`-dimensional totally isotropic subspace; size `q^(d/2)`
/// and no defined spread.
pub fn con1_set(fd: &FieldDesc, d: usize, budget: Budget) -> Result<PointSet> {
    let fam = iso_family(fd, d)?;
    span(fd, d, fam.vectors(), budget)
}

/// Isotropic family in the first `d - 1` coordinates plus `e_d`; size
/// `q^((d+1)/2)` and at most one defined spread value.
pub fn con2_set(fd: &FieldDesc, d: usize, budget: Budget) -> Result<PointSet> {
    if d.is_multiple_of(2) || d < 3 {
        return Err(Error::BadDimension {
            d,
            reason: "needs odd d >= 3".into(),
        });
    }
    if fd.q_mod4() == 3 && d % 4 != 1 {
        return Err(Error::BadResidue { q: fd.q() });
    }
    let fam = iso_family(fd, d - 1)?;
    let mut vectors: Vec<FVector> = fam.vectors().iter().map(|v| v.embed(d)).collect();
    vectors.push(FVector::unit(d, d - 1));
    span(fd, d, &vectors, budget)
}
