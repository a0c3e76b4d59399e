//! Vectors in F_q^d under the form `|x| = sum x_i^2`: dot products,
//! distances, spreads and k-spreads, affine lines, spheres and orthogonal
//! matrices.
//!
//! Spreads always take the apex first: `spread(a, b, c)` measures the
//! difference vectors `b - a` and `c - a`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::ff::{FieldDesc, Felt};
use crate::linalg::Matrix;
use crate::pointset::PointSet;

/// A point or vector of F_q^d.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FVector(Vec<Felt>);

impl FVector {
    pub fn new(coords: Vec<Felt>) -> Self {
        FVector(coords)
    }

    pub fn from_indices(fd: &FieldDesc, idx: &[u32]) -> Result<Self> {
        idx.iter()
            .map(|&i| fd.elem(i as u64))
            .collect::<Result<Vec<_>>>()
            .map(FVector)
    }

    pub fn zero(d: usize) -> Self {
        FVector(vec![Felt::ZERO; d])
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = Self::zero(d);
        v.0[i] = Felt::ONE;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[Felt] {
        &self.0
    }

    pub fn indices(&self) -> Vec<u32> {
        self.0.iter().map(|c| c.index()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, fd: &FieldDesc, other: &FVector) -> FVector {
        FVector(self.0.iter().zip(&other.0).map(|(&a, &b)| fd.add(a, b)).collect())
    }

    pub fn sub(&self, fd: &FieldDesc, other: &FVector) -> FVector {
        FVector(self.0.iter().zip(&other.0).map(|(&a, &b)| fd.sub(a, b)).collect())
    }

    pub fn scale(&self, fd: &FieldDesc, s: Felt) -> FVector {
        FVector(self.0.iter().map(|&a| fd.mul(s, a)).collect())
    }

    /// Appends zero coordinates up to dimension `d`.
    pub fn embed(&self, d: usize) -> FVector {
        let mut c = self.0.clone();
        c.resize(d.max(self.dim()), Felt::ZERO);
        FVector(c)
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A spread, or `Undefined` when a denominator norm vanishes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum SpreadValue {
    Undefined,
    Value(Felt),
}

impl SpreadValue {
    pub fn value(self) -> Option<Felt> {
        match self {
            SpreadValue::Undefined => None,
            SpreadValue::Value(v) => Some(v),
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, SpreadValue::Value(_))
    }
}

impl fmt::Display for SpreadValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpreadValue::Undefined => f.write_str("Undefined"),
            SpreadValue::Value(v) => write!(f, "Value({v})"),
        }
    }
}

/// Canonical form of an affine line: the direction's first nonzero
/// coordinate is 1 and the base point is zero at that position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonLine {
    pub base: FVector,
    pub dir: FVector,
}

impl CanonLine {
    pub fn contains(&self, fd: &FieldDesc, x: &FVector) -> bool {
        let j = pivot(&self.dir).expect("canonical direction is nonzero");
        // x = base + t*dir forces t = x_j
        let t = x.coords()[j];
        self.base.add(fd, &self.dir.scale(fd, t)) == *x
    }
}

/// A d x d matrix with `M^T M = I`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrthoMatrix(Matrix);

impl OrthoMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn apply(&self, fd: &FieldDesc, v: &FVector) -> Result<FVector> {
        self.0.apply(fd, v)
    }

    pub fn is_orthogonal(&self, fd: &FieldDesc) -> bool {
        let n = self.0.rows();
        self.0
            .transpose()
            .mul(fd, &self.0)
            .is_ok_and(|m| m == Matrix::identity(n))
    }
}

fn same_dim(u: &FVector, v: &FVector) -> Result<()> {
    if u.dim() == v.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        })
    }
}

#[inline]
pub(crate) fn dot_unchecked(fd: &FieldDesc, u: &[Felt], v: &[Felt]) -> Felt {
    u.iter()
        .zip(v)
        .fold(Felt::ZERO, |acc, (&a, &b)| fd.add(acc, fd.mul(a, b)))
}

pub fn dot(fd: &FieldDesc, u: &FVector, v: &FVector) -> Result<Felt> {
    same_dim(u, v)?;
    Ok(dot_unchecked(fd, u.coords(), v.coords()))
}

pub fn norm(fd: &FieldDesc, v: &FVector) -> Felt {
    dot_unchecked(fd, v.coords(), v.coords())
}

pub fn dist(fd: &FieldDesc, x: &FVector, y: &FVector) -> Result<Felt> {
    same_dim(x, y)?;
    Ok(norm(fd, &x.sub(fd, y)))
}

/// Spread between difference vectors `u` and `v` (already based at the apex).
pub fn spread_of_vectors(fd: &FieldDesc, u: &FVector, v: &FVector) -> Result<SpreadValue> {
    same_dim(u, v)?;
    let (nu, nv) = (norm(fd, u), norm(fd, v));
    if nu.is_zero() || nv.is_zero() {
        return Ok(SpreadValue::Undefined);
    }
    let uv = dot_unchecked(fd, u.coords(), v.coords());
    let ratio = fd.div(fd.square(uv), fd.mul(nu, nv))?;
    Ok(SpreadValue::Value(fd.sub(Felt::ONE, ratio)))
}

/// `1 - ((b-a).(c-a))^2 / (|b-a| |c-a|)` with apex `a`.
pub fn spread(fd: &FieldDesc, a: &FVector, b: &FVector, c: &FVector) -> Result<SpreadValue> {
    same_dim(a, b)?;
    same_dim(a, c)?;
    spread_of_vectors(fd, &b.sub(fd, a), &c.sub(fd, a))
}

/// Higher-order spread of `k + 1` points: `det(V^T V) / prod |v_i|` with
/// columns `v_i = x_{i+1} - x_1`.
pub fn k_spread(fd: &FieldDesc, points: &[FVector]) -> Result<SpreadValue> {
    if points.len() < 3 {
        return Err(Error::BadArity(format!(
            "k-spread needs k+1 >= 3 points, got {}",
            points.len()
        )));
    }
    let d = points[0].dim();
    for x in points {
        same_dim(&points[0], x)?;
    }
    let k = points.len() - 1;
    if k > d {
        return Err(Error::BadArity(format!("k = {k} exceeds dimension {d}")));
    }
    let diffs: Vec<FVector> = points[1..].iter().map(|x| x.sub(fd, &points[0])).collect();
    let mut denom = Felt::ONE;
    for v in &diffs {
        let n = norm(fd, v);
        if n.is_zero() {
            return Ok(SpreadValue::Undefined);
        }
        denom = fd.mul(denom, n);
    }
    let mut gram = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let g = dot_unchecked(fd, diffs[i].coords(), diffs[j].coords());
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    Ok(SpreadValue::Value(fd.div(gram.det(fd)?, denom)?))
}

fn pivot(v: &FVector) -> Option<usize> {
    v.coords().iter().position(|c| !c.is_zero())
}

/// Canonical direction of a nonzero vector: scaled so the first nonzero
/// coordinate is 1.
pub fn canonical_direction(fd: &FieldDesc, v: &FVector) -> Option<FVector> {
    let j = pivot(v)?;
    let s = fd.inv(v.coords()[j]).ok()?;
    Some(v.scale(fd, s))
}

pub fn line_through(fd: &FieldDesc, p: &FVector, q: &FVector) -> Result<CanonLine> {
    same_dim(p, q)?;
    let dir = canonical_direction(fd, &q.sub(fd, p)).ok_or(Error::IdenticalPoints)?;
    let j = pivot(&dir).expect("canonical direction is nonzero");
    let base = p.sub(fd, &dir.scale(fd, p.coords()[j]));
    Ok(CanonLine { base, dir })
}

/// Point of F_q^d with the given lexicographic index (first coordinate most
/// significant).
pub fn point_from_index(fd: &FieldDesc, d: usize, mut idx: u64) -> FVector {
    let q = fd.q() as u64;
    let mut c = vec![Felt::ZERO; d];
    for slot in c.iter_mut().rev() {
        *slot = fd.elem(idx % q).expect("digit below q");
        idx /= q;
    }
    FVector(c)
}

/// Every point of F_q^d in lexicographic order.
pub fn all_points(fd: &FieldDesc, d: usize, budget: Budget) -> Result<Vec<FVector>> {
    let total = (fd.q() as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    budget.check("point enumeration", total)?;
    Ok((0..total as u64).map(|i| point_from_index(fd, d, i)).collect())
}

/// All `x` with `|x| = t`, in lexicographic order.
pub fn sphere_points(fd: &FieldDesc, d: usize, t: Felt, budget: Budget) -> Result<PointSet> {
    let pts = all_points(fd, d, budget)?
        .into_iter()
        .filter(|x| norm(fd, x) == t)
        .collect();
    Ok(PointSet::from_distinct(fd.clone(), d, pts))
}

fn reflection(fd: &FieldDesc, v: &FVector) -> Matrix {
    let d = v.dim();
    let two_over_norm = fd
        .div(fd.from_i64(2), norm(fd, v))
        .expect("reflection vector is anisotropic");
    let mut h = Matrix::identity(d);
    for i in 0..d {
        for j in 0..d {
            let t = fd.mul(two_over_norm, fd.mul(v.coords()[i], v.coords()[j]));
            h[(i, j)] = fd.sub(h[(i, j)], t);
        }
    }
    h
}

pub(crate) fn random_vector<R: Rng>(fd: &FieldDesc, d: usize, rng: &mut R) -> FVector {
    FVector(
        (0..d)
            .map(|_| fd.elem(rng.gen_range(0..fd.q() as u64)).unwrap())
            .collect(),
    )
}

/// Product of `d + 2` seeded random reflections.
pub fn random_orthogonal(fd: &FieldDesc, d: usize, seed: u64) -> OrthoMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Matrix::identity(d);
    for _ in 0..d + 2 {
        let v = loop {
            let v = random_vector(fd, d, &mut rng);
            if !norm(fd, &v).is_zero() {
                break v;
            }
        };
        m = reflection(fd, &v).mul(fd, &m).expect("square matrices");
    }
    OrthoMatrix(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldDesc {
        FieldDesc::new(p, 1).unwrap()
    }

    fn v(fd: &FieldDesc, c: &[u32]) -> FVector {
        FVector::from_indices(fd, c).unwrap()
    }

    #[test]
    fn dot_norm_dist_examples() {
        let f5 = f(5);
        assert_eq!(dot(&f5, &v(&f5, &[1, 2]), &v(&f5, &[3, 4])).unwrap(), Felt::ONE);
        assert_eq!(dot(&f5, &FVector::zero(2), &v(&f5, &[3, 4])).unwrap(), Felt::ZERO);
        assert_eq!(norm(&f5, &v(&f5, &[1, 2])), Felt::ZERO);
        assert_eq!(norm(&f5, &v(&f5, &[1, 0])), Felt::ONE);
        let f3 = f(3);
        assert_eq!(norm(&f3, &v(&f3, &[1, 1, 1])), Felt::ZERO);
        let o = FVector::zero(2);
        assert_eq!(dist(&f5, &o, &o).unwrap(), Felt::ZERO);
        assert_eq!(dist(&f5, &o, &v(&f5, &[1, 0])).unwrap(), Felt::ONE);
        assert_eq!(dist(&f5, &o, &v(&f5, &[1, 2])).unwrap(), Felt::ZERO);
        assert!(matches!(
            dot(&f5, &FVector::zero(2), &FVector::zero(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spread_examples() {
        let f5 = f(5);
        let o = FVector::zero(2);
        let s = |b: &[u32], c: &[u32]| spread(&f5, &o, &v(&f5, b), &v(&f5, c)).unwrap();
        assert_eq!(s(&[1, 0], &[0, 1]), SpreadValue::Value(Felt::ONE));
        assert_eq!(s(&[1, 1], &[2, 2]), SpreadValue::Value(Felt::ZERO));
        assert_eq!(s(&[1, 2], &[0, 1]), SpreadValue::Undefined);
        // b = a makes an arm zero
        assert_eq!(s(&[0, 0], &[0, 1]), SpreadValue::Undefined);
        assert_eq!(SpreadValue::Value(Felt::ONE).to_string(), "Value(1)");
    }

    #[test]
    fn k_spread_examples() {
        let f5 = f(5);
        let pts = [
            FVector::zero(3),
            FVector::unit(3, 0),
            FVector::unit(3, 1),
            FVector::unit(3, 2),
        ];
        assert_eq!(k_spread(&f5, &pts).unwrap(), SpreadValue::Value(Felt::ONE));

        // x4 - x1 = (1,1,0) = e1 + e2 with norm 2
        let dep = [
            FVector::zero(3),
            FVector::unit(3, 0),
            FVector::unit(3, 1),
            v(&f5, &[1, 1, 0]),
        ];
        assert_eq!(k_spread(&f5, &dep).unwrap(), SpreadValue::Value(Felt::ZERO));

        assert!(matches!(k_spread(&f5, &pts[..2]), Err(Error::BadArity(_))));
        let too_many = [pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone(), v(&f5, &[2, 2, 2])];
        assert!(matches!(k_spread(&f5, &too_many), Err(Error::BadArity(_))));
    }

    #[test]
    fn line_examples() {
        let f5 = f(5);
        let l = line_through(&f5, &v(&f5, &[0, 0]), &v(&f5, &[2, 4])).unwrap();
        assert_eq!((l.dir, l.base), (v(&f5, &[1, 2]), v(&f5, &[0, 0])));
        let l = line_through(&f5, &v(&f5, &[1, 1]), &v(&f5, &[1, 3])).unwrap();
        assert_eq!((l.dir.clone(), l.base.clone()), (v(&f5, &[0, 1]), v(&f5, &[1, 0])));
        assert!(l.contains(&f5, &v(&f5, &[1, 4])));
        assert!(!l.contains(&f5, &v(&f5, &[2, 4])));
        assert_eq!(
            line_through(&f5, &v(&f5, &[1, 1]), &v(&f5, &[1, 1])).unwrap_err(),
            Error::IdenticalPoints
        );
    }

    #[test]
    fn sphere_examples() {
        let f5 = f(5);
        let s = sphere_points(&f5, 2, Felt::ONE, Budget::DEFAULT).unwrap();
        let expected: Vec<FVector> = [[0, 1], [0, 4], [1, 0], [4, 0]]
            .iter()
            .map(|c| v(&f5, c))
            .collect();
        assert_eq!(s.points(), &expected[..]);
        assert_eq!(sphere_points(&f5, 2, Felt::ZERO, Budget::DEFAULT).unwrap().len(), 9);
        let f3 = f(3);
        let iso = sphere_points(&f3, 3, Felt::ZERO, Budget::DEFAULT).unwrap();
        assert!(iso.points().contains(&v(&f3, &[1, 1, 1])));
        assert!(matches!(
            sphere_points(&f5, 12, Felt::ONE, Budget::DEFAULT),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn orthogonal_sampler() {
        for p in [3, 5, 7, 13] {
            let fd = f(p);
            for d in 1..=4 {
                for seed in 0..10 {
                    let m = random_orthogonal(&fd, d, seed);
                    assert!(m.is_orthogonal(&fd));
                }
            }
            let m1 = random_orthogonal(&fd, 1, 3).matrix()[(0, 0)];
            assert!(m1 == Felt::ONE || m1 == fd.minus_one());
        }
        let f5 = f(5);
        assert_eq!(random_orthogonal(&f5, 2, 42), random_orthogonal(&f5, 2, 42));
    }

    #[test]
    fn mirrored_lines_share_a_spread() {
        let f5 = f(5);
        let (o, a) = (FVector::zero(2), v(&f5, &[1, 0]));
        let s1 = spread(&f5, &o, &a, &v(&f5, &[1, 1])).unwrap();
        let s2 = spread(&f5, &o, &a, &v(&f5, &[1, 4])).unwrap();
        assert_eq!(s1, SpreadValue::Value(f5.elem(3).unwrap()));
        assert_eq!(s1, s2);
    }
}
