//! Exhaustive counting over point sets: distinct spreads and distances,
//! spanned lines, spread occurrences, projection collisions, the isotropic
//! triple search and the spread/distance equivalence check on unit spheres.
//!
//! Triple and pair sweeps split the outer index across rayon workers; every
//! worker accumulates a local set or count and the merge is associative, so
//! results do not depend on the number of threads.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::IsotropicFamily;
use crate::error::{Budget, Error, Result};
use crate::ff::{FieldDesc, Felt};
use crate::geom::{self, dot_unchecked, FVector};
use crate::linalg::{self, Matrix};
use crate::pointset::PointSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpreadCensus {
    pub defined_values: Vec<Felt>,
    pub defined_count: usize,
    pub undefined_triples: u64,
    pub triples_scanned: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceCensus {
    pub with_zero: Vec<Felt>,
    pub nonzero: Vec<Felt>,
    pub pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineCensus {
    pub lines: usize,
    pub max_degree: usize,
}

/// Full-rank k x d linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    matrix: Matrix,
}

impl Projection {
    pub fn new(fd: &FieldDesc, matrix: Matrix) -> Result<Self> {
        if matrix.rank(fd) != matrix.rows() {
            return Err(Error::InvalidParameter("projection must have full row rank".into()));
        }
        Ok(Projection { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn d(&self) -> usize {
        self.matrix.cols()
    }

    pub fn apply(&self, fd: &FieldDesc, x: &FVector) -> Result<FVector> {
        self.matrix.apply(fd, x)
    }
}

fn need_points(ps: &PointSet, needed: usize) -> Result<()> {
    if ps.len() < needed {
        Err(Error::TooFewPoints {
            needed,
            got: ps.len(),
        })
    } else {
        Ok(())
    }
}

fn ordered_triples(n: usize) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) * n.saturating_sub(2)
}

/// Calls `visit` with the spread (or `None` if undefined) of every ordered
/// triple with apex `a` and distinct arms.
fn visit_apex(fd: &FieldDesc, pts: &[FVector], a: usize, mut visit: impl FnMut(Option<Felt>)) {
    let apex = &pts[a];
    let diffs: Vec<FVector> = pts.iter().map(|x| x.sub(fd, apex)).collect();
    let inv_norms: Vec<Option<Felt>> = diffs
        .iter()
        .map(|v| fd.inv(geom::norm(fd, v)).ok())
        .collect();
    for b in 0..pts.len() {
        if b == a {
            continue;
        }
        for c in 0..pts.len() {
            if c == a || c == b {
                continue;
            }
            match (inv_norms[b], inv_norms[c]) {
                (Some(ib), Some(ic)) => {
                    let uv = dot_unchecked(fd, diffs[b].coords(), diffs[c].coords());
                    let ratio = fd.mul(fd.square(uv), fd.mul(ib, ic));
                    visit(Some(fd.sub(Felt::ONE, ratio)));
                }
                _ => visit(None),
            }
        }
    }
}

/// Every ordered triple of distinct points, apex first.
pub fn distinct_spreads(ps: &PointSet, budget: Budget) -> Result<SpreadCensus> {
    need_points(ps, 3)?;
    let scanned = ordered_triples(ps.len());
    budget.check("spread census", scanned)?;
    let fd = ps.field();
    let q = fd.q() as usize;
    let pts = ps.points();
    let (seen, undefined) = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut seen = vec![false; q];
            let mut undefined = 0u64;
            visit_apex(fd, pts, a, |s| match s {
                Some(v) => seen[v.index() as usize] = true,
                None => undefined += 1,
            });
            (seen, undefined)
        })
        .reduce(
            || (vec![false; q], 0),
            |(mut s1, u1), (s2, u2)| {
                s1.iter_mut().zip(s2).for_each(|(x, y)| *x |= y);
                (s1, u1 + u2)
            },
        );
    let defined_values: Vec<Felt> = seen
        .iter()
        .enumerate()
        .filter(|(_, &hit)| hit)
        .map(|(i, _)| fd.elem(i as u64).expect("index below q"))
        .collect();
    Ok(SpreadCensus {
        defined_count: defined_values.len(),
        defined_values,
        undefined_triples: undefined,
        triples_scanned: scanned as u64,
    })
}

/// Number of ordered triples whose spread equals `gamma`.
pub fn spread_occurrences(ps: &PointSet, gamma: Felt, budget: Budget) -> Result<u64> {
    need_points(ps, 3)?;
    budget.check("spread occurrences", ordered_triples(ps.len()))?;
    let (fd, pts) = (ps.field(), ps.points());
    Ok((0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut hits = 0u64;
            visit_apex(fd, pts, a, |s| hits += (s == Some(gamma)) as u64);
            hits
        })
        .sum())
}

/// Distances over unordered pairs of distinct points.
pub fn distinct_distances(ps: &PointSet) -> Result<DistanceCensus> {
    need_points(ps, 2)?;
    let fd = ps.field();
    let q = fd.q() as usize;
    let pts = ps.points();
    let seen = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut seen = vec![false; q];
            for y in &pts[i + 1..] {
                let diff = pts[i].sub(fd, y);
                seen[geom::norm(fd, &diff).index() as usize] = true;
            }
            seen
        })
        .reduce(
            || vec![false; q],
            |mut s1, s2| {
                s1.iter_mut().zip(s2).for_each(|(x, y)| *x |= y);
                s1
            },
        );
    let with_zero: Vec<Felt> = seen
        .iter()
        .enumerate()
        .filter(|(_, &hit)| hit)
        .map(|(i, _)| fd.elem(i as u64).expect("index below q"))
        .collect();
    let nonzero = with_zero.iter().copied().filter(|v| !v.is_zero()).collect();
    let n = pts.len() as u64;
    Ok(DistanceCensus {
        with_zero,
        nonzero,
        pairs: n * (n - 1) / 2,
    })
}

/// Distinct lines spanned by pairs, and the largest number of them through
/// one point of the set.
pub fn spanned_lines(ps: &PointSet, budget: Budget) -> Result<LineCensus> {
    need_points(ps, 2)?;
    let n = ps.len() as u128;
    budget.check("line census", n * (n - 1))?;
    let (fd, pts) = (ps.field(), ps.points());
    let per_point: Vec<(usize, Vec<geom::CanonLine>)> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut dirs: Vec<FVector> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, y)| geom::canonical_direction(fd, &y.sub(fd, &pts[i])).expect("distinct points"))
                .collect();
            dirs.sort_unstable();
            dirs.dedup();
            let lines = pts[i + 1..]
                .iter()
                .map(|y| geom::line_through(fd, &pts[i], y).expect("distinct points"))
                .collect();
            (dirs.len(), lines)
        })
        .collect();
    let max_degree = per_point.iter().map(|(deg, _)| *deg).max().unwrap_or(0);
    let mut lines: Vec<geom::CanonLine> = per_point.into_iter().flat_map(|(_, l)| l).collect();
    lines.par_sort_unstable();
    lines.dedup();
    Ok(LineCensus {
        lines: lines.len(),
        max_degree,
    })
}

/// Largest number of spanned lines through a single point of the set.
pub fn max_point_line_degree(ps: &PointSet, budget: Budget) -> Result<usize> {
    Ok(spanned_lines(ps, budget)?.max_degree)
}

const PROJECTION_ATTEMPTS: usize = 1000;

/// Seeded uniform k x d matrix, resampled until it has rank k.
pub fn random_projection(fd: &FieldDesc, d: usize, k: usize, seed: u64) -> Result<Projection> {
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= d, got k={k}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PROJECTION_ATTEMPTS {
        let rows: Vec<FVector> = (0..k).map(|_| geom::random_vector(fd, d, &mut rng)).collect();
        let m = Matrix::from_rows(&rows)?;
        if m.rank(fd) == k {
            return Ok(Projection { matrix: m });
        }
    }
    Err(Error::Internal(format!(
        "no full-rank projection in {PROJECTION_ATTEMPTS} attempts"
    )))
}

/// Unordered pairs of points with equal images.
pub fn collision_count(ps: &PointSet, proj: &Projection) -> Result<u64> {
    if proj.d() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: proj.d(),
            got: ps.dim(),
        });
    }
    let fd = ps.field();
    let mut buckets: HashMap<FVector, u64> = HashMap::with_capacity(ps.len());
    for x in ps.points() {
        *buckets.entry(proj.apply(fd, x)?).or_default() += 1;
    }
    Ok(buckets.values().map(|&c| c * (c - 1) / 2).sum())
}

/// Size of the image of the set under the projection.
pub fn image_size(ps: &PointSet, proj: &Projection) -> Result<usize> {
    let fd = ps.field();
    let mut img = ps
        .points()
        .iter()
        .map(|x| proj.apply(fd, x))
        .collect::<Result<Vec<_>>>()?;
    img.sort_unstable();
    img.dedup();
    Ok(img.len())
}

/// Isotropic vectors with first nonzero coordinate 1, in lexicographic order.
pub fn isotropic_representatives(fd: &FieldDesc, d: usize, budget: Budget) -> Result<Vec<FVector>> {
    Ok(geom::all_points(fd, d, budget)?
        .into_iter()
        .filter(|v| {
            v.coords().iter().find(|c| !c.is_zero()) == Some(&Felt::ONE)
                && geom::norm(fd, v).is_zero()
        })
        .collect())
}

/// First pairwise-orthogonal, linearly independent triple of isotropic
/// vectors in lexicographic order, or `None` if there is none.
///
/// Isotropy and orthogonality are invariant under scaling, so one
/// representative per projective point is searched.
pub fn search_iso_triple(fd: &FieldDesc, d: usize, budget: Budget) -> Result<Option<IsotropicFamily>> {
    let reps = isotropic_representatives(fd, d, budget)?;
    let orth = |i: usize, j: usize| dot_unchecked(fd, reps[i].coords(), reps[j].coords()).is_zero();
    let found = (0..reps.len()).into_par_iter().find_map_first(|i| {
        let nbrs: Vec<usize> = (i + 1..reps.len()).filter(|&j| orth(i, j)).collect();
        for (x, &j) in nbrs.iter().enumerate() {
            for &k in &nbrs[x + 1..] {
                if orth(j, k) {
                    let triple = vec![reps[i].clone(), reps[j].clone(), reps[k].clone()];
                    if linalg::rank(fd, &triple).ok() == Some(3) {
                        return Some(triple);
                    }
                }
            }
        }
        None
    });
    found.map(|t| IsotropicFamily::new(fd, t)).transpose()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivViolation {
    pub a: FVector,
    pub b: FVector,
    pub c: FVector,
    pub d: FVector,
    /// Quadruples sharing this violation's invariants.
    pub multiplicity: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereEquivReport {
    pub sphere_points: usize,
    pub quadruples_checked: u128,
    pub undefined_excluded: u128,
    pub violation_count: u128,
    pub violations: Vec<EquivViolation>,
}

/// Checks, over all ordered quadruples `(a, b, c, d)` of the unit sphere,
/// that `spread(0,a,b) = spread(0,c,d)` holds exactly when
/// `|a-b| = |c-d|` or `|a-b| = |c+d|`.
///
/// The predicate depends on a quadruple only through
/// `(spread(0,a,b), |a-b|)` and `(spread(0,c,d), |c-d|, |c+d|)`, so pairs
/// are grouped by those values and every class pair is checked once with
/// its multiplicity. This covers every quadruple.
pub fn sphere_equiv_check(fd: &FieldDesc, d: usize, budget: Budget) -> Result<SphereEquivReport> {
    let sphere = geom::sphere_points(fd, d, Felt::ONE, budget)?;
    let pts = sphere.points();
    let n = pts.len() as u128;
    budget.check("sphere pair sweep", n * n)?;
    let origin = FVector::zero(d);

    type Key = (Option<Felt>, Felt, Felt);
    let mut classes: BTreeMap<Key, (u128, usize, usize)> = BTreeMap::new();
    let mut undefined_pairs = 0u128;
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            let s = geom::spread(fd, &origin, a, b)?.value();
            if s.is_none() {
                undefined_pairs += 1;
                continue;
            }
            let key = (s, geom::dist(fd, a, b)?, geom::norm(fd, &a.add(fd, b)));
            classes.entry(key).or_insert((0, i, j)).0 += 1;
        }
    }
    let defined_pairs = n * n - undefined_pairs;
    let mut violations = Vec::new();
    let mut violation_count = 0u128;
    for (&(s1, d1, _), &(m1, i, j)) in &classes {
        for (&(s2, d2, plus2), &(m2, k, l)) in &classes {
            let same_spread = s1 == s2;
            let distance_match = d1 == d2 || d1 == plus2;
            if same_spread != distance_match {
                violation_count += m1 * m2;
                violations.push(EquivViolation {
                    a: pts[i].clone(),
                    b: pts[j].clone(),
                    c: pts[k].clone(),
                    d: pts[l].clone(),
                    multiplicity: m1 * m2,
                });
            }
        }
    }
    Ok(SphereEquivReport {
        sphere_points: pts.len(),
        quadruples_checked: defined_pairs * defined_pairs,
        undefined_excluded: n * n * n * n - defined_pairs * defined_pairs,
        violation_count,
        violations,
    })
}

/// The census JSON object. Fields a subcommand did not compute are null;
/// extension fields are omitted when absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CensusReport {
    pub field: String,
    pub d: usize,
    pub n_points: usize,
    pub defined_spread_values: Option<Vec<Felt>>,
    pub defined_count: Option<usize>,
    pub undefined_triples: Option<u64>,
    pub lines: Option<usize>,
    pub max_degree: Option<usize>,
    pub elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Felt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonzero_distances: Option<Vec<Felt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Felt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub occurrences: Option<u64>,
}

impl CensusReport {
    pub fn for_set(ps: &PointSet) -> Self {
        CensusReport {
            field: ps.field().spec(),
            d: ps.dim(),
            n_points: ps.len(),
            ..Default::default()
        }
    }

    pub fn with_spreads(mut self, c: &SpreadCensus) -> Self {
        self.defined_spread_values = Some(c.defined_values.clone());
        self.defined_count = Some(c.defined_count);
        self.undefined_triples = Some(c.undefined_triples);
        self
    }

    pub fn with_distances(mut self, c: &DistanceCensus) -> Self {
        self.distances = Some(c.with_zero.clone());
        self.nonzero_distances = Some(c.nonzero.clone());
        self
    }

    pub fn with_lines(mut self, c: &LineCensus) -> Self {
        self.lines = Some(c.lines);
        self.max_degree = Some(c.max_degree);
        self
    }

    pub fn with_occurrences(mut self, gamma: Felt, count: u64) -> Self {
        self.gamma = Some(gamma);
        self.occurrences = Some(count);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One value per row under a single header.
pub fn values_csv(header: &str, values: &[Felt]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([header]).expect("in-memory write");
    for v in values {
        w.write_record([v.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
