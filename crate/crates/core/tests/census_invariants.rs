use fqspread::census::{self, CensusReport};
use fqspread::construct;
use fqspread::expt::{self, sample_subset};
use fqspread::geom::{self, FVector};
use fqspread::{Budget, FieldDesc, PointSet, Rational};

const B: Budget = Budget::DEFAULT;

fn f(q: u64) -> FieldDesc {
    FieldDesc::from_order(q).unwrap()
}

fn random_set(fd: &FieldDesc, d: usize, n: usize, seed: u64) -> PointSet {
    let pool = geom::all_points(fd, d, B).unwrap();
    PointSet::new(fd.clone(), d, sample_subset(&pool, n, seed)).unwrap()
}

fn full_space(fd: &FieldDesc, d: usize) -> PointSet {
    PointSet::new(fd.clone(), d, geom::all_points(fd, d, B).unwrap()).unwrap()
}

#[test]
fn defined_count_never_exceeds_q() {
    for q in [3, 5, 7, 9, 11] {
        let fd = f(q);
        for (d, seed) in [(2, 1), (3, 2), (2, 3)] {
            let n = (q as usize * 2).min((q as usize).pow(d as u32));
            let c = census::distinct_spreads(&random_set(&fd, d, n, seed), B).unwrap();
            assert!(c.defined_count <= q as usize);
            assert_eq!(c.defined_count, c.defined_values.len());
        }
    }
}

#[test]
fn full_space_line_counts() {
    for q in [3u64, 5] {
        for d in [2u32, 3] {
            let fd = f(q);
            let lines = census::spanned_lines(&full_space(&fd, d as usize), B).unwrap().lines;
            let expected = q.pow(d - 1) * (q.pow(d) - 1) / (q - 1);
            assert_eq!(lines as u64, expected, "q={q} d={d}");
        }
    }
}

#[test]
fn censuses_are_rigid_motion_invariant() {
    for (q, d) in [(5, 2), (7, 2), (9, 3), (5, 3)] {
        let fd = f(q);
        let ps = random_set(&fd, d, 2 * q as usize, q);
        let m = geom::random_orthogonal(&fd, d, 77);
        let z = geom::point_from_index(&fd, d, 11);
        let moved = ps
            .points()
            .iter()
            .map(|x| m.apply(&fd, x).unwrap().add(&fd, &z))
            .collect();
        let moved = PointSet::new(fd.clone(), d, moved).unwrap();
        assert_eq!(census::distinct_spreads(&ps, B).unwrap(), census::distinct_spreads(&moved, B).unwrap());
        assert_eq!(census::distinct_distances(&ps).unwrap(), census::distinct_distances(&moved).unwrap());
        assert_eq!(census::spanned_lines(&ps, B).unwrap(), census::spanned_lines(&moved, B).unwrap());
    }
}

#[test]
fn removing_a_point_never_adds_values() {
    let fd = f(7);
    let ps = random_set(&fd, 2, 13, 5);
    let full = census::distinct_spreads(&ps, B).unwrap();
    let dist = census::distinct_distances(&ps).unwrap();
    let lines = census::spanned_lines(&ps, B).unwrap();
    for i in 0..ps.len() {
        let sub = ps.without(i);
        assert!(census::distinct_spreads(&sub, B).unwrap().defined_count <= full.defined_count);
        assert!(census::distinct_distances(&sub).unwrap().nonzero.len() <= dist.nonzero.len());
        assert!(census::spanned_lines(&sub, B).unwrap().lines <= lines.lines);
    }
}

#[test]
fn full_rank_square_projection_is_injective() {
    let fd = f(5);
    let ps = random_set(&fd, 4, 25, 9);
    for seed in 0..20 {
        let proj = census::random_projection(&fd, 4, 4, seed).unwrap();
        assert_eq!(census::collision_count(&ps, &proj).unwrap(), 0);
        assert_eq!(census::image_size(&ps, &proj).unwrap(), 25);
    }
}

#[test]
fn triple_search_agrees_with_constructions() {
    assert!(census::search_iso_triple(&f(3), 6, B).unwrap().is_none());
    for (q, d) in [(5, 6), (3, 8)] {
        let fd = f(q);
        let found = census::search_iso_triple(&fd, d, B).unwrap().expect("triple exists");
        assert_eq!(found.len(), 3);
        found.verify(&fd).unwrap();
        assert!(construct::iso_family(&fd, d).unwrap().len() >= 3);
    }
}

#[test]
fn constructions_through_the_census() {
    for (q, d) in [(5, 2), (5, 4), (3, 4), (9, 2)] {
        let fd = f(q);
        let c = census::distinct_spreads(&construct::con1_set(&fd, d, B).unwrap(), B).unwrap();
        assert_eq!(c.defined_count, 0, "con1 q={q} d={d}");
    }
    for (q, d) in [(5, 3), (3, 5), (9, 3)] {
        let fd = f(q);
        let c = census::distinct_spreads(&construct::con2_set(&fd, d, B).unwrap(), B).unwrap();
        assert!(c.defined_count <= 1, "con2 q={q} d={d}");
    }
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let fd = f(7);
    let ps = random_set(&fd, 3, 40, 3);
    let run = || {
        let s = census::distinct_spreads(&ps, B).unwrap();
        let l = census::spanned_lines(&ps, B).unwrap();
        let o = census::spread_occurrences(&ps, fd.elem(3).unwrap(), B).unwrap();
        let e = census::sphere_equiv_check(&fd, 3, B).unwrap();
        let report = expt::run_bode(&fd, 10, 4, B).unwrap().to_json();
        let props = expt::run_spread_properties(&fd, 500, 4).unwrap().to_json();
        (
            CensusReport::for_set(&ps).with_spreads(&s).with_lines(&l).to_json(),
            o,
            e.violation_count,
            e.quadruples_checked,
            report,
            props,
        )
    };
    let one = with_threads(1, run);
    assert_eq!(one, with_threads(4, run));
    assert_eq!(one, with_threads(7, run));
}

#[test]
fn experiments_are_byte_reproducible() {
    let fd = f(5);
    let eps = Rational::new(1, 2);
    let runs = || {
        vec![
            expt::run_bode(&fd, 5, 42, B).unwrap().to_json(),
            expt::run_threshold(&fd, 3, eps, 3, 42, B).unwrap().to_json(),
            expt::run_beck(&fd, 2, eps, 5, 42, B).unwrap().to_json(),
            expt::run_projection(&fd, 4, 2, 25, 20, 42, B).unwrap().to_csv(),
            expt::run_sphere_distance(&fd, 3, Rational::from_integer(2), 5, 42, B).unwrap().to_json(),
        ]
    };
    assert_eq!(runs(), runs());
    assert_ne!(
        expt::run_bode(&fd, 5, 1, B).unwrap().to_json(),
        expt::run_bode(&fd, 5, 2, B).unwrap().to_json()
    );
}

#[test]
fn points_survive_the_file_format() {
    let dir = std::env::temp_dir().join(format!("fqspread-ps-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("con2.txt");
    let fd = f(9);
    let ps = construct::con2_set(&fd, 3, B).unwrap();
    ps.write(&path).unwrap();
    let back = PointSet::read(&path).unwrap();
    assert_eq!(back, ps);
    assert!(back.points().contains(&FVector::unit(3, 2)));
    std::fs::remove_dir_all(dir).unwrap();
}
