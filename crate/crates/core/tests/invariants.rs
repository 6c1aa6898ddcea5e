//! Cross-module invariants: metric adjoints, gauge covariance, fibre ranks,
//! the curvature formula against finite differences on random points, and
//! the symmetries of the potential and of growth degrees.

use monad_hym::adhm::{self, AdhmData};
use monad_hym::ansatz::{self, Chart};
use monad_hym::geometry::{adjoint_wrt, CVec, MetricMatrix};
use monad_hym::growth::{self, BallSamples, End, KoszulSection};
use monad_hym::monad::{cohomology_frame, curvature, curvature_fd_check, Monad};
use monad_hym::potential::{eval_g, McParams};
use monad_hym::sampling::{apply_su2, complex_normal, log_uniform_points, phase, stream, su2};
use monad_hym::verify::{adhm_family, adhm_frame};
use monad_hym::{CMat, Point3, C64};
use proptest::prelude::*;
use rand::Rng;

fn random_matrix(seed: u64, rows: usize, cols: usize) -> CMat {
    let mut rng = stream(seed, 77);
    CMat::from_fn(rows, cols, |_, _| complex_normal(&mut rng))
}

fn random_metric(seed: u64, n: usize) -> MetricMatrix {
    let a = random_matrix(seed, n, n);
    MetricMatrix::new(a.adjoint() * &a + CMat::identity(n, n)).unwrap()
}

/// Unitary from the QR factor of a Gaussian matrix.
fn random_unitary(seed: u64, n: usize) -> CMat {
    random_matrix(seed, n, n).qr().q()
}

fn random_point(rng: &mut impl Rng) -> Point3 {
    Point3::new(complex_normal(rng), complex_normal(rng), complex_normal(rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_adjoint_identity(seed in 0u64..100_000, k in 1usize..5, l in 1usize..5) {
        let m = random_matrix(seed, l, k);
        let (hs, hd) = (random_metric(seed + 1, k), random_metric(seed + 2, l));
        let ma = adjoint_wrt(&m, &hs, &hd).unwrap();
        let u = CVec::from_column_slice(random_matrix(seed + 3, k, 1).as_slice());
        let v = CVec::from_column_slice(random_matrix(seed + 4, l, 1).as_slice());
        let lhs = hd.inner(&(&m * &u), &v);
        let rhs = hs.inner(&u, &(&ma * &v));
        let scale = m.norm() * u.norm() * v.norm() * hs.matrix().norm() * hd.matrix().norm();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale);
    }

    #[test]
    fn norms_are_gauge_covariant(seed in 0u64..100_000) {
        let mut rng = stream(seed, 5);
        let p = random_point(&mut rng);
        prop_assume!(p.x().norm().max(p.y().norm()) > 0.3);
        let rep = curvature(&ansatz::ansatz_monad(), &p).unwrap();
        let u = random_unitary(seed, 2);
        let f = rep.f.conjugated(&u.adjoint(), &u);
        let mean = u.adjoint() * &rep.mean * &u;
        prop_assert!((f.norm() - rep.f.norm()).abs() <= 1e-8 * rep.f.norm().max(1.0));
        prop_assert!((mean.norm() - rep.mean.norm()).abs() <= 1e-8 * rep.mean.norm().max(1.0));
        // A constant change of holomorphic frame leaves the oracle unchanged.
        let a = random_matrix(seed + 9, 2, 2) + CMat::identity(2, 2) * C64::new(3.0, 0.0);
        let chart = if p.x().norm() >= p.y().norm() { Chart::X } else { Chart::Y };
        let frame = |q: &Point3| ansatz::chart_frame(chart, q).map(|s| s * &a);
        prop_assert!(curvature_fd_check(&ansatz::ansatz_monad(), &p, &frame, 1e-3).unwrap().relative_error <= 1e-3);
    }

    #[test]
    fn fibre_rank_is_constant(seed in 0u64..100_000) {
        let mut rng = stream(seed, 6);
        let p = random_point(&mut rng);
        let monads: [&dyn Monad; 2] = [&ansatz::ansatz_monad(), &ansatz::tangent_cone_origin(false)];
        for m in monads {
            prop_assert_eq!(cohomology_frame(m, &p).unwrap().rank(), m.rank());
        }
        let d = &adhm_family(seed)[3];
        let m = adhm::instanton_monad(d).unwrap();
        prop_assert_eq!(cohomology_frame(&m, &Point3::c2(p.x(), p.y())).unwrap().rank(), 2);
    }
}

#[test]
fn curvature_formula_on_twenty_points_per_monad() {
    let mut rng = stream(11, 12);
    let am = ansatz::ansatz_monad();
    let cone = ansatz::tangent_cone_origin(false);
    let d = adhm_family(11)[3];
    let im = adhm::instanton_monad(&d).unwrap();
    let mut worst = [0.0f64; 3];
    for _ in 0..20 {
        let p = random_point(&mut rng);
        let chart = if p.x().norm() >= p.y().norm() { Chart::X } else { Chart::Y };
        let e = curvature_fd_check(&am, &p, &|q| ansatz::chart_frame(chart, q), 1e-3).unwrap();
        worst[0] = worst[0].max(e.relative_error);
        let e = curvature_fd_check(&cone, &p, &ansatz::cone_frame, 1e-3).unwrap();
        worst[1] = worst[1].max(e.relative_error);
        let q = Point3::c2(p.x(), p.y()).scaled(adhm::curvature_scale(&d));
        let e = curvature_fd_check(&im, &q, &|q| adhm_frame(&d, q), 1e-3).unwrap();
        worst[2] = worst[2].max(e.relative_error);
    }
    assert!(worst.iter().all(|&w| w <= 1e-3), "{worst:?}");
}

fn half_max_radius(d: &AdhmData) -> f64 {
    let m = adhm::instanton_monad(d).unwrap();
    let dens = |r: f64| adhm::density(&m, &Point3::c2(C64::new(r, 0.0), C64::new(0.0, 0.0))).unwrap();
    let peak = dens(0.0);
    let (mut lo, mut hi) = (0.0, 100.0 * adhm::curvature_scale(d));
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dens(mid) > 0.5 * peak {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn instanton_size_follows_the_data() {
    // The density peaks at the origin and its half-max radius is proportional
    // to √(|a₁|²+|a₂|²).
    let base = half_max_radius(&AdhmData::real(1.0, 0.0, 0.0, 1.0));
    for c in [2.0, 4.0] {
        let d = AdhmData::real(c, 0.0, 0.0, c);
        let m = adhm::instanton_monad(&d).unwrap();
        let at = |r: f64| adhm::density(&m, &Point3::c2(C64::new(r, 0.0), C64::new(0.0, 0.0))).unwrap();
        assert!(at(0.0) > at(0.1 * c));
        let ratio = half_max_radius(&d) / base;
        assert!((ratio / c - 1.0).abs() < 0.2, "c={c}: ratio {ratio}");
    }
}

#[test]
fn asymptotic_frame_deviation_constant() {
    const C: f64 = 1.0;
    let mut rng = stream(3, 9);
    let mut n = 0;
    while n < 1000 {
        let p = log_uniform_points(&mut rng, 1, 1.0, 1e3)[0];
        let (chart, c) = if p.x().norm() >= p.y().norm() {
            (Chart::X, p.x().norm())
        } else {
            (Chart::Y, p.y().norm())
        };
        if c < 2.0 * p.norm().sqrt() {
            continue;
        }
        n += 1;
        let f = ansatz::asymptotic_frame(&p, chart).unwrap();
        assert!(f.deviation <= C * p.norm() / (c * c), "{p:?}: {}", f.deviation);
    }
}

#[test]
fn potential_is_symmetric_and_positive() {
    let p = Point3::new(C64::new(3.0, 1.0), C64::new(2.0, -0.5), C64::new(4.0, 0.0));
    let mut rng = stream(4, 4);
    let q = apply_su2(su2(&mut rng), &p);
    let q = Point3::new(q.x(), q.y(), q.z() * phase(&mut rng));
    let a = eval_g(&p, &McParams::new(2000, 1)).unwrap();
    let b = eval_g(&q, &McParams::new(2000, 2)).unwrap();
    let sigma = a.stderr.hypot(b.stderr);
    assert!((a.estimate - b.estimate).abs() <= 2.0 * sigma, "{} vs {} ± {sigma}", a.estimate, b.estimate);
    for g in [&a, &b] {
        assert!(g.shells.iter().all(|s| s.value > 0.0));
        assert!(g.near > 0.0 && g.core > 0.0);
    }
}

#[test]
fn growth_degrees_are_rotation_invariant() {
    let samples = BallSamples::new(2048, 3);
    let mut rng = stream(8, 8);
    let g = su2(&mut rng);
    let w = phase(&mut rng);
    let rotated = samples.mapped(|p| {
        let q = apply_su2(g, p);
        Point3::new(q.x(), q.y(), q.z() * w)
    });
    let family = [KoszulSection::t1(), KoszulSection::t2(), KoszulSection::t3()];
    for s in &family {
        for end in [End::Origin, End::Infinity] {
            let radii = growth::default_radii(end);
            let a = growth::growth_degree(s, end, &radii, &samples).unwrap().degree;
            let b = growth::growth_degree(s, end, &radii, &rotated).unwrap().degree;
            assert!((a - b).abs() < 0.02, "{} {end:?}: {a} vs {b}", s.name);
        }
    }
}
