use gff_core::kernels::{Kernel, KernelConfig};
use gff_core::measures::*;
use gff_core::sampler::*;
use gff_core::thickpoints::{prob_phi, RadiusTable, ThickConfig};
use gff_core::Error;
use proptest::prelude::*;

fn kernel() -> Kernel {
    Kernel::new(KernelConfig::new(3, 1).unwrap()).unwrap()
}

fn dyadic_layout(levels: usize, sites: impl IntoIterator<Item = usize>) -> FieldLayout {
    let r: Vec<f64> = (0..levels).map(|n| 0.5f64.powi(n as i32)).collect();
    let seq = custom_sequence(&r, DEFAULT_UNDERFLOW_FLOOR).unwrap();
    let lat = build_lattice(3, &seq, 4096).unwrap();
    FieldLayout::new(seq, lat, sites, PathSpan::Full).unwrap()
}

#[test]
fn cube_self_energy_matches_references() {
    // nu = 1 closed form 2 / ((1 - a)(2 - a))
    for a in [0.25, 0.5, 0.9] {
        let (v, se) = cube_self_energy(1, a, 1 << 12).unwrap();
        let want = 2.0 / ((1.0 - a) * (2.0 - a));
        assert!((v - want).abs() < 1e-12 * want, "{a}: {v} vs {want}");
        assert!(se < 1e-12);
    }
    // adaptive cubature of the tent-density integral
    for (nu, a, want, tol) in [
        (3, 1.0, 1.8823126443896603, 2e-4),
        (3, 0.5, 1.323059028368902, 2e-4),
        (3, 2.0, 5.633715158136101, 1e-3),
        (2, 1.0, 2.973209598247377, 2e-4),
    ] {
        let (v, se) = cube_self_energy(nu, a, 1 << 17).unwrap();
        assert!((v - want).abs() < tol * want, "nu {nu} a {a}: {v} vs {want} (se {se})");
        assert!((v - want).abs() < 5.0 * se + 1e-6, "nu {nu} a {a}: se {se} too small");
    }
    assert!(matches!(cube_self_energy(3, 3.0, 100), Err(Error::Domain(_))));
}

#[test]
fn total_mass_arithmetic() {
    let zero = DiscreteMeasure::new(3, 2, 0.25, vec![], vec![]).unwrap();
    assert_eq!(total_mass(&zero), 0.0);
    let one = DiscreteMeasure::new(3, 2, 0.25, vec![0.0; 3], vec![1.0 / (512.0 * 0.01)]).unwrap();
    assert!((total_mass(&one) - 0.1953125).abs() < 1e-15);
    let q = 0.2;
    let k = 64;
    let all = DiscreteMeasure::new(3, 2, 0.25, vec![0.0; 3 * k], vec![1.0 / (k as f64 * q); k]).unwrap();
    assert!((total_mass(&all) - 1.0 / q).abs() < 1e-12);
    assert!(DiscreteMeasure::new(3, 2, 0.25, vec![0.0; 2], vec![1.0]).is_err());
    assert!(DiscreteMeasure::new(3, 2, 0.25, vec![0.0; 3], vec![-1.0]).is_err());
}

#[test]
fn built_measure_weights() {
    let k = kernel();
    let l = dyadic_layout(3, 1..=2);
    let t = RadiusTable::new(&k, &l.seq).unwrap();
    let c = ThickConfig::new(3, 0.0).unwrap();
    let zero = vec![0.0; l.len()];
    let m = build_measure(&l, &t, &zero, &c, 2).unwrap();
    // gamma = 0 and a zero field pin every cell
    assert_eq!(m.len(), 64);
    let w = prob_phi(&t, &c, 2).unwrap().exp();
    assert!((total_mass(&m) - 1.0 / w).abs() < 1e-12 / w);
    assert!((m.count_correction - 1.0).abs() < 1e-12);
    assert_eq!(m.cell_side, 0.5);
    let c = ThickConfig::new(3, 0.5).unwrap();
    // far from the pinned increments nothing is flagged
    let big = vec![1e3; l.len()];
    assert_eq!(total_mass(&build_measure(&l, &t, &big, &c, 2).unwrap()), 0.0);
}

#[test]
fn capped_measure_records_correction() {
    let k = kernel();
    let r: Vec<f64> = (0..4).map(|n| 0.25f64.powi(n)).collect();
    let seq = custom_sequence(&r, DEFAULT_UNDERFLOW_FLOOR).unwrap();
    let lat = build_lattice(3, &seq, 512).unwrap();
    let l = FieldLayout::new(seq.clone(), lat, [3], PathSpan::Full).unwrap();
    let t = RadiusTable::new(&k, &seq).unwrap();
    let m = build_measure(&l, &t, &vec![0.0; l.len()], &ThickConfig::new(3, 0.0).unwrap(), 3).unwrap();
    assert!((m.count_correction - 512.0 / 64f64.powi(3)).abs() < 1e-15);
}

#[test]
fn weights_stay_finite_for_tiny_radii() {
    let k = kernel();
    let seq = make_sequence(SequenceKind::PaperDoubleExp, 4, DEFAULT_UNDERFLOW_FLOOR).unwrap();
    let lat = build_lattice(3, &seq, 8).unwrap();
    let l = FieldLayout::new(seq.clone(), lat, [3], PathSpan::Full).unwrap();
    let t = RadiusTable::new(&k, &seq).unwrap();
    let c = ThickConfig::new(3, 1.0).unwrap();
    // put every path exactly on its pinned centres
    let a = c.threshold();
    let mut v = vec![0.0; l.len()];
    for cell in 0..8 {
        let mut acc = 0.0;
        for i in 0..4 {
            acc += a * t.ln_dd[i].exp();
            v[l.index(Variable { level: 3, cell, radius: i }).unwrap()] = acc;
        }
    }
    let m = build_measure(&l, &t, &v, &c, 3).unwrap();
    assert_eq!(m.len(), 8);
    // 1/K_3 = 2^{-1533} underflows and 1/W(Phi) overflows, the weight does not
    let ln_phi = prob_phi(&t, &c, 3).unwrap();
    assert!(ln_phi < -745.0);
    let ln_w = -3.0 * 511.0 * 2f64.ln() - ln_phi;
    let w = m.weights[0];
    assert!(w > 1e-300 && w.is_finite(), "{w}");
    assert!((m.ln_weights[0] - ln_w).abs() < 1e-12 * ln_w.abs().max(1.0));
    assert!((w.ln() - ln_w).abs() < 1e-9 * ln_w.abs().max(1.0));
}

#[test]
fn second_moment_needs_replicas() {
    assert!(matches!(second_moment_mc(&[1.0; 99]), Err(Error::Invalid(_))));
    let (m, se) = second_moment_mc(&[2.0; 100]).unwrap();
    assert_eq!((m, se), (4.0, 0.0));
}

#[test]
fn single_cell_second_moment_is_bernoulli() {
    let k = kernel();
    let l = dyadic_layout(2, [1]);
    let t = RadiusTable::new(&k, &l.seq).unwrap();
    let c = ThickConfig::new(3, 0.5).unwrap();
    let (v, _) = second_moment_analytic(&k, &l, &t, &c, 1, &[3], 1000, 1).unwrap();
    let w = prob_phi(&t, &c, 1).unwrap().exp();
    // 1 / (K^2 W(Phi)) with K = 8
    assert!((v - 1.0 / (64.0 * w)).abs() < 1e-14 * v);
}

#[test]
fn box_probability_factorizes_and_matches_closed_forms() {
    use gff_core::specfun::normal_interval;
    let mut m = SymMatrix::zeros(4);
    m.set(0, 0, 1.0);
    m.set(1, 1, 2.0);
    m.set(1, 0, 0.6);
    m.set(2, 2, 1.5);
    m.set(3, 3, 0.7);
    m.set(3, 2, -0.4);
    let lo = [-0.5, -1.0, 0.2, -2.0];
    let hi = [1.0, 0.5, 1.7, 0.3];
    let (p, se) = box_probability(&m, &lo, &hi, 4096, 16, 3).unwrap();
    let mut a = SymMatrix::zeros(2);
    a.set(0, 0, 1.0);
    a.set(1, 1, 2.0);
    a.set(1, 0, 0.6);
    let mut b = SymMatrix::zeros(2);
    b.set(0, 0, 1.5);
    b.set(1, 1, 0.7);
    b.set(1, 0, -0.4);
    let (pa, _) = box_probability(&a, &lo[..2], &hi[..2], 4096, 16, 3).unwrap();
    let (pb, _) = box_probability(&b, &lo[2..], &hi[2..], 4096, 16, 3).unwrap();
    assert!((p - pa * pb).abs() < 5.0 * se + 1e-6, "{p} vs {}", pa * pb);
    // diagonal covariance is a product of intervals
    let d = SymMatrix::identity(3);
    let (p, _) = box_probability(&d, &[-1.0, 0.0, 0.5], &[1.0, 2.0, 3.0], 64, 4, 1).unwrap();
    let want = normal_interval(-1.0, 1.0) * normal_interval(0.0, 2.0) * normal_interval(0.5, 3.0);
    assert!((p - want).abs() < 1e-14);
    // bivariate orthant: 1/4 + asin(rho) / (2 pi)
    let mut o = SymMatrix::identity(2);
    o.set(1, 0, 0.5);
    let (p, se) = box_probability(&o, &[0.0, 0.0], &[f64::INFINITY, f64::INFINITY], 8192, 16, 9).unwrap();
    let want = 0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI);
    assert!((p - want).abs() < 1e-4 && (p - want).abs() < 5.0 * se + 1e-7, "{p} vs {want}");
}

#[test]
fn two_cell_second_moment_matches_monte_carlo() {
    let k = kernel();
    let l = dyadic_layout(3, [2]);
    let t = RadiusTable::new(&k, &l.seq).unwrap();
    let c = ThickConfig::new(3, 0.5).unwrap();
    let cells = [0, 63];
    let (exact, se_exact) = second_moment_analytic(&k, &l, &t, &c, 2, &cells, 4096, 5).unwrap();
    let cov = assemble_covariance(&k, &l, DEFAULT_MAX_POINTS).unwrap();
    let s = GaussianSampler::new(&cov).unwrap();
    let w = (-(64f64.ln()) - prob_phi(&t, &c, 2).unwrap()).exp();
    let masses: Vec<f64> = (0..20_000)
        .map(|r| {
            let v = s.sample(17, r).values;
            let xi = gff_core::thickpoints::xi_set(&l, &t, &v, &c, 2).unwrap();
            w * cells.iter().filter(|j| xi.contains(j)).count() as f64
        })
        .collect();
    let (mc, se) = second_moment_mc(&masses).unwrap();
    assert!((mc - exact).abs() < 3.0 * (se * se + se_exact * se_exact).sqrt(), "{mc} vs {exact}");
}

#[test]
fn point_mass_pair_energy() {
    let d = 0.5;
    let a = 1.3;
    let m = DiscreteMeasure::points(3, vec![0.0, 0.0, 0.0, d, 0.0, 0.0], vec![0.5, 0.5]).unwrap();
    let mut ev = EnergyEvaluator::with_diagonal(3, a, 64, (1.0, 0.0));
    let e = ev.energy(&m).unwrap();
    assert!(e.infinite);
    assert!((e.value - 2.0 * 0.25 * d.powf(-a)).abs() < 1e-15);
}

#[test]
fn far_cells_use_midpoint() {
    let m = DiscreteMeasure::new(3, 0, 0.01, vec![-0.5, 0.0, 0.0, 0.5, 0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let mut ev = EnergyEvaluator::new(3, 1.0, 4096).unwrap();
    let e = ev.energy(&m).unwrap();
    assert!(!e.infinite);
    let self_part = 2.0 * ev.diagonal_constant().0 / 0.01;
    assert!((e.value - self_part - 2.0).abs() < 1e-12);
}

#[test]
fn near_cells_use_cell_averages() {
    // two face-adjacent unit cubes: E|o + y - w|^{-1}, o = (1, 0, 0)
    let m = DiscreteMeasure::new(3, 0, 1.0, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![1.0, 0.0]).unwrap();
    let mut ev = EnergyEvaluator::new(3, 1.0, 1 << 14).unwrap();
    // only the self term survives with weights (1, 0)
    let e = ev.energy(&m).unwrap();
    assert!((e.value - ev.diagonal_constant().0).abs() < 1e-12);
    let m = DiscreteMeasure::new(3, 0, 1.0, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![0.0, 1.0]).unwrap();
    let e2 = ev.energy(&m).unwrap();
    assert!((e2.value - e.value).abs() < 1e-12);
    let both = DiscreteMeasure::new(3, 0, 1.0, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let cross = (ev.energy(&both).unwrap().value - 2.0 * e.value) / 2.0;
    // reference by adaptive cubature of the tent density around (1, 0, 0)
    let want = 0.9808851835992651;
    assert!((cross - want).abs() < 5e-3, "{cross}");
}

#[test]
fn certificate_counts() {
    let e = |v: f64| EnergyEstimate { value: v, se: 0.0, infinite: false };
    let rec = vec![(1.0, e(1.0)), (0.0, e(0.0)), (5.0, e(1.0)), (1.2, e(10.0)), (0.8, e(2.0))];
    let c = capacity_certificate(&rec, 1.0, 2.0, 3.0).unwrap();
    assert_eq!((c.replicas, c.zero_mass, c.passed), (5, 1, 2));
    assert!((c.fraction - 0.4).abs() < 1e-15);
    assert!(capacity_certificate(&rec, 1.0, 1.0, 3.0).is_err());
    assert!(capacity_certificate(&rec, 1.0, 2.0, 0.0).is_err());
}

#[test]
fn small_alpha_energy_tends_to_squared_mass() {
    let m = DiscreteMeasure::new(3, 0, 0.1, vec![0.0, 0.0, 0.0, 0.15, 0.0, 0.0, -0.6, 0.2, 0.1], vec![0.3, 0.5, 0.4]).unwrap();
    let mut ev = EnergyEvaluator::new(3, 1e-4, 4096).unwrap();
    let e = ev.energy(&m).unwrap();
    let mass = total_mass(&m);
    assert!((e.value - mass * mass).abs() < 1e-2 * mass * mass);
    let c = capacity_certificate(&[(mass, e)], 1e-4, 2.0, mass * mass * 1.1).unwrap();
    assert_eq!(c.passed, 1);
}

#[test]
fn alpha_at_or_above_nu_is_rejected() {
    assert!(matches!(EnergyEvaluator::new(3, 3.0, 100), Err(Error::Domain(_))));
    assert!(EnergyEvaluator::new(3, 0.0, 100).is_err());
}

#[test]
fn plane_slice_certificate() {
    // uniform measure on the z = 0 plane slice of an m^3 grid: energy stays
    // bounded under refinement for alpha < 2 and grows for alpha > 2
    let energy = |m: usize, alpha: f64| {
        let side = 2.0 / m as f64;
        let mut centers = Vec::new();
        for i in 0..m {
            for j in 0..m {
                centers.extend([(2 * i + 1) as f64 / m as f64 - 1.0, (2 * j + 1) as f64 / m as f64 - 1.0, 1.0 / m as f64]);
            }
        }
        let w = vec![1.0 / (m * m) as f64; m * m];
        let meas = DiscreteMeasure::new(3, 0, side, centers, w).unwrap();
        let mut ev = EnergyEvaluator::new(3, alpha, 1024).unwrap();
        ev.energy(&meas).unwrap().value
    };
    let grow = |alpha: f64| energy(32, alpha) / energy(8, alpha);
    assert!(grow(1.5) < 1.3, "{}", grow(1.5));
    assert!(grow(2.5) > 2.0, "{}", grow(2.5));
}

proptest! {
    #[test]
    fn energy_nondecreasing_in_alpha(x in prop::collection::vec(-0.2f64..0.2, 9), a1 in 0.1f64..2.5, da in 0.0f64..0.4) {
        // points within unit distance of each other
        let m = DiscreteMeasure::points(3, x, vec![0.2, 0.3, 0.5]).unwrap();
        let mut e1 = EnergyEvaluator::with_diagonal(3, a1, 64, (1.0, 0.0));
        let mut e2 = EnergyEvaluator::with_diagonal(3, a1 + da, 64, (1.0, 0.0));
        let v1 = e1.energy(&m).unwrap().value;
        let v2 = e2.energy(&m).unwrap().value;
        prop_assert!(v2 >= v1 * (1.0 - 1e-12));
    }
}
