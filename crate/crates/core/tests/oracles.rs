//! Deterministic scans against closed-form oracles.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wanderlab::construction::{default_gamma, log_neg_c};
use wanderlab::dynamics::{check_disk_chain, hn_experiment};
use wanderlab::geometry::{hyperbolic_length, push_curve, winding_number};
use wanderlab::logplane::wrap_angle;
use wanderlab::qgmap::classify;
use wanderlab::*;

fn ctx_with(gamma: f64) -> Construction {
    Construction::new(ConstructionParams::new(gamma, 0.01, 20, 256, 64).unwrap()).unwrap()
}

fn ctx() -> Construction {
    ctx_with(60.0)
}

fn point_s(v: &LValue, c: &Construction, level: usize) -> (f64, f64) {
    let p = v.point().expect("nonzero value");
    (p.rebase(c, level).unwrap().s.to_f64(), p.theta)
}

#[test]
fn random_moduli_tile_the_plane() {
    let c = ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=20);
        let lo = -2.0 * c.half_width_f64(n);
        let hi = if n < 20 {
            c.log_r_gap(n + 1, n).to_f64() - 2.0 * c.half_width_f64(n + 1)
        } else {
            2.0 * c.half_width_f64(n)
        };
        let p = LPoint::new(n, rng.gen_range(lo..hi), rng.gen_range(-PI..PI));
        let tag = classify(&p, &c).unwrap();
        assert!(tag.level() == n || tag == RegionTag::Core(n - 1), "{p} -> {tag}");
        eval_g(&p.into(), &c).unwrap();
    }
}

#[test]
fn tile_boundaries_are_continuous() {
    let c = ctx();
    for n in 2..=15 {
        let h = c.half_width(n).clone();
        // Offsets within the comparison slack would classify as the edge itself.
        let eps = (8.0 * Wide::from_f64(2.0 * c.half_width_f64(n)).ulp(c.prec())).max(1e-12);
        let two_h = h.add_exact(&h);
        // (boundary, offset towards the open band)
        let boundaries = [(two_h.neg(), eps), (h.neg(), -eps), (h.clone(), eps), (two_h.clone(), -eps)];
        for (edge, towards_band) in boundaries {
            for j in 0..64 {
                let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / 64.0;
                let closed = LPoint::from_wide(n, edge.clone(), theta);
                let open = LPoint::from_wide(n, edge.add_f64_exact(towards_band), theta);
                assert!(classify(&open, &c).unwrap().is_band());
                assert!(!classify(&closed, &c).unwrap().is_band());
                let a = eval_g(&closed.into(), &c).unwrap();
                let b = eval_g(&open.into(), &c).unwrap();
                let level = a.point().unwrap().level;
                let (sa, ta) = point_s(&a, &c, level);
                let (sb, tb) = point_s(&b, &c, level);
                assert!((sa - sb).abs() < 1e-9, "n={n} edge={} theta={theta}: {sa} vs {sb}", edge.to_f64());
                assert!(wrap_angle(ta - tb).abs() < 1e-9, "n={n} theta={theta}: {ta} vs {tb}");
            }
        }
    }
}

#[test]
fn coefficient_bound_holds() {
    for n in 2..=20 {
        let bound = 1.0 + (n as f64 + 1.0).ln();
        assert!(log_neg_c(n).abs() <= bound, "n = {n}");
    }
}

#[test]
fn margins_grow_with_level() {
    let c = ctx_with(default_gamma(20).unwrap());
    let r = c.verify_inequalities(20).unwrap();
    assert!(r.overall, "{:?}", r.first_failure());
    // The C♭ margin dips once, from n = 2 to n = 3, for every γ.
    for (family, from) in [("ordering", 2), ("c_flat_bound", 3), ("absorption", 2)] {
        let margins: Vec<f64> = r.checks_named(family).filter(|k| k.n >= from).map(|k| k.margin).collect();
        assert_eq!(margins.len(), 21 - from, "{family}");
        for w in margins.windows(2) {
            assert!(w[1] >= w[0], "{family}: {margins:?}");
        }
    }
}

#[test]
fn rounding_budget_at_level_twenty() {
    let c = ctx();
    let n = 20;
    let gap = c.log_r_gap(n, n - 1);
    let budget = n as f64 * gap.ulp(c.prec());
    assert!(budget < 1e-6 * c.half_width_f64(n), "{budget}");
}

#[test]
fn thresholds_are_monotone() {
    let g = gamma_threshold(20, 0.01, 1e-3).unwrap();
    for gamma in [g, 2.0 * g, 10.0 * g] {
        let r = ctx_with(gamma).verify_inequalities(20).unwrap();
        assert!(r.overall, "gamma = {gamma}: {:?}", r.first_failure());
    }
    let below = ctx_with(g - 0.01).verify_inequalities(20).unwrap();
    assert!(!below.overall);
}

#[test]
fn disk_chain_breaks_above_threshold() {
    let c = ctx_with(default_gamma(20).unwrap());
    let limit = c.delta_threshold(20).unwrap();
    let over = ConstructionParams { delta: limit + 0.002, ..c.params().clone() };
    let r = Construction::new(over).unwrap().verify_inequalities(20).unwrap();
    let first = r.failures().next().unwrap();
    assert_eq!((first.name.as_str(), first.n), ("delta_chain", 2));
    // The sampled chain is far looser than the analytic one.
    assert!(check_disk_chain(&c, 0.5, 2, 5, 64).unwrap().overall);
    let wide = check_disk_chain(&c, 0.9, 2, 5, 64).unwrap();
    assert_eq!(wide.failures().next().map(|k| k.n), Some(2));
}

#[test]
fn pushed_circles_pick_up_the_local_degree() {
    let c = ctx();
    for n in 2..=10 {
        let h = c.half_width(n).clone();
        let cases = [
            (h.clone(), n as i64 + 1),
            (h.neg(), n as i64),
            (h.add_exact(&h).add_exact(&h), n as i64 + 1),
        ];
        for (s, degree) in cases {
            let circle = Curve::circle(n, s, 64);
            let image = push_curve(&circle, &c, 1 << 18).unwrap();
            assert_eq!(winding_number(&image).unwrap(), degree, "n = {n}");
        }
    }
}

#[test]
fn hyperbolic_length_closed_forms() {
    let a = RoundAnnulus::new(4, 0.0, 3.0).unwrap();
    let core = Curve::circle(4, Wide::from_f64(1.5), 64);
    let expected = 2.0 * PI * PI / 3.0;
    assert!((hyperbolic_length(&core, &a).unwrap() - expected).abs() < 1e-6 * expected);
    let radial = Curve::radial(4, 1.0, 2.0, 0.3, 8);
    assert!((hyperbolic_length(&radial, &a).unwrap() - 3f64.ln()).abs() < 1e-5);
}

#[test]
fn hn_stays_below_damping_bound() {
    let c = ctx();
    let m = 2;
    let lo = 2.0 * c.half_width_f64(m);
    let hi = c.log_r_gap(m + 1, m).to_f64() - 2.0 * c.half_width_f64(m + 1);
    let bound = 2.0 * c.gamma() * 2.0;
    for frac in [0.0, 0.3, 0.7, 1.0] {
        let s = lo + frac * (hi - lo);
        let rows = hn_experiment(&c, m, Probe::AnnulusPoint { s, theta: 1.0 }, 12).unwrap();
        for r in rows {
            assert!(r.log_abs_h <= bound && (r.log_abs_h - s).abs() < 1e-9, "{r:?}");
        }
    }
}

#[test]
fn critical_chain_is_exact() {
    let c = ctx_with(default_gamma(20).unwrap());
    for n in 2..=20 {
        let image = eval_g(&xi(n), &c).unwrap();
        let p = image.point().unwrap();
        assert_eq!(p.level, n + 1);
        let (s, theta) = (p.s.to_f64(), p.theta);
        let expected = ((n as f64 + 1.0) / (n as f64 + 2.0)).ln();
        assert!((s - expected).abs() < 1e-9 && theta.abs() < 1e-9, "n = {n}: {s} {theta}");
    }
}
