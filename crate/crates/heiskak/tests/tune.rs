//! Scratch experiments for tuning quadrature defaults. Not part of the
//! test suite; run with `cargo test -p heiskak --test tune -- --ignored --nocapture`.

use heiskak::hgroup::HPoint;
use heiskak::measures::{EnergyParams, WeightedBallFamily};
use heiskak::xray::{xray_identity_check, xray_l3_comparison, translation_invariance_check};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_family(n: usize, delta: f64, seed: u64) -> WeightedBallFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<HPoint> = Vec::new();
    let min_d = 2.0 * delta * delta * 1.05;
    while centers.len() < n {
        let p = HPoint::new(
            rng.gen_range(-0.7..0.7),
            rng.gen_range(-0.7..0.7),
            rng.gen_range(-0.2..0.2),
        );
        if centers
            .iter()
            .all(|c| c.as_vec3().distance(p.as_vec3()) >= min_d)
        {
            centers.push(p);
        }
    }
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    WeightedBallFamily::make_family(centers, weights, delta).unwrap()
}

#[test]
#[ignore]
fn identity_ratios() {
    for (n, delta) in [(1usize, 0.25), (5, 0.2), (40, 0.125)] {
        let nu = random_family(n, delta, 7);
        for n_mc in [256, 1024, 2048] {
            let params = EnergyParams {
                n_theta: 32,
                cell: delta * delta / 2.0,
                n_mc,
                seed: 3,
            };
            for q in [1.0, 1.5, 2.0] {
                let (lhs, rhs) = xray_identity_check(&nu, q, &params);
                println!(
                    "n={n} delta={delta} n_mc={n_mc} q={q}: lhs={lhs:.5} rhs={rhs:.5} ratio={:.4}",
                    lhs / rhs
                );
            }
        }
    }
}

#[test]
#[ignore]
fn identity_refinement() {
    let nu = random_family(20, 0.15, 9);
    let base = EnergyParams {
        n_theta: 32,
        cell: 0.15 * 0.15 / 2.0,
        n_mc: 2048,
        seed: 3,
    };
    for q in [1.5, 2.0] {
        let (l1, r1) = xray_identity_check(&nu, q, &base);
        let fine = EnergyParams {
            n_theta: base.n_theta * 2,
            cell: base.cell / 2.0,
            n_mc: base.n_mc * 8,
            seed: 3,
        };
        let (l2, r2) = xray_identity_check(&nu, q, &fine);
        println!(
            "q={q}: base ratio {:.4}, refined ratio {:.4}",
            l1 / r1,
            l2 / r2
        );
    }
}

#[test]
#[ignore]
fn l3_and_translation() {
    let nu = random_family(20, 0.15, 11);
    let params = EnergyParams {
        n_theta: 32,
        cell: 0.15 * 0.15 / 2.0,
        n_mc: 1024,
        seed: 5,
    };
    let (lhs, rhs) = xray_l3_comparison(&nu, 1.5, std::f64::consts::FRAC_PI_4, &params);
    println!("L3: lhs={lhs:.5} rhs={rhs:.5} ratio={:.4}", lhs / rhs);

    for (i, p) in [
        HPoint::new(0.0, 0.0, 0.3),
        HPoint::new(0.2, 0.1, 0.0),
        HPoint::new(-0.15, 0.25, -0.1),
    ]
    .iter()
    .enumerate()
    {
        let (e1, e2) = translation_invariance_check(&nu, *p, 1.5, &params);
        println!(
            "translation {i}: e1={e1:.5} e2={e2:.5} rel={:.5}",
            (e1 - e2).abs() / e1
        );
    }
}
