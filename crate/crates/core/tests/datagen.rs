mod common;

use common::*;
use mugl_core::datagen::is_connected;
use mugl_core::laplacian::pairs;
use mugl_core::*;
use nalgebra::DMatrix;

fn graph(family: GraphFamily, m: usize, seed: u64) -> GeneratedGraph {
    gen_graph(&GraphSpec { family, m, seed }).unwrap()
}

#[test]
fn er_edge_count_is_binomial() {
    let (m, p) = (10, 0.3);
    let pairs_total = 45.0;
    let runs = 10_000;
    let total: usize = (0..runs)
        .map(|seed| graph(GraphFamily::Er { p }, m, seed).laplacian.edge_count())
        .sum();
    let mean = total as f64 / runs as f64;
    let se = (pairs_total * p * (1.0 - p) / runs as f64).sqrt();
    assert!((mean - pairs_total * p).abs() <= 3.0 * se, "mean {mean}");
}

#[test]
fn er_extremes() {
    assert_eq!(graph(GraphFamily::Er { p: 1.0 }, 5, 3).laplacian.edge_count(), 10);
    assert_eq!(graph(GraphFamily::Er { p: 0.0 }, 5, 3).laplacian.edge_count(), 0);
}

#[test]
fn pa_builds_connected_trees() {
    for seed in 0..200 {
        let g = graph(GraphFamily::Pa { theta0: 2, theta: 1 }, 15, seed).laplacian;
        assert_eq!(g.edge_count(), 14);
        assert!(is_connected(&g));
        assert!(g.weights().as_slice().iter().all(|&w| w == 0.0 || w == 1.0));
    }
}

#[test]
fn pa_early_nodes_collect_degree() {
    let m = 30;
    let runs = 500;
    let mut early = 0.0;
    let mut late = 0.0;
    for seed in 0..runs {
        let d = graph(GraphFamily::Pa { theta0: 2, theta: 1 }, m, seed).laplacian.weights().degrees();
        early += d[0] + d[1];
        late += d[m - 2] + d[m - 1];
    }
    assert!(early > 3.0 * late, "early {early} late {late}");
}

#[test]
fn gaussian_edges_follow_the_kernel_cutoff() {
    let cutoff = (-2.0f64 * 0.25 * 0.75f64.ln()).sqrt();
    assert!((cutoff - 0.379_263_808_220_466).abs() < 1e-14);
    for seed in 0..20 {
        let g = graph(GraphFamily::Gaussian { sigma: 0.5, threshold: 0.75 }, 20, seed);
        let coords = g.coords.unwrap();
        let w = g.laplacian.weights();
        for (k, (i, j)) in pairs(20).enumerate() {
            let d2 = (coords[i][0] - coords[j][0]).powi(2) + (coords[i][1] - coords[j][1]).powi(2);
            let kernel = (-d2 / 0.5).exp();
            if d2.sqrt() <= cutoff - 1e-12 {
                assert!((w.as_slice()[k] - kernel).abs() < 1e-15);
            } else if d2.sqrt() > cutoff + 1e-12 {
                assert_eq!(w.as_slice()[k], 0.0);
            }
        }
        assert!(coords.iter().flatten().all(|c| (0.0..1.0).contains(c)));
    }
}

#[test]
fn generation_is_seed_deterministic() {
    let spec = GraphSpec {
        family: GraphFamily::Gaussian { sigma: 0.5, threshold: 0.75 },
        m: 12,
        seed: 42,
    };
    let a = gen_graph(&spec).unwrap().laplacian;
    let b = gen_graph(&spec).unwrap().laplacian;
    assert_eq!(a, b);
    let sig = SignalSpec {
        n: 20,
        epsilon: 0.1,
        mu_star: None,
        seed: 42,
    };
    assert_eq!(gen_signals(&a, &sig).unwrap(), gen_signals(&b, &sig).unwrap());
    let other = SignalSpec { seed: 43, ..sig.clone() };
    assert_ne!(gen_signals(&a, &sig).unwrap(), gen_signals(&a, &other).unwrap());
}

#[test]
fn generated_signals_are_smooth() {
    // Laplacian quadratic form of generated signals sits below that of white
    // noise with the same total variance.
    let mut smooth = 0.0;
    let mut white = 0.0;
    for seed in 0..50 {
        let g = graph(GraphFamily::Gaussian { sigma: 0.5, threshold: 0.75 }, 20, seed).laplacian;
        let x = gen_signals(
            &g,
            &SignalSpec {
                n: 100,
                epsilon: 0.1,
                mu_star: None,
                seed,
            },
        )
        .unwrap();
        let xd = x.data();
        let var = xd.iter().map(|v| v * v).sum::<f64>() / xd.len() as f64;
        let mut r = rng(seed + 5000);
        let z = DMatrix::from_fn(20, 100, |_, _| normal(&mut r) * var.sqrt());
        smooth += trace_product(&(xd.transpose() * g.matrix()), xd);
        white += trace_product(&(z.transpose() * g.matrix()), &z);
    }
    assert!(smooth < white, "{smooth} vs {white}");
}

#[test]
fn mean_shift_is_applied() {
    let g = graph(GraphFamily::Er { p: 1.0 }, 4, 0).laplacian;
    let mu = vec![1.0, -2.0, 0.5, 3.0];
    let x = gen_signals(
        &g,
        &SignalSpec {
            n: 20_000,
            epsilon: 0.1,
            mu_star: Some(mu.clone()),
            seed: 8,
        },
    )
    .unwrap();
    let (mean, _) = moments_oracle(x.data());
    for (a, b) in mean.iter().zip(&mu) {
        assert!((a - b).abs() < 0.05);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        GraphFamily::Gaussian { sigma: 0.0, threshold: 0.5 },
        GraphFamily::Gaussian { sigma: 0.5, threshold: 1.5 },
        GraphFamily::Er { p: 1.2 },
        GraphFamily::Pa { theta0: 1, theta: 1 },
        GraphFamily::Pa { theta0: 2, theta: 3 },
    ];
    for family in bad {
        assert!(gen_graph(&GraphSpec { family, m: 10, seed: 0 }).is_err(), "{family:?}");
    }
    let g = graph(GraphFamily::Er { p: 0.5 }, 4, 0).laplacian;
    let spec = SignalSpec {
        n: 10,
        epsilon: 0.1,
        mu_star: Some(vec![0.0; 3]),
        seed: 0,
    };
    assert!(gen_signals(&g, &spec).is_err());
}
