//! Greedy jamming against brute-force enumeration of activation orders.

use jamlab::rsa::{exact_expected_jam, greedy_jam, jam_in_order, EXACT_MAX_VERTICES};
use jamlab::{Graph, RngStream, Vertex};

fn permutations(n: usize) -> Vec<Vec<Vertex>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, (n - 1) as Vertex);
            out.push(q);
        }
    }
    out
}

fn random_graph(n: usize, density: f64, rng: &mut RngStream) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.uniform() < density {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

#[test]
fn exact_oracle_equals_average_over_all_orders() {
    let mut rng = RngStream::new(31, 0);
    for n in 1..=7 {
        for &density in &[0.2, 0.5, 0.8] {
            let g = random_graph(n, density, &mut rng);
            let orders = permutations(n);
            let mean = orders.iter().map(|o| jam_in_order(&g, o) as f64).sum::<f64>() / orders.len() as f64;
            let exact = exact_expected_jam(&g).unwrap();
            assert!((mean - exact).abs() < 1e-12, "n = {n}: {mean} vs {exact}");
        }
    }
}

#[test]
fn greedy_simulation_matches_exact_value() {
    let mut rng = RngStream::new(32, 0);
    for k in 0..5 {
        let g = random_graph(8, 0.2 + 0.15 * k as f64, &mut rng);
        let exact = exact_expected_jam(&g).unwrap();
        let reps = 40_000;
        let xs: Vec<f64> = (0..reps).map(|_| greedy_jam(&g, &mut rng).jam_count as f64).collect();
        let m = xs.iter().sum::<f64>() / reps as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!(
            (m - exact).abs() < 3.0 * (v / reps as f64).sqrt() + 1e-12,
            "{m} vs {exact}"
        );
    }
}

#[test]
fn exact_oracle_size_limit() {
    assert!(exact_expected_jam(&Graph::empty(EXACT_MAX_VERTICES + 1)).is_err());
    assert_eq!(
        exact_expected_jam(&Graph::empty(EXACT_MAX_VERTICES)).unwrap(),
        EXACT_MAX_VERTICES as f64
    );
}
