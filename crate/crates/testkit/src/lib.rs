//! Brute-force reference computations for the test suites.
//!
//! Everything here is deliberately naive: enumeration and two-pass textbook
//! formulas only, sharing no code path with the library under test.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded generator so every suite draws reproducible cases.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact 1D Wasserstein-1 distance between uniform empirical distributions
/// by enumerating every basic feasible solution of the transport linear
/// program.
///
/// Masses are handled as integers (`nb` units per left point, `na` per right
/// point), so feasibility checks are exact. Every LP vertex is the unique
/// flow of some spanning tree of the bipartite support graph; minimizing the
/// cost over all spanning trees is therefore the exact optimum. Intended for
/// supports of at most ~5 points per side.
pub fn transport_wasserstein(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    assert!(na >= 1 && nb >= 1, "supports must be non-empty");
    let nodes = na + nb;
    let edges: Vec<(usize, usize)> = (0..na)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .collect();
    let tree_size = nodes - 1;

    // Integer supplies: a_i carries nb units, b_j absorbs na units.
    let supply_a = nb as i64;
    let supply_b = na as i64;

    let mut best = f64::INFINITY;
    let mut chosen: Vec<usize> = (0..tree_size).collect();
    loop {
        if let Some(cost) = tree_flow_cost(a, b, &edges, &chosen, supply_a, supply_b) {
            if cost < best {
                best = cost;
            }
        }
        // Next combination of edge indices, lexicographic.
        let mut k = tree_size;
        loop {
            if k == 0 {
                return best / (na as f64 * nb as f64);
            }
            k -= 1;
            if chosen[k] != edges.len() - tree_size + k {
                chosen[k] += 1;
                for t in (k + 1)..tree_size {
                    chosen[t] = chosen[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Solve the unique flow on a candidate spanning tree by leaf elimination;
/// `None` when the edges do not form a spanning tree or a flow is negative.
fn tree_flow_cost(
    a: &[f64],
    b: &[f64],
    edges: &[(usize, usize)],
    chosen: &[usize],
    supply_a: i64,
    supply_b: i64,
) -> Option<f64> {
    let (na, nb) = (a.len(), b.len());
    let nodes = na + nb;

    // Node balances: positive for sources (left side), negative for sinks.
    let mut balance: Vec<i64> = (0..nodes)
        .map(|v| if v < na { supply_a } else { -supply_b })
        .collect();

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (slot, &e) in chosen.iter().enumerate() {
        let (i, j) = edges[e];
        incident[i].push(slot);
        incident[na + j].push(slot);
    }

    let mut flow = vec![0_i64; chosen.len()];
    let mut removed = vec![false; chosen.len()];
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut leaves: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
    let mut processed = 0;

    while let Some(v) = leaves.pop() {
        if degree[v] != 1 {
            // Stale stack entry: the node's last edge was already removed.
            continue;
        }
        let slot = *incident[v].iter().find(|&&s| !removed[s])?;
        let (i, j) = edges[chosen[slot]];
        let other = if v == i { na + j } else { i };
        // Flow is oriented from left to right: a positive amount ships from
        // a_i to b_j.
        let amount = if v < na { balance[v] } else { -balance[v] };
        if amount < 0 {
            return None;
        }
        flow[slot] = amount;
        if v < na {
            balance[v] = 0;
            balance[other] += amount;
        } else {
            balance[v] = 0;
            balance[other] -= amount;
        }
        removed[slot] = true;
        processed += 1;
        degree[v] = 0;
        degree[other] = degree[other].saturating_sub(1);
        if degree[other] == 1 {
            leaves.push(other);
        }
    }

    // A spanning tree eliminates all but one node and every edge.
    if processed != chosen.len() || balance.iter().any(|&r| r != 0) {
        return None;
    }
    let mut cost = 0.0;
    for (slot, &e) in chosen.iter().enumerate() {
        let (i, j) = edges[e];
        cost += flow[slot] as f64 * (a[i] - b[j]).abs();
    }
    Some(cost)
}

/// Extreme points of a 2D point set by the all-triples test: a point is kept
/// unless it lies on a segment between two others or inside (or on) a
/// non-degenerate triangle of three others.
///
/// Exact when coordinates are small integers. Returns the distinct extreme
/// points, sorted for set comparison.
pub fn hull_extreme_points(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts;
    }

    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let on_segment = |p: [f64; 2], a: [f64; 2], b: [f64; 2]| -> bool {
        cross(a, b, p) == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };

    let mut extreme = Vec::new();
    'candidates: for (idx, &p) in pts.iter().enumerate() {
        let others: Vec<[f64; 2]> = pts
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != idx)
            .map(|(_, &q)| q)
            .collect();
        for x in 0..others.len() {
            for y in (x + 1)..others.len() {
                if on_segment(p, others[x], others[y]) {
                    continue 'candidates;
                }
                for z in (y + 1)..others.len() {
                    let (a, b, c) = (others[x], others[y], others[z]);
                    let area = cross(a, b, c);
                    if area == 0.0 {
                        continue;
                    }
                    let s1 = cross(a, b, p);
                    let s2 = cross(b, c, p);
                    let s3 = cross(c, a, p);
                    let inside = if area > 0.0 {
                        s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0
                    } else {
                        s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0
                    };
                    if inside {
                        continue 'candidates;
                    }
                }
            }
        }
        extreme.push(p);
    }
    extreme
}

/// Shoelace area of a polygon given by its ordered vertices.
pub fn polygon_area(vertices: &[[f64; 2]]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..vertices.len() {
        let p = vertices[k];
        let q = vertices[(k + 1) % vertices.len()];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    twice.abs() / 2.0
}

/// Two-pass textbook mean and unbiased covariance of row vectors.
pub fn batch_mean_cov(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = rows.len();
    assert!(n >= 2, "need at least two rows");
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for row in rows {
        for j in 0..d {
            mean[j] += row[j];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![vec![0.0; d]; d];
    for row in rows {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for r in &mut cov {
        for v in r.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    (mean, cov)
}

/// Random point rows with per-axis scales, from a seeded generator.
pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, scales: &[f64]) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            scales
                .iter()
                .map(|s| (rng.random::<f64>() * 2.0 - 1.0) * s)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transport_matches_hand_cases() {
        // Equal masses, equal sizes: sorted pairing.
        let w = transport_wasserstein(&[0.0, 1.0], &[0.0, 3.0]);
        assert!((w - 1.0).abs() < 1e-12, "{w}");
        // Unequal sizes: half the mass of {0} moves to 1.
        let w = transport_wasserstein(&[0.0], &[0.0, 1.0]);
        assert!((w - 0.5).abs() < 1e-12, "{w}");
        // Identity.
        assert!(transport_wasserstein(&[2.0, 5.0], &[2.0, 5.0]).abs() < 1e-12);
        // 3 vs 2 support, hand-checked: optimal plan pairs by order.
        let w = transport_wasserstein(&[0.0, 0.0, 3.0], &[0.0, 3.0]);
        // Quantiles: F_a jumps at 0 (2/3) and 3; F_b at 0 (1/2) and 3.
        // Integral of |F_a - F_b| = |2/3-1/2| * 3 = 0.5.
        assert!((w - 0.5).abs() < 1e-12, "{w}");
    }

    #[test]
    fn extreme_points_of_a_square_with_center() {
        let pts = [
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 2.0],
            [0.0, 2.0],
            [1.0, 1.0],
        ];
        let hull = hull_extreme_points(&pts);
        assert_eq!(hull.len(), 4);
        assert!(!hull.contains(&[1.0, 1.0]));
    }

    #[test]
    fn collinear_points_keep_only_endpoints() {
        let hull = hull_extreme_points(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(hull, vec![[0.0, 0.0], [2.0, 2.0]]);
    }

    #[test]
    fn batch_mean_cov_on_a_known_set() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let (mean, cov) = batch_mean_cov(&rows);
        assert!((mean[0] - 2.0).abs() < 1e-12);
        assert!((cov[0][0] - 1.0).abs() < 1e-12);
    }
}
