use crate::error::{Error, Result};
use crate::graph::GraphPair;

/// Weighted average clustering coefficient.
///
/// Each node's triangle count is replaced by the geometric-mean triangle
/// intensity `Σ_{j<h} (ŵ_ij ŵ_ih ŵ_jh)^{1/3}` with `ŵ = w / max w`, and the
/// denominator uses the binary degree. On a 0/1 graph this is the usual
/// clustering coefficient. Nodes with fewer than two neighbours score 0.
pub fn avg_clustering(g: &GraphPair) -> Result<f64> {
    let n = g.n();
    if n == 0 {
        return Err(Error::degenerate_graph("clustering of an empty graph"));
    }
    let conn = &g.conn;
    let max_w = conn
        .weights()
        .as_slice()
        .iter()
        .copied()
        .fold(0.0_f64, f64::max);
    if max_w == 0.0 {
        return Ok(0.0);
    }

    // Cube roots of the normalized weights, so a triangle's intensity is a
    // product of three table entries.
    let mut roots = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let w = conn.weight(i, j);
            if i != j && w > 0.0 {
                roots[i * n + j] = (w / max_w).cbrt();
            }
        }
    }

    let mut total = 0.0;
    let mut neighbours = Vec::with_capacity(n);
    for i in 0..n {
        neighbours.clear();
        neighbours.extend((0..n).filter(|&j| roots[i * n + j] != 0.0));
        let k = neighbours.len();
        if k < 2 {
            continue;
        }
        let mut intensity = 0.0;
        for (a, &j) in neighbours.iter().enumerate() {
            let r_ij = roots[i * n + j];
            let row_j = &roots[j * n..(j + 1) * n];
            let mut partial = 0.0;
            for &h in &neighbours[a + 1..] {
                partial += roots[i * n + h] * row_j[h];
            }
            intensity += r_ij * partial;
        }
        total += 2.0 * intensity / (k as f64 * (k as f64 - 1.0));
    }
    Ok(total / n as f64)
}
