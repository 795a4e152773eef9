//! Synthetic graphs and plans for chain testing: unit-population grids with
//! block towns, stripe and snake partitions, and a planted-incumbent state
//! whose enacted plan gives every district exactly one incumbent.

use redistrict_core::graph::{DualGraph, IncumbentRef, Party, Unit};
use redistrict_core::partition::Plan;
use std::sync::Arc;

fn cell(r: usize, c: usize, town: String) -> Unit {
    Unit {
        id: format!("r{r}c{c}"),
        pop: 1,
        vap_total: 1,
        vap_white: 1,
        vap_hispanic: 0,
        vap_black: 0,
        vap_asian: 0,
        town,
        dem_votes: 0.0,
        rep_votes: 0.0,
        incumbents: vec![],
    }
}

/// A `rows`×`cols` grid of unit-population cells with 4-neighbor adjacency.
/// Towns are `town_rows`×`town_cols` blocks.
pub fn grid(rows: usize, cols: usize, town_rows: usize, town_cols: usize) -> Arc<DualGraph> {
    grid_with(rows, cols, town_rows, town_cols, |_, _, u| u)
}

/// [`grid`] with a per-cell hook for customizing units.
pub fn grid_with(
    rows: usize,
    cols: usize,
    town_rows: usize,
    town_cols: usize,
    mut f: impl FnMut(usize, usize, Unit) -> Unit,
) -> Arc<DualGraph> {
    let mut units = Vec::with_capacity(rows * cols);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let town = format!("t{}x{}", r / town_rows, c / town_cols);
            units.push(f(r, c, cell(r, c, town)));
            if c > 0 {
                edges.push((format!("r{r}c{}", c - 1), format!("r{r}c{c}")));
            }
            if r > 0 {
                edges.push((format!("r{}c{c}", r - 1), format!("r{r}c{c}")));
            }
        }
    }
    Arc::new(DualGraph::new(units, edges).expect("grid is well formed"))
}

/// Vertical stripe districts: `cols` must divide evenly into `stripes`.
pub fn vertical_stripes(graph: &Arc<DualGraph>, rows: usize, cols: usize, stripes: usize) -> Plan {
    assert_eq!(cols % stripes, 0);
    let width = cols / stripes;
    let mut labels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let _ = r;
            labels.push((c / width) as u32 + 1);
        }
    }
    Plan::from_labels(graph, labels).expect("stripes are contiguous")
}

/// Horizontal stripe districts: `rows` must divide evenly into `stripes`.
pub fn horizontal_stripes(graph: &Arc<DualGraph>, rows: usize, cols: usize, stripes: usize) -> Plan {
    assert_eq!(rows % stripes, 0);
    let height = rows / stripes;
    let mut labels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for _ in 0..cols {
            labels.push((r / height) as u32 + 1);
        }
    }
    Plan::from_labels(graph, labels).expect("stripes are contiguous")
}

/// Boustrophedon snake assignment into `districts` near-equal contiguous
/// segments (sizes differ by at most one).
pub fn snake_plan(graph: &Arc<DualGraph>, rows: usize, cols: usize, districts: usize) -> Plan {
    let n = rows * cols;
    let base = n / districts;
    let rem = n % districts;
    // district sizes: the first `rem` get base+1
    let mut labels_by_snake = Vec::with_capacity(n);
    for d in 0..districts {
        let size = base + usize::from(d < rem);
        labels_by_snake.extend(std::iter::repeat_n(d as u32 + 1, size));
    }
    let mut labels = vec![0u32; n];
    for (k, &lab) in labels_by_snake.iter().enumerate() {
        let r = k / cols;
        let c = if r.is_multiple_of(2) { k % cols } else { cols - 1 - k % cols };
        labels[r * cols + c] = lab;
    }
    Plan::from_labels(graph, labels).expect("snake segments are contiguous")
}

/// An 8×8 state whose enacted plan is eight horizontal stripes with one
/// incumbent per stripe, all of them living in column 0. Mixing the plan
/// scatters the column across fewer districts, so the enacted
/// one-incumbent-per-district layout is an extreme arrangement.
pub fn planted_incumbent_state() -> (Arc<DualGraph>, Plan) {
    let graph = grid_with(8, 8, 2, 2, |r, c, mut u| {
        if c == 0 {
            u.incumbents.push(IncumbentRef {
                name: format!("inc{r}"),
                party: if r.is_multiple_of(2) { Party::Dem } else { Party::Rep },
                home_unit: u.id.clone(),
            });
        }
        u
    });
    let plan = horizontal_stripes(&graph, 8, 8, 8);
    (graph, plan)
}

/// Whether `members` induce a connected subgraph, by direct traversal.
pub fn connected(graph: &DualGraph, members: &std::collections::BTreeSet<u32>) -> bool {
    let start = match members.iter().next() {
        Some(&s) => s,
        None => return false,
    };
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if members.contains(&v) && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen.len() == members.len()
}

/// Brute-force enumeration of every contiguous bipartition with `half`
/// units on the side containing unit 0. Only feasible for tiny graphs.
pub fn balanced_bipartitions(
    graph: &DualGraph,
    half: usize,
) -> std::collections::BTreeSet<std::collections::BTreeSet<u32>> {
    use std::collections::BTreeSet;
    let n = graph.num_units();
    assert!(n <= 20, "mask enumeration only");
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != half || mask & 1 == 0 {
            continue;
        }
        let side: BTreeSet<u32> = (0..n as u32).filter(|&i| mask & (1 << i) != 0).collect();
        let rest: BTreeSet<u32> = (0..n as u32).filter(|&i| mask & (1 << i) == 0).collect();
        if connected(graph, &side) && connected(graph, &rest) {
            found.insert(side);
        }
    }
    found
}

/// A triangle graph (3 mutually adjacent units), for spanning-tree
/// distribution checks.
pub fn triangle() -> Arc<DualGraph> {
    let units = vec![
        cell(0, 0, "t0x0".into()),
        cell(0, 1, "t0x0".into()),
        cell(1, 0, "t0x0".into()),
    ];
    let edges = vec![
        ("r0c0".into(), "r0c1".into()),
        ("r0c0".into(), "r1c0".into()),
        ("r0c1".into(), "r1c0".into()),
    ];
    Arc::new(DualGraph::new(units, edges).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use redistrict_core::metrics;

    #[test]
    fn grid_shapes() {
        let g = grid(6, 6, 2, 3);
        assert_eq!(g.num_units(), 36);
        assert_eq!(g.edges().len(), 60);
        assert_eq!(g.num_towns(), 6);
    }

    #[test]
    fn stripes_are_balanced() {
        let g = grid(6, 6, 2, 3);
        let p = vertical_stripes(&g, 6, 6, 6);
        for d in p.district_labels() {
            assert_eq!(p.aggregates(d).pop, 6);
        }
        assert_eq!(metrics::pop_deviation(&p), 0.0);
    }

    #[test]
    fn snake_covers_all_districts_contiguously() {
        let g = grid(25, 40, 5, 5);
        let p = snake_plan(&g, 25, 40, 36);
        assert_eq!(p.num_districts(), 36);
        let sizes: Vec<u64> = p.district_labels().map(|d| p.aggregates(d).pop).collect();
        assert_eq!(sizes.iter().sum::<u64>(), 1000);
        assert!(sizes.iter().all(|&s| s == 27 || s == 28));
    }

    #[test]
    fn planted_state_has_one_incumbent_per_district() {
        let (_, plan) = planted_incumbent_state();
        let dist = metrics::incumbent_distribution(&plan);
        assert_eq!(dist.single, 8);
        assert_eq!(dist.single_frac, 1.0);
    }
}
