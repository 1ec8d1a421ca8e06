//! DBSCAN labels from the density-reachability definition rather than a
//! region-growing loop: core points are those with >= min_points neighbours
//! (itself included) within `radius`; clusters are connected components of
//! the core graph, computed as a transitive closure; clusters are numbered by
//! their lowest core index; a non-core point joins the lowest-numbered cluster
//! holding a core point within `radius`.

pub fn labels<D: Fn(usize, usize) -> f64>(
    n: usize,
    dist: D,
    radius: f64,
    min_points: usize,
) -> Vec<Option<usize>> {
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            adj[i][j] = i == j || dist(i, j) <= radius;
        }
    }
    let core: Vec<bool> = (0..n).map(|i| adj[i].iter().filter(|&&b| b).count() >= min_points).collect();

    // Warshall closure over the core-to-core relation.
    let mut reach: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| core[i] && core[j] && adj[i][j]).collect()).collect();
    for k in 0..n {
        if !core[k] {
            continue;
        }
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }

    // Component representative = smallest core index reachable.
    let rep: Vec<Option<usize>> =
        (0..n).map(|i| if core[i] { (0..n).find(|&j| reach[i][j]) } else { None }).collect();
    let mut reps: Vec<usize> = rep.iter().flatten().copied().collect();
    reps.sort_unstable();
    reps.dedup();
    let number = |r: usize| reps.iter().position(|&x| x == r).unwrap();

    (0..n)
        .map(|i| {
            if let Some(r) = rep[i] {
                return Some(number(r));
            }
            (0..n)
                .filter(|&j| core[j] && adj[i][j])
                .map(|j| number(rep[j].unwrap()))
                .min()
        })
        .collect()
}
