use std::collections::VecDeque;

use crate::graph::Graph;

/// Greedy lower bound on the number of vertex-disjoint cycles.
///
/// Repeatedly prunes vertices of degree at most one, finds a short cycle by
/// breadth-first search from the smallest live vertex, and deletes the
/// cycle's vertices.
pub fn count_disjoint_cycles_lb(g: &Graph) -> usize {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg = g.degrees();
    let mut count = 0;
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![0u32; n];
    let mut stamp = 0u32;

    let kill = |v: usize, alive: &mut Vec<bool>, deg: &mut Vec<usize>, stack: &mut Vec<usize>| {
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    };
    let prune = |alive: &mut Vec<bool>, deg: &mut Vec<usize>, stack: &mut Vec<usize>| {
        while let Some(v) = stack.pop() {
            if alive[v] && deg[v] <= 1 {
                kill(v, alive, deg, stack);
            }
        }
    };

    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    prune(&mut alive, &mut deg, &mut stack);
    let mut next = 0;
    loop {
        while next < n && !alive[next] {
            next += 1;
        }
        if next == n {
            break;
        }
        stamp += 1;
        let root = next;
        seen[root] = stamp;
        parent[root] = usize::MAX;
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut chord = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !alive[w] || w == parent[v] {
                    continue;
                }
                if seen[w] == stamp {
                    chord = Some((v, w));
                    break 'bfs;
                }
                seen[w] = stamp;
                parent[w] = v;
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
        // the live graph has minimum degree 2, so the search meets a chord
        let (mut a, mut b) = chord.expect("min-degree-2 graph contains a cycle");
        let mut cycle = Vec::new();
        while depth[a] > depth[b] {
            cycle.push(a);
            a = parent[a];
        }
        while depth[b] > depth[a] {
            cycle.push(b);
            b = parent[b];
        }
        while a != b {
            cycle.push(a);
            cycle.push(b);
            a = parent[a];
            b = parent[b];
        }
        cycle.push(a);
        count += 1;
        let mut stack = Vec::new();
        for &v in &cycle {
            if alive[v] {
                kill(v, &mut alive, &mut deg, &mut stack);
            }
        }
        prune(&mut alive, &mut deg, &mut stack);
    }
    count
}
