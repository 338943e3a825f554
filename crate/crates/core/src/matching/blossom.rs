//! Edmonds' blossom algorithm on plain adjacency lists.
//!
//! Blossoms are contracted implicitly through a union–find over base
//! vertices, so one search costs `O(m α(n))`. A vertex left exposed by a
//! failed search can never be matched by later augmentations, so each vertex
//! is searched from at most once.

use std::collections::VecDeque;

pub(crate) const NONE: usize = usize::MAX;

const UNSEEN: u8 = 0;
const EVEN: u8 = 1;
const ODD: u8 = 2;

pub(crate) struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    pub(crate) mate: Vec<usize>,
    parent: Vec<usize>,
    label: Vec<u8>,
    dsu: Vec<usize>,
    mark: Vec<u32>,
    stamp: u32,
    touched: Vec<usize>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    /// `mate` must be a valid matching of the adjacency structure.
    pub(crate) fn new(adj: &'a [Vec<usize>], mate: Vec<usize>) -> Self {
        let n = adj.len();
        debug_assert_eq!(mate.len(), n);
        Blossom {
            adj,
            mate,
            parent: vec![NONE; n],
            label: vec![UNSEEN; n],
            dsu: (0..n).collect(),
            mark: vec![0; n],
            stamp: 0,
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Augments from every exposed vertex once; the result is maximum.
    pub(crate) fn run(mut self) -> Vec<usize> {
        for r in 0..self.adj.len() {
            if self.mate[r] == NONE {
                self.search(r);
            }
        }
        self.mate
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.dsu[x] != x {
            self.dsu[x] = self.dsu[self.dsu[x]];
            x = self.dsu[x];
        }
        x
    }

    fn touch(&mut self, v: usize, label: u8) {
        self.label[v] = label;
        self.dsu[v] = v;
        self.touched.push(v);
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.label[v] = UNSEEN;
            self.parent[v] = NONE;
            self.dsu[v] = v;
        }
        self.touched.clear();
        self.queue.clear();
    }

    /// Grows an alternating tree from the exposed vertex `root`; augments and
    /// returns `true` on reaching another exposed vertex.
    pub(crate) fn search(&mut self, root: usize) -> bool {
        self.reset();
        self.touch(root, EVEN);
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for i in 0..self.adj[v].len() {
                let u = self.adj[v][i];
                if self.label[u] == UNSEEN {
                    self.touch(u, ODD);
                    self.parent[u] = v;
                    let w = self.mate[u];
                    if w == NONE {
                        self.augment(u);
                        return true;
                    }
                    self.touch(w, EVEN);
                    self.queue.push_back(w);
                } else if self.label[u] == EVEN {
                    let (bu, bv) = (self.find(u), self.find(v));
                    if bu != bv {
                        let b = self.lca(bu, bv);
                        self.shrink(u, v, b);
                        self.shrink(v, u, b);
                    }
                }
            }
        }
        false
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.fill(0);
            self.stamp = 1;
        }
        loop {
            if a != NONE {
                a = self.find(a);
                if self.mark[a] == self.stamp {
                    return a;
                }
                self.mark[a] = self.stamp;
                a = match self.mate[a] {
                    NONE => NONE,
                    m => self.parent[m],
                };
            }
            std::mem::swap(&mut a, &mut b);
        }
    }

    fn shrink(&mut self, mut v: usize, mut w: usize, base: usize) {
        while self.find(v) != base {
            self.parent[v] = w;
            w = self.mate[v];
            if self.label[w] == ODD {
                self.label[w] = EVEN;
                self.queue.push_back(w);
            }
            let (rv, rw) = (self.find(v), self.find(w));
            self.dsu[rv] = base;
            self.dsu[rw] = base;
            v = self.parent[w];
        }
    }

    fn augment(&mut self, mut u: usize) {
        while u != NONE {
            let pv = self.parent[u];
            let next = self.mate[pv];
            self.mate[u] = pv;
            self.mate[pv] = u;
            u = next;
        }
    }
}

/// Greedy start: vertices in order of increasing degree take their
/// lowest-degree free neighbour.
pub(crate) fn greedy_mates(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mate = vec![NONE; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (adj[v].len(), v));
    for v in order {
        if mate[v] != NONE {
            continue;
        }
        if let Some(&u) = adj[v]
            .iter()
            .filter(|&&u| mate[u] == NONE && u != v)
            .min_by_key(|&&u| (adj[u].len(), u))
        {
            mate[v] = u;
            mate[u] = v;
        }
    }
    mate
}
