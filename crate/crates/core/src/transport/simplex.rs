//! Primal network simplex for uncapacitated, balanced min-cost flow.
//!
//! Spanning-tree bookkeeping follows the thread/successor representation
//! used by LEMON: `thread` is a preorder walk of the tree, `succ_num[u]` is
//! the size of the subtree rooted at `u` and `last_succ[u]` its last node
//! in thread order. Entering arcs are chosen by block search.
//!
//! Arcs `0..node_num` are the artificial root arcs; real arcs follow and may
//! be appended between calls to [`NetworkSimplex::run`], which resumes from
//! the current basis.

const NONE: usize = usize::MAX;

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;

const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;

const INF: i64 = i64::MAX;

const MIN_BLOCK_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct NetworkSimplex {
    node_num: usize,

    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<i64>,
    flow: Vec<i64>,
    state: Vec<i8>,

    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<i8>,
    pi: Vec<i64>,
    dirty_revs: Vec<usize>,

    next_arc: usize,
    block_size: usize,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,

    pub(crate) pivots: u64,
}

impl NetworkSimplex {
    /// `supply[u] > 0` for sources, `< 0` for sinks; must sum to zero.
    /// `art_cost` must exceed the cost of any simple path of real arcs.
    pub(crate) fn new(supply: &[i64], art_cost: i64) -> Self {
        debug_assert_eq!(supply.iter().sum::<i64>(), 0);
        let node_num = supply.len();
        let root = node_num;
        let all = node_num + 1;

        let mut s = Self {
            node_num,
            source: vec![0; node_num],
            target: vec![0; node_num],
            cost: vec![0; node_num],
            flow: vec![0; node_num],
            state: vec![STATE_TREE; node_num],
            parent: vec![NONE; all],
            pred: vec![NONE; all],
            thread: vec![0; all],
            rev_thread: vec![0; all],
            succ_num: vec![0; all],
            last_succ: vec![0; all],
            pred_dir: vec![0; all],
            pi: vec![0; all],
            dirty_revs: Vec::new(),
            next_arc: node_num,
            block_size: MIN_BLOCK_SIZE,
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0,
            pivots: 0,
        };

        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = all;
        s.last_succ[root] = if node_num == 0 { root } else { root - 1 };

        for (u, &sup) in supply.iter().enumerate() {
            let e = u;
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            if sup >= 0 {
                s.pred_dir[u] = DIR_UP;
                s.pi[u] = 0;
                s.source[e] = u;
                s.target[e] = root;
                s.flow[e] = sup;
                s.cost[e] = 0;
            } else {
                s.pred_dir[u] = DIR_DOWN;
                s.pi[u] = art_cost;
                s.source[e] = root;
                s.target[e] = u;
                s.flow[e] = -sup;
                s.cost[e] = art_cost;
            }
        }
        s
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cost: i64) {
        debug_assert!(from < self.node_num && to < self.node_num);
        self.source.push(from);
        self.target.push(to);
        self.cost.push(cost);
        self.flow.push(0);
        self.state.push(STATE_LOWER);
    }

    /// Replaces the artificial start by a basis in which each listed real
    /// arc carries the full supply of its source into a sink with room for
    /// it. Must precede the first [`Self::run`].
    pub(crate) fn warm_start(&mut self, supply: &[i64], assigned: &[usize]) {
        let n = self.node_num;
        let root = n;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut room: Vec<i64> = supply.iter().map(|&s| (-s).max(0)).collect();
        let mut parent_arc = vec![NONE; n];
        for &e in assigned {
            let (u, v) = (self.source[e], self.target[e]);
            debug_assert!(supply[u] > 0 && room[v] >= supply[u] && parent_arc[u] == NONE);
            room[v] -= supply[u];
            parent_arc[u] = e;
            children[v].push(u);
        }

        let mut order = Vec::with_capacity(n + 1);
        order.push(root);
        for u in 0..n {
            if supply[u] < 0 {
                order.push(u);
                order.extend_from_slice(&children[u]);
            } else if parent_arc[u] == NONE {
                order.push(u);
            }
        }
        for k in 0..order.len() {
            let (u, next) = (order[k], order[(k + 1) % order.len()]);
            self.thread[u] = next;
            self.rev_thread[next] = u;
        }
        self.succ_num[root] = n + 1;
        self.last_succ[root] = *order.last().expect("root");
        for u in 0..n {
            if supply[u] < 0 {
                // Root arc carries the remaining demand.
                self.parent[u] = root;
                self.pred[u] = u;
                self.pred_dir[u] = DIR_DOWN;
                self.flow[u] = room[u];
                self.state[u] = STATE_TREE;
                self.succ_num[u] = 1 + children[u].len();
                self.last_succ[u] = children[u].last().copied().unwrap_or(u);
                self.pi[u] = self.cost[u];
                for &c in &children[u] {
                    let e = parent_arc[c];
                    self.parent[c] = u;
                    self.pred[c] = e;
                    self.pred_dir[c] = DIR_UP;
                    self.flow[e] = supply[c];
                    self.state[e] = STATE_TREE;
                    self.flow[c] = 0;
                    self.state[c] = STATE_LOWER;
                    self.succ_num[c] = 1;
                    self.last_succ[c] = c;
                    self.pi[c] = self.pi[u] - self.cost[e];
                }
            }
        }
    }

    pub(crate) fn real_arc_count(&self) -> usize {
        self.source.len() - self.node_num
    }

    /// Real arcs as `(from, to, flow)`, in insertion order.
    pub(crate) fn real_flows(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        (self.node_num..self.source.len()).map(|e| (self.source[e], self.target[e], self.flow[e]))
    }

    /// Total flow remaining on artificial arcs; zero iff the real arcs carry a
    /// feasible flow.
    pub(crate) fn artificial_flow(&self) -> i64 {
        self.flow[..self.node_num].iter().sum()
    }

    pub(crate) fn potentials(&self) -> &[i64] {
        &self.pi[..self.node_num]
    }

    pub(crate) fn run(&mut self) -> Outcome {
        let search = self.real_arc_count();
        self.block_size = ((search as f64).sqrt().ceil() as usize).max(MIN_BLOCK_SIZE);
        if self.next_arc < self.node_num || self.next_arc >= self.source.len() {
            self.next_arc = self.node_num;
        }
        if search == 0 {
            return Outcome::Optimal;
        }
        while self.find_entering_arc() {
            self.find_join_node();
            let change = self.find_leaving_arc();
            if self.delta >= INF {
                return Outcome::Unbounded;
            }
            self.change_flow(change);
            if change {
                self.update_tree_structure();
                self.update_potential();
            }
            self.pivots += 1;
        }
        Outcome::Optimal
    }

    #[inline]
    fn reduced(&self, e: usize) -> i64 {
        self.state[e] as i64 * (self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]])
    }

    fn find_entering_arc(&mut self) -> bool {
        let first = self.node_num;
        let end = self.source.len();
        let mut min = 0i64;
        let mut cnt = self.block_size;
        let mut e = self.next_arc;
        let mut visited = 0usize;
        let total = end - first;
        while visited < total {
            let c = self.reduced(e);
            if c < min {
                min = c;
                self.in_arc = e;
            }
            e += 1;
            if e == end {
                e = first;
            }
            visited += 1;
            cnt -= 1;
            if cnt == 0 {
                if min < 0 {
                    self.next_arc = e;
                    return true;
                }
                cnt = self.block_size;
            }
        }
        if min < 0 {
            self.next_arc = e;
            true
        } else {
            false
        }
    }

    fn find_join_node(&mut self) {
        let mut u = self.source[self.in_arc];
        let mut v = self.target[self.in_arc];
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving_arc(&mut self) -> bool {
        let (first, second) = if self.state[self.in_arc] == STATE_LOWER {
            (self.source[self.in_arc], self.target[self.in_arc])
        } else {
            (self.target[self.in_arc], self.source[self.in_arc])
        };
        self.delta = INF;
        let mut result = 0;

        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_DOWN {
                INF
            } else {
                self.flow[e]
            };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }

        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.pred_dir[u] == DIR_UP { INF } else { self.flow[e] };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }

        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self, change: bool) {
        if self.delta > 0 {
            let val = self.state[self.in_arc] as i64 * self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source[self.in_arc];
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= self.pred_dir[u] as i64 * val;
                u = self.parent[u];
            }
            let mut u = self.target[self.in_arc];
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += self.pred_dir[u] as i64 * val;
                u = self.parent[u];
            }
        }
        if change {
            self.state[self.in_arc] = STATE_TREE;
            let out = self.pred[self.u_out];
            debug_assert_eq!(self.flow[out], 0);
            self.state[out] = STATE_LOWER;
        } else {
            self.state[self.in_arc] = -self.state[self.in_arc];
        }
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;

        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            // Re-hang the stem u_in -> ... -> u_out under v_in.
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source[in_arc] { DIR_UP } else { DIR_DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in] - self.pi[self.u_in] - self.pred_dir[self.u_in] as i64 * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }
}
