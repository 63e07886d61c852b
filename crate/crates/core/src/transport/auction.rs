//! Forward auction with ε-scaling on a sparse arc set, for problems in which
//! every source carries one unit and target `j` takes `caps[j]` units. The
//! result seeds the simplex basis; optimality is certified there.
//!
//! Each target keeps one price per unit slot in a min-heap; a bid replaces
//! the cheapest slot and evicts its holder. Giving up is an option worth
//! `-GIVE_UP_FACTOR * max_cost`, so rows whose arcs cannot all be served
//! stop bidding once prices pass that level. Under a shortage a later phase
//! may strand more sources than the shortage requires, so the caller must
//! place whatever is left unassigned.

use std::collections::VecDeque;

const NONE: u32 = u32::MAX;
const GIVE_UP_FACTOR: i64 = 4;
/// Factor by which ε shrinks between phases.
const EPS_STEP: i64 = 8;

pub(crate) struct Auction {
    slot_start: Vec<usize>,
    price: Vec<i64>,
    holder: Vec<u32>,
    /// Position in its row of each source's assigned arc.
    choice: Vec<Option<usize>>,
    give_up: i64,
}

impl Auction {
    /// `cost_bound` bounds every arc cost that will ever be offered.
    pub(crate) fn new(caps: &[usize], sources: usize, cost_bound: i64) -> Self {
        let mut slot_start = Vec::with_capacity(caps.len() + 1);
        slot_start.push(0usize);
        for &c in caps {
            slot_start.push(slot_start.last().unwrap() + c);
        }
        let slots = *slot_start.last().unwrap();
        Self {
            slot_start,
            price: vec![0; slots],
            holder: vec![NONE; slots],
            choice: vec![None; sources],
            give_up: -GIVE_UP_FACTOR * cost_bound.max(1),
        }
    }

    pub(crate) fn choice(&self) -> &[Option<usize>] {
        &self.choice
    }

    /// ε-scaling phases from `eps_start` down to `eps_final`; each phase
    /// restarts the assignment and keeps the prices. `rows[i]` holds the
    /// `(cost, target)` arcs of source `i`.
    pub(crate) fn run(&mut self, rows: &[Vec<(i64, u32)>], eps_start: i64, eps_final: i64) {
        let eps_final = eps_final.max(1);
        let mut eps = eps_start.max(eps_final);
        loop {
            // A common shift changes no comparison but keeps the give-up
            // level meaningful: after a phase the spread is below the cost
            // bound plus ε.
            let floor = self.price.iter().copied().min().unwrap_or(0);
            self.price.iter_mut().for_each(|p| *p -= floor);
            self.holder.iter_mut().for_each(|h| *h = NONE);
            self.choice.iter_mut().for_each(|c| *c = None);
            let queue: VecDeque<usize> = (0..rows.len()).filter(|&i| !rows[i].is_empty()).collect();
            self.bid(rows, queue, eps);
            if eps == eps_final {
                return;
            }
            eps = (eps / EPS_STEP).max(eps_final);
        }
    }

    fn bid(&mut self, rows: &[Vec<(i64, u32)>], mut queue: VecDeque<usize>, eps: i64) {
        let ss = &self.slot_start;
        while let Some(i) = queue.pop_front() {
            let (mut best, mut second) = (i64::MIN, self.give_up);
            let mut best_pos = usize::MAX;
            for (pos, &(c, j)) in rows[i].iter().enumerate() {
                let top = ss[j as usize];
                if top == ss[j as usize + 1] {
                    continue;
                }
                let v = -c - self.price[top];
                if v > best {
                    second = second.max(best);
                    best = v;
                    best_pos = pos;
                } else if v > second {
                    second = v;
                }
            }
            if best_pos == usize::MAX || best < self.give_up {
                continue;
            }
            let (c, j) = rows[i][best_pos];
            let (lo, hi) = (ss[j as usize], ss[j as usize + 1]);
            // The next-cheapest unit of the same target is also an option.
            if let Some(p2) = [lo + 1, lo + 2]
                .iter()
                .filter(|&&s| s < hi)
                .map(|&s| self.price[s])
                .min()
            {
                second = second.max(-c - p2);
            }
            let bid = self.price[lo] + (best - second) + eps;
            let evicted = self.holder[lo];
            self.price[lo] = bid;
            self.holder[lo] = i as u32;
            sift_down(&mut self.price[lo..hi], &mut self.holder[lo..hi]);
            self.choice[i] = Some(best_pos);
            if evicted != NONE {
                self.choice[evicted as usize] = None;
                queue.push_back(evicted as usize);
            }
        }
    }
}

/// Restores the min-heap after the root's key grew.
fn sift_down(price: &mut [i64], holder: &mut [u32]) {
    let n = price.len();
    let mut k = 0;
    loop {
        let (l, r) = (2 * k + 1, 2 * k + 2);
        let mut m = k;
        if l < n && price[l] < price[m] {
            m = l;
        }
        if r < n && price[r] < price[m] {
            m = r;
        }
        if m == k {
            return;
        }
        price.swap(k, m);
        holder.swap(k, m);
        k = m;
    }
}
