//! Proper edge colouring of the bond graph into commuting gate layers.

use super::Layer;

const SEARCH_BUDGET: usize = 2_000_000;

/// Deterministic proper edge colouring.
///
/// Greedy first-fit over bonds in `(min, max)` order. When that needs more
/// colours than the maximum coordination, a saturation-ordered backtracking
/// search for a colouring with exactly that many colours is tried, and its
/// result is used if it finishes within a fixed budget.
pub fn color_edges(n_sites: usize, pairs: &[(usize, usize)]) -> Vec<Layer> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (pairs[i].0.min(pairs[i].1), pairs[i].0.max(pairs[i].1)));

    let mut greedy = vec![0u8; pairs.len()];
    let mut used = vec![0u64; n_sites];
    for &i in &order {
        let (a, b) = pairs[i];
        let free = !(used[a] | used[b]);
        let c = free.trailing_zeros() as u8;
        greedy[i] = c;
        used[a] |= 1 << c;
        used[b] |= 1 << c;
    }
    let colors = greedy.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut degree = vec![0usize; n_sites];
    for &(a, b) in pairs {
        degree[a] += 1;
        degree[b] += 1;
    }
    let max_degree = degree.into_iter().max().unwrap_or(0);
    if colors > max_degree {
        if let Some(exact) = backtrack(n_sites, pairs, max_degree) {
            return exact.into_iter().map(Layer).collect();
        }
    }
    greedy.into_iter().map(Layer).collect()
}

fn backtrack(n_sites: usize, pairs: &[(usize, usize)], k: usize) -> Option<Vec<u8>> {
    struct Search<'a> {
        pairs: &'a [(usize, usize)],
        k: usize,
        color: Vec<Option<u8>>,
        used: Vec<u64>,
        steps: usize,
    }

    impl Search<'_> {
        fn pick(&self) -> Option<usize> {
            let full = (1u64 << self.k) - 1;
            let mut best: Option<(u32, usize)> = None;
            for (i, &(a, b)) in self.pairs.iter().enumerate() {
                if self.color[i].is_some() {
                    continue;
                }
                let sat = ((self.used[a] | self.used[b]) & full).count_ones();
                if best.is_none_or(|(s, _)| sat > s) {
                    best = Some((sat, i));
                }
            }
            best.map(|(_, i)| i)
        }

        fn run(&mut self) -> bool {
            self.steps += 1;
            if self.steps > SEARCH_BUDGET {
                return false;
            }
            let Some(i) = self.pick() else { return true };
            let (a, b) = self.pairs[i];
            for c in 0..self.k as u8 {
                let bit = 1u64 << c;
                if (self.used[a] | self.used[b]) & bit != 0 {
                    continue;
                }
                self.color[i] = Some(c);
                self.used[a] |= bit;
                self.used[b] |= bit;
                if self.run() {
                    return true;
                }
                self.color[i] = None;
                self.used[a] &= !bit;
                self.used[b] &= !bit;
                if self.steps > SEARCH_BUDGET {
                    return false;
                }
            }
            false
        }
    }

    if k == 0 || k >= 64 {
        return None;
    }
    let mut search = Search {
        pairs,
        k,
        color: vec![None; pairs.len()],
        used: vec![0; n_sites],
        steps: 0,
    };
    search.run().then(|| {
        search
            .color
            .into_iter()
            .map(|c| c.expect("all coloured"))
            .collect()
    })
}
