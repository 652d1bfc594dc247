//! Brute-force and sampling oracles shared by the integration tests.

#![allow(dead_code)]

use sweepcvrp_core::Point;

/// SplitMix64, kept separate from the library's generator.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn points(&mut self, n: usize) -> Vec<Point> {
        (0..n).map(|_| Point::new(self.unit(), self.unit())).collect()
    }
}

fn for_each_permutation(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Shortest closed tour by trying every ordering with the first point fixed.
pub fn brute_force_tsp(points: &[Point]) -> f64 {
    let n = points.len();
    if n <= 1 {
        return 0.0;
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    for_each_permutation(&mut rest, 0, &mut |perm| {
        let mut len = points[0].dist(&points[perm[0]]);
        for w in perm.windows(2) {
            len += points[w[0]].dist(&points[w[1]]);
        }
        len += points[perm[perm.len() - 1]].dist(&points[0]);
        best = best.min(len);
    });
    best
}

/// Optimal CVRP cost: every set partition into blocks of at most `k`
/// terminals, each block routed by brute-force TSP through the depot.
pub fn brute_force_cvrp(terminals: &[Point], depot: Point, k: usize) -> f64 {
    let n = terminals.len();
    let full = (1usize << n) - 1;
    let mut block = vec![f64::NAN; 1 << n];
    for (mask, cost) in block.iter_mut().enumerate().skip(1) {
        if (mask as u32).count_ones() as usize <= k {
            let mut pts = vec![depot];
            pts.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| terminals[i]));
            *cost = brute_force_tsp(&pts);
        }
    }

    fn descend(remaining: usize, k: usize, block: &[f64], acc: f64, best: &mut f64) {
        if remaining == 0 {
            *best = best.min(acc);
            return;
        }
        let low = remaining & remaining.wrapping_neg();
        let others = remaining & !low;
        let mut sub = others;
        loop {
            let mask = sub | low;
            if (mask.count_ones() as usize) <= k {
                descend(remaining & !mask, k, block, acc + block[mask], best);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }

    let mut best = f64::INFINITY;
    descend(full, k, &block, 0.0, &mut best);
    if n == 0 {
        0.0
    } else {
        best
    }
}

/// Sample means and standard errors of `d`, `min(d, r)` and `[d >= r]`
/// for `v` uniform on the unit square.
pub struct MonteCarlo {
    pub mean: [f64; 3],
    pub stderr: [f64; 3],
}

pub fn monte_carlo(depot: Point, r: f64, samples: usize, rng: &mut TestRng) -> MonteCarlo {
    let mut sum = [0.0f64; 3];
    let mut sq = [0.0f64; 3];
    for _ in 0..samples {
        let v = Point::new(rng.unit(), rng.unit());
        let d = v.dist(&depot);
        let xs = [d, d.min(r), if d >= r { 1.0 } else { 0.0 }];
        for j in 0..3 {
            sum[j] += xs[j];
            sq[j] += xs[j] * xs[j];
        }
    }
    let n = samples as f64;
    let mut mean = [0.0; 3];
    let mut stderr = [0.0; 3];
    for j in 0..3 {
        mean[j] = sum[j] / n;
        let var = (sq[j] / n - mean[j] * mean[j]).max(0.0) * n / (n - 1.0);
        stderr[j] = (var / n).sqrt();
    }
    MonteCarlo { mean, stderr }
}
