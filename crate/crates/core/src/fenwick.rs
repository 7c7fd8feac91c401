//! Binary indexed tree over nonnegative weights with weighted sampling.

use rand::Rng;

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
    weights: Vec<f64>,
    top: usize,
}

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        let mut top = 1;
        while top * 2 <= n {
            top *= 2;
        }
        Fenwick {
            tree: vec![0.0; n + 1],
            weights: vec![0.0; n],
            top,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.weights.len()
    }

    pub(crate) fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    pub(crate) fn total(&self) -> f64 {
        let mut s = 0.0;
        let mut j = self.tree.len() - 1;
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `target`.
    pub(crate) fn find(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step /= 2;
        }
        // guard against rounding landing on a zero-weight slot
        let mut i = pos.min(self.weights.len() - 1);
        while self.weights[i] <= 0.0 && i > 0 {
            i -= 1;
        }
        i
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.total();
        self.find(rng.random::<f64>() * total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_search() {
        let mut f = Fenwick::new(5);
        for (i, w) in [1.0, 0.0, 2.0, 0.5, 1.5].into_iter().enumerate() {
            f.set(i, w);
        }
        assert_eq!(f.total(), 5.0);
        assert_eq!(f.find(0.5), 0);
        assert_eq!(f.find(1.0), 2);
        assert_eq!(f.find(2.99), 2);
        assert_eq!(f.find(3.2), 3);
        assert_eq!(f.find(4.9), 4);
        f.set(2, 0.0);
        assert_eq!(f.find(1.2), 3);
    }
}
