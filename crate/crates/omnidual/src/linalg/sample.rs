use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact_scalars::{PolyFn, Scalar, ScalarError};

use super::Matrix;

pub const DEFAULT_RETRIES: usize = 5;
pub const DEFAULT_RANGE: i64 = 6;

/// Deterministic source of small-integer sample points.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    range: i64,
    pub retries: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            range: DEFAULT_RANGE,
            retries: DEFAULT_RETRIES,
        }
    }

    pub fn with_range(mut self, range: i64) -> Self {
        self.range = range.max(1);
        self
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn scalar(&mut self) -> Scalar {
        Scalar::from_int(self.rng.gen_range(-self.range..=self.range))
    }

    pub fn point(&mut self, n: usize) -> Vec<Scalar> {
        (0..n).map(|_| self.scalar()).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A point accepted by `ok`, trying at most `retries` times.
    pub fn point_where(&mut self, n: usize, ok: impl Fn(&[Scalar]) -> bool) -> Option<Vec<Scalar>> {
        for _ in 0..self.retries.max(1) {
            let p = self.point(n);
            if ok(&p) {
                return Some(p);
            }
        }
        None
    }

    /// `count` points at which all `fns` are defined.
    pub fn points_avoiding(&mut self, n: usize, count: usize, fns: &[&PolyFn]) -> Vec<Vec<Scalar>> {
        let mut out = Vec::with_capacity(count);
        let mut misses = 0;
        while out.len() < count && misses < count * self.retries.max(1) {
            let p = self.point(n);
            if fns.iter().all(|f| f.eval(&p).is_ok()) {
                out.push(p);
            } else {
                misses += 1;
            }
        }
        out
    }
}

/// Outcome of evaluating a rank at several points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampledRank {
    pub ranks: Vec<usize>,
    pub points: Vec<Vec<Scalar>>,
}

impl SampledRank {
    pub fn constant(&self) -> Option<usize> {
        let first = *self.ranks.first()?;
        self.ranks.iter().all(|&r| r == first).then_some(first)
    }

    /// Indices of the first two samples with different ranks.
    pub fn jump(&self) -> Option<(usize, usize)> {
        let first = *self.ranks.first()?;
        self.ranks.iter().position(|&r| r != first).map(|j| (0, j))
    }

    pub fn label(&self) -> String {
        format!("sampled at {} points", self.points.len())
    }
}

/// Rank of a symbolic matrix at each point; points hitting a pole are skipped.
pub fn sampled_rank(m: &Matrix<PolyFn>, points: &[Vec<Scalar>]) -> SampledRank {
    let mut ranks = Vec::new();
    let mut used = Vec::new();
    for p in points {
        match m.eval_at(p) {
            Ok(v) => {
                ranks.push(v.rank());
                used.push(p.clone());
            }
            Err(ScalarError::PoleAtPoint) => continue,
            Err(_) => continue,
        }
    }
    SampledRank {
        ranks,
        points: used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = Sampler::new(7).point(5);
        let b = Sampler::new(7).point(5);
        assert_eq!(a, b);
        assert_ne!(a, Sampler::new(8).point(5));
    }

    #[test]
    fn skips_poles() {
        let inv_x = PolyFn::one().div_ref(&PolyFn::var(0)).unwrap();
        let pts = Sampler::new(1).points_avoiding(1, 20, &[&inv_x]);
        assert_eq!(pts.len(), 20);
        assert!(pts.iter().all(|p| !p[0].is_zero()));
    }

    #[test]
    fn rank_of_x_times_identity_jumps_at_zero() {
        let m = Matrix::from_fn(2, 2, |i, j| {
            if i == j {
                PolyFn::var(0)
            } else {
                PolyFn::zero()
            }
        });
        let pts = vec![vec![Scalar::from_int(1)], vec![Scalar::zero()]];
        let r = sampled_rank(&m, &pts);
        assert_eq!(r.ranks, vec![2, 0]);
        assert_eq!(r.jump(), Some((0, 1)));
    }
}
