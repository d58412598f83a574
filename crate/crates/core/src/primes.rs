//! Segmented sieve of Eratosthenes exposed as an ascending prime stream.

use std::collections::HashSet;

const SEGMENT: u64 = 1 << 16;

/// Ascending primes `>= start`, sieved one segment at a time.
#[derive(Clone, Debug)]
pub struct PrimeStream {
    base_primes: Vec<u64>,
    base_limit: u64,
    segment_start: u64,
    buffer: Vec<u64>,
    cursor: usize,
}

impl PrimeStream {
    pub fn new(start: u64) -> Self {
        PrimeStream {
            base_primes: Vec::new(),
            base_limit: 1,
            segment_start: start.max(2),
            buffer: Vec::new(),
            cursor: 0,
        }
    }

    /// Extends the sieving primes to cover every composite below `hi`.
    fn ensure_base(&mut self, hi: u64) {
        let need = (hi as f64).sqrt() as u64 + 1;
        if need <= self.base_limit {
            return;
        }
        let limit = need.max(self.base_limit * 2).max(1024);
        let mut composite = vec![false; limit as usize + 1];
        let mut primes = Vec::new();
        for i in 2..=limit as usize {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= limit as usize {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        self.base_primes = primes;
        self.base_limit = limit;
    }

    fn fill(&mut self) {
        let lo = self.segment_start;
        let hi = lo.saturating_add(SEGMENT);
        self.ensure_base(hi);
        let mut composite = vec![false; (hi - lo) as usize];
        for &p in &self.base_primes {
            if p * p >= hi {
                break;
            }
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut j = first;
            while j < hi {
                composite[(j - lo) as usize] = true;
                j += p;
            }
        }
        self.buffer.clear();
        self.buffer
            .extend((lo..hi).filter(|&v| v >= 2 && !composite[(v - lo) as usize]));
        self.cursor = 0;
        self.segment_start = hi;
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.cursor >= self.buffer.len() {
            if self.segment_start == u64::MAX {
                return None;
            }
            self.fill();
        }
        let v = self.buffer[self.cursor];
        self.cursor += 1;
        Some(v)
    }
}

/// The first `count` primes `>= start` that are not in `skip`.
pub fn prime_stream(start: u64, count: usize, skip: &[u64]) -> Vec<u64> {
    let skip: HashSet<u64> = skip.iter().copied().collect();
    PrimeStream::new(start)
        .filter(|q| !skip.contains(q))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(prime_stream(2, 4, &[3]), vec![2, 5, 7, 11]);
        assert!(prime_stream(2, 0, &[]).is_empty());
        assert_eq!(prime_stream(90, 3, &[]), vec![97, 101, 103]);
    }

    #[test]
    fn crosses_segment_boundaries() {
        let start = SEGMENT - 50;
        let got = prime_stream(start, 20, &[]);
        let naive: Vec<u64> = (start..)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .take(20)
            .collect();
        assert_eq!(got, naive);
    }
}
