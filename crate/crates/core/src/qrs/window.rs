//! Trailing-window statistics over time-stamped series.
//!
//! Both statistics cover entries with time in `(t − window, t]` and run in
//! amortised O(n).

use std::collections::VecDeque;

/// Trailing mean; the running sum is compensated (Neumaier) so it does not
/// drift from a fresh summation over long records.
pub fn moving_average(series: &[(f64, f64)], window: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(series.len());
    let mut sum = CompensatedSum::default();
    let mut start = 0;
    for (i, &(t, v)) in series.iter().enumerate() {
        sum.add(v);
        while series[start].0 <= t - window {
            sum.add(-series[start].1);
            start += 1;
        }
        out.push((t, sum.value() / (i + 1 - start) as f64));
    }
    out
}

/// Trailing maximum via a monotone deque of candidate indices.
pub fn moving_max(series: &[(f64, f64)], window: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(series.len());
    let mut dq: VecDeque<usize> = VecDeque::new();
    for (i, &(t, v)) in series.iter().enumerate() {
        while dq.back().is_some_and(|&j| series[j].1 <= v) {
            dq.pop_back();
        }
        dq.push_back(i);
        while dq.front().is_some_and(|&j| series[j].0 <= t - window) {
            dq.pop_front();
        }
        out.push((t, series[*dq.front().expect("current entry is in the window")].1));
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
