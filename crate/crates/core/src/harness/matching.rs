//! Detection-to-beat matching and detection scores.

/// Default matching tolerance (s).
pub const DEFAULT_TOLERANCE: f64 = 0.150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchResult {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    /// number of reference beats
    pub p: usize,
    /// number of detections
    pub pp: usize,
}

impl MatchResult {
    pub fn merge(self, other: MatchResult) -> MatchResult {
        MatchResult {
            tp: self.tp + other.tp,
            fn_: self.fn_ + other.fn_,
            fp: self.fp + other.fp,
            p: self.p + other.p,
            pp: self.pp + other.pp,
        }
    }
}

impl std::iter::Sum for MatchResult {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(MatchResult::default(), MatchResult::merge)
    }
}

/// One-to-one pairs `(detection index, beat index)`.
///
/// Candidate pairs within `tol` are taken in order of increasing distance;
/// a pair is kept when neither side has been used yet.
pub fn match_pairs(dets: &[f64], beats: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    let mut lo = 0;
    for (i, &d) in dets.iter().enumerate() {
        while lo < beats.len() && beats[lo] < d - tol {
            lo += 1;
        }
        for (j, &b) in beats.iter().enumerate().skip(lo) {
            if b > d + tol {
                break;
            }
            cand.push(((d - b).abs(), i, j));
        }
    }
    // ties broken by the earlier time of the pair, so swapping roles gives the same pairs
    cand.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| dets[a.1].min(beats[a.2]).total_cmp(&dets[b.1].min(beats[b.2])))
    });
    let mut det_used = vec![false; dets.len()];
    let mut beat_used = vec![false; beats.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in cand {
        if !det_used[i] && !beat_used[j] {
            det_used[i] = true;
            beat_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Greedy nearest-neighbour matching of time-sorted detections to beats.
pub fn match_detections(dets: &[f64], beats: &[f64], tol: f64) -> MatchResult {
    let tp = match_pairs(dets, beats, tol).len();
    MatchResult { tp, fn_: beats.len() - tp, fp: dets.len() - tp, p: beats.len(), pp: dets.len() }
}

/// `(TP/P, TP/PP)`; `None` where the denominator is zero.
pub fn tpr_ppv(m: &MatchResult) -> (Option<f64>, Option<f64>) {
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    (ratio(m.tp, m.p), ratio(m.tp, m.pp))
}

/// Formats an optional ratio as a percentage, or `N/A`.
pub fn format_pct(v: Option<f64>) -> String {
    v.map_or_else(|| "N/A".to_string(), |x| format!("{:.1}", 100.0 * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_detections() {
        let b = [0.5, 1.3, 2.0];
        assert_eq!(match_detections(&b, &b, 0.15), MatchResult { tp: 3, fn_: 0, fp: 0, p: 3, pp: 3 });
    }

    #[test]
    fn detection_between_two_beats_goes_to_nearer() {
        let m = match_detections(&[1.04], &[1.0, 1.1], 0.15);
        assert_eq!((m.tp, m.fn_, m.fp), (1, 1, 0));
        assert_eq!(match_pairs(&[1.04], &[1.0, 1.1], 0.15), vec![(0, 0)]);
        assert_eq!(match_pairs(&[1.06], &[1.0, 1.1], 0.15), vec![(0, 1)]);
    }

    #[test]
    fn no_detections() {
        assert_eq!(match_detections(&[], &[1.0, 2.0], 0.15), MatchResult { tp: 0, fn_: 2, fp: 0, p: 2, pp: 0 });
    }

    #[test]
    fn greedy_prefers_globally_nearest() {
        // the second detection is closer to beat 1 than the first one is
        let pairs = match_pairs(&[0.9, 1.02], &[1.0], 0.15);
        assert_eq!(pairs, vec![(1, 0)]);
    }

    #[test]
    fn tolerance_is_inclusive() {
        assert_eq!(match_detections(&[1.25], &[1.0], 0.25).tp, 1);
    }

    #[test]
    fn ratios() {
        let m = MatchResult { tp: 9, fn_: 1, fp: 3, p: 10, pp: 12 };
        assert_eq!(tpr_ppv(&m), (Some(0.9), Some(0.75)));
        let none = MatchResult::default();
        assert_eq!(tpr_ppv(&none), (None, None));
        assert_eq!(format_pct(None), "N/A");
        assert_eq!(format_pct(Some(0.945)), "94.5");
    }

    fn sorted(v: Vec<f64>) -> Vec<f64> {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v
    }

    proptest! {
        #[test]
        fn accounting_and_symmetry(
            d in prop::collection::vec(0.0f64..20.0, 0..40).prop_map(sorted),
            b in prop::collection::vec(0.0f64..20.0, 0..40).prop_map(sorted),
            tol in 0.0f64..1.0,
        ) {
            let m = match_detections(&d, &b, tol);
            prop_assert_eq!(m.p, m.tp + m.fn_);
            prop_assert_eq!(m.pp, m.tp + m.fp);
            prop_assert!(m.tp <= m.p && m.tp <= m.pp);
            let s = match_detections(&b, &d, tol);
            prop_assert_eq!(s.tp, m.tp);
            prop_assert_eq!(s.fn_, m.fp);
            prop_assert_eq!(s.fp, m.fn_);
            for (i, j) in match_pairs(&d, &b, tol) {
                prop_assert!((d[i] - b[j]).abs() <= tol);
            }
        }

        #[test]
        fn tp_monotone_in_tolerance(
            d in prop::collection::vec(0.0f64..10.0, 0..30).prop_map(sorted),
            b in prop::collection::vec(0.0f64..10.0, 0..30).prop_map(sorted),
            t1 in 0.0f64..0.5,
            extra in 0.0f64..0.5,
        ) {
            prop_assert!(match_detections(&d, &b, t1).tp <= match_detections(&d, &b, t1 + extra).tp);
        }
    }
}
