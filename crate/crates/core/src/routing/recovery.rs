//! Purification, temporary exclusion and neighbourhood trust smoothing.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::link_state::{EdgeKey, LinkRegistry};

/// One round of recurrence purification: `F² / (F² + (1−F)²)`.
pub fn purify_link(fidelity: f64) -> f64 {
    let f2 = fidelity * fidelity;
    let e = 1.0 - fidelity;
    f2 / (f2 + e * e)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Links that were purified (fidelity below the floor).
    pub purified: Vec<EdgeKey>,
    /// Purified links still below the floor, now excluded.
    pub excluded: Vec<EdgeKey>,
    /// Nodes whose incident links had trust smoothed.
    pub smoothed_nodes: Vec<usize>,
}

/// Purify active links below `f_min`, exclude those that stay below it until
/// `t + exclusion_s`, then smooth trust around every node touching a purified
/// link.
pub fn recover(links: &mut LinkRegistry, f_min: f64, t: f64, exclusion_s: f64) -> RecoveryReport {
    let mut report = RecoveryReport::default();
    let mut flagged_nodes = BTreeSet::new();
    for link in links.iter_mut().filter(|l| l.active) {
        if link.fidelity < f_min {
            link.fidelity = purify_link(link.fidelity);
            report.purified.push(link.key());
            flagged_nodes.insert(link.i);
            flagged_nodes.insert(link.j);
            if link.fidelity < f_min {
                link.excluded_until = Some(t + exclusion_s);
                report.excluded.push(link.key());
            }
        }
    }
    if flagged_nodes.is_empty() {
        return report;
    }

    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for link in links.active() {
        for node in [link.i, link.j] {
            if flagged_nodes.contains(&node) {
                let e = sums.entry(node).or_insert((0.0, 0));
                e.0 += link.trust;
                e.1 += 1;
            }
        }
    }
    let means: BTreeMap<usize, f64> = sums
        .into_iter()
        .map(|(n, (s, c))| (n, s / c as f64))
        .collect();
    for link in links.iter_mut().filter(|l| l.active) {
        link.trust = match (means.get(&link.i), means.get(&link.j)) {
            (Some(a), Some(b)) => 0.5 * (a + b),
            (Some(a), None) => *a,
            (None, Some(b)) => *b,
            (None, None) => continue,
        }
        .clamp(0.0, 1.0);
    }
    report.smoothed_nodes = means.into_keys().collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LinkSample;
    use crate::link_state::LinkState;
    use proptest::prelude::*;

    fn link(i: usize, j: usize, f: f64, trust: f64) -> LinkState {
        let mut l = LinkState::new(i, j, trust, 4);
        l.update(
            &LinkSample {
                loss_total_db: 0.0,
                transmittance: 1.0,
                fidelity: f,
                rate_bps: 1.0,
                qber: 0.5 * (1.0 - f),
                clamped: false,
            },
            100.0,
        );
        l
    }

    #[test]
    fn purification_values() {
        assert_eq!(purify_link(0.5), 0.5);
        assert_eq!(purify_link(1.0), 1.0);
        assert_eq!(purify_link(0.0), 0.0);
        assert!((purify_link(0.8) - 0.9412).abs() < 1e-4);
    }

    #[test]
    fn exclusion_decision() {
        let mut reg: LinkRegistry = [link(0, 1, 0.55, 0.9), link(1, 2, 0.58, 0.9), link(2, 3, 0.9, 0.9)]
            .into_iter()
            .collect();
        let report = recover(&mut reg, 0.6, 7.0, 10.0);
        assert_eq!(report.purified, vec![(0, 1), (1, 2)]);
        assert_eq!(report.excluded, vec![(0, 1)]);
        let a = reg.get(0, 1).unwrap();
        assert!((a.fidelity - 0.5990).abs() < 1e-4);
        assert_eq!(a.excluded_until, Some(17.0));
        assert!(a.is_excluded(17.0) && !a.is_excluded(17.5));
        let b = reg.get(1, 2).unwrap();
        assert!((b.fidelity - 0.6560).abs() < 1e-4);
        assert_eq!(b.excluded_until, None);
        assert_eq!(reg.get(2, 3).unwrap().fidelity, 0.9);
    }

    #[test]
    fn trust_smoothing_uses_neighbourhood_mean() {
        let mut reg: LinkRegistry = [link(0, 1, 0.5, 0.8), link(0, 2, 0.9, 0.6), link(0, 3, 0.9, 1.0)]
            .into_iter()
            .collect();
        let report = recover(&mut reg, 0.6, 0.0, 10.0);
        assert_eq!(report.smoothed_nodes, vec![0, 1]);
        for l in reg.iter() {
            assert!((l.trust - 0.8).abs() < 1e-12, "{:?}", l.key());
        }
    }

    #[test]
    fn healthy_network_is_untouched() {
        let before: LinkRegistry = [link(0, 1, 0.7, 0.8), link(1, 2, 0.65, 0.6)].into_iter().collect();
        let mut reg = before.clone();
        let report = recover(&mut reg, 0.6, 0.0, 10.0);
        assert_eq!(report, RecoveryReport::default());
        assert_eq!(reg, before);
    }

    proptest! {
        #[test]
        fn purification_moves_away_from_half(f in 0.0f64..=1.0) {
            let p = purify_link(f);
            prop_assert!((0.0..=1.0).contains(&p));
            if f > 0.5 && f < 1.0 {
                prop_assert!(p > f);
            }
            if f > 0.0 && f < 0.5 {
                prop_assert!(p < f);
            }
        }

        #[test]
        fn purification_monotone_above_half(a in 0.5f64..=1.0, b in 0.5f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(purify_link(lo) <= purify_link(hi));
        }
    }
}
