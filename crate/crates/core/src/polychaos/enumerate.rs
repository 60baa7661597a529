use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::spec::{ChaosSpec, ChaosTerm, Phase, TemporalFactor};

/// Truncation of the target set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub max_total_degree: usize,
    pub max_delay: usize,
    /// Optional per-total-degree delay limits; entry `d - 1` bounds every
    /// delay of a degree-`d` target. Missing entries fall back to `max_delay`.
    #[serde(default)]
    pub delay_per_degree: Vec<usize>,
    /// Caps the degree of any single factor (needed for bases that only
    /// exist up to a low degree, e.g. two-point inputs).
    #[serde(default)]
    pub max_factor_degree: Option<usize>,
    /// Temporal harmonics `k`; each static target is also emitted times
    /// `cos(k Omega t)` and `sin(k Omega t)`.
    #[serde(default)]
    pub harmonics: Vec<usize>,
    #[serde(default = "yes")]
    pub include_static: bool,
}

fn yes() -> bool {
    true
}

impl SweepSpec {
    pub fn new(max_total_degree: usize, max_delay: usize) -> Self {
        SweepSpec {
            max_total_degree,
            max_delay,
            delay_per_degree: Vec::new(),
            max_factor_degree: None,
            harmonics: Vec::new(),
            include_static: true,
        }
    }

    pub fn delay_limit(&self, total_degree: usize) -> usize {
        self.delay_per_degree
            .get(total_degree - 1)
            .copied()
            .unwrap_or(self.max_delay)
    }

    /// Largest delay referenced by any enumerated target.
    pub fn max_referenced_delay(&self) -> usize {
        (1..=self.max_total_degree).map(|d| self.delay_limit(d)).max().unwrap_or(0)
    }

    /// Ordered by total degree, number of factors, delays, then degrees.
    pub fn enumerate(&self) -> Vec<ChaosSpec> {
        let mut statics = Vec::new();
        for d in 1..=self.max_total_degree {
            let limit = self.delay_limit(d);
            let cap = self.max_factor_degree.unwrap_or(d);
            for k in 1..=d.min(limit) {
                let mut delays: Vec<usize> = (1..=k).collect();
                loop {
                    for_each_composition(d, k, &mut |degs| {
                        if degs.iter().all(|&n| n <= cap) {
                            let terms = delays
                                .iter()
                                .zip(degs)
                                .map(|(&delay, &degree)| ChaosTerm { delay, degree })
                                .collect();
                            statics.push(ChaosSpec::new(terms, None).expect("valid by construction"));
                        }
                    });
                    if !next_combination(&mut delays, limit) {
                        break;
                    }
                }
            }
        }
        let mut out = Vec::new();
        if self.include_static {
            out.extend(statics.iter().cloned());
        }
        if !self.harmonics.is_empty() {
            for s in &statics {
                for &h in &self.harmonics {
                    for phase in [Phase::Cos, Phase::Sin] {
                        out.push(s.with_temporal(Some(TemporalFactor { harmonic: h, phase })));
                    }
                }
            }
        }
        out
    }
}

/// Advances an increasing k-subset of `1..=n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - (k - 1 - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Compositions of `d` into `k` positive parts, lexicographic.
fn for_each_composition(d: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(rem: usize, slots: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slots == 1 {
            buf.push(rem);
            f(buf);
            buf.pop();
            return;
        }
        for first in 1..=rem - (slots - 1) {
            buf.push(first);
            rec(rem - first, slots - 1, buf, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(k);
    rec(d, k, &mut buf, f);
}

pub fn enumerate_chaos(
    max_total_degree: usize,
    max_delay: usize,
    temporal: Option<RangeInclusive<usize>>,
) -> Vec<ChaosSpec> {
    let mut s = SweepSpec::new(max_total_degree, max_delay);
    if let Some(r) = temporal {
        s.harmonics = r.collect();
    }
    s.enumerate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
    }

    #[test]
    fn small_example_in_order() {
        let got: Vec<String> = enumerate_chaos(2, 2, None).iter().map(|s| s.to_string()).collect();
        assert_eq!(got, vec!["1@1", "1@2", "2@1", "2@2", "1@1*1@2"]);
        assert_eq!(enumerate_chaos(1, 1, None).len(), 1);
    }

    #[test]
    fn count_matches_multiset_formula() {
        let n = enumerate_chaos(4, 9, None).len();
        assert_eq!(n, (1..=4).map(|d| binom(9 + d - 1, d)).sum::<usize>());
        assert_eq!(n, 714);
    }

    // Brute force: every degree vector over delays 1..=S with 1 <= sum <= D.
    #[test]
    fn brute_force_cross_check() {
        let (dmax, smax) = (4usize, 5usize);
        let mut expect = BTreeSet::new();
        let mut degs = vec![0usize; smax];
        loop {
            let tot: usize = degs.iter().sum();
            if tot >= 1 && tot <= dmax {
                let terms: Vec<String> = degs
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(i, &n)| format!("{n}@{}", i + 1))
                    .collect();
                expect.insert(terms.join("*"));
            }
            let mut i = 0;
            while i < smax {
                degs[i] += 1;
                if degs[i] <= dmax {
                    break;
                }
                degs[i] = 0;
                i += 1;
            }
            if i == smax {
                break;
            }
        }
        let got: BTreeSet<String> = enumerate_chaos(dmax, smax, None).iter().map(|s| s.to_string()).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn temporal_cross_product_appended() {
        let specs = enumerate_chaos(1, 2, Some(1..=2));
        let names: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            names,
            vec![
                "1@1", "1@2", "1@1*cos@1", "1@1*sin@1", "1@1*cos@2", "1@1*sin@2", "1@2*cos@1", "1@2*sin@1",
                "1@2*cos@2", "1@2*sin@2"
            ]
        );
    }

    #[test]
    fn per_degree_limits_and_factor_cap() {
        let mut s = SweepSpec::new(3, 10);
        s.delay_per_degree = vec![10, 3, 2];
        s.max_factor_degree = Some(1);
        let specs = s.enumerate();
        assert_eq!(specs.iter().filter(|x| x.total_degree() == 1).count(), 10);
        assert_eq!(specs.iter().filter(|x| x.total_degree() == 2).count(), 3);
        assert_eq!(specs.iter().filter(|x| x.total_degree() == 3).count(), 0);
        assert!(specs.iter().all(|x| x.max_factor_degree() == 1));
    }
}
