//! Allen-style successor relations and epistemic equivalence classes.
//!
//! Every enumeration returns intervals ordered by length, then
//! lexicographically by configuration index, without duplicates.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::{InterpretedSystem, Interval, SystemError};

/// The forward relations the engines enumerate directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    A,
    B,
    Bbar,
    D,
    E,
    N,
}

impl Relation {
    /// Whether successors can be arbitrarily long.
    pub fn is_unbounded(self) -> bool {
        matches!(self, Relation::A | Relation::Bbar | Relation::N)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::A => "A",
            Relation::B => "B",
            Relation::Bbar => "Bbar",
            Relation::D => "D",
            Relation::E => "E",
            Relation::N => "N",
        })
    }
}

fn sort_canonical(mut v: Vec<Vec<usize>>) -> Vec<Interval> {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v.dedup();
    v.into_iter().map(Interval::new).collect()
}

fn extend_paths(
    sys: &InterpretedSystem,
    path: &mut Vec<usize>,
    max_len: usize,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(path.clone());
    if path.len() >= max_len {
        return;
    }
    let last = *path.last().expect("non-empty");
    for &h in sys.successors(last) {
        path.push(h);
        extend_paths(sys, path, max_len, out);
        path.pop();
    }
}

/// All paths of length `1..=max_len` starting at `start`.
pub fn paths_from(sys: &InterpretedSystem, start: usize, max_len: usize) -> Vec<Interval> {
    let mut out = Vec::new();
    if max_len > 0 {
        extend_paths(sys, &mut vec![start], max_len, &mut out);
    }
    sort_canonical(out)
}

/// Number of paths of length `1..=max_len` from any of `starts`, counting
/// stops once the total exceeds `cap` (the returned value is then `> cap`).
pub fn count_paths(sys: &InterpretedSystem, starts: &[usize], max_len: usize, cap: u128) -> u128 {
    let n = sys.num_configs();
    // per_len[g]: number of paths of the current length starting at g
    let mut per_len = vec![1u128; n];
    let mut total: u128 = 0;
    for len in 1..=max_len {
        let mut stable = false;
        if len > 1 {
            let next: Vec<u128> = (0..n)
                .map(|g| {
                    sys.successors(g)
                        .iter()
                        .fold(0u128, |acc, &h| acc.saturating_add(per_len[h]))
                })
                .collect();
            stable = next == per_len;
            per_len = next;
        }
        let layer = starts
            .iter()
            .fold(0u128, |acc, &s| acc.saturating_add(per_len[s]));
        if layer == 0 {
            break;
        }
        total = total.saturating_add(layer);
        if stable {
            // every remaining length contributes the same amount
            let rest = (max_len - len) as u128;
            total = total.saturating_add(layer.saturating_mul(rest));
            break;
        }
        if total > cap {
            break;
        }
    }
    total
}

/// Intervals `J` with `I R J`.
///
/// `max_len` bounds `|J|` for the unbounded relations A, B̄ and N and is
/// required for them; B, D and E ignore it.
pub fn allen_successors(
    sys: &InterpretedSystem,
    interval: &Interval,
    relation: Relation,
    max_len: Option<usize>,
) -> Result<Vec<Interval>, SystemError> {
    let c = interval.configs();
    let n = c.len();
    let bound = || max_len.ok_or(SystemError::MissingBound(relation));
    let out = match relation {
        Relation::B => (1..n).map(|k| c[..k].to_vec()).collect(),
        Relation::E => (1..n).map(|k| c[k..].to_vec()).collect(),
        Relation::D => {
            let mut v = Vec::new();
            for i in 1..n {
                for j in i + 1..n {
                    v.push(c[i..j].to_vec());
                }
            }
            v
        }
        Relation::A => {
            let mut v = Vec::new();
            let m = bound()?;
            if m > 0 {
                extend_paths(sys, &mut vec![interval.last()], m, &mut v);
            }
            v
        }
        Relation::N => {
            let m = bound()?;
            let mut v = Vec::new();
            if m > 0 {
                for &h in sys.successors(interval.last()) {
                    extend_paths(sys, &mut vec![h], m, &mut v);
                }
            }
            v
        }
        Relation::Bbar => {
            let m = bound()?;
            let mut v = Vec::new();
            if m > n {
                let mut tails = Vec::new();
                extend_paths(sys, &mut vec![interval.last()], m - n + 1, &mut tails);
                for t in tails.into_iter().filter(|t| t.len() > 1) {
                    let mut ext = c.to_vec();
                    ext.extend_from_slice(&t[1..]);
                    v.push(ext);
                }
            }
            v
        }
    };
    Ok(sort_canonical(out))
}

/// Configurations reachable from `g` in one or more steps.
pub fn strictly_reachable(sys: &InterpretedSystem, g: usize) -> Vec<usize> {
    let mut seen = vec![false; sys.num_configs()];
    let mut queue: VecDeque<usize> = sys.successors(g).iter().copied().collect();
    while let Some(h) = queue.pop_front() {
        if !seen[h] {
            seen[h] = true;
            queue.extend(sys.successors(h).iter().copied());
        }
    }
    (0..sys.num_configs()).filter(|&h| seen[h]).collect()
}

/// Intervals of length at most `max_len` starting somewhere reachable from
/// `last(I)` in at least one step.
pub fn later_successors(
    sys: &InterpretedSystem,
    interval: &Interval,
    max_len: usize,
) -> Vec<Interval> {
    let mut v = Vec::new();
    if max_len > 0 {
        for h in strictly_reachable(sys, interval.last()) {
            extend_paths(sys, &mut vec![h], max_len, &mut v);
        }
    }
    sort_canonical(v)
}

pub fn epi_equiv(sys: &InterpretedSystem, i: &Interval, j: &Interval, agent: usize) -> bool {
    i.len() == j.len()
        && i.configs()
            .iter()
            .zip(j.configs())
            .all(|(&a, &b)| sys.local(a, agent) == sys.local(b, agent))
}

fn matching_paths(
    sys: &InterpretedSystem,
    template: &[usize],
    agent: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let k = path.len();
    if k == template.len() {
        out.push(path.clone());
        return;
    }
    let want = sys.local(template[k], agent);
    let candidates: Vec<usize> = if k == 0 {
        sys.reachable_configs()
    } else {
        sys.successors(path[k - 1]).to_vec()
    };
    for h in candidates {
        if sys.local(h, agent) == want {
            path.push(h);
            matching_paths(sys, template, agent, path, out);
            path.pop();
        }
    }
}

/// Intervals (with reachable start) indistinguishable from `I` for `agent`.
pub fn epi_class(sys: &InterpretedSystem, interval: &Interval, agent: usize) -> Vec<Interval> {
    let mut out = Vec::new();
    matching_paths(sys, interval.configs(), agent, &mut Vec::new(), &mut out);
    sort_canonical(out)
}

/// Closure of `{I}` under the indistinguishability of every agent in `group`.
pub fn common_class(
    sys: &InterpretedSystem,
    interval: &Interval,
    group: &[usize],
) -> Vec<Interval> {
    let mut seen: BTreeSet<Interval> = BTreeSet::from([interval.clone()]);
    let mut queue = VecDeque::from([interval.clone()]);
    while let Some(j) = queue.pop_front() {
        for &agent in group {
            for k in epi_class(sys, &j, agent) {
                if seen.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
    }
    sort_canonical(seen.into_iter().map(Interval::into_configs).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::tests::is_ex;

    fn iv(s: &InterpretedSystem, names: &str) -> Interval {
        s.interval_by_names(&names.split_whitespace().collect::<Vec<_>>())
            .unwrap()
    }

    fn names(s: &InterpretedSystem, v: &[Interval]) -> Vec<String> {
        v.iter().map(|i| s.format_interval(i)).collect()
    }

    #[test]
    fn prefixes_and_meets() {
        let s = is_ex();
        let b = allen_successors(&s, &iv(&s, "g1 g2 g3"), Relation::B, None).unwrap();
        assert_eq!(names(&s, &b), ["g1", "g1 g2"]);
        let a = allen_successors(&s, &iv(&s, "g1"), Relation::A, Some(3)).unwrap();
        assert_eq!(names(&s, &a), ["g1", "g1 g2", "g1 g2 g1", "g1 g2 g3"]);
        let n = allen_successors(&s, &iv(&s, "g1 g2"), Relation::N, Some(2)).unwrap();
        assert_eq!(names(&s, &n), ["g1", "g3", "g1 g2", "g3 g1"]);
        assert!(allen_successors(&s, &iv(&s, "g1"), Relation::A, None).is_err());
    }

    #[test]
    fn infixes_suffixes_extensions() {
        let s = is_ex();
        let i = iv(&s, "g1 g2 g3");
        let d = allen_successors(&s, &i, Relation::D, None).unwrap();
        assert_eq!(names(&s, &d), ["g2"]);
        let e = allen_successors(&s, &i, Relation::E, None).unwrap();
        assert_eq!(names(&s, &e), ["g3", "g2 g3"]);
        let bb = allen_successors(&s, &iv(&s, "g1 g2"), Relation::Bbar, Some(3)).unwrap();
        assert_eq!(names(&s, &bb), ["g1 g2 g1", "g1 g2 g3"]);
    }

    #[test]
    fn later_intervals() {
        let s = is_ex();
        assert_eq!(
            names(&s, &later_successors(&s, &iv(&s, "g1"), 1)),
            ["g1", "g2", "g3"]
        );
        assert!(later_successors(&s, &iv(&s, "g3"), 1).contains(&Interval::point(2)));
        let dead = crate::system::SystemDef::from_graph(2, &[(0, 1)], 0, vec![]);
        let d = InterpretedSystem::new(dead).unwrap();
        assert!(later_successors(&d, &Interval::point(1), 3).is_empty());
    }

    #[test]
    fn epistemic_classes() {
        let s = is_ex();
        assert!(epi_equiv(&s, &iv(&s, "g1 g2"), &iv(&s, "g2 g3"), 0));
        assert!(!epi_equiv(&s, &iv(&s, "g1 g2"), &iv(&s, "g2 g3"), 1));
        assert_eq!(
            names(&s, &epi_class(&s, &iv(&s, "g1"), 0)),
            ["g1", "g2", "g3"]
        );
        assert_eq!(names(&s, &epi_class(&s, &iv(&s, "g1 g2"), 1)), ["g1 g2"]);
        assert_eq!(
            names(&s, &common_class(&s, &iv(&s, "g1"), &[0, 1])),
            ["g1", "g2", "g3"]
        );
        assert_eq!(names(&s, &common_class(&s, &iv(&s, "g1"), &[1])), ["g1"]);
    }

    #[test]
    fn path_counts() {
        let s = is_ex();
        // lengths 1..=3 from g1: g1 | g1g2 | g1g2g1 g1g2g3
        assert_eq!(count_paths(&s, &[0], 3, u128::MAX), 4);
        assert_eq!(count_paths(&s, &[0], 3, 1), 2);
        assert_eq!(paths_from(&s, 0, 3).len(), 4);
        let lp = InterpretedSystem::new(crate::system::SystemDef::from_graph(
            1,
            &[(0, 0)],
            0,
            vec![],
        ))
        .unwrap();
        assert_eq!(count_paths(&lp, &[0], 1 << 40, 10), 1 << 40);
    }
}
