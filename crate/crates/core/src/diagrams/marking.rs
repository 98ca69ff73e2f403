//! `ω_s`-marked diagrams: explicit enumeration of markings, gap counting and
//! root-chord deletion. These serve as combinatorial oracles for the weight.
//!
//! A marking is stored as the number of marks in each interval
//! `1..=2|C|-1`; marks inside one interval are indistinguishable.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::enumerate::enumerate_decorated;
use super::{interval_labels, ChordDiagram, DecoratedDiagram, DiagramError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedDiagram {
    pub diagram: DecoratedDiagram,
    pub marks: Vec<u32>,
}

/// Mark budget for a chord, or `None` when the chord must cover a single
/// empty interval (`s = 1`, decoration 1).
fn budget(d: u32, s: u32) -> Option<u32> {
    (d * s >= 2).then(|| d * s - 2)
}

/// Covered interval indices (0-based) per intersection-order chord.
fn covered_intervals(d: &DecoratedDiagram) -> Vec<Vec<usize>> {
    let labels = interval_labels(d.base().chords(), d.shape().order());
    let mut out = vec![Vec::new(); d.chord_count()];
    for (i, label) in labels.into_iter().enumerate() {
        out[label - 1].push(i);
    }
    out
}

pub fn check_marked(d: &DecoratedDiagram, marks: &[u32], s: u32) -> Result<(), DiagramError> {
    let intervals = 2 * d.chord_count() - 1;
    if marks.len() != intervals {
        return Err(DiagramError::NotMarked(format!("expected {intervals} interval counts, got {}", marks.len())));
    }
    for (c, covered) in covered_intervals(d).iter().enumerate() {
        let total: u32 = covered.iter().map(|&i| marks[i]).sum();
        match budget(d.decorations()[c], s) {
            Some(b) if b != total => {
                return Err(DiagramError::NotMarked(format!("chord {} holds {total} marks, needs {b}", c + 1)))
            }
            None if covered.len() != 1 || total != 0 => {
                return Err(DiagramError::NotMarked(format!(
                    "decoration-1 chord {} must cover one empty interval",
                    c + 1
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn is_marked(d: &DecoratedDiagram, marks: &[u32], s: u32) -> bool {
    check_marked(d, marks, s).is_ok()
}

/// Weak compositions of `total` into `slots` parts.
fn weak_compositions(total: u32, slots: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, slots: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            acc.push(rest);
            out.push(acc.clone());
            acc.pop();
            return;
        }
        for first in 0..=rest {
            acc.push(first);
            rec(rest - first, slots - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, slots, &mut Vec::new(), &mut out);
    out
}

/// Per-chord placement options: each entry lists the admissible mark
/// vectors over that chord's covered intervals.
fn placements(d: &DecoratedDiagram, s: u32) -> (Vec<Vec<usize>>, Vec<Vec<Vec<u32>>>) {
    let covered = covered_intervals(d);
    let options = covered
        .iter()
        .zip(d.decorations())
        .map(|(cov, &deco)| match budget(deco, s) {
            Some(b) => weak_compositions(b, cov.len()),
            None if cov.len() == 1 => vec![vec![0]],
            None => Vec::new(),
        })
        .collect();
    (covered, options)
}

/// Every `ω_s`-marking of `d`.
pub fn enumerate_markings(d: &DecoratedDiagram, s: u32) -> Vec<Vec<u32>> {
    let (covered, options) = placements(d, s);
    let mut out = vec![vec![0u32; 2 * d.chord_count() - 1]];
    for (cov, opts) in covered.iter().zip(&options) {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for base in &out {
            for opt in opts {
                let mut m = base.clone();
                for (&i, &k) in cov.iter().zip(opt) {
                    m[i] = k;
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// Number of `ω_s`-markings, counted placement by placement.
pub fn count_markings(d: &DecoratedDiagram, s: u32) -> BigInt {
    let (_, options) = placements(d, s);
    options.iter().fold(BigInt::from(1), |acc, opts| acc * opts.len())
}

/// Gaps of a marked diagram: `2|C| - 1` intervals plus one per mark.
pub fn gap_count(d: &DecoratedDiagram, marks: &[u32], s: u32) -> Result<u32, DiagramError> {
    check_marked(d, marks, s)?;
    Ok(2 * d.chord_count() as u32 - 1 + marks.iter().sum::<u32>())
}

/// Removes the root chord. Returns `None` unless the rest is a single
/// connected component.
pub fn delete_root(m: &MarkedDiagram) -> Option<MarkedDiagram> {
    let chords = m.diagram.base().chords();
    if chords.len() < 2 {
        return None;
    }
    let b = chords[0].1;
    let shift = |p: u32| if p < b { p - 1 } else { p - 2 };
    let rest: Vec<(u32, u32)> = chords[1..].iter().map(|&(x, y)| (shift(x), shift(y))).collect();
    let base = ChordDiagram::from_sorted_unchecked(rest);
    if !base.is_connected() {
        return None;
    }
    let bu = b as usize;
    let old = &m.marks;
    let mut marks = Vec::with_capacity(old.len() - 2);
    // Old interval i (1-based) sits between positions i and i+1.
    for i in 2..bu - 1 {
        marks.push(old[i - 1]);
    }
    marks.push(old[bu - 2] + old.get(bu - 1).copied().unwrap_or(0));
    for i in bu + 1..=old.len() {
        marks.push(old[i - 1]);
    }
    let diagram = DecoratedDiagram::new(base, m.diagram.decorations()[1..].to_vec()).ok()?;
    Some(MarkedDiagram { diagram, marks })
}

/// Every marked diagram of size `size`.
pub fn marked_diagrams(size: u32, s: u32) -> Vec<MarkedDiagram> {
    enumerate_decorated(size)
        .flat_map(|d| enumerate_markings(&d, s).into_iter().map(move |marks| MarkedDiagram { diagram: d.clone(), marks }))
        .collect()
}

/// For each marked diagram `C` of size `n`, the number of marked diagrams of
/// size `n + j` with a decoration-`j` root whose deletion leaves `C`.
pub fn root_deletion_fibres(n: u32, j: u32, s: u32) -> Vec<(MarkedDiagram, usize)> {
    let mut fibres: HashMap<MarkedDiagram, usize> = HashMap::new();
    for big in marked_diagrams(n + j, s) {
        if big.diagram.decorations()[0] != j {
            continue;
        }
        if let Some(small) = delete_root(&big) {
            debug_assert!(is_marked(&small.diagram, &small.marks, s));
            *fibres.entry(small).or_insert(0) += 1;
        }
    }
    marked_diagrams(n, s)
        .into_iter()
        .map(|m| {
            let count = fibres.get(&m).copied().unwrap_or(0);
            (m, count)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decorated(pairs: &[(u32, u32)], decos: Vec<u32>) -> DecoratedDiagram {
        DecoratedDiagram::new(ChordDiagram::validate(pairs).unwrap(), decos).unwrap()
    }

    #[test]
    fn all_ones_has_single_marking() {
        let d = decorated(&[(1, 8), (2, 5), (3, 9), (4, 6), (7, 10)], vec![1; 5]);
        assert_eq!(count_markings(&d, 2), BigInt::from(1));
        assert_eq!(enumerate_markings(&d, 2), vec![vec![0; 9]]);
        // s = 1 forbids decoration-1 chords covering several intervals.
        assert_eq!(count_markings(&d, 1), BigInt::from(0));
    }

    #[test]
    fn gaps() {
        let one = decorated(&[(1, 2)], vec![1]);
        assert_eq!(gap_count(&one, &[0], 2), Ok(1));
        let two = decorated(&[(1, 2)], vec![2]);
        assert_eq!(gap_count(&two, &[4], 3), Ok(5));
        assert!(matches!(gap_count(&two, &[3], 3), Err(DiagramError::NotMarked(_))));
        for d in enumerate_decorated(3) {
            for m in enumerate_markings(&d, 2) {
                assert_eq!(gap_count(&d, &m, 2), Ok(5));
            }
        }
    }

    #[test]
    fn deletion_of_inserted_root() {
        // (1,3),(2,4) with an s=2 decoration-2 root: two marks in interval 1.
        let big = MarkedDiagram { diagram: decorated(&[(1, 3), (2, 4)], vec![2, 1]), marks: vec![2, 0, 0] };
        let small = delete_root(&big).unwrap();
        assert_eq!(small.diagram.base().chords(), &[(1, 2)]);
        assert_eq!(small.marks, vec![0]);
    }

    #[test]
    fn fibres_are_uniform_small() {
        for (m, count) in root_deletion_fibres(2, 1, 2) {
            assert_eq!(count, 3, "{:?}", m);
        }
    }
}
