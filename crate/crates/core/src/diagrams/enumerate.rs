//! Exhaustive generation of connected chord diagrams and their decorations.
//!
//! Connected diagrams are produced by a depth-first search over partner
//! arrays that rejects a prefix as soon as it contains a closed block: a
//! diagram is disconnected exactly when some proper contiguous run of
//! positions `[x, y] != [1, 2n]` is matched within itself, and any such run
//! is detectable at the moment its right end `y` gets closed. The search is
//! split by the root chord's partner so the branches run independently.
//!
//! Filtering all `(2n-1)!!` matchings is kept as an oracle for small `n`.

use std::sync::{Arc, OnceLock};

use crate::exec::Strategy;

use super::{ChordDiagram, ConnectedDiagram};

/// Largest chord count with a cached catalog.
pub const MAX_CATALOG_CHORDS: usize = 12;

/// All connected diagrams with `n` chords in canonical order, stored flat.
///
/// Each record is `4n` bytes: endpoints `a1 b1 .. an bn`, then the
/// intersection order (canonical indices), then covering numbers.
#[derive(Debug)]
pub struct Catalog {
    n: usize,
    data: Vec<u8>,
    terminal_masks: Vec<u64>,
}

/// Borrowed view of one catalog record.
#[derive(Debug, Clone, Copy)]
pub struct ShapeView<'a> {
    bytes: &'a [u8],
    mask: u64,
}

impl<'a> ShapeView<'a> {
    pub fn chord_count(&self) -> usize {
        self.bytes.len() / 4
    }

    pub fn chords(&self) -> Vec<(u32, u32)> {
        let n = self.chord_count();
        self.bytes[..2 * n].chunks(2).map(|c| (c[0] as u32, c[1] as u32)).collect()
    }

    pub fn omega(&self) -> Vec<u32> {
        let n = self.chord_count();
        self.bytes[3 * n..].iter().map(|&w| w as u32).collect()
    }

    /// 1-based intersection-order positions of terminal chords.
    pub fn terminals(&self) -> Vec<usize> {
        (0..self.chord_count()).filter(|p| self.mask >> p & 1 == 1).map(|p| p + 1).collect()
    }

    pub fn t1(&self) -> usize {
        self.mask.trailing_zeros() as usize + 1
    }

    pub fn terminal_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn to_connected(&self) -> ConnectedDiagram {
        ConnectedDiagram::new(ChordDiagram::from_sorted_unchecked(self.chords()))
            .expect("catalog diagrams are connected")
    }
}

impl Catalog {
    pub fn chord_count(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terminal_masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminal_masks.is_empty()
    }

    pub fn get(&self, i: usize) -> ShapeView<'_> {
        let stride = 4 * self.n;
        ShapeView { bytes: &self.data[i * stride..(i + 1) * stride], mask: self.terminal_masks[i] }
    }

    pub fn iter(&self) -> impl Iterator<Item = ShapeView<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn diagrams(&self) -> Vec<ChordDiagram> {
        self.iter().map(|v| ChordDiagram::from_sorted_unchecked(v.chords())).collect()
    }
}

struct Search {
    n2: usize,
    partner: Vec<u8>,
    open: Vec<u8>,
    out: Vec<Vec<u8>>,
}

impl Search {
    /// True if closing position `j` completes a proper closed block `[x, j]`.
    fn closes_block(&self, j: usize) -> bool {
        let mut lo = u8::MAX;
        let mut hi = 0u8;
        for x in (1..=j).rev() {
            let p = match self.partner[x] {
                0 => u8::MAX,
                p => p,
            };
            lo = lo.min(p);
            hi = hi.max(p);
            if hi as usize > j {
                return false;
            }
            if lo as usize >= x && !(x == 1 && j == self.n2) {
                return true;
            }
        }
        false
    }

    fn run(&mut self, pos: usize, root_partner: usize) {
        if pos > self.n2 {
            let mut rec = Vec::with_capacity(self.n2);
            for a in 1..=self.n2 {
                let b = self.partner[a] as usize;
                if b > a {
                    rec.push(a as u8);
                    rec.push(b as u8);
                }
            }
            self.out.push(rec);
            return;
        }
        if pos == root_partner {
            if !self.closes_block(pos) {
                self.run(pos + 1, root_partner);
            }
            return;
        }
        let free_after = self.n2 - pos - usize::from(root_partner > pos);
        if self.open.len() < free_after {
            self.open.push(pos as u8);
            self.run(pos + 1, root_partner);
            self.open.pop();
        }
        for idx in 0..self.open.len() {
            let o = self.open.remove(idx);
            self.partner[pos] = o;
            self.partner[o as usize] = pos as u8;
            if !self.closes_block(pos) {
                self.run(pos + 1, root_partner);
            }
            self.partner[pos] = 0;
            self.partner[o as usize] = 0;
            self.open.insert(idx, o);
        }
    }
}

/// Connected diagrams with `n` chords whose root chord is `(1, p)`, as sorted
/// endpoint records.
fn branch(n: usize, p: usize) -> Vec<Vec<u8>> {
    let n2 = 2 * n;
    let mut search = Search { n2, partner: vec![0; n2 + 1], open: Vec::new(), out: Vec::new() };
    search.partner[1] = p as u8;
    search.partner[p] = 1;
    search.run(2, p);
    search.out.sort_unstable();
    search.out
}

fn build_catalog(n: usize, strategy: Strategy) -> Catalog {
    assert!((1..=MAX_CATALOG_CHORDS).contains(&n), "chord count {n} outside 1..={MAX_CATALOG_CHORDS}");
    let branches: Vec<usize> = (2..=2 * n).collect();
    let parts = strategy.map(branches, |p| {
        let recs = branch(n, p);
        let mut data = Vec::with_capacity(recs.len() * 4 * n);
        let mut masks = Vec::with_capacity(recs.len());
        for rec in recs {
            let chords: Vec<(u32, u32)> = rec.chunks(2).map(|c| (c[0] as u32, c[1] as u32)).collect();
            let shape = ConnectedDiagram::new(ChordDiagram::from_sorted_unchecked(chords))
                .expect("search only emits connected diagrams");
            data.extend_from_slice(&rec);
            data.extend(shape.order().iter().map(|&c| c as u8));
            data.extend(shape.omega().iter().map(|&w| w as u8));
            masks.push(shape.terminals().iter().fold(0u64, |m, &t| m | 1 << (t - 1)));
        }
        (data, masks)
    });
    let mut data = Vec::new();
    let mut terminal_masks = Vec::new();
    for (d, m) in parts {
        data.extend(d);
        terminal_masks.extend(m);
    }
    Catalog { n, data, terminal_masks }
}

static CATALOGS: [OnceLock<Arc<Catalog>>; MAX_CATALOG_CHORDS] = [const { OnceLock::new() }; MAX_CATALOG_CHORDS];

/// Cached catalog of connected diagrams with `n` chords.
///
/// Fetch catalogs before entering a parallel region: first-time construction
/// itself runs on the rayon pool.
pub fn catalog(n: usize) -> Arc<Catalog> {
    assert!((1..=MAX_CATALOG_CHORDS).contains(&n), "chord count {n} outside 1..={MAX_CATALOG_CHORDS}");
    CATALOGS[n - 1].get_or_init(|| Arc::new(build_catalog(n, Strategy::default()))).clone()
}

/// Uncached generation with an explicit strategy (benchmarks).
pub fn generate_catalog(n: usize, strategy: Strategy) -> Catalog {
    build_catalog(n, strategy)
}

/// Connected diagrams with `n` chords, canonical order.
pub fn connected_diagrams(n: usize) -> Vec<ChordDiagram> {
    catalog(n).diagrams()
}

/// Every perfect matching of `1..=2n`, chords sorted by left endpoint.
pub fn all_matchings(n: usize) -> Vec<ChordDiagram> {
    fn rec(free: &mut Vec<u32>, acc: &mut Vec<(u32, u32)>, out: &mut Vec<ChordDiagram>) {
        if free.is_empty() {
            let mut chords = acc.clone();
            chords.sort_unstable();
            out.push(ChordDiagram::from_sorted_unchecked(chords));
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            acc.push((a, b));
            rec(free, acc, out);
            acc.pop();
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut free: Vec<u32> = (1..=2 * n as u32).collect();
    let mut out = Vec::new();
    rec(&mut free, &mut Vec::new(), &mut out);
    out
}

/// Oracle: filter every matching by connectivity of its intersection graph.
pub fn connected_by_filter(n: usize) -> Vec<ChordDiagram> {
    let mut out: Vec<ChordDiagram> = all_matchings(n).into_iter().filter(|d| d.is_connected()).collect();
    out.sort();
    out
}

/// Compositions of `total` into `parts` positive parts, lexicographic.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_composition(total, parts, |c| out.push(c.to_vec()));
    out
}

pub fn for_each_composition(total: u32, parts: usize, mut f: impl FnMut(&[u32])) {
    fn rec(rest: u32, slots: usize, acc: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if slots == 1 {
            acc.push(rest);
            f(acc);
            acc.pop();
            return;
        }
        for first in 1..=rest - (slots as u32 - 1) {
            acc.push(first);
            rec(rest - first, slots - 1, acc, f);
            acc.pop();
        }
    }
    if parts == 0 || (total as usize) < parts {
        return;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), &mut f);
}

/// Every decorated connected diagram of size `size`: by chord count, then
/// canonical diagram order, then lexicographic decoration vector.
pub fn enumerate_decorated(size: u32) -> impl Iterator<Item = super::DecoratedDiagram> {
    (1..=size as usize).flat_map(move |n| {
        let cat = catalog(n);
        let comps = Arc::new(compositions(size, n));
        (0..cat.len()).flat_map(move |i| {
            let shape = Arc::new(cat.get(i).to_connected());
            let comps = comps.clone();
            (0..comps.len()).map(move |j| {
                super::DecoratedDiagram::with_shape(shape.clone(), comps[j].clone()).expect("positive decorations")
            })
        })
    })
}

/// Diagram census for `n` chords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub chords: usize,
    pub connected: usize,
    /// `by_terminals[l]` = diagrams with exactly `l` terminal chords.
    pub by_terminals: Vec<usize>,
}

impl Census {
    pub fn one_terminal(&self) -> usize {
        self.by_terminals.get(1).copied().unwrap_or(0)
    }
}

pub fn census(n: usize) -> Census {
    let cat = catalog(n);
    let mut by_terminals = vec![0usize; n + 1];
    for v in cat.iter() {
        by_terminals[v.terminal_count() as usize] += 1;
    }
    Census { chords: n, connected: cat.len(), by_terminals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts_match_filter() {
        for n in 1..=5 {
            let fast = connected_diagrams(n);
            assert_eq!(fast, connected_by_filter(n), "n = {n}");
        }
        let counts: Vec<usize> = (1..=5).map(|n| catalog(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 27, 248]);
    }

    #[test]
    fn strategies_agree() {
        let a = generate_catalog(5, Strategy::Sequential);
        let b = generate_catalog(5, Strategy::default());
        assert_eq!(a.data, b.data);
        assert_eq!(a.terminal_masks, b.terminal_masks);
    }

    #[test]
    fn compositions_lex() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(3, 3), vec![vec![1, 1, 1]]);
        assert!(compositions(2, 3).is_empty());
    }

    #[test]
    fn size_two_decorated() {
        let all: Vec<_> = enumerate_decorated(2).collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].decorations(), &[2]);
        assert_eq!(all[1].base().chords(), &[(1, 3), (2, 4)]);
    }

    #[test]
    fn view_matches_direct_computation() {
        for v in catalog(4).iter() {
            let direct = v.to_connected();
            assert_eq!(direct.terminals(), v.terminals().as_slice());
            assert_eq!(direct.omega(), v.omega().as_slice());
            assert_eq!(direct.t1(), v.t1());
        }
    }
}
