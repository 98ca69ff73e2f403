//! Chord diagrams: representation, connectivity, intersection order,
//! terminal chords, covering numbers, decorations, weights and types.
//!
//! Positions run over `1..=2n`. Chords of a [`ChordDiagram`] are stored by
//! increasing left endpoint, so index 0 is always the root chord. Everything
//! derived from a connected diagram (decorations, coverings, terminal
//! positions) is indexed by the intersection order instead.

pub mod enumerate;
pub mod marking;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apoly::{AMonomial, MonomialKey};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("diagram has no chords")]
    Empty,
    #[error("endpoint repeated in chord ({0}, {1})")]
    DuplicateEndpoint(u32, u32),
    #[error("chord ({0}, {1}) leaves the position range 1..={2}")]
    EndpointOutOfRange(u32, u32, u32),
    #[error("chord ({0}, {1}) is not written left-to-right")]
    ReversedPair(u32, u32),
    #[error("diagram is not connected")]
    NotConnected,
    #[error("expected {expected} decorations, got {got}")]
    DecorationCount { expected: usize, got: usize },
    #[error("decorations must be positive")]
    ZeroDecoration,
    #[error("not an omega_s-marked diagram: {0}")]
    NotMarked(String),
    #[error("malformed diagram JSON: {0}")]
    BadJson(String),
}

/// A perfect matching of `1..=2n`, chords sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    chords: Vec<(u32, u32)>,
}

fn crosses(x: (u32, u32), y: (u32, u32)) -> bool {
    (x.0 < y.0 && y.0 < x.1 && x.1 < y.1) || (y.0 < x.0 && x.0 < y.1 && y.1 < x.1)
}

/// Weakly connected components among `subset` (canonical chord indices),
/// each sorted, listed by leftmost endpoint.
fn components_of(chords: &[(u32, u32)], subset: &[usize]) -> Vec<Vec<usize>> {
    let m = subset.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..m {
        for j in i + 1..m {
            if crosses(chords[subset[i]], chords[subset[j]]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(subset[i]);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable_by_key(|&c| chords[c].0);
    }
    out.sort_unstable_by_key(|g| chords[g[0]].0);
    out
}

fn order_rec(chords: &[(u32, u32)], subset: &[usize], out: &mut Vec<usize>) {
    // `subset` is connected and sorted by left endpoint.
    out.push(subset[0]);
    for comp in components_of(chords, &subset[1..]) {
        order_rec(chords, &comp, out);
    }
}

impl ChordDiagram {
    /// Checks a raw pair list and returns it in canonical order.
    pub fn validate(pairs: &[(u32, u32)]) -> Result<Self, DiagramError> {
        if pairs.is_empty() {
            return Err(DiagramError::Empty);
        }
        let top = 2 * pairs.len() as u32;
        let mut seen = vec![false; top as usize + 1];
        for &(a, b) in pairs {
            if a > b {
                return Err(DiagramError::ReversedPair(a, b));
            }
            if a == b {
                return Err(DiagramError::DuplicateEndpoint(a, b));
            }
            if a < 1 || b > top {
                return Err(DiagramError::EndpointOutOfRange(a, b, top));
            }
            for p in [a, b] {
                if std::mem::replace(&mut seen[p as usize], true) {
                    return Err(DiagramError::DuplicateEndpoint(a, b));
                }
            }
        }
        let mut chords = pairs.to_vec();
        chords.sort_unstable();
        Ok(ChordDiagram { chords })
    }

    pub(crate) fn from_sorted_unchecked(chords: Vec<(u32, u32)>) -> Self {
        ChordDiagram { chords }
    }

    pub fn chords(&self) -> &[(u32, u32)] {
        &self.chords
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    /// Intersection-graph components as sets of canonical chord indices.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.len()).collect();
        components_of(&self.chords, &all)
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Canonical chord indices listed in intersection order (root first).
    pub fn intersection_order(&self) -> Result<Vec<usize>, DiagramError> {
        if !self.is_connected() {
            return Err(DiagramError::NotConnected);
        }
        let all: Vec<usize> = (0..self.len()).collect();
        let mut out = Vec::with_capacity(self.len());
        order_rec(&self.chords, &all, &mut out);
        Ok(out)
    }

    /// Whether chord `c` (canonical index) has no outgoing intersection edge.
    fn is_terminal(&self, c: usize) -> bool {
        let (a, b) = self.chords[c];
        !self.chords.iter().any(|&(x, y)| a < x && x < b && b < y)
    }

    /// 1-based intersection-order positions of the terminal chords.
    pub fn terminal_chords(&self) -> Result<Vec<usize>, DiagramError> {
        let order = self.intersection_order()?;
        Ok(order.iter().enumerate().filter(|(_, &c)| self.is_terminal(c)).map(|(pos, _)| pos + 1).collect())
    }

    /// Covering numbers, indexed by intersection order.
    pub fn covering_numbers(&self) -> Result<CoveringProfile, DiagramError> {
        let order = self.intersection_order()?;
        Ok(covering_from_order(&self.chords, &order))
    }

    /// Final label (1-based intersection-order position) of each interval
    /// `i = 1..2n-1`, interval `i` lying between positions `i` and `i+1`.
    pub fn interval_labels(&self) -> Result<Vec<usize>, DiagramError> {
        let order = self.intersection_order()?;
        Ok(interval_labels(&self.chords, &order))
    }
}

fn interval_labels(chords: &[(u32, u32)], order: &[usize]) -> Vec<usize> {
    let mut labels = vec![0usize; 2 * chords.len() - 1];
    for (pos, &c) in order.iter().enumerate() {
        let (a, b) = chords[c];
        for slot in &mut labels[a as usize - 1..b as usize - 1] {
            *slot = pos + 1;
        }
    }
    labels
}

fn covering_from_order(chords: &[(u32, u32)], order: &[usize]) -> CoveringProfile {
    let mut counts = vec![0u32; order.len()];
    for label in interval_labels(chords, order) {
        counts[label - 1] += 1;
    }
    CoveringProfile { omega: counts.into_iter().map(|c| c - 1).collect() }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chords.iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "{}", parts.join(""))
    }
}

/// Covering numbers `ω(c)`, indexed by intersection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringProfile {
    pub omega: Vec<u32>,
}

/// A connected diagram together with everything that depends only on its
/// shape: intersection order, terminal positions and covering numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectedDiagram {
    diagram: ChordDiagram,
    order: Vec<usize>,
    terminals: Vec<usize>,
    omega: Vec<u32>,
}

impl ConnectedDiagram {
    pub fn new(diagram: ChordDiagram) -> Result<Self, DiagramError> {
        let order = diagram.intersection_order()?;
        let terminals =
            order.iter().enumerate().filter(|(_, &c)| diagram.is_terminal(c)).map(|(p, _)| p + 1).collect();
        let omega = covering_from_order(&diagram.chords, &order).omega;
        Ok(ConnectedDiagram { diagram, order, terminals, omega })
    }

    pub fn diagram(&self) -> &ChordDiagram {
        &self.diagram
    }

    pub fn chord_count(&self) -> usize {
        self.diagram.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn omega(&self) -> &[u32] {
        &self.omega
    }

    /// Position of the first terminal chord.
    pub fn t1(&self) -> usize {
        self.terminals[0]
    }
}

/// `binom(x, k)` for any integer `x` and `k >= 0` via the falling factorial,
/// so `binom(-1, 0) = 1` and `binom(k-1, k) = 0`.
pub fn binomial(x: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= x - i;
        den *= i + 1;
    }
    num / den
}

/// Weight from decorations and covering numbers (both in intersection order).
pub fn weight_of(decorations: &[u32], omega: &[u32], s: u32) -> BigInt {
    let mut w = BigInt::one();
    for (&d, &om) in decorations.iter().zip(omega) {
        w *= binomial(d as i64 * s as i64 + om as i64 - 2, om);
        if w.is_zero() {
            break;
        }
    }
    w
}

/// Type of a decorated diagram from its decorations and terminal positions.
pub fn type_of(decorations: &[u32], terminals: &[usize]) -> DiagramType {
    let delta = decorations[terminals[0] - 1];
    let gaps = terminals.windows(2).map(|w| (decorations[w[1] - 1], (w[1] - w[0]) as u32)).collect();
    let mut is_terminal = vec![false; decorations.len()];
    for &t in terminals {
        is_terminal[t - 1] = true;
    }
    let nonterminals =
        decorations.iter().zip(&is_terminal).filter(|(&d, &term)| !term && d >= 2).map(|(&d, _)| d).collect();
    DiagramType::new(delta, gaps, nonterminals)
}

/// `A(C)` from decorations and terminal positions.
pub fn a_monomial_of(decorations: &[u32], terminals: &[usize]) -> AMonomial {
    let mut is_terminal = vec![false; decorations.len()];
    for &t in terminals {
        is_terminal[t - 1] = true;
    }
    let mut key = MonomialKey::one();
    for (&d, &term) in decorations.iter().zip(&is_terminal) {
        if !term {
            key = key.mul(&MonomialKey::var(d, 0));
        }
    }
    for w in terminals.windows(2) {
        key = key.mul(&MonomialKey::var(decorations[w[1] - 1], (w[1] - w[0]) as u32));
    }
    AMonomial { coeff: One::one(), key }
}

/// Connected diagram with positive decorations in intersection order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedDiagram {
    shape: Arc<ConnectedDiagram>,
    decorations: Vec<u32>,
}

impl DecoratedDiagram {
    pub fn new(diagram: ChordDiagram, decorations: Vec<u32>) -> Result<Self, DiagramError> {
        Self::with_shape(Arc::new(ConnectedDiagram::new(diagram)?), decorations)
    }

    pub fn with_shape(shape: Arc<ConnectedDiagram>, decorations: Vec<u32>) -> Result<Self, DiagramError> {
        if decorations.len() != shape.chord_count() {
            return Err(DiagramError::DecorationCount { expected: shape.chord_count(), got: decorations.len() });
        }
        if decorations.contains(&0) {
            return Err(DiagramError::ZeroDecoration);
        }
        Ok(DecoratedDiagram { shape, decorations })
    }

    pub fn shape(&self) -> &ConnectedDiagram {
        &self.shape
    }

    pub fn base(&self) -> &ChordDiagram {
        &self.shape.diagram
    }

    pub fn decorations(&self) -> &[u32] {
        &self.decorations
    }

    /// `‖C‖`, the sum of decorations.
    pub fn size(&self) -> u32 {
        self.decorations.iter().sum()
    }

    pub fn chord_count(&self) -> usize {
        self.decorations.len()
    }

    pub fn covering(&self) -> CoveringProfile {
        CoveringProfile { omega: self.shape.omega.clone() }
    }

    pub fn terminals(&self) -> &[usize] {
        &self.shape.terminals
    }

    pub fn t1(&self) -> usize {
        self.shape.t1()
    }

    pub fn weight(&self, s: u32) -> BigInt {
        weight_of(&self.decorations, &self.shape.omega, s)
    }

    pub fn diagram_type(&self) -> DiagramType {
        type_of(&self.decorations, &self.shape.terminals)
    }

    pub fn a_monomial(&self) -> AMonomial {
        a_monomial_of(&self.decorations, &self.shape.terminals)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DiagramJson {
            chords: self.base().chords().iter().map(|&(a, b)| [a, b]).collect(),
            decorations: self.decorations.clone(),
        })
        .expect("diagram serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let raw: DiagramJson = serde_json::from_str(text).map_err(|e| DiagramError::BadJson(e.to_string()))?;
        let pairs: Vec<(u32, u32)> = raw.chords.iter().map(|c| (c[0], c[1])).collect();
        DecoratedDiagram::new(ChordDiagram::validate(&pairs)?, raw.decorations)
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    chords: Vec<[u32; 2]>,
    decorations: Vec<u32>,
}

/// `(Δ, G, D)`; both multisets kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiagramType {
    pub delta: u32,
    pub gaps: Vec<(u32, u32)>,
    pub nonterminals: Vec<u32>,
}

impl DiagramType {
    pub fn new(delta: u32, mut gaps: Vec<(u32, u32)>, mut nonterminals: Vec<u32>) -> Self {
        gaps.sort_unstable();
        nonterminals.sort_unstable();
        DiagramType { delta, gaps, nonterminals }
    }

    pub fn simple(delta: u32) -> Self {
        DiagramType::new(delta, Vec::new(), Vec::new())
    }

    /// `Σ_G (d+g-1) + Σ_D (d-1) + Δ - 1`.
    pub fn t_value(&self) -> u32 {
        self.gaps.iter().map(|&(d, g)| d + g - 1).sum::<u32>()
            + self.nonterminals.iter().map(|&d| d - 1).sum::<u32>()
            + self.delta
            - 1
    }

    pub fn is_valid(&self) -> bool {
        self.delta >= 1
            && self.gaps.iter().all(|&(d, g)| d >= 1 && g >= 1)
            && self.nonterminals.iter().all(|&d| d >= 2)
    }

    /// `(Δ,{(1,1)},{2,2})` style.
    pub fn to_latex(&self) -> String {
        let gaps = if self.gaps.is_empty() {
            "\\varnothing".to_string()
        } else {
            let inner: Vec<String> = self.gaps.iter().map(|(d, g)| format!("({d},{g})")).collect();
            format!("\\{{{}\\}}", inner.join(","))
        };
        let nts = if self.nonterminals.is_empty() {
            "\\varnothing".to_string()
        } else {
            let inner: Vec<String> = self.nonterminals.iter().map(|d| d.to_string()).collect();
            format!("\\{{{}\\}}", inner.join(","))
        };
        format!("({},{gaps},{nts})", self.delta)
    }
}

impl fmt::Display for DiagramType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gaps: Vec<String> = self.gaps.iter().map(|(d, g)| format!("({d},{g})")).collect();
        let nts: Vec<String> = self.nonterminals.iter().map(|d| d.to_string()).collect();
        write!(f, "({}, {{{}}}, {{{}}})", self.delta, gaps.join(","), nts.join(","))
    }
}
