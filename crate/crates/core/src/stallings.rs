//! Stallings automata of finitely generated subgroups of free groups.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::words::{Gen, GroupWord, Letter, SymbolTable};

/// A transition `src --letter--> dst`. Inverse letters are read backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub letter: Letter,
    pub dst: usize,
}

impl Edge {
    pub fn new(src: usize, letter: Letter, dst: usize) -> Self {
        Edge { src, letter, dst }
    }
}

/// A connected letter-labeled graph with basepoint `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsAutomaton {
    states: usize,
    edges: Vec<Edge>,
    folded: bool,
}

type Transitions = HashMap<(usize, Letter, bool), (usize, usize)>;

impl StallingsAutomaton {
    /// The automaton of the trivial subgroup.
    pub fn trivial() -> Self {
        StallingsAutomaton {
            states: 1,
            edges: Vec::new(),
            folded: true,
        }
    }

    /// Builds an automaton with the given numbering; state `0` is the basepoint.
    pub fn from_edges(states: usize, edges: Vec<Edge>) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidAutomaton("no basepoint".into()));
        }
        if let Some(e) = edges.iter().find(|e| e.src >= states || e.dst >= states) {
            return Err(Error::InvalidAutomaton(format!(
                "edge {} -{}-> {} leaves the {states} states",
                e.src, e.letter, e.dst
            )));
        }
        let mut a = StallingsAutomaton {
            states,
            edges,
            folded: false,
        };
        if a.reachable().iter().any(|r| !r) {
            return Err(Error::InvalidAutomaton("not connected".into()));
        }
        a.folded = a.transitions().is_some();
        Ok(a)
    }

    /// One loop per non-trivial word at the basepoint, spelling the word.
    pub fn flower(words: &[GroupWord]) -> Self {
        let graph = Graph::flower(words, false);
        let a = graph.export().0;
        StallingsAutomaton { folded: false, ..a }
    }

    /// Folded core of the subgroup generated by `words`.
    pub fn subgroup(words: &[GroupWord]) -> Self {
        Self::flower(words).fold().core()
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn basepoint(&self) -> usize {
        0
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    /// Folds to a deterministic automaton, numbered breadth-first from the
    /// basepoint.
    pub fn fold(&self) -> Self {
        let mut graph = Graph::from_automaton(self);
        graph.fold();
        graph.export().0
    }

    /// Removes hanging trees not containing the basepoint.
    pub fn core(&self) -> Self {
        let mut graph = Graph::from_automaton(self);
        if !self.folded {
            graph.fold();
        }
        graph.trim();
        graph.export().0
    }

    /// True iff no state has two transitions with the same letter and
    /// direction.
    fn transitions(&self) -> Option<Transitions> {
        let mut map = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if map.insert((e.src, e.letter, true), (e.dst, i)).is_some() {
                return None;
            }
            if map.insert((e.dst, e.letter, false), (e.src, i)).is_some() {
                return None;
            }
        }
        Some(map)
    }

    fn folded_transitions(&self) -> Transitions {
        if self.folded {
            self.transitions().expect("folded automaton is deterministic")
        } else {
            self.fold().transitions().expect("folding yields a deterministic automaton")
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut adjacent = vec![Vec::new(); self.states];
        for e in &self.edges {
            adjacent[e.src].push(e.dst);
            adjacent[e.dst].push(e.src);
        }
        let mut seen = vec![false; self.states];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &y in &adjacent[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Reads `w` from the basepoint, returning the traversed edges with their
    /// directions, or `None` if the path breaks off.
    fn trace(&self, transitions: &Transitions, w: &GroupWord) -> Option<(usize, Vec<(usize, bool)>)> {
        let mut x = 0;
        let mut path = Vec::with_capacity(w.len());
        for g in w.gens() {
            let &(y, e) = transitions.get(&(x, g.letter, !g.inverse))?;
            path.push((e, !g.inverse));
            x = y;
        }
        Some((x, path))
    }

    /// Whether `w` labels a closed path at the basepoint.
    pub fn membership(&self, w: &GroupWord) -> bool {
        let transitions = self.folded_transitions();
        matches!(self.trace(&transitions, w), Some((0, _)))
    }

    /// `|edges| - |states| + 1`.
    pub fn rank(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.states)
    }

    /// True iff this is the rose with one loop per letter of `size`.
    pub fn is_rose(&self, size: usize) -> bool {
        self.states == 1
            && self.edges.len() == size
            && (0..size).all(|a| self.edges.iter().any(|e| e.letter == a))
    }

    /// Breadth-first spanning tree from the basepoint, exploring transitions
    /// by letter, forward before backward, then by terminus.
    pub fn spanning_tree(&self) -> SpanningTree {
        let mut incident: Vec<Vec<(Letter, bool, usize, usize)>> = vec![Vec::new(); self.states];
        for (i, e) in self.edges.iter().enumerate() {
            incident[e.src].push((e.letter, false, e.dst, i));
            incident[e.dst].push((e.letter, true, e.src, i));
        }
        for list in &mut incident {
            list.sort();
        }
        let mut seen = vec![false; self.states];
        seen[0] = true;
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &(_, _, y, i) in &incident[x] {
                if !seen[y] {
                    seen[y] = true;
                    tree.push(i);
                    queue.push_back(y);
                }
            }
        }
        tree.sort_unstable();
        SpanningTree { edges: tree }
    }

    /// Labels of the tree paths from the basepoint to every state.
    fn tree_paths(&self, tree: &SpanningTree) -> Vec<GroupWord> {
        let mut adjacent = vec![Vec::new(); self.states];
        for &i in &tree.edges {
            let e = self.edges[i];
            adjacent[e.src].push((e.dst, Gen::pos(e.letter)));
            adjacent[e.dst].push((e.src, Gen::neg(e.letter)));
        }
        let mut paths: Vec<Option<GroupWord>> = vec![None; self.states];
        paths[0] = Some(GroupWord::identity());
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            let px = paths[x].clone().expect("visited");
            for &(y, g) in &adjacent[x] {
                if paths[y].is_none() {
                    paths[y] = Some(px.concat(&GroupWord::gen(g)));
                    queue.push_back(y);
                }
            }
        }
        paths.into_iter().map(|p| p.expect("tree spans")).collect()
    }

    /// One basis element `p(src) · letter · p(dst)⁻¹` per non-tree edge, in
    /// edge order.
    pub fn basis_from_tree(&self, tree: &SpanningTree) -> SubgroupBasis {
        let paths = self.tree_paths(tree);
        let mut elements = Vec::new();
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if tree.contains(i) {
                continue;
            }
            let b = paths[e.src]
                .concat(&GroupWord::letter(e.letter))
                .concat(&paths[e.dst].invert());
            elements.push(b);
            edges.push(i);
        }
        SubgroupBasis { elements, edges }
    }

    /// Expresses a member `w` as a word over the basis built from `tree`.
    pub fn express_in_basis(&self, tree: &SpanningTree, w: &GroupWord) -> Result<GroupWord> {
        let transitions = self.folded_transitions();
        let (end, path) = self
            .trace(&transitions, w)
            .ok_or_else(|| Error::NotAMember(w.clone()))?;
        if end != 0 {
            return Err(Error::NotAMember(w.clone()));
        }
        let position: HashMap<usize, usize> = self
            .basis_from_tree(tree)
            .edges
            .iter()
            .enumerate()
            .map(|(k, &i)| (i, k))
            .collect();
        Ok(GroupWord::reduce(path.into_iter().filter_map(|(e, forward)| {
            position.get(&e).map(|&k| if forward { Gen::pos(k) } else { Gen::neg(k) })
        })))
    }

    /// Equality after canonical renumbering.
    pub fn is_isomorphic(&self, other: &StallingsAutomaton) -> bool {
        self.canonical() == other.canonical()
    }

    fn canonical(&self) -> Option<(usize, Vec<Edge>)> {
        let transitions = self.transitions()?;
        let order = bfs_order(self.states, &transitions);
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Some(Edge::new(order[e.src]?, e.letter, order[e.dst]?)))
            .collect::<Option<_>>()?;
        edges.sort_unstable();
        Some((self.states, edges))
    }

    /// DOT rendering; the basepoint is doubly circled and tree edges dashed.
    pub fn to_dot(&self, tree: Option<&SpanningTree>) -> String {
        self.to_dot_with(&SymbolTable::standard(), tree)
    }

    pub fn to_dot_with(&self, symbols: &SymbolTable, tree: Option<&SpanningTree>) -> String {
        let mut out = String::from("digraph stallings {\n  rankdir=LR;\n  node [shape=circle];\n");
        for s in 0..self.states {
            let shape = if s == 0 { " [shape=doublecircle]" } else { "" };
            let _ = writeln!(out, "  s{s}{shape};");
        }
        for (i, e) in self.edges.iter().enumerate() {
            let label = symbols.render_monoid(&[e.letter]);
            let style = if tree.is_some_and(|t| t.contains(i)) {
                ", style=dashed"
            } else {
                ""
            };
            let _ = writeln!(out, "  s{} -> s{} [label=\"{label}\"{style}];", e.src, e.dst);
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for StallingsAutomaton {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StallingsAutomaton", 3)?;
        s.serialize_field("states", &self.states)?;
        s.serialize_field("basepoint", &0)?;
        let edges: Vec<[usize; 3]> = self.edges.iter().map(|e| [e.src, e.letter, e.dst]).collect();
        s.serialize_field("edges", &edges)?;
        s.end()
    }
}

/// Renumbering of states by breadth-first search from the basepoint.
fn bfs_order(states: usize, transitions: &Transitions) -> Vec<Option<usize>> {
    let letters = transitions.keys().map(|k| k.1 + 1).max().unwrap_or(0);
    let mut order = vec![None; states];
    order[0] = Some(0);
    let mut next = 1;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for a in 0..letters {
            for forward in [true, false] {
                if let Some(&(y, _)) = transitions.get(&(x, a, forward)) {
                    if order[y].is_none() {
                        order[y] = Some(next);
                        next += 1;
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    order
}

/// Edge indices of a spanning tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    edges: Vec<usize>,
}

impl SpanningTree {
    /// Validates a tree given by edge indices of `a`.
    pub fn from_edges(a: &StallingsAutomaton, mut edges: Vec<usize>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        if edges.len() + 1 != a.states() {
            return Err(Error::InvalidTree(format!(
                "{} edges cannot span {} states",
                edges.len(),
                a.states()
            )));
        }
        let mut parent: Vec<usize> = (0..a.states()).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for &i in &edges {
            let e = a
                .edges()
                .get(i)
                .ok_or_else(|| Error::InvalidTree(format!("no edge {i}")))?;
            let (x, y) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            if x == y {
                return Err(Error::InvalidTree(format!("edge {i} closes a cycle")));
            }
            parent[x] = y;
        }
        Ok(SpanningTree { edges })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }
}

/// A free basis of a subgroup, one element per non-tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupBasis {
    pub elements: Vec<GroupWord>,
    /// The non-tree edge of each element, when built from a tree.
    pub edges: Vec<usize>,
}

impl SubgroupBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Folding of a flower that remembers, for every edge, a word over the
/// generator indices. The product of these words along a closed path at the
/// basepoint evaluates to the letter label of the path.
#[derive(Debug, Clone)]
pub struct LabeledFold {
    automaton: StallingsAutomaton,
    labels: Vec<GroupWord>,
    relations: Vec<GroupWord>,
}

impl LabeledFold {
    /// Folds and trims `flower(generators)`.
    pub fn new(generators: &[GroupWord]) -> Self {
        let mut graph = Graph::flower(generators, true);
        graph.fold();
        graph.trim();
        let (automaton, labels) = graph.export();
        LabeledFold {
            automaton,
            labels,
            relations: graph.relations,
        }
    }

    pub fn automaton(&self) -> &StallingsAutomaton {
        &self.automaton
    }

    pub fn labels(&self) -> &[GroupWord] {
        &self.labels
    }

    /// Non-trivial words over the generator indices that evaluate to the
    /// identity, found while folding.
    pub fn relations(&self) -> &[GroupWord] {
        &self.relations
    }

    /// Whether no relation was met, i.e. the generators are a free basis.
    pub fn is_free_basis(&self) -> bool {
        self.relations.is_empty()
    }

    /// A word over the generator indices evaluating to the member `w`.
    pub fn express(&self, w: &GroupWord) -> Result<GroupWord> {
        let transitions = self.automaton.folded_transitions();
        let (end, path) = self
            .automaton
            .trace(&transitions, w)
            .ok_or_else(|| Error::NotAMember(w.clone()))?;
        if end != 0 {
            return Err(Error::NotAMember(w.clone()));
        }
        let mut out = GroupWord::identity();
        for (e, forward) in path {
            out = if forward {
                out.concat(&self.labels[e])
            } else {
                out.concat(&self.labels[e].invert())
            };
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
struct LabeledEdge {
    src: usize,
    letter: Letter,
    dst: usize,
    label: GroupWord,
}

/// Mutable graph used while folding and trimming.
struct Graph {
    edges: Vec<Option<LabeledEdge>>,
    incident: Vec<Vec<usize>>,
    alive: Vec<bool>,
    relations: Vec<GroupWord>,
}

impl Graph {
    fn new(states: usize) -> Self {
        Graph {
            edges: Vec::new(),
            incident: vec![Vec::new(); states],
            alive: vec![true; states],
            relations: Vec::new(),
        }
    }

    fn add_state(&mut self) -> usize {
        self.incident.push(Vec::new());
        self.alive.push(true);
        self.incident.len() - 1
    }

    fn add_edge(&mut self, src: usize, letter: Letter, dst: usize, label: GroupWord) {
        let i = self.edges.len();
        self.edges.push(Some(LabeledEdge { src, letter, dst, label }));
        self.incident[src].push(i);
        if dst != src {
            self.incident[dst].push(i);
        }
    }

    fn from_automaton(a: &StallingsAutomaton) -> Self {
        let mut g = Graph::new(a.states);
        for e in &a.edges {
            g.add_edge(e.src, e.letter, e.dst, GroupWord::identity());
        }
        g
    }

    fn flower(words: &[GroupWord], labeled: bool) -> Self {
        let mut g = Graph::new(1);
        for (i, w) in words.iter().enumerate() {
            let gens = w.gens();
            if gens.is_empty() {
                if labeled {
                    g.relations.push(GroupWord::letter(i));
                }
                continue;
            }
            let mut x = 0;
            for (k, gen) in gens.iter().enumerate() {
                let last = k + 1 == gens.len();
                let y = if last { 0 } else { g.add_state() };
                let label = if last && labeled {
                    GroupWord::letter(i)
                } else {
                    GroupWord::identity()
                };
                if gen.inverse {
                    g.add_edge(y, gen.letter, x, label.invert());
                } else {
                    g.add_edge(x, gen.letter, y, label);
                }
                x = y;
            }
        }
        g
    }

    fn edge(&self, i: usize) -> &LabeledEdge {
        self.edges[i].as_ref().expect("live edge")
    }

    /// Drops dead and duplicate entries from the incidence list of `x`.
    fn clean(&mut self, x: usize) {
        let mut list = std::mem::take(&mut self.incident[x]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&i| matches!(&self.edges[i], Some(e) if e.src == x || e.dst == x));
        self.incident[x] = list;
    }

    /// Two distinct edges at `x` with the same letter and direction.
    fn conflict(&mut self, x: usize) -> Option<(usize, usize, bool)> {
        self.clean(x);
        let mut seen: HashMap<(Letter, bool), usize> = HashMap::new();
        for &i in &self.incident[x] {
            let e = self.edge(i);
            for (touches, outgoing) in [(e.src == x, true), (e.dst == x, false)] {
                if !touches {
                    continue;
                }
                if let Some(&j) = seen.get(&(e.letter, outgoing)) {
                    return Some((j, i, outgoing));
                }
                seen.insert((e.letter, outgoing), i);
            }
        }
        None
    }

    fn fold(&mut self) {
        let mut stack: Vec<usize> = (0..self.alive.len()).rev().collect();
        while let Some(x) = stack.pop() {
            if !self.alive[x] {
                continue;
            }
            let Some((e1, e2, outgoing)) = self.conflict(x) else {
                continue;
            };
            stack.push(x);
            let (a, b) = (self.edge(e1).clone(), self.edge(e2).clone());
            let (mut keep, mut drop) = if outgoing { (a.dst, b.dst) } else { (a.src, b.src) };
            if keep == drop {
                if a.label != b.label {
                    let p = self.path_label(a.src);
                    let r = p.concat(&a.label).concat(&b.label.invert()).concat(&p.invert());
                    self.relations.push(r);
                }
                self.edges[e2] = None;
                continue;
            }
            let (mut d1, mut d2) = (a.label, b.label);
            if drop == 0 {
                std::mem::swap(&mut keep, &mut drop);
                std::mem::swap(&mut d1, &mut d2);
            }
            let gauge = if outgoing {
                d1.invert().concat(&d2)
            } else {
                d1.concat(&d2.invert())
            };
            self.gauge(drop, &gauge);
            self.merge(drop, keep);
            self.edges[e2] = None;
            stack.push(keep);
        }
    }

    /// Label product along some path from the basepoint to `x`.
    fn path_label(&self, x: usize) -> GroupWord {
        let mut paths: HashMap<usize, GroupWord> = HashMap::from([(0, GroupWord::identity())]);
        let mut queue = VecDeque::from([0]);
        while let Some(y) = queue.pop_front() {
            if y == x {
                break;
            }
            let py = paths[&y].clone();
            for &i in &self.incident[y] {
                let Some(e) = &self.edges[i] else { continue };
                let steps = [
                    (e.src == y, e.dst, e.label.clone()),
                    (e.dst == y, e.src, e.label.invert()),
                ];
                for (touches, z, label) in steps {
                    if touches && !paths.contains_key(&z) {
                        paths.insert(z, py.concat(&label));
                        queue.push_back(z);
                    }
                }
            }
        }
        paths.remove(&x).expect("graph stays connected")
    }

    fn gauge(&mut self, x: usize, g: &GroupWord) {
        if g.is_identity() {
            return;
        }
        self.clean(x);
        let ginv = g.invert();
        for &i in &self.incident[x] {
            let e = self.edges[i].as_mut().expect("live edge");
            if e.src == x {
                e.label = g.concat(&e.label);
            }
            if e.dst == x {
                e.label = e.label.concat(&ginv);
            }
        }
    }

    fn merge(&mut self, from: usize, into: usize) {
        self.clean(from);
        let list = std::mem::take(&mut self.incident[from]);
        for &i in &list {
            let e = self.edges[i].as_mut().expect("live edge");
            if e.src == from {
                e.src = into;
            }
            if e.dst == from {
                e.dst = into;
            }
        }
        self.incident[into].extend(list);
        self.alive[from] = false;
    }

    fn degree(&self, x: usize) -> usize {
        self.incident[x]
            .iter()
            .map(|&i| {
                let e = self.edge(i);
                usize::from(e.src == x) + usize::from(e.dst == x)
            })
            .sum()
    }

    fn trim(&mut self) {
        let mut stack: Vec<usize> = (1..self.alive.len()).collect();
        while let Some(x) = stack.pop() {
            if x == 0 || !self.alive[x] {
                continue;
            }
            self.clean(x);
            if self.degree(x) > 1 {
                continue;
            }
            for i in std::mem::take(&mut self.incident[x]) {
                let e = self.edges[i].take().expect("live edge");
                stack.push(if e.src == x { e.dst } else { e.src });
            }
            self.alive[x] = false;
        }
    }

    /// Live part as an automaton numbered breadth-first from the basepoint,
    /// with edges sorted, together with the edge labels in that order.
    fn export(&self) -> (StallingsAutomaton, Vec<GroupWord>) {
        let live: Vec<&LabeledEdge> = self.edges.iter().flatten().collect();
        let raw = StallingsAutomaton {
            states: self.alive.len(),
            edges: live.iter().map(|e| Edge::new(e.src, e.letter, e.dst)).collect(),
            folded: false,
        };
        let order: Vec<Option<usize>> = match raw.transitions() {
            Some(t) => bfs_order(raw.states, &t),
            None => {
                // unfolded: keep creation order among live states
                let mut next = 0;
                self.alive
                    .iter()
                    .map(|&alive| {
                        alive.then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            }
        };
        let states = order.iter().flatten().count();
        let mut pairs: Vec<(Edge, GroupWord)> = live
            .iter()
            .map(|e| {
                let src = order[e.src].expect("live state");
                let dst = order[e.dst].expect("live state");
                (Edge::new(src, e.letter, dst), e.label.clone())
            })
            .collect();
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        let (edges, labels): (Vec<Edge>, Vec<GroupWord>) = pairs.into_iter().unzip();
        let mut a = StallingsAutomaton {
            states,
            edges,
            folded: false,
        };
        a.folded = a.transitions().is_some();
        (a, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::gw;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gws(ws: &[&str]) -> Vec<GroupWord> {
        ws.iter().map(|w| gw(w)).collect()
    }

    fn e(src: usize, letter: Letter, dst: usize) -> Edge {
        Edge::new(src, letter, dst)
    }

    fn morse_figure() -> (StallingsAutomaton, SpanningTree) {
        let a = StallingsAutomaton::from_edges(
            4,
            vec![e(0, 0, 1), e(0, 3, 1), e(1, 1, 0), e(2, 2, 0), e(1, 2, 3), e(2, 1, 3), e(3, 3, 2)],
        )
        .unwrap();
        let t = SpanningTree::from_edges(&a, vec![1, 3, 4]).unwrap();
        (a, t)
    }

    #[test]
    fn flower_shapes() {
        let empty = StallingsAutomaton::flower(&[]);
        assert_eq!((empty.states(), empty.edges().len()), (1, 0));
        let loop0 = StallingsAutomaton::flower(&gws(&["0"]));
        assert_eq!(loop0.edges(), &[e(0, 0, 0)]);
        let f = StallingsAutomaton::flower(&gws(&["01'", "2"]));
        assert_eq!((f.states(), f.edges().len()), (2, 3));
    }

    #[test]
    fn folding_basics() {
        let one = StallingsAutomaton::flower(&gws(&["01"])).fold();
        let two = StallingsAutomaton::flower(&gws(&["01", "01"])).fold();
        assert_eq!(one, two);
        assert_eq!(one.fold(), one);
        let rose = StallingsAutomaton::subgroup(&gws(&["0", "1"]));
        assert!(rose.is_rose(2));
        assert_eq!(rose.core(), rose);
        // 0 0' is reduced away; 01 and 0 generate the rose
        assert!(StallingsAutomaton::subgroup(&gws(&["01", "0"])).is_rose(2));
    }

    #[test]
    fn core_trims_tails() {
        let path = StallingsAutomaton::from_edges(3, vec![e(0, 0, 0), e(0, 1, 1), e(1, 1, 2)]).unwrap();
        let core = path.core();
        assert_eq!(core.edges(), &[e(0, 0, 0)]);
        let trivial = StallingsAutomaton::from_edges(2, vec![e(0, 0, 1)]).unwrap().core();
        assert_eq!(trivial, StallingsAutomaton::trivial());
    }

    #[test]
    fn morse_image_matches_figure() {
        let images = gws(&["01", "023132", "0232", "0131"]);
        let a = StallingsAutomaton::subgroup(&images);
        let (figure, tree) = morse_figure();
        assert!(a.is_isomorphic(&figure));
        assert_eq!(a.rank(), 4);
        let basis = figure.basis_from_tree(&tree);
        let found: std::collections::BTreeSet<GroupWord> = basis.elements.into_iter().collect();
        assert_eq!(found, gws(&["03'", "31", "3232", "2'12'3'"]).into_iter().collect());
        assert!(!figure.membership(&gw("31'")));
    }

    #[test]
    fn membership_cases() {
        let (a, _) = morse_figure();
        assert!(a.membership(&GroupWord::identity()));
        for w in ["01", "023132", "0232", "0131"] {
            assert!(a.membership(&gw(w)));
        }
        assert!(!a.membership(&gw("0")));
    }

    #[test]
    fn spanning_trees() {
        let rose = StallingsAutomaton::subgroup(&gws(&["0", "1"]));
        assert!(rose.spanning_tree().edges().is_empty());
        let basis = rose.basis_from_tree(&rose.spanning_tree());
        assert_eq!(basis.elements, gws(&["0", "1"]));
        let line = StallingsAutomaton::from_edges(3, vec![e(0, 0, 1), e(1, 1, 2)]).unwrap();
        assert_eq!(line.spanning_tree().edges(), &[0, 1]);
        let (a, _) = morse_figure();
        assert_eq!(a.spanning_tree().edges().len(), 3);
        assert!(SpanningTree::from_edges(&a, vec![0, 1, 3]).is_err());
        assert!(SpanningTree::from_edges(&a, vec![0, 3]).is_err());
    }

    #[test]
    fn express_in_tree_basis() {
        let (a, t) = morse_figure();
        let basis = a.basis_from_tree(&t);
        for (k, b) in basis.elements.iter().enumerate() {
            assert_eq!(a.express_in_basis(&t, b).unwrap(), GroupWord::letter(k));
        }
        assert_eq!(a.express_in_basis(&t, &GroupWord::identity()).unwrap(), GroupWord::identity());
        assert_eq!(a.express_in_basis(&t, &gw("0")), Err(Error::NotAMember(gw("0"))));
    }

    #[test]
    fn labeled_fold_expresses_and_finds_relations() {
        let gens = gws(&["01", "023132", "0232", "0131"]);
        let lf = LabeledFold::new(&gens);
        assert!(lf.is_free_basis());
        for (k, w) in gens.iter().enumerate() {
            assert_eq!(lf.express(w).unwrap(), GroupWord::letter(k));
        }
        let tau = gws(&["0123", "013", "02123", "0213"]);
        let lf = LabeledFold::new(&tau);
        let r = lf.relations().first().expect("relation").clone();
        assert!(!r.is_identity());
        assert!(r.substitute(&tau).is_identity());
        let with_empty = LabeledFold::new(&gws(&["0", ""]));
        assert_eq!(with_empty.relations(), &[gw("1")]);
    }

    #[test]
    fn dot_output() {
        let trivial = StallingsAutomaton::trivial().to_dot(None);
        assert_eq!(trivial, "digraph stallings {\n  rankdir=LR;\n  node [shape=circle];\n  s0 [shape=doublecircle];\n}\n");
        let (a, t) = morse_figure();
        let dot = a.to_dot(Some(&t));
        assert_eq!(dot.matches("style=dashed").count(), 3);
        assert_eq!(dot.matches("->").count(), 7);
    }

    #[test]
    fn json_shape() {
        let a = StallingsAutomaton::subgroup(&gws(&["0"]));
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"states":1,"basepoint":0,"edges":[[0,0,0]]}"#);
    }

    fn random_word(rng: &mut ChaCha8Rng, letters: usize, max_len: usize) -> GroupWord {
        let len = rng.gen_range(0..=max_len);
        GroupWord::reduce((0..len).map(|_| {
            let a = rng.gen_range(0..letters);
            if rng.gen_bool(0.5) {
                Gen::pos(a)
            } else {
                Gen::neg(a)
            }
        }))
    }

    /// Folds a flower by repeatedly merging the last conflicting pair found,
    /// as an independent folding order.
    fn naive_fold(words: &[GroupWord]) -> StallingsAutomaton {
        let flower = StallingsAutomaton::flower(words);
        let mut states: Vec<usize> = (0..flower.states()).collect();
        let mut edges: Vec<Edge> = flower.edges().to_vec();
        loop {
            edges.sort_unstable();
            edges.dedup();
            let mut found = None;
            'search: for i in (0..edges.len()).rev() {
                for j in (0..i).rev() {
                    let (x, y) = (edges[i], edges[j]);
                    if x.letter != y.letter {
                        continue;
                    }
                    if x.src == y.src && x.dst != y.dst {
                        found = Some((x.dst.max(y.dst), x.dst.min(y.dst)));
                        break 'search;
                    }
                    if x.dst == y.dst && x.src != y.src {
                        found = Some((x.src.max(y.src), x.src.min(y.src)));
                        break 'search;
                    }
                }
            }
            let Some((from, into)) = found else { break };
            for ed in &mut edges {
                if ed.src == from {
                    ed.src = into;
                }
                if ed.dst == from {
                    ed.dst = into;
                }
            }
            states.retain(|&s| s != from);
        }
        let index: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let edges = edges.iter().map(|ed| e(index[&ed.src], ed.letter, index[&ed.dst])).collect();
        StallingsAutomaton::from_edges(states.len(), edges).unwrap()
    }

    #[test]
    fn folding_confluence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let letters = rng.gen_range(1..=4);
            let count = rng.gen_range(1..=5);
            let gens: Vec<GroupWord> = (0..count).map(|_| random_word(&mut rng, letters, 8)).collect();
            let a = StallingsAutomaton::flower(&gens).fold();
            let b = naive_fold(&gens);
            assert!(a.is_folded() && b.is_folded());
            assert!(a.is_isomorphic(&b), "{gens:?}");
            for _ in 0..200 {
                let w = random_word(&mut rng, letters, 10);
                assert_eq!(a.membership(&w), b.membership(&w));
            }
        }
    }

    #[test]
    fn membership_matches_short_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let gens: Vec<GroupWord> = (0..rng.gen_range(1..=3)).map(|_| random_word(&mut rng, 3, 5)).collect();
            let a = StallingsAutomaton::subgroup(&gens);
            let mut symmetric = gens.clone();
            symmetric.extend(gens.iter().map(|g| g.invert()));
            let mut products = vec![GroupWord::identity()];
            for _ in 0..3 {
                let last = products.clone();
                for p in &last {
                    for g in &symmetric {
                        products.push(p.concat(g));
                    }
                }
            }
            for p in &products {
                assert!(a.membership(p), "{p} in <{gens:?}>");
            }
        }
    }

    #[test]
    fn basis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let gens: Vec<GroupWord> = (0..rng.gen_range(1..=4)).map(|_| random_word(&mut rng, 3, 6)).collect();
            let a = StallingsAutomaton::subgroup(&gens);
            let t = a.spanning_tree();
            let basis = a.basis_from_tree(&t);
            assert_eq!(basis.len(), a.rank());
            assert!(a.rank() <= gens.iter().filter(|g| !g.is_identity()).count());
            for g in &gens {
                let x = a.express_in_basis(&t, g).unwrap();
                assert_eq!(&x.substitute(&basis.elements), g);
            }
            let lf = LabeledFold::new(&gens);
            for g in &basis.elements {
                assert_eq!(&lf.express(g).unwrap().substitute(&gens), g);
            }
            for r in lf.relations() {
                assert!(r.substitute(&gens).is_identity());
            }
            // a free generating set folds without relations
            assert_eq!(lf.is_free_basis(), a.rank() == gens.len());
        }
    }

    proptest! {
        #[test]
        fn rank_bounded_by_generators(raw in prop::collection::vec(prop::collection::vec((0usize..3, any::<bool>()), 0..7), 0..5)) {
            let gens: Vec<GroupWord> = raw
                .iter()
                .map(|w| GroupWord::reduce(w.iter().map(|&(a, inv)| if inv { Gen::neg(a) } else { Gen::pos(a) })))
                .collect();
            let a = StallingsAutomaton::subgroup(&gens);
            prop_assert!(a.rank() <= gens.len());
            for g in &gens {
                prop_assert!(a.membership(g));
            }
        }
    }
}
