//! The `ℤ₂` layer: parity graphs over covers and orientability verdicts.
//!
//! A `ℤ₂`-valued 1-cocycle on the groupoid pulled back to a cover is recorded
//! as a graph whose nodes are the connected components of the cover pieces
//! and whose edges carry the sign of the cocycle on the arrows between them.
//! The cocycle is trivial iff there is `ε: nodes → {±1}` with
//! `ε(a)·ε(b) = parity` on every edge.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chars::Character;
use crate::error::{Error, Result};
use crate::groupoid::{
    canonical_groupoid_rep, fixed_point_obstruction, tilde_cocycle, additive_part, Arrow, DensityWitness,
    FixedPointCertificate, GroupoidModel, IsotropyArrow, Letter, ModelKind, MultCocycle,
};
use crate::symcore::{parse_rational, Chart, RatExpr, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityEdge {
    pub a: usize,
    pub b: usize,
    /// `+1` or `-1`.
    pub parity: i8,
    /// Where the edge came from, for reports.
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGraph {
    nodes: Vec<String>,
    edges: Vec<ParityEdge>,
}

/// A closed walk `nodes[0] → nodes[1] → … → nodes[0]` along `edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    /// `ε` with `ε(a)·ε(b) = parity` on every edge.
    Trivial(Vec<i8>),
    /// A closed walk whose parities multiply to `-1`.
    Nontrivial(Cycle),
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial(_))
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    /// parity (as a bit) from a node to its parent
    flip: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
            flip: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, up) = self.find(p);
        self.flip[x] ^= up;
        self.parent[x] = root;
        (root, self.flip[x])
    }

    /// Record `bit(a) ^ bit(b) = odd`; false on a contradiction.
    fn union(&mut self, a: usize, b: usize, odd: bool) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == odd { Some(false) } else { None };
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        self.flip[lo] = pa ^ pb ^ odd;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        Some(true)
    }
}

impl ParityGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<ParityEdge>) -> Result<ParityGraph> {
        for (i, n) in nodes.iter().enumerate() {
            if nodes[..i].contains(n) {
                return Err(Error::Schema(format!("duplicate node `{n}`")));
            }
        }
        for e in &edges {
            if e.a >= nodes.len() || e.b >= nodes.len() {
                return Err(Error::Schema(format!("edge ({}, {}) refers to a missing node", e.a, e.b)));
            }
            if e.parity != 1 && e.parity != -1 {
                return Err(Error::Schema(format!("parity must be +1 or -1, got {}", e.parity)));
            }
        }
        Ok(ParityGraph { nodes, edges })
    }

    /// Build from `(a, b, parity)` triples.
    pub fn from_triples(nodes: Vec<String>, edges: &[(usize, usize, i8)]) -> Result<ParityGraph> {
        ParityGraph::new(
            nodes,
            edges
                .iter()
                .map(|&(a, b, parity)| ParityEdge { a, b, parity, label: None })
                .collect(),
        )
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ParityEdge] {
        &self.edges
    }

    /// Union-find with parity. On a contradiction the returned cycle is the
    /// spanning-forest path between the endpoints closed by the offending
    /// edge.
    pub fn decide_trivial(&self) -> Triviality {
        let n = self.nodes.len();
        let mut uf = UnionFind::new(n);
        let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            match uf.union(e.a, e.b, e.parity == -1) {
                Some(true) => {
                    forest[e.a].push((e.b, i));
                    forest[e.b].push((e.a, i));
                }
                Some(false) => {}
                None => {
                    let (mut nodes, mut edges) = forest_path(&forest, e.a, e.b);
                    edges.push(i);
                    nodes.truncate(edges.len());
                    return Triviality::Nontrivial(Cycle { nodes, edges });
                }
            }
        }
        Triviality::Trivial((0..n).map(|x| if uf.find(x).1 { -1 } else { 1 }).collect())
    }

    pub fn verify_assignment(&self, eps: &[i8]) -> bool {
        eps.len() == self.nodes.len()
            && eps.iter().all(|&s| s == 1 || s == -1)
            && self.edges.iter().all(|e| eps[e.a] * eps[e.b] == e.parity)
    }

    pub fn verify_cycle(&self, c: &Cycle) -> bool {
        let k = c.nodes.len();
        if k == 0 || c.edges.len() != k {
            return false;
        }
        let mut product = 1i8;
        for (i, &ei) in c.edges.iter().enumerate() {
            let Some(e) = self.edges.get(ei) else { return false };
            let (from, to) = (c.nodes[i], c.nodes[(i + 1) % k]);
            if !((e.a == from && e.b == to) || (e.a == to && e.b == from)) {
                return false;
            }
            product *= e.parity;
        }
        product == -1
    }

    /// Re-check a verdict against the graph.
    pub fn verify(&self, t: &Triviality) -> bool {
        match t {
            Triviality::Trivial(eps) => self.verify_assignment(eps),
            Triviality::Nontrivial(c) => self.verify_cycle(c),
        }
    }

    /// Edgewise product of parities, the graph of the tensor product of the
    /// underlying lines. Both graphs must have the same nodes and edge
    /// endpoints.
    pub fn product(&self, other: &ParityGraph) -> Result<ParityGraph> {
        if self.nodes != other.nodes
            || self.edges.len() != other.edges.len()
            || self.edges.iter().zip(&other.edges).any(|(p, q)| p.a != q.a || p.b != q.b)
        {
            return Err(Error::BaseMismatch);
        }
        Ok(ParityGraph {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .zip(&other.edges)
                .map(|(p, q)| ParityEdge {
                    a: p.a,
                    b: p.b,
                    parity: p.parity * q.parity,
                    label: p.label.clone(),
                })
                .collect(),
        })
    }

    pub fn describe_cycle(&self, c: &Cycle) -> String {
        let k = c.nodes.len();
        let steps: Vec<String> = c
            .edges
            .iter()
            .enumerate()
            .map(|(i, &ei)| {
                let e = &self.edges[ei];
                let sign = if e.parity == 1 { "+" } else { "-" };
                let label = e.label.as_deref().map(|l| format!(" {l}")).unwrap_or_default();
                format!(
                    "{} -[{sign}{label}]-> {}",
                    self.nodes[c.nodes[i]],
                    self.nodes[c.nodes[(i + 1) % k]]
                )
            })
            .collect();
        steps.join(", ")
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<ParityGraph> {
        let index = |r: &NodeRef| -> Result<usize> {
            match r {
                NodeRef::Index(i) => Ok(*i),
                NodeRef::Name(s) => spec
                    .nodes
                    .iter()
                    .position(|n| n == s)
                    .ok_or_else(|| Error::Schema(format!("unknown node `{s}`"))),
            }
        };
        let mut edges = Vec::with_capacity(spec.edges.len());
        for (a, b, p) in &spec.edges {
            edges.push(ParityEdge {
                a: index(a)?,
                b: index(b)?,
                parity: *p,
                label: None,
            });
        }
        ParityGraph::new(spec.nodes.clone(), edges)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| (NodeRef::Name(self.nodes[e.a].clone()), NodeRef::Name(self.nodes[e.b].clone()), e.parity))
                .collect(),
        }
    }
}

fn forest_path(forest: &[Vec<(usize, usize)>], from: usize, to: usize) -> (Vec<usize>, Vec<usize>) {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; forest.len()];
    let mut seen = vec![false; forest.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, e) in &forest[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut nodes = vec![to];
    let mut edges = Vec::new();
    let mut v = to;
    while let Some((p, e)) = prev[v] {
        nodes.push(p);
        edges.push(e);
        v = p;
    }
    nodes.reverse();
    edges.reverse();
    (nodes, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeRef {
    Index(usize),
    Name(String),
}

/// JSON form: `{"nodes": [...], "edges": [[a, b, 1 | -1], ...]}` with nodes
/// referenced by name or 0-based index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: Vec<String>,
    pub edges: Vec<(NodeRef, NodeRef, i8)>,
}

/// An open interval, unbounded where a bound is missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn contains(&self, t: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo < t) && self.hi.as_ref().is_none_or(|hi| t < hi)
    }

    fn overlaps(&self, other: &Interval) -> bool {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.as_ref().or(b.as_ref()),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.as_ref().or(b.as_ref()),
        };
        match (lo, hi) {
            (Some(l), Some(h)) => l < h,
            _ => true,
        }
    }

    fn within(&self, other: &Interval) -> bool {
        let lo_ok = match (&self.lo, &other.lo) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a >= b,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        };
        lo_ok && hi_ok
    }
}

/// One connected component of a cover piece: an open box and a base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub bounds: Vec<Interval>,
    pub base: Vec<Rational>,
}

impl Component {
    pub fn contains(&self, p: &[Rational]) -> bool {
        p.len() == self.bounds.len() && self.bounds.iter().zip(p).all(|(i, t)| i.contains(t))
    }

    fn overlaps(&self, other: &Component) -> bool {
        self.bounds.iter().zip(&other.bounds).all(|(a, b)| a.overlaps(b))
    }

    fn within(&self, other: &Component) -> bool {
        self.bounds.iter().zip(&other.bounds).all(|(a, b)| a.within(b))
    }

    /// The base point and a small product grid inside the box.
    fn samples(&self, resolution: usize) -> Vec<Vec<Rational>> {
        let axes: Vec<Vec<Rational>> = self
            .bounds
            .iter()
            .zip(&self.base)
            .map(|(iv, b)| axis_samples(iv, b, resolution))
            .collect();
        let mut out = vec![self.base.clone()];
        let mut grid: Vec<Vec<Rational>> = vec![Vec::new()];
        for axis in &axes {
            grid = grid
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |t| {
                        let mut q = p.clone();
                        q.push(t.clone());
                        q
                    })
                })
                .collect();
        }
        out.extend(grid.into_iter().filter(|p| *p != self.base));
        out
    }
}

fn axis_samples(iv: &Interval, base: &Rational, resolution: usize) -> Vec<Rational> {
    let r = |n: i64| Rational::from_integer(n.into());
    match (&iv.lo, &iv.hi) {
        (Some(lo), Some(hi)) => {
            let step = (hi - lo) / r(resolution as i64);
            (0..resolution)
                .map(|i| lo + &step * (r(2 * i as i64 + 1) / r(2)))
                .collect()
        }
        (Some(lo), None) => vec![lo + (base - lo) / r(4), base.clone(), base + r(1), base + r(4)],
        (None, Some(hi)) => vec![base - r(4), base - r(1), base.clone(), hi - (hi - base) / r(4)],
        (None, None) => vec![base - r(4), base - r(1), base.clone(), base + r(1), base + r(4)],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPiece {
    pub name: String,
    pub components: Vec<Component>,
}

/// A cover of the chart by named pieces, each a declared union of boxes
/// with one base point per box, plus sample group elements for Lie-action
/// models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverDecl {
    pieces: Vec<CoverPiece>,
    group_samples: Vec<Vec<Rational>>,
    resolution: usize,
}

/// Node of a cover: `(piece, component)`.
pub type CoverNode = (usize, usize);

impl CoverDecl {
    pub fn new(pieces: Vec<CoverPiece>, group_samples: Vec<Vec<Rational>>) -> Result<CoverDecl> {
        if pieces.is_empty() {
            return Err(Error::InvalidCover("a cover needs at least one piece".into()));
        }
        let dim = pieces
            .first()
            .and_then(|p| p.components.first())
            .map_or(0, |c| c.bounds.len());
        for p in &pieces {
            if p.components.is_empty() {
                return Err(Error::InvalidCover(format!("piece `{}` has no components", p.name)));
            }
            for (k, c) in p.components.iter().enumerate() {
                if c.bounds.len() != dim || c.base.len() != dim {
                    return Err(Error::InvalidCover(format!("piece `{}` mixes dimensions", p.name)));
                }
                if c.bounds.iter().any(|i| matches!((&i.lo, &i.hi), (Some(l), Some(h)) if l >= h)) {
                    return Err(Error::InvalidCover(format!("piece `{}` has an empty box", p.name)));
                }
                if !c.contains(&c.base) {
                    return Err(Error::InvalidCover(format!(
                        "base point of component {} of `{}` lies outside its box",
                        k + 1,
                        p.name
                    )));
                }
                if p.components[..k].iter().any(|d| d.overlaps(c)) {
                    return Err(Error::InvalidCover(format!("components of `{}` overlap", p.name)));
                }
            }
        }
        Ok(CoverDecl {
            pieces,
            group_samples,
            resolution: 3,
        })
    }

    /// One piece equal to the whole chart, based at `base`.
    pub fn whole(base: Vec<Rational>) -> CoverDecl {
        let bounds = vec![Interval { lo: None, hi: None }; base.len()];
        CoverDecl::new(
            vec![CoverPiece {
                name: "M".into(),
                components: vec![Component { bounds, base }],
            }],
            Vec::new(),
        )
        .expect("an unbounded box contains its base point")
    }

    pub fn with_group_samples(mut self, samples: Vec<Vec<Rational>>) -> CoverDecl {
        self.group_samples = samples;
        self
    }

    /// Grid resolution used for sign-constancy sampling inside boxes.
    pub fn with_resolution(mut self, resolution: usize) -> CoverDecl {
        self.resolution = resolution.max(1);
        self
    }

    pub fn pieces(&self) -> &[CoverPiece] {
        &self.pieces
    }

    pub fn group_samples(&self) -> &[Vec<Rational>] {
        &self.group_samples
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].components[0].bounds.len()
    }

    pub fn nodes(&self) -> Vec<CoverNode> {
        self.pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| (0..p.components.len()).map(move |k| (i, k)))
            .collect()
    }

    pub fn component(&self, node: CoverNode) -> &Component {
        &self.pieces[node.0].components[node.1]
    }

    pub fn node_name(&self, node: CoverNode) -> String {
        let p = &self.pieces[node.0];
        if p.components.len() == 1 {
            p.name.clone()
        } else {
            format!("{}.{}", p.name, node.1 + 1)
        }
    }

    /// For each node of `self`, a node of `coarser` whose box contains it.
    pub fn refinement_map(&self, coarser: &CoverDecl) -> Result<Vec<usize>> {
        let targets = coarser.nodes();
        self.nodes()
            .into_iter()
            .map(|n| {
                let c = self.component(n);
                targets
                    .iter()
                    .position(|&m| c.within(coarser.component(m)))
                    .ok_or_else(|| Error::InvalidCover(format!("`{}` lies in no piece of the coarser cover", self.node_name(n))))
            })
            .collect()
    }

    pub fn from_spec(spec: &CoverSpec) -> Result<CoverDecl> {
        let bound = |s: &str| -> Result<Option<Rational>> {
            match s.trim() {
                "-inf" | "inf" | "+inf" => Ok(None),
                t => parse_rational(t).map(Some),
            }
        };
        let mut pieces = Vec::new();
        for p in &spec.pieces {
            let mut components = Vec::new();
            for c in &p.components {
                let bounds = c
                    .r#box
                    .iter()
                    .map(|(lo, hi)| {
                        let lo_b = bound(lo)?;
                        let hi_b = bound(hi)?;
                        if lo_b.is_none() && lo.trim() != "-inf" || hi_b.is_none() && !matches!(hi.trim(), "inf" | "+inf") {
                            return Err(Error::Schema(format!("bad bounds [{lo}, {hi}]")));
                        }
                        Ok(Interval { lo: lo_b, hi: hi_b })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let base = c.base.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                components.push(Component { bounds, base });
            }
            pieces.push(CoverPiece {
                name: p.name.clone(),
                components,
            });
        }
        let samples = spec
            .group_samples
            .iter()
            .map(|u| u.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let cover = CoverDecl::new(pieces, samples)?;
        Ok(match spec.resolution {
            Some(r) => cover.with_resolution(r),
            None => cover,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    /// `[lo, hi]` per coordinate; `"-inf"` / `"inf"` for unbounded sides.
    #[serde(rename = "box")]
    pub r#box: Vec<(String, String)>,
    pub base: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub name: String,
    pub components: Vec<ComponentSpec>,
}

/// JSON form of a cover declaration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub pieces: Vec<PieceSpec>,
    #[serde(default)]
    pub group_samples: Vec<Vec<String>>,
    #[serde(default)]
    pub resolution: Option<usize>,
}

/// The pull-back of a trivializing assignment along a refinement.
pub fn pull_back_assignment(map: &[usize], eps: &[i8]) -> Vec<i8> {
    map.iter().map(|&m| eps[m]).collect()
}

fn show_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn sign_at(sign: &RatExpr, names: &[String], point: &[Rational], what: impl Fn() -> String) -> Result<i8> {
    let v = sign
        .eval_at(names, point)
        .map_err(|_| Error::SignVanishes(format!("{} hits a pole", what())))?;
    if v.is_zero() {
        return Err(Error::SignVanishes(what()));
    }
    Ok(if v.is_positive() { 1 } else { -1 })
}

struct EdgeBuilder<'a> {
    cover: &'a CoverDecl,
    nodes: Vec<CoverNode>,
    edges: Vec<ParityEdge>,
    seen: BTreeMap<(usize, usize, String), i8>,
}

impl EdgeBuilder<'_> {
    fn nodes_containing(&self, p: &[Rational]) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.cover.component(self.nodes[i]).contains(p))
            .collect()
    }

    /// Record that arrow family `tag` from node `a` to node `b` has sign
    /// `parity`; a later disagreement means the sign is not constant there.
    fn record(&mut self, a: usize, b: usize, tag: &str, parity: i8, label: String) -> Result<()> {
        match self.seen.get(&(a, b, tag.to_string())) {
            Some(&p) if p != parity => Err(Error::SignVanishes(format!(
                "sign of {tag} from `{}` to `{}` is not constant; refine the cover",
                self.cover.node_name(self.nodes[a]),
                self.cover.node_name(self.nodes[b])
            ))),
            Some(_) => Ok(()),
            None => {
                self.seen.insert((a, b, tag.to_string()), parity);
                self.edges.push(ParityEdge {
                    a,
                    b,
                    parity,
                    label: Some(label),
                });
                Ok(())
            }
        }
    }
}

/// Label the arrows of the groupoid pulled back to the cover by the sign of
/// `c̃`. Components that overlap are joined by unit arrows (parity `+1`).
/// Arrows are taken at every base point and at a sample grid in each box;
/// a sign change on one family of arrows between two components is an
/// error.
pub fn build_parity_graph(c: &MultCocycle, cover: &CoverDecl) -> Result<ParityGraph> {
    let model = c.model();
    let chart = model.chart();
    if cover.dim() != chart.dim() {
        return Err(Error::InvalidCover(format!(
            "cover has dimension {}, chart has {}",
            cover.dim(),
            chart.dim()
        )));
    }
    let mut eb = EdgeBuilder {
        cover,
        nodes: cover.nodes(),
        edges: Vec::new(),
        seen: BTreeMap::new(),
    };
    let count = eb.nodes.len();
    for a in 0..count {
        for b in a + 1..count {
            if cover.component(eb.nodes[a]).overlaps(cover.component(eb.nodes[b])) {
                eb.record(a, b, "unit", 1, "overlap".into())?;
            }
        }
    }
    let names = chart.names().to_vec();
    match model.kind() {
        ModelKind::Pair => {
            let sign = c.sign_part(&Arrow::Generic)?;
            let vars = model.arrow_vars();
            for a in 0..count {
                let sa = cover.component(eb.nodes[a]).samples(cover.resolution);
                for b in 0..count {
                    let sb = cover.component(eb.nodes[b]).samples(cover.resolution);
                    for (i, p) in sa.iter().take(4).enumerate() {
                        for (j, q) in sb.iter().take(4).enumerate() {
                            let pt: Vec<Rational> = q.iter().chain(p).cloned().collect();
                            let what = || format!("sign of the arrow {} → {}", show_point(p), show_point(q));
                            let s = sign_at(&sign, &vars, &pt, what)?;
                            if i == 0 && j == 0 || eb.seen.contains_key(&(a, b, "pair".into())) {
                                eb.record(a, b, "pair", s, format!("{} → {}", show_point(p), show_point(q)))?;
                            }
                        }
                    }
                }
            }
        }
        ModelKind::DiscreteAction { generators } => {
            for k in 0..generators.len() {
                let arrow = Arrow::Word(vec![Letter::gen(k)]);
                let sign = c.sign_part(&arrow)?;
                let target = model.target(&arrow)?;
                let tag = format!("g{}", k + 1);
                for a in 0..count {
                    for p in cover.component(eb.nodes[a]).samples(cover.resolution) {
                        let q = target
                            .iter()
                            .map(|e| e.eval_at(&names, &p))
                            .collect::<Result<Vec<_>>>()
                            .map_err(|_| Error::SignVanishes(format!("{tag} is undefined at {}", show_point(&p))))?;
                        let s = sign_at(&sign, &names, &p, || format!("sign of {tag} at {}", show_point(&p)))?;
                        let hits = eb.nodes_containing(&q);
                        if hits.is_empty() {
                            return Err(Error::InvalidCover(format!("{tag}{} = {} is not covered", show_point(&p), show_point(&q))));
                        }
                        for b in hits {
                            eb.record(a, b, &tag, s, format!("{tag} at {}", show_point(&p)))?;
                        }
                    }
                }
            }
        }
        ModelKind::LieAction { group, .. } => {
            let sign = c.sign_part(&Arrow::Generic)?;
            let target = model.target(&Arrow::Generic)?;
            let vars = model.arrow_vars();
            for u0 in cover.group_samples() {
                if u0.len() != group.dim() {
                    return Err(Error::InvalidCover(format!("group samples need {} coordinates", group.dim())));
                }
                let tag = format!("u={}", show_point(u0));
                for a in 0..count {
                    for p in cover.component(eb.nodes[a]).samples(cover.resolution) {
                        let pt: Vec<Rational> = u0.iter().chain(&p).cloned().collect();
                        let q = target
                            .iter()
                            .map(|e| e.eval_at(&vars, &pt))
                            .collect::<Result<Vec<_>>>()
                            .map_err(|_| Error::SignVanishes(format!("{tag} is undefined at {}", show_point(&p))))?;
                        let s = sign_at(&sign, &vars, &pt, || format!("sign of {tag} at {}", show_point(&p)))?;
                        let hits = eb.nodes_containing(&q);
                        if hits.is_empty() {
                            return Err(Error::InvalidCover(format!("{tag} maps {} to the uncovered {}", show_point(&p), show_point(&q))));
                        }
                        for b in hits {
                            eb.record(a, b, &tag, s, format!("{tag} at {}", show_point(&p)))?;
                        }
                    }
                }
            }
        }
    }
    let names = eb.nodes.iter().map(|&n| cover.node_name(n)).collect();
    ParityGraph::new(names, eb.edges)
}

/// The parity graph and its verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityVerdict {
    pub graph: ParityGraph,
    pub result: Triviality,
}

impl ParityVerdict {
    pub fn verify(&self) -> bool {
        self.graph.verify(&self.result)
    }
}

/// `w₁^tr`: triviality of the sign of the action on the transverse volume
/// line (the sign of `J̃`).
pub fn w1tr(model: &GroupoidModel, cover: &CoverDecl) -> Result<ParityVerdict> {
    let rep = canonical_groupoid_rep(model, Character::LAMBDA_TOP_DUAL)?;
    let c = tilde_cocycle(&rep, &RatExpr::one())?;
    let graph = build_parity_graph(&c, cover)?;
    let result = graph.decide_trivial();
    Ok(ParityVerdict { graph, result })
}

/// Evidence about the modular class.
#[derive(Clone, Debug, PartialEq)]
pub enum ModEvidence {
    /// An invariant transverse density: the class vanishes.
    Density(DensityWitness),
    /// A nonzero value of the modular cocycle for `sigma` on isotropy.
    Obstruction {
        sigma: RatExpr,
        certificate: FixedPointCertificate,
    },
    Unknown,
}

/// Try `sigma` as an invariant density, then the isotropy candidates.
pub fn modular_evidence(
    model: &GroupoidModel,
    sigma: &RatExpr,
    candidates: &[(IsotropyArrow, Vec<Rational>)],
) -> Result<ModEvidence> {
    if let Some(w) = DensityWitness::find(model, sigma)? {
        return Ok(ModEvidence::Density(w));
    }
    let c = additive_part(&tilde_cocycle(&canonical_groupoid_rep(model, Character::DENSITY)?, sigma)?)?;
    Ok(match fixed_point_obstruction(&c, candidates)? {
        Some(certificate) => ModEvidence::Obstruction {
            sigma: sigma.clone(),
            certificate,
        },
        None => ModEvidence::Unknown,
    })
}

impl ModEvidence {
    pub fn verify(&self, model: &GroupoidModel) -> bool {
        match self {
            ModEvidence::Density(w) => w.rep.model() == model && w.verify(),
            ModEvidence::Obstruction { sigma, certificate } => canonical_groupoid_rep(model, Character::DENSITY)
                .and_then(|rep| tilde_cocycle(&rep, sigma))
                .and_then(|c| additive_part(&c))
                .is_ok_and(|c| certificate.verify(&c)),
            ModEvidence::Unknown => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum VolumeVerdict {
    /// The invariant volume form `ε(node)·sigma` on each node.
    Yes {
        sigma: RatExpr,
        orientation: Vec<(String, i8)>,
    },
    ModularObstruction(FixedPointCertificate),
    NotOrientable(ParityVerdict),
    Unknown { orientation: ParityVerdict },
}

impl fmt::Display for VolumeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeVerdict::Yes { sigma, orientation } => {
                let parts: Vec<String> = orientation
                    .iter()
                    .map(|(n, s)| format!("{n}: {}", if *s == 1 { sigma.clone() } else { -sigma }))
                    .collect();
                write!(f, "yes, volume form {}", parts.join("; "))
            }
            VolumeVerdict::ModularObstruction(c) => write!(f, "no, modular class nonzero ({} at {}: {})", c.arrow, show_point(&c.point), c.value),
            VolumeVerdict::NotOrientable(v) => match &v.result {
                Triviality::Nontrivial(cycle) => write!(f, "no, not transversely orientable ({})", v.graph.describe_cycle(cycle)),
                Triviality::Trivial(_) => write!(f, "no"),
            },
            VolumeVerdict::Unknown { .. } => write!(f, "unknown, modular evidence inconclusive"),
        }
    }
}

/// Transverse volume forms exist iff the modular class vanishes and the
/// transverse orientation class is trivial. Evidence is re-verified first.
pub fn transverse_volume_form_criterion(
    model: &GroupoidModel,
    cover: &CoverDecl,
    evidence: &ModEvidence,
) -> Result<VolumeVerdict> {
    if !evidence.verify(model) {
        return Err(Error::MalformedCocycle("modular evidence does not verify".into()));
    }
    if let ModEvidence::Obstruction { certificate, .. } = evidence {
        return Ok(VolumeVerdict::ModularObstruction(certificate.clone()));
    }
    let w1 = w1tr(model, cover)?;
    if !w1.verify() {
        return Err(Error::MalformedCocycle("orientation certificate does not verify".into()));
    }
    match (&w1.result, evidence) {
        (Triviality::Nontrivial(_), _) => Ok(VolumeVerdict::NotOrientable(w1)),
        (Triviality::Trivial(eps), ModEvidence::Density(w)) => Ok(VolumeVerdict::Yes {
            sigma: w.sigma.clone(),
            orientation: w1.graph.nodes().iter().cloned().zip(eps.iter().copied()).collect(),
        }),
        _ => Ok(VolumeVerdict::Unknown { orientation: w1 }),
    }
}

/// A chart-level helper for tests and examples: the chart of a cover's model.
pub fn chart_dim_matches(chart: &Chart, cover: &CoverDecl) -> bool {
    chart.dim() == cover.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::groupoid::GpdLineRep;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    fn brute_force(g: &ParityGraph) -> bool {
        let n = g.nodes().len();
        (0u32..1 << n).any(|mask| {
            let eps: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            g.verify_assignment(&eps)
        })
    }

    #[test]
    fn explicit_two_node_models() {
        let cylinder = ParityGraph::from_triples(names(2), &[(0, 1, 1), (0, 1, 1)]).unwrap();
        assert!(cylinder.decide_trivial().is_trivial());
        let moebius = ParityGraph::from_triples(names(2), &[(0, 1, 1), (0, 1, -1)]).unwrap();
        let t = moebius.decide_trivial();
        assert!(!t.is_trivial());
        assert!(moebius.verify(&t));
    }

    #[test]
    fn cycles_and_forests() {
        let n = 6;
        let ring: Vec<(usize, usize, i8)> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        let g = ParityGraph::from_triples(names(n), &ring).unwrap();
        assert_eq!(g.decide_trivial(), Triviality::Trivial(vec![1; n]));
        let mut odd = ring.clone();
        odd[2].2 = -1;
        odd[4].2 = -1;
        odd[5].2 = -1;
        let g = ParityGraph::from_triples(names(n), &odd).unwrap();
        let t = g.decide_trivial();
        assert!(matches!(&t, Triviality::Nontrivial(c) if c.edges.len() == n));
        assert!(g.verify(&t));
        let tree = ParityGraph::from_triples(names(5), &[(0, 1, -1), (0, 2, 1), (2, 3, -1), (2, 4, -1)]).unwrap();
        let t = tree.decide_trivial();
        assert!(t.is_trivial() && tree.verify(&t));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let g = ParityGraph::from_triples(names(1), &[(0, 0, -1)]).unwrap();
        let t = g.decide_trivial();
        assert_eq!(t, Triviality::Nontrivial(Cycle { nodes: vec![0], edges: vec![0] }));
        assert!(g.verify(&t));
    }

    #[test]
    fn forged_certificates_fail() {
        let g = ParityGraph::from_triples(names(3), &[(0, 1, -1), (1, 2, -1), (0, 2, 1)]).unwrap();
        assert!(!g.verify_assignment(&[1, 1, 1]));
        assert!(g.verify_assignment(&[1, -1, 1]));
        assert!(!g.verify_cycle(&Cycle { nodes: vec![0, 1, 2], edges: vec![0, 1, 2] }));
    }

    #[test]
    fn graph_json() {
        let spec: GraphSpec = serde_json::from_str(r#"{"nodes": ["a", "b"], "edges": [["a", "b", 1], [0, 1, -1]]}"#).unwrap();
        let g = ParityGraph::from_spec(&spec).unwrap();
        assert!(!g.decide_trivial().is_trivial());
        let back = ParityGraph::from_spec(&serde_json::from_str(&serde_json::to_string(&g.to_spec()).unwrap()).unwrap()).unwrap();
        assert_eq!(back, g);
        let bad: GraphSpec = serde_json::from_str(r#"{"nodes": ["a"], "edges": [["a", "a", 2]]}"#).unwrap();
        assert!(ParityGraph::from_spec(&bad).is_err());
    }

    #[test]
    fn reflection_single_edge() {
        let rep = canonical_groupoid_rep(&catalog::reflection(), Character::LAMBDA_TOP_DUAL).unwrap();
        let c = tilde_cocycle(&rep, &RatExpr::one()).unwrap();
        let g = build_parity_graph(&c, &CoverDecl::whole(vec![q(1)]).with_resolution(1)).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].parity, -1);
    }

    #[test]
    fn w1_examples() {
        let v = w1tr(&catalog::pair(2), &CoverDecl::whole(vec![q(0), q(0)])).unwrap();
        assert!(v.result.is_trivial() && v.verify());
        let v = w1tr(&catalog::reflection(), &CoverDecl::whole(vec![q(1)])).unwrap();
        assert!(!v.result.is_trivial() && v.verify());
        let v = w1tr(&catalog::shift(), &CoverDecl::whole(vec![q(0)])).unwrap();
        assert!(v.result.is_trivial() && v.verify());
        let cover = CoverDecl::whole(vec![q(1)]).with_group_samples(vec![vec![q(1), q(-3)], vec![q(-1), q(0)].into_iter().map(|t| t / q(2)).collect()]);
        let v = w1tr(&catalog::affine(), &cover).unwrap();
        assert!(v.result.is_trivial() && v.verify());
    }

    #[test]
    fn negative_scalings_flip_the_normal_line() {
        // 1 + u < 0 reverses the line while fixing the origin
        let flip = CoverDecl::whole(vec![q(1)]).with_group_samples(vec![vec![q(-3)]]);
        let v = w1tr(&catalog::scaling(), &flip).unwrap();
        assert!(!v.result.is_trivial() && v.verify());
        let stay = CoverDecl::whole(vec![q(1)]).with_group_samples(vec![vec![q(1)], vec![q(-1) / q(2)]]);
        assert!(w1tr(&catalog::scaling(), &stay).unwrap().result.is_trivial());
        let degenerate = CoverDecl::whole(vec![q(1)]).with_group_samples(vec![vec![q(-1)]]);
        assert!(matches!(w1tr(&catalog::scaling(), &degenerate), Err(Error::SignVanishes(_))));
    }

    #[test]
    fn sign_twist_detected_by_parity_only() {
        let r = catalog::reflection();
        let rep = GpdLineRep::with_twists(&r, Character::TRIVIAL, vec![RatExpr::int(-1)]).unwrap();
        let c = tilde_cocycle(&rep, &RatExpr::one()).unwrap();
        let g = build_parity_graph(&c, &CoverDecl::whole(vec![q(1)])).unwrap();
        assert!(!g.decide_trivial().is_trivial());
    }

    #[test]
    fn volume_form_criterion_examples() {
        let one = RatExpr::one();
        let pair = catalog::pair(1);
        let ev = modular_evidence(&pair, &one, &[]).unwrap();
        let v = transverse_volume_form_criterion(&pair, &CoverDecl::whole(vec![q(0)]), &ev).unwrap();
        assert!(matches!(v, VolumeVerdict::Yes { .. }));

        let dbl = catalog::doubling();
        let ev = modular_evidence(&dbl, &one, &[(IsotropyArrow::Word(vec![Letter::gen(0)]), vec![q(0)])]).unwrap();
        let v = transverse_volume_form_criterion(&dbl, &CoverDecl::whole(vec![q(1)]), &ev).unwrap();
        assert!(matches!(v, VolumeVerdict::ModularObstruction(_)));

        let refl = catalog::reflection();
        let ev = modular_evidence(&refl, &one, &[]).unwrap();
        assert!(matches!(ev, ModEvidence::Density(_)));
        let v = transverse_volume_form_criterion(&refl, &CoverDecl::whole(vec![q(1)]), &ev).unwrap();
        assert!(matches!(v, VolumeVerdict::NotOrientable(_)));

        let forged = ModEvidence::Density(DensityWitness {
            rep: canonical_groupoid_rep(&dbl, Character::DENSITY).unwrap(),
            sigma: one,
        });
        assert!(transverse_volume_form_criterion(&dbl, &CoverDecl::whole(vec![q(1)]), &forged).is_err());
    }

    fn two_halves() -> CoverDecl {
        let spec: CoverSpec = serde_json::from_str(
            r#"{"pieces": [
                {"name": "L", "components": [{"box": [["-inf", "1"]], "base": ["-1"]}]},
                {"name": "R", "components": [{"box": [["-1", "inf"]], "base": ["1"]}]}
            ]}"#,
        )
        .unwrap();
        CoverDecl::from_spec(&spec).unwrap()
    }

    #[test]
    fn cover_json_and_refinement() {
        let fine = two_halves();
        assert_eq!(fine.nodes().len(), 2);
        let coarse = CoverDecl::whole(vec![q(0)]);
        let map = fine.refinement_map(&coarse).unwrap();
        assert_eq!(map, vec![0, 0]);
        assert!(coarse.refinement_map(&fine).is_err());
        for m in [catalog::shift(), catalog::pair(1), catalog::doubling()] {
            let coarse_v = w1tr(&m, &coarse).unwrap();
            let fine_v = w1tr(&m, &fine).unwrap();
            let Triviality::Trivial(eps) = &coarse_v.result else { panic!("trivial") };
            assert!(fine_v.graph.verify_assignment(&pull_back_assignment(&map, eps)));
        }
        let refl = w1tr(&catalog::reflection(), &fine).unwrap();
        assert!(!refl.result.is_trivial() && refl.verify());
    }

    #[test]
    fn invalid_covers() {
        let spec: CoverSpec = serde_json::from_str(
            r#"{"pieces": [{"name": "U", "components": [{"box": [["0", "1"]], "base": ["2"]}]}]}"#,
        )
        .unwrap();
        assert!(matches!(CoverDecl::from_spec(&spec), Err(Error::InvalidCover(_))));
        let spec: CoverSpec = serde_json::from_str(
            r#"{"pieces": [{"name": "U", "components": [{"box": [["0", "1"]], "base": ["1/2"]}]}]}"#,
        )
        .unwrap();
        let cover = CoverDecl::from_spec(&spec).unwrap();
        assert!(matches!(w1tr(&catalog::doubling(), &cover), Err(Error::InvalidCover(_))));
    }

    #[test]
    fn tensor_multiplies_parities() {
        let g1 = ParityGraph::from_triples(names(3), &[(0, 1, -1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let g2 = ParityGraph::from_triples(names(3), &[(0, 1, 1), (1, 2, -1), (2, 0, 1)]).unwrap();
        let p = g1.product(&g2).unwrap();
        assert!(p.decide_trivial().is_trivial());
        assert!(!g1.decide_trivial().is_trivial() && !g2.decide_trivial().is_trivial());
    }

    fn arb_graph() -> impl Strategy<Value = ParityGraph> {
        (1usize..=8).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, prop::bool::ANY), 0..16).prop_map(move |es| {
                let triples: Vec<(usize, usize, i8)> = es.into_iter().map(|(a, b, s)| (a, b, if s { -1 } else { 1 })).collect();
                ParityGraph::from_triples(names(n), &triples).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(g in arb_graph()) {
            let t = g.decide_trivial();
            prop_assert!(g.verify(&t));
            prop_assert_eq!(t.is_trivial(), brute_force(&g));
        }

        #[test]
        fn triviality_is_a_group_law(g in arb_graph(), flips in prop::collection::vec(prop::bool::ANY, 16)) {
            let other = ParityGraph::new(
                g.nodes().to_vec(),
                g.edges().iter().zip(flips.iter().cycle()).map(|(e, &f)| ParityEdge { parity: if f { -e.parity } else { e.parity }, ..e.clone() }).collect(),
            ).unwrap();
            let both = g.product(&other).unwrap();
            if g.decide_trivial().is_trivial() {
                prop_assert_eq!(both.decide_trivial().is_trivial(), other.decide_trivial().is_trivial());
            }
        }
    }
}
