//! Concrete Lie groupoid models and their transverse line representations.
//!
//! Three families are supported, each with structure maps given as rational
//! functions so that every groupoid identity is decidable:
//!
//! * the pair groupoid `M × M`, arrows `(x', x): x → x'`;
//! * the action of a finitely generated group of birational automorphisms,
//!   arrows `(w, x): x → φ_w(x)` labelled by words `w` in the generators;
//! * the action of a Lie group chart `u` (identity at `u = 0`), arrows
//!   `(u, x): x → a(u, x)`.
//!
//! Inside expressions the second argument of a group multiplication, and the
//! target of a pair arrow, carry a `'` suffix: `mul` is written in `u, u'`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chars::{Character, FormalScalar};
use crate::error::{Error, Result};
use crate::symcore::linalg::{det, jacobian, matmul};
use crate::symcore::{Chart, Decision, LogSum, RatExpr, Rational};

/// A simultaneous substitution of variables.
pub type Subst = Vec<(String, RatExpr)>;

fn subst_of(names: &[String], values: &[RatExpr]) -> Subst {
    names.iter().cloned().zip(values.iter().cloned()).collect()
}

fn vars_of(names: &[String]) -> Vec<RatExpr> {
    names.iter().map(|n| RatExpr::var(n)).collect()
}

fn apply_all(exprs: &[RatExpr], map: &Subst) -> Result<Vec<RatExpr>> {
    exprs.iter().map(|e| e.substitute(map)).collect()
}

fn primed(names: &[String], k: usize) -> Vec<String> {
    let suffix = "'".repeat(k);
    names.iter().map(|n| format!("{n}{suffix}")).collect()
}

fn uses_only(e: &RatExpr, allowed: &[String]) -> Result<()> {
    match e.free_vars().into_iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(Error::UnknownVariable(v)),
        None => Ok(()),
    }
}

fn same(a: &[RatExpr], b: &[RatExpr]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| p == q)
}

fn degenerate(what: &str) -> Error {
    Error::DegenerateModel(what.to_string())
}

fn combine(decisions: impl IntoIterator<Item = Decision>) -> Decision {
    let mut out = Decision::Equal;
    for d in decisions {
        match d {
            Decision::NotEqual => return Decision::NotEqual,
            Decision::Unknown => out = Decision::Unknown,
            Decision::Equal => {}
        }
    }
    out
}

/// A birational automorphism of the chart with its explicit inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    map: Vec<RatExpr>,
    inverse: Vec<RatExpr>,
}

impl Generator {
    pub fn new(map: Vec<RatExpr>, inverse: Vec<RatExpr>) -> Generator {
        Generator { map, inverse }
    }

    pub fn map(&self) -> &[RatExpr] {
        &self.map
    }

    pub fn inverse(&self) -> &[RatExpr] {
        &self.inverse
    }
}

/// A Lie group chart with identity at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct LieGroup {
    coords: Vec<String>,
    mul: Vec<RatExpr>,
    inv: Vec<RatExpr>,
}

impl LieGroup {
    /// `mul` is written in the coordinates and their primed copies, `inv` in
    /// the coordinates. Checks the unit, inverse and associativity laws.
    pub fn new(coords: Vec<String>, mul: Vec<RatExpr>, inv: Vec<RatExpr>) -> Result<LieGroup> {
        Chart::new(coords.iter().cloned())?;
        let m = coords.len();
        if mul.len() != m || inv.len() != m {
            return Err(Error::DimensionMismatch(format!("group of dimension {m} needs {m} mul and inv entries")));
        }
        let both: Vec<String> = coords.iter().cloned().chain(primed(&coords, 1)).collect();
        for e in &mul {
            uses_only(e, &both)?;
        }
        for e in &inv {
            uses_only(e, &coords)?;
        }
        let g = LieGroup { coords, mul, inv };
        let u = vars_of(&g.coords);
        let u1 = vars_of(&primed(&g.coords, 1));
        let u2 = vars_of(&primed(&g.coords, 2));
        let zero = vec![RatExpr::zero(); m];
        if !same(&g.compose(&u, &zero)?, &u) || !same(&g.compose(&zero, &u1)?, &u1) {
            return Err(degenerate("the origin is not a two-sided identity"));
        }
        if !same(&g.compose(&u, &g.invert(&u)?)?, &zero) || !same(&g.compose(&g.invert(&u)?, &u)?, &zero) {
            return Err(degenerate("inv is not a two-sided inverse"));
        }
        let left = g.compose(&g.compose(&u, &u1)?, &u2)?;
        let right = g.compose(&u, &g.compose(&u1, &u2)?)?;
        if !same(&left, &right) {
            return Err(degenerate("multiplication is not associative"));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn mul(&self) -> &[RatExpr] {
        &self.mul
    }

    pub fn inv(&self) -> &[RatExpr] {
        &self.inv
    }

    /// `mul(a, b)`.
    pub fn compose(&self, a: &[RatExpr], b: &[RatExpr]) -> Result<Vec<RatExpr>> {
        let mut map = subst_of(&self.coords, a);
        map.extend(subst_of(&primed(&self.coords, 1), b));
        apply_all(&self.mul, &map)
    }

    /// `inv(a)`.
    pub fn invert(&self, a: &[RatExpr]) -> Result<Vec<RatExpr>> {
        apply_all(&self.inv, &subst_of(&self.coords, a))
    }

    /// `R(u) = ∂mul(w, u)/∂w at w = 0`: the right-translated frame of the
    /// Lie algebra at `u`, columns indexed by the algebra basis.
    pub fn right_frame(&self) -> Vec<Vec<RatExpr>> {
        let zero: Subst = self.coords.iter().map(|c| (c.clone(), RatExpr::zero())).collect();
        let rename: Vec<(String, String)> = primed(&self.coords, 1).into_iter().zip(self.coords.iter().cloned()).collect();
        self.mul
            .iter()
            .map(|mc| {
                self.coords
                    .iter()
                    .map(|k| {
                        mc.partial(k)
                            .substitute(&zero)
                            .expect("polynomial substitution")
                            .rename(&rename)
                    })
                    .collect()
            })
            .collect()
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(generator: usize) -> Letter {
        Letter { generator, inverse: false }
    }

    pub fn inv(generator: usize) -> Letter {
        Letter { generator, inverse: true }
    }

    /// `k` for generator `k` (1-based), `-k` for its inverse.
    pub fn from_signed(k: i64) -> Result<Letter> {
        if k == 0 {
            return Err(Error::Schema("word letters are nonzero 1-based generator indices".into()));
        }
        Ok(Letter {
            generator: (k.unsigned_abs() - 1) as usize,
            inverse: k < 0,
        })
    }

    pub fn to_signed(self) -> i64 {
        let k = self.generator as i64 + 1;
        if self.inverse {
            -k
        } else {
            k
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}^-1", self.generator + 1)
        } else {
            write!(f, "g{}", self.generator + 1)
        }
    }
}

/// Which arrows a symbolic value refers to: the generic arrow of a pair or
/// Lie-action model, or the arrows labelled by a word in a discrete action.
/// A word `[l1, …, lk]` acts as `φ_{l1} ∘ … ∘ φ_{lk}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arrow {
    Generic,
    Word(Vec<Letter>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Pair,
    DiscreteAction { generators: Vec<Generator> },
    LieAction { group: LieGroup, action: Vec<RatExpr> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidModel {
    chart: Chart,
    kind: ModelKind,
}

/// One composable pair written as substitutions into the arrow variables:
/// the value at `g`, `h` and `gh` is the value on the given arrow family
/// with the given substitution applied.
#[derive(Clone, Debug)]
pub struct ComposablePair {
    pub g: (Arrow, Subst),
    pub h: (Arrow, Subst),
    pub gh: (Arrow, Subst),
}

impl GroupoidModel {
    pub fn pair(chart: Chart) -> GroupoidModel {
        GroupoidModel {
            chart,
            kind: ModelKind::Pair,
        }
    }

    /// Checks `φ ∘ φ⁻¹ = φ⁻¹ ∘ φ = id` and a nonvanishing Jacobian.
    pub fn discrete_action(chart: Chart, generators: Vec<Generator>) -> Result<GroupoidModel> {
        let n = chart.dim();
        let names = chart.names().to_vec();
        let x = vars_of(&names);
        for (k, g) in generators.iter().enumerate() {
            if g.map.len() != n || g.inverse.len() != n {
                return Err(Error::DimensionMismatch(format!("generator {} needs {n} components", k + 1)));
            }
            for e in g.map.iter().chain(&g.inverse) {
                uses_only(e, &names)?;
            }
            let there = apply_all(&g.map, &subst_of(&names, &g.inverse))?;
            let back = apply_all(&g.inverse, &subst_of(&names, &g.map))?;
            if !same(&there, &x) || !same(&back, &x) {
                return Err(Error::DegenerateModel(format!("generator {} and its inverse do not compose to the identity", k + 1)));
            }
            if det(&jacobian(&g.map, &names)).is_zero() {
                return Err(Error::DegenerateModel(format!("generator {} has vanishing Jacobian", k + 1)));
            }
        }
        Ok(GroupoidModel {
            chart,
            kind: ModelKind::DiscreteAction { generators },
        })
    }

    /// Checks `a(0, x) = x` and `a(mul(u, u'), x) = a(u, a(u', x))`.
    pub fn lie_action(chart: Chart, group: LieGroup, action: Vec<RatExpr>) -> Result<GroupoidModel> {
        let names = chart.names().to_vec();
        if let Some(c) = group.coords.iter().find(|c| chart.contains(c)) {
            return Err(Error::InvalidChart(format!("group coordinate `{c}` clashes with a chart coordinate")));
        }
        if action.len() != names.len() {
            return Err(Error::DimensionMismatch(format!("action needs {} components", names.len())));
        }
        let allowed: Vec<String> = group.coords.iter().chain(&names).cloned().collect();
        for e in &action {
            uses_only(e, &allowed)?;
        }
        let model = GroupoidModel {
            chart,
            kind: ModelKind::LieAction { group, action },
        };
        let ModelKind::LieAction { group, .. } = &model.kind else { unreachable!() };
        let x = vars_of(&names);
        let zero = vec![RatExpr::zero(); group.dim()];
        if !same(&model.act(&zero, &x)?, &x) {
            return Err(degenerate("the identity does not act trivially"));
        }
        let u = vars_of(&group.coords);
        let u1 = vars_of(&primed(&group.coords, 1));
        let lhs = model.act(&group.compose(&u, &u1)?, &x)?;
        let rhs = model.act(&u, &model.act(&u1, &x)?)?;
        if !same(&lhs, &rhs) {
            return Err(degenerate("the action is not compatible with multiplication"));
        }
        Ok(model)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::Pair => "pair",
            ModelKind::DiscreteAction { .. } => "discrete-action",
            ModelKind::LieAction { .. } => "lie-action",
        }
    }

    pub fn generators(&self) -> &[Generator] {
        match &self.kind {
            ModelKind::DiscreteAction { generators } => generators,
            _ => &[],
        }
    }

    pub fn group(&self) -> Option<&LieGroup> {
        match &self.kind {
            ModelKind::LieAction { group, .. } => Some(group),
            _ => None,
        }
    }

    /// `a(u, p)` for a Lie action.
    pub fn act(&self, u: &[RatExpr], p: &[RatExpr]) -> Result<Vec<RatExpr>> {
        let ModelKind::LieAction { group, action } = &self.kind else {
            return Err(Error::DimensionMismatch("not a Lie-action model".into()));
        };
        let mut map = subst_of(&group.coords, u);
        map.extend(subst_of(self.chart.names(), p));
        apply_all(action, &map)
    }

    fn letter_map(&self, l: Letter) -> Result<&[RatExpr]> {
        let g = self
            .generators()
            .get(l.generator)
            .ok_or_else(|| Error::DimensionMismatch(format!("no generator {}", l.generator + 1)))?;
        Ok(if l.inverse { &g.inverse } else { &g.map })
    }

    /// `φ_l(p)`.
    pub fn apply_letter(&self, l: Letter, p: &[RatExpr]) -> Result<Vec<RatExpr>> {
        apply_all(self.letter_map(l)?, &subst_of(self.chart.names(), p))
    }

    /// `φ_w(p)`.
    pub fn apply_word(&self, word: &[Letter], p: &[RatExpr]) -> Result<Vec<RatExpr>> {
        let mut y = p.to_vec();
        for &l in word.iter().rev() {
            y = self.apply_letter(l, &y)?;
        }
        Ok(y)
    }

    /// The fiber coordinates of the arrow chart (target copy for the pair
    /// groupoid, group coordinates for a Lie action, none for a discrete
    /// action); the base coordinates are the chart itself.
    pub fn fiber_vars(&self) -> Vec<String> {
        match &self.kind {
            ModelKind::Pair => self.chart.primed(1),
            ModelKind::DiscreteAction { .. } => Vec::new(),
            ModelKind::LieAction { group, .. } => group.coords.clone(),
        }
    }

    pub fn arrow_vars(&self) -> Vec<String> {
        let mut v = self.fiber_vars();
        v.extend(self.chart.names().iter().cloned());
        v
    }

    fn check_arrow(&self, arrow: &Arrow) -> Result<()> {
        match (&self.kind, arrow) {
            (ModelKind::DiscreteAction { .. }, Arrow::Word(w)) => {
                for &l in w {
                    self.letter_map(l)?;
                }
                Ok(())
            }
            (ModelKind::DiscreteAction { .. }, Arrow::Generic) => {
                Err(Error::DimensionMismatch("arrows of a discrete action are labelled by words".into()))
            }
            (_, Arrow::Generic) => Ok(()),
            (_, Arrow::Word(_)) => Err(Error::DimensionMismatch("words only label arrows of discrete actions".into())),
        }
    }

    pub fn source(&self, arrow: &Arrow) -> Result<Vec<RatExpr>> {
        self.check_arrow(arrow)?;
        Ok(vars_of(self.chart.names()))
    }

    pub fn target(&self, arrow: &Arrow) -> Result<Vec<RatExpr>> {
        self.check_arrow(arrow)?;
        let x = vars_of(self.chart.names());
        match (&self.kind, arrow) {
            (ModelKind::Pair, _) => Ok(vars_of(&self.chart.primed(1))),
            (ModelKind::LieAction { group, .. }, _) => self.act(&vars_of(&group.coords), &x),
            (ModelKind::DiscreteAction { .. }, Arrow::Word(w)) => self.apply_word(w, &x),
            _ => unreachable!("checked above"),
        }
    }

    /// The arrow family of unit arrows together with the substitution that
    /// specializes it to units.
    pub fn unit(&self) -> (Arrow, Subst) {
        match &self.kind {
            ModelKind::Pair => (Arrow::Generic, subst_of(&self.chart.primed(1), &vars_of(self.chart.names()))),
            ModelKind::LieAction { group, .. } => (
                Arrow::Generic,
                group.coords.iter().map(|c| (c.clone(), RatExpr::zero())).collect(),
            ),
            ModelKind::DiscreteAction { .. } => (Arrow::Word(Vec::new()), Vec::new()),
        }
    }

    /// Every single letter, the default test words for a discrete action.
    pub fn letters(&self) -> Vec<Vec<Letter>> {
        (0..self.generators().len())
            .flat_map(|k| [vec![Letter::gen(k)], vec![Letter::inv(k)]])
            .collect()
    }

    /// Composable pairs in symbolic form. For a discrete action every
    /// ordered pair of the given words (all single letters if empty).
    pub fn composable_pairs(&self, words: &[Vec<Letter>]) -> Result<Vec<ComposablePair>> {
        let x = self.chart.names().to_vec();
        match &self.kind {
            ModelKind::Pair => {
                let x1 = primed(&x, 1);
                let x2 = primed(&x, 2);
                let mut g = subst_of(&x1, &vars_of(&x2));
                g.extend(subst_of(&x, &vars_of(&x1)));
                Ok(vec![ComposablePair {
                    g: (Arrow::Generic, g),
                    h: (Arrow::Generic, Vec::new()),
                    gh: (Arrow::Generic, subst_of(&x1, &vars_of(&x2))),
                }])
            }
            ModelKind::LieAction { group, .. } => {
                let u = vars_of(&group.coords);
                let u1 = vars_of(&primed(&group.coords, 1));
                let moved = self.act(&u1, &vars_of(&x))?;
                Ok(vec![ComposablePair {
                    g: (Arrow::Generic, subst_of(&x, &moved)),
                    h: (Arrow::Generic, subst_of(&group.coords, &u1)),
                    gh: (Arrow::Generic, subst_of(&group.coords, &group.compose(&u, &u1)?)),
                }])
            }
            ModelKind::DiscreteAction { .. } => {
                let words = if words.is_empty() { self.letters() } else { words.to_vec() };
                let mut out = Vec::new();
                for a in &words {
                    for b in &words {
                        let moved = self.apply_word(b, &vars_of(&x))?;
                        out.push(ComposablePair {
                            g: (Arrow::Word(a.clone()), subst_of(&x, &moved)),
                            h: (Arrow::Word(b.clone()), Vec::new()),
                            gh: (Arrow::Word(a.iter().chain(b).copied().collect()), Vec::new()),
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    /// The determinant `J̃` of the map
    /// `Λ^top(A_{t})⊗Λ^top(T_{s}M) → Λ^top(A_{s})⊗Λ^top(T_{t}M)` induced by
    /// the inversion, in the right-translated frame of `A` and coordinate
    /// frames of `TM`, normalized so that unit arrows give `1`.
    pub fn transverse_jacobian(&self, arrow: &Arrow) -> Result<RatExpr> {
        let m = self.fiber_vars().len();
        let n = self.chart.dim();
        let zero = vec![vec![RatExpr::zero(); n]; m];
        self.transverse_jacobian_with_lifts(arrow, &zero, &zero)
    }

    /// [`GroupoidModel::transverse_jacobian`] computed with arbitrary lifts
    /// of the coordinate frame of `TM` along `ds` at `g` and `g⁻¹`
    /// (`m × n` matrices of fiber components).
    pub fn transverse_jacobian_with_lifts(
        &self,
        arrow: &Arrow,
        lift_g: &[Vec<RatExpr>],
        lift_inv: &[Vec<RatExpr>],
    ) -> Result<RatExpr> {
        self.check_arrow(arrow)?;
        let x = self.chart.names().to_vec();
        let n = x.len();
        let fiber = self.fiber_vars();
        let m = fiber.len();
        if lift_g.len() != m || lift_inv.len() != m || lift_g.iter().chain(lift_inv).any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("lifts must be {m}×{n}")));
        }
        let identity = |k: usize| -> Vec<Vec<RatExpr>> {
            (0..k)
                .map(|i| (0..k).map(|j| if i == j { RatExpr::one() } else { RatExpr::zero() }).collect())
                .collect()
        };
        let (iota, r_g, r_inv) = match (&self.kind, arrow) {
            (ModelKind::Pair, _) => {
                let mut iota = vars_of(&x);
                iota.extend(vars_of(&fiber));
                (iota, identity(n), identity(n))
            }
            (ModelKind::LieAction { group, .. }, _) => {
                let u = vars_of(&group.coords);
                let v = group.invert(&u)?;
                let mut iota = v.clone();
                iota.extend(self.act(&u, &vars_of(&x))?);
                let r = group.right_frame();
                let r_inv = r
                    .iter()
                    .map(|row| apply_all(row, &subst_of(&group.coords, &v)))
                    .collect::<Result<Vec<_>>>()?;
                (iota, r, r_inv)
            }
            (ModelKind::DiscreteAction { .. }, Arrow::Word(w)) => (self.apply_word(w, &vars_of(&x))?, Vec::new(), Vec::new()),
            _ => unreachable!("checked above"),
        };
        let block = |r: &[Vec<RatExpr>], lift: &[Vec<RatExpr>]| -> Vec<Vec<RatExpr>> {
            let mut out = Vec::with_capacity(m + n);
            for i in 0..m {
                out.push(r[i].iter().chain(&lift[i]).cloned().collect());
            }
            for i in 0..n {
                out.push((0..m + n).map(|j| if j == m + i { RatExpr::one() } else { RatExpr::zero() }).collect());
            }
            out
        };
        let coords = self.arrow_vars();
        let d_iota = jacobian(&iota, &coords);
        let num = det(&matmul(&d_iota, &block(&r_g, lift_g)));
        let den = det(&block(&r_inv, lift_inv));
        let j = num.try_div(&den).map_err(|_| degenerate("right-translated frame degenerates"))?;
        if j.is_zero() {
            return Err(degenerate("transverse Jacobian vanishes identically"));
        }
        Ok(if m % 2 == 1 { -j } else { j })
    }

    /// `J̃` is one on units and multiplicative on composable pairs.
    pub fn check_jacobian_law(&self, words: &[Vec<Letter>]) -> Result<bool> {
        let (unit, at_unit) = self.unit();
        if !self.transverse_jacobian(&unit)?.substitute(&at_unit)?.is_one() {
            return Ok(false);
        }
        for p in self.composable_pairs(words)? {
            let jg = self.transverse_jacobian(&p.g.0)?.substitute(&p.g.1)?;
            let jh = self.transverse_jacobian(&p.h.0)?.substitute(&p.h.1)?;
            let jgh = self.transverse_jacobian(&p.gh.0)?.substitute(&p.gh.1)?;
            if jgh != &jg * &jh {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<GroupoidModel> {
        let chart = Chart::new(spec.chart.iter().cloned())?;
        let names = chart.names().to_vec();
        let parse_list = |items: &[String], vars: &[String], what: &str| -> Result<Vec<RatExpr>> {
            items
                .iter()
                .map(|s| RatExpr::parse(s, vars))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Schema(format!("{what}: {e}")))
        };
        match spec.kind {
            ModelTag::Pair => Ok(GroupoidModel::pair(chart)),
            ModelTag::DiscreteAction => {
                let mut gens = Vec::new();
                for (k, g) in spec.generators.iter().enumerate() {
                    gens.push(Generator::new(
                        parse_list(&g.map, &names, &format!("generator {} map", k + 1))?,
                        parse_list(&g.inverse, &names, &format!("generator {} inverse", k + 1))?,
                    ));
                }
                GroupoidModel::discrete_action(chart, gens)
            }
            ModelTag::LieAction => {
                let g = spec
                    .group
                    .as_ref()
                    .ok_or_else(|| Error::Schema("a lie-action model needs a \"group\"".into()))?;
                let both: Vec<String> = g.coords.iter().cloned().chain(primed(&g.coords, 1)).collect();
                let mul = parse_list(&g.mul, &both, "group mul")?;
                let inv = parse_list(&g.inv, &g.coords, "group inv")?;
                let group = LieGroup::new(g.coords.clone(), mul, inv)?;
                let allowed: Vec<String> = g.coords.iter().chain(&names).cloned().collect();
                let action = parse_list(&spec.action, &allowed, "action")?;
                GroupoidModel::lie_action(chart, group, action)
            }
        }
    }

    pub fn to_spec(&self) -> ModelSpec {
        let strings = |v: &[RatExpr]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let mut spec = ModelSpec {
            kind: ModelTag::Pair,
            chart: self.chart.names().to_vec(),
            generators: Vec::new(),
            group: None,
            action: Vec::new(),
        };
        match &self.kind {
            ModelKind::Pair => {}
            ModelKind::DiscreteAction { generators } => {
                spec.kind = ModelTag::DiscreteAction;
                spec.generators = generators
                    .iter()
                    .map(|g| GeneratorSpec {
                        map: strings(&g.map),
                        inverse: strings(&g.inverse),
                    })
                    .collect();
            }
            ModelKind::LieAction { group, action } => {
                spec.kind = ModelTag::LieAction;
                spec.group = Some(GroupSpec {
                    coords: group.coords.clone(),
                    mul: strings(&group.mul),
                    inv: strings(&group.inv),
                });
                spec.action = strings(action);
            }
        }
        spec
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    Pair,
    DiscreteAction,
    LieAction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub map: Vec<String>,
    pub inverse: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub coords: Vec<String>,
    pub mul: Vec<String>,
    pub inv: Vec<String>,
}

/// JSON form of a model. `mul` is written in the group coordinates and
/// their `'`-suffixed copies (second argument).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelTag,
    pub chart: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub action: Vec<String>,
}

/// The `χ`-twisted transverse line with its canonical trivialization. For
/// discrete actions an extra nonvanishing factor per generator may be
/// multiplied in.
#[derive(Clone, Debug, PartialEq)]
pub struct GpdLineRep {
    model: GroupoidModel,
    chi: Character,
    twists: Vec<RatExpr>,
}

impl GpdLineRep {
    pub fn model(&self) -> &GroupoidModel {
        &self.model
    }

    pub fn chi(&self) -> Character {
        self.chi
    }

    pub fn twists(&self) -> &[RatExpr] {
        &self.twists
    }

    /// A discrete-action representation whose generator `k` acts by
    /// `χ(J̃)·twists[k]`.
    pub fn with_twists(model: &GroupoidModel, chi: Character, twists: Vec<RatExpr>) -> Result<GpdLineRep> {
        if !matches!(model.kind, ModelKind::DiscreteAction { .. }) {
            return Err(Error::DimensionMismatch("generator twists need a discrete action".into()));
        }
        if twists.len() != model.generators().len() {
            return Err(Error::DimensionMismatch(format!("need {} twists", model.generators().len())));
        }
        for t in &twists {
            uses_only(t, model.chart.names())?;
            if t.is_zero() {
                return Err(Error::ZeroSection);
            }
        }
        Ok(GpdLineRep {
            model: model.clone(),
            chi,
            twists,
        })
    }

    fn twist_on_word(&self, word: &[Letter]) -> Result<RatExpr> {
        if self.twists.is_empty() {
            return Ok(RatExpr::one());
        }
        let names = self.model.chart.names();
        let mut y = vars_of(names);
        let mut acc = RatExpr::one();
        for &l in word.iter().rev() {
            let t = &self.twists[l.generator];
            let factor = if l.inverse {
                let back = self.model.apply_letter(l, &y)?;
                t.substitute(&subst_of(names, &back))?.recip()?
            } else {
                t.substitute(&subst_of(names, &y))?
            };
            acc = &acc * &factor;
            y = self.model.apply_letter(l, &y)?;
        }
        Ok(acc)
    }

    /// The scalar by which an arrow maps the trivializing section at its
    /// source to a multiple of the one at its target.
    pub fn action_scalar(&self, arrow: &Arrow) -> Result<FormalScalar> {
        let base = self.chi.apply(&self.model.transverse_jacobian(arrow)?)?;
        match arrow {
            Arrow::Word(w) if !self.twists.is_empty() => Ok(base.mul(&FormalScalar::from_ratexpr(&self.twist_on_word(w)?)?)),
            _ => Ok(base),
        }
    }

    pub fn tensor(&self, other: &GpdLineRep) -> Result<GpdLineRep> {
        if self.model != other.model {
            return Err(Error::BaseMismatch);
        }
        let twists = match (self.twists.is_empty(), other.twists.is_empty()) {
            (true, _) => other.twists.clone(),
            (_, true) => self.twists.clone(),
            _ => self.twists.iter().zip(&other.twists).map(|(a, b)| a * b).collect(),
        };
        Ok(GpdLineRep {
            model: self.model.clone(),
            chi: self.chi * other.chi,
            twists,
        })
    }
}

/// The action of a model on its `χ`-twisted transverse line.
pub fn canonical_groupoid_rep(model: &GroupoidModel, chi: Character) -> Result<GpdLineRep> {
    let (unit, at_unit) = model.unit();
    if !model.transverse_jacobian(&unit)?.substitute(&at_unit)?.is_one() {
        return Err(degenerate("transverse Jacobian is not one on units"));
    }
    Ok(GpdLineRep {
        model: model.clone(),
        chi,
        twists: Vec::new(),
    })
}

/// `c̃_σ`, defined by `g·σ(s(g)) = c̃_σ(g)·σ(t(g))` for the section
/// `σ = sigma · (canonical section)`. The sign part leaves out `sigma`,
/// whose positivity is the caller's claim.
#[derive(Clone, Debug, PartialEq)]
pub struct MultCocycle {
    rep: GpdLineRep,
    sigma: RatExpr,
}

pub fn tilde_cocycle(rep: &GpdLineRep, sigma: &RatExpr) -> Result<MultCocycle> {
    if sigma.is_zero() {
        return Err(Error::ZeroSection);
    }
    uses_only(sigma, rep.model.chart.names())?;
    Ok(MultCocycle {
        rep: rep.clone(),
        sigma: sigma.clone(),
    })
}

impl MultCocycle {
    pub fn rep(&self) -> &GpdLineRep {
        &self.rep
    }

    pub fn model(&self) -> &GroupoidModel {
        &self.rep.model
    }

    pub fn sigma(&self) -> &RatExpr {
        &self.sigma
    }

    pub fn value(&self, arrow: &Arrow) -> Result<FormalScalar> {
        let model = &self.rep.model;
        let mut v = self.rep.action_scalar(arrow)?;
        if self.sigma.as_constant().is_none() {
            let at_target = self.sigma.substitute(&subst_of(model.chart.names(), &model.target(arrow)?))?;
            v.abs_part = &(&v.abs_part + &LogSum::ln_abs(Rational::from_integer(1.into()), self.sigma.clone())?)
                - &LogSum::ln_abs(Rational::from_integer(1.into()), at_target)?;
        }
        Ok(v)
    }

    /// The sign of `c̃` on an arrow family, the `ℤ₂` part of the cocycle.
    pub fn sign_part(&self, arrow: &Arrow) -> Result<RatExpr> {
        Ok(self.value(arrow)?.sign_part)
    }

    pub fn is_unital(&self) -> Result<Decision> {
        let (unit, at_unit) = self.model().unit();
        Ok(self.value(&unit)?.substitute(&at_unit)?.is_one())
    }

    /// `c̃(gh) = c̃(g)·c̃(h)` on the composable pairs of the model.
    pub fn check_composition(&self, words: &[Vec<Letter>]) -> Result<Decision> {
        let mut out = Vec::new();
        for p in self.model().composable_pairs(words)? {
            let g = self.value(&p.g.0)?.substitute(&p.g.1)?;
            let h = self.value(&p.h.0)?.substitute(&p.h.1)?;
            let gh = self.value(&p.gh.0)?.substitute(&p.gh.1)?;
            out.push(gh.compare(&g.mul(&h)));
        }
        Ok(combine(out))
    }

    /// The generic arrow, or each generator letter for a discrete action.
    pub fn generating_arrows(&self) -> Vec<Arrow> {
        generating_arrows(self.model())
    }
}

fn generating_arrows(model: &GroupoidModel) -> Vec<Arrow> {
    match model.kind {
        ModelKind::DiscreteAction { .. } => (0..model.generators().len()).map(|k| Arrow::Word(vec![Letter::gen(k)])).collect(),
        _ => vec![Arrow::Generic],
    }
}

/// A real-valued groupoid 1-cocycle with values in formal logarithmic sums:
/// one value on the generic arrow, or one per generator of a discrete
/// action (extended to words by the cocycle law).
#[derive(Clone, Debug, PartialEq)]
pub struct AddCocycle {
    model: GroupoidModel,
    values: Vec<LogSum>,
}

impl AddCocycle {
    /// `values` has one entry for pair and Lie-action models and one per
    /// generator for discrete actions.
    pub fn new(model: &GroupoidModel, values: Vec<LogSum>) -> Result<AddCocycle> {
        let expected = generating_arrows(model).len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!("need {expected} cocycle values")));
        }
        let allowed = model.arrow_vars();
        for v in &values {
            for t in v.rational.iter().chain(v.logs.iter().map(|t| &t.arg)) {
                uses_only(t, &allowed)?;
            }
        }
        Ok(AddCocycle {
            model: model.clone(),
            values,
        })
    }

    pub fn zero(model: &GroupoidModel) -> AddCocycle {
        AddCocycle {
            values: vec![LogSum::zero(); generating_arrows(model).len()],
            model: model.clone(),
        }
    }

    /// The standard coboundary `δf = f∘t − f∘s`.
    pub fn coboundary(model: &GroupoidModel, f: &LogSum) -> Result<AddCocycle> {
        let names = model.chart.names();
        let values = generating_arrows(model)
            .iter()
            .map(|a| Ok(&f.substitute(&subst_of(names, &model.target(a)?))? - f))
            .collect::<Result<Vec<_>>>()?;
        AddCocycle::new(model, values)
    }

    pub fn model(&self) -> &GroupoidModel {
        &self.model
    }

    pub fn values(&self) -> &[LogSum] {
        &self.values
    }

    pub fn value(&self, arrow: &Arrow) -> Result<LogSum> {
        self.model.check_arrow(arrow)?;
        let Arrow::Word(word) = arrow else {
            return Ok(self.values[0].clone());
        };
        let names = self.model.chart.names();
        let mut y = vars_of(names);
        let mut acc = LogSum::zero();
        for &l in word.iter().rev() {
            let v = &self.values[l.generator];
            let term = if l.inverse {
                let back = self.model.apply_letter(l, &y)?;
                -v.substitute(&subst_of(names, &back))?
            } else {
                v.substitute(&subst_of(names, &y))?
            };
            acc = &acc + &term;
            y = self.model.apply_letter(l, &y)?;
        }
        Ok(acc)
    }

    fn zip_with(&self, other: &AddCocycle, f: impl Fn(&LogSum, &LogSum) -> LogSum) -> Result<AddCocycle> {
        if self.model != other.model {
            return Err(Error::BaseMismatch);
        }
        Ok(AddCocycle {
            model: self.model.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &AddCocycle) -> Result<AddCocycle> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &AddCocycle) -> Result<AddCocycle> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> AddCocycle {
        AddCocycle {
            model: self.model.clone(),
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> Decision {
        combine(self.values.iter().map(LogSum::zero_test))
    }

    pub fn compare(&self, other: &AddCocycle) -> Result<Decision> {
        Ok(self.sub(other)?.is_zero())
    }

    pub fn is_unital(&self) -> Result<Decision> {
        let (unit, at_unit) = self.model.unit();
        Ok(self.value(&unit)?.substitute(&at_unit)?.zero_test())
    }

    /// `c(gh) = c(g) + c(h)` on the composable pairs of the model.
    pub fn check_composition(&self, words: &[Vec<Letter>]) -> Result<Decision> {
        let mut out = Vec::new();
        for p in self.model.composable_pairs(words)? {
            let g = self.value(&p.g.0)?.substitute(&p.g.1)?;
            let h = self.value(&p.h.0)?.substitute(&p.h.1)?;
            let gh = self.value(&p.gh.0)?.substitute(&p.gh.1)?;
            out.push(gh.compare(&(&g + &h)));
        }
        Ok(combine(out))
    }
}

impl fmt::Display for AddCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `c_σ = −ln|c̃_σ|`.
pub fn additive_part(c: &MultCocycle) -> Result<AddCocycle> {
    let values = c
        .generating_arrows()
        .iter()
        .map(|a| Ok(-c.value(a)?.abs_part))
        .collect::<Result<Vec<_>>>()?;
    AddCocycle::new(c.model(), values)
}

/// Sign of `c̃_σ` on each generating arrow family.
pub fn sign_part(c: &MultCocycle) -> Result<Vec<RatExpr>> {
    c.generating_arrows().iter().map(|a| c.sign_part(a)).collect()
}

/// Certificate check `c(g) = f(s(g)) − f(t(g))`.
pub fn is_groupoid_coboundary(c: &AddCocycle, f: &LogSum) -> Result<Decision> {
    let delta = AddCocycle::coboundary(&c.model, f)?;
    Ok(c.add(&delta)?.is_zero())
}

/// An arrow `x → x` given concretely.
#[derive(Clone, Debug, PartialEq)]
pub enum IsotropyArrow {
    Word(Vec<Letter>),
    Group(Vec<Rational>),
}

impl fmt::Display for IsotropyArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsotropyArrow::Word(w) if w.is_empty() => write!(f, "unit"),
            IsotropyArrow::Word(w) => {
                let parts: Vec<String> = w.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join("·"))
            }
            IsotropyArrow::Group(u) => {
                let parts: Vec<String> = u.iter().map(ToString::to_string).collect();
                write!(f, "u = ({})", parts.join(", "))
            }
        }
    }
}

/// A nonzero cocycle value on an isotropy arrow. Coboundaries vanish on
/// isotropy, so this certifies that the class is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointCertificate {
    pub arrow: IsotropyArrow,
    pub point: Vec<Rational>,
    pub value: LogSum,
}

fn point_map(names: &[String], p: &[Rational]) -> Vec<(String, Rational)> {
    names.iter().cloned().zip(p.iter().cloned()).collect()
}

/// Target of a concrete arrow at a point and the cocycle value there.
fn evaluate_isotropy(c: &AddCocycle, arrow: &IsotropyArrow, p: &[Rational]) -> Result<(Vec<Rational>, LogSum)> {
    let model = &c.model;
    let names = model.chart.names();
    if p.len() != names.len() {
        return Err(Error::DimensionMismatch(format!("point needs {} coordinates", names.len())));
    }
    let at = point_map(names, p);
    match (arrow, &model.kind) {
        (IsotropyArrow::Word(w), ModelKind::DiscreteAction { .. }) => {
            let target = model
                .apply_word(w, &vars_of(names))?
                .iter()
                .map(|e| e.eval_at(names, p))
                .collect::<Result<Vec<_>>>()?;
            Ok((target, c.value(&Arrow::Word(w.clone()))?.substitute_values(&at)?))
        }
        (IsotropyArrow::Group(u0), ModelKind::LieAction { group, .. }) => {
            if u0.len() != group.dim() {
                return Err(Error::DimensionMismatch(format!("group element needs {} coordinates", group.dim())));
            }
            let mut full = point_map(&group.coords, u0);
            full.extend(at);
            let target = model
                .target(&Arrow::Generic)?
                .iter()
                .map(|e| e.substitute_values(&full).and_then(|v| v.as_constant().ok_or_else(|| degenerate("action is not constant at a point"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((target, c.value(&Arrow::Generic)?.substitute_values(&full)?))
        }
        _ => Err(Error::DimensionMismatch(format!("{arrow} is not an arrow of a {} model", model.kind_name()))),
    }
}

impl FixedPointCertificate {
    /// Independent re-check: the arrow fixes the point (by direct
    /// evaluation of the structure maps), the stored value is the cocycle
    /// value there, and it is nonzero.
    pub fn verify(&self, c: &AddCocycle) -> bool {
        let model = &c.model;
        let names = model.chart.names();
        let fixed = match (&self.arrow, &model.kind) {
            (IsotropyArrow::Word(w), ModelKind::DiscreteAction { generators }) => {
                let mut y = self.point.clone();
                let mut ok = true;
                for &l in w.iter().rev() {
                    let Some(g) = generators.get(l.generator) else { return false };
                    let f = if l.inverse { &g.inverse } else { &g.map };
                    match f.iter().map(|e| e.eval_at(names, &y)).collect::<Result<Vec<_>>>() {
                        Ok(v) => y = v,
                        Err(_) => ok = false,
                    }
                }
                ok && y == self.point
            }
            (IsotropyArrow::Group(u0), ModelKind::LieAction { group, action }) => {
                let all: Vec<String> = group.coords.iter().chain(names).cloned().collect();
                let pt: Vec<Rational> = u0.iter().chain(&self.point).cloned().collect();
                action
                    .iter()
                    .map(|e| e.eval_at(&all, &pt))
                    .collect::<Result<Vec<_>>>()
                    .is_ok_and(|y| y == self.point)
            }
            _ => false,
        };
        if !fixed {
            return false;
        }
        let Ok((_, value)) = evaluate_isotropy(c, &self.arrow, &self.point) else {
            return false;
        };
        value.compare(&self.value) == Decision::Equal
            && self.value.zero_test() == Decision::NotEqual
            && self.value.to_f64().is_some_and(|v| v != 0.0)
    }
}

/// Search the supplied isotropy candidates for a nonzero cocycle value.
/// Errors if a candidate does not fix its point.
pub fn fixed_point_obstruction(
    c: &AddCocycle,
    candidates: &[(IsotropyArrow, Vec<Rational>)],
) -> Result<Option<FixedPointCertificate>> {
    for (arrow, p) in candidates {
        let (target, value) = evaluate_isotropy(c, arrow, p)?;
        if target != *p {
            let shown: Vec<String> = p.iter().map(ToString::to_string).collect();
            return Err(Error::NotFixed(format!("{arrow} does not fix ({})", shown.join(", "))));
        }
        if value.zero_test() == Decision::NotEqual {
            return Ok(Some(FixedPointCertificate {
                arrow: arrow.clone(),
                point: p.clone(),
                value,
            }));
        }
    }
    Ok(None)
}

/// Whether `σ = sigma · (canonical section)` is invariant: `c̃_σ ≡ 1`.
pub fn invariant_density_check(rep: &GpdLineRep, sigma: &RatExpr) -> Result<Decision> {
    let c = tilde_cocycle(rep, sigma)?;
    let values = c
        .generating_arrows()
        .iter()
        .map(|a| Ok(c.value(a)?.is_one()))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(values))
}

/// An invariant section of the transverse density bundle. With a positive
/// `sigma` (the caller's claim) it shows that the modular class vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityWitness {
    pub rep: GpdLineRep,
    pub sigma: RatExpr,
}

impl DensityWitness {
    /// Runs [`invariant_density_check`] on the transverse density line.
    pub fn find(model: &GroupoidModel, sigma: &RatExpr) -> Result<Option<DensityWitness>> {
        let rep = canonical_groupoid_rep(model, Character::DENSITY)?;
        Ok(match invariant_density_check(&rep, sigma)? {
            Decision::Equal => Some(DensityWitness {
                rep,
                sigma: sigma.clone(),
            }),
            _ => None,
        })
    }

    pub fn verify(&self) -> bool {
        self.rep.chi == Character::DENSITY
            && canonical_groupoid_rep(&self.rep.model, Character::DENSITY).is_ok_and(|r| r == self.rep)
            && invariant_density_check(&self.rep, &self.sigma).is_ok_and(Decision::is_equal)
    }
}
