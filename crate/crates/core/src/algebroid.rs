//! Lie algebroids in a global frame over a box chart.
//!
//! An algebroid of rank `r` over a chart with coordinates `x_1..x_n` is given
//! by its anchor matrix `ρ^j_a` (the anchor of the frame section `e_a` is
//! `Σ_j ρ^j_a ∂_j`) and structure functions `C^c_{ab}` with
//! `[e_a, e_b] = Σ_c C^c_{ab} e_c`. Everything here is exact: identities are
//! decided by normal-form comparison of rational functions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chars::Character;
use crate::error::{Error, Result};
use crate::symcore::{Chart, RatExpr, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebroid {
    chart: Chart,
    rank: usize,
    /// `anchor[j][a] = ρ^j_a`.
    anchor: Vec<Vec<RatExpr>>,
    /// `brackets[a][b][c] = C^c_{ab}`.
    brackets: Vec<Vec<Vec<RatExpr>>>,
}

impl LieAlgebroid {
    /// Assemble an algebroid from raw data, checking shapes only. Use
    /// [`LieAlgebroid::check`] for the axioms.
    pub fn new(
        chart: Chart,
        rank: usize,
        anchor: Vec<Vec<RatExpr>>,
        brackets: Vec<Vec<Vec<RatExpr>>>,
    ) -> Result<LieAlgebroid> {
        let n = chart.dim();
        if anchor.len() != n || anchor.iter().any(|row| row.len() != rank) {
            return Err(Error::DimensionMismatch(format!("anchor must be {n}×{rank}")));
        }
        if brackets.len() != rank
            || brackets
                .iter()
                .any(|row| row.len() != rank || row.iter().any(|v| v.len() != rank))
        {
            return Err(Error::DimensionMismatch(format!(
                "structure functions must be {rank}×{rank}×{rank}"
            )));
        }
        Ok(LieAlgebroid {
            chart,
            rank,
            anchor,
            brackets,
        })
    }

    /// Build from the brackets `[e_a, e_b]` for `a < b` (0-based), filling
    /// in antisymmetry; missing pairs are zero.
    pub fn from_upper_brackets(
        chart: Chart,
        rank: usize,
        anchor: Vec<Vec<RatExpr>>,
        upper: &BTreeMap<(usize, usize), Vec<RatExpr>>,
    ) -> Result<LieAlgebroid> {
        let mut brackets = vec![vec![vec![RatExpr::zero(); rank]; rank]; rank];
        for (&(a, b), v) in upper {
            if a >= rank || b >= rank || v.len() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "bracket ({}, {}) does not fit rank {rank}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::InvalidAlgebroid(format!("bracket ({0}, {0}) must vanish", a + 1)));
            }
            brackets[a][b] = v.clone();
            brackets[b][a] = v.iter().map(|e| -e).collect();
        }
        LieAlgebroid::new(chart, rank, anchor, brackets)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `ρ^j_a`.
    pub fn anchor(&self, j: usize, a: usize) -> &RatExpr {
        &self.anchor[j][a]
    }

    pub fn anchor_matrix(&self) -> &[Vec<RatExpr>] {
        &self.anchor
    }

    /// `C^c_{ab}`.
    pub fn structure(&self, c: usize, a: usize, b: usize) -> &RatExpr {
        &self.brackets[a][b][c]
    }

    pub fn brackets(&self) -> &[Vec<Vec<RatExpr>>] {
        &self.brackets
    }

    /// Copy with `ρ^j_a` replaced.
    pub fn with_anchor_entry(&self, j: usize, a: usize, value: RatExpr) -> LieAlgebroid {
        let mut out = self.clone();
        out.anchor[j][a] = value;
        out
    }

    /// Copy with the single structure function `C^c_{ab}` replaced.
    pub fn with_structure_entry(&self, c: usize, a: usize, b: usize, value: RatExpr) -> LieAlgebroid {
        let mut out = self.clone();
        out.brackets[a][b][c] = value;
        out
    }

    /// The anchor is identically zero, so `d_A f = 0` for every function.
    pub fn has_zero_anchor(&self) -> bool {
        self.anchor.iter().flatten().all(RatExpr::is_zero)
    }

    /// `ρ(e_a)·f = Σ_k ρ^k_a ∂_k f`.
    pub fn anchor_apply(&self, a: usize, f: &RatExpr) -> RatExpr {
        self.chart
            .names()
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.anchor[*k][a].is_zero())
            .map(|(k, x)| &self.anchor[k][a] * &f.partial(x))
            .sum()
    }

    /// Divergence of the anchor vector field of `e_a` in the coordinate
    /// density: `Σ_j ∂_j ρ^j_a`.
    pub fn anchor_divergence(&self, a: usize) -> RatExpr {
        self.chart
            .names()
            .iter()
            .enumerate()
            .map(|(j, x)| self.anchor[j][a].partial(x))
            .sum()
    }

    /// `Σ_b C^b_{ab}`, the trace of `ad_{e_a}` in the frame.
    pub fn bracket_trace(&self, a: usize) -> RatExpr {
        (0..self.rank).map(|b| self.brackets[a][b][b].clone()).sum()
    }

    /// Check antisymmetry, the anchor morphism identity and Jacobi; every
    /// failure carries its indices (1-based) and nonzero residual.
    pub fn check(&self) -> AlgebroidReport {
        let mut failures = Vec::new();
        let r = self.rank;
        let names = self.chart.names();

        let entries = self
            .anchor
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().enumerate().map(move |(a, e)| (vec![j + 1, a + 1], e)))
            .chain(self.brackets.iter().enumerate().flat_map(|(a, row)| {
                row.iter().enumerate().flat_map(move |(b, v)| {
                    v.iter().enumerate().map(move |(c, e)| (vec![a + 1, b + 1, c + 1], e))
                })
            }));
        for (idx, e) in entries {
            if e.free_vars().iter().any(|v| !self.chart.contains(v)) {
                failures.push(Failure {
                    kind: FailureKind::ForeignVariable,
                    indices: idx,
                    residual: e.clone(),
                });
            }
        }

        for a in 0..r {
            for b in a..r {
                for c in 0..r {
                    let res = &self.brackets[a][b][c] + &self.brackets[b][a][c];
                    if !res.is_zero() {
                        failures.push(Failure {
                            kind: FailureKind::Antisymmetry,
                            indices: vec![a + 1, b + 1, c + 1],
                            residual: res,
                        });
                    }
                }
            }
        }

        for a in 0..r {
            for b in a + 1..r {
                for (j, _) in names.iter().enumerate() {
                    let lhs: RatExpr = (0..r)
                        .map(|c| &self.brackets[a][b][c] * &self.anchor[j][c])
                        .sum();
                    let rhs = &self.anchor_apply(a, &self.anchor[j][b]) - &self.anchor_apply(b, &self.anchor[j][a]);
                    let res = &lhs - &rhs;
                    if !res.is_zero() {
                        failures.push(Failure {
                            kind: FailureKind::AnchorMorphism,
                            indices: vec![a + 1, b + 1, j + 1],
                            residual: res,
                        });
                    }
                }
            }
        }

        for a in 0..r {
            for b in a + 1..r {
                for c in b + 1..r {
                    for e in 0..r {
                        let res: RatExpr = [(a, b, c), (b, c, a), (c, a, b)]
                            .iter()
                            .map(|&(p, q, s)| {
                                let quad: RatExpr = (0..r)
                                    .map(|d| &self.brackets[q][s][d] * &self.brackets[p][d][e])
                                    .sum();
                                &quad + &self.anchor_apply(p, &self.brackets[q][s][e])
                            })
                            .sum();
                        if !res.is_zero() {
                            failures.push(Failure {
                                kind: FailureKind::Jacobi,
                                indices: vec![a + 1, b + 1, c + 1, e + 1],
                                residual: res,
                            });
                        }
                    }
                }
            }
        }
        AlgebroidReport { failures }
    }

    fn require_valid(&self) -> Result<()> {
        let report = self.check();
        if report.passed() {
            Ok(())
        } else {
            Err(Error::InvalidAlgebroid(report.failures[0].to_string()))
        }
    }

    /// `d_A` on functions: `(d_A f)(e_a) = ρ(e_a)·f`.
    pub fn d0(&self, f: &RatExpr) -> AlgCocycle1 {
        AlgCocycle1 {
            values: (0..self.rank).map(|a| self.anchor_apply(a, f)).collect(),
        }
    }

    /// `d_A` on 1-forms, returned as the values on `(e_a, e_b)` for `a < b`.
    pub fn d1(&self, c: &AlgCocycle1) -> BTreeMap<(usize, usize), RatExpr> {
        let mut out = BTreeMap::new();
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                let bracket: RatExpr = (0..self.rank)
                    .map(|k| &self.brackets[a][b][k] * &c.values[k])
                    .sum();
                let v = &(&self.anchor_apply(a, &c.values[b]) - &self.anchor_apply(b, &c.values[a])) - &bracket;
                out.insert((a, b), v);
            }
        }
        out
    }

    pub fn is_closed(&self, c: &AlgCocycle1) -> bool {
        c.values.len() == self.rank && self.d1(c).values().all(RatExpr::is_zero)
    }

    /// Certificate check `c = d_A f`.
    pub fn is_coboundary(&self, c: &AlgCocycle1, f: &RatExpr) -> bool {
        c.values.len() == self.rank && self.d0(f).values.iter().zip(&c.values).all(|(a, b)| a == b)
    }

    /// The representation on the `χ`-twisted transverse line in the
    /// canonical trivializing section. Only `m` contributes: orientation
    /// twists carry the zero connection form in a global frame.
    pub fn canonical_rep(&self, chi: Character) -> Result<AlgLineRep> {
        self.require_valid()?;
        let m = Rational::from_integer((-chi.m).into());
        let omega = (0..self.rank)
            .map(|a| (&self.bracket_trace(a) + &self.anchor_divergence(a)).scale(&m))
            .collect();
        Ok(AlgLineRep {
            base: self.clone(),
            omega,
        })
    }

    /// `o_A` as a flat line with the zero connection form.
    pub fn orientation_rep(&self) -> Result<AlgLineRep> {
        self.require_valid()?;
        Ok(AlgLineRep {
            base: self.clone(),
            omega: vec![RatExpr::zero(); self.rank],
        })
    }

    /// Characteristic cocycle of the transverse density bundle.
    pub fn modular_cocycle(&self) -> Result<AlgCocycle1> {
        Ok(self.canonical_rep(Character::DENSITY)?.theta())
    }

    /// Characteristic cocycle of `Q_A = D_A^tr ⊗ o_A`.
    pub fn qa_cocycle(&self) -> Result<AlgCocycle1> {
        let rep = self.canonical_rep(Character::DENSITY)?.tensor(&self.orientation_rep()?)?;
        Ok(rep.theta())
    }

    /// Characteristic cocycle of the transverse volume bundle.
    pub fn vtr_cocycle(&self) -> Result<AlgCocycle1> {
        Ok(self.canonical_rep(Character::LAMBDA_TOP_DUAL)?.theta())
    }

    /// Triviality verdict for a class with representative `c`, using an
    /// optional coboundary candidate.
    pub fn class_verdict(&self, c: &AlgCocycle1, candidate: Option<&RatExpr>) -> ClassVerdict {
        if c.is_zero() {
            return ClassVerdict::Trivial { primitive: RatExpr::zero() };
        }
        if let Some(f) = candidate {
            if self.is_coboundary(c, f) {
                return ClassVerdict::Trivial { primitive: f.clone() };
            }
        }
        if self.has_zero_anchor() {
            return ClassVerdict::Nontrivial {
                reason: "anchor vanishes, so every coboundary is zero".into(),
            };
        }
        ClassVerdict::Unknown
    }

    pub fn from_spec(spec: &AlgebroidSpec) -> Result<LieAlgebroid> {
        let chart = Chart::new(spec.chart.iter().cloned())?;
        let names = chart.names().to_vec();
        let n = chart.dim();
        let r = spec.rank;
        if spec.anchor.len() != n {
            return Err(Error::Schema(format!("anchor needs {n} rows, got {}", spec.anchor.len())));
        }
        let mut anchor = Vec::with_capacity(n);
        for (j, row) in spec.anchor.iter().enumerate() {
            if row.len() != r {
                return Err(Error::Schema(format!("anchor row {} needs {r} entries", j + 1)));
            }
            anchor.push(
                row.iter()
                    .map(|s| RatExpr::parse(s, &names))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Schema(format!("anchor row {}: {e}", j + 1)))?,
            );
        }
        let mut upper = BTreeMap::new();
        for (key, vals) in &spec.brackets {
            let (a, b) = parse_pair(key)?;
            if vals.len() != r {
                return Err(Error::Schema(format!("bracket \"{key}\" needs {r} entries")));
            }
            let v = vals
                .iter()
                .map(|s| RatExpr::parse(s, &names))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Schema(format!("bracket \"{key}\": {e}")))?;
            if a < b {
                upper.insert((a, b), v);
            } else if a > b {
                upper.insert((b, a), v.iter().map(|e| -e).collect());
            } else {
                return Err(Error::Schema(format!("bracket \"{key}\" pairs a frame element with itself")));
            }
        }
        LieAlgebroid::from_upper_brackets(chart, r, anchor, &upper)
    }

    pub fn to_spec(&self) -> AlgebroidSpec {
        let mut brackets = BTreeMap::new();
        for a in 0..self.rank {
            for b in a + 1..self.rank {
                if self.brackets[a][b].iter().any(|e| !e.is_zero()) {
                    brackets.insert(
                        format!("{},{}", a + 1, b + 1),
                        self.brackets[a][b].iter().map(ToString::to_string).collect(),
                    );
                }
            }
        }
        AlgebroidSpec {
            chart: self.chart.names().to_vec(),
            rank: self.rank,
            anchor: self
                .anchor
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
            brackets,
        }
    }
}

fn parse_pair(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Schema(format!("bracket key \"{key}\" must look like \"a,b\" with 1-based indices"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a - 1, b - 1))
}

/// JSON form: `{"chart": [...], "rank": r, "anchor": [[...]], "brackets": {"a,b": [...]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebroidSpec {
    pub chart: Vec<String>,
    pub rank: usize,
    #[serde(default)]
    pub anchor: Vec<Vec<String>>,
    #[serde(default)]
    pub brackets: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    ForeignVariable,
    Antisymmetry,
    AnchorMorphism,
    Jacobi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub kind: FailureKind,
    /// 1-based: `(a,b,c)` for antisymmetry, `(a,b,j)` for the anchor
    /// identity, `(a,b,c,e)` for Jacobi, the entry position otherwise.
    pub indices: Vec<usize>,
    pub residual: RatExpr,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: &[&str] = match self.kind {
            FailureKind::Antisymmetry => &["a", "b", "c"],
            FailureKind::AnchorMorphism => &["a", "b", "j"],
            FailureKind::Jacobi => &["a", "b", "c", "e"],
            FailureKind::ForeignVariable => &[],
        };
        let idx: Vec<String> = self
            .indices
            .iter()
            .enumerate()
            .map(|(i, v)| match labels.get(i) {
                Some(l) => format!("{l}={v}"),
                None => v.to_string(),
            })
            .collect();
        let kind = match self.kind {
            FailureKind::ForeignVariable => "foreign variable",
            FailureKind::Antisymmetry => "antisymmetry",
            FailureKind::AnchorMorphism => "anchor morphism",
            FailureKind::Jacobi => "jacobi",
        };
        write!(f, "{kind}({}): residual {}", idx.join(","), self.residual)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct AlgebroidReport {
    pub failures: Vec<Failure>,
}

impl AlgebroidReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// An `A`-1-form given by its values on the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgCocycle1 {
    pub values: Vec<RatExpr>,
}

impl AlgCocycle1 {
    pub fn new(values: Vec<RatExpr>) -> AlgCocycle1 {
        AlgCocycle1 { values }
    }

    pub fn zero(rank: usize) -> AlgCocycle1 {
        AlgCocycle1 {
            values: vec![RatExpr::zero(); rank],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(RatExpr::is_zero)
    }

    pub fn add(&self, other: &AlgCocycle1) -> AlgCocycle1 {
        AlgCocycle1 {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> AlgCocycle1 {
        AlgCocycle1 {
            values: self.values.iter().map(|a| a.scale(s)).collect(),
        }
    }
}

impl fmt::Display for AlgCocycle1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A flat connection on a trivial line: `∇_{e_a} σ = ω_a σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgLineRep {
    base: LieAlgebroid,
    omega: Vec<RatExpr>,
}

impl AlgLineRep {
    /// Checks the flatness identity `d_A ω = 0`.
    pub fn new(base: LieAlgebroid, omega: Vec<RatExpr>) -> Result<AlgLineRep> {
        if omega.len() != base.rank() {
            return Err(Error::DimensionMismatch(format!(
                "connection form needs {} entries",
                base.rank()
            )));
        }
        let rep = AlgLineRep { base, omega };
        if !rep.is_flat() {
            return Err(Error::InvalidAlgebroid("connection is not flat".into()));
        }
        Ok(rep)
    }

    pub fn trivial(base: &LieAlgebroid) -> AlgLineRep {
        AlgLineRep {
            omega: vec![RatExpr::zero(); base.rank()],
            base: base.clone(),
        }
    }

    pub fn base(&self) -> &LieAlgebroid {
        &self.base
    }

    pub fn omega(&self) -> &[RatExpr] {
        &self.omega
    }

    pub fn is_flat(&self) -> bool {
        self.base.is_closed(&AlgCocycle1::new(self.omega.clone()))
    }

    /// The connection form as a closed 1-cocycle.
    pub fn theta(&self) -> AlgCocycle1 {
        AlgCocycle1::new(self.omega.clone())
    }

    pub fn tensor(&self, other: &AlgLineRep) -> Result<AlgLineRep> {
        if self.base != other.base {
            return Err(Error::BaseMismatch);
        }
        Ok(AlgLineRep {
            base: self.base.clone(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Characteristic cocycle of a flat line; errors if the connection is not flat.
pub fn theta_class_rep(rep: &AlgLineRep) -> Result<AlgCocycle1> {
    if !rep.is_flat() {
        return Err(Error::InvalidAlgebroid("connection is not flat".into()));
    }
    Ok(rep.theta())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassVerdict {
    Trivial { primitive: RatExpr },
    Nontrivial { reason: String },
    Unknown,
}

/// Algebroid constructors.
pub mod build {
    use super::*;

    /// `TM` with the coordinate frame: `ρ = Id`, `C = 0`.
    pub fn tangent(chart: &Chart) -> LieAlgebroid {
        let n = chart.dim();
        let anchor = (0..n)
            .map(|j| (0..n).map(|a| if j == a { RatExpr::one() } else { RatExpr::zero() }).collect())
            .collect();
        LieAlgebroid::new(chart.clone(), n, anchor, vec![vec![vec![RatExpr::zero(); n]; n]; n])
            .expect("shapes agree")
    }

    /// A Lie algebra as an algebroid over a point, from the brackets
    /// `[e_a, e_b] = Σ_c k_c e_c` for `a < b` (0-based).
    pub fn lie_algebra(dim: usize, constants: &[((usize, usize), Vec<Rational>)]) -> Result<LieAlgebroid> {
        let mut upper = BTreeMap::new();
        for ((a, b), v) in constants {
            if a >= b {
                return Err(Error::InvalidAlgebroid("list brackets with a < b".into()));
            }
            upper.insert((*a, *b), v.iter().cloned().map(RatExpr::constant).collect());
        }
        LieAlgebroid::from_upper_brackets(Chart::point(), dim, Vec::new(), &upper)
    }

    /// The cotangent algebroid of a Poisson bivector in the frame `dx_i`:
    /// `ρ^j_i = π^{ij}`, `C^k_{ij} = ∂π^{ij}/∂x_k`.
    pub fn poisson(chart: &Chart, pi: &[Vec<RatExpr>]) -> Result<LieAlgebroid> {
        let n = chart.dim();
        if pi.len() != n || pi.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("bivector must be {n}×{n}")));
        }
        for i in 0..n {
            for j in i..n {
                if !(&pi[i][j] + &pi[j][i]).is_zero() {
                    return Err(Error::InvalidBivector(format!(
                        "π^{{{}{}}} + π^{{{}{}}} ≠ 0",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let anchor = (0..n).map(|j| (0..n).map(|i| pi[i][j].clone()).collect()).collect();
        let names = chart.names();
        let brackets = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| names.iter().map(|x| pi[i][j].partial(x)).collect())
                    .collect()
            })
            .collect();
        LieAlgebroid::new(chart.clone(), n, anchor, brackets)
    }

    /// Poisson structure on the plane from the single function `π^{12}`.
    pub fn poisson_plane(chart: &Chart, pi12: RatExpr) -> Result<LieAlgebroid> {
        if chart.dim() != 2 {
            return Err(Error::DimensionMismatch("planar Poisson structure needs a 2-dimensional chart".into()));
        }
        let pi = vec![vec![RatExpr::zero(), pi12.clone()], vec![-pi12, RatExpr::zero()]];
        poisson(chart, &pi)
    }

    /// Action algebroid `g ⋉ M` of an infinitesimal action, from a Lie
    /// algebra and one vector field per generator (`fields[a][j]` is the
    /// `∂_j` component for `e_a`).
    pub fn action(g: &LieAlgebroid, chart: &Chart, fields: &[Vec<RatExpr>]) -> Result<LieAlgebroid> {
        if g.dim() != 0 {
            return Err(Error::InvalidAlgebroid("action needs a Lie algebra (an algebroid over a point)".into()));
        }
        let r = g.rank();
        let n = chart.dim();
        if fields.len() != r || fields.iter().any(|f| f.len() != n) {
            return Err(Error::DimensionMismatch(format!("need {r} vector fields with {n} components")));
        }
        let anchor = (0..n).map(|j| (0..r).map(|a| fields[a][j].clone()).collect()).collect();
        LieAlgebroid::new(chart.clone(), r, anchor, g.brackets().to_vec())
    }
}
