//! Fixed example algebroids and groupoid models.

use crate::algebroid::{build, LieAlgebroid};
use crate::groupoid::{Generator, GroupoidModel, LieGroup};
use crate::symcore::{Chart, RatExpr, Rational};
use crate::vanest::induced_algebroid;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn e(s: &str, vars: &[&str]) -> RatExpr {
    RatExpr::parse(s, vars).expect("catalog expression")
}

/// `x`, `x, y`, `x, y, z`, then `x1, …, xn`.
pub fn euclidean(n: usize) -> Chart {
    let names: Vec<String> = match n {
        0 => Vec::new(),
        1..=3 => ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect(),
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    };
    Chart::new(names).expect("valid names")
}

pub fn tangent(n: usize) -> LieAlgebroid {
    build::tangent(&euclidean(n))
}

/// `[e1, e2] = e2`.
pub fn aff1() -> LieAlgebroid {
    build::lie_algebra(2, &[((0, 1), vec![q(0), q(1)])]).expect("valid")
}

pub fn abelian(n: usize) -> LieAlgebroid {
    build::lie_algebra(n, &[]).expect("valid")
}

/// `[e1, e2] = e3`.
pub fn heisenberg() -> LieAlgebroid {
    build::lie_algebra(3, &[((0, 1), vec![q(0), q(0), q(1)])]).expect("valid")
}

/// `[e1, e2] = e3`, `[e2, e3] = e1`, `[e3, e1] = e1`: fails Jacobi.
pub fn broken_so3() -> LieAlgebroid {
    build::lie_algebra(
        3,
        &[
            ((0, 1), vec![q(0), q(0), q(1)]),
            ((1, 2), vec![q(1), q(0), q(0)]),
            ((0, 2), vec![q(-1), q(0), q(0)]),
        ],
    )
    .expect("shapes agree")
}

/// `so(3)`: `[e1, e2] = e3` and cyclic.
pub fn so3() -> LieAlgebroid {
    build::lie_algebra(
        3,
        &[
            ((0, 1), vec![q(0), q(0), q(1)]),
            ((1, 2), vec![q(1), q(0), q(0)]),
            ((0, 2), vec![q(0), q(-1), q(0)]),
        ],
    )
    .expect("valid")
}

/// Cotangent algebroid of `π = x ∂x ∧ ∂y` on the plane.
pub fn poisson_x() -> LieAlgebroid {
    build::poisson_plane(&euclidean(2), e("x", &["x", "y"])).expect("valid")
}

/// Cotangent algebroid of the linear Poisson structure on `so(3)*`.
pub fn poisson_so3_dual() -> LieAlgebroid {
    let v = ["x", "y", "z"];
    let z = RatExpr::zero();
    let pi = vec![
        vec![z.clone(), e("z", &v), e("-y", &v)],
        vec![e("-z", &v), z.clone(), e("x", &v)],
        vec![e("y", &v), e("-x", &v), z],
    ];
    build::poisson(&euclidean(3), &pi).expect("valid")
}

pub fn pair(n: usize) -> GroupoidModel {
    GroupoidModel::pair(euclidean(n))
}

fn line_map(map: &str, inverse: &str) -> GroupoidModel {
    let g = Generator::new(vec![e(map, &["x"])], vec![e(inverse, &["x"])]);
    GroupoidModel::discrete_action(euclidean(1), vec![g]).expect("valid generator")
}

/// `ℤ` acting on the line by `x ↦ 2x`.
pub fn doubling() -> GroupoidModel {
    line_map("2*x", "x/2")
}

/// `ℤ/2` acting on the line by `x ↦ -x`.
pub fn reflection() -> GroupoidModel {
    line_map("-x", "-x")
}

/// `ℤ` acting on the line by `x ↦ x + 1`.
pub fn shift() -> GroupoidModel {
    line_map("x + 1", "x - 1")
}

fn lie_group(coords: &[&str], mul: &[&str], inv: &[&str]) -> LieGroup {
    let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    let both: Vec<String> = names.iter().cloned().chain(names.iter().map(|c| format!("{c}'"))).collect();
    LieGroup::new(
        names.clone(),
        mul.iter().map(|s| RatExpr::parse(s, &both).expect("mul")).collect(),
        inv.iter().map(|s| RatExpr::parse(s, &names).expect("inv")).collect(),
    )
    .expect("valid group")
}

fn scaling_group() -> LieGroup {
    lie_group(&["u"], &["u + u' + u*u'"], &["-u/(1 + u)"])
}

fn affine_group() -> LieGroup {
    lie_group(
        &["u1", "u2"],
        &["u1 + u1' + u1*u1'", "u2 + u2' + u1*u2'"],
        &["-u1/(1 + u1)", "-u2/(1 + u1)"],
    )
}

/// `(ℝ, +)` acting on the line by translation.
pub fn translations() -> GroupoidModel {
    let g = lie_group(&["u"], &["u + u'"], &["-u"]);
    GroupoidModel::lie_action(euclidean(1), g, vec![e("x + u", &["u", "x"])]).expect("valid action")
}

/// The multiplicative group in the chart `1 + u`, acting by `x ↦ (1 + u)x`.
pub fn scaling() -> GroupoidModel {
    GroupoidModel::lie_action(euclidean(1), scaling_group(), vec![e("(1 + u)*x", &["u", "x"])]).expect("valid action")
}

/// The affine group `x ↦ (1 + u1)x + u2` acting on the line.
pub fn affine() -> GroupoidModel {
    GroupoidModel::lie_action(euclidean(1), affine_group(), vec![e("(1 + u1)*x + u2", &["u1", "u2", "x"])])
        .expect("valid action")
}

/// The affine group as a groupoid over a point.
pub fn affine_on_point() -> GroupoidModel {
    GroupoidModel::lie_action(Chart::point(), affine_group(), Vec::new()).expect("valid action")
}

/// Every catalog model.
pub fn models() -> Vec<GroupoidModel> {
    vec![
        pair(1),
        pair(2),
        pair(3),
        doubling(),
        reflection(),
        shift(),
        translations(),
        scaling(),
        affine(),
        affine_on_point(),
    ]
}

pub fn lie_action_models() -> Vec<GroupoidModel> {
    vec![translations(), scaling(), affine(), affine_on_point()]
}

/// Every valid catalog algebroid with a short name.
pub fn algebroids() -> Vec<(String, LieAlgebroid)> {
    let mut out: Vec<(String, LieAlgebroid)> = (0..=3).map(|n| (format!("tangent-{n}"), tangent(n))).collect();
    out.push(("aff1".into(), aff1()));
    out.push(("abelian-2".into(), abelian(2)));
    out.push(("abelian-3".into(), abelian(3)));
    out.push(("heisenberg".into(), heisenberg()));
    out.push(("so3".into(), so3()));
    out.push(("poisson-x".into(), poisson_x()));
    out.push(("poisson-so3-dual".into(), poisson_so3_dual()));
    for (name, m) in [
        ("translations", translations()),
        ("scaling", scaling()),
        ("affine", affine()),
        ("affine-on-point", affine_on_point()),
    ] {
        out.push((format!("{name}-algebroid"), induced_algebroid(&m).expect("valid action")));
    }
    out
}
