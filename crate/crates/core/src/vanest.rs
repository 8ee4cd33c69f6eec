//! The degree-one Van Est map for Lie-action models: differentiate a
//! groupoid cocycle at the units along the group directions.

use crate::algebroid::{AlgCocycle1, LieAlgebroid};
use crate::error::{Error, Result};
use crate::groupoid::{AddCocycle, GroupoidModel, ModelKind};
use crate::symcore::RatExpr;

fn lie_parts(model: &GroupoidModel) -> Result<(&crate::groupoid::LieGroup, &[RatExpr])> {
    match model.kind() {
        ModelKind::LieAction { group, action } => Ok((group, action)),
        _ => Err(Error::DimensionMismatch(format!(
            "Van Est needs a lie-action model, got {}",
            model.kind_name()
        ))),
    }
}

/// The action algebroid `g ⋉ M` in the frame of coordinate directions at
/// the identity: `ρ^j_k = ∂a^j/∂u_k(0, x)` and
/// `C^c_{ab} = ∂²mul_c/∂u_b∂u'_a − ∂²mul_c/∂u_a∂u'_b` at `0`, the bracket of
/// right-invariant vector fields, for which the anchor is a morphism.
pub fn induced_algebroid(model: &GroupoidModel) -> Result<LieAlgebroid> {
    let (group, action) = lie_parts(model)?;
    let u = group.coords();
    let up: Vec<String> = u.iter().map(|c| format!("{c}'")).collect();
    let at_zero: Vec<(String, RatExpr)> = u.iter().chain(&up).map(|c| (c.clone(), RatExpr::zero())).collect();
    let r = group.dim();
    let anchor = action
        .iter()
        .map(|aj| u.iter().map(|k| aj.partial(k).substitute(&at_zero)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let second = |mc: &RatExpr, a: usize, b: usize| -> Result<RatExpr> { mc.partial(&u[a]).partial(&up[b]).substitute(&at_zero) };
    let mut brackets = vec![vec![vec![RatExpr::zero(); r]; r]; r];
    for a in 0..r {
        for b in 0..r {
            for (c, mc) in group.mul().iter().enumerate() {
                brackets[a][b][c] = &second(mc, b, a)? - &second(mc, a, b)?;
            }
        }
    }
    let alg = LieAlgebroid::new(model.chart().clone(), r, anchor, brackets)?;
    let report = alg.check();
    if let Some(f) = report.failures.first() {
        return Err(Error::DegenerateModel(format!("induced algebroid fails: {f}")));
    }
    Ok(alg)
}

/// `VE(c)(ξ_k) = ∂c/∂u_k` at `u = 0`.
pub fn van_est1(c: &AddCocycle) -> Result<AlgCocycle1> {
    let (group, _) = lie_parts(c.model())?;
    let value = &c.values()[0];
    let at_zero: Vec<(String, RatExpr)> = group.coords().iter().map(|k| (k.clone(), RatExpr::zero())).collect();
    let values = group
        .coords()
        .iter()
        .map(|k| {
            value
                .partial(k)
                .substitute(&at_zero)
                .map_err(|_| Error::Pole(format!("∂/∂{k} of the cocycle at the units")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgCocycle1::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::chars::Character;
    use crate::groupoid::{additive_part, canonical_groupoid_rep, tilde_cocycle};
    use crate::symcore::{LogSum, Rational};

    fn canonical(model: &GroupoidModel, chi: Character) -> AddCocycle {
        additive_part(&tilde_cocycle(&canonical_groupoid_rep(model, chi).unwrap(), &RatExpr::one()).unwrap()).unwrap()
    }

    #[test]
    fn induced_algebroid_examples() {
        let t = induced_algebroid(&catalog::translations()).unwrap();
        assert_eq!(t, catalog::tangent(1));
        let s = induced_algebroid(&catalog::scaling()).unwrap();
        assert_eq!(s.anchor(0, 0), &RatExpr::var("x"));
        assert!(s.structure(0, 0, 0).is_zero());
        let a = induced_algebroid(&catalog::affine()).unwrap();
        assert_eq!(a.anchor(0, 0), &RatExpr::var("x"));
        assert!(a.anchor(0, 1).is_one());
        assert_eq!(a.structure(1, 0, 1), &RatExpr::int(-1));
        assert!(a.structure(0, 0, 1).is_zero());
    }

    #[test]
    fn van_est_examples() {
        assert!(van_est1(&canonical(&catalog::translations(), Character::DENSITY)).unwrap().is_zero());
        let s = van_est1(&canonical(&catalog::scaling(), Character::DENSITY)).unwrap();
        assert_eq!(s.values, vec![RatExpr::one()]);
        let a = van_est1(&canonical(&catalog::affine(), Character::DENSITY)).unwrap();
        assert!(a.is_zero());
        let p = van_est1(&canonical(&catalog::affine_on_point(), Character::DENSITY)).unwrap();
        assert_eq!(p.values, vec![RatExpr::int(-1), RatExpr::zero()]);
    }

    #[test]
    fn van_est_matches_modular_cocycle() {
        for m in catalog::lie_action_models() {
            let alg = induced_algebroid(&m).unwrap();
            for chi in [Character::DENSITY, Character::LAMBDA_TOP_DUAL, Character::ORIENTATION, Character::new(2, 0)] {
                let ve = van_est1(&canonical(&m, chi)).unwrap();
                assert_eq!(ve, alg.canonical_rep(chi).unwrap().theta(), "{}", m.kind_name());
                assert!(alg.is_closed(&ve));
            }
        }
    }

    #[test]
    fn coboundaries_go_to_exact_forms() {
        let m = catalog::affine();
        let alg = induced_algebroid(&m).unwrap();
        let f = RatExpr::parse("x^3 - 2*x + 5", &["x"]).unwrap();
        let delta = AddCocycle::coboundary(&m, &LogSum::from_rational(f.clone())).unwrap();
        assert_eq!(van_est1(&delta).unwrap(), alg.d0(&f));
    }

    #[test]
    fn pole_at_units_is_reported() {
        let m = catalog::scaling();
        let bad = AddCocycle::new(&m, vec![LogSum::from_rational(RatExpr::parse("1/u", &["u"]).unwrap())]).unwrap();
        assert!(matches!(van_est1(&bad), Err(Error::Pole(_))));
        let half = Rational::new(1.into(), 2.into());
        let ok = canonical(&m, Character::DENSITY).scale(&half);
        assert_eq!(van_est1(&ok).unwrap().values, vec![RatExpr::ratio(1, 2)]);
    }

    #[test]
    fn non_lie_models_are_rejected() {
        assert!(induced_algebroid(&catalog::doubling()).is_err());
    }
}
