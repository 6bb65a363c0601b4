//! Lifting an isotropy-group element to the full bisections `U_γ = X × {γ}`.

use faer::Mat;
use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::cocycle::restrict_isotropy;
use crate::error::{Error, Result};
use crate::group::GroupElem;
use crate::groupoid::{Arrow, Groupoid};
use crate::linalg;
use crate::spectral::SELF_ADJOINT_TOL;

fn isotropy_terms(f_iso: &AlgebraElement, x: usize) -> Result<Vec<(GroupElem, Complex64)>> {
    let g = f_iso.groupoid();
    if !matches!(g, Groupoid::Action(_)) {
        return Err(Error::InvalidArgument("isotropy lifts need a transformation groupoid".into()));
    }
    f_iso
        .terms()
        .iter()
        .map(|(a, c)| match a {
            Arrow::Action { point, elem } if *point as usize == x && g.tgt(a) == x => Ok((elem.clone(), *c)),
            _ => Err(Error::NotInIsotropy),
        })
        .collect()
}

/// `f̂ = Σ_γ f(x, γ) 1_{U_γ}` for a self-adjoint `f` supported in `G_x^x`.
pub fn isotropy_lift(f_iso: &AlgebraElement, x: usize) -> Result<AlgebraElement> {
    let terms = isotropy_terms(f_iso, x)?;
    let d = f_iso.self_adjoint_defect();
    if d > SELF_ADJOINT_TOL * f_iso.sup_norm().max(1.0) {
        return Err(Error::NotSelfAdjoint(d));
    }
    let g = f_iso.groupoid();
    let lifted = terms
        .iter()
        .flat_map(|(e, c)| (0..g.num_units()).map(move |y| (Arrow::action(y, e.clone()), *c)));
    AlgebraElement::new(f_iso.algebra(), lifted)
}

/// `‖f‖₁` on the isotropy group.
pub fn isotropy_l1_norm(f_iso: &AlgebraElement) -> f64 {
    f_iso.terms().values().map(|c| c.norm()).sum()
}

/// Spectrum of `f` in the twisted group algebra `ℓ¹(G_x^x, σ_x)`.
pub fn spectrum_isotropy(f_iso: &AlgebraElement, x: usize) -> Result<Vec<Complex64>> {
    isotropy_terms(f_iso, x)?;
    let g = f_iso.groupoid();
    let iso = restrict_isotropy(g, f_iso.algebra().cocycle(), x)?;
    let crate::cocycle::IsotropyGroup::Finite { arrows, .. } = &iso.group else {
        return Err(Error::InfiniteBackend);
    };
    let n = arrows.len();
    let mut m = Mat::<Complex64>::zeros(n, n);
    for (a, c) in f_iso.terms() {
        for (j, b) in arrows.iter().enumerate() {
            let ab = g.compose(a, b)?;
            let i = arrows.iter().position(|z| *z == ab).expect("isotropy is a group");
            m[(i, j)] += c * iso.eval(a, b).to_complex();
        }
    }
    let mut ev = linalg::eigenvalues(&m)?;
    linalg::sort_spectrum(&mut ev);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::cocycle::Cocycle;
    use crate::group::{FiniteGroup, GroupSpec};
    use crate::groupoid::TransformationGroupoid;
    use crate::spectral::spectrum_l1_finite;

    #[test]
    fn trivial_z2_action_on_two_points() {
        let g = Groupoid::Action(
            TransformationGroupoid::trivial(
                vec!["p".into(), "q".into()],
                GroupSpec::finite(FiniteGroup::cyclic(2)),
            )
            .unwrap(),
        );
        let alg = Algebra::new(g, Cocycle::Trivial);
        let f = AlgebraElement::new(
            &alg,
            [
                (Arrow::action(0, GroupElem::Finite(1)), Complex64::new(1.0, 0.0)),
                (Arrow::action(0, GroupElem::Finite(0)), Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let lifted = isotropy_lift(&f, 0).unwrap();
        assert_eq!(lifted.len(), 4);
        assert!(lifted.i_norm() <= isotropy_l1_norm(&f) + 1e-15);
        let small = spectrum_isotropy(&f, 0).unwrap();
        let big = spectrum_l1_finite(&lifted).unwrap();
        assert!(linalg::one_sided_distance(&small, &big) < 1e-10);
        assert!(linalg::one_sided_distance(&big, &[Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.0)]) < 1e-10);
        assert_eq!(isotropy_lift(&f, 1).unwrap_err(), Error::NotInIsotropy);
    }
}
