use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::summary::Part;
use crate::testutil::{polys, spectral};

fn summary_of(name: &str) -> (ExhaustiveSummary, Vec<String>) {
    let spec = spectral(name);
    (spectral_summary(&spec), spec.symbols.names.clone())
}

#[test]
fn ar1_density() {
    let spec = spectral("ar1");
    let names = &spec.symbols.names;
    let form = spectral_density(&spec);
    assert_eq!(
        form.num[(0, 0)].display(names).to_string(),
        "(-rho*s2eta)*s^2 + (rho^2*s2eta + s2eta + s2eps)*s + (-rho*s2eta)"
    );
    assert_eq!(
        form.den.display(names).to_string(),
        "(-rho)*s^2 + (rho^2 + 1)*s + (-rho)"
    );
    assert_eq!(form.reduced[(0, 0)].num, form.num[(0, 0)]);
    assert_eq!(form.reduced[(0, 0)].den, form.den);
}

#[test]
fn ar1_summary() {
    let (k, names) = summary_of("ar1");
    let expected = ["-rho*s2eta", "rho^2*s2eta + s2eta + s2eps", "-rho", "rho^2 + 1"];
    assert_eq!(k.entries, polys(&expected, &names));
    let parts: Vec<_> = k.provenance.iter().map(|p| (p.power, p.part)).collect();
    assert_eq!(
        parts,
        [
            (0, Part::Numerator),
            (1, Part::Numerator),
            (0, Part::Denominator),
            (1, Part::Denominator)
        ]
    );
}

#[test]
fn ar1_crosscov_summary() {
    let spec = spectral("ar1_crosscov");
    let names = &spec.symbols.names;
    let form = spectral_density(&spec);
    assert_eq!(
        form.num[(0, 0)].coeff(2),
        crate::testutil::poly("-rho*s2eta + s2epseta", names)
    );
    let k = exhaustive_summary(&form);
    let expected = [
        "-rho*s2eta + s2epseta",
        "rho^2*s2eta - 2*s2epseta*rho + s2eta + s2eps",
        "-rho",
        "rho^2 + 1",
    ];
    assert_eq!(k.entries, polys(&expected, names));
}

#[test]
fn lapwing_summary() {
    let (k, names) = summary_of("lapwing");
    let expected = [
        "-rho*phi1*phia*s2eta",
        "rho*phi1*phia^2*s2eta - phia*s2eta",
        "rho^2*phi1^2*phia^2*s2eta + phia^2*s2eta + phia^2*s2eps + s2eta + s2eps",
        "-rho*phi1*phia",
        "rho*phi1*phia^2 - phia",
        "rho^2*phi1^2*phia^2 + phia^2 + 1",
    ];
    assert_eq!(k.entries, polys(&expected, &names));
}

#[test]
fn polar_bear_summary_matches_up_to_sign() {
    let (k, names) = summary_of("polarbear");
    // printed with numerator and denominator of each channel both negated
    let printed = [
        "rho_u*s2eta_u + rho_u",
        "-rho_u^2*s2eta_u - rho_u^2 - s2eta_u - s2eps_u - 1",
        "rho_u",
        "-rho_u^2 - 1",
        "rho_v*s2eta_v + rho_v",
        "-rho_v^2*s2eta_v - rho_v^2 - s2eta_v - s2eps_v - 1",
        "rho_v",
        "-rho_v^2 - 1",
    ];
    let negated: Vec<_> = polys(&printed, &names).into_iter().map(|p| -&p).collect();
    assert_eq!(k.entries, negated);
}

#[test]
fn polar_bear_cancels_other_channel() {
    let spec = spectral("polarbear");
    let form = spectral_density(&spec);
    let uu = &form.reduced[(0, 0)];
    assert_eq!(uu.den.max_power(), Some(2));
    assert_eq!(uu.cancelled.len(), 2);
    assert!(form.reduced[(0, 1)].num.is_zero());
    // uncancelled form keeps the common denominator
    assert_eq!(form.den.max_power(), Some(4));
}

#[test]
fn mar1_partial_summary() {
    let (k, names) = summary_of("mar1_partial");
    let expected = [
        "(a11*a22 - a12*a21)*s2eta",
        "-(a11 + a22)*(a11*a22 - a12*a21 + 1)*s2eta - a22*s2eps",
        "((a11^2 + 1)*a22^2 + (-2*a12*a21 + 2)*a11*a22 + a12^2*a21^2 + a11^2 + 1)*s2eta + (a12^2 + a22^2 + 1)*s2eps",
        "a11*a22 - a12*a21",
        "-(a11 + a22)*(a11*a22 - a12*a21 + 1)",
        "(a11*a22 - a12*a21)^2 + (a11 + a22)^2 + 1",
    ];
    assert_eq!(k.entries, polys(&expected, &names));
}

#[test]
fn mar1_full_summary() {
    let (k, names) = summary_of("mar1_full");
    let expected = [
        "(a11*a22 - a12*a21)*s2eta",
        "-(a11 + a22)*(a11*a22 - a12*a21 + 1)*s2eta - a22*s2eps",
        "((a11^2 + 1)*a22^2 + (-2*a12*a21 + 2)*a11*a22 + a12^2*a21^2 + a11^2 + 1)*s2eta + (a12^2 + a22^2 + 1)*s2eps",
        "a11*a22 - a12*a21",
        "-(a11 + a22)*(a11*a22 - a12*a21 + 1)",
        "(a11*a22 - a12*a21)^2 + (a11 + a22)^2 + 1",
        "a12*s2eps",
        "-(a11*a12 + a21*a22)*s2eps",
        "a21*s2eps",
        "-(a11 + a22)*(a11*a22 - a12*a21 + 1)*s2eta - a11*s2eps",
        "((a22^2 + 1)*a11^2 + (-2*a12*a21 + 2)*a11*a22 + a12^2*a21^2 + a22^2 + 1)*s2eta + (a11^2 + a21^2 + 1)*s2eps",
    ];
    assert_eq!(k.entries, polys(&expected, &names));
    let p = k.provenance[8];
    assert_eq!((p.row, p.col, p.power, p.part), (0, 1, 3, Part::Numerator));
}

#[test]
fn continuous_two_compartment_summary() {
    let (k, names) = summary_of("twocompartment_ct");
    let expected = [
        "(t02 + t12)^2*s2",
        "-s2",
        "((t02 + t12)*t01 + t02*t21)^2",
        "-(t01 + t21)^2 - (t02 + t12)^2 - 2*t12*t21",
    ];
    assert_eq!(k.entries, polys(&expected, &names));
}

#[test]
fn kappa3_stochastic() {
    let (k, names) = summary_of("compartment3");
    let expected = [
        "t21^2*t32^2*s2",
        "t21*(t32 + t02)",
        "(t21 + t32 + t02)*(t21*(t32 + t02) + 1)",
        "t21^2*(t32 + t02)^2 + (t21 + t32 + t02)^2 + 1",
    ];
    assert_eq!(k.entries, polys(&expected, &names));
    assert_eq!(k.params, [0, 1, 2, 3]);
}

#[test]
fn zero_noise_gives_zero_numerator() {
    let mut spec = spectral("lapwing");
    spec.q = spec.q.map(|p| MPoly::zero(p.nvars()));
    let form = spectral_density(&spec);
    assert!(form.num.iter().all(SPoly::is_zero));
}

#[test]
fn entry_visiting_order() {
    assert_eq!(
        entry_order(3),
        [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2), (1, 0), (2, 0), (2, 1)]
    );
}

#[test]
fn discrete_symmetries() {
    for name in [
        "lapwing",
        "polarbear",
        "mar1_partial",
        "mar1_full",
        "ar1",
        "ar1_crosscov",
        "compartment3",
    ] {
        let spec = spectral(name);
        let form = spectral_density(&spec);
        let two_n = 2 * spec.n as i32;
        for k in 0..=two_n {
            assert_eq!(form.den.coeff(k), form.den.coeff(two_n - k), "{name} den palindrome");
        }
        for (i, j, e) in form.num.indexed() {
            for k in 0..=two_n {
                assert_eq!(e.coeff(k), form.num[(j, i)].coeff(two_n - k), "{name} ({i},{j})");
            }
        }
    }
}
