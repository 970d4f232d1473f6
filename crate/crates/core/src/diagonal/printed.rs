//! The published closed forms of `C₂±` and `C₃±`, built generator-by-
//! generator. The Toda engine must reproduce these ring-exactly.

use crate::coeff::ratio;
use crate::diffalg::{DiffAlgElement, Prefactor, QT};

fn s() -> DiffAlgElement {
    DiffAlgElement::generator("S")
}
fn c() -> DiffAlgElement {
    DiffAlgElement::generator("C")
}
fn x() -> DiffAlgElement {
    DiffAlgElement::generator("X")
}

fn qt_t(coeffs: &[i64], tpow: i32) -> QT {
    QT::from_int_poly(coeffs, tpow, 0)
}

fn add(v: Vec<DiffAlgElement>) -> DiffAlgElement {
    let mut acc = DiffAlgElement::zero();
    for e in v {
        acc = acc.add(&e).expect("compatible prefactors");
    }
    acc
}

fn with_pre(pre: Prefactor, body: DiffAlgElement) -> DiffAlgElement {
    DiffAlgElement::new(pre, body.even, body.odd)
}

/// `C₂⁻ = Φ/cos²x · [C² + 8/3 CSX + X²(2S² - (t+1)/(3t)) - X⁴/(3t)]`
pub fn c2_minus() -> DiffAlgElement {
    let s2 = s().mul(&s());
    let x2 = x().mul(&x());
    let body = add(vec![
        c().mul(&c()),
        c().mul(&s()).mul(&x()).scale_rational(&ratio(8, 3)),
        x2.mul(&s2).scale_rational(&ratio(2, 1)),
        x2.scale_qt(&qt_t(&[-1, -1], -1).mul(&QT::from_ratio(1, 3))),
        x2.mul(&x2).scale_qt(&QT::monomial(ratio(-1, 3), -1, 0)),
    ]);
    with_pre(Prefactor { phi: 1, cosx: -2, ..Default::default() }, body)
}

/// `C₂⁺ = -Φ/(3t cos²x) · [2CX(2X² + 2tS² - t - 1) + S(X⁴ + X²(6tS² - 5(t+1)) + tC²)]`
pub fn c2_plus() -> DiffAlgElement {
    let s2 = s().mul(&s());
    let x2 = x().mul(&x());
    let bracket = add(vec![
        c().mul(&x()).mul(&add(vec![
            x2.scale_rational(&ratio(2, 1)),
            s2.scale_qt(&qt_t(&[0, 2], 0)),
            DiffAlgElement::one().scale_qt(&qt_t(&[-1, -1], 0)),
        ]))
        .scale_rational(&ratio(2, 1)),
        s().mul(&add(vec![
            x2.mul(&x2),
            x2.mul(&add(vec![
                s2.scale_qt(&qt_t(&[0, 6], 0)),
                DiffAlgElement::one().scale_qt(&qt_t(&[-5, -5], 0)),
            ])),
            c().mul(&c()).scale_qt(&qt_t(&[0, 1], 0)),
        ])),
    ]);
    let body = bracket.scale_qt(&QT::monomial(ratio(-1, 3), -1, 0));
    with_pre(Prefactor { phi: 1, cosx: -2, ..Default::default() }, body)
}

/// `(1-S²)(1-tS²)` as an element.
fn w() -> DiffAlgElement {
    c().mul(&c())
}

/// `C₃⁺ = Φ/(135 t^{5/2} cos³x) · [t C S R₁⁺ + X R₂⁺]`
pub fn c3_plus() -> DiffAlgElement {
    let s2 = s().mul(&s());
    let x2 = x().mul(&x());
    let one = DiffAlgElement::one;
    let r1 = add(vec![
        x2.mul(&x2).mul(&x2).scale_rational(&ratio(168, 1)),
        x2.mul(&x2)
            .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 6], 0)), one().scale_qt(&qt_t(&[-7, -7], 0))]))
            .scale_rational(&ratio(84, 1)),
        w().mul(&add(vec![s2.scale_qt(&qt_t(&[0, 2], 0)), one().scale_qt(&qt_t(&[-9, -9], 0))]))
            .scale_qt(&qt_t(&[0, 4], 0)),
        x2.mul(&add(vec![
            s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 1], 0)), one().scale_qt(&qt_t(&[-3, -3], 0))]))
                .scale_qt(&qt_t(&[0, 2], 0)),
            one().scale_qt(&qt_t(&[3, 4, 3], 0)),
        ]))
        .scale_rational(&ratio(108, 1)),
    ]);
    let r2 = add(vec![
        x2.mul(&x2).mul(&x2).mul(&x2).scale_rational(&ratio(-1, 1)),
        x2.mul(&x2)
            .mul(&x2)
            .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 6], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
            .scale_rational(&ratio(6, 1)),
        x2.mul(&x2)
            .mul(&add(vec![
                s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 1], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
                    .scale_qt(&qt_t(&[0, 42], 0)),
                one().scale_qt(&qt_t(&[-1, 28, -1], 0)),
            ]))
            .scale_rational(&ratio(9, 1)),
        x2.mul(&add(vec![
            s2.mul(&s2)
                .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 2], 0)), one().scale_qt(&qt_t(&[-5, -5], 0))]))
                .scale_qt(&qt_t(&[0, 0, 105], 0)),
            s2.scale_qt(&qt_t(&[0, 297, 588, 297], 0)),
            one().scale_qt(&qt_t(&[-2, -105, -105, -2], 0)),
        ]))
        .scale_rational(&ratio(2, 1)),
        w().mul(&add(vec![
            s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 3], 0)), one().scale_qt(&qt_t(&[-11, -11], 0))]))
                .scale_qt(&qt_t(&[0, 7], 0)),
            one().scale_qt(&qt_t(&[24, 21, 24], 0)),
        ]))
        .scale_qt(&qt_t(&[0, 3], 0)),
    ]);
    let body = add(vec![
        c().mul(&s()).mul(&r1).scale_qt(&QT::monomial(ratio(1, 135), 1, 0)),
        x().mul(&r2).scale_rational(&ratio(1, 135)),
    ]);
    with_pre(Prefactor { phi: 1, cosx: -3, t2: -5, omt4: 0 }, body)
}

/// `C₃⁻ = -Φ/(135 t² cos³x) · [C R₁⁻ + S X R₂⁻]`
pub fn c3_minus() -> DiffAlgElement {
    let s2 = s().mul(&s());
    let x2 = x().mul(&x());
    let one = DiffAlgElement::one;
    let r1 = add(vec![
        x2.mul(&x2).mul(&x2).mul(&x2).scale_rational(&ratio(9, 1)),
        x2.mul(&x2)
            .mul(&x2)
            .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 2], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
            .scale_rational(&ratio(42, 1)),
        x2.mul(&x2)
            .mul(&add(vec![
                s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 3], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
                    .scale_qt(&qt_t(&[0, 14], 0)),
                one().scale_qt(&qt_t(&[-13, 28, -13], 0)),
            ]))
            .scale_rational(&ratio(3, 1)),
        x2.mul(&add(vec![
            s2.mul(&s2)
                .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 2], 0)), one().scale_qt(&qt_t(&[1, 1], 0))]))
                .scale_qt(&qt_t(&[0, 0, 3], 0)),
            s2.scale_qt(&qt_t(&[0, -9, -156, -9], 0)),
            one().scale_qt(&qt_t(&[2, 15, 15, 2], 0)),
        ]))
        .scale_rational(&ratio(6, 1)),
        w().mul(&add(vec![
            s2.mul(&s2).scale_qt(&qt_t(&[0, 1], 0)),
            s2.scale_qt(&qt_t(&[3, 3], 0)),
            one().scale_qt(&qt_t(&[-135], 0)),
        ]))
        .scale_qt(&qt_t(&[0, 0, 1], 0)),
    ]);
    let r2 = add(vec![
        x2.mul(&x2).mul(&x2).mul(&x2),
        x2.mul(&x2)
            .mul(&x2)
            .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 6], 0)), one().scale_qt(&qt_t(&[-5, -5], 0))]))
            .scale_rational(&ratio(6, 1)),
        x2.mul(&x2)
            .mul(&add(vec![
                s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 1], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
                    .scale_qt(&qt_t(&[0, 14], 0)),
                one().scale_qt(&qt_t(&[1, 28, 1], 0)),
            ]))
            .scale_rational(&ratio(9, 1)),
        x2.mul(&add(vec![
            s2.mul(&s2)
                .mul(&add(vec![s2.scale_qt(&qt_t(&[0, 2], 0)), one().scale_qt(&qt_t(&[-1, -1], 0))]))
                .scale_qt(&qt_t(&[0, 0, 21], 0)),
            s2.scale_qt(&qt_t(&[0, -39, -252, -39], 0)),
            one().scale_qt(&qt_t(&[20, 81, 81, 20], 0)),
        ]))
        .scale_rational(&ratio(2, 1)),
        w().mul(&add(vec![
            s2.mul(&add(vec![s2.scale_qt(&qt_t(&[0, 3], 0)), one().scale_qt(&qt_t(&[5, 5], 0))]))
                .scale_qt(&qt_t(&[0, 1], 0)),
            one().scale_qt(&qt_t(&[-4, -197, -4], 0)),
        ]))
        .scale_qt(&qt_t(&[0, 3], 0)),
    ]);
    let body = add(vec![c().mul(&r1), s().mul(&x()).mul(&r2)])
        .scale_qt(&QT::monomial(ratio(-1, 135), -2, 0));
    with_pre(Prefactor { phi: 1, cosx: -3, ..Default::default() }, body)
}
