//! The Toda recurrence against the published closed forms: both engines on
//! both regimes, ring-exact at N = 2, 3 and series-exact through N = 4.

use ising_corr::diagonal::{c0, c1, printed, toda_sequence, toda_step, Engine, Regime};
use ising_corr::elliptic::EllipticContext;

#[test]
fn closed_engine_reproduces_printed_n2() {
    let ctx = EllipticContext::new(6, 24);
    for (regime, expected) in [(Regime::Minus, printed::c2_minus()), (Regime::Plus, printed::c2_plus())] {
        let a = c0(regime, &ctx);
        let b = c1(regime, &ctx);
        let c2 = toda_step(&a, &b, Engine::ClosedForm).unwrap();
        let got = c2.closed_form.expect("closed engine must not fall back at N = 1");
        assert!(got.ring_eq(&expected), "{} N=2:\n got      {got}\n expected {expected}", regime.name());
    }
}

#[test]
fn closed_engine_reproduces_printed_n3() {
    let ctx = EllipticContext::new(6, 24);
    for (regime, expected) in [(Regime::Minus, printed::c3_minus()), (Regime::Plus, printed::c3_plus())] {
        let seq = toda_sequence(regime, &ctx, 3, Engine::ClosedForm).unwrap();
        let got = seq[3].closed_form.clone().expect("closed engine must not fall back at N = 2");
        assert!(got.ring_eq(&expected), "{} N=3 closed-form mismatch", regime.name());
    }
}

#[test]
fn printed_forms_match_series_engine() {
    // independent triangulation: the printed elements evaluate to the
    // series-engine correlations
    let ctx = EllipticContext::new(9, 56);
    for regime in [Regime::Minus, Regime::Plus] {
        let seq = toda_sequence(regime, &ctx, 3, Engine::Series).unwrap();
        let p2 = match regime {
            Regime::Minus => printed::c2_minus(),
            Regime::Plus => printed::c2_plus(),
        };
        let p3 = match regime {
            Regime::Minus => printed::c3_minus(),
            Regime::Plus => printed::c3_plus(),
        };
        assert!(
            p2.to_series(&ctx).eq_to_common_trunc(&seq[2].series),
            "{} printed C2 vs series engine",
            regime.name()
        );
        assert!(
            p3.to_series(&ctx).eq_to_common_trunc(&seq[3].series),
            "{} printed C3 vs series engine",
            regime.name()
        );
    }
}

#[test]
fn engines_agree_to_n4() {
    let ctx = EllipticContext::new(9, 64);
    for regime in [Regime::Minus, Regime::Plus] {
        let seq = toda_sequence(regime, &ctx, 4, Engine::ClosedForm).unwrap();
        for c in seq.iter().skip(2) {
            let closed = c.closed_form.as_ref().expect("closed engine available");
            let via_closed = closed.to_series(&ctx);
            assert!(
                via_closed.eq_to_common_trunc(&c.series),
                "{} N={} closed vs series",
                regime.name(),
                c.n
            );
        }
    }
}

#[test]
fn plus_minus_parity() {
    let ctx = EllipticContext::new(9, 56);
    for regime in [Regime::Minus, Regime::Plus] {
        let seq = toda_sequence(regime, &ctx, 4, Engine::Series).unwrap();
        for c in &seq {
            match regime {
                Regime::Minus => assert!(c.series.is_even_in_x(), "minus N={}", c.n),
                Regime::Plus => assert!(c.series.is_odd_in_x(), "plus N={}", c.n),
            }
        }
    }
}
