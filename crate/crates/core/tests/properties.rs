//! Property tests: the calculus identities over randomized laws and
//! thinnings on small windows.

use proptest::collection::vec;
use proptest::prelude::*;

use thincond_core::dist::{
    condense, detailed_balance_residual, invariant_residual, papangelou_fn, reconstruct, thin,
    verify_cycle_excluding, verify_ibp, IbpFamily, Orientation, RatioMode, TriMatrix,
    TruncatedPmf,
};
use thincond_core::zoo::{make_thinning, ThinSpec};

const WINDOW: usize = 9;

fn arb_law() -> impl Strategy<Value = TruncatedPmf<f64>> {
    vec(0.02f64..1.0, WINDOW + 1)
        .prop_map(|w| TruncatedPmf::from_weights(w).expect("positive weights"))
}

fn arb_positive_thinning() -> impl Strategy<Value = TriMatrix<f64>> {
    vec(vec(0.02f64..1.0, WINDOW + 1), WINDOW + 1).prop_map(|raw| {
        let rows: Vec<Vec<f64>> = raw
            .into_iter()
            .enumerate()
            .map(|(n, mut row)| {
                for v in row.iter_mut().skip(n + 1) {
                    *v = 0.0;
                }
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= sum);
                row
            })
            .collect();
        TriMatrix::from_rows(rows, Orientation::Lower).expect("stochastic rows")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Balance by construction: the condensation row masses match the joint
    /// law exactly wherever the thinned mass is real.
    #[test]
    fn balance_equations_hold(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        for k in 0..=WINDOW {
            if c.thinned.weight(k) <= 1e-14 {
                continue;
            }
            for n in k..=WINDOW {
                let lhs = c.thinned.weight(k) * c.matrix.get(k, n);
                let rhs = nu.weight(n) * t.get(n, k);
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    /// Thinning a probability law yields a probability law.
    #[test]
    fn thinning_preserves_mass(nu in arb_law(), t in arb_positive_thinning()) {
        let thinned = thin(&nu, &t).unwrap();
        prop_assert!((thinned.total() - 1.0).abs() < 1e-12);
        prop_assert!(thinned.weights().iter().all(|&w| w >= 0.0));
    }

    /// The reconstruction recursion inverts condensation up to
    /// normalization.
    #[test]
    fn reconstruction_roundtrip(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        let rec = reconstruct(&t, &c.matrix, WINDOW).unwrap();
        let recovered = rec.normalized.unwrap();
        let tv = recovered.tv_distance(&nu.renormalized().unwrap());
        prop_assert!(tv < 1e-9, "tv {}", tv);
    }

    /// Alternating cycle condition on the full window.
    #[test]
    fn cycle_condition(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        let report =
            verify_cycle_excluding(&t, &c.matrix, WINDOW, &c.pathological_rows).unwrap();
        prop_assert!(report.max_violation < 1e-11, "violation {:?}", report);
    }

    /// The law is invariant under one thin-then-condense transport.
    #[test]
    fn invariance(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        let residual = invariant_residual(&nu, &t, &c.matrix).unwrap();
        prop_assert!(residual < 1e-11, "residual {}", residual);
    }

    /// The integration-by-parts residual over indicators is exactly the
    /// largest detailed-balance residual.
    #[test]
    fn ibp_is_detailed_balance(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        let via_ibp = verify_ibp(&nu, &t, &c.matrix, IbpFamily::Indicators).unwrap();
        let via_db = detailed_balance_residual(&nu, &t, &c.matrix)
            .unwrap()
            .into_iter()
            .fold(0.0f64, f64::max);
        prop_assert!((via_ibp - via_db).abs() <= 1e-14);
        prop_assert!(via_ibp < 1e-12, "ibp residual {}", via_ibp);
    }

    /// Papangelou consistency: `ν_{n+1} death(n+1) = ν_n π(n)` pointwise.
    #[test]
    fn papangelou_restates_detailed_balance(nu in arb_law(), t in arb_positive_thinning()) {
        let c = condense(&nu, &t).unwrap();
        let pi = papangelou_fn(&t, &c.matrix, RatioMode::Raw).unwrap();
        for n in 0..WINDOW {
            if c.thinned.weight(n) <= 1e-14 {
                continue;
            }
            let death = t.get(n + 1, n) / t.get(n, n);
            prop_assert!(
                (nu.weight(n + 1) * death - nu.weight(n) * pi.values[n]).abs() < 1e-12
            );
        }
    }

    /// Built-in thinning rows are stochastic and triangular for any q.
    #[test]
    fn built_in_thinnings_are_stochastic(q in 0.01f64..0.99, n_max in 1usize..40) {
        for spec in [
            ThinSpec::Independent { q },
            ThinSpec::Uniform,
            ThinSpec::AlmostNothing { q },
            ThinSpec::AllOrNothing { q },
        ] {
            let t = make_thinning(&spec, n_max).unwrap();
            prop_assert!(t.row_defect() <= 1e-12);
            for n in 0..=n_max {
                let sum: f64 = t.row(n).iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }
}

mod mc_props {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use thincond_core::mc::{thin_config, McThinning, SimpleConfig};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Kept and removed parts always recompose the input configuration.
        #[test]
        fn thinning_conserves_points(
            points in vec((0.0f64..1.0, 0.0f64..1.0), 0..12),
            q in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let config = SimpleConfig {
                dim: 2,
                points: points.iter().map(|&(x, y)| [x, y]).collect(),
            };
            let spec = McThinning::independent(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (kept, removed) = thin_config(&spec, &config, &mut rng).unwrap();
            prop_assert_eq!(kept.len() + removed.len(), config.len());
            let mut merged = kept.points.clone();
            merged.extend_from_slice(&removed.points);
            merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut original = config.points.clone();
            original.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assert_eq!(merged, original);
        }
    }
}
