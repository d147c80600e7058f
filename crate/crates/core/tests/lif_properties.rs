use proptest::prelude::*;

use spikeqrs_core::data::gen_wave_with_diracs;
use spikeqrs_core::lif::{lif_encode, lif_encode_train};
use spikeqrs_core::metrics::{alexiewicz_distance, err_trajectory};
use spikeqrs_core::sod::{sod_encode, sod_reconstruct, Grid};
use spikeqrs_core::{LifConfig, ResetMode, SodConfig, SpikeTrain, UniformSignal};

fn train(max_amp: f64) -> impl Strategy<Value = SpikeTrain> {
    prop::collection::vec((0.001f64..2.0, -max_amp..max_amp), 0..200).prop_map(|ev| {
        let mut t = 0.0;
        SpikeTrain::from_events(ev.into_iter().filter(|e| e.1 != 0.0).map(|(gap, a)| {
            t += gap;
            (t, a)
        }))
        .unwrap()
    })
}

fn theta() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(0.7), Just(0.25), 0.05f64..3.0]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(0.1), Just(1.0), 0.0f64..5.0]
}

proptest! {
    #[test]
    fn mod_reset_error_stays_below_threshold(eta in train(6.0), theta in theta(), alpha in alpha()) {
        let cfg = LifConfig::new(theta, alpha, 0.0, ResetMode::ToMod).unwrap();
        let q = lif_encode_train(&eta, &cfg).unwrap();
        prop_assert!(alexiewicz_distance(&eta, &q, alpha) < theta);
    }

    #[test]
    fn mod_reset_is_idempotent(eta in train(6.0), theta in theta(), alpha in alpha()) {
        let cfg = LifConfig::new(theta, alpha, 0.0, ResetMode::ToMod).unwrap();
        let once = lif_encode_train(&eta, &cfg).unwrap();
        prop_assert_eq!(lif_encode_train(&once, &cfg).unwrap(), once);
    }

    #[test]
    fn output_is_quantized_on_input_times(eta in train(6.0), theta in theta(), alpha in alpha(),
                                          reset in prop::sample::select(ResetMode::ALL.to_vec())) {
        let cfg = LifConfig::new(theta, alpha, 0.0, reset).unwrap();
        let q = lif_encode_train(&eta, &cfg).unwrap();
        let times: Vec<f64> = eta.times().collect();
        for s in q.iter() {
            prop_assert!(times.contains(&s.t));
            let k = s.amplitude / theta;
            prop_assert!(k != 0.0 && (k - k.round()).abs() < 1e-9, "amplitude {} theta {}", s.amplitude, theta);
        }
    }

    #[test]
    fn mod_and_subtract_agree_on_small_amplitudes(eta in train(1.0), alpha in alpha()) {
        let m = LifConfig::new(1.0, alpha, 0.0, ResetMode::ToMod).unwrap();
        let s = m.with_reset(ResetMode::BySubtraction);
        prop_assert_eq!(lif_encode_train(&eta, &m).unwrap(), lif_encode_train(&eta, &s).unwrap());
    }

    #[test]
    fn hybrid_error_trajectory_is_bounded(seed in any::<u64>(), theta in 0.1f64..2.0, alpha in alpha()) {
        let f = gen_wave_with_diracs(seed, 10.0, 0.01).unwrap();
        let cfg = LifConfig::new(theta, alpha, 0.0, ResetMode::ToMod).unwrap();
        let q = lif_encode(&f, &cfg).unwrap();
        let e = err_trajectory(&f, &q, alpha).unwrap();
        let worst = e.samples().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assert!(worst < theta * (1.0 + 1e-9), "max error {} theta {}", worst, theta);
    }

    #[test]
    fn sod_reconstruction_within_threshold(xs in prop::collection::vec(-5.0f64..5.0, 2..400), theta in 0.01f64..2.0) {
        let x = UniformSignal::new(0.0, 0.01, xs).unwrap();
        let cfg = SodConfig::new(theta).unwrap();
        let s = sod_encode(&x, &cfg).unwrap();
        let r = sod_reconstruct(&s, &cfg, x.samples()[0], Grid::from(&x)).unwrap();
        for (a, b) in x.samples().iter().zip(r.samples()) {
            prop_assert!((a - b).abs() < theta);
        }
    }

    #[test]
    fn coarser_sod_threshold_never_adds_spikes(xs in prop::collection::vec(-5.0f64..5.0, 2..400),
                                               theta in 0.05f64..1.0, k in 2u32..5) {
        let x = UniformSignal::new(0.0, 0.01, xs).unwrap();
        let fine = sod_encode(&x, &SodConfig::new(theta).unwrap()).unwrap();
        let coarse = sod_encode(&x, &SodConfig::new(theta * k as f64).unwrap()).unwrap();
        prop_assert!(coarse.len() <= fine.len());
    }
}
