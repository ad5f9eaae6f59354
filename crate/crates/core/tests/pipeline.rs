use multiris::ao::ao_iterate;
use multiris::beamforming::{gamma_max, gamma_max_all, select_user};
use multiris::channel::{draw_topology, realize_channels};
use multiris::harness::run_trial;
use multiris::numerics::RngStream;
use multiris::{Scheme, SystemConfig};
use proptest::prelude::*;

fn small_config() -> impl Strategy<Value = SystemConfig> {
    (1usize..=4, 1usize..=3, 1usize..=6, any::<u32>()).prop_flat_map(|(nb, s, ns, seed)| {
        (1..=nb).prop_map(move |k| SystemConfig {
            bs_antennas: nb,
            users: k,
            surfaces: s,
            elements_per_surface: vec![ns],
            trials: 1,
            seed: seed as u64,
            ..SystemConfig::desk()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ideal_bounds_optimized_schemes(cfg in small_config(), trial in 0usize..50) {
        let rec = run_trial(&cfg, trial).unwrap();
        let get = |s: Scheme| rec.results.iter().find(|r| r.scheme == s).unwrap();
        let ideal = get(Scheme::UsIdeal).sum_throughput_bps;
        for s in [Scheme::UsAo, Scheme::UsJo] {
            let r = get(s);
            prop_assert!(r.sum_throughput_bps <= ideal * (1.0 + 1e-12));
            prop_assert_eq!(r.selected_user, get(Scheme::UsIdeal).selected_user);
        }
        for r in &rec.results {
            prop_assert!(r.sum_throughput_bps.is_finite() && r.sum_throughput_bps > 0.0);
        }
    }

    #[test]
    fn selected_user_maximizes_bound(cfg in small_config(), stream in 0u64..1000) {
        let mut rng = RngStream::new(cfg.seed, stream);
        let geom = draw_topology(&cfg, &mut rng);
        let ch = realize_channels(&geom, &cfg, &mut rng).unwrap();
        let k = select_user(&ch).unwrap();
        let all = gamma_max_all(&ch).unwrap();
        prop_assert!(all.iter().all(|&g| g <= all[k]));
        prop_assert!(all[..k].iter().all(|&g| g < all[k]));
        let ao = ao_iterate(&ch, k, cfg.tx_power_w, &cfg.ao_settings()).unwrap();
        let bound = gamma_max(&ch.g[k], &ch.f, &ch.d[k]).unwrap();
        prop_assert!(ao.gain <= bound * (1.0 + 1e-12));
    }
}

#[test]
fn trial_is_reproducible_in_isolation() {
    let cfg = SystemConfig {
        seed: 77,
        ..SystemConfig::desk()
    };
    assert_eq!(
        run_trial(&cfg, 13)
            .unwrap()
            .results
            .iter()
            .map(|r| r.sum_throughput_bps)
            .collect::<Vec<_>>(),
        run_trial(&cfg, 13)
            .unwrap()
            .results
            .iter()
            .map(|r| r.sum_throughput_bps)
            .collect::<Vec<_>>()
    );
}
