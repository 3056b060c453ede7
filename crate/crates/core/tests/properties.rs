use modal_sep::analysis::{fit_damping, mac, match_shapes, pick_peak, welch_psd, RdtSignature};
use modal_sep::dynamics::{
    eigen_modes, newmark_integrate_forces, InitialState, NewmarkIntegrator, NewmarkOptions, SystemModel,
};
use modal_sep::network::{forward, loss, NetworkConfig, NetworkParams};
use modal_sep::record::ResponseQuantity;
use ndarray::{Array1, Array2};
use proptest::prelude::*;

fn spd(n: usize, entries: &[f64], shift: f64) -> Array2<f64> {
    let a = Array2::from_shape_fn((n, n), |(i, j)| entries[i * n + j]);
    let mut s = a.dot(&a.t());
    for i in 0..n {
        s[[i, i]] += shift;
    }
    s
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

fn random_model() -> impl Strategy<Value = SystemModel<f64>> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.0..1.0f64, n * n),
            prop::collection::vec(-10.0..10.0f64, n * n),
            0.0..0.5f64,
            0.0..0.01f64,
        )
            .prop_map(move |(m, k, a, b)| {
                SystemModel::rayleigh(spd(n, &m, 0.5), spd(n, &k, 1.0), a, b).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_modes_are_m_orthonormal_and_accurate(model in random_model()) {
        let truth = eigen_modes(&model).unwrap();
        let n = model.dofs();
        for w in truth.frequencies.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let phi = &truth.shapes;
        let gram = phi.t().dot(&model.mass).dot(phi);
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[[i, j]] - target).abs() <= 1e-8, "gram[{i},{j}] = {}", gram[[i, j]]);
            }
            let p = phi.column(i).to_owned();
            let w = 2.0 * std::f64::consts::PI * truth.frequencies[i];
            let kp = model.stiffness.dot(&p);
            let resid = &kp - &(model.mass.dot(&p) * (w * w));
            prop_assert!(norm(&resid) <= 1e-8 * norm(&kp), "mode {i}: residual {}", norm(&resid));
            let zeta = truth.damping_ratios[i];
            prop_assert!((truth.damped_frequencies[i] - truth.frequencies[i] * (1.0 - zeta * zeta).sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn mac_is_symmetric_scale_invariant_and_bounded(
        a in prop::collection::vec(-5.0..5.0f64, 6),
        b in prop::collection::vec(-5.0..5.0f64, 6),
        c in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64],
    ) {
        prop_assume!(a.iter().any(|v| v.abs() > 1e-6) && b.iter().any(|v| v.abs() > 1e-6));
        let ab = mac(&a, &b).unwrap();
        prop_assert_eq!(ab, mac(&b, &a).unwrap());
        let scaled: Vec<f64> = b.iter().map(|v| v * c).collect();
        prop_assert!((mac(&a, &scaled).unwrap() - ab).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn welch_integrated_power_matches_variance(seed in any::<u64>(), ar in -0.9..0.9f64) {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0f64; 1 << 15];
        for k in 1..x.len() {
            let e: f64 = StandardNormal.sample(&mut rng);
            x[k] = ar * x[k - 1] + e;
        }
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / x.len() as f64;
        let psd = welch_psd(&x, 50.0, 1024, 0.5).unwrap();
        let total = psd.integrated_power();
        prop_assert!((total - var).abs() <= 0.05 * var, "integrated {total} vs variance {var}");
    }

    #[test]
    fn pick_peak_is_within_one_bin(f0 in 1.0..20.0f64, phase in 0.0..6.28f64) {
        let fs = 100.0;
        let x: Vec<f64> = (0..4096).map(|k| (std::f64::consts::TAU * f0 * k as f64 / fs + phase).sin()).collect();
        let psd = welch_psd(&x, fs, 512, 0.5).unwrap();
        let f = pick_peak(&psd, (psd.resolution(), fs / 2.0)).unwrap();
        prop_assert!((f - f0).abs() <= psd.resolution(), "{f} vs {f0}");
    }

    #[test]
    fn fit_damping_is_exact_on_synthetic_decay(zeta in 0.001..0.05f64, f in 1.0..10.0f64) {
        let fs = 200.0;
        let w = std::f64::consts::TAU * f;
        let wd = w * (1.0 - zeta * zeta).sqrt();
        let len = (fs * 20.0 / f) as usize;
        let lags: Vec<f64> = (0..len).map(|k| k as f64 / fs).collect();
        let amplitude = lags.iter().map(|t| (-zeta * w * t).exp() * (wd * t).cos()).collect();
        let sig = RdtSignature { lags, amplitude, trigger_level: 1.0, segment_count: 100 };
        let z = fit_damping(&sig, f * (1.0 - zeta * zeta).sqrt()).unwrap();
        prop_assert!((z - zeta).abs() <= 0.02 * zeta, "{z} vs {zeta}");
    }

    #[test]
    fn newmark_is_linear(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let model = modal_sep::dynamics::benchmark_4dof::<f64>();
        let f1 = Array2::from_shape_fn((300, 4), |_| rng.random_range(-1.0..1.0));
        let f2 = Array2::from_shape_fn((300, 4), |_| rng.random_range(-1.0..1.0));
        let rest = InitialState::at_rest(4);
        let opts = NewmarkOptions::default();
        let r1 = newmark_integrate_forces(&model, f1.view(), 100.0, &rest, opts).unwrap();
        let r2 = newmark_integrate_forces(&model, f2.view(), 100.0, &rest, opts).unwrap();
        let sum = &f1 + &f2;
        let r12 = newmark_integrate_forces(&model, sum.view(), 100.0, &rest, opts).unwrap();
        let expect = &r1.samples + &r2.samples;
        let scale = expect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in r12.samples.iter().zip(expect.iter()) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn loss_is_invariant_to_neuron_permutation(seed in any::<u64>(), shift in 1usize..4) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = NetworkParams::<f64>::random_init(4, 4, &mut rng);
        let x = Array2::from_shape_fn((32, 4), |_| rng.random_range(-1.0..1.0));
        let perm: Vec<usize> = (0..4).map(|i| (i + shift) % 4).collect();
        let q = NetworkParams {
            w1: p.w1.clone(),
            w2: p.w2.select(ndarray::Axis(1), &perm),
            w3: p.w3.select(ndarray::Axis(0), &perm),
        };
        let cfg = NetworkConfig::new(4, 4);
        let a = loss(&p, x.view(), &cfg).unwrap();
        let b = loss(&q, x.view(), &cfg).unwrap();
        prop_assert!((a.total - b.total).abs() <= 1e-12 * a.total.abs().max(1.0));
        let act = forward(&q, x.view()).unwrap();
        prop_assert!(act.q.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn match_shapes_recovers_permutation(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let truth = eigen_modes(&modal_sep::dynamics::benchmark_4dof::<f64>()).unwrap();
        let shapes: Vec<Vec<f64>> = (0..4).map(|i| truth.shape(i).to_vec()).collect();
        let mut order: Vec<usize> = (0..4).collect();
        order.shuffle(&mut rng);
        let est: Vec<Vec<f64>> = order.iter().map(|&i| shapes[i].clone()).collect();
        let freqs: Vec<f64> = order.iter().map(|&i| truth.frequencies[i]).collect();
        let pairs = match_shapes(&est, &freqs, &shapes, &truth.frequencies);
        prop_assert_eq!(pairs.len(), 4);
        for p in pairs {
            prop_assert_eq!(order[p.estimate], p.reference);
            prop_assert!((p.mac - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn undamped_energy_drift_is_bounded() {
    let model = SystemModel::rayleigh(
        modal_sep::dynamics::benchmark_4dof::<f64>().mass,
        modal_sep::dynamics::benchmark_4dof::<f64>().stiffness,
        0.0,
        0.0,
    )
    .unwrap();
    let init = InitialState {
        displacement: ndarray::array![0.01, -0.02, 0.015, 0.005],
        velocity: ndarray::array![0.1, 0.0, -0.05, 0.2],
    };
    let zero = Array1::zeros(4);
    let mut integ = NewmarkIntegrator::new(&model, 0.01, &init, zero.view()).unwrap();
    let e0 = integ.mechanical_energy();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        integ.step(zero.view());
        worst = worst.max((integ.mechanical_energy() - e0).abs() / e0);
    }
    assert!(worst <= 1e-6, "relative drift {worst:e}");
}

#[test]
fn simulation_is_deterministic() {
    use modal_sep::dynamics::{newmark_integrate, ExcitationSpec};
    let model = modal_sep::dynamics::benchmark_4dof::<f64>();
    let ex = ExcitationSpec::white_noise(vec![1.0; 4], 42);
    let run = || {
        newmark_integrate(&model, &ex, 20.0, 100.0, &InitialState::at_rest(4), NewmarkOptions::default()).unwrap()
    };
    let (a, b) = (run(), run());
    assert!(a.samples.iter().zip(b.samples.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_eq!(a.quantity, ResponseQuantity::Acceleration);
}

#[test]
fn training_is_deterministic() {
    use modal_sep::network::train_samples;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let x = Array2::from_shape_fn((200, 3), |_| rng.random_range(-1.0..1.0));
    let mut cfg = NetworkConfig::new(3, 3);
    cfg.epochs = 20;
    cfg.batch_size = 64;
    let (p1, t1) = train_samples(x.view(), &cfg).unwrap();
    let (p2, t2) = train_samples(x.view(), &cfg).unwrap();
    assert_eq!(p1, p2);
    assert_eq!(t1, t2);
}
