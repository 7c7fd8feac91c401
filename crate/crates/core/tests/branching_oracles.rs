use lwc::branching::{
    ctbp_sample, malthusian_rate, pwit_sample, size_biased, thinned_malthusian_rate, unimodular_bp_sample, yule_sample,
    Stop, DEFAULT_CAP,
};
use lwc::generators::{AttachmentFn, DegreePmf};
use lwc::rng::seeded;
use lwc::stats::mean_se;

#[test]
fn affine_ctbp_mean_population_matches_closed_form() {
    // f(k) = k + a: the total birth rate is (M - 1) + a M, so
    // M' = (1 + a) M - 1 with M(0) = 1, i.e. M(t) = (1 + a e^{(1+a)t}) / (1 + a)
    let mut rng = seeded(31);
    for (a, t) in [(0.3, 2.0), (0.5, 1.5), (2.0, 0.8)] {
        let f = AttachmentFn::custom(move |k| k as f64 + a);
        let sizes: Vec<f64> = (0..20_000)
            .map(|_| ctbp_sample(&f, Stop::Time(t), DEFAULT_CAP, &mut rng).unwrap().size() as f64)
            .collect();
        let (m, se) = mean_se(&sizes);
        let want = (1.0 + a * ((1.0 + a) * t).exp()) / (1.0 + a);
        assert!((m - want).abs() < 4.0 * se, "a={a} t={t}: {m} ± {se} vs {want}");
    }
}

#[test]
fn yule_mean_population_is_exponential() {
    let mut rng = seeded(32);
    let sizes: Vec<f64> = (0..20_000)
        .map(|_| yule_sample(Stop::Time(1.5), DEFAULT_CAP, &mut rng).unwrap().size() as f64)
        .collect();
    let (m, se) = mean_se(&sizes);
    assert!((m - 1.5f64.exp()).abs() < 4.0 * se);
}

#[test]
fn malthusian_rates_from_the_series_match_affine_values() {
    // the custom closures force the general series path
    let cases: [(AttachmentFn, f64); 3] = [
        (AttachmentFn::custom(|_| 1.0), 1.0),
        (AttachmentFn::custom(|k| k as f64 + 1.0), 2.0),
        (AttachmentFn::custom(|k| k as f64 + 2.5), 3.5),
    ];
    for (f, want) in cases {
        let r = malthusian_rate(&f).unwrap();
        assert!((r.lambda - want).abs() < 1e-6, "{} vs {want}", r.lambda);
    }
    assert_eq!(malthusian_rate(&AttachmentFn::linear(1.0)).unwrap().lambda, 3.0);
    // percolated PA: λ_c = 1 + (1 + β) c
    let r = thinned_malthusian_rate(&AttachmentFn::custom(|k| k as f64 + 2.0), 0.5).unwrap();
    assert!((r.lambda - 2.0).abs() < 1e-6);
}

#[test]
fn size_biased_poisson_is_poisson() {
    let p = DegreePmf::poisson(2.0, 60).unwrap();
    let q = size_biased(&p).unwrap();
    for k in 0..20 {
        assert!((q.prob(k) - p.prob(k)).abs() < 1e-12);
    }
    let q = size_biased(&DegreePmf::delta(4)).unwrap();
    assert_eq!(q.prob(3), 1.0);
}

#[test]
fn unimodular_tree_root_and_child_degrees() {
    let p = DegreePmf::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
    let mut rng = seeded(33);
    let mut root_deg = [0.0; 4];
    let mut child_kids = [0.0; 4];
    let reps = 40_000;
    for _ in 0..reps {
        let t = unimodular_bp_sample(&p, 2, DEFAULT_CAP, &mut rng).unwrap();
        root_deg[t.children(0).len()] += 1.0 / reps as f64;
        let c = t.children(0)[0];
        child_kids[t.children(c).len()] += 1.0;
    }
    assert!((root_deg[1] - 0.5).abs() < 0.01 && (root_deg[3] - 0.5).abs() < 0.01);
    // a child has degree d with probability d p_d / μ: 1/4 for d = 1, 3/4 for d = 3
    let total: f64 = child_kids.iter().sum();
    assert!((child_kids[0] / total - 0.25).abs() < 0.01);
    assert!((child_kids[2] / total - 0.75).abs() < 0.01);
}

#[test]
fn pwit_root_has_poisson_many_light_edges() {
    let mut rng = seeded(34);
    let counts: Vec<f64> = (0..20_000)
        .map(|_| pwit_sample(1, 3.0, &mut rng).unwrap().children(0).len() as f64)
        .collect();
    let (m, se) = mean_se(&counts);
    assert!((m - 3.0).abs() < 4.0 * se);
}
