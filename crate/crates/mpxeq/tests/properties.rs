use mpxeq::centrality::{check_parallel, influences, katz_centralities, leontief_inverse};
use mpxeq::compstat::{perturb, perturb_with_mu_dot, Perturbation};
use mpxeq::economy::{build_comparison_economy, validate_economy, ComparisonMode, GoodLayer};
use mpxeq::equilibrium::{solve, solve_effective_endowment, solve_equilibrium};
use mpxeq::lindahl::solve_lindahl;
use mpxeq::linalg::{cosine_dissimilarity, max_abs, ones, Mat, Vector};
use mpxeq::oracle::numeric_planner;
use mpxeq::oracle::random::{self, random_economy, random_interior_economy, random_redistribution, Family};
use mpxeq::welfare::{
    construct_improvement, efficiency_loss, no_improvement_weight, pareto_allocation, planner_kkt_residual,
    resource_utilization,
};
use mpxeq::{parse_economy, serialize_economy, Error, MultiplexEconomy};
use proptest::prelude::*;
use rand::Rng;

fn economy(seed: u64, family: Family) -> MultiplexEconomy {
    random_economy(&mut random::rng(seed), family, 6, 4)
}

fn interior(seed: u64) -> MultiplexEconomy {
    let mut rng = random::rng(seed);
    let family = Family::draw(&mut rng);
    random_interior_economy(&mut rng, family, 6, 4)
}

fn weights(seed: u64, n: usize) -> Vector {
    random::random_weights(&mut random::rng(seed), n)
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Generic),
        Just(Family::Regular),
        Just(Family::IdenticalLayers),
        Just(Family::NoSpillover),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parse_serialize_roundtrip(seed in any::<u64>(), fam in family()) {
        let e = economy(seed, fam);
        let text = serialize_economy(&e);
        let back = parse_economy(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(serialize_economy(&back), text);
    }

    #[test]
    fn assumption_flags_monotone_in_phi(seed in any::<u64>(), shrink in 0.0..1.0f64, blowup in 1.0..50.0f64) {
        let e = economy(seed, Family::Generic);
        let big = e.with_goods(e.goods().iter().map(|g| g.with_phi(g.phi() * blowup)).collect()).unwrap();
        let small = big.with_goods(big.goods().iter().map(|g| g.with_phi(g.phi() * shrink)).collect()).unwrap();
        let (rb, rs) = (validate_economy(&big), validate_economy(&small));
        for (b, s) in rb.layers.iter().zip(&rs.layers) {
            prop_assert!(!b.a2a || s.a2a);
            prop_assert!(!b.a2b || s.a2b);
        }
    }

    #[test]
    fn comparison_builder_is_well_formed(
        seed in any::<u64>(),
        n in 2usize..7,
        intensity in 0.0..2.0f64,
        linear in any::<bool>(),
    ) {
        let mut rng = random::rng(seed);
        let neighbors: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && rng.random_bool(0.4)).collect())
            .collect();
        let w = Vector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
        let private = GoodLayer::new("private", 0.5, 0.0, Mat::zeros(n, n), w.clone());
        let mode = if linear { ComparisonMode::Linear } else { ComparisonMode::Average };
        let c = build_comparison_economy(&neighbors, intensity, mode, private, w).unwrap();
        let g = c.economy.good(1).network();
        prop_assert!((0..n).all(|i| g[(i, i)] == 0.0));
        prop_assert!(g.iter().all(|&v| v >= 0.0));
        for &i in &c.isolated {
            prop_assert!(neighbors[i].is_empty());
            prop_assert!(g.row(i).iter().all(|&v| v == 0.0));
        }
        // Re-validating the serialized document applies every structural check.
        prop_assert!(parse_economy(serialize_economy(&c.economy).as_bytes()).is_ok());
    }

    #[test]
    fn influence_matrix_inverts(seed in any::<u64>(), fam in family()) {
        let e = economy(seed, fam);
        for (s, g) in e.goods().iter().enumerate() {
            let l = leontief_inverse(s, g).unwrap();
            let id = &l.m * (Mat::identity(e.n(), e.n()) + g.spillover());
            prop_assert!(max_abs(&(id - Mat::identity(e.n(), e.n()))) < 1e-10);
            prop_assert!(l.tilde_b.iter().all(|&b| b > 0.0));
        }
    }

    #[test]
    fn nilpotent_layer_matches_neumann_sum(seed in any::<u64>(), n in 2usize..7, phi in -2.0..2.0f64) {
        let mut rng = random::rng(seed);
        let g = Mat::from_fn(n, n, |i, j| if j > i { rng.random_range(0.0..1.0) } else { 0.0 });
        let layer = GoodLayer::new("s", 1.0, phi, g.clone(), ones(n));
        let m = leontief_inverse(0, &layer).unwrap().m;
        let step = &g * (-phi);
        let mut term = Mat::identity(n, n);
        let mut sum = Mat::identity(n, n);
        for _ in 1..n {
            term = &term * &step;
            sum += &term;
        }
        prop_assert!(max_abs(&(m - sum)) < 1e-10);
    }

    #[test]
    fn dissimilarity_ignores_positive_scale(seed in any::<u64>(), k in 1e-3..1e3f64) {
        let e = economy(seed, Family::Generic);
        let infl = influences(&e).unwrap();
        let (a, b) = (&infl[0].tilde_b, &infl[1].tilde_b);
        let d = cosine_dissimilarity(a, b);
        prop_assert!((cosine_dissimilarity(a, &(b * k)) - d).abs() < 1e-12);
        prop_assert!((cosine_dissimilarity(&(a * k), b) - d).abs() < 1e-12);
    }

    #[test]
    fn structured_layers_are_parallel(seed in any::<u64>()) {
        let e = economy(seed, Family::Regular);
        for l in influences(&e).unwrap() {
            prop_assert!(cosine_dissimilarity(&l.tilde_b, &ones(e.n())) < 1e-12);
        }
        let e = economy(seed, Family::IdenticalLayers);
        let infl = influences(&e).unwrap();
        for l in &infl[1..] {
            prop_assert_eq!(&l.tilde_b, &infl[0].tilde_b);
        }
    }

    #[test]
    fn equilibrium_identities(seed in any::<u64>()) {
        let e = interior(seed);
        let solved = solve(&e).unwrap();
        let sys = &solved.system;
        prop_assert!((ones(e.n()).transpose() * &sys.mbar).amax() < 1e-12);
        let sol = &solved.solution;
        let mu = &sol.mu;
        for s in 0..e.num_goods() {
            for i in 0..e.n() {
                for j in 0..e.n() {
                    let lhs = sol.effective[(s, i)] / sol.effective[(s, j)];
                    prop_assert!((lhs / (mu[i] / mu[j]) - 1.0).abs() < 1e-10);
                }
            }
        }
        for i in 0..e.n() {
            let du = sol.utilities[i] - sol.utilities[0];
            prop_assert!((du - (mu[i] / mu[0]).ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_mu_scales_prices(seed in any::<u64>(), kappa in 0.01..100.0f64) {
        let e = interior(seed);
        let (mu, _) = solve_effective_endowment(&e).unwrap();
        let infl = influences(&e).unwrap();
        for (g, l) in e.goods().iter().zip(&infl) {
            let base = katz_centralities(l, &mu);
            let scaled = katz_centralities(l, &(&mu * kappa));
            let p = g.alpha() * base.aggregate / g.aggregate();
            let pk = g.alpha() * scaled.aggregate / g.aggregate();
            prop_assert!((pk / p - kappa).abs() < 1e-12 * kappa);
            let x = &base.b / base.aggregate;
            let xk = &scaled.b / scaled.aggregate;
            prop_assert!((x - xk).amax() < 1e-14);
        }
    }

    #[test]
    fn no_spillover_prices(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let e = random_economy(&mut rng, Family::NoSpillover, 6, 4);
        let c = solve_equilibrium(&e).unwrap();
        let a = e.alphas();
        for s in 0..e.num_goods() {
            let expect = (a[s] / a[0]) * (e.good(0).aggregate() / e.good(s).aggregate());
            prop_assert!((c.prices[s] - expect).abs() < 1e-12 * expect);
        }
        let moved = random_redistribution(&mut rng, &e).apply(&e, 0.05).unwrap();
        let c2 = solve_equilibrium(&moved).unwrap();
        prop_assert!((&c.prices - &c2.prices).amax() < 1e-12);
    }

    #[test]
    fn compare_with_first_closed_form(
        seed in any::<u64>(),
        n in 3usize..7,
        intensity in 0.01..0.5f64,
        sigma in 0.2..0.8f64,
        linear in any::<bool>(),
    ) {
        let eta = weights(seed, n);
        let neighbors: Vec<Vec<usize>> = (0..n).map(|i| if i == 0 { vec![] } else { vec![0] }).collect();
        let private = GoodLayer::new("private", sigma, 0.0, Mat::zeros(n, n), &eta * 1.3);
        let mode = if linear { ComparisonMode::Linear } else { ComparisonMode::Average };
        let c = build_comparison_economy(&neighbors, intensity, mode, private, &eta * 0.7).unwrap();
        let g = c.economy.good(1).network();
        let mu = match solve_effective_endowment(&c.economy) {
            Ok((mu, _)) => mu,
            Err(Error::NonPositiveMu { .. }) => return Ok(()),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let expect = (Mat::identity(n, n) - g * (intensity * (1.0 - sigma))) * &eta;
        prop_assert!(cosine_dissimilarity(&mu, &expect) < 1e-12);
    }

    #[test]
    fn pareto_allocation_properties(seed in any::<u64>(), wseed in any::<u64>()) {
        let e = interior(seed);
        let theta = weights(wseed, e.n());
        match pareto_allocation(&e, &theta) {
            Ok(p) => {
                for (s, g) in e.goods().iter().enumerate() {
                    prop_assert!((p.allocation.row(s).sum() - g.aggregate()).abs() < 1e-12);
                }
                prop_assert!(planner_kkt_residual(&e, &theta, &p.allocation) <= 1e-9);
            }
            Err(Error::NonInteriorPareto(_)) => {}
            Err(err) => prop_assert!(false, "{}", err),
        }
    }

    #[test]
    fn loss_is_nonnegative_and_convex(seed in any::<u64>(), w1 in any::<u64>(), w2 in any::<u64>(), t in 0.0..1.0f64) {
        let e = interior(seed);
        let a = weights(w1, e.n());
        let b = weights(w2, e.n()) * 2.5;
        let la = efficiency_loss(&e, &a).unwrap();
        let lb = efficiency_loss(&e, &b).unwrap();
        let mid = efficiency_loss(&e, &(&a * t + &b * (1.0 - t))).unwrap();
        prop_assert!(la >= -1e-15 && lb >= -1e-15);
        prop_assert!(mid <= t * la + (1.0 - t) * lb + 1e-12);
    }

    #[test]
    fn cru_one_iff_parallel(seed in any::<u64>()) {
        let e = interior(seed);
        let parallel = check_parallel(&e).unwrap().parallel;
        let cru = resource_utilization(&e).unwrap().cru;
        prop_assert_eq!(parallel, (cru - 1.0).abs() <= 1e-9);
        prop_assert!(cru <= 1.0 + 1e-12);
    }

    #[test]
    fn improvement_dominates(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let e = random_interior_economy(&mut rng, Family::Generic, 6, 4);
        let comp = solve_equilibrium(&e).unwrap();
        let imp = match construct_improvement(&e) {
            Ok(imp) => imp,
            Err(Error::ParallelNoImprovement) => {
                prop_assert!(check_parallel(&e).unwrap().parallel);
                return Ok(());
            }
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let u = mpxeq::equilibrium::utilities_of(&e, &imp.allocation);
        for i in 0..e.n() {
            prop_assert!(u[i] > comp.utilities[i]);
        }
        for (s, g) in e.goods().iter().enumerate() {
            prop_assert!((imp.allocation.row(s).sum() - g.aggregate()).abs() < 1e-12);
            prop_assert!(imp.allocation.row(s).iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn redistribution_effects(seed in any::<u64>(), z in -10.0..10.0f64) {
        let mut rng = random::rng(seed);
        let family = Family::draw(&mut rng);
        let e = random_interior_economy(&mut rng, family, 6, 4);
        let p = random_redistribution(&mut rng, &e);
        let r = perturb(&e, &p).unwrap();
        let varpi = no_improvement_weight(&e).unwrap();
        prop_assert!(varpi.dot(&r.welfare).abs() < 1e-9);
        prop_assert!(r.price_aggregate.amax() < 1e-14 && r.welfare_aggregate.abs() < 1e-14);
        for i in 0..e.n() {
            let du = r.welfare[i] - r.welfare[0];
            prop_assert!((du - (r.welfare_income[i] - r.welfare_income[0])).abs() < 1e-12);
        }
        let shifted = perturb_with_mu_dot(&e, &p, &(&r.mu_dot + &r.mu * z)).unwrap();
        let scale = 1.0 + r.welfare.amax() + r.consumption.amax();
        prop_assert!((&shifted.price - &r.price).amax() < 1e-12 * scale);
        prop_assert!((&shifted.welfare - &r.welfare).amax() < 1e-12 * scale);
        prop_assert!((&shifted.consumption - &r.consumption).amax() < 1e-12 * scale);
    }

    #[test]
    fn lindahl_properties(seed in any::<u64>()) {
        let e = interior(seed);
        let l = match solve_lindahl(&e) {
            Ok(l) => l,
            Err(Error::NonInteriorLindahl(_)) => return Ok(()),
            Err(err) => return Err(TestCaseError::fail(err.to_string())),
        };
        let a = e.alphas();
        for s in 0..e.num_goods() {
            let expect = (a[s] / a[0]) * (e.good(0).aggregate() / e.good(s).aggregate());
            prop_assert!((l.goods_prices[s] / l.goods_prices[0] - expect).abs() < 1e-12 * expect);
            let g = e.good(s);
            for i in 0..e.n() {
                for j in 0..e.n() {
                    if i == j {
                        continue;
                    }
                    let p = l.price_tensor[s][(i, j)];
                    if g.network()[(i, j)] > 0.0 && g.phi() != 0.0 {
                        prop_assert_eq!(p.signum(), g.phi().signum());
                    } else {
                        prop_assert!(p == 0.0);
                    }
                }
            }
        }
        prop_assert!(planner_kkt_residual(&e, &l.gamma, &l.allocation) < 1e-10);
        prop_assert!(l.residuals.budget < 1e-12 && l.residuals.market_clearing < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn numeric_planner_bounded_by_closed_form(seed in any::<u64>(), wseed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let e = random_interior_economy(&mut rng, Family::Generic, 4, 3);
        let theta = weights(wseed, e.n());
        if let Ok(p) = pareto_allocation(&e, &theta) {
            let closed = theta.dot(&p.utilities);
            let numeric = numeric_planner(&e, &theta).unwrap().value;
            prop_assert!(numeric <= closed + 1e-6);
            prop_assert!((numeric - closed).abs() < 1e-6);
        }
    }

    #[test]
    fn selection_independent_for_every_kind(seed in any::<u64>(), z in -5.0..5.0f64) {
        let mut rng = random::rng(seed);
        let e = random_interior_economy(&mut rng, Family::Generic, 6, 4);
        for kind in random::KINDS {
            let p = random::random_perturbation(&mut rng, &e, kind);
            let r = perturb(&e, &p).unwrap();
            let s = perturb_with_mu_dot(&e, &p, &(&r.mu_dot + &r.mu * z)).unwrap();
            let scale = 1.0 + r.welfare.amax() + r.consumption.amax();
            prop_assert!((&s.welfare - &r.welfare).amax() < 1e-12 * scale);
            prop_assert!((&s.price - &r.price).amax() < 1e-12 * scale);
        }
    }
}

#[test]
fn perturbation_kinds_reject_bad_payloads() {
    let e = mpxeq::fixtures::example_v(0.5);
    let bad = Perturbation::Preference(Vector::from_vec(vec![0.1, 0.1, 0.1]));
    assert!(perturb(&e, &bad).is_err());
    let mut gamma = vec![Mat::zeros(4, 4); 3];
    gamma[1][(2, 2)] = 1.0;
    assert!(perturb(&e, &Perturbation::Network(gamma)).is_err());
    assert!(matches!(
        perturb(&e, &Perturbation::Phi(Vector::zeros(2))),
        Err(Error::DimensionMismatch(_))
    ));
}
