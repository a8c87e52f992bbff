mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use swipt_relay::conic::{solve, ConicProgram, LinExpr, DEFAULT_TOL};
use swipt_relay::linalg::{complex_gaussian_mat, complex_gaussian_vec, CMat, CVec, C64};
use swipt_relay::model::{
    permutation_matrix, sinr, to_linear_config, total_power, verify_design, RawConfig, RelayWeight, Transceiver,
    VerifyMode, WhichChannel,
};
use swipt_relay::rng::stream;
use swipt_relay::sr::*;

fn perm_identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn random_point(k: usize, nt: usize, rng: &mut impl Rng) -> CccpPoint {
    CccpPoint {
        p: (0..k).map(|_| rng.gen_range(1.0..5.0)).collect(),
        q: (0..k).map(|_| rng.gen_range(1.0..5.0)).collect(),
        phi: rng.gen_range(0.1..2.0),
        f: (0..k).map(|_| complex_gaussian_vec(nt, rng)).collect(),
    }
}

/// Real coordinates of a point, with each complex entry as (re, im).
fn coords(r: &CccpPoint) -> Vec<f64> {
    let mut v = r.p.clone();
    v.extend(&r.q);
    v.push(r.phi);
    for f in &r.f {
        for c in f.iter() {
            v.push(c.re);
            v.push(c.im);
        }
    }
    v
}

fn from_coords(v: &[f64], k: usize, nt: usize) -> CccpPoint {
    let f = (0..k)
        .map(|j| CVec::from_iterator(nt, (0..nt).map(|i| C64::new(v[2 * k + 1 + 2 * (j * nt + i)], v[2 * k + 2 + 2 * (j * nt + i)]))))
        .collect();
    CccpPoint { p: v[..k].to_vec(), q: v[k..2 * k].to_vec(), phi: v[2 * k], f }
}

#[test]
fn linearization_is_exact_at_the_expansion_point() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 1);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    let mut rng = stream(11, 0);
    for _ in 0..20 {
        let r0 = random_point(3, 4, &mut rng);
        for k in 0..3 {
            let (x, z) = linearize(&r0, k, &lat);
            assert!(rel_err(x.eval(&r0, &r0), sinr_pieces(&r0, k, &lat).1) <= 1e-10);
            assert!(rel_err(z.eval(&r0, &r0), eh_pieces(&r0, k, &lat).1) <= 1e-10);
        }
    }
}

#[test]
fn linearization_matches_central_differences() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 2);
    let lat = Latent::new(0, &[1, 0, 3, 2], &ch, &cfg);
    let mut rng = stream(12, 0);
    let h = 1e-6;
    for _ in 0..10 {
        let r0 = random_point(3, 4, &mut rng);
        let base = coords(&r0);
        for k in 0..3 {
            let (x, z) = linearize(&r0, k, &lat);
            for (lin, piece) in [(&x, 1usize), (&z, 2)] {
                let eval = |v: &[f64]| {
                    let r = from_coords(v, 3, 4);
                    if piece == 1 { sinr_pieces(&r, k, &lat).1 } else { eh_pieces(&r, k, &lat).1 }
                };
                let slopes: Vec<(f64, f64)> = (0..base.len())
                    .map(|i| {
                        let (mut up, mut dn) = (base.clone(), base.clone());
                        up[i] += h;
                        dn[i] -= h;
                        let fd = (eval(&up) - eval(&dn)) / (2.0 * h);
                        let mut unit = base.clone();
                        unit[i] += 1.0;
                        (fd, lin.eval(&r0, &from_coords(&unit, 3, 4)) - lin.value)
                    })
                    .collect();
                let scale = slopes.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
                for (i, (fd, an)) in slopes.iter().enumerate() {
                    assert!((fd - an).abs() <= 1e-5 * scale, "coord {i}: fd {fd} vs {an}");
                }
            }
        }
    }
}

#[test]
fn linearization_underestimates_the_convex_pieces() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 3);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    let mut rng = stream(13, 0);
    let r0 = random_point(3, 4, &mut rng);
    for _ in 0..1000 {
        let r = random_point(3, 4, &mut rng);
        for k in 0..3 {
            let (x, z) = linearize(&r0, k, &lat);
            let (xv, zv) = (sinr_pieces(&r, k, &lat).1, eh_pieces(&r, k, &lat).1);
            assert!(x.eval(&r0, &r) <= xv + 1e-12 * xv.abs().max(1.0));
            assert!(z.eval(&r0, &r) <= zv + 1e-12 * zv.abs().max(1.0));
        }
    }
}

/// The convexified program solved with one epigraph per term, the splitting
/// pair as `(p - 1)(q - 1) >= 1` and hand-written Taylor terms.
fn direct_cccp_objective(r0: &CccpPoint, lat: &Latent<'_>, perm: &[usize]) -> f64 {
    let (ch, cfg) = (lat.channels, lat.cfg);
    let g = &ch.g;
    let (k_users, nt, nr) = (r0.f.len(), g.ncols(), g.nrows());
    let tg = permutation_matrix(perm) * g;
    let a: Vec<CVec> = ch.h_est.iter().map(|h| tg.adjoint() * h).collect();

    let mut p = ConicProgram::new();
    let pv = p.add_vars("p", k_users);
    let qv = p.add_vars("q", k_users);
    let phi = p.add_var("phi");
    let fre: Vec<Vec<usize>> = (0..k_users).map(|k| p.add_vars(&format!("re{k}"), nt)).collect();
    let fim: Vec<Vec<usize>> = (0..k_users).map(|k| p.add_vars(&format!("im{k}"), nt)).collect();
    // Re and Im of m^H f_j as expressions.
    let inner = |m: &CVec, j: usize| -> (LinExpr, LinExpr) {
        let (mut re, mut im) = (LinExpr::zero(), LinExpr::zero());
        for i in 0..nt {
            let c = m[i].conj();
            re.add_term(fre[j][i], c.re);
            re.add_term(fim[j][i], -c.im);
            im.add_term(fre[j][i], c.im);
            im.add_term(fim[j][i], c.re);
        }
        (re, im)
    };
    // `t >= ||xs||^2` written as a plain second-order cone.
    let square_epi = |p: &mut ConicProgram, t: LinExpr, lin: LinExpr, xs: Vec<LinExpr>| {
        let mut rows: Vec<LinExpr> = xs.into_iter().map(|x| x * 2.0).collect();
        rows.push(t.clone() - lin.clone());
        p.add_soc("epi", t + lin, rows);
    };

    let mut objective = LinExpr::zero();
    for k in 0..k_users {
        let (pk, qk) = (LinExpr::var(pv[k]) - 1.0, LinExpr::var(qv[k]) - 1.0);
        p.add_soc("ps", pk.clone() + qk.clone(), vec![LinExpr::constant(2.0), pk - qk]);
        let t = p.add_var("t");
        let xs: Vec<LinExpr> = (0..nt).flat_map(|i| [LinExpr::var(fre[k][i]), LinExpr::var(fim[k][i])]).collect();
        square_epi(&mut p, LinExpr::var(t), LinExpr::constant(1.0), xs);
        let s = p.add_var("s");
        let gx: Vec<LinExpr> = (0..nr)
            .flat_map(|r| {
                let row = g.row(r).adjoint();
                let (re, im) = inner(&row, k);
                [re, im]
            })
            .collect();
        square_epi(&mut p, LinExpr::var(s), LinExpr::var(phi), gx);
        objective = objective + LinExpr::var(t) + LinExpr::var(s);
    }
    let u = p.add_var("u");
    let c = cfg.relay_noise * nr as f64;
    p.add_soc("noise", LinExpr::var(u) + LinExpr::var(phi), vec![LinExpr::constant(2.0 * c.sqrt()), LinExpr::var(u) - LinExpr::var(phi)]);
    objective = objective + LinExpr::var(u);

    for k in 0..k_users {
        let om2 = cfg.circuit_noise[k];
        let s2 = cfg.antenna_noise[k];
        let gamma = cfg.sinr_target[k];
        let ceh = cfg.eh_target[k] / (4.0 * cfg.eh_efficiency[k]);
        let hn = ch.h_est[k].norm_squared();
        let own: Vec<C64> = r0.f.iter().map(|f| a[k].dotc(f)).collect();
        let dp = r0.p[k] - r0.phi;
        let dq = r0.q[k] - r0.phi;
        let dphi = LinExpr::var(phi) - r0.phi;

        // Taylor term 2 Re{c^* (m^H (f_j - f0_j))}.
        let taylor = |j: usize, c: C64| -> LinExpr {
            let (re, im) = inner(&a[k], j);
            (re - c.re) * (2.0 * c.re) + (im - c.im) * (2.0 * c.im)
        };
        let mut x_hat = LinExpr::constant(0.25 * om2 * dp * dp + own[k].norm_sqr() / gamma);
        x_hat.add_scaled(&(LinExpr::var(pv[k]) - r0.p[k] - dphi.clone()), 0.5 * om2 * dp);
        x_hat.add_scaled(&taylor(k, own[k]), 1.0 / gamma);

        let mut w_rhs = x_hat - LinExpr::term(phi, s2) - cfg.relay_noise * hn;
        for j in (0..k_users).filter(|&j| j != k) {
            let tj = p.add_var("interference");
            let (re, im) = inner(&a[k], j);
            square_epi(&mut p, LinExpr::var(tj), LinExpr::constant(1.0), vec![re, im]);
            w_rhs = w_rhs - LinExpr::var(tj);
        }
        let tc = p.add_var("circuit");
        square_epi(&mut p, LinExpr::var(tc), LinExpr::constant(1.0), vec![(LinExpr::var(pv[k]) + LinExpr::var(phi)) * (0.5 * om2.sqrt())]);
        p.add_nonneg("sinr", w_rhs - LinExpr::var(tc));

        let mut z_hat = LinExpr::constant(own.iter().map(|c| c.norm_sqr()).sum::<f64>() + ceh * dq * dq) + LinExpr::var(phi) * s2;
        for (j, c) in own.iter().enumerate() {
            z_hat.add_scaled(&taylor(j, *c), 1.0);
        }
        z_hat.add_scaled(&(LinExpr::var(qv[k]) - r0.q[k] - dphi.clone()), 2.0 * ceh * dq);
        let th = p.add_var("harvest");
        square_epi(&mut p, LinExpr::var(th), LinExpr::constant(1.0), vec![(LinExpr::var(qv[k]) + LinExpr::var(phi)) * ceh.sqrt()]);
        p.add_nonneg("eh", z_hat + cfg.relay_noise * hn - LinExpr::var(th));
    }
    p.set_objective(objective);
    let sol = solve(&p, DEFAULT_TOL).unwrap();
    assert!(sol.is_optimal());
    sol.objective
}

#[test]
fn cccp_step_matches_direct_formulation() {
    let raw = RawConfig { nt: 2, nr: 2, k: 2, ..RawConfig::default() };
    let cfg = to_linear_config(&raw).unwrap();
    let mut checked = 0;
    for seed in 0..6 {
        let ch = channels(&cfg, 0.0, seed);
        for perm in [vec![0, 1], vec![1, 0]] {
            let lat = Latent::new(0, &perm, &ch, &cfg);
            let Some((r0, _, _)) = initial_point(&lat, &CccpOptions::default()).unwrap() else { continue };
            let (r1, obj) = cccp_step(&r0, &lat).unwrap();
            let direct = direct_cccp_objective(&r0, &lat, &perm);
            assert!(rel_err(obj, direct) <= 1e-5, "seed {seed}: {obj} vs {direct}");
            assert!(rel_err(r1.power(&ch.g, &cfg), obj) <= 1e-5);
            checked += 1;
        }
    }
    assert!(checked >= 4);
}

#[test]
fn scalar_cccp_fixed_point_matches_grid() {
    let cfg = scalar_config();
    for seed in 0..5 {
        let ch = channels(&cfg, 0.0, seed);
        let opts = SrOptions { cccp: CccpOptions { delta: 1e-9, max_iter: 5000, ..CccpOptions::default() }, ..SrOptions::default() };
        let out = design_sr(&ch, &cfg, &Codebook::identity(1), false, false, &opts).unwrap();
        let oracle = scalar_oracle(&ch, &cfg);
        assert!(out.total_power >= oracle * (1.0 - 1e-4));
        assert!(rel_err(out.total_power, oracle) < 0.02, "seed {seed}: {} vs {oracle}", out.total_power);
    }
}

#[test]
fn cccp_latent_descends_and_is_feasible() {
    let cfg = desk_config();
    for seed in 0..3 {
        let ch = channels(&cfg, 0.0, seed);
        let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
        let out = design_latent_cccp(&lat, &CccpOptions::default()).unwrap();
        assert!(out.iterations <= 50);
        assert!(out.power_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6)), "{:?}", out.power_trace);
        let tx = out.transceiver.as_ref().unwrap();
        assert!(matches!(tx.relay, RelayWeight::ScaledPermutation { .. }));
        let report = verify_design(tx, &ch, &cfg, VerifyMode::Nominal).unwrap();
        assert!(report.all_constraints_met, "seed {seed}: slack {}", report.worst_slack);
        assert!(rel_err(out.total_power, *out.power_trace.last().unwrap()) < 1e-6);
    }
}

#[test]
fn sum_max_codebook_matches_brute_force() {
    let cfg = to_linear_config(&RawConfig { nr: 3, ..RawConfig::default() }).unwrap();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for seed in 0..5 {
        let ch = channels(&cfg, 0.0, seed);
        let h = CMat::from_fn(3, 3, |k, j| ch.h_est[k][j].conj());
        let score = |p: &[usize]| -> f64 {
            let m = &h * permutation_matrix(p) * &ch.g;
            let gram = &m * m.adjoint();
            gram.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum()
        };
        let mut ranked: Vec<(f64, usize)> = perms.iter().enumerate().map(|(i, p)| (score(p), i)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut expected: Vec<Vec<usize>> = ranked.iter().take(2).map(|&(_, i)| perms[i].to_vec()).collect();
        if !expected.contains(&vec![0, 1, 2]) {
            expected[1] = vec![0, 1, 2];
        }
        let cb = build_codebook(&ch.g, &ch.h_est, 2, CodebookMethod::SumMax).unwrap();
        assert_eq!(cb.permutations, expected, "seed {seed}");
    }
}

#[test]
fn select_latent_breaks_ties_by_index() {
    assert_eq!(select_latent(&[3.2, 1.1, 1.1, 5.0]), Some(1));
    assert_eq!(select_latent(&[f64::INFINITY, f64::NAN]), None);
    assert_eq!(select_latent(&[f64::INFINITY, 2.0, 1.0]), Some(2));
}

#[test]
fn stationary_subgradient_keeps_beta() {
    let state = SubgradientState::new(&SubgradientOptions::default());
    assert_eq!(state.next_beta(3.7, 0.0), 3.7);
    assert_eq!(state.next_beta(0.1, 10.0), state.epsilon);
}

#[test]
fn scaled_permutation_equals_materialised_matrix() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 4);
    let mut rng = stream(4, 1);
    let f: Vec<CVec> = (0..3).map(|_| complex_gaussian_vec(4, &mut rng)).collect();
    let relay = RelayWeight::ScaledPermutation { index: 2, perm: vec![2, 0, 3, 1], beta: 1.7 };
    let a = Transceiver { beamformers: f.clone(), relay: relay.clone(), ps_ratios: vec![0.4; 3] };
    let b = Transceiver { relay: RelayWeight::FullMatrix(relay.matrix()), ..a.clone() };
    assert_eq!(total_power(&a, &ch, &cfg).unwrap(), total_power(&b, &ch, &cfg).unwrap());
    for k in 0..3 {
        assert_eq!(sinr(k, &a, &ch, &cfg, WhichChannel::Estimated).unwrap(), sinr(k, &b, &ch, &cfg, WhichChannel::Estimated).unwrap());
    }
}

#[test]
fn identity_codebook_is_the_naive_scheme() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 5);
    let sr = design_sr(&ch, &cfg, &Codebook::identity(4), false, false, &SrOptions::default()).unwrap();
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    let single = design_latent_cccp(&lat, &CccpOptions::default()).unwrap();
    assert_eq!(sr.total_power, single.total_power);
    assert_eq!(sr.l_opt, Some(0));
}

#[test]
fn full_selection_dominates_every_latent() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 6);
    let cb = build_codebook(&ch.g, &ch.h_est, 8, CodebookMethod::SumMax).unwrap();
    let opts = SrOptions::default();
    let full = design_sr(&ch, &cfg, &cb, false, false, &opts).unwrap();
    let powers: Vec<f64> = (0..cb.len())
        .map(|l| design_latent_cccp(&Latent::new(l, &cb.permutations[l], &ch, &cfg), &opts.cccp).unwrap().total_power)
        .collect();
    assert!(powers.iter().all(|&p| full.total_power <= p));
    assert_eq!(full.l_opt, select_latent(&powers));
    let smaller = Codebook { permutations: cb.permutations[..4].to_vec(), scores: cb.scores[..4].to_vec(), ..cb.clone() };
    let fewer = design_sr(&ch, &cfg, &smaller, false, false, &opts).unwrap();
    assert!(full.total_power <= fewer.total_power);

    let simplified = design_sr(&ch, &cfg, &cb, false, true, &opts).unwrap();
    let tx = simplified.transceiver.as_ref().unwrap();
    assert!(verify_design(tx, &ch, &cfg, VerifyMode::Nominal).unwrap().all_constraints_met);
    assert!(simplified.total_power >= full.total_power * (1.0 - 1e-9));
}

#[test]
fn fixed_beta_duals_are_nonnegative() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.1, 0);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    for beta in [2.0, 6.0, 12.0] {
        let Ok(sol) = solve_fixed_beta_robust(beta, &lat) else { continue };
        assert!(sol.x_dual.iter().chain(&sol.y_dual).all(|&d| d >= -1e-8), "{:?} {:?}", sol.x_dual, sol.y_dual);
        assert!(sol.relaxation.lambda.iter().all(|&l| l >= -1e-8));
    }
}

#[test]
fn subgradient_matches_finite_difference_of_f() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.1, 0);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    for beta in [4.0, 8.0] {
        let h = 1e-3 * beta;
        let (Ok(mid), Ok(up), Ok(dn)) =
            (solve_fixed_beta_robust(beta, &lat), solve_fixed_beta_robust(beta + h, &lat), solve_fixed_beta_robust(beta - h, &lat))
        else {
            continue;
        };
        let fd = (up.objective - dn.objective) / (2.0 * h);
        let s = subgradient(&mid, &lat);
        assert!((s - fd).abs() <= 0.05 * fd.abs().max(1e-2), "beta {beta}: s {s} vs fd {fd}");
    }
}

#[test]
fn fixed_beta_objective_is_convex_in_beta() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.1, 0);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    let f = |b: f64| solve_fixed_beta_robust(b, &lat).ok().map(|s| s.objective);
    let mut violations = 0;
    let mut probes = 0;
    for (a, b) in [(3.0, 9.0), (5.0, 15.0), (8.0, 20.0), (2.5, 6.5)] {
        let (Some(fa), Some(fb), Some(fm)) = (f(a), f(b), f(0.5 * (a + b))) else { continue };
        probes += 1;
        if fm > 0.5 * (fa + fb) * (1.0 + 1e-6) {
            violations += 1;
            eprintln!("convexity probe violated on [{a}, {b}]: {fm} > {}", 0.5 * (fa + fb));
        }
    }
    assert!(probes >= 2);
    assert_eq!(violations, 0);
}

#[test]
fn subgradient_latent_is_robust_and_best_so_far() {
    let cfg = desk_config();
    let mut checked = 0;
    for seed in [0, 2] {
        let ch = channels(&cfg, 0.1, seed);
        let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
        let out = design_latent_subgradient(&lat, &SubgradientOptions::default()).unwrap();
        if !out.feasible() {
            continue;
        }
        checked += 1;
        assert!(out.power_trace.windows(2).all(|w| w[1] <= w[0]));
        let audit = out.recoveries[0];
        assert!(out.total_power >= audit.sdr_objective * (1.0 - 1e-5));
        let tx = out.transceiver.as_ref().unwrap();
        let report = verify_design(tx, &ch, &cfg, VerifyMode::Sampled { samples: 1000, seed }).unwrap();
        assert!(report.worst_slack >= -1e-3, "seed {seed}: slack {}", report.worst_slack);
    }
    assert!(checked >= 1);
}

#[test]
fn subgradient_at_zero_radius_is_no_cheaper_than_cccp() {
    let cfg = desk_config();
    let ch = channels(&cfg, 0.0, 1);
    let lat = Latent::new(0, &perm_identity(4), &ch, &cfg);
    let robust = design_latent_subgradient(&lat, &SubgradientOptions::default()).unwrap();
    let nominal = design_latent_cccp(&lat, &CccpOptions::default()).unwrap();
    assert!(robust.total_power >= nominal.total_power * (1.0 - 1e-3), "{} vs {}", robust.total_power, nominal.total_power);
}

#[test]
fn codebook_tie_break_and_caps() {
    let g = CMat::identity(2, 2);
    let h = vec![CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]), CVec::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])];
    let cb = build_codebook(&g, &h, 2, CodebookMethod::SumMax).unwrap();
    assert_eq!(cb.permutations, vec![vec![0, 1], vec![1, 0]]);
    assert!((cb.scores[0] - 2.0).abs() < 1e-12 && (cb.scores[1] - 2.0).abs() < 1e-12);
    let big = CMat::identity(9, 9);
    let hb: Vec<CVec> = (0..2).map(|i| CVec::from_fn(9, |j, _| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))).collect();
    assert!(build_codebook(&big, &hb, 4, CodebookMethod::SumMax).is_err());
    assert_eq!(build_codebook(&big, &hb, 4, CodebookMethod::Random { seed: 1 }).unwrap().len(), 4);
    let h3: Vec<CVec> = (0..2).map(|i| CVec::from_fn(3, |j, _| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))).collect();
    let ex = build_codebook(&CMat::identity(3, 3), &h3, 6, CodebookMethod::Exhaustive).unwrap();
    assert_eq!(ex.len(), 6);
    assert_eq!(ex.permutations[0], vec![0, 1, 2]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn codebooks_hold_distinct_permutations_with_identity(seed in any::<u64>(), b in 1usize..=24, method in 0u8..3) {
        let mut rng = stream(seed, 0);
        let g = complex_gaussian_mat(4, 3, &mut rng);
        let h: Vec<CVec> = (0..3).map(|_| complex_gaussian_vec(4, &mut rng)).collect();
        let method = match method { 0 => CodebookMethod::SumMax, 1 => CodebookMethod::MaxMin, _ => CodebookMethod::Random { seed } };
        let cb = build_codebook(&g, &h, b, method).unwrap();
        prop_assert_eq!(cb.len(), b);
        prop_assert!(cb.permutations.contains(&vec![0, 1, 2, 3]));
        for (i, p) in cb.permutations.iter().enumerate() {
            prop_assert!(swipt_relay::model::is_permutation(p));
            prop_assert!(!cb.permutations[..i].contains(p));
        }
    }

    #[test]
    fn select_latent_is_first_argmin(powers in proptest::collection::vec(0.0f64..10.0, 1..12)) {
        let l = select_latent(&powers).unwrap();
        let min = powers.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(powers[l], min);
        prop_assert!(powers[..l].iter().all(|&p| p > min));
    }

    #[test]
    fn taylor_identity_holds_at_random_points(seed in any::<u64>()) {
        let cfg = desk_config();
        let ch = channels(&cfg, 0.0, seed % 7);
        let lat = Latent::new(0, &[3, 1, 0, 2], &ch, &cfg);
        let r0 = random_point(3, 4, &mut stream(seed, 3));
        for k in 0..3 {
            let (x, z) = linearize(&r0, k, &lat);
            prop_assert!(rel_err(x.eval(&r0, &r0), sinr_pieces(&r0, k, &lat).1) <= 1e-10);
            prop_assert!(rel_err(z.eval(&r0, &r0), eh_pieces(&r0, k, &lat).1) <= 1e-10);
        }
    }
}
