use hyperkg::strichartz::*;
use hyperkg::Error;
use proptest::prelude::*;

const RES: f64 = 1.0 / 400.0;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// rows n = 3..6: gamma_1, gamma_2, gamma_conf, gamma_3, gamma_4
fn table() -> [(usize, [f64; 5]); 4] {
    [
        (3, [2.0, 2.0, 3.0, (11.0 + 73f64.sqrt()) / 6.0, 5.0]),
        (4, [7.0 / 4.0, 25.0 / 13.0, 7.0 / 3.0, 5.0 / 2.0, 3.0]),
        (5, [8.0 / 5.0, 9.0 / 5.0, 2.0, (6.0 + 21f64.sqrt()) / 5.0, 7.0 / 3.0]),
        (6, [3.0 / 2.0, 49.0 / 29.0, 9.0 / 5.0, 43.0 / 23.0, 2.0]),
    ]
}

#[test]
fn critical_power_table() {
    for (n, row) in table() {
        let p = critical_powers(n).unwrap();
        let got = [p.gamma1, p.gamma2, p.gamma_conf, p.gamma3.unwrap(), p.gamma4.unwrap()];
        for (g, w) in got.iter().zip(row) {
            assert!(close(*g, w, 1e-9), "n = {n}: {g} vs {w}");
        }
    }
}

#[test]
fn powers_ordered() {
    for n in 4..=10 {
        let p = critical_powers(n).unwrap();
        let (g3, g4) = (p.gamma3.unwrap(), p.gamma4.unwrap());
        assert!(p.gamma1 < p.gamma2 && p.gamma2 < p.gamma_conf && p.gamma_conf < g3 && g3 < g4, "n = {n}");
    }
    let p3 = critical_powers(3).unwrap();
    assert_eq!(p3.gamma1, p3.gamma2);
    assert!(critical_powers(2).unwrap().gamma4.is_none());
    assert!(critical_powers(1).is_err());
}

#[test]
fn strauss_exponent() {
    assert!(close(strauss_gamma0(3), 1.0 + 2f64.sqrt(), 1e-14));
    assert!(close(strauss_gamma0(2), (3.0 + 17f64.sqrt()) / 2.0, 1e-14));
    for n in 2..12 {
        assert!(strauss_gamma0(n + 1) < strauss_gamma0(n));
    }
    for n in 2..=10 {
        assert!(critical_powers(n).unwrap().gamma1 < strauss_gamma0(n), "n = {n}");
    }
}

#[test]
fn admissibility_examples() {
    for n in 2..=8 {
        assert!(is_admissible(n, 0.0, 0.5));
        assert!(!is_admissible(n, 0.25, 0.5));
        assert!(!is_admissible(n, 0.0, 0.25));
    }
    assert!(is_admissible(4, 0.5, 0.5 - 1.0 / 3.0));
    assert!(!is_admissible(4, 0.1, 0.1));
    assert!(!is_admissible(4, 0.6, 0.4));
    // the edge 1/p = (1/2)(1/2 - 1/q) is closed for n = 3, open for n = 2
    assert!(is_admissible(3, 0.2, 0.3));
    assert!(!is_admissible(2, 0.1, 0.3));
    assert!(is_admissible(2, 0.1 + 1e-6, 0.3));
}

#[test]
fn sigma_pq_examples() {
    assert!(close(sigma_pq(4, 0.0, 0.25).unwrap(), 1.0, 1e-15));
    assert!(close(sigma_pq(4, 0.5, 0.25).unwrap(), 5.0 / 8.0, 1e-15));
    assert_eq!(sigma_pq(5, 0.0, 0.5).unwrap(), 0.0);
    assert!(matches!(sigma_pq(3, 0.6, 0.25), Err(Error::Domain(_))));
    assert!(matches!(sigma_pq(3, 0.2, 0.0), Err(Error::Domain(_))));
}

#[test]
fn sobolev_embedding_examples() {
    assert!(sobolev_embeds(3, 1.0, 2.0, 1.0, 2.0));
    assert!(sobolev_embeds(3, 1.0, 2.0, 0.0, 6.0));
    assert!(!sobolev_embeds(3, 0.9, 2.0, 0.0, 6.0));
    assert!(!sobolev_embeds(3, 5.0, 6.0, 0.0, 2.0));
}

#[test]
fn curve_values() {
    for n in 3..=8 {
        let p = critical_powers(n).unwrap();
        let (s1, _, _) = regularity_curves(n, p.gamma1).unwrap();
        assert!(close(s1, 0.0, 1e-12), "n = {n}");
        let (s1, s2, _) = regularity_curves(n, p.gamma2).unwrap();
        assert!(close(s1, s2, 1e-9), "n = {n}");
        let (_, s2, s3) = regularity_curves(n, p.gamma_conf).unwrap();
        assert!(close(s2, s3, 1e-9), "n = {n}");
    }
    let (_, s2, s3) = regularity_curves(3, 3.0).unwrap();
    assert!(close(s2, 0.5, 1e-15) && close(s3, 0.5, 1e-15));
    for n in 3..=5 {
        let g4 = critical_powers(n).unwrap().gamma4.unwrap();
        assert!(close(regularity_curves(n, g4).unwrap().2, 1.0, 1e-12));
    }
    assert!(matches!(regularity_curves(3, 1.0), Err(Error::Pole { .. })));
    assert!(matches!(regularity_curves(3, 2.0 / 3.0), Err(Error::Pole { .. })));
}

#[test]
fn ladder_examples() {
    let r = min_regularity(3, 2.5).unwrap();
    assert_eq!(r.branch, Branch::Sigma2);
    assert!(close(r.sigma_min, 1.0 / 3.0, 1e-12));
    let r = min_regularity(3, 5.0).unwrap();
    assert_eq!(r.branch, Branch::Sigma3);
    assert!(close(r.sigma_min, 1.0, 1e-12));
    let r = min_regularity(4, 1.2).unwrap();
    assert_eq!(r.branch, Branch::NearOne);
    assert!(r.infimum_open && r.sigma_min == 0.0);
    assert!(matches!(min_regularity(3, 5.1), Err(Error::OutOfRange { .. })));
    assert!(matches!(min_regularity(3, 1.0), Err(Error::InvalidParam(_))));
}

#[test]
fn two_dimensional_ladder() {
    assert!(close(sigma1_tilde(3.0), 0.25, 1e-15));
    assert!(close(regularity_curves(2, 3.0).unwrap().1, 0.25, 1e-15));
    let left = min_regularity(2, 3.0).unwrap();
    let right = min_regularity(2, 3.0 + 1e-10).unwrap();
    assert_eq!((left.branch, right.branch), (Branch::Sigma1, Branch::Sigma2));
    assert!(close(left.sigma_min, right.sigma_min, 1e-9));
    assert!(left.infimum_open && !right.infimum_open);
    let r = min_regularity(2, 40.0).unwrap();
    assert_eq!(r.branch, Branch::Sigma3);
    assert!(r.infimum_open);
    assert!(close(min_regularity(2, 5.0 - 1e-10).unwrap().sigma_min, 0.5, 1e-9));
    assert!(close(min_regularity(2, 2.0).unwrap().sigma_min, 0.0, 1e-15));
    assert!(close(min_regularity(2, 2.0 + 1e-10).unwrap().sigma_min, 0.0, 1e-9));
}

#[test]
fn ladder_continuity() {
    let eps = 1e-11;
    for n in 3..=8 {
        let p = critical_powers(n).unwrap();
        for g in [p.gamma1, p.gamma2, p.gamma_conf, p.gamma3.unwrap()] {
            let a = min_regularity(n, g - eps).unwrap().sigma_min;
            let b = min_regularity(n, g + eps).unwrap().sigma_min;
            assert!(close(a, b, 1e-9), "n = {n}, gamma = {g}: {a} vs {b}");
        }
    }
}

// (n, gamma) pairs interior to every branch, oracle at resolution 1/400
const ND_PAIRS: [(usize, f64); 12] = [
    (3, 1.5),
    (3, 2.5),
    (3, 4.5),
    (4, 1.5),
    (4, 1.85),
    (4, 2.1),
    (4, 2.7),
    (5, 1.7),
    (6, 1.6),
    (6, 1.75),
    (6, 1.83),
    (6, 1.95),
];
const TWO_D_PAIRS: [f64; 4] = [1.5, 2.5, 4.0, 7.0];

#[test]
fn oracle_agrees_with_ladder() {
    let mut seen = std::collections::HashSet::new();
    for (n, g) in ND_PAIRS {
        let r = min_regularity_checked(n, g, RES).unwrap();
        seen.insert(format!("{:?}", r.branch));
        assert!(r.oracle_gap.unwrap() <= oracle_tolerance(n, RES), "n = {n}, gamma = {g}: {r:?}");
    }
    assert_eq!(seen.len(), 4);
    for g in TWO_D_PAIRS {
        let r = min_regularity_checked(2, g, RES).unwrap();
        assert!(r.oracle_gap.unwrap() <= oracle_tolerance(2, RES), "gamma = {g}: {r:?}");
    }
}

#[test]
fn oracle_near_one_is_small() {
    let (s, x) = oracle_min_sigma(4, 1.2, RES).unwrap();
    assert!(s < 0.02);
    assert!(conditions_small(4, 1.2, &x).all());
}

#[test]
fn oracle_errors() {
    assert!(matches!(oracle_min_sigma(3, 2.5, 0.3), Err(Error::InvalidParam(_))));
    assert!(matches!(oracle_min_sigma(3, 6.0, RES), Err(Error::OutOfRange { .. })));
}

#[test]
fn oracle_is_deterministic() {
    assert_eq!(oracle_min_sigma(5, 2.2, 1.0 / 100.0).unwrap(), oracle_min_sigma(5, 2.2, 1.0 / 100.0).unwrap());
}

#[test]
fn vertex_q1_incidence() {
    assert_eq!(vertex_q1(3, 3.0), (0.25, 0.25));
    let (a, b) = vertex_q1(5, 2.0);
    assert!(close(a, 1.0 / 3.0, 1e-15) && close(b, 1.0 / 3.0, 1e-15));
    for n in 3..=8 {
        for g in [1.1, 1.5, 2.0, 3.0] {
            let nf = n as f64;
            let (iq, iqt) = vertex_q1(n, g);
            let coef = 2.0 * nf / (nf - 1.0) * g - (nf + 1.0) / (nf - 1.0);
            assert!(close(iq + iqt, (nf - 1.0) / (nf + 1.0), 1e-12));
            assert!(close(g * iq + iqt, 1.0, 1e-12));
            assert!(close(coef * iq + iqt, (nf + 1.0) / (nf - 1.0), 1e-12));
        }
    }
}

#[test]
fn vertex_p2q2_incidence() {
    for n in 3..=8 {
        let nf = n as f64;
        let p = critical_powers(n).unwrap();
        let (g3, g4) = (p.gamma3.unwrap(), p.gamma4.unwrap());
        for k in 0..=20 {
            let g = p.gamma_conf + (g4 - p.gamma_conf) * k as f64 / 20.0;
            let (ip, iq) = vertex_p2q2(n, g);
            assert!(close(ip + (nf - 1.0) / 2.0 * iq, (nf - 1.0) / 4.0, 1e-12));
            assert!(close(ip + nf * iq, 2.0 / (g - 1.0), 1e-12));
            assert!(1.0 / ip < 2.0 * g, "n = {n}, gamma = {g}");
        }
        let s = 0.5 - 1.0 / (nf + 1.0);
        let (ip, iq) = vertex_p2q2(n, p.gamma_conf);
        assert!(close(ip, s, 1e-12) && close(iq, s, 1e-12));
        if n >= 6 {
            let (ip, iq) = vertex_p2q2(n, g3);
            assert!(close(ip, 0.5, 1e-12) && close(iq, 0.5 - 1.0 / (nf - 1.0), 1e-12));
        }
    }
}

#[test]
fn vertices_q2q3_incidence() {
    for n in 3..=8 {
        let nf = n as f64;
        let p = critical_powers(n).unwrap();
        let g4 = p.gamma4.unwrap();
        let edge_a = |g: f64, x: f64, y: f64| g * x + y - ((g + 1.0) / 2.0 - 2.0 / (nf - 1.0));
        let edge_di = |g: f64, x: f64, y: f64| g * x + y - 1.0;
        let edge_dii = |g: f64, x: f64, y: f64| g * x + (nf - 1.0) / (2.0 * nf) * y - ((nf + 3.0) / (4.0 * nf) + 2.0 / nf / (g - 1.0));
        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let g = p.gamma_conf + (g4 - p.gamma_conf) * k as f64 / 20.0;
            let (q2, qt2, q3, qt3) = vertices_q2q3(n, g);
            assert!(edge_a(g, q2, qt2).abs() < 1e-12 && edge_dii(g, q2, qt2).abs() < 1e-12, "n = {n}, gamma = {g}");
            assert!(edge_di(g, q3, qt3).abs() < 1e-12 && edge_dii(g, q3, qt3).abs() < 1e-12, "n = {n}, gamma = {g}");
            assert!(q2 < last);
            last = q2;
        }
        let s = 0.5 - 1.0 / (nf + 1.0);
        let (q2, qt2, q3, qt3) = vertices_q2q3(n, p.gamma_conf);
        for v in [q2, qt2, q3, qt3] {
            assert!(close(v, s, 1e-12), "n = {n}: {v} vs {s}");
        }
    }
    let (q2, _, _, _) = vertices_q2q3(3, 3.0);
    assert!(close(q2, 0.25, 1e-15));
}

#[test]
fn strichartz_index_point_is_tight() {
    for n in 4..=8 {
        let nf = n as f64;
        let g = critical_powers(n).unwrap().gamma_conf;
        let s = 0.5 - 1.0 / (nf + 1.0);
        let x = ExponentPoint::new(s, s, s, s);
        let c = conditions_small(n, g, &x);
        assert!(c.all(), "n = {n}: {c:?}");
        assert!(close(g * s + s, 1.0, 1e-12));
        // nudging 1/q~ down breaks (d.i), up breaks (d.ii)
        assert!(!conditions_small(n, g, &ExponentPoint { inv_qt: s - 1e-6, ..x }).d_i);
        assert!(!conditions_small(n, g, &ExponentPoint { inv_qt: s + 1e-6, ..x }).d_ii);
    }
}

#[test]
fn small_conditions_near_one() {
    let (n, g) = (5, 1.01);
    let h = 1e-3;
    let x = ExponentPoint::new(0.5 - h, 0.5 - h, 1.0 - g * (0.5 - h), 0.5 - h);
    assert!(conditions_small(n, g, &x).all());
    assert!(sigma_pq(n, x.inv_p, x.inv_q).unwrap() < 0.01);
    let bad = ExponentPoint { inv_pt: x.inv_pt + 0.1, ..x };
    assert!(!conditions_small(n, g, &bad).c);
}

#[test]
fn large_conditions_examples() {
    let (n, g) = (6, 2.0);
    let (ip, iq) = vertex_p2q2(n, g);
    let x = ExponentPoint::new(ip, iq, 1.0 - g * ip, 1.0 - g * iq);
    let c = conditions_large(n, g, &x);
    assert!(c.d_ii && c.d_i && c.c, "{c:?}");
    // past gamma_3 the vertex leaves the square: 1/p_2 = 5/7
    assert!(!c.a && close(ip, 5.0 / 7.0, 1e-12));
    assert!(close(ip + 6.0 * iq, 2.0 / (g - 1.0), 1e-12));
    assert!(!conditions_large(n, g, &ExponentPoint { inv_q: iq + 1e-6, ..x }).d_ii);
    // at gamma_4 the feasible set shrinks to the Keel-Tao corner
    let w = min_regularity(n, critical_powers(n).unwrap().gamma4.unwrap()).unwrap().witness;
    assert!(close(w.inv_p, 0.5, 1e-6) && close(w.inv_q, 0.25, 1e-6) && close(w.inv_qt, 0.5, 1e-6), "{w:?}");
    let eq = ExponentPoint::new(0.3, 1.0 / 3.0, 0.1, 0.3);
    assert!(!conditions_large(3, 3.0, &eq).e);
    assert!(!conditions_large(3, 3.0, &ExponentPoint::new(0.0, 0.0, 0.0, 0.0)).c);
}

#[test]
fn condition_e_is_slack_for_large_dimensions() {
    // n >= 6: gamma <= gamma_conf < 2 while admissibility forces q > 2
    for n in 6..=10 {
        let p = critical_powers(n).unwrap();
        assert!(p.gamma_conf < 2.0);
        for k in 1..=10 {
            let g = 1.0 + (p.gamma_conf - 1.0) * k as f64 / 10.0;
            for i in 0..=100 {
                for j in 0..=100 {
                    let x = ExponentPoint::new(0.5 * i as f64 / 100.0, 0.5 * j as f64 / 100.0, 0.3, 0.3);
                    let c = conditions_small(n, g, &x);
                    if c.a && !is_admissible(n, 0.0, x.inv_q) {
                        assert!(c.e, "n = {n}, gamma = {g}, {x:?}");
                    }
                }
            }
        }
    }
}

fn witness_sigma(n: usize, g: f64, x: &ExponentPoint) -> f64 {
    let nf = n as f64;
    if g <= critical_powers(n).unwrap().gamma_conf {
        (nf + 1.0) / 2.0 * (0.5 - x.inv_q)
    } else {
        nf * (0.5 - x.inv_q) - x.inv_p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_is_feasible_and_attains(n in 3usize..=8, u in 0.001f64..0.999) {
        let p = critical_powers(n).unwrap();
        let g = 1.0 + (p.gamma4.unwrap() - 1.0) * u;
        let r = min_regularity(n, g).unwrap();
        let x = r.witness;
        let feasible = if g <= p.gamma_conf { conditions_small(n, g, &x).all() } else { conditions_large(n, g, &x).all() };
        prop_assert!(feasible);
        let s = witness_sigma(n, g, &x);
        if r.infimum_open {
            prop_assert!(s > r.sigma_min && s < r.sigma_min + 0.01);
        } else {
            prop_assert!((s - r.sigma_min).abs() < 1e-9);
        }
        if g > p.gamma_conf {
            let c = conditions_large(n, g, &x);
            prop_assert!(c.firstcondition && c.secondcondition);
        }
    }

    #[test]
    fn sigma_pq_is_continuous_across_branch_line(n in 2usize..=8, iq in 0.01f64..0.49) {
        let edge = (n as f64 - 1.0) / 2.0 * (0.5 - iq);
        prop_assume!(edge + 1e-7 <= 0.5);
        let a = sigma_pq(n, edge - 1e-7, iq).unwrap();
        let b = sigma_pq(n, edge + 1e-7, iq).unwrap();
        prop_assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn admissible_points_use_first_branch(n in 2usize..=8, ip in 0.0f64..0.5, iq in 0.0f64..0.5) {
        if is_admissible(n, ip, iq) {
            let s = sigma_pq(n, ip, iq).unwrap();
            prop_assert!((s - (n as f64 + 1.0) / 2.0 * (0.5 - iq)).abs() < 1e-12);
        }
    }

    #[test]
    fn three_dimensional_region_is_inside_two_dimensional(ip in 0.0f64..0.5, iq in 0.0f64..0.5) {
        if is_admissible(3, ip, iq) {
            prop_assert!(is_admissible(2, ip, iq));
        }
    }
}
