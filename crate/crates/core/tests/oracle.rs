mod common;

use maxtail::{gap_probability, Equilibrium, OrthoBasis, Potential, TailModel};

use common::{alternating_series, gue_kernel, gue_log_f};

fn quartic() -> Potential {
    Potential::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
}

#[test]
fn library_kernel_matches_hermite_kernel() {
    let basis = OrthoBasis::build(&Potential::gue(), 12).unwrap();
    for &(x, y) in &[(0.0, 0.0), (0.3, -1.1), (2.2, 2.4), (-1.9, 0.7)] {
        let k = basis.kernel(x, y);
        assert!((k - gue_kernel(12, x, y)).abs() < 1e-12, "{x} {y}");
    }
}

#[test]
fn quartic_small_n_series() {
    let v = quartic();
    for n in [2usize, 3] {
        let basis = OrthoBasis::build(&v, n).unwrap();
        for t in [0.5, 1.3] {
            let exact = gap_probability(&basis, t)
                .unwrap()
                .survival
                .value()
                .unwrap();
            let series = alternating_series(n, |x, y| basis.kernel(x, y), t, 3.0, 2);
            assert!(
                (exact - series).abs() < 1e-9,
                "N={n} t={t}: {exact} vs {series}"
            );
        }
    }
}

#[test]
fn quartic_ratio_decays() {
    let v = quartic();
    let eq = Equilibrium::solve(&v).unwrap();
    let t = eq.b() + 0.4;
    let errs: Vec<f64> = [10usize, 20, 40]
        .iter()
        .map(|&n| {
            let model = TailModel::new(eq.clone(), n, 0).unwrap();
            let basis = OrthoBasis::build(&v, n).unwrap();
            let gap = gap_probability(&basis, t).unwrap();
            (gap.log_survival - model.log_f_approx(t).unwrap())
                .exp_m1()
                .abs()
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    // roughly 1/N
    let rate = errs[0] / errs[2];
    assert!(rate > 2.5 && rate < 6.0, "{errs:?}");
}

#[test]
fn gue_model_matches_closed_form() {
    let eq = Equilibrium::solve(&Potential::gue()).unwrap();
    for n in [5usize, 50, 500] {
        let model = TailModel::new(eq.clone(), n, 0).unwrap();
        for t in [2.01, 2.5, 4.0, 9.0] {
            let lf = model.log_f_approx(t).unwrap();
            assert!((lf - gue_log_f(n, t)).abs() < 1e-9 * lf.abs().max(1.0));
        }
    }
}

#[test]
fn gap_probability_is_monotone_in_t() {
    let basis = OrthoBasis::build(&quartic(), 15).unwrap();
    let mut prev = f64::INFINITY;
    for i in 0..30 {
        let t = -1.0 + 0.1 * i as f64;
        let ls = gap_probability(&basis, t).unwrap().log_survival;
        assert!(ls <= prev + 1e-12, "t = {t}");
        prev = ls;
    }
}
