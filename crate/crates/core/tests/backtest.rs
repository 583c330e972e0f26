mod common;

use std::io::Write;

use rand::Rng;

use common::{buy_and_hold_wealth, random_returns, rng};
use fracpga::backtest::{
    compute_sharpe, compute_wealth, load_returns_csv, run_backtest, BacktestConfig, ReturnsUnit,
    Strategy,
};
use fracpga::{Error, ReturnsMatrix};

const STRATEGIES: [Strategy; 3] = [Strategy::SrmPga, Strategy::OneOverN, Strategy::Market];

fn constant_two_asset(periods: usize) -> ReturnsMatrix {
    ReturnsMatrix::from_rows(&vec![vec![0.01, 0.0]; periods]).unwrap()
}

#[test]
fn market_matches_buy_and_hold() {
    let mut r = rng(41);
    for _ in 0..20 {
        let (t, n) = (r.gen_range(5..80), r.gen_range(1..12));
        let returns = random_returns(&mut r, t, n);
        let report = run_backtest(
            &returns,
            &BacktestConfig::new(Strategy::Market).with_window(4),
        )
        .unwrap();
        let oracle = buy_and_hold_wealth(&returns);
        assert!(
            (report.final_wealth - oracle).abs() <= 1e-10,
            "{} vs {oracle}",
            report.final_wealth
        );
    }
}

#[test]
fn report_invariants_hold_for_every_strategy() {
    let mut r = rng(42);
    for _ in 0..5 {
        let (t, n, window) = (r.gen_range(12..40), r.gen_range(2..8), r.gen_range(2..10));
        let returns = random_returns(&mut r, t, n);
        for strategy in STRATEGIES {
            let cfg = BacktestConfig::new(strategy).with_window(window);
            let report = run_backtest(&returns, &cfg).unwrap();
            assert_eq!(report.periods(), t);
            assert_eq!(
                report.sharpe,
                Some(compute_sharpe(&report.realized_returns).unwrap())
            );
            let (final_wealth, path) = compute_wealth(&report.realized_returns).unwrap();
            assert_eq!(report.final_wealth, final_wealth);
            assert_eq!(report.wealth_path, path);
            let mut running = 1.0;
            for (k, ret) in report.realized_returns.iter().enumerate() {
                running *= 1.0 + ret;
                assert!((report.wealth_path[k] - running).abs() <= 1e-12 * running);
                assert!(report.wealth_path[k] > 0.0);
            }
            for (k, w) in report.weights_history.iter().enumerate() {
                assert!((w.as_vector().sum() - 1.0).abs() <= 1e-10);
                assert!(w.as_slice().iter().all(|&x| x >= 0.0));
                let gross: f64 = w
                    .as_slice()
                    .iter()
                    .zip(returns.row(k))
                    .map(|(w, r)| w * (1.0 + r))
                    .sum();
                assert!((report.realized_returns[k] - (gross - 1.0)).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn warm_up_uses_equal_weights() {
    let mut r = rng(43);
    let returns = random_returns(&mut r, 30, 5);
    for strategy in [Strategy::SrmPga, Strategy::OneOverN] {
        let report =
            run_backtest(&returns, &BacktestConfig::new(strategy).with_window(10)).unwrap();
        for w in &report.weights_history[..10] {
            assert!(w.as_slice().iter().all(|&x| x == 0.2));
        }
    }
    // buy and hold starts from equal weights
    let market = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::Market).with_window(10),
    )
    .unwrap();
    assert!(market.weights_history[0]
        .as_slice()
        .iter()
        .all(|&x| x == 0.2));
}

#[test]
fn srm_windows_use_only_trailing_rows() {
    let mut r = rng(44);
    let returns = random_returns(&mut r, 25, 4);
    let window = 6;
    let report = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::SrmPga).with_window(window),
    )
    .unwrap();
    for t in window..25 {
        let history = returns.window(t - window, window).unwrap();
        let model = fracpga::SharpeModel::build(&history, 1e-4).unwrap();
        let expect = fracpga::srm_pga(&model, &Default::default())
            .unwrap()
            .weights;
        assert_eq!(report.weights_history[t], expect, "period {t}");
    }
    // later rows do not influence earlier decisions
    let mut rows: Vec<Vec<f64>> = (0..25).map(|t| returns.row(t).to_vec()).collect();
    rows[24] = vec![0.5, -0.5, 0.3, -0.3];
    let altered = ReturnsMatrix::from_rows(&rows).unwrap();
    let other = run_backtest(
        &altered,
        &BacktestConfig::new(Strategy::SrmPga).with_window(window),
    )
    .unwrap();
    assert_eq!(other.weights_history, report.weights_history);
}

#[test]
fn runs_are_deterministic() {
    let mut r = rng(45);
    let returns = random_returns(&mut r, 60, 10);
    for strategy in STRATEGIES {
        let cfg = BacktestConfig::new(strategy).with_window(12);
        let a = run_backtest(&returns, &cfg).unwrap();
        let b = run_backtest(&returns, &cfg).unwrap();
        assert_eq!(a, b);
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        a.write_json(&mut ja).unwrap();
        b.write_json(&mut jb).unwrap();
        assert_eq!(ja, jb);
    }
}

#[test]
fn identical_columns_make_market_equal_to_one_over_n() {
    let mut r = rng(46);
    let rows: Vec<Vec<f64>> = (0..30).map(|_| vec![r.gen_range(-0.05..0.05); 4]).collect();
    let returns = ReturnsMatrix::from_rows(&rows).unwrap();
    let m = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::Market).with_window(5),
    )
    .unwrap();
    let e = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::OneOverN).with_window(5),
    )
    .unwrap();
    for (a, b) in m.realized_returns.iter().zip(&e.realized_returns) {
        assert!((a - b).abs() <= 1e-14);
    }
}

#[test]
fn constant_returns_switch_to_the_best_asset_after_warm_up() {
    let returns = constant_two_asset(6);
    let report = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::SrmPga).with_window(3),
    )
    .unwrap();
    for t in 0..3 {
        assert!((report.realized_returns[t] - 0.005).abs() < 1e-15);
    }
    for t in 3..6 {
        let w = report.weights_history[t].as_slice();
        assert!((w[0] - 1.0).abs() < 1e-3 && w[1].abs() < 1e-3);
        assert!((report.realized_returns[t] - 0.01).abs() < 1e-5);
    }
    let expected = 1.005f64.powi(3) * 1.01f64.powi(3);
    assert!((report.final_wealth - expected).abs() < 1e-4);
}

#[test]
fn wipeouts_are_errors() {
    let returns =
        ReturnsMatrix::from_rows(&[vec![0.1, 0.1], vec![0.1, 0.1], vec![-2.0, -0.5]]).unwrap();
    for strategy in [Strategy::OneOverN, Strategy::Market] {
        let err =
            run_backtest(&returns, &BacktestConfig::new(strategy).with_window(2)).unwrap_err();
        assert!(matches!(err, Error::WealthWipeout { period: 2 }), "{err}");
    }
}

#[test]
fn csv_round_trip_through_the_engine() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "month,Small,Big").unwrap();
    for t in 0..8 {
        writeln!(
            file,
            "2000-{:02},{},{}",
            t + 1,
            1.0 + t as f64 * 0.1,
            -0.5 + t as f64 * 0.2
        )
        .unwrap();
    }
    file.flush().unwrap();
    let returns = load_returns_csv(file.path(), ReturnsUnit::Percent).unwrap();
    assert_eq!((returns.periods(), returns.assets()), (8, 2));
    assert_eq!(returns.period_labels().unwrap()[0], "2000-01");
    let report = run_backtest(
        &returns,
        &BacktestConfig::new(Strategy::OneOverN)
            .with_window(3)
            .with_unit(ReturnsUnit::Percent),
    )
    .unwrap();
    for t in 0..8 {
        let mean = (returns.row(t)[0] + returns.row(t)[1]) / 2.0;
        assert!((report.realized_returns[t] - mean).abs() < 1e-15);
    }
    let mut csv = Vec::new();
    report.write_periods_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1,2000-01,"));
}
