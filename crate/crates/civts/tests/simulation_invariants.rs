//! Cross-layer simulation checks: every simulated dataset clears the
//! market and reproduces its structural disturbances, and the simulated
//! distribution respects the graph's separation statements.

mod common;

use civts::estimation::catalogue;
use civts::graph::{d_separated, NodeId, NodeSet};
use civts::scm::{
    build_model, observed_autocorrelation, paper_defaults, simulate, ModelKind, SimulationConfig,
};

// Partial correlation of x and y given a conditioning block, by demeaning
// and least squares on the conditioners.
fn partial_correlation(x: &[f64], y: &[f64], given: &[&[f64]]) -> f64 {
    let n = x.len();
    let k = given.len() + 1;
    let mut design = nalgebra::DMatrix::<f64>::zeros(n, k);
    for r in 0..n {
        design[(r, 0)] = 1.0;
        for (j, g) in given.iter().enumerate() {
            design[(r, j + 1)] = g[r];
        }
    }
    let resid = |v: &[f64]| -> nalgebra::DVector<f64> {
        let b = nalgebra::DVector::from_column_slice(v);
        let svd = design.clone().svd(true, true);
        let coef = svd.solve(&b, 1e-12).unwrap();
        &b - &design * coef
    };
    let rx = resid(x);
    let ry = resid(y);
    rx.dot(&ry) / (rx.norm() * ry.norm())
}

/// Demand autocorrelation rises with the structural coefficient.
#[test]
fn observed_autocorrelation_increases_with_structural_coefficient() {
    let mut acfs = Vec::new();
    for (i, beta_d1) in [0.1, 0.5, 0.9].iter().enumerate() {
        let mut avg = 0.0;
        for seed in 0..3u64 {
            let mut p = paper_defaults(ModelKind::Model1);
            p.beta_d1 = *beta_d1;
            civts::scm::apply_intercepts(ModelKind::Model1, &mut p, 60_000.0, 0.5);
            let (spec, _) = build_model(ModelKind::Model1, p).unwrap();
            let ds = simulate(&spec, &SimulationConfig::new(43_800, 500 + seed + i as u64 * 7))
                .unwrap()
                .data;
            avg += observed_autocorrelation(ds.column("D").unwrap(), 1).unwrap();
        }
        acfs.push(avg / 3.0);
    }
    assert!(acfs[0] > 0.0, "acf at 0.1: {}", acfs[0]);
    assert!(acfs[0] < acfs[1] && acfs[1] < acfs[2], "not increasing: {acfs:?}");
}

/// Graph-faithfulness smoke check on a long Model 1 run: the instrument is
/// relevant given its own past (nonzero partial correlation with demand),
/// while a d-separation implied by the graph shows up as a vanishing
/// partial correlation.
#[test]
fn simulated_distribution_respects_graph_separations() {
    let (spec, graph) = build_model(ModelKind::Model1, paper_defaults(ModelKind::Model1)).unwrap();
    let t = 100_000;
    let ds = simulate(&spec, &SimulationConfig::new(t, 600)).unwrap().data;
    let w = ds.column("W").unwrap();
    let d = ds.column("D").unwrap();

    // Instrument relevance: corr(W_t, D_t | W_{t-1}, W_{t-2}) is far from 0.
    let rows = t - 2;
    let w0: Vec<f64> = (2..t).map(|i| w[i]).collect();
    let d0: Vec<f64> = (2..t).map(|i| d[i]).collect();
    let w1: Vec<f64> = (2..t).map(|i| w[i - 1]).collect();
    let w2: Vec<f64> = (2..t).map(|i| w[i - 2]).collect();
    assert_eq!(w0.len(), rows);
    let relevance = partial_correlation(&w0, &d0, &[&w1, &w2]);
    assert!(relevance.abs() > 0.05, "instrument irrelevant: {relevance}");

    // Graph: W_t separated from D_{t-1} given W_{t-1}.
    let unrolled = graph.unroll(9).unwrap();
    let anchor = 4;
    let wi = unrolled.component_index("W").unwrap();
    let di = unrolled.component_index("D").unwrap();
    let a: NodeSet = [NodeId::new(anchor, wi)].into_iter().collect();
    let b: NodeSet = [NodeId::new(anchor - 1, di)].into_iter().collect();
    let s: NodeSet = [NodeId::new(anchor - 1, wi)].into_iter().collect();
    assert!(d_separated(&unrolled, &a, &b, &s).unwrap());

    // And the corresponding partial correlation is statistically null.
    let d_lag: Vec<f64> = (2..t).map(|i| d[i - 1]).collect();
    let implied_null = partial_correlation(&w0, &d_lag, &[&w1]);
    assert!(
        implied_null.abs() < 0.02,
        "d-separated pair correlates: {implied_null}"
    );
}

/// The rank-condition diagnostic stays healthy across catalogue rows on
/// simulated data.
#[test]
fn civ3_passes_across_catalogue_on_simulated_data() {
    let (spec_model, _) =
        build_model(ModelKind::Model1, paper_defaults(ModelKind::Model1)).unwrap();
    let ds = simulate(&spec_model, &SimulationConfig::new(20_000, 601)).unwrap().data;
    for label in civts::estimation::CATALOGUE_LABELS {
        let spec = catalogue(label, 3).unwrap();
        let report = civts::estimation::civ3_check(&ds, &spec, None).unwrap();
        assert!(report.pass, "{label}: sigma_min_scaled {}", report.sigma_min_scaled);
    }
}
