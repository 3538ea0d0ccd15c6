//! One function per subcommand: load inputs, run the core pipeline stage,
//! serialize artifacts, write the manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use clap::{Args, ValueEnum};
use ndarray::Array2;

use assetnet::correlation::{
    pearson, spearman, to_distance, weighted_corr, WeightScheme,
};
use assetnet::econnet::{
    aggregate_network, granger_network, robust_pair_network, DEFAULT_NU,
};
use assetnet::filtergraph::{
    cut_dendrogram, cluster_composition, dbht, hierarchical, mst, pmfg, FilteredGraph, Linkage,
};
use assetnet::panel::{acf, ccdf, log_returns, AssetLabel, MissingPolicy, PricePanel, ReturnsPanel};
use assetnet::spectrum::{eigensystem, mp_bounds, mp_ks_distance, outside_mp};
use assetnet::spillover::{
    connectedness, gfevd, rolling_spillover, spillover_network, var_fit, DiagonalMode,
};
use assetnet::volatility::{dcc_fit, degarch, garch_fit, GarchSpec};

use crate::manifest::write_manifest;
use crate::{init_threads, CliError, CliResult, Common};

// ---------------------------------------------------------------- loading

fn parse_returns_csv(path: &Path) -> Result<ReturnsPanel, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Validation(e.to_string()))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Validation(e.to_string()))?
        .clone();
    if headers.len() < 2 {
        return Err(CliError::Validation(
            "returns CSV needs a date column plus assets".into(),
        ));
    }
    let assets: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let n = assets.len();
    let mut timestamps = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Validation(e.to_string()))?;
        if rec.len() != n + 1 {
            return Err(CliError::Validation(format!(
                "row {} has {} fields, expected {}",
                timestamps.len() + 2,
                rec.len(),
                n + 1
            )));
        }
        timestamps.push(rec[0].to_string());
        let mut row = Vec::with_capacity(n);
        for field in rec.iter().skip(1) {
            row.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Validation(e.to_string()))?,
            );
        }
        rows.push(row);
    }
    let t = timestamps.len();
    let mut returns = Array2::zeros((n, t));
    for (j, row) in rows.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            returns[[i, j]] = v;
        }
    }
    Ok(ReturnsPanel {
        assets,
        timestamps,
        returns,
        labels: None,
    })
}

fn load_labels(path: &Path) -> Result<BTreeMap<String, AssetLabel>, CliError> {
    let mut dummy = PricePanel::new(
        vec!["X".into()],
        vec!["t0".into()],
        Array2::from_elem((1, 1), 1.0),
        None,
    )?;
    let file = File::open(path).map_err(|e| CliError::Validation(e.to_string()))?;
    dummy.labels_from_csv(file)?;
    Ok(dummy.labels.unwrap())
}

/// Reads the panel per the common flags and returns it with its labels.
fn load_panel(common: &Common) -> Result<ReturnsPanel, CliError> {
    let mut panel = if common.returns {
        parse_returns_csv(&common.input)?
    } else {
        let file = File::open(&common.input)
            .map_err(|e| CliError::Validation(format!("{}: {e}", common.input.display())))?;
        let prices = PricePanel::from_csv(file, MissingPolicy::Reject)?;
        log_returns(&prices)?
    };
    if let Some(path) = &common.labels {
        panel.labels = Some(load_labels(path)?);
    }
    Ok(panel)
}

fn finish(common: &Common, command: &str, config: serde_json::Value) -> CliResult {
    let mut inputs = vec![&common.input];
    if let Some(labels) = &common.labels {
        inputs.push(labels);
    }
    write_manifest(&common.out, command, config, common.seed, &inputs)
}

fn out_file(common: &Common, name: &str) -> Result<File, CliError> {
    std::fs::create_dir_all(&common.out)?;
    Ok(File::create(common.out.join(name))?)
}

fn write_json(common: &Common, name: &str, value: &serde_json::Value) -> CliResult {
    std::fs::create_dir_all(&common.out)?;
    std::fs::write(
        common.out.join(name),
        format!("{}\n", serde_json::to_string_pretty(value).unwrap()),
    )?;
    Ok(())
}

fn write_graph(common: &Common, stem: &str, graph: &FilteredGraph) -> CliResult {
    graph.to_csv(out_file(common, &format!("{stem}.csv"))?)?;
    std::fs::write(common.out.join(format!("{stem}.dot")), graph.to_dot())?;
    Ok(())
}

fn write_series_table(
    common: &Common,
    name: &str,
    timestamps: &[String],
    assets: &[String],
    rows: impl Fn(usize, usize) -> f64,
) -> CliResult {
    let mut wtr = csv::Writer::from_writer(out_file(common, name)?);
    let mut header = vec!["date".to_string()];
    header.extend(assets.iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (t, ts) in timestamps.iter().enumerate() {
        let mut rec = vec![ts.clone()];
        for i in 0..assets.len() {
            rec.push(format!("{:.12e}", rows(i, t)));
        }
        wtr.write_record(&rec)
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- returns

#[derive(Args, Debug)]
pub struct ReturnsArgs {
    #[command(flatten)]
    common: Common,
    /// largest autocorrelation lag in the plot data
    #[arg(long, default_value_t = 20)]
    max_lag: usize,
}

pub fn run_returns(args: ReturnsArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    write_series_table(
        &args.common,
        "returns.csv",
        &panel.timestamps,
        &panel.assets,
        |i, t| panel.returns[[i, t]],
    )?;

    // autocorrelation of absolute returns per asset (long-memory plot data)
    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "acf.csv")?);
    wtr.write_record(["asset", "lag", "acf_abs"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (i, asset) in panel.assets.iter().enumerate() {
        let abs: Vec<f64> = panel.returns.row(i).iter().map(|v| v.abs()).collect();
        let rho = acf(&abs, args.max_lag.min(abs.len() - 1))?;
        for (lag, &r) in rho.iter().enumerate() {
            wtr.write_record([asset.as_str(), &lag.to_string(), &format!("{r:.12e}")])
                .map_err(|e| CliError::Validation(e.to_string()))?;
        }
    }
    wtr.flush()?;

    // pooled absolute-return survival function (fat-tail plot data)
    let pooled: Vec<f64> = panel.returns.iter().map(|v| v.abs()).collect();
    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "ccdf.csv")?);
    wtr.write_record(["abs_return", "p_exceed"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (x, p) in ccdf(&pooled)? {
        wtr.write_record([format!("{x:.12e}"), format!("{p:.12e}")])
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;

    finish(
        &args.common,
        "returns",
        serde_json::json!({ "max_lag": args.max_lag }),
    )
}

// ---------------------------------------------------------------- corr

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CorrMethod {
    Pearson,
    Spearman,
    Weighted,
}

#[derive(Args, Debug)]
pub struct CorrArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = CorrMethod::Pearson)]
    method: CorrMethod,
    /// trailing window for the weighted estimator
    #[arg(long)]
    delta_t: Option<usize>,
    /// weight decay constant for the weighted estimator
    #[arg(long)]
    theta: Option<f64>,
}

pub fn run_corr(args: CorrArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let corr = match args.method {
        CorrMethod::Pearson => pearson(&panel)?,
        CorrMethod::Spearman => spearman(&panel)?,
        CorrMethod::Weighted => {
            let delta_t = args
                .delta_t
                .ok_or_else(|| CliError::Validation("weighted needs --delta-t".into()))?;
            let theta = args
                .theta
                .ok_or_else(|| CliError::Validation("weighted needs --theta".into()))?;
            weighted_corr(&panel, &WeightScheme::exponential(delta_t, theta)?)?
        }
    };
    corr.to_csv(out_file(&args.common, "corr.csv")?)?;
    finish(
        &args.common,
        "corr",
        serde_json::json!({
            "method": format!("{:?}", args.method),
            "delta_t": args.delta_t,
            "theta": args.theta,
        }),
    )
}

// ---------------------------------------------------------------- spectrum

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
}

pub fn run_spectrum(args: SpectrumArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let corr = pearson(&panel)?;
    let eigs = eigensystem(&corr)?;
    let spec = mp_bounds(panel.n_assets(), panel.n_obs(), 1.0)?;
    let partition = outside_mp(&eigs, &spec);
    let bulk: Vec<f64> = partition
        .bulk
        .iter()
        .map(|&k| eigs.eigenvalues[k])
        .collect();
    let ks = if bulk.is_empty() {
        f64::NAN
    } else {
        mp_ks_distance(&bulk, &spec)
    };

    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "eigenvalues.csv")?);
    wtr.write_record(["rank", "eigenvalue"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (k, &lambda) in eigs.eigenvalues.iter().enumerate() {
        wtr.write_record([k.to_string(), format!("{lambda:.12e}")])
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;
    write_json(
        &args.common,
        "mp.json",
        &serde_json::json!({
            "q": spec.q,
            "lambda_minus": spec.lambda_minus,
            "lambda_plus": spec.lambda_plus,
            "n_above": partition.above.len(),
            "n_bulk": partition.bulk.len(),
            "n_below": partition.below.len(),
            "ks_bulk": ks,
        }),
    )?;
    finish(&args.common, "spectrum", serde_json::json!({}))
}

// ---------------------------------------------------------------- graphs

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    common: Common,
}

fn distance_matrix(common: &Common) -> Result<assetnet::SquareDependencyMatrix, CliError> {
    let panel = load_panel(common)?;
    Ok(to_distance(&pearson(&panel)?)?)
}

pub fn run_mst(args: GraphArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let tree = mst(&distance_matrix(&args.common)?)?;
    write_graph(&args.common, "mst", &tree)?;
    finish(&args.common, "mst", serde_json::json!({}))
}

pub fn run_pmfg(args: GraphArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let graph = pmfg(&distance_matrix(&args.common)?)?;
    write_graph(&args.common, "pmfg", &graph)?;
    finish(&args.common, "pmfg", serde_json::json!({}))
}

fn write_clusters(
    common: &Common,
    name: &str,
    clustering: &assetnet::filtergraph::Clustering,
) -> CliResult {
    let mut wtr = csv::Writer::from_writer(out_file(common, name)?);
    wtr.write_record(["asset", "cluster"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (asset, cluster) in &clustering.assignment {
        wtr.write_record([asset.as_str(), &cluster.to_string()])
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn run_dbht(args: GraphArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let clustering = dbht(&to_distance(&pearson(&panel)?)?)?;
    write_clusters(&args.common, "clusters.csv", &clustering)?;
    if let Some(labels) = &panel.labels {
        let comp = cluster_composition(&clustering, labels)?;
        write_json(
            &args.common,
            "composition.json",
            &serde_json::to_value(&comp).unwrap(),
        )?;
    }
    finish(&args.common, "dbht", serde_json::json!({}))
}

// ---------------------------------------------------------------- cluster

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum LinkageArg {
    Single,
    Average,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = LinkageArg::Average)]
    linkage: LinkageArg,
    /// number of clusters for the dendrogram cut
    #[arg(long, default_value_t = 2)]
    k: usize,
}

pub fn run_cluster(args: ClusterArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let linkage = match args.linkage {
        LinkageArg::Single => Linkage::Single,
        LinkageArg::Average => Linkage::Average,
    };
    let dendrogram = hierarchical(&to_distance(&pearson(&panel)?)?, linkage)?;
    dendrogram.to_csv(out_file(&args.common, "dendrogram.csv")?)?;
    let clustering = cut_dendrogram(&dendrogram, args.k)?;
    write_clusters(&args.common, "clusters.csv", &clustering)?;
    finish(
        &args.common,
        "cluster",
        serde_json::json!({
            "linkage": format!("{:?}", args.linkage),
            "k": args.k,
        }),
    )
}

// ---------------------------------------------------------------- garch

#[derive(Args, Debug)]
pub struct GarchArgs {
    #[command(flatten)]
    common: Common,
    /// variance lags
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// shock lags
    #[arg(long, default_value_t = 1)]
    q: usize,
}

pub fn run_garch(args: GarchArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let spec = GarchSpec::new(args.p, args.q)?;
    use rayon::prelude::*;
    let rows: Vec<Vec<f64>> = (0..panel.n_assets())
        .map(|i| panel.returns.row(i).to_vec())
        .collect();
    let fits = rows
        .par_iter()
        .map(|row| garch_fit(row, spec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut fit_json = Vec::new();
    for (asset, fit) in panel.assets.iter().zip(&fits) {
        let mut v = fit.to_json();
        v["asset"] = serde_json::json!(asset);
        fit_json.push(v);
    }
    write_json(&args.common, "garch.json", &serde_json::json!(fit_json))?;
    write_series_table(
        &args.common,
        "h.csv",
        &panel.timestamps,
        &panel.assets,
        |i, t| fits[i].h[t],
    )?;
    let filtered: Vec<Vec<f64>> = rows
        .iter()
        .zip(&fits)
        .map(|(row, fit)| degarch(row, fit))
        .collect::<Result<_, _>>()?;
    write_series_table(
        &args.common,
        "filtered.csv",
        &panel.timestamps,
        &panel.assets,
        |i, t| filtered[i][t],
    )?;
    finish(
        &args.common,
        "garch",
        serde_json::json!({ "p": args.p, "q": args.q }),
    )?;
    if let Some(fit) = fits.iter().find(|f| !f.converged) {
        return Err(CliError::NonConvergence(format!(
            "variance fit did not converge (persistence {:.4}); artifacts written with flags",
            fit.persistence()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- dcc

#[derive(Args, Debug)]
pub struct DccArgs {
    #[command(flatten)]
    common: Common,
    /// trailing window for the averaged-correlation plot series
    #[arg(long, default_value_t = 10)]
    avg_window: usize,
}

pub fn run_dcc(args: DccArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let fit = dcc_fit(&panel)?;
    write_json(&args.common, "dcc.json", &fit.to_json())?;

    // mean off-diagonal conditional correlation, averaged over a trailing
    // window after the unit-diagonal normalization
    let n = panel.n_assets();
    let off_mean: Vec<f64> = fit
        .r_path
        .iter()
        .map(|r| {
            if n < 2 {
                return 0.0;
            }
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..i {
                    s += r[[i, j]];
                }
            }
            s / (n * (n - 1) / 2) as f64
        })
        .collect();
    let w = args.avg_window.max(1);
    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "rbar.csv")?);
    wtr.write_record(["date", "mean_corr", "mean_corr_smoothed"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (t, ts) in panel.timestamps.iter().enumerate() {
        let lo = (t + 1).saturating_sub(w);
        let smooth: f64 = off_mean[lo..=t].iter().sum::<f64>() / (t + 1 - lo) as f64;
        wtr.write_record([
            ts.clone(),
            format!("{:.12e}", off_mean[t]),
            format!("{smooth:.12e}"),
        ])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;
    finish(
        &args.common,
        "dcc",
        serde_json::json!({ "avg_window": args.avg_window }),
    )?;
    if !fit.converged {
        return Err(CliError::NonConvergence(format!(
            "correlation dynamics at the boundary (a + b = {:.4}); artifacts written with flags",
            fit.a + fit.b
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- granger

#[derive(Args, Debug)]
pub struct GrangerArgs {
    #[command(flatten)]
    common: Common,
    /// significance level for an edge
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

pub fn run_granger(args: GrangerArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let graph = granger_network(&panel, args.alpha)?;
    write_graph(&args.common, "granger", &graph)?;
    if let Some(labels) = &panel.labels {
        let agg = aggregate_network(&graph, labels)?;
        agg.to_csv(out_file(&args.common, "aggregated.csv")?)?;
    }
    finish(
        &args.common,
        "granger-net",
        serde_json::json!({ "alpha": args.alpha }),
    )
}

// ---------------------------------------------------------------- pair

#[derive(Args, Debug)]
pub struct PairArgs {
    #[command(flatten)]
    common: Common,
    /// p-value threshold for an edge
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// degrees of freedom of the robust error weights
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
}

pub fn run_pair(args: PairArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let net = robust_pair_network(&panel, args.gamma, args.nu)?;
    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "pairnet.csv")?);
    wtr.write_record(["source", "target", "weight", "p_value"])
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (e, p) in net.graph.edges.iter().zip(&net.p_values) {
        wtr.write_record([
            net.graph.nodes[e.i].clone(),
            net.graph.nodes[e.j].clone(),
            format!("{:.12e}", e.weight),
            format!("{p:.12e}"),
        ])
        .map_err(|er| CliError::Validation(er.to_string()))?;
    }
    wtr.flush()?;
    std::fs::write(args.common.out.join("pairnet.dot"), net.graph.to_dot())?;
    if let Some(labels) = &panel.labels {
        let agg = aggregate_network(&net.graph, labels)?;
        agg.to_csv(out_file(&args.common, "aggregated.csv")?)?;
    }
    finish(
        &args.common,
        "pair-net",
        serde_json::json!({ "gamma": args.gamma, "nu": args.nu }),
    )
}

// ---------------------------------------------------------------- spillover

#[derive(Args, Debug)]
pub struct SpilloverArgs {
    #[command(flatten)]
    common: Common,
    /// autoregressive lag order
    #[arg(long, default_value_t = 1)]
    var_lags: usize,
    /// forecast horizon
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    /// rolling window width (omit for full-sample only)
    #[arg(long)]
    window: Option<usize>,
    /// window advance
    #[arg(long, default_value_t = 1)]
    step: usize,
}

pub fn run_spillover(args: SpilloverArgs) -> CliResult {
    init_threads(args.common.threads)?;
    let panel = load_panel(&args.common)?;
    let fit = var_fit(&panel, args.var_lags)?;
    write_json(
        &args.common,
        "var.json",
        &serde_json::json!({
            "p": fit.p,
            "spectral_radius": fit.spectral_radius,
            "stable": fit.is_stable(),
        }),
    )?;
    if !fit.is_stable() {
        return Err(CliError::NonConvergence(format!(
            "full-sample fit unstable (spectral radius {:.4}); var.json written with flag",
            fit.spectral_radius
        )));
    }
    let fevd = gfevd(&fit, args.horizon)?;
    let mut wtr = csv::Writer::from_writer(out_file(&args.common, "fevd.csv")?);
    let mut header = vec!["asset".to_string()];
    header.extend(fevd.assets.iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for i in 0..fevd.n() {
        let mut rec = vec![fevd.assets[i].clone()];
        for j in 0..fevd.n() {
            rec.push(format!("{:.12e}", fevd.normalized[[i, j]]));
        }
        wtr.write_record(&rec)
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;

    let graph = spillover_network(&fevd, DiagonalMode::OwnShare);
    write_graph(&args.common, "spillover", &graph)?;
    let conn = connectedness(&fevd);
    write_json(
        &args.common,
        "connectedness.json",
        &serde_json::json!({
            "from": conn.from,
            "to": conn.to,
            "total": conn.total,
        }),
    )?;

    if let Some(window) = args.window {
        let series = rolling_spillover(&panel, args.var_lags, args.horizon, window, args.step)?;
        let mut wtr = csv::Writer::from_writer(out_file(&args.common, "rolling.csv")?);
        wtr.write_record(["date", "total"])
            .map_err(|e| CliError::Validation(e.to_string()))?;
        for w in &series {
            let value = match w.total {
                Some(v) => format!("{v:.12e}"),
                None => String::new(), // unstable window, flagged missing
            };
            wtr.write_record([w.timestamp.clone(), value])
                .map_err(|e| CliError::Validation(e.to_string()))?;
        }
        wtr.flush()?;
    }
    finish(
        &args.common,
        "spillover",
        serde_json::json!({
            "var_lags": args.var_lags,
            "horizon": args.horizon,
            "window": args.window,
            "step": args.step,
        }),
    )
}
