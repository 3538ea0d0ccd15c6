//! Seeded synthetic panels for the generators used across the test suite:
//! single-index, two-block correlation, conditional-variance dynamics, and
//! cross-lag (VAR) coupling.

use clap::{Args, ValueEnum};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::manifest::write_manifest;
use crate::{CliError, CliResult};

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Model {
    /// one market factor with per-asset loadings
    SingleIndex,
    /// two equal blocks: high within-block, low between-block correlation
    TwoBlock,
    /// independent GARCH(1,1) series, parameters (0.05, 0.10, 0.85) scaled
    Garch,
    /// ring-coupled VAR(1)
    Var,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// number of assets
    #[arg(long)]
    pub n: usize,
    /// number of price observations (returns are one shorter)
    #[arg(long)]
    pub t_len: usize,
    #[arg(long)]
    pub seed: u64,
    /// output directory (created if absent)
    #[arg(long)]
    pub out: std::path::PathBuf,
}

/// Returns (returns matrix, sector label per asset).
fn generate(model: Model, n: usize, t_len: usize, seed: u64) -> (Array2<f64>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.01; // daily-return magnitude
    match model {
        Model::SingleIndex => {
            let betas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
            let mut r = Array2::zeros((n, t_len));
            for t in 0..t_len {
                let m: f64 = StandardNormal.sample(&mut rng);
                for i in 0..n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    r[[i, t]] = scale * (betas[i] * m + 0.7 * e);
                }
            }
            (r, vec!["Index".to_string(); n])
        }
        Model::TwoBlock => {
            // corr = rho_b + (rho_w - rho_b) within a block = 0.7, else 0.1
            let (rho_w, rho_b) = (0.7_f64, 0.1_f64);
            let g_block = (rho_w - rho_b).sqrt();
            let g_common = rho_b.sqrt();
            let g_idio = (1.0 - rho_w).sqrt();
            let half = n / 2;
            let mut r = Array2::zeros((n, t_len));
            for t in 0..t_len {
                let common: f64 = StandardNormal.sample(&mut rng);
                let f1: f64 = StandardNormal.sample(&mut rng);
                let f2: f64 = StandardNormal.sample(&mut rng);
                for i in 0..n {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    let f = if i < half { f1 } else { f2 };
                    r[[i, t]] = scale * (g_common * common + g_block * f + g_idio * e);
                }
            }
            let labels = (0..n)
                .map(|i| if i < n / 2 { "BlockA" } else { "BlockB" }.to_string())
                .collect();
            (r, labels)
        }
        Model::Garch => {
            let mut r = Array2::zeros((n, t_len));
            for i in 0..n {
                let series = assetnet::volatility::garch_simulate(
                    0.05 * scale * scale,
                    &[0.10],
                    &[0.85],
                    t_len,
                    seed.wrapping_add(i as u64),
                )
                .expect("generator parameters are stationary");
                for t in 0..t_len {
                    r[[i, t]] = series[t];
                }
            }
            (r, vec!["Garch".to_string(); n])
        }
        Model::Var => {
            // x_i(t) = 0.3 x_i(t-1) + 0.2 x_{i-1}(t-1) + u_i(t)
            let mut r = Array2::zeros((n, t_len));
            let mut prev = vec![0.0; n];
            for t in 0..t_len + 200 {
                let mut x = vec![0.0; n];
                for i in 0..n {
                    let u: f64 = StandardNormal.sample(&mut rng);
                    let ring = prev[(i + n - 1) % n];
                    x[i] = 0.3 * prev[i] + 0.2 * ring + scale * u;
                }
                if t >= 200 {
                    for i in 0..n {
                        r[[i, t - 200]] = x[i];
                    }
                }
                prev = x;
            }
            (r, vec!["Var".to_string(); n])
        }
    }
}

/// Writes prices.csv (exp of cumulated returns from 100) and labels.csv.
pub fn run_synth(args: SynthArgs) -> CliResult {
    if args.n < 2 || args.t_len < 3 {
        return Err(CliError::Validation(
            "need --n >= 2 and --t-len >= 3".into(),
        ));
    }
    let (returns, sectors) = generate(args.model, args.n, args.t_len - 1, args.seed);
    std::fs::create_dir_all(&args.out)?;

    let assets: Vec<String> = (0..args.n).map(|i| format!("A{i:02}")).collect();
    let mut wtr = csv::Writer::from_path(args.out.join("prices.csv"))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut header = vec!["date".to_string()];
    header.extend(assets.iter().cloned());
    wtr.write_record(&header)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut log_price = vec![100.0_f64.ln(); args.n];
    for t in 0..args.t_len {
        let mut rec = vec![format!("t{t:06}")];
        for i in 0..args.n {
            if t > 0 {
                log_price[i] += returns[[i, t - 1]];
            }
            rec.push(format!("{:.12e}", log_price[i].exp()));
        }
        wtr.write_record(&rec)
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    wtr.flush()?;

    let mut lwtr = csv::Writer::from_path(args.out.join("labels.csv"))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (asset, sector) in assets.iter().zip(&sectors) {
        lwtr.write_record([asset.as_str(), sector.as_str(), "SYN"])
            .map_err(|e| CliError::Validation(e.to_string()))?;
    }
    lwtr.flush()?;

    write_manifest(
        &args.out,
        "synth",
        serde_json::json!({
            "model": format!("{:?}", args.model),
            "n": args.n,
            "t_len": args.t_len,
        }),
        args.seed,
        &[],
    )
}
