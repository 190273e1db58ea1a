use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use hnoma_core::analysis::{kkt_p4, kkt_p6, search_non_psd_witness, KktCertificate};
use hnoma_core::closed_form::{hybrid_noma_allocation, oma_allocation, oma_power};
use hnoma_core::model::total_power;
use hnoma_core::simulation::csv::{format_float, write_fig4, write_sweep, write_trace};
use hnoma_core::simulation::rng::substream;
use hnoma_core::simulation::{
    draw_ordered_channels, fig4_experiment, sweep_rate, sweep_snr, ChannelDistribution, SweepRecord,
};
use hnoma_core::solver::{joint_oracle, p3_objective, solve_p1};
use hnoma_core::{ChannelPair, PowerAllocation, RateTarget};
use serde_json::json;

use crate::{Command, Failure};

/// Largest accepted gap between closed-form and recomputed multipliers.
const MULTIPLIER_MATCH_TOL: f64 = 1e-10;

pub(crate) fn run(command: Command, seed: u64) -> Result<(), Failure> {
    match command {
        Command::Solve { h1, h2, rate, json } => solve(h1, h2, rate.resolve(1.0)?, json),
        Command::KktCheck { trials, rates } => kkt_check(trials, &parse_rates(&rates)?, seed),
        Command::OracleCheck {
            trials,
            grid_n,
            rates,
            tolerance,
        } => oracle_check(trials, grid_n, &parse_rates(&rates)?, tolerance, seed),
        Command::SweepSnr {
            rho_db,
            rate,
            trials,
            out,
        } => {
            let records = sweep_snr(&rho_db, rate.resolve(1.0)?, trials as usize, seed)?;
            print_sweep("rho", &records);
            write_csv(out.as_deref(), |w| write_sweep(w, &records))
        }
        Command::SweepRate {
            case,
            rates,
            trials,
            out,
        } => {
            let records = sweep_rate(&rates, case.into(), trials as usize, seed)?;
            print_sweep("rate", &records);
            write_csv(out.as_deref(), |w| write_sweep(w, &records))
        }
        Command::Fig4 {
            rate,
            realizations,
            grid_n,
            out,
            trace,
            trace_points,
        } => fig4(
            rate.resolve(3.0)?,
            realizations as usize,
            grid_n,
            out.as_deref(),
            trace.as_deref(),
            trace_points as usize,
            seed,
        ),
        Command::HessianScan { draws, threshold } => hessian_scan(draws as usize, threshold, seed),
    }
}

fn parse_rates(rates: &[f64]) -> Result<Vec<RateTarget>, Failure> {
    if rates.is_empty() {
        return Err(Failure::Usage("at least one rate is required".into()));
    }
    Ok(rates
        .iter()
        .map(|&r| RateTarget::new(r))
        .collect::<Result<_, _>>()?)
}

fn write_csv<F>(path: Option<&Path>, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let Some(path) = path else {
        return Ok(());
    };
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn alloc_row(name: &str, a: &PowerAllocation) -> String {
    format!(
        "{name:<8} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
        a.p11,
        a.p12,
        a.p21,
        a.p22,
        total_power(a)
    )
}

fn verdict(cert: &KktCertificate) -> String {
    let multipliers: Vec<String> = cert
        .multipliers
        .iter()
        .map(|m| format!("{} = {:.6}", m.name, m.value))
        .collect();
    format!(
        "{} (stationarity {:.1e}, slackness {:.1e}; {})",
        if cert.is_valid() { "valid" } else { "INVALID" },
        cert.stationarity_residual,
        cert.comp_slackness_residual,
        multipliers.join(", ")
    )
}

fn solve(h1: f64, h2: f64, rate: RateTarget, as_json: bool) -> Result<(), Failure> {
    let ch = ChannelPair::new(h1, h2)?;
    let oma = oma_allocation(&ch, rate);
    let hybrid = hybrid_noma_allocation(&ch, rate);
    let optimal = solve_p1(&ch, rate);
    let p4 = kkt_p4(&ch, rate);
    let p6 = kkt_p6(&ch, rate);

    if as_json {
        let record = json!({
            "h1": ch.h1(),
            "h2": ch.h2(),
            "rate_nats": rate.nats(),
            "oma": { "alloc": oma, "total": total_power(&oma) },
            "hybrid": { "alloc": hybrid, "total": total_power(&hybrid) },
            "optimal": optimal,
            "kkt_p4": { "valid": p4.is_valid(), "certificate": p4 },
            "kkt_p6": { "valid": p6.is_valid(), "certificate": p6 },
        });
        let text = serde_json::to_string_pretty(&record).context("serializing record")?;
        println!("{text}");
        return Ok(());
    }

    println!(
        "h1 = {}, h2 = {}, R = {} nats",
        ch.h1(),
        ch.h2(),
        rate.nats()
    );
    println!(
        "{:<8} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "strategy", "p11", "p12", "p21", "p22", "total"
    );
    println!("{}", alloc_row("oma", &oma));
    println!("{}", alloc_row("hybrid", &hybrid));
    println!("{}", alloc_row("optimal", &optimal.alloc));
    println!(
        "branch: {:?}, user 1: {:?}",
        optimal.branch, optimal.u1_mode
    );
    println!("kkt p4: {}", verdict(&p4));
    println!("kkt p6: {}", verdict(&p6));
    Ok(())
}

fn unit_channels(seed: u64, stream: u64, trial: u64) -> ChannelPair {
    let dist = ChannelDistribution::iid(1.0).expect("unit variance");
    draw_ordered_channels(&dist, &mut substream(seed, stream, trial))
}

fn kkt_check(trials: u64, rates: &[RateTarget], seed: u64) -> Result<(), Failure> {
    let mut failures = 0usize;
    let mut worst_stationarity = 0f64;
    let mut worst_slackness = 0f64;
    let mut worst_mismatch = 0f64;
    for t in 0..trials {
        let rate = rates[t as usize % rates.len()];
        let ch = unit_channels(seed, 0, t);
        for cert in [kkt_p4(&ch, rate), kkt_p6(&ch, rate)] {
            worst_stationarity = worst_stationarity.max(cert.stationarity_residual);
            worst_slackness = worst_slackness.max(cert.comp_slackness_residual);
            worst_mismatch = worst_mismatch.max(cert.multiplier_mismatch());
            if !cert.is_valid() || cert.multiplier_mismatch() > MULTIPLIER_MATCH_TOL {
                failures += 1;
                if failures <= 5 {
                    eprintln!(
                        "trial {t}: h1 = {}, h2 = {}, R = {}: {:?} {}",
                        ch.h1(),
                        ch.h2(),
                        rate.nats(),
                        cert.problem,
                        verdict(&cert)
                    );
                }
            }
        }
    }
    println!("certificates: {}", 2 * trials);
    println!("worst stationarity residual: {worst_stationarity:.3e}");
    println!("worst slackness residual: {worst_slackness:.3e}");
    println!("worst multiplier mismatch: {worst_mismatch:.3e}");
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} certificates failed")));
    }
    println!("all certificates valid");
    Ok(())
}

fn oracle_check(
    trials: u64,
    grid_n: usize,
    rates: &[RateTarget],
    tolerance: f64,
    seed: u64,
) -> Result<(), Failure> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Failure::Usage(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let mut violations = 0usize;
    let mut worst = 0f64;
    for t in 0..trials {
        let rate = rates[t as usize % rates.len()];
        let ch = unit_channels(seed, 0, t);
        let solved = solve_p1(&ch, rate).total;
        let oracle = joint_oracle(&ch, rate, grid_n)?.total;
        let gap = (oracle - solved).abs() / solved;
        worst = worst.max(gap);
        if gap > tolerance {
            violations += 1;
            eprintln!(
                "trial {t}: h1 = {}, h2 = {}, R = {}: solver {solved}, oracle {oracle}",
                ch.h1(),
                ch.h2(),
                rate.nats()
            );
        }
    }
    println!("instances: {trials}, grid_n: {grid_n}");
    println!("worst relative gap: {worst:.3e}");
    if violations > 0 {
        return Err(Failure::Check(format!(
            "{violations} instances above {tolerance:e}"
        )));
    }
    println!("solver and oracle agree");
    Ok(())
}

fn print_sweep(param: &str, records: &[SweepRecord]) {
    println!(
        "{param:>10} {:>14} {:>14} {:>14}",
        "oma", "hybrid", "optimal"
    );
    for r in records {
        println!(
            "{:>10.4} {:>14.6} {:>14.6} {:>14.6}",
            r.sweep_param, r.avg_oma, r.avg_hybrid, r.avg_optimal
        );
    }
}

fn fig4(
    rate: RateTarget,
    realizations: usize,
    grid_n: usize,
    out: Option<&Path>,
    trace: Option<&Path>,
    trace_points: usize,
    seed: u64,
) -> Result<(), Failure> {
    let records = fig4_experiment(rate, realizations, grid_n, seed)?;
    write_csv(out, |w| write_fig4(w, &records))?;
    if trace.is_some() {
        let mut rows = Vec::with_capacity(records.len() * trace_points);
        for r in &records {
            let ch = ChannelPair::new(r.h1, r.h2)?;
            let x_max = oma_power(ch.h1(), rate);
            for i in 0..trace_points {
                let x = if i + 1 == trace_points {
                    x_max
                } else {
                    x_max * i as f64 / (trace_points - 1) as f64
                };
                rows.push((r.realization, x, p3_objective(x, &ch, rate).0));
            }
        }
        write_csv(trace, |w| write_trace(w, &rows))?;
    }
    let flagged: Vec<usize> = records
        .iter()
        .filter(|r| r.flagged)
        .map(|r| r.realization)
        .collect();
    let worst = records
        .iter()
        .map(|r| (r.x_opt - r.x_oma).abs() / r.grid_step)
        .fold(0.0, f64::max);
    println!(
        "realizations: {}, grid_n: {grid_n}, R = {} nats",
        records.len(),
        rate.nats()
    );
    println!("largest |x_opt - x_oma| in grid steps: {worst:.3}");
    if !flagged.is_empty() {
        return Err(Failure::Check(format!("flagged realizations: {flagged:?}")));
    }
    println!("search optimum at the OMA point in every realization");
    Ok(())
}

fn hessian_scan(draws: usize, threshold: f64, seed: u64) -> Result<(), Failure> {
    let Some(w) = search_non_psd_witness(seed, draws, threshold) else {
        return Err(Failure::Check(format!(
            "no point with smallest eigenvalue <= {threshold:e} in {draws} draws"
        )));
    };
    let s = &w.sample;
    println!("draw: {}", w.draw);
    println!(
        "h1 = {}, h2 = {}, R = {} nats",
        w.channels.h1(),
        w.channels.h2(),
        w.rate.nats()
    );
    println!("z = {}, y = {}", format_float(s.z), format_float(s.y));
    let fd = s.finite_difference;
    println!("finite-difference Hessian:");
    println!("  [{}, {}]", format_float(fd[0][0]), format_float(fd[0][1]));
    println!("  [{}, {}]", format_float(fd[1][0]), format_float(fd[1][1]));
    println!(
        "symmetrized eigenvalues: {}, {}",
        format_float(s.min_eigenvalue_symmetrized),
        format_float(s.max_eigenvalue_symmetrized)
    );
    Ok(())
}
