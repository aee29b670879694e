use std::f64::consts::PI;
use std::io::Write;

use anyhow::{anyhow, Context};
use clap::Args;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use ngbs_core::feasibility::{
    estimated_infidelity, lifetime_check, monte_carlo_jitter, photon_bound_report,
    timing_error_estimate, ExperimentParams, JitterStats, LifetimeReport, PhotonBoundReport,
    DETECTOR_EFFICIENCY_NOTE,
};
use ngbs_core::gates::{
    cnot as apply_cnot, ideal_cnot_amplitudes, two_qubit_amplitudes, ControlAtom, LogicalQubitSpec,
};
use ngbs_core::protocol::{
    coefficient_history, mismatches, plan_times, probability_sweep, run_protocol,
};
use ngbs_core::reference::compare_with_reference;
use ngbs_core::report::{
    coefficient_rows, to_json, write_coefficients_csv, write_sweep_csv, write_table_csv,
};

use crate::output::{num, sink, Format};
use crate::{CliError, OutputArgs};

type CmdResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_p(p: f64) -> CmdResult {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(usage(format!("p = {p} must lie in [0, 1]")))
    }
}

fn check_n(n: usize) -> CmdResult {
    if n >= 1 {
        Ok(())
    } else {
        Err(usage("N must be at least 1"))
    }
}

fn check_finite(name: &str, x: f64) -> CmdResult {
    if x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{name} = {x} must be finite")))
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Maximum photon number N of the target state.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn generate(args: GenerateArgs) -> CmdResult {
    check_n(args.n)?;
    check_p(args.p)?;
    check_finite("phi", args.phi)?;
    let report = run_protocol(args.n, args.p, args.phi)?;
    let mut out = sink(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", to_json(&report)?)?,
        Format::Csv => write_coefficients_csv(&report, &mut out)?,
        Format::Text => {
            writeln!(
                out,
                "N = {}, p = {}, phi = {}",
                report.n_max,
                num(report.p),
                num(report.phi)
            )?;
            writeln!(out, "total probability  {}", num(report.total_probability))?;
            writeln!(out, "fidelity           {}", num(report.fidelity))?;
            writeln!(out, "max |delta_n|      {}", num(report.max_abs_mismatch()))?;
            writeln!(out)?;
            writeln!(
                out,
                "{:>4} {:>12} {:>12} {:>12}",
                "k", "gT_k", "varphi_k", "P_k"
            )?;
            for (step, record) in report.plan.steps.iter().zip(&report.steps) {
                writeln!(
                    out,
                    "{:>4} {:>12} {:>12} {:>12}",
                    step.k,
                    num(step.gt),
                    num(step.varphi),
                    num(record.probability)
                )?;
            }
            writeln!(out)?;
            writeln!(
                out,
                "{:>4} {:>12} {:>12} {:>12}",
                "n", "c_n", "b_n", "delta_n"
            )?;
            for row in coefficient_rows(&report) {
                writeln!(
                    out,
                    "{:>4} {:>12} {:>12} {:>12}",
                    row.n,
                    num(row.c),
                    num(row.b),
                    num(row.delta)
                )?;
            }
            for w in &report.plan.warnings {
                writeln!(out, "warning: {}", serde_json::to_string(w)?)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Values of N, each between 3 and 10.
    #[arg(long, value_delimiter = ',', default_values_t = 3..=10)]
    n: Vec<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn table(args: TableArgs) -> CmdResult {
    if let Some(bad) = args.n.iter().find(|n| !(3..=10).contains(*n)) {
        return Err(usage(format!(
            "no reference values for N = {bad}; choose N in 3..=10"
        )));
    }
    let cells = compare_with_reference(&args.n)?;
    let mut out = sink(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", to_json(&cells)?)?,
        Format::Csv => write_table_csv(&cells, &mut out)?,
        Format::Text => {
            writeln!(
                out,
                "{:>3} {:>3} {:>12} {:>12} {:>12}  within tolerance",
                "N", "n", "computed", "reference", "|diff|"
            )?;
            for c in &cells {
                writeln!(
                    out,
                    "{:>3} {:>3} {:>12} {:>12} {:>12}  {}",
                    c.n_max,
                    c.n,
                    num(c.computed),
                    num(c.reference),
                    num(c.abs_diff),
                    if c.within_tolerance { "yes" } else { "NO" }
                )?;
            }
            let published: Vec<_> = cells.iter().filter(|c| c.n >= 1).collect();
            let ok = published.iter().filter(|c| c.within_tolerance).count();
            writeln!(
                out,
                "{ok} of {} nonzero cells within tolerance",
                published.len()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(parse(re)?, 0.0)),
        [re, im] => Ok(C64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected RE or RE,IM, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct CnotArgs {
    /// N of the logical qubit states.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    /// Target amplitude on |0_L>, as RE or RE,IM.
    #[arg(long, default_value = "1", value_parser = parse_complex, allow_hyphen_values = true)]
    a: C64,
    /// Target amplitude on |1_L>.
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    b: C64,
    /// Control amplitude on |g>.
    #[arg(long, default_value = "1", value_parser = parse_complex, allow_hyphen_values = true)]
    c: C64,
    /// Control amplitude on |e>.
    #[arg(long, default_value = "0", value_parser = parse_complex, allow_hyphen_values = true)]
    d: C64,
    /// Draw a, b, c, d at random from --seed instead.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Amplitudes in the order `g0, g1, e0, e1`.
const LABELS: [&str; 4] = ["g,0_L", "g,1_L", "e,0_L", "e,1_L"];

#[derive(Debug, Serialize)]
struct CnotCase {
    name: String,
    control: [C64; 2],
    target: [C64; 2],
    amplitudes: [[C64; 2]; 2],
    expected: [[C64; 2]; 2],
    max_error: f64,
}

#[derive(Debug, Serialize)]
struct CnotReport {
    n_max: usize,
    phi: f64,
    cases: Vec<CnotCase>,
    max_error: f64,
}

fn normalized_pair(x: C64, y: C64, names: &str) -> Result<(C64, C64), CliError> {
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
        return Err(usage(format!("({names}) must be normalized, got norm {n}")));
    }
    Ok((x / n, y / n))
}

fn random_pair(rng: &mut ChaCha20Rng) -> (C64, C64) {
    let x = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let y = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    (x / n, y / n)
}

fn run_case(
    name: String,
    spec: &LogicalQubitSpec,
    (c, d): (C64, C64),
    (a, b): (C64, C64),
) -> anyhow::Result<CnotCase> {
    let joint = apply_cnot(&ControlAtom::new(c, d), &spec.encode(a, b), spec)?;
    let amplitudes = two_qubit_amplitudes(&joint, spec);
    let expected = ideal_cnot_amplitudes(c, d, a, b);
    let max_error = (0..4)
        .map(|i| (amplitudes[i / 2][i % 2] - expected[i / 2][i % 2]).norm())
        .fold(0.0, f64::max);
    Ok(CnotCase {
        name,
        control: [c, d],
        target: [a, b],
        amplitudes,
        expected,
        max_error,
    })
}

pub fn cnot(args: CnotArgs) -> CmdResult {
    check_n(args.n)?;
    check_finite("phi", args.phi)?;
    let spec = LogicalQubitSpec::new(args.n, args.phi);
    let (target, control) = if args.random {
        let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
        (random_pair(&mut rng), random_pair(&mut rng))
    } else {
        (
            normalized_pair(args.a, args.b, "a, b")?,
            normalized_pair(args.c, args.d, "c, d")?,
        )
    };

    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut cases = Vec::with_capacity(5);
    for (cname, ctl) in [("g", (one, zero)), ("e", (zero, one))] {
        for (tname, tgt) in [("0_L", (one, zero)), ("1_L", (zero, one))] {
            cases.push(run_case(format!("|{cname}>|{tname}>"), &spec, ctl, tgt)?);
        }
    }
    cases.push(run_case("general".into(), &spec, control, target)?);
    let max_error = cases.iter().map(|c| c.max_error).fold(0.0, f64::max);
    let report = CnotReport {
        n_max: args.n,
        phi: spec.phi,
        cases,
        max_error,
    };

    let mut out = sink(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", to_json(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record([
                "case",
                "component",
                "re",
                "im",
                "expected_re",
                "expected_im",
            ])?;
            for case in &report.cases {
                for (i, label) in LABELS.iter().enumerate() {
                    let (got, want) = (case.amplitudes[i / 2][i % 2], case.expected[i / 2][i % 2]);
                    w.serialize((&case.name, label, got.re, got.im, want.re, want.im))?;
                }
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(
                out,
                "logical qubit N = {}, phi = {}",
                report.n_max,
                num(report.phi)
            )?;
            for case in &report.cases {
                let terms: Vec<String> = LABELS
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| case.amplitudes[i / 2][i % 2].norm() > 1e-12)
                    .map(|(i, label)| {
                        let z = case.amplitudes[i / 2][i % 2];
                        let sign = if z.im < 0.0 { '-' } else { '+' };
                        format!("({} {sign} {}i)|{label}>", num(z.re), num(z.im.abs()))
                    })
                    .collect();
                writeln!(out, "{:<10} -> {}", case.name, terms.join(" + "))?;
            }
            writeln!(
                out,
                "max amplitude error vs ideal CNOT: {}",
                num(report.max_error)
            )?;
        }
    }
    out.flush()?;
    if report.max_error >= 1e-12 {
        return Err(CliError::Compute(anyhow!(
            "CNOT amplitudes deviate from the ideal gate by {}",
            report.max_error
        )));
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct FeasibilityArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Coupling constant in rad/s.
    #[arg(long, default_value_t = 2.0 * PI * 5.0e4)]
    g: f64,
    /// Atomic lifetime in s.
    #[arg(long, default_value_t = 1e-2)]
    tau_at: f64,
    /// Cavity photon lifetime in s.
    #[arg(long, default_value_t = 1e-3)]
    tau_cav: f64,
    /// Relative interaction-time error.
    #[arg(long, default_value_t = 1e-2)]
    rel_err: f64,
    #[arg(long, default_value_t = 1e9)]
    quality_factor: f64,
    /// Relative Gaussian jitter of the Monte Carlo study; defaults to --rel-err.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct FeasibilityReport {
    params: ExperimentParams,
    n_max: usize,
    p: f64,
    estimate_kind: &'static str,
    /// `δ_exp,n` for `n = 0..=N`.
    timing_estimate: Vec<f64>,
    /// Protocol mismatches `δ_n^(N)`.
    mismatches: Vec<f64>,
    estimated_infidelity: f64,
    lifetimes: LifetimeReport,
    photon_bound: PhotonBoundReport,
    jitter: JitterStats,
    detector_note: &'static str,
}

pub fn feasibility(args: FeasibilityArgs) -> CmdResult {
    check_n(args.n)?;
    check_p(args.p)?;
    let params = ExperimentParams {
        g: args.g,
        tau_at: args.tau_at,
        tau_cav: args.tau_cav,
        rel_time_err: args.rel_err,
        quality_factor: args.quality_factor,
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    let sigma = args.sigma.unwrap_or(args.rel_err);
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(usage(format!("sigma = {sigma} must be non-negative")));
    }
    if args.trials == 0 {
        return Err(usage("trials must be at least 1"));
    }

    let plan = plan_times(args.n, 0.0)?;
    let gts = plan.interaction_times();
    let timing_estimate = timing_error_estimate(args.n, gts[args.n - 1], args.rel_err);
    let history = coefficient_history(args.n)?;
    let report = FeasibilityReport {
        params,
        n_max: args.n,
        p: args.p,
        estimate_kind: "order-of-magnitude",
        estimated_infidelity: estimated_infidelity(&timing_estimate, args.p),
        timing_estimate,
        mismatches: mismatches(&history[args.n - 1].ground),
        lifetimes: lifetime_check(&params, &gts),
        photon_bound: photon_bound_report(args.g / (2.0 * PI), args.tau_cav),
        jitter: monte_carlo_jitter(args.n, args.p, sigma, args.trials, args.seed)
            .context("jitter simulation failed")?,
        detector_note: DETECTOR_EFFICIENCY_NOTE,
    };

    let mut out = sink(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", to_json(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["n", "timing_estimate", "delta"])?;
            for (n, (e, d)) in report
                .timing_estimate
                .iter()
                .zip(&report.mismatches)
                .enumerate()
            {
                w.serialize((n, e, d))?;
            }
            w.flush()?;
        }
        Format::Text => write_feasibility_text(&mut out, &report)?,
    }
    out.flush()?;
    Ok(())
}

fn write_feasibility_text(out: &mut dyn Write, r: &FeasibilityReport) -> anyhow::Result<()> {
    let p = &r.params;
    writeln!(
        out,
        "g = {} rad/s, tau_at = {} s, tau_cav = {} s, dT/T = {}, Q = {}",
        num(p.g),
        num(p.tau_at),
        num(p.tau_cav),
        num(p.rel_time_err),
        num(p.quality_factor)
    )?;
    writeln!(out, "N = {}, p = {}", r.n_max, num(r.p))?;
    writeln!(out)?;
    writeln!(out, "timing-error estimate ({}):", r.estimate_kind)?;
    writeln!(out, "{:>4} {:>12} {:>12}", "n", "delta_exp", "delta_n")?;
    for (n, (e, d)) in r.timing_estimate.iter().zip(&r.mismatches).enumerate() {
        writeln!(out, "{n:>4} {:>12} {:>12}", num(*e), num(*d))?;
    }
    writeln!(
        out,
        "estimated infidelity   {}",
        num(r.estimated_infidelity)
    )?;
    writeln!(out)?;
    let l = &r.lifetimes;
    writeln!(
        out,
        "decoherence time {} s, total interaction time {} s, sequence fits: {}",
        num(l.decoherence_time),
        num(l.total_interaction_time),
        if l.sequence_fits { "yes" } else { "no" }
    )?;
    for s in &r.lifetimes.steps {
        writeln!(
            out,
            "  step {:>2}: T = {} s  atom {}  cavity {}  decoherence {}",
            s.k,
            num(s.duration),
            ok(s.within_atomic_lifetime),
            ok(s.within_cavity_lifetime),
            ok(s.within_decoherence_time)
        )?;
    }
    writeln!(out)?;
    let b = &r.photon_bound;
    writeln!(out, "photon-number bound N < 4 (g tau_cav)^2:")?;
    writeln!(out, "  g = 2 pi f  {}", b.with_two_pi)?;
    writeln!(out, "  g = f       {}", b.without_two_pi)?;
    writeln!(out, "  quoted      {}", num(b.quoted))?;
    writeln!(out, "  {}", b.note)?;
    writeln!(out)?;
    let j = &r.jitter;
    writeln!(
        out,
        "Monte Carlo, {} trials, sigma = {}:",
        j.trials,
        num(j.rel_sigma)
    )?;
    writeln!(out, "  mean fidelity      {}", num(j.mean_fidelity))?;
    writeln!(out, "  min fidelity       {}", num(j.min_fidelity))?;
    writeln!(out, "  mean infidelity    {}", num(j.mean_infidelity()))?;
    writeln!(out, "  mean probability   {}", num(j.mean_probability))?;
    writeln!(out)?;
    writeln!(out, "note: {}", r.detector_note)?;
    Ok(())
}

fn ok(flag: bool) -> &'static str {
    if flag {
        "ok"
    } else {
        "EXCEEDED"
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = 1..=10)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = (0..=10).map(|i| i as f64 / 10.0))]
    p: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn sweep(args: SweepArgs) -> CmdResult {
    for &n in &args.n {
        check_n(n)?;
    }
    for &p in &args.p {
        check_p(p)?;
    }
    let rows = probability_sweep(&args.n, &args.p)?;
    let mut out = sink(args.output.out.as_deref())?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", to_json(&rows)?)?,
        Format::Csv => write_sweep_csv(&rows, &mut out)?,
        Format::Text => {
            writeln!(
                out,
                "{:>4} {:>8} {:>18} {:>12}",
                "N", "p", "total_probability", "fidelity"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>4} {:>8} {:>18} {:>12}",
                    r.n_max,
                    num(r.p),
                    num(r.total_probability),
                    num(r.fidelity)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
