use std::io::Read;

use serde::Serialize;
use serde_json::{json, Value};

use tdchan::density::MatrixWire;
use tdchan::entropy::{additivity_gap, entropy_split, min_output_entropy};
use tdchan::spectrum::{dense_delta, full_spectrum, offdiag_eigenvalues};
use tdchan::verification::run_scan;
use tdchan::{Channel, DensityMatrix, LogBase, OptimizerConfig, ScanConfig, ScanKind, ScanReport, SchmidtVector, Tolerances};

use crate::args::{parse_d_spec, parse_grid_spec, parse_lambda, parse_t_spec};
use crate::output::{num, Report};
use crate::{Cli, Command, Failure, OptimizerArgs};

type Outcome = Result<(Report, bool), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let base: LogBase = cli.log_base.into();
    match &cli.command {
        Command::Apply { d, t, input, tolerances } => {
            let tol = Tolerances {
                hermitian: tolerances.hermitian_tol,
                trace: tolerances.trace_tol,
                psd_floor: tolerances.psd_floor,
            };
            apply(*d, *t, input, &tol)
        }
        Command::Spectrum { d, t, lambda, max_delta } => spectrum(*d, *t, lambda, *max_delta),
        Command::Entropy { d, t, lambda } => entropy(*d, *t, lambda, base),
        Command::MinEntropy { d, t, optimizer } => min_entropy(*d, *t, &optimizer_config(cli, optimizer), base),
        Command::Additivity { d, t, optimizer, gap_tol } => {
            additivity(*d, t, &optimizer_config(cli, optimizer), base, *gap_tol)
        }
        Command::SchurScan { d, t_grid, samples } => {
            verify(&[ScanKind::Schur, ScanKind::S2Schur], d, t_grid.as_deref(), *samples, cli.seed)
        }
        Command::Verify { kind, d, t_grid, samples } => {
            let kinds = if kind == "all" { ScanKind::ALL.to_vec() } else { vec![kind.parse::<ScanKind>()?] };
            verify(&kinds, d, t_grid.as_deref(), *samples, cli.seed)
        }
    }
}

fn optimizer_config(cli: &Cli, o: &OptimizerArgs) -> OptimizerConfig {
    OptimizerConfig { restarts: o.restarts, tol: cli.tol, n_random: o.n_random, seed: cli.seed }
}

fn lambda_for(d: usize, spec: &str) -> Result<SchmidtVector, Failure> {
    let values = parse_lambda(spec).map_err(Failure::Usage)?;
    if values.len() != d {
        return Err(Failure::Validation(format!("lambda has {} entries, expected d = {d}", values.len())));
    }
    Ok(SchmidtVector::new(values)?)
}

fn apply(d: usize, t: f64, input: &std::path::Path, tol: &Tolerances) -> Outcome {
    let ch = Channel::new(d, t)?;
    let text = if input.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?
    };
    let wire: MatrixWire =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let m = wire.to_matrix().map_err(|e| Failure::Usage(format!("{}: field `rows`: {e}", input.display())))?;
    if wire.dim != d {
        return Err(Failure::Validation(format!("input has dim = {}, expected d = {d}", wire.dim)));
    }
    let rho = DensityMatrix::with_tolerances(m, tol)?;
    let out = ch.apply(&rho)?.to_wire();

    let mut report = Report::single(&out, vec!["row", "col", "re", "im"]);
    for (i, row) in out.rows.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            report.row(vec![json!(i), json!(j), num(*re), num(*im)]);
        }
    }
    Ok((report, false))
}

fn spectrum(d: usize, t: f64, lambda: &str, max_delta: f64) -> Outcome {
    let ch = Channel::new(d, t)?;
    let lam = lambda_for(d, lambda)?;
    let spec = full_spectrum(&ch, &lam)?;
    let delta = dense_delta(&ch, &lam)?;

    #[derive(Serialize)]
    struct Doc<'a> {
        offdiag: &'a [f64],
        secular: &'a [f64],
        dense_delta: f64,
    }
    let mut report = Report::single(
        &Doc { offdiag: &spec.offdiag, secular: &spec.secular, dense_delta: delta },
        vec!["family", "i", "j", "value"],
    );
    for (a, b, g) in offdiag_eigenvalues(&ch, &lam)? {
        report.row(vec![json!("offdiag"), json!(a), json!(b), num(g)]);
    }
    for (i, g) in spec.secular.iter().enumerate() {
        report.row(vec![json!("secular"), json!(i), Value::Null, num(*g)]);
    }
    report.row(vec![json!("dense_delta"), Value::Null, Value::Null, num(delta)]);
    Ok((report, delta.is_nan() || delta > max_delta))
}

fn entropy(d: usize, t: f64, lambda: &str, base: LogBase) -> Outcome {
    let ch = Channel::new(d, t)?;
    let lam = lambda_for(d, lambda)?;
    let rep = entropy_split(&ch, &lam)?.in_base(base);
    let mut report = Report::single(&rep, vec!["d", "t", "s_total", "s1", "s2", "c"]);
    report.row(vec![json!(d), num(t), num(rep.s_total), num(rep.s1), num(rep.s2), num(rep.c)]);
    Ok((report, false))
}

fn min_entropy(d: usize, t: f64, cfg: &OptimizerConfig, base: LogBase) -> Outcome {
    let ch = Channel::new(d, t)?;
    let m = min_output_entropy(&ch, cfg);
    let h = base.convert(m.h);
    let closed_form = base.convert(m.closed_form);
    let argmin: Vec<[f64; 2]> = m.argmin.iter().map(|z| [z.re, z.im]).collect();
    let doc = json!({"d": d, "t": num(t), "h": num(h), "closed_form": num(closed_form), "argmin": argmin});
    let mut report = Report::single(&doc, vec!["d", "t", "h", "closed_form"]);
    report.row(vec![json!(d), num(t), num(h), num(closed_form)]);
    Ok((report, false))
}

fn additivity(d: usize, t_spec: &str, cfg: &OptimizerConfig, base: LogBase, gap_tol: f64) -> Outcome {
    let ts = parse_t_spec(t_spec).map_err(Failure::Usage)?;
    let channels: Vec<Channel> = ts.iter().map(|&t| Channel::new(d, t)).collect::<Result<_, _>>()?;
    let mut report = Report::stream(vec!["d", "t", "h", "min_simplex", "min_random", "gap", "vertex_distance"]);
    let mut violated = false;
    for ch in &channels {
        let gap = additivity_gap(ch, cfg)?.in_base(base);
        violated |= gap.gap.is_nan() || gap.gap < -gap_tol;
        report.row(vec![
            json!(gap.d),
            num(gap.t),
            num(gap.h),
            num(gap.min_simplex),
            num(gap.min_random),
            num(gap.gap),
            num(gap.vertex_distance),
        ]);
        report.push_document(&gap);
    }
    Ok((report, violated))
}

fn verify(kinds: &[ScanKind], d: &str, t_grid: Option<&str>, samples: usize, seed: u64) -> Outcome {
    let d_values = parse_d_spec(d).map_err(Failure::Usage)?;
    let t_grid = t_grid.map(parse_grid_spec).transpose().map_err(Failure::Usage)?;
    let mut reports: Vec<ScanReport> = Vec::new();
    for &kind in kinds {
        let cfg = ScanConfig { kind, d_values: d_values.clone(), t_grid: t_grid.clone(), samples, seed };
        reports.extend(run_scan(&cfg)?);
    }

    let mut report =
        Report::stream(vec!["kind", "d", "t", "k", "samples", "violations", "worst_margin", "seed"]);
    let mut violated = false;
    for r in &reports {
        violated |= r.violations > 0;
        for c in &r.cells {
            report.row(vec![
                json!(r.kind.name()),
                json!(c.d),
                num(c.t),
                json!(c.k),
                json!(c.samples),
                json!(c.violations),
                num(c.worst_margin),
                json!(r.seed),
            ]);
        }
        report.push_document(r);
    }
    Ok((report, violated))
}
