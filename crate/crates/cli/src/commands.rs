use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use symwit::compiler::{canned_decomposition, settings_upper_bound, Schedule};
use symwit::counts::{evaluate_witness_counts, simulate_counts, CountsDataset, SignMap};
use symwit::optimize::{
    max_bisep_all, max_bisep_seesaw, max_ppt, max_ppt_all, moment_observable, optimize_witness, q_scan,
    setting_basis, PptProblem, WitnessOptimizationProblem,
};
use symwit::symmetric::{dicke, dicke_projector, CollectiveAxis, DickeLabel};
use symwit::witness::{
    catalog, expectation, fidelity_bound, fidelity_curves, noise_tolerance, unit_grid, NoiseModel, Target,
    WitnessSpec,
};
use symwit::DenseOperator;

use crate::config::Settings;
use crate::output::{self, Output};
use crate::{BoundArgs, Cli, Command, ObservableKind, OptimizeArgs, ToleranceArgs, UsageError, WitnessCommand};

pub fn run(cli: &Cli) -> Result<()> {
    let settings = Settings::load(cli.config.as_deref(), cli.seed)?;
    let out = match &cli.command {
        Command::Dicke { n, m } => dicke_amplitudes(*n, *m)?,
        Command::Compile { witness } => schedule_output(&load_witness(witness)?.schedule()?),
        Command::SettingsBound { n } => {
            let b = settings_upper_bound(*n)?;
            Output::new(format!("N={} L={} L′={}", b.num_qubits, b.closed_form, b.enumerated))
                .json(b)
                .csv([b])
        }
        Command::Canned { name } => schedule_output(&canned_decomposition(name)?),
        Command::Witness(WitnessCommand::Show { witness }) => show(&load_witness(witness)?)?,
        Command::Witness(WitnessCommand::Eval { witness, noise, p }) => eval(&load_witness(witness)?, noise, *p)?,
        Command::Witness(WitnessCommand::Tolerance(args)) | Command::Tolerance(args) => tolerance(args)?,
        Command::OptimizeWitness(args) => optimize(args, &settings)?,
        Command::PptMax(args) => ppt(args, &settings)?,
        Command::BisepMax(args) => bisep(args, &settings)?,
        Command::QScan {
            n,
            m,
            q_min,
            q_max,
            q_step,
        } => scan(*n, *m, *q_min, *q_max, *q_step, &settings)?,
        Command::FidelityCurve { witness, noise, grid } => {
            let w = load_witness(witness)?;
            let noise = NoiseModel::by_name(noise, w.num_qubits())?;
            Output::csv_only(fidelity_curves(&w, &noise, &unit_grid(*grid))?)
        }
        Command::Simulate { witness, noise, p, shots } => {
            let w = load_witness(witness)?;
            let rho = mixed_target(&w, noise, *p)?;
            let data = simulate_counts(&rho, &w.schedule()?, *shots, settings.solver.seed)?;
            let body = data.to_ndjson();
            return output::write(&body, cli.out.as_deref());
        }
        Command::EvalCounts { witness, data, sign_map } => {
            eval_counts(&load_witness(witness)?, data, sign_map.as_deref(), &settings)?
        }
    };
    let body = out.render(cli.format)?;
    output::write(&body, cli.out.as_deref())
}

/// A catalog name, or a JSON file written by `witness show --format json`.
fn load_witness(arg: &str) -> Result<WitnessSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {arg}"))?;
        return WitnessSpec::from_json(&text).with_context(|| format!("malformed witness file {arg}"));
    }
    Ok(catalog(arg)?)
}

fn mixed_target(w: &WitnessSpec, noise: &str, p: f64) -> Result<DenseOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(UsageError(format!("noise fraction {p} outside [0, 1]")).into());
    }
    let noise = NoiseModel::by_name(noise, w.num_qubits())?;
    let mut rho = DenseOperator::projector(w.target_state()).scale(1.0 - p);
    rho.add_scaled(p, noise.rho())?;
    Ok(rho)
}

fn bits(index: usize, n: usize) -> String {
    (0..n).map(|k| if index >> (n - 1 - k) & 1 == 1 { '1' } else { '0' }).collect()
}

fn dicke_amplitudes(n: usize, m: usize) -> Result<Output> {
    #[derive(Serialize)]
    struct Row {
        basis: String,
        re: f64,
        im: f64,
    }
    let psi = dicke(n, m)?;
    let rows: Vec<Row> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(i, a)| Row {
            basis: bits(i, n),
            re: a.re,
            im: a.im,
        })
        .collect();
    let mut text = String::new();
    for r in &rows {
        writeln!(text, "|{}⟩ {:.12}", r.basis, r.re)?;
    }
    let value = json!({ "N": n, "m": m, "amplitudes": &rows });
    Ok(Output::new(text).json(value).csv(rows))
}

fn schedule_output(s: &Schedule) -> Output {
    #[derive(Serialize)]
    struct Row {
        coeff: String,
        nx: Option<f64>,
        ny: Option<f64>,
        nz: Option<f64>,
        scale: f64,
        identity_weight: f64,
    }
    let rows: Vec<Row> = s
        .terms()
        .iter()
        .map(|t| {
            let n = t.setting.map(|s| s.components());
            Row {
                coeff: t.coeff.to_string(),
                nx: n.map(|v| v[0]),
                ny: n.map(|v| v[1]),
                nz: n.map(|v| v[2]),
                scale: t.scale,
                identity_weight: t.identity_weight,
            }
        })
        .collect();
    let mut text = format!("{} settings, {} terms\n", s.settings().len(), s.terms().len());
    for t in s.terms() {
        let setting = t.setting.map_or("identity".to_string(), |s| s.to_string());
        let _ = writeln!(text, "{:>14}  {setting}  scale={} w={}", t.coeff.to_string(), t.scale, t.identity_weight);
    }
    let value: Value = serde_json::from_str(&s.to_json()).expect("schedule JSON parses");
    Output::new(text).json(value).csv(rows)
}

fn show(w: &WitnessSpec) -> Result<Output> {
    let target = DenseOperator::projector(w.target_state());
    let value = expectation(w, &target)?;
    let mut text = String::new();
    writeln!(text, "{} (N = {})", w.name(), w.num_qubits())?;
    writeln!(text, "W = {}", w.formula())?;
    writeln!(text, "⟨W⟩ on target = {value:.6}")?;
    writeln!(text, "λ² = {:.6}", w.lambda_sq())?;
    match w.alpha() {
        Some(a) => writeln!(text, "α = {a}{}", if w.alpha_derived() { " (derived)" } else { "" })?,
        None => writeln!(text, "α: none")?,
    }
    let value_json: Value = serde_json::from_str(&w.to_json()).expect("witness JSON parses");
    Ok(Output::new(text).json(value_json))
}

fn eval(w: &WitnessSpec, noise: &str, p: f64) -> Result<Output> {
    #[derive(Serialize)]
    struct Row<'a> {
        witness: &'a str,
        noise: &'a str,
        p: f64,
        value: f64,
        fidelity_bound: Option<f64>,
    }
    let rho = mixed_target(w, noise, p)?;
    let value = expectation(w, &rho)?;
    let bound = w.alpha().map(|_| fidelity_bound(w, value)).transpose()?;
    let row = Row {
        witness: w.name(),
        noise,
        p,
        value,
        fidelity_bound: bound,
    };
    let mut text = format!("{value:.6}");
    if let Some(b) = bound {
        write!(text, "\nfidelity ≥ {b:.6}")?;
    }
    Ok(Output::new(text).json(&row).csv([&row]))
}

fn tolerance(args: &ToleranceArgs) -> Result<Output> {
    #[derive(Serialize)]
    struct Row<'a> {
        witness: &'a str,
        noise: &'a str,
        tolerance: f64,
    }
    let w = load_witness(&args.witness)?;
    let noise = NoiseModel::by_name(&args.noise, w.num_qubits())?;
    let t = noise_tolerance(&w, &noise, &DenseOperator::projector(w.target_state()))?;
    let row = Row {
        witness: w.name(),
        noise: noise.name(),
        tolerance: t,
    };
    Ok(Output::new(format!("{t:.4}")).json(&row).csv([&row]))
}

fn parse_axes(axes: &str) -> Result<Vec<CollectiveAxis>> {
    axes.chars()
        .map(|c| match c {
            'x' => Ok(CollectiveAxis::X),
            'y' => Ok(CollectiveAxis::Y),
            'z' => Ok(CollectiveAxis::Z),
            other => Err(UsageError(format!("unknown axis `{other}`")).into()),
        })
        .collect()
}

fn optimize(args: &OptimizeArgs, settings: &Settings) -> Result<Output> {
    let label = DickeLabel::new(args.n, args.m)?;
    let problem = WitnessOptimizationProblem {
        name: args.name.clone(),
        target: Target::Dicke(label),
        noise: NoiseModel::by_name(&args.noise, args.n)?,
        basis: setting_basis(args.n, &parse_axes(&args.axes)?, args.odd_powers),
    };
    let (w, report) = optimize_witness(&problem, &settings.solver)?;
    let tol = noise_tolerance(&w, &problem.noise, &DenseOperator::projector(w.target_state()))?;
    let mut text = String::new();
    writeln!(text, "W = {}", w.formula())?;
    writeln!(text, "α = {}", w.alpha().unwrap_or(0.0))?;
    writeln!(text, "tolerance = {tol:.4}")?;
    write!(text, "gap = {:.3e}, iterations = {}", report.gap, report.iterations)?;
    let witness: Value = serde_json::from_str(&w.to_json()).expect("witness JSON parses");
    Ok(Output::new(text).json(json!({ "witness": witness, "tolerance": tol, "report": report })))
}

fn observable(args: &BoundArgs) -> Result<DenseOperator> {
    let m = args.m.unwrap_or(args.n / 2);
    Ok(match args.observable {
        ObservableKind::Moment => moment_observable(args.n, m, args.q)?,
        ObservableKind::Projector => dicke_projector(args.n, m)?,
    })
}

fn ppt(args: &BoundArgs, settings: &Settings) -> Result<Output> {
    let obs = observable(args)?;
    let sol = match &args.side {
        Some(side) => max_ppt(
            &PptProblem {
                observable: obs,
                bipartition: side.clone(),
            },
            &settings.solver,
        )?,
        None => max_ppt_all(&obs, &settings.solver)?,
    };
    let text = format!(
        "{:.6}\nbipartition {:?}, upper bound {:.6}, min eigenvalue {:.2e}",
        sol.value, sol.bipartition, sol.upper_bound, sol.report.min_eigenvalue_slack
    );
    Ok(Output::new(text).json(&sol))
}

fn bisep(args: &BoundArgs, settings: &Settings) -> Result<Output> {
    let obs = observable(args)?;
    let best = match &args.side {
        Some(side) => max_bisep_seesaw(&obs, side, &settings.solver)?,
        None => max_bisep_all(&obs, &settings.solver)?,
    };
    let text = format!("{:.6}\nside {:?}", best.value, best.side);
    Ok(Output::new(text).json(&best))
}

fn scan(n: usize, m: usize, q_min: f64, q_max: f64, q_step: f64, settings: &Settings) -> Result<Output> {
    if q_step.is_nan() || q_step <= 0.0 || q_max < q_min {
        return Err(UsageError("need q_step > 0 and q_max ≥ q_min".into()).into());
    }
    let count = ((q_max - q_min) / q_step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|k| ((q_min + k as f64 * q_step) * 1e9).round() / 1e9)
        .collect();
    let s = q_scan(n, m, &grid, &settings.solver)?;
    #[derive(Serialize)]
    struct Row {
        q: f64,
        c_q: f64,
        tolerance: f64,
        argmax: bool,
    }
    Ok(Output::csv_only(s.rows.iter().enumerate().map(|(i, r)| Row {
        q: r.q,
        c_q: r.c_q,
        tolerance: r.tolerance,
        argmax: i == s.argmax,
    })))
}

fn eval_counts(w: &WitnessSpec, data: &Path, sign_map: Option<&str>, settings: &Settings) -> Result<Output> {
    let text = fs::read_to_string(data).with_context(|| format!("cannot read {}", data.display()))?;
    let dataset = CountsDataset::from_ndjson(&text)?;
    let signs: Option<SignMap> = match sign_map {
        Some(s) => Some(s.parse()?),
        None => settings.sign_map.clone(),
    };
    let r = evaluate_witness_counts(
        w,
        &dataset,
        signs.as_ref(),
        settings.bootstrap_resamples,
        settings.solver.seed,
    )?;
    let mut text = format!("⟨W⟩ = {:.6} ± {:.6}", r.witness_value, r.standard_error);
    if let (Some(f), Some(e)) = (r.fidelity_bound, r.fidelity_bound_error) {
        write!(text, "\nfidelity ≥ {f:.6} ± {e:.6}")?;
    }
    #[derive(Serialize)]
    struct Row {
        setting: String,
        coeff: String,
        scale: f64,
        identity_weight: f64,
        estimator: f64,
        contribution: f64,
    }
    let rows: Vec<Row> = r
        .per_term
        .iter()
        .map(|t| Row {
            setting: t.setting.map_or("identity".into(), |s| s.to_string()),
            coeff: t.coeff.to_string(),
            scale: t.scale,
            identity_weight: t.identity_weight,
            estimator: t.estimator,
            contribution: t.contribution,
        })
        .collect();
    Ok(Output::new(text).json(&r).csv(rows))
}
