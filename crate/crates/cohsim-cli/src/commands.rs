//! Implementations of the four subcommands.

use cohsim_core::checks;
use cohsim_core::circuit::simulate_stages;
use cohsim_core::dsl;
use cohsim_core::error::Error;
use cohsim_core::protocols::{
    build_superdense, build_swap, build_teleportation, ghz_circuit, prepare_ghz, prepare_w,
    repeater_run, w_circuit, ProtocolRun, RepeaterMode, RepeaterSchedule,
};
use cohsim_core::report::format_value;
use cohsim_core::state::{compose, QuantumState};

use crate::input_spec::parse_input_state;
use crate::output::{emit_profile, write_text};
use crate::{resolve_seed, Failure, Mode, ProtocolArgs, RunArgs, SweepArgs, VerifyArgs};

fn simulation_failure(err: Error) -> Failure {
    Failure::Simulation(err.to_string())
}

pub fn run(args: &RunArgs) -> Result<i32, Failure> {
    let source = std::fs::read_to_string(&args.circuit).map_err(|e| {
        Failure::Diagnostics(format!("cannot read {}: {e}", args.circuit.display()))
    })?;
    let outcome = dsl::parse_circuit(&source);
    for diagnostic in &outcome.diagnostics {
        eprintln!("{}: {diagnostic}", args.circuit.display());
    }
    let Some(circuit) = outcome.circuit else {
        return Ok(1);
    };
    let input = parse_input_state(&args.input, circuit.qubit_count)?;
    let (profile, _) = simulate_stages(&circuit, &input).map_err(simulation_failure)?;
    emit_profile(&profile, args.format, args.output.as_deref())?;
    eprintln!(
        "peak: stage {} with {} bits",
        profile.peak.0,
        format_value(profile.peak.1)
    );
    Ok(0)
}

pub fn protocol(args: &ProtocolArgs) -> Result<i32, Failure> {
    let name = args.name.to_ascii_lowercase();
    match name.as_str() {
        "teleport" => {
            let message = teleport_message(args.n, args.theta, args.gamma)?;
            let run = build_teleportation(args.n, &message, args.werner)
                .map_err(|e| Failure::Diagnostics(e.to_string()))?;
            if args.emit.is_some() && args.werner < 1.0 {
                return Err(Failure::Diagnostics(
                    "werner < 1 uses a mixed initial state that the .qc format cannot carry; \
                     drop --emit or use --run"
                        .into(),
                ));
            }
            finish_protocol_run(args, run)
        }
        "superdense" => {
            let bits = parse_bits(&args.bits)?;
            let run = build_superdense(bits).map_err(|e| Failure::Diagnostics(e.to_string()))?;
            finish_protocol_run(args, run)
        }
        "swap" => {
            let run = build_swap().map_err(|e| Failure::Diagnostics(e.to_string()))?;
            finish_protocol_run(args, run)
        }
        "repeater" => {
            let mode = match args.mode {
                Mode::Sequential => RepeaterMode::Sequential,
                Mode::Parallel => RepeaterMode::Parallel(args.parallel_swaps),
            };
            let schedule = RepeaterSchedule::new(args.links, mode)
                .map_err(|e| Failure::Diagnostics(e.to_string()))?;
            let run = repeater_run(&schedule).map_err(map_repeater_error)?;
            if let Some(path) = &args.emit {
                write_text(&dsl::serialize_circuit(&run.circuit), Some(path))?;
            }
            if args.run {
                emit_profile(&run.profile, args.format, args.output.as_deref())?;
                eprintln!(
                    "peak: {} bits, estimate C_r(sigma_R) + 2s = {} bits",
                    format_value(run.measured_peak),
                    format_value(run.estimate)
                );
            } else if args.emit.is_none() {
                write_text(&dsl::serialize_circuit(&run.circuit), None)?;
            }
            Ok(0)
        }
        "w" | "ghz" => {
            let (state, circuit) = if name == "w" {
                (prepare_w(args.n), w_circuit(args.n))
            } else {
                (prepare_ghz(args.n), ghz_circuit(args.n))
            };
            let state = state.map_err(|e| Failure::Diagnostics(e.to_string()))?;
            let circuit = circuit.map_err(|e| Failure::Diagnostics(e.to_string()))?;
            if args.emit_coherence {
                let coherence = state
                    .relative_entropy_of_coherence()
                    .map_err(simulation_failure)?;
                println!("{}", format_value(coherence));
                return Ok(0);
            }
            if let Some(path) = &args.emit {
                write_text(&dsl::serialize_circuit(&circuit), Some(path))?;
            }
            if args.run {
                let input = QuantumState::zero_state(circuit.qubit_count);
                let (profile, _) = simulate_stages(&circuit, &input).map_err(simulation_failure)?;
                emit_profile(&profile, args.format, args.output.as_deref())?;
            } else if args.emit.is_none() {
                write_text(&dsl::serialize_circuit(&circuit), None)?;
            }
            Ok(0)
        }
        other => Err(Failure::Diagnostics(format!(
            "unknown protocol '{other}' (expected teleport, superdense, swap, repeater, w, ghz)"
        ))),
    }
}

fn finish_protocol_run(args: &ProtocolArgs, run: ProtocolRun) -> Result<i32, Failure> {
    if let Some(path) = &args.emit {
        write_text(&dsl::serialize_circuit(&run.circuit), Some(path))?;
    }
    if args.run {
        let (profile, _) = run.simulate().map_err(simulation_failure)?;
        emit_profile(&profile, args.format, args.output.as_deref())?;
        eprintln!(
            "peak: stage {} with {} bits (budget bound {})",
            profile.peak.0,
            format_value(profile.peak.1),
            format_value(run.ledger.peak_bound())
        );
    } else if args.emit.is_none() && !args.emit_coherence {
        write_text(&dsl::serialize_circuit(&run.circuit), None)?;
    }
    Ok(0)
}

fn teleport_message(n: usize, theta: f64, gamma: f64) -> Result<QuantumState, Failure> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Failure::Diagnostics(format!(
            "theta {theta} outside [0, pi]"
        )));
    }
    if !(0.0..std::f64::consts::TAU).contains(&gamma) {
        return Err(Failure::Diagnostics(format!(
            "gamma {gamma} outside [0, 2 pi)"
        )));
    }
    if n == 0 {
        return Err(Failure::Diagnostics("need at least one gadget".into()));
    }
    let part = QuantumState::bloch(theta, gamma);
    let positions: Vec<[usize; 1]> = (0..n).map(|q| [q]).collect();
    let refs: Vec<(&QuantumState, &[usize])> =
        positions.iter().map(|p| (&part, p.as_slice())).collect();
    compose(&refs, n).map_err(|e| Failure::Diagnostics(e.to_string()))
}

fn parse_bits(text: &str) -> Result<(u8, u8), Failure> {
    let bytes = text.as_bytes();
    if bytes.len() != 2 || bytes.iter().any(|b| *b != b'0' && *b != b'1') {
        return Err(Failure::Diagnostics(format!(
            "bits must be two binary digits, got '{text}'"
        )));
    }
    Ok((bytes[0] - b'0', bytes[1] - b'0'))
}

fn map_repeater_error(err: Error) -> Failure {
    match err {
        Error::TooLarge { .. } | Error::InvalidSize { .. } | Error::InvalidParams { .. } => {
            Failure::Diagnostics(err.to_string())
        }
        other => Failure::Simulation(other.to_string()),
    }
}

pub fn sweep(args: &SweepArgs) -> Result<i32, Failure> {
    let kind = args.kind.to_ascii_lowercase();
    let text = match kind.as_str() {
        "angle" => sweep_angle(args)?,
        "size" => sweep_size(args)?,
        "werner" => sweep_werner(args)?,
        "schedule" => sweep_schedule(args)?,
        other => {
            return Err(Failure::Diagnostics(format!(
                "unknown sweep '{other}' (expected angle, size, werner, schedule)"
            )))
        }
    };
    write_text(&text, args.output.as_deref())?;
    Ok(0)
}

/// Run `points` through `work` on scoped threads and join the rows in
/// parameter order.
fn parallel_rows<P, F>(points: Vec<P>, work: F) -> Result<Vec<String>, Failure>
where
    P: Send + Sync,
    F: Fn(&P) -> Result<String, Failure> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len().max(1));
    let mut rows: Vec<Option<Result<String, Failure>>> = Vec::new();
    rows.resize_with(points.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut rows);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if index >= points.len() {
                    break;
                }
                let result = work(&points[index]);
                slots.lock().expect("no poisoned rows")[index] = Some(result);
            });
        }
    });
    rows.into_iter()
        .map(|slot| slot.expect("every index visited"))
        .collect()
}

fn sweep_angle(args: &SweepArgs) -> Result<String, Failure> {
    let start = args.start.unwrap_or(0.0);
    let stop = args.stop.unwrap_or(std::f64::consts::FRAC_PI_2);
    let steps = args.steps.unwrap_or(33);
    if steps < 2 || stop < start {
        return Err(Failure::Diagnostics(format!(
            "invalid range: start {start}, stop {stop}, steps {steps}"
        )));
    }
    let n = args.n.max(1);
    let points: Vec<f64> = (0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows = parallel_rows(points, |&phi| {
        let message = teleport_message(n, 2.0 * phi, 0.0)?;
        let run = build_teleportation(n, &message, 1.0)
            .map_err(|e| Failure::Diagnostics(e.to_string()))?;
        let peak = run.profile().map_err(simulation_failure)?.peak.1;
        Ok(format!(
            "{},{},{}",
            format_value(phi),
            format_value(peak),
            format_value(peak - 2.0 * n as f64)
        ))
    })?;
    Ok(assemble_csv("phi,peak_coherence,message_term", rows))
}

fn sweep_size(args: &SweepArgs) -> Result<String, Failure> {
    let sizes: Vec<usize> = match &args.values {
        Some(values) => parse_usize_list(values)?,
        None => (2..=10).collect(),
    };
    let rows = parallel_rows(sizes, |&n| {
        let w = prepare_w(n)
            .and_then(|s| s.relative_entropy_of_coherence())
            .map_err(|e| Failure::Diagnostics(e.to_string()))?;
        let ghz = prepare_ghz(n)
            .and_then(|s| s.relative_entropy_of_coherence())
            .map_err(|e| Failure::Diagnostics(e.to_string()))?;
        Ok(format!("{n},{},{}", format_value(w), format_value(ghz)))
    })?;
    Ok(assemble_csv("n,w_coherence,ghz_coherence", rows))
}

fn sweep_werner(args: &SweepArgs) -> Result<String, Failure> {
    let lambdas: Vec<f64> = match &args.values {
        Some(values) => parse_f64_list(values)?,
        None => vec![1.0, 0.8, 0.6],
    };
    let n = args.n.max(1);
    let rows = parallel_rows(lambdas, |&lambda| {
        let message = QuantumState::zero_state(n);
        let run = build_teleportation(n, &message, lambda)
            .map_err(|e| Failure::Diagnostics(e.to_string()))?;
        let peak = run.profile().map_err(simulation_failure)?.peak.1;
        Ok(format!("{},{}", format_value(lambda), format_value(peak)))
    })?;
    Ok(assemble_csv("werner,peak_coherence", rows))
}

fn sweep_schedule(args: &SweepArgs) -> Result<String, Failure> {
    let links: Vec<usize> = match &args.values {
        Some(values) => parse_usize_list(values)?,
        None => vec![2, 3],
    };
    let mut points = Vec::new();
    for &n in &links {
        points.push((n, RepeaterMode::Sequential, 1usize));
        if n >= 2 {
            points.push((n, RepeaterMode::Parallel(n - 1), n - 1));
        }
    }
    let rows = parallel_rows(points, |&(n, mode, s)| {
        let schedule =
            RepeaterSchedule::new(n, mode).map_err(|e| Failure::Diagnostics(e.to_string()))?;
        let run = repeater_run(&schedule).map_err(map_repeater_error)?;
        let mode_name = if matches!(mode, RepeaterMode::Sequential) {
            "sequential"
        } else {
            "parallel"
        };
        Ok(format!(
            "{n},{mode_name},{s},{},{}",
            format_value(run.measured_peak),
            format_value(run.estimate)
        ))
    })?;
    Ok(assemble_csv("links,mode,s,measured_peak,estimate", rows))
}

fn assemble_csv(header: &str, rows: Vec<String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Failure::Diagnostics(format!("bad integer '{}'", v.trim())))
        })
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Failure::Diagnostics(format!("bad number '{}'", v.trim())))
        })
        .collect()
}

pub fn verify(args: &VerifyArgs) -> Result<i32, Failure> {
    let seed = resolve_seed(args.seed);
    println!("# suite {} seed {seed}", args.suite);
    let outcomes = checks::run_suite(&args.suite, seed).map_err(|e| match e {
        Error::InvalidParams { .. } => Failure::Diagnostics(e.to_string()),
        other => Failure::Simulation(other.to_string()),
    })?;
    let mut all_passed = true;
    for outcome in &outcomes {
        println!("{}", outcome.line());
        all_passed &= outcome.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}
