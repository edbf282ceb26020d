//! Library backing the `qrev` binary: command dispatch, JSON input/output,
//! built-in fixtures, and the exit-code taxonomy.
//!
//! Exit codes: `0` success, `2` validation error (malformed or inconsistent
//! input, reported as `{"error": {"code", "message"}}`), `3` mathematical
//! rejection (not reversible, invalid scheme, vanishing probability), with a
//! structured verdict where one exists. Output bytes are a pure function of
//! `(config, input)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};


use qrev::channels::DensityMatrix;
use qrev::error::Error;
use qrev::json::{
    CertificateJson, CharacterizationJson, MatrixJson, MeasurementJson, SchemeJson,
    StateVectorJson, SubspaceJson, VerdictJson,
};
use qrev::mz::{build_measurement, demo_reverse, reversible_subspace, MabuchiZollerParams};
use qrev::reversal::{
    check_condition2, check_condition3, construct_reversal, information_gain_check,
};
use qrev::teleport::TeleportationScheme;
use qrev::{Ideal64, Matrix64, Measurement64, Operation64, StateVector64, Subspace64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;

/// Subcommands of the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckReversible,
    Reverse,
    InfoGain,
    MzDemo,
    TeleportVerify,
    TeleportCharacterize,
    TeleportBuild,
    Simulate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CheckReversible => "check-reversible",
            Self::Reverse => "reverse",
            Self::InfoGain => "info-gain",
            Self::MzDemo => "mz-demo",
            Self::TeleportVerify => "teleport-verify",
            Self::TeleportCharacterize => "teleport-characterize",
            Self::TeleportBuild => "teleport-build",
            Self::Simulate => "simulate",
        }
    }
}

/// Resolved invocation parameters.
#[derive(Clone, Debug)]
pub struct CliConfig {
    pub command: Command,
    pub tolerance: f64,
    pub seed: u64,
    pub pretty: bool,
}

impl CliConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            tolerance: 1e-8,
            seed: 0,
            pretty: false,
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: String,
}

fn error_output(pretty: bool, exit: i32, code: &str, message: String) -> (i32, Vec<u8>) {
    let body = ErrorBody {
        error: ErrorDetail { code, message },
    };
    (exit, render(pretty, &body))
}

fn render<S: Serialize>(pretty: bool, value: &S) -> Vec<u8> {
    let mut bytes = if pretty {
        serde_json::to_vec_pretty(value).expect("serializable output")
    } else {
        serde_json::to_vec(value).expect("serializable output")
    };
    bytes.push(b'\n');
    bytes
}

/// Classify a domain error into the exit-code taxonomy.
fn domain_error(pretty: bool, err: Error) -> (i32, Vec<u8>) {
    let (exit, code) = match &err {
        Error::Shape(_) => (EXIT_INVALID, "shape"),
        Error::NotHermitian { .. } => (EXIT_INVALID, "not-hermitian"),
        Error::NotPsd { .. } => (EXIT_INVALID, "not-psd"),
        Error::InvalidParameter(_) => (EXIT_INVALID, "invalid-parameter"),
        Error::OutcomeIndex { .. } => (EXIT_INVALID, "outcome-index"),
        Error::ZeroProbability => (EXIT_REJECTED, "zero-probability"),
        Error::NotReversible { .. } => (EXIT_REJECTED, "not-reversible"),
        Error::DegenerateMeasurement => (EXIT_REJECTED, "degenerate-measurement"),
        Error::Infeasible(_) => (EXIT_REJECTED, "infeasible"),
    };
    error_output(pretty, exit, code, err.to_string())
}

/// Run one command over raw input bytes. Returns `(exit code, output bytes)`
/// and never panics on malformed input.
pub fn run(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    if config.tolerance <= 0.0 {
        return error_output(
            config.pretty,
            EXIT_INVALID,
            "invalid-parameter",
            "tolerance must be positive".into(),
        );
    }
    match config.command {
        Command::CheckReversible => check_reversible(config, input),
        Command::Reverse => reverse(config, input),
        Command::InfoGain => info_gain(config, input),
        Command::MzDemo => mz_demo(config, input),
        Command::TeleportVerify => teleport_verify(config, input),
        Command::TeleportCharacterize => teleport_characterize(config, input),
        Command::TeleportBuild => teleport_build(config, input),
        Command::Simulate => simulate(config, input),
    }
}

fn parse_input<'de, D: Deserialize<'de>>(input: &'de [u8]) -> Result<D, (i32, &'static str, String)> {
    serde_json::from_slice(input).map_err(|e| (EXIT_INVALID, "parse", e.to_string()))
}

macro_rules! try_parse {
    ($config:expr, $input:expr) => {
        match parse_input($input) {
            Ok(v) => v,
            Err((exit, code, msg)) => return error_output($config.pretty, exit, code, msg),
        }
    };
}

macro_rules! try_domain {
    ($config:expr, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return domain_error($config.pretty, e),
        }
    };
}

#[derive(Deserialize)]
struct OperationInput {
    operation: MatrixJson,
    subspace: SubspaceJson,
}

#[derive(Serialize)]
struct CheckOutput {
    accepted: bool,
    mu_squared: f64,
    residual: f64,
    condition3_spread: f64,
    tolerance: f64,
}

fn check_reversible(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: OperationInput = try_parse!(config, input);
    let matrix = try_domain!(config, Matrix64::try_from(&parsed.operation));
    let op = try_domain!(config, Ideal64::new(matrix));
    let subspace = try_domain!(config, Subspace64::try_from(&parsed.subspace));
    let report = try_domain!(config, check_condition2(&op, &subspace, config.tolerance));
    let c3 = try_domain!(
        config,
        check_condition3(&op, &subspace, 50, config.seed, config.tolerance)
    );
    let body = CheckOutput {
        accepted: report.accepted,
        mu_squared: report.mu_squared,
        residual: report.residual,
        condition3_spread: c3.spread,
        tolerance: config.tolerance,
    };
    let exit = if report.accepted { EXIT_OK } else { EXIT_REJECTED };
    (exit, render(config.pretty, &body))
}

#[derive(Serialize)]
struct RejectionOutput {
    accepted: bool,
    mu_squared: f64,
    residual: f64,
}

fn reverse(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: OperationInput = try_parse!(config, input);
    let matrix = try_domain!(config, Matrix64::try_from(&parsed.operation));
    let op = try_domain!(config, Ideal64::new(matrix));
    let subspace = try_domain!(config, Subspace64::try_from(&parsed.subspace));
    match construct_reversal(&op, &subspace, config.tolerance) {
        Ok(cert) => (EXIT_OK, render(config.pretty, &CertificateJson::from(&cert))),
        Err(Error::NotReversible {
            residual,
            mu_squared,
        }) => {
            let body = RejectionOutput {
                accepted: false,
                mu_squared,
                residual,
            };
            (EXIT_REJECTED, render(config.pretty, &body))
        }
        Err(e) => domain_error(config.pretty, e),
    }
}

#[derive(Deserialize)]
struct InfoGainInput {
    kraus: Vec<MatrixJson>,
    subspace: SubspaceJson,
}

#[derive(Serialize)]
struct InfoGainOutput {
    accepted: bool,
    mu_squared: f64,
    eigenvalue_spread: f64,
}

fn info_gain(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: InfoGainInput = try_parse!(config, input);
    let kraus = try_domain!(
        config,
        parsed
            .kraus
            .iter()
            .map(Matrix64::try_from)
            .collect::<Result<Vec<_>, _>>()
    );
    let op = try_domain!(config, Operation64::new(kraus));
    let subspace = try_domain!(config, Subspace64::try_from(&parsed.subspace));
    let report = try_domain!(
        config,
        information_gain_check(&op, &subspace, config.tolerance)
    );
    let body = InfoGainOutput {
        accepted: report.accepted,
        mu_squared: report.mu_squared,
        eigenvalue_spread: report.eigenvalue_spread,
    };
    let exit = if report.accepted { EXIT_OK } else { EXIT_REJECTED };
    (exit, render(config.pretty, &body))
}

#[derive(Deserialize)]
struct MzInput {
    delta: f64,
    cutoff: usize,
    #[serde(default)]
    hamiltonian: Option<MatrixJson>,
    alpha: [f64; 2],
    beta: [f64; 2],
}

#[derive(Serialize)]
struct MzDemoOutput {
    outcome: String,
    probabilities: Vec<f64>,
    fidelity_before_reversal: f64,
    fidelity_after_reversal: f64,
}

fn mz_demo(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: MzInput = try_parse!(config, input);
    let hamiltonian = match &parsed.hamiltonian {
        Some(j) => Some(try_domain!(config, Matrix64::try_from(j))),
        None => None,
    };
    let params = try_domain!(
        config,
        MabuchiZollerParams::new(parsed.delta, parsed.cutoff, hamiltonian)
    );
    let demo = try_domain!(
        config,
        demo_reverse(
            &params,
            Complex::new(parsed.alpha[0], parsed.alpha[1]),
            Complex::new(parsed.beta[0], parsed.beta[1]),
            config.seed,
        )
    );
    let body = MzDemoOutput {
        outcome: demo.outcome,
        probabilities: demo.probabilities,
        fidelity_before_reversal: demo.fidelity_before,
        fidelity_after_reversal: demo.fidelity_after,
    };
    (EXIT_OK, render(config.pretty, &body))
}

fn teleport_verify(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: SchemeJson = try_parse!(config, input);
    let scheme = try_domain!(config, TeleportationScheme::try_from(&parsed));
    let verdict = try_domain!(config, scheme.verify(config.tolerance));
    let exit = if verdict.valid { EXIT_OK } else { EXIT_REJECTED };
    (exit, render(config.pretty, &VerdictJson::from(&verdict)))
}

fn teleport_characterize(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: SchemeJson = try_parse!(config, input);
    let scheme = try_domain!(config, TeleportationScheme::try_from(&parsed));
    let report = try_domain!(config, scheme.characterize(config.tolerance));
    let exit = if report.valid { EXIT_OK } else { EXIT_REJECTED };
    (exit, render(config.pretty, &CharacterizationJson::from(&report)))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum BuildInput {
    Bell,
    General { d: usize },
    Overcomplete { d: usize, n: usize },
}

fn teleport_build(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: BuildInput = try_parse!(config, input);
    let scheme = match parsed {
        BuildInput::Bell => TeleportationScheme::bell(),
        BuildInput::General { d } => {
            try_domain!(config, TeleportationScheme::generalized(d))
        }
        BuildInput::Overcomplete { d, n } => {
            try_domain!(config, TeleportationScheme::overcomplete(d, n, config.seed))
        }
    };
    (EXIT_OK, render(config.pretty, &SchemeJson::from(&scheme)))
}

#[derive(Deserialize)]
struct SimulateInput {
    measurement: MeasurementJson,
    #[serde(default)]
    state: Option<StateVectorJson>,
    #[serde(default)]
    density: Option<MatrixJson>,
}

#[derive(Serialize)]
struct SimulateOutput {
    label: String,
    probabilities: Vec<f64>,
    posterior: MatrixJson,
}

fn simulate(config: &CliConfig, input: &[u8]) -> (i32, Vec<u8>) {
    let parsed: SimulateInput = try_parse!(config, input);
    let measurement = try_domain!(config, Measurement64::try_from(&parsed.measurement));
    let rho = match (&parsed.state, &parsed.density) {
        (Some(sv), None) => {
            let psi = try_domain!(config, StateVector64::try_from(sv));
            DensityMatrix::from_pure(&psi)
        }
        (None, Some(mj)) => {
            let matrix = try_domain!(config, Matrix64::try_from(mj));
            try_domain!(config, DensityMatrix::new(matrix))
        }
        _ => {
            return error_output(
                config.pretty,
                EXIT_INVALID,
                "invalid-parameter",
                "provide exactly one of \"state\" or \"density\"".into(),
            )
        }
    };
    let probabilities = try_domain!(config, measurement.outcome_probabilities(&rho));
    let (label, posterior) = try_domain!(config, measurement.sample_outcome(&rho, config.seed));
    let body = SimulateOutput {
        label,
        probabilities,
        posterior: MatrixJson::from(posterior.matrix()),
    };
    (EXIT_OK, render(config.pretty, &body))
}

/// Names of the built-in fixtures.
pub const FIXTURE_NAMES: [&str; 4] = ["mz-default", "bell", "general-3", "bad-product"];

/// Built-in input documents selectable with `--fixture <name>`.
///
/// `bell`, `general-3`, and `bad-product` are teleportation schemes;
/// `mz-default` is a composite document carrying the default Mabuchi–Zoller
/// scenario (Δ = 0.1, cutoff 2, h = 0, α = β = 1/√2) together with the
/// outcome-1 operator, the reversible subspace, the full measurement, and
/// the prepared state, so every subcommand can pull the fields it needs.
pub fn fixture(name: &str) -> Option<Vec<u8>> {
    let mut bytes = match name {
        "bell" => serde_json::to_vec(&SchemeJson::from(&TeleportationScheme::<f64>::bell()))
            .expect("serializable"),
        "general-3" => serde_json::to_vec(&SchemeJson::from(
            &TeleportationScheme::<f64>::generalized(3).expect("d=3 valid"),
        ))
        .expect("serializable"),
        "bad-product" => {
            let bell = TeleportationScheme::<f64>::bell();
            let product = TeleportationScheme::new(
                2,
                StateVector64::basis(4, 0),
                bell.measurement().to_vec(),
            )
            .expect("complete measurement, product resource");
            serde_json::to_vec(&SchemeJson::from(&product)).expect("serializable")
        }
        "mz-default" => serde_json::to_vec(&mz_default_fixture()).expect("serializable"),
        _ => return None,
    };
    bytes.push(b'\n');
    Some(bytes)
}

/// Composite scenario document for `mz-default`.
#[derive(Serialize)]
struct MzFixture {
    delta: f64,
    cutoff: usize,
    hamiltonian: Option<MatrixJson>,
    alpha: [f64; 2],
    beta: [f64; 2],
    operation: MatrixJson,
    kraus: Vec<MatrixJson>,
    subspace: SubspaceJson,
    measurement: MeasurementJson,
    state: StateVectorJson,
}

fn mz_default_fixture() -> MzFixture {
    let params = MabuchiZollerParams::<f64>::default_scenario();
    let measurement = build_measurement(&params).expect("default params valid");
    let subspace = reversible_subspace(&params).expect("cutoff 2");
    let a1 = measurement.outcomes()[0].1.kraus()[0].clone();
    let amp = 0.5f64.sqrt();
    let mut amps = vec![Complex::new(0.0, 0.0); params.joint_dim()];
    amps[params.joint_index(2, 0)] = Complex::new(amp, 0.0);
    amps[params.joint_index(0, 2)] = Complex::new(amp, 0.0);
    let state = StateVector64::new(amps).expect("normalized");

    MzFixture {
        delta: 0.1,
        cutoff: 2,
        hamiltonian: None,
        alpha: [amp, 0.0],
        beta: [amp, 0.0],
        operation: MatrixJson::from(&a1),
        kraus: vec![MatrixJson::from(&a1)],
        subspace: SubspaceJson::from(&subspace),
        measurement: MeasurementJson::from(&measurement),
        state: StateVectorJson::from(&state),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn run_ok(command: Command, input: &[u8]) -> serde_json::Value {
        let (exit, out) = run(&CliConfig::new(command), input);
        assert_eq!(exit, EXIT_OK, "output: {}", String::from_utf8_lossy(&out));
        serde_json::from_slice(&out).unwrap()
    }

    #[test]
    fn check_reversible_on_mz_fixture_reports_delta() {
        let input = fixture("mz-default").unwrap();
        let out = run_ok(Command::CheckReversible, &input);
        assert_eq!(out["accepted"], Value::Bool(true));
        assert!((out["mu_squared"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn teleport_verify_on_bell_fixture() {
        let input = fixture("bell").unwrap();
        let out = run_ok(Command::TeleportVerify, &input);
        assert_eq!(out["valid"], Value::Bool(true));
        for p in out["probabilities"].as_array().unwrap() {
            assert!((p.as_f64().unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_product_fixture_is_rejected_with_exit_3() {
        let input = fixture("bad-product").unwrap();
        let (exit, out) = run(&CliConfig::new(Command::TeleportVerify), &input);
        assert_eq!(exit, EXIT_REJECTED);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["valid"], Value::Bool(false));
        assert!(!v["violations"].as_array().unwrap().is_empty());
    }

    #[test]
    fn truncated_input_gives_parse_error() {
        let (exit, out) = run(&CliConfig::new(Command::TeleportVerify), b"{\"d\": 2,");
        assert_eq!(exit, EXIT_INVALID);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["error"]["code"], Value::String("parse".into()));
    }

    #[test]
    fn unknown_fixture_is_none() {
        assert!(fixture("nope").is_none());
    }

    #[test]
    fn fixture_bell_equals_builder_json() {
        let via_fixture = fixture("bell").unwrap();
        let direct = {
            let mut b =
                serde_json::to_vec(&SchemeJson::from(&TeleportationScheme::<f64>::bell()))
                    .unwrap();
            b.push(b'\n');
            b
        };
        assert_eq!(via_fixture, direct);
    }

    #[test]
    fn outputs_are_byte_identical_across_runs() {
        for (command, name) in [
            (Command::MzDemo, "mz-default"),
            (Command::TeleportVerify, "bell"),
            (Command::TeleportCharacterize, "general-3"),
            (Command::TeleportVerify, "bad-product"),
        ] {
            let input = fixture(name).unwrap();
            let (e1, o1) = run(&CliConfig::new(command), &input);
            let (e2, o2) = run(&CliConfig::new(command), &input);
            assert_eq!(e1, e2);
            assert_eq!(o1, o2, "fixture {name}");
        }
    }

    #[test]
    fn mz_demo_reports_probabilities_and_restoration() {
        let input = fixture("mz-default").unwrap();
        let out = run_ok(Command::MzDemo, &input);
        let probs = out["probabilities"].as_array().unwrap();
        assert!((probs[0].as_f64().unwrap() - 0.1).abs() < 1e-12);
        assert!((probs[2].as_f64().unwrap() - 0.8).abs() < 1e-12);
        assert!(out["fidelity_after_reversal"].as_f64().unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn simulate_runs_on_the_mz_fixture() {
        let input = fixture("mz-default").unwrap();
        let out = run_ok(Command::Simulate, &input);
        assert!(out["label"].is_string());
        assert_eq!(out["posterior"]["rows"], Value::from(9));
    }

    #[test]
    fn reverse_emits_certificate_and_round_trips() {
        let input = fixture("mz-default").unwrap();
        let out = run_ok(Command::Reverse, &input);
        let cert: CertificateJson = serde_json::from_value(out).unwrap();
        assert!((cert.mu_squared - 0.1).abs() < 1e-12);
        assert_eq!(cert.unitary.rows, 9);
    }

    #[test]
    fn info_gain_on_single_outcome_set() {
        let input = fixture("mz-default").unwrap();
        let out = run_ok(Command::InfoGain, &input);
        assert_eq!(out["accepted"], Value::Bool(true));
        assert!((out["mu_squared"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn teleport_build_general_then_verify() {
        let (exit, out) = run(
            &CliConfig::new(Command::TeleportBuild),
            br#"{"kind": "general", "d": 3}"#,
        );
        assert_eq!(exit, EXIT_OK);
        let (exit2, out2) = run(&CliConfig::new(Command::TeleportVerify), &out);
        assert_eq!(exit2, EXIT_OK);
        let v: Value = serde_json::from_slice(&out2).unwrap();
        assert_eq!(v["valid"], Value::Bool(true));
    }

    #[test]
    fn teleport_build_overcomplete_infeasible_n() {
        let (exit, out) = run(
            &CliConfig::new(Command::TeleportBuild),
            br#"{"kind": "overcomplete", "d": 2, "n": 7}"#,
        );
        assert_eq!(exit, EXIT_REJECTED);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["error"]["code"], Value::String("infeasible".into()));
    }

    #[test]
    fn loosening_tolerance_never_invalidates() {
        let input = fixture("bell").unwrap();
        for tol in [1e-10, 1e-8, 1e-4, 1e-2] {
            let mut config = CliConfig::new(Command::TeleportVerify);
            config.tolerance = tol;
            let (exit, _) = run(&config, &input);
            assert_eq!(exit, EXIT_OK, "tolerance {tol}");
        }
    }
}
