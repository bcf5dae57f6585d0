use std::io::Write;
use std::path::Path;
use std::time::Instant;

use mdiqkd_core::protocol::{run_session, run_session_traced, ProtocolConfig, Round, SessionReport};
use serde::Serialize;

use crate::scenario::ScenarioFile;
use crate::{CliError, CliResult, TOOL_VERSION};

/// What `run` writes. `wall_clock_seconds` is the only field that differs
/// between two runs of the same scenario.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile {
    pub tool_version: &'static str,
    pub config: ProtocolConfig,
    pub report: SessionReport,
    pub wall_clock_seconds: f64,
}

/// One trace row per round.
#[derive(Debug, Serialize)]
struct TraceRow {
    index: u64,
    alice_basis: &'static str,
    alice_index: u8,
    alice_intensity: Option<String>,
    photons_sent: usize,
    bob_operator: Option<String>,
    pnp_basis: Option<&'static str>,
    measurement_basis: &'static str,
    outcome: Option<u8>,
    sift_verdict: &'static str,
    alice_bit: Option<u8>,
    bob_bit: Option<u8>,
    eve_guess: Option<u8>,
    eve_operator_guess: Option<String>,
}

impl From<&Round> for TraceRow {
    fn from(r: &Round) -> Self {
        Self {
            index: r.index,
            alice_basis: r.alice_basis.tag(),
            alice_index: r.alice_index,
            alice_intensity: r
                .alice_intensity
                .map(|l| serde_json::to_value(l).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()),
            photons_sent: r.photons_sent,
            bob_operator: r.bob_operator.as_ref().map(|o| o.to_string()),
            pnp_basis: r.pnp_basis.map(|b| b.tag()),
            measurement_basis: r.measurement_basis.tag(),
            outcome: r.eve_outcome,
            sift_verdict: r.sift_verdict.name(),
            alice_bit: r.alice_bit,
            bob_bit: r.bob_bit,
            eve_guess: r.eve_guess,
            eve_operator_guess: r.eve_operator_guess.as_ref().map(|o| o.to_string()),
        }
    }
}

/// Validates and runs a scenario. Returns the report and, if asked, the rounds.
pub fn execute(scenario: &ScenarioFile, seed: Option<u64>, trace: bool) -> CliResult<(ReportFile, Vec<Round>)> {
    let mut config = scenario.to_config();
    if let Some(s) = seed {
        config.seed = s;
    }
    config.prepare().map_err(|e| CliError::Config(e.to_string()))?;
    let start = Instant::now();
    let (report, rounds) = if trace {
        run_session_traced(&config)
    } else {
        run_session(&config).map(|r| (r, Vec::new()))
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    let file = ReportFile {
        tool_version: TOOL_VERSION,
        config,
        report,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((file, rounds))
}

pub fn report_json(report: &ReportFile) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_trace<W: Write>(rounds: &[Round], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rounds {
        w.serialize(TraceRow::from(r)).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn write_trace_file(rounds: &[Round], path: &Path) -> CliResult<()> {
    let f = std::fs::File::create(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    write_trace(rounds, std::io::BufWriter::new(f))
}
