mod args;
mod commands;
mod manifest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qcrystal::{Error, Result};

use args::{Cli, Command};
use commands::Outcome;
use manifest::{io_error, sha256_hex, sidecar, OutputRecord, RunManifest, MANIFEST_SUFFIX};

fn execute(cli: &Cli) -> Result<Outcome> {
    let seed = cli.common.seed;
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Condensate(a) => commands::condensate(a, seed),
        Command::HeatCapacity(a) => commands::heat_capacity(a),
        Command::QTemperature(a) => commands::q_temperature(a),
        Command::SampleEvents(a) => commands::sample_events(a, seed),
        Command::Fit(a) => commands::fit(a),
        Command::Compare(a) => commands::compare(a),
        Command::Rerun(_) => Err(Error::InvalidInput(
            "a manifest cannot record a rerun".into(),
        )),
    }
}

fn in_pool<T: Send>(threads: Option<u64>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Configuration(format!("cannot start thread pool: {e}"))),
    }
}

fn write_file(path: &std::path::Path, content: &str) -> Result<OutputRecord> {
    std::fs::write(path, content).map_err(|e| io_error(path, e))?;
    Ok(OutputRecord {
        path: path.to_path_buf(),
        sha256: sha256_hex(content.as_bytes()),
    })
}

/// Runs one invocation and routes its outputs; returns the records of written files.
fn run(cli: &Cli) -> Result<Vec<OutputRecord>> {
    let outcome = in_pool(cli.common.threads, || execute(cli))??;
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    let mut records = Vec::new();
    match &cli.common.out {
        Some(out) => {
            records.push(write_file(out, &outcome.data)?);
            if let Some((explicit, suffix, content)) = &outcome.report {
                let path = explicit.clone().unwrap_or_else(|| sidecar(out, suffix));
                records.push(write_file(&path, content)?);
            }
            RunManifest::new(cli, records.clone()).write(&sidecar(out, MANIFEST_SUFFIX))?;
            let _ = stdout.write_all(outcome.summary.as_bytes());
        }
        None => {
            let _ = stdout.write_all(outcome.data.as_bytes());
            match &outcome.report {
                Some((Some(path), _, content)) => records.push(write_file(path, content)?),
                Some((None, _, content)) => {
                    let _ = stderr.write_all(content.as_bytes());
                }
                None => {}
            }
            let _ = stderr.write_all(outcome.summary.as_bytes());
        }
    }
    Ok(records)
}

fn rerun(cli: &Cli, manifest_path: &std::path::Path) -> Result<()> {
    let manifest = RunManifest::read(manifest_path)?;
    let mut invocation = manifest.invocation.clone();
    if matches!(invocation.command, Command::Rerun(_)) {
        return Err(Error::Configuration("manifest records a rerun".into()));
    }
    if cli.common.out.is_some() {
        invocation.common.out.clone_from(&cli.common.out);
    }
    if cli.common.threads.is_some() {
        invocation.common.threads = cli.common.threads;
    }
    let records = run(&invocation)?;
    if manifest.outputs.is_empty() {
        eprintln!("rerun complete (the manifest recorded no output hashes)");
        return Ok(());
    }
    if records.len() != manifest.outputs.len() {
        return Err(Error::Validation(format!(
            "rerun produced {} output(s), the manifest records {}",
            records.len(),
            manifest.outputs.len()
        )));
    }
    for (new, old) in records.iter().zip(&manifest.outputs) {
        if new.sha256 != old.sha256 {
            return Err(Error::Validation(format!(
                "{} differs from the recorded {} (sha256 {} vs {})",
                new.path.display(),
                old.path.display(),
                new.sha256,
                old.sha256
            )));
        }
    }
    eprintln!(
        "reproduced {} output(s) byte-identically",
        manifest.outputs.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rerun(r) => rerun(&cli, &r.manifest),
        _ => run(&cli).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
