//! Configure a run from text, write its records and manifest, then read them
//! back for a singularity report.

use ns_alpha::runner::{analyze, run, AnalyzeOptions, RunConfig};

fn main() -> ns_alpha::Result<()> {
    let dir = std::env::temp_dir().join("ns-alpha-example");
    let config = RunConfig::parse(&format!(
        "theta1 = 1/12\ntheta2 = 1/8\nN = 6\nnu = 0.05\nalpha = 0.2\nt_end = 0.5\n\
         init = random\ninit_decay = 2\nseed = 3\ndiag_interval = 5\n\
         records = {}\nsnapshot = {}\n",
        dir.join("run.csv").display(),
        dir.join("final.json").display()
    ))?;
    let summary = run(&config)?;
    println!("{} after {} steps; manifest at {}", summary.manifest.status, summary.steps, config.manifest.display());
    println!("classification: {}", summary.manifest.classification);
    println!("energy identity residual: {:?}", summary.manifest.energy_identity_residual);

    let report = analyze(&AnalyzeOptions { records: config.records.clone(), ..Default::default() })?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
