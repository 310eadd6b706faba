//! Train-time ratio of S=4 against S=1 for the pooled probe.

use roman::bench::{run_grid, BenchDataset, GridConfig, GridOptions};
use roman::probes::ProbeConfig;
use roman::synth::{generate, Family, SynthTaskSpec};

fn main() -> roman::Result<()> {
    let mut spec = SynthTaskSpec::new(Family::Position, 0).with_sizes(200, 200);
    spec.length = 4096;
    let task = generate(&spec)?;
    let data = BenchDataset::new("position-4096", task.train.dataset, task.test.dataset)?;
    let configs = [GridConfig::new(1, 0.5, ProbeConfig::pooled(0)), GridConfig::new(4, 0.5, ProbeConfig::pooled(0))];
    let out = run_grid(&[data], &configs, &[0], GridOptions::default())?;
    for r in &out.records {
        println!("S={} roman {:.3} fit {:.3} predict {:.3} acc {:?}", r.scales, r.t_roman, r.t_fit, r.t_predict, r.accuracy);
    }
    Ok(())
}
