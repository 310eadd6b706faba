//! Routed-vs-raw accuracy on the synthetic tasks.
//!
//! `cargo run --release --example mechanisms -- <family> <pooled|flatten> <seeds>`

use std::time::Instant;

use roman::probes::ProbeConfig;
use roman::synth::{generate, Family, SynthTaskSpec};
use roman::{route_batch, RomanConfig};

fn main() -> roman::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let family: Family = args.get(1).map_or("position", |s| s.as_str()).parse()?;
    let probe = args.get(2).map_or("pooled", |s| s.as_str());
    let seeds: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(3);
    for scales in [1, 4] {
        let cfg = RomanConfig::with_depth(scales, 0.5)?;
        let started = Instant::now();
        let mut accs = Vec::new();
        for seed in 0..seeds {
            let task = generate(&SynthTaskSpec::new(family, seed))?;
            let (train, _) = route_batch(task.train.dataset.view(), &cfg)?;
            let (test, _) = route_batch(task.test.dataset.view(), &cfg)?;
            let probe_cfg = if probe == "flatten" { ProbeConfig::flatten(seed) } else { ProbeConfig::pooled(seed) };
            let model = probe_cfg.fit(train.view(), task.train.labels())?;
            let pred = model.predict(test.view())?;
            let hits = pred.iter().zip(task.test.labels()).filter(|(a, b)| a == b).count();
            accs.push(hits as f64 / pred.len() as f64);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        println!("{family} {probe} S={scales} {accs:.3?} mean {mean:.3} ({:.1}s)", started.elapsed().as_secs_f64());
    }
    Ok(())
}
