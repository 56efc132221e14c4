//! Regenerates the bundled example datasets under `data/`.
//!
//! cargo run -p imbreg --example make_datasets -- data

use std::path::PathBuf;

use imbreg::data::{write_csv, Attribute, Dataset, RngStream, Row, Schema, Value};
use rand::Rng;
use rand_distr::{Distribution, Normal, StudentT};

fn cats(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Right-skewed target: log-normal in a linear predictor.
fn lognormal(n: usize) -> Dataset {
    let mut rng = RngStream::new(2024, 1).rng();
    let noise = Normal::new(0.0, 0.35).unwrap();
    let schema = Schema::new(
        vec![
            Attribute::numeric("load"),
            Attribute::numeric("temp"),
            Attribute::nominal("site", cats(&["north", "south", "east"])),
        ],
        "demand",
    )
    .unwrap();
    let rows = (0..n)
        .map(|_| {
            let load: f64 = rng.random_range(0.0..4.0);
            let temp: f64 = rng.random_range(-5.0..30.0);
            let site = rng.random_range(0..3u32);
            let eta = 0.45 * load + 0.02 * temp + [0.0, 0.2, -0.1][site as usize] + noise.sample(&mut rng);
            let y = (eta.exp() * 100.0).round() / 100.0;
            Row::new(
                vec![
                    Value::Num((load * 1000.0).round() / 1000.0),
                    Value::Num((temp * 10.0).round() / 10.0),
                    Value::Cat(site),
                ],
                y,
            )
        })
        .collect();
    Dataset::new(schema, rows).unwrap()
}

/// Heavy tails on both sides: Student-t noise around a smooth signal.
fn heavy_tails(n: usize) -> Dataset {
    let mut rng = RngStream::new(2024, 2).rng();
    let t = StudentT::new(1.5).unwrap();
    let schema = Schema::new(
        vec![
            Attribute::numeric("x1"),
            Attribute::numeric("x2"),
            Attribute::ordinal("size", cats(&["small", "medium", "large"])),
        ],
        "response",
    )
    .unwrap();
    let rows = (0..n)
        .map(|_| {
            let x1: f64 = rng.random_range(-2.0..2.0);
            let x2: f64 = rng.random_range(0.0..1.0);
            let size = rng.random_range(0..3u32);
            let y = 10.0 + 1.5 * x1 + 2.0 * x2 * x2 + size as f64 + t.sample(&mut rng);
            let y = (y * 100.0).round() / 100.0;
            Row::new(
                vec![
                    Value::Num((x1 * 1000.0).round() / 1000.0),
                    Value::Num((x2 * 1000.0).round() / 1000.0),
                    Value::Cat(size),
                ],
                y,
            )
        })
        .collect();
    Dataset::new(schema, rows).unwrap()
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir).unwrap();
    write_csv(dir.join("demand.csv"), &lognormal(240)).unwrap();
    write_csv(dir.join("tails.csv"), &heavy_tails(200)).unwrap();
}
