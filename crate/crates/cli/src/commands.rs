//! The file-in, file-out subcommands.

use std::path::Path;

use dirsimplex::datagen::Dataset;
use dirsimplex::io::{read_complex, read_digraph, read_undirected, write_complex};
use dirsimplex::{adjacency, distinguish, lift_directed_flag, lift_undirected_flag, AdjacencySpec, DirectedSimplicialComplex, Direction};
use dirsimplex::{RefineOptions, Variant};
use serde_json::json;

use crate::bench::{build_task, signals, Cell};
use crate::config::ExperimentConfig;
use crate::error::{read_to_string, Result};

/// `0:a 1:b ...` up to `max_dim`, zeros included.
pub fn count_line(k: &DirectedSimplicialComplex, max_dim: usize) -> String {
    (0..=max_dim).map(|d| format!("{d}:{}", k.count(d))).collect::<Vec<_>>().join(" ")
}

pub fn lift(graph_text: &str, directed: bool, max_dim: usize) -> Result<DirectedSimplicialComplex> {
    Ok(if directed { lift_directed_flag(&read_digraph(graph_text)?, max_dim) } else { lift_undirected_flag(&read_undirected(graph_text)?, max_dim) })
}

pub fn lift_file(path: &Path, directed: bool, max_dim: usize) -> Result<(String, String)> {
    let k = lift(&read_to_string(path)?, directed, max_dim)?;
    Ok((write_complex(&k), count_line(&k, max_dim)))
}

pub fn adjacency_text(complex_text: &str, dim: usize, direction: Direction, k: usize, i: usize, j: usize) -> Result<String> {
    let complex = read_complex(complex_text)?;
    let spec = AdjacencySpec { direction, k, i, j };
    Ok(adjacency(&complex, dim, spec)?.to_text())
}

/// Verdict, per-dimension histograms and round counts as pretty JSON.
pub fn dswl_json(a_text: &str, b_text: &str, opts: RefineOptions) -> Result<String> {
    let (a, b) = (read_complex(a_text)?, read_complex(b_text)?);
    let (verdict, ra, rb) = distinguish(&a, &b, opts);
    let hist = |r: &dirsimplex::dswl::Refinement| -> Vec<Vec<[u64; 2]>> {
        r.histogram.0.iter().map(|h| h.iter().map(|(&c, &n)| [c as u64, n as u64]).collect()).collect()
    };
    let variant = match opts.variant {
        Variant::Full => "full",
        Variant::Reduced => "reduced",
    };
    let v = json!({
        "verdict": verdict.as_str(),
        "variant": variant,
        "rounds": [ra.rounds, rb.rounds],
        "histograms": [hist(&ra), hist(&rb)],
    });
    Ok(serde_json::to_string_pretty(&v).expect("json value serializes"))
}

/// Generates one dataset with the configured SBM and signal parameters.
pub fn datagen(cfg: &ExperimentConfig, directed: bool, snr_db: f64, seed: u64) -> Result<Dataset> {
    let task = build_task(cfg, directed, seed)?;
    let cell = Cell { directed, snr_db, seed };
    let samples = signals(cfg, &task, &cell)?;
    Ok(Dataset::from_samples(&samples, task.num_edges(), snr_db, seed, directed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_counts() {
        let fig = "n 4\n0 1\n1 2\n0 2\n2 3\n3 0\n";
        assert_eq!(count_line(&lift(fig, true, 2).unwrap(), 2), "0:4 1:5 2:1");
        assert_eq!(count_line(&lift("n 3\n0 1\n1 2\n2 0\n", true, 2).unwrap(), 2), "0:3 1:3 2:0");
        assert_eq!(count_line(&lift("n 3\n", true, 2).unwrap(), 2), "0:3 1:0 2:0");
    }

    #[test]
    fn dswl_file_against_itself() {
        let k = write_complex(&lift("n 4\n0 1\n1 2\n0 2\n2 3\n", true, 2).unwrap());
        let out = dswl_json(&k, &k, RefineOptions::default()).unwrap();
        assert!(out.contains("\"not-distinguished\""), "{out}");
    }
}
