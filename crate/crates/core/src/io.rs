//! On-disk formats.
//!
//! Space JSON: `{"labels": ["a", ...], "matrix": [[0, ...], ...]}` with a
//! full, row-major, symmetric matrix. CSV alternative: a header row of
//! labels, then the square matrix (no quoting; labels must not contain
//! commas). Both are parsed identically; symmetry is enforced at load
//! within EPS, then symmetrized by averaging.
//!
//! Dendrogram JSON: `{"leaves": [...], "merges": [{"height": h,
//! "blocks": [[labels...], ...]}, ...]}` with merges sorted by height
//! ascending and each entry carrying the full partition at that height.
//!
//! All floating-point output is rounded to 12 significant digits.

use serde::{Deserialize, Serialize};

use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};
use crate::space::FiniteMetricSpace;

/// Formats with `digits` significant digits, in plain decimal notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The nearest double to the 12-significant-digit decimal rendering of `x`.
pub fn round_sig12(x: f64) -> f64 {
    fmt_sig(x, 12)
        .parse()
        .expect("fmt_sig emits valid decimals")
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

pub fn space_from_json(text: &str) -> Result<FiniteMetricSpace> {
    let doc: SpaceDoc =
        serde_json::from_str(text).map_err(|e| Error::Io(format!("space json: {e}")))?;
    FiniteMetricSpace::new(doc.labels, doc.matrix)
}

pub fn space_to_json(space: &FiniteMetricSpace) -> String {
    let doc = SpaceDoc {
        labels: space.labels().to_vec(),
        matrix: space
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(round_sig12).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("space doc serializes")
}

pub fn space_from_csv(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Io("csv: missing header row of labels".into()))?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut matrix = Vec::with_capacity(labels.len());
    for (row_no, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Io(format!("csv: row {}: bad number {cell:?}", row_no + 2)))
            })
            .collect::<Result<_>>()?;
        matrix.push(row);
    }
    FiniteMetricSpace::new(labels, matrix)
}

pub fn space_to_csv(space: &FiniteMetricSpace) -> Result<String> {
    if space
        .labels()
        .iter()
        .any(|l| l.contains(',') || l.contains('\n'))
    {
        return Err(Error::invalid(
            "csv output cannot represent labels containing commas or newlines",
        ));
    }
    let mut out = space.labels().join(",");
    out.push('\n');
    for row in space.rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v, 12)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct MergeDoc {
    height: f64,
    blocks: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DendrogramDoc {
    leaves: Vec<String>,
    merges: Vec<MergeDoc>,
}

pub fn dendrogram_to_json(d: &Dendrogram) -> String {
    let leaves = d.leaves();
    let merges: Vec<MergeDoc> = d
        .merge_heights()
        .iter()
        .zip(d.partitions().iter().skip(1))
        .map(|(&h, partition)| MergeDoc {
            height: round_sig12(h),
            blocks: partition
                .iter()
                .map(|block| block.iter().map(|&i| leaves[i].clone()).collect())
                .collect(),
        })
        .collect();
    let doc = DendrogramDoc {
        leaves: leaves.to_vec(),
        merges,
    };
    serde_json::to_string_pretty(&doc).expect("dendrogram doc serializes")
}

pub fn dendrogram_from_json(text: &str) -> Result<Dendrogram> {
    let doc: DendrogramDoc =
        serde_json::from_str(text).map_err(|e| Error::Io(format!("dendrogram json: {e}")))?;
    let index_of = |label: &str| -> Result<usize> {
        doc.leaves.iter().position(|l| l == label).ok_or_else(|| {
            Error::structural(format!("unknown leaf label {label:?} in merge block"))
        })
    };
    let n = doc.leaves.len();
    let mut heights = Vec::with_capacity(doc.merges.len());
    let mut partitions = vec![(0..n).map(|i| vec![i]).collect::<Vec<_>>()];
    for merge in &doc.merges {
        heights.push(merge.height);
        let partition = merge
            .blocks
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|l| index_of(l))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        partitions.push(partition);
    }
    Dendrogram::new(doc.leaves, heights, partitions)
}
