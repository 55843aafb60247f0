//! Node embeddings fed to the graph neural networks.
//!
//! Column order is fixed: eigenvector centrality, harmonic closeness,
//! in-degree, out-degree, PageRank, greedy color, grounded status, then the
//! h-cat, nsa, Mbs and Cbs degrees. The `P128` layout appends 117
//! pseudo-random columns. Structural columns are min-max scaled per graph,
//! a constant column becomes all zeros.

pub mod centrality;

use std::fmt;
use std::io;
use std::str::FromStr;

use ndarray::Array2;

use crate::af::ArgumentationFramework;
use crate::gradual::{self, GradualSemantics};
use crate::grounded::GroundedLabelling;

/// Bumped whenever the column order or a column definition changes; stored
/// in model files next to the layout tag.
pub const FEATURE_SCHEMA_VERSION: u32 = 1;

pub const MEANINGFUL_COLUMNS: [&str; 11] = [
    "eigenvector",
    "closeness",
    "in_degree",
    "out_degree",
    "pagerank",
    "coloring",
    "grounded",
    "h_cat",
    "nsa",
    "mbs",
    "cbs",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureLayout {
    P11,
    P128,
}

impl FeatureLayout {
    pub fn width(self) -> usize {
        match self {
            FeatureLayout::P11 => 11,
            FeatureLayout::P128 => 128,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureLayout::P11 => "P11",
            FeatureLayout::P128 => "P128",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            FeatureLayout::P11 => 0,
            FeatureLayout::P128 => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(FeatureLayout::P11),
            1 => Some(FeatureLayout::P128),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown feature layout `{0}` (expected P11 or P128)")]
pub struct UnknownLayout(pub String);

impl FromStr for FeatureLayout {
    type Err = UnknownLayout;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "P11" => Ok(FeatureLayout::P11),
            "P128" => Ok(FeatureLayout::P128),
            _ => Err(UnknownLayout(s.to_string())),
        }
    }
}

/// Maps `values` onto [0, 1]; a constant column maps to all zeros.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| (v - lo) / span).collect()
}

pub fn eigenvector_centrality(af: &ArgumentationFramework) -> Vec<f64> {
    min_max(&centrality::eigenvector(&af.undirected_neighbors()))
}

pub fn closeness_centrality(af: &ArgumentationFramework) -> Vec<f64> {
    min_max(&centrality::harmonic_closeness(&af.undirected_neighbors()))
}

pub fn pagerank(af: &ArgumentationFramework) -> Vec<f64> {
    min_max(&centrality::pagerank(af))
}

pub fn greedy_coloring(af: &ArgumentationFramework) -> Vec<f64> {
    let colors: Vec<f64> = centrality::greedy_coloring(&af.undirected_neighbors())
        .into_iter()
        .map(|c| c as f64)
        .collect();
    min_max(&colors)
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random feature for `(seed, node, column)`: the splitmix64 finalizer applied
/// to `seed + 0x9E3779B97F4A7C15 · (128 · node + column + 1)`, top 53 bits
/// scaled to [0, 1). `node` is the 0-based argument index and `column` the
/// absolute column index (11..128).
pub fn random_feature(seed: u64, node: usize, column: usize) -> f64 {
    let counter = (node as u64)
        .wrapping_mul(128)
        .wrapping_add(column as u64)
        .wrapping_add(1);
    let z = splitmix64(seed.wrapping_add(counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub layout: FeatureLayout,
    pub seed: u64,
    /// `n × layout.width()`, row per argument.
    pub values: Array2<f64>,
}

impl FeatureMatrix {
    pub fn column_names(&self) -> Vec<String> {
        column_names(self.layout)
    }

    pub fn num_rows(&self) -> usize {
        self.values.nrows()
    }

    /// Columnar text export: a header naming every column, then one line per
    /// argument starting with its 1-based id. Floats are written in shortest
    /// round-trip form so re-exports are byte-identical.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["argument".to_string()];
        header.extend(self.column_names());
        w.write_record(&header)?;
        for (i, row) in self.values.rows().into_iter().enumerate() {
            let mut record = vec![(i + 1).to_string()];
            record.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn column_names(layout: FeatureLayout) -> Vec<String> {
    let mut names: Vec<String> = MEANINGFUL_COLUMNS.iter().map(|s| s.to_string()).collect();
    names.extend((11..layout.width()).map(|c| format!("random_{c}")));
    names
}

pub fn build_embedding(
    af: &ArgumentationFramework,
    lab: &GroundedLabelling,
    layout: FeatureLayout,
    seed: u64,
) -> FeatureMatrix {
    let n = af.num_arguments();
    let adj = af.undirected_neighbors();
    let degrees = af.degrees();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(11);

    let ((eigen, closeness), (pr, coloring)) = rayon::join(
        || {
            rayon::join(
                || min_max(&centrality::eigenvector(&adj)),
                || min_max(&centrality::harmonic_closeness(&adj)),
            )
        },
        || {
            let colors: Vec<f64> = centrality::greedy_coloring(&adj)
                .into_iter()
                .map(|c| c as f64)
                .collect();
            (min_max(&centrality::pagerank(af)), min_max(&colors))
        },
    );
    columns.push(eigen);
    columns.push(closeness);
    columns.push(min_max(
        &degrees.iter().map(|d| d.0 as f64).collect::<Vec<_>>(),
    ));
    columns.push(min_max(
        &degrees.iter().map(|d| d.1 as f64).collect::<Vec<_>>(),
    ));
    columns.push(pr);
    columns.push(coloring);
    columns.push(lab.labels().iter().map(|l| l.feature_value()).collect());
    for s in GradualSemantics::ALL {
        columns.push(gradual::compute(af, s).degrees);
    }

    let width = layout.width();
    let values = Array2::from_shape_fn((n, width), |(row, col)| {
        if col < columns.len() {
            columns[col][row]
        } else {
            random_feature(seed, row, col)
        }
    });
    FeatureMatrix {
        layout,
        seed,
        values,
    }
}
