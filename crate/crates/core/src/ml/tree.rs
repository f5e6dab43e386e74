//! CART-style decision tree: greedy binary splits minimizing weighted Gini
//! impurity, with deterministic tie-breaking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::dataset::Dataset;

/// Training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DtConfig {
    pub max_depth: usize,
}

impl Default for DtConfig {
    fn default() -> Self {
        DtConfig { max_depth: 4 }
    }
}

/// Tree node; children refer into the model's node arena.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DtNode {
    Leaf {
        class: usize,
        /// Training-row count per class at this leaf.
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A trained tree: arena of nodes with the root at index 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DtModel {
    pub nodes: Vec<DtNode>,
    pub n_classes: usize,
    pub input_dim: usize,
    pub max_depth: usize,
}

impl DtModel {
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[DtNode], at: usize) -> usize {
            match &nodes[at] {
                DtNode::Leaf { .. } => 0,
                DtNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let f = c as f64 / t;
            f * f
        })
        .sum::<f64>()
}

fn majority_class(counts: &[usize]) -> usize {
    counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(idx, _)| idx)
        .unwrap_or(0)
}

struct TreeBuilder<'a> {
    data: &'a Dataset,
    max_depth: usize,
    nodes: Vec<DtNode>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl<'a> TreeBuilder<'a> {
    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.data.n_classes()];
        for &r in rows {
            counts[self.data.labels()[r]] += 1;
        }
        counts
    }

    /// Exhaustive search over midpoints of consecutive distinct sorted
    /// values; ties go to the smaller feature index, then smaller threshold.
    fn best_split(&self, rows: &[usize], parent_gini: f64) -> Option<BestSplit> {
        let n = rows.len();
        let mut best: Option<BestSplit> = None;
        for feature in 0..self.data.input_dim() {
            let mut values: Vec<f64> = rows
                .iter()
                .map(|&r| self.data.features()[r][feature])
                .collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            if values.len() < 2 {
                continue;
            }
            for pair in values.windows(2) {
                let threshold = 0.5 * (pair[0] + pair[1]);
                let mut left = vec![0usize; self.data.n_classes()];
                let mut n_left = 0usize;
                let mut right = vec![0usize; self.data.n_classes()];
                let mut n_right = 0usize;
                for &r in rows {
                    if self.data.features()[r][feature] <= threshold {
                        left[self.data.labels()[r]] += 1;
                        n_left += 1;
                    } else {
                        right[self.data.labels()[r]] += 1;
                        n_right += 1;
                    }
                }
                let impurity = (n_left as f64 * gini(&left, n_left)
                    + n_right as f64 * gini(&right, n_right))
                    / n as f64;
                let improves = match &best {
                    None => impurity < parent_gini - 1e-12,
                    Some(b) => impurity < b.impurity - 1e-12,
                };
                if improves {
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, rows: &[usize], depth: usize) -> usize {
        let counts = self.class_counts(rows);
        let node_gini = gini(&counts, rows.len());
        let make_leaf = depth >= self.max_depth || node_gini == 0.0;
        let split = if make_leaf {
            None
        } else {
            self.best_split(rows, node_gini)
        };
        match split {
            None => {
                let class = majority_class(&counts);
                self.nodes.push(DtNode::Leaf { class, counts });
                self.nodes.len() - 1
            }
            Some(s) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&r| self.data.features()[r][s.feature] <= s.threshold);
                let at = self.nodes.len();
                self.nodes.push(DtNode::Leaf {
                    class: 0,
                    counts: Vec::new(),
                }); // placeholder
                let left = self.build(&left_rows, depth + 1);
                let right = self.build(&right_rows, depth + 1);
                self.nodes[at] = DtNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                };
                at
            }
        }
    }
}

/// Grows a tree of at most `max_depth` splits on any root-to-leaf path.
pub fn dt_train(data: &Dataset, config: &DtConfig) -> Result<DtModel> {
    if config.max_depth == 0 {
        return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
    }
    let mut builder = TreeBuilder {
        data,
        max_depth: config.max_depth,
        nodes: Vec::new(),
    };
    let rows: Vec<usize> = (0..data.len()).collect();
    let root = builder.build(&rows, 0);
    debug_assert_eq!(root, 0);
    Ok(DtModel {
        nodes: builder.nodes,
        n_classes: data.n_classes(),
        input_dim: data.input_dim(),
        max_depth: config.max_depth,
    })
}

/// Walks the tree to a leaf.
pub fn dt_predict(model: &DtModel, x: &[f64]) -> Result<usize> {
    if x.len() != model.input_dim {
        return Err(Error::DimensionMismatch(format!(
            "tree expects {} features, got {}",
            model.input_dim,
            x.len()
        )));
    }
    let mut at = 0usize;
    loop {
        match &model.nodes[at] {
            DtNode::Leaf { class, .. } => return Ok(*class),
            DtNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                at = if x[*feature] <= *threshold { *left } else { *right };
            }
        }
    }
}
