//! Experiment harness around the qcorr library: dataset generation,
//! training/evaluation, the source-mismatch study, timing comparisons,
//! symmetric-extension batch runs, and phase-diagram export.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod pipeline;
pub mod seed;

use std::str::FromStr;

use qcorr::ml::ModelKind;

/// Which classifiers a command should touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSelection {
    All,
    One(ModelKind),
}

impl ModelSelection {
    pub fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelSelection::All => ModelKind::ALL.to_vec(),
            ModelSelection::One(kind) => vec![kind],
        }
    }
}

impl FromStr for ModelSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            Ok(ModelSelection::All)
        } else {
            ModelKind::from_str(s)
                .map(ModelSelection::One)
                .map_err(|e| e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parses() {
        assert_eq!("all".parse::<ModelSelection>(), Ok(ModelSelection::All));
        assert_eq!(
            "svm".parse::<ModelSelection>(),
            Ok(ModelSelection::One(ModelKind::Svm))
        );
        assert!("mlp".parse::<ModelSelection>().is_err());
        assert_eq!(ModelSelection::All.kinds().len(), 3);
    }
}
