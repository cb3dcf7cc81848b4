//! Verdicts and the method-specific data attached to them.

use serde::Serialize;

use crate::lattice::WhitmanTrace;
use crate::term::Equation;
use crate::word::NielsenTrace;

/// Why a witness equation is valid after instantiation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// The witness is entry `index` (0-based) of the refuting set.
    RefutingSet {
        index: usize,
        size: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace: Option<WhitmanTrace>,
    },
    /// Terms `first` and `second` (1-based) are equal in the free algebra.
    DuplicateTerms { first: usize, second: usize },
    /// The word `word` has two factorizations; found at residual step `step`.
    NotCode { step: usize, word: String },
    /// Entry `entry` (1-based) of the tuple became the identity.
    Nielsen { entry: usize, trace: NielsenTrace },
    /// A point outside the image of the term map, and the cones covering the image.
    Gap { point: Vec<String>, cones: Vec<Vec<String>> },
    /// Kernel vector of the matrix of linear forms.
    Kernel { coefficients: Vec<String> },
}

/// Why no witness exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    RefutingSetExhausted { checked: usize },
    SardinasPatterson { steps: usize },
    NielsenBasis { basis: Vec<String>, trace: NielsenTrace },
    ConeCover { cones: Vec<Vec<String>> },
    FullRank { rank: usize },
}

impl Certificate {
    pub fn method(&self) -> &'static str {
        match self {
            Certificate::RefutingSetExhausted { .. } => "refuting-set-exhausted",
            Certificate::SardinasPatterson { .. } => "sardinas-patterson",
            Certificate::NielsenBasis { .. } => "nielsen-rank",
            Certificate::ConeCover { .. } => "cone-cover",
            Certificate::FullRank { .. } => "full-rank",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Dependent { witness: Equation, evidence: Evidence },
    Independent { certificate: Certificate },
}

impl Verdict {
    pub fn is_dependent(&self) -> bool {
        matches!(self, Verdict::Dependent { .. })
    }

    pub fn witness(&self) -> Option<&Equation> {
        match self {
            Verdict::Dependent { witness, .. } => Some(witness),
            Verdict::Independent { .. } => None,
        }
    }

    pub fn method(&self) -> Option<&'static str> {
        match self {
            Verdict::Independent { certificate } => Some(certificate.method()),
            Verdict::Dependent { .. } => None,
        }
    }

    pub fn gap_point(&self) -> Option<&[String]> {
        match self {
            Verdict::Dependent {
                evidence: Evidence::Gap { point, .. },
                ..
            } => Some(point),
            _ => None,
        }
    }
}
