//! End-to-end page processing: annotate, featurize, classify, segment,
//! build the reading tree and read off the directory blocks.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotator::{annotate, AnnotationSet, Annotator};
use crate::features::{extract_features, FeatureVector};
use crate::forest::{ForestModel, Prediction, DEFAULT_THRESHOLD};
use crate::scalar::Scalar;
use crate::segmenter::{segment_page, EmptyPageError, LabeledSpan};
use crate::tree::{build_tree, directory_blocks, DirectoryBlock, ReadingTree, TreeParams};
use crate::visual::VisualPage;

/// Which pages go through segmentation and tree construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PageSelection {
    /// Pages the classifier marks as directory pages.
    #[default]
    Auto,
    All,
    List(Vec<usize>),
}

impl FromStr for PageSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "auto" => Ok(Self::Auto),
            "all" => Ok(Self::All),
            list => list
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| format!("invalid page index `{p}`")))
                .collect::<Result<Vec<_>, _>>()
                .map(Self::List),
        }
    }
}

/// Annotations and features of one page.
#[derive(Debug, Clone)]
pub struct PageAnalysis<T> {
    pub page: usize,
    pub annotations: AnnotationSet,
    pub features: FeatureVector<T>,
}

pub fn analyze_page<T: Scalar, A: Annotator + ?Sized>(page_index: usize, page: &VisualPage<T>, annotator: &A) -> PageAnalysis<T> {
    let annotations = annotate(page_index, page, annotator);
    let features = extract_features(page_index, page, &annotations);
    PageAnalysis { page: page_index, annotations, features }
}

/// Segmentation, tree and blocks of one directory page.
#[derive(Debug, Clone, PartialEq)]
pub struct PageParse<T> {
    pub page: usize,
    pub spans: Vec<LabeledSpan<T>>,
    pub tree: ReadingTree<T>,
    pub blocks: Vec<DirectoryBlock>,
}

pub fn parse_directory_page<T: Scalar>(
    page_index: usize,
    page: &VisualPage<T>,
    annotations: &AnnotationSet,
    params: &TreeParams<T>,
) -> Result<PageParse<T>, EmptyPageError> {
    let spans = segment_page(page_index, page, annotations)?;
    let tree = build_tree(&spans, params);
    let blocks = directory_blocks(&tree);
    Ok(PageParse { page: page_index, spans, tree, blocks })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageClassification {
    pub page: usize,
    pub prediction: Prediction,
}

/// Runs the whole pipeline over a document. Pages are processed in parallel;
/// outputs keep document order.
pub struct Pipeline<'a, T> {
    pub annotator: &'a dyn Annotator,
    pub model: Option<&'a ForestModel<T>>,
    pub threshold: f64,
    pub params: TreeParams<T>,
}

#[derive(Debug, Clone)]
pub struct DocumentRun<T> {
    pub analyses: Vec<PageAnalysis<T>>,
    pub classifications: Vec<PageClassification>,
    pub parses: Vec<PageParse<T>>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("page selection `auto` needs a classifier model")]
    MissingModel,
    #[error("page {0} does not exist")]
    NoSuchPage(usize),
    #[error(transparent)]
    EmptyPage(#[from] EmptyPageError),
}

impl<'a, T: Scalar> Pipeline<'a, T> {
    pub fn new(annotator: &'a dyn Annotator) -> Self {
        Self { annotator, model: None, threshold: DEFAULT_THRESHOLD, params: TreeParams::default() }
    }

    pub fn analyze(&self, pages: &[VisualPage<T>]) -> Vec<PageAnalysis<T>> {
        pages.par_iter().enumerate().map(|(i, p)| analyze_page(i, p, self.annotator)).collect()
    }

    pub fn classify(&self, analyses: &[PageAnalysis<T>]) -> Result<Vec<PageClassification>, PipelineError> {
        let model = self.model.ok_or(PipelineError::MissingModel)?;
        Ok(analyses
            .iter()
            .map(|a| PageClassification { page: a.page, prediction: model.predict_with_threshold(&a.features, self.threshold) })
            .collect())
    }

    pub fn run(&self, pages: &[VisualPage<T>], selection: &PageSelection) -> Result<DocumentRun<T>, PipelineError> {
        let analyses = self.analyze(pages);
        let classifications = match (selection, self.model) {
            (PageSelection::Auto, _) | (_, Some(_)) => self.classify(&analyses)?,
            _ => Vec::new(),
        };
        let selected: Vec<usize> = match selection {
            PageSelection::Auto => classifications.iter().filter(|c| c.prediction.is_directory).map(|c| c.page).collect(),
            PageSelection::All => (0..pages.len()).collect(),
            PageSelection::List(list) => {
                if let Some(bad) = list.iter().find(|&&p| p >= pages.len()) {
                    return Err(PipelineError::NoSuchPage(*bad));
                }
                list.clone()
            }
        };
        let parses = selected
            .par_iter()
            .map(|&i| parse_directory_page(i, &pages[i], &analyses[i].annotations, &self.params))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DocumentRun { analyses, classifications, parses })
    }
}
