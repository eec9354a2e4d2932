//! The fifteen per-page features used by the directory-page classifier.

use serde::{Deserialize, Serialize};

use crate::annotator::{count_label, is_address_candidate, AnnotationLabel, AnnotationSet};
use crate::geometry::{union_area, BBox};
use crate::scalar::Scalar;
use crate::visual::VisualPage;

pub const N_FEATURES: usize = 15;

/// Feature names in their frozen column order (`f1` .. `f15`).
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "currency_patterns",
    "date_patterns",
    "email_patterns",
    "phone_patterns",
    "fac_entities",
    "groups",
    "table_area_fraction",
    "role_entities",
    "words",
    "groups_with_address_candidates",
    "groups_fully_bordered",
    "groups_with_1_to_3_orgs",
    "groups_with_1_to_4_roles",
    "ratio_groups_with_orgs",
    "ratio_groups_with_roles",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector<T>(pub [T; N_FEATURES]);

impl<T: Scalar> Default for FeatureVector<T> {
    fn default() -> Self {
        Self([T::zero(); N_FEATURES])
    }
}

impl<T: Scalar> FeatureVector<T> {
    /// Value of feature `fN` (1-based, as in the column names).
    pub fn f(&self, n: usize) -> T {
        self.0[n - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

impl<T> std::ops::Index<usize> for FeatureVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Computes the feature vector of one page from its annotations.
///
/// Group counts (`f6`, `f10`..`f13`) include page header/footer groups; the
/// word count `f9` excludes them.
pub fn extract_features<T: Scalar>(page_index: usize, page: &VisualPage<T>, anns: &AnnotationSet) -> FeatureVector<T> {
    let mut counts = [0usize; N_FEATURES];
    let mut words = 0usize;
    for (gi, g) in page.groups.iter().enumerate() {
        let a = anns.group(page_index, gi);
        counts[0] += count_label(a, AnnotationLabel::Currency);
        counts[1] += count_label(a, AnnotationLabel::Date);
        counts[2] += count_label(a, AnnotationLabel::Email);
        counts[3] += count_label(a, AnnotationLabel::Phone);
        counts[4] += count_label(a, AnnotationLabel::Fac);
        counts[5] += 1;
        let roles = count_label(a, AnnotationLabel::Role);
        counts[7] += roles;
        if !g.is_furniture() {
            words += g.segments().map(|s| s.text.split_whitespace().count()).sum::<usize>();
        }
        if is_address_candidate(a) {
            counts[9] += 1;
        }
        if g.border_sides == 4 {
            counts[10] += 1;
        }
        if (1..=3).contains(&count_label(a, AnnotationLabel::Org)) {
            counts[11] += 1;
        }
        if (1..=4).contains(&roles) {
            counts[12] += 1;
        }
    }
    counts[8] = words;

    let mut v = [T::zero(); N_FEATURES];
    for (i, c) in counts.iter().enumerate() {
        v[i] = T::of_usize(*c);
    }
    v[6] = table_fraction(page);
    if counts[5] > 0 {
        let groups = T::of_usize(counts[5]);
        v[13] = v[11] / groups;
        v[14] = v[12] / groups;
    }
    FeatureVector(v)
}

/// Fraction of the page area covered by the union of the table regions.
fn table_fraction<T: Scalar>(page: &VisualPage<T>) -> T {
    let page_box = BBox::new(T::zero(), T::zero(), page.width, page.height);
    let clipped: Vec<BBox<T>> = page.table_regions.iter().filter_map(|r| r.intersection(&page_box)).collect();
    let area = page.width * page.height;
    if area <= T::zero() {
        return T::zero();
    }
    (union_area(&clipped) / area).min(T::one()).max(T::zero())
}

/// Header line of the training CSV.
pub fn csv_header() -> Vec<String> {
    (1..=N_FEATURES).map(|i| format!("f{i}")).chain(std::iter::once("label".to_string())).collect()
}
