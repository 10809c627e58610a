//! The class and property tables of the Linked Papers With Code schema.
//!
//! This is the one place to edit when reconciling with the published OWL
//! file; nothing else hardcodes the list.

use super::{PropertyKind, PropertySpec, RangeSpec};
use crate::rdf::vocab::{XSD_ANY_URI, XSD_BOOLEAN, XSD_DATE, XSD_INTEGER, XSD_STRING};

pub(super) const CLASSES: &[(&str, &str)] = &[
    ("Paper", "A machine learning publication."),
    ("Author", "A person credited as author of a paper."),
    ("Conference", "A conference proceeding in which papers appear."),
    ("Repository", "A code repository implementing a paper."),
    ("Task", "A machine learning task, such as image classification."),
    ("Dataset", "A dataset used for training or evaluation."),
    ("Method", "A reusable machine learning method or building block."),
    ("Model", "A concrete model evaluated on a benchmark."),
    ("EvaluationTable", "A leaderboard for one task on one dataset."),
    ("EvaluationResult", "One leaderboard row: a model's reported scores."),
    ("Metric", "An evaluation metric such as accuracy or BLEU."),
    ("Area", "A research area grouping tasks and methods."),
    ("DatasetVariant", "A named variant or split of a dataset."),
];

const fn dt(name: &'static str, domain: &'static str, datatype: &'static str) -> PropertySpec {
    PropertySpec {
        local_name: name,
        kind: PropertyKind::Datatype,
        domain,
        range: Some(RangeSpec::Datatype(datatype)),
        markdown: false,
    }
}

const fn md(name: &'static str, domain: &'static str) -> PropertySpec {
    PropertySpec {
        local_name: name,
        kind: PropertyKind::Datatype,
        domain,
        range: Some(RangeSpec::Datatype(XSD_STRING)),
        markdown: true,
    }
}

const fn obj(name: &'static str, domain: &'static str, range: &'static str) -> PropertySpec {
    PropertySpec {
        local_name: name,
        kind: PropertyKind::Object,
        domain,
        range: Some(RangeSpec::Class(range)),
        markdown: false,
    }
}

pub(super) const PROPERTIES: &[PropertySpec] = &[
    // Paper
    dt("title", "Paper", XSD_STRING),
    md("abstract", "Paper"),
    dt("arxivId", "Paper", XSD_STRING),
    dt("publicationDate", "Paper", XSD_DATE),
    dt("paperUrl", "Paper", XSD_ANY_URI),
    dt("pdfUrl", "Paper", XSD_ANY_URI),
    dt("authorName", "Paper", XSD_STRING),
    obj("hasAuthor", "Paper", "Author"),
    obj("hasTask", "Paper", "Task"),
    obj("hasMethod", "Paper", "Method"),
    obj("hasConference", "Paper", "Conference"),
    obj("hasRepository", "Paper", "Repository"),
    obj("hasOfficialRepository", "Paper", "Repository"),
    // Author
    dt("fullName", "Author", XSD_STRING),
    // Conference
    dt("conferenceName", "Conference", XSD_STRING),
    dt("acronym", "Conference", XSD_STRING),
    // Repository
    dt("repositoryUrl", "Repository", XSD_ANY_URI),
    dt("isOfficial", "Repository", XSD_BOOLEAN),
    dt("framework", "Repository", XSD_STRING),
    // Task
    dt("taskName", "Task", XSD_STRING),
    md("taskDescription", "Task"),
    obj("hasArea", "Task", "Area"),
    obj("hasSubtask", "Task", "Task"),
    // Dataset
    dt("datasetName", "Dataset", XSD_STRING),
    dt("datasetFullName", "Dataset", XSD_STRING),
    md("datasetDescription", "Dataset"),
    dt("datasetHomepage", "Dataset", XSD_ANY_URI),
    obj("datasetIntroducedIn", "Dataset", "Paper"),
    obj("datasetTask", "Dataset", "Task"),
    obj("hasVariant", "Dataset", "DatasetVariant"),
    // DatasetVariant
    dt("variantName", "DatasetVariant", XSD_STRING),
    // Method
    dt("methodName", "Method", XSD_STRING),
    md("methodDescription", "Method"),
    dt("introducedYear", "Method", XSD_INTEGER),
    obj("methodIntroducedIn", "Method", "Paper"),
    obj("methodArea", "Method", "Area"),
    // Model, Metric, Area
    dt("modelName", "Model", XSD_STRING),
    dt("metricName", "Metric", XSD_STRING),
    dt("areaName", "Area", XSD_STRING),
    // EvaluationTable
    obj("evaluatesTask", "EvaluationTable", "Task"),
    obj("evaluatedOnDataset", "EvaluationTable", "Dataset"),
    obj("subTableOf", "EvaluationTable", "EvaluationTable"),
    // EvaluationResult
    obj("inTable", "EvaluationResult", "EvaluationTable"),
    obj("usesModel", "EvaluationResult", "Model"),
    obj("measuresMetric", "EvaluationResult", "Metric"),
    obj("reportedIn", "EvaluationResult", "Paper"),
    dt("metricValue", "EvaluationResult", XSD_STRING),
];
