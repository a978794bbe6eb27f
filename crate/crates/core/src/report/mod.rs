//! Structure files, report documents and the corpus suite.

mod corpus;
mod document;
mod file;
mod suite;

pub use corpus::{
    builtin_corpus, random_double_extension, random_double_extension_on, BaseKind, CorpusEntry, EntryKind,
    DOUBLE_EXTENSION_SEEDS,
};
pub use document::{
    classify, Classification, EqtBlock, Measured, Provenance, ReportDocument, REPORT_SCHEMA, TOOL, VERSION,
};
pub use file::{parse_structure_file, BracketSpec, Metadata, StructureFile};
pub use suite::{
    load_input, load_inputs, model_checks, run_builtin_suite, run_entry, run_suite, CheckRecord, EntryReport,
    ExitStatus, LoadedInput, SuiteInput, SuiteOptions, SuiteReport, MODEL_TOL, SUITE_SCHEMA,
};
