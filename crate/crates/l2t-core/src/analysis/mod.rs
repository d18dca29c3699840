//! Response analysis: option-letter extraction and response-language
//! identification. All functions are pure.

mod extract;
mod langid;
mod markers;

pub use extract::{extract_answer, ExtractionMethod, ExtractionResult};
pub use langid::{detect_language, ScriptClass, ScriptHistogram};
pub use markers::{MarkerError, MarkerTable};
