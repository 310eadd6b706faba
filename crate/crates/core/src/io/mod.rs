//! Archive ingestion, preprocessing and tensor serialization.

mod preprocess;
mod tensor;
mod ts;

pub use preprocess::{impute_row, preprocess, znormalize_row, NAN_POLICY};
pub use tensor::{load_tensor, save_tensor, sidecar_path, TensorHeader, TENSOR_FORMAT_VERSION};
pub use ts::{load_dataset, load_ts, load_tsv, parse_ts, parse_tsv, write_ts};
