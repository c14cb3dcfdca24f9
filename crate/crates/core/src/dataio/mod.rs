//! Feature ingestion, the synthetic generator, and result files.

mod dataset;
mod formats;
mod results;
mod synth;

pub use dataset::FeatureDataset;
pub use formats::{
    load_manifest, read_csv_head, read_fvec, read_head_file, read_labels, save_dataset,
    write_csv_head, write_fvec, write_labels, Manifest, ManifestHead, FVEC_MAGIC, FVEC_VERSION,
    MANIFEST_VERSION,
};
pub use results::{read_results, write_features, write_results};
pub use synth::{generate_synthetic, SynthConfig};
