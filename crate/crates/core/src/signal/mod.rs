//! Recordings, preprocessing and segmentation.

mod filter;
mod io;
mod recording;
mod segment;
mod synth;

pub use filter::{bandpass_filter, BandpassDesign, FirstOrderSection};
pub use io::{load_dataset, write_dataset, Manifest, ManifestEntry};
pub use recording::{Dataset, Recording};
pub use segment::{
    default_duration_grid, sample_count, segment_recording, Segment, MAX_GRID_DURATION_S,
    MIN_GRID_DURATION_S,
};
pub use synth::{generate_synthetic_dataset, SynthSpec, EEG_BANDS};
