//! Word-triple geocoding on a two-level lat/lon grid, a typo and homophone
//! confusion model for the resulting addresses, and the analyses built on
//! it: global confusion statistics, exhaustive local pair search, and a
//! birthday-problem bound.

pub mod analysis;
pub mod codec;
pub mod config;
pub mod confusion;
pub mod error;
pub mod exec;
pub mod grid;
pub mod lexicon;

pub use codec::{
    box_to_n, congruence_forward, congruence_inverse, factor_m, indices_to_words, integer_cube_root, unfactor,
    words_to_indices, BandConfig, CellEntry, CellLayout, Codec, EncodeTrace, Geocoder, IndexTriple, WordTriple,
};
pub use config::CodecFile;
pub use confusion::{
    address_confusion_count, address_confusions, build_confusion_index, build_confusion_index_with, typo_candidates,
    AddressConfusionSet, ConfusionIndex, ConfusionMode,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{
    band_width, box_distance_m, box_to_latlon, cell_box_count, haversine_m, latlon_to_box, BoxAddress, GeoPoint,
};
pub use lexicon::{
    common_set, homophones, load_phonetic, load_wordlist, CommonSet, DataPaths, PhoneticIndex, WordList,
};
