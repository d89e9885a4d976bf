//! Rice-Marlin coding: overlapped variable-to-fixed dictionaries over the
//! high bits of each byte, verbatim low bits, and an escape channel for rare
//! symbols.

pub mod alphabet;
pub mod bench;
pub mod bits;
pub mod codec;
pub mod decoder;
pub mod dictionary;
pub mod encoder;
pub mod error;
pub mod format;
pub mod image;
pub mod source;

pub use alphabet::{join, quotient, reminder, split_alphabet, QuotientAlphabet};
pub use codec::{Codec, Selection, DEFAULT_BLOCK_SIZE};
pub use decoder::{decode_block, decode_quotients, DecoderTable};
pub use dictionary::{
    abr_estimate, best_dictionary_for, build_dictionary_set, chapter_stationary, select_dictionary,
    shift_efficiency_bound, CodeParams, DictionarySet, MarlinDictionary, SetConfig,
};
pub use encoder::{encode_block, pack_reminders, CompressedBlock, EncoderMatrix};
pub use error::{Error, Result};
pub use format::{load_dictset, loc_bytes, parse_block, save_dictset, serialize_block};
pub use source::{empirical_histogram, make_distribution, sample, Family, SymbolDistribution, SyntheticFamily};
