mod common;

use rice_marlin::dictionary::GridEntry;
use rice_marlin::format::{dictset_digest, Container, ContainerHeader, Mode};
use rice_marlin::{
    build_dictionary_set, load_dictset, loc_bytes, parse_block, save_dictset, serialize_block, CodeParams,
    CompressedBlock, DictionarySet, Error, Family, MarlinDictionary, SetConfig, SymbolDistribution,
};

/// Five K=8 dictionaries; the last stores full bytes as reminders.
fn small_set() -> DictionarySet {
    let params = CodeParams::new(8, 0).unwrap();
    let mut dicts: Vec<MarlinDictionary> = (0..4)
        .map(|i| {
            let d = common::small_source(&[0.5, 0.3, 0.2]);
            MarlinDictionary::build(&d, params, 0, 1e-9, 4096, format!("d{i}")).unwrap()
        })
        .collect();
    dicts.push(MarlinDictionary::build(&SymbolDistribution::uniform(), params, 8, 0.0, 4096, "u").unwrap());
    DictionarySet::new(dicts, 4096).unwrap()
}

#[test]
fn raw_block_layout() {
    let bytes = serialize_block(&CompressedBlock::raw(&[1, 2, 3]), 3);
    assert_eq!(bytes, vec![0xFF, 1, 2, 3]);
    let back = parse_block(&bytes, 3, &small_set()).unwrap();
    assert_eq!(back.raw.as_deref(), Some(&[1u8, 2, 3][..]));
}

#[test]
fn empty_raw_block() {
    let block = parse_block(&[0xFF], 0, &small_set()).unwrap();
    assert_eq!(block.raw, Some(Vec::new()));
}

#[test]
fn coded_block_layout() {
    let block = CompressedBlock {
        dict_index: 4,
        quotients: vec![0xAB],
        escapes: Vec::new(),
        reminders: Vec::new(),
        raw: None,
    };
    assert_eq!(serialize_block(&block, 1), vec![0x04, 0x00, 0xAB]);
}

#[test]
fn escape_section_size() {
    let set = small_set();
    let block = CompressedBlock {
        dict_index: 0,
        quotients: vec![0x12; 40],
        escapes: vec![(7, 0xEE), (299, 0xF0)],
        reminders: Vec::new(),
        raw: None,
    };
    assert_eq!(loc_bytes(300), 2);
    let bytes = serialize_block(&block, 300);
    assert_eq!(bytes.len(), 2 + 40 + 6);
    assert_eq!(&bytes[42..], &[7, 0, 0xEE, 0x2B, 0x01, 0xF0]);
    assert_eq!(parse_block(&bytes, 300, &set).unwrap(), block);
}

#[test]
fn malformed_blocks_are_rejected() {
    let set = small_set();
    let corrupt = |r: Result<CompressedBlock, Error>| matches!(r, Err(Error::CorruptBlock(_)));
    assert!(corrupt(parse_block(&[], 3, &set)));
    assert!(corrupt(parse_block(&[0xFF, 1, 2], 3, &set)));
    assert!(corrupt(parse_block(&[9, 0, 1], 3, &set)));
    // one escape needs 2 bytes, only 1 follows
    assert!(corrupt(parse_block(&[0, 1, 5], 3, &set)));
    // escape location beyond the block
    assert!(corrupt(parse_block(&[0, 1, 3, 9], 3, &set)));
    // escapes out of order
    assert!(corrupt(parse_block(&[0, 2, 2, 9, 1, 9], 3, &set)));
    // the full-shift dictionary never stores quotients
    assert!(corrupt(parse_block(&[4, 0, 0xAA, 1, 2, 3], 3, &set)));
}

#[test]
fn dictset_round_trip() {
    let config = SetConfig {
        grid: vec![
            GridEntry {
                family: Family::LaplacianResidual,
                fractions: vec![0.2, 0.6],
            },
            GridEntry {
                family: Family::Poisson,
                fractions: vec![0.4],
            },
        ],
        ..SetConfig::default()
    };
    let set = build_dictionary_set(&config).unwrap();
    let bytes = save_dictset(&set);
    let back = load_dictset(&bytes).unwrap();
    assert_eq!(back, set);
    assert_eq!(dictset_digest(&back), dictset_digest(&set));
    assert_eq!(save_dictset(&back), bytes);

    let mut flipped = bytes.clone();
    let mid = flipped.len() / 2;
    flipped[mid] ^= 0x10;
    assert!(matches!(load_dictset(&flipped), Err(Error::DictSet(_))));
    assert!(load_dictset(&bytes[..bytes.len() - 1]).unwrap_err().is_corrupt_input());
    assert!(load_dictset(b"nope").unwrap_err().is_corrupt_input());
}

#[test]
fn container_round_trip_and_truncation() {
    let header = ContainerHeader {
        mode: Mode::Image {
            width: 100,
            height: 70,
            tile: 64,
        },
        k: 8,
        o: 4,
        digest: [7; 32],
        block_size: 64 * 64,
        original_size: 7015,
        image_header: b"P5\n100 70\n255\n".to_vec(),
    };
    assert_eq!(header.block_count().unwrap(), 4);
    let container = Container {
        header,
        blocks: vec![vec![0xFF; 10], vec![1, 2], vec![3], vec![]],
    };
    let bytes = container.to_bytes();
    assert_eq!(Container::from_bytes(&bytes).unwrap(), container);
    for cut in [0, 3, 20, bytes.len() - 1] {
        assert!(
            Container::from_bytes(&bytes[..cut]).unwrap_err().is_corrupt_input(),
            "cut at {cut}"
        );
    }
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(Container::from_bytes(&longer).is_err());
}

#[test]
fn block_lengths_cover_the_file() {
    let header = ContainerHeader {
        mode: Mode::Bytes,
        k: 8,
        o: 4,
        digest: [0; 32],
        block_size: 4096,
        original_size: 10_000,
        image_header: Vec::new(),
    };
    assert_eq!(header.block_lengths().unwrap(), vec![4096, 4096, 1808]);
}
