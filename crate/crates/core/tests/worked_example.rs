mod common;

use common::{bytes_to_letters, example_dictionary, letters_to_bytes, unpack_units};
use rice_marlin::encoder::Transition;
use rice_marlin::{decode_quotients, join, pack_reminders, quotient, reminder, DecoderTable, EncoderMatrix};

#[test]
fn example_dictionary_is_accepted_verbatim() {
    let dict = example_dictionary();
    assert_eq!(dict.exclusions(), vec![0, 1]);
    assert!(dict.validate().is_ok());
    for (c, chapter) in dict.chapters().iter().enumerate() {
        let sum: f64 = chapter.words.iter().map(|w| w.emit_prob).sum();
        assert!((sum - 1.0).abs() < 1e-9, "chapter {c}: {sum}");
    }
}

#[test]
fn encoding_aaabac_emits_101_001_101() {
    let dict = example_dictionary();
    let matrix = EncoderMatrix::new(&dict);
    let (stream, words) = matrix.encode_quotients(&letters_to_bytes("aaabac"));
    assert_eq!(words, 3);
    assert_eq!(unpack_units(&stream, 3, 3), vec![0b101, 0b001, 0b101]);
    assert_eq!(stream, vec![0b1010_0110, 0b1000_0000]);
}

#[test]
fn decoding_101001101_yields_aaabac() {
    let table = DecoderTable::new(&example_dictionary());
    let out = decode_quotients(&table, &[0b1010_0110, 0b1000_0000], 6).unwrap();
    assert_eq!(bytes_to_letters(&out), "aaabac");
}

#[test]
fn decoder_table_entries() {
    let table = DecoderTable::new(&example_dictionary());
    assert_eq!(bytes_to_letters(&table.quotients(0b0101)), "aaa");
    assert_eq!(bytes_to_letters(&table.quotients(0b1000)), "baaa");
    assert_eq!(bytes_to_letters(&table.quotients(0b1001)), "ba");
    assert_eq!(bytes_to_letters(&table.quotients(0b1101)), "c");
    assert_eq!(table.max_word_len(), 4);
}

#[test]
fn matrix_transitions_from_aa() {
    let dict = example_dictionary();
    let matrix = EncoderMatrix::new(&dict);
    let aa = dict.codeword_of(0, &letters_to_bytes("aa")).unwrap();
    assert_eq!(aa, 0b0011);
    let aaa = dict.codeword_of(0, &letters_to_bytes("aaa")).unwrap();
    assert_eq!(matrix.transition(aa, 0), Transition::Extend(aaa));
    let b1 = dict.codeword_of(1, &letters_to_bytes("b")).unwrap();
    assert_eq!(b1, 0b1111);
    assert_eq!(matrix.transition(aa, 1), Transition::Emit(b1));
    // chapter 1 holds no word starting with a
    assert_eq!(dict.codeword_of(1, &letters_to_bytes("a")), None);
    assert_eq!(matrix.start_state(0), Some(0b0001));
}

#[test]
fn reminders_of_0_to_7_at_shift_3() {
    let msg: Vec<u8> = (0..8).collect();
    assert_eq!(pack_reminders(&msg, 3), vec![0b0000_0101, 0b0011_1001, 0b0111_0111]);
}

#[test]
fn split_identity_for_every_byte_and_shift() {
    for s in 0..=8u8 {
        for x in 0..=255u8 {
            let (q, r) = (quotient(x, s), reminder(x, s));
            let shifted = if s == 8 { 0 } else { (q as u16) << s };
            assert_eq!((shifted as u8) | r, x, "x={x} S={s}");
            assert_eq!(join(q, r, s), x);
            assert!(u16::from(r) < 1 << s);
        }
    }
}
