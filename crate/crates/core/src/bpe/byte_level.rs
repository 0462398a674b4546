//! The reversible byte → printable-character alphabet used by byte-level BPE vocab files.
//!
//! Printable Latin-1 bytes map to themselves; the remaining 68 bytes (controls, space,
//! and a few Latin-1 gaps) are shifted to `U+0100..`, in byte order. A space therefore
//! becomes `Ġ` (U+0120), which is what real vocab files use as their word marker.

use std::sync::OnceLock;

struct Tables {
    encode: [char; 256],
    decode: std::collections::HashMap<char, u8>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut encode = ['\0'; 256];
        let mut shifted = 0u32;
        for b in 0..=255u8 {
            let printable = matches!(b, b'!'..=b'~' | 0xA1..=0xAC | 0xAE..=0xFF);
            encode[b as usize] = if printable {
                char::from(b)
            } else {
                let c = char::from_u32(256 + shifted).expect("U+0100..U+0143 are valid scalars");
                shifted += 1;
                c
            };
        }
        let decode = encode
            .iter()
            .enumerate()
            .map(|(b, &c)| (c, b as u8))
            .collect();
        Tables { encode, decode }
    })
}

/// The printable symbol standing in for `byte`.
pub fn byte_to_char(byte: u8) -> char {
    tables().encode[byte as usize]
}

/// Inverse of [`byte_to_char`]; `None` for characters outside the alphabet.
pub fn char_to_byte(c: char) -> Option<u8> {
    tables().decode.get(&c).copied()
}

/// Maps every byte of `text` to its printable symbol.
pub fn encode_str(text: &str) -> String {
    text.bytes().map(byte_to_char).collect()
}

/// All 256 alphabet symbols, in byte order.
pub fn alphabet() -> impl Iterator<Item = char> {
    (0..=255u8).map(byte_to_char)
}

/// Maps alphabet symbols back to raw bytes, failing on the first foreign character.
pub fn decode_to_bytes(symbols: &str, out: &mut Vec<u8>) -> Result<(), char> {
    for c in symbols.chars() {
        out.push(char_to_byte(c).ok_or(c)?);
    }
    Ok(())
}
