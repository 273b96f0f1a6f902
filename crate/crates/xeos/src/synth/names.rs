const ALPHABET: &[u8; 31] = b"abcdefghijklmnopqrstuvwxyz12345";

/// Bijective base-31 rendering of `index` over the name alphabet without
/// '.': 0 is "a", 30 is "5", 31 is "aa".
pub fn encode_name(mut index: u64) -> String {
    let mut out = Vec::new();
    loop {
        out.push(ALPHABET[(index % 31) as usize]);
        index /= 31;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}
