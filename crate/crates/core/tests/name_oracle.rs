use fancy_regex::Regex;
use proptest::prelude::*;
use xeos_core::validate_account_name;

const REFERENCE: &str = r"^(?!\.)[a-z1-5.]{1,12}(?<!\.)$";

fn reference() -> Regex {
    Regex::new(REFERENCE).unwrap()
}

fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let next: Vec<String> = frontier
            .iter()
            .flat_map(|p| alphabet.iter().map(move |c| format!("{p}{c}")))
            .collect();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn exhaustive_short_strings_agree() {
    let re = reference();
    let strings = all_strings(&['a', 'b', 'z', '1', '5', '6', '.'], 4);
    assert_eq!(strings.len(), 1 + 7 + 49 + 343 + 2401);
    for s in strings {
        assert_eq!(validate_account_name(&s), re.is_match(&s).unwrap(), "{s:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn random_strings_agree(s in "[a-z0-9.A-Z_-]{0,13}") {
        prop_assert_eq!(validate_account_name(&s), reference().is_match(&s).unwrap());
    }

    #[test]
    fn grammar_strings_agree(s in "[a-z1-5.]{0,13}") {
        prop_assert_eq!(validate_account_name(&s), reference().is_match(&s).unwrap());
    }
}
