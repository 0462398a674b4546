//! Adding missing high-frequency words to a tokenizer as whole-segment tokens.

use serde::Serialize;

use crate::bpe::{AddedToken, Tokenizer, WordForm};
use crate::error::{Error, Result};
use crate::io::WordList;
use crate::metrics::strr;

/// Steps that follow injection but need model training; printed, never executed.
pub const FOLLOWUP_STEPS: [&str; 2] = [
    "continue pretraining the base model on multilingual text so the injected tokens get trained embeddings",
    "instruction-tune on multilingual instruction/response data and check the new tokens in downstream tasks",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectionPlan {
    pub word_form: WordForm,
    /// Words that took more than one token under `word_form`.
    pub candidates: Vec<String>,
    /// Token contents actually added (a candidate with a leading space under
    /// `space-prefixed`).
    pub injected: Vec<String>,
    pub strr_before: f64,
    pub strr_after: f64,
}

impl InjectionPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializing plain data cannot fail")
    }

    pub fn followup_checklist(&self) -> String {
        let mut out = String::from("Next steps (not performed by this tool):\n");
        for (i, step) in FOLLOWUP_STEPS.iter().enumerate() {
            out.push_str(&format!("  [ ] {}. {step}\n", i + 1));
        }
        out
    }
}

fn token_content(word: &str, form: WordForm) -> String {
    match form {
        WordForm::SpacePrefixed => format!(" {word}"),
        WordForm::Bare | WordForm::Either => word.to_owned(),
    }
}

/// Returns a new tokenizer in which every word of `words` that is not yet a single
/// token under `form` becomes an added token. New ids continue after the largest id in
/// use. Under [`WordForm::Either`] the bare form is added.
pub fn inject<I, S>(
    tokenizer: &Tokenizer,
    words: I,
    form: WordForm,
) -> Result<(Tokenizer, InjectionPlan)>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let words: Vec<S> = words.into_iter().collect();
    if words.is_empty() {
        return Err(Error::EmptyInput("no words to inject"));
    }
    for w in &words {
        let w = w.as_ref();
        if w.is_empty() {
            return Err(Error::RejectedWord {
                word: w.to_owned(),
                reason: "empty word",
            });
        }
        if w.chars().any(char::is_whitespace) {
            return Err(Error::RejectedWord {
                word: w.to_owned(),
                reason: "contains whitespace, so segmentation would never produce it as one word",
            });
        }
    }
    let list = WordList::new("injection", words.iter().map(AsRef::as_ref))?;
    let before = strr(tokenizer, &list, form)?;

    let mut candidates: Vec<String> = before.failures.iter().map(|f| f.word.clone()).collect();
    // keep wordlist order rather than the failure-report order
    let order: std::collections::HashMap<&str, usize> = list
        .words()
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    candidates.sort_by_key(|w| order[w.as_str()]);

    let mut next_id = tokenizer.max_id().map_or(0, |m| m + 1);
    let mut added = Vec::with_capacity(candidates.len());
    let mut injected = Vec::with_capacity(candidates.len());
    for word in &candidates {
        let content = token_content(word, form);
        if tokenizer.is_added_token(&content) {
            continue;
        }
        // a vocab entry that merges never reach keeps its id
        let id = match tokenizer
            .vocab()
            .get(tokenizer.vocab_key(&content).as_ref())
        {
            Some(&id) => id,
            None => {
                next_id += 1;
                next_id - 1
            }
        };
        added.push(AddedToken {
            id,
            content: content.clone(),
        });
        injected.push(content);
    }

    let updated = if added.is_empty() {
        tokenizer.clone()
    } else {
        tokenizer.with_added_tokens(added)?
    };
    let after = strr(&updated, &list, form)?;
    Ok((
        updated,
        InjectionPlan {
            word_form: form,
            candidates,
            injected,
            strr_before: before.strr,
            strr_after: after.strr,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Tokenizer {
        Tokenizer::from_ordered("toy", false, &["a", "b", "c", "ab"], &[("a", "b")]).unwrap()
    }

    #[test]
    fn toy_injection() {
        let (t, plan) = inject(&toy(), ["ab", "ac"], WordForm::Bare).unwrap();
        assert_eq!(t.vocab_size(), 5);
        assert_eq!(t.encode_word("ac", false).unwrap().token_ids, [4]);
        assert_eq!(plan.candidates, ["ac"]);
        assert_eq!(plan.injected, ["ac"]);
        assert_eq!((plan.strr_before, plan.strr_after), (50.0, 100.0));
    }

    #[test]
    fn already_single_is_a_no_op() {
        let (t, plan) = inject(&toy(), ["ab"], WordForm::Bare).unwrap();
        assert!(plan.injected.is_empty());
        assert_eq!(t, toy());
    }

    #[test]
    fn original_is_untouched() {
        let original = toy();
        let _ = inject(&original, ["ac", "ca"], WordForm::Bare).unwrap();
        assert_eq!(original.vocab_size(), 4);
        assert_eq!(original.encode_word("ac", false).unwrap().len(), 2);
    }

    #[test]
    fn unreachable_vocab_entry_keeps_its_id() {
        let t = Tokenizer::from_ordered("t", false, &["a", "c", "ac"], &[]).unwrap();
        let (t2, plan) = inject(&t, ["ac"], WordForm::Bare).unwrap();
        assert_eq!(plan.injected, ["ac"]);
        assert_eq!(t2.encode_word("ac", false).unwrap().token_ids, [2]);
        assert_eq!(t2.vocab_size(), 3);
    }

    #[test]
    fn byte_symbol_spelling_is_not_a_vocab_match() {
        // "à" is also the byte symbol for 0xE0; the raw word is two bytes
        let base: Vec<String> = crate::bpe::byte_level::alphabet()
            .map(String::from)
            .collect();
        let refs: Vec<&str> = base.iter().map(String::as_str).collect();
        let t = Tokenizer::from_ordered("b", true, &refs, &[]).unwrap();
        let (t2, plan) = inject(&t, ["à"], WordForm::Bare).unwrap();
        assert_eq!(plan.injected, ["à"]);
        let ids = t2.encode_word("à", false).unwrap().token_ids;
        assert_eq!(ids, [256]);
        assert_eq!(t2.decode(&ids).unwrap(), "à");
    }

    #[test]
    fn whitespace_rejected() {
        let err = inject(&toy(), ["a c"], WordForm::Bare).unwrap_err();
        assert!(matches!(err, Error::RejectedWord { .. }), "{err}");
        assert!(inject(&toy(), Vec::<String>::new(), WordForm::Bare).is_err());
    }

    #[test]
    fn space_prefixed_injection_adds_the_prefixed_form() {
        let t = Tokenizer::from_ordered("t", false, &["a", "b", "c", " "], &[]).unwrap();
        let (t2, plan) = inject(&t, ["ab"], WordForm::SpacePrefixed).unwrap();
        assert_eq!(plan.injected, [" ab"]);
        assert!(t2.is_single_token("ab", WordForm::SpacePrefixed).unwrap());
        assert!(!t2.is_single_token("ab", WordForm::Bare).unwrap());
        assert_eq!(
            t2.decode(&t2.encode_word("ab", true).unwrap().token_ids)
                .unwrap(),
            " ab"
        );
    }

    #[test]
    fn plan_json_has_the_documented_fields() {
        let (_, plan) = inject(&toy(), ["ab", "ac"], WordForm::Bare).unwrap();
        let v: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
        for key in ["candidates", "injected", "strr_before", "strr_after"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(plan.followup_checklist().contains("[ ] 2."));
    }
}
