use crate::model::CompilerDiagnostic;

/// Ordered, duplicate-free set of non-empty keywords.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordSet(Vec<String>);

impl KeywordSet {
    pub fn insert(&mut self, keyword: &str) {
        let keyword = keyword.trim();
        if !keyword.is_empty() && !self.0.iter().any(|k| k == keyword) {
            self.0.push(keyword.to_string());
        }
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True if any keyword occurs in `text`.
    pub fn matches(&self, text: &str) -> bool {
        self.0.iter().any(|k| text.contains(k.as_str()))
    }
}

impl<S: AsRef<str>> FromIterator<S> for KeywordSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut set = KeywordSet::default();
        for k in iter {
            set.insert(k.as_ref());
        }
        set
    }
}

fn closing_quote(open: char) -> char {
    match open {
        '`' => '\'',
        other => other,
    }
}

/// Quoted spans of a diagnostic message. A `X::Y` keyword also contributes
/// its type specifier `X` and member `Y`.
pub fn extract_keywords(diagnostic: &CompilerDiagnostic) -> KeywordSet {
    keywords_from_message(&diagnostic.message)
}

pub(crate) fn keywords_from_message(message: &str) -> KeywordSet {
    let chars: Vec<char> = message.chars().collect();
    let mut set = KeywordSet::default();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        // An apostrophe inside a word ("can't") does not open a quotation.
        let opens = matches!(c, '\'' | '"' | '`')
            && !(i > 0 && chars[i - 1].is_alphanumeric() && c == '\'');
        if !opens {
            i += 1;
            continue;
        }
        let close = closing_quote(c);
        match chars[i + 1..].iter().position(|&x| x == close) {
            Some(len) => {
                let quoted: String = chars[i + 1..i + 1 + len].iter().collect();
                set.insert(&quoted);
                if let Some((scope, member)) = quoted.rsplit_once("::") {
                    set.insert(scope);
                    set.insert(member);
                }
                i += len + 2;
            }
            None => break,
        }
    }
    set
}
