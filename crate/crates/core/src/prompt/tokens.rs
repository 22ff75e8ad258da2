use std::fmt;
use std::sync::Arc;

/// Counts model tokens in a piece of text. Implementations must be monotone
/// under concatenation: `count(x + y) >= count(x)`.
pub trait TokenCounter: Send + Sync {
    fn count(&self, text: &str) -> usize;
}

impl<F> TokenCounter for F
where
    F: Fn(&str) -> usize + Send + Sync,
{
    fn count(&self, text: &str) -> usize {
        self(text)
    }
}

/// Maximal runs of `[A-Za-z0-9_]` plus every other non-whitespace character.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPunctCounter;

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl TokenCounter for WordPunctCounter {
    fn count(&self, text: &str) -> usize {
        let mut n = 0;
        let mut in_word = false;
        for c in text.chars() {
            if is_word(c) {
                if !in_word {
                    n += 1;
                    in_word = true;
                }
            } else {
                in_word = false;
                if !c.is_whitespace() {
                    n += 1;
                }
            }
        }
        n
    }
}

/// A token counter scaled by a rational safety factor (rounded up), so the
/// estimate errs toward overcounting the real tokenizer.
#[derive(Clone)]
pub struct TokenEstimator {
    counter: Arc<dyn TokenCounter>,
    factor_num: usize,
    factor_den: usize,
}

impl TokenEstimator {
    /// # Panics
    /// If the factor is below one or the denominator is zero.
    pub fn new(counter: Arc<dyn TokenCounter>, factor_num: usize, factor_den: usize) -> Self {
        assert!(factor_den > 0 && factor_num >= factor_den, "safety factor must be >= 1");
        Self {
            counter,
            factor_num,
            factor_den,
        }
    }

    /// Unscaled token count.
    pub fn raw(&self, text: &str) -> usize {
        self.counter.count(text)
    }

    pub fn scale(&self, raw: usize) -> usize {
        (raw * self.factor_num).div_ceil(self.factor_den)
    }

    pub fn estimate(&self, text: &str) -> usize {
        self.scale(self.raw(text))
    }
}

impl Default for TokenEstimator {
    /// Word/punctuation counting with a 1.25 safety factor.
    fn default() -> Self {
        Self::new(Arc::new(WordPunctCounter), 5, 4)
    }
}

impl fmt::Debug for TokenEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TokenEstimator(x{}/{})", self.factor_num, self.factor_den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_and_punctuation() {
        let c = WordPunctCounter;
        assert_eq!(c.count(""), 0);
        assert_eq!(c.count("bool IsIncognito() const;"), 6);
        assert_eq!(c.count("web_app_info->app_url"), 4);
        assert_eq!(c.count("  \n\t"), 0);
    }

    #[test]
    fn safety_factor_rounds_up() {
        let est = TokenEstimator::default();
        assert_eq!(est.scale(0), 0);
        assert_eq!(est.scale(1), 2);
        assert_eq!(est.scale(4), 5);
        assert_eq!(est.scale(1638), 2048);
        assert_eq!(est.scale(1639), 2049);
    }

    #[test]
    fn closures_are_counters() {
        let est = TokenEstimator::new(Arc::new(|s: &str| s.len()), 1, 1);
        assert_eq!(est.estimate("abc"), 3);
    }
}
