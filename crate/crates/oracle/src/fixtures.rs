//! Shared text fixtures.

const UTTERANCES_50: &str = include_str!("../fixtures/utterances_50.txt");

/// 200+ word narrative used for the tagging oracle.
pub const TAGGING_TEXT: &str = include_str!("../fixtures/tagging_200.txt");

/// Paragraph with nested subordinators; see [`DEPTH_PARAGRAPH_DEPTHS`].
pub const DEPTH_PARAGRAPH: &str = include_str!("../fixtures/depth_paragraph.txt");

/// Clause depths for [`DEPTH_PARAGRAPH`], counted by hand:
/// because | when, that | which | - | if, that, while |
/// although, that, until, because | - (unterminated tail).
pub const DEPTH_PARAGRAPH_DEPTHS: [usize; 7] = [2, 3, 2, 1, 4, 5, 1];

/// Fifty short utterances, one per line.
pub fn utterances() -> Vec<&'static str> {
    UTTERANCES_50.lines().filter(|l| !l.trim().is_empty()).collect()
}

/// The fifty utterances joined into a single paragraph.
pub fn paragraph_50() -> String {
    utterances().join(" ")
}

/// The ten utterances driven through the end-to-end determinism run.
pub fn scripted_ten() -> Vec<&'static str> {
    utterances().into_iter().take(10).collect()
}

/// Vocabulary for randomized utterance generation, mixing open and closed
/// classes so both content and fallback paths are hit.
pub const WORD_POOL: &[&str] = &[
    "the", "a", "of", "and", "in", "river", "mountain", "falls", "quickly", "beautiful",
    "waiting", "painted", "creation", "happiness", "we", "they", "because", "that", "when",
    "slowly", "ink", "scroll", "moon", "silent", "generous", "7", "1999", "oh", "hello", "to",
    "with", "boat", "grows", "listen", "memory", "harmonious", "movement", "under", "but",
];

/// Deterministic xorshift so randomized fixtures need no RNG crate here.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Generate `count` random utterances from [`WORD_POOL`] with random
/// terminators.
pub fn random_utterances(count: usize, seed: u64) -> Vec<String> {
    let mut rng = XorShift::new(seed);
    (0..count)
        .map(|_| {
            let sentences = 1 + rng.below(3) as usize;
            let mut parts = Vec::new();
            for _ in 0..sentences {
                let words = 1 + rng.below(12) as usize;
                let mut s: Vec<&str> = (0..words)
                    .map(|_| WORD_POOL[rng.below(WORD_POOL.len() as u64) as usize])
                    .collect();
                let term = [".", "!", "?", ""][rng.below(4) as usize];
                let last = s.pop().unwrap();
                let tail = format!("{last}{term}");
                let mut sentence = s.join(" ");
                if !sentence.is_empty() {
                    sentence.push(' ');
                }
                sentence.push_str(&tail);
                parts.push(sentence);
            }
            parts.join(" ")
        })
        .collect()
}
