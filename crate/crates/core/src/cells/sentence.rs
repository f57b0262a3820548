use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A cell label such as `0-ab-c`: words of equal angles listed in cyclic
/// order starting from the word that holds symbol 0.
///
/// Symbol `0` is oscillator 0 (pinned at angle 0); symbol `a` is oscillator
/// 1, `b` is oscillator 2, and so on. Constructors return the canonical
/// form: every word sorted, the 0-word first, cyclic order kept.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sentence {
    words: Vec<Vec<u8>>,
}

fn symbol_char(s: u8) -> char {
    if s == 0 {
        '0'
    } else {
        (b'a' + s - 1) as char
    }
}

fn char_symbol(c: char) -> Option<u8> {
    match c {
        '0' => Some(0),
        'a'..='z' => Some(c as u8 - b'a' + 1),
        _ => None,
    }
}

impl Sentence {
    /// Builds and canonicalizes a sentence from words in cyclic order.
    pub fn new(words: Vec<Vec<u8>>) -> Result<Self> {
        let m: usize = words.iter().map(Vec::len).sum();
        let mut seen = alloc::vec![false; m];
        for w in &words {
            if w.is_empty() {
                return Err(Error::InvalidSentence("empty word".into()));
            }
            for &s in w {
                if s as usize >= m || seen[s as usize] {
                    return Err(Error::InvalidSentence("symbols must be 0..m-1, each used once".into()));
                }
                seen[s as usize] = true;
            }
        }
        Ok(Self::canonical(words))
    }

    pub(crate) fn canonical(mut words: Vec<Vec<u8>>) -> Self {
        for w in &mut words {
            w.sort_unstable();
        }
        let lead = words.iter().position(|w| w[0] == 0).expect("symbol 0 present");
        words.rotate_left(lead);
        Sentence { words }
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn m(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    /// Every word has at most m/2 symbols, and a word of exactly m/2
    /// symbols only appears in a two-word sentence.
    pub fn is_valid(&self) -> bool {
        let m = self.m();
        let sizes = || self.words.iter().map(Vec::len);
        sizes().all(|n| 2 * n <= m) && (sizes().all(|n| 2 * n < m) || self.words.len() == 2)
    }

    /// `#words − 3`, with the rigid two-word configuration at dimension 0.
    pub fn dimension(&self) -> usize {
        if self.words.len() == 2 {
            0
        } else {
            self.words.len() - 3
        }
    }

    /// Oscillator indices grouped by word.
    pub fn oscillator_words(&self) -> impl Iterator<Item = impl Iterator<Item = usize> + '_> + '_ {
        self.words.iter().map(|w| w.iter().map(|&s| s as usize))
    }

    /// Signed faces. Separator k (1-based) sits after word k−1; separator w
    /// is the wrap that merges the last word into the 0-word. Removing it
    /// contributes with sign `(−1)^{k−1}`. A merged word of size m/2 forces
    /// the remaining words into a single word. Results that are invalid or
    /// drop more than one dimension are discarded, and repeated faces keep
    /// the sign of their first occurrence.
    pub fn border(&self) -> Result<Vec<(i64, Sentence)>> {
        if self.dimension() == 0 {
            return Err(Error::InvalidSentence(alloc::format!("{self} has dimension 0")));
        }
        let m = self.m();
        let w = self.words.len();
        let dim = self.dimension();
        let mut out: Vec<(i64, Sentence)> = Vec::new();
        for k in 1..=w {
            let mut words = self.words.clone();
            let merged = if k < w {
                let next = words.remove(k);
                words[k - 1].extend(next);
                k - 1
            } else {
                let last = words.pop().expect("w >= 3");
                words[0].extend(last);
                0
            };
            if 2 * words[merged].len() == m {
                let big = words.swap_remove(merged);
                let rest: Vec<u8> = words.into_iter().flatten().collect();
                words = alloc::vec![big, rest];
            }
            let face = Sentence::canonical(words);
            if !face.is_valid() || face.dimension() + 1 != dim {
                continue;
            }
            if out.iter().any(|(_, s)| *s == face) {
                continue;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out.push((sign, face));
        }
        Ok(out)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            for &s in w {
                write!(f, "{}", symbol_char(s))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

impl core::str::FromStr for Sentence {
    type Err = Error;
    /// Parses labels like `0-ab-c`; surrounding angle brackets are allowed.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('⟨').trim_end_matches('⟩');
        let words = s
            .split('-')
            .map(|w| w.chars().map(|c| char_symbol(c).ok_or_else(|| Error::InvalidSentence(alloc::format!("bad symbol {c:?}")))).collect())
            .collect::<Result<Vec<Vec<u8>>>>()?;
        Sentence::new(words)
    }
}

impl TryFrom<String> for Sentence {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Sentence> for String {
    fn from(s: Sentence) -> Self {
        alloc::format!("{s}")
    }
}

/// All valid canonical sentences on `m` symbols.
pub fn valid_sentences(m: usize) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<u8>> = Vec::new();
    partitions(m, 0, &mut blocks, &mut out);
    out
}

fn partitions(m: usize, next: usize, blocks: &mut Vec<Vec<u8>>, out: &mut Vec<Sentence>) {
    if next == m {
        arrangements(blocks, out);
        return;
    }
    let s = next as u8;
    for i in 0..blocks.len() {
        if 2 * (blocks[i].len() + 1) <= m {
            blocks[i].push(s);
            partitions(m, next + 1, blocks, out);
            blocks[i].pop();
        }
    }
    blocks.push(alloc::vec![s]);
    partitions(m, next + 1, blocks, out);
    blocks.pop();
}

/// Every cyclic order of the blocks with the 0-block first.
fn arrangements(blocks: &[Vec<u8>], out: &mut Vec<Sentence>) {
    let m: usize = blocks.iter().map(Vec::len).sum();
    let half = blocks.iter().any(|b| 2 * b.len() == m);
    if half && blocks.len() != 2 {
        return;
    }
    let mut rest: Vec<usize> = (1..blocks.len()).collect();
    permute(&mut rest, 0, &mut |perm| {
        let words = core::iter::once(blocks[0].clone()).chain(perm.iter().map(|&i| blocks[i].clone())).collect();
        out.push(Sentence::canonical(words));
    });
}

fn permute(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}
