//! Words over the ordered alphabet `{1 < 2 < … < d}` and the shuffle algebra on them.
//!
//! Everything here uses exact integer arithmetic. Words print as `a, b, c, …`
//! (letter 1 is `a`); the empty word prints as `e`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};

/// A finite word; letters are 1-based. The derived `Ord` is the alphabetical
/// order (a proper prefix is smaller).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Result<Self> {
        ensure!(
            letters.iter().all(|&l| l >= 1),
            "letters are 1-based, got {letters:?}"
        );
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based tensor multi-index of the word.
    pub fn multi_index(&self) -> Vec<usize> {
        self.0.iter().map(|&l| l as usize - 1).collect()
    }

    /// Largest letter used (0 for the empty word).
    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `|w|_a` for every letter `a = 1..=alphabet`.
    pub fn letter_counts(&self, alphabet: usize) -> Vec<usize> {
        let mut counts = vec![0; alphabet];
        for &l in &self.0 {
            counts[l as usize - 1] += 1;
        }
        counts
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    fn pushed(&self, letter: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(letter);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &l in &self.0 {
            if l <= 26 {
                write!(f, "{}", (b'a' + l - 1) as char)?;
            } else {
                write!(f, "[{l}]")?;
            }
        }
        Ok(())
    }
}

/// Parses `"aab"` (letters) or `"112"` (digits); `"e"` and `""` are the empty word.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| match c {
                'a'..='z' => Ok(c as u8 - b'a' + 1),
                '1'..='9' => Ok(c as u8 - b'0'),
                _ => Err(Error::Parse(format!("invalid letter {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// A finitely supported integer combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordPolynomial {
    terms: BTreeMap<Word, i64>,
}

impl WordPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, 1);
        p
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Terms in alphabetical order of the words.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn scale(&self, factor: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * factor);
        }
        out
    }

    /// Exact division of every coefficient; fails if some coefficient is not divisible.
    pub fn div_exact(&self, divisor: i64) -> Result<Self> {
        ensure!(divisor != 0, "division by zero");
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            ensure!(c % divisor == 0, "coefficient {c} of {w} not divisible by {divisor}");
            out.add_term(w.clone(), c / divisor);
        }
        Ok(out)
    }

    /// Bilinear extension of [`shuffle`].
    pub fn shuffle(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                for (w, c) in shuffle(u, v).terms() {
                    out.add_term(w.clone(), a * b * c);
                }
            }
        }
        out
    }
}

impl fmt::Display for WordPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            match (i, c < 0) {
                (0, false) => write!(f, "{c}*{w}")?,
                (0, true) => write!(f, "-{}*{w}", -c)?,
                (_, false) => write!(f, " + {c}*{w}")?,
                (_, true) => write!(f, " - {}*{w}", -c)?,
            }
        }
        Ok(())
    }
}

/// Shuffle product `u ⧢ v`: the coefficient of `w` counts the ways of writing `w` as an
/// interleaving of `u` and `v`.
///
/// Uses `(u'a) ⧢ (v'b) = (u' ⧢ v'b)a + (u'a ⧢ v')b`, tabulated over prefix lengths.
pub fn shuffle(u: &Word, v: &Word) -> WordPolynomial {
    let (m, n) = (u.len(), v.len());
    // table[j] holds u[..i] ⧢ v[..j] for the current row i.
    let mut table: Vec<WordPolynomial> = (0..=n)
        .map(|j| WordPolynomial::from_word(Word(v.0[..j].to_vec())))
        .collect();
    for i in 1..=m {
        let a = u.0[i - 1];
        let mut row = Vec::with_capacity(n + 1);
        row.push(WordPolynomial::from_word(Word(u.0[..i].to_vec())));
        for j in 1..=n {
            let b = v.0[j - 1];
            let mut cell = WordPolynomial::zero();
            for (w, c) in table[j].terms() {
                cell.add_term(w.pushed(a), c);
            }
            for (w, c) in row[j - 1].terms() {
                cell.add_term(w.pushed(b), c);
            }
            row.push(cell);
        }
        table = row;
    }
    table.pop().unwrap_or_default()
}

/// `true` iff every split `w = uv` into nonempty words has `u < v`.
pub fn is_lyndon(w: &Word) -> Result<bool> {
    ensure!(!w.is_empty(), "the empty word has no Lyndon property");
    let s = &w.0;
    Ok((1..s.len()).all(|i| s[..i] < s[i..]))
}

/// Decreasing Lyndon factorization `w = l_1^{i_1} … l_k^{i_k}` with `l_1 > … > l_k`,
/// computed by Duval's algorithm.
pub fn lyndon_factorization(w: &Word) -> Result<Vec<(Word, usize)>> {
    ensure!(!w.is_empty(), "cannot factorize the empty word");
    let s = &w.0;
    let n = s.len();
    let mut factors: Vec<(Word, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        let period = j - k;
        while i <= k {
            let factor = Word(s[i..i + period].to_vec());
            match factors.last_mut() {
                Some((last, mult)) if *last == factor => *mult += 1,
                _ => factors.push((factor, 1)),
            }
            i += period;
        }
    }
    Ok(factors)
}

/// All Lyndon words of length `1..=max_len` over letters `1..=alphabet`, in
/// alphabetical order (Duval's generation algorithm).
pub fn lyndon_words_up_to(alphabet: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if alphabet == 0 || max_len == 0 {
        return out;
    }
    let top = alphabet as u8;
    let mut w: Vec<u8> = vec![0];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        out.push(Word(w.clone()));
        let period = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - period]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
    }
    out
}

/// Letter multiplicities: `counts[a-1] = |w|_a`.
pub type Multiset = [usize];

/// Parses a multiset written as a word, e.g. `"aabc"` → `[2, 1, 1]`.
pub fn parse_multiset(s: &str) -> Result<Vec<usize>> {
    let w: Word = s.parse()?;
    Ok(w.letter_counts(w.max_letter() as usize))
}

/// Lyndon words whose letter multiset equals `counts`, alphabetically sorted.
pub fn lyndon_words_for_multiset(counts: &Multiset) -> Result<Vec<Word>> {
    let total: usize = counts.iter().sum();
    ensure!(total >= 1, "multiset must contain at least one letter");
    Ok(lyndon_words_up_to(counts.len(), total)
        .into_iter()
        .filter(|w| w.len() == total && w.letter_counts(counts.len()) == counts)
        .collect())
}

/// All distinct words with the given letter multiset, alphabetically sorted.
pub fn words_with_multiset(counts: &Multiset) -> Vec<Word> {
    fn rec(counts: &mut [usize], prefix: &mut Vec<u8>, remaining: usize, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(prefix.clone()));
            return;
        }
        for a in 0..counts.len() {
            if counts[a] > 0 {
                counts[a] -= 1;
                prefix.push(a as u8 + 1);
                rec(counts, prefix, remaining - 1, out);
                prefix.pop();
                counts[a] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut c = counts.to_vec();
    rec(&mut c, &mut Vec::new(), counts.iter().sum(), &mut out);
    out
}

/// Result of expanding the normalized shuffle of a word's Lyndon factors:
/// `1/(i_1!…i_k!) l_1^{⧢ i_1} ⧢ … ⧢ l_k^{⧢ i_k} = w + correction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LyndonExpansion {
    pub word: Word,
    pub factors: Vec<(Word, usize)>,
    /// `Σ_{u<w} α_u u`: every word is smaller than `word` and has its letter multiset.
    pub correction: WordPolynomial,
}

pub fn lyndon_shuffle_expansion(w: &Word) -> Result<LyndonExpansion> {
    let factors = lyndon_factorization(w)?;
    let mut product = WordPolynomial::from_word(Word::empty());
    let mut normalizer: i64 = 1;
    for (l, mult) in &factors {
        for k in 1..=*mult {
            product = product.shuffle(&WordPolynomial::from_word(l.clone()));
            normalizer *= k as i64;
        }
    }
    let product = product.div_exact(normalizer)?;
    if product.coefficient(w) != 1 {
        return Err(Error::Numerical(format!(
            "leading coefficient of {w} is {}, expected 1",
            product.coefficient(w)
        )));
    }
    let correction = product.sub(&WordPolynomial::from_word(w.clone()));
    Ok(LyndonExpansion {
        word: w.clone(),
        factors,
        correction,
    })
}

/// Generating set for the words with letter multiset `counts`: the Lyndon words
/// composed by those letters.
pub fn generating_set(counts: &Multiset) -> Result<Vec<Word>> {
    lyndon_words_for_multiset(counts)
}

/// A second generating set for the words composed by `a, a, b, c`.
pub const ALTERNATIVE_AABC_GENERATORS: [&str; 3] = ["aabc", "aacb", "baac"];

/// Checks whether `candidates` generate all words with letter multiset `counts`
/// modulo the span of nontrivial shuffle products `u ⧢ v` (`u, v` nonempty).
pub fn spans_modulo_shuffles(counts: &Multiset, candidates: &[Word]) -> Result<bool> {
    let basis = words_with_multiset(counts);
    ensure!(!basis.is_empty(), "empty multiset");
    let index: BTreeMap<&Word, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let to_row = |p: &WordPolynomial| -> Result<Vec<i128>> {
        let mut row = vec![0i128; basis.len()];
        for (w, c) in p.terms() {
            let i = index
                .get(w)
                .ok_or_else(|| Error::Contract(format!("{w} has the wrong letter multiset")))?;
            row[*i] = c as i128;
        }
        Ok(row)
    };
    let mut rows = Vec::new();
    for c in candidates {
        rows.push(to_row(&WordPolynomial::from_word(c.clone()))?);
    }
    // Every u ⧢ v with complementary sub-multisets.
    for sub in sub_multisets(counts) {
        let size: usize = sub.iter().sum();
        if size == 0 || size == basis[0].len() {
            continue;
        }
        let rest: Vec<usize> = counts.iter().zip(&sub).map(|(a, b)| a - b).collect();
        let lefts = words_with_multiset(&sub);
        let rights = words_with_multiset(&rest);
        for u in &lefts {
            for v in &rights {
                rows.push(to_row(&shuffle(u, v))?);
            }
        }
    }
    Ok(integer_rank(rows) == basis.len())
}

fn sub_multisets(counts: &Multiset) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in counts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=c).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rank over the rationals by fraction-free elimination with gcd normalization.
fn integer_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for r in (rank + 1)..rows.len() {
            let f = rows[r][col];
            if f == 0 {
                continue;
            }
            let row = &mut rows[r];
            for c in col..cols {
                row[c] = row[c] * p[col] - p[c] * f;
            }
            let g = row.iter().fold(0, |g, &x| gcd(g, x));
            if g > 1 {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn poly(terms: &[(&str, i64)]) -> WordPolynomial {
        let mut p = WordPolynomial::zero();
        for (s, c) in terms {
            p.add_term(w(s), *c);
        }
        p
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("abc").letters(), &[1, 2, 3]);
        assert_eq!(w("12"), w("ab"));
        assert_eq!(w("e"), Word::empty());
        assert_eq!(w("cab").to_string(), "cab");
        assert!("a-b".parse::<Word>().is_err());
    }

    #[test]
    fn alphabetical_order() {
        assert!(w("a") < w("aa"));
        assert!(w("aab") < w("ab"));
        assert!(w("abac") < w("b"));
    }

    #[test]
    fn shuffle_with_empty_word() {
        assert_eq!(shuffle(&Word::empty(), &w("bca")), poly(&[("bca", 1)]));
        assert_eq!(shuffle(&w("bca"), &Word::empty()), poly(&[("bca", 1)]));
    }

    #[test]
    fn shuffle_small_examples() {
        assert_eq!(shuffle(&w("a"), &w("a")), poly(&[("aa", 2)]));
        assert_eq!(
            shuffle(&w("b"), &w("aac")),
            poly(&[("baac", 1), ("abac", 1), ("aabc", 1), ("aacb", 1)])
        );
        assert_eq!(shuffle(&w("ab"), &w("ab")), poly(&[("abab", 2), ("aabb", 4)]));
    }

    #[test]
    fn polynomial_display_is_alphabetical() {
        let p = poly(&[("ba", 1), ("ab", -2), ("aab", 3)]);
        assert_eq!(p.to_string(), "3*aab - 2*ab + 1*ba");
        assert_eq!(WordPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let mut p = poly(&[("ab", 2)]);
        p.add_term(w("ab"), -2);
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn lyndon_predicate() {
        assert!(is_lyndon(&w("aab")).unwrap());
        assert!(!is_lyndon(&w("aa")).unwrap());
        assert!(!is_lyndon(&w("aba")).unwrap());
        assert!(is_lyndon(&w("b")).unwrap());
        assert!(is_lyndon(&Word::empty()).is_err());
    }

    #[test]
    fn lyndon_words_over_two_letters() {
        let got: Vec<String> = lyndon_words_up_to(2, 4).iter().map(|w| w.to_string()).collect();
        let mut expected = vec!["a", "b", "ab", "aab", "abb", "aaab", "aabb", "abbb"];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(lyndon_factorization(&w("aab")).unwrap(), vec![(w("aab"), 1)]);
        assert_eq!(
            lyndon_factorization(&w("ba")).unwrap(),
            vec![(w("b"), 1), (w("a"), 1)]
        );
        assert_eq!(lyndon_factorization(&w("abab")).unwrap(), vec![(w("ab"), 2)]);
        assert_eq!(
            lyndon_factorization(&w("cbbab")).unwrap(),
            vec![(w("c"), 1), (w("b"), 2), (w("ab"), 1)]
        );
    }

    #[test]
    fn multiset_lyndon_sets() {
        let names = |c: &[usize]| -> Vec<String> {
            lyndon_words_for_multiset(c)
                .unwrap()
                .iter()
                .map(|w| w.to_string())
                .collect()
        };
        assert_eq!(names(&[2, 1]), ["aab"]);
        assert_eq!(names(&[3, 1]), ["aaab"]);
        assert_eq!(names(&[2, 2]), ["aabb"]);
        assert_eq!(names(&[2, 1, 1]), ["aabc", "aacb", "abac"]);
        assert!(lyndon_words_for_multiset(&[0, 0]).is_err());
    }

    #[test]
    fn expansion_examples() {
        let e = lyndon_shuffle_expansion(&w("aab")).unwrap();
        assert!(e.correction.is_zero());
        let e = lyndon_shuffle_expansion(&w("ba")).unwrap();
        assert_eq!(e.correction, poly(&[("ab", 1)]));
    }

    #[test]
    fn printed_shuffle_identity_has_opposite_sign() {
        // b ⧢ aac = baac + abac + aabc + aacb, so abac = b⧢aac - baac - aabc - aacb.
        let rhs = shuffle(&w("b"), &w("aac")).sub(&poly(&[("baac", 1), ("aabc", 1), ("aacb", 1)]));
        assert_eq!(rhs, poly(&[("abac", 1)]));
        let printed = poly(&[("baac", 1), ("aabc", 1), ("aacb", 1)]).sub(&shuffle(&w("b"), &w("aac")));
        assert_eq!(printed, poly(&[("abac", -1)]));
    }

    #[test]
    fn generating_sets_span_their_classes() {
        for counts in [vec![2, 1], vec![3, 1], vec![2, 2], vec![2, 1, 1]] {
            let gens = generating_set(&counts).unwrap();
            assert!(spans_modulo_shuffles(&counts, &gens).unwrap(), "{counts:?}");
            // one word short of the Lyndon set never spans
            if gens.len() > 1 {
                assert!(!spans_modulo_shuffles(&counts, &gens[1..]).unwrap());
            } else {
                assert!(!spans_modulo_shuffles(&counts, &[]).unwrap());
            }
        }
        let alt: Vec<Word> = ALTERNATIVE_AABC_GENERATORS.iter().map(|s| w(s)).collect();
        assert!(spans_modulo_shuffles(&[2, 1, 1], &alt).unwrap());
    }

    #[test]
    fn words_with_multiset_counts() {
        assert_eq!(words_with_multiset(&[2, 1, 1]).len(), 12);
        assert_eq!(words_with_multiset(&[2, 2]).len(), 6);
    }
}
