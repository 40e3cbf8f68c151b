//! Free groups and free products of free groups.
//!
//! A free product of free groups is itself free on the union of the factor
//! bases, so every element has a unique freely reduced normal form. The factor
//! structure only matters for presentation: a reduced word splits into maximal
//! blocks of letters from a single factor.
//!
//! Words are written as space separated letter names. A lowercase name is a
//! generator and its uppercase spelling is the inverse, so `"a A b"` reduces to
//! `"b"`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("invalid generator name `{0}`: names must be lowercase alphanumeric and start with a letter")]
    InvalidName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("endomorphism has no image for generator `{0}`")]
    MissingImage(String),
    #[error("sample space is empty: {0}")]
    BoundTooSmall(&'static str),
    #[error("subgroup generators must be nontrivial and the list nonempty")]
    TrivialGenerator,
}

/// One letter of a word: a basis generator or its inverse.
///
/// Packed as `generator << 1 | inverse`, which also fixes the letter order used
/// for shortlex comparison: `a < A < b < B < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter(((generator as u32) << 1) | inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2 * rank`.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Letter(code as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

/// Structured view of a letter relative to its basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub factor: usize,
    pub basis_index: usize,
    pub sign: Sign,
}

/// Declared generators, grouped into free factors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Basis {
    factors: Vec<Vec<String>>,
    names: Vec<String>,
    position: Vec<(usize, usize)>,
    lookup: HashMap<String, usize>,
}

impl Basis {
    /// Free product of free groups, one name list per factor.
    pub fn free_product<S: AsRef<str>>(factors: &[Vec<S>]) -> Result<Self, WordError> {
        let mut basis = Basis::default();
        for (f, names) in factors.iter().enumerate() {
            let mut owned = Vec::with_capacity(names.len());
            for (i, name) in names.iter().enumerate() {
                let name = name.as_ref();
                validate_name(name)?;
                if basis.lookup.contains_key(name) {
                    return Err(WordError::DuplicateName(name.to_string()));
                }
                basis.lookup.insert(name.to_string(), basis.names.len());
                basis.names.push(name.to_string());
                basis.position.push((f, i));
                owned.push(name.to_string());
            }
            basis.factors.push(owned);
        }
        Ok(basis)
    }

    /// A single free factor.
    pub fn free<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Self::free_product(&[names])
    }

    /// Rank `n` free group on `a, b, c, ...` (or `g1, g2, ...` past 26).
    pub fn standard(rank: usize) -> Self {
        let names: Vec<String> = if rank <= 26 {
            (0..rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect()
        } else {
            (1..=rank).map(|i| format!("g{i}")).collect()
        };
        Self::free(&names).expect("generated names are valid")
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<String>] {
        &self.factors
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn describe(&self, letter: Letter) -> Generator {
        let (factor, basis_index) = self.position[letter.generator()];
        Generator {
            factor,
            basis_index,
            sign: if letter.is_inverse() {
                Sign::Negative
            } else {
                Sign::Positive
            },
        }
    }

    pub fn letter(&self, g: Generator) -> Result<Letter, WordError> {
        let rank = self.factors.get(g.factor).map_or(0, Vec::len);
        if g.basis_index >= rank {
            return Err(WordError::GeneratorOutOfRange {
                index: g.basis_index,
                rank,
            });
        }
        let offset: usize = self.factors[..g.factor].iter().map(Vec::len).sum();
        Ok(Letter::new(
            offset + g.basis_index,
            g.sign == Sign::Negative,
        ))
    }

    /// Positive letter for a named generator.
    pub fn generator(&self, name: &str) -> Result<Letter, WordError> {
        self.index_of(name)
            .map(|i| Letter::new(i, false))
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))
    }

    pub fn parse_letter(&self, token: &str) -> Result<Letter, WordError> {
        if let Some(i) = self.index_of(token) {
            return Ok(Letter::new(i, false));
        }
        let lowered = token.to_ascii_lowercase();
        if lowered != token && token.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            if let Some(i) = self.index_of(&lowered) {
                return Ok(Letter::new(i, true));
            }
        }
        Err(WordError::UnknownGenerator(token.to_string()))
    }

    /// Parses and reduces a space separated word. `""` and `"1"` are the identity.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            letters.push(self.parse_letter(token)?);
        }
        self.reduce(&letters)
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(&self, letters: &[Letter]) -> Result<Word, WordError> {
        for l in letters {
            if l.generator() >= self.rank() {
                return Err(WordError::GeneratorOutOfRange {
                    index: l.generator(),
                    rank: self.rank(),
                });
            }
        }
        Ok(Word::reduced_from(letters.iter().copied()))
    }

    pub fn format(&self, word: &Word) -> String {
        let mut out = String::new();
        for (i, l) in word.letters().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&self.format_letter(*l));
        }
        out
    }

    pub fn format_letter(&self, l: Letter) -> String {
        let name = &self.names[l.generator()];
        if l.is_inverse() {
            name.to_ascii_uppercase()
        } else {
            name.clone()
        }
    }

    /// All positive letters of one factor.
    pub fn factor_letters(&self, factor: usize) -> Vec<Letter> {
        let offset: usize = self.factors[..factor].iter().map(Vec::len).sum();
        (offset..offset + self.factors[factor].len())
            .map(|g| Letter::new(g, false))
            .collect()
    }

    /// Splits a reduced word into maximal single-factor blocks.
    pub fn factor_blocks<'w>(&self, word: &'w Word) -> Vec<(usize, &'w [Letter])> {
        let mut blocks = Vec::new();
        let letters = word.letters();
        let mut start = 0;
        for i in 1..=letters.len() {
            let boundary = i == letters.len()
                || self.position[letters[i].generator()].0
                    != self.position[letters[start].generator()].0;
            if boundary {
                if start < i {
                    blocks.push((
                        self.position[letters[start].generator()].0,
                        &letters[start..i],
                    ));
                }
                start = i;
            }
        }
        blocks
    }
}

fn validate_name(name: &str) -> Result<(), WordError> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if ok && name != "e" {
        Ok(())
    } else {
        Err(WordError::InvalidName(name.to_string()))
    }
}

/// Appends `l` to a reduced buffer, cancelling against the last letter.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn reduced_from(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut buf = Vec::new();
        for l in letters {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn product(&self, other: &Word) -> Word {
        let mut buf = Vec::with_capacity(self.len() + other.len());
        buf.extend_from_slice(&self.0);
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    /// `self * l`, reduced.
    pub fn times_letter(&self, l: Letter) -> Word {
        let mut buf = self.0.clone();
        push_reduced(&mut buf, l);
        Word(buf)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.product(&base);
        }
        out
    }

    /// `g^-1 self g`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.inverse().product(self).product(g)
    }

    /// True when every letter belongs to `generators` (membership in a
    /// free-factor subgroup).
    pub fn uses_only(&self, generators: &[usize]) -> bool {
        self.0.iter().all(|l| generators.contains(&l.generator()))
    }
}

impl Ord for Word {
    /// Shortlex: shorter words first, then lexicographic by letter.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Basis-free rendering (`g0`, `G0`, ...); use [`Basis::format`] for names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let c = if l.is_inverse() { 'G' } else { 'g' };
            write!(f, "{c}{}", l.generator())?;
        }
        Ok(())
    }
}

/// A finitely generated subgroup, given by nontrivial reduced generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    generators: Vec<Word>,
}

impl Subgroup {
    pub fn new(generators: Vec<Word>) -> Result<Self, WordError> {
        if generators.is_empty() || generators.iter().any(Word::is_identity) {
            return Err(WordError::TrivialGenerator);
        }
        Ok(Subgroup { generators })
    }

    /// The free factor spanned by the given basis generators.
    pub fn free_factor(indices: &[usize]) -> Result<Self, WordError> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        Self::new(
            idx.into_iter()
                .map(|i| Word::letter(Letter::new(i, false)))
                .collect(),
        )
    }

    pub fn whole(rank: usize) -> Result<Self, WordError> {
        Self::free_factor(&(0..rank).collect::<Vec<_>>())
    }

    pub fn parse<S: AsRef<str>>(basis: &Basis, generators: &[S]) -> Result<Self, WordError> {
        Self::new(
            generators
                .iter()
                .map(|g| basis.parse(g.as_ref()))
                .collect::<Result<_, _>>()?,
        )
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Sorted generator indices when every generator is a single basis
    /// letter, i.e. the subgroup is a free factor.
    pub fn basis_subset(&self) -> Option<Vec<usize>> {
        let mut idx = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            match g.letters() {
                [l] => idx.push(l.generator()),
                _ => return None,
            }
        }
        idx.sort_unstable();
        idx.dedup();
        Some(idx)
    }

    pub fn max_generator_len(&self) -> usize {
        self.generators.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Membership for free factors and cyclic subgroups; `None` otherwise.
    pub fn contains(&self, w: &Word) -> Option<bool> {
        if let Some(idx) = self.basis_subset() {
            return Some(w.uses_only(&idx));
        }
        match self.generators.as_slice() {
            [u] => Some(cyclic_member(u, w)),
            _ => None,
        }
    }
}

/// Whether `w` is a power of `u`, writing `u = c v c⁻¹` with `v` cyclically
/// reduced so that `|u^k| = 2|c| + |k||v|`.
fn cyclic_member(u: &Word, w: &Word) -> bool {
    if w.is_identity() {
        return true;
    }
    let l = u.letters();
    let mut c = 0;
    while c < l.len() / 2 && l[c] == l[l.len() - 1 - c].inverse() {
        c += 1;
    }
    let core = l.len() - 2 * c;
    if w.len() < 2 * c || !(w.len() - 2 * c).is_multiple_of(core) {
        return false;
    }
    let k = ((w.len() - 2 * c) / core) as i64;
    k > 0 && (u.pow(k) == *w || u.pow(-k) == *w)
}

/// All reduced words of length at most `max_len` over the first `rank`
/// generators, in shortlex order.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut layer_start = 0;
    for _ in 0..max_len {
        let layer_end = out.len();
        for i in layer_start..layer_end {
            let w = out[i].clone();
            for code in 0..2 * rank {
                let l = Letter::from_code(code);
                if w.last() == Some(l.inverse()) {
                    continue;
                }
                let mut next = w.clone();
                next.0.push(l);
                out.push(next);
            }
        }
        layer_start = layer_end;
    }
    out
}

/// Number of reduced words of length at most `radius` in a free group of
/// the given rank.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    if rank == 0 {
        return 1;
    }
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * rank as u128 - 1);
    }
    total
}

/// Every reduced word in the abstract free group on `generators.len()`
/// symbols of length `1..=max_len`, evaluated as an element of the ambient
/// group. The formal word is returned alongside its value.
pub fn subgroup_words(generators: &[Word], max_len: usize) -> Vec<(Vec<Letter>, Word)> {
    fn walk(
        generators: &[Word],
        max_len: usize,
        formal: &mut Vec<Letter>,
        value: &Word,
        out: &mut Vec<(Vec<Letter>, Word)>,
    ) {
        if formal.len() == max_len {
            return;
        }
        for code in 0..2 * generators.len() {
            let l = Letter::from_code(code);
            if formal.last() == Some(&l.inverse()) {
                continue;
            }
            let g = &generators[l.generator()];
            let next = if l.is_inverse() {
                value.product(&g.inverse())
            } else {
                value.product(g)
            };
            formal.push(l);
            out.push((formal.clone(), next.clone()));
            walk(generators, max_len, formal, &next, out);
            formal.pop();
        }
    }
    let mut out = Vec::new();
    walk(
        generators,
        max_len,
        &mut Vec::new(),
        &Word::identity(),
        &mut out,
    );
    out
}

/// A group endomorphism given by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    images: Vec<Option<Word>>,
}

impl Endomorphism {
    /// Endomorphism with no images assigned yet.
    pub fn empty(rank: usize) -> Self {
        Endomorphism {
            images: vec![None; rank],
        }
    }

    pub fn identity(rank: usize) -> Self {
        Endomorphism {
            images: (0..rank)
                .map(|g| Some(Word::letter(Letter::new(g, false))))
                .collect(),
        }
    }

    pub fn set(&mut self, generator: usize, image: Word) {
        self.images[generator] = Some(image);
    }

    pub fn with(mut self, generator: usize, image: Word) -> Self {
        self.set(generator, image);
        self
    }

    pub fn image(&self, generator: usize) -> Option<&Word> {
        self.images.get(generator).and_then(Option::as_ref)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Image of `w`, reduced.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        let mut buf = Vec::new();
        self.apply_into(w.letters(), &mut buf)?;
        Ok(Word(buf))
    }

    fn apply_into(&self, letters: &[Letter], buf: &mut Vec<Letter>) -> Result<(), WordError> {
        buf.clear();
        for &l in letters {
            let image = self
                .images
                .get(l.generator())
                .and_then(Option::as_ref)
                .ok_or_else(|| WordError::MissingImage(format!("g{}", l.generator())))?;
            if l.is_inverse() {
                for &m in image.0.iter().rev() {
                    push_reduced(buf, m.inverse());
                }
            } else {
                for &m in &image.0 {
                    push_reduced(buf, m);
                }
            }
        }
        Ok(())
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism, WordError> {
        let images = other
            .images
            .iter()
            .map(|img| img.as_ref().map(|w| self.apply(w)).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Endomorphism { images })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionVerdict {
    /// No element of any sampled conjugate landed in the kernel.
    Consistent,
    WitnessFound,
}

/// A conjugate `g^-1 q g` killed by the retraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionWitness {
    pub conjugator: Word,
    pub subgroup_element: Word,
    pub conjugate: Word,
    /// Whether the conjugate is itself a word in the `P` generators (only
    /// decided when every `P` generator is a single basis letter).
    pub lies_in_p: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionReport {
    pub verdict: IntersectionVerdict,
    pub conjugators_checked: usize,
    pub subgroup_words_checked: usize,
    pub pairs_checked: u64,
    pub witness_count: u64,
    /// First witnesses in enumeration order, at most [`MAX_STORED_WITNESSES`].
    pub witnesses: Vec<IntersectionWitness>,
}

pub const MAX_STORED_WITNESSES: usize = 32;

/// Bounded search for `P ∩ g^-1 Q g ≠ {1}`.
///
/// `P` must lie in the kernel of `retraction`; then any nontrivial element of
/// `P ∩ g^-1 Q g` is a conjugate `g^-1 q g` killed by the retraction. For
/// every conjugator and every nontrivial reduced word of length at most
/// `word_bound` in the `Q` generators this computes the image of the
/// conjugate, as `f(g)^-1 f(q) f(g)`; a trivial image is recorded as a
/// witness together with the conjugate itself.
pub fn verify_trivial_intersection(
    p_gens: &[Word],
    q_gens: &[Word],
    retraction: &Endomorphism,
    conjugators: &[Word],
    word_bound: usize,
) -> Result<IntersectionReport, WordError> {
    for p in p_gens {
        let image = retraction.apply(p)?;
        if !image.is_identity() {
            return Err(WordError::BoundTooSmall(
                "retraction does not kill the P generators",
            ));
        }
    }
    if q_gens.is_empty() || q_gens.iter().all(Word::is_identity) {
        return Err(WordError::BoundTooSmall("Q has no nontrivial generators"));
    }
    if word_bound == 0 {
        return Err(WordError::BoundTooSmall("word bound is zero"));
    }
    if conjugators.is_empty() {
        return Err(WordError::BoundTooSmall("no conjugators supplied"));
    }
    let p_letters: Option<Vec<usize>> = p_gens
        .iter()
        .map(|w| match w.letters() {
            [l] => Some(l.generator()),
            _ => None,
        })
        .collect();

    let samples: Vec<Word> = subgroup_words(q_gens, word_bound)
        .into_iter()
        .map(|(_, w)| w)
        .filter(|w| !w.is_identity())
        .collect();
    if samples.is_empty() {
        return Err(WordError::BoundTooSmall("no nontrivial subgroup words"));
    }
    let g_images: Vec<(Word, Word)> = conjugators
        .iter()
        .map(|g| retraction.apply(g).map(|fg| (fg.inverse(), fg)))
        .collect::<Result<_, _>>()?;

    let per_sample: Vec<Result<(u64, Vec<IntersectionWitness>), WordError>> = samples
        .par_iter()
        .map(|q| {
            let fq = retraction.apply(q)?;
            let mut image = Vec::with_capacity(fq.len() + 16);
            let mut count = 0u64;
            let mut found = Vec::new();
            for (g, (fg_inv, fg)) in conjugators.iter().zip(&g_images) {
                image.clear();
                for &l in fg_inv
                    .letters()
                    .iter()
                    .chain(fq.letters())
                    .chain(fg.letters())
                {
                    push_reduced(&mut image, l);
                }
                if image.is_empty() {
                    count += 1;
                    if found.len() < MAX_STORED_WITNESSES {
                        let conjugate = q.conjugate_by(g);
                        let lies_in_p = p_letters.as_ref().map(|ps| conjugate.uses_only(ps));
                        found.push(IntersectionWitness {
                            conjugator: g.clone(),
                            subgroup_element: q.clone(),
                            conjugate,
                            lies_in_p,
                        });
                    }
                }
            }
            Ok((count, found))
        })
        .collect();

    let mut witness_count = 0;
    let mut witnesses = Vec::new();
    for r in per_sample {
        let (count, found) = r?;
        witness_count += count;
        for w in found {
            if witnesses.len() < MAX_STORED_WITNESSES {
                witnesses.push(w);
            }
        }
    }
    Ok(IntersectionReport {
        verdict: if witness_count == 0 {
            IntersectionVerdict::Consistent
        } else {
            IntersectionVerdict::WitnessFound
        },
        conjugators_checked: conjugators.len(),
        subgroup_words_checked: samples.len(),
        pairs_checked: samples.len() as u64 * conjugators.len() as u64,
        witness_count,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Basis {
        Basis::standard(2)
    }

    #[test]
    fn cyclic_membership_matches_power_listing() {
        let b = ab();
        for u in ["a", "a b", "b a B", "a a", "a b A B", "b a b B"] {
            let h = Subgroup::parse(&b, &[u]).unwrap();
            let gen = &h.generators()[0];
            let powers: std::collections::HashSet<Word> = (-12..=12).map(|k| gen.pow(k)).collect();
            for w in reduced_words(2, 6) {
                assert_eq!(h.contains(&w), Some(powers.contains(&w)), "{u} vs {w}");
            }
        }
    }

    #[test]
    fn subgroup_descriptors() {
        let b = Basis::standard(3);
        let h = Subgroup::parse(&b, &["c", "a"]).unwrap();
        assert_eq!(h.basis_subset(), Some(vec![0, 2]));
        assert_eq!(h.contains(&b.parse("a C a").unwrap()), Some(true));
        assert_eq!(h.contains(&b.parse("a b").unwrap()), Some(false));
        assert_eq!(Subgroup::parse(&b, &["a b"]).unwrap().basis_subset(), None);
        assert_eq!(
            Subgroup::parse(&b, &["a b", "c"])
                .unwrap()
                .contains(&Word::identity()),
            None
        );
        assert_eq!(
            Subgroup::parse(&b, &["1"]),
            Err(WordError::TrivialGenerator)
        );
        assert_eq!(Subgroup::new(vec![]), Err(WordError::TrivialGenerator));
        assert_eq!(
            Subgroup::whole(3).unwrap().basis_subset(),
            Some(vec![0, 1, 2])
        );
    }

    #[test]
    fn reduce_examples() {
        let b = ab();
        assert_eq!(b.format(&b.parse("a A b").unwrap()), "b");
        assert_eq!(b.format(&b.parse("").unwrap()), "");
        assert!(b.parse("a b B A").unwrap().is_identity());
    }

    #[test]
    fn reduce_rejects_unknown_letters() {
        let b = ab();
        assert_eq!(b.parse("a c"), Err(WordError::UnknownGenerator("c".into())));
        assert!(matches!(
            b.reduce(&[Letter::new(5, false)]),
            Err(WordError::GeneratorOutOfRange { index: 5, rank: 2 })
        ));
    }

    #[test]
    fn product_examples() {
        let b = ab();
        let p = |x: &str, y: &str| b.format(&b.parse(x).unwrap().product(&b.parse(y).unwrap()));
        assert_eq!(p("a b", "B a"), "a a");
        assert_eq!(p("a", ""), "a");
        assert_eq!(p("a b", "B A"), "");
    }

    #[test]
    fn inverse_examples() {
        let b = ab();
        let inv = |x: &str| b.format(&b.parse(x).unwrap().inverse());
        assert_eq!(inv("a b"), "B A");
        assert_eq!(inv(""), "");
        assert_eq!(inv("a a a"), "A A A");
    }

    #[test]
    fn shortlex_order() {
        let b = ab();
        let mut ws: Vec<Word> = ["b", "", "A", "a a", "a"]
            .iter()
            .map(|s| b.parse(s).unwrap())
            .collect();
        ws.sort();
        let names: Vec<String> = ws.iter().map(|w| b.format(w)).collect();
        assert_eq!(names, ["", "a", "A", "b", "a a"]);
    }

    #[test]
    fn factor_blocks_group_letters() {
        let b = Basis::free_product(&[vec!["x1", "x2"], vec!["y1"]]).unwrap();
        let w = b.parse("x1 X2 y1 y1 x2").unwrap();
        let blocks: Vec<(usize, usize)> = b
            .factor_blocks(&w)
            .iter()
            .map(|(f, ls)| (*f, ls.len()))
            .collect();
        assert_eq!(blocks, [(0, 2), (1, 2), (0, 1)]);
        let g = b.describe(w.letters()[1]);
        assert_eq!(
            g,
            Generator {
                factor: 0,
                basis_index: 1,
                sign: Sign::Negative
            }
        );
        assert_eq!(b.letter(g).unwrap(), w.letters()[1]);
        assert!(b
            .letter(Generator {
                factor: 1,
                basis_index: 1,
                sign: Sign::Positive
            })
            .is_err());
    }

    #[test]
    fn names_are_validated() {
        assert!(Basis::free(&["A"]).is_err());
        assert!(Basis::free(&["a", "a"]).is_err());
        assert!(Basis::free(&["e"]).is_err());
        assert!(Basis::free(&["x_1", "y2"]).is_ok());
    }

    fn freeinf_basis() -> Basis {
        Basis::free_product(&[vec!["x1", "x2"], vec!["y1", "y2"]]).unwrap()
    }

    #[test]
    fn retraction_kills_y_letters() {
        let b = freeinf_basis();
        let f = Endomorphism::identity(4)
            .with(2, Word::identity())
            .with(3, Word::identity());
        let img = f.apply(&b.parse("y1 x1").unwrap()).unwrap();
        assert_eq!(b.format(&img), "x1");
        assert!(f.apply(&Word::identity()).unwrap().is_identity());
    }

    #[test]
    fn substitution_sends_y_to_z() {
        let b = freeinf_basis();
        let w1 = b.parse("x1 x2").unwrap();
        let z1 = b.parse("y1").unwrap().product(&w1);
        let phi = Endomorphism::identity(4).with(2, z1);
        let img = phi.apply(&b.parse("y1").unwrap()).unwrap();
        assert_eq!(b.format(&img), "y1 x1 x2");
    }

    #[test]
    fn missing_image_is_an_error() {
        let b = ab();
        let e = Endomorphism::empty(2).with(0, Word::identity());
        assert!(matches!(
            e.apply(&b.parse("a b").unwrap()),
            Err(WordError::MissingImage(_))
        ));
    }

    #[test]
    fn self_intersection_has_immediate_witness() {
        let b = freeinf_basis();
        let f = Endomorphism::identity(4)
            .with(2, Word::identity())
            .with(3, Word::identity());
        let p = vec![b.parse("y1").unwrap(), b.parse("y2").unwrap()];
        let report = verify_trivial_intersection(&p, &p, &f, &[Word::identity()], 1).unwrap();
        assert_eq!(report.verdict, IntersectionVerdict::WitnessFound);
        assert_eq!(b.format(&report.witnesses[0].conjugate), "y1");
        assert_eq!(report.witnesses[0].lies_in_p, Some(true));
    }

    #[test]
    fn z_generator_survives_retraction() {
        let b = freeinf_basis();
        let f = Endomorphism::identity(4)
            .with(2, Word::identity())
            .with(3, Word::identity());
        let z1 = b.parse("y1 x1 x2").unwrap();
        assert_eq!(b.format(&f.apply(&z1).unwrap()), "x1 x2");
    }

    #[test]
    fn empty_sample_space_is_rejected() {
        let b = freeinf_basis();
        let f = Endomorphism::identity(4)
            .with(2, Word::identity())
            .with(3, Word::identity());
        let p = vec![b.parse("y1").unwrap()];
        let q = vec![b.parse("y1 x1").unwrap()];
        let id = [Word::identity()];
        assert!(matches!(
            verify_trivial_intersection(&p, &q, &f, &id, 0),
            Err(WordError::BoundTooSmall(_))
        ));
        assert!(matches!(
            verify_trivial_intersection(&p, &[], &f, &id, 3),
            Err(WordError::BoundTooSmall(_))
        ));
        assert!(matches!(
            verify_trivial_intersection(&p, &q, &f, &[], 3),
            Err(WordError::BoundTooSmall(_))
        ));
    }

    #[test]
    fn ball_size_matches_enumeration() {
        for rank in 1..=3 {
            for r in 0..=4 {
                assert_eq!(ball_size(rank, r), reduced_words(rank, r).len() as u128);
            }
        }
        assert_eq!(ball_size(2, 2), 17);
    }

    #[test]
    fn product_is_associative_exhaustively() {
        let words = reduced_words(2, 5);
        assert_eq!(words.len(), 485);
        words.par_iter().for_each(|x| {
            for y in &words {
                let xy = x.product(y);
                for z in &words {
                    assert_eq!(xy.product(z), x.product(&y.product(z)));
                }
            }
        });
    }

    #[test]
    fn reduce_is_idempotent_and_shrinking_exhaustive() {
        // every letter sequence of length <= 5 over rank 2
        let b = ab();
        for len in 0..=5u32 {
            for mut n in 0..4usize.pow(len) {
                let s: Vec<Letter> = (0..len)
                    .map(|_| {
                        let l = Letter::from_code(n % 4);
                        n /= 4;
                        l
                    })
                    .collect();
                let w = b.reduce(&s).unwrap();
                assert!(w.len() <= s.len());
                assert_eq!(b.reduce(w.letters()).unwrap(), w);
                assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
            }
        }
    }

    fn arb_word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0..2 * rank, 0..max)
            .prop_map(|codes| Word::reduced_from(codes.into_iter().map(Letter::from_code)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn endomorphism_is_a_homomorphism(u in arb_word(3, 12), v in arb_word(3, 12),
                                          images in prop::collection::vec(arb_word(3, 4), 3)) {
            let mut e = Endomorphism::empty(3);
            for (g, img) in images.into_iter().enumerate() {
                e.set(g, img);
            }
            let lhs = e.apply(&u.product(&v)).unwrap();
            let rhs = e.apply(&u).unwrap().product(&e.apply(&v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_cancels(u in arb_word(3, 20)) {
            prop_assert!(u.product(&u.inverse()).is_identity());
            prop_assert!(u.inverse().product(&u).is_identity());
        }

        #[test]
        fn parse_format_roundtrip(u in arb_word(3, 20)) {
            let b = Basis::standard(3);
            prop_assert_eq!(b.parse(&b.format(&u)).unwrap(), u);
        }
    }
}
