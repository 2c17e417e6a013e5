use std::fmt;

use crate::error::{Error, Result};

/// A generator `a_i` or `b_i` of the surface group, or its inverse.
///
/// Encoded as a nonzero integer: `a_i = 2i - 1`, `b_i = 2i`, negated for the
/// inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    /// `a_i`, with handles numbered from 1.
    pub fn a(handle: usize) -> Self {
        assert!(handle >= 1);
        Letter(2 * handle as i32 - 1)
    }

    /// `b_i`, with handles numbered from 1.
    pub fn b(handle: usize) -> Self {
        assert!(handle >= 1);
        Letter(2 * handle as i32)
    }

    pub fn inv(self) -> Self {
        Letter(-self.0)
    }

    pub fn handle(self) -> usize {
        (self.0.unsigned_abs() as usize).div_ceil(2)
    }

    pub fn is_a(self) -> bool {
        self.0.unsigned_abs() % 2 == 1
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn exponent(self) -> i64 {
        self.0.signum() as i64
    }

    fn write(self, f: &mut fmt::Formatter<'_>, show_handle: bool) -> fmt::Result {
        let name = if self.is_a() { 'a' } else { 'b' };
        write!(f, "{name}")?;
        if show_handle {
            write!(f, "{}", self.handle())?;
        }
        if self.is_inverse() {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// Removes adjacent cancelling pairs until none remain.
///
/// A stack scan produces the unique fully reduced sequence, whatever order the
/// pairs would have been deleted in.
pub fn clip<T: Copy>(seq: impl IntoIterator<Item = T>, cancels: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in seq {
        match out.last() {
            Some(top) if cancels(top, &x) => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

pub(crate) fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    clip(letters, |a, b| a.inv() == *b)
}

/// A freely reduced word over `a_1, b_1, …, a_g, b_g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceWord {
    genus: usize,
    letters: Vec<Letter>,
}

impl SurfaceWord {
    pub fn new(genus: usize, letters: Vec<Letter>) -> Result<Self> {
        if let Some(l) = letters.iter().find(|l| l.handle() > genus) {
            return Err(Error::Parse(format!(
                "generator of handle {} does not exist in genus {genus}",
                l.handle()
            )));
        }
        Ok(SurfaceWord {
            genus,
            letters: free_reduce(letters),
        })
    }

    pub fn empty(genus: usize) -> Self {
        SurfaceWord {
            genus,
            letters: Vec::new(),
        }
    }

    pub(crate) fn from_reduced(genus: usize, letters: Vec<Letter>) -> Self {
        debug_assert_eq!(free_reduce(letters.iter().copied()), letters);
        SurfaceWord { genus, letters }
    }

    /// Parses whitespace-separated letters such as `a1 b1 a1^-1 b1^-1`.
    /// `a` and `b` without an index mean handle 1; `1` or `e` is the empty word.
    pub fn parse(genus: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" || tok == "e" || tok == "empty" {
                continue;
            }
            letters.push(parse_letter(tok)?);
        }
        SurfaceWord::new(genus, letters)
    }

    /// The relator `∏ [a_i, b_i] = a_1 b_1 a_1⁻¹ b_1⁻¹ ⋯ a_g b_g a_g⁻¹ b_g⁻¹`.
    pub fn relator(genus: usize) -> Self {
        let letters = (1..=genus)
            .flat_map(|i| {
                [
                    Letter::a(i),
                    Letter::b(i),
                    Letter::a(i).inv(),
                    Letter::b(i).inv(),
                ]
            })
            .collect();
        SurfaceWord { genus, letters }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reverse-inverse word.
    pub fn inverse(&self) -> Self {
        SurfaceWord {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }
}

fn parse_letter(tok: &str) -> Result<Letter> {
    let bad = || Error::Parse(format!("bad letter `{tok}`"));
    let (body, inverse) = match tok.split_once('^') {
        Some((body, "-1")) => (body, true),
        Some((body, "1")) => (body, false),
        Some(_) => return Err(bad()),
        None => (tok, false),
    };
    let mut chars = body.chars();
    let kind = chars.next().ok_or_else(bad)?;
    let rest = chars.as_str();
    let handle = if rest.is_empty() {
        1
    } else {
        rest.parse::<usize>().map_err(|_| bad())?
    };
    if handle == 0 {
        return Err(bad());
    }
    let letter = match kind {
        'a' => Letter::a(handle),
        'b' => Letter::b(handle),
        _ => return Err(bad()),
    };
    Ok(if inverse { letter.inv() } else { letter })
}

impl fmt::Display for SurfaceWord {
    /// Genus 1 words print without handle indices (`a b^-1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "empty");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            l.write(f, self.genus != 1)?;
        }
        Ok(())
    }
}
