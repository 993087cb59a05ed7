//! Finite binary words addressing nodes of a binary tree.
//!
//! A word is a sequence of letters over `{0, 1}`; the empty word is the
//! root. Words are packed into a `u128` (letter `j` lives at bit `j`), so
//! depths up to 128 are representable. Tree height grows like `4.31 ln n`,
//! so this accommodates trees beyond `10^12` nodes.

use core::fmt;

/// Maximum representable depth.
pub const MAX_DEPTH: u32 = 128;

/// A node address: a finite word over `{0, 1}`, root = empty word.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeWord {
    depth: u32,
    bits: u128,
}

impl NodeWord {
    /// The empty word (tree root).
    pub const ROOT: NodeWord = NodeWord { depth: 0, bits: 0 };

    /// Builds a word from letters, first letter = step taken at the root.
    ///
    /// Panics if any letter is not 0/1 or the word is longer than
    /// [`MAX_DEPTH`].
    pub fn from_letters(letters: &[u8]) -> Self {
        let mut w = Self::ROOT;
        for &b in letters {
            assert!(b <= 1, "letters must be 0 or 1");
            w = w.child(b);
        }
        w
    }

    /// Parses a word from its letter string, e.g. `"01"`; empty means root.
    pub fn parse(s: &str) -> Option<Self> {
        let mut w = Self::ROOT;
        for c in s.chars() {
            match c {
                '0' => w = w.child(0),
                '1' => w = w.child(1),
                _ => return None,
            }
        }
        Some(w)
    }

    /// Number of letters.
    #[inline]
    pub fn depth(self) -> u32 {
        self.depth
    }

    #[inline]
    pub fn is_root(self) -> bool {
        self.depth == 0
    }

    /// Letter at position `j` (0-based from the root).
    #[inline]
    pub fn letter(self, j: u32) -> u8 {
        debug_assert!(j < self.depth);
        ((self.bits >> j) & 1) as u8
    }

    /// The word extended by one letter.
    #[inline]
    pub fn child(self, letter: u8) -> Self {
        debug_assert!(letter <= 1);
        assert!(self.depth < MAX_DEPTH, "node word depth limit exceeded");
        NodeWord {
            depth: self.depth + 1,
            bits: self.bits | ((letter as u128) << self.depth),
        }
    }

    /// Parent word, `None` at the root.
    #[inline]
    pub fn parent(self) -> Option<Self> {
        if self.depth == 0 {
            None
        } else {
            let d = self.depth - 1;
            Some(NodeWord {
                depth: d,
                bits: self.bits & !(1u128 << d),
            })
        }
    }

    /// The sibling (same parent, last letter flipped), `None` at the root.
    #[inline]
    pub fn sibling(self) -> Option<Self> {
        if self.depth == 0 {
            None
        } else {
            Some(NodeWord {
                depth: self.depth,
                bits: self.bits ^ (1u128 << (self.depth - 1)),
            })
        }
    }

    /// Whether `self` is a prefix of `other` (every word prefixes itself).
    #[inline]
    pub fn is_prefix_of(self, other: Self) -> bool {
        if self.depth > other.depth {
            return false;
        }
        let mask = if self.depth == 0 {
            0
        } else {
            u128::MAX >> (128 - self.depth)
        };
        (other.bits & mask) == self.bits
    }

    /// Strict ancestor test.
    #[inline]
    pub fn is_ancestor_of(self, other: Self) -> bool {
        self.depth < other.depth && self.is_prefix_of(other)
    }

    /// Iterates over the letters from the root.
    pub fn letters(self) -> impl Iterator<Item = u8> {
        (0..self.depth).map(move |j| self.letter(j))
    }

    /// The word with `letter` prepended at the root side (used when grafting
    /// a subtree one level down).
    #[inline]
    pub fn prepend(self, letter: u8) -> Self {
        debug_assert!(letter <= 1);
        assert!(self.depth < MAX_DEPTH, "node word depth limit exceeded");
        NodeWord {
            depth: self.depth + 1,
            bits: (self.bits << 1) | letter as u128,
        }
    }

    /// The path read as a big-endian integer: `sum(letter_j * 2^(d-1-j))`.
    ///
    /// This is the numerator of the left endpoint of the dyadic interval
    /// the word encodes (denominator `2^depth`).
    #[inline]
    pub fn path_value(self) -> u128 {
        if self.depth == 0 {
            0
        } else {
            self.bits.reverse_bits() >> (128 - self.depth)
        }
    }
}

impl fmt::Display for NodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            return f.write_str("e");
        }
        for b in self.letters() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeWord({self})")
    }
}
