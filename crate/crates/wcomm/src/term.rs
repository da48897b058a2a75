//! Terms over a signature, with variables in named blocks.
//!
//! Commutator terms speak about three blocks of variables — weights `w1..`,
//! left arguments `x1..`, right arguments `y1..`. A fourth block `a1..`
//! (ambient) appears only in normal-closure certificates, where a witness
//! may conjugate or multiply by an arbitrary element of the parent algebra.
//! Terms serialize in prefix notation: `mul(inv(x1), mul(inv(y1), mul(x1,
//! y1)))`; nullary operations print as their bare name.

use std::fmt::Write as _;

use crate::algebra::Signature;

/// Variable block a [`Term`] variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    /// Weight variables `w1..`.
    W,
    /// Left argument variables `x1..`.
    X,
    /// Right argument variables `y1..`.
    Y,
    /// Ambient variables `a1..`, ranging over the whole parent algebra.
    Ambient,
}

impl Block {
    /// One-letter prefix used in serialized variables.
    pub fn letter(self) -> char {
        match self {
            Block::W => 'w',
            Block::X => 'x',
            Block::Y => 'y',
            Block::Ambient => 'a',
        }
    }
}

/// Number of variables per block; used when shifting a term onto fresh
/// variables so two independently-witnessed terms can be combined under one
/// assignment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlockSizes {
    pub w: u16,
    pub x: u16,
    pub y: u16,
    pub ambient: u16,
}

impl BlockSizes {
    pub fn get(&self, block: Block) -> u16 {
        match block {
            Block::W => self.w,
            Block::X => self.x,
            Block::Y => self.y,
            Block::Ambient => self.ambient,
        }
    }

    fn bump(&mut self, block: Block, idx: u16) {
        let slot = match block {
            Block::W => &mut self.w,
            Block::X => &mut self.x,
            Block::Y => &mut self.y,
            Block::Ambient => &mut self.ambient,
        };
        *slot = (*slot).max(idx);
    }
}

/// A term over a signature: a variable from a block, or an operation
/// applied to subterms. Operations are referenced by index into the
/// signature, so printing needs the signature for the names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// A variable; indices are 1-based within the block.
    Var(Block, u16),
    /// `App(op, args)`: operation `op` of the signature applied to `args`.
    App(u16, Vec<Term>),
}

impl Term {
    /// Variable constructor (1-based index).
    pub fn var(block: Block, index: u16) -> Term {
        debug_assert!(index >= 1, "variable indices are 1-based");
        Term::Var(block, index)
    }

    /// Operation application constructor.
    pub fn app(op: usize, args: Vec<Term>) -> Term {
        Term::App(op as u16, args)
    }

    /// Number of nodes; the primary key of the canonical-witness order.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(..) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Largest variable index used per block.
    pub fn var_span(&self) -> BlockSizes {
        fn walk(t: &Term, acc: &mut BlockSizes) {
            match t {
                Term::Var(b, i) => acc.bump(*b, *i),
                Term::App(_, args) => {
                    for a in args {
                        walk(a, acc);
                    }
                }
            }
        }
        let mut acc = BlockSizes::default();
        walk(self, &mut acc);
        acc
    }

    /// The same term over fresh variables: every index in block `b` is
    /// shifted up by `offsets.get(b)`.
    pub fn shifted(&self, offsets: &BlockSizes) -> Term {
        match self {
            Term::Var(b, i) => Term::Var(*b, i + offsets.get(*b)),
            Term::App(op, args) => {
                Term::App(*op, args.iter().map(|a| a.shifted(offsets)).collect())
            }
        }
    }

    /// Replace every variable by the term the mapping produces for it.
    pub fn substitute(&self, f: &impl Fn(Block, u16) -> Term) -> Term {
        match self {
            Term::Var(b, i) => f(*b, *i),
            Term::App(op, args) => Term::App(*op, args.iter().map(|a| a.substitute(f)).collect()),
        }
    }

    /// Prefix-notation rendering, e.g. `mul(inv(x1), y2)`; nullary
    /// operations print as their bare name.
    pub fn display(&self, sig: &Signature) -> String {
        let mut out = String::new();
        self.write(sig, &mut out);
        out
    }

    fn write(&self, sig: &Signature, out: &mut String) {
        match self {
            Term::Var(b, i) => {
                let _ = write!(out, "{}{}", b.letter(), i);
            }
            Term::App(op, args) => {
                out.push_str(&sig.ops()[*op as usize].name);
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        a.write(sig, out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{OpDecl, Signature};

    fn group_sig() -> Signature {
        Signature::new(vec![
            OpDecl::new("mul", 2),
            OpDecl::new("inv", 1),
            OpDecl::new("e", 0),
        ])
        .unwrap()
    }

    #[test]
    fn prefix_display_matches_the_serialization_format() {
        let sig = group_sig();
        // mul(inv(x1), mul(inv(y1), mul(x1, y1)))
        let t = Term::app(
            0,
            vec![
                Term::app(1, vec![Term::var(Block::X, 1)]),
                Term::app(
                    0,
                    vec![
                        Term::app(1, vec![Term::var(Block::Y, 1)]),
                        Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 1)]),
                    ],
                ),
            ],
        );
        assert_eq!(t.display(&sig), "mul(inv(x1), mul(inv(y1), mul(x1, y1)))");
        assert_eq!(t.size(), 9);
    }

    #[test]
    fn nullary_prints_bare() {
        let sig = group_sig();
        assert_eq!(Term::app(2, vec![]).display(&sig), "e");
    }

    #[test]
    fn shifting_moves_only_the_named_blocks() {
        let t = Term::app(0, vec![Term::var(Block::X, 1), Term::var(Block::Y, 2)]);
        let shifted = t.shifted(&BlockSizes {
            w: 5,
            x: 3,
            y: 0,
            ambient: 0,
        });
        assert_eq!(
            shifted,
            Term::app(0, vec![Term::var(Block::X, 4), Term::var(Block::Y, 2)])
        );
        let span = shifted.var_span();
        assert_eq!((span.w, span.x, span.y, span.ambient), (0, 4, 2, 0));
    }
}
