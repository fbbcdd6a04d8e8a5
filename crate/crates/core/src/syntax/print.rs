use std::fmt;

use crate::syntax::Formula;

// Binding strength; higher binds tighter.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const FUSE: u8 = 4;
const UNARY: u8 = 5;
const ATOMIC: u8 = 6;

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Fuse(..) => FUSE,
        Formula::Delta(_) | Formula::Tau(..) | Formula::Upsilon(..) => UNARY,
        Formula::Atom(_) | Formula::Const(_) | Formula::Modal(..) => ATOMIC,
    }
}

fn operand(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => f.write_str(p),
            Formula::Const(c) => write!(f, "c({c})"),
            Formula::Imp(a, b) => {
                operand(f, a, strength(a) <= IMP)?;
                f.write_str(" -> ")?;
                operand(f, b, strength(b) < IMP)
            }
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Fuse(a, b) => {
                let (op, s) = match self {
                    Formula::Or(..) => (" | ", OR),
                    Formula::And(..) => (" & ", AND),
                    _ => (" * ", FUSE),
                };
                operand(f, a, strength(a) < s)?;
                f.write_str(op)?;
                operand(f, b, strength(b) <= s)
            }
            Formula::Delta(a) => {
                f.write_str("D ")?;
                operand(f, a, strength(a) < UNARY)
            }
            Formula::Tau(c, a) => {
                write!(f, "tau[{c}] ")?;
                operand(f, a, strength(a) < UNARY)
            }
            Formula::Upsilon(c, a) => {
                write!(f, "up[{c}] ")?;
                operand(f, a, strength(a) < UNARY)
            }
            Formula::Modal(m, args) => {
                write!(f, "<{m}>(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}
