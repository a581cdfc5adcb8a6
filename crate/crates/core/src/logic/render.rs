use std::fmt;

use super::Formula;

// Binding strength; higher binds tighter.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn write_prec(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(r, args) => {
            write!(out, "{r}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_str(",")?;
                }
                write!(out, "{a}")?;
            }
            out.write_str(")")
        }
        Formula::Eq(a, b) => {
            if min > ATOM - 1 {
                write!(out, "({a} = {b})")
            } else {
                write!(out, "{a} = {b}")
            }
        }
        Formula::Not(g) => {
            out.write_str("!")?;
            write_prec(g, ATOM, out)
        }
        Formula::And(a, b) => binary(a, " & ", b, AND, AND, NOT, min, out),
        Formula::Or(a, b) => binary(a, " | ", b, OR, OR, AND, min, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, IMP, OR, IMP, min, out),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let kw = if matches!(f, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            // a quantifier anywhere but the top of an operand would capture what follows
            if min > 0 {
                out.write_str("(")?;
            }
            write!(out, "{kw} {v}. ")?;
            write_prec(g, 0, out)?;
            if min > 0 {
                out.write_str(")")?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn binary(
    a: &Formula,
    op: &str,
    b: &Formula,
    own: u8,
    left_min: u8,
    right_min: u8,
    min: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let paren = own < min;
    if paren {
        out.write_str("(")?;
    }
    write_prec(a, left_min.max(1), out)?;
    out.write_str(op)?;
    write_prec(b, right_min.max(1), out)?;
    if paren {
        out.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, f)
    }
}

impl Formula {
    /// Concrete syntax accepted by [`super::parse`]; parsing it back yields an equal formula.
    pub fn render(&self) -> String {
        self.to_string()
    }
}
