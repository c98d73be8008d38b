use super::{Formula, View};

const IMPLIES: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const UNARY: u8 = 3;

pub(super) fn print(f: &Formula) -> String {
    let mut out = String::new();
    write(f, IMPLIES, &mut out);
    out
}

fn write(f: &Formula, min_level: u8, out: &mut String) {
    let level = level(f);
    let parens = level < min_level;
    if parens {
        out.push('(');
    }
    match f.view() {
        View::Top => out.push('T'),
        View::Bot => out.push('F'),
        View::Not(a) => {
            out.push('!');
            write(a, UNARY, out);
        }
        View::L(r, a) => {
            out.push_str("L{");
            out.push_str(&r.to_string());
            out.push_str("} ");
            write(a, UNARY, out);
        }
        View::And(a, b) => binary(a, " & ", b, AND, AND + 1, out),
        View::Or(a, b) => binary(a, " | ", b, OR, OR + 1, out),
        View::Implies(a, b) => binary(a, " -> ", b, IMPLIES + 1, IMPLIES, out),
    }
    if parens {
        out.push(')');
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write(a, left, out);
    out.push_str(op);
    write(b, right, out);
}

fn level(f: &Formula) -> u8 {
    match f.view() {
        View::Implies(..) => IMPLIES,
        View::Or(..) => OR,
        View::And(..) => AND,
        _ => UNARY,
    }
}
