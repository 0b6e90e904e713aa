use super::Formula;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Imp(..) | Formula::Sub(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

pub(super) fn print(f: &Formula) -> String {
    let mut out = String::new();
    write_at(f, 0, &mut out);
    out
}

fn write_at(f: &Formula, level: u8, out: &mut String) {
    if precedence(f) < level {
        out.push('(');
        write_bare(f, out);
        out.push(')');
    } else {
        write_bare(f, out);
    }
}

fn write_bare(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Top => out.push('T'),
        Formula::Bot => out.push('F'),
        Formula::And(l, r) => {
            write_at(l, 2, out);
            out.push_str(" & ");
            write_at(r, 3, out);
        }
        Formula::Or(l, r) => {
            write_at(l, 1, out);
            out.push_str(" | ");
            write_at(r, 2, out);
        }
        Formula::Imp(l, r) => {
            write_at(l, 1, out);
            out.push_str(" -> ");
            let rhs_level = if matches!(r.as_ref(), Formula::Imp(..)) { 0 } else { 1 };
            write_at(r, rhs_level, out);
        }
        Formula::Sub(l, r) => {
            let lhs_level = if matches!(l.as_ref(), Formula::Sub(..)) { 0 } else { 1 };
            write_at(l, lhs_level, out);
            out.push_str(" -< ");
            write_at(r, 1, out);
        }
        Formula::Box(i, g) => write_unary(&format!("[]{i}"), g, out),
        Formula::Dia(j, g) => write_unary(&format!("<>{j}"), g, out),
        Formula::TDia(i, g) => write_unary(&format!("<|{i}"), g, out),
        Formula::TBox(j, g) => write_unary(&format!("|>{j}"), g, out),
        Formula::Common(g) => write_unary("C", g, out),
    }
}

fn write_unary(op: &str, body: &Formula, out: &mut String) {
    out.push_str(op);
    out.push(' ');
    write_at(body, 3, out);
}
