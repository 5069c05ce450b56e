use super::ast::*;
use std::fmt::Write;

/// Deterministic text form; parsing it yields the same tree.
pub fn to_canonical_string(q: &QueryAst) -> String {
    let mut out = String::new();
    write_node(q, &mut out);
    out
}

fn quote(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn bound(b: DateBound, out: &mut String) {
    match b {
        DateBound::Date(d) => write!(out, "{}", d.format("%Y-%m-%d")).unwrap(),
        DateBound::NowMinusDays(0) => out.push_str("NOW"),
        DateBound::NowMinusDays(n) => write!(out, "NOW-{n}DAYS").unwrap(),
        DateBound::Open => out.push('*'),
    }
}

fn grouped(q: &QueryAst, out: &mut String) {
    out.push('(');
    write_node(q, out);
    out.push(')');
}

fn write_node(q: &QueryAst, out: &mut String) {
    match q {
        QueryAst::Term(t) => out.push_str(t),
        QueryAst::Phrase(p) => quote(p, out),
        QueryAst::Field { name, value, anchored } => {
            out.push_str(name.name());
            out.push(':');
            if *anchored {
                quote(&format!("^{value}"), out);
            } else {
                quote(value, out);
            }
        }
        QueryAst::YearRange(lo, hi) if lo == hi => write!(out, "year:{lo}").unwrap(),
        QueryAst::YearRange(lo, hi) => write!(out, "year:{lo}-{hi}").unwrap(),
        QueryAst::DateRange(lo, hi) => {
            out.push_str("entdate:[");
            bound(*lo, out);
            out.push_str(" TO ");
            bound(*hi, out);
            out.push(']');
        }
        QueryAst::And(children) => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match c {
                    QueryAst::And(_) => grouped(c, out),
                    _ => write_node(c, out),
                }
            }
        }
        QueryAst::Or(children) => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                match c {
                    QueryAst::And(_) | QueryAst::Or(_) => grouped(c, out),
                    _ => write_node(c, out),
                }
            }
        }
        QueryAst::Not(c) => {
            out.push('-');
            match **c {
                QueryAst::And(_) | QueryAst::Or(_) | QueryAst::Not(_) => grouped(c, out),
                _ => write_node(c, out),
            }
        }
        QueryAst::OpCall { kind, arg } => {
            out.push_str(kind.name());
            out.push('(');
            match arg {
                OpArg::Query(c) => write_node(c, out),
                OpArg::RawText(t) => {
                    quote(t, out);
                    out.push_str(",input");
                }
            }
            out.push(')');
        }
        QueryAst::TopN { n, child, sort } => {
            write!(out, "topn({n},").unwrap();
            write_node(child, out);
            write!(out, ",{sort})").unwrap();
        }
        QueryAst::Docs(name) => write!(out, "docs(library/{name})").unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse;

    #[test]
    fn trivial_forms() {
        assert_eq!(to_canonical_string(&QueryAst::Term("weak".into())), "weak");
        assert_eq!(
            to_canonical_string(&QueryAst::negate(QueryAst::Term("mmt".into()))),
            "-mmt"
        );
    }

    #[test]
    fn canonical_spellings() {
        let cases = [
            ("author:^adams", r#"author:"^adams""#),
            ("year:2019-2019", "year:2019"),
            ("topn(5, x)", "topn(5,x,score desc)"),
            ("a (b c) OR d", "a (b c) OR d"),
            ("-(a OR b)", "-(a OR b)"),
            ("-(-a)", "-(-a)"),
            (r#"similar( "t\"x" , input )"#, r#"similar("t\"x",input)"#),
            ("entdate:[NOW-0DAYS TO 2020-01-01]", "entdate:[NOW TO 2020-01-01]"),
        ];
        for (input, expected) in cases {
            assert_eq!(to_canonical_string(&parse(input).unwrap()), expected);
        }
    }
}
