use std::fmt;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use fracfib::presentations::{
    build_fractional, build_gnl, build_shift_extension, parse_presentation, FibParams, Presentation,
};
use fracfib::words::FreeWord;

/// A group named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDesc {
    /// `F n k l [omega]`
    Fractional(FibParams),
    /// `E n k l`
    ShiftExtension(FibParams),
    /// `G n l`
    Gnl { n: usize, l: i64 },
    File(PathBuf),
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.parse().with_context(|| format!("bad {what} `{s}`"))
}

impl GroupDesc {
    /// Parses `F n k l [omega]`, `E n k l`, `G n l`, or a single path to a
    /// presentation file. `omega` overrides the `F` form's power when given.
    pub fn parse(args: &[String], omega: Option<u64>) -> Result<GroupDesc> {
        let Some(head) = args.first() else {
            bail!("no group given");
        };
        let rest = &args[1..];
        let desc = match head.as_str() {
            "F" => {
                if !(3..=4).contains(&rest.len()) {
                    bail!("usage: F n k l [omega]");
                }
                let inline = rest.get(3).map(|s| num(s, "omega")).transpose()?;
                GroupDesc::Fractional(FibParams::normalized(
                    num(&rest[0], "n")?,
                    num(&rest[1], "k")?,
                    num(&rest[2], "l")?,
                    omega.or(inline).unwrap_or(0),
                )?)
            }
            "E" => {
                if rest.len() != 3 {
                    bail!("usage: E n k l");
                }
                GroupDesc::ShiftExtension(FibParams::normalized(
                    num(&rest[0], "n")?,
                    num(&rest[1], "k")?,
                    num(&rest[2], "l")?,
                    0,
                )?)
            }
            "G" => {
                if rest.len() != 2 {
                    bail!("usage: G n l");
                }
                GroupDesc::Gnl {
                    n: num(&rest[0], "n")?,
                    l: num(&rest[1], "l")?,
                }
            }
            path => {
                if !rest.is_empty() {
                    bail!("unexpected arguments after file `{path}`");
                }
                GroupDesc::File(PathBuf::from(path))
            }
        };
        Ok(desc)
    }

    pub fn presentation(&self) -> Result<Presentation> {
        Ok(match self {
            GroupDesc::Fractional(p) => build_fractional(p)?,
            GroupDesc::ShiftExtension(p) => build_shift_extension(p)?,
            GroupDesc::Gnl { n, l } => build_gnl(*n, *l)?,
            GroupDesc::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                parse_presentation(&text).with_context(|| format!("parsing {}", path.display()))?
            }
        })
    }

    /// The word `x_0^k ... x_{n-1}^k` for the `F` form.
    pub fn torsion_word(&self) -> Option<FreeWord> {
        match self {
            GroupDesc::Fractional(p) => Some(fracfib::words::cyclic_product(p.n, p.k)),
            _ => None,
        }
    }
}

impl fmt::Display for GroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDesc::Fractional(p) if p.omega == 0 => write!(f, "F^{}/{}({})", p.k, p.l, p.n),
            GroupDesc::Fractional(p) => write!(f, "F^{}/{}({};{})", p.k, p.l, p.n, p.omega),
            GroupDesc::ShiftExtension(p) => write!(f, "E^{}/{}({})", p.k, p.l, p.n),
            GroupDesc::Gnl { n, l } => write!(f, "G({n},{l})"),
            GroupDesc::File(path) => write!(f, "{}", path.display()),
        }
    }
}

/// Parses a word written with the generator names of `p`.
pub fn parse_word(p: &Presentation, text: &str) -> Result<FreeWord> {
    let names = p.names().join(", ");
    let wrapped = format!("< {names} | {text} >");
    let q = parse_presentation(&wrapped).with_context(|| format!("bad word `{text}`"))?;
    match q.relators() {
        [w] => Ok(w.clone()),
        _ => bail!("expected a single word, got `{text}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn builtin_forms() {
        let f = GroupDesc::parse(&args("F 3 -1 2 7"), None).unwrap();
        assert_eq!(f, GroupDesc::Fractional(FibParams::new(3, 1, 2, 7).unwrap()));
        assert_eq!(f.to_string(), "F^1/2(3;7)");
        let f = GroupDesc::parse(&args("F 3 1 2"), Some(4)).unwrap();
        assert_eq!(f, GroupDesc::Fractional(FibParams::new(3, 1, 2, 4).unwrap()));
        assert!(matches!(
            GroupDesc::parse(&args("E 5 2 1"), None).unwrap(),
            GroupDesc::ShiftExtension(_)
        ));
        assert_eq!(
            GroupDesc::parse(&args("G 4 2"), None).unwrap(),
            GroupDesc::Gnl { n: 4, l: 2 }
        );
    }

    #[test]
    fn malformed_forms() {
        assert!(GroupDesc::parse(&args("F 3 1"), None).is_err());
        assert!(GroupDesc::parse(&args("F 3 0 1"), None).is_err());
        assert!(GroupDesc::parse(&args("G x 1"), None).is_err());
        assert!(GroupDesc::parse(&[], None).is_err());
    }

    #[test]
    fn words_use_presentation_names() {
        let p = parse_presentation("< a, b | a^2, b^3 >").unwrap();
        let w = parse_word(&p, "a b^-1").unwrap();
        assert_eq!(w, "x0 x1^-1".parse().unwrap());
        assert!(parse_word(&p, "c").is_err());
    }
}
