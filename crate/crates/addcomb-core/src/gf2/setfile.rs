//! The canonical set file format.
//!
//! UTF-8 text: the first significant line is `n=<dim>`, then one element per
//! line as a binary string of exactly `n` characters (most significant
//! coordinate first), strictly ascending. Lines starting with `#` and blank
//! lines are ignored. Writers always emit the canonical form, and the parser
//! rejects unsorted or duplicated elements so that files stay bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::set::F2Set;
use crate::gf2::vector::SET_DIM_MAX;

pub fn to_string(set: &F2Set) -> String {
    let dim = set.dim() as usize;
    let mut out = String::with_capacity(8 + set.len() * (dim + 1));
    out.push_str(&format!("n={}\n", set.dim()));
    for &e in set.bits() {
        out.push_str(&format!("{e:0dim$b}\n"));
    }
    out
}

pub fn parse(text: &str) -> Result<F2Set> {
    let mut dim: Option<u32> = None;
    let mut elems: Vec<u64> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match dim {
            None => {
                let Some(value) = line.strip_prefix("n=") else {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header `n=<dim>`, got `{line}`"),
                    });
                };
                let d: u32 = value.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad dimension `{value}`"),
                })?;
                if d == 0 || d > SET_DIM_MAX {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("dimension {d} out of range 1..={SET_DIM_MAX}"),
                    });
                }
                dim = Some(d);
            }
            Some(d) => {
                if line.len() != d as usize {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected {d} binary digits, got {} (`{line}`)", line.len()),
                    });
                }
                let mut bits = 0u64;
                for c in line.chars() {
                    bits <<= 1;
                    match c {
                        '0' => {}
                        '1' => bits |= 1,
                        other => {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("invalid character `{other}` in element"),
                            })
                        }
                    }
                }
                if let Some(&last) = elems.last() {
                    if bits <= last {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!(
                                "element `{line}` violates strict ascending order (canonical format)"
                            ),
                        });
                    }
                }
                elems.push(bits);
            }
        }
    }
    let Some(d) = dim else {
        return Err(Error::Parse { line: 1, msg: "missing `n=<dim>` header".into() });
    };
    Ok(F2Set::from_sorted_unchecked(d, elems))
}

pub fn read_file<P: AsRef<Path>>(path: P) -> Result<F2Set> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.as_ref().display()),
    })?;
    parse(&text)
}

pub fn write_file<P: AsRef<Path>>(path: P, set: &F2Set) -> Result<()> {
    fs::write(path.as_ref(), to_string(set)).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot write {}: {e}", path.as_ref().display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = F2Set::from_bits(4, [0b0001, 0b1010, 0b1111]).unwrap();
        let text = to_string(&a);
        assert_eq!(text, "n=4\n0001\n1010\n1111\n");
        assert_eq!(parse(&text).unwrap(), a);
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# generated\n\nn=3\n# prefix\n001\n\n010\n";
        let a = parse(text).unwrap();
        assert_eq!(a.bits(), &[1, 2]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("n=3\n001\n0x1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("n=3\n010\n001\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("n=3\n0011\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse("001\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_set_is_representable() {
        let a = parse("n=5\n").unwrap();
        assert!(a.is_empty());
        assert_eq!(a.dim(), 5);
    }
}
