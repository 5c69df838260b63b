//! Flag value parsers.

use spincoh::C64;

/// Parses `re+imi`, `re-imi`, `re`, `imi`, `i` and `-i`.
pub fn complex(text: &str) -> Result<C64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse {text:?} as a complex number (expected e.g. 0.3-0.2i)");
    let real = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite());
    let Some(body) = s.strip_suffix('i') else {
        return real(&s).map(|re| C64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => real(t),
    };
    let (re, im) = match split {
        Some(k) => (real(&body[..k]), imag(&body[k..])),
        None => (Some(0.0), imag(body)),
    };
    match (re, im) {
        (Some(re), Some(im)) => Ok(C64::new(re, im)),
        _ => Err(bad()),
    }
}

/// A comma-separated flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

pub fn complex_list(text: &str) -> Result<List<C64>, String> {
    text.split(',').map(complex).collect::<Result<_, _>>().map(List)
}

pub fn u32_list(text: &str) -> Result<List<u32>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

/// `TWO_S,alpha`.
pub fn coherent_source(text: &str) -> Result<(u32, C64), String> {
    let (two_s, alpha) = text
        .split_once(',')
        .ok_or_else(|| format!("expected TWO_S,ALPHA, got {text:?}"))?;
    let two_s = two_s
        .trim()
        .parse::<u32>()
        .map_err(|e| format!("TWO_S {two_s:?}: {e}"))?;
    Ok((two_s, complex(alpha)?))
}

/// `a,b,beta,TWO_S`.
pub fn superposition_source(text: &str) -> Result<(C64, C64, C64, u32), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b, beta, two_s] = parts[..] else {
        return Err(format!("expected A,B,BETA,TWO_S, got {text:?}"));
    };
    let two_s = two_s
        .trim()
        .parse::<u32>()
        .map_err(|e| format!("TWO_S {two_s:?}: {e}"))?;
    Ok((complex(a)?, complex(b)?, complex(beta)?, two_s))
}
