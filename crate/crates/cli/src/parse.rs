//! Parsers for the compact command-line value syntaxes.

use shepard_core::pointset::DomainSpec;
use shepard_core::shepard::TestFunction;

use crate::Failure;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

pub fn numbers(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("not a number: {s:?}")))
        })
        .collect()
}

pub fn sizes(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("not a size: {s:?}")))
        })
        .collect()
}

fn split_kind(text: &str) -> Result<(&str, &str), Failure> {
    text.split_once(':')
        .ok_or_else(|| Failure::Usage(format!("expected kind:values, got {text:?}")))
}

/// `box:lo1,hi1,...` or `ball:c1,...,cd,r`.
pub fn domain(text: &str) -> Result<DomainSpec, Failure> {
    let (kind, rest) = split_kind(text)?;
    let v = numbers(rest)?;
    match kind {
        "box" => {
            if v.is_empty() || v.len() % 2 != 0 {
                return usage("box domain needs lo,hi pairs");
            }
            let lo = v.iter().step_by(2).copied().collect();
            let hi = v.iter().skip(1).step_by(2).copied().collect();
            Ok(DomainSpec::new_box(lo, hi)?)
        }
        "ball" => {
            if v.len() < 2 {
                return usage("ball domain needs a center and a radius");
            }
            let (c, r) = v.split_at(v.len() - 1);
            Ok(DomainSpec::new_ball(c.to_vec(), r[0])?)
        }
        other => usage(format!("unknown domain kind {other:?} (box or ball)")),
    }
}

/// Test function in dimension `d`; `None` gives the distance to the domain
/// center.
pub fn function(text: Option<&str>, d: usize, domain: &DomainSpec) -> Result<TestFunction, Failure> {
    let Some(text) = text else {
        let (lo, hi) = domain.bounds();
        let anchor = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        return Ok(TestFunction::DistanceToPoint { anchor, scale: 1.0 });
    };
    let (kind, rest) = split_kind(text)?;
    let v = numbers(rest)?;
    let want = |k: usize| -> Result<(), Failure> {
        if v.len() == k {
            Ok(())
        } else {
            usage(format!(
                "{kind} in dimension {d} takes {k} numbers, got {}",
                v.len()
            ))
        }
    };
    let f = match kind {
        "constant" => {
            want(1)?;
            TestFunction::Constant { value: v[0] }
        }
        "affine" => {
            want(d + 1)?;
            TestFunction::Affine {
                gradient: v[..d].to_vec(),
                offset: v[d],
            }
        }
        "distance" => {
            want(d)?;
            TestFunction::DistanceToPoint {
                anchor: v,
                scale: 1.0,
            }
        }
        "ball" => {
            want(d + 1)?;
            TestFunction::DistanceToBall {
                center: v[..d].to_vec(),
                radius: v[d],
                scale: 1.0,
            }
        }
        "sine" => {
            want(1)?;
            TestFunction::SineSum { frequency: v[0] }
        }
        other => return usage(format!("unknown function kind {other:?}")),
    };
    f.validate(d)?;
    Ok(f)
}
