//! Threshold grid specifications.
//!
//! Accepted forms: `default` (0.001 to 0.2 in steps of 0.001), a single
//! value `0.02`, a list `0.01,0.02,0.05`, or an inclusive range
//! `start:stop:step`. Values are sorted and de-duplicated.

use nbvoi_core::Threshold;

use crate::error::CliError;

pub fn parse_grid(spec: &str) -> Result<Vec<Threshold>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "default" {
        return Ok(Threshold::default_grid());
    }
    let mut values = if spec.contains(':') {
        parse_range(spec)?
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
        .into_iter()
        .map(|z| Threshold::new(z).map_err(CliError::from))
        .collect()
}

fn number(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("threshold '{}' is not a number", s.trim())))
}

fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts = spec.split(':').map(number).collect::<Result<Vec<_>, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Usage(format!("range '{spec}' must be start:stop:step")));
    };
    if [start, stop, step].iter().any(|v| v.is_nan()) || step <= 0.0 || stop < start {
        return Err(CliError::Usage(format!("range '{spec}' is empty or has a non-positive step")));
    }
    let steps = ((stop - start) / step + 1e-9).floor();
    if steps > 1e6 {
        return Err(CliError::Usage(format!("range '{spec}' has too many points")));
    }
    // snapping to 12 decimals makes 0.001:0.2:0.001 reproduce k/1000 exactly
    Ok((0..=steps as usize)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
