//! Parameter resolution: defaults, then `--config`, then the environment,
//! then flags.

use std::path::Path;

use wanderlab::construction::default_gamma;
use wanderlab::{ConstructionParams, ParamOverrides};

use crate::args::GlobalArgs;

pub const SIG_BITS_ENV: &str = "WANDERLAB_SIG_BITS";
pub const DEFAULT_MAX_LEVEL: usize = 20;

/// Why parameters could not be resolved. Every variant is a usage error.
#[derive(Debug)]
pub struct ParamError(pub String);

impl std::fmt::Display for ParamError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn from_flags(g: &GlobalArgs) -> ParamOverrides {
    ParamOverrides {
        gamma: g.gamma,
        delta: g.delta,
        max_level: g.max_level,
        samples: g.samples,
        sig_bits: g.sig_bits,
    }
}

fn from_config(path: &Path) -> Result<ParamOverrides, ParamError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParamError(format!("cannot read config {}: {e}", path.display())))?;
    ParamOverrides::parse(&text).map_err(|e| ParamError(format!("config {}: {e}", path.display())))
}

fn from_env(value: Option<String>) -> Result<ParamOverrides, ParamError> {
    let sig_bits = match value {
        None => None,
        Some(v) => Some(
            v.trim()
                .parse()
                .map_err(|_| ParamError(format!("{SIG_BITS_ENV} must be an integer, got {v:?}")))?,
        ),
    };
    Ok(ParamOverrides {
        sig_bits,
        ..ParamOverrides::default()
    })
}

/// Layers the sources and fills what is left with defaults. The default `γ`
/// is 10% above the threshold for the resolved `max_level`.
pub fn resolve(g: &GlobalArgs, env_sig_bits: Option<String>) -> Result<ConstructionParams, ParamError> {
    let mut layered = ParamOverrides::default();
    if let Some(path) = &g.config {
        layered = layered.overlay(&from_config(path)?);
    }
    layered = layered.overlay(&from_env(env_sig_bits)?).overlay(&from_flags(g));

    let mut params = ConstructionParams {
        // Placeholder so the other fields can be validated before the
        // threshold search, which needs a valid max_level.
        gamma: layered.gamma.unwrap_or(f64::MAX),
        delta: layered.delta.unwrap_or(ConstructionParams::DEFAULT_DELTA),
        max_level: layered.max_level.unwrap_or(DEFAULT_MAX_LEVEL),
        samples: layered.samples.unwrap_or(ConstructionParams::DEFAULT_SAMPLES),
        sig_bits: layered.sig_bits.unwrap_or(ConstructionParams::DEFAULT_SIG_BITS),
    };
    params.validate().map_err(|e| ParamError(e.to_string()))?;
    if layered.gamma.is_none() {
        params.gamma = default_gamma(params.max_level).map_err(|e| ParamError(e.to_string()))?;
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn globals() -> GlobalArgs {
        GlobalArgs {
            gamma: Some(60.0),
            delta: None,
            max_level: None,
            samples: None,
            sig_bits: None,
            config: None,
            manifest: None,
        }
    }

    #[test]
    fn layers_in_order() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "delta: 0.02\nsig_bits: 80\nsamples = 64").unwrap();
        let mut g = globals();
        g.config = Some(file.path().to_path_buf());
        let p = resolve(&g, None).unwrap();
        assert_eq!((p.delta, p.sig_bits, p.samples), (0.02, 80, 64));
        let p = resolve(&g, Some("96".into())).unwrap();
        assert_eq!(p.sig_bits, 96);
        g.sig_bits = Some(128);
        let p = resolve(&g, Some("96".into())).unwrap();
        assert_eq!((p.gamma, p.sig_bits, p.max_level), (60.0, 128, DEFAULT_MAX_LEVEL));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut g = globals();
        g.gamma = Some(-3.0);
        assert!(resolve(&g, None).is_err());
        assert!(resolve(&globals(), Some("many".into())).is_err());
        let mut g = globals();
        g.max_level = Some(2);
        assert!(resolve(&g, None).is_err());
        let mut g = globals();
        g.config = Some("/nonexistent/wanderlab.conf".into());
        assert!(resolve(&g, None).is_err());
    }

    #[test]
    fn default_gamma_tracks_max_level() {
        let mut g = globals();
        g.gamma = None;
        g.max_level = Some(10);
        let p = resolve(&g, None).unwrap();
        assert_eq!(p.gamma, default_gamma(10).unwrap());
    }
}
