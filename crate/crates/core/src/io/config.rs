use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::ExperimentConfig;

/// Parses and validates a TOML experiment config. Unknown keys are rejected
/// and omitted keys take their defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// The config with every default filled in, re-emitted with sorted keys.
pub fn canonical_text(config: &ExperimentConfig) -> Result<String> {
    let value = toml::Value::try_from(config).map_err(|e| Error::Config(e.to_string()))?;
    toml::to_string(&value).map_err(|e| Error::Config(e.to_string()))
}

/// Hex SHA-256 of [`canonical_text`].
pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_text(config)?.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SigmaSpec;

    const MINIMAL: &str = "replications = 50\n[model]\nn = 40\nm = 3\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.replications, 50);
        assert_eq!(c.target_multiplier, 20);
        assert_eq!(c.model.sigma, SigmaSpec::Schedule { kappa: 1.0, a: 0.75, b: 0.5 });
    }

    #[test]
    fn canonical_round_trip() {
        let c = parse_config(MINIMAL).unwrap();
        let text = canonical_text(&c).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(canonical_text(&back).unwrap(), text);
        assert_eq!(config_hash(&back).unwrap(), config_hash(&c).unwrap());
    }

    #[test]
    fn key_order_does_not_change_hash() {
        let a = parse_config("replications = 50\n[model]\nn = 40\nm = 3\nseed = 7\n").unwrap();
        let b = parse_config("replications = 50\n[model]\nseed = 7\nm = 3\nn = 40\n").unwrap();
        assert_eq!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }

    #[test]
    fn rejections() {
        let neg = "[model]\nn = 40\nm = 3\nsigma = { kind = \"fixed\", value = -0.1 }\n";
        assert!(matches!(parse_config(neg), Err(Error::InvalidModel(_))));
        let unknown = "[model]\nn = 40\nm = 3\nbogus = 1\n";
        match parse_config(unknown) {
            Err(Error::Config(msg)) => assert!(msg.contains("bogus"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("replications = 1\n[model]\nn = 4\nm = 1\n"), Err(Error::Config(_))));
    }
}
