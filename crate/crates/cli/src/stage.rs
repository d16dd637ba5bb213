use std::fmt;
use std::str::FromStr;

use crate::error::CliError;

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Tag,
    Parse,
    Extract,
    Classify,
    Lexicon,
    Rerank,
    Evaluate,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Tag,
        Stage::Parse,
        Stage::Extract,
        Stage::Classify,
        Stage::Lexicon,
        Stage::Rerank,
        Stage::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Tag => "tag",
            Stage::Parse => "parse",
            Stage::Extract => "extract",
            Stage::Classify => "classify",
            Stage::Lexicon => "lexicon",
            Stage::Rerank => "rerank",
            Stage::Evaluate => "evaluate",
        }
    }

    /// Parse a comma-separated list (or `all`) into sorted, deduplicated stages.
    pub fn parse_list(s: &str) -> Result<Vec<Stage>, CliError> {
        if s.trim() == "all" {
            return Ok(Stage::ALL.to_vec());
        }
        let mut out = s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Stage>, _>>()?;
        if out.is_empty() {
            return Err(CliError::Config("no stages given".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown stage `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(
            Stage::parse_list("lexicon, tag,tag").unwrap(),
            [Stage::Tag, Stage::Lexicon]
        );
        assert_eq!(Stage::parse_list("all").unwrap().len(), 7);
        assert!(Stage::parse_list("tag,frobnicate").is_err());
        assert!(Stage::parse_list("").is_err());
    }
}
