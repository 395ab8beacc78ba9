// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Display;

use serde::Serialize;
use thiserror::Error;

/// A rejected configuration value and where it lives.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("config error at `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn at(path: impl Into<String>, err: impl Display) -> Self {
        Self::new(path, err.to_string())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("numerical failure during {stage}: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: mmrabi::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attaches a stage label to core failures.
pub trait Stage<T> {
    fn stage(self, stage: &str) -> CliResult<T>;
    /// Core errors raised while turning config into model objects.
    fn config_at(self, path: &str) -> CliResult<T>;
}

impl<T> Stage<T> for mmrabi::Result<T> {
    fn stage(self, stage: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Numerical {
            stage: stage.to_string(),
            source,
        })
    }

    fn config_at(self, path: &str) -> CliResult<T> {
        self.map_err(|e| CliError::Config(ConfigError::at(path, e)))
    }
}
