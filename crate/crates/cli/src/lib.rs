//! Pipelines and fixtures for the eNe toolkit CLI.
