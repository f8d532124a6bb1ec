"""Configuration loading, initial data, the eps sweep and its artifacts."""
