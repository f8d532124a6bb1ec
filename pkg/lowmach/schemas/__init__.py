"""Pydantic models for configuration and reports."""
