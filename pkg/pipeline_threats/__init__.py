"""Threat modeling as code for software development pipelines."""
