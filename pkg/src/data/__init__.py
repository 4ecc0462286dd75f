"""This directory contains the bundled fault models and the path helpers for the `data` folder."""
