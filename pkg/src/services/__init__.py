"""This directory contains helper scripts for the `src` folder: logging, timing, file formats and worker pools."""
