"""This directory contains the mechanism designer: credential models, truth tables, search and simulation."""
