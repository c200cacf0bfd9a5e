"""
grkex - Unit Tests Package

This directory contains unit tests for the grkex modules. The challenge
matrices used by test_challenge_io live in tests/data.
"""
