"""Shared test setup: jit kernels are warmed before any timed test runs."""

from adaptswarm.nn import warmup

warmup()
