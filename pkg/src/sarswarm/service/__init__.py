"""HTTP service wrapping the core planning and simulation package."""
