"""Angular curvature measures of polytopes."""
