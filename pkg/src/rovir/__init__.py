"""Region-optimized virtual-coil weights."""
