"""Non-destructive discrimination of orthogonal quantum states by phase estimation."""
