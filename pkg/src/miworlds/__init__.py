"""Many-interacting-worlds oscillator recursions and Stein-method certification."""

__version__ = "0.1.0"
