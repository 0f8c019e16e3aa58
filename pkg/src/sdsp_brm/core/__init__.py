"""Domain model, validation, playback tasks and command dispatch."""
