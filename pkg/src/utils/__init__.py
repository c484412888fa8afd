"""Report emitters and configuration."""
