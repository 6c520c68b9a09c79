"""# Core signal modules: I/O types, filtering, segmentation, localization, features."""
