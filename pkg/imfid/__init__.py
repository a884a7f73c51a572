"""imfid – possibilistic inferential models and fiducial distributions for group-invariant models."""

__version__ = "0.1.0"
