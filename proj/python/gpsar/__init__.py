"""Rough-surface ground-penetrating SAR workbench."""

try:
    from . import _gpsar
except ImportError:  # in-tree build: the extension sits next to this package
    import _gpsar

globals().update({k: v for k, v in vars(_gpsar).items() if not k.startswith("_")})
__all__ = [k for k in vars(_gpsar) if not k.startswith("_")]
