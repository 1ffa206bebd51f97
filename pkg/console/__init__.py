from console.catalog import read_catalog, write_catalog
from console.manifest import RunManifest, write_manifest
from console.settings import load_config

__all__ = [
    "read_catalog",
    "write_catalog",
    "RunManifest",
    "write_manifest",
    "load_config",
]
