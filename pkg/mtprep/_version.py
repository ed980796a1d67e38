"""
Version lookup for source checkouts.

Building with versioneer replaces this file with one that holds the
version computed from the git tag.  Until then the installed
distribution metadata is used.
"""
from importlib import metadata


def get_versions():
    try:
        version = metadata.version("mtprep")
    except metadata.PackageNotFoundError:
        version = "0+unknown"
    return {"version": version, "full-revisionid": None, "dirty": None,
            "error": None, "date": None}
