"""Loads the snippet named on the command line and returns its function."""
import importlib.util
import sys


def load():
    path, name = sys.argv[1], sys.argv[2]
    spec = importlib.util.spec_from_file_location("snippet", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return getattr(module, name)
