import sys, os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _load import load
f = load()
assert f("listen", "silent")
assert not f("abc", "abd")
