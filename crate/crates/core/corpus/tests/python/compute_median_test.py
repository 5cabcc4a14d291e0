import sys, os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _load import load
f = load()
assert f([3, 1, 2]) == 2
assert f([4, 1, 3, 2]) == 2.5
