import sys, os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _load import load
f = load()
assert f([1, [2, 3], [[4]], []]) == 4
assert f([]) == 0
