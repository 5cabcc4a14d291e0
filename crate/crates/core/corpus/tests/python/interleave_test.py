import sys, os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _load import load
f = load()
assert f([1, 3, 5], [2, 4]) == [1, 2, 3, 4, 5]
assert f([], [7]) == [7]
