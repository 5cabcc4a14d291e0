import sys, os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from _load import load
f = load()
assert f([12, 18, 24]) == 6
assert f([7]) == 7
assert f([]) == 0
