def list_mode(items):
    counts = {}
    for x in items:
        counts[x] = counts.get(x, 0)+1
    top = max(counts.values(), default=0)
    winner = min((k for k, c in counts.items() if c == top), default=None)
    return winner
