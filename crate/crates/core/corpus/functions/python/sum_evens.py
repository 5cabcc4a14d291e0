def sum_evens(limit):
    s, k = 0, 0
    while k <= limit:
        s += k
        k=k+2
    return s
