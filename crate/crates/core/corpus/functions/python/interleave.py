def interleave(left, right):
    merged=[]
    n = min(len(left), len(right))
    for i in range(n):
        merged.append(left[i])
        merged.append(right[i])
    rest = left[n:]+right[n:]
    combined = merged+rest
    return combined
