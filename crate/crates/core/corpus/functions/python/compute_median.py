def compute_median(values):
    ordered=sorted(values)
    n, mid = len(ordered), len(ordered)//2
    if n % 2 == 1:
        return ordered[mid]
    result = (ordered[mid-1]+ordered[mid]) / 2
    return result
