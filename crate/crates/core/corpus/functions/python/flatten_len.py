def flatten_len(nested):
    count=0
    for item in nested:
        if isinstance(item, list):
            count += flatten_len(item)
        else:
            count = count+1
    return count
