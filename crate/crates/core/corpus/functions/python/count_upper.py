def count_upper(text):
    total=0
    for ch in text:
        if ch.isalpha() and ch.isupper():
            total = total+1
    return max(total, 0)
