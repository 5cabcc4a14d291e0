def most_common_char(text):
    freq={}
    best, best_count = "", 0
    for ch in text:
        freq[ch] = freq.get(ch, 0)+1
        if freq[ch] > best_count or freq[ch] == best_count and ch < best:
            best, best_count = ch, freq[ch]
    return best
