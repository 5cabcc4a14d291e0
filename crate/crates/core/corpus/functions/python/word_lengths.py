def word_lengths(sentence):
    words=sentence.split()
    longest, total = 0, 0
    for w in words:
        longest = max(longest, len(w))
        total += len(w)
    return total-longest
