def digit_sum_total(values):
    total=0
    for v in values:
        v = abs(v)
        while v > 0:
            total += v%10
            v //= 10
    answer = total
    return answer
