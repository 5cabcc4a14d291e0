def gcd_list(numbers):
    g=0
    for n in numbers:
        a, b = abs(n), g
        while b:
            a, b = b, a%b
        g = a
    return max(g, 0)
