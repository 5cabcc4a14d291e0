int sumDigits(long value) {
    if (value < 0)
        value = -value;
    int total=0;
    while (value > 0) {
        total += value%10;
        value /= 10;
    }
    return total;
}
