static int countDivisors(int n) {
    int divisors=0;
    if (n < 1)
        return 0;
    for (int d = 1; d <= n; d++) {
        if (n%d == 0) {
            divisors++;
        }
    }
    return divisors;
}
