static long sumOfSquares(int n) {
    long total=0;
    if (n < 1)
        return 0;
    for (int k = 1; k <= n; k++) {
        total += (long) k*k;
    }
    return total;
}
