long fibonacciIter(int n) {
    long a = 0;
    long b = 1;
    for (int step = 0; step < n; step++) {
        long next = a+b;
        a=b;
        b = next;
    }
    return a;
}
